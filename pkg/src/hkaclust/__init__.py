"""Heuristic Kalman Algorithm clustering (HKA and the HKA-K hybrid)."""

from .clustering import (
    ClusteringResult,
    HkakParams,
    clustering_objective,
    decode,
    encode,
    hka_cluster,
    hkak_cluster,
    init_from_data,
)
from .data import Dataset, bounding_hyperbox, generate_artset1, generate_artset2, load_csv, load_dataset
from .kmeans import assign_points, kmeans_full, kmeans_step, update_centroids
from .metrics import adjusted_rand_index, davies_bouldin, intra_distance, wilcoxon_rank_sum
from .optimizer import Bounds, GaussianSearchState, HkaParams, hka_minimize

__version__ = "0.1.0"
