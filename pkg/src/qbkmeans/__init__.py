"""Balanced k-means clustering as a QUBO, with exact and simulated-annealing solvers."""

from .baselines import KMeansConfig, balanced_kmeans, kmeans
from .dataspace import Dataset, SyntheticSpec, generate_synthetic, load_iris, read_csv, subset_balanced, write_csv
from .metrics import adjusted_rand_index, contingency, estimate_anneal_time, estimate_embedding_time
from .qubo import (
    ClusterAssignment,
    QuboInstance,
    build_permutation,
    build_qubo,
    decode,
    distance_matrix,
    encode,
    energy,
    feasible_objective,
    penalty_weights,
    variance_objective,
)
from .report import RunReport
from .solvers import AnnealConfig, SolveResult, cluster_qubo, solve_anneal, solve_exact

__version__ = "0.1.0"
