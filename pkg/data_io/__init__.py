"""Datasets: point generators, similarity graphs, image ingestion and graph families."""

from data_io.graphs import block_partition, cliques_with_bridges, disjoint_cliques, planted_partition
from data_io.images import decode_netpbm, gen_segmented_image, image_to_points, read_image, write_ppm
from data_io.points import PointCloud, gen_gaussians, gen_twomoons, read_points_csv, write_points_csv
from data_io.similarity import SimilarityConfig, build_similarity_graph

__all__ = [
    "PointCloud",
    "SimilarityConfig",
    "block_partition",
    "build_similarity_graph",
    "cliques_with_bridges",
    "decode_netpbm",
    "disjoint_cliques",
    "gen_gaussians",
    "gen_segmented_image",
    "gen_twomoons",
    "image_to_points",
    "planted_partition",
    "read_image",
    "read_points_csv",
    "write_points_csv",
    "write_ppm",
]
