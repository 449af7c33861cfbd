"""Unit tests for the dataset generators, similarity graphs and image ingestion."""

from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from common.errors import DomainError, ParseError
from data_io import (
    PointCloud,
    SimilarityConfig,
    block_partition,
    build_similarity_graph,
    cliques_with_bridges,
    decode_netpbm,
    disjoint_cliques,
    gen_gaussians,
    gen_segmented_image,
    gen_twomoons,
    image_to_points,
    planted_partition,
    read_image,
    read_points_csv,
    write_points_csv,
    write_ppm,
)
from data_io.images import encode_ppm
from metrics.quality import misclassification_ratio
from spectral import spectral_cluster


# point generators


def test_twomoons_even_split() -> None:
    pc = gen_twomoons(1000, seed=1)
    assert pc.n == 1000 and pc.dim == 2
    np.testing.assert_array_equal(pc.truth.sizes(), [500, 500])


def test_twomoons_without_noise_lies_on_unit_half_circles() -> None:
    pc = gen_twomoons(200, noise=0.0)
    outer = pc.points[pc.truth.assignment == 0]
    inner = pc.points[pc.truth.assignment == 1]
    np.testing.assert_allclose(np.linalg.norm(outer, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(inner - [1.0, 0.5], axis=1), 1.0, atol=1e-12)
    assert outer[:, 1].min() >= -1e-12
    assert inner[:, 1].max() <= 0.5 + 1e-12


def test_generators_are_deterministic_per_seed() -> None:
    np.testing.assert_array_equal(gen_twomoons(100, seed=3).points, gen_twomoons(100, seed=3).points)
    assert not np.array_equal(gen_twomoons(100, seed=3).points, gen_twomoons(100, seed=4).points)
    np.testing.assert_array_equal(gen_gaussians(90, seed=5).points, gen_gaussians(90, seed=5).points)
    assert not np.array_equal(gen_gaussians(90, seed=5).points, gen_gaussians(90, seed=6).points)


def test_gaussian_component_counts() -> None:
    n = 3000
    counts = gen_gaussians(n, seed=7).truth.sizes()
    sigma = math.sqrt(n * (1 / 3) * (2 / 3))
    assert counts.sum() == n
    assert np.all(np.abs(counts - n / 3) <= 4 * sigma)


def test_gaussians_without_variance_are_point_masses() -> None:
    pc = gen_gaussians(30, variance=0.0, seed=2)
    assert np.unique(pc.points, axis=0).shape[0] == 3
    for part in range(3):
        members = pc.points[pc.truth.assignment == part]
        np.testing.assert_array_equal(members, np.broadcast_to(members[0], members.shape))


@pytest.mark.parametrize("call", [lambda: gen_twomoons(1), lambda: gen_gaussians(2), lambda: gen_gaussians(10, variance=-1.0)])
def test_generator_preconditions(call) -> None:
    with pytest.raises(DomainError):
        call()


def test_point_cloud_validation() -> None:
    with pytest.raises(DomainError):
        PointCloud(np.array([[0.0, np.nan]]))
    with pytest.raises(DomainError):
        PointCloud(np.zeros(3))


def test_points_csv_round_trip(tmp_path) -> None:
    pc = gen_gaussians(12, seed=1)
    path = tmp_path / "points.csv"
    write_points_csv(pc, path)
    np.testing.assert_array_equal(read_points_csv(path).points, pc.points)


def test_points_csv_errors_name_the_line(tmp_path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("0.0,1.0\n2.0,x\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        read_points_csv(path)
    assert info.value.line == 2
    path.write_text("0.0,1.0\n2.0\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_points_csv(path)


# similarity graphs


def test_kernel_weight_examples() -> None:
    sigma = 0.7
    points = np.array([[0.0, 0.0], [0.0, 0.0], [sigma * math.sqrt(2.0), 0.0]])
    g = build_similarity_graph(PointCloud(points), SimilarityConfig(sigma=sigma))
    assert g.weight(0, 1) == pytest.approx(1.0)
    assert g.weight(0, 2) == pytest.approx(math.exp(-1.0))
    assert g.weight(1, 2) == pytest.approx(math.exp(-1.0))


def test_three_point_weights_match_the_kernel() -> None:
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    g = build_similarity_graph(PointCloud(points), SimilarityConfig(sigma=1.0))
    assert g.weight(0, 1) == pytest.approx(math.exp(-0.5))
    assert g.weight(0, 2) == pytest.approx(math.exp(-2.0))
    assert g.weight(1, 2) == pytest.approx(math.exp(-2.5))


def test_similarity_graph_is_complete_and_bounded() -> None:
    pc = gen_gaussians(60, seed=3)
    g = build_similarity_graph(pc, SimilarityConfig(sigma=1.0))
    assert g.m == 60 * 59 // 2
    assert np.all((g.edge_w > 0.0) & (g.edge_w <= 1.0))
    assert np.all(g.edge_u < g.edge_v)
    dense = g.adjacency.toarray()
    np.testing.assert_array_equal(dense, dense.T)
    assert np.all(np.diag(dense) == 0.0)


def test_weight_floor_drops_far_pairs() -> None:
    points = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.1, 0.0]])
    g = build_similarity_graph(PointCloud(points), SimilarityConfig(sigma=1.0, weight_floor=1e-6))
    assert g.m == 2
    assert g.connected_components()[0] == 2


def test_similarity_config_validation() -> None:
    with pytest.raises(ValidationError):
        SimilarityConfig(sigma=0.0)
    with pytest.raises(ValidationError):
        SimilarityConfig(sigma=1.0, weight_floor=-0.1)


# images


def test_two_by_two_image_points() -> None:
    pixels = np.array([[[1, 2, 3], [4, 5, 6]], [[7, 8, 9], [10, 11, 12]]])
    pc = image_to_points(encode_ppm(pixels))
    np.testing.assert_array_equal(
        pc.points,
        [[0, 0, 1, 2, 3], [1, 0, 4, 5, 6], [0, 1, 7, 8, 9], [1, 1, 10, 11, 12]],
    )


def test_plain_ppm_with_comments() -> None:
    data = b"P3\n# a comment\n2 1\n255\n255 0 0   0 0 255\n"
    np.testing.assert_array_equal(decode_netpbm(data), [[[255, 0, 0], [0, 0, 255]]])


def test_grayscale_replicates_channels() -> None:
    plain = decode_netpbm(b"P2\n2 2\n15\n0 5\n10 15\n")
    binary = decode_netpbm(b"P5\n2 2\n255\n" + bytes([0, 5, 10, 15]))
    for image in (plain, binary):
        pc = image_to_points(image)
        np.testing.assert_array_equal(pc.points[:, 2], pc.points[:, 3])
        np.testing.assert_array_equal(pc.points[:, 3], pc.points[:, 4])
        np.testing.assert_array_equal(pc.points[:, 2], [0, 5, 10, 15])


def test_sixteen_bit_binary_raster() -> None:
    data = b"P6\n1 1\n65535\n" + bytes([0x01, 0x00, 0x00, 0xFF, 0xFF, 0xFF])
    np.testing.assert_array_equal(decode_netpbm(data), [[[256, 255, 65535]]])


@pytest.mark.parametrize(
    "data",
    [
        b"P7\n1 1\n255\n",
        b"P3\n2 2\n255\n1 2 3\n",
        b"P6\n2 2\n255\n\x00\x01",
        b"P3\n1 1\n10\n11 0 0\n",
        b"P3\n1",
        b"P3\nx 1\n255\n0 0 0\n",
    ],
)
def test_malformed_images_raise_parse_errors(data: bytes) -> None:
    with pytest.raises(ParseError):
        decode_netpbm(data)


def test_full_scale_image_point_count(tmp_path) -> None:
    pixels, truth = gen_segmented_image(160, 73, k=3, seed=1)
    path = tmp_path / "image.ppm"
    write_ppm(pixels, path)
    np.testing.assert_array_equal(read_image(path), pixels)
    pc = image_to_points(path)
    assert pc.n == 11_680 == truth.n
    assert pc.dim == 5


def test_segmented_image_bands() -> None:
    pixels, truth = gen_segmented_image(9, 4, k=3, noise=0.0)
    assert pixels.shape == (4, 9, 3)
    np.testing.assert_array_equal(truth.sizes(), [12, 12, 12])
    np.testing.assert_array_equal(pixels[0, 0], pixels[3, 2])
    assert not np.array_equal(pixels[0, 2], pixels[0, 3])


# graph families


def test_clique_families() -> None:
    g = disjoint_cliques(3, 5)
    assert g.m == 3 * 10
    assert g.connected_components()[0] == 3
    bridged = cliques_with_bridges(3, 5, bridges=2)
    assert bridged.m == 30 + 4
    assert bridged.has_edge(0, 5) and bridged.has_edge(6, 11)
    np.testing.assert_array_equal(block_partition([2, 3]).assignment, [0, 0, 1, 1, 1])


def test_planted_partition_is_seeded() -> None:
    g, truth = planted_partition([20, 20], 0.5, 0.05, seed=4)
    again, _ = planted_partition([20, 20], 0.5, 0.05, seed=4)
    assert g == again
    same = truth.assignment[g.edge_u] == truth.assignment[g.edge_v]
    assert same.sum() > (~same).sum()


# downstream clustering quality


@pytest.mark.slow
def test_twomoons_spectral_clustering_quality() -> None:
    pc = gen_twomoons(1000, seed=0)
    g = build_similarity_graph(pc, SimilarityConfig(sigma=0.1))
    assert misclassification_ratio(spectral_cluster(g, 2, seed=0), pc.truth).err <= 0.03


@pytest.mark.slow
def test_gaussians_spectral_clustering_quality() -> None:
    pc = gen_gaussians(1000, seed=0)
    g = build_similarity_graph(pc, SimilarityConfig(sigma=1.0))
    assert misclassification_ratio(spectral_cluster(g, 3, seed=0), pc.truth).err <= 0.04
