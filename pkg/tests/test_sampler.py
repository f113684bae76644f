import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densemark.errors import DomainError
from densemark.geom import TemplateMesh
from densemark.geom import snap_uv_to_vertices
from densemark.sampler import (DEDUP_TOL, SamplerConfig, build_mirror_table,
                               iterate_sampling, merge_keep_manual,
                               run_sampling, snap_to_vertices)

from conftest import keyset
from oracles import linear_scan_nearest

TRIANGLE = [(0.1, 0.1), (0.9, 0.1), (0.5, 0.9)]


class TestSamplerConfig:
    def test_default_is_19_unique(self):
        cfg = SamplerConfig()
        assert len(cfg.seed_indices68) == 19
        assert cfg.seed_tags().count("seed-nose") == 1
        assert cfg.seed_tags().count("seed-jaw") == 18

    def test_wrong_count_rejected(self):
        with pytest.raises(DomainError):
            SamplerConfig(seed_indices68=tuple(range(18)))

    def test_duplicates_rejected(self):
        with pytest.raises(DomainError):
            SamplerConfig(seed_indices68=(0,) * 19)

    def test_iterations_positive(self):
        with pytest.raises(DomainError):
            SamplerConfig(iterations=0)


class TestIterateSampling:
    def test_one_iteration_adds_single_centroid(self):
        out = iterate_sampling(TRIANGLE, 1)
        assert len(out.points) == 4
        assert out.tags[-1] == "centroid-iter1"

    def test_two_iterations_split_into_three(self):
        # round 1: centroid splits the triangle into 3; round 2 adds their
        # centroids -> 3 + 1 + 3 = 7
        out = iterate_sampling(TRIANGLE, 2)
        assert len(out.points) == 7
        assert out.tags.count("centroid-iter2") == 3

    def test_cardinality_strictly_increases(self):
        sizes = [len(iterate_sampling(TRIANGLE, k).points)
                 for k in range(1, 5)]
        assert sizes == sorted(set(sizes))
        assert all(b > a for a, b in zip(sizes, sizes[1:]))

    @given(seed=st.integers(0, 1000))
    @settings(max_examples=15, deadline=None)
    def test_no_near_duplicates_survive(self, seed):
        rng = np.random.default_rng(seed)
        seeds = rng.random((6, 2))
        try:
            out = iterate_sampling(seeds, 2)
        except Exception:
            return
        pts = out.points
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        np.fill_diagonal(d2, np.inf)
        assert d2.min() > DEDUP_TOL * DEDUP_TOL

    def test_tags_length_matches(self):
        out = iterate_sampling(TRIANGLE, 3, seed_tags=("seed-jaw",) * 3)
        assert len(out.tags) == len(out.points)


class TestSnap:
    def test_exact_vertex_hit(self, small_mesh):
        keys = snap_to_vertices(np.array([[0.5, 0.5]]), small_mesh)
        assert keys.indices.tolist() == [4]

    def test_tie_prefers_lowest_index(self):
        uv = np.array([[0.2, 0.0], [0.3, 0.0], [0.4, 0.0], [0.2, 0.0]])
        mesh = TemplateMesh(np.zeros((4, 3)), uv)
        # query equidistant between uv[1] and uv[2]
        keys = snap_to_vertices(np.array([[0.35, 0.0]]), mesh)
        assert keys.indices.tolist() == [1]

    def test_random_against_linear_scan(self, ref_mesh):
        rng = np.random.default_rng(17)
        pts = rng.random((100, 2))
        raw = snap_uv_to_vertices(pts, ref_mesh)
        oracle = linear_scan_nearest(pts, ref_mesh.uv)
        assert raw.tolist() == oracle
        keys = snap_to_vertices(pts, ref_mesh)
        deduped = list(dict.fromkeys(oracle))
        assert keys.indices.tolist() == deduped

    def test_dedup_keeps_first_tag(self, small_mesh):
        pts = np.array([[0.49, 0.5], [0.51, 0.5]])  # both snap to vertex 4
        keys = snap_to_vertices(pts, small_mesh,
                                tags=("seed-jaw", "centroid-iter1"))
        assert keys.indices.tolist() == [4]
        assert keys.provenance == ("seed-jaw",)

    def test_empty_input_rejected(self, small_mesh):
        with pytest.raises(DomainError):
            snap_to_vertices(np.zeros((0, 2)), small_mesh)


class TestMirrorTable:
    def test_axis_point_self_mirrors(self, small_mesh):
        keys = keyset([1], small_mesh.vertex_count)  # uv (0.5, 0)
        mirrored = build_mirror_table(keys, small_mesh)
        assert mirrored.mirror.tolist() == [0]

    def test_exact_reflection_pair(self):
        uv = np.array([[0.3, 0.4], [0.7, 0.4], [0.5, 0.9]])
        mesh = TemplateMesh(np.zeros((3, 3)), uv)
        keys = keyset([0, 1, 2], 3)
        mirrored = build_mirror_table(keys, mesh)
        assert mirrored.mirror.tolist() == [1, 0, 2]

    def test_unreciprocated_match_self_mirrors(self):
        # 0 reflects near 1, but 1's reflection lands nearest to 2;
        # reconciliation keeps everything consistent
        uv = np.array([[0.30, 0.5], [0.68, 0.5], [0.32, 0.5]])
        mesh = TemplateMesh(np.zeros((3, 3)), uv)
        mirrored = build_mirror_table(keyset([0, 1, 2], 3), mesh)
        m = mirrored.mirror
        assert np.array_equal(m[m], np.arange(3))

    def test_full_520_involution(self, ref_keys520):
        m = ref_keys520.mirror
        assert np.array_equal(m[m], np.arange(len(m)))
        assert len(ref_keys520) == 520


class TestReferenceRegression:
    def test_frozen_cardinality_and_indices(self, ref_mesh, ref_landmarks68,
                                            frozen_sampling):
        cfg = SamplerConfig(
            seed_indices68=tuple(frozen_sampling["config"]["seedIndices68"]),
            iterations=frozen_sampling["config"]["iterations"],
            snap_dedup=frozen_sampling["config"]["snapDedup"])
        keys = run_sampling(ref_mesh, ref_landmarks68, cfg)
        assert len(keys) == frozen_sampling["cardinality"]
        assert keys.indices.tolist() == frozen_sampling["indices"]
        assert keys.mirror.tolist() == frozen_sampling["mirror"]
        assert list(keys.provenance) == frozen_sampling["provenance"]

    def test_provenance_composition(self, frozen_sampling):
        tags = frozen_sampling["provenance"]
        assert tags.count("seed-jaw") == 18
        assert tags.count("seed-nose") == 1
        assert tags.count("centroid-iter1") > 0
        assert tags.count("centroid-iter3") > tags.count("centroid-iter1")


class TestMergeManual:
    def test_manual_entries_survive_rerun(self, ref_mesh, ref_landmarks68):
        fresh = run_sampling(ref_mesh, ref_landmarks68)
        manual_vertices = [7, 11, 13]
        existing = keyset(
            manual_vertices + [int(fresh.indices[5])],
            ref_mesh.vertex_count,
            provenance=("manual", "manual", "manual", "centroid-iter1"))
        merged = merge_keep_manual(existing, fresh, ref_mesh)
        assert merged.version == existing.version + 1
        got = merged.indices.tolist()
        assert got[:3] == manual_vertices
        for tag, idx in zip(merged.provenance, got):
            if idx in manual_vertices:
                assert tag == "manual"
        assert len(set(got)) == len(got)

    def test_fresh_duplicate_of_manual_dropped(self, ref_mesh,
                                               ref_landmarks68):
        fresh = run_sampling(ref_mesh, ref_landmarks68)
        manual_vertex = int(fresh.indices[0])
        existing = keyset([manual_vertex], ref_mesh.vertex_count,
                          provenance=("manual",))
        merged = merge_keep_manual(existing, fresh, ref_mesh)
        assert merged.indices.tolist().count(manual_vertex) == 1
        assert merged.provenance[0] == "manual"
