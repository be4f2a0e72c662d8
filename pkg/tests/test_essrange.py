"""Essential numerical range of block diagonal operators.

The essential range is the hull of the limsup cloud; every test here pins it
against something computable by hand (cycles, explicit limits, translations)
or against the independent intersection-of-window-hulls route, whose gap is
carried on the result as ``crosscheck_gap``.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from blockrange import (
    BlockOperatorSpec,
    ConvexRegion,
    InconsistentResult,
    PeriodicTail,
    ValidationError,
    diagonal_essential_range,
    essential_numerical_range,
    hausdorff,
    numerical_range,
    translate_spec,
)
from blockrange.essrange import _cluster_accumulation, _consistency_gate

from helpers import (
    DIAG23,
    NILPOTENT,
    constant_spec,
    mat,
    scalar_periodic_spec,
    two_matrix_spec,
    vanishing_spec,
)


class TestExactCases:
    def test_constant_blocks_give_plain_range(self):
        res = essential_numerical_range(constant_spec(NILPOTENT))
        nr = numerical_range(NILPOTENT)
        assert hausdorff(res.region, nr.inner) < 1e-12
        assert res.crosscheck_gap < 1e-12

    def test_alternating_signs_give_segment(self):
        res = essential_numerical_range(scalar_periodic_spec([1.0, -1.0]))
        assert_allclose(
            np.sort_complex(res.region.vertices), [-1 + 0j, 1 + 0j], atol=1e-12
        )

    def test_two_matrix_cycle(self):
        res = essential_numerical_range(two_matrix_spec())
        pts = np.concatenate([
            numerical_range(NILPOTENT).inner.vertices,
            numerical_range(DIAG23).inner.vertices,
        ])
        want = ConvexRegion.from_points(pts)
        assert hausdorff(res.region, want) < 1e-12

    def test_prefix_is_invisible(self):
        base = essential_numerical_range(scalar_periodic_spec([2j, 1.0]))
        noisy = essential_numerical_range(
            scalar_periodic_spec([2j, 1.0], prefix=[100.0, -50j, 3.0])
        )
        assert hausdorff(base.region, noisy.region) < 1e-12

    def test_vanishing_tail_hull_of_limits(self):
        spec = vanishing_spec([NILPOTENT.entries.tolist(), [[1.5]]], c=0.5, p=1.0)
        res = essential_numerical_range(spec)
        pts = np.concatenate(
            [numerical_range(NILPOTENT).inner.vertices, [1.5 + 0j]]
        )
        want = ConvexRegion.from_points(pts)
        assert hausdorff(res.region, want) <= res.tolerance

    def test_certificate_and_tolerance_recorded(self):
        res = essential_numerical_range(two_matrix_spec())
        assert res.certificate == ((1, 0.0),)
        assert res.converged_at == 1
        assert res.crosscheck_gap <= res.tolerance


class TestTranslation:
    @pytest.mark.parametrize("z", [1.0 + 0j, -2.5j, 0.75 - 0.25j])
    def test_shifting_spec_shifts_region(self, z):
        spec = two_matrix_spec()
        base = essential_numerical_range(spec)
        moved = essential_numerical_range(translate_spec(spec, z))
        assert hausdorff(moved.region, base.region.translate(-z)) < 1e-10

    def test_translate_composes(self):
        spec = translate_spec(translate_spec(constant_spec(DIAG23), 1.0), 1j)
        assert spec.shift == 1 + 1j
        assert_allclose(spec.block(5).entries, np.diag([2, 3]) - (1 + 1j) * np.eye(2))


class TestDiagonalRoute:
    def test_reciprocal_sequence_collapses_to_origin(self):
        spec = vanishing_spec([[[0.0]]], c=1.0, p=1.0)
        res = diagonal_essential_range(spec)
        assert np.abs(res.region.vertices).max() <= res.tolerance

    def test_triangle_of_scalar_limits(self):
        spec = vanishing_spec([[[0.0]], [[1.0]], [[1j]]], c=0.3, p=1.0, seed=4)
        res = diagonal_essential_range(spec)
        want = ConvexRegion.from_points(np.array([0, 1, 1j]))
        assert hausdorff(res.region, want) <= res.tolerance

    def test_periodic_scalar_choices(self):
        res = diagonal_essential_range(scalar_periodic_spec([1.0, 1j, -1.0]))
        want = ConvexRegion.from_points(np.array([1, 1j, -1]))
        assert hausdorff(res.region, want) < 1e-6

    def test_matrix_blocks_rejected(self):
        with pytest.raises(ValidationError):
            diagonal_essential_range(two_matrix_spec())

    def test_cluster_accumulation_merges_nearby(self):
        pts = np.array([0.0, 1e-4, 1.0, 1.0 + 1e-4j, -2j])
        reps = _cluster_accumulation(pts, 1e-2)
        assert len(reps) == 3
        reps = _cluster_accumulation(pts, 1e-6)
        assert len(reps) == 5


class TestConsistencyGate:
    def test_within_budget_passes(self):
        _consistency_gate(0.5, 0.1, "probe")  # 0.5 <= 10 * 0.1

    def test_beyond_budget_raises(self):
        with pytest.raises(InconsistentResult):
            _consistency_gate(1.5, 0.1, "probe")

    def test_dual_route_agreement_on_random_periodic(self, rng):
        # intersection of window hulls must match hull of the limsup cloud
        cycle = tuple(
            mat(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
            for _ in range(3)
        )
        res = essential_numerical_range(BlockOperatorSpec((), PeriodicTail(cycle)))
        assert res.crosscheck_gap <= res.tolerance
