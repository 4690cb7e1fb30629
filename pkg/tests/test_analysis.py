import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracharm import cs_extension as cse
from fracharm.analysis import (
    blowup_sequence,
    default_threshold,
    extrapolated_density,
    holder_exponent,
    mean_oscillation,
    reliable_radii,
    rescale,
    singular_set,
    tangent_classify,
)
from fracharm.energy import LatticeMap, LineGrid
from fracharm.errors import BadRadii, CoverageExceeded, InsufficientRadii
from fracharm.manifold import circle

E1 = np.array([1.0, 0.0])
S = 0.25
REF = LineGrid(-1, 1, 1 / 32, 2)
PROBES = [-0.5, -0.25, -0.0625, 0.0, 0.0625, 0.25, 0.5]


@pytest.fixture(scope="module")
def jump():
    return LatticeMap.jump(LineGrid(-1, 1, 1 / 32, 2), E1, -E1)


def ext(u):
    return cse.poisson_extend(u, cse.HalfRectGrid(-1.5, 1.5, 1.5, 1 / 32, 1 / 32), S)


class TestRescale:
    def test_jump_invariant(self, jump):
        w = rescale(jump, 0.0, 0.25, LineGrid(-1, 1, 1 / 32, 2))
        np.testing.assert_array_equal(w.values, jump.values)

    @settings(max_examples=30)
    @given(st.floats(-0.5, 0.5), st.floats(0.05, 0.5))
    def test_pointwise(self, x0, rho):
        g = LineGrid(-1, 1, 1 / 32, 2)
        u = LatticeMap.from_function(g, lambda x: [math.cos(3 * x), math.sin(3 * x)])
        ref = LineGrid(-1, 1, 1 / 16, 2)
        w = rescale(u, x0, rho, ref)
        np.testing.assert_array_equal(w.values, u(x0 + rho * ref.centers))

    def test_coverage(self, jump):
        with pytest.raises(CoverageExceeded):
            rescale(jump, 0.5, 1.0, REF)


class TestTangents:
    def test_jump_exact(self, jump):
        tc = tangent_classify(blowup_sequence(jump, 0.0, [0.25, 0.125, 0.0625], REF), circle(), 0.25)
        assert tc.kind == "jump" and tc.residual == 0.0
        np.testing.assert_array_equal(tc.a, E1)
        np.testing.assert_array_equal(tc.b, -E1)

    @pytest.mark.parametrize("x0", [-0.5, 0.25])
    def test_constant_away(self, jump, x0):
        tc = tangent_classify(blowup_sequence(jump, x0, [0.25, 0.125, 0.0625], REF), circle(), 0.25)
        assert tc.kind == "constant"

    @pytest.mark.parametrize("x0", PROBES)
    def test_minimizer_constant(self, minimizer_h32, x0):
        rep, _ = minimizer_h32
        tc = tangent_classify(blowup_sequence(rep.final_map, x0, [0.25, 0.125, 0.0625], REF), circle(), 0.25)
        assert tc.kind == "constant"

    def test_needs_three_scales(self, jump):
        with pytest.raises(InsufficientRadii):
            tangent_classify(blowup_sequence(jump, 0.0, [0.25, 0.125], REF), circle(), 0.25)

    def test_scales_decreasing(self, jump):
        with pytest.raises(BadRadii):
            blowup_sequence(jump, 0.0, [0.125, 0.25, 0.0625], REF)

    def test_to_dict(self, jump):
        tc = tangent_classify(blowup_sequence(jump, 0.0, [0.25, 0.125, 0.0625], REF), circle(), 0.25)
        assert json.loads(json.dumps(tc.to_dict()))["kind"] == "jump"


class TestSingularSet:
    def test_reliable(self):
        np.testing.assert_array_equal(reliable_radii([0.0625, 0.125, 0.25], 1 / 32), [0.125, 0.25])

    def test_jump_flags_neighbourhood(self, jump):
        rep = singular_set(jump, ext(jump), default_threshold(S), PROBES, [0.125, 0.25, 0.5], S)
        np.testing.assert_array_equal(rep.flagged, [-0.0625, 0.0, 0.0625])
        i0 = PROBES.index(0.0)
        assert rep.theta[i0] == pytest.approx(cse.jump_density(E1, -E1, S), rel=1e-6)

    def test_minimizer_nothing(self, minimizer_h32):
        rep, _ = minimizer_h32
        u = rep.final_map
        out = singular_set(u, ext(u), default_threshold(S), PROBES, [0.125, 0.25, 0.5], S)
        assert out.flagged.size == 0

    def test_needs_radii(self, jump):
        with pytest.raises(InsufficientRadii):
            extrapolated_density(ext(jump), 0.0, [0.0625, 0.125], 1 / 32, S)

    def test_threshold_positive(self, jump):
        with pytest.raises(ValueError):
            singular_set(jump, ext(jump), 0.0, [0.0], [0.125, 0.25], S)

    def test_json(self, jump, tmp_path):
        rep = singular_set(jump, ext(jump), default_threshold(S), [0.0, 0.5], [0.125, 0.25], S)
        rep.to_json(tmp_path / "s.json", {"s": S})
        data = json.loads((tmp_path / "s.json").read_text())
        assert data["flagged_points"] == [0.0] and "provenance" in data


class TestHolder:
    def test_mean_oscillation_jump(self, jump):
        # half the interval at +e, half at -e: variance 1
        assert mean_oscillation(jump, 0.0, 0.5) == pytest.approx(1.0, rel=1e-14)
        assert mean_oscillation(jump, 0.5, 0.25) == 0.0

    def test_jump_zero(self, jump):
        fit = holder_exponent(jump, 0.0, [0.0625, 0.125, 0.25, 0.5])
        assert abs(fit.exponent) < 1e-12

    def test_smooth_one(self):
        g = LineGrid(-1, 1, 1 / 256, 2)
        u = LatticeMap.from_function(g, lambda x: [math.cos(x), math.sin(x)])
        fit = holder_exponent(u, 0.1, [0.0625, 0.125, 0.25, 0.5])
        assert fit.exponent == pytest.approx(1.0, abs=0.02)

    def test_constant_inf(self, jump):
        assert holder_exponent(jump, 0.75, [0.03125, 0.0625, 0.125, 0.25]).exponent == math.inf

    def test_minimizer_positive(self, minimizer_h32):
        rep, _ = minimizer_h32
        for x0 in (-0.25, 0.0, 0.25):
            assert holder_exponent(rep.final_map, x0, [0.0625, 0.125, 0.25, 0.5]).exponent > 0.5

    @pytest.mark.parametrize("radii,exc", [([0.1, 0.2, 0.4], InsufficientRadii), ([0.1, 0.2, 0.3, 0.4], BadRadii), ([1 / 512, 1 / 256, 1 / 128, 1 / 64], InsufficientRadii)])
    def test_errors(self, jump, radii, exc):
        with pytest.raises(exc):
            holder_exponent(jump, 0.0, radii)
