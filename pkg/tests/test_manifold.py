import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fracharm.errors import AmbiguousProjection, NotOnManifold
from fracharm.manifold import circle, from_name, point_pair, sphere

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10)).filter(lambda z: np.linalg.norm(z) > 1e-6)


class TestConstruction:
    @pytest.mark.parametrize("name,dim,expected", [("circle", None, "S1"), ("sphere", 3, "S2"), ("pointpair", None, "S0"), ("S0", None, "S0")])
    def test_from_name(self, name, dim, expected):
        assert from_name(name, dim).name == expected

    def test_unknown(self):
        with pytest.raises(ValueError):
            from_name("torus")

    def test_bad_dims(self):
        with pytest.raises(ValueError):
            sphere(1)


class TestSphere:
    @given(vec3)
    def test_projection_is_nearest(self, z):
        m = sphere(3)
        p = m.project(z)
        assert m.contains(p)
        # nearest point: distance equals | |z| - 1 |
        assert np.linalg.norm(z - p) == pytest.approx(abs(np.linalg.norm(z) - 1.0), abs=1e-12)

    @given(vec3)
    def test_projection_idempotent(self, z):
        m = sphere(3)
        p = m.project(z)
        np.testing.assert_allclose(m.project(p), p, atol=1e-15)

    def test_origin(self):
        with pytest.raises(AmbiguousProjection):
            circle().project([0.0, 0.0])

    @given(vec3, vec3)
    def test_tangent_projection(self, b, w):
        m = sphere(3)
        b = m.project(b)
        t = m.tangent_project(b, w)
        assert abs(float(t @ b)) < 1e-12 * max(1.0, np.linalg.norm(w))
        np.testing.assert_allclose(m.tangent_project(b, t), t, atol=1e-12)

    def test_tangent_off_manifold(self):
        with pytest.raises(NotOnManifold):
            circle().tangent_project([2.0, 0.0], [0.0, 1.0])

    def test_stacked(self):
        z = np.array([[3.0, 4.0], [0.0, -2.0]])
        np.testing.assert_allclose(circle().project(z), [[0.6, 0.8], [0.0, -1.0]])


class TestPointPair:
    @pytest.mark.parametrize("x,expected", [(0.3, 1.0), (-1e-9, -1.0), (5.0, 1.0)])
    def test_projection(self, x, expected):
        assert point_pair().project([x])[0] == expected

    def test_zero_ambiguous(self):
        with pytest.raises(AmbiguousProjection):
            point_pair().project([0.0])

    def test_trivial_tangent(self):
        m = point_pair()
        assert m.has_trivial_tangent
        assert np.all(m.tangent_project(np.array([1.0, -1.0]), np.array([0.5, 2.0])) == 0)

    def test_dist(self):
        np.testing.assert_allclose(point_pair().dist(np.array([0.5, -1.0, 2.0])), [0.5, 0.0, 1.0])
