import pytest

from conftest import close, random_map
from selfaffine.errors import CollinearSource, DegenerateQuadrangle, SingularMap
from selfaffine.geometry import (
    AffineMap2,
    Point2,
    affine_from_triples,
    apply,
    classify_quadrangle,
    compose,
    invert,
    point_in_polygon,
    polygon_area,
    segments_cross,
)


def test_identity_from_triples():
    pts = [(0, 1), (0, 0), (1, 0)]
    assert affine_from_triples(pts, pts).coefficients() == pytest.approx(
        AffineMap2.identity().coefficients(), abs=1e-15)


def test_phi_map_for_reference_point():
    x, y = 2 / 3, 5 / 6
    # phi sends (0,0), (1,0), (x,y) to (0,1), (0,0), (1,0)
    f = affine_from_triples([(0, 0), (1, 0), (x, y)], [(0, 1), (0, 0), (1, 0)])
    expected = AffineMap2(0, 1 / y, -1, (x - 1) / y, 0, 1)
    assert f.coefficients() == pytest.approx(expected.coefficients(), abs=1e-12)


def test_split_map_beta_from_triples():
    x0 = 0.43015
    y0 = x0 * (1 - x0)
    f = affine_from_triples([(0, 1), (0, 0), (1, 0)], [(0, 0), (0, 1), (x0, y0)])
    assert f.coefficients() == pytest.approx((x0, 0, y0 - 1, -1, 0, 1), abs=1e-12)


def test_collinear_source():
    with pytest.raises(CollinearSource):
        affine_from_triples([(0, 0), (1, 1), (2, 2)], [(0, 0), (1, 0), (0, 1)])


def test_apply_identity():
    assert apply(AffineMap2.identity(), (0.3, 0.7)) == Point2(0.3, 0.7)


def test_inverse_round_trip(rng):
    f = random_map(rng)
    g = compose(f, invert(f))
    for p in rng.uniform(-5, 5, size=(100, 2)):
        assert close(apply(g, p), p, 1e-10)


def test_singular_map():
    with pytest.raises(SingularMap):
        invert(AffineMap2(1, 2, 2, 4, 0, 0))


def test_chain_map_fixes_two_vertices():
    x, y = 1 / 3, 1 / 6
    a = AffineMap2(1 - x, -x, -y, 1 - y, x, y)
    assert close(apply(a, (1, 0)), (1, 0), 1e-15)
    assert close(apply(a, (0, 1)), (0, 1), 1e-15)


def test_triples_reproduce_targets(rng):
    for _ in range(1000):
        src = rng.uniform(-3, 3, size=(3, 2))
        u, v = src[1] - src[0], src[2] - src[0]
        if abs(u[0] * v[1] - u[1] * v[0]) < 0.2:
            continue
        dst = rng.uniform(-3, 3, size=(3, 2))
        f = affine_from_triples(src, dst)
        for s, d in zip(src, dst):
            assert close(apply(f, s), d, 1e-10)


def test_compose_associative(rng):
    for _ in range(200):
        f, g, h = (random_map(rng) for _ in range(3))
        lhs = compose(compose(f, g), h).coefficients()
        rhs = compose(f, compose(g, h)).coefficients()
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_matmul_and_call():
    f = AffineMap2(2, 0, 0, 3, 1, 1)
    g = AffineMap2(0, 1, 1, 0, 0, 0)
    assert (f @ g)((1, 2)) == f(g((1, 2)))


class TestClassify:
    def test_convex(self):
        q = classify_quadrangle([(0, 1), (0, 0), (1, 0), (2 / 3, 5 / 6)])
        assert q.kind == "convex"
        assert q.reflex is None

    def test_nonconvex_reflex_at_fourth(self):
        q = classify_quadrangle([(0, 1), (0, 0), (1, 0), (0.43015, 0.24512)])
        assert q.kind == "nonconvex"
        assert q.reflex == 3

    def test_collinear_degenerate(self):
        with pytest.raises(DegenerateQuadrangle):
            classify_quadrangle([(0, 0), (1, 0), (2, 0), (0, 1)])

    def test_bowtie_degenerate(self):
        with pytest.raises(DegenerateQuadrangle):
            classify_quadrangle([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_affine_invariance(self, rng):
        quads = [[(0, 1), (0, 0), (1, 0), (0.7, 0.9)], [(0, 1), (0, 0), (1, 0), (0.3, 0.2)]]
        for _ in range(300):
            f = random_map(rng)
            for q in quads:
                base = classify_quadrangle(q)
                img = classify_quadrangle([apply(f, p) for p in q])
                assert img.kind == base.kind
                assert img.reflex == base.reflex
                assert img.orientation == base.orientation * (1 if f.det > 0 else -1)


def test_area_and_containment():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert polygon_area(sq) == 1.0
    assert point_in_polygon((0.5, 0.5), sq) == 1
    assert point_in_polygon((1.0, 0.5), sq) == 0
    assert point_in_polygon((1.5, 0.5), sq) == -1


def test_segments_cross_proper_only():
    assert segments_cross((0, 0), (1, 1), (0, 1), (1, 0))
    # touching at an endpoint is not a proper crossing
    assert not segments_cross((0, 0), (1, 1), (1, 1), (2, 0))
