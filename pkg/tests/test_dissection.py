import dataclasses
import math

import numpy as np
import pytest

from conftest import random_map
from corpus import CORRUPTIONS, corpus
from selfaffine.constructions import nonconvex_chain, nonconvex_n_self_affine, trapezoid_A, \
    trapezoid_B, trapezoid_C
from selfaffine.dissection import (
    PERMS,
    Dissection,
    Piece,
    check,
    combinatorial_type,
    compose_perms,
    equivalence_signature,
    find_congruence,
    perm_indices,
    piece_from_map,
    piece_from_vertices,
    refine,
    verify,
)
from selfaffine.errors import NotThreePieces, TypeMismatch, VerificationFailure
from selfaffine.geometry import AffineMap2, Point2, apply, polygon_area

TOL = 1e-9


def test_perm_set_and_composition():
    assert PERMS == ("1234", "2341", "3412", "4123", "1432", "2143", "3214", "4321")
    for p in PERMS:
        assert compose_perms(p, "1234") == p
        assert compose_perms("1234", p) == p
    # closed under composition: the dihedral group of the square
    assert {compose_perms(p, q) for p in PERMS for q in PERMS} == set(PERMS)
    assert perm_indices("3214") == (2, 1, 0, 3)


def test_piece_rejects_non_dihedral_perm():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    with pytest.raises(ValueError):
        Piece(sq, AffineMap2.identity(), "1324")


def test_piece_from_map_and_vertices_agree():
    tile = [(0, 0), (1, 0), (0.7, 0.9), (0, 1)]
    f = AffineMap2(0.5, 0.1, -0.2, 0.4, 0.3, 0.2)
    for perm in PERMS:
        pc = piece_from_map(tile, f, perm)
        again = piece_from_vertices(tile, pc.vertices)
        assert again.perm == perm
        assert again.map.coefficients() == pytest.approx(f.coefficients(), abs=1e-12)


def test_piece_from_vertices_rejects_non_copy():
    tile = [(0, 0), (1, 0), (0.7, 0.9), (0, 1)]
    with pytest.raises(VerificationFailure):
        piece_from_vertices(tile, [(0, 0), (1, 0), (1, 1), (0, 1)])


class TestVerify:
    def test_trapezoid_b_passes(self):
        rep = verify(trapezoid_B(0.5), TOL)
        assert rep.passed and bool(rep)
        assert rep.area_defect < 1e-12
        assert rep.disjointness_violations == () and rep.coverage_violations == ()

    def test_perturbed_interior_vertex_fails(self):
        d = trapezoid_B(0.5)
        pc = d.pieces[2]
        v = list(pc.vertices)
        v[0] = Point2(v[0].x + 0.01, v[0].y)
        bad = dataclasses.replace(d, pieces=(d.pieces[0], d.pieces[1], Piece(v, pc.map, pc.perm)))
        rep = verify(bad, TOL)
        assert not rep.passed
        assert rep.max_affine_residual == pytest.approx(0.01, rel=1e-6)

    def test_overlap_detected(self):
        d = trapezoid_A(0.5)
        # duplicate a piece in place of another: area and disjointness both break
        bad = dataclasses.replace(d, pieces=(d.pieces[0], d.pieces[0], d.pieces[2]))
        rep = verify(bad, TOL)
        assert not rep.passed
        assert rep.disjointness_violations

    def test_empty_dissection(self):
        d = trapezoid_A(0.5)
        assert not verify(dataclasses.replace(d, pieces=()), TOL).passed

    def test_check_raises(self):
        d = trapezoid_A(0.5)
        with pytest.raises(VerificationFailure):
            check(dataclasses.replace(d, pieces=d.pieces[:2]))


class TestCombinatorialType:
    def test_trapezoid_types(self):
        assert combinatorial_type(trapezoid_A(0.5)) == "A"
        assert combinatorial_type(trapezoid_B(0.5)) == "B"
        assert combinatorial_type(trapezoid_C(0.5)) == "C"

    def test_constructors_record_type(self):
        assert trapezoid_A(0.8, (0.2, 0.3, 0.5)).ctype == "A"
        assert trapezoid_B(1.0).ctype == "B"
        assert trapezoid_C(2 / 3).ctype == "C"

    def test_not_three_pieces(self):
        with pytest.raises(NotThreePieces):
            combinatorial_type(nonconvex_chain((0.3, 0.2), 2))

    def test_type_is_affine_invariant(self, rng):
        for d in (trapezoid_A(0.4), trapezoid_B(0.7), trapezoid_C(0.3)):
            for _ in range(20):
                assert combinatorial_type(d.transformed(random_map(rng))) == d.ctype


class TestRefine:
    def test_nonconvex_once_twice(self):
        d = nonconvex_n_self_affine(3)
        r1 = refine(d, 0, d)
        assert len(r1) == 5 and verify(r1, TOL).passed
        r2 = refine(r1, 3, d)
        assert len(r2) == 7 and verify(r2, TOL).passed

    def test_trapezoid_a_with_b(self):
        z = 0.5
        r = refine(trapezoid_A(z), 1, trapezoid_B(z))
        assert len(r) == 5 and verify(r, TOL).passed

    def test_refine_with_affine_image(self, rng):
        d = trapezoid_C(0.6)
        sub = trapezoid_B(0.6).transformed(random_map(rng))
        r = refine(d, 2, sub)
        assert len(r) == 5 and verify(r, 1e-8).passed

    def test_type_mismatch(self):
        with pytest.raises(TypeMismatch):
            refine(trapezoid_A(0.5), 0, trapezoid_B(0.7))

    def test_find_congruence(self, rng):
        q = [(0, 0), (1, 0), (0.7, 0.9), (0, 1)]
        f = random_map(rng)
        order = perm_indices("3214")
        img = [apply(f, q[order[i]]) for i in range(4)]
        g, sigma = find_congruence(q, img)
        s = perm_indices(sigma)
        for i in range(4):
            assert math.dist(apply(g, q[i]), img[s[i]]) < 1e-9


class TestSignature:
    def test_affine_invariance(self, rng):
        for d in (trapezoid_A(0.5, (0.2, 0.3, 0.5)), nonconvex_n_self_affine(3)):
            sig = equivalence_signature(d)
            for _ in range(100):
                assert equivalence_signature(d.transformed(random_map(rng))) == sig

    def test_piece_relabel_invariance(self):
        d = trapezoid_B(0.4)
        shuffled = dataclasses.replace(d, pieces=d.pieces[::-1])
        assert equivalence_signature(shuffled) == equivalence_signature(d)

    def test_weights_distinguish(self):
        a = trapezoid_A(0.5, (1 / 3, 1 / 3, 1 / 3))
        b = trapezoid_A(0.5, (0.2, 0.3, 0.5))
        assert equivalence_signature(a) != equivalence_signature(b)

    def test_types_distinguish(self):
        sigs = {equivalence_signature(f(0.5)) for f in (trapezoid_A, trapezoid_B, trapezoid_C)}
        assert len(sigs) == 3


class TestSerialization:
    def test_json_round_trip_bit_exact(self):
        for d in corpus(40, seed=3):
            text = d.to_json()
            back = Dissection.from_json(text)
            assert back == d
            assert back.to_json() == text
            assert verify(back, TOL) == verify(d, TOL)

    def test_json_shape(self):
        import json

        data = json.loads(trapezoid_C(0.5).to_json())
        assert set(data) == {"parent", "pieces", "ctype"}
        assert set(data["pieces"][0]) == {"vertices", "map", "perm"}
        assert len(data["pieces"][0]["map"]) == 6


# -- corpus invariants and fault injection ------------------------------------

CORPUS = corpus(500, seed=11)


def test_corpus_verifies_with_area_and_determinant_bookkeeping():
    for d in CORPUS:
        assert verify(d, TOL).passed
        parent_area = abs(polygon_area(d.parent))
        tile_area = abs(polygon_area(d.tile_vertices))
        assert abs(parent_area - sum(pc.area for pc in d.pieces)) / parent_area < 1e-9
        for pc in d.pieces:
            assert abs(abs(pc.map.det) * tile_area - pc.area) < 1e-9


def test_fault_injection_no_false_passes():
    rng = np.random.default_rng(2024)
    n = 0
    for d in CORPUS:
        for corrupt in CORRUPTIONS:
            bad = corrupt(d, rng)
            assert not verify(bad, TOL).passed, corrupt.__name__
            n += 1
    assert n == 1500
