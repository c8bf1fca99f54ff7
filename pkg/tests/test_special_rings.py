"""Tests for the trivial extension, context ring and triangular ring
specializations and their agreement with the generic checkers."""

import random

import pytest

from tensorgp.exactlin import Matrix
from tensorgp.algebra import ModuleMap, free_module
from tensorgp.bimodule import certify_nilpotent, tensor_bimodule
from tensorgp.tensor_ring import StarMorphism, TensorRing
from tensorgp.resolution import ResolutionWindow, check_complete
from tensorgp.special_rings import (
    HypothesisViolated,
    MoritaData,
    MoritaWindow,
    PairBimodule,
    SpecialRingError,
    TriangularData,
    TriangularWindow,
    TrivialExtData,
    block_model_iso,
    block_power_module,
    embed_pair_bimodule,
    induced_block_map,
    morita_checks,
    morita_context_algebra,
    morita_to_trivext,
    mu_transport,
    product_algebra,
    triangular_checks,
    trivext_checks,
)

from helpers import (
    F2,
    F3,
    corner_bimodule,
    corner_pair,
    dual_numbers,
    full_tensor_pair,
    ground_algebra,
    product_fields,
    random_free_map,
    random_hom,
    random_morita_data,
    random_morita_window,
    random_triangular_data,
    random_triangular_window,
    x_multiplication,
)


class TestProductAlgebra:
    def test_product_of_fields(self):
        pa = product_algebra(ground_algebra(F2), ground_algebra(F2))
        expected = product_fields(F2, 2)
        assert pa.algebra.consts == expected.consts
        assert pa.algebra.unit == expected.unit

    def test_mixed_product_validates(self):
        pa = product_algebra(dual_numbers(F3), ground_algebra(F3))
        assert pa.algebra.dim == 3


class TestPairBimodule:
    def test_full_tensor_pair_valid(self):
        full_tensor_pair(dual_numbers(F2), ground_algebra(F2))

    def test_corner_embedding_roundtrip(self):
        a = ground_algebra(F2)
        b = ground_algebra(F2)
        v = full_tensor_pair(a, b)  # one-dimensional
        pa = product_algebra(a, b)
        enc = embed_pair_bimodule(pa, v)
        assert enc.dim == 1
        # recovers the corner bimodule over k x k exactly
        m = corner_bimodule(F2)
        assert enc.left_action == m.left_action
        assert enc.right_action == m.right_action

    def test_induced_block_map_functorial(self):
        rng = random.Random(3)
        a = dual_numbers(F2)
        b = product_fields(F2, 2)
        v = full_tensor_pair(a, b)
        for _ in range(10):
            f = random_free_map(b, 2, 1, rng)
            g = random_free_map(b, 1, 2, rng)
            lhs = induced_block_map(v, f @ g)
            rhs = induced_block_map(v, f) @ induced_block_map(v, g)
            assert lhs.mat == rhs.mat
        ident = ModuleMap.identity(free_module(b, 2))
        assert induced_block_map(v, ident).mat == Matrix.identity(F2, v.dim * 2)


class TestTrivialExtension:
    def test_hypothesis_enforced(self):
        from helpers import augmentation_bimodule

        with pytest.raises(HypothesisViolated):
            TrivialExtData(dual_numbers(F2), augmentation_bimodule(F2))

    def test_zero_window_passes(self):
        d = TrivialExtData(product_fields(F2, 2).algebra if False else corner_bimodule(F2).algebra,
                           corner_bimodule(F2))
        ring = d.ring
        z = StarMorphism.zero(ring, 0, 0)
        w = ResolutionWindow(ring, 0, (0, 0), (z,), period=1)
        assert trivext_checks(d, w).passed

    def test_identity_window_fails_c1(self):
        d = TrivialExtData(corner_bimodule(F2).algebra, corner_bimodule(F2))
        ring = d.ring
        p = ring.free(1)
        s = StarMorphism(ring, 1, 1, (ModuleMap.identity(p),
                                      ModuleMap.zero(p, ring.model(1, p).result)))
        w = ResolutionWindow(ring, 0, (1, 1), (s,), period=1)
        report = trivext_checks(d, w)
        assert report.status(0, "C1") == "fail"

    def test_matches_generic_on_random_windows(self):
        rng = random.Random(7)
        d = TrivialExtData(corner_bimodule(F2).algebra, corner_bimodule(F2))
        ring = d.ring
        for _ in range(25):
            rank = rng.randrange(3)
            comps = tuple(random_hom(ring.free(rank), ring.model(i, ring.free(rank)).result, rng)
                          for i in range(2))
            s = StarMorphism(ring, rank, rank, comps)
            w = ResolutionWindow(ring, 0, (rank, rank), (s,), period=1)
            special = trivext_checks(d, w)
            generic = check_complete(w)
            for label in ("C1", "C2", "C3"):
                assert special.status(0, label) == generic.status(0, label)


class TestMoritaData:
    def test_zero_corners_accepted(self):
        a, b = dual_numbers(F2), ground_algebra(F2)
        MoritaData(a, b, PairBimodule.zero(a, b), PairBimodule.zero(b, a))

    def test_nonvanishing_pairing_rejected(self):
        a = b = ground_algebra(F2)
        v = full_tensor_pair(a, b)
        u = full_tensor_pair(b, a)
        # over a field, v (x) u and u (x) v are nonzero
        with pytest.raises(HypothesisViolated):
            MoritaData(a, b, v, u)

    def test_disjoint_corners_accepted(self):
        a = b = product_fields(F2, 2)
        v = corner_pair(a, b, {(0, 0): 1}, F2)
        u = corner_pair(b, a, {(1, 1): 1}, F2)
        MoritaData(a, b, v, u)

    def test_triangular_recovery(self):
        # a = b = k, v one-dimensional, u = 0: the trivial extension is the
        # corner bimodule over k x k on the nose
        a = b = ground_algebra(F2)
        d = MoritaData(a, b, full_tensor_pair(a, b), PairBimodule.zero(b, a))
        te = morita_to_trivext(d)
        m = corner_bimodule(F2)
        # basis order (u, v) puts the single v generator alone
        assert te.m.dim == 1
        assert te.m.left_action == m.left_action
        assert te.m.right_action == m.right_action


class TestContextAlgebraIso:
    def test_tables_agree_under_coordinate_bijection(self):
        rng = random.Random(11)
        for _ in range(20):
            d = random_morita_data(rng, F2)
            direct = morita_context_algebra(d)
            te = morita_to_trivext(d)
            model = te.ring.algebra_model()
            assert direct.dim == model.dim
            assert direct.consts == model.consts
            assert direct.unit == model.unit

    def test_triangular_two_by_two(self):
        a = b = ground_algebra(F2)
        d = MoritaData(a, b, full_tensor_pair(a, b), PairBimodule.zero(b, a))
        lam = morita_context_algebra(d)
        assert lam.dim == 3


class TestMoritaChecks:
    def test_zero_window_passes(self):
        a = b = ground_algebra(F2)
        d = MoritaData(a, b, full_tensor_pair(a, b), PairBimodule.zero(b, a))
        w = MoritaWindow(0, (0, 0), (0, 0),
                         (random_free_map(a, 0, 0, random.Random(0)),),
                         (random_free_map(b, 0, 0, random.Random(0)),),
                         (ModuleMap.zero(free_module(a, 0), block_power_module(d.v, 0)),),
                         (ModuleMap.zero(free_module(b, 0), block_power_module(d.u, 0)),),
                         period=1)
        assert morita_checks(d, w).passed

    def test_degenerate_corner_reduces_to_core_case(self):
        # u = v = 0, a = dual numbers, b = k: the window is the plain
        # multiplication-by-x complex on the a side and zero on the b side
        a, b = dual_numbers(F2), ground_algebra(F2)
        d = MoritaData(a, b, PairBimodule.zero(a, b), PairBimodule.zero(b, a))
        x = x_multiplication(F2)
        w = MoritaWindow(0, (1, 1), (0, 0), (x,),
                         (ModuleMap.zero(free_module(b, 0), free_module(b, 0)),),
                         (ModuleMap.zero(free_module(a, 1), block_power_module(d.v, 0)),),
                         (ModuleMap.zero(free_module(b, 0), block_power_module(d.u, 1)),),
                         period=1)
        report = morita_checks(d, w)
        assert report.passed

    def test_bad_differential_fails_c1(self):
        a, b = dual_numbers(F2), ground_algebra(F2)
        d = MoritaData(a, b, PairBimodule.zero(a, b), PairBimodule.zero(b, a))
        ident = ModuleMap.identity(free_module(a, 1))
        w = MoritaWindow(0, (1, 1), (0, 0), (ident,),
                         (ModuleMap.zero(free_module(b, 0), free_module(b, 0)),),
                         (ModuleMap.zero(free_module(a, 1), block_power_module(d.v, 0)),),
                         (ModuleMap.zero(free_module(b, 0), block_power_module(d.u, 1)),),
                         period=1)
        report = morita_checks(d, w)
        assert report.status(0, "C1'") == "fail"


class TestMuTransport:
    def test_zero_data_zero_window(self):
        a = b = ground_algebra(F2)
        d = MoritaData(a, b, PairBimodule.zero(a, b), PairBimodule.zero(b, a))
        rng = random.Random(0)
        w = random_morita_window(d, rng, max_rank=0)
        tw = mu_transport(d, w)
        assert tw.ranks == (0, 0)

    def test_block_model_iso_is_module_iso(self):
        rng = random.Random(13)
        for _ in range(10):
            d = random_morita_data(rng, F2)
            te = morita_to_trivext(d)
            for n in (0, 1, 2):
                xi = block_model_iso(te, d, n)
                assert xi.rows == xi.cols == n * (d.u.dim + d.v.dim)

    def test_transported_verdicts_match_direct(self):
        rng = random.Random(17)
        trials = 0
        for _ in range(40):
            d = random_morita_data(rng, F2)
            w = random_morita_window(d, rng, max_rank=2)
            tw = mu_transport(d, w)
            direct = morita_checks(d, w)
            generic = check_complete(tw)
            for k in w.positions():
                for lab, glab in (("C1'", "C1"), ("C2'", "C2"), ("C3'", "C3")):
                    assert direct.status(k, lab) == generic.status(k, glab), (
                        f"{lab} at k={k}")
            trials += 1
        assert trials == 40

    def test_unequal_ranks_rejected(self):
        a = b = ground_algebra(F2)
        d = MoritaData(a, b, full_tensor_pair(a, b), PairBimodule.zero(b, a))
        w = MoritaWindow(0, (1, 1), (0, 0),
                         (random_free_map(a, 1, 1, random.Random(1)),),
                         (random_free_map(b, 0, 0, random.Random(1)),),
                         (ModuleMap.zero(free_module(a, 1), block_power_module(d.v, 0)),),
                         (ModuleMap.zero(free_module(b, 0), block_power_module(d.u, 1)),),
                         period=1)
        with pytest.raises(SpecialRingError):
            mu_transport(d, w)


class TestTriangularChecks:
    def test_zero_data_passes(self):
        d = random_triangular_data(random.Random(0), F2)
        w = random_triangular_window(d, random.Random(0), max_rank=0)
        assert triangular_checks(d, w).passed

    def test_core_case_embedding(self):
        # a = dual numbers, b = k, v = 0: multiplication by x upstairs
        a, b = dual_numbers(F2), ground_algebra(F2)
        d = TriangularData(a, b, PairBimodule.zero(a, b))
        x = x_multiplication(F2)
        zero_q = random_free_map(b, 0, 0, random.Random(0))
        w = TriangularWindow(0, (1, 1), (0, 0), (x,), (zero_q,),
                             (ModuleMap.zero(free_module(a, 1), block_power_module(d.v, 0)),),
                             period=1)
        report = triangular_checks(d, w)
        assert report.passed

    def test_zero_sigma_on_nonzero_ranks_fails_ii(self):
        a, b = ground_algebra(F2), ground_algebra(F2)
        d = TriangularData(a, b, PairBimodule.zero(a, b))
        zero_p = random_free_map(a, 0, 0, random.Random(0))
        sigma = ModuleMap.zero(free_module(b, 1), free_module(b, 1))
        w = TriangularWindow(0, (0, 0), (1, 1), (zero_p,), (sigma,),
                             (ModuleMap.zero(free_module(a, 0), block_power_module(d.v, 1)),),
                             period=1)
        report = triangular_checks(d, w)
        assert report.status(0, "(ii) exact") == "fail"

    def test_matches_morita_at_zero_corner(self):
        rng = random.Random(19)
        for _ in range(40):
            d = random_triangular_data(rng, F2)
            w = random_triangular_window(d, rng, max_rank=2)
            tri = triangular_checks(d, w)
            md = d.as_morita()
            mw = w.as_morita(d)
            mor = morita_checks(md, mw)
            for k in w.positions():
                c1 = all(tri.status(k, lab) == "pass"
                         for lab in ("(i) complex", "(ii) complex", "(iii)"))
                assert (mor.status(k, "C1'") == "pass") == c1
                mor2 = mor.status(k, "C2'")
                if mor2 == "skip":
                    assert tri.status(k, "(ii) exact") == "skip"
                    assert tri.status(k, "(iv)") == "skip"
                else:
                    c2 = (tri.status(k, "(ii) exact") == "pass"
                          and tri.status(k, "(iv)") == "pass")
                    assert (mor2 == "pass") == c2
                c3 = (tri.status(k, "(i) lift") == "pass"
                      and tri.status(k, "(v)") == "pass")
                assert (mor.status(k, "C3'") == "pass") == c3
