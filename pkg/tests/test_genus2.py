import json
import math

import numpy as np
import pytest

from srk import genus2, hyptrig, pants
from srk.genus2 import (CURVE_TAGS, DELTA_TAGS, Genus2Error, GluedRep,
                        build_glued, curve_matrix, dehn_twist_gamma,
                        delta_side_consistency, euler_class,
                        generator_images, normalize_twists, sign_invariant,
                        trace_curve_closed_form, trace_curve_matrix)
from srk.pants import EU0_DIAGONAL_FLAT, EU_MINUS1, EU_PLUS1, PantsCase
from srk.psl2r import commutator, deviation_from_projective_identity, mmul, mtrace

rng = np.random.default_rng(13)

PC = PantsCase
TRI_P, TRI_M = PC("tri", 1), PC("tri", -1)
SH_P, SH_M = PC("selfhex", 1), PC("selfhex", -1)
FU = lambda s: PC("flat_upper", s)
FL = lambda s: PC("flat_lower", s)


def sample_tri_a(rng, lo=0.3, hi=1.8):
    while True:
        a = rng.uniform(lo, hi, 3)
        if hyptrig.delta_invariant(*a) > 0.02:
            return tuple(a)


def sample_self_a(rng, aligned=True):
    small = np.sort(rng.uniform(0.2, 0.8, 2))
    out = np.array([small[0], small[1], small.sum() + rng.uniform(0.15, 0.7)])
    if not aligned:
        out = out[rng.permutation(3)]
    return tuple(out)


def sample_flat_a(rng):
    small = rng.uniform(0.3, 0.9, 2)
    return (small[0], small[1], small.sum())


def sample_hex_a(rng):
    return tuple(rng.uniform(0.3, 1.8, 3))


PAIR_SAMPLERS = [
    (EU_PLUS1, EU_MINUS1, sample_hex_a),
    (EU_MINUS1, EU_PLUS1, sample_hex_a),
    (TRI_P, TRI_P, sample_tri_a), (TRI_P, TRI_M, sample_tri_a),
    (TRI_M, TRI_P, sample_tri_a), (TRI_M, TRI_M, sample_tri_a),
    (SH_P, SH_P, sample_self_a), (SH_P, SH_M, sample_self_a),
    (SH_M, SH_P, sample_self_a), (SH_M, SH_M, sample_self_a),
    (TRI_P, EU_MINUS1, sample_tri_a), (TRI_M, EU_MINUS1, sample_tri_a),
    (TRI_P, EU_PLUS1, sample_tri_a), (EU_MINUS1, TRI_P, sample_tri_a),
    (EU_PLUS1, TRI_M, sample_tri_a),
    (SH_P, EU_MINUS1, sample_self_a), (SH_M, EU_PLUS1, sample_self_a),
    (EU_PLUS1, SH_P, sample_self_a),
    (FU(1), FL(1), sample_flat_a), (FU(1), FL(-1), sample_flat_a),
    (FL(-1), FU(1), sample_flat_a),
    (FU(1), EU_MINUS1, sample_flat_a), (FL(-1), EU_PLUS1, sample_flat_a),
    (EU_MINUS1, FU(-1), sample_flat_a),
    (EU0_DIAGONAL_FLAT, EU_PLUS1, sample_flat_a),
]


class TestBuild:
    def test_stratum_mismatch(self):
        with pytest.raises(Genus2Error):
            build_glued(TRI_P, SH_P, (1.0, 1.0, 1.0), (0, 0, 0))

    def test_incompatible_delta(self):
        with pytest.raises(pants.PantsError):
            build_glued(TRI_P, TRI_M, (1.0, 1.0, 3.0), (0, 0, 0))

    def test_euler_nominal(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0), (0, 0, 0))
        assert rep.euler_nominal == 0

    def test_json_roundtrip(self):
        rep = build_glued(TRI_P, EU_MINUS1, sample_tri_a(rng),
                          tuple(rng.uniform(-1, 1, 3)))
        back = GluedRep.from_json(rep.to_json())
        assert back.eps1 == rep.eps1 and back.eps2 == rep.eps2
        assert np.allclose(back.a, rep.a) and np.allclose(back.t, rep.t)
        data = json.loads(rep.to_json())
        assert set(data) == {"eps", "a", "t"}


class TestCurveWords:
    def test_gamma_is_translation(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (0.7, 0.9, 1.1), (0.2, 0.3, -0.4))
        for i in range(3):
            m = curve_matrix(rep, f"gamma{i+1}")
            assert mtrace(m) == pytest.approx(2 * math.cosh(rep.a[i]))

    def test_delta_is_commutator_of_pair(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (0.7, 0.9, 1.1), (0.2, 0.3, -0.4))
        d3 = curve_matrix(rep, "delta3")
        expect = commutator(curve_matrix(rep, "beta1"),
                            curve_matrix(rep, "gamma2"))
        assert np.abs(d3 - expect).max() < 1e-12

    def test_spec_trivial_values(self):
        # (1,-1), t3 = 0: tr delta3 = 2; t2 = t3 = 0: tr beta1 = 2
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0),
                          (0.5, 0.0, 0.0))
        assert trace_curve_matrix(rep, "delta3") == pytest.approx(2.0)
        assert trace_curve_matrix(rep, "beta1") == pytest.approx(2.0)


class TestClosedForms:
    @pytest.mark.parametrize("eps1,eps2,sampler", PAIR_SAMPLERS,
                             ids=lambda v: str(v) if isinstance(v, PC) else "")
    def test_agreement(self, eps1, eps2, sampler):
        covered_any = False
        for _ in range(25):
            rep = build_glued(eps1, eps2, sampler(rng),
                              tuple(rng.uniform(-1.5, 1.5, 3)))
            for tag in CURVE_TAGS:
                val, covered = trace_curve_closed_form(rep, tag)
                if covered:
                    covered_any = True
                    ref = trace_curve_matrix(rep, tag)
                    assert abs(val - ref) < 1e-9, (str(eps1), str(eps2), tag)
        assert covered_any

    def test_specific_delta3_formula(self):
        # (1,-1), a = (1,1,1), t3 = 1
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0),
                          (0.0, 0.0, 1.0))
        b1 = hyptrig.solve_hexagon(1.0, 1.0, 1.0).b[0]
        expect = 2 + 4 * math.sinh(1.0) ** 2 * math.sinh(b1) ** 2 \
            * math.sinh(0.5) ** 2
        assert trace_curve_matrix(rep, "delta3") == pytest.approx(expect,
                                                                  abs=1e-9)

    def test_mixed_triangle_delta_sign_structure(self):
        # (0+,0-), delta > 0: tr delta3 = 2 + 4 sin^2 sinh^2 cosh^2 >= 2
        for _ in range(40):
            rep = build_glued(TRI_P, TRI_M, sample_tri_a(rng),
                              tuple(rng.uniform(-2, 2, 3)))
            assert trace_curve_matrix(rep, "delta3") >= 2.0
        # (0+,0+), delta > 0: <= 2 always
        for _ in range(40):
            rep = build_glued(TRI_P, TRI_P, sample_tri_a(rng),
                              tuple(rng.uniform(-2, 2, 3)))
            assert trace_curve_matrix(rep, "delta3") <= 2.0

    def test_uncovered_falls_back(self):
        rep = build_glued(EU_PLUS1, EU_PLUS1, (0.7, 0.9, 1.1), (0, 0, 0))
        val, covered = trace_curve_closed_form(rep, "delta3")
        assert not covered
        assert val == pytest.approx(trace_curve_matrix(rep, "delta3"))


class TestTwists:
    def test_zero_twist_identity(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (0.7, 0.9, 1.1), (0.2, 0.3, -0.4))
        assert dehn_twist_gamma(rep, 1, 0).t == rep.t

    def test_gamma_traces_invariant(self):
        rep = build_glued(TRI_P, EU_MINUS1, sample_tri_a(rng),
                          tuple(rng.uniform(-1, 1, 3)))
        for i in (1, 2, 3):
            tw = dehn_twist_gamma(rep, i, rng.integers(-3, 4))
            for j in range(3):
                assert trace_curve_matrix(tw, f"gamma{j+1}") == pytest.approx(
                    trace_curve_matrix(rep, f"gamma{j+1}"))

    def test_twist_moves_closed_form_argument(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.1, 1.2),
                          (0.3, -0.2, 0.4))
        k = 3
        tw = dehn_twist_gamma(rep, 3, k)
        shifted = build_glued(EU_PLUS1, EU_MINUS1, rep.a,
                              (0.3, -0.2, 0.4 + 2 * k * 1.2))
        assert trace_curve_matrix(tw, "delta3") == pytest.approx(
            trace_curve_matrix(shifted, "delta3"), rel=1e-12)

    def test_delta_invariant_under_own_twist(self):
        # tr delta_j is unchanged by twisting gamma_j for j != pivot index
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.1, 1.2),
                          (0.3, -0.2, 0.4))
        tw = dehn_twist_gamma(rep, 1, 2)
        assert trace_curve_matrix(tw, "delta3") == pytest.approx(
            trace_curve_matrix(rep, "delta3"), rel=1e-12)

    def test_normalize_twists(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0),
                          (5.0, -3.2, 0.4))
        out = normalize_twists(rep)
        assert out.t[0] == pytest.approx(1.0)      # 5 - 2*2*1 = 1, tie -> +a
        for i in range(3):
            assert -rep.a[i] - 1e-12 <= out.t[i] <= rep.a[i] + 1e-12
        again = normalize_twists(out)
        assert again.t == out.t


class TestEulerClass:
    @pytest.mark.parametrize("eps1,eps2,sampler", PAIR_SAMPLERS,
                             ids=lambda v: str(v) if isinstance(v, PC) else "")
    def test_additivity(self, eps1, eps2, sampler):
        for _ in range(6):
            rep = build_glued(eps1, eps2, sampler(rng),
                              tuple(rng.uniform(-1.5, 1.5, 3)))
            assert euler_class(rep) == rep.euler_nominal

    def test_fuchsian_extremes(self):
        rep = build_glued(EU_MINUS1, EU_MINUS1, (0.8, 1.0, 1.2), (0.4, 0, -0.3))
        assert euler_class(rep) == -2
        rep = build_glued(EU_PLUS1, EU_PLUS1, (0.8, 1.0, 1.2), (0.4, 0, -0.3))
        assert euler_class(rep) == 2

    def test_relator_projects_to_identity(self):
        rep = build_glued(TRI_P, EU_MINUS1, sample_tri_a(rng),
                          tuple(rng.uniform(-1, 1, 3)))
        a1, b1, a2, b2 = generator_images(rep)
        rel = mmul(commutator(a2, b2), commutator(a1, b1))
        assert deviation_from_projective_identity(rel) < 1e-9

    def test_orientation_reversal_flips_sign(self):
        u = np.diag([1.0, -1.0])
        for eps1, eps2, sampler in (PAIR_SAMPLERS[0], PAIR_SAMPLERS[12],
                                    PAIR_SAMPLERS[15]):
            rep = build_glued(eps1, eps2, sampler(rng),
                              tuple(rng.uniform(-1, 1, 3)))
            a1, b1, a2, b2 = (u @ m @ u for m in generator_images(rep))
            from srk.psl2r import euler_class_closed
            assert euler_class_closed(a1, b1, a2, b2) == -rep.euler_nominal


class TestSignInvariant:
    def test_case_table(self):
        table = [
            (EU_PLUS1, EU_MINUS1, sample_hex_a, "Minus"),
            (TRI_P, TRI_M, sample_tri_a, "Minus"),
            (TRI_P, TRI_P, sample_tri_a, "Plus"),
            (SH_P, SH_P, sample_self_a, "Minus"),
            (SH_P, SH_M, sample_self_a, "Plus"),
            (FU(1), FL(1), sample_flat_a, "Minus"),
            (FU(1), FL(-1), sample_flat_a, "Plus"),
        ]
        for eps1, eps2, sampler, expect in table:
            for _ in range(20):
                t = rng.uniform(0.2, 1.5, 3)        # keep away from t = 0
                rep = build_glued(eps1, eps2, sampler(rng), tuple(t))
                assert str(sign_invariant(rep)) == expect, (str(eps1),
                                                            str(eps2))

    def test_degenerate_at_zero_twist(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0), (0.3, 0.2, 0.0))
        assert str(sign_invariant(rep)) == "Degenerate"

    def test_requires_euler_zero(self):
        rep = build_glued(TRI_P, EU_MINUS1, sample_tri_a(rng), (0, 0, 0))
        with pytest.raises(Genus2Error):
            sign_invariant(rep)

    def test_invariant_along_orbits(self):
        for _ in range(10):
            rep = build_glued(EU_PLUS1, EU_MINUS1, sample_hex_a(rng),
                              tuple(rng.uniform(0.2, 1.0, 3)))
            ref = str(sign_invariant(rep))
            cur = rep
            for _ in range(30):
                cur = dehn_twist_gamma(cur, int(rng.integers(1, 4)),
                                       int(rng.integers(-2, 3)))
            assert str(sign_invariant(cur)) == ref

    def test_matches_handle_sign(self):
        from srk.psl2r import handle_sign
        for eps1, eps2, sampler in ((EU_PLUS1, EU_MINUS1, sample_hex_a),
                                    (TRI_P, TRI_M, sample_tri_a),
                                    (SH_P, SH_M, sample_self_a)):
            for _ in range(20):
                rep = build_glued(eps1, eps2, sampler(rng),
                                  tuple(rng.uniform(0.2, 1.2, 3)))
                hs = handle_sign(curve_matrix(rep, "gamma2"),
                                 curve_matrix(rep, "beta1"))
                si = str(sign_invariant(rep))
                if si == "Degenerate":
                    assert hs == "degenerate"
                else:
                    assert hs == {"Plus": 1, "Minus": -1}[si]

    def test_delta_side_consistency(self):
        for _ in range(25):
            rep = build_glued(TRI_P, TRI_P, sample_tri_a(rng),
                              tuple(rng.uniform(0.2, 1.4, 3)))
            assert delta_side_consistency(rep)
            assert all(trace_curve_matrix(rep, t) < 2 for t in DELTA_TAGS)
        for _ in range(25):
            rep = build_glued(EU_PLUS1, EU_MINUS1, sample_hex_a(rng),
                              tuple(rng.uniform(0.2, 1.4, 3)))
            assert delta_side_consistency(rep)
            assert all(trace_curve_matrix(rep, t) > 2 for t in DELTA_TAGS)

    def test_side_consistency_flags_degenerate(self):
        rep = build_glued(EU_PLUS1, EU_MINUS1, (1.0, 1.0, 1.0),
                          (0.0, 0.5, 0.5))
        with pytest.raises(Genus2Error):
            delta_side_consistency(rep)


class TestRelabeling:
    def test_cyclic_relabel_matches(self):
        a = sample_tri_a(rng)
        t = tuple(rng.uniform(-1, 1, 3))
        rep = build_glued(TRI_P, EU_MINUS1, a, t)
        perm = [2, 0, 1]           # new index i <- old index perm[i]
        rep2 = build_glued(TRI_P, EU_MINUS1,
                           tuple(a[p] for p in perm),
                           tuple(t[p] for p in perm))
        for i in range(3):
            for fam in ("gamma", "beta", "delta"):
                assert trace_curve_matrix(rep2, f"{fam}{i+1}") == \
                    pytest.approx(trace_curve_matrix(rep, f"{fam}{perm[i]+1}"),
                                  rel=1e-10, abs=1e-10)

    def test_pants_swap_negates_twists(self):
        # exchanging the pants maps (e1, e2; t) onto (flip(e2), flip(e1); -t)
        a = sample_tri_a(rng)
        t = tuple(rng.uniform(-1, 1, 3))
        rep = build_glued(TRI_P, EU_MINUS1, a, t)
        swapped = build_glued(EU_PLUS1, TRI_P, a, tuple(-x for x in t))
        for tag in CURVE_TAGS:
            assert trace_curve_matrix(swapped, tag) == pytest.approx(
                trace_curve_matrix(rep, tag), rel=1e-10, abs=1e-10)
