"""Glued genus-2 representations in pants-and-twist coordinates.

A closed genus-2 surface is two pairs of pants glued along three curves
gamma_1, gamma_2, gamma_3.  A representation with hyperbolic holonomy on the
gluing curves is encoded by the boundary half-lengths (a1, a2, a3), a pants
construction tag on each side, and three twist parameters (t1, t2, t3).

Named curves and their holonomy words (matrices multiply left to right):

    gamma_i  ->  T_{2 a_i}
    beta_i   ->  X_i^-1 T_{-t_k} Y_i T_{t_j}          (i, j, k) cyclic
    delta_k  ->  [beta_i, gamma_j]                    (i, j, k) cyclic

where X (first pants) and Y (second pants) are the pants edge matrices.
The second pants realises its tag through the mirrored construction; with
that convention the published closed trace formulas hold verbatim and the
relative Euler classes of the two sides add up to the Euler class of the
closed representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from . import hyptrig, psl2r
from .pants import PantsCase, PantsRep, build_pants, case_from_string
from .psl2r import (PSL2Error, commutator, make_translation, minv, mmul,
                    mtrace)

TOL_SIGN = 1e-9      # band around tr delta = 2 reported as degenerate

GAMMA_TAGS = ("gamma1", "gamma2", "gamma3")
BETA_TAGS = ("beta1", "beta2", "beta3")
DELTA_TAGS = ("delta1", "delta2", "delta3")
CURVE_TAGS = GAMMA_TAGS + BETA_TAGS + DELTA_TAGS

# delta_k is the commutator of (beta_i, gamma_j) in cyclic order (i, j, k)
_DELTA_PAIRS = {"delta1": ("beta2", "gamma3"),
                "delta2": ("beta3", "gamma1"),
                "delta3": ("beta1", "gamma2")}


class Genus2Error(PSL2Error):
    pass


def _stratum(case: PantsCase) -> Optional[int]:
    if case.kind == "tri":
        return 1
    if case.kind == "selfhex":
        return -1
    if case.is_flat:
        return 0
    return None    # hexagon families exist on every stratum


@dataclass(frozen=True)
class GluedRep:
    """Glued genus-2 coordinate datum."""

    p1: PantsRep
    p2: PantsRep
    t: Tuple[float, float, float]
    eps1: PantsCase
    eps2: PantsCase

    @property
    def a(self) -> Tuple[float, float, float]:
        return self.p1.a

    @property
    def euler_nominal(self) -> int:
        return self.eps1.euler + self.eps2.euler

    def to_json(self) -> str:
        return json.dumps({"eps": [str(self.eps1), str(self.eps2)],
                           "a": list(self.a), "t": list(self.t)})

    @classmethod
    def from_json(cls, text: str) -> "GluedRep":
        data = json.loads(text)
        eps1, eps2 = (case_from_string(s) for s in data["eps"])
        return build_glued(eps1, eps2, tuple(data["a"]), tuple(data["t"]))


def build_glued(eps1: PantsCase, eps2: PantsCase,
                a: Tuple[float, float, float],
                t: Tuple[float, float, float]) -> GluedRep:
    """Construct the glued representation for an ordered case pair.

    Raises when the two tags live on different delta strata, or when a tag
    is incompatible with the sign of the delta invariant of `a`.
    """
    s1, s2 = _stratum(eps1), _stratum(eps2)
    if s1 is not None and s2 is not None and s1 != s2:
        raise Genus2Error(f"cases {eps1}, {eps2} live on different strata")
    t = tuple(float(x) for x in t)
    p1 = build_pants(a, eps1)
    p2 = build_pants(a, eps2.euler_flipped())
    return GluedRep(p1=p1, p2=p2, t=t, eps1=eps1, eps2=eps2)


# ---------------------------------------------------------------------------
# curve words and traces
# ---------------------------------------------------------------------------

def curve_matrix(rep: GluedRep, tag: str) -> np.ndarray:
    """Holonomy matrix of a named curve (SL2 lift fixed by the word)."""
    if tag in GAMMA_TAGS:
        i = GAMMA_TAGS.index(tag)
        return make_translation(2.0 * rep.a[i])
    if tag in BETA_TAGS:
        i = BETA_TAGS.index(tag)
        j, k = (i + 1) % 3, (i + 2) % 3
        return mmul(minv(rep.p1.x[i]), make_translation(-rep.t[k]),
                    rep.p2.x[i], make_translation(rep.t[j]))
    if tag in DELTA_TAGS:
        bt, gt = _DELTA_PAIRS[tag]
        return commutator(curve_matrix(rep, bt), curve_matrix(rep, gt))
    raise Genus2Error(f"unknown curve tag {tag!r}")


def trace_curve_matrix(rep: GluedRep, tag: str) -> float:
    """Trace of the curve word's matrix product.

    For the delta curves the value is canonical (trace of a commutator);
    for the others it is the trace of the SL2 lift fixed by the word.
    """
    return mtrace(curve_matrix(rep, tag))


def trace_curve_closed_form(rep: GluedRep, tag: str) -> Tuple[float, bool]:
    """Closed-form trace where one exists.

    Returns (value, True) when the (case pair, curve) combination is covered
    by one of the published formulas or a cyclic companion of one, and
    (trace_curve_matrix(rep, tag), False) otherwise.
    """
    val = _closed_form(rep.eps1, rep.eps2, rep.a, rep.t, tag)
    if val is None:
        return trace_curve_matrix(rep, tag), False
    return val, True


def _aligned(a) -> bool:
    """Self-hexagon and flat formulas are stated for the long side third."""
    return max(range(3), key=lambda i: a[i]) == 2


def _closed_form(eps1: PantsCase, eps2: PantsCase, a, t,
                 tag: str) -> Optional[float]:
    ch, sh = math.cosh, math.sinh
    if tag in GAMMA_TAGS:
        return 2.0 * ch(a[GAMMA_TAGS.index(tag)])
    is_beta = tag in BETA_TAGS
    i = (BETA_TAGS if is_beta else DELTA_TAGS).index(tag)
    j, k = (i + 1) % 3, (i + 2) % 3
    k1, s1 = eps1.kind, eps1.eps
    k2, s2 = eps2.kind, eps2.eps

    hexkinds = ("plus1", "minus1")
    if k1 in hexkinds and k2 in hexkinds:
        if k1 == k2:
            return None            # Euler class +-2: outside the table
        b = hyptrig.solve_hexagon(*a).b
        if is_beta:
            return (2.0 * ch(t[j] / 2) * ch(t[k] / 2)
                    + 2.0 * ch(b[i]) * sh(t[j] / 2) * sh(t[k] / 2))
        return 2.0 + 4.0 * (sh(a[k]) * sh(b[j]) * sh(t[i] / 2)) ** 2

    if k1 == "tri" and k2 == "tri":
        theta = hyptrig.solve_triangle(*a).theta
        if s1 == s2:
            if is_beta:
                return (2.0 * ch(t[j] / 2) * ch(t[k] / 2)
                        + 2.0 * math.cos(theta[i]) * sh(t[j] / 2) * sh(t[k] / 2))
            return 2.0 - 4.0 * (math.sin(theta[j]) * sh(a[k])
                                * sh(t[i] / 2)) ** 2
        if is_beta:
            return (2.0 * sh(t[j] / 2) * sh(t[k] / 2)
                    + 2.0 * math.cos(theta[i]) * ch(t[j] / 2) * ch(t[k] / 2))
        return 2.0 + 4.0 * (math.sin(theta[j]) * sh(a[k]) * ch(t[i] / 2)) ** 2

    if k1 == "selfhex" and k2 == "selfhex":
        if not _aligned(a):
            return None
        d = hyptrig.solve_self_hexagon(*a).d
        if s1 == s2:
            if is_beta:
                return None
            return 2.0 + 4.0 * (sh(t[i] / 2) * sh(d[j]) * sh(a[k])) ** 2
        if is_beta:
            sign = -1.0 if i == 2 else 1.0
            return (sign * 2.0 * sh(t[j] / 2) * sh(t[k] / 2)
                    + 2.0 * ch(d[i]) * ch(t[j] / 2) * ch(t[k] / 2))
        return 2.0 - 4.0 * (ch(t[i] / 2) * sh(d[j]) * sh(a[k])) ** 2

    if {k1, k2} == {"flat_upper", "flat_lower"}:
        if is_beta or not _aligned(a) or i != 2:
            return None
        u = s1 if k1 == "flat_upper" else s2
        v = s2 if k1 == "flat_upper" else s1
        return (2.0 + 4.0 * u * v * sh(a[0]) ** 2 * sh(a[1]) ** 2
                * math.exp(-t[2] if k1 == "flat_upper" else t[2]))

    zero_kinds = ("tri", "selfhex", "flat_upper", "flat_lower", "flat_diag")
    if k1 in zero_kinds and k2 in hexkinds:
        return _mixed_closed_form(eps1, eps2, a, t, tag, i, j, k)
    if k2 in zero_kinds and k1 in hexkinds:
        # exchanging the pants maps the configuration (h, Z; t) onto
        # (Z, flip(h); -t) with identical traces
        return _closed_form(eps2, eps1.euler_flipped(), a,
                            tuple(-x for x in t), tag)
    return None


def _mixed_closed_form(eps1: PantsCase, eps2: PantsCase, a, t, tag: str,
                       i: int, j: int, k: int) -> Optional[float]:
    """Closed forms for (Euler class 0 construction, hexagon) pairs.

    Stated against the -1 hexagon; against the +1 hexagon the same delta
    formulas hold with the orientation parameter of the first side negated
    (the mirror image configuration), while the beta words change lift sign
    and are left to the matrix route.
    """
    ch, sh = math.cosh, math.sinh
    is_beta = tag in BETA_TAGS
    s_eff = eps1.eps if eps2.kind == "minus1" else -eps1.eps
    if is_beta and eps2.kind != "minus1":
        return None
    b = hyptrig.solve_hexagon(*a).b
    if eps1.kind == "tri":
        theta = [s_eff * x for x in hyptrig.solve_triangle(*a).theta]
        if is_beta:
            return (-2.0 * math.cos(theta[i] / 2) * ch(b[i] / 2)
                    * ch((t[j] + t[k]) / 2)
                    - 2.0 * math.sin(theta[i] / 2) * sh(b[i] / 2)
                    * sh((t[j] - t[k]) / 2))
        return (2.0 * (sh(a[j]) ** 2 - sh(a[k]) ** 2) / sh(a[i]) ** 2
                + 2.0 * math.sin(theta[j]) * sh(b[j]) * sh(a[k]) ** 2
                * sh(t[i]))
    if is_beta:
        return None
    if eps1.kind == "selfhex":
        if not _aligned(a) or i != 2:
            return None
        d = [s_eff * x for x in hyptrig.solve_self_hexagon(*a).d]
        return (2.0 * ch(a[k]) ** 2
                - 2.0 * ch(b[j]) * ch(d[j]) * sh(a[k]) ** 2
                - 2.0 * ch(t[i]) * sh(a[k]) ** 2 * sh(b[j]) * sh(d[j]))
    if eps1.kind == "flat_upper":
        if not _aligned(a) or i != 2:
            return None
        return (2.0 - 4.0 * sh(b[0] / 2) ** 2 * sh(a[1]) ** 2
                + 2.0 * s_eff * sh(a[0]) * sh(a[1]) ** 2 * sh(b[0])
                * math.exp(-t[2]))
    if eps1.kind == "flat_lower":
        if not _aligned(a) or i != 2:
            return None
        return (2.0 - 4.0 * sh(b[0] / 2) ** 2 * sh(a[1]) ** 2
                + 2.0 * s_eff * sh(a[0]) * sh(a[1]) ** 2 * sh(b[0])
                * math.exp(t[2]))
    if eps1.kind == "flat_diag":
        if not _aligned(a) or i != 2:
            return None
        return 2.0 * ch(a[1]) ** 2 - 2.0 * ch(b[0]) * sh(a[1]) ** 2
    return None


# ---------------------------------------------------------------------------
# twists and the sign invariant
# ---------------------------------------------------------------------------

def dehn_twist_gamma(rep: GluedRep, i: int, k: int = 1) -> GluedRep:
    """Twist along gamma_i: t_i -> t_i + 2 k a_i (positive twist adds)."""
    if i not in (1, 2, 3):
        raise Genus2Error("curve index must be 1, 2 or 3")
    t = list(rep.t)
    t[i - 1] += 2.0 * k * rep.a[i - 1]
    return replace(rep, t=tuple(t))


def normalize_twists(rep: GluedRep) -> GluedRep:
    """Twist each t_i into [-a_i, a_i]; boundary ties resolve to +a_i."""
    t = list(rep.t)
    for i in range(3):
        width = 2.0 * rep.a[i]
        shift = math.floor((t[i] + rep.a[i]) / width)
        t[i] -= shift * width
        if abs(t[i] + rep.a[i]) < 1e-13:   # landed on the lower edge
            t[i] += width
    return replace(rep, t=tuple(t))


@dataclass(frozen=True)
class SignClass:
    value: str                       # "Plus", "Minus" or "Degenerate"

    def __str__(self) -> str:
        return self.value


def sign_invariant(rep: GluedRep, tol: float = TOL_SIGN) -> SignClass:
    """Sign invariant of an Euler class 0 representation.

    Plus when tr delta_3 < 2, Minus when > 2, Degenerate inside the
    tolerance band (a separating curve too close to the identity to
    classify).  The twists are normalised first: the invariant is constant
    along twist orbits, and reading it at the normalised point keeps the
    classification stable at extreme twists where tr delta_3 approaches 2
    asymptotically.
    """
    if rep.euler_nominal != 0:
        raise Genus2Error("sign invariant needs total Euler class 0")
    tr = trace_curve_matrix(normalize_twists(rep), "delta3")
    if tr < 2.0 - tol:
        return SignClass("Plus")
    if tr > 2.0 + tol:
        return SignClass("Minus")
    return SignClass("Degenerate")


def delta_side_consistency(rep: GluedRep, tol: float = TOL_SIGN) -> bool:
    """Whether tr delta_1, delta_2, delta_3 sit strictly on one side of 2."""
    if rep.euler_nominal != 0:
        raise Genus2Error("side consistency applies to Euler class 0")
    traces = [trace_curve_matrix(rep, tag) for tag in DELTA_TAGS]
    if any(abs(x - 2.0) <= tol for x in traces):
        raise Genus2Error(f"degenerate sample: delta traces {traces}")
    return len({x > 2.0 for x in traces}) == 1


# ---------------------------------------------------------------------------
# Euler class of the glued representation
# ---------------------------------------------------------------------------

def generator_images(rep: GluedRep) -> Tuple[np.ndarray, np.ndarray,
                                             np.ndarray, np.ndarray]:
    """Images (A1, B1, A2, B2) of a standard generating quadruple.

    The loops come from a spanning tree of the gluing complex: the first
    handle is carried by (beta_1, gamma_2), the second by (beta_2, gamma_1)
    conjugated through the connector gamma_2^-1 beta_3.  The matrix product
    [A2, B2][A1, B1] is +-identity, and its lifted deck power is the Euler
    class.
    """
    x, y = rep.p1.x, rep.p2.x
    a, t = rep.a, rep.t
    tr_ = make_translation
    p3 = mmul(x[1], tr_(a[2]), x[0])                 # transport v0 -> v3
    p5 = mmul(x[2], tr_(a[0]), p3)                   # transport v0 -> v5
    g1 = mmul(minv(p3), tr_(2 * a[0]), p3)
    g2 = mmul(minv(p5), tr_(2 * a[1]), p5)
    b1 = mmul(minv(x[0]), tr_(-t[2]), tr_(-a[2]), minv(y[1]), tr_(-a[0]),
              minv(y[2]), tr_(t[1]), p5)
    b2 = mmul(minv(x[0]), tr_(-t[2]), tr_(-a[2]), minv(y[1]), tr_(t[0]), p3)
    b3 = mmul(minv(p5), tr_(-t[1]), y[2], tr_(a[0] + t[0]), p3)
    w = mmul(minv(g2), b3)
    return b1, g2, mmul(w, b2, minv(w)), mmul(w, g1, minv(w))


def euler_class(rep: GluedRep) -> int:
    """Euler class of the glued representation by the Milnor algorithm."""
    a1, b1, a2, b2 = generator_images(rep)
    return psl2r.euler_class_closed(a1, b1, a2, b2)
