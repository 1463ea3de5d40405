"""Isometry kernel for the hyperbolic plane.

Matrices act on the upper half plane on the left; 2x2 real matrices of
determinant one, taken modulo sign.  Composition of group elements uses the
opposite ordering throughout the package: a word ``uv`` evaluates to the
matrix product ``M(v) M(u)`` (act by u first, then by v), and the commutator
of two elements is ``[A, B] = B^-1 A^-1 B A``, which is a well defined
element of SL(2,R) with an unambiguous trace.

The boundary circle of the disc model is parametrised by an angle in
[0, 2pi); the rotation-by-theta matrix acts on that angle as x -> x + theta,
which pins the deck generator of the universal cover to +2pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

TWO_PI = 2.0 * math.pi

TOL_DET = 1e-9      # determinant renormalisation guard
TOL_CLASS = 1e-9    # |tr| - 2 trichotomy band
TOL_EULER = 1e-6    # allowed deviation of a lifted deck shift from 2*pi*Z
TOL_KERNEL = 1e-8   # singular-value threshold for conjugator kernels

MatrixLike = Union[np.ndarray, "ProjectiveIsometry"]


class PSL2Error(ValueError):
    """Raised when an operation's geometric preconditions fail."""


# ---------------------------------------------------------------------------
# basic matrices
# ---------------------------------------------------------------------------

def _as_matrix(g: MatrixLike) -> np.ndarray:
    if isinstance(g, ProjectiveIsometry):
        return g.m
    m = np.asarray(g, dtype=float)
    if m.shape != (2, 2):
        raise PSL2Error(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


def make_matrix(m11: float, m12: float, m21: float, m22: float) -> np.ndarray:
    """Unit-determinant matrix from entries, renormalised within TOL_DET."""
    m = np.array([[m11, m12], [m21, m22]], dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if not np.isfinite(det) or det <= 0:
        raise PSL2Error(f"matrix determinant {det} is not positive")
    if abs(det - 1.0) > TOL_DET:
        raise PSL2Error(f"matrix determinant {det} too far from 1")
    return m / math.sqrt(det)


def make_translation(length: float) -> np.ndarray:
    """Translation by `length` along the axis (0, infinity)."""
    if not np.isfinite(length):
        raise PSL2Error("translation length must be finite")
    e = math.exp(length / 2.0)
    return np.array([[e, 0.0], [0.0, 1.0 / e]])


def make_rotation(theta: float) -> np.ndarray:
    """Rotation by `theta` around the point i."""
    if not np.isfinite(theta):
        raise PSL2Error("rotation angle must be finite")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, s], [-s, c]])


S = make_rotation(math.pi)
R_LEFT = make_rotation(math.pi / 2.0)
R_RIGHT = make_rotation(-math.pi / 2.0)
IDENTITY = np.eye(2)


def mmul(*ms: MatrixLike) -> np.ndarray:
    out = IDENTITY
    for m in ms:
        out = out @ _as_matrix(m)
    return out


def minv(g: MatrixLike) -> np.ndarray:
    m = _as_matrix(g)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def mtrace(g: MatrixLike) -> float:
    m = _as_matrix(g)
    return float(m[0, 0] + m[1, 1])


def deviation_from_projective_identity(g: MatrixLike) -> float:
    """max-norm distance to the nearer of +I, -I."""
    m = _as_matrix(g)
    return float(min(np.abs(m - IDENTITY).max(), np.abs(m + IDENTITY).max()))


def commutator(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """[A, B] = B^-1 A^-1 B A; sign-unambiguous in SL(2,R)."""
    am, bm = _as_matrix(a), _as_matrix(b)
    return minv(bm) @ minv(am) @ bm @ am


@dataclass(frozen=True)
class ProjectiveIsometry:
    """A PSL(2,R) element stored with canonical sign.

    The representative has its first nonzero row-major entry positive, so
    equal group elements compare equal entrywise.
    """

    m: np.ndarray

    @classmethod
    def of(cls, g: MatrixLike) -> "ProjectiveIsometry":
        m = _as_matrix(g)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1.0) > TOL_DET:
            m = make_matrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        for v in m.flat:
            if v != 0.0:
                if v < 0.0:
                    m = -m
                break
        out = object.__new__(cls)
        object.__setattr__(out, "m", m)
        return out

    def __matmul__(self, other: "ProjectiveIsometry") -> "ProjectiveIsometry":
        return ProjectiveIsometry.of(self.m @ _as_matrix(other))

    def inverse(self) -> "ProjectiveIsometry":
        return ProjectiveIsometry.of(minv(self.m))

    def almost_equal(self, other: MatrixLike, tol: float = 1e-9) -> bool:
        o = ProjectiveIsometry.of(other)
        return bool(np.abs(self.m - o.m).max() <= tol)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Elliptic:
    angle: float                  # rotation angle in (0, 2*pi)
    fixed_point: complex          # in the upper half plane


@dataclass(frozen=True)
class Parabolic:
    boundary_fixed_point: float   # in R, or math.inf


@dataclass(frozen=True)
class Hyperbolic:
    displacement: float
    axis: Tuple[float, float]     # (repelling, attracting) boundary points


IsometryClass = Union[Identity, Elliptic, Parabolic, Hyperbolic]


def _fixed_boundary_points(m: np.ndarray) -> List[float]:
    """Real fixed points of the Moebius action, infinity as math.inf."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    if abs(c) < 1e-300:
        pts = [math.inf]
        if abs(a - d) > 1e-300:
            pts.append(b / (d - a))
        return pts
    disc = (a - d) ** 2 + 4.0 * b * c     # = tr^2 - 4
    if disc < 0.0:
        return []
    r = math.sqrt(max(disc, 0.0))
    return [((a - d) - r) / (2.0 * c), ((a - d) + r) / (2.0 * c)]


def _conjugate_fixed_point_to_i(z: complex) -> np.ndarray:
    """Matrix g with g(z) = i for z in the upper half plane."""
    shift = np.array([[1.0, -z.real], [0.0, 1.0]])
    s = math.sqrt(z.imag)
    scale = np.array([[1.0 / s, 0.0], [0.0, s]])
    return scale @ shift


def classify(g: MatrixLike, tol: float = TOL_CLASS) -> IsometryClass:
    """Trichotomy by |tr| against 2, with geometric data from eigenvectors."""
    m = _as_matrix(g)
    if deviation_from_projective_identity(m) <= tol:
        return Identity()
    tr = mtrace(m)
    if abs(tr) > 2.0 + tol:
        lam = 2.0 * math.acosh(abs(tr) / 2.0)
        evals, evecs = np.linalg.eig(m)
        order = np.argsort(np.abs(evals))        # [repelling, attracting]
        pts = []
        for idx in order:
            v = np.real(evecs[:, idx])
            pts.append(math.inf if abs(v[1]) < 1e-14 * abs(v[0]) else v[0] / v[1])
        return Hyperbolic(displacement=lam, axis=(pts[0], pts[1]))
    if abs(tr) >= 2.0 - tol:
        pts = _fixed_boundary_points(m)
        return Parabolic(boundary_fixed_point=pts[0])
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    # c vanishes only for matrices with real spectrum, never for elliptics
    im = math.sqrt(4.0 - tr * tr) / (2.0 * abs(c))
    z = complex((a - d) / (2.0 * c), im)
    conj = _conjugate_fixed_point_to_i(z)
    r = conj @ m @ minv(conj)
    theta = 2.0 * math.atan2(r[0, 1], r[0, 0])
    theta %= TWO_PI
    return Elliptic(angle=theta, fixed_point=z)


def displacement(g: MatrixLike) -> float:
    """Translation length 2*arccosh(max(1, |tr|/2))."""
    return 2.0 * math.acosh(max(1.0, abs(mtrace(g)) / 2.0))


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

Word = Union[str, Iterable[Tuple[str, int]]]


def word_letters(word: Word) -> List[Tuple[str, int]]:
    """Normalise a word to (letter, +-1) tokens.

    A plain string is read one character at a time, uppercase meaning the
    inverse letter.  Any other iterable must yield (name, exponent) pairs;
    exponents may be arbitrary integers.
    """
    letters: List[Tuple[str, int]] = []
    if isinstance(word, str):
        for ch in word:
            if ch.isspace():
                continue
            if ch.isupper():
                letters.append((ch.lower(), -1))
            else:
                letters.append((ch, 1))
        return letters
    for name, exp in word:
        exp = int(exp)
        if exp == 0:
            continue
        sgn = 1 if exp > 0 else -1
        letters.extend([(name, sgn)] * abs(exp))
    return letters


def evaluate_word(images: Dict[str, MatrixLike], word: Word) -> np.ndarray:
    """Evaluate a word under the reversed convention.

    Concatenation uv maps to the matrix product M(v) M(u): the first letter
    of the word is the rightmost factor.
    """
    out = IDENTITY
    for name, sgn in word_letters(word):
        if name not in images:
            raise PSL2Error(f"unbound letter {name!r}")
        m = _as_matrix(images[name])
        out = (m if sgn > 0 else minv(m)) @ out
    return out


# ---------------------------------------------------------------------------
# commutator geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticComm:
    quarter_angle: float
    crossing: float


@dataclass(frozen=True)
class ParabolicComm:
    crossing: float


@dataclass(frozen=True)
class HyperbolicComm:
    quarter_displacement: float
    crossing: float


CommutatorGeometry = Union[EllipticComm, ParabolicComm, HyperbolicComm]


def commutator_geometry(lam_a: float, lam_b: float,
                        tol: float = TOL_CLASS) -> CommutatorGeometry:
    """Commutator type for perpendicularly crossing axes.

    The crossing datum is p = sinh(lam_a/2) sinh(lam_b/2); the commutator is
    elliptic, parabolic or hyperbolic according to p < 1, p = 1, p > 1, with
    quarter angle arccos(p) resp. quarter displacement arccosh(p).
    """
    if lam_a <= 0.0 or lam_b <= 0.0:
        raise PSL2Error("displacements must be positive")
    p = math.sinh(lam_a / 2.0) * math.sinh(lam_b / 2.0)
    if p < 1.0 - tol:
        return EllipticComm(quarter_angle=math.acos(p), crossing=p)
    if p > 1.0 + tol:
        return HyperbolicComm(quarter_displacement=math.acosh(p), crossing=p)
    return ParabolicComm(crossing=p)


def remark_relation_check(alpha: float, lam_b: float, param: float,
                          kind: str) -> float:
    """Residual |LHS - 1| of the distance relations for crossing commutators.

    kind="elliptic": sinh(alpha) tanh(lam_b/2) tan(theta) = 1, with theta
    the quarter rotation angle of the commutator.  kind="hyperbolic":
    cosh(alpha) tanh(lam_b/2) tanh(c) = 1 with c the quarter displacement.
    In both relations alpha is the distance from the commutator's fixed
    point (resp. axis) to the axis of the element whose displacement lam_b
    is passed; the relation holds for either element of the pair with its
    own displacement.
    """
    if lam_b <= 0.0:
        raise PSL2Error("displacement must be positive")
    if kind == "elliptic":
        if abs(math.cos(param)) < 1e-12:
            raise PSL2Error("tan singularity at theta = pi/2")
        lhs = math.sinh(alpha) * math.tanh(lam_b / 2.0) * math.tan(param)
    elif kind == "hyperbolic":
        lhs = math.cosh(alpha) * math.tanh(lam_b / 2.0) * math.tanh(param)
    else:
        raise PSL2Error(f"unknown relation kind {kind!r}")
    return abs(lhs - 1.0)


# ---------------------------------------------------------------------------
# planar geometry helpers (upper half plane)
# ---------------------------------------------------------------------------

def boundary_angle(x: float) -> float:
    """Disc-model boundary angle of a real point (or math.inf)."""
    if math.isinf(x):
        return (-2.0 * math.atan2(0.0, 1.0)) % TWO_PI   # direction (1, 0)
    return (-2.0 * math.atan2(1.0, x)) % TWO_PI


def axes_cross(a: MatrixLike, b: MatrixLike) -> bool:
    """Whether the axes of two hyperbolic elements cross inside the plane.

    Decided by interleaving of endpoint angles on the boundary circle,
    independently of any trace identity.
    """
    ca, cb = classify(a), classify(b)
    if not isinstance(ca, Hyperbolic) or not isinstance(cb, Hyperbolic):
        raise PSL2Error("axes_cross needs two hyperbolic elements")
    p, q = (boundary_angle(x) for x in ca.axis)
    r, s = (boundary_angle(x) for x in cb.axis)
    for u in (r, s):
        for v in (p, q):
            if abs((u - v + math.pi) % TWO_PI - math.pi) < 1e-12:
                return False      # asymptotic axes meet only at the boundary
    in_arc_r = (r - p) % TWO_PI < (q - p) % TWO_PI
    in_arc_s = (s - p) % TWO_PI < (q - p) % TWO_PI
    return in_arc_r != in_arc_s


def hyp_distance(z: complex, w: complex) -> float:
    q = abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return math.acosh(1.0 + q)


def reflect_across_geodesic(z: complex, p: float, q: float) -> complex:
    """Reflection of z across the geodesic with boundary endpoints p, q."""
    if math.isinf(p) or math.isinf(q):
        x = q if math.isinf(p) else p
        return complex(2.0 * x - z.real, z.imag)
    c = (p + q) / 2.0
    r2 = ((q - p) / 2.0) ** 2
    return c + r2 / (z - c).conjugate()


def point_to_geodesic_distance(z: complex, p: float, q: float) -> float:
    return 0.5 * hyp_distance(z, reflect_across_geodesic(z, p, q))


def geodesic_to_geodesic_distance(p: float, q: float, r: float, s: float,
                                  samples: int = 64) -> float:
    """Distance between two disjoint geodesics, by golden-section refinement."""
    def param(u):   # point on geodesic (p, q)
        if math.isinf(p) or math.isinf(q):
            x = q if math.isinf(p) else p
            return complex(x, math.exp(u))
        c, rad = (p + q) / 2.0, abs(q - p) / 2.0
        t = math.tanh(u)
        return complex(c + rad * t, rad * math.sqrt(max(1.0 - t * t, 1e-300)))

    us = np.linspace(-8.0, 8.0, samples)
    ds = [point_to_geodesic_distance(param(u), r, s) for u in us]
    i = int(np.argmin(ds))
    lo, hi = us[max(i - 1, 0)], us[min(i + 1, samples - 1)]
    for _ in range(80):
        m1 = lo + (hi - lo) * 0.382
        m2 = lo + (hi - lo) * 0.618
        if point_to_geodesic_distance(param(m1), r, s) < \
           point_to_geodesic_distance(param(m2), r, s):
            hi = m2
        else:
            lo = m1
    return point_to_geodesic_distance(param((lo + hi) / 2.0), r, s)


def hyperbolic_power(b: MatrixLike, t: float) -> np.ndarray:
    """B^t through the one-parameter subgroup of a hyperbolic element."""
    m = _as_matrix(b)
    cb = classify(m)
    if not isinstance(cb, Hyperbolic):
        raise PSL2Error("powers need a hyperbolic element")
    lam = cb.displacement
    v = _diagonalizing_matrix(m)
    return v @ make_translation(t * lam) @ minv(v)


def _diagonalizing_matrix(m: np.ndarray) -> np.ndarray:
    """V with V T_lambda V^-1 = +-m, columns scaled to determinant one."""
    evals, evecs = np.linalg.eig(m)
    order = np.argsort(-np.abs(evals))       # attracting first
    v = np.real(evecs[:, order])
    det = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    if det < 0:
        v[:, 1] = -v[:, 1]
        det = -det
    return v / math.sqrt(det)


def perpendicularize(a: MatrixLike, b: MatrixLike) -> float:
    """t such that the axis of B^t A is perpendicular to the axis of B.

    Both elements must be hyperbolic with crossing axes.  Replacing A by
    B^t A leaves the commutator [A, B] unchanged.
    """
    am, bm = _as_matrix(a), _as_matrix(b)
    if not axes_cross(am, bm):
        raise PSL2Error("axes must cross exactly once")
    if mtrace(bm) < 0:
        bm = -bm
    v = _diagonalizing_matrix(bm)
    # in the frame where B translates along (0, inf), perpendicularity of
    # T_{t*lam} A' to (0, inf) means the diagonal of T A' is balanced
    ap = minv(v) @ am @ v
    lam = displacement(bm)
    ratio = ap[1, 1] / ap[0, 0]
    if ratio <= 0.0:
        raise PSL2Error("no perpendicularizing power exists")
    return math.log(ratio) / lam


# ---------------------------------------------------------------------------
# boundary circle lifts
# ---------------------------------------------------------------------------

_SNAP = 1e-9


def circle_position(g: MatrixLike, phi: float) -> float:
    """Image in [0, 2pi) of the boundary angle phi under the isometry."""
    m = _as_matrix(g)
    half = phi / 2.0
    w = m @ np.array([math.cos(half), -math.sin(half)])
    return (-2.0 * math.atan2(w[1], w[0])) % TWO_PI


@dataclass(frozen=True)
class LiftedIsometry:
    """Lift to the universal cover: isometry plus base value f~(0).

    The full lifted map is reconstructed from monotonicity; composing with
    the deck generator adds exactly 2pi to the base.
    """

    m: np.ndarray
    base: float

    def __call__(self, y: float) -> float:
        k = round(y / TWO_PI)
        if abs(y - k * TWO_PI) < _SNAP:
            return k * TWO_PI + self.base
        mdiv, r = divmod(y, TWO_PI)
        adv = (circle_position(self.m, r) - circle_position(self.m, 0.0)) % TWO_PI
        return mdiv * TWO_PI + self.base + adv

    def deck(self, k: int) -> "LiftedIsometry":
        return LiftedIsometry(self.m, self.base + k * TWO_PI)


def lift(g: MatrixLike, kind: str = "base") -> LiftedIsometry:
    """Lift with base in [0, 2pi), or the canonical lift of a hyperbolic.

    kind="canonical" requires a hyperbolic element (or the identity) and
    returns the lift fixing its boundary fixed points, with translation
    number zero.
    """
    m = _as_matrix(g)
    base = circle_position(m, 0.0)
    if kind == "base":
        return LiftedIsometry(m, base)
    if kind != "canonical":
        raise PSL2Error(f"unknown lift kind {kind!r}")
    cl = classify(m)
    if isinstance(cl, Identity):
        return LiftedIsometry(m, 0.0)
    if not isinstance(cl, Hyperbolic):
        raise PSL2Error("canonical lifts exist only for hyperbolic elements")
    phi = boundary_angle(cl.axis[1])
    f0 = LiftedIsometry(m, base)
    k = round((f0(phi) - phi) / TWO_PI)
    return LiftedIsometry(m, base - k * TWO_PI)


def lifted_compose(f: LiftedIsometry, g: LiftedIsometry) -> LiftedIsometry:
    """Composite lift x -> f~(g~(x)); projects to the matrix product."""
    return LiftedIsometry(f.m @ g.m, f(g.base))


def lifted_inverse(f: LiftedIsometry) -> LiftedIsometry:
    m = minv(f.m)
    g0 = LiftedIsometry(m, circle_position(m, 0.0))
    k = round(g0(f.base) / TWO_PI)
    return g0.deck(-k)


def lifted_commutator(fa: LiftedIsometry, fb: LiftedIsometry) -> LiftedIsometry:
    """Lift of [A, B] = B^-1 A^-1 B A; independent of the deck choices."""
    return lifted_compose(
        lifted_compose(lifted_inverse(fb), lifted_inverse(fa)),
        lifted_compose(fb, fa))


def _relation_scale(*ms: MatrixLike) -> float:
    """Tolerance scale for relator residuals: floating-point error in a
    product of words grows with the square of the largest entry size."""
    top = max(float(np.abs(_as_matrix(m)).max()) for m in ms)
    return max(1.0, top) ** 2


def _deck_power(l: LiftedIsometry, tol: float, scale: float = 1.0) -> int:
    """Integer k with l = deck^k, by consensus over several sample points."""
    if deviation_from_projective_identity(l.m) > 1e-9 * scale:
        raise PSL2Error("lifted element does not project to the identity")
    shifts = [l.base] + [l(x) - x for x in (1.1, 2.7, 4.4)]
    ks = {round(s / TWO_PI) for s in shifts}
    # boundary angles lose accuracy with the entry size of the words
    # feeding the lift; the padding stays far below the deck gap 2*pi, and
    # the projection to +-identity has already been verified above
    err_tol = min(max(tol, 3e-10 * scale), 0.5)
    err = max(abs(s - round(s / TWO_PI) * TWO_PI) for s in shifts)
    if len(ks) != 1 or err > err_tol:
        raise PSL2Error(f"lifted shift {shifts} is not a consistent deck power")
    return ks.pop()


def euler_class_closed(a1: MatrixLike, b1: MatrixLike,
                       a2: MatrixLike, b2: MatrixLike,
                       tol: float = TOL_EULER) -> int:
    """Euler class of a closed genus-2 representation (Milnor algorithm).

    The four matrices are the images of a standard generating quadruple and
    must satisfy the surface relation [a1,b1][a2,b2] = 1 up to sign.  The
    lifted relator is a deck power, independent of the choice of lifts; the
    sign is calibrated so that the Fuchsian gluings take the value -2.
    """
    scale = _relation_scale(a1, b1, a2, b2)
    la1, lb1 = lift(a1), lift(b1)
    la2, lb2 = lift(a2), lift(b2)
    rel = lifted_compose(lifted_commutator(la2, lb2),
                         lifted_commutator(la1, lb1))
    if deviation_from_projective_identity(rel.m) > 1e-9 * scale:
        raise PSL2Error("surface relation violated beyond tolerance")
    return _deck_power(rel, tol, scale)


def euler_class_relative(handles: Sequence[Tuple[MatrixLike, MatrixLike]],
                         boundaries: Sequence[MatrixLike],
                         tol: float = TOL_EULER) -> int:
    """Relative Euler class, canonical lifts on the boundary images.

    `handles` holds the images (A_i, B_i) of the interior handle generators
    (arbitrary lifts), `boundaries` the images of the boundary curves, each
    of which must be hyperbolic.  Computes the deck power of
    C~_n ... C~_1 [A~_g, B~_g] ... [A~_1, B~_1].
    """
    if not boundaries:
        raise PSL2Error("relative Euler class needs at least one boundary")
    for c in boundaries:
        if not isinstance(classify(c), Hyperbolic):
            raise PSL2Error("boundary image is not hyperbolic")
    scale = _relation_scale(*(list(boundaries)
                              + [m for pair in handles for m in pair]))
    rel = None
    for am, bm in handles:
        com = lifted_commutator(lift(am), lift(bm))
        rel = com if rel is None else lifted_compose(com, rel)
    for c in boundaries:
        lc = lift(c, kind="canonical")
        rel = lc if rel is None else lifted_compose(lc, rel)
    return _deck_power(rel, tol, scale)


# ---------------------------------------------------------------------------
# conjugator sign, handle sign, elliptic powers
# ---------------------------------------------------------------------------

def conjugator_sign(pair: Tuple[MatrixLike, MatrixLike],
                    image_pair: Tuple[MatrixLike, MatrixLike]) -> int:
    """Sign of det g for the g conjugating one pair onto the other.

    Solves g P = P' g, g Q = Q' g as an 8x4 linear system; the kernel must
    be one dimensional (the pair must be non-elementary), detected by
    singular values against TOL_KERNEL.
    """
    p, q = (_as_matrix(x) for x in pair)
    pp, qq = (_as_matrix(x) for x in image_pair)
    if abs(mtrace(commutator(p, q)) - 2.0) <= TOL_CLASS:
        raise PSL2Error("pair is elementary (commutator trace 2)")
    rows = []
    for m, mp in ((p, pp), (q, qq)):
        # (g m - mp g) entries, g as row-major vector
        a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        A, B, C, D = mp[0, 0], mp[0, 1], mp[1, 0], mp[1, 1]
        rows.extend([
            [a - A, c, -B, 0.0],
            [b, d - A, 0.0, -B],
            [-C, 0.0, a - D, c],
            [0.0, -C, b, d - D],
        ])
    sys = np.array(rows)
    _, sv, vt = np.linalg.svd(sys)
    if sv[-2] < TOL_KERNEL * max(sv[0], 1.0):
        raise PSL2Error("conjugator kernel is not one dimensional")
    if sv[-1] > TOL_KERNEL * max(sv[0], 1.0):
        raise PSL2Error("no conjugator exists (inconsistent pair)")
    g = vt[-1].reshape(2, 2)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(det) < 1e-12:
        raise PSL2Error("conjugator is singular")
    return 1 if det > 0 else -1


def handle_sign(p: MatrixLike, q: MatrixLike, tol: float = TOL_CLASS) -> Union[int, str]:
    """Orientation class of a handle pair, from the commutator trace.

    Returns +1 when Tr[P, Q] < 2 (hyperbolic images with crossing axes),
    -1 when Tr[P, Q] > 2 (disjoint axes, or a non-order-2 elliptic or
    parabolic paired with a hyperbolic avoiding its fixed point), and the
    string "degenerate" inside the tolerance band around 2.
    """
    c = mtrace(commutator(p, q))
    if c < 2.0 - tol:
        return 1
    if c > 2.0 + tol:
        return -1
    return "degenerate"


def elliptic_power(a: MatrixLike, b: MatrixLike, search_bound: int = 50) -> int:
    """Smallest |n| with B A^n elliptic and not of order two.

    A must be elliptic; writing A as a rotation in an adapted basis with
    B = [[x, y], [z, t]] there, the trace of B A^n is
    (x + t) cos(n alpha) + (z - y) sin(n alpha).
    """
    am = _as_matrix(a)
    cl = classify(am)
    if not isinstance(cl, Elliptic):
        raise PSL2Error("first element must be elliptic")
    conj = _conjugate_fixed_point_to_i(cl.fixed_point)
    bp = conj @ _as_matrix(b) @ minv(conj)
    ap = conj @ am @ minv(conj)
    alpha = math.atan2(ap[0, 1], ap[0, 0])
    u = bp[0, 0] + bp[1, 1]
    v = bp[1, 0] - bp[0, 1]
    if math.hypot(u, v) < 1e-12:
        raise PSL2Error("degenerate pair: (x + t, z - y) = (0, 0)")
    for k in range(search_bound + 1):
        for n in ([0] if k == 0 else [k, -k]):
            tr = u * math.cos(n * alpha) + v * math.sin(n * alpha)
            if 1e-9 < abs(tr) < 2.0 - 1e-9:
                return n
    raise PSL2Error(f"no elliptic power found within |n| <= {search_bound}")
