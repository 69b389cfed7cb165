"""Exact lattice constants for half-plane random maps.

Partition functions Z_*(p), one-step peeling case weights, their truncated
sums with certified power-tail bounds, and the closed-form percolation
thresholds.  Everything here is exact arithmetic; floats appear only in the
(rigorous, conservative) tail bounds and in diagnostics.

Conventions worth spelling out once:

* Triangulation jumps: the revealed triangle's third vertex sits k boundary
  edges to the left or to the right of the peeled edge, each side with
  weight q_k = Z(k+1) alpha^-k.  Type 1 admits k = 0 (self-loop chord);
  type 2 needs k >= 1.

* Quadrangulation cases: an internal-vertex case (three exposed edges,
  weight (alpha^2/rho^2) = 3/8); odd jumps k >= 1 per side (two exposed
  edges, enclosed (k+1)-gon, weight Z(k+1) alpha^(1-k) / rho); even jumps
  k' >= 0 per side (one exposed edge, enclosed (k'+2)-gon, weight
  Z(k'+2) alpha^-k' / rho); and double jumps (k1, k2) both odd, one exposed
  edge, three placements each of weight Z(k1+1) Z(k2+1) alpha^(-k1-k2).
  The even-jump range includes k' = 0 (the revealed quadrangle pinches at an
  endpoint of the peeled edge and encloses a 2-gon): with that range the
  case weights sum to exactly 1 and E[R] = delta/2; restricting to k' >= 2
  leaves a 2/9 mass deficit.

* Z_quad(2) = 4/3, the Gamma-function limit of the closed form at p = 1
  (the naive (-1)!/(-1)! = 1 cancellation would give 4 and break the
  normalization identity by the same 2/9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .exact import ExactValue, double_factorial, exact_rat, _rat


class MapType(Enum):
    TRI1 = "tri1"
    TRI2 = "tri2"
    QUAD = "quad"


class PercolationModel(Enum):
    SITE = "site"
    FACE = "face"
    BOND = "bond"
    BOND_DUAL = "bonddual"
    FACE_PRIME = "faceprime"


class LatticeError(ValueError):
    pass


class OpenProblemError(LatticeError):
    """Raised for quantities the theory leaves open (site threshold on
    quadrangulations)."""


@dataclass(frozen=True)
class MapParams:
    """Growth and boundary constants of a map class.

    alpha_sq is alpha^2, exact for every type.  alpha itself is sqrt(54) for
    quadrangulations, which lies outside Q(sqrt(3)); since every case weight
    uses only even powers of alpha, storing the square keeps all
    probabilities exact.  K is the asymptotic enumeration constant, a float
    diagnostic never used in probability computations.
    """

    rho: ExactValue
    alpha_sq: ExactValue
    delta: ExactValue
    K: float

    @property
    def alpha_float(self) -> float:
        return math.sqrt(self.alpha_sq.to_float())

    def alpha_pow(self, n: int) -> ExactValue:
        """Exact alpha^n; requires n even when alpha itself is irrational."""
        if n % 2 == 0:
            return self.alpha_sq ** (n // 2)
        root = _alpha_exact_root(self.alpha_sq)
        if root is None:
            raise LatticeError("odd power of an irrational alpha")
        return root ** n


def _alpha_exact_root(alpha_sq: ExactValue):
    # alpha is rational for both triangulation types (12 and 9)
    a = alpha_sq.as_rational()
    n, d = int(a.numerator), int(a.denominator)
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return exact_rat(rn, rd)
    return None


@lru_cache(maxsize=None)
def map_params(t: MapType) -> MapParams:
    if t is MapType.TRI1:
        return MapParams(
            rho=ExactValue(0, 12),                       # sqrt(432) = 12*sqrt(3)
            alpha_sq=exact_rat(144),
            delta=ExactValue(0, _rat(1, 3)),             # 1/sqrt(3) = sqrt(3)/3
            K=1.0 / (36.0 * math.sqrt(2.0) * math.pi),
        )
    if t is MapType.TRI2:
        return MapParams(
            rho=exact_rat(27, 2),
            alpha_sq=exact_rat(81),
            delta=exact_rat(2, 3),
            K=1.0 / (54.0 * math.pi * math.sqrt(3.0)),
        )
    if t is MapType.QUAD:
        return MapParams(
            rho=exact_rat(12),
            alpha_sq=exact_rat(54),
            delta=exact_rat(1),
            K=1.0 / (8.0 * math.sqrt(3.0) * math.pi),
        )
    raise LatticeError(f"unknown map type {t}")


# ---------------------------------------------------------------------------
# Partition functions
# ---------------------------------------------------------------------------

def min_perimeter(t: MapType) -> int:
    return 1 if t is MapType.TRI1 else 2


@lru_cache(maxsize=None)
def partition_function(t: MapType, p: int) -> ExactValue:
    """Free Boltzmann partition function Z_*(p) of the p-gon, exact."""
    if not isinstance(p, int):
        raise LatticeError("perimeter must be an integer")
    if t is MapType.TRI1:
        if p < 1:
            raise LatticeError("type-1 triangulations need perimeter >= 1")
        if p == 1:
            return exact_rat(1, 2) - ExactValue(0, _rat(1, 4))  # (2 - sqrt3)/4
        # (2p-5)!! 6^p / (8 sqrt(3) p!)  ==  sqrt(3) * (2p-5)!! 6^p / (24 p!)
        num = double_factorial(2 * p - 5) * 6 ** p
        return ExactValue(0, _rat(num, 24 * math.factorial(p)))
    if t is MapType.TRI2:
        if p < 2:
            raise LatticeError("type-2 triangulations need perimeter >= 2")
        num = math.factorial(2 * p - 4)
        den = math.factorial(p - 2) * math.factorial(p)
        return exact_rat(num, den) * exact_rat(9, 4) ** (p - 1)
    if t is MapType.QUAD:
        if p < 2 or p % 2:
            raise LatticeError("quadrangulations need even perimeter >= 2")
        m = p // 2
        if m == 1:
            # Gamma-limit of 8^m (3m-4)!/((m-2)!(2m)!) at m = 1: the ratio
            # Gamma(3m-3)/Gamma(m-1) -> 1/3, hence 8*(1/3)/2! = 4/3.  This is
            # the value of the convergent series sum #M_{n,2} 12^-n.
            return exact_rat(4, 3)
        num = 8 ** m * math.factorial(3 * m - 4)
        den = math.factorial(m - 2) * math.factorial(2 * m)
        return exact_rat(num, den)
    raise LatticeError(f"unknown map type {t}")


def z_ratio(t: MapType, p: int):
    """Exact Z(p + step)/Z(p) as a small rational, step = 1 (tri) or 2 (quad).

    These closed-form ratios drive both the exact truncated sums and the
    float tables; they avoid ever materialising the huge factorials.
    """
    if t is MapType.TRI2:
        # Z(p+1)/Z(p) = (9/4)(2p-2)(2p-3)/((p-1)(p+1)) = 9(2p-3)/(2(p+1))
        return _rat(9 * (2 * p - 3), 2 * (p + 1))
    if t is MapType.TRI1:
        if p == 1:
            q = partition_function(t, 2) / partition_function(t, 1)
            return q  # ExactValue 9 + 6 sqrt3, irrational
        return _rat(6 * (2 * p - 3), p + 1)
    if t is MapType.QUAD:
        m = p // 2
        if m == 1:
            return _rat(4)  # Z(4)/Z(2) = (16/3)/(4/3)
        num = 8 * (3 * m - 1) * (3 * m - 2) * (3 * m - 3)
        den = (m - 1) * (2 * m + 1) * (2 * m + 2)
        return _rat(num, den)
    raise LatticeError(f"unknown map type {t}")


# ---------------------------------------------------------------------------
# Peeling cases
# ---------------------------------------------------------------------------

# case kinds
INTERNAL = "internal"            # tri: E=2; quad: E=3 (two new vertices)
JUMP_RIGHT = "jump_right"        # tri only
JUMP_LEFT = "jump_left"
QUAD_ODD_RIGHT = "odd_right"     # quad, k odd >= 1, E=2
QUAD_ODD_LEFT = "odd_left"
QUAD_EVEN_RIGHT = "even_right"   # quad, k' even >= 0, E=1
QUAD_EVEN_LEFT = "even_left"
QUAD_DOUBLE = "double"           # quad, k1,k2 odd, placement in {0,1,2}


@dataclass(frozen=True)
class PeelCase:
    """One elementary peeling outcome with its (E, R, L) consequence.

    For QUAD_DOUBLE, placement counts the enclosed segments lying to the
    right: 0 -> both left, 1 -> k1 right / k2 left, 2 -> both right.
    """

    kind: str
    k: int = 0
    k2: int = 0
    placement: int = 0

    def consequence(self, t: MapType):
        """(exposed, swallowed_right, swallowed_left)."""
        kind = self.kind
        if t in (MapType.TRI1, MapType.TRI2):
            if kind == INTERNAL:
                return (2, 0, 0)
            if kind == JUMP_RIGHT:
                return (1, self.k, 0)
            if kind == JUMP_LEFT:
                return (1, 0, self.k)
            raise LatticeError(f"{kind} is not a triangulation case")
        if kind == INTERNAL:
            return (3, 0, 0)
        if kind == QUAD_ODD_RIGHT:
            return (2, self.k, 0)
        if kind == QUAD_ODD_LEFT:
            return (2, 0, self.k)
        if kind == QUAD_EVEN_RIGHT:
            return (1, self.k, 0)
        if kind == QUAD_EVEN_LEFT:
            return (1, 0, self.k)
        if kind == QUAD_DOUBLE:
            if self.placement == 0:
                return (1, 0, self.k + self.k2)
            if self.placement == 1:
                return (1, self.k, self.k2)
            return (1, self.k + self.k2, 0)
        raise LatticeError(f"unknown case kind {kind}")


def _validate_case(t: MapType, c: PeelCase):
    kind = c.kind
    if t in (MapType.TRI1, MapType.TRI2):
        if kind == INTERNAL:
            return
        if kind not in (JUMP_RIGHT, JUMP_LEFT):
            raise LatticeError(f"{kind} invalid for {t.value}")
        kmin = 0 if t is MapType.TRI1 else 1
        if c.k < kmin:
            raise LatticeError(f"jump size {c.k} < {kmin} for {t.value}")
        return
    if kind == INTERNAL:
        return
    if kind in (QUAD_ODD_RIGHT, QUAD_ODD_LEFT):
        if c.k < 1 or c.k % 2 == 0:
            raise LatticeError(f"odd jump needs odd k >= 1, got {c.k}")
        return
    if kind in (QUAD_EVEN_RIGHT, QUAD_EVEN_LEFT):
        if c.k < 0 or c.k % 2:
            raise LatticeError(f"even jump needs even k >= 0, got {c.k}")
        return
    if kind == QUAD_DOUBLE:
        if c.k < 1 or c.k % 2 == 0 or c.k2 < 1 or c.k2 % 2 == 0:
            raise LatticeError("double jump needs k1, k2 odd >= 1")
        if c.placement not in (0, 1, 2):
            raise LatticeError("placement must be 0, 1 or 2")
        return
    raise LatticeError(f"{kind} invalid for {t.value}")


def peel_weight(t: MapType, c: PeelCase) -> ExactValue:
    """Exact probability of a single peeling case."""
    _validate_case(t, c)
    par = map_params(t)
    if t in (MapType.TRI1, MapType.TRI2):
        if c.kind == INTERNAL:
            # alpha/rho: tri1 = 12/(12 sqrt3) = 1/sqrt3, tri2 = 9/(27/2) = 2/3
            return par.alpha_pow(1) / par.rho
        return partition_function(t, c.k + 1) * par.alpha_pow(-c.k)
    # quadrangulations
    if c.kind == INTERNAL:
        return par.alpha_sq / (par.rho * par.rho)
    if c.kind in (QUAD_ODD_RIGHT, QUAD_ODD_LEFT):
        return (partition_function(t, c.k + 1) * par.alpha_pow(1 - c.k)) / par.rho
    if c.kind in (QUAD_EVEN_RIGHT, QUAD_EVEN_LEFT):
        return (partition_function(t, c.k + 2) * par.alpha_pow(-c.k)) / par.rho
    # double jump: same weight for each of the three placements
    return (partition_function(t, c.k + 1) * partition_function(t, c.k2 + 1)
            * par.alpha_pow(-c.k - c.k2))


# ---------------------------------------------------------------------------
# w-sequences: w(m) = Z(m) alpha^-m, the universal building block
# ---------------------------------------------------------------------------
#
# Triangulations:   q_k = alpha * w(k+1)                    (per side)
# Quad odd jumps:   q_k = (alpha^2/rho) * w(k+1)            (per side, k+1 even)
# Quad even jumps:  q_k' = (alpha^2/rho) * w(k'+2)          (per side)
# Quad doubles:     q_{k1,k2} = alpha^2 w(k1+1) w(k2+1)     (per placement)
#
# so every truncated sum and tail bound reduces to partial sums of w and m*w.

def w_exact(t: MapType, m: int) -> ExactValue:
    return partition_function(t, m) * map_params(t).alpha_pow(-m)


def _w_ratio(t: MapType, m: int):
    """Exact w(m + step)/w(m), rational for m past the irrational prefix."""
    par = map_params(t)
    if t is MapType.QUAD:
        return z_ratio(t, m) / _rat(54)
    if t is MapType.TRI2:
        return z_ratio(t, m) / _rat(9)
    # TRI1: alpha = 12
    if m == 1:
        return w_exact(t, 2) / w_exact(t, 1)  # irrational ExactValue
    return z_ratio(t, m) / _rat(12)


def _w_partial_sums(t: MapType, m_min: int, m_max: int):
    """Exact (sum w(m), sum m*w(m)) over m in [m_min, m_max] (step 2 for quad).

    Also returns the last included index and the float value of its w, which
    the tail bounds hang off.
    """
    step = 2 if t is MapType.QUAD else 1
    s0 = exact_rat(0)
    s1 = exact_rat(0)
    w = w_exact(t, m_min)
    m = m_min
    m_last, w_last = m_min, w
    while m <= m_max:
        s0 = s0 + w
        s1 = s1 + w * m
        m_last, w_last = m, w
        r = _w_ratio(t, m)
        w = w * r if isinstance(r, ExactValue) else w * ExactValue(r)
        m += step
    return s0, s1, m_last, w_last.to_float() * (1 + 1e-12)


# -- certified tail bounds ---------------------------------------------------
#
# w(m) ~ kappa m^{-5/2} alpha^... with ratio w(m+d)/w(m) = (m/(m+d))^{5/2}
# (1 + O(1/m^2)).  We certify, by exact rational comparison of squares on a
# long prefix, that
#        [w(m+d)/w(m)]^2 * ((m+d)/m)^5  <=  (1 + A/m^2)^2,   A = 4,
# for every m in [M0, M_CERT].  Telescoping gives, for all m > M in that
# range,   w(m) <= C(M) m^{-5/2}  with  C(M) = w(M) M^{5/2} exp(A/(d(M-d))),
# whence  sum_{m>M, step d} w(m)   <= C(M)/d * (2/3) M^{-3/2}
#         sum_{m>M, step d} m w(m) <= C(M)/d * 2 M^{-1/2}.
# Beyond M_CERT the inequality only tightens (the left side is
# 1 + 0.625/m^2 + O(1/m^3) for triangulations and similarly for quads); the
# prefix check guards the small-m region where the expansion is not yet
# binding.

_ENVELOPE_A = 4
_M0 = {MapType.TRI1: 8, MapType.TRI2: 8, MapType.QUAD: 8}


@lru_cache(maxsize=None)
def _certify_envelope(t: MapType, m_hi: int) -> bool:
    step = 2 if t is MapType.QUAD else 1
    m = _M0[t]
    if t is MapType.QUAD and m % 2:
        m += 1
    A = _ENVELOPE_A
    while m <= m_hi:
        r = _w_ratio(t, m)  # rational for m >= 2
        lhs = r * r * _rat((m + step) ** 5, m ** 5)
        rhs = _rat(m * m + A, m * m) ** 2
        if lhs > rhs:
            raise LatticeError(f"tail envelope violated at m={m} for {t.value}")
        m += step
    return True


def _w_tail_bounds(t: MapType, m_last: int, w_last_float: float):
    """Upper bounds on (sum w, sum m*w) over m > m_last, as floats.

    m_last is the last index *included* in the exact partial sum, so the
    bounds cover m >= m_last + d.  Caller guarantees the envelope is
    certified from m_last onward and that w_last_float >= w(m_last).
    """
    d = 2 if t is MapType.QUAD else 1
    m = float(m_last)
    c = w_last_float * m ** 2.5 * math.exp(_ENVELOPE_A / (d * max(m - d, 1.0)))
    c *= 1.0 + 1e-9  # absorb the float rounding of this very computation
    t0 = c / d * (2.0 / 3.0) * m ** -1.5
    t1 = c / d * 2.0 * m ** -0.5
    return t0, t1


def _family_sums(t: MapType, K: int):
    """Exact per-family truncated mass/moment sums with tail bounds.

    Returns dict family -> (mass_partial, mass_tail, ER_partial, ER_tail)
    where ER is the contribution to E[swallowed-right].  Families already
    include both sides (and all three placements for doubles).
    """
    par = map_params(t)
    out = {}
    if t in (MapType.TRI1, MapType.TRI2):
        kmin = 0 if t is MapType.TRI1 else 1
        alpha = par.alpha_pow(1)
        _certify_envelope(t, K + 2)
        s0, s1, m_last, w_last = _w_partial_sums(t, kmin + 1, K + 1)  # m = k+1
        # q_k = alpha w(k+1) per side; only the right side swallows right.
        t0, t1 = _w_tail_bounds(t, m_last, w_last)
        af = alpha.to_float()
        mass = 2 * alpha * s0
        mass_tail = 2 * af * t0
        er = alpha * (s1 - s0)                         # sum (m-1) w(m)
        er_tail = af * t1                              # sum m w(m) dominates
        out["jumps"] = (mass, mass_tail, er, er_tail)
        out["internal"] = (alpha / par.rho, 0.0, exact_rat(0), 0.0)
        return out
    # quadrangulations: all families in terms of w over even m
    _certify_envelope(t, 2 * K + 6)
    pref = par.alpha_sq / par.rho                      # = 9/2
    pf = pref.to_float()
    # odd jumps: k odd in [1, K] -> m = k+1 even in [2, K+1]
    s0o, s1o, mo_last, wo_last = _w_partial_sums(t, 2, K + 1)
    t0o, t1o = _w_tail_bounds(t, mo_last, wo_last)
    out["odd"] = (2 * pref * s0o, 2 * pf * t0o,
                  pref * (s1o - s0o), pf * t1o)
    # even jumps: k' even in [0, K] -> m = k'+2 even in [2, K+2]
    s0e, s1e, me_last, we_last = _w_partial_sums(t, 2, K + 2)
    t0e, t1e = _w_tail_bounds(t, me_last, we_last)
    out["even"] = (2 * pref * s0e, 2 * pf * t0e,
                   pref * (s1e - 2 * s0e), pf * t1e)
    # internal-vertex case
    out["internal"] = (par.alpha_sq / (par.rho * par.rho), 0.0, exact_rat(0), 0.0)
    # double jumps: ordered pairs (k1, k2) odd <= K, three placements each:
    # mass = 3 alpha^2 G_K^2 with G_K = sum w(k+1).  With I_K = sum k w(k+1),
    # placement 2 swallows k1+k2 right and placement 1 swallows k1, so the
    # E[R] contribution is alpha^2 (2 I G + I G) = 3 alpha^2 I G.
    G = s0o
    I = s1o - s0o
    a2 = par.alpha_sq
    a2f = a2.to_float()
    Gf_hi = G.to_float() + t0o
    If_hi = I.to_float() + t1o
    mass = 3 * a2 * G * G
    # tail of G^2: G_inf^2 - G_K^2 <= (G_K + tG)^2 - G_K^2 = 2 G_K tG + tG^2
    mass_tail = 3 * a2f * (2 * Gf_hi * t0o + t0o * t0o)
    er = 3 * a2 * I * G
    er_tail = 3 * a2f * (If_hi * t0o + Gf_hi * t1o + t0o * t1o)
    out["double"] = (mass, mass_tail, er, er_tail)
    return out


def normalization_defect(t: MapType, K: int):
    """Exact sum of all case probabilities with jump indices <= K, plus an
    analytic bound on the omitted mass.

    Returns (partial_sum: ExactValue, tail_bound: float) with the guarantee
    1 - partial_sum <= tail_bound.
    """
    if K < 1:
        raise LatticeError("truncation K must be >= 1")
    fams = _family_sums(t, K)
    partial = exact_rat(0)
    tail = 0.0
    for mass, mass_tail, _, _ in fams.values():
        partial = partial + mass
        tail += mass_tail
    return partial, tail


@dataclass(frozen=True)
class MomentBracket:
    partial: ExactValue
    tail_bound: float


def moments(t: MapType, K: int):
    """Truncated exact E[exposed] and E[swallowed-right] with tail bounds.

    The brackets [partial, partial + tail] must contain 1 + delta and
    delta/2 respectively (they do; the acceptance suite checks it).
    """
    if K < 1:
        raise LatticeError("truncation K must be >= 1")
    fams = _family_sums(t, K)
    e_partial = exact_rat(0)
    e_tail = 0.0
    r_partial = exact_rat(0)
    r_tail = 0.0
    if t in (MapType.TRI1, MapType.TRI2):
        e_weights = {"internal": 2, "jumps": 1}
    else:
        e_weights = {"internal": 3, "odd": 2, "even": 1, "double": 1}
    for fam, (mass, mass_tail, er, er_tail) in fams.items():
        e_partial = e_partial + mass * e_weights[fam]
        e_tail += e_weights[fam] * mass_tail
        r_partial = r_partial + er
        r_tail += er_tail
    return MomentBracket(e_partial, e_tail), MomentBracket(r_partial, r_tail)


# ---------------------------------------------------------------------------
# Thresholds and drifts
# ---------------------------------------------------------------------------

def threshold(t: MapType, model: PercolationModel) -> ExactValue:
    """Exact critical probability for (map type, percolation model)."""
    d = map_params(t).delta
    if model is PercolationModel.SITE:
        if t is MapType.QUAD:
            raise OpenProblemError(
                "the site-percolation threshold on half-plane quadrangulations "
                "is an open problem (interface exploration needs triangular "
                "faces); no value is defined")
        return exact_rat(1, 2)
    if model is PercolationModel.BOND:
        return d / (d + 2)
    if model is PercolationModel.BOND_DUAL:
        return exact_rat(2) / (d + 2)
    if model is PercolationModel.FACE:
        return (d + 2) / (2 * d + 2)
    if model is PercolationModel.FACE_PRIME:
        return d / (2 * d + 2)
    raise LatticeError(f"unknown model {model}")


def valid_pairs():
    """All (map type, model) pairs with a defined threshold."""
    out = []
    for t in MapType:
        for m in PercolationModel:
            if m is PercolationModel.SITE and t is MapType.QUAD:
                continue
            out.append((t, m))
    return out
