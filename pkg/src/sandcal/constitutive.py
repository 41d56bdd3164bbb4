"""Axisymmetric sand-hypoplasticity rate law.

The model couples the rates of the axial stress T1, the radial stress T2
(both in MPa, negative in compression) and the void ratio e with the
stretching components (D1, D2) through a stiffness matrix L, a nonlinear
vector N and the scalar factors a (barotropy), f_s (stiffness) and f_d
(pyknotropy).  All functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    AdmissibilityError,
    InfeasibleCandidateError,
    ParameterDomainError,
)

P_DIM = 8

#: tolerance of the drained-triaxial closure, relative to max(1, |dT1|)
TD_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class SHParameters:
    """The eight calibrated constants of the hypoplastic law.

    phi_c is stored in radians; input files carry degrees.  The
    zero-pressure minimal/maximal void ratios are derived from the
    critical one through the ratios lambda_d < 1 < lambda_i, which
    guarantees e_d0 < e_c0 < e_i0.
    """

    phi_c: float      # critical friction angle [rad]
    h_s: float        # granular hardness [MPa]
    n: float          # barotropy exponent [-]
    e_c0: float       # critical void ratio at zero pressure [-]
    alpha: float      # pyknotropy exponent [-]
    beta: float       # stiffness exponent [-]
    lambda_d: float   # e_d0 / e_c0 [-]
    lambda_i: float   # e_i0 / e_c0 [-]

    def __post_init__(self):
        if not 0.0 < self.phi_c < math.pi / 2:
            raise ParameterDomainError(f"phi_c must be in (0, 90 deg), got {self.phi_c} rad")
        if self.h_s <= 0.0:
            raise ParameterDomainError(f"h_s must be positive, got {self.h_s}")
        if not 0.0 < self.n < 1.0:
            raise ParameterDomainError(f"n must be in (0, 1), got {self.n}")
        if self.e_c0 <= 0.0:
            raise ParameterDomainError(f"e_c0 must be positive, got {self.e_c0}")
        if self.alpha <= 0.0:
            raise ParameterDomainError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0.0:
            raise ParameterDomainError(f"beta must be non-negative, got {self.beta}")
        if not 0.0 < self.lambda_d < 1.0:
            raise ParameterDomainError(f"lambda_d must be in (0, 1), got {self.lambda_d}")
        if self.lambda_i <= 1.0:
            raise ParameterDomainError(f"lambda_i must be > 1, got {self.lambda_i}")

    @property
    def e_d0(self) -> float:
        return self.lambda_d * self.e_c0

    @property
    def e_i0(self) -> float:
        return self.lambda_i * self.e_c0

    @classmethod
    def from_vector(cls, v) -> "SHParameters":
        """Build from the 8-vector used by the optimizer and the input
        files: (phi_c [deg], h_s [MPa], n, e_c0, alpha, beta, lambda_d,
        lambda_i)."""
        if len(v) != P_DIM:
            raise ParameterDomainError(f"parameter vector must have {P_DIM} entries, got {len(v)}")
        return cls(math.radians(float(v[0])), *(float(x) for x in v[1:]))

    def to_vector(self) -> list[float]:
        """Inverse of :meth:`from_vector` (phi_c back in degrees)."""
        return [math.degrees(self.phi_c), self.h_s, self.n, self.e_c0,
                self.alpha, self.beta, self.lambda_d, self.lambda_i]


@dataclass(frozen=True)
class SoilState:
    """ODE state: axial stress, radial stress (MPa, negative in
    compression) and void ratio."""

    T1: float
    T2: float
    e: float

    @property
    def trT(self) -> float:
        return self.T1 + 2.0 * self.T2


@dataclass(frozen=True)
class StateRate:
    dT1: float
    dT2: float
    de: float


@dataclass(frozen=True)
class VoidRatioLimits:
    e_d: float
    e_c: float
    e_i: float


def barotropy_a(phi_c: float) -> float:
    """Barotropy coefficient a(phi_c), phi_c in radians."""
    if not 0.0 < phi_c < math.pi / 2:
        raise ParameterDomainError(f"phi_c must be in (0, pi/2), got {phi_c}")
    s = math.sin(phi_c)
    return math.sqrt(3.0) * (3.0 - s) / (2.0 * math.sqrt(2.0) * s)


def bauer_factor(p: SHParameters, trT: float) -> float:
    """Common compression factor B = exp[-(-Tr(T)/h_s)^n], 0 < B < 1."""
    if trT >= 0.0:
        raise AdmissibilityError(f"Tr(T) must be negative, got {trT}")
    return math.exp(-((-trT / p.h_s) ** p.n))


def void_ratio_limits(p: SHParameters, trT: float) -> VoidRatioLimits:
    """Pressure-dependent minimal, critical and maximal void ratios."""
    b = bauer_factor(p, trT)
    return VoidRatioLimits(p.e_d0 * b, p.e_c0 * b, p.e_i0 * b)


def pyknotropy_fd(e: float, lims: VoidRatioLimits, alpha: float) -> float:
    """Density factor f_d = ((e - e_d)/(e_c - e_d))^alpha."""
    if e < lims.e_d:
        raise AdmissibilityError(f"void ratio {e} below minimal value {lims.e_d}")
    return ((e - lims.e_d) / (lims.e_c - lims.e_d)) ** alpha


def stiffness_denominator(p: SHParameters, a: float) -> float:
    """Denominator of f_s; must be positive for a usable candidate."""
    ratio = (p.e_i0 - p.e_d0) / (p.e_c0 - p.e_d0)
    return 3.0 + a * a - a * math.sqrt(3.0) * ratio ** p.alpha


def stiffness_fs(p: SHParameters, state: SoilState) -> float:
    """Barotropy/pyknotropy stiffness factor f_s [MPa]."""
    trT = state.trT
    if trT >= 0.0:
        raise AdmissibilityError(f"Tr(T) must be negative, got {trT}")
    a = barotropy_a(p.phi_c)
    den = stiffness_denominator(p, a)
    if den <= 0.0:
        raise ParameterDomainError(f"non-positive f_s denominator {den}")
    e_i = p.e_i0 * bauer_factor(p, trT)
    return ((p.h_s / p.n) * ((1.0 + e_i) / e_i) * (e_i / state.e) ** p.beta
            * (-trT / p.h_s) ** (1.0 - p.n) / den)


def flow_coefficients(a: float, state: SoilState):
    """Axisymmetric stiffness matrix L (2x2) and nonlinear vector N (2).

    Returns (L11, L12, L21, L22, N1, N2).  All entries are invariant
    under a positive rescaling of the stress tensor.
    """
    t1, t2 = state.T1, state.T2
    tr = t1 + 2.0 * t2
    tr2 = t1 * t1 + 2.0 * t2 * t2
    if tr2 == 0.0:
        raise AdmissibilityError("zero stress tensor")
    a2 = a * a
    l11 = (tr * tr + a2 * t1 * t1) / tr2
    l12 = 2.0 * a2 * t1 * t2 / tr2
    l21 = a2 * t1 * t2 / tr2
    l22 = (tr * tr + 2.0 * a2 * t2 * t2) / tr2
    n1 = tr / tr2 * (a / 3.0) * (5.0 * t1 - 2.0 * t2)
    n2 = tr / tr2 * (a / 3.0) * (4.0 * t2 - t1)
    return l11, l12, l21, l22, n1, n2


def _stress_factors(p: SHParameters, state: SoilState):
    a = barotropy_a(p.phi_c)
    lims = void_ratio_limits(p, state.trT)
    f_d = pyknotropy_fd(state.e, lims, p.alpha)
    f_s = stiffness_fs(p, state)
    return a, f_s, f_d


def rate_oe(p: SHParameters, state: SoilState, d1: float = -1.0) -> StateRate:
    """State rate under oedometric kinematics D = diag(d1, 0, 0).

    The reference stretching is d1 = -1 (axial compression); the law is
    homogeneous of degree one in D, so any negative d1 only rescales
    pseudo-time.
    """
    a, f_s, f_d = _stress_factors(p, state)
    l11, _, l21, _, n1, n2 = flow_coefficients(a, state)
    norm_d = abs(d1)
    dt1 = f_s * l11 * d1 + f_s * f_d * n1 * norm_d
    dt2 = f_s * l21 * d1 + f_s * f_d * n2 * norm_d
    de = (1.0 + state.e) * d1
    return StateRate(dt1, dt2, de)


def solve_td_stretching(l21: float, l22: float, c: float,
                        d2_guess: float | None = None) -> float:
    """Radial stretching D2 keeping the radial stress constant.

    Solves, for the reference d1 = -1,

        l21*(-1) + l22*d2 + c*sqrt(1 + 2*d2^2) = 0,   c = f_d*N2.

    The equation is squared to a quadratic; roots that fail the
    unsquared equation are discarded, and among valid roots the one
    closest to ``d2_guess`` (or the smaller in magnitude) is kept and
    polished with Newton steps.
    """

    def g(d2):
        return -l21 + l22 * d2 + c * math.sqrt(1.0 + 2.0 * d2 * d2)

    def dg(d2):
        return l22 + 2.0 * c * d2 / math.sqrt(1.0 + 2.0 * d2 * d2)

    scale = max(1.0, abs(l21), abs(l22), abs(c))
    qa = l22 * l22 - 2.0 * c * c
    qb = -2.0 * l21 * l22
    qc = l21 * l21 - c * c
    roots = []
    if abs(qa) < 1e-14 * scale * scale:
        if qb != 0.0:
            roots.append(-qc / qb)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            sq = math.sqrt(disc)
            roots.extend([(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)])
    valid = []
    for r in roots:
        # Newton polish: the quadratic formula carries cancellation error
        # and squaring admits spurious roots; polishing the true root
        # drives g to machine precision, spurious ones stay off.
        for _ in range(50):
            gr, der = g(r), dg(r)
            if der == 0.0 or abs(gr) <= 1e-16 * scale:
                break
            r -= gr / der
        if abs(g(r)) <= 1e-13 * scale:
            valid.append(r)
    if not valid:
        raise InfeasibleCandidateError("no real root of the triaxial closure")
    if d2_guess is None:
        return min(valid, key=abs)
    return min(valid, key=lambda r: abs(r - d2_guess))


def rate_td(p: SHParameters, state: SoilState, d1: float = -1.0,
            d2_guess: float | None = None):
    """State rate under drained-triaxial kinematics (constant radial
    stress).  Returns (rate, d2) with d2 referred to d1 = -1; the
    returned dT2 is the closure residual, zero to solver tolerance."""
    a, f_s, f_d = _stress_factors(p, state)
    l11, l12, l21, l22, n1, n2 = flow_coefficients(a, state)
    d2 = solve_td_stretching(l21, l22, f_d * n2, d2_guess)
    lam = abs(d1)  # homogeneity: rescale the reference solution
    norm_d = lam * math.sqrt(1.0 + 2.0 * d2 * d2)
    dt1 = f_s * (l11 * d1 + l12 * d2 * lam) + f_s * f_d * n1 * norm_d
    dt2 = f_s * (l21 * d1 + l22 * d2 * lam) + f_s * f_d * n2 * norm_d
    de = (1.0 + state.e) * (d1 + 2.0 * d2 * lam)
    return StateRate(dt1, dt2, de), d2


def is_admissible(p: SHParameters, state: SoilState) -> bool:
    """Admissibility: Tr(T) < 0 and e within [e_d, e_i] at the current
    pressure."""
    if state.trT >= 0.0:
        return False
    lims = void_ratio_limits(p, state.trT)
    return lims.e_d <= state.e <= lims.e_i
