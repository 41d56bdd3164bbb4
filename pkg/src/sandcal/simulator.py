"""Explicit-Euler integration of the hypoplastic ODE for OE and TD tests.

Two implementations of the same march live here: a scalar reference
(`integrate`, built on the scalar rate functions) and a numpy one that
advances a whole population of candidates at once (`integrate_population`,
the hot path of the calibration).  Both enforce the admissibility
conditions after every step and truncate the curve of a candidate that
violates them, flagging it infeasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constitutive import (
    SHParameters,
    SoilState,
    barotropy_a,
    is_admissible,
    rate_oe,
    rate_td,
    stiffness_denominator,
)
from .errors import InfeasibleCandidateError, InputDataError

DEFAULT_N_STEP = 100


@dataclass(frozen=True)
class TestCase:
    """One laboratory test: initial state plus experimental points.

    All values use internal conventions (stresses negative in
    compression, strains as fractions positive in compression).
    For OE data the columns are (e, sigma_v[MPa]); for TD they are
    (eps_a, eps_v, q[MPa]).
    """

    kind: str                      # "OE" or "TD"
    test_id: int
    initial: SoilState
    data: np.ndarray = field(repr=False)   # (n_points, 2) OE / (n_points, 3) TD

    def __post_init__(self):
        if self.kind not in ("OE", "TD"):
            raise InputDataError(f"unknown test kind {self.kind!r}")
        if len(self.data) == 0:
            raise InputDataError(f"test {self.test_id}: empty data set")

    @property
    def e_fin(self) -> float:
        """OE terminal void ratio: the smallest one in the data."""
        return float(np.min(self.data[:, 0]))

    @property
    def eps_fin(self) -> float:
        """TD terminal axial strain: the largest one in the data."""
        return float(np.max(self.data[:, 0]))

    @property
    def t_f(self) -> float:
        if self.kind == "OE":
            return integration_time_oe(self.initial.e, self.e_fin)
        return integration_time_td(self.eps_fin)


@dataclass
class ResponseCurve:
    """Sampled model response; n_step+1 points when feasible, fewer
    when the integration was truncated."""

    kind: str
    columns: dict[str, np.ndarray]
    feasible: bool
    reached_fraction: float        # fraction of [0, t_f] covered

    def __len__(self):
        return len(next(iter(self.columns.values())))


def integration_time_oe(e0: float, e_fin: float) -> float:
    """Pseudo-time at which de = -(1+e) carries e0 down to e_fin."""
    if e_fin >= e0:
        raise InputDataError(f"OE terminal void ratio {e_fin} must be below the initial {e0}")
    return -math.log(1.0 - (e0 - e_fin) / (e0 + 1.0))


def integration_time_td(eps_fin: float) -> float:
    """With the reference stretching D1 = -1 the axial strain equals
    pseudo-time, so t_f is the terminal strain itself."""
    if eps_fin <= 0.0:
        raise InputDataError(f"TD terminal strain must be positive, got {eps_fin}")
    return float(eps_fin)


def elaborate_td(times, t1, t2, e, e0: float):
    """Map raw TD states to (eps_a, eps_v, q).

    eps_a equals pseudo-time (D1 = -1); eps_v is positive in
    compression; q = T2 - T1 is positive under axial compression.
    """
    times = np.asarray(times, dtype=float)
    e = np.asarray(e, dtype=float)
    eps_v = -(e - e0) / (1.0 + e0)
    q = np.asarray(t2, dtype=float) - np.asarray(t1, dtype=float)
    return times.copy(), eps_v, q


def integrate(p: SHParameters, test: TestCase, n_step: int = DEFAULT_N_STEP) -> ResponseCurve:
    """Scalar explicit-Euler march of one candidate over one test."""
    if n_step < 1:
        raise InputDataError(f"n_step must be >= 1, got {n_step}")
    t_f = test.t_f
    dt = t_f / n_step
    state = test.initial
    a = barotropy_a(p.phi_c)
    states = [state]
    feasible = True
    if not is_admissible(p, state) or stiffness_denominator(p, a) <= 0.0:
        states, feasible = [], False
    d2_prev = None
    while feasible and len(states) <= n_step:
        try:
            if test.kind == "OE":
                rate = rate_oe(p, state)
            else:
                rate, d2_prev = rate_td(p, state, d2_guess=d2_prev)
        except InfeasibleCandidateError:
            feasible = False
            break
        state = SoilState(state.T1 + dt * rate.dT1,
                          state.T2 + dt * rate.dT2,
                          state.e + dt * rate.de)
        if not is_admissible(p, state):
            feasible = False
            break
        states.append(state)
    n_pts = len(states)
    reached = max(0, n_pts - 1) / n_step
    t1 = np.array([s.T1 for s in states])
    t2 = np.array([s.T2 for s in states])
    e = np.array([s.e for s in states])
    if test.kind == "OE":
        cols = {"sigma_v": -t1, "e": e}
    else:
        times = dt * np.arange(n_pts)
        eps_a, eps_v, q = elaborate_td(times, t1, t2, e, test.initial.e)
        cols = {"eps_a": eps_a, "eps_v": eps_v, "q": q}
    return ResponseCurve(test.kind, cols, feasible, reached)


# --------------------------------------------------------------------------
# Vectorized population path
# --------------------------------------------------------------------------

@dataclass
class PopulationCurves:
    """Response of a whole population on one test.

    Arrays have shape (n_candidates, n_step + 1); entries past a
    candidate's truncation point are NaN.
    """

    kind: str
    columns: dict[str, np.ndarray]
    feasible: np.ndarray           # (n,) bool
    reached_fraction: np.ndarray   # (n,) float


class ParameterArrays:
    """Columns of the population matrix plus derived per-candidate
    constants, with masks for rows whose parameters are unusable."""

    def __init__(self, pop: np.ndarray):
        pop = np.asarray(pop, dtype=float)
        if pop.ndim != 2 or pop.shape[1] != 8:
            raise InputDataError(f"population matrix must be (n, 8), got {pop.shape}")
        self.phi = np.radians(pop[:, 0])
        self.h_s = pop[:, 1]
        self.n = pop[:, 2]
        self.e_c0 = pop[:, 3]
        self.alpha = pop[:, 4]
        self.beta = pop[:, 5]
        self.e_d0 = pop[:, 6] * self.e_c0
        self.e_i0 = pop[:, 7] * self.e_c0
        with np.errstate(all="ignore"):
            s = np.sin(self.phi)
            self.a = np.sqrt(3.0) * (3.0 - s) / (2.0 * np.sqrt(2.0) * s)
            ratio = (self.e_i0 - self.e_d0) / (self.e_c0 - self.e_d0)
            self.fs_den = 3.0 + self.a ** 2 - self.a * np.sqrt(3.0) * ratio ** self.alpha
        self.usable = (
            (self.phi > 0.0) & (self.phi < np.pi / 2)
            & (self.h_s > 0.0) & (self.n > 0.0) & (self.n < 1.0)
            & (self.e_c0 > 0.0) & (self.alpha > 0.0) & (self.beta >= 0.0)
            & (pop[:, 6] > 0.0) & (pop[:, 6] < 1.0) & (pop[:, 7] > 1.0)
            & np.isfinite(self.fs_den) & (self.fs_den > 0.0)
        )


def _vector_rates(pars: ParameterArrays, t1, t2, e, kind, d2_prev, active):
    """Rates of all active candidates; returns (dT1, dT2, de, d2, ok)."""
    with np.errstate(all="ignore"):
        tr = t1 + 2.0 * t2
        tr2 = t1 * t1 + 2.0 * t2 * t2
        a2 = pars.a ** 2
        l11 = (tr * tr + a2 * t1 * t1) / tr2
        l12 = 2.0 * a2 * t1 * t2 / tr2
        l21 = a2 * t1 * t2 / tr2
        l22 = (tr * tr + 2.0 * a2 * t2 * t2) / tr2
        n1 = tr / tr2 * (pars.a / 3.0) * (5.0 * t1 - 2.0 * t2)
        n2 = tr / tr2 * (pars.a / 3.0) * (4.0 * t2 - t1)
        b = np.exp(-((-tr / pars.h_s) ** pars.n))
        e_d, e_c, e_i = pars.e_d0 * b, pars.e_c0 * b, pars.e_i0 * b
        f_d = ((e - e_d) / (e_c - e_d)) ** pars.alpha
        f_s = ((pars.h_s / pars.n) * ((1.0 + e_i) / e_i) * (e_i / e) ** pars.beta
               * (-tr / pars.h_s) ** (1.0 - pars.n) / pars.fs_den)
        ok = active & np.isfinite(f_s) & np.isfinite(f_d)
        if kind == "OE":
            d1, d2 = -1.0, np.zeros_like(t1)
            norm_d = 1.0
            dt1 = f_s * l11 * d1 + f_s * f_d * n1 * norm_d
            dt2 = f_s * l21 * d1 + f_s * f_d * n2 * norm_d
            de = (1.0 + e) * d1
            return dt1, dt2, de, d2, ok
        d2, closure_ok = _solve_td_vector(l21, l22, f_d * n2, d2_prev)
        ok &= closure_ok
        norm_d = np.sqrt(1.0 + 2.0 * d2 * d2)
        dt1 = f_s * (-l11 + l12 * d2) + f_s * f_d * n1 * norm_d
        dt2 = f_s * (-l21 + l22 * d2) + f_s * f_d * n2 * norm_d
        de = (1.0 + e) * (-1.0 + 2.0 * d2)
        return dt1, dt2, de, d2, ok


def _solve_td_vector(l21, l22, c, d2_prev):
    """Vector version of the constant-radial-stress closure.

    Square the closure to a quadratic, polish both roots with Newton on
    the unsquared equation, keep the valid root nearest the previous
    step's solution.
    """
    def g(d2):
        return -l21 + l22 * d2 + c * np.sqrt(1.0 + 2.0 * d2 * d2)

    def dg(d2):
        return l22 + 2.0 * c * d2 / np.sqrt(1.0 + 2.0 * d2 * d2)

    scale = np.maximum.reduce([np.ones_like(l21), np.abs(l21), np.abs(l22), np.abs(c)])
    qa = l22 * l22 - 2.0 * c * c
    qb = -2.0 * l21 * l22
    qc = l21 * l21 - c * c
    with np.errstate(all="ignore"):
        disc = qb * qb - 4.0 * qa * qc
        sq = np.sqrt(np.maximum(disc, 0.0))
        linear = np.abs(qa) < 1e-14 * scale * scale
        den = np.where(linear, 1.0, 2.0 * qa)
        roots = np.stack([
            np.where(linear, np.where(qb != 0.0, -qc / np.where(qb == 0.0, 1.0, qb), np.nan),
                     (-qb + sq) / den),
            np.where(linear, np.nan, (-qb - sq) / den),
        ])
        roots = np.where(np.isfinite(roots), roots, 0.0)
        has_real = np.where(linear, qb != 0.0, disc >= 0.0)
        for _ in range(12):
            der = dg(roots)
            der = np.where(der == 0.0, 1.0, der)
            roots = roots - g(roots) / der
        res = np.abs(g(roots))
        valid = has_real & (res <= 1e-13 * scale) & np.isfinite(roots)
        dist = np.where(valid, np.abs(roots - d2_prev), np.inf)
        pick = np.argmin(dist, axis=0)
        d2 = np.take_along_axis(roots, pick[None, :], axis=0)[0]
        ok = valid.any(axis=0)
    return np.where(ok, d2, 0.0), ok


def integrate_population(pop: np.ndarray, test: TestCase,
                         n_step: int = DEFAULT_N_STEP) -> PopulationCurves:
    """Advance every candidate of the population through one test."""
    if n_step < 1:
        raise InputDataError(f"n_step must be >= 1, got {n_step}")
    pars = ParameterArrays(pop)
    n = len(pars.a)
    t_f = test.t_f
    dt = t_f / n_step
    t1 = np.full(n, test.initial.T1)
    t2 = np.full(n, test.initial.T2)
    e = np.full(n, test.initial.e)
    active = pars.usable & _admissible_mask(pars, t1, t2, e)
    out_t1 = np.full((n, n_step + 1), np.nan)
    out_t2 = np.full((n, n_step + 1), np.nan)
    out_e = np.full((n, n_step + 1), np.nan)
    out_t1[active, 0], out_t2[active, 0], out_e[active, 0] = \
        t1[active], t2[active], e[active]
    last = np.where(active, 0, -1)
    d2_prev = np.zeros(n)
    for k in range(1, n_step + 1):
        if not active.any():
            break
        dt1, dt2, de, d2_prev, ok = _vector_rates(pars, t1, t2, e, test.kind,
                                                  d2_prev, active)
        nt1 = np.where(ok, t1 + dt * dt1, t1)
        nt2 = np.where(ok, t2 + dt * dt2, t2)
        ne = np.where(ok, e + dt * de, e)
        ok &= _admissible_mask(pars, nt1, nt2, ne)
        t1, t2, e = np.where(ok, nt1, t1), np.where(ok, nt2, t2), np.where(ok, ne, e)
        active = ok
        out_t1[active, k], out_t2[active, k], out_e[active, k] = \
            t1[active], t2[active], e[active]
        last = np.where(active, k, last)
    feasible = last == n_step
    reached = np.maximum(last, 0) / n_step
    if test.kind == "OE":
        cols = {"sigma_v": -out_t1, "e": out_e}
    else:
        times = np.broadcast_to(dt * np.arange(n_step + 1), (n, n_step + 1)).copy()
        times[~np.isfinite(out_e)] = np.nan
        eps_a, eps_v, q = elaborate_td(times, out_t1, out_t2, out_e, test.initial.e)
        cols = {"eps_a": eps_a, "eps_v": eps_v, "q": q}
    return PopulationCurves(test.kind, cols, feasible, reached)


def _admissible_mask(pars: ParameterArrays, t1, t2, e):
    with np.errstate(all="ignore"):
        tr = t1 + 2.0 * t2
        neg = tr < 0.0
        b = np.exp(-((-np.where(neg, tr, -1.0) / pars.h_s) ** pars.n))
        ok = neg & (pars.e_d0 * b <= e) & (e <= pars.e_i0 * b)
    return ok & np.isfinite(t1) & np.isfinite(t2) & np.isfinite(e)
