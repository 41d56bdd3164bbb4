"""Dimensionless-plane projection and the weighted curve-distance cost.

OE results live in the plane Pi1 = (eps_hat_E, T_hat_1), TD results in
Pi2 = (eps_hat_a, q_hat) and Pi3 = (eps_hat_a, eps_hat_v).  Normalizers
always come from the experimental data of a test and are applied
identically to the model curve, so the experimental sets start at (0,0)
and end at (1,1) in Pi1/Pi2.  The per-plane deviation delta_i sums, over
the tests of the plane, the l2 norm of the point-to-polyline distances
divided by the test's point count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDataError, SandcalError
from .simulator import TestCase, integrate_population

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0)

#: base cost of a candidate whose simulation left the admissible region;
#: the unreached time fraction is added (scaled by the same base) so the
#: ranking still rewards candidates that survive longer.
PENALTY_BASE = 1e6


@dataclass(frozen=True)
class CostBreakdown:
    delta1: float
    delta2: float
    delta3: float
    total: float
    feasible: bool


def log_strain_scale(e, e0: float, e_fin: float):
    """Logarithmic strain coordinate eps_hat_E, 0 at e0 and 1 at e_fin."""
    if e_fin >= e0:
        raise InputDataError(f"e_fin {e_fin} must be below e0 {e0}")
    den = math.log(1.0 - (e0 - e_fin) / (e0 + 1.0))
    return np.log(1.0 - (e0 - np.asarray(e, dtype=float)) / (e0 + 1.0)) / den


def scale_oe(e, sigma_v, e0: float, e_fin: float, sigma_v_max: float) -> np.ndarray:
    """Project an OE curve or data set onto Pi1; returns (n, 2) points."""
    if sigma_v_max <= 0.0:
        raise InputDataError(f"sigma_v normalizer must be positive, got {sigma_v_max}")
    x = log_strain_scale(e, e0, e_fin)
    y = np.asarray(sigma_v, dtype=float) / sigma_v_max
    return np.column_stack([x, y])


def scale_td(eps_a, eps_v, q, eps_fin: float, eps_v_max: float, q_max: float):
    """Project a TD curve or data set onto Pi2 and Pi3."""
    if eps_fin <= 0.0 or eps_v_max <= 0.0 or q_max <= 0.0:
        raise InputDataError(
            f"TD normalizers must be positive, got ({eps_fin}, {eps_v_max}, {q_max})")
    x = np.asarray(eps_a, dtype=float) / eps_fin
    pi2 = np.column_stack([x, np.asarray(q, dtype=float) / q_max])
    pi3 = np.column_stack([x, np.asarray(eps_v, dtype=float) / eps_v_max])
    return pi2, pi3


def point_polyline_distance(point, curve) -> float:
    """Euclidean distance from a point to the nearest segment of a
    polyline (perpendicular foot when inside a segment, else the nearest
    endpoint)."""
    curve = np.asarray(curve, dtype=float)
    if curve.ndim != 2 or len(curve) < 2:
        raise SandcalError("polyline needs at least two points")
    return float(points_to_polyline_distances(np.asarray(point, dtype=float)[None, :],
                                              curve)[0])


def points_to_polyline_distances(points: np.ndarray, curve: np.ndarray) -> np.ndarray:
    """Distances of many points to a polyline at once.

    points: (m, 2); curve: (k, 2) with k >= 2.  Returns (m,).
    """
    points = np.asarray(points, dtype=float)
    curve = np.asarray(curve, dtype=float)
    if len(curve) < 2:
        raise SandcalError("polyline needs at least two points")
    a = curve[:-1]                       # (s, 2) segment starts
    d = curve[1:] - a                    # (s, 2) segment vectors
    len2 = np.einsum("ij,ij->i", d, d)   # (s,)
    len2 = np.where(len2 == 0.0, 1.0, len2)
    rel = points[:, None, :] - a[None, :, :]            # (m, s, 2)
    t = np.einsum("msj,sj->ms", rel, d) / len2          # (m, s)
    t = np.clip(t, 0.0, 1.0)
    foot = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(points[:, None, :] - foot, axis=2)
    return dist.min(axis=1)


def delta_plane(distance_vectors) -> float:
    """Per-plane deviation: sum over tests of ||d||_2 / n_points."""
    total = 0.0
    for d in distance_vectors:
        d = np.asarray(d, dtype=float)
        if len(d):
            total += float(np.linalg.norm(d)) / len(d)
    return total


def cost_total(deltas, weights, feasible: bool,
               unreached_fraction: float = 0.0) -> float:
    """Weighted scalar cost, or the infeasibility penalty."""
    if any(w < 0.0 for w in weights):
        raise InputDataError(f"weights must be non-negative, got {tuple(weights)}")
    if not feasible:
        return PENALTY_BASE * (1.0 + unreached_fraction)
    return float(sum(w * d for w, d in zip(weights, deltas)))


# --------------------------------------------------------------------------
# Population evaluation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PreparedTest:
    """A test case with its scaled experimental point sets and the
    normalizers the model curves must reuse."""

    test: TestCase
    exp_pi1: np.ndarray | None      # OE: (n, 2) points in Pi1
    exp_pi2: np.ndarray | None      # TD: (n, 2) points in Pi2
    exp_pi3: np.ndarray | None      # TD: (n, 2) points in Pi3
    sigma_v_max: float = 0.0
    eps_v_max: float = 0.0
    q_max: float = 0.0


def prepare_test(test: TestCase) -> PreparedTest:
    if test.kind == "OE":
        e, sv = test.data[:, 0], test.data[:, 1]
        sv_max = float(np.max(np.abs(sv)))
        pi1 = scale_oe(e, sv, test.initial.e, test.e_fin, sv_max)
        return PreparedTest(test, pi1, None, None, sigma_v_max=sv_max)
    eps_a, eps_v, q = test.data[:, 0], test.data[:, 1], test.data[:, 2]
    ev_max = float(np.max(np.abs(eps_v)))
    q_max = float(np.max(q))
    pi2, pi3 = scale_td(eps_a, eps_v, q, test.eps_fin, ev_max, q_max)
    return PreparedTest(test, None, pi2, pi3, eps_v_max=ev_max, q_max=q_max)


def _candidate_curve_planes(pt: PreparedTest, cols: dict, row: int):
    """Scaled model polylines of one candidate on one prepared test."""
    t = pt.test
    if t.kind == "OE":
        e = cols["e"][row]
        sv = cols["sigma_v"][row]
        m = np.isfinite(e)
        pi1 = scale_oe(e[m], sv[m], t.initial.e, t.e_fin, pt.sigma_v_max)
        return (pi1,)
    eps_a, eps_v, q = cols["eps_a"][row], cols["eps_v"][row], cols["q"][row]
    m = np.isfinite(eps_a)
    pi2, pi3 = scale_td(eps_a[m], eps_v[m], q[m], t.eps_fin, pt.eps_v_max, pt.q_max)
    return pi2, pi3


def evaluate_population(pop: np.ndarray, tests, weights=DEFAULT_WEIGHTS,
                        n_step: int = 100, prepared=None):
    """Simulate every candidate on every test and rank by cost.

    Returns (costs, breakdowns, class_order) where class_order is the
    stable ascending argsort of the cost vector (rank -> row index).
    """
    pop = np.asarray(pop, dtype=float)
    if len(pop) == 0:
        raise InputDataError("empty population")
    if prepared is None:
        prepared = [prepare_test(t) for t in tests]
    n = len(pop)
    dists = {1: [[] for _ in range(n)], 2: [[] for _ in range(n)],
             3: [[] for _ in range(n)]}
    feasible = np.ones(n, dtype=bool)
    unreached = np.zeros(n)
    n_infeasible_tests = np.zeros(n)
    for pt in prepared:
        curves = integrate_population(pop, pt.test, n_step)
        feasible &= curves.feasible
        bad = ~curves.feasible
        unreached[bad] += 1.0 - curves.reached_fraction[bad]
        n_infeasible_tests[bad] += 1
        for i in range(n):
            if not curves.feasible[i]:
                continue
            planes = _candidate_curve_planes(pt, curves.columns, i)
            if pt.test.kind == "OE":
                dists[1][i].append(points_to_polyline_distances(pt.exp_pi1, planes[0]))
            else:
                dists[2][i].append(points_to_polyline_distances(pt.exp_pi2, planes[0]))
                dists[3][i].append(points_to_polyline_distances(pt.exp_pi3, planes[1]))
    costs = np.empty(n)
    breakdowns = []
    for i in range(n):
        d1 = delta_plane(dists[1][i])
        d2 = delta_plane(dists[2][i])
        d3 = delta_plane(dists[3][i])
        if feasible[i]:
            total = cost_total((d1, d2, d3), weights, True)
        else:
            frac = unreached[i] / max(1.0, n_infeasible_tests[i])
            total = cost_total((d1, d2, d3), weights, False, frac)
        costs[i] = total
        breakdowns.append(CostBreakdown(d1, d2, d3, total, bool(feasible[i])))
    class_order = np.argsort(costs, kind="stable")
    return costs, breakdowns, class_order
