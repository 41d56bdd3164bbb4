#!/usr/bin/env python3
"""Regenerate the tutorial data set under tutorial/data.

Synthetic "experimental" points for the Hochstetten sand: the curves are
simulated with the literature parameter set for that sand (phi_c = 33
deg, h_s = 1 GPa, n = 0.25, e_c0 = 0.95, e_d0 = 0.55, e_i0 = 1.05,
alpha = 0.25, beta = 1.5) on a fine time grid, sub-sampled at realistic
reading positions and rounded to lab-sheet precision.  Two oedometer
tests and three drained triaxial tests, matching the tutorial layout.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sandcal import GAConfig, SearchDomain, SHParameters, SoilState, TestCase, integrate
from sandcal.io_config import write_inputs

W_VECTOR = [33.0, 1000.0, 0.25, 0.95, 0.25, 1.5, 0.55 / 0.95, 1.05 / 0.95]
FINE_STEPS = 2000


def _round_sig(x, digits=4):
    return float(np.format_float_positional(x, precision=digits, unique=False,
                                            fractional=False))


def sample_oe(params, test_id, e0, sv0, e_fin, n_points=12):
    probe = TestCase("OE", test_id, SoilState(-sv0, -sv0 / 2, e0),
                     np.array([[e0, sv0], [e_fin, 1.0]]))
    curve = integrate(params, probe, FINE_STEPS)
    assert curve.feasible
    sv, e = curve.columns["sigma_v"], curve.columns["e"]
    # readings roughly equidistant in log stress, as on a lab sheet
    targets = np.geomspace(sv[0], sv[-1], n_points)
    idx = sorted(set(int(np.argmin(np.abs(sv - t))) for t in targets))
    data = np.column_stack([[round(v, 4) for v in e[idx]],
                            [_round_sig(v) for v in sv[idx]]])
    return TestCase("OE", test_id, probe.initial, data)


def sample_td(params, test_id, p0, e0, eps_fin=0.095, n_points=14):
    probe = TestCase("TD", test_id, SoilState(-p0, -p0, e0),
                     np.array([[eps_fin, 0.001, 0.1]]))
    curve = integrate(params, probe, FINE_STEPS)
    assert curve.feasible
    ea, ev, q = curve.columns["eps_a"], curve.columns["eps_v"], curve.columns["q"]
    idx = np.unique(np.round(np.linspace(0, FINE_STEPS, n_points)).astype(int))
    data = np.column_stack([[round(v, 5) for v in ea[idx]],
                            [round(v, 5) for v in ev[idx]],
                            [_round_sig(v) for v in q[idx]]])
    return TestCase("TD", test_id, probe.initial, data)


def build_tests():
    params = SHParameters.from_vector(W_VECTOR)
    return [
        sample_oe(params, 1, e0=0.695, sv0=0.01, e_fin=0.635),
        sample_oe(params, 2, e0=0.820, sv0=0.01, e_fin=0.740),
        sample_td(params, 1, p0=0.1, e0=0.695),
        sample_td(params, 2, p0=0.2, e0=0.700),
        sample_td(params, 3, p0=0.3, e0=0.705),
    ]


def main():
    out = Path(__file__).resolve().parents[1] / "tutorial" / "data"
    domain = SearchDomain(
        p_min=[30.0, 500.0, 0.10, 0.80, 0.10, 0.50, 0.52, 1.05],
        p_max=[36.0, 3000.0, 0.50, 1.10, 0.40, 2.00, 0.65, 1.30],
    )
    ga = GAConfig()  # documented defaults
    path = write_inputs(out, domain, ga, build_tests(), n_step=100,
                        weights=(1.0, 1.0, 1.0))
    print(f"wrote {path.parent}")


if __name__ == "__main__":
    main()
