"""Command-line front end of the calibration.

The console output has three stages: a summary of the parsed input
files, a per-iteration convergence table (min/max deviation per plane
and the running best score) and the final tables (top-10 costs with
candidate IDs, parameters of the top five, the best fit and timing).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import io_config, optimizer
from .errors import ConfigError, InputDataError, SandcalError
from .io_config import PARAM_NAMES, OutputBundle
from .simulator import integrate_population

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_ITER_HEADER = (f"{'ITER':>5s} {'d_OE min':>10s} {'d_OE max':>10s} "
                f"{'d_TDq min':>10s} {'d_TDq max':>10s} "
                f"{'d_TDe min':>10s} {'d_TDe max':>10s} {'best':>10s}")


def _fmt(x: float) -> str:
    return f"{x:10.4g}"


def report_iteration(row: optimizer.HistoryRow) -> str:
    """One fixed-width convergence line, 4 significant digits."""
    cells = [f"{row.iteration:5d}"]
    for i in range(3):
        cells.append(_fmt(row.delta_min[i]))
        cells.append(_fmt(row.delta_max[i]))
    cells.append(_fmt(row.best_cost))
    return " ".join(cells)


def _print_summary(loaded: io_config.LoadedRun, input_path, seed, workers):
    ri = loaded.run_input
    print(f"input file      : {input_path}")
    print(f"tests           : {ri.n_oe} OE, {ri.n_td} TD")
    print(f"n_step          : {ri.n_step}")
    print(f"weights         : {ri.weights}")
    ga = loaded.ga
    print(f"GA setup        : N_i={ga.n_ind} P_dim={ga.p_dim} N_ITER={ga.n_iter} "
          f"N_eli={ga.n_eli} n_f={ga.n_f} mu_in={ga.mu_in} mu_en={ga.mu_en}")
    print(f"seed            : {seed}   workers: {workers}")
    print("search domain   :")
    for name, lo, hi in zip(PARAM_NAMES, loaded.domain.p_min, loaded.domain.p_max):
        print(f"    {name:12s} [{lo:g}, {hi:g}]")
    for t in loaded.tests:
        print(f"    {t.kind} test {t.test_id}: {len(t.data)} points, "
              f"T1={-t.initial.T1:g} MPa, T2={-t.initial.T2:g} MPa, e0={t.initial.e:g}")


def _print_final_tables(result: optimizer.RunResult):
    order = result.class_order
    print("\nbest candidates (final evaluation)")
    print(f"{'rank':>5s} {'ID':>6s} {'cost':>14s}")
    for rank, row in enumerate(order[:10], start=1):
        print(f"{rank:5d} {row + 1:6d} {result.costs[row]:14.6e}")
    print("\nparameters of the top five")
    print(f"{'par':>12s} " + " ".join(f"ID {order[k] + 1:>4d}" + " " * 6 for k in range(5)))
    for j, name in enumerate(PARAM_NAMES):
        vals = " ".join(f"{result.population[order[k], j]:12.5g}" for k in range(5))
        print(f"{name:>12s} {vals}")
    print("\nbest fit")
    for name, value in zip(PARAM_NAMES, result.best):
        print(f"    {name:12s} {value:.6g}")
    print(f"    {'cost[-]':12s} {result.best_cost:.6e}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sandcal",
        description="Calibrate the sand-hypoplasticity parameters against "
                    "oedometer and drained-triaxial test data.")
    parser.add_argument("input", nargs="?", help="path to Input.txt (prompted for if absent)")
    parser.add_argument("--input", dest="input_flag", metavar="FILE", help=argparse.SUPPRESS)
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed; 0 draws one from system entropy (default 0)")
    parser.add_argument("--workers", type=int, default=0,
                        help="evaluation workers; 0 = all cores (default)")
    parser.add_argument("--out", default=".", help="output directory (default: cwd)")
    args = parser.parse_args(argv)

    input_path = args.input_flag or args.input
    if input_path is None:
        try:
            input_path = input("input file (e.g. data/Input.txt): ").strip()
        except EOFError:
            print("error: no input file given", file=sys.stderr)
            return EXIT_CONFIG
    t0 = time.perf_counter()
    try:
        loaded = io_config.load_inputs(input_path)
    except (InputDataError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    ga = loaded.ga
    if args.seed:
        ga = optimizer.GAConfig(ga.n_ind, ga.p_dim, ga.n_iter, ga.n_eli,
                                ga.n_f, ga.mu_in, ga.mu_en, args.seed)
    _print_summary(loaded, input_path, ga.seed, args.workers or "all")

    print("\n" + _ITER_HEADER)
    result = optimizer.run(ga, loaded.domain, loaded.tests,
                           weights=loaded.run_input.weights,
                           n_step=loaded.run_input.n_step,
                           on_iteration=lambda row: print(report_iteration(row)),
                           workers=args.workers)
    _print_final_tables(result)

    curves = {
        (t.test_id, t.kind): integrate_population(result.population, t,
                                                  loaded.run_input.n_step)
        for t in loaded.tests
    }
    bundle = OutputBundle(loaded.run_input, loaded.tests, result.best,
                          result.best_cost, result.best_row,
                          result.population, result.costs,
                          result.evaluations, curves)
    try:
        io_config.write_outputs(bundle, args.out)
    except SandcalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"\nelapsed: {time.perf_counter() - t0:.2f} s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
