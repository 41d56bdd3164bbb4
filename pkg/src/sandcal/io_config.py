"""Input-file parsing and run-output writing.

All files are plain ASCII: numeric records are whitespace- or
comma-delimited, lines starting with ``#`` (and blank lines) are
ignored.  The column conventions are documented in docs/file_formats.md;
stresses in the init files and sigma_v in OE_data are positive in
compression and are converted to the internal sign convention on load,
TD strains are given in percent and converted to fractions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constitutive import P_DIM, SoilState
from .errors import ParseError, SandcalError
from .optimizer import GAConfig, SearchDomain
from .simulator import TestCase

PARAM_NAMES = ("phi_c[deg]", "h_s[MPa]", "n[-]", "e_c0[-]", "alpha[-]",
               "beta[-]", "lambda_d[-]", "lambda_i[-]")


@dataclass(frozen=True)
class RunInput:
    n_oe: int
    n_td: int
    n_step: int
    weights: tuple
    file_names: tuple   # (domain, ga_setup, oe_init, td_init, oe_data, td_data)


@dataclass(frozen=True)
class LoadedRun:
    run_input: RunInput
    domain: SearchDomain
    ga: GAConfig
    tests: list


def _records(path: Path):
    """Yield (line_number, tokens) for every non-comment line."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        yield lineno, stripped.replace(",", " ").split()


def _floats(path, lineno, tokens, count, what):
    if len(tokens) != count:
        raise ParseError(path, lineno, f"expected {count} values for {what}, got {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(path, lineno, f"non-numeric value in {what}: {exc}") from exc


def _read_matrix(path: Path, n_cols: int, what: str) -> np.ndarray:
    rows = []
    for lineno, tokens in _records(path):
        rows.append(_floats(path, lineno, tokens, n_cols, what))
    if not rows:
        raise ParseError(path, 0, f"no {what} records found")
    return np.asarray(rows, dtype=float)


def load_inputs(input_path) -> LoadedRun:
    """Parse Input.txt and the six files it names (expected next to it,
    conventionally in a ``data`` subfolder of the working path)."""
    input_path = Path(input_path)
    data_dir = input_path.parent
    recs = list(_records(input_path))
    if len(recs) < 9:
        raise ParseError(input_path, 0,
                         "expected 9 records: counts, n_step, weights, six file names")
    (l1, counts), (l2, nstep), (l3, w) = recs[0], recs[1], recs[2]
    n_oe, n_td = (int(v) for v in _floats(input_path, l1, counts, 2, "test counts"))
    if n_oe < 0 or n_td < 0 or n_oe + n_td == 0:
        raise ParseError(input_path, l1, "need non-negative test counts, at least one test")
    n_step = int(_floats(input_path, l2, nstep, 1, "n_step")[0])
    if n_step < 1:
        raise ParseError(input_path, l2, f"n_step must be >= 1, got {n_step}")
    weights = tuple(_floats(input_path, l3, w, 3, "weights"))
    if any(x < 0 for x in weights):
        raise ParseError(input_path, l3, f"weights must be non-negative, got {weights}")
    names = []
    for lineno, tokens in recs[3:9]:
        if len(tokens) != 1:
            raise ParseError(input_path, lineno, "expected one file name per line")
        names.append(tokens[0])
    domain = _load_domain(data_dir / names[0])
    ga = _load_ga_setup(data_dir / names[1])
    oe_init = _load_init(data_dir / names[2], n_oe, "OE")
    td_init = _load_init(data_dir / names[3], n_td, "TD")
    tests = _load_oe_tests(data_dir / names[4], oe_init)
    tests += _load_td_tests(data_dir / names[5], td_init)
    return LoadedRun(RunInput(n_oe, n_td, n_step, weights, tuple(names)),
                     domain, ga, tests)


def _load_domain(path: Path) -> SearchDomain:
    mat = _read_matrix(path, 2, "domain bounds (min max)")
    if mat.shape[0] != P_DIM:
        raise ParseError(path, 0, f"expected {P_DIM} parameter rows, got {mat.shape[0]}")
    try:
        return SearchDomain(mat[:, 0], mat[:, 1])
    except SandcalError as exc:
        raise ParseError(path, 0, str(exc)) from exc


def _load_ga_setup(path: Path) -> GAConfig:
    vals = []
    for lineno, tokens in _records(path):
        vals.extend(_floats(path, lineno, tokens, len(tokens), "GA setup"))
    if len(vals) != 7:
        raise ParseError(path, 0,
                         "expected 7 values: N_i P_dim N_ITER N_eli n_f mu_in mu_en")
    try:
        return GAConfig(n_ind=int(vals[0]), p_dim=int(vals[1]), n_iter=int(vals[2]),
                        n_eli=int(vals[3]), n_f=vals[4], mu_in=vals[5], mu_en=vals[6])
    except SandcalError as exc:
        raise ParseError(path, 0, str(exc)) from exc


def _load_init(path: Path, n_tests: int, kind: str) -> list[SoilState]:
    if n_tests == 0:
        return []
    mat = _read_matrix(path, 3, f"{kind} initial conditions (T1 T2 e)")
    if mat.shape[0] != n_tests:
        raise ParseError(path, 0,
                         f"Input.txt declares {n_tests} {kind} tests but found {mat.shape[0]} rows")
    states = []
    for i, (t1, t2, e) in enumerate(mat, start=1):
        if t1 <= 0 or t2 <= 0:
            raise ParseError(path, 0,
                             f"{kind} test {i}: initial stresses must be positive (compression)")
        states.append(SoilState(-t1, -t2, e))   # file uses compression-positive
    return states


def _group_by_id(path: Path, mat: np.ndarray, n_expected: int, kind: str):
    ids = mat[:, -1]
    if not np.all(ids == np.floor(ids)):
        raise ParseError(path, 0, f"{kind} test ids must be integers")
    ids = ids.astype(int)
    if np.any(np.diff(ids) < 0):
        raise ParseError(path, 0, f"{kind} test ids must be in ascending order")
    unique = list(dict.fromkeys(ids.tolist()))
    if len(unique) != n_expected:
        raise ParseError(path, 0,
                         f"Input.txt declares {n_expected} {kind} tests but data carries "
                         f"ids {unique}")
    return [(tid, mat[ids == tid, :-1]) for tid in unique]


def _load_oe_tests(path: Path, inits: list[SoilState]) -> list[TestCase]:
    if not inits:
        return []
    mat = _read_matrix(path, 3, "OE data (e sigma_v id)")
    tests = []
    for (tid, block), init in zip(_group_by_id(path, mat, len(inits), "OE"), inits):
        e, sv = block[:, 0], block[:, 1]
        if np.any(sv <= 0):
            raise ParseError(path, 0, f"OE test {tid}: sigma_v must be positive")
        # keep only the compression branch, up to the void-ratio minimum
        cut = int(np.argmin(e)) + 1
        if cut < len(e):
            warnings.warn(
                f"{path.name}: OE test {tid}: dropped {len(e) - cut} data points "
                "past the void-ratio minimum (unloading branch)")
        tests.append(TestCase("OE", tid, init, np.column_stack([e[:cut], sv[:cut]])))
    return tests


def _load_td_tests(path: Path, inits: list[SoilState]) -> list[TestCase]:
    if not inits:
        return []
    mat = _read_matrix(path, 4, "TD data (eps_a eps_v q id)")
    tests = []
    for (tid, block), init in zip(_group_by_id(path, mat, len(inits), "TD"), inits):
        eps_a = block[:, 0] / 100.0     # percent in file
        eps_v = block[:, 1] / 100.0
        q = block[:, 2]
        tests.append(TestCase("TD", tid, init, np.column_stack([eps_a, eps_v, q])))
    return tests


def write_inputs(data_dir, domain: SearchDomain, ga: GAConfig, tests,
                 n_step: int = 100, weights=(1.0, 1.0, 1.0),
                 input_name: str = "Input.txt") -> Path:
    """Generate a complete seven-file input set from in-memory objects.

    Inverse of :func:`load_inputs` (converting back to file units), used
    by the tutorial-data generator and the round-trip tests.
    """
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    oe = [t for t in tests if t.kind == "OE"]
    td = [t for t in tests if t.kind == "TD"]
    names = ("Domain_file.txt", "GA_setup.txt", "OE_init.txt", "TD_init.txt",
             "OE_data.txt", "TD_data.txt")
    lines = ["# number of OE tests, number of TD tests", f"{len(oe)} {len(td)}",
             "# integration steps n_step", str(n_step),
             "# plane weights w1 w2 w3", " ".join("%.10g" % w for w in weights),
             "# data / config file names"]
    lines += list(names)
    (data_dir / input_name).write_text("\n".join(lines) + "\n")
    dom_lines = ["# search domain: P_min P_max, one row per parameter"]
    for name, lo, hi in zip(PARAM_NAMES, domain.p_min, domain.p_max):
        dom_lines.append(f"{'%.10g' % lo} {'%.10g' % hi}   # {name}")
    (data_dir / names[0]).write_text("\n".join(dom_lines) + "\n")
    (data_dir / names[1]).write_text(
        "# GA setup: N_i P_dim N_ITER N_eli n_f mu_in mu_en\n"
        f"{ga.n_ind}\n{ga.p_dim}\n{ga.n_iter}\n{ga.n_eli}\n"
        f"{'%.10g' % ga.n_f}\n{'%.10g' % ga.mu_in}\n{'%.10g' % ga.mu_en}\n")
    for name, group in ((names[2], oe), (names[3], td)):
        init_lines = ["# initial conditions: T1[MPa] T2[MPa] e  (compression positive)"]
        for t in group:
            init_lines.append(f"{'%.10g' % -t.initial.T1} {'%.10g' % -t.initial.T2} "
                              f"{'%.10g' % t.initial.e}")
        (data_dir / name).write_text("\n".join(init_lines) + "\n")
    oe_lines = ["# OE data: e sigma_v[MPa] id"]
    for t in oe:
        for e, sv in t.data:
            oe_lines.append(f"{'%.10g' % e} {'%.10g' % sv} {t.test_id}")
    (data_dir / names[4]).write_text("\n".join(oe_lines) + "\n")
    td_lines = ["# TD data: eps_a[%] eps_v[%] q[MPa] id"]
    for t in td:
        for ea, ev, q in t.data:
            td_lines.append(f"{'%.10g' % (100 * ea)} {'%.10g' % (100 * ev)} "
                            f"{'%.10g' % q} {t.test_id}")
    (data_dir / names[5]).write_text("\n".join(td_lines) + "\n")
    return data_dir / input_name


# --------------------------------------------------------------------------
# Outputs
# --------------------------------------------------------------------------

@dataclass
class OutputBundle:
    """Everything write_outputs needs from a finished run."""

    run: "RunInput"
    tests: list
    best: np.ndarray
    best_cost: float
    best_row: int                   # 0-based row in the final population
    population: np.ndarray
    costs: np.ndarray
    evaluations: list               # (iteration, pop, costs)
    curves: dict = field(default_factory=dict)  # test_id -> PopulationCurves


FLOAT_FMT = "%.10e"


def write_outputs(bundle: OutputBundle, run_dir) -> list[Path]:
    """Write the candidate log, the best fit, experimental-point echoes,
    population response curves and the shape manifest.  log_Pop.txt is
    appended across executions; everything else is rewritten."""
    run_dir = Path(run_dir)
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SandcalError(f"cannot create output directory {run_dir}: {exc}") from exc
    written = []
    written.append(_write_log_pop(bundle, run_dir / "log_Pop.txt"))
    written.append(_write_best_fit(bundle, run_dir / "best_fit.txt"))
    counts = {}
    written.append(_write_x_oe(bundle, run_dir / "X_OE.csv", counts))
    written.append(_write_x_td(bundle, run_dir / "X_TD.csv", counts))
    written.append(_write_hx(bundle, run_dir / "HX_OE.csv", "OE", counts))
    written.append(_write_hx(bundle, run_dir / "HX_TD.csv", "TD", counts))
    written.append(_write_manifest(bundle, run_dir / "manifest.txt", counts))
    return written


def _write_log_pop(bundle: OutputBundle, path: Path) -> Path:
    new = not path.exists()
    with path.open("a") as fh:
        if new:
            fh.write("# iter " + " ".join(PARAM_NAMES) + " cost\n")
        for it, pop, costs in bundle.evaluations:
            for row, cost in zip(pop, costs):
                vals = " ".join(FLOAT_FMT % v for v in row)
                fh.write(f"{it} {vals} {FLOAT_FMT % cost}\n")
    return path


def _write_best_fit(bundle: OutputBundle, path: Path) -> Path:
    lines = ["# best-fit parameters"]
    for name, value in zip(PARAM_NAMES, bundle.best):
        lines.append(f"{name:12s} {FLOAT_FMT % value}")
    lines.append(f"{'cost[-]':12s} {FLOAT_FMT % bundle.best_cost}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_x_oe(bundle: OutputBundle, path: Path, counts: dict) -> Path:
    rows = 0
    with path.open("w") as fh:
        fh.write("test_id,sigma_v_MPa,e\n")
        for t in bundle.tests:
            if t.kind != "OE":
                continue
            for e, sv in t.data:
                fh.write(f"{t.test_id},{FLOAT_FMT % sv},{FLOAT_FMT % e}\n")
                rows += 1
    counts["X_OE.csv"] = rows
    return path


def _write_x_td(bundle: OutputBundle, path: Path, counts: dict) -> Path:
    rows = 0
    with path.open("w") as fh:
        fh.write("test_id,eps_a_pct,eps_v_pct,q_MPa\n")
        for t in bundle.tests:
            if t.kind != "TD":
                continue
            for ea, ev, q in t.data:
                fh.write(f"{t.test_id},{FLOAT_FMT % (100 * ea)},"
                         f"{FLOAT_FMT % (100 * ev)},{FLOAT_FMT % q}\n")
                rows += 1
    counts["X_TD.csv"] = rows
    return path


def _write_hx(bundle: OutputBundle, path: Path, kind: str, counts: dict) -> Path:
    rows = 0
    with path.open("w") as fh:
        if kind == "OE":
            fh.write("candidate_id,test_id,sigma_v_MPa,e\n")
        else:
            fh.write("candidate_id,test_id,eps_a_pct,eps_v_pct,q_MPa\n")
        for t in bundle.tests:
            if t.kind != kind:
                continue
            curves = bundle.curves[t.test_id, kind]
            cols = curves.columns
            n_cand = len(curves.feasible)
            for i in range(n_cand):
                if kind == "OE":
                    sv, e = cols["sigma_v"][i], cols["e"][i]
                    m = np.isfinite(e)
                    for svk, ek in zip(sv[m], e[m]):
                        fh.write(f"{i + 1},{t.test_id},{FLOAT_FMT % svk},{FLOAT_FMT % ek}\n")
                        rows += 1
                else:
                    ea, ev, q = cols["eps_a"][i], cols["eps_v"][i], cols["q"][i]
                    m = np.isfinite(ea)
                    for eak, evk, qk in zip(ea[m], ev[m], q[m]):
                        fh.write(f"{i + 1},{t.test_id},{FLOAT_FMT % (100 * eak)},"
                                 f"{FLOAT_FMT % (100 * evk)},{FLOAT_FMT % qk}\n")
                        rows += 1
    counts[path.name] = rows
    return path


def _write_manifest(bundle: OutputBundle, path: Path, counts: dict) -> Path:
    lines = ["# run output manifest"]
    lines.append(f"n_candidates = {len(bundle.population)}")
    lines.append(f"n_step = {bundle.run.n_step}")
    lines.append(f"points_per_full_curve = {bundle.run.n_step + 1}")
    lines.append(f"best_candidate_id = {bundle.best_row + 1}")
    lines.append(f"best_cost = {FLOAT_FMT % bundle.best_cost}")
    oe_ids = [t.test_id for t in bundle.tests if t.kind == "OE"]
    td_ids = [t.test_id for t in bundle.tests if t.kind == "TD"]
    lines.append("oe_test_ids = " + " ".join(map(str, oe_ids)))
    lines.append("td_test_ids = " + " ".join(map(str, td_ids)))
    for t in bundle.tests:
        lines.append(f"points[{t.kind}:{t.test_id}] = {len(t.data)}")
    for name, rows in counts.items():
        lines.append(f"rows[{name}] = {rows}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_manifest(path) -> dict:
    """Parse manifest.txt back into a flat dict of strings."""
    out = {}
    for _, tokens in _records(Path(path)):
        line = " ".join(tokens)
        if "=" in line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out
