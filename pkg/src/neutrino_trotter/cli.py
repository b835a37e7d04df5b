"""Command-line front end: ``neutrino-trotter <subcommand> ...``.

Exit codes: 0 success, 2 usage / invalid parameters, 3 capacity exceeded,
4 numerical-contract violation. Failures print one JSON error record on
stderr. Output files are written atomically, so a failed run leaves none.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import bounds as bnd
from .circuits import compile_multistep, count_gates
from .circuits.stats import chi_squared, credible_interval, sample_measurements
from .errors import CapacityError, NeutrinoTrotterError, NumericalContractError, ParameterError, check_capacity
from .evolution import (
    FIRST_ORDER,
    SECOND_ORDER,
    SYMMETRIZED_PAIR,
    TrotterScheme,
    evolve_multistep,
    exact_trajectory,
    full_step,
    two_body_error,
)
from .model import CouplingModel, b_vectors, build_couplings, build_hamiltonian, default_initial_bitstring
from .ordering import (
    exhaustive_search,
    resolve_ordering,
    round_robin_layers,
    sorted_ordering,
    swap_network_ordering,
)
from .quantum_core import HermitianPropagator, basis_state, spectral_norm, z_expectations

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_NUMERICAL = 0, 2, 3, 4

SCHEMES = {"first": FIRST_ORDER, "second": SECOND_ORDER, "symmetrized": SYMMETRIZED_PAIR}
TRAJECTORY_COLUMNS = ["t", "neutrino", "observable", "value", "lower68", "upper68", "lower90", "upper90"]


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- config


def _resolve(args, config, name, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def time_grid(dt=None, steps=None, T=None):
    """Resolve (dt, steps) from any two of dt, steps, T."""
    given = sum(x is not None for x in (dt, steps, T))
    if given < 2:
        raise ParameterError("specify two of --dt, --steps, --T")
    if dt is not None and steps is not None:
        if T is not None and not math.isclose(dt * steps, T, rel_tol=1e-9):
            raise ParameterError("--dt * --steps disagrees with --T")
        return float(dt), int(steps)
    if dt is not None:
        steps = round(T / dt)
        if steps < 1 or not math.isclose(steps * dt, T, rel_tol=1e-9):
            raise ParameterError("--T must be a positive integer multiple of --dt")
        return float(dt), int(steps)
    return T / steps, int(steps)


def _model(args, config):
    n = _resolve(args, config, "N")
    if n is None:
        raise ParameterError("-N is required")
    return CouplingModel(
        int(n),
        mu=float(_resolve(args, config, "mu", 1.0)),
        theta_nu=float(_resolve(args, config, "theta_nu", 0.195)),
        max_angle_cos=float(_resolve(args, config, "max_angle_cos", 0.9)),
    )


# ---------------------------------------------------------------- trajectories


def _trajectory_rows(times, states, z0, intervals=None):
    rows = []
    for step, (t, psi) in enumerate(zip(times, states)):
        z = z_expectations(psi)
        for i, zi in enumerate(z):
            blank = ["", "", "", ""]
            rows.append([t, i, "Z", zi] + blank)
            ints = blank if intervals is None else list(intervals[step][i])
            rows.append([t, i, "P", abs(z0[i] - zi) / 2] + ints)
    return rows


def _simulate(model, scheme_name, ordering, dt, steps, alternate, initial):
    ham = build_hamiltonian(model)
    psi0 = basis_state(initial)
    times = [dt * k for k in range(steps + 1)]
    if scheme_name == "exact":
        states = exact_trajectory(psi0, ham, times)
    else:
        scheme = TrotterScheme(SCHEMES[scheme_name], ordering, alternate)
        states = np.vstack([psi0[None, :], evolve_multistep(psi0, dt, steps, scheme, ham)])
    return times, states


def cmd_evolve(args, config):
    model = _model(args, config)
    n = model.n
    check_capacity(n)
    dt, steps = time_grid(_resolve(args, config, "dt"), _resolve(args, config, "steps"), _resolve(args, config, "T"))
    scheme = _resolve(args, config, "scheme", "first")
    if scheme not in (*SCHEMES, "exact"):
        raise ParameterError(f"unknown scheme {scheme!r}")
    ordering = resolve_ordering(_resolve(args, config, "ordering", "sorted"), n)
    initial = _resolve(args, config, "initial") or default_initial_bitstring(n)
    if len(initial) != n:
        raise ParameterError("initial bitstring length must equal N")
    shots = _resolve(args, config, "shots")
    seed = int(_resolve(args, config, "seed", 0))
    times, states = _simulate(model, scheme, ordering, dt, steps, bool(_resolve(args, config, "alternate", False)), initial)
    z0 = z_expectations(basis_state(initial))
    intervals = None
    if shots:
        intervals = []
        for k, psi in enumerate(states):
            rec = sample_measurements(psi, int(shots), seed + k)
            row = []
            for i in range(n):
                lo68, hi68 = credible_interval(rec, i, 0.68, z0[i])
                lo90, hi90 = credible_interval(rec, i, 0.90, z0[i])
                row.append((lo68, hi68, lo90, hi90))
            intervals.append(row)
    text = render_csv(TRAJECTORY_COLUMNS, _trajectory_rows(times, states, z0, intervals))
    write_atomic(_resolve(args, config, "out"), text)


def _parse_floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _dt_grid(args, config, default):
    dts = _resolve(args, config, "dts")
    if dts is None:
        return default
    return _parse_floats(dts) if isinstance(dts, str) else [float(x) for x in dts]


def cmd_trotter_scan(args, config):
    model = _model(args, config)
    n = model.n
    check_capacity(n)
    dts = _dt_grid(args, config, [0.25 * k for k in range(1, 161)])
    names = _resolve(args, config, "orderings", "sorted")
    names = names.split(",") if isinstance(names, str) else list(names)
    order = int(_resolve(args, config, "order", 1))
    orderings = [(name, resolve_ordering(name, n)) for name in names]
    J = build_couplings(model)
    prop = HermitianPropagator(build_hamiltonian(model).h2)
    rows = []
    for name, o in orderings:
        for dt in dts:
            rows.append([dt, name, order, two_body_error(dt, o, J, n, order, exact=prop.unitary(dt))])
    rows.sort(key=lambda r: (r[1], r[0]))
    write_atomic(_resolve(args, config, "out"), render_csv(["dt", "ordering", "order", "error"], rows))


def cmd_ordering_search(args, config):
    model = _model(args, config)
    dt = float(_resolve(args, config, "dt", 10.0))
    objective = _resolve(args, config, "objective", "measured_norm")
    mode = _resolve(args, config, "mode", "layered")
    best, value = exhaustive_search(model.n, dt, objective, mode, build_couplings(model))
    record = {"N": model.n, "dt": dt, "objective": objective, "mode": mode,
              "ordering": best.to_text(), "value": value}
    write_atomic(_resolve(args, config, "out"), json.dumps(record, indent=2) + "\n")


def cmd_bounds(args, config):
    model = _model(args, config)
    T = _resolve(args, config, "T")
    eps = _resolve(args, config, "eps")
    if T is None or eps is None:
        raise ParameterError("bounds needs --T and --eps")
    report = bnd.bound_report(model.n, float(T), float(eps), model)
    write_atomic(_resolve(args, config, "out"), report.to_json(indent=2) + "\n")


def cmd_compile(args, config):
    model = _model(args, config)
    n = model.n
    check_capacity(n)
    dt = _resolve(args, config, "dt")
    if dt is None:
        raise ParameterError("compile needs --dt")
    steps = int(_resolve(args, config, "steps", 1))
    ordering = resolve_ordering(_resolve(args, config, "ordering", "sorted"), n)
    initial = _resolve(args, config, "initial")
    c = compile_multistep(
        n, float(dt), steps, ordering, build_couplings(model), b_vectors(model),
        template=_resolve(args, config, "template", "native"),
        alternate_inversion=bool(_resolve(args, config, "alternate", False)),
        fuse_repeated_pairs=bool(_resolve(args, config, "fuse", False)),
        initial=initial,
    )
    write_atomic(_resolve(args, config, "out"), c.to_text())


def _read_theory(path):
    theory = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            theory[(float(row["t"]), int(row["neutrino"]))] = float(row["value"])
    return theory


def cmd_sample(args, config):
    model = _model(args, config)
    n = model.n
    check_capacity(n)
    dt, steps = time_grid(_resolve(args, config, "dt"), _resolve(args, config, "steps"), _resolve(args, config, "T"))
    shots = int(_resolve(args, config, "shots", 200))
    seed = int(_resolve(args, config, "seed", 0))
    scheme = _resolve(args, config, "scheme", "first")
    ordering = resolve_ordering(_resolve(args, config, "ordering", "sorted"), n)
    initial = _resolve(args, config, "initial") or default_initial_bitstring(n)
    theory_path = _resolve(args, config, "theory")
    theory = _read_theory(theory_path) if theory_path else None
    times, states = _simulate(model, scheme, ordering, dt, steps, bool(_resolve(args, config, "alternate", False)), initial)
    _, exact_states = _simulate(model, "exact", ordering, dt, steps, False, initial)
    z0 = z_expectations(basis_state(initial))
    rows, records = [], []
    measured = {i: [] for i in range(n)}
    expected = {i: [] for i in range(n)}
    widths = {i: [] for i in range(n)}
    for k in range(1, steps + 1):
        rec = sample_measurements(states[k], shots, seed + k)
        records.append(json.loads(rec.to_json()))
        z_exact = z_expectations(exact_states[k])
        for i in range(n):
            p = abs(z0[i] - (1 - 2 * rec.ones(i) / shots)) / 2
            lo68, hi68 = credible_interval(rec, i, 0.68, z0[i])
            lo90, hi90 = credible_interval(rec, i, 0.90, z0[i])
            rows.append([times[k], i, "P", p, lo68, hi68, lo90, hi90])
            measured[i].append(p)
            if theory is not None:
                key = (times[k], i)
                if key not in theory:
                    raise ParameterError(f"theory file lacks t={times[k]}, neutrino={i}")
                expected[i].append(theory[key])
            else:
                expected[i].append(abs(z0[i] - z_exact[i]) / 2)
            # dP taken as the half-width of the 68% interval
            widths[i].append(max((hi68 - lo68) / 2, 1e-12))
    chi2 = {str(i): chi_squared(measured[i], expected[i], widths[i]) for i in range(n)}
    summary = {"N": n, "dt": dt, "steps": steps, "shots": shots, "seed": seed, "scheme": scheme,
               "ordering": ordering.to_text(), "chi2": chi2, "records": records}
    out = _resolve(args, config, "out")
    summary_path = _resolve(args, config, "summary")
    text = render_csv(TRAJECTORY_COLUMNS, rows)
    summary_text = json.dumps(summary, indent=2) + "\n"
    write_atomic(out, text)
    if summary_path:
        write_atomic(summary_path, summary_text)
    elif out not in (None, "-"):
        sys.stdout.write(json.dumps({"chi2": chi2}) + "\n")


# ---------------------------------------------------------------- reproduce


def reproduce_fig2(n=4, t_max=40.0, dt=0.1):
    model = CouplingModel(n)
    ham = build_hamiltonian(model)
    initial = default_initial_bitstring(n)
    times = [k * dt for k in range(int(round(t_max / dt)) + 1)]
    states = exact_trajectory(basis_state(initial), ham, times)
    z0 = z_expectations(basis_state(initial))
    return {"fig2.csv": render_csv(TRAJECTORY_COLUMNS, _trajectory_rows(times, states, z0))}


def reproduce_fig5(dts=None):
    n = 4
    model = CouplingModel(n)
    ham = build_hamiltonian(model)
    oo = resolve_ordering("oo4", n)
    sn = resolve_ordering("sn4", n)
    psi0 = basis_state(default_initial_bitstring(n))
    z0 = z_expectations(psi0)
    dts = dts if dts is not None else [0.5 * k for k in range(0, 81)]
    prop = HermitianPropagator(ham.total)
    methods = {
        "oo": TrotterScheme(FIRST_ORDER, oo),
        "sn": TrotterScheme(FIRST_ORDER, sn),
        "sn_symmetrized": TrotterScheme(SYMMETRIZED_PAIR, sn),
    }
    rows = []
    for dt in dts:
        exact = prop.unitary(dt)
        z = z_expectations(exact @ psi0)
        for i in range(n):
            rows.append([dt, "exact", "P", i, abs(z0[i] - z[i]) / 2])
        for name, scheme in methods.items():
            U = full_step(dt, scheme, ham)
            z = z_expectations(U @ psi0)
            for i in range(n):
                rows.append([dt, name, "P", i, abs(z0[i] - z[i]) / 2])
            rows.append([dt, name, "error", "", spectral_norm(U - exact)])
    return {"fig5.csv": render_csv(["dt", "method", "quantity", "neutrino", "value"], rows)}


def reproduce_fig6(dt=16.0, T=1200.0, neutrino=1):
    n = 4
    model = CouplingModel(n)
    initial = default_initial_bitstring(n)
    steps = int(round(T / dt))
    z0 = z_expectations(basis_state(initial))
    rows = []
    for label, scheme, ordering in (("exact", "exact", None), ("oo", "first", resolve_ordering("oo4", n)),
                                    ("sn", "first", resolve_ordering("sn4", n))):
        times, states = _simulate(model, scheme, ordering or sorted_ordering(n), dt, steps, False, initial)
        for t, psi in zip(times, states):
            z = z_expectations(psi)[neutrino]
            rows.append([t, neutrino, f"P_{label}", abs(z0[neutrino] - z) / 2, "", "", "", ""])
    return {"fig6.csv": render_csv(TRAJECTORY_COLUMNS, rows)}


def sampled_orderings(n):
    """Deterministic ordering set used for the empirical cost bands."""
    out = {"sorted": sorted_ordering(n), "sorted_rev": sorted_ordering(n).reversed()}
    if n >= 2:
        out["rr"] = round_robin_layers(n)
        out["rr_rev"] = round_robin_layers(n).reversed()
        out["sn"] = swap_network_ordering(n).ordering
    if n == 4:
        out["oo4"] = resolve_ordering("oo4", 4)
        out["sn4"] = resolve_ordering("sn4", 4)
    return out


def reproduce_fig12(T=40.0, eps=0.15, n_values=range(2, 9)):
    rows = []
    for n in n_values:
        check_capacity(n)
        report = bnd.bound_report(n, T, eps)
        rows.append([n, 1, "bound", "", report.r1, report.c1])
        rows.append([n, 2, "bound", "", report.r2, report.c2])
        J = build_couplings(CouplingModel(n))
        for name, o in sampled_orderings(n).items():
            for order in (1, 2):
                r = bnd.minimal_steps_empirical(n, T, eps, order, o, "linear", J)
                c1, c2 = bnd.gate_costs(n, r, r)
                rows.append([n, order, "empirical", name, r, c1 if order == 1 else c2])
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return {"fig12.csv": render_csv(["N", "order", "source", "ordering", "r", "cost"], rows)}


def reproduce_table2(k_max=10, dt=4.0):
    n = 4
    model = CouplingModel(n)
    J = build_couplings(model)
    b = b_vectors(model)
    oo = resolve_ordering("oo4", n)
    rows = []
    for k in range(1, k_max + 1):
        plain = count_gates(compile_multistep(n, dt, k, oo, J, b))
        fused = count_gates(compile_multistep(n, dt, k, oo, J, b, alternate_inversion=True, fuse_repeated_pairs=True))
        rows.append([k, plain["ZZ"], plain["SU2"], fused["ZZ"], fused["SU2"]])
    return {"table2.csv": render_csv(["k", "zz", "su2", "zz_alternating_fused", "su2_alternating_fused"], rows)}


REPRODUCERS = {
    "fig2": reproduce_fig2,
    "fig5": reproduce_fig5,
    "fig6": reproduce_fig6,
    "fig12": reproduce_fig12,
    "table2": reproduce_table2,
}


def cmd_reproduce(args, config):
    target = args.target
    out_dir = _resolve(args, config, "out_dir", ".")
    kwargs = {}
    if target == "fig12":
        kwargs["T"] = float(_resolve(args, config, "T", 40.0))
        kwargs["eps"] = float(_resolve(args, config, "eps", 0.15))
        kwargs["n_values"] = range(2, int(_resolve(args, config, "n_max", 8)) + 1)
    outputs = REPRODUCERS[target](**kwargs)
    for name, text in outputs.items():
        write_atomic(os.path.join(out_dir, name), text)


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(prog="neutrino-trotter", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with option values; command-line flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, time=True):
        p.add_argument("-N", type=int, dest="N")
        p.add_argument("--mu", type=float)
        p.add_argument("--theta-nu", type=float, dest="theta_nu")
        p.add_argument("--max-angle-cos", type=float, dest="max_angle_cos")
        p.add_argument("--out", help="output path ('-' or omitted: stdout)")
        if time:
            p.add_argument("--dt", type=float)
            p.add_argument("--steps", type=int)
            p.add_argument("--T", type=float, dest="T")

    p = sub.add_parser("evolve", help="trajectories of <Z_i> and P_i")
    common(p)
    p.add_argument("--scheme", choices=[*SCHEMES, "exact"])
    p.add_argument("--ordering", help="preset (sn4, oo4, sn, rr, sorted) or text form")
    p.add_argument("--alternate", action="store_true", default=None)
    p.add_argument("--initial")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("trotter-scan", help="single-step two-body error over dt")
    common(p, time=False)
    p.add_argument("--dts", help="comma-separated time steps")
    p.add_argument("--orderings", help="comma-separated presets")
    p.add_argument("--order", type=int, choices=[1, 2])
    p.set_defaults(func=cmd_trotter_scan)

    p = sub.add_parser("ordering-search", help="exhaustive optimal-ordering search")
    common(p, time=False)
    p.add_argument("--dt", type=float)
    p.add_argument("--objective", choices=["measured_norm", "commutator_bound"])
    p.add_argument("--mode", choices=["layered", "sequence"])
    p.set_defaults(func=cmd_ordering_search)

    p = sub.add_parser("bounds", help="analytic step counts and gate costs (JSON)")
    common(p, time=False)
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compile", help="emit a Trotter circuit in text form")
    common(p, time=False)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--ordering")
    p.add_argument("--template", choices=["native", "cnot", "zz"])
    p.add_argument("--alternate", action="store_true", default=None)
    p.add_argument("--fuse", action="store_true", default=None, help="merge repeated pairs across steps")
    p.add_argument("--initial")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("sample", help="shot statistics, credible intervals and chi^2")
    common(p)
    p.add_argument("--scheme", choices=[*SCHEMES, "exact"])
    p.add_argument("--ordering")
    p.add_argument("--alternate", action="store_true", default=None)
    p.add_argument("--initial")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--theory", help="CSV with columns t,neutrino,value")
    p.add_argument("--summary", help="JSON summary path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("reproduce", help="regenerate figure/table data")
    p.add_argument("target", choices=sorted(REPRODUCERS))
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--eps", type=float)
    p.add_argument("--n-max", type=int, dest="n_max")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _error_exit(exc, code):
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = {}
        if args.config:
            with open(args.config) as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise ParameterError("config file must hold a JSON object")
        args.func(args, config)
    except CapacityError as exc:
        return _error_exit(exc, EXIT_CAPACITY)
    except NumericalContractError as exc:
        return _error_exit(exc, EXIT_NUMERICAL)
    except (ParameterError, OSError, json.JSONDecodeError) as exc:
        return _error_exit(exc, EXIT_USAGE)
    except NeutrinoTrotterError as exc:
        return _error_exit(exc, EXIT_USAGE)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
