"""Command-line front end: spectrum sweeps, entanglement dynamics, and
single-state entanglement evaluations, emitted as CSV plus optional
matplotlib plot scripts.

Numbers are written with 12 significant digits so an emitted CSV re-parses
into exactly the values written. The GME column of a dynamics run is computed
by the witness SDP every `gme_stride`-th sample (the SDP dominates runtime)
and linearly interpolated in between; the `gme_flag` column is 1 on solver
samples and 0 on interpolated ones.
"""

import argparse
import json
import math
import os
import sys
from multiprocessing import get_context

import numpy as np

from . import dynamics as dyn
from . import entanglement as ent
from . import spectrum as spectrum_mod
from .hilbert import FockSpace, ModelParams, check_density_matrix

_FMT = "{:.12g}"

DEFAULTS = {
    "delta": 1.0,
    "omega": 1.0,
    "g": 0.1,
    "nmax": 40,
    "method": ["exact"],
    "tmax_scaled": 3.0,
    "steps": 400,
    "gme_stride": 4,
    "tol": 1e-8,
    "g_min": 0.0,
    "g_max": 2.0,
    "g_steps": 21,
    "levels": 8,
    "bipartition": "C",
}


def fmt(x):
    return _FMT.format(float(x))


def worker_count(n_tasks):
    """Pool size: capped by DICKE3_THREADS, the CPU count and the task count."""
    cap = os.cpu_count() or 1
    env = os.environ.get("DICKE3_THREADS")
    if env is not None:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            raise SystemExit(f"DICKE3_THREADS must be an integer, got {env!r}")
    return max(1, min(cap, n_tasks))


def _parallel_map(func, items, n_workers):
    if n_workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with get_context("fork").Pool(n_workers) as pool:
        return pool.map(func, items)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def load_config(path, allowed):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise SystemExit(f"cannot read config {path}: {err}")
    if not isinstance(raw, dict):
        raise SystemExit(f"config {path} must hold a JSON object")
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise SystemExit(f"unknown config keys in {path}: {', '.join(unknown)}")
    return raw


def resolve_options(args, keys):
    """Merge defaults <- config file <- explicit CLI flags for `keys`."""
    merged = {k: DEFAULTS[k] for k in keys}
    if getattr(args, "config", None):
        merged.update(load_config(args.config, keys))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    validate_options(merged)
    return merged


def validate_options(opt):
    positive = ["omega", "tol"]
    nonneg = ["delta", "g", "g_min", "g_max", "tmax_scaled"]
    for k in positive:
        if k in opt and not (isinstance(opt[k], (int, float))
                             and math.isfinite(opt[k]) and opt[k] > 0):
            raise SystemExit(f"option {k} must be positive and finite, got {opt[k]!r}")
    for k in nonneg:
        if k in opt and not (isinstance(opt[k], (int, float))
                             and math.isfinite(opt[k]) and opt[k] >= 0):
            raise SystemExit(f"option {k} must be nonnegative and finite, got {opt[k]!r}")
    for k in ("nmax", "steps", "gme_stride", "g_steps", "levels"):
        if k in opt and not (isinstance(opt[k], int) and opt[k] > 0):
            raise SystemExit(f"option {k} must be a positive integer, got {opt[k]!r}")
    if "method" in opt:
        bad = [m for m in opt["method"] if m not in spectrum_mod.METHODS]
        if bad:
            raise SystemExit(f"unknown method(s): {', '.join(bad)}")


# ---------------------------------------------------------------------------
# CSV and density-matrix files
# ---------------------------------------------------------------------------

def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) if not isinstance(x, str) else x
                              for x in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def read_csv(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    return header, rows


def write_density(path, rho):
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    lines = [f"dim {d}"]
    for row in rho:
        lines.append(" ".join(f"{fmt(z.real)},{fmt(z.imag)}" for z in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_density(path):
    """Parse the plain-text density format: first line 'dim N', then N rows of
    N whitespace-separated re,im pairs. Errors carry line/column positions."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("dim "):
        raise SystemExit(f"{path}:1: expected header 'dim N'")
    try:
        d = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise SystemExit(f"{path}:1: malformed dimension in {lines[0]!r}")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != d:
        raise SystemExit(f"{path}: expected {d} matrix rows, found {len(body)}")
    rho = np.zeros((d, d), dtype=complex)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != d:
            raise SystemExit(
                f"{path}:{i + 2}: expected {d} entries, found {len(parts)}")
        for j, tok in enumerate(parts):
            try:
                re_s, im_s = tok.split(",")
                rho[i, j] = complex(float(re_s), float(im_s))
            except ValueError:
                raise SystemExit(
                    f"{path}:{i + 2}: column {j + 1}: malformed entry {tok!r} "
                    "(expected re,im)")
    return rho


# ---------------------------------------------------------------------------
# plot-script emission
# ---------------------------------------------------------------------------

_PLOT_REQUIRED = {
    "spectrum": ["g_over_omega", "level_index"],
    "dynamics": ["t_scaled", "gme_flag"],
}

_SPECTRUM_PLOT = """\
#!/usr/bin/env python3
# auto-generated level-vs-coupling plot for {csv!r}
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv!r})))
methods = [c[len("energy_"):] for c in rows[0] if c.startswith("energy_")]
levels = sorted({{int(float(r["level_index"])) for r in rows}})
fig, ax = plt.subplots(figsize=(6, 4.5))
styles = {{"exact": "-", "rwa": ":", "zeroth": "-.", "grwa": "--"}}
for m in methods:
    series = defaultdict(list)
    for r in rows:
        series[int(float(r["level_index"]))].append(
            (float(r["g_over_omega"]), float(r["energy_" + m])))
    for lv in levels:
        pts = sorted(series[lv])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], styles.get(m, "-"),
                color=f"C{{levels.index(lv) % 10}}",
                label=m if lv == levels[0] else None)
ax.set_xlabel("g / omega")
ax.set_ylabel("energy / omega")
ax.legend()
fig.tight_layout()
fig.savefig({png!r}, dpi=160)
print("wrote", {png!r})
"""

_DYNAMICS_PLOT = """\
#!/usr/bin/env python3
# auto-generated entanglement-dynamics plot for {csv!r}
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv!r})))
methods = [c[len("concurrence_"):] for c in rows[0] if c.startswith("concurrence_")]
t = [float(r["t_scaled"]) for r in rows]
fig, axes = plt.subplots(3, 1, figsize=(6, 8), sharex=True)
panels = [("concurrence_", "concurrence"), ("gme_", "GME  E(rho)"),
          ("negativity_ab_c_", "negativity AB|C")]
for ax, (prefix, label) in zip(axes, panels):
    for m in methods:
        ax.plot(t, [float(r[prefix + m]) for r in rows], label=m)
    ax.set_ylabel(label)
axes[0].legend()
axes[-1].set_xlabel("delta * t / (2 pi)")
fig.tight_layout()
fig.savefig({png!r}, dpi=160)
print("wrote", {png!r})
"""


def emit_plot_script(csv_path, kind, script_path):
    """Write a deterministic matplotlib script plotting an emitted CSV."""
    if kind not in _PLOT_REQUIRED:
        raise ValueError(f"unknown figure kind {kind!r}")
    header, _ = read_csv(csv_path)
    for col in _PLOT_REQUIRED[kind]:
        if col not in header:
            raise SystemExit(
                f"CSV {csv_path} is missing required column {col!r}")
    png = os.path.splitext(script_path)[0] + ".png"
    template = _SPECTRUM_PLOT if kind == "spectrum" else _DYNAMICS_PLOT
    with open(script_path, "w") as fh:
        fh.write(template.format(csv=os.path.abspath(csv_path), png=png))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(args):
    opt = resolve_options(args, ["delta", "omega", "nmax", "method",
                                 "g_min", "g_max", "g_steps", "levels"])
    grid = np.linspace(opt["g_min"], opt["g_max"], opt["g_steps"])
    methods = list(dict.fromkeys(["exact", *opt["method"]]))
    failures = []
    try:
        table = spectrum_mod.level_sweep(
            methods, opt["delta"], opt["omega"], grid, opt["levels"],
            opt["nmax"])
    except RuntimeError as err:
        print(f"spectrum sweep failed: {err}", file=sys.stderr)
        return 1
    header = ["g_over_omega", "level_index"] + [f"energy_{m}" for m in methods]
    rows = []
    for j, gw in enumerate(table.g_over_omega):
        for lv in range(opt["levels"]):
            rows.append([gw, lv] + [table.levels[m][j, lv] for m in methods])
    write_csv(args.out, header, rows)
    if args.emit_plot:
        emit_plot_script(args.out, "spectrum", args.emit_plot)
    return 1 if failures else 0


def _gme_task(packed):
    idx, rho_bytes, tol = packed
    rho = np.frombuffer(rho_bytes, dtype=complex).reshape(8, 8)
    try:
        res = ent.gme(rho, ent.GmeOptions(tol=tol))
        return idx, res.value, None
    except Exception as err:  # reported per sample with nonzero exit
        return idx, math.nan, str(err)


def dynamics_table(opt):
    """Run the dynamics pipeline for every requested method; returns
    (header, rows, failures)."""
    params = ModelParams(delta=opt["delta"], omega=opt["omega"], g=opt["g"])
    fock = FockSpace(opt["nmax"])
    times = np.linspace(0.0, opt["tmax_scaled"], opt["steps"])
    methods = list(dict.fromkeys(opt["method"]))
    n_t = times.size
    stride = opt["gme_stride"]
    gme_idx = sorted(set(range(0, n_t, stride)) | {n_t - 1})
    flags = np.zeros(n_t, dtype=int)
    flags[gme_idx] = 1

    columns = {}
    failures = []
    for m in methods:
        eig = spectrum_mod.solve(m, params, fock)
        traj = dyn.trajectory(eig, times)
        conc = np.empty(n_t)
        neg = np.empty(n_t)
        for k in range(n_t):
            rho4 = dyn.rotate_to_lab(dyn.spin_reduced(traj.states[k], fock))
            conc[k] = ent.concurrence_collective(rho4)
            neg[k] = ent.negativity(traj.reduced_states[k], "C")
        tasks = [(k, traj.reduced_states[k].tobytes(), opt["tol"])
                 for k in gme_idx]
        results = _parallel_map(_gme_task, tasks, worker_count(len(tasks)))
        e_samples = np.full(len(gme_idx), math.nan)
        for (k, val, err), pos in zip(results, range(len(gme_idx))):
            if err is not None:
                failures.append(f"method {m}, t_scaled={times[k]:.6g}: {err}")
            e_samples[pos] = val
        gme_col = np.interp(np.arange(n_t), gme_idx, e_samples)
        columns[m] = {
            "concurrence": conc, "gme": gme_col, "negativity_ab_c": neg,
            "pop_p32": traj.populations[:, 0],
            "pop_p12": traj.populations[:, 1],
            "pop_m12": traj.populations[:, 2],
            "pop_m32": traj.populations[:, 3],
        }

    quantities = ["concurrence", "gme", "negativity_ab_c",
                  "pop_p32", "pop_p12", "pop_m12", "pop_m32"]
    header = ["t_scaled", "gme_flag"]
    for m in methods:
        header += [f"{q}_{m}" for q in quantities]
    rows = []
    for k in range(n_t):
        row = [times[k], flags[k]]
        for m in methods:
            row += [columns[m][q][k] for q in quantities]
        rows.append(row)
    return header, rows, failures


def cmd_dynamics(args):
    opt = resolve_options(args, ["delta", "omega", "g", "nmax", "method",
                                 "tmax_scaled", "steps", "gme_stride", "tol"])
    if opt["delta"] <= 0:
        print("dynamics requires delta > 0 (time axis is delta*t/2pi)",
              file=sys.stderr)
        return 1
    header, rows, failures = dynamics_table(opt)
    write_csv(args.out, header, rows)
    if args.emit_plot:
        emit_plot_script(args.out, "dynamics", args.emit_plot)
    for f in failures:
        print(f"FAILED sample: {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_gme(args):
    opt = resolve_options(args, ["tol"])
    rho = read_density(args.input)
    if rho.shape != (8, 8):
        print(f"gme expects an 8x8 density matrix, got {rho.shape}",
              file=sys.stderr)
        return 1
    try:
        check_density_matrix(rho, what=f"state in {args.input}")
    except ValueError as err:
        print(f"invalid input state: {err}", file=sys.stderr)
        return 1
    try:
        res = ent.gme(rho, ent.GmeOptions(tol=opt["tol"]))
    except RuntimeError as err:
        print(str(err), file=sys.stderr)
        return 1
    print(f"E(rho) = {fmt(res.value)}")
    print(f"status = {res.status}")
    print(f"rel_gap = {fmt(res.rel_gap)}")
    print(f"iterations = {res.iterations}")
    if args.dump_witness:
        write_density(args.dump_witness, res.witness)
        print(f"witness written to {args.dump_witness}")
    return 0 if res.status == "optimal" else 1


def cmd_concurrence(args):
    rho = read_density(args.input)
    if rho.shape == (8, 8):
        from .hilbert import symmetric_extract
        try:
            check_density_matrix(rho, what=f"state in {args.input}")
            rho4 = symmetric_extract(rho)
        except ValueError as err:
            print(f"invalid input state: {err}", file=sys.stderr)
            return 1
    elif rho.shape == (4, 4):
        rho4 = rho
    else:
        print(f"concurrence expects a 4x4 or 8x8 density matrix, got "
              f"{rho.shape}", file=sys.stderr)
        return 1
    try:
        c = ent.concurrence_collective(rho4)
    except ValueError as err:
        print(f"invalid input state: {err}", file=sys.stderr)
        return 1
    print(f"concurrence = {fmt(c)}")
    return 0


def cmd_negativity(args):
    opt = resolve_options(args, ["bipartition"])
    rho = read_density(args.input)
    if rho.shape != (8, 8):
        print(f"negativity expects an 8x8 density matrix, got {rho.shape}",
              file=sys.stderr)
        return 1
    try:
        check_density_matrix(rho, what=f"state in {args.input}")
        val = ent.negativity(rho, opt["bipartition"])
    except ValueError as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return 1
    rest = "".join(q for q in "ABC" if q not in opt["bipartition"])
    print(f"negativity {opt['bipartition']}|{rest} = {fmt(val)}")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="dicke3",
        description="Three-qubit Dicke model spectra and entanglement dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, needs_out):
        p.add_argument("--config", help="JSON config file (flags override it)")
        if needs_out:
            p.add_argument("--out", required=True, help="output CSV path")
            p.add_argument("--emit-plot", metavar="PATH",
                           help="also write a matplotlib plot script")
        p.add_argument("--delta", type=float, help="qubit splitting (default 1)")
        p.add_argument("--omega", type=float, help="cavity frequency (default 1)")
        p.add_argument("--nmax", type=int, help="Fock cutoff (default 40)")
        p.add_argument("--method", action="append",
                       choices=spectrum_mod.METHODS,
                       help="repeatable; default exact")
        p.add_argument("--tol", type=float, help="SDP tolerance (default 1e-8)")

    p = sub.add_parser("spectrum", help="energy levels over a coupling grid")
    common(p, needs_out=True)
    p.add_argument("--g-min", dest="g_min", type=float,
                   help="grid start (default 0)")
    p.add_argument("--g-max", dest="g_max", type=float,
                   help="grid end (default 2)")
    p.add_argument("--g-steps", dest="g_steps", type=int,
                   help="grid points (default 21)")
    p.add_argument("--levels", type=int, help="levels per point (default 8)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("dynamics",
                       help="entanglement dynamics from the W state")
    common(p, needs_out=True)
    p.add_argument("--g", type=float, help="coupling (default 0.1)")
    p.add_argument("--tmax-scaled", dest="tmax_scaled", type=float,
                   help="time-grid end in delta*t/2pi units (default 3)")
    p.add_argument("--steps", type=int, help="time samples (default 400)")
    p.add_argument("--gme-stride", dest="gme_stride", type=int,
                   help="solve the GME SDP every k-th sample (default 4)")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("gme", help="GME witness value of a density-matrix file")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--input", required=True, help="density-matrix file")
    p.add_argument("--tol", type=float, help="SDP tolerance")
    p.add_argument("--dump-witness", metavar="PATH",
                   help="write the optimal witness matrix")
    p.set_defaults(func=cmd_gme)

    p = sub.add_parser("concurrence",
                       help="collective-spin concurrence of a state file")
    p.add_argument("--input", required=True, help="density-matrix file")
    p.set_defaults(func=cmd_concurrence)

    p = sub.add_parser("negativity", help="bipartition negativity of a state file")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--input", required=True, help="density-matrix file")
    p.add_argument("--bipartition", choices=["A", "B", "C", "AB", "AC", "BC"],
                   help="transposed side (default C, i.e. AB|C)")
    p.set_defaults(func=cmd_negativity)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
