"""Command-line interface.

Subcommands::

    qdiscord discord werner F | bell A B | c C1 C2 C3 [--numeric]
    qdiscord sweep --preset fig1|fig2|fig3 [--extended] [--verify] [--output PATH]
    qdiscord sweep --from F0 --to F1 --step S --quantities discord,... [--output PATH]
    qdiscord purify --f0 F --rounds N [--csv PATH]
    qdiscord koashi-check --dims A B C --trials N --seed S [--csv PATH] [--product]

Exit codes: 0 success, 1 usage error, 2 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .correlations import CorrelationReport, discord_numeric, report_from_c
from .koashi import (
    MAX_SUBSYSTEM_DIM,
    additivity_report,
    discord_class_n_copies,
    koashi_winter_residual,
    purify_class,
    random_class_spec,
    separability_check_AC,
)
from .linalg import DensityMatrix, haar_state
from .purification import iterate, purification_closed_form, simulate_round
from .states import CVector, bell_diagonal_from_c, bell_state, c_from_state, c_from_weights, werner_c

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

QUANTITIES = {"discord": "D", "mutual_information": "I", "classical_correlation": "C"}
PRESETS = {"fig1": ("discord",), "fig2": ("mutual_information",), "fig3": ("classical_correlation",)}
STAGES = ("rho", "rho_prime", "chi", "chi_prime")
DEFAULT_STEP = 0.005
DEFAULT_SEED = 42
VERIFY_TOL = 1e-12
KW_TOL = 1e-5
MAX_ROWS = 10**6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _resolve(path: str, output_dir: str | None) -> Path:
    p = Path(path)
    if output_dir and not p.is_absolute():
        p = Path(output_dir) / p
    return p


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _csv_text(provenance: str, header: list[str], rows: list[list[str]]) -> str:
    out = io.StringIO()
    out.write(f"# {provenance}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(row) + "\n")
    return out.getvalue()


def _print_report(label: str, rep: CorrelationReport) -> None:
    print(f"state: {label}")
    print(f"method: {rep.method}")
    print(f"mutual_information: {fmt(rep.mutual_information)}")
    print(f"classical_correlation: {fmt(rep.classical_correlation)}")
    print(f"discord: {fmt(rep.discord)}")
    if rep.optimizer is not None:
        o = rep.optimizer
        params = ", ".join(fmt(p) for p in o.best_parameters[:4])
        print(f"optimizer: {o.method} grid={o.grid_size} iterations={o.iterations} "
              f"improvement={o.improvement:.3e} best=({params})")


def _parse_floats(values: list[str], n: int, what: str) -> list[float]:
    if len(values) != n:
        raise UsageError(f"{what} takes {n} parameter(s), got {len(values)}")
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from exc


def cmd_discord(args) -> int:
    kind = args.kind
    try:
        if kind == "werner":
            (F,) = _parse_floats(args.params, 1, "werner")
            if not 0.0 <= F <= 1.0:
                raise UsageError("werner fidelity must lie in [0, 1]")
            c, label = werner_c(F), f"werner F={fmt(F)}"
            rho = None
        elif kind == "bell":
            a, b = _parse_floats(args.params, 2, "bell")
            if a not in (0, 1) or b not in (0, 1):
                raise UsageError("bell labels must be 0 or 1")
            rho = DensityMatrix.from_pure(bell_state(int(a), int(b)), (2, 2))
            c, label = c_from_state(rho), f"bell beta_{int(a)}{int(b)}"
        elif kind == "c":
            c1, c2, c3 = _parse_floats(args.params, 3, "c")
            c, label = CVector(c1, c2, c3), f"bell-diagonal c=({fmt(c1)}, {fmt(c2)}, {fmt(c3)})"
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown state {kind}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.numeric:
        rep = discord_numeric(rho if rho is not None else bell_diagonal_from_c(c))
    else:
        rep = report_from_c(c)
    _print_report(label, rep)
    return EXIT_OK


def _stage_reports_closed_form(F: float) -> dict[str, CorrelationReport]:
    cf = purification_closed_form(F)
    weights = {(0, 0): cf["w00"], (0, 1): cf["w01"], (1, 0): cf["w10"], (1, 1): cf["w11"]}
    return {
        "rho": report_from_c(werner_c(F)),
        "rho_prime": report_from_c(c_from_weights(weights)),
        "chi": report_from_c(werner_c(cf["F_out"])),
        "chi_prime": report_from_c(werner_c(cf["F_twirl_only"])),
    }


def _stage_reports_simulated(F: float) -> dict[str, CorrelationReport]:
    s = simulate_round(F)
    return {
        "rho_prime": report_from_c(c_from_state(s.intermediate)),
        "chi": report_from_c(c_from_state(s.final)),
        "chi_prime": report_from_c(c_from_state(s.twirl_only)),
    }


def _quantity(rep: CorrelationReport, q: str) -> float:
    return {"discord": rep.discord, "mutual_information": rep.mutual_information,
            "classical_correlation": rep.classical_correlation}[q]


def sweep_grid(f_min: float, f_max: float, step: float) -> list[float]:
    if not (0.0 <= f_min <= f_max <= 1.0):
        raise UsageError("need 0 <= from <= to <= 1")
    if not step > 0:
        raise UsageError("step must be positive")
    n = math.floor((f_max - f_min) / step + 1e-9)
    if n > MAX_ROWS:
        raise UsageError("grid has too many points")
    return [min(round(f_min + i * step, 12), f_max) for i in range(n + 1)]


def sweep_csv(f_min: float, f_max: float, step: float, quantities: tuple[str, ...],
              verify: bool, provenance: str) -> tuple[str, float]:
    """Return the CSV text and the largest closed-form/simulation difference."""
    header = ["F"]
    for q in quantities:
        header += [f"{QUANTITIES[q]}_{st}" for st in STAGES]
    if verify:
        for q in quantities:
            header += [f"{QUANTITIES[q]}_{st}_absdiff" for st in STAGES[1:]]
    rows = []
    worst = 0.0
    for F in sweep_grid(f_min, f_max, step):
        closed = _stage_reports_closed_form(F)
        row = [fmt(F)]
        for q in quantities:
            row += [fmt(_quantity(closed[st], q)) for st in STAGES]
        if verify:
            sim = _stage_reports_simulated(F)
            for q in quantities:
                for st in STAGES[1:]:
                    diff = abs(_quantity(closed[st], q) - _quantity(sim[st], q))
                    worst = max(worst, diff)
                    row.append(fmt(diff))
        rows.append(row)
    return _csv_text(provenance, header, rows), worst


def cmd_sweep(args) -> int:
    if args.preset:
        quantities = PRESETS[args.preset]
        f_min, f_max = (0.0, 1.0) if args.extended else (0.5, 1.0)
        if args.f_min is not None or args.f_max is not None:
            raise UsageError("--preset cannot be combined with --from/--to")
    else:
        if args.f_min is None or args.f_max is None:
            raise UsageError("need --preset or both --from and --to")
        f_min, f_max = args.f_min, args.f_max
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
        bad = [q for q in quantities if q not in QUANTITIES]
        if bad or not quantities:
            raise UsageError(f"unknown quantities {bad}; choose from {sorted(QUANTITIES)}")
    step = args.step
    provenance = (
        f"qdiscord {__version__} sweep preset={args.preset or 'none'} from={fmt(f_min)} "
        f"to={fmt(f_max)} step={fmt(step)} quantities={','.join(quantities)} "
        f"verify={'yes' if args.verify else 'no'} seed=none"
    )
    text, worst = sweep_csv(f_min, f_max, step, quantities, args.verify, provenance)
    out = _resolve(args.output or f"{args.preset or 'sweep'}.csv", args.output_dir)
    _write(out, text)
    print(f"wrote {out}")
    if args.verify:
        print(f"max closed-form vs simulation difference: {worst:.3e}")
        if worst > VERIFY_TOL:
            print(f"invariant violated: difference exceeds {VERIFY_TOL:g}", file=sys.stderr)
            return EXIT_INVARIANT
    return EXIT_OK


def cmd_purify(args) -> int:
    if not 0.0 <= args.f0 <= 1.0:
        raise UsageError("--f0 must lie in [0, 1]")
    if args.rounds < 1:
        raise UsageError("--rounds must be at least 1")
    trace = iterate(args.f0, args.rounds)
    header = ["round", "F_in", "F_out", "p_success", "D_in", "D_intermediate", "D_final",
              "I_in", "I_intermediate", "I_final", "C_in", "C_intermediate", "C_final",
              "cumulative_yield"]
    rows = []
    yld = 1.0
    for i, r in enumerate(trace.rounds, start=1):
        yld *= r.p_success / 2.0
        rows.append([str(i)] + [fmt(x) for x in (
            r.F_in, r.F_out, r.p_success, r.D_in, r.D_intermediate, r.D_final,
            r.I_in, r.I_intermediate, r.I_final, r.C_in, r.C_intermediate, r.C_final, yld)])
    widths = [max(len(h), *(len(row[k]) for row in rows)) for k, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(v.rjust(w) for v, w in zip(row, widths)))
    if args.csv:
        provenance = f"qdiscord {__version__} purify f0={fmt(args.f0)} rounds={args.rounds} seed=none"
        out = _resolve(args.csv, args.output_dir)
        _write(out, _csv_text(provenance, header, rows))
        print(f"wrote {out}")
    return EXIT_OK


def koashi_rows(dims: tuple[int, int, int], trials: int, seed: int, product: bool):
    """Per-trial residuals; every trial draws from its own ``(seed, trial)`` stream."""
    d_a, d_b, d_c = dims
    c_tol = 1e-4 if d_b == 2 else 1e-3
    rows, ok = [], True
    stats = {"kw": 0.0, "c": 0.0, "monogamy": 0.0, "add": 0.0, "ppt": True}
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        spec = random_class_spec(d_a, d_b, d_c, rng, product=product)
        kw = None
        if dims == (2, 2, 2):
            psi = purify_class(spec) if product else haar_state(8, rng)
            kw = koashi_winter_residual(psi)
            stats["kw"] = max(stats["kw"], kw)
        rep = additivity_report(spec, n=2, seed=seed + t)
        c_res = abs(rep.C_numeric - rep.S_A)
        exact = discord_class_n_copies(spec, 2)
        add = abs(rep.D_n_copies_analytic - exact) if exact is not None else abs(
            rep.D_n_copies_analytic - 2 * rep.D_single)
        is_ppt, lo = separability_check_AC(spec)
        stats["c"] = max(stats["c"], c_res)
        stats["monogamy"] = max(stats["monogamy"], rep.residual_eq8)
        stats["add"] = max(stats["add"], add)
        stats["ppt"] = stats["ppt"] and is_ppt
        ok = ok and c_res <= c_tol and is_ppt and add <= 1e-12 and (kw is None or kw <= KW_TOL)
        rows.append([str(t), "" if kw is None else fmt(kw), fmt(c_res), "1" if is_ppt else "0",
                     fmt(lo), fmt(add), fmt(rep.residual_eq8)])
    header = ["trial", "kw_residual", "c_residual", "ppt", "min_pt_eigenvalue",
              "additivity_residual", "monogamy_residual"]
    return header, rows, stats, ok


def cmd_koashi_check(args) -> int:
    dims = tuple(args.dims)
    if any(d < 1 or d > MAX_SUBSYSTEM_DIM for d in dims):
        raise UsageError(f"dimensions must lie in 1..{MAX_SUBSYSTEM_DIM}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if dims[1] < 2:
        raise UsageError("B needs at least two terms")
    header, rows, stats, ok = koashi_rows(dims, args.trials, args.seed, args.product)
    print(f"dims A,B,C = {dims}, trials = {args.trials}, seed = {args.seed}")
    if dims == (2, 2, 2):
        print(f"max Koashi-Winter residual: {stats['kw']:.3e}")
    print(f"max |C_numeric - S(A)|: {stats['c']:.3e}")
    print(f"max monogamy residual (class states): {stats['monogamy']:.3e}")
    print(f"max additivity residual (n=2): {stats['add']:.3e}")
    print(f"all A|C marginals PPT: {stats['ppt']}")
    if args.csv:
        provenance = (f"qdiscord {__version__} koashi-check dims={','.join(map(str, dims))} "
                      f"trials={args.trials} product={'yes' if args.product else 'no'} seed={args.seed}")
        out = _resolve(args.csv, args.output_dir)
        _write(out, _csv_text(provenance, header, rows))
        print(f"wrote {out}")
    if not ok:
        print("invariant violated in at least one trial", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qdiscord", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qdiscord {__version__}")
    p.add_argument("--output-dir", default=None, help="directory for relative output paths")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("discord", help="correlation report for one state")
    d.add_argument("kind", choices=["werner", "bell", "c"])
    d.add_argument("params", nargs="*")
    d.add_argument("--numeric", action="store_true", help="use the measurement optimizer")
    d.set_defaults(func=cmd_discord)

    s = sub.add_parser("sweep", help="correlation curves over the Werner fidelity")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--extended", action="store_true", help="preset range [0, 1] instead of [0.5, 1]")
    s.add_argument("--from", dest="f_min", type=float)
    s.add_argument("--to", dest="f_max", type=float)
    s.add_argument("--step", type=float, default=DEFAULT_STEP)
    s.add_argument("--quantities", default="discord,mutual_information,classical_correlation")
    s.add_argument("--verify", action="store_true", help="add closed-form vs simulation columns")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_sweep)

    u = sub.add_parser("purify", help="iterate purification rounds")
    u.add_argument("--f0", type=float, required=True)
    u.add_argument("--rounds", type=int, required=True)
    u.add_argument("--csv")
    u.set_defaults(func=cmd_purify)

    k = sub.add_parser("koashi-check", help="validate the additive-discord class")
    k.add_argument("--dims", type=int, nargs=3, metavar=("A", "B", "C"), required=True)
    k.add_argument("--trials", type=int, default=200)
    k.add_argument("--seed", type=int, default=DEFAULT_SEED)
    k.add_argument("--csv")
    k.add_argument("--product", action="store_true", help="force lambda = (1, 0, ...)")
    k.set_defaults(func=cmd_koashi_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qdiscord: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
