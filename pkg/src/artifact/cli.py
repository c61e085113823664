"""Command-line entry points: spectra, form factors, scaling sweeps, verification.

Every command writes one row per (state, method) as CSV or JSON.  Floats are
printed with 17 significant digits so that output round-trips losslessly and
identical arguments give byte-identical files.

Exit codes: 0 success, 1 computation or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from collections.abc import Sequence

import numpy as np

from . import acceptance, bethe, formfactor, oracle, specfun, thermo

ORACLE_MAX_M = 12
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Arguments that fail validation before any computation starts."""


# --- formatting ---------------------------------------------------------------------


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{x:.17g}"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def to_json(v) -> str:
    """JSON text with floats at 17 significant digits (non-finite -> null)."""
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return format_float(x) if math.isfinite(x) else "null"
    if isinstance(v, complex):
        return to_json({"re": v.real, "im": v.imag})
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(x) for x in v) + "]"
    return json.dumps(str(v))


def render(rows: list[dict], fmt: str, command: str) -> str:
    if fmt == "json":
        return to_json({"command": command, "rows": rows}) + "\n"
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# --- argument parsing -----------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if not out:
        raise UsageError("empty size list")
    for M in out:
        if M < 2 or M % 2:
            raise UsageError(f"chain length must be even and >= 2, got {M}")
    return out


def _float_list(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _roots_cell(state: bethe.BetheState) -> list[str]:
    return [f"{format_float(z.real)}{'+' if z.imag >= 0 else '-'}{format_float(abs(z.imag))}j" for z in state.roots]


def _momentum_index(P: float, M: int) -> int:
    return int(np.rint(P * M / (2 * np.pi))) % M


# --- spectrum -----------------------------------------------------------------------


def _sector_list(text: str, M: int) -> list[float]:
    if text == "all":
        return [float(s) for s in range(M // 2 + 1)]
    vals = _float_list(text) or []
    for s in vals:
        if s < 0 or s > M / 2 or (2 * s) % 2:
            raise UsageError(f"spin sector {s} not available for M = {M}")
    return vals


def _bethe_rows(M: int, states: list[bethe.BetheState], with_oracle: bool) -> list[dict]:
    rows = []
    by_s: dict[float, list[int]] = {}
    for i, st in enumerate(states):
        by_s.setdefault(st.s, []).append(i)
    matches: dict[int, tuple[int | None, float]] = {}
    if with_oracle:
        for s, idx in by_s.items():
            sub = [states[i] for i in idx]
            hit, gaps = acceptance.match_oracle_levels(M, sub, s)
            for i, h, g in zip(idx, hit, gaps):
                matches[i] = (h, g)
    for i, st in enumerate(states):
        E, P = bethe.energy_momentum(st)
        h, g = matches.get(i, (None, None))
        rows.append({
            "M": M,
            "method": "bethe",
            "s": st.s,
            "E": E,
            "P": P,
            "k": _momentum_index(P, M),
            "multiplicity": int(2 * st.s + 1),
            "quantum_numbers": list(st.quantum_numbers.values),
            "roots": _roots_cell(st),
            "holes": list(st.holes),
            "residual": st.residual,
            "oracle_level": h,
            "dE": g if g is not None and math.isfinite(g) else None,
        })
    return rows


def _oracle_rows(M: int, sectors: Sequence[float]) -> list[dict]:
    rows = []
    for s in sectors:
        d = oracle.diagonalize_cached(M, s)
        for i in np.flatnonzero(d.spins == s):
            rows.append({
                "M": M,
                "method": "exact-diag",
                "s": float(s),
                "E": float(d.eigenvalues[i]),
                "P": d.momentum(int(i)),
                "k": int(d.momenta[i]) % M,
                "multiplicity": int(2 * s + 1),
                "oracle_level": int(i),
            })
    return rows


def cmd_spectrum(args) -> tuple[list[dict], int]:
    sizes = _int_list(args.M)
    holes = _float_list(args.holes)
    rows: list[dict] = []
    for M in sizes:
        chain = bethe.ChainSpec(M)
        with_oracle = M <= ORACLE_MAX_M and not args.no_oracle
        if holes is not None:
            # one real-root state: the window of spin n_h/2 minus the given holes
            if len(holes) % 2:
                raise UsageError("the number of holes must be even")
            s = len(holes) / 2
            window = [float(w) for w in bethe.quantum_number_window(M, s)]
            if any(min(abs(w - h) for w in window) > 1e-9 for h in holes):
                raise UsageError(f"hole quantum numbers {holes} not in the window {window}")
            q = tuple(w for w in window if min(abs(w - h) for h in holes) > 1e-9) if holes else tuple(window)
            if holes:
                state = bethe.solve_real_roots(chain, bethe.QuantumNumberSet(q))
            else:
                state = bethe.solve_real_roots(chain, bethe.ground_state_quantum_numbers(chain))
            rows += _bethe_rows(M, [state], with_oracle)
            continue
        sectors = _sector_list(args.sectors, M)
        states = []
        for s in sectors:
            states += bethe.enumerate_states(chain, s, max_pairs=0 if args.real_only else 1)
        rows += _bethe_rows(M, states, with_oracle)
        if with_oracle:
            rows += _oracle_rows(M, sectors)
    return rows, EXIT_OK


# --- form factors -------------------------------------------------------------------


def _rel_gap(a: float, ref: float) -> float | None:
    return abs(a - ref) / ref if ref > 1e-10 else None


def _thermo_rows(holes: Sequence[float]) -> list[dict]:
    if len(holes) != 2:
        raise UsageError("the thermodynamic closed form needs exactly two hole rapidities")
    th1, th2 = sorted(holes)
    closed = thermo.two_spinon_ff_thermo(th1, th2, 1).value
    nu = th2 - th1
    if nu == 0:
        integral = 0.0
    else:
        integral = 2 * math.exp(-specfun.two_spinon_I(nu))
    base = {"theta1": th1, "theta2": th2, "quantity": "M2F2"}
    return [
        {**base, "method": "thermo-2spinon", "value": closed, "rel_gap": _rel_gap(closed, integral) if nu else None},
        {**base, "method": "integral-I", "value": integral, "rel_gap": _rel_gap(integral, closed) if nu else None},
    ]


def cmd_formfactor(args) -> tuple[list[dict], int]:
    if args.spinons % 2:
        raise UsageError(f"odd spinon count {args.spinons}: spinons are created in pairs")
    holes = _float_list(args.holes)
    if args.M is None:
        if not args.thermo:
            raise UsageError("give --M for finite chains or --thermo --holes for the closed form")
        if holes is None:
            raise UsageError("--thermo needs --holes theta1,theta2")
        if args.spinons != 2:
            raise UsageError("the closed form is available for two spinons only")
        return _thermo_rows(holes), EXIT_OK
    M = args.M
    if M < 4 or M % 2:
        raise UsageError("M must be even and >= 4")
    if args.compare == "oracle" and M > ORACLE_MAX_M:
        raise UsageError(f"oracle comparison is limited to M <= {ORACLE_MAX_M}")
    chain = bethe.ChainSpec(M)
    ground = bethe.solve_real_roots(chain, bethe.ground_state_quantum_numbers(chain))
    states = [st for st in bethe.enumerate_states(chain, 1) if len(st.holes) == args.spinons]
    if not states:
        raise UsageError(f"no spin-1 states with {args.spinons} spinons at M = {M}")
    vals = [formfactor.longitudinal_ff_finite(ground, st).value for st in states]
    keys = []
    group_sum: dict[tuple[int, int], float] = {}
    for st, v in zip(states, vals):
        E, P = bethe.energy_momentum(st)
        key = (int(np.rint(E * 1e8)), _momentum_index(P, M))
        keys.append(key)
        group_sum[key] = group_sum.get(key, 0.0) + v
    rows: list[dict] = []
    worst = 0.0
    for st, v, key in zip(states, vals, keys):
        E, P = bethe.energy_momentum(st)
        base = {
            "M": M,
            "E": E,
            "k": key[1],
            "quantum_numbers": list(st.quantum_numbers.values),
            "holes": list(st.holes),
            "close_pairs": len(st.close_pairs),
        }
        ref = None
        if args.compare == "oracle":
            # degenerate levels are compared as sums over the (E, k) group
            ref = acceptance.oracle_triplet_ff(M, E, key[1])
        gap = _rel_gap(group_sum[key], ref) if ref is not None else None
        if gap is not None:
            worst = max(worst, gap)
        rows.append({**base, "method": "finite-determinant", "value": v, "group_value": group_sum[key],
                     "rel_gap": gap, "abs_gap": abs(group_sum[key] - ref) if ref is not None else None})
        if ref is not None:
            rows.append({**base, "method": "exact-diag", "value": None, "group_value": ref,
                         "rel_gap": gap, "abs_gap": abs(group_sum[key] - ref)})
        if args.thermo and len(st.holes) == 2:
            t = thermo.two_spinon_ff_thermo(st.holes[0], st.holes[1], M).value
            rows.append({**base, "method": "thermo-2spinon", "value": t, "group_value": None,
                         "rel_gap": _rel_gap(v, t), "abs_gap": abs(v - t)})
    if args.compare == "oracle":
        print(f"max relative gap {format_float(worst)}", file=sys.stderr)
    return rows, EXIT_OK


# --- scaling ------------------------------------------------------------------------


def cmd_scaling(args) -> tuple[list[dict], int]:
    sizes = _int_list(args.M)
    if sizes != sorted(set(sizes)):
        raise UsageError("the M list must be strictly ascending")
    holes = _float_list(args.holes)
    if holes is None or len(holes) != 2:
        raise UsageError("scaling needs exactly two hole rapidities, e.g. --holes -0.4,0.4")
    rows = []
    for M in sizes:
        try:
            ground, exc = acceptance.two_spinon_state(M, holes)
        except (bethe.BetheError, ValueError) as exc_info:
            window = bethe.quantum_number_window(M, 1)
            near = [float(window[np.argmin(np.abs(window - bethe._thermo_hole_number(h, M)))]) for h in holes]
            raise RuntimeError(f"holes {holes} not realizable at M = {M} (nearest quantum numbers {near}): {exc_info}") from exc_info
        fin = formfactor.longitudinal_ff_finite(ground, exc).value * M * M
        th = exc.holes
        ref = thermo.two_spinon_ff_thermo(th[0], th[1], 1).value
        gap = abs(fin - ref) / ref
        base = {"M": M, "theta1": th[0], "theta2": th[1], "quantity": "M2F2"}
        rows.append({**base, "method": "finite-determinant", "value": fin, "rel_gap": gap})
        rows.append({**base, "method": "thermo-2spinon", "value": ref, "rel_gap": gap})
    return rows, EXIT_OK


# --- verify -------------------------------------------------------------------------


def cmd_verify(args) -> tuple[dict, int]:
    if args.only is not None:
        valid = {m for _, m in acceptance.CRITERIA.values()} | {str(k) for k in acceptance.CRITERIA}
        if args.only not in valid:
            raise UsageError(f"--only must be one of {sorted(valid)}")
    results = acceptance.run(args.only, seed=args.seed)
    for r in results:
        print(r.line())
    report = {
        "seed": args.seed,
        "only": args.only,
        "passed": all(r.passed for r in results),
        "checks": [{k: v for k, v in r.as_dict().items() if k != "seconds"} for r in results],
    }
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


# --- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Heisenberg chain spectra and form factors.")
    p.add_argument("--cache-dir", help=f"directory for exact-diagonalization caches (overrides ${oracle.CACHE_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = sub.add_parser("spectrum", help="Bethe states and exact-diagonalization levels")
    sp.add_argument("--M", required=True, help="comma-separated even chain lengths")
    sp.add_argument("--sectors", default="0", help="'all' or comma-separated spins (default 0)")
    sp.add_argument("--holes", help="hole quantum numbers of one real-root state; empty for the ground state")
    sp.add_argument("--real-only", action="store_true", help="skip close-pair states")
    sp.add_argument("--no-oracle", action="store_true", help="skip exact diagonalization")
    common(sp)

    sp = sub.add_parser("formfactor", help="longitudinal form factors")
    sp.add_argument("--M", type=int, help="chain length")
    sp.add_argument("--spinons", type=int, default=2, help="number of spinons (even)")
    sp.add_argument("--compare", choices=("oracle",), help="add exact-diagonalization rows")
    sp.add_argument("--thermo", action="store_true", help="add the two-spinon closed form")
    sp.add_argument("--holes", help="hole rapidities for --thermo without --M")
    common(sp)

    sp = sub.add_parser("scaling", help="finite-size sweep of M^2 |F|^2 toward the closed form")
    sp.add_argument("--M", required=True, help="ascending comma-separated chain lengths")
    sp.add_argument("--holes", required=True, help="two hole rapidities")
    common(sp)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--only", help="module name or criterion number")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report", help="write a JSON report here")
    return p


COMMANDS = {"spectrum": cmd_spectrum, "formfactor": cmd_formfactor, "scaling": cmd_scaling}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.cache_dir:
        os.environ[oracle.CACHE_ENV] = args.cache_dir
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if args.command == "verify":
                report, code = cmd_verify(args)
                if args.report:
                    _emit(to_json(report) + "\n", args.report)
                return code
            rows, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (bethe.BetheError, oracle.SizeCapError, RuntimeError, ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(render(rows, args.format, args.command), args.output)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
