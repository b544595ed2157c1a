"""Command-line front end.

Subcommands ``rd``, ``awgn``, ``wz``, ``dpc``, ``mac`` and ``bc`` run a
Monte Carlo experiment and write one row of statistics; ``tables`` prints
the closed-form constants and per-scheme parameters.

Exit codes: 0 on success, 2 on argument or validation errors, 3 when a
search would exceed the cap (``SPARC_SEARCH_CAP``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import theory
from .core import CapacityError, SEARCH_CAP_ENV
from .harness import ExperimentConfig, SCHEMES, config_fields, run_experiment, serialize_stats

# flag dest -> ExperimentConfig field
_CONFIG_KEYS = {
    "n": "n", "M": "M", "L": "L", "mprime": "m_prime", "M2": "M2", "L2": "L2",
    "sigma2": "sigma2", "noise": "noise", "noise2": "noise2", "power": "power",
    "state_var": "state_var", "dist": "dist", "alpha": "alpha", "trials": "trials",
    "seed": "seed", "fixed_codebook": "fixed_codebook", "workers": "workers",
}

_SCHEME_HELP = {
    "rd": "Gaussian source quantization",
    "awgn": "AWGN channel coding",
    "wz": "Wyner-Ziv coding with decoder side information (needs --mprime)",
    "dpc": "dirty-paper coding with encoder-known state (needs --mprime)",
    "mac": "two-user multiple-access channel, corner point",
    "bc": "two-receiver degraded broadcast channel",
}


def _add_model_flags(p):
    S = argparse.SUPPRESS
    p.add_argument("--sigma2", type=float, default=S, help="source variance")
    p.add_argument("--noise", type=float, default=S,
                   help="noise variance (side-information noise for wz, receiver 1 for bc)")
    p.add_argument("--noise2", type=float, default=S, help="receiver 2 noise variance (bc)")
    p.add_argument("--power", type=float, default=S, help="input power constraint")
    p.add_argument("--state-var", dest="state_var", type=float, default=S,
                   help="state variance (dpc)")
    p.add_argument("--dist", type=float, default=S, help="target distortion")
    p.add_argument("--alpha", type=float, default=S,
                   help="Costa parameter (dpc) or user-1 power share (bc)")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="sparc-sim",
        description="Sparse regression code simulations with exact minimum-distance coding.",
        epilog=f"The exhaustive-search cap is read from ${SEARCH_CAP_ENV} (default 1e8).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for scheme in SCHEMES:
        p = sub.add_parser(scheme, help=_SCHEME_HELP[scheme], description=_SCHEME_HELP[scheme])
        p.add_argument("--config", type=Path, default=None,
                       help="JSON file with experiment fields; flags override it")
        _add_model_flags(p)
        p.add_argument("--n", type=int, default=S, help="block length")
        p.add_argument("--M", type=int, default=S, help="columns per section")
        p.add_argument("--L", type=int, default=S, help="sections")
        p.add_argument("--mprime", type=int, default=S, help="subsection width M' (wz, dpc)")
        p.add_argument("--M2", type=int, default=S, help="user-2 columns per section (mac, bc)")
        p.add_argument("--L2", type=int, default=S, help="user-2 sections (mac, bc)")
        p.add_argument("--trials", type=int, default=S, help="Monte Carlo trials")
        p.add_argument("--seed", type=int, default=S, help="master seed")
        p.add_argument("--workers", type=int, default=S, help="worker threads")
        p.add_argument("--fixed-codebook", dest="fixed_codebook", action="store_true",
                       default=S, help="reuse one codebook for every trial")
        p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--bits", action="store_true", help="report rates in bits")
        p.add_argument("--timing", action="store_true", help="fill the wall_ms column")

    t = sub.add_parser("tables", help="closed-form constants and parameter tables")
    _add_model_flags(t)
    t.add_argument("--R1", type=float, default=None, help="rate 1 for region membership")
    t.add_argument("--R2", type=float, default=None, help="rate 2 for region membership")
    t.add_argument("--out", type=Path, default=None)
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--bits", action="store_true", help="report rates in bits")
    return parser


def _load_config(path: Path) -> dict:
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    known = set(config_fields())
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return data


def experiment_config(command: str, args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config is not None:
        values.update(_load_config(args.config))
    for dest, key in _CONFIG_KEYS.items():
        if dest in vars(args):
            values[key] = getattr(args, dest)
    if values.setdefault("scheme", command) != command:
        raise ValueError(f"config scheme {values['scheme']!r} does not match subcommand {command!r}")
    missing = [k for k in ("n", "M", "L") if k not in values]
    if missing:
        raise ValueError(f"missing layout fields: {', '.join('--' + k for k in missing)}")
    return ExperimentConfig(**values)


def _tables(args) -> dict:
    rate = theory.to_bits if args.bits else (lambda r: r)
    get = lambda name, default: getattr(args, name, default)
    sigma2, N, D = get("sigma2", 1.0), get("noise", 1.0), get("dist", None)
    P, sigma_s2 = get("power", 1.0), get("state_var", 1.0)

    out = {"constants": {"x_star": theory.x_star(), "v_star": theory.v_star(),
                         "rate_unit": "bits" if args.bits else "nats"}}
    if D is not None:
        out["rd"] = {"sigma2": sigma2, "D": D, "R_star": rate(theory.rd_rate(sigma2, D))}
        if D < sigma2:
            out["rd"]["R_sp"] = rate(theory.rsp_rate(sigma2, D))
        wz = theory.wz_params(sigma2, N, D)
        out["wz"] = {
            "sigma2": sigma2, "N": N, "D": D, "Var(X|Y)": wz.var_x_given_y, "Q": wz.Q,
            "a": wz.a, "snr": wz.snr, "D*": wz.D_star, "R1_min": rate(wz.R1_min),
            "R2_max": rate(wz.R2_max), "wz_rate": rate(wz.wz_rate),
        }
    alpha = get("alpha", None)
    dpc_alpha = theory.costa_alpha(P, N) if alpha is None else alpha
    dpc = theory.dpc_params(P, N, sigma_s2, dpc_alpha)
    out["awgn"] = {"P": P, "N": N, "capacity": rate(theory.awgn_capacity(P / N)),
                   "b0": theory.b0(P / N)}
    out["dpc"] = {
        "P": P, "N": N, "sigma_s2": sigma_s2, "alpha": dpc_alpha, "kappa": dpc.kappa,
        "snr": dpc.snr, "R1_max": rate(dpc.R1_max), "R2_min": rate(dpc.R2_min),
        "capacity_condition": dpc.corollary_condition,
    }
    c1, c2 = theory.mac_corner(P, N)
    out["mac"] = {"P": P, "N": N, "corner_R1": rate(c1), "corner_R2": rate(c2)}
    N2 = get("noise2", None)
    if N2 is not None:
        bc_alpha = 0.5 if alpha is None else alpha
        b1, b2 = theory.bc_bounds(P, N, N2, bc_alpha)
        out["bc"] = {"P": P, "N1": N, "N2": N2, "alpha": bc_alpha,
                     "R1_max": rate(b1), "R2_max": rate(b2)}
    if args.R1 is not None and args.R2 is not None:
        # region queries take rates in nats
        out["mac"]["contains"] = theory.mac_region_contains(args.R1, args.R2, P, N)
        if "bc" in out:
            out["bc"]["contains"] = theory.bc_region_contains(
                args.R1, args.R2, P, N, N2, out["bc"]["alpha"]
            )
    return out


def _format_tables(table: dict, fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(table, indent=2) + "\n").encode()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["table", "quantity", "value"])
    for name, entries in table.items():
        for key, value in entries.items():
            writer.writerow([name, key, repr(value) if isinstance(value, float) else value])
    return buf.getvalue().encode()


def _emit(data: bytes, out):
    if out is None:
        sys.stdout.write(data.decode())
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "tables":
            data = _format_tables(_tables(args), args.format)
        else:
            config = experiment_config(args.command, args)
            stats = run_experiment(config)
            data = serialize_stats(stats, args.format, bits=args.bits, timing=args.timing)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(data, args.out)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
