"""Batch command-line surface.

Subcommands: spectrum | split | blocks | verify.  Reports are emitted as
canonical JSON (or CSV, mirroring the JSON rows flattened) and are
byte-identical for identical configurations, including across thread
counts.  Exit codes: 0 all checks pass, 1 usage or precondition error,
2 exact mathematical check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import CheckFailed, PreconditionError, StructuralError
from .blocks import conformal_block_dim
from .spectra import assemble_W, build_level, dim_tangential_formula
from .suites import SUITES

ENV_THREADS = "CHIRAL_BLOCKS_THREADS"

_DEFAULTS = {
    "k": 0,
    "max_level": None,    # resolved per k: 8 for k=0, 3 otherwise
    "trunc": 3,
    "lam": 0,
    "seed": 42,
    "trials": 100,
    "arithmetic": "exact",
    "out": None,
    "threads": None,
    "suite": "all",
}

_CONFIG_KEYS = {
    "k": int, "max_level": int, "trunc": int, "lambda": int, "seed": int,
    "trials": int, "threads": int, "arithmetic": str, "out": str,
    "suite": str,
}


@dataclass
class RunConfig:
    command: str
    k: int = 0
    max_level: int = 3
    trunc: int = 3
    lam: int = 0
    seed: int = 42
    trials: int = 100
    arithmetic: str = "exact"
    out: str | None = None
    threads: int = 1
    suite: str = "all"


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PreconditionError(
                    f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _CONFIG_KEYS:
                raise PreconditionError(f"{path}:{lineno}: unknown key {key!r}")
            conv = _CONFIG_KEYS[key]
            try:
                val = conv(raw)
            except ValueError as exc:
                raise PreconditionError(f"{path}:{lineno}: {exc}") from exc
            values["lam" if key == "lambda" else key] = val
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiral-blocks",
        description="Exact sphere eigenlevels, chirality splits, block "
                    "dimensions, and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--max-level", dest="max_level", type=int, default=None)
        p.add_argument("--trunc", type=int, default=None)
        p.add_argument("--lambda", dest="lam", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--arithmetic", type=str, default=None,
                       choices=["exact", "exact-with-float-crosscheck"])

    common(sub.add_parser("spectrum", help="eigenlevel table with exact checks"))
    common(sub.add_parser("split", help="chirality split per level"))
    common(sub.add_parser("blocks", help="block dimension report"))
    pv = sub.add_parser("verify", help="seeded exact verification suites")
    common(pv)
    pv.add_argument("--suite", type=str, default=None)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = _parse_config_file(args.config) if args.config else {}
    merged = dict(_DEFAULTS)
    merged.update(file_values)
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if merged["threads"] is None:
        env = os.environ.get(ENV_THREADS)
        merged["threads"] = int(env) if env else 1
    if merged["max_level"] is None:
        merged["max_level"] = 8 if merged["k"] == 0 else 3
    cfg = RunConfig(command=args.command, **merged)
    if cfg.threads < 1:
        raise PreconditionError("threads must be >= 1")
    if cfg.k < 0:
        raise PreconditionError("k must be >= 0")
    if cfg.k not in (0, 1):
        print(f"note: k={cfg.k} is outside the verified range {{0,1}} "
              "(experimental)", file=sys.stderr)
    return cfg


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------

def _fmt_cell(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _rows_to_csv(rows: list[dict]) -> bytes:
    buf = io.StringIO()
    if rows:
        header = list(rows[0].keys())
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(row.get(h, "")) for h in header])
    return buf.getvalue().encode()


def _flatten_for_csv(report: dict) -> list[dict]:
    if "rows" in report:
        return report["rows"]
    flat = {}
    for key, val in report.items():
        if key == "checks":
            for c in val:
                flat[f"check_{c['name']}"] = c["pass"]
        elif isinstance(val, (list, dict)):
            flat[key] = json.dumps(val)
        else:
            flat[key] = val
    return [flat]


def _emit(report: dict, out: str | None) -> None:
    payload = json.dumps(report, indent=2).encode() + b"\n"
    if out is None:
        sys.stdout.write(payload.decode())
        return
    if out.endswith(".csv"):
        data = _rows_to_csv(_flatten_for_csv(report))
    else:
        data = payload
    with open(out, "wb") as fh:
        fh.write(data)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _build_levels(cfg: RunConfig):
    idxs = range(1, cfg.max_level + 1)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(lambda i: build_level(cfg.k, i), idxs))
    return [build_level(cfg.k, i) for i in idxs]


def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.max_level < 1:
        raise PreconditionError("--max-level must be >= 1")
    levels = _build_levels(cfg)
    rows = []
    for lv in levels:
        row = {
            "i": lv.i,
            "lambda": lv.lam,
            "dim": lv.dim,
            "dim_formula_ok": lv.dim == dim_tangential_formula(cfg.k, lv.i),
            "jtilde_square_ok": True,   # certified exactly during construction
        }
        if cfg.arithmetic == "exact-with-float-crosscheck":
            import numpy as np
            G = np.array([[float(v * lv.gram_unit) for v in r]
                          for r in lv.gram_int])
            row["gram_min_eig_float"] = float(np.linalg.eigvalsh(G).min())
        rows.append(row)
    report = {"command": "spectrum", "k": cfg.k, "max_level": cfg.max_level,
              "rows": rows, "all_pass": all(
                  r["dim_formula_ok"] and r["jtilde_square_ok"] for r in rows)}
    _emit(report, cfg.out)
    return 0 if report["all_pass"] else 2


def cmd_split(cfg: RunConfig) -> int:
    if cfg.max_level < 1:
        raise PreconditionError("--max-level must be >= 1")
    wb = assemble_W(cfg.k, cfg.max_level, _build_levels(cfg))
    rows = []
    for lv in wb.levels:
        rows.append({
            "i": lv.i,
            "lambda": lv.lam,
            "dim": lv.dim,
            "dim_chiral": len(lv.chiral_basis),
            "dim_antichiral": len(lv.antichiral_basis),
            "halves_ok": 2 * len(lv.chiral_basis) == lv.dim,
            "cross_gram_zero_ok": True,  # certified exactly by the assembly
        })
    report = {"command": "split", "k": cfg.k, "max_level": cfg.max_level,
              "rows": rows,
              "all_pass": all(r["halves_ok"] for r in rows)}
    _emit(report, cfg.out)
    return 0 if report["all_pass"] else 2


def cmd_blocks(cfg: RunConfig) -> int:
    report = conformal_block_dim(cfg.k, cfg.lam, cfg.max_level, cfg.trunc,
                                 seed=cfg.seed)
    expected = 1 if cfg.lam == 0 else 0
    d = report.to_json_dict()
    d["expected_dim"] = expected
    d["dim_matches"] = report.dim == expected
    _emit(d, cfg.out)
    return 0 if report.dim == expected else 2


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite == "all":
        names = ["stokes", "energy", "projective", "cocycle", "ortho"]
    elif cfg.suite in SUITES:
        names = [cfg.suite]
    else:
        raise PreconditionError(f"unknown suite {cfg.suite!r}")
    rows = [SUITES[name](cfg) for name in names]
    failures = sum(r["failures"] for r in rows)
    report = {"command": "verify", "k": cfg.k, "seed": cfg.seed,
              "rows": rows, "failures": failures}
    _emit(report, cfg.out)
    return 0 if failures == 0 else 2


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "split": cmd_split,
    "blocks": cmd_blocks,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[cfg.command](cfg)
    except (PreconditionError, StructuralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
