"""Batch driver: configure, run, cache, emit, and verify the full pipeline.

Verbs:
  solve    run the pipeline and write tables + metadata to an output directory
  table    re-emit a solved table in json/csv/markdown
  verify   exact cell-by-cell comparison against a reference table file
  expand   dump local solution data at one of the special points (debugging)

Exit codes: 0 success, 1 verification mismatch, 2 configuration error,
3 mathematical inconsistency (rank / integrability / integrality).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from gmpy2 import mpq

from .anomaly import AnomalySolver, GenusSchedule, RingElement, RingError, default_genus_schedule
from .exactarith import format_rational
from .gvbridge import IntegralityError
from .linsolve import InconsistentSystemError, UnderdeterminedSystemError
from .mirrormaps import build_frame
from .picardfuchs import CYModel, FrobeniusError
from .refdata import SIDE_KEYS, load_reference_json, reference_zero_cells
from .series import SeriesError, TruncationError

log = logging.getLogger("mirrorgv")

CACHE_ENV = "MIRRORGV_CACHE"
MATH_ERRORS = (
    RingError,
    FrobeniusError,
    IntegralityError,
    InconsistentSystemError,
    UnderdeterminedSystemError,
    SeriesError,
    TruncationError,
    ArithmeticError,
)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    model: str = "builtin:gr-pf"
    max_genus: int = 5
    q_order: int = 26
    s_order: int | None = None
    max_degree_x: int = 18
    max_degree_z: int = 13
    schedule_path: str | None = None
    cache_dir: str | None = None
    out_dir: str = "out"
    fmt: str = "json"

    def resolved_s_order(self) -> int:
        return self.s_order if self.s_order is not None else 2 * self.max_genus + 10

    def validate(self):
        if not 0 <= self.max_genus <= 5:
            raise ConfigError("--genus must be between 0 and 5")
        if self.q_order < max(self.max_degree_x, self.max_degree_z) + 4:
            raise ConfigError("q-order must be at least the maximal tabulated degree + 4")
        if self.resolved_s_order() < 2 * self.max_genus + 4:
            raise ConfigError("s-order must be at least 2*max_genus + 4")
        if self.fmt not in ("json", "csv", "markdown"):
            raise ConfigError(f"unknown output format {self.fmt!r}")

    def load_model(self) -> CYModel:
        if self.model == "builtin:gr-pf":
            return CYModel.builtin()
        path = Path(self.model)
        if not path.exists():
            raise ConfigError(f"model file {path} not found")
        with open(path) as f:
            return CYModel.from_json(json.load(f))

    def load_schedules(self) -> dict:
        if not self.schedule_path:
            return {}
        path = Path(self.schedule_path)
        if not path.exists():
            raise ConfigError(f"schedule file {path} not found")
        with open(path) as f:
            raw = json.load(f)
        return {int(g): GenusSchedule.from_json(s) for g, s in raw.items()}

    def schedule_hash(self) -> str:
        resolved = {
            g: (self.load_schedules().get(g) or default_genus_schedule(g)).to_json()
            for g in range(2, self.max_genus + 1)
        }
        blob = json.dumps(resolved, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def resolve_cache_dir(self) -> Path | None:
        raw = self.cache_dir or os.environ.get(CACHE_ENV)
        return Path(raw) if raw else None


@dataclass
class ResultBundle:
    config: RunConfig
    gv: dict  # side key -> {(g, d): int}
    gw: dict  # side key -> {(g, d): mpq}
    fg: dict  # genus -> {name: mpq}
    kappa_serialized: dict | None
    metadata: dict
    timings: dict


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def _cache_header(config: RunConfig, model: CYModel) -> dict:
    return {
        "model_hash": model.model_hash(),
        "q_order": config.q_order,
        "s_order": config.resolved_s_order(),
        "schedule_hash": config.schedule_hash(),
    }


def _cache_load(cache_dir: Path, kind: str, genus: int, header: dict):
    path = cache_dir / f"{kind}_g{genus}.json"
    if not path.exists():
        return None
    try:
        with open(path) as f:
            data = json.load(f)
        if data.get("header") != header:
            return None
        return data["payload"]
    except (json.JSONDecodeError, KeyError, OSError):
        return None


def _cache_store(cache_dir: Path, kind: str, genus: int, header: dict, payload):
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{kind}_g{genus}.json"
    with open(path, "w") as f:
        json.dump({"header": header, "payload": payload}, f)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def run_solve(config: RunConfig) -> ResultBundle:
    config.validate()
    model = config.load_model()
    timings = {}
    t0 = time.time()
    solver = AnomalySolver(
        model,
        q_order=config.q_order,
        s_order=config.resolved_s_order(),
        max_genus=config.max_genus,
        max_degree_x=config.max_degree_x,
        max_degree_z=config.max_degree_z,
        schedules=config.load_schedules(),
        zero_cells=reference_zero_cells,
    )
    cache_dir = config.resolve_cache_dir()
    header = _cache_header(config, model)
    if cache_dir:
        for g in range(2, config.max_genus + 1):
            payload = _cache_load(cache_dir, "pg", g, header)
            if payload is not None:
                solver.P[g] = RingElement.deserialize(payload)
                log.info("loaded cached P^(%d)", g)

    t = time.time()
    solver.initialize_low_genus()
    timings["genus_0_1"] = time.time() - t
    for g in range(2, config.max_genus + 1):
        t = time.time()
        solver.solve_genus(g)
        timings[f"genus_{g}"] = time.time() - t
        if cache_dir:
            _cache_store(cache_dir, "pg", g, header, solver.P[g].serialize())
            _cache_store(
                cache_dir,
                "fg",
                g,
                header,
                {name: format_rational(v) for name, v in solver.fg_solution[g].items()},
            )
    timings["total"] = time.time() - t0

    gv = {key: solver.gv_table(key) for key in ("x", "z")}
    gw = {key: solver.gw_table(key) for key in ("x", "z")}
    metadata = {
        "model_hash": model.model_hash(),
        "q_order": config.q_order,
        "s_order": config.resolved_s_order(),
        "max_genus": config.max_genus,
        "max_degree": {"x": config.max_degree_x, "z": config.max_degree_z},
        "schedule_hash": config.schedule_hash(),
        "schedules": {
            g: (config.load_schedules().get(g) or default_genus_schedule(g)).to_json()
            for g in range(2, config.max_genus + 1)
        },
        "greedy_added": {g: solver.systems[g].greedy_added for g in solver.systems},
        "x3_regular": {
            g: all(_is_zero_val(v) for v in vals) for g, vals in solver.x3_reports.items()
        },
        "gap_reports": solver.gap_reports,
        "fg": {g: {k: format_rational(v) for k, v in c.items()} for g, c in solver.fg_solution.items()},
    }
    return ResultBundle(
        config=config,
        gv=gv,
        gw=gw,
        fg=solver.fg_solution,
        kappa_serialized=solver.kappa.serialize() if solver.kappa is not None else None,
        metadata=metadata,
        timings=timings,
    )


def _is_zero_val(v):
    return (v == 0) if isinstance(v, (int, mpq)) else v.is_zero()


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def table_json(bundle_gv: dict, side_key: str, metadata: dict | None = None) -> dict:
    side = SIDE_KEYS[side_key]
    entries = [
        {"g": g, "d": d, "n": str(v)}
        for (g, d), v in sorted(bundle_gv[side_key].items(), key=lambda kv: (kv[0][0], kv[0][1]))
    ]
    return {"side": side, "entries": entries, "metadata": metadata or {}}


def render_table(table: dict, fmt: str) -> str:
    entries = table["entries"]
    genera = sorted({e["g"] for e in entries})
    degrees = sorted({e["d"] for e in entries})
    cell = {(e["g"], e["d"]): e["n"] for e in entries}
    if fmt == "json":
        return json.dumps(table, indent=1, sort_keys=True)
    if fmt == "csv":
        lines = ["d," + ",".join(f"g={g}" for g in genera)]
        for d in degrees:
            lines.append(str(d) + "," + ",".join(cell.get((g, d), "") for g in genera))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        cols = ["d"] + [f"g={g}" for g in genera]
        header = "| " + " | ".join(cols) + " |"
        sep = "|" + "---|" * len(cols)
        lines = [header, sep]
        for d in degrees:
            lines.append(
                "| " + str(d) + " | " + " | ".join(cell.get((g, d), "") for g in genera) + " |"
            )
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def write_bundle(bundle: ResultBundle, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = dict(bundle.metadata)
    for side_key, name in (("x", "table_x"), ("z", "table_xprime")):
        table = table_json(bundle.gv, side_key, {"model_hash": meta["model_hash"]})
        (out_dir / f"{name}.json").write_text(render_table(table, "json") + "\n")
        if bundle.config.fmt != "json":
            ext = "csv" if bundle.config.fmt == "csv" else "md"
            (out_dir / f"{name}.{ext}").write_text(render_table(table, bundle.config.fmt))
    gw_out = {
        side: {f"{g},{d}": format_rational(v) for (g, d), v in tab.items()}
        for side, tab in bundle.gw.items()
    }
    (out_dir / "gw_potentials.json").write_text(json.dumps(gw_out, indent=1, sort_keys=True) + "\n")
    if bundle.kappa_serialized is not None:
        meta["k_U_squared"] = bundle.kappa_serialized
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=1, sort_keys=True, default=str) + "\n")
    (out_dir / "timings.json").write_text(json.dumps(bundle.timings, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def verify_tables(computed: dict, reference: dict) -> dict:
    """Exact cell comparison.  Cells present only in `computed` are reported
    as uncovered, not as failures."""
    comp = {(e["g"], e["d"]): e["n"] for e in computed["entries"]}
    ref = {(e["g"], e["d"]): e["n"] for e in reference["entries"]}
    mismatches = []
    for key, val in sorted(ref.items()):
        if key in comp and comp[key] != val:
            mismatches.append(
                {"g": key[0], "d": key[1], "expected": val, "got": comp[key]}
            )
    missing = sorted(k for k in ref if k not in comp)
    uncovered = sorted(k for k in comp if k not in ref)
    return {
        "side": reference.get("side"),
        "cells_checked": len([k for k in ref if k in comp]),
        "mismatches": mismatches,
        "missing": [{"g": g, "d": d} for g, d in missing],
        "uncovered": [{"g": g, "d": d} for g, d in uncovered],
    }


# ---------------------------------------------------------------------------
# expand (debugging surface)
# ---------------------------------------------------------------------------

def expand_point(model: CYModel, point: str, order: int) -> dict:
    key = {"x0": "x", "z0": "z", "conifold": "conifold", "x3": "x3"}[point]
    fr = build_frame(model, key if key in ("conifold", "x3") else key, order)
    out = {
        "point": point,
        "order": order,
        "w0": fr.w0.serialize(),
        "A1": fr.A1.serialize(),
        "B1": fr.B[0].serialize(),
    }
    if fr.coord is not None:
        out["flat_coordinate_series"] = fr.coord.serialize()
    return out


# ---------------------------------------------------------------------------
# CLI plumbing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--model", default="builtin:gr-pf", help="model JSON path or builtin:gr-pf")
    p.add_argument("--genus", type=int, default=5, dest="max_genus")
    p.add_argument("--order-q", type=int, default=26, dest="q_order")
    p.add_argument("--order-s", type=int, default=None, dest="s_order")
    p.add_argument("--max-degree-x", type=int, default=18)
    p.add_argument("--max-degree-z", type=int, default=13)
    p.add_argument("--schedule", default=None, dest="schedule_path")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default="out", dest="out_dir")
    p.add_argument("--format", default="json", dest="fmt", choices=["json", "csv", "markdown"])


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        model=args.model,
        max_genus=args.max_genus,
        q_order=args.q_order,
        s_order=args.s_order,
        max_degree_x=args.max_degree_x,
        max_degree_z=args.max_degree_z,
        schedule_path=args.schedule_path,
        cache_dir=args.cache_dir,
        out_dir=args.out_dir,
        fmt=args.fmt,
    )


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    parser = argparse.ArgumentParser(prog="mirrorgv", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_solve = sub.add_parser("solve", help="run the full pipeline")
    _add_common(p_solve)

    p_table = sub.add_parser("table", help="re-emit a solved table")
    p_table.add_argument("--bundle", required=True, help="output directory of a solve run")
    p_table.add_argument("--side", choices=["x", "z"], default="x")
    p_table.add_argument("--format", default="markdown", dest="fmt", choices=["json", "csv", "markdown"])

    p_verify = sub.add_parser("verify", help="compare a solved table against a reference")
    p_verify.add_argument("--bundle", required=True, help="output directory of a solve run")
    p_verify.add_argument("--reference", default=None, help="reference table JSON (default: shipped tables)")
    p_verify.add_argument("--side", choices=["x", "z", "both"], default="both")

    p_expand = sub.add_parser("expand", help="dump local series data at a special point")
    p_expand.add_argument("--point", choices=["x0", "z0", "conifold", "x3"], required=True)
    p_expand.add_argument("--order", type=int, default=10)
    p_expand.add_argument("--model", default="builtin:gr-pf")

    args = parser.parse_args(argv)
    try:
        if args.verb == "solve":
            config = _config_from_args(args)
            bundle = run_solve(config)
            write_bundle(bundle, Path(config.out_dir))
            log.info("solve finished; outputs in %s", config.out_dir)
            return 0
        if args.verb == "table":
            path = Path(args.bundle) / ("table_x.json" if args.side == "x" else "table_xprime.json")
            if not path.exists():
                raise ConfigError(f"no solved table at {path}")
            table = json.loads(path.read_text())
            sys.stdout.write(render_table(table, args.fmt))
            return 0
        if args.verb == "verify":
            sides = ["x", "z"] if args.side == "both" else [args.side]
            any_mismatch = False
            for side in sides:
                path = Path(args.bundle) / ("table_x.json" if side == "x" else "table_xprime.json")
                if not path.exists():
                    raise ConfigError(f"no solved table at {path}")
                try:
                    computed = json.loads(path.read_text())
                    if args.reference:
                        reference = json.loads(Path(args.reference).read_text())
                    else:
                        reference = load_reference_json(SIDE_KEYS[side])
                    report = verify_tables(computed, reference)
                except (json.JSONDecodeError, KeyError, TypeError) as err:
                    raise ConfigError(f"malformed table or reference file: {err}") from err
                print(json.dumps(report, indent=1))
                if report["mismatches"]:
                    any_mismatch = True
            return 1 if any_mismatch else 0
        if args.verb == "expand":
            if args.model == "builtin:gr-pf":
                model = CYModel.builtin()
            else:
                with open(args.model) as f:
                    model = CYModel.from_json(json.load(f))
            print(json.dumps(expand_point(model, args.point, args.order), indent=1, default=str))
            return 0
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except MATH_ERRORS as err:
        print(f"mathematical inconsistency: {err}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
