"""Command-line frontend: run the pipeline with reproducible configuration.

Commands
    analyze      monodromy -> group diagnostics -> (scalings if --graded)
                 -> interpolation -> verification
    monodromy    fiber discovery and group diagnostics only
    scalings     + scaling detection and the probability-one filter
    interpolate  like analyze (kept as a distinct entry point for scripting)
    verify       check user-supplied formulas against freshly tracked fibers

Reports are JSON (versioned schema, deterministic key order) plus a text
rendering on stdout.  Exit codes: 0 success, 1 stage failure (a partial
report naming the failing stage is still written), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fixtures, interp, monodromy, permgrp, scaling
from .expr import (
    ParseError,
    System,
    format_complex,
    format_rational,
    parse_deck_formulas,
    parse_seed_pair,
    parse_system,
)
from .monodromy import MonodromyConfig, MonodromyError, MonodromyResult
from .tracker import TrackerConfig

SCHEMA_VERSION = 1
GROUP_ORDER_CAP = 10**6


@dataclass
class RunConfig:
    command: str
    system_path: str
    seed_path: str | None = None
    formulas_path: str | None = None
    rng_seed: int = 0
    degree_bound: int = 3
    parameter_dependent: bool = False
    graded: bool = False
    expected_degree: int | None = None
    threads: int = 1
    out_path: str | None = None
    tol_newton: float = 1e-10
    tol_path: float = 1e-8
    tol_rank: float = 1e-8
    tol_truncate: float = 1e-5
    verify_trials: int = 5

    def __post_init__(self):
        if self.degree_bound < 1:
            raise ValueError("degree bound must be >= 1")

    def tracker_config(self) -> TrackerConfig:
        return TrackerConfig(newton_tol=self.tol_newton, path_tol=self.tol_path)

    def monodromy_config(self) -> MonodromyConfig:
        return MonodromyConfig(
            expected_degree=self.expected_degree,
            tracker=self.tracker_config(),
            workers=self.threads,
        )


class StageFailure(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def _resolve_system(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    try:
        return fixtures.fixture_path(path)
    except FileNotFoundError:
        raise StageFailure("input", f"system file or fixture {path!r} not found")


def _jsonify(value):
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


class Pipeline:
    """Runs the stages requested by one CLI invocation and collects the report."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.report: dict = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg.command,
            "config": {
                "system": cfg.system_path,
                "seed_pair": cfg.seed_path,
                "rng_seed": cfg.rng_seed,
                "degree_bound": cfg.degree_bound,
                "parameter_dependent": cfg.parameter_dependent,
                "graded": cfg.graded,
                "expected_degree": cfg.expected_degree,
                "threads": cfg.threads,
                "tolerances": {
                    "newton": cfg.tol_newton,
                    "path": cfg.tol_path,
                    "rank": cfg.tol_rank,
                    "truncate": cfg.tol_truncate,
                },
            },
            "timings": {},
            "status": "ok",
        }
        self.system: System | None = None
        self.mono: MonodromyResult | None = None
        self.deck_perms: list = []
        self.lattice = None
        self.decks: list = []

    def _stage(self, name, fn):
        start = time.perf_counter()
        try:
            fn()
        except StageFailure:
            raise
        except (MonodromyError, ParseError, ValueError, RuntimeError) as exc:
            raise StageFailure(name, str(exc))
        finally:
            self.report["timings"][name] = round(time.perf_counter() - start, 6)

    # -- stages ----------------------------------------------------------

    def load(self):
        path = _resolve_system(self.cfg.system_path)
        try:
            self.system = parse_system(path.read_text())
        except ParseError as exc:
            raise StageFailure("input", f"{path}: {exc}")
        self.report["system"] = {
            "unknowns": list(self.system.unknowns),
            "parameters": list(self.system.parameters),
            "equations": len(self.system.equations),
            "patch_equations": len(self.system.patch_indices),
        }

    def seed(self) -> tuple[np.ndarray, np.ndarray]:
        if self.cfg.seed_path:
            seed_file = Path(self.cfg.seed_path)
            if not seed_file.exists():
                candidate = fixtures.seed_path(self.cfg.seed_path.removesuffix(".seed"))
                if candidate.exists():
                    seed_file = candidate
                else:
                    raise StageFailure("input", f"seed file {self.cfg.seed_path!r} not found")
            x, p = parse_seed_pair(seed_file.read_text())
            if len(x) != self.system.n or len(p) != self.system.m:
                raise StageFailure("input", "seed pair dimensions do not match the system")
            return x, p
        return monodromy.seed_from_linear_params(self.system, "random", self.rng)

    def run_monodromy(self):
        pair = self.seed()
        self.mono = monodromy.run_monodromy(
            self.system, pair, self.cfg.monodromy_config(), self.rng
        )
        base = self.mono.base
        self.report["fiber"] = {
            "params": [format_complex(z) for z in base.params],
            "solutions": [[format_complex(z) for z in sol] for sol in base.solutions],
        }
        self.report["monodromy"] = {
            "degree": self.mono.degree,
            "loop_count": self.mono.loop_count,
            "generators_cycles": [permgrp.cycles_string(g) for g in self.mono.permutations],
            "generators_images": [list(g) for g in self.mono.permutations],
        }

    def group_diagnostics(self):
        group = self.mono.group()
        transitive = permgrp.is_transitive(group)
        order = permgrp.group_order_capped(group, GROUP_ORDER_CAP)
        entry = {
            "transitive": transitive,
            "order": order,
            "order_cap": GROUP_ORDER_CAP,
        }
        if transitive:
            systems = permgrp.minimal_block_systems(group)
            entry["block_systems"] = [
                sorted(sorted(b) for b in part) for part in systems
            ]
            entry["decomposable"] = bool(systems)
            cent = permgrp.centralizer_in_symmetric(group)
            self.deck_perms = [p for p in cent if p != permgrp.identity(group.degree)]
            entry["centralizer_cycles"] = [permgrp.cycles_string(c) for c in cent]
            entry["centralizer_images"] = [list(c) for c in cent]
            entry["centralizer_order"] = len(cent)
            entry["deck_group"] = permgrp.describe_group(cent)
            if len(cent) == 1:
                entry["deck_note"] = "no nontrivial deck transformations"
        else:
            entry["note"] = "monodromy group not transitive; exploration incomplete"
        self.report["group"] = entry

    def run_scaling(self):
        lattice = scaling.detect_scalings(self.system)
        entry = {
            "free_rows": [list(r) for r in lattice.free.data],
            "free_rank": lattice.free_rank,
            "torsion_blocks": [
                {"modulus": b.modulus, "rows": [list(r) for r in b.rows.data]}
                for b in lattice.torsion
            ],
        }
        if lattice.torsion and self.mono is not None:
            filt = scaling.commuting_discrete_scalings(
                lattice,
                self.system,
                self.mono,
                self.deck_perms,
                self.cfg.tracker_config(),
                self.rng,
            )
            self.lattice = filt.lattice
            entry["commuting_blocks"] = [
                {"modulus": b.modulus, "rows": [list(r) for r in b.rows.data]}
                for b in filt.lattice.torsion
            ]
            entry["commuting_ranks"] = [
                {"modulus": b.modulus, "rank": b.rank} for b in filt.lattice.torsion
            ]
            entry["candidates"] = [
                {"modulus": c.modulus, "vector": list(c.vector), "status": c.status}
                for c in filt.candidates
            ]
            entry["enumeration_truncated"] = filt.enumeration_truncated
            if filt.composite_modulus_note:
                entry["composite_modulus_note"] = (
                    "composite modulus: only original passing rows kept"
                )
        else:
            self.lattice = lattice
        self.report["scaling"] = entry

    def run_interpolation(self):
        if not self.deck_perms:
            self.report["deck_maps"] = []
            self.report["interpolation"] = {
                "skipped": "no nontrivial deck transformations"
            }
            return
        cfg = self.cfg.monodromy_config()
        common = dict(
            rank_tol=self.cfg.tol_rank, truncate_tol=self.cfg.tol_truncate
        )
        if self.cfg.graded:
            if self.lattice is None:
                raise StageFailure("interpolation", "scaling stage did not run")
            self.decks, stats = interp.interpolate_graded(
                self.system,
                self.mono,
                self.deck_perms,
                self.lattice,
                self.cfg.degree_bound,
                self.cfg.parameter_dependent,
                cfg,
                self.rng,
                **common,
            )
        else:
            self.decks, stats = interp.interpolate_dense(
                self.system,
                self.mono,
                self.deck_perms,
                self.cfg.degree_bound,
                self.cfg.parameter_dependent,
                cfg,
                self.rng,
                **common,
            )
        self.report["interpolation"] = {
            "graded": stats.graded,
            "parameter_dependent": stats.parameter_dependent,
            "largest_vandermonde": stats.largest_vandermonde,
            "subproblems": stats.subproblems,
            "class_count": stats.class_count,
            "largest_class": stats.largest_class,
        }
        self.report["deck_maps"] = [self._deck_entry(d) for d in self.decks]

    def _deck_entry(self, deck: interp.DeckMap) -> dict:
        names = self.system.names
        return {
            "permutation_cycles": permgrp.cycles_string(deck.permutation),
            "permutation_images": list(deck.permutation),
            "degree_bound_used": deck.degree_bound_used,
            "coordinates": {
                self.system.unknowns[j]: (
                    format_rational(c, names) if c is not None else None
                )
                for j, c in enumerate(deck.coords)
            },
            "missing_coordinates": [self.system.unknowns[j] for j in deck.missing()],
        }

    def run_verification(self):
        if not self.decks:
            self.report["verification"] = []
            return
        cfg = self.cfg.monodromy_config()
        out = []
        all_ok = True
        for deck in self.decks:
            if all(c is None for c in deck.coords):
                out.append(
                    {
                        "permutation_cycles": permgrp.cycles_string(deck.permutation),
                        "skipped": "no interpolated coordinates",
                    }
                )
                continue
            rep = interp.verify_deck(
                self.system,
                deck,
                self.mono,
                self.cfg.verify_trials,
                cfg,
                self.rng,
                lattice=self.lattice,
            )
            all_ok = all_ok and rep.passed
            out.append(
                {
                    "permutation_cycles": permgrp.cycles_string(deck.permutation),
                    "pairing_ok": rep.pairing_ok,
                    "fiber_preservation_ok": rep.fiber_ok,
                    "quasi_homogeneity_ok": rep.quasi_ok,
                    "worst_pairing": rep.worst_pairing,
                    "worst_fiber_residual": rep.worst_fiber_residual,
                    "worst_quasi_homogeneity": rep.worst_quasi,
                    "trials": rep.trials,
                }
            )
        self.report["verification"] = out
        if not all_ok:
            raise StageFailure("verification", "an interpolated formula failed re-validation")

    def run_verify_formulas(self):
        path = Path(self.cfg.formulas_path)
        if not path.exists():
            raise StageFailure("input", f"formulas file {path} not found")
        try:
            formulas = parse_deck_formulas(path.read_text(), self.system)
        except ParseError as exc:
            raise StageFailure("input", str(exc))
        perm, coords = interp.derive_deck_permutation(self.system, formulas, self.mono.base)
        deck = interp.DeckMap(perm, coords, self.cfg.degree_bound)
        rep = interp.verify_deck(
            self.system,
            deck,
            self.mono,
            self.cfg.verify_trials,
            self.cfg.monodromy_config(),
            self.rng,
            lattice=self.lattice,
        )
        self.report["verification"] = [
            {
                "permutation_cycles": permgrp.cycles_string(perm),
                "pairing_ok": rep.pairing_ok,
                "fiber_preservation_ok": rep.fiber_ok,
                "quasi_homogeneity_ok": rep.quasi_ok,
                "worst_pairing": rep.worst_pairing,
                "worst_fiber_residual": rep.worst_fiber_residual,
                "trials": rep.trials,
            }
        ]
        if not rep.passed:
            raise StageFailure("verification", "supplied formulas failed verification")

    # -- driver -----------------------------------------------------------

    def run(self) -> int:
        command = self.cfg.command
        try:
            self._stage("input", self.load)
            self._stage("monodromy", self.run_monodromy)
            self._stage("group", self.group_diagnostics)
            if command == "scalings" or (
                command in ("analyze", "interpolate") and self.cfg.graded
            ):
                self._stage("scaling", self.run_scaling)
            if command in ("analyze", "interpolate"):
                self._stage("interpolation", self.run_interpolation)
                self._stage("verification", self.run_verification)
            if command == "verify":
                self._stage("verify", self.run_verify_formulas)
        except StageFailure as exc:
            self.report["status"] = "failed"
            self.report["failed_stage"] = exc.stage
            self.report["error"] = str(exc)
            return 2 if exc.stage == "input" else 1
        return 0


def render_text(report: dict) -> str:
    lines = [f"decksym {report['command']} (status: {report['status']})"]
    if "system" in report:
        s = report["system"]
        lines.append(
            f"  system: {len(s['unknowns'])} unknowns, {len(s['parameters'])} parameters, "
            f"{s['equations']} equations ({s['patch_equations']} patch)"
        )
    if "monodromy" in report:
        m = report["monodromy"]
        lines.append(
            f"  fiber: {m['degree']} solutions after {m['loop_count']} loops; "
            f"{len(m['generators_cycles'])} permutations"
        )
    if "group" in report:
        g = report["group"]
        order = g.get("order")
        lines.append(
            "  group: "
            + ("transitive, " if g.get("transitive") else "NOT transitive, ")
            + (f"order {order}" if order is not None else f"order > {g['order_cap']}")
            + (", decomposable" if g.get("decomposable") else "")
        )
        if "centralizer_order" in g:
            lines.append(
                f"  deck action: centralizer order {g['centralizer_order']} "
                f"({g.get('deck_group', '?')})"
            )
            if g.get("deck_note"):
                lines.append(f"    {g['deck_note']}")
    if "scaling" in report:
        sc = report["scaling"]
        tor = ", ".join(
            f"Z{b['modulus']}^{len(b['rows'])}" for b in sc.get("commuting_blocks", [])
        )
        lines.append(
            f"  scalings: free rank {sc['free_rank']}"
            + (f", commuting discrete {tor}" if tor else "")
        )
    for deck in report.get("deck_maps", []):
        lines.append(f"  deck {deck['permutation_cycles']}:")
        for name, formula in deck["coordinates"].items():
            lines.append(f"    {name} -> {formula if formula is not None else '(missing)'}")
    for v in report.get("verification", []):
        if "skipped" in v:
            lines.append(f"  verification {v['permutation_cycles']}: {v['skipped']}")
        else:
            ok = v["pairing_ok"] and v.get("fiber_preservation_ok") in (True, None)
            lines.append(
                f"  verification {v['permutation_cycles']}: "
                + ("PASS" if ok else "FAIL")
                + f" (worst pairing {v['worst_pairing']:.2e})"
            )
    if report["status"] == "failed":
        lines.append(f"  FAILED at stage {report['failed_stage']}: {report['error']}")
    if "timings" in report:
        total = sum(report["timings"].values())
        lines.append(f"  total time: {total:.2f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decksym",
        description="Recover hidden symmetries of parametric polynomial systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "monodromy", "scalings", "interpolate", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--system", required=True, help="system file or bundled fixture name")
        p.add_argument("--seed-pair", help="seed file (x: ...; p: ...;)")
        p.add_argument("--rng-seed", type=int, default=0)
        p.add_argument("--degree-bound", type=int, default=3)
        p.add_argument("--param-dependent", action="store_true")
        p.add_argument("--graded", action="store_true")
        p.add_argument("--expected-degree", type=int)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--tol-newton", type=float, default=1e-10)
        p.add_argument("--tol-path", type=float, default=1e-8)
        p.add_argument("--tol-rank", type=float, default=1e-8)
        p.add_argument("--tol-truncate", type=float, default=1e-5)
        p.add_argument("--verify-trials", type=int, default=5)
        if name == "verify":
            p.add_argument("--formulas", required=True, help="deck formula file")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        system_path=args.system,
        seed_path=args.seed_pair,
        formulas_path=getattr(args, "formulas", None),
        rng_seed=args.rng_seed,
        degree_bound=args.degree_bound,
        parameter_dependent=args.param_dependent,
        graded=args.graded,
        expected_degree=args.expected_degree,
        threads=args.threads,
        out_path=args.out,
        tol_newton=args.tol_newton,
        tol_path=args.tol_path,
        tol_rank=args.tol_rank,
        tol_truncate=args.tol_truncate,
        verify_trials=args.verify_trials,
    )


def run(cfg: RunConfig) -> tuple[dict, int]:
    pipeline = Pipeline(cfg)
    code = pipeline.run()
    report = _jsonify(pipeline.report)
    if cfg.out_path:
        Path(cfg.out_path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report, code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report, code = run(cfg)
    print(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
