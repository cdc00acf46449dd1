"""``migrascope`` command line.

Exit codes: 0 success; 1 a gate failed (complete mismatch, invalid profile,
inconsistent prediction); 2 an input or runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import jsonio, resources
from .arch import load_profile, validate_profile
from .assessor import PreservationReport, assess
from .chainsim.observe import compare_prediction, observe_all
from .chainsim.run import load_config, run_case_study
from .errors import MigrascopeError
from .features import FeatureProfile, derive_feature_profile, load_feature_profile, load_rules
from .mapper import build_dependency_sets, feature_layer_matrix, load_bindings
from .profiler import ProfileRegistry, load_registry
from .report import RenderOptions, render, render_agreement
from .scanner import scan_contract

log = logging.getLogger("migrascope")

OK, GATE_FAILED, ERROR = 0, 1, 2


class UsageError(MigrascopeError):
    """A command-line input is missing or unusable."""


@dataclass(frozen=True)
class CliConfig:
    profile_dir: Path
    bindings_file: Path | None
    rules_file: Path
    output: Path
    verbosity: int
    formats: tuple[str, ...]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        profile_dir = Path(args.profiles) if args.profiles else resources.PROFILE_DIR
        rules_file = Path(args.rules) if args.rules else resources.RULES
        bindings = Path(args.bindings) if args.bindings else None
        for label, path in (("profile directory", profile_dir), ("rules file", rules_file), ("bindings file", bindings)):
            if path is not None and not path.exists():
                raise UsageError(f"{label} {path} does not exist")
        formats = {"json": ("json",), "md": ("markdown",), None: ("json", "markdown")}[args.format]
        return cls(profile_dir, bindings, rules_file, Path(args.out), args.verbose, formats)


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file {p} does not exist")
    return p


def _bindings(cfg: CliConfig, platform_id: str) -> Path:
    if cfg.bindings_file is not None:
        return cfg.bindings_file
    found = resources.bindings_for(platform_id)
    if found is None:
        raise UsageError(f"no bundled bindings for {platform_id!r}; pass --bindings")
    return found


def _assess(cfg: CliConfig, registry: ProfileRegistry, fp: FeatureProfile, src: str, tgt: str) -> PreservationReport:
    source, target = registry.lookup(src), registry.lookup(tgt)
    sets = build_dependency_sets(fp, load_bindings(_bindings(cfg, src)), source)
    return assess(fp, sets, source, target)


def _write_rendered(cfg: CliConfig, stem: str, renderer, obj) -> list[Path]:
    written = []
    for fmt in cfg.formats:
        suffix = "json" if fmt == "json" else "md"
        path = cfg.output / f"{stem}.{suffix}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(renderer(obj, RenderOptions(fmt)))
        written.append(path)
    return written


# -- commands -------------------------------------------------------------------


def cmd_profile_list(cfg: CliConfig, args) -> int:
    registry = load_registry(cfg.profile_dir)
    for pid in registry.platform_ids():
        p = registry.lookup(pid)
        print(f"{pid}\t{p.version}\t{len(p.primitives)} primitives\t{len(p.realization_rules)} rules")
    return OK


def cmd_profile_validate(cfg: CliConfig, args) -> int:
    paths = [Path(f) for f in args.files] or sorted(
        p for p in cfg.profile_dir.glob("*.json") if p.name != "vocabulary.json"
    )
    vocab_path = cfg.profile_dir / "vocabulary.json"
    vocabulary = jsonio.read(vocab_path)["tags"] if vocab_path.exists() else None
    status = OK
    for path in paths:
        result = validate_profile(load_profile(path), vocabulary)
        if result.ok:
            print(f"{path.name}: ok")
            continue
        status = GATE_FAILED
        for v in result.violations:
            print(f"{path.name}: {v}")
    return status


def cmd_scan(cfg: CliConfig, args) -> int:
    path = _require_file(args.source)
    rules = load_rules(cfg.rules_file)
    descriptor = scan_contract(path.read_text(encoding="utf-8"), rules)
    for warning in descriptor.warnings:
        log.warning("%s", warning)
    fp = derive_feature_profile(descriptor, rules, args.collection_id)
    out = jsonio.write(cfg.output / "feature-profile.json", fp.to_json())
    print(f"{len(fp.names())} features -> {out}")
    return OK


def cmd_map(cfg: CliConfig, args) -> int:
    fp = load_feature_profile(_require_file(args.features))
    source = load_registry(cfg.profile_dir).lookup(args.source)
    sets = build_dependency_sets(fp, load_bindings(_bindings(cfg, args.source)), source)
    matrix = feature_layer_matrix(sets, source)
    jsonio.write(cfg.output / "dependency-sets.json", [ds.to_json() for ds in sets])
    jsonio.write(cfg.output / "feature-layer-matrix.json", matrix.to_json())
    (cfg.output / "feature-layer-matrix.md").write_text(matrix.render_dots(), encoding="utf-8")
    print(matrix.render_dots(), end="")
    return OK


def cmd_assess(cfg: CliConfig, args) -> int:
    fp = load_feature_profile(_require_file(args.features))
    report = _assess(cfg, load_registry(cfg.profile_dir), fp, args.source, args.target)
    written = _write_rendered(cfg, "report", render, report)
    for e in report.entries:
        print(f"{e.feature.name}: {e.mismatch.value}")
    print("wrote " + ", ".join(str(p) for p in written))
    return GATE_FAILED if report.has_complete_mismatch() else OK


def _case_study(cfg: CliConfig, args):
    config = load_config(args.config, seed=args.seed)
    fp = load_feature_profile(resources.GOLDEN_PROFILE)
    report = _assess(cfg, load_registry(cfg.profile_dir), fp, "ethereum", "solana")
    run = run_case_study(config)
    matrix = compare_prediction(report, observe_all(run, fp.ids()))
    return report, run, matrix


def cmd_simulate(cfg: CliConfig, args) -> int:
    started = time.perf_counter()
    _, run, matrix = _case_study(cfg, args)
    run.transcript.write(cfg.output / "transcript.jsonl")
    _write_rendered(cfg, "agreement", render_agreement, matrix)
    summary = run.summary()
    print(
        f"minted {summary['source_mints']}, bridged {summary['bridged']}, "
        f"target mints {summary['target_mints']} ({time.perf_counter() - started:.2f}s)"
    )
    print(matrix.summary())
    return OK if matrix.all_consistent() else GATE_FAILED


def cmd_validate_case_study(cfg: CliConfig, args) -> int:
    oracle = jsonio.read(args.oracle or resources.TABLE3_ORACLE)
    report, _, matrix = _case_study(cfg, args)
    checks = []
    for feature, expected in oracle["classes"].items():
        got = report.entry(feature).mismatch.value
        checks.append((f"class {feature}", got == expected, f"expected {expected}, got {got}"))
    for feature, note in oracle.get("absent_notes", {}).items():
        notes = [a.note for a in report.entry(feature).availability.values()]
        checks.append((f"absent note {feature}", note in notes, f"expected {note!r}"))
    checks.append(("agreement", matrix.summary() == oracle["agreement"], matrix.summary()))
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok else f": {detail}"))
    return OK if all(ok for _, ok, _ in checks) else GATE_FAILED


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profiles", metavar="DIR", help="platform profile directory (default: bundled)")
    common.add_argument("--bindings", metavar="FILE", help="feature-to-primitive bindings for the source platform")
    common.add_argument("--rules", metavar="FILE", help="feature detection rules (default: bundled)")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: current)")
    common.add_argument("--format", choices=("json", "md"), help="write only this format (default: both)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="migrascope", description="NFT cross-chain migration compatibility analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    profile = sub.add_parser("profile", help="inspect platform profiles")
    psub = profile.add_subparsers(dest="action", required=True)
    p = psub.add_parser("list", parents=[common], help="list registered platforms")
    p.set_defaults(func=cmd_profile_list)
    p = psub.add_parser("validate", parents=[common], help="check profiles against the structural rules")
    p.add_argument("files", nargs="*", help="profile files (default: every profile in --profiles)")
    p.set_defaults(func=cmd_profile_validate)

    p = sub.add_parser("scan", parents=[common], help="derive a feature profile from Solidity source or ABI JSON")
    p.add_argument("source")
    p.add_argument("--collection-id", help="collection id (default: contract name)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("map", parents=[common], help="emit dependency sets and the feature-layer matrix")
    p.add_argument("features", help="feature profile JSON")
    p.add_argument("source", help="source platform id")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("assess", parents=[common], help="classify every feature for a migration")
    p.add_argument("features", help="feature profile JSON")
    p.add_argument("source", help="source platform id")
    p.add_argument("target", help="target platform id")
    p.set_defaults(func=cmd_assess)

    for name, func, text in (
        ("simulate", cmd_simulate, "run the dual-ledger case study and compare with predictions"),
        ("validate-case-study", cmd_validate_case_study, "check assessment and simulation against the bundled oracle"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--config", metavar="FILE", help="simulation config (default: bundled)")
        p.add_argument("--seed", type=int, help="override the config seed")
        if name == "validate-case-study":
            p.add_argument("--oracle", metavar="FILE", help="expected outcomes (default: bundled)")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = CliConfig.from_args(args)
        return args.func(cfg, args)
    except MigrascopeError as exc:
        print(f"migrascope: error: {exc}", file=sys.stderr)
        return ERROR
    except OSError as exc:
        print(f"migrascope: error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
