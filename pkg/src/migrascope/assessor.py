"""Availability classification of required primitives on a target platform
and the per-feature preservation outcome.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .arch import ArchitectureProfile
from .errors import EmptyDependencySet, MigrascopeError, UnboundFeature, UnknownPrimitive
from .features import FeatureId, FeatureProfile
from .mapper import DependencySet

REPORT_SCHEMA = "migrascope-report/1"


class Availability(enum.Enum):
    AVAILABLE = "AVAILABLE"
    ALTERNATIVE = "ALTERNATIVE"
    ABSENT = "ABSENT"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]


_SEVERITY = {Availability.AVAILABLE: 0, Availability.ALTERNATIVE: 1, Availability.ABSENT: 2}


class MismatchClass(enum.Enum):
    NATIVELY_PRESERVED = "natively-preserved"
    PARTIAL_MISMATCH = "partial-mismatch"
    COMPLETE_MISMATCH = "complete-mismatch"

    @property
    def title(self) -> str:
        text = self.value.replace("-", " ")
        return text[:1].upper() + text[1:]

    @property
    def severity(self) -> int:
        return list(MismatchClass).index(self)


_INDUCED = {
    Availability.AVAILABLE: MismatchClass.NATIVELY_PRESERVED,
    Availability.ALTERNATIVE: MismatchClass.PARTIAL_MISMATCH,
    Availability.ABSENT: MismatchClass.COMPLETE_MISMATCH,
}


@dataclass(frozen=True)
class AvailabilityClass:
    """Verdict for one required primitive, with the evidence behind it.

    AVAILABLE cites ``target_primitive`` (``match`` is ``"id"`` or
    ``"guarantees"``); ALTERNATIVE cites the realization ``rules`` and any
    target ``providers`` offering the remaining tags directly; ABSENT lists
    the ``missing`` tags.
    """

    kind: Availability
    target_primitive: str | None = None
    match: str | None = None
    rules: tuple[str, ...] = ()
    providers: tuple[str, ...] = ()
    missing: tuple[str, ...] = ()
    note: str = ""

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "note": self.note}
        if self.kind is Availability.AVAILABLE:
            out["target_primitive"] = self.target_primitive
            out["match"] = self.match
        elif self.kind is Availability.ALTERNATIVE:
            out["rules"] = list(self.rules)
            out["providers"] = list(self.providers)
        else:
            out["missing"] = list(self.missing)
        return out

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "AvailabilityClass":
        return cls(
            kind=Availability(raw["kind"]),
            target_primitive=raw.get("target_primitive"),
            match=raw.get("match"),
            rules=tuple(raw.get("rules", ())),
            providers=tuple(raw.get("providers", ())),
            missing=tuple(raw.get("missing", ())),
            note=raw.get("note", ""),
        )


def classify_primitive(
    primitive_id: str, source: ArchitectureProfile, target: ArchitectureProfile
) -> AvailabilityClass:
    p = source.get(primitive_id)
    if p is None:
        raise UnknownPrimitive(f"{primitive_id} is not a primitive of {source.platform_id}")

    if primitive_id in target:
        return AvailabilityClass(Availability.AVAILABLE, primitive_id, "id", note=target.by_id[primitive_id].role)
    equivalents = sorted(q.id for q in target.layer_primitives(p.layer) if p.guarantees <= q.guarantees)
    if equivalents:
        q = target.by_id[equivalents[0]]
        return AvailabilityClass(Availability.AVAILABLE, q.id, "guarantees", note=q.role)

    rules: list[str] = []
    notes: list[str] = []
    providers: list[str] = []
    missing: list[str] = []
    for tag in sorted(p.guarantees):
        realizing = [r for r in target.realization_rules if r.capability == tag]
        if realizing:
            rule = realizing[0]
            if rule.name not in rules:
                rules.append(rule.name)
                if rule.notes:
                    notes.append(rule.notes)
            continue
        offering = sorted(q.id for q in target.primitives if tag in q.guarantees)
        if offering:
            if offering[0] not in providers:
                providers.append(offering[0])
            continue
        missing.append(tag)

    if not missing:
        if not notes:
            notes = [target.by_id[pid].role for pid in providers] or ["no guarantee tags to realize"]
        return AvailabilityClass(
            Availability.ALTERNATIVE, rules=tuple(rules), providers=tuple(providers), note="; ".join(notes)
        )

    gap = []
    for tag in missing:
        text = target.gap_notes.get(tag)
        if text and text not in gap:
            gap.append(text)
    if not gap:
        gap = [f"no primitive or realization rule on {target.platform_id} offers {', '.join(missing)}"]
    return AvailabilityClass(Availability.ABSENT, missing=tuple(missing), note="; ".join(gap))


def classify_feature(availability: Mapping[str, AvailabilityClass]) -> MismatchClass:
    if not availability:
        raise EmptyDependencySet("cannot classify a feature with no required primitives")
    worst = max((a.kind for a in availability.values()), key=lambda k: k.severity)
    return _INDUCED[worst]


@dataclass(frozen=True)
class ReportEntry:
    feature: FeatureId
    direct: tuple[str, ...]
    availability: Mapping[str, AvailabilityClass]
    mismatch: MismatchClass
    reasoning: str

    def to_json(self) -> dict[str, Any]:
        return {
            "feature": self.feature.name,
            "kind": self.feature.kind,
            "direct": list(self.direct),
            "availability": {pid: a.to_json() for pid, a in self.availability.items()},
            "mismatch": self.mismatch.value,
            "reasoning": self.reasoning,
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "ReportEntry":
        return cls(
            feature=FeatureId(raw["feature"]),
            direct=tuple(raw["direct"]),
            availability={pid: AvailabilityClass.from_json(a) for pid, a in sorted(raw["availability"].items())},
            mismatch=MismatchClass(raw["mismatch"]),
            reasoning=raw["reasoning"],
        )


@dataclass(frozen=True)
class PreservationReport:
    source_platform: str
    target_platform: str
    entries: tuple[ReportEntry, ...]
    source_version: str = ""
    target_version: str = ""
    # primitive id -> role string, per side, for human-readable rendering
    source_roles: Mapping[str, str] = field(default_factory=dict)
    target_roles: Mapping[str, str] = field(default_factory=dict)

    def entry(self, feature: str) -> ReportEntry:
        for e in self.entries:
            if e.feature.name == feature:
                return e
        raise KeyError(feature)

    def classes(self) -> dict[str, MismatchClass]:
        return {e.feature.name: e.mismatch for e in self.entries}

    def has_complete_mismatch(self) -> bool:
        return any(e.mismatch is MismatchClass.COMPLETE_MISMATCH for e in self.entries)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "source_platform": self.source_platform,
            "source_version": self.source_version,
            "target_platform": self.target_platform,
            "target_version": self.target_version,
            "entries": [e.to_json() for e in self.entries],
            "source_roles": dict(self.source_roles),
            "target_roles": dict(self.target_roles),
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "PreservationReport":
        if raw.get("schema") != REPORT_SCHEMA:
            raise MigrascopeError(f"unsupported report schema {raw.get('schema')!r}")
        return cls(
            source_platform=raw["source_platform"],
            target_platform=raw["target_platform"],
            entries=tuple(ReportEntry.from_json(e) for e in raw["entries"]),
            source_version=raw.get("source_version", ""),
            target_version=raw.get("target_version", ""),
            source_roles=dict(sorted(raw.get("source_roles", {}).items())),
            target_roles=dict(sorted(raw.get("target_roles", {}).items())),
        )


def _reasoning(availability: Mapping[str, AvailabilityClass], mismatch: MismatchClass) -> str:
    counts = {k: 0 for k in Availability}
    for a in availability.values():
        counts[a.kind] += 1
    parts = [f"{counts[k]} {k.value}" for k in Availability]
    text = f"{len(availability)} required primitives: " + ", ".join(parts) + "."
    alternatives = sorted({r for a in availability.values() for r in a.rules})
    if alternatives:
        text += " Realized via: " + ", ".join(alternatives) + "."
    absent = [pid for pid, a in availability.items() if a.kind is Availability.ABSENT]
    if absent:
        text += " Not realizable: " + ", ".join(absent) + "."
    return text + f" Outcome: {mismatch.title.lower()}."


def assess(
    feature_profile: FeatureProfile,
    dependency_sets: Iterable[DependencySet],
    source: ArchitectureProfile,
    target: ArchitectureProfile,
) -> PreservationReport:
    by_feature = {ds.feature: ds for ds in dependency_sets}
    entries = []
    source_roles: dict[str, str] = {}
    target_roles: dict[str, str] = {}
    for fid in feature_profile.ids():
        ds = by_feature.get(fid)
        if ds is None:
            raise UnboundFeature(f"no dependency set for feature {fid.name!r}")
        if not ds.transitive:
            raise EmptyDependencySet(f"feature {fid.name!r} has an empty dependency set")
        availability = {}
        for pid in sorted(ds.transitive):
            try:
                verdict = classify_primitive(pid, source, target)
            except UnknownPrimitive as exc:
                raise UnknownPrimitive(f"feature {fid.name!r}: {exc}") from None
            availability[pid] = verdict
            source_roles[pid] = source.by_id[pid].role
            cited = [verdict.target_primitive] if verdict.target_primitive else []
            cited += list(verdict.providers)
            for rule_name in verdict.rules:
                rule = next(r for r in target.realization_rules if r.name == rule_name)
                cited += sorted(rule.via)
            for tid in cited:
                target_roles[tid] = target.by_id[tid].role
        mismatch = classify_feature(availability)
        entries.append(ReportEntry(fid, tuple(sorted(ds.direct)), availability, mismatch, _reasoning(availability, mismatch)))
    return PreservationReport(
        source_platform=source.platform_id,
        target_platform=target.platform_id,
        entries=tuple(entries),
        source_version=source.version,
        target_version=target.version,
        source_roles=dict(sorted(source_roles.items())),
        target_roles=dict(sorted(target_roles.items())),
    )


def report_problems(report: PreservationReport, dependency_sets: Iterable[DependencySet] | None = None) -> list[str]:
    """Soundness check: stored classes agree with their availability maps and,
    when dependency sets are given, every transitive primitive appears once."""
    problems = []
    sets = {ds.feature: ds for ds in dependency_sets} if dependency_sets is not None else {}
    for e in report.entries:
        if not e.availability:
            problems.append(f"{e.feature.name}: empty availability map")
            continue
        if classify_feature(e.availability) is not e.mismatch:
            problems.append(f"{e.feature.name}: stored class {e.mismatch.value} contradicts its availability map")
        ds = sets.get(e.feature)
        if ds is not None and set(e.availability) != set(ds.transitive):
            problems.append(f"{e.feature.name}: availability map does not match the transitive dependency set")
    return problems
