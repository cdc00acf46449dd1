"""Four-layer architecture model: layers, primitives, realization rules and
platform profiles, plus structural validation and canonical (de)serialization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import jsonio
from .errors import LoadError

PROFILE_SCHEMA = "migrascope-profile/1"


class Layer(enum.Enum):
    CRYPTOGRAPHIC = "cryptographic"
    STATE_MANAGEMENT = "state-management"
    TRANSACTION_PROCESSING = "transaction-processing"
    OWNERSHIP_CAPABILITY = "ownership-capability"

    @property
    def rank(self) -> int:
        return _LAYER_RANK[self]

    @property
    def short(self) -> str:
        return _LAYER_SHORT[self]

    def __lt__(self, other: "Layer") -> bool:
        if not isinstance(other, Layer):
            return NotImplemented
        return self.rank < other.rank


_LAYER_ORDER = (
    Layer.CRYPTOGRAPHIC,
    Layer.STATE_MANAGEMENT,
    Layer.TRANSACTION_PROCESSING,
    Layer.OWNERSHIP_CAPABILITY,
)
_LAYER_RANK = {layer: i for i, layer in enumerate(_LAYER_ORDER)}
_LAYER_SHORT = {
    Layer.CRYPTOGRAPHIC: "crypto",
    Layer.STATE_MANAGEMENT: "state",
    Layer.TRANSACTION_PROCESSING: "tx",
    Layer.OWNERSHIP_CAPABILITY: "own",
}


def layer_order() -> list[Layer]:
    """Layers from the bottom of the stack (cryptographic) to the top."""
    return list(_LAYER_ORDER)


@dataclass(frozen=True)
class Primitive:
    id: str
    layer: Layer
    role: str
    guarantees: frozenset[str] = frozenset()
    builds_on: frozenset[str] = frozenset()
    provenance: str = "curated"

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "layer": self.layer.value,
            "role": self.role,
            "guarantees": sorted(self.guarantees),
            "builds_on": sorted(self.builds_on),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "Primitive":
        try:
            return cls(
                id=raw["id"],
                layer=Layer(raw["layer"]),
                role=raw.get("role", ""),
                guarantees=frozenset(raw.get("guarantees", ())),
                builds_on=frozenset(raw.get("builds_on", ())),
                provenance=raw.get("provenance", "curated"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise LoadError(f"bad primitive entry {raw!r}: {exc}") from None


@dataclass(frozen=True)
class RealizationRule:
    name: str
    capability: str
    via: frozenset[str]
    notes: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "capability": self.capability,
            "via": sorted(self.via),
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "RealizationRule":
        try:
            return cls(
                name=raw["name"],
                capability=raw["capability"],
                via=frozenset(raw.get("via", ())),
                notes=raw.get("notes", ""),
            )
        except (KeyError, TypeError) as exc:
            raise LoadError(f"bad realization rule {raw!r}: {exc}") from None


@dataclass(frozen=True)
class ArchitectureProfile:
    platform_id: str
    version: str
    primitives: tuple[Primitive, ...]
    realization_rules: tuple[RealizationRule, ...] = ()
    description: str = ""
    # guarantee tag -> explanation used when a requirement cannot be met here
    gap_notes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "primitives", tuple(sorted(self.primitives, key=lambda p: p.id)))
        object.__setattr__(
            self, "realization_rules", tuple(sorted(self.realization_rules, key=lambda r: r.name))
        )
        object.__setattr__(self, "gap_notes", dict(sorted(self.gap_notes.items())))

    def __hash__(self) -> int:
        return hash((self.platform_id, self.version, self.primitives, self.realization_rules))

    @cached_property
    def by_id(self) -> dict[str, Primitive]:
        out: dict[str, Primitive] = {}
        for p in self.primitives:
            out.setdefault(p.id, p)
        return out

    def __contains__(self, primitive_id: object) -> bool:
        return primitive_id in self.by_id

    def get(self, primitive_id: str) -> Primitive | None:
        return self.by_id.get(primitive_id)

    def layer_primitives(self, layer: Layer) -> list[Primitive]:
        return [p for p in self.primitives if p.layer is layer]

    def offered_tags(self) -> set[str]:
        tags: set[str] = set()
        for p in self.primitives:
            tags |= p.guarantees
        return tags

    def layer_edges(self) -> set[tuple[Layer, Layer]]:
        """Layer-level edge set E derived from primitive builds_on edges.

        An edge (lower, upper) means primitives at ``upper`` are built on
        primitives at ``lower``.
        """
        edges = set()
        for p in self.primitives:
            for dep in p.builds_on:
                q = self.by_id.get(dep)
                if q is not None:
                    edges.add((q.layer, p.layer))
        return edges

    def with_changes(
        self,
        *,
        primitives: Iterable[Primitive] | None = None,
        realization_rules: Iterable[RealizationRule] | None = None,
        version: str | None = None,
    ) -> "ArchitectureProfile":
        return ArchitectureProfile(
            platform_id=self.platform_id,
            version=self.version if version is None else version,
            primitives=tuple(self.primitives if primitives is None else primitives),
            realization_rules=tuple(
                self.realization_rules if realization_rules is None else realization_rules
            ),
            description=self.description,
            gap_notes=self.gap_notes,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": PROFILE_SCHEMA,
            "platform_id": self.platform_id,
            "version": self.version,
            "description": self.description,
            "gap_notes": dict(self.gap_notes),
            "primitives": [p.to_json() for p in self.primitives],
            "realization_rules": [r.to_json() for r in self.realization_rules],
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "ArchitectureProfile":
        if not isinstance(raw, Mapping):
            raise LoadError("profile document must be a JSON object")
        if raw.get("schema") != PROFILE_SCHEMA:
            raise LoadError(f"unsupported profile schema {raw.get('schema')!r}")
        for key in ("platform_id", "version", "primitives"):
            if key not in raw:
                raise LoadError(f"profile is missing {key!r}")
        return cls(
            platform_id=raw["platform_id"],
            version=str(raw["version"]),
            primitives=tuple(Primitive.from_json(p) for p in raw["primitives"]),
            realization_rules=tuple(
                RealizationRule.from_json(r) for r in raw.get("realization_rules", ())
            ),
            description=raw.get("description", ""),
            gap_notes=dict(raw.get("gap_notes", {})),
        )


def dumps_profile(profile: ArchitectureProfile) -> str:
    return jsonio.dumps(profile.to_json())


def loads_profile(text: str) -> ArchitectureProfile:
    import json

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"invalid JSON: {exc}") from None
    return ArchitectureProfile.from_json(raw)


def load_profile(path: str | Path) -> ArchitectureProfile:
    try:
        return ArchitectureProfile.from_json(jsonio.read(path))
    except LoadError as exc:
        raise LoadError(f"{path}: {exc}") from None


# -- validation ---------------------------------------------------------------

UPWARD_RULE = "upward-dependency rule"


@dataclass(frozen=True)
class Violation:
    rule: str
    primitive_ids: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        ids = ", ".join(self.primitive_ids)
        return f"[{self.rule}] {self.message}" + (f" ({ids})" if ids else "")


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def _find_cycle(nodes: Iterable[str], edges: Mapping[str, Iterable[str]]) -> list[str] | None:
    white, grey, black = 0, 1, 2
    colour = {n: white for n in nodes}
    for root in sorted(colour):
        if colour[root] != white:
            continue
        stack: list[tuple[str, Iterable[str]]] = [(root, iter(sorted(edges.get(root, ()))))]
        path = [root]
        colour[root] = grey
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = black
                stack.pop()
                path.pop()
                continue
            if nxt not in colour:
                continue
            if colour[nxt] == grey:
                return path[path.index(nxt):] + [nxt]
            if colour[nxt] == white:
                colour[nxt] = grey
                path.append(nxt)
                stack.append((nxt, iter(sorted(edges.get(nxt, ())))))
    return None


def validate_profile(
    profile: ArchitectureProfile, vocabulary: Iterable[str] | None = None
) -> ValidationResult:
    """Check every structural invariant of ``profile`` and report all breaches.

    When ``vocabulary`` is given, guarantee tags and rule capabilities must be
    spelled as in it.
    """
    out: list[Violation] = []
    seen: dict[str, Primitive] = {}
    for p in profile.primitives:
        if p.id in seen:
            out.append(Violation("unique-id", (p.id,), f"primitive id {p.id!r} declared more than once"))
        else:
            seen[p.id] = p

    for layer in layer_order():
        if not any(p.layer is layer for p in profile.primitives):
            out.append(Violation("missing-layer", (), f"no primitive at layer {layer.value}"))

    edges: dict[str, set[str]] = {}
    for p in profile.primitives:
        for dep in sorted(p.builds_on):
            q = seen.get(dep)
            if q is None:
                out.append(
                    Violation("unresolved-builds-on", (p.id, dep), f"{p.id} builds on unknown primitive {dep}")
                )
                continue
            edges.setdefault(p.id, set()).add(dep)
            if not q.layer.rank < p.layer.rank:
                out.append(
                    Violation(
                        UPWARD_RULE,
                        (p.id, dep),
                        f"{p.id} ({p.layer.value}) builds on {dep} ({q.layer.value}), "
                        "which is not at a strictly lower layer",
                    )
                )

    cycle = _find_cycle(seen, edges)
    if cycle is not None:
        out.append(Violation("acyclic", tuple(cycle), "builds_on relation contains a cycle"))

    offered = profile.offered_tags()
    rule_names: set[str] = set()
    for r in profile.realization_rules:
        if r.name in rule_names:
            out.append(Violation("unique-rule-name", (), f"realization rule {r.name!r} declared more than once"))
        rule_names.add(r.name)
        if not r.via:
            out.append(Violation("rule-via-empty", (), f"rule {r.name!r} lists no primitives"))
        missing = sorted(v for v in r.via if v not in seen)
        if missing:
            out.append(
                Violation("rule-via-unresolved", tuple(missing), f"rule {r.name!r} uses unknown primitives")
            )
        if r.capability in offered:
            providers = tuple(sorted(p.id for p in profile.primitives if r.capability in p.guarantees))
            out.append(
                Violation(
                    "redundant-realization-rule",
                    providers,
                    f"rule {r.name!r} realizes {r.capability!r}, which is offered directly",
                )
            )

    if vocabulary is not None:
        vocab = set(vocabulary)
        for p in profile.primitives:
            unknown = sorted(p.guarantees - vocab)
            if unknown:
                out.append(
                    Violation("unknown-guarantee-tag", (p.id,), f"tags not in vocabulary: {', '.join(unknown)}")
                )
        for r in profile.realization_rules:
            if r.capability not in vocab:
                out.append(
                    Violation("unknown-guarantee-tag", (), f"rule {r.name!r} capability {r.capability!r} not in vocabulary")
                )
        for tag in profile.gap_notes:
            if tag not in vocab:
                out.append(Violation("unknown-guarantee-tag", (), f"gap note for unknown tag {tag!r}"))

    return ValidationResult(tuple(out))


def load_vocabulary(path: str | Path) -> dict[str, str]:
    raw = jsonio.read(path)
    tags = raw.get("tags") if isinstance(raw, Mapping) else None
    if not isinstance(tags, Mapping):
        raise LoadError(f"{path}: vocabulary must contain a 'tags' object")
    return dict(tags)
