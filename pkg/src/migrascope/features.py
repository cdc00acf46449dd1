"""NFT feature model: feature profiles, contract descriptors and rule-driven
feature detection.
"""

from __future__ import annotations

import fnmatch
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from . import jsonio
from .errors import LoadError, RuleConflict

FEATURE_SCHEMA = "migrascope-features/1"
RULES_SCHEMA = "migrascope-rules/1"

CORE_FEATURES = (
    "identity-mechanism",
    "ownership-representation",
    "transfer-logic",
    "metadata-linkage",
)

CORE = "core"
EXTENDED = "extended"


@dataclass(frozen=True, order=True)
class FeatureId:
    name: str

    @property
    def kind(self) -> str:
        return CORE if self.name in CORE_FEATURES else EXTENDED

    @property
    def title(self) -> str:
        """Human label, e.g. ``User cryptographic identity``."""
        text = self.name.replace("-", " ")
        return text[:1].upper() + text[1:]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BehaviorSpec:
    trigger: str
    state_effect: str
    conditions: str

    def __post_init__(self) -> None:
        for name in ("trigger", "state_effect", "conditions"):
            if not getattr(self, name).strip():
                raise ValueError(f"behavior spec field {name!r} is empty")

    def to_json(self) -> dict[str, str]:
        return {"trigger": self.trigger, "state_effect": self.state_effect, "conditions": self.conditions}

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "BehaviorSpec":
        try:
            return cls(raw["trigger"], raw["state_effect"], raw["conditions"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"bad behavior spec {raw!r}: {exc}") from None


@dataclass(frozen=True)
class FeatureProfile:
    """Feature set of one collection. ``behavior`` is ``None`` while unfilled.

    Order is canonical: the four core features first, then extended features
    in the order they were declared.
    """

    collection_id: str
    features: tuple[tuple[FeatureId, BehaviorSpec | None], ...]

    def __post_init__(self) -> None:
        names = [f.name for f, _ in self.features]
        if len(set(names)) != len(names):
            raise ValueError("duplicate feature in profile")
        missing = [c for c in CORE_FEATURES if c not in names]
        if missing:
            raise ValueError(f"feature profile lacks core features: {', '.join(missing)}")
        core = sorted(
            (item for item in self.features if item[0].kind == CORE),
            key=lambda item: CORE_FEATURES.index(item[0].name),
        )
        ext = [item for item in self.features if item[0].kind == EXTENDED]
        object.__setattr__(self, "features", tuple(core + ext))

    def ids(self) -> list[FeatureId]:
        return [f for f, _ in self.features]

    def names(self) -> list[str]:
        return [f.name for f, _ in self.features]

    def behavior(self, name: str) -> BehaviorSpec | None:
        for f, spec in self.features:
            if f.name == name:
                return spec
        raise KeyError(name)

    def extended(self) -> list[FeatureId]:
        return [f for f, _ in self.features if f.kind == EXTENDED]

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": FEATURE_SCHEMA,
            "collection_id": self.collection_id,
            "features": [
                {"name": f.name, "kind": f.kind, "behavior": None if spec is None else spec.to_json()}
                for f, spec in self.features
            ],
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "FeatureProfile":
        if not isinstance(raw, Mapping) or raw.get("schema") != FEATURE_SCHEMA:
            raise LoadError("not a migrascope feature profile")
        items = []
        for entry in raw.get("features", ()):
            fid = FeatureId(entry["name"])
            if entry.get("kind", fid.kind) != fid.kind:
                raise LoadError(f"feature {fid.name!r} declared with wrong kind {entry['kind']!r}")
            spec = entry.get("behavior")
            items.append((fid, None if spec is None else BehaviorSpec.from_json(spec)))
        try:
            return cls(raw.get("collection_id", ""), tuple(items))
        except ValueError as exc:
            raise LoadError(str(exc)) from None


def load_feature_profile(path: str | Path) -> FeatureProfile:
    return FeatureProfile.from_json(jsonio.read(path))


def seed_core_features(collection_id: str = "") -> FeatureProfile:
    return FeatureProfile(collection_id, tuple((FeatureId(name), None) for name in CORE_FEATURES))


# -- contract descriptors -----------------------------------------------------


@dataclass(frozen=True, order=True)
class FunctionSig:
    name: str
    params: tuple[str, ...]
    mutability: str = "nonpayable"

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(self.params)})"


@dataclass(frozen=True, order=True)
class EventSig:
    name: str
    params: tuple[str, ...]

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(self.params)})"


@dataclass(frozen=True)
class ContractDescriptor:
    functions: tuple[FunctionSig, ...] = ()
    events: tuple[EventSig, ...] = ()
    interface_ids: frozenset[str] = frozenset()
    storage_hints: frozenset[str] = frozenset()
    contract_name: str | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        seen: dict[tuple[str, tuple[str, ...]], FunctionSig] = {}
        for fn in self.functions:
            seen.setdefault((fn.name, fn.params), fn)
        object.__setattr__(self, "functions", tuple(sorted(seen.values())))
        object.__setattr__(self, "events", tuple(sorted(set(self.events))))

    def signatures(self) -> set[str]:
        return {fn.signature for fn in self.functions}

    def to_json(self) -> dict[str, Any]:
        return {
            "contract_name": self.contract_name,
            "functions": [
                {"name": f.name, "params": list(f.params), "mutability": f.mutability} for f in self.functions
            ],
            "events": [{"name": e.name, "params": list(e.params)} for e in self.events],
            "interface_ids": sorted(self.interface_ids),
            "storage_hints": sorted(self.storage_hints),
            "warnings": list(self.warnings),
        }


# -- detection rules ----------------------------------------------------------


@dataclass(frozen=True)
class HintRule:
    """Lexical pattern that tags a descriptor with a storage hint.

    Regexes run over the comment- and string-stripped token stream joined by
    single spaces. ``scope="function"`` evaluates all patterns against one
    function body at a time, optionally only bodies whose name matches
    ``function_name``.
    """

    tag: str
    scope: str = "source"
    function_name: str | None = None
    require: tuple[str, ...] = ()
    require_any: tuple[str, ...] = ()

    def matches(self, text: str) -> bool:
        if not all(re.search(p, text) for p in self.require):
            return False
        return not self.require_any or any(re.search(p, text) for p in self.require_any)


@dataclass(frozen=True)
class FeatureRule:
    feature_name: str
    any_of: tuple[str, ...]
    all_of: tuple[str, ...]
    behavior_template: BehaviorSpec

    def matches(self, descriptor: ContractDescriptor) -> bool:
        if not self.any_of and not self.all_of:
            return False
        if not set(self.all_of) <= descriptor.storage_hints:
            return False
        if not self.any_of:
            return True
        return any(_pattern_matches(p, descriptor) for p in self.any_of)


def _pattern_matches(pattern: str, d: ContractDescriptor) -> bool:
    if pattern.startswith("event:"):
        pat = pattern[len("event:"):]
        return any(fnmatch.fnmatchcase(e.signature, pat) for e in d.events)
    if pattern.startswith("interface:"):
        return pattern[len("interface:"):].lower() in d.interface_ids
    return any(fnmatch.fnmatchcase(f.signature, pattern) for f in d.functions)


@dataclass(frozen=True)
class DetectionRules:
    version: str
    rules: tuple[FeatureRule, ...]
    hints: tuple[HintRule, ...] = ()
    interfaces: Mapping[str, tuple[str, ...]] = field(default_factory=dict)


def load_rules(path: str | Path) -> DetectionRules:
    raw = jsonio.read(path)
    if not isinstance(raw, Mapping) or raw.get("schema") != RULES_SCHEMA:
        raise LoadError(f"{path}: not a migrascope rules file")
    try:
        rules = tuple(
            FeatureRule(
                feature_name=r["feature_name"],
                any_of=tuple(r.get("any_of", ())),
                all_of=tuple(r.get("all_of", ())),
                behavior_template=BehaviorSpec.from_json(r["behavior_template"]),
            )
            for r in raw["rules"]
        )
        hints = tuple(
            HintRule(
                tag=h["tag"],
                scope=h.get("scope", "source"),
                function_name=h.get("function_name"),
                require=tuple(h.get("all", ())),
                require_any=tuple(h.get("any", ())),
            )
            for h in raw.get("hints", ())
        )
    except (KeyError, TypeError) as exc:
        raise LoadError(f"{path}: malformed rule entry ({exc})") from None
    for h in hints:
        if h.scope not in ("source", "function"):
            raise LoadError(f"{path}: hint {h.tag!r} has unknown scope {h.scope!r}")
    interfaces = {name: tuple(sigs) for name, sigs in raw.get("interfaces", {}).items()}
    return DetectionRules(str(raw.get("version", "0")), rules, hints, interfaces)


def derive_feature_profile(
    descriptor: ContractDescriptor,
    rules: DetectionRules,
    collection_id: str | None = None,
) -> FeatureProfile:
    """Start from the core features and add or fill every feature whose rule fires."""
    if collection_id is None:
        collection_id = descriptor.contract_name or "unnamed-collection"
    chosen: dict[str, BehaviorSpec] = {}
    order: list[str] = []
    for rule in rules.rules:
        if not rule.matches(descriptor):
            continue
        prior = chosen.get(rule.feature_name)
        if prior is not None and prior != rule.behavior_template:
            raise RuleConflict(
                f"rules disagree on the behavior of {rule.feature_name!r} (rules version {rules.version})"
            )
        if prior is None:
            chosen[rule.feature_name] = rule.behavior_template
            order.append(rule.feature_name)

    items: list[tuple[FeatureId, BehaviorSpec | None]] = [
        (FeatureId(name), chosen.get(name)) for name in CORE_FEATURES
    ]
    items += [(FeatureId(name), chosen[name]) for name in order if name not in CORE_FEATURES]
    return FeatureProfile(collection_id, tuple(items))
