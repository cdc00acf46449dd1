"""Feature to primitive dependency mapping and the feature-layer matrix."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import jsonio
from .arch import ArchitectureProfile, Layer, layer_order
from .errors import LoadError, UnboundFeature, UnknownPrimitive
from .features import FeatureId, FeatureProfile


@dataclass(frozen=True)
class DependencyBinding:
    feature: FeatureId
    primitive_ids: frozenset[str]


@dataclass(frozen=True)
class DependencySet:
    feature: FeatureId
    direct: frozenset[str]
    transitive: frozenset[str]

    def to_json(self) -> dict[str, Any]:
        return {
            "feature": self.feature.name,
            "direct": sorted(self.direct),
            "transitive": sorted(self.transitive),
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "DependencySet":
        return cls(FeatureId(raw["feature"]), frozenset(raw["direct"]), frozenset(raw["transitive"]))


def load_bindings(path: str | Path) -> list[DependencyBinding]:
    raw = jsonio.read(path)
    if not isinstance(raw, Mapping):
        raise LoadError(f"{path}: bindings must map feature names to primitive id lists")
    out = []
    for name, ids in raw.items():
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise LoadError(f"{path}: binding for {name!r} must be a list of primitive ids")
        out.append(DependencyBinding(FeatureId(name), frozenset(ids)))
    return out


def dump_bindings(bindings: Iterable[DependencyBinding]) -> str:
    return jsonio.dumps({b.feature.name: sorted(b.primitive_ids) for b in bindings})


def direct_dependencies(feature: FeatureId, bindings: Iterable[DependencyBinding]) -> frozenset[str]:
    for b in bindings:
        if b.feature == feature:
            if not b.primitive_ids:
                raise UnboundFeature(f"feature {feature.name!r} is bound to no primitives")
            return b.primitive_ids
    raise UnboundFeature(f"no binding for feature {feature.name!r}")


def closure_rounds(direct: Iterable[str], profile: ArchitectureProfile) -> tuple[frozenset[str], int]:
    """Least fixpoint over builds_on, plus the number of expansion rounds taken."""
    result = set(direct)
    unknown = sorted(p for p in result if p not in profile)
    if unknown:
        raise UnknownPrimitive(f"unknown primitive(s) on {profile.platform_id}: {', '.join(unknown)}")
    frontier = set(result)
    rounds = 0
    while frontier:
        added: set[str] = set()
        for pid in frontier:
            for dep in profile.by_id[pid].builds_on:
                if dep not in profile:
                    raise UnknownPrimitive(f"{pid} builds on unknown primitive {dep}")
                if dep not in result:
                    added.add(dep)
        if not added:
            break
        rounds += 1
        result |= added
        frontier = added
    return frozenset(result), rounds


def closure(direct: Iterable[str], profile: ArchitectureProfile) -> frozenset[str]:
    """Smallest superset of ``direct`` closed under builds_on."""
    return closure_rounds(direct, profile)[0]


def build_dependency_sets(
    feature_profile: FeatureProfile,
    bindings: Iterable[DependencyBinding],
    source: ArchitectureProfile,
) -> list[DependencySet]:
    bindings = list(bindings)
    out = []
    for fid in feature_profile.ids():
        direct = direct_dependencies(fid, bindings)
        try:
            transitive = closure(direct, source)
        except UnknownPrimitive as exc:
            raise UnknownPrimitive(f"feature {fid.name!r}: {exc}") from None
        out.append(DependencySet(fid, direct, transitive))
    return out


@dataclass(frozen=True)
class FeatureLayerMatrix:
    rows: tuple[FeatureId, ...]
    columns: tuple[Layer, ...]
    cells: Mapping[tuple[FeatureId, Layer], frozenset[str]]

    def cell(self, feature: FeatureId, layer: Layer) -> frozenset[str]:
        return self.cells.get((feature, layer), frozenset())

    def row(self, feature: FeatureId) -> frozenset[str]:
        out: set[str] = set()
        for layer in self.columns:
            out |= self.cell(feature, layer)
        return frozenset(out)

    def to_json(self) -> dict[str, Any]:
        return {
            "columns": [layer.value for layer in self.columns],
            "rows": [
                {
                    "feature": f.name,
                    "cells": {layer.value: sorted(self.cell(f, layer)) for layer in self.columns},
                }
                for f in self.rows
            ],
        }

    def render_dots(self) -> str:
        """Markdown grid with a dot wherever a feature depends on a layer."""
        header = "| Feature | " + " | ".join(layer.value for layer in self.columns) + " |"
        sep = "|---|" + "|".join(":-:" for _ in self.columns) + "|"
        lines = [header, sep]
        for f in self.rows:
            marks = ["●" if self.cell(f, layer) else "" for layer in self.columns]
            lines.append(f"| {f.title} | " + " | ".join(marks) + " |")
        return "\n".join(lines) + "\n"


def feature_layer_matrix(sets: Iterable[DependencySet], profile: ArchitectureProfile) -> FeatureLayerMatrix:
    rows = []
    cells: dict[tuple[FeatureId, Layer], frozenset[str]] = {}
    for ds in sets:
        rows.append(ds.feature)
        buckets: dict[Layer, set[str]] = {}
        for pid in ds.transitive:
            prim = profile.get(pid)
            if prim is None:
                raise UnknownPrimitive(f"feature {ds.feature.name!r}: unknown primitive {pid}")
            buckets.setdefault(prim.layer, set()).add(pid)
        for layer, ids in buckets.items():
            cells[(ds.feature, layer)] = frozenset(ids)
    return FeatureLayerMatrix(tuple(rows), tuple(layer_order()), cells)
