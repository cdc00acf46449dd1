"""Seeded generators for small random architecture profiles."""

from __future__ import annotations

import random

from migrascope.arch import ArchitectureProfile, Layer, Primitive, RealizationRule, layer_order

TAGS = [f"t{i}" for i in range(8)]
IDS = [f"p{i}" for i in range(12)]


def random_primitive(rng: random.Random, pid: str, layer: Layer | None = None) -> Primitive:
    layer = layer or rng.choice(layer_order())
    tags = frozenset(rng.sample(TAGS, rng.randint(1, 2)))
    return Primitive(pid, layer, f"role of {pid}", tags)


def random_profile(
    rng: random.Random,
    platform: str = "rand",
    *,
    max_primitives: int = 8,
    max_edges: int = 12,
    rules: int = 0,
) -> ArchitectureProfile:
    """A profile that satisfies every structural rule except possibly rule redundancy."""
    n = rng.randint(4, max_primitives)
    ids = rng.sample(IDS, n)
    layers = layer_order() + [rng.choice(layer_order()) for _ in range(n - 4)]
    prims = {pid: random_primitive(rng, pid, layer) for pid, layer in zip(ids, layers)}
    legal = [(a, b) for a in ids for b in ids if prims[b].layer.rank < prims[a].layer.rank]
    edges = rng.sample(legal, min(len(legal), rng.randint(0, max_edges)))
    deps: dict[str, set[str]] = {pid: set() for pid in ids}
    for a, b in edges:
        deps[a].add(b)
    out = [Primitive(p.id, p.layer, p.role, p.guarantees, frozenset(deps[p.id])) for p in prims.values()]
    rule_list = [random_rule(rng, f"r{i}", ids) for i in range(rules)]
    return ArchitectureProfile(platform, "1.0.0", tuple(out), tuple(rule_list))


def random_rule(rng: random.Random, name: str, ids: list[str]) -> RealizationRule:
    via = frozenset(rng.sample(ids, rng.randint(1, min(2, len(ids)))))
    return RealizationRule(name, rng.choice(TAGS), via)


def with_extra(rng: random.Random, profile: ArchitectureProfile) -> ArchitectureProfile:
    """``profile`` plus one new primitive or one new realization rule."""
    ids = [p.id for p in profile.primitives]
    if rng.random() < 0.5:
        free = [pid for pid in IDS if pid not in ids]
        extra = random_primitive(rng, rng.choice(free))
        return profile.with_changes(primitives=list(profile.primitives) + [extra])
    names = {r.name for r in profile.realization_rules}
    name = next(f"x{i}" for i in range(100) if f"x{i}" not in names)
    return profile.with_changes(realization_rules=list(profile.realization_rules) + [random_rule(rng, name, ids)])
