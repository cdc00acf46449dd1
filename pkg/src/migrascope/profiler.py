"""Registry of validated platform profiles and guarantee lookup."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from packaging.version import InvalidVersion, Version

from . import jsonio, resources
from .arch import ArchitectureProfile, RealizationRule, load_profile, load_vocabulary, validate_profile
from .errors import InvalidProfile, StaleVersion, UnknownPlatform

log = logging.getLogger(__name__)

VOCABULARY_FILE = "vocabulary.json"


def _version(text: str) -> Version:
    try:
        return Version(text)
    except InvalidVersion:
        raise StaleVersion(f"version {text!r} is not a semantic version") from None


@dataclass(frozen=True)
class ProfileRegistry:
    profiles: Mapping[str, ArchitectureProfile] = field(default_factory=dict)
    # tag -> description; None disables tag spelling checks
    vocabulary: Mapping[str, str] | None = None

    def lookup(self, platform_id: str) -> ArchitectureProfile:
        try:
            return self.profiles[platform_id]
        except KeyError:
            known = ", ".join(sorted(self.profiles)) or "none"
            raise UnknownPlatform(f"unknown platform {platform_id!r} (registered: {known})") from None

    def platform_ids(self) -> list[str]:
        return sorted(self.profiles)

    def __contains__(self, platform_id: object) -> bool:
        return platform_id in self.profiles


def register(registry: ProfileRegistry, profile: ArchitectureProfile) -> ProfileRegistry:
    """Return a registry that also holds ``profile``.

    An existing entry is replaced only by a strictly newer version.
    """
    result = validate_profile(profile, registry.vocabulary)
    if not result.ok:
        raise InvalidProfile(profile.platform_id, result.violations)
    current = registry.profiles.get(profile.platform_id)
    if current is not None and not _version(profile.version) > _version(current.version):
        raise StaleVersion(
            f"{profile.platform_id} {profile.version} does not supersede registered {current.version}"
        )
    profiles = dict(registry.profiles)
    profiles[profile.platform_id] = profile
    return ProfileRegistry(profiles, registry.vocabulary)


@dataclass(frozen=True)
class GuaranteeLookup:
    direct: frozenset[str]
    rules: tuple[RealizationRule, ...]
    warnings: tuple[str, ...] = ()


def find_by_guarantee(registry: ProfileRegistry, platform_id: str, tag: str) -> GuaranteeLookup:
    profile = registry.lookup(platform_id)
    warnings = []
    if registry.vocabulary is not None and tag not in registry.vocabulary:
        warnings.append(f"unknown tag {tag!r}")
        log.warning("unknown tag %r", tag)
    direct = frozenset(p.id for p in profile.primitives if tag in p.guarantees)
    rules = tuple(r for r in profile.realization_rules if r.capability == tag)
    return GuaranteeLookup(direct, rules, tuple(warnings))


def load_registry(directory: str | Path | None = None) -> ProfileRegistry:
    """Load and register every profile in ``directory`` (bundled profiles by default)."""
    directory = Path(directory) if directory is not None else resources.PROFILE_DIR
    vocab_path = directory / VOCABULARY_FILE
    vocabulary = load_vocabulary(vocab_path) if vocab_path.exists() else None
    registry = ProfileRegistry({}, vocabulary)
    for path in sorted(directory.glob("*.json")):
        if path.name == VOCABULARY_FILE:
            continue
        registry = register(registry, load_profile(path))
    return registry


def save_registry(registry: ProfileRegistry, directory: str | Path) -> list[Path]:
    directory = Path(directory)
    written = [
        jsonio.write(directory / f"{pid}.json", registry.profiles[pid].to_json())
        for pid in registry.platform_ids()
    ]
    if registry.vocabulary is not None:
        doc = {"schema": "migrascope-vocabulary/1", "tags": dict(registry.vocabulary)}
        written.append(jsonio.write(directory / VOCABULARY_FILE, doc))
    return written
