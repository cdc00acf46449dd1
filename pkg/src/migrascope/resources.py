"""Locations of the data files bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

DATA = Path(str(resources.files("migrascope") / "data"))

PROFILE_DIR = DATA / "profiles"
VOCABULARY = PROFILE_DIR / "vocabulary.json"
BINDINGS_DIR = DATA / "bindings"
ETHEREUM_BINDINGS = BINDINGS_DIR / "ethereum-erc721.json"
RULES = DATA / "rules" / "detect.json"
GOLDEN_PROFILE = DATA / "fixtures" / "erc721-erc2981-profile.json"
FIXTURE_SOURCE = DATA / "fixtures" / "CaseStudyNFT.sol"
FIXTURE_ABI = DATA / "fixtures" / "CaseStudyNFT.abi.json"
SIM_CONFIG = DATA / "sim" / "config.json"
SIM_EXPECTATIONS = DATA / "sim" / "expectations.json"
TABLE3_ORACLE = DATA / "oracles" / "ethereum-solana-case-study.json"


def bindings_for(platform_id: str, directory: Path = BINDINGS_DIR) -> Path | None:
    """First bindings file in ``directory`` named ``<platform_id>-*.json``."""
    matches = sorted(directory.glob(f"{platform_id}-*.json"))
    return matches[0] if matches else None
