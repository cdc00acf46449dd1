"""Program-derived addresses.

The off-curve test of the real runtime is replaced by a cheap stand-in: a
candidate is accepted when the last digest byte is not 0xFF. What matters
here is that the address is computed from seeds, not chosen or key-backed.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

from ..errors import DerivationExhausted

MAX_SEED_LEN = 32
MAX_SEEDS = 16
_DOMAIN_TAG = b"PDA"


def _on_curve_standin(digest: bytes) -> bool:
    return digest[-1] == 0xFF


def derive_pda(seeds: Sequence[bytes], program_id: bytes) -> tuple[bytes, int]:
    if not seeds:
        raise ValueError("at least one seed is required")
    if len(seeds) > MAX_SEEDS or any(len(s) > MAX_SEED_LEN for s in seeds):
        raise ValueError(f"at most {MAX_SEEDS} seeds of at most {MAX_SEED_LEN} bytes each")
    if len(program_id) != 32:
        raise ValueError("program id must be 32 bytes")
    prefix = b"".join(seeds) + program_id
    for bump in range(255, -1, -1):
        digest = hashlib.sha256(prefix + bytes([bump]) + _DOMAIN_TAG).digest()
        if not _on_curve_standin(digest):
            return digest, bump
    raise DerivationExhausted("no bump in 0..255 produced an off-curve address")


def program_id(label: str) -> bytes:
    """Stable 32-byte id for a named toy program."""
    return hashlib.sha256(f"migrascope-program:{label}".encode()).digest()
