"""Keccak-256 based function selectors and ERC-165 interface ids."""

from __future__ import annotations

from typing import Iterable

from Crypto.Hash import keccak


def keccak256(data: bytes) -> bytes:
    h = keccak.new(digest_bits=256)
    h.update(data)
    return h.digest()


def selector(signature: str) -> bytes:
    """First four bytes of keccak-256 of a canonical signature like ``f(uint256)``."""
    return keccak256(signature.encode("ascii"))[:4]


def interface_id(signatures: Iterable[str]) -> str:
    """XOR of the selectors of every function in an interface, as ``0x`` hex."""
    acc = 0
    for sig in signatures:
        acc ^= int.from_bytes(selector(sig), "big")
    return f"0x{acc:08x}"
