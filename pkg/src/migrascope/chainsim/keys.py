"""Key domains for the two toy ledgers.

secp256k1 keys sign with deterministic (RFC 6979) ECDSA over a Keccak-256
prehash; Ed25519 keys sign with EdDSA. Both are deterministic so simulation
transcripts are reproducible from the seed.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature as _BadSig
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec, ed25519
from cryptography.hazmat.primitives.asymmetric.utils import Prehashed

from ..selectors import keccak256

_SECP256K1_ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_ECDSA = ec.ECDSA(Prehashed(hashes.SHA256()), deterministic_signing=True)


class KeyDomain(enum.Enum):
    SECP256K1_ECDSA = "secp256k1-ecdsa"
    ED25519_EDDSA = "ed25519-eddsa"


@dataclass(frozen=True)
class Keypair:
    domain: KeyDomain
    public: bytes
    _secret: object = field(repr=False, compare=False)

    @property
    def address(self) -> bytes:
        """20-byte Keccak address for secp256k1, the raw public key for Ed25519."""
        if self.domain is KeyDomain.SECP256K1_ECDSA:
            return keccak256(self.public[1:])[-20:]
        return self.public

    def sign(self, message: bytes) -> bytes:
        if self.domain is KeyDomain.SECP256K1_ECDSA:
            return self._secret.sign(keccak256(message), _ECDSA)
        return self._secret.sign(message)


def generate(domain: KeyDomain, rng: random.Random) -> Keypair:
    if domain is KeyDomain.SECP256K1_ECDSA:
        secret = ec.derive_private_key(rng.randrange(1, _SECP256K1_ORDER), ec.SECP256K1())
        public = secret.public_key().public_bytes(
            serialization.Encoding.X962, serialization.PublicFormat.UncompressedPoint
        )
    else:
        secret = ed25519.Ed25519PrivateKey.from_private_bytes(rng.randbytes(32))
        public = secret.public_key().public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
    return Keypair(domain, public, secret)


def verify_signature(domain: KeyDomain, public: bytes, message: bytes, signature: bytes) -> bool:
    """True only for a valid signature made by a key of ``domain``."""
    try:
        if domain is KeyDomain.SECP256K1_ECDSA:
            key = ec.EllipticCurvePublicKey.from_encoded_point(ec.SECP256K1(), public)
            key.verify(signature, keccak256(message), _ECDSA)
        else:
            ed25519.Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
    except (ValueError, TypeError, _BadSig):
        return False
    return True
