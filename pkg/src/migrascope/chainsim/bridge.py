"""Burn-and-mint bridge with a trusted signature-linking oracle.

A holder proves control of a source address by signing a claim that names
the target address to receive the token. The oracle checks that signature
in the source key domain and countersigns with its own Ed25519 key; the
target side only ever sees Ed25519 material.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import AlreadyMigrated, InvalidSignature, NotOwner, OracleUnavailable, WrongKeyDomain
from .evm import EvmLikeLedger
from .keys import Keypair, KeyDomain, verify_signature
from .spl import Creator, SplLikeLedger


def link_claim(source_address: bytes, target_address: bytes) -> bytes:
    return b"migrascope-link:" + source_address + b":" + target_address


def migration_claim(token_id: int, target_address: bytes) -> bytes:
    return b"migrascope-migrate:" + token_id.to_bytes(32, "big") + b":" + target_address


@dataclass
class Oracle:
    key: Keypair
    enabled: bool = True
    links: dict[bytes, bytes] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.key.domain is not KeyDomain.ED25519_EDDSA:
            raise WrongKeyDomain("the oracle countersigns in the target (ed25519) domain")

    def _check(self) -> None:
        if not self.enabled:
            raise OracleUnavailable("the linking oracle is not available")

    def link(self, holder: Keypair, target_address: bytes) -> bytes:
        """Record that ``holder``'s source address controls ``target_address``."""
        self._check()
        claim = link_claim(holder.address, target_address)
        if holder.domain is not KeyDomain.SECP256K1_ECDSA or not verify_signature(
            KeyDomain.SECP256K1_ECDSA, holder.public, claim, holder.sign(claim)
        ):
            raise InvalidSignature("link claim must carry a valid secp256k1 signature")
        self.links[holder.address] = target_address
        return self.key.sign(claim)

    def linked(self, source_address: bytes) -> bytes | None:
        return self.links.get(source_address)

    def attest(self, holder: Keypair, claim: bytes, holder_sig: bytes) -> bytes:
        self._check()
        if not verify_signature(KeyDomain.SECP256K1_ECDSA, holder.public, claim, holder_sig):
            raise InvalidSignature("migration claim signature does not verify in the source domain")
        return self.key.sign(claim + holder_sig)


@dataclass(frozen=True)
class MigrationRecord:
    token_id: int
    burn_tx: str
    claim: bytes
    holder_signature: bytes
    attestation: bytes
    target_owner: bytes
    uri: str
    mint_address: bytes | None = None

    def to_json(self) -> dict:
        return {
            "token_id": self.token_id,
            "burn_tx": self.burn_tx,
            "claim": self.claim.hex(),
            "holder_signature": self.holder_signature.hex(),
            "attestation": self.attestation.hex(),
            "target_owner": self.target_owner.hex(),
            "uri": self.uri,
            "mint_address": self.mint_address.hex() if self.mint_address else None,
        }


@dataclass
class Bridge:
    oracle: Oracle
    operator: Keypair  # pays rent and signs target mints
    collection_tag: bytes
    collection_name: str
    royalty_creator: bytes  # target address credited with royalties
    records: dict[int, MigrationRecord] = field(default_factory=dict)
    pending: dict[int, MigrationRecord] = field(default_factory=dict)

    def seeds(self, token_id: int) -> list[bytes]:
        return [self.collection_tag, token_id.to_bytes(8, "big")]

    def burn_and_attest(
        self, source: EvmLikeLedger, token_id: int, holder: Keypair, target_owner: bytes | None = None
    ) -> MigrationRecord:
        """Source half: burn the token and obtain the oracle attestation.

        Oracle availability is checked before anything is burned."""
        self.oracle._check()
        if token_id in self.records or token_id in self.pending:
            raise AlreadyMigrated(f"token {token_id} was already migrated")
        owner = source.owner_of(token_id)
        if owner is None or owner != holder.address:
            raise NotOwner(f"holder does not own token {token_id}")
        target_owner = target_owner or self.oracle.linked(holder.address)
        if target_owner is None:
            raise NotOwner("holder has no linked target address")
        claim = migration_claim(token_id, target_owner)
        holder_sig = holder.sign(claim)
        attestation = self.oracle.attest(holder, claim, holder_sig)
        uri = source.uris[token_id]
        burn_tx = source.burn(holder, token_id)
        record = MigrationRecord(token_id, burn_tx, claim, holder_sig, attestation, target_owner, uri)
        self.pending[token_id] = record
        return record

    def complete(self, target: SplLikeLedger, record: MigrationRecord, royalty_bps: int) -> MigrationRecord:
        """Target half: verify the attestation and mint at the derived address."""
        if record.token_id in self.records:
            raise AlreadyMigrated(f"token {record.token_id} was already migrated")
        if not verify_signature(
            KeyDomain.ED25519_EDDSA, self.oracle.key.public, record.claim + record.holder_signature, record.attestation
        ):
            raise InvalidSignature("oracle attestation does not verify")
        mint = target.mint(
            self.operator,
            self.seeds(record.token_id),
            record.uri,
            royalty_bps,
            [Creator(self.royalty_creator, 100)],
            name=f"{self.collection_name} #{record.token_id}",
            owner=record.target_owner,
        )
        done = MigrationRecord(**{**record.__dict__, "mint_address": mint})
        self.pending.pop(record.token_id, None)
        self.records[record.token_id] = done
        return done


def bridge_burn_mint(
    bridge: Bridge,
    source: EvmLikeLedger,
    target: SplLikeLedger,
    token_id: int,
    holder: Keypair,
    target_owner: bytes | None = None,
) -> MigrationRecord:
    record = bridge.burn_and_attest(source, token_id, holder, target_owner)
    return bridge.complete(target, record, source.royalty_bps)
