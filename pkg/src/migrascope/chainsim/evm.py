"""Account-mapping ledger: one contract, sequential numeric ids, a central
id -> owner map and an affine gas model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import GasLimitExceeded, InvalidSignature, NotOwner, UnknownToken, WrongKeyDomain
from ..selectors import keccak256
from .keys import Keypair, KeyDomain, verify_signature
from .transcript import Transcript

CHAIN = "source"
_BPS = 10_000


@dataclass(frozen=True)
class GasModel:
    base_per_tx: int = 21_000
    per_mint: int = 50_000
    block_gas_limit: int = 30_000_000

    def batch_cost(self, n: int) -> int:
        return self.base_per_tx + self.per_mint * n

    def max_batch(self) -> int:
        """Largest batch whose cost fits the block limit."""
        return max(0, (self.block_gas_limit - self.base_per_tx) // self.per_mint)


@dataclass(frozen=True)
class HistoryEntry:
    tx: str
    kind: str  # mint | transfer | burn
    token_id: int
    prior_owner: bytes | None
    new_owner: bytes | None


@dataclass
class EvmLikeLedger:
    royalty_bps: int = 0
    royalty_receiver: bytes = bytes(20)
    gas: GasModel = field(default_factory=GasModel)
    transcript: Transcript | None = None
    owners: dict[int, bytes] = field(default_factory=dict)
    uris: dict[int, str] = field(default_factory=dict)
    next_id: int = 1
    history: list[HistoryEntry] = field(default_factory=list)
    approvals: dict[int, bytes] = field(default_factory=dict)
    operators: set[tuple[bytes, bytes]] = field(default_factory=set)
    burned: set[int] = field(default_factory=set)
    gas_used: dict[str, int] = field(default_factory=dict)
    tx_count: int = 0

    # -- plumbing -------------------------------------------------------------

    def _new_tx(self, gas: int) -> str:
        self.tx_count += 1
        tx = "0x" + keccak256(b"evm-tx" + self.tx_count.to_bytes(8, "big")).hex()
        self.gas_used[tx] = gas
        return tx

    def _emit(self, event: str, **fields) -> None:
        if self.transcript is not None:
            self.transcript.emit(CHAIN, event, **fields)

    @staticmethod
    def authenticate(signer: Keypair, payload: bytes) -> bytes:
        """Check a signed command and return the signer's address."""
        if signer.domain is not KeyDomain.SECP256K1_ECDSA:
            raise WrongKeyDomain(f"source ledger requires secp256k1 signatures, got {signer.domain.value}")
        if not verify_signature(KeyDomain.SECP256K1_ECDSA, signer.public, payload, signer.sign(payload)):
            raise InvalidSignature("signature does not verify")
        return signer.address

    def _require(self, token_id: int) -> bytes:
        owner = self.owners.get(token_id)
        if owner is None:
            raise UnknownToken(f"token {token_id} does not exist")
        return owner

    # -- queries --------------------------------------------------------------

    def owner_of(self, token_id: int) -> bytes | None:
        return self.owners.get(token_id)

    def tokens_of(self, owner: bytes) -> tuple[list[int], int]:
        """Token ids held by ``owner`` and the number of accounts read (the contract)."""
        return sorted(t for t, o in self.owners.items() if o == owner), 1

    def royalty_info(self, token_id: int, sale_price: int) -> tuple[bytes, int]:
        self._require(token_id)
        return self.royalty_receiver, sale_price * self.royalty_bps // _BPS

    def mint_count(self) -> int:
        return sum(1 for h in self.history if h.kind == "mint")

    def burn_count(self) -> int:
        return sum(1 for h in self.history if h.kind == "burn")

    # -- commands -------------------------------------------------------------

    def _mint_into(self, tx: str, owner: bytes, uri: str) -> int:
        token_id = self.next_id
        self.next_id += 1
        self.owners[token_id] = owner
        self.uris[token_id] = uri
        self.history.append(HistoryEntry(tx, "mint", token_id, None, owner))
        self._emit("mint", tx=tx, token_id=token_id, owner=owner, uri=uri)
        return token_id

    def mint(self, owner: bytes, uri: str) -> int:
        if len(owner) != 20:
            raise ValueError("owner must be a 20-byte address")
        return self._mint_into(self._new_tx(self.gas.batch_cost(1)), owner, uri)

    def batch_mint(self, owner: bytes, uris: Sequence[str]) -> list[int]:
        if not uris:
            raise ValueError("batch mint needs at least one uri")
        if len(owner) != 20:
            raise ValueError("owner must be a 20-byte address")
        cost = self.gas.batch_cost(len(uris))
        if cost > self.gas.block_gas_limit:
            raise GasLimitExceeded(
                f"batch of {len(uris)} needs {cost} gas, block limit is {self.gas.block_gas_limit}"
            )
        tx = self._new_tx(cost)
        self._emit("batch", tx=tx, size=len(uris), gas=cost)
        return [self._mint_into(tx, owner, uri) for uri in uris]

    def approve(self, signer: Keypair, spender: bytes, token_id: int) -> None:
        caller = self.authenticate(signer, b"approve" + spender + token_id.to_bytes(32, "big"))
        owner = self._require(token_id)
        if caller != owner and (owner, caller) not in self.operators:
            raise NotOwner(f"only the owner or an operator may approve token {token_id}")
        self.approvals[token_id] = spender
        self._emit("approve", token_id=token_id, spender=spender)

    def set_approval_for_all(self, signer: Keypair, operator: bytes, approved: bool) -> None:
        caller = self.authenticate(signer, b"operator" + operator + bytes([approved]))
        if approved:
            self.operators.add((caller, operator))
        else:
            self.operators.discard((caller, operator))
        self._emit("operator", owner=caller, operator=operator, approved=approved)

    def transfer_from(self, signer: Keypair, from_addr: bytes, to_addr: bytes, token_id: int) -> str:
        caller = self.authenticate(signer, b"transfer" + from_addr + to_addr + token_id.to_bytes(32, "big"))
        owner = self._require(token_id)
        if owner != from_addr:
            raise NotOwner(f"token {token_id} is not held by the stated sender")
        allowed = caller == owner or self.approvals.get(token_id) == caller or (owner, caller) in self.operators
        if not allowed:
            raise NotOwner(f"caller is neither owner nor approved for token {token_id}")
        tx = self._new_tx(self.gas.base_per_tx)
        self.owners[token_id] = to_addr
        self.approvals.pop(token_id, None)
        self.history.append(HistoryEntry(tx, "transfer", token_id, owner, to_addr))
        self._emit("transfer", tx=tx, token_id=token_id, prior=owner, owner=to_addr)
        return tx

    def burn(self, signer: Keypair, token_id: int) -> str:
        caller = self.authenticate(signer, b"burn" + token_id.to_bytes(32, "big"))
        owner = self._require(token_id)
        if caller != owner:
            raise NotOwner(f"only the owner may burn token {token_id}")
        tx = self._new_tx(self.gas.base_per_tx)
        del self.owners[token_id]
        self.approvals.pop(token_id, None)
        self.burned.add(token_id)
        self.history.append(HistoryEntry(tx, "burn", token_id, owner, None))
        self._emit("burn", tx=tx, token_id=token_id, prior=owner)
        return tx


def mint_source(ledger: EvmLikeLedger, owner: bytes, uri: str) -> int:
    return ledger.mint(owner, uri)


def batch_mint_source(ledger: EvmLikeLedger, owner: bytes, uris: Sequence[str]) -> list[int]:
    return ledger.batch_mint(owner, uris)
