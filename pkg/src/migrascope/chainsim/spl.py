"""Account/PDA ledger: every mint, token balance and metadata record is its
own rent-funded account at a derived address."""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field
from typing import Any, Sequence

from .. import jsonio
from ..errors import (
    AccountExists,
    ComputeBudgetExceeded,
    InvalidSignature,
    NotOwner,
    SimulationError,
    UnknownToken,
    WrongKeyDomain,
)
from .keys import Keypair, KeyDomain, verify_signature
from .pda import derive_pda, program_id
from .transcript import Transcript

CHAIN = "target"

TOKEN_PROGRAM = program_id("spl-token")
ATA_PROGRAM = program_id("associated-token-account")
METADATA_PROGRAM = program_id("token-metadata")
NFT_PROGRAM = program_id("collection-minter")

MINT = "mint"
TOKEN_ACCOUNT = "token-account"
METADATA = "metadata"


@dataclass(frozen=True)
class RentSchedule:
    mint: int = 1_461_600
    token_account: int = 2_039_280
    metadata: int = 5_616_720

    def for_kind(self, kind: str) -> int:
        return {MINT: self.mint, TOKEN_ACCOUNT: self.token_account, METADATA: self.metadata}[kind]


@dataclass(frozen=True)
class ComputeModel:
    budget: int = 200_000
    per_mint: int = 60_000
    per_transfer: int = 6_000

    def max_mints_per_tx(self) -> int:
        return self.budget // self.per_mint


@dataclass
class AccountRecord:
    address: bytes
    kind: str
    authority: bytes  # owning program
    rent: int
    payer: bytes
    data: dict[str, Any]


@dataclass(frozen=True)
class Creator:
    address: bytes
    share: int
    verified: bool = True


def token_account_address(owner: bytes, mint: bytes) -> bytes:
    return derive_pda([owner, TOKEN_PROGRAM, mint], ATA_PROGRAM)[0]


def metadata_address(mint: bytes) -> bytes:
    return derive_pda([b"metadata", METADATA_PROGRAM, mint], METADATA_PROGRAM)[0]


@dataclass
class SplLikeLedger:
    rent: RentSchedule = field(default_factory=RentSchedule)
    compute: ComputeModel = field(default_factory=ComputeModel)
    transcript: Transcript | None = None
    accounts: dict[bytes, AccountRecord] = field(default_factory=dict)
    # mint -> token accounts for that mint; plays the role of the runtime's
    # per-mint account index so owner_of stays a direct lookup
    holders: dict[bytes, set[bytes]] = field(default_factory=dict)
    rent_balance: dict[bytes, int] = field(default_factory=dict)
    tx_log: list[tuple[str, str, tuple[bytes, ...]]] = field(default_factory=list)

    # -- plumbing -------------------------------------------------------------

    def _new_tx(self, kind: str, touched: Sequence[bytes], units: int) -> str:
        if units > self.compute.budget:
            raise ComputeBudgetExceeded(f"{kind} needs {units} compute units, budget is {self.compute.budget}")
        digest = hashlib.sha256(b"spl-tx" + len(self.tx_log).to_bytes(8, "big") + b"".join(touched))
        tx = digest.hexdigest()
        self.tx_log.append((tx, kind, tuple(touched)))
        return tx

    def _emit(self, event: str, **fields) -> None:
        if self.transcript is not None:
            self.transcript.emit(CHAIN, event, **fields)

    @staticmethod
    def authenticate(signer: Keypair, payload: bytes) -> bytes:
        if signer.domain is not KeyDomain.ED25519_EDDSA:
            raise WrongKeyDomain(f"target ledger requires ed25519 signatures, got {signer.domain.value}")
        if not verify_signature(KeyDomain.ED25519_EDDSA, signer.public, payload, signer.sign(payload)):
            raise InvalidSignature("signature does not verify")
        return signer.address

    def _create(self, address: bytes, kind: str, authority: bytes, payer: bytes, data: dict[str, Any]) -> None:
        if address in self.accounts:
            raise AccountExists(f"{kind} account {address.hex()} already exists")
        deposit = self.rent.for_kind(kind)
        self.accounts[address] = AccountRecord(address, kind, authority, deposit, payer, data)
        self.rent_balance[payer] = self.rent_balance.get(payer, 0) + deposit
        if kind == TOKEN_ACCOUNT:
            self.holders.setdefault(data["mint"], set()).add(address)
        self._emit("create", kind=kind, address=address, payer=payer, rent=deposit)

    def _token_account(self, address: bytes) -> AccountRecord:
        acct = self.accounts.get(address)
        if acct is None or acct.kind != TOKEN_ACCOUNT:
            raise UnknownToken(f"no token account at {address.hex()}")
        return acct

    # -- queries --------------------------------------------------------------

    def mints(self) -> list[bytes]:
        return sorted(a for a, r in self.accounts.items() if r.kind == MINT)

    def owner_of(self, mint: bytes) -> bytes | None:
        for address in sorted(self.holders.get(mint, ())):
            acct = self.accounts[address]
            if acct.data["amount"] == 1:
                return acct.data["owner"]
        return None

    def tokens_of(self, owner: bytes) -> tuple[list[bytes], int]:
        """Mints held by ``owner`` and the number of accounts visited.

        No account is keyed by owner alone, so the answer needs a scan."""
        found = []
        visited = 0
        for acct in self.accounts.values():
            visited += 1
            if acct.kind == TOKEN_ACCOUNT and acct.data["owner"] == owner and acct.data["amount"] == 1:
                found.append(acct.data["mint"])
        return sorted(found), visited

    def metadata_of(self, mint: bytes) -> dict[str, Any]:
        acct = self.accounts.get(metadata_address(mint))
        if acct is None:
            raise UnknownToken(f"no metadata for mint {mint.hex()}")
        return acct.data

    def exclusivity_violations(self) -> list[bytes]:
        """Mints that do not have exactly one token account holding balance 1."""
        bad = []
        for mint in self.mints():
            held = [a for a in self.holders.get(mint, ()) if self.accounts[a].data["amount"] == 1]
            if len(held) != 1:
                bad.append(mint)
        return bad

    def state_digest(self) -> str:
        """Hash of all account contents; equal digests mean equal ledger state."""
        doc = {
            a.hex(): {
                "kind": r.kind,
                "authority": r.authority.hex(),
                "rent": r.rent,
                "payer": r.payer.hex(),
                "data": _hexify(r.data),
            }
            for a, r in self.accounts.items()
        }
        return hashlib.sha256(jsonio.dumps(doc).encode()).hexdigest()

    def snapshot(self) -> "SplLikeLedger":
        clone = copy.deepcopy(self.__dict__ | {"transcript": None})
        return SplLikeLedger(**clone)

    # -- commands -------------------------------------------------------------

    def mint(
        self,
        creator: Keypair,
        seeds: Sequence[bytes],
        uri: str,
        royalty_bps: int,
        creators: Sequence[Creator],
        *,
        name: str = "",
        owner: bytes | None = None,
    ) -> bytes:
        payer = self.authenticate(creator, b"mint" + b"".join(seeds))
        if not 0 <= royalty_bps <= 10_000:
            raise ValueError("royalty basis points must lie in 0..10000")
        if creators and sum(c.share for c in creators) != 100:
            raise ValueError("creator shares must sum to 100")
        owner = payer if owner is None else owner
        mint_addr, bump = derive_pda(seeds, NFT_PROGRAM)
        if mint_addr in self.accounts:
            raise AccountExists(f"mint {mint_addr.hex()} already exists")
        ata = token_account_address(owner, mint_addr)
        meta = metadata_address(mint_addr)
        tx = self._new_tx("mint", (mint_addr, ata, meta), self.compute.per_mint)
        self._create(mint_addr, MINT, TOKEN_PROGRAM, payer, {"supply": 1, "decimals": 0, "bump": bump})
        self._create(ata, TOKEN_ACCOUNT, TOKEN_PROGRAM, payer, {"mint": mint_addr, "owner": owner, "amount": 1, "delegate": None})
        self._create(
            meta,
            METADATA,
            METADATA_PROGRAM,
            payer,
            {
                "mint": mint_addr,
                "name": name,
                "uri": uri,
                "seller_fee_basis_points": royalty_bps,
                "creators": [{"address": c.address, "share": c.share, "verified": c.verified} for c in creators],
            },
        )
        self._emit("mint", tx=tx, mint=mint_addr, owner=owner, uri=uri, name=name)
        return mint_addr

    def approve(self, signer: Keypair, mint: bytes, delegate: bytes) -> None:
        caller = self.authenticate(signer, b"approve" + mint + delegate)
        acct = self._token_account(token_account_address(caller, mint))
        if acct.data["amount"] != 1:
            raise NotOwner("signer holds no balance for this mint")
        acct.data["delegate"] = delegate
        self._new_tx("approve", (acct.address,), self.compute.per_transfer)
        self._emit("approve", mint=mint, delegate=delegate)

    def transfer(self, signer: Keypair, mint: bytes, holder: bytes, destination_owner: bytes) -> str:
        """Move the unit balance of ``mint`` from ``holder``'s token account.

        The signer must be the holder or the account's delegate."""
        caller = self.authenticate(signer, b"transfer" + mint + holder + destination_owner)
        src = self._token_account(token_account_address(holder, mint))
        if src.data["amount"] != 1:
            raise NotOwner("source account holds no balance for this mint")
        if caller != src.data["owner"] and caller != src.data["delegate"]:
            raise NotOwner("signer is neither the account owner nor its delegate")
        dest_addr = token_account_address(destination_owner, mint)
        tx = self._new_tx("transfer", (src.address, dest_addr), self.compute.per_transfer)
        if dest_addr not in self.accounts:
            self._create(dest_addr, TOKEN_ACCOUNT, TOKEN_PROGRAM, caller, {"mint": mint, "owner": destination_owner, "amount": 0, "delegate": None})
        src.data["amount"] = 0
        src.data["delegate"] = None
        self.accounts[dest_addr].data["amount"] = 1
        self._emit("transfer", tx=tx, mint=mint, prior=holder, owner=destination_owner)
        return tx

    def close_account(self, signer: Keypair, address: bytes) -> int:
        """Close an empty token account and refund its rent to the payer."""
        caller = self.authenticate(signer, b"close" + address)
        acct = self._token_account(address)
        if caller != acct.data["owner"]:
            raise NotOwner("only the account owner may close it")
        if acct.data["amount"] != 0:
            raise SimulationError("cannot close an account holding a balance")
        self._new_tx("close", (address,), self.compute.per_transfer)
        del self.accounts[address]
        self.holders[acct.data["mint"]].discard(address)
        self.rent_balance[acct.payer] -= acct.rent
        self._emit("close", address=address, refund=acct.rent, payer=acct.payer)
        return acct.rent


def _hexify(value: Any) -> Any:
    if isinstance(value, bytes):
        return value.hex()
    if isinstance(value, dict):
        return {k: _hexify(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_hexify(v) for v in value]
    return value


def mint_target(
    ledger: SplLikeLedger,
    creator: Keypair,
    seeds: Sequence[bytes],
    uri: str,
    royalty_bps: int,
    creators_list: Sequence[Creator],
    **kwargs,
) -> bytes:
    return ledger.mint(creator, seeds, uri, royalty_bps, creators_list, **kwargs)
