"""End-to-end case-study run: mint on the source ledger, distribute, bridge
every token and exercise transfers on the target ledger."""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .. import jsonio, resources
from ..errors import LoadError, NotOwner, WrongKeyDomain
from .bridge import Bridge, MigrationRecord, Oracle
from .evm import EvmLikeLedger, GasModel
from .keys import Keypair, KeyDomain, generate
from .spl import ComputeModel, RentSchedule, SplLikeLedger, token_account_address
from .transcript import Transcript

SIM_SCHEMA = "migrascope-sim/1"


@dataclass(frozen=True)
class SimConfig:
    seed: int = 42
    tokens: int = 100
    batch_size: int = 10
    holders: int = 4
    gas: GasModel = field(default_factory=GasModel)
    rent: RentSchedule = field(default_factory=RentSchedule)
    compute: ComputeModel = field(default_factory=ComputeModel)
    royalty_bps: int = 500
    sale_price_probe: int = 1_000_000
    oracle_enabled: bool = True
    collection_tag: str = "casestudy"
    collection_name: str = "CaseStudyNFT"
    uri_prefix: str = "ipfs://example/"

    def __post_init__(self) -> None:
        if self.tokens < 1 or self.batch_size < 1 or self.holders < 2:
            raise ValueError("need at least one token, a batch size of one and two holders")
        if len(self.collection_tag.encode()) > 32:
            raise ValueError("collection tag must fit a 32-byte seed")

    def uri(self, token_id: int) -> str:
        return f"{self.uri_prefix}{token_id}.json"

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "SimConfig":
        if raw.get("schema") != SIM_SCHEMA:
            raise LoadError(f"unsupported simulation config schema {raw.get('schema')!r}")
        try:
            collection = raw.get("collection", {})
            return cls(
                seed=int(raw["seed"]),
                tokens=int(raw["tokens"]),
                batch_size=int(raw["batch_size"]),
                holders=int(raw["holders"]),
                gas=GasModel(**raw.get("gas", {})),
                rent=RentSchedule(**raw.get("rent", {})),
                compute=ComputeModel(**raw.get("compute", {})),
                royalty_bps=int(raw["royalty_bps"]),
                sale_price_probe=int(raw.get("sale_price_probe", 1_000_000)),
                oracle_enabled=bool(raw.get("oracle_enabled", True)),
                collection_tag=collection.get("tag", "casestudy"),
                collection_name=collection.get("name", "CaseStudyNFT"),
                uri_prefix=collection.get("uri_prefix", "ipfs://example/"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"bad simulation config: {exc}") from None


def load_config(path: str | Path | None = None, *, seed: int | None = None) -> SimConfig:
    config = SimConfig.from_json(jsonio.read(path or resources.SIM_CONFIG))
    return config if seed is None else replace(config, seed=seed)


@dataclass
class CaseStudyRun:
    config: SimConfig
    keys: dict[str, Keypair]
    source: EvmLikeLedger
    source_before_bridge: EvmLikeLedger
    target: SplLikeLedger
    oracle: Oracle
    bridge: Bridge
    transcript: Transcript
    probes: dict[str, bool] = field(default_factory=dict)
    completed: bool = False

    def records(self) -> list[MigrationRecord]:
        return [self.bridge.records[t] for t in sorted(self.bridge.records)]

    def summary(self) -> dict[str, Any]:
        return {
            "seed": self.config.seed,
            "source_mints": self.source.mint_count(),
            "source_burns": self.source.burn_count(),
            "target_mints": len(self.target.mints()),
            "bridged": len(self.bridge.records),
            "probes": dict(sorted(self.probes.items())),
            "target_state": self.target.state_digest(),
        }


def _keys(config: SimConfig, rng: random.Random) -> dict[str, Keypair]:
    keys: dict[str, Keypair] = {}
    roles = ["creator", "operator", "stranger"] + [f"holder{i}" for i in range(config.holders)]
    for role in roles:
        keys[f"src:{role}"] = generate(KeyDomain.SECP256K1_ECDSA, rng)
    # fresh target keys, never derived from the source keys
    for role in roles + ["bridge", "oracle"]:
        keys[f"tgt:{role}"] = generate(KeyDomain.ED25519_EDDSA, rng)
    return keys


def _rejected(action) -> bool:
    try:
        action()
    except (NotOwner, WrongKeyDomain):
        return True
    return False


def run_case_study(config: SimConfig | None = None) -> CaseStudyRun:
    config = config or SimConfig()
    rng = random.Random(config.seed)
    keys = _keys(config, rng)
    transcript = Transcript()
    creator = keys["src:creator"]
    operator = keys["src:operator"]
    holders = [keys[f"src:holder{i}"] for i in range(config.holders)]
    probes: dict[str, bool] = {}

    # -- source: batch mint, then distribute through owner, approval and operator paths
    source = EvmLikeLedger(config.royalty_bps, creator.address, config.gas, transcript)
    for start in range(1, config.tokens + 1, config.batch_size):
        stop = min(start + config.batch_size, config.tokens + 1)
        source.batch_mint(creator.address, [config.uri(t) for t in range(start, stop)])
    source.set_approval_for_all(creator, operator.address, True)
    landed = {"owner": [], "delegate": []}
    for t in range(1, config.tokens + 1):
        holder = holders[(t - 1) % len(holders)]
        if t % 3 == 0:
            source.transfer_from(operator, creator.address, holder.address, t)
            path = "delegate"
        elif t % 3 == 1:
            source.set_approval_for_all(creator, operator.address, False)
            source.approve(creator, operator.address, t)
            source.transfer_from(operator, creator.address, holder.address, t)
            source.set_approval_for_all(creator, operator.address, True)
            path = "delegate"
        else:
            source.transfer_from(creator, creator.address, holder.address, t)
            path = "owner"
        landed[path].append(source.owner_of(t) == holder.address)
    source.set_approval_for_all(creator, operator.address, False)
    probes["source.owner-transfer"] = bool(landed["owner"]) and all(landed["owner"])
    probes["source.delegate-transfer"] = bool(landed["delegate"]) and all(landed["delegate"])
    probes["source.stranger-rejected"] = _rejected(
        lambda: source.transfer_from(keys["src:stranger"], holders[0].address, keys["src:stranger"].address, 1)
    )
    source_before = copy.deepcopy(replace(source, transcript=None))

    # -- oracle links every source account to a fresh target account
    oracle = Oracle(keys["tgt:oracle"], enabled=config.oracle_enabled)
    for role in ["creator"] + [f"holder{i}" for i in range(config.holders)]:
        oracle.link(keys[f"src:{role}"], keys[f"tgt:{role}"].address)
    bridge = Bridge(
        oracle,
        keys["tgt:bridge"],
        config.collection_tag.encode(),
        config.collection_name,
        royalty_creator=keys["tgt:creator"].address,
    )

    # -- bridge: burn every token, then mint in two independent orders
    by_address = {h.address: h for h in holders}
    pending = [
        bridge.burn_and_attest(source, t, by_address[source.owner_of(t)]) for t in range(1, config.tokens + 1)
    ]
    first, second = list(pending), list(pending)
    rng.shuffle(first)
    rng.shuffle(second)
    target = SplLikeLedger(config.rent, config.compute, transcript)
    for record in first:
        bridge.complete(target, record, source.royalty_bps)
    shadow = SplLikeLedger(config.rent, config.compute)
    shadow_bridge = Bridge(oracle, bridge.operator, bridge.collection_tag, bridge.collection_name, bridge.royalty_creator)
    for record in second:
        shadow_bridge.complete(shadow, record, source.royalty_bps)
    probes["target.order-independent"] = shadow.state_digest() == target.state_digest()

    # -- target: owner transfer, delegated transfer, rejected stranger, account close
    tgt = [keys[f"tgt:holder{i}"] for i in range(config.holders)]
    owned = {i: target.tokens_of(k.address)[0] for i, k in enumerate(tgt)}
    if owned[0] and owned[1]:
        mint_a, mint_b = owned[0][0], owned[1][0]
        target.transfer(tgt[0], mint_a, tgt[0].address, tgt[1].address)
        probes["target.owner-transfer"] = target.owner_of(mint_a) == tgt[1].address
        target.approve(tgt[1], mint_b, keys["tgt:operator"].address)
        target.transfer(keys["tgt:operator"], mint_b, tgt[1].address, tgt[2].address)
        probes["target.delegate-transfer"] = target.owner_of(mint_b) == tgt[2].address
        probes["target.stranger-rejected"] = _rejected(
            lambda: target.transfer(keys["tgt:stranger"], mint_a, tgt[1].address, keys["tgt:stranger"].address)
        )
        emptied = token_account_address(tgt[0].address, mint_a)
        expected = target.accounts[emptied].rent
        probes["target.rent-refunded"] = target.close_account(tgt[0], emptied) == expected
    probes["target.rejects-source-keys"] = _rejected(lambda: target.authenticate(holders[0], b"probe"))
    probes["source.rejects-target-keys"] = _rejected(lambda: source.authenticate(tgt[0], b"probe"))

    run = CaseStudyRun(config, keys, source, source_before, target, oracle, bridge, transcript, probes)
    run.completed = len(bridge.records) == config.tokens and not bridge.pending
    return run

