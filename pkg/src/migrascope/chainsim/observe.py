"""Feature observers over a finished case-study run, and the agreement check
between predicted mismatch classes and what the ledgers actually did."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .. import jsonio, resources
from ..assessor import MismatchClass, PreservationReport
from ..errors import FeatureSetMismatch, FixtureIncomplete, LoadError
from ..features import FeatureId
from .run import CaseStudyRun

EXPECTATIONS_SCHEMA = "migrascope-expectations/1"
SIDES = ("source", "target", "pair")

Flags = Mapping[str, Mapping[str, bool]]


@dataclass(frozen=True)
class Observation:
    """Boolean facts about one feature, grouped by ledger (``pair`` compares both)."""

    feature: FeatureId
    flags: Flags

    def get(self, side: str, name: str) -> bool | None:
        return self.flags.get(side, {}).get(name)

    def with_flag(self, side: str, name: str, value: bool) -> "Observation":
        flags = {s: dict(v) for s, v in self.flags.items()}
        flags.setdefault(side, {})[name] = value
        return Observation(self.feature, flags)

    def to_json(self) -> dict[str, Any]:
        return {"feature": self.feature.name, "flags": {s: dict(sorted(v.items())) for s, v in self.flags.items()}}


# -- individual observers -------------------------------------------------------


def _identity(run: CaseStudyRun) -> Flags:
    minted = sorted(h.token_id for h in run.source_before_bridge.history if h.kind == "mint")
    numeric_source = minted == list(range(1, len(minted) + 1))
    numeric_target = all(isinstance(m, int) for m in run.target.mints())
    labelled = all(
        run.target.metadata_of(r.mint_address)["name"].endswith(f"#{r.token_id}") for r in run.records()
    )
    return {
        "source": {"numeric-id-primary": numeric_source},
        "target": {"numeric-id-primary": numeric_target, "numeric-label-annotation": labelled},
    }


def _native_owner_queries(ledger, owners: Iterable[bytes]) -> bool:
    for owner in owners:
        tokens, visited = ledger.tokens_of(owner)
        if visited > max(1, len(tokens)):
            return False
    return True


def _ownership(run: CaseStudyRun) -> Flags:
    holders = sorted(role for role in run.keys if role.startswith("src:holder"))
    src = _native_owner_queries(run.source_before_bridge, [run.keys[r].address for r in holders])
    tgt = _native_owner_queries(run.target, [run.keys["tgt" + r[3:]].address for r in holders])
    return {"source": {"owner-to-tokens-native": src}, "target": {"owner-to-tokens-native": tgt}}


def _transfer(run: CaseStudyRun) -> Flags:
    def side(prefix: str) -> bool:
        keys = ("owner-transfer", "delegate-transfer", "stranger-rejected")
        return all(run.probes.get(f"{prefix}.{k}", False) for k in keys)

    return {
        "source": {"transfer-owner-or-delegate": side("source")},
        "target": {"transfer-owner-or-delegate": side("target")},
    }


def _metadata(run: CaseStudyRun) -> Flags:
    before = run.source_before_bridge.uris
    same = all(
        run.target.metadata_of(r.mint_address)["uri"] == r.uri == before.get(r.token_id) for r in run.records()
    )
    return {"pair": {"uri-identical": same and bool(run.records())}}


def _royalty(run: CaseStudyRun) -> Flags:
    price = run.config.sale_price_probe
    source = run.source_before_bridge
    receiver = run.oracle.linked(source.royalty_receiver)
    same = bool(run.records())
    for r in run.records():
        meta = run.target.metadata_of(r.mint_address)
        src_receiver, src_amount = source.royalty_info(r.token_id, price)
        bps = meta["seller_fee_basis_points"]
        same &= bps == source.royalty_bps and price * bps // 10_000 == src_amount
        same &= [(c["address"], c["share"]) for c in meta["creators"]] == [(receiver, 100)]
        same &= run.oracle.linked(src_receiver) == receiver
    return {"pair": {"royalty-params-identical": same}}


def _batch(run: CaseStudyRun) -> Flags:
    per_tx = Counter(h.tx for h in run.source_before_bridge.history if h.kind == "mint")
    mint_txs = Counter(tx for tx, kind, _ in run.target.tx_log if kind == "mint")
    bridged_mints_per_tx = max(mint_txs.values(), default=0)
    return {
        "source": {"batch-atomic-single-tx": max(per_tx.values(), default=0) > 1},
        "target": {
            "batch-atomic-single-tx": bridged_mints_per_tx > 1,
            "order-independent": run.probes.get("target.order-independent", False),
        },
    }


def _user_identity(run: CaseStudyRun) -> Flags:
    src_keys = {k.public for role, k in run.keys.items() if role.startswith("src:")}
    tgt_keys = {k.public for role, k in run.keys.items() if role.startswith("tgt:")}
    src_addrs = {k.address for role, k in run.keys.items() if role.startswith("src:")}
    target_owners = {r.target_owner for r in run.records()}
    rejected = run.probes.get("target.rejects-source-keys", False) and run.probes.get(
        "source.rejects-target-keys", False
    )
    reused = bool(src_keys & tgt_keys) or bool(src_addrs & target_owners) or not rejected
    return {"pair": {"key-domain-reused": reused}}


OBSERVERS: dict[str, Callable[[CaseStudyRun], Flags]] = {
    "identity-mechanism": _identity,
    "ownership-representation": _ownership,
    "transfer-logic": _transfer,
    "metadata-linkage": _metadata,
    "royalty-mechanism": _royalty,
    "batch-operations": _batch,
    "user-cryptographic-identity": _user_identity,
}


def observe_feature(run: CaseStudyRun, feature: FeatureId | str) -> Observation:
    if not run.completed:
        raise FixtureIncomplete("the case-study run did not bridge every token")
    fid = FeatureId(feature) if isinstance(feature, str) else feature
    observer = OBSERVERS.get(fid.name)
    if observer is None:
        raise FixtureIncomplete(f"no observer for feature {fid.name!r}")
    return Observation(fid, observer(run))


def observe_all(run: CaseStudyRun, features: Iterable[FeatureId | str]) -> list[Observation]:
    return [observe_feature(run, f) for f in features]


# -- agreement ------------------------------------------------------------------


def load_templates(path: str | Path | None = None) -> dict[str, dict[str, Flags]]:
    raw = jsonio.read(path or resources.SIM_EXPECTATIONS)
    if raw.get("schema") != EXPECTATIONS_SCHEMA:
        raise LoadError(f"unsupported expectations schema {raw.get('schema')!r}")
    return raw["templates"]


@dataclass(frozen=True)
class AgreementRow:
    feature: FeatureId
    predicted: MismatchClass
    consistent: bool
    expected: Flags
    observed: Flags
    mismatches: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "feature": self.feature.name,
            "predicted": self.predicted.value,
            "consistent": self.consistent,
            "expected": {s: dict(v) for s, v in self.expected.items()},
            "observed": {s: dict(v) for s, v in self.observed.items()},
            "mismatches": list(self.mismatches),
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "AgreementRow":
        return cls(
            FeatureId(raw["feature"]),
            MismatchClass(raw["predicted"]),
            bool(raw["consistent"]),
            raw["expected"],
            raw["observed"],
            tuple(raw.get("mismatches", ())),
        )


@dataclass(frozen=True)
class AgreementMatrix:
    rows: tuple[AgreementRow, ...] = field(default_factory=tuple)

    @property
    def consistent_count(self) -> int:
        return sum(1 for r in self.rows if r.consistent)

    def all_consistent(self) -> bool:
        return self.consistent_count == len(self.rows)

    def summary(self) -> str:
        return f"{self.consistent_count}/{len(self.rows)} predictions consistent"

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": "migrascope-agreement/1",
            "rows": [r.to_json() for r in self.rows],
            "summary": self.summary(),
        }

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "AgreementMatrix":
        return cls(tuple(AgreementRow.from_json(r) for r in raw["rows"]))


def compare_prediction(
    report: PreservationReport,
    observations: Iterable[Observation],
    templates: Mapping[str, Mapping[str, Flags]] | None = None,
) -> AgreementMatrix:
    templates = load_templates() if templates is None else templates
    by_feature = {o.feature.name: o for o in observations}
    predicted = [e.feature.name for e in report.entries]
    if set(predicted) != set(by_feature):
        missing = sorted(set(predicted) ^ set(by_feature))
        raise FeatureSetMismatch(f"report and observations disagree on features: {', '.join(missing)}")
    rows = []
    for entry in report.entries:
        obs = by_feature[entry.feature.name]
        expected = templates.get(entry.feature.name, {}).get(entry.mismatch.value)
        if expected is None:
            rows.append(AgreementRow(entry.feature, entry.mismatch, False, {}, obs.flags, ("no expectation template",)))
            continue
        mismatches = tuple(
            f"{side}.{name}: expected {want}, observed {obs.get(side, name)}"
            for side, wanted in sorted(expected.items())
            for name, want in sorted(wanted.items())
            if obs.get(side, name) is not want
        )
        rows.append(AgreementRow(entry.feature, entry.mismatch, not mismatches, expected, obs.flags, mismatches))
    return AgreementMatrix(tuple(rows))
