import random

import pytest
from hypothesis import given, settings, strategies as st

import randprof
from migrascope import resources
from migrascope.arch import Primitive
from migrascope.assessor import (
    Availability,
    AvailabilityClass,
    MismatchClass,
    PreservationReport,
    assess,
    classify_feature,
    classify_primitive,
    report_problems,
)
from migrascope.errors import EmptyDependencySet, UnknownPrimitive
from migrascope.features import seed_core_features
from migrascope.mapper import DependencyBinding, DependencySet, build_dependency_sets, load_bindings

P, A, X = MismatchClass.NATIVELY_PRESERVED, MismatchClass.PARTIAL_MISMATCH, MismatchClass.COMPLETE_MISMATCH

# Mismatch column of the case-study table for Ethereum -> Solana.
CASE_STUDY = {
    "identity-mechanism": A,
    "ownership-representation": A,
    "transfer-logic": P,
    "metadata-linkage": P,
    "royalty-mechanism": P,
    "batch-operations": A,
    "user-cryptographic-identity": X,
}


def test_secp256k1_signatures_absent_on_solana(ethereum, solana):
    got = classify_primitive("crypto.sig.secp256k1-ecdsa", ethereum, solana)
    assert got.kind is Availability.ABSENT
    assert got.note == "no cross-curve key migration primitive"


def test_central_registry_has_alternative(ethereum, solana):
    got = classify_primitive("own.registry.central-tokenid-owner-mapping", ethereum, solana)
    assert got.kind is Availability.ALTERNATIVE
    assert "per-token-account-ownership" in got.rules


def test_uri_storage_available(ethereum, solana):
    got = classify_primitive("meta.link.string-uri-storage", ethereum, solana)
    assert got.kind is Availability.AVAILABLE
    assert got.target_primitive == "meta.link.string-uri-storage"
    assert "Metaplex" in solana.by_id[got.target_primitive].role


def test_guarantee_superset_counts_as_available(ethereum, solana):
    got = classify_primitive("own.royalty.informational-fields", ethereum, solana)
    assert (got.kind, got.match, got.target_primitive) == (
        Availability.AVAILABLE,
        "guarantees",
        "own.royalty.metaplex-seller-fee",
    )


def test_unknown_source_primitive(ethereum, solana):
    with pytest.raises(UnknownPrimitive):
        classify_primitive("ghost", ethereum, solana)


def test_classify_feature_dominance():
    av, alt, ab = (AvailabilityClass(k) for k in Availability)
    assert classify_feature({"a": av, "b": av}) is P
    assert classify_feature({"a": av, "b": alt}) is A
    assert classify_feature({"a": av, "b": alt, "c": ab}) is X
    with pytest.raises(EmptyDependencySet):
        classify_feature({})


def test_case_study_classes(case_report):
    assert {k: v for k, v in case_report.classes().items()} == CASE_STUDY
    notes = {a.note for a in case_report.entry("user-cryptographic-identity").availability.values()}
    assert notes == {"no cross-curve key migration primitive"}
    assert case_report.has_complete_mismatch()


def test_every_alternative_cites_evidence(case_report):
    for entry in case_report.entries:
        for verdict in entry.availability.values():
            if verdict.kind is Availability.ALTERNATIVE:
                assert verdict.rules or verdict.providers


def test_report_is_sound(case_report, eth_sets):
    assert report_problems(case_report, eth_sets) == []
    entry = case_report.entries[0]
    tampered = PreservationReport(
        case_report.source_platform,
        case_report.target_platform,
        (type(entry)(entry.feature, entry.direct, entry.availability, P, entry.reasoning),),
    )
    assert report_problems(tampered)


def test_report_json_round_trip(case_report):
    assert PreservationReport.from_json(case_report.to_json()) == case_report


def test_empty_dependency_set_is_an_error(ethereum, solana):
    fp = seed_core_features()
    sets = [DependencySet(f, frozenset(), frozenset()) for f in fp.ids()]
    with pytest.raises(EmptyDependencySet):
        assess(fp, sets, ethereum, solana)


def _bind_everything(golden, profile):
    ids = frozenset(p.id for p in profile.primitives)
    return [DependencyBinding(f, ids) for f in golden.ids()]


@pytest.mark.parametrize("platform", ["ethereum", "solana", "flow", "tezos"])
def test_self_migration_preserves_everything(registry, golden, platform):
    profile = registry.lookup(platform)
    path = resources.bindings_for(platform)
    bindings = load_bindings(path) if path is not None else _bind_everything(golden, profile)
    report = assess(golden, build_dependency_sets(golden, bindings, profile), profile, profile)
    assert set(report.classes().values()) == {P}


def _random_sets(rng, fp, profile):
    ids = [p.id for p in profile.primitives]
    bindings = [DependencyBinding(f, frozenset(rng.sample(ids, rng.randint(1, 3)))) for f in fp.ids()]
    return build_dependency_sets(fp, bindings, profile)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_adding_to_target_never_worsens(seed):
    rng = random.Random(seed)
    fp = seed_core_features()
    source = randprof.random_profile(rng, "src")
    target = randprof.random_profile(rng, "tgt", rules=rng.randint(0, 3))
    sets = _random_sets(rng, fp, source)
    before = assess(fp, sets, source, target).classes()
    after = assess(fp, sets, source, randprof.with_extra(rng, target)).classes()
    for name, cls in before.items():
        assert after[name].severity <= cls.severity


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_removing_a_leaf_degrades_exactly_its_dependents(seed):
    rng = random.Random(seed)
    base = randprof.random_profile(rng, "src")
    # one private tag per primitive, so nothing else can stand in for a removed one
    source = base.with_changes(
        primitives=[Primitive(p.id, p.layer, p.role, frozenset({f"only-{p.id}"}), p.builds_on) for p in base.primitives]
    )
    used = {d for p in source.primitives for d in p.builds_on}
    leaf = rng.choice(sorted(p.id for p in source.primitives if p.id not in used))
    target = source.with_changes(primitives=[p for p in source.primitives if p.id != leaf])
    fp = seed_core_features()
    sets = _random_sets(rng, fp, source)
    report = assess(fp, sets, source, target)
    for ds in sets:
        lattice = [Availability.ABSENT if pid == leaf else Availability.AVAILABLE for pid in ds.transitive]
        worst = max(lattice, key=lambda k: k.severity)
        expected = X if worst is Availability.ABSENT else P
        assert report.entry(ds.feature.name).mismatch is expected
