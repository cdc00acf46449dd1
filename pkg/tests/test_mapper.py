import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
import randprof
from migrascope.arch import Layer, layer_order
from migrascope.errors import UnboundFeature, UnknownPrimitive
from migrascope.features import FeatureId, seed_core_features
from migrascope.mapper import (
    DependencyBinding,
    DependencySet,
    build_dependency_sets,
    closure,
    closure_rounds,
    direct_dependencies,
    feature_layer_matrix,
)

IDENTITY = FeatureId("identity-mechanism")


def test_identity_direct_dependencies(eth_bindings):
    assert direct_dependencies(IDENTITY, eth_bindings) == {
        "state.global-contract-storage",
        "crypto.account.secp256k1-address",
        "id.sequential-numeric",
    }


def test_user_identity_direct_dependencies(eth_bindings):
    assert direct_dependencies(FeatureId("user-cryptographic-identity"), eth_bindings) == {
        "crypto.sig.secp256k1-ecdsa",
        "crypto.addr.from-secp256k1-pubkey",
    }


def test_empty_or_missing_binding():
    with pytest.raises(UnboundFeature):
        direct_dependencies(IDENTITY, [DependencyBinding(IDENTITY, frozenset())])
    with pytest.raises(UnboundFeature):
        direct_dependencies(IDENTITY, [])


def test_closure_trivial_cases(ethereum):
    assert closure(set(), ethereum) == frozenset()
    assert closure({"crypto.hash.keccak256"}, ethereum) == {"crypto.hash.keccak256"}


def test_closure_follows_builds_on(ethereum):
    got = closure({"own.registry.central-tokenid-owner-mapping"}, ethereum)
    assert got == {
        "own.registry.central-tokenid-owner-mapping",
        "state.global-contract-storage",
        "crypto.hash.keccak256",
    }


def test_closure_unknown_id(ethereum):
    with pytest.raises(UnknownPrimitive):
        closure({"no.such.primitive"}, ethereum)


def test_dependency_sets_for_golden_profile(golden, eth_bindings, ethereum, eth_sets):
    assert [ds.feature.name for ds in eth_sets] == golden.names()
    for ds in eth_sets:
        assert ds.direct <= ds.transitive
        for pid in ds.transitive:
            assert ethereum.by_id[pid].builds_on <= ds.transitive
    assert build_dependency_sets(golden, eth_bindings, ethereum) == eth_sets


def test_unknown_primitive_names_the_feature(golden, ethereum):
    bindings = [DependencyBinding(FeatureId(n), frozenset({"crypto.hash.keccak256"})) for n in golden.names()]
    bindings[2] = DependencyBinding(golden.ids()[2], frozenset({"ghost"}))
    with pytest.raises(UnknownPrimitive, match="transfer-logic"):
        build_dependency_sets(golden, bindings, ethereum)


def test_single_root_binding(ethereum):
    fp = seed_core_features()
    bindings = [DependencyBinding(f, frozenset({"crypto.hash.keccak256"})) for f in fp.ids()]
    sets = build_dependency_sets(fp, bindings, ethereum)
    assert all(len(ds.transitive) == 1 for ds in sets)


def test_matrix_core_rows_touch_crypto_layer(eth_sets, ethereum):
    core = [ds for ds in eth_sets if ds.feature.kind == "core"]
    matrix = feature_layer_matrix(core, ethereum)
    for f in matrix.rows:
        assert matrix.cell(f, Layer.CRYPTOGRAPHIC)


def test_matrix_partitions_each_row(eth_sets, ethereum):
    matrix = feature_layer_matrix(eth_sets, ethereum)
    for ds in eth_sets:
        cells = [matrix.cell(ds.feature, layer) for layer in layer_order()]
        assert matrix.row(ds.feature) == ds.transitive
        assert sum(len(c) for c in cells) == len(ds.transitive)


def test_empty_matrix(ethereum):
    assert feature_layer_matrix([], ethereum).rows == ()


def test_render_dots(eth_sets, ethereum):
    text = feature_layer_matrix(eth_sets, ethereum).render_dots()
    assert text.count("\n") == 2 + len(eth_sets)
    assert "| User cryptographic identity | ● |  |  |  |" in text


def test_dependency_set_json_round_trip(eth_sets):
    for ds in eth_sets:
        assert DependencySet.from_json(ds.to_json()) == ds


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_closure_properties(seed):
    rng = random.Random(seed)
    profile = randprof.random_profile(rng)
    ids = [p.id for p in profile.primitives]
    edges = {p.id: set(p.builds_on) for p in profile.primitives}
    small = set(rng.sample(ids, rng.randint(0, len(ids))))
    big = small | set(rng.sample(ids, rng.randint(0, len(ids))))
    got, rounds = closure_rounds(small, profile)
    assert got == oracles.reachable(small, edges)
    assert closure(got, profile) == got
    assert closure(small, profile) <= closure(big, profile)
    assert rounds <= len(ids)
