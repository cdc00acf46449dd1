import hashlib
import random

import pytest
from hypothesis import given, settings, strategies as st

from migrascope.chainsim.evm import EvmLikeLedger, GasModel, batch_mint_source, mint_source
from migrascope.chainsim.keys import KeyDomain, generate, verify_signature
from migrascope.chainsim.pda import derive_pda, program_id
from migrascope.chainsim.spl import (
    ComputeModel,
    Creator,
    SplLikeLedger,
    metadata_address,
    mint_target,
    token_account_address,
)
from migrascope.errors import (
    AccountExists,
    ComputeBudgetExceeded,
    GasLimitExceeded,
    NotOwner,
    SimulationError,
    WrongKeyDomain,
)

SECP, ED = KeyDomain.SECP256K1_ECDSA, KeyDomain.ED25519_EDDSA


@pytest.fixture
def rng():
    return random.Random(1234)


# -- keys -------------------------------------------------------------------------


def test_ethereum_address_is_keccak_of_public_key(rng):
    from migrascope.selectors import keccak256

    key = generate(SECP, rng)
    assert len(key.public) == 65 and key.public[0] == 4
    assert key.address == keccak256(key.public[1:])[-20:]


def test_signatures_are_deterministic(rng):
    for domain in KeyDomain:
        key = generate(domain, rng)
        assert key.sign(b"m") == key.sign(b"m")
        assert verify_signature(domain, key.public, b"m", key.sign(b"m"))
        assert not verify_signature(domain, key.public, b"n", key.sign(b"m"))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.binary(max_size=64))
def test_no_signature_verifies_across_domains(seed, message):
    rng = random.Random(seed)
    a, b = generate(SECP, rng), generate(ED, rng)
    assert not verify_signature(ED, a.public, message, a.sign(message))
    assert not verify_signature(SECP, b.public, message, b.sign(message))
    other = generate(ED, rng)
    assert not verify_signature(ED, other.public, message, a.sign(message)[:64])


# -- source ledger ----------------------------------------------------------------


def _addr(rng):
    return generate(SECP, rng).address


def test_sequential_ids_from_one(rng):
    ledger = EvmLikeLedger()
    owner = _addr(rng)
    assert [mint_source(ledger, owner, f"u{i}") for i in range(3)] == [1, 2, 3]
    assert ledger.owner_of(2) == owner


def test_hundred_mints(rng):
    ledger = EvmLikeLedger()
    ids = [mint_source(ledger, _addr(rng), "u") for _ in range(100)]
    assert ids == list(range(1, 101))
    assert len(ledger.owners) == 100


def test_batch_gas_is_affine():
    gas = GasModel()
    ledger = EvmLikeLedger(gas=gas)
    owner = bytes(19) + b"\x01"
    costs = {}
    for m in (1, 10, 20, 100):
        batch_mint_source(ledger, owner, ["u"] * m)
        costs[m] = ledger.gas_used[ledger.history[-1].tx]
    assert costs[20] - costs[10] == gas.per_mint * 10
    for m, c in costs.items():
        assert c == gas.base_per_tx + gas.per_mint * m


def test_batch_boundary():
    gas = GasModel()
    boundary = (gas.block_gas_limit - gas.base_per_tx) // gas.per_mint
    assert boundary == gas.max_batch() == 599
    ledger = EvmLikeLedger(gas=gas)
    owner = bytes(20)
    assert len(ledger.batch_mint(owner, ["u"] * boundary)) == boundary
    before = dict(ledger.owners), ledger.next_id
    with pytest.raises(GasLimitExceeded):
        ledger.batch_mint(owner, ["u"] * (boundary + 1))
    assert (dict(ledger.owners), ledger.next_id) == before


def test_batch_of_one_equals_single_mint():
    a, b = EvmLikeLedger(), EvmLikeLedger()
    a.mint(bytes(20), "u")
    b.batch_mint(bytes(20), ["u"])
    assert (a.owners, a.uris, a.next_id) == (b.owners, b.uris, b.next_id)


def test_transfer_authority(rng):
    ledger = EvmLikeLedger()
    owner, spender, stranger = (generate(SECP, rng) for _ in range(3))
    t = ledger.mint(owner.address, "u")
    with pytest.raises(NotOwner):
        ledger.transfer_from(stranger, owner.address, stranger.address, t)
    ledger.approve(owner, spender.address, t)
    ledger.transfer_from(spender, owner.address, stranger.address, t)
    assert ledger.owner_of(t) == stranger.address
    assert t not in ledger.approvals


def test_source_rejects_target_keys(rng):
    ledger = EvmLikeLedger()
    with pytest.raises(WrongKeyDomain):
        ledger.burn(generate(ED, rng), 1)


def test_conservation_and_burn_finality(rng):
    ledger = EvmLikeLedger(royalty_bps=500)
    keys = [generate(SECP, rng) for _ in range(3)]
    for i in range(30):
        ledger.mint(keys[i % 3].address, f"u{i}")
    for t in (3, 7, 11):
        ledger.burn(keys[(t - 1) % 3], t)
        assert ledger.mint_count() - ledger.burn_count() == len(ledger.owners)
    nxt = ledger.mint(keys[0].address, "again")
    assert nxt == 31 and not ledger.burned & set(ledger.owners)


def test_royalty_info(rng):
    ledger = EvmLikeLedger(royalty_bps=500, royalty_receiver=b"\x07" * 20)
    t = ledger.mint(_addr(rng), "u")
    assert ledger.royalty_info(t, 10_000) == (b"\x07" * 20, 500)


# -- derived addresses --------------------------------------------------------------


def test_pda_is_deterministic_and_matches_construction():
    pid = program_id("test")
    addr, bump = derive_pda([b"seed", b"\x01"], pid)
    assert derive_pda([b"seed", b"\x01"], pid) == (addr, bump)
    expected = hashlib.sha256(b"seed\x01" + pid + bytes([bump]) + b"PDA").digest()
    assert addr == expected and addr[-1] != 0xFF


def test_pda_skips_rejected_bumps():
    pid = program_id("test")
    # find seeds whose first candidate is rejected, then check the next bump is used
    for i in range(5000):
        seed = i.to_bytes(4, "big")
        first = hashlib.sha256(seed + pid + bytes([255]) + b"PDA").digest()
        if first[-1] == 0xFF:
            assert derive_pda([seed], pid)[1] == 254
            return
    pytest.fail("no rejected first candidate found")


def test_pda_argument_checks():
    with pytest.raises(ValueError):
        derive_pda([], program_id("x"))
    with pytest.raises(ValueError):
        derive_pda([b"x" * 33], program_id("x"))


# -- target ledger ------------------------------------------------------------------


def test_mint_target_layout(rng):
    ledger = SplLikeLedger()
    creator = generate(ED, rng)
    mint = mint_target(ledger, creator, [b"c", b"\x01"], "ipfs://x", 500, [Creator(creator.address, 100)])
    assert ledger.owner_of(mint) == creator.address
    meta = ledger.metadata_of(mint)
    assert meta["seller_fee_basis_points"] == 500 and meta["uri"] == "ipfs://x"
    assert token_account_address(creator.address, mint) in ledger.accounts
    assert metadata_address(mint) in ledger.accounts
    with pytest.raises(AccountExists):
        mint_target(ledger, creator, [b"c", b"\x01"], "ipfs://y", 500, [])


def test_target_rejects_source_keys(rng):
    with pytest.raises(WrongKeyDomain):
        SplLikeLedger().mint(generate(SECP, rng), [b"s"], "u", 0, [])


def test_compute_budget(rng):
    ledger = SplLikeLedger(compute=ComputeModel(budget=1000, per_mint=2000))
    with pytest.raises(ComputeBudgetExceeded):
        ledger.mint(generate(ED, rng), [b"s"], "u", 0, [])


def test_transfer_delegate_and_rent_cycle(rng):
    ledger = SplLikeLedger()
    alice, bob, carol, eve = (generate(ED, rng) for _ in range(4))
    mint = ledger.mint(alice, [b"t"], "u", 0, [])
    ledger.approve(alice, mint, bob.address)
    with pytest.raises(NotOwner):
        ledger.transfer(eve, mint, alice.address, eve.address)
    ledger.transfer(bob, mint, alice.address, carol.address)
    assert ledger.owner_of(mint) == carol.address
    assert ledger.exclusivity_violations() == []

    # carol paid nothing; bob paid for carol's new token account
    before = dict(ledger.rent_balance)
    created = token_account_address(carol.address, mint)
    ledger.transfer(carol, mint, carol.address, alice.address)
    with pytest.raises(SimulationError):
        ledger.close_account(alice, token_account_address(alice.address, mint))
    refund = ledger.close_account(carol, created)
    assert refund == ledger.rent.token_account
    assert ledger.rent_balance == {**before, bob.address: before[bob.address] - refund}


def test_create_close_cycle_nets_to_zero(rng):
    ledger = SplLikeLedger()
    a, b = generate(ED, rng), generate(ED, rng)
    mint = ledger.mint(a, [b"z"], "u", 0, [])
    start = ledger.rent_balance[a.address]
    ledger.transfer(a, mint, a.address, b.address)  # a pays rent for b's new token account
    assert ledger.rent_balance[a.address] == start + ledger.rent.token_account
    ledger.transfer(b, mint, b.address, a.address)
    ledger.close_account(b, token_account_address(b.address, mint))
    assert ledger.rent_balance[a.address] == start


def test_owner_to_tokens_requires_a_scan(rng):
    ledger = SplLikeLedger()
    a = generate(ED, rng)
    for i in range(5):
        ledger.mint(a, [bytes([i])], "u", 0, [])
    tokens, visited = ledger.tokens_of(a.address)
    assert len(tokens) == 5 and visited == len(ledger.accounts) == 15
