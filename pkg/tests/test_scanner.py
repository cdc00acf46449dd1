import json

import pytest

import oracles
from migrascope import resources
from migrascope.errors import UnparsableInput
from migrascope.features import derive_feature_profile, load_feature_profile
from migrascope.scanner import default_rules, scan_contract, tokenize

SOURCE = resources.FIXTURE_SOURCE.read_text()
ABI = resources.FIXTURE_ABI.read_text()


def test_signatures_are_echoed():
    src = """
    contract T {
        function transferFrom(address from, address to, uint256 id) public {}
        function royaltyInfo(uint256 id, uint256 price) external view returns (address, uint256) {}
    }
    """
    d = scan_contract(src)
    assert d.signatures() == {"transferFrom(address,address,uint256)", "royaltyInfo(uint256,uint256)"}


def test_counter_increment_in_mint_sets_hint():
    src = """
    contract T {
        uint256 private _tokenIdCounter;
        function mint(address to) public returns (uint256) {
            _tokenIdCounter += 1;
            return _tokenIdCounter;
        }
    }
    """
    assert "sequential-counter" in scan_contract(src).storage_hints


def test_fixture_interface_ids_include_erc721():
    d = scan_contract(SOURCE)
    expected = oracles.interface_id(oracles.ERC721_FUNCTIONS)
    assert expected == "0x80ac58cd"
    assert expected in d.interface_ids
    assert {"0x01ffc9a7", "0x2a55205a", "0x5b5e139f"} <= d.interface_ids


def test_fixture_hints():
    d = scan_contract(SOURCE)
    assert {"sequential-counter", "loop-mint", "tokenid-owner-mapping", "uri-storage"} <= d.storage_hints


def test_interface_declarations_and_internal_functions_excluded():
    names = {f.name for f in scan_contract(SOURCE).functions}
    assert "_mint" not in names and "_transfer" not in names
    assert "batchMint" in names


def test_fixture_source_yields_golden_profile():
    fp = derive_feature_profile(scan_contract(SOURCE), default_rules())
    assert fp == load_feature_profile(resources.GOLDEN_PROFILE)


def test_abi_form_detects_the_same_features():
    from_source = derive_feature_profile(scan_contract(SOURCE), default_rules())
    from_abi = derive_feature_profile(scan_contract(ABI), default_rules())
    assert from_abi.names() == from_source.names()
    assert scan_contract(ABI).signatures() == scan_contract(SOURCE).signatures()


def test_bare_abi_list_accepted():
    abi = json.loads(ABI)["abi"]
    d = scan_contract(json.dumps(abi))
    assert "ownerOf(uint256)" in d.signatures()


@pytest.mark.parametrize("text", ["", "   \n", "contract A { /* never closed", 'string s = "open'])
def test_unparsable_inputs(text):
    with pytest.raises(UnparsableInput):
        scan_contract(text)


def test_comments_and_strings_do_not_leak_functions():
    src = """
    // function fake(uint256) public {}
    contract T {
        string s = "function ghost(address) public";
        /* function hidden() external {} */
        function real() external {}
    }
    """
    assert scan_contract(src).signatures() == {"real()"}


def test_tokenize_strips_comments():
    tokens, _ = tokenize("a // b\n c /* d */ e")
    assert [t.text for t in tokens] == ["a", "c", "e"]


def test_parameter_types_are_normalized():
    src = "contract T { function f(uint a, string memory b, bytes calldata c, address[] storage d) public {} }"
    assert scan_contract(src).signatures() == {"f(uint256,string,bytes,address[])"}
