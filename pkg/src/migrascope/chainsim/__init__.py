"""Desk-scale dual-ledger simulator used to check predicted mismatches
against observed behavior."""

from .bridge import Bridge, MigrationRecord, Oracle, bridge_burn_mint
from .evm import EvmLikeLedger, GasModel, batch_mint_source, mint_source
from .keys import Keypair, KeyDomain, generate, verify_signature
from .observe import AgreementMatrix, Observation, compare_prediction, observe_all, observe_feature
from .pda import derive_pda
from .run import CaseStudyRun, SimConfig, load_config, run_case_study
from .spl import Creator, SplLikeLedger, mint_target

__all__ = [
    "AgreementMatrix",
    "Bridge",
    "CaseStudyRun",
    "Creator",
    "EvmLikeLedger",
    "GasModel",
    "KeyDomain",
    "Keypair",
    "MigrationRecord",
    "Observation",
    "Oracle",
    "SimConfig",
    "SplLikeLedger",
    "batch_mint_source",
    "bridge_burn_mint",
    "compare_prediction",
    "derive_pda",
    "generate",
    "load_config",
    "mint_source",
    "mint_target",
    "observe_all",
    "observe_feature",
    "run_case_study",
    "verify_signature",
]
