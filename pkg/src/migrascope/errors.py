"""Exception types raised by the engine.

Validation problems in profiles are returned as data (see ``arch.Violation``);
everything here signals a caller error or an unusable input.
"""


class MigrascopeError(Exception):
    """Base class for all engine errors."""


class LoadError(MigrascopeError):
    """A data file is malformed or does not match its schema."""


class UnparsableInput(MigrascopeError):
    pass


class RuleConflict(MigrascopeError):
    pass


class UnboundFeature(MigrascopeError):
    pass


class UnknownPrimitive(MigrascopeError):
    pass


class UnknownPlatform(MigrascopeError):
    pass


class InvalidProfile(MigrascopeError):
    def __init__(self, platform_id: str, violations):
        self.platform_id = platform_id
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"profile {platform_id!r} is invalid: {lines}")


class StaleVersion(MigrascopeError):
    pass


class EmptyDependencySet(MigrascopeError):
    pass


class FeatureSetMismatch(MigrascopeError):
    pass


# -- simulator ----------------------------------------------------------------


class SimulationError(MigrascopeError):
    """A ledger rejected a command."""


class GasLimitExceeded(SimulationError):
    pass


class ComputeBudgetExceeded(SimulationError):
    pass


class NotOwner(SimulationError):
    pass


class WrongKeyDomain(SimulationError):
    pass


class InvalidSignature(SimulationError):
    pass


class AccountExists(SimulationError):
    pass


class UnknownToken(SimulationError):
    pass


class DerivationExhausted(SimulationError):
    pass


class AlreadyMigrated(SimulationError):
    pass


class OracleUnavailable(SimulationError):
    pass


class FixtureIncomplete(SimulationError):
    pass
