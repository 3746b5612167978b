"""Exception hierarchy for the toolchain.

Every stage raises a subclass of ToolchainError so the CLI can map
failures onto its exit-code contract (1 = validation/gate, 2 = config,
3 = external solver).
"""


class ToolchainError(Exception):
    """Base class for all toolchain failures."""


# --- geometry ---------------------------------------------------------------

class DegeneratePanel(ToolchainError):
    pass


# --- mesh ingestion ---------------------------------------------------------

class MalformedMesh(ToolchainError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AmbiguousStations(ToolchainError):
    pass


class EmptyComponent(ToolchainError):
    pass


# --- network building -------------------------------------------------------

class OpenSectionLoop(ToolchainError):
    pass


class NonMatchingSectionCounts(ToolchainError):
    pass


class AsymmetricGeometry(ToolchainError):
    pass


class MissingTrailingEdge(ToolchainError):
    pass


# --- abutment ---------------------------------------------------------------

class InsufficientPoints(ToolchainError):
    pass


class IllConditionedFit(ToolchainError):
    pass


class CountMismatch(ToolchainError):
    pass


class GapTooLarge(ToolchainError):
    pass


# --- deck formats -----------------------------------------------------------

class FieldOverflow(ToolchainError):
    pass


class FieldParseError(ToolchainError):
    pass


class MalformedLawgs(ToolchainError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GridSizeMismatch(ToolchainError):
    pass


class MalformedAux(ToolchainError):
    pass


class MalformedDeck(ToolchainError):
    pass


class UnresolvedAbutment(ToolchainError):
    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


class MissingBoundaryCondition(ToolchainError):
    pass


# --- solver -----------------------------------------------------------------

class SingularMatrix(ToolchainError):
    pass


# --- viscous ----------------------------------------------------------------

class OutOfValidityRange(ToolchainError):
    pass


# --- results ----------------------------------------------------------------

class MalformedAgps(ToolchainError):
    def __init__(self, message, network=None, line=None):
        parts = []
        if network:
            parts.append(f"network {network!r}")
        if line is not None:
            parts.append(f"line {line}")
        if parts:
            message = f"{', '.join(parts)}: {message}"
        super().__init__(message)
        self.network = network
        self.line = line


class MalformedFfmf(ToolchainError):
    pass


class UnknownCase(ToolchainError):
    pass


# --- pipeline ---------------------------------------------------------------

class ConfigError(ToolchainError):
    pass


class ExternalSolverFailure(ToolchainError):
    def __init__(self, message, returncode=None, stdout="", stderr=""):
        super().__init__(message)
        self.returncode = returncode
        self.stdout = stdout
        self.stderr = stderr
