"""Exception taxonomy.

Numerical failures (continuation, tracing, Newton) and structural failures
(invalid input, degenerate configurations) are kept separate so the CLI can
map them onto distinct exit codes.
"""


class EquicriticalError(Exception):
    """Base class for all package errors."""


class InputError(EquicriticalError):
    """Malformed scenario or invalid argument (CLI exit code 3)."""


class NumericalError(EquicriticalError):
    """A numerical procedure failed to converge or left its domain (exit 2)."""


class WallHit(NumericalError):
    """A critical value entered the clearance disk around 0: the
    configuration is on or near the discriminant wall f(w_i) = 0."""

    def __init__(self, index: int, value: complex = 0j):
        self.index = index
        self.value = value
        super().__init__(f"critical value {index} hit the wall (f(w_{index}) = {value})")


class DegenerateW(InputError):
    """Two prescribed critical points coincide."""


class NoConvergence(NumericalError):
    """Iterative root solving did not converge within the budget."""


class NotSquarefree(NumericalError):
    """Two computed roots are closer than the separation threshold."""


class PathThroughZero(NumericalError):
    """An integration path violated the clearance margin around a root."""


class StrandCollision(NumericalError):
    """Two tracked strands approached below the collision threshold."""

    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(message or f"strand collision at t = {t}")


class NewtonDivergence(NumericalError):
    """Newton correction failed to converge."""

    def __init__(self, t: float = 0.0, message: str = ""):
        self.t = t
        super().__init__(message or f"Newton divergence at t = {t}")


class GaugeBreak(NumericalError):
    """The translation gauge (sum of critical points) drifted."""


class NotAdjacent(EquicriticalError):
    """A push move was requested for a pair whose prongs are not adjacent:
    the approach path never reaches the branched (colliding) sheet."""


class DegenerateProjection(NumericalError):
    """Braid extraction failed for every retry angle."""


class ColorMismatch(InputError):
    """Braid words with incompatible strand colorings were compared."""


class TraceEscapeFailure(NumericalError):
    """A separatrix trace neither escaped to infinity nor was captured."""


class AmbiguousCapture(NumericalError):
    """A separatrix passed too close to a cone point or root to classify
    (near-wall configuration or horizontal saddle connection)."""


class SolveFailure(NumericalError):
    """Basepoint solving exhausted its seed heuristics."""


class ResidualTooLarge(NumericalError):
    """Winding number residual exceeded the integer-rounding tolerance."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"winding residual {residual:.4f} exceeds 0.1")


class ArcThroughPoint(EquicriticalError):
    """An arc passes through (or too close to) a marked point."""


class IsotopyBreakdown(NumericalError):
    """Marking transport lost disjointness or simplicity within budget."""


class ArcsNotDisjoint(EquicriticalError):
    """Arc pair operation requires disjoint interiors."""


class CertificationFailure(EquicriticalError):
    """A loop expected to certify did not (CLI exit code 1)."""
