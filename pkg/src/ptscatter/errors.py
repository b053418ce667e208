"""Exception hierarchy shared by all ptscatter modules."""


class PtScatterError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(PtScatterError, ValueError):
    """An argument broke a documented precondition."""


class NumericalFailure(PtScatterError):
    """A numerical procedure could not deliver a result at the requested accuracy."""


class SpectralSingularityError(NumericalFailure):
    """m22 vanished, so transmission and reflection are not defined at this k."""

    def __init__(self, k, m22_abs):
        self.k = k
        self.m22_abs = m22_abs
        super().__init__(f"|m22| = {m22_abs:.3e} at k = {k}: spectral singularity")


class IntegrationFailure(NumericalFailure):
    def __init__(self, message, k=None, x=None, steps=None):
        self.k = k
        self.x = x
        self.steps = steps
        details = []
        if k is not None:
            details.append(f"k={k}")
        if x is not None:
            details.append(f"x={x:.6g}")
        if steps is not None:
            details.append(f"steps={steps}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class SearchFailure(NumericalFailure):
    """Root counting by the argument principle did not settle."""


class EverywhereFixed(PtScatterError):
    """The Moebius map is the identity, so every point is fixed."""
