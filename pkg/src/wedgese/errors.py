"""Exception types raised by wedgese."""


class WedgeDomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class NonIntegerWedgeError(WedgeDomainError):
    """The wedge parameter q = pi/alpha is not a positive integer."""


class TruncationError(ArithmeticError):
    """A truncated series had not converged at its last retained term."""


class NonConvergenceError(ArithmeticError):
    """Quadrature failed the node-doubling test.

    Both estimates are kept so callers can report how far apart they were.
    """

    def __init__(self, coarse, fine, tolerance):
        self.coarse = coarse
        self.fine = fine
        self.tolerance = tolerance
        super().__init__(
            f"quadrature not converged: {coarse!r} vs {fine!r} "
            f"(|diff|={abs(coarse - fine):.3e} >= {tolerance:.1e})"
        )
