"""Exception hierarchy.

Input-shaped problems subclass ``ValueError`` so callers that only care about
bad arguments can catch that; numerical failures derive from ``CradleError``
alone.
"""


class CradleError(Exception):
    """Base class for every error raised by this package."""


class InputError(CradleError, ValueError):
    """Malformed or out-of-contract input."""


class NotHermitian(InputError):
    pass


class NotUnitary(InputError):
    pass


class InvalidAnchor(InputError):
    """The rank-one direction is not a unit vector of the right size."""


class InvalidProfile(InputError):
    """Requested sampling nodes are not strictly ascending."""


class FrozenLevelsError(InputError):
    """Operation needs a cradle where every level participates."""


class DimensionCapExceeded(InputError):
    pass


class NumericalError(CradleError):
    """A valid input hit a numerical singularity."""


class DegenerateSpectrum(NumericalError):
    def __init__(self, pair, gap, threshold):
        self.pair = tuple(pair)
        self.gap = gap
        self.threshold = threshold
        super().__init__(
            f"eigenvalues {pair[0]} and {pair[1]} collide: gap {gap:.3e} "
            f"below threshold {threshold:.3e}"
        )


class IntermediateDegeneracy(NumericalError):
    def __init__(self, step, pair, gap):
        self.step = step
        self.pair = tuple(pair)
        self.gap = gap
        super().__init__(
            f"spectrum degenerate after step {step}: levels {pair} gap {gap:.3e}"
        )


class CayleySingular(NumericalError):
    """The unitary has an eigenvalue at (or numerically at) 1."""


class AmbiguousGap(NumericalError):
    """Ground and first excited level coincide, so the gap has no direction."""
