"""Exception types shared across the trajectory model and planner."""


class MgaError(Exception):
    """Base class for model-level failures."""


class RetrogradeOrbit(MgaError):
    """State has non-positive angular momentum; only direct orbits are modelled."""


class NonElliptic(MgaError):
    """Operation requires a closed orbit but e >= 1."""


class NoIntersection(MgaError):
    """The two conics never cross."""


class DegenerateIntersection(MgaError):
    """The two conics coincide within tolerance; intersection is undefined."""


class PericentreOutOfRange(MgaError):
    """Requested swing-by pericentre violates the body's altitude bounds."""


class DegenerateSwingby(MgaError):
    """Relative velocity at the body is zero; the hyperbola is undefined."""


class LegInfeasible(MgaError):
    """A leg cannot be built for the given parameters (bad orbit, no crossing...)."""


class InfeasiblePlan(MgaError):
    """Plan evaluation ran out of branches at some leg.

    The 1-based index of the first leg with no surviving arrival condition
    is stored in ``leg``.
    """

    def __init__(self, leg: int):
        super().__init__(f"no feasible branch survives leg {leg}")
        self.leg = leg


class MalformedSolution(MgaError, ValueError):
    """Solution vector cannot be decoded against the problem definition."""


class SpaceTooLarge(MgaError):
    """Discrete space exceeds the enumeration cap.

    The estimated number of canonical solutions is stored in ``estimate``.
    """

    def __init__(self, estimate: int, cap: int):
        super().__init__(
            f"{estimate} canonical solutions exceed the enumeration cap {cap}")
        self.estimate = estimate
        self.cap = cap
