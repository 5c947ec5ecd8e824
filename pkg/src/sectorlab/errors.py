"""Exception and warning types shared across the laboratory."""


class SectorLabError(Exception):
    """Base class for all sectorlab errors."""


class MalformedWordError(SectorLabError):
    """A word references an unknown generator or is otherwise ill-formed."""


class PresentationMismatchError(SectorLabError):
    """Two words (or a word and a representation) live over different presentations."""


class NotApplicableError(SectorLabError):
    """A check was requested on an object it is not defined for."""


class AmbiguousLiftError(SectorLabError):
    """A discrete path violates its continuity bound, so the lift is not unique."""


class NonLoopError(SectorLabError):
    """Winding extraction requires matching endpoints."""


class DeltaLimitError(SectorLabError):
    """A kernel was requested at equal times where it degenerates to a delta."""


class CutoffTooSmallError(SectorLabError):
    """A winding/band truncation could not be certified at the requested budget."""


class AliasingError(SectorLabError):
    """A discrete transform has too few samples for the requested coefficients."""


class ReflectionContaminationError(SectorLabError):
    """A line-oracle packet reached the absorbing margin of the periodic box."""


class JacobiConvergenceError(SectorLabError):
    """The cyclic Jacobi sweep limit was exhausted before the off-norm target."""


class ConfigError(SectorLabError):
    """An experiment configuration failed schema validation."""


class TruncationWarning(UserWarning):
    """A mode or winding truncation left more tail mass than the certification target."""
