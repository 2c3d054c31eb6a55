"""Exception hierarchy shared by every module."""


class ErmRerError(Exception):
    """Base class for all library errors."""


class AllZeroWeights(ErmRerError, ValueError):
    pass


class NegativeWeight(ErmRerError, ValueError):
    pass


class LengthMismatch(ErmRerError, ValueError):
    pass


class InvalidRisk(ErmRerError, ValueError):
    pass


class NonPositiveLambda(ErmRerError, ValueError):
    pass


class BetaOutOfDomain(ErmRerError, ValueError):
    pass


class NoConvergence(ErmRerError, RuntimeError):
    pass


class NotNormalized(ErmRerError, ValueError):
    pass


class ZeroDerivativeEntry(ErmRerError, ValueError):
    pass


class InvalidDelta(ErmRerError, ValueError):
    pass


class DegenerateCovariance(ErmRerError, ValueError):
    pass


class EmptyDataset(ErmRerError, ValueError):
    pass


class IngestionError(ErmRerError):
    """Raised while reading IDX image/label files."""


class BadMagic(IngestionError):
    pass


class TruncatedFile(IngestionError):
    pass


class DimensionMismatch(IngestionError):
    pass
