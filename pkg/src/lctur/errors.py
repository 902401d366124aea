"""Exception and warning types shared across the package."""


class DimensionError(ValueError):
    """Matrix or grid shapes are incompatible."""


class NonInvertibleBBlock(ValueError):
    """The upper-right block of a symplectic matrix is (numerically) singular.

    The factorized chirp/Fourier/dilation pipeline needs det(b) != 0; callers
    should compose with a Fourier-type matrix or use ``lct.lct_apply``.
    """


class NotIsotropic(ValueError):
    """Quadrature rows do not pairwise commute."""


class RankDeficient(ValueError):
    """Quadrature rows are linearly dependent."""


class NotPure(ValueError):
    """A pure Gaussian state was required but det(gamma) != 4**-N."""


class SizeGuardExceeded(ValueError):
    """Input grid too large for O(M^2) direct quadrature."""


class AliasingWarning(UserWarning):
    """Significant probability mass near the edge of a grid."""
