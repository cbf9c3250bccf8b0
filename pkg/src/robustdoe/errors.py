"""Exception types shared across the package."""


class DesignFormatError(ValueError):
    """A design file or text block could not be parsed as a two-level design."""


class DesignDimensionError(ValueError):
    """Rows of a design text block have inconsistent lengths."""


class CapacityError(RuntimeError):
    """A submodel lattice is too large to enumerate explicitly.

    Symmetric priors over a full second-order maximal model can use the
    closed-form weight engine instead (``weight_table_exchangeable``).
    """


class DegeneratePriorError(ValueError):
    """Every eligible submodel has zero prior mass, so weights cannot be normalized."""


class SymmetryError(ValueError):
    """A weight table is not exchangeable across factors where symmetry is required."""


class AllInestimableError(RuntimeError):
    """No eligible submodel is estimable, so the harmonic criteria are undefined."""
