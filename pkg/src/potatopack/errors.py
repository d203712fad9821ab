"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two grid sets live on different grids."""


class ModelMismatchError(TypeError):
    """An operation received a set model it does not support."""


class OverlapError(ValueError):
    """Sets expected to have disjoint interiors overlap."""


class GenerationError(RuntimeError):
    """A packing generator could not produce the requested family."""
