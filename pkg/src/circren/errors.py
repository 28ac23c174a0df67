"""Exception hierarchy shared by all circren modules.

Exit-code classes for the CLI: ConfigError -> 2, NumericalError -> 3,
StructuralError -> 4.
"""


class CircrenError(Exception):
    pass


class ConfigError(CircrenError):
    pass


class NumericalError(CircrenError):
    pass


class StructuralError(CircrenError):
    pass


class DomainError(NumericalError):
    """A point or interval lies outside the domain where it is needed."""

    def __init__(self, msg, distance=None):
        super().__init__(msg)
        self.distance = distance


class NonFiniteSampleError(NumericalError):
    def __init__(self, node, value):
        super().__init__(f"non-finite sample {value!r} at node {node!r}")
        self.node = node
        self.value = value


class CompositionRangeError(NumericalError):
    def __init__(self, msg, escape):
        super().__init__(f"{msg} (max escape distance {escape:.3e})")
        self.escape = escape


class NearSingularInverseError(NumericalError):
    def __init__(self, x, deriv):
        super().__init__(f"derivative {deriv:.3e} below threshold at x={x!r}")
        self.x = x
        self.deriv = deriv


class ChainIntegrityError(StructuralError):
    def __init__(self, msg, stage=None):
        super().__init__(msg if stage is None else f"stage {stage}: {msg}")
        self.stage = stage


class ChainStructureError(StructuralError):
    pass


class CollisionError(StructuralError):
    """The two critical orbits collide at the working depth (order-9 path)."""


class NonRenormalizableError(StructuralError):
    pass


class RationalRotationError(NumericalError):
    pass


class DepthError(StructuralError):
    pass


class PartitionIntegrityError(NumericalError):
    pass


class ValidationFailure(StructuralError):
    pass


class SolverFailure(NumericalError):
    def __init__(self, stage, msg):
        super().__init__(f"solver stage '{stage}': {msg}")
        self.stage = stage
