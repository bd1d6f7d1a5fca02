class RigidityError(Exception):
    """Base class for every domain failure raised by the rigidity package."""


class VertexOutOfRange(RigidityError, ValueError):
    def __init__(self, vertex: int, n: int):
        super().__init__(f"Vertex {vertex} is out of range for a structure on {n} vertices")
        self.vertex = vertex
        self.n = n


class KindMismatch(RigidityError, ValueError):
    pass


class BudgetExhausted(RigidityError):
    def __init__(self, message: str, found: list[int] | None = None):
        super().__init__(message)
        self.found = found or []


class CapExceeded(RigidityError):
    pass


class ExtractionFailed(RigidityError):
    def __init__(self, message: str, largest: list[int] | None = None):
        super().__init__(message)
        self.largest = largest or []


class ProbeUndecided(RigidityError):
    pass


class DisconnectedGraph(RigidityError, ValueError):
    pass


class UnverifiedFamily(RigidityError, ValueError):
    pass


class ConstructionFailed(RigidityError):
    pass
