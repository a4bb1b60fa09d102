"""Exception hierarchy.  The CLI maps these onto process exit codes."""


class RelPureError(Exception):
    exit_code = 2


class RingMismatch(RelPureError, ValueError):
    pass


class InvalidMap(RelPureError, ValueError):
    """A matrix does not carry source relations into the target's."""


class NotExact(RelPureError, ValueError):
    pass


class ScaleExceeded(RelPureError):
    exit_code = 3

    def __init__(self, what: str, size, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what, self.size, self.cap = what, size, cap


class InfiniteModule(RelPureError):
    exit_code = 2


class InfiniteRing(RelPureError):
    exit_code = 2


class TheoryViolation(RelPureError):
    """An asserted theorem failed on a concrete instance: an implementation bug."""

    exit_code = 1


class CriteriaDisagree(TheoryViolation):
    pass


class InclusionFails(RelPureError):
    """The class is not contained in its transpose class, so the flatness check does not apply."""

    exit_code = 0

    def __init__(self, witness):
        super().__init__(f"member {witness} has no isomorphic copy in the transpose class")
        self.witness = witness


class ParseError(RelPureError):
    def __init__(self, message: str, position=None):
        where = "" if position is None else f" at {position}"
        super().__init__(f"{message}{where}")
        self.position = position
