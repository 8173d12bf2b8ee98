"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
1 for domain failures, 2 for malformed input or schema problems.
"""


class LsssError(Exception):
    exit_code = 1


class InputError(LsssError, ValueError):
    """Malformed input: bad grids, bad files, out-of-range parameters."""

    exit_code = 2


# latin_core
class InvalidGrid(InputError):
    pass


class InvalidOrder(InputError):
    pass


class InvalidPartial(InputError):
    pass


class InvalidRectangle(InputError):
    pass


class OrderTooLarge(LsssError):
    pass


class NoCompletion(LsssError):
    pass


class Contradiction(LsssError):
    def __init__(self, row: int, col: int):
        super().__init__(f"cell ({row}, {col}) has no legal symbol")
        self.row = row
        self.col = col


# ls_packing
class CorruptPacking(LsssError):
    pass


class NotRecoverable(LsssError):
    pass


# toy_hash
class InvalidParams(InputError):
    pass


class BudgetExceeded(LsssError):
    pass


class DuplicateLeaf(LsssError):
    pass


class IndexOutOfRange(LsssError, IndexError):
    pass


class UnalignedPrefix(InputError):
    pass


# sharing_schemes
class InvalidThreshold(InputError):
    pass


class InvalidParticipants(InputError):
    pass


class EmptyAccessStructure(InputError):
    pass


class NotAuthorized(LsssError):
    pass


class NotACriticalSet(LsssError):
    pass


class WrongSquare(LsssError):
    pass


class IncompleteAssignment(LsssError):
    pass


class NotUnique(LsssError):
    pass


class Inconsistent(LsssError):
    pass


class LengthMismatch(LsssError):
    pass


class CommitmentsAbsent(LsssError):
    pass


# public_store
class SchemaViolation(InputError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
