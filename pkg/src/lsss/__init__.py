"""Latin square secret sharing with iterative-hash herding."""

from .errors import LsssError
from .latin_core import LatinSquare, PartialLatinSquare, Triple
from .toy_hash import Diamond, HashParams
from .sharing_schemes import AccessStructure, HashShare, PublicStore, TripleShare

__all__ = [
    "AccessStructure",
    "Diamond",
    "HashParams",
    "HashShare",
    "LatinSquare",
    "LsssError",
    "PartialLatinSquare",
    "PublicStore",
    "Triple",
    "TripleShare",
]
