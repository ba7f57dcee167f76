"""Exact arithmetic and case elimination for friends of 20 (sigma(N)/N = 21/10)."""

from .core_arith import FRIEND_RATIO, FactoredNat, WitnessTooLarge, abundancy, is_friend_of_20, sigma
from .eliminator import eliminate_omega
from .proof import ProofLog, verify_proof_log

__all__ = [
    "FRIEND_RATIO",
    "FactoredNat",
    "ProofLog",
    "WitnessTooLarge",
    "abundancy",
    "eliminate_omega",
    "is_friend_of_20",
    "sigma",
    "verify_proof_log",
]
__version__ = "0.1.0"
