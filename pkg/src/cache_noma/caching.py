"""Cache configurations, subfile volumes and MDS packet arithmetic.

UE ``i`` requests file A and UE ``j`` requests file B.  Each file is split into
a part cached at both UEs (offloaded), a part cached only at the UE holding the
larger fraction (``beta_k1``) and a part cached nowhere (``beta_k2``).
"""
import math
from dataclasses import dataclass
from enum import Enum

TIE_TOL = 1e-12
BITS_PER_MBYTE = 8.0e6


class CacheCase(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


class InvalidCacheError(ValueError):
    pass


@dataclass(frozen=True)
class CacheSpec:
    c_iA: float
    c_iB: float
    c_jA: float
    c_jB: float
    v_a_bits: float
    v_b_bits: float

    def __post_init__(self):
        for name in ("c_iA", "c_iB", "c_jA", "c_jB"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidCacheError(f"{name}={v} is not in [0, 1]")
        if self.v_a_bits < 0 or self.v_b_bits < 0:
            raise InvalidCacheError("file volumes must be nonnegative")

    @classmethod
    def from_mbytes(cls, c, v_a_mbytes, v_b_mbytes):
        c_iA, c_iB, c_jA, c_jB = c
        return cls(c_iA, c_iB, c_jA, c_jB,
                   v_a_mbytes * BITS_PER_MBYTE, v_b_mbytes * BITS_PER_MBYTE)

    @property
    def fractions(self):
        return (self.c_iA, self.c_iB, self.c_jA, self.c_jB)

    def swapped(self):
        """Same physical setup with the UE labels (and hence files) exchanged."""
        return CacheSpec(self.c_jB, self.c_jA, self.c_iB, self.c_iA,
                         self.v_b_bits, self.v_a_bits)


@dataclass(frozen=True)
class CaseInfo:
    case: CacheCase
    min_holder_A: str
    max_holder_A: str
    min_holder_B: str
    max_holder_B: str
    c_min_A: float
    c_max_A: float
    c_min_B: float
    c_max_B: float


@dataclass(frozen=True)
class SubfileVolumes:
    beta_i1: float
    beta_i2: float
    beta_j1: float
    beta_j2: float
    offload_i: float
    offload_j: float

    @property
    def beta(self):
        return (self.beta_i1, self.beta_i2, self.beta_j1, self.beta_j2)


def classify_case(spec):
    """Classify the cache configuration into Cases I-IV.

    On a tie the requesting UE counts as the minimum holder of its own file.
    """
    i_min_A = spec.c_iA <= spec.c_jA + TIE_TOL
    j_min_B = spec.c_jB <= spec.c_iB + TIE_TOL
    if i_min_A and j_min_B:
        case = CacheCase.I
    elif j_min_B:
        case = CacheCase.II
    elif i_min_A:
        case = CacheCase.III
    else:
        case = CacheCase.IV
    return CaseInfo(
        case=case,
        min_holder_A="i" if i_min_A else "j",
        max_holder_A="j" if i_min_A else "i",
        min_holder_B="j" if j_min_B else "i",
        max_holder_B="i" if j_min_B else "j",
        c_min_A=spec.c_iA if i_min_A else spec.c_jA,
        c_max_A=spec.c_jA if i_min_A else spec.c_iA,
        c_min_B=spec.c_jB if j_min_B else spec.c_iB,
        c_max_B=spec.c_iB if j_min_B else spec.c_jB,
    )


def subfile_volumes(spec, info=None):
    """Volumes (bits) of the subfiles that still have to be delivered."""
    if info is None:
        info = classify_case(spec)
    va, vb = spec.v_a_bits, spec.v_b_bits
    off_i = spec.c_iA * va
    off_j = spec.c_jB * vb
    b_i1 = max(info.c_max_A - spec.c_iA, 0.0) * va
    b_j1 = max(info.c_max_B - spec.c_jB, 0.0) * vb
    b_i2 = (1.0 - info.c_max_A) * va
    b_j2 = (1.0 - info.c_max_B) * vb
    return SubfileVolumes(b_i1, b_i2, b_j1, b_j2, off_i, off_j)


def mds_subfile_packets(m_i, m_j, m_c, eps=0.0):
    """Packet counts ``(n_f0, n_f1, n_f2)`` for an ``(m_P, m_C)`` MDS-coded file.

    ``m_i`` and ``m_j`` are the packets cached at each UE; ``m_c(1+eps)``
    distinct packets recover the file.
    """
    if min(m_i, m_j, m_c) < 0 or eps < 0:
        raise InvalidCacheError("packet counts and eps must be nonnegative")
    needed = math.ceil(m_c * (1.0 + eps) - 1e-9)
    if max(m_i, m_j) > needed:
        raise InvalidCacheError("a UE caches more packets than are needed for recovery")
    return min(m_i, m_j), abs(m_j - m_i), needed - max(m_i, m_j)
