import numpy as np
import pytest
from hypothesis import given, strategies as st

from cache_noma.caching import (
    CacheCase, CacheSpec, InvalidCacheError, classify_case, mds_subfile_packets, subfile_volumes,
)

frac = st.floats(0.0, 1.0)


@pytest.mark.parametrize("c, case", [
    ((0.2, 0.8, 0.8, 0.2), CacheCase.I),
    ((0.8, 0.2, 0.2, 0.8), CacheCase.IV),
    ((0.5, 0.5, 0.5, 0.5), CacheCase.I),
    ((0.8, 0.2, 0.2, 0.1), CacheCase.II),
    ((0.1, 0.2, 0.2, 0.8), CacheCase.III),
])
def test_classification(c, case):
    assert classify_case(CacheSpec(*c, 1.0, 1.0)).case is case


def test_ties_make_requester_the_minimum_holder():
    info = classify_case(CacheSpec(0.3, 0.6, 0.3 + 1e-13, 0.6, 1.0, 1.0))
    assert info.min_holder_A == "i" and info.min_holder_B == "j"


def test_default_volumes():
    v = subfile_volumes(CacheSpec(0.2, 0.8, 0.8, 0.2, 1.0, 1.0))
    assert v.beta == pytest.approx((0.6, 0.2, 0.6, 0.2))
    assert (v.offload_i, v.offload_j) == pytest.approx((0.2, 0.2))


def test_nothing_cached():
    v = subfile_volumes(CacheSpec(0, 0, 0, 0, 7.0, 7.0))
    assert v.beta == (0.0, 7.0, 0.0, 7.0)


def test_fully_cached_requests():
    v = subfile_volumes(CacheSpec(1.0, 0.3, 0.4, 1.0, 5.0, 5.0))
    assert v.beta == (0.0, 0.0, 0.0, 0.0)
    assert (v.offload_i, v.offload_j) == (5.0, 5.0)


def test_from_mbytes_uses_bits():
    s = CacheSpec.from_mbytes((0.2, 0.8, 0.8, 0.2), 500, 500)
    assert s.v_a_bits == 4.0e9 and s.v_b_bits == 4.0e9


@pytest.mark.parametrize("bad", [(-0.1, 0, 0, 0), (0, 1.1, 0, 0)])
def test_rejects_out_of_range_fractions(bad):
    with pytest.raises(InvalidCacheError):
        CacheSpec(*bad, 1.0, 1.0)


@given(frac, frac, frac, frac, st.floats(0.01, 1e10), st.floats(0.01, 1e10))
def test_case_is_scale_invariant(a, b, c, d, va, vb):
    assert classify_case(CacheSpec(a, b, c, d, va, vb)).case is classify_case(CacheSpec(a, b, c, d, 1, 1)).case


@given(frac, frac, frac, frac, st.floats(0.0, 1e10), st.floats(0.0, 1e10))
def test_conservation(a, b, c, d, va, vb):
    spec = CacheSpec(a, b, c, d, va, vb)
    v = subfile_volumes(spec)
    assert min(v.beta) >= 0
    assert v.beta_i1 + v.beta_i2 + v.offload_i == pytest.approx(va, rel=1e-12, abs=1e-300)
    assert v.beta_j1 + v.beta_j2 + v.offload_j == pytest.approx(vb, rel=1e-12, abs=1e-300)


@given(frac, frac, frac, frac)
def test_case_iv_mirrors_case_i(a, b, c, d):
    # Swapping which UE holds the larger share of each file turns Case I into Case IV:
    # the uncached parts stay, the side-information parts vanish.
    i_a, j_a = sorted((a, c))
    j_b, i_b = sorted((b, d))
    one = CacheSpec(i_a, i_b, j_a, j_b, 1.0, 1.0)
    four = CacheSpec(j_a, j_b, i_a, i_b, 1.0, 1.0)
    assert classify_case(one).case is CacheCase.I
    v1, v4 = subfile_volumes(one), subfile_volumes(four)
    if classify_case(four).case is CacheCase.IV:
        assert v4.beta_i1 == 0 and v4.beta_j1 == 0
    assert v4.beta_i2 == pytest.approx(v1.beta_i2) and v4.beta_j2 == pytest.approx(v1.beta_j2)


@pytest.mark.parametrize("case_c, zero", [
    ((0.8, 0.2, 0.2, 0.1), "beta_i1"),
    ((0.1, 0.2, 0.2, 0.8), "beta_j1"),
])
def test_single_side_cases_zero_one_subfile(case_c, zero):
    assert getattr(subfile_volumes(CacheSpec(*case_c, 1.0, 1.0)), zero) == 0.0


def test_swapped_spec_exchanges_roles():
    s = CacheSpec(0.1, 0.2, 0.3, 0.4, 5.0, 6.0)
    t = s.swapped()
    assert t.fractions == (0.4, 0.3, 0.2, 0.1) and (t.v_a_bits, t.v_b_bits) == (6.0, 5.0)
    assert t.swapped() == s


@pytest.mark.parametrize("args, expected", [
    ((2, 5, 10, 0.0), (2, 3, 5)),
    ((0, 0, 10, 0.0), (0, 0, 10)),
    ((4, 4, 10, 0.1), (4, 0, 7)),
])
def test_mds_packets(args, expected):
    assert mds_subfile_packets(*args) == expected


def test_mds_rejects_oversized_cache():
    with pytest.raises(InvalidCacheError):
        mds_subfile_packets(11, 2, 10, 0.0)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(1, 50), st.floats(0, 0.5))
def test_mds_counts_cover_file(m_i, m_j, m_c, eps):
    need = int(np.ceil(m_c * (1 + eps) - 1e-9))
    if max(m_i, m_j) > need:
        return
    n0, n1, n2 = mds_subfile_packets(m_i, m_j, m_c, eps)
    assert n0 + n1 + n2 == need
    assert min(n0, n1, n2) >= 0
