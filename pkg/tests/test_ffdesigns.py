"""Difference sets, finite-field frames, and the exact 2-design verifiers."""

import numpy as np
import pytest

from designforge.ffcore import OrderDoesNotDivide, build_field, frobenius
from designforge.fflinalg import BudgetExceeded, EvenCharacteristic, FFMatrix, FFVector
from designforge.ffdesigns import (
    DifferenceSet,
    FFEnsemble,
    InvalidDifferenceSet,
    MetadataMissing,
    NotPrimePower,
    PreconditionViolated,
    ZeroC2,
    certify_tight_2design,
    check_2design_naive,
    check_2design_psi,
    check_etf,
    check_gerzon,
    check_tight_frame,
    check_vanishing_bound,
    decomposition_check,
    gabor_ensemble,
    gram_sample_check,
    harmonic_etf,
    param_search,
    singer_difference_set,
    structural_gabor_verify,
    verify_difference_set,
)
from designforge.ffdesigns import DivisibilityViolated


# ---------------------------------------------------------------------------
# difference sets
# ---------------------------------------------------------------------------


def test_verify_difference_set():
    assert verify_difference_set(7, (0, 1, 3)) == 1
    assert verify_difference_set(13, (0, 1, 3, 9)) == 1
    # quadratic residues mod 11 form an (11, 5, 2) difference set
    assert verify_difference_set(11, (1, 3, 4, 5, 9)) == 2
    with pytest.raises(InvalidDifferenceSet):
        verify_difference_set(7, (0, 1, 2))
    with pytest.raises(InvalidDifferenceSet):
        verify_difference_set(7, (0, 1, 1))


def test_difference_set_create():
    ds = DifferenceSet.create(7, (0, 1, 3))
    assert (ds.modulus, ds.elements, ds.lam) == (7, (0, 1, 3), 1)
    with pytest.raises(InvalidDifferenceSet):
        DifferenceSet.create(13, (0, 1, 2, 3))


def test_singer_known_values():
    assert singer_difference_set(2).elements == (0, 1, 3)
    assert singer_difference_set(3) == DifferenceSet(13, (0, 1, 3, 9), 1)
    assert singer_difference_set(4).elements == (0, 1, 6, 8, 18)
    assert singer_difference_set(5).elements == (0, 1, 4, 10, 12, 17)


@pytest.mark.parametrize("r", [2, 3, 4, 5, 7, 8, 9])
def test_singer_planes(r):
    ds = singer_difference_set(r)
    assert ds.modulus == r * r + r + 1
    assert len(ds.elements) == r + 1
    assert ds.lam == 1
    assert ds.elements[0] == 0
    assert verify_difference_set(ds.modulus, ds.elements) == 1


def test_singer_rejects_non_prime_powers():
    for r in (1, 6, 10, 12):
        with pytest.raises(NotPrimePower):
            singer_difference_set(r)


# ---------------------------------------------------------------------------
# frame checks on the packaged F_9 quadruple
# ---------------------------------------------------------------------------


def test_f9_fixture_shape(f9):
    assert (f9.n, f9.d) == (4, 2)
    assert f9.ctx.order == 9
    v = f9.vector(0)
    assert isinstance(v, FFVector) and len(v) == 2
    rebuilt = FFEnsemble.from_vectors([f9.vector(i) for i in range(4)], f9.metadata)
    assert np.array_equal(rebuilt.data, f9.data)


def test_f9_is_a_zero_tight_etf(f9):
    ctx = f9.ctx
    c = check_tight_frame(f9)
    assert c is not None and c.is_zero()
    res = check_etf(f9)
    assert bool(res)
    a, b, c1 = res.params
    assert (a, b, c1) == (ctx.zero(), ctx.one(), ctx.zero())
    assert check_vanishing_bound(f9)


def test_vanishing_bound_requires_zero_tightness(f9):
    ctx = f9.ctx
    basis = np.zeros((2, 2, 2), dtype=np.int64)
    basis[0, 0, 0] = 1
    basis[1, 1, 0] = 1
    with pytest.raises(PreconditionViolated):
        check_vanishing_bound(FFEnsemble(ctx, basis))


def test_etf_counterexamples(f9):
    ctx = f9.ctx
    e1 = np.zeros((1, 2, 2), dtype=np.int64)
    e1[0, 0, 0] = 1
    mixed = FFEnsemble(ctx, np.concatenate([f9.data, e1]))
    res = check_etf(mixed)
    assert not res
    assert res.counterexample[0] == "norm"
    single = FFEnsemble(ctx, e1)
    assert check_etf(single).counterexample == ("too-few-vectors", 0, 0)


def test_orthonormal_basis_is_a_trivial_etf():
    ctx = build_field(3, 2)
    basis = np.zeros((2, 2, 2), dtype=np.int64)
    basis[0, 0, 0] = 1
    basis[1, 1, 0] = 1
    res = check_etf(FFEnsemble(ctx, basis))
    assert res.params == (ctx.one(), ctx.zero(), ctx.one())


def test_gram_sample_check(f9):
    ctx = f9.ctx
    assert gram_sample_check(f9, ctx.zero(), ctx.one(), pairs=500, seed=1)
    assert not gram_sample_check(f9, ctx.zero(), ctx.scalar(2), pairs=500, seed=1)
    assert not gram_sample_check(f9, ctx.one(), ctx.one(), pairs=500, seed=1)


def test_gerzon_report(f9):
    ctx = f9.ctx
    rep = check_gerzon(f9, ctx.zero(), ctx.one())
    assert rep.bound_holds and rep.span_checked
    assert (rep.n, rep.d) == (4, 2)
    assert rep.span_dim == rep.span_expected == 3
    assert rep.unique_dependency


# ---------------------------------------------------------------------------
# the two 2-design verifiers
# ---------------------------------------------------------------------------


def test_battery_routes_agree(battery):
    for name, ens, c2 in battery:
        naive = check_2design_naive(ens)
        psi = check_2design_psi(ens)
        if c2 is None:
            assert naive is None, name
            assert psi is None, name
        else:
            assert naive is not None and psi is not None, name
            assert naive == psi, name
            assert naive.to_int() == c2, name


def test_design_checks_reject_even_characteristic():
    ctx = build_field(2, 6)
    v = np.zeros((1, 1, 6), dtype=np.int64)
    v[0, 0, 0] = 1
    ens = FFEnsemble(ctx, v)
    with pytest.raises(EvenCharacteristic):
        check_2design_naive(ens)
    with pytest.raises(EvenCharacteristic):
        check_2design_psi(ens)


def test_design_checks_respect_budget(f9):
    with pytest.raises(BudgetExceeded):
        check_2design_naive(f9, budget=1)
    with pytest.raises(BudgetExceeded):
        check_2design_psi(f9, budget=1)


def test_certify_f9(f9):
    ctx = f9.ctx
    cert = certify_tight_2design(f9)
    assert cert.method == "parameter-conditions"
    assert cert.is_design
    assert cert.design == (ctx.zero(), ctx.zero(), ctx.one())
    assert cert.etf == (ctx.zero(), ctx.one(), ctx.zero())
    assert cert.failures == []
    assert "psi-route agrees" in cert.cross_checks


def test_certify_failure_modes(f9):
    ctx = f9.ctx
    e1 = np.zeros((1, 2, 2), dtype=np.int64)
    e1[0, 0, 0] = 1
    cert = certify_tight_2design(FFEnsemble(ctx, np.concatenate([f9.data, e1])))
    assert not cert.is_design
    assert any("not an ETF" in msg for msg in cert.failures)
    basis = np.zeros((2, 2, 2), dtype=np.int64)
    basis[0, 0, 0] = 1
    basis[1, 1, 0] = 1
    cert = certify_tight_2design(FFEnsemble(ctx, basis))
    assert cert.failures == ["n = 2 != d^2 = 4"]


def test_decomposition_audit(f9):
    ctx = f9.ctx
    c2 = check_2design_naive(f9)
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = FFMatrix(ctx, rng.integers(0, 3, size=(2, 2, 2)).astype(np.int64))
        assert decomposition_check(f9, c2, a)
    with pytest.raises(ZeroC2):
        decomposition_check(f9, ctx.zero(), FFMatrix.zeros(ctx, 2, 2))


# ---------------------------------------------------------------------------
# Gabor frames and harmonic frames
# ---------------------------------------------------------------------------


def test_gabor_small_instance():
    ens = gabor_ensemble(2, 6, 3)
    ctx = ens.ctx
    assert (ens.n, ens.d) == (169, 13)
    assert ctx.p == 2 and ctx.deg == 12
    meta = ens.metadata
    assert meta["kind"] == "gabor" and meta["D"] == [0, 1, 3, 9]
    assert meta["omega"] ** 13 == ctx.one()
    res = structural_gabor_verify(ens)
    assert res.params == (ctx.zero(), ctx.one(), ctx.zero())
    # vector s*d + t is omega^{s x} on the translated support D + t
    s, t = 5, 2
    v = ens.vector(s * 13 + t)
    support = sorted((x + t) % 13 for x in meta["D"])
    for x in range(13):
        if x in support:
            assert v[x] == meta["omega"] ** (s * x)
        else:
            assert v[x].is_zero()


def test_gabor_parameter_guards():
    with pytest.raises(DivisibilityViolated):
        gabor_ensemble(3, 2, 3)  # 3 does not divide r - 1 = 2
    with pytest.raises(DivisibilityViolated):
        gabor_ensemble(2, 5, 3)  # 13 does not divide 2^5 + 1


def test_structural_verify_needs_metadata(f9):
    with pytest.raises(MetadataMissing):
        structural_gabor_verify(f9)


def test_harmonic_etfs():
    # 13 | 25 + 1 and 7 | 13 + 1 put the pair values in the fixed subfield
    h13 = harmonic_etf(build_field(5, 4), singer_difference_set(3))
    assert (h13.n, h13.d) == (13, 4)
    ctx = h13.ctx
    res = check_etf(h13)
    assert res.params == (ctx.scalar(4), ctx.scalar(3), ctx.scalar(3))
    h7 = harmonic_etf(build_field(13, 2), singer_difference_set(2))
    assert (h7.n, h7.d) == (7, 3)
    ctx = h7.ctx
    assert check_etf(h7).params == (ctx.scalar(3), ctx.scalar(2), ctx.scalar(7))
    # common pair value must be Frobenius-fixed (it is a field norm)
    b = check_etf(h7).params[1]
    assert frobenius(b) == b


def test_harmonic_needs_matching_order():
    with pytest.raises(OrderDoesNotDivide):
        harmonic_etf(build_field(3, 2), singer_difference_set(3))


# ---------------------------------------------------------------------------
# parameter search
# ---------------------------------------------------------------------------


def test_param_search_small_window():
    rows = param_search(3, 6, 3)
    assert [(r.d, r.p, r.k, r.r, r.design) for r in rows] == [(13, 2, 6, 3, False)]


def test_param_search_bounds():
    assert param_search(1, 1, 1) == []
    for bad in [(0, 5, 5), (5, 0, 5), (5, 5, -1)]:
        with pytest.raises(ValueError):
            param_search(*bad)


def test_param_search_rows_satisfy_divisibility():
    for row in param_search(10, 80, 10):
        d = row.r**2 + row.r + 1
        assert row.d == d
        assert (row.r - 1) % row.p == 0
        assert (row.p**row.k + 1) % d == 0
        # k is minimal
        assert all((row.p**k + 1) % d != 0 for k in range(1, row.k))
        assert row.design == (row.p > 3)
