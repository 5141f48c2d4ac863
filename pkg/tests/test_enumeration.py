import logging
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lozenge.enumeration import (
    NoConfiguration,
    ParticleConfig,
    StateCapExceeded,
    box_volume_offset,
    brute_force_count,
    build_plancherel,
    build_trapezoid,
    build_tsscpp,
    density,
    densities,
    gv_count,
    partition_function,
    partition_value,
    plancherel_domain_weight,
    plancherel_weight,
    single_path_counts,
    tsscpp_partition_function,
    volume_normalize,
)
from lozenge.lattice import DomainError, Partition, RhombusDomain, build_from_boundaries, build_hexagon
from lozenge.qpoly import HalfQPolynomial, macmahon_series

from oracles import (
    BOX_222_COUNT,
    TSSCPP_COUNTS,
    family_count,
    plane_partitions_in_box,
    standard_tableaux,
    tsscpp_family_count,
)

EMPTY = Partition(())


def box(a, b, c):
    return build_from_boundaries(EMPTY, EMPTY, EMPTY, a, b, c)


def _slices_as_sets(domain):
    return {t: set(domain.slices[t]) for t in domain.times}


def test_unit_box_normalizes_to_one_plus_q():
    z = partition_function(box(1, 1, 1))
    assert volume_normalize(z, 1, 1, 1) == HalfQPolynomial.from_integer_powers([1, 1])


def test_unit_box_two_paths():
    assert partition_value(box(1, 1, 1), 1) == 2


def test_box_222_against_array_enumeration():
    z = partition_value(box(2, 2, 2), 1)
    assert z == BOX_222_COUNT == sum(plane_partitions_in_box(2, 2, 2).values())
    assert gv_count(box(2, 2, 2)) == BOX_222_COUNT


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 1), (3, 2, 2), (1, 2, 3)])
def test_normalized_box_is_volume_series(dims):
    n_l, n_mu, n_nu = dims
    series = volume_normalize(partition_function(box(*dims)), n_l, n_mu, n_nu)
    # an n_mu x n_nu floor with stacks of height at most n_l
    ref = plane_partitions_in_box(n_mu, n_nu, n_l)
    assert series == HalfQPolynomial.from_integer_powers([ref.get(k, 0) for k in range(max(ref) + 1)])


def test_box_333_head():
    series = volume_normalize(partition_function(box(3, 3, 3)), 3, 3, 3)
    assert [series.coefficient(k) for k in range(5)] == [1, 1, 3, 6, 10]
    assert series.truncate(6) == macmahon_series(3).truncate(6)


def test_volume_offset_is_empty_configuration_weight():
    for dims in [(1, 1, 1), (2, 3, 1), (3, 2, 4)]:
        d = box(*dims)
        twice = sum(sum(d.slices[t][: d.n_particles]) for t in d.times)
        assert 2 * box_volume_offset(*dims) == twice


def test_volume_normalize_rejects_mismatch():
    with pytest.raises(ValueError):
        volume_normalize(HalfQPolynomial({0: 1}), 2, 1, 1, N_l=3)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_normalized_box_series_nonnegative_integers(a, b, c):
    s = volume_normalize(partition_function(box(a, b, c)), a, b, c)
    assert s.min_twice_exponent() == 0 and s[0] == 1
    assert all(v.denominator == 1 and v > 0 and k % 2 == 0 for k, v in s.items())
    assert s.evaluate(1) == sum(plane_partitions_in_box(b, c, a).values())


def test_trapezoid_small_matches_path_enumeration():
    d = build_trapezoid(2, Fraction(1, 2), N=2)
    ref = family_count(_slices_as_sets(d), 0, 2, 2, up_weight=Fraction(1, 2))
    assert partition_value(d, 1) == ref == brute_force_count(d)


def test_q_weighting_matches_path_enumeration():
    d = build_hexagon(1, 1, 2)
    q = Fraction(1, 4)
    ref = family_count(_slices_as_sets(d), d.t_min, d.t_max, d.n_particles, q=q)
    assert partition_value(d, q) == ref
    assert partition_function(d).evaluate(q) == ref


def test_series_evaluation_equals_scalar_path():
    d = build_trapezoid(3, Fraction(2, 3))
    assert partition_function(d).evaluate(Fraction(4, 9)) == partition_value(d, Fraction(4, 9))


def test_wrong_n_rejected():
    with pytest.raises(DomainError):
        partition_function(box(1, 1, 1), N=2)


def test_state_cap():
    with pytest.raises(StateCapExceeded):
        partition_function(build_trapezoid(6), state_cap=10)


def test_forced_collision_gives_zero(caplog):
    d = RhombusDomain(0, 2, {0: (0, 2), 1: (1, 5), 2: (0, 2)}, 2)
    assert gv_count(d) == 0
    with caplog.at_level(logging.WARNING, logger="lozenge.enumeration"):
        assert partition_function(d).is_zero()
    assert "no admissible configuration" in caplog.text
    with pytest.raises(NoConfiguration):
        density(d, 2, 1)


def test_gv_single_particle_is_path_count():
    d = build_trapezoid(3, N=1)
    start = ParticleConfig((4,), 0)
    end = ParticleConfig((5,), 3)
    assert gv_count(d, start, end) == single_path_counts(d, 4)[(5, 3)]


def test_gv_rejects_obliged():
    with pytest.raises(ValueError):
        gv_count(build_tsscpp(2))


@st.composite
def small_domains(draw):
    T = draw(st.integers(1, 6))
    N = draw(st.integers(1, 3))
    t0 = draw(st.integers(-2, 2))
    lo = draw(st.integers(-3, 3))
    width = draw(st.integers(N, N + 4))
    slices = {}
    for t in range(t0, t0 + T + 1):
        base = lo + ((lo - t) % 2)
        cells = [base + 2 * i for i in range(width)]
        if t not in (t0, t0 + T):
            holes = draw(st.lists(st.sampled_from(cells), max_size=2, unique=True))
            cells = [c for c in cells if c not in holes]
        slices[t] = tuple(cells)
    # pin both ends so the determinant applies
    for t in (t0, t0 + T):
        chosen = draw(st.lists(st.sampled_from(slices[t]), min_size=N, max_size=N, unique=True))
        slices[t] = tuple(sorted(chosen))
    try:
        return RhombusDomain(t0, t0 + T, slices, N)
    except DomainError:
        return None


@settings(max_examples=40, deadline=None)
@given(small_domains())
def test_engine_equals_determinant(d):
    if d is None:
        return
    assert partition_value(d, 1) == gv_count(d)


@settings(max_examples=25, deadline=None)
@given(small_domains(), st.sampled_from([Fraction(1, 4), Fraction(9, 4)]))
def test_time_reversal(d, q):
    if d is None:
        return
    d = RhombusDomain(d.t_min, d.t_max, d.slices, d.n_particles,
                      alpha={t: Fraction(2) for t in range(d.t_min, d.t_max)},
                      beta={d.t_min: Fraction(1, 3)})
    # reflection keeps every position, so the q-weight is unchanged
    assert partition_function(d) == partition_function(d.reflected())
    assert partition_value(d, q) == partition_value(d.reflected(), q)


@settings(max_examples=25, deadline=None)
@given(small_domains(), st.sampled_from([Fraction(1), Fraction(1, 4), Fraction(3)]))
def test_density_sums_to_n(d, q):
    if d is None or partition_value(d, 1) == 0:
        return
    for t, table in densities(d, None, q=q).items():
        assert table.total() == d.n_particles
        assert all(0 <= p <= 1 for p in table.occupation.values())


def test_unit_box_density():
    table = density(box(1, 1, 1), 1, 0)
    nz = {h: p for h, p in table.occupation.items() if p}
    assert sorted(nz.values()) == [Fraction(1, 2), Fraction(1, 2)]


def test_pinned_slice_density_is_indicator():
    d = box(2, 2, 2)
    table = density(d, 2, d.t_min)
    assert all(p in (0, 1) for p in table.occupation.values())


def test_hexagon_density_sums():
    d = build_hexagon(1, 1, 4)
    assert density(d, 4, 0).total() == 4


def test_integrated_density_and_profile():
    table = density(box(1, 1, 1), 1, 0)
    integ = table.integrated()
    assert integ[max(integ)] == table.occupation[max(integ)]
    assert integ[min(integ)] == 1
    assert set(table.profile()) == set(table.occupation)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tsscpp_small(n):
    assert tsscpp_partition_function(n, 1) == TSSCPP_COUNTS[n] == tsscpp_family_count(n)
    assert brute_force_count(build_tsscpp(n)) == TSSCPP_COUNTS[n]


def test_tsscpp_series_at_one():
    assert tsscpp_partition_function(3).evaluate(1) == 7


def test_plancherel_closed_forms():
    assert plancherel_weight(Partition((), 1), 1) == 1
    assert plancherel_weight(Partition((1,), 1), 1) == 1
    w = plancherel_weight(Partition((2, 1), 2), 2)
    assert w == Fraction(1, 3) == Fraction(standard_tableaux((2, 1)), 6)


@pytest.mark.parametrize("parts", [(1,), (2,), (2, 1), (3, 1), (2, 2)])
def test_plancherel_equals_tableaux_over_factorial(parts):
    import math

    n = len(parts)
    assert plancherel_weight(Partition(parts, n), n) == Fraction(standard_tableaux(parts), math.factorial(sum(parts)))


def test_plancherel_rejects_complex_and_nonsquare():
    mu = Partition((2, 1), 2)
    with pytest.raises(TypeError):
        plancherel_weight(mu, 2, 0.5 + 0j)
    with pytest.raises(ValueError):
        plancherel_weight(mu, 2, Fraction(1, 3))


def test_plancherel_domain_exact_finite_t():
    # the path count over T^|mu| is (1 - 1/T^2)/3 for mu = (2, 1)
    mu = Partition((2, 1), 2)
    for T in (4, 8, 10, 32):
        assert plancherel_domain_weight(mu, 2, T) == Fraction(1, 3) * (1 - Fraction(1, T * T))


@pytest.mark.parametrize("parts,n", [((1,), 1), ((2, 1), 2), ((2,), 2), ((3, 1), 2)])
def test_plancherel_q_limit(parts, n):
    """At q < 1 the domain sum, divided by the empty weight, tends to the closed form times a fixed power."""
    q = Fraction(1, 4)
    mu = Partition(parts, n)
    contents = sum(j - i for i, r in enumerate(parts) for j in range(r))
    errs = []
    for T in (10, 20):
        z = partition_value(build_plancherel(mu, n, T), q)
        twice_empty = sum(2 * (n - i) + t for t in range(T + 1) for i in range(1, n + 1))
        ratio = z / Fraction(1, 2) ** twice_empty
        pred = plancherel_weight(mu, n, q) * Fraction(1, 2) ** (sum(parts) + contents)
        errs.append(abs(float(ratio / pred - 1)))
    assert errs[1] < 1e-10 and errs[1] < errs[0]
