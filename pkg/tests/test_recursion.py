import numpy as np
import pytest

from lozenge.curves import SpectralCurve, solve_hexagon_classical
from lozenge.rational import RationalFunction
from lozenge.recursion import (
    IrregularCurve,
    QuadratureError,
    RecursionEngine,
    airy_curve,
    bergman,
    branchpoints,
    correlator,
    default_radius,
    free_energy,
    recursion_kernel,
    w3_closed_form,
)

PTS3 = (0.4 + 0.3j, -0.2 + 0.5j, 1.7 - 0.4j)


@pytest.fixture(scope="module")
def hexagon():
    return solve_hexagon_classical(0.3, 2.0).at_time(0.0)


def test_airy_branchpoint_and_conjugation():
    c = airy_curve()
    (bp,) = branchpoints(c)
    assert bp.a == 0
    z = np.array([0.1, 0.05j, -0.2 + 0.1j])
    np.testing.assert_allclose(bp.conjugate(z), -z, atol=1e-14)


def test_hexagon_branchpoints(hexagon):
    got = sorted(b.a.real for b in branchpoints(hexagon))
    np.testing.assert_allclose(got, [-1.0, 1.0], atol=1e-12)
    for bp in branchpoints(hexagon):
        z = bp.a + 0.05 * np.exp(1j * np.linspace(0, 6, 7))
        zb = bp.conjugate(z)
        np.testing.assert_allclose(hexagon.x(zb), hexagon.x(z), atol=1e-12)
        assert np.all(np.abs(zb - z) > 0.05)


def test_degenerate_branchpoint_rejected():
    c = SpectralCurve(RationalFunction([0, 0, 0, 1.0]), RationalFunction([0, 1.0]))
    with pytest.raises(IrregularCurve):
        branchpoints(c)


def test_no_branchpoints_rejected():
    c = SpectralCurve(RationalFunction([0, 1.0]), RationalFunction([0, 1.0]))
    with pytest.raises(IrregularCurve):
        branchpoints(c)


def test_bergman():
    assert bergman(0, 1) == 1
    assert bergman(2 + 1j, 0.5) == bergman(0.5, 2 + 1j)
    eps = 1e-4
    assert abs(bergman(0.3, 0.3 + eps)) * eps**2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        bergman(0.3, 0.3)


def test_kernel_properties():
    (bp,) = branchpoints(airy_curve())
    z = np.array([0.1 + 0.05j])
    # swapping z and its conjugate flips the sign
    k1 = recursion_kernel(1.3, z, bp)
    k2 = recursion_kernel(1.3, bp.conjugate(z), bp)
    np.testing.assert_allclose(k1, -k2, rtol=1e-12)
    far = [abs(recursion_kernel(z0, z, bp)[0]) * abs(z0) ** 2 for z0 in (1e3, 1e4)]
    assert far[0] == pytest.approx(far[1], rel=1e-2)
    with pytest.raises(ValueError):
        recursion_kernel(1.3, np.array([0.0]), bp)


@pytest.mark.parametrize("curve", ["airy", "hexagon"])
def test_w3_matches_closed_form(curve, hexagon):
    c = airy_curve() if curve == "airy" else hexagon
    got = correlator(c, 3, 0, PTS3).value
    ref = w3_closed_form(c, PTS3)
    assert abs(got - ref) < 1e-8 * max(1, abs(ref))


def test_w2_genus_one_symmetric(hexagon):
    a, b = 0.5 + 0.4j, -0.3 + 0.7j
    w_ab = correlator(hexagon, 2, 1, (a, b)).value
    w_ba = correlator(hexagon, 2, 1, (b, a)).value
    assert abs(w_ab - w_ba) < 1e-8 * abs(w_ab)


def test_airy_free_energy_vanishes():
    assert abs(free_energy(airy_curve(), 2).value) < 1e-8


def test_hexagon_free_energy_regression(hexagon):
    res = free_energy(hexagon, 2)
    assert res.value.real == pytest.approx(0.006981742237, rel=1e-8)
    assert abs(res.value.imag) < 1e-9
    assert res.error < 1e-9


@pytest.mark.parametrize("lam", [2.0, 1 / 3])
def test_free_energy_homogeneity(hexagon, lam):
    base = free_energy(hexagon, 2).value
    scaled = free_energy(hexagon.scaled(lam), 2).value
    assert abs(scaled * lam**2 - base) < 1e-8 * abs(base)


def test_free_energy_shift_invariance(hexagon):
    base = free_energy(hexagon, 2).value
    shifted = free_energy(hexagon.shifted(lambda x: x * x * 0.3 + x / (x - 7)), 2).value
    assert abs(shifted - base) < 1e-8 * abs(base)


def test_free_energy_basepoint_independent(hexagon):
    r0 = default_radius(hexagon, fraction=0.55)
    eng = RecursionEngine(hexagon, r0, 0.55, 128)
    a = branchpoints(hexagon)[0].a
    vals = [eng.free_energy(2, a + s) for s in (0.1 * r0, 0.4j * r0, -0.2 * r0 + 0.2j * r0)]
    assert np.ptp(np.real(vals)) < 1e-10 and np.ptp(np.imag(vals)) < 1e-10


def test_free_energy_genus_below_two():
    with pytest.raises(ValueError):
        RecursionEngine(airy_curve(), 0.5).free_energy(1, 0.2)


def _contour(eng, center, radius, m=48):
    th = 2 * np.pi * (np.arange(m) + 0.5) / m
    z = center + radius * np.exp(1j * th)
    vals = np.array([eng.correlator(1, 1, (p,)) for p in z])
    return np.sum(vals * (z - center)) / m


def test_genus_one_residues_vanish(hexagon):
    eng = RecursionEngine(hexagon, default_radius(hexagon), 0.55, 96)
    for bp in branchpoints(hexagon):
        assert abs(_contour(eng, bp.a, 0.6)) < 1e-8
    # correlators are regular away from the branchpoints, including at z = 0
    assert abs(_contour(eng, 0.0, 3.0, m=96)) < 1e-8


@pytest.mark.parametrize("n,g", [(1, 1), (3, 0), (1, 2), (2, 1)])
def test_correlator_homogeneity(hexagon, n, g):
    pts = PTS3[:n] if n <= 3 else PTS3
    lam = 2.0
    base = correlator(hexagon, n, g, pts).value
    scaled = correlator(hexagon.scaled(lam), n, g, pts).value
    assert abs(scaled * lam ** (2 * g - 2 + n) - base) < 1e-8 * abs(base)


def test_correlator_argument_checks(hexagon):
    with pytest.raises(ValueError):
        correlator(hexagon, 2, 0, (0.1,))
    with pytest.raises(ValueError):
        RecursionEngine(hexagon, 0.3).W(0, 0, None, (), 0)


@pytest.mark.parametrize("radius", [0.5, 2.0, 5.0])
def test_oversized_radius_flagged(hexagon, radius):
    with pytest.raises(QuadratureError):
        correlator(hexagon, 3, 0, PTS3, radius=radius)
