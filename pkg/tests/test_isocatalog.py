"""Spectrum generators, curvature identities, immersions and the FD oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imcf import (
    EXAMPLE_NAMES,
    DomainError,
    DegenerateSample,
    PrincipalSpectrum,
    UnknownName,
    WrongSpaceForm,
    check_isoparametric,
    euclidean_spectrum,
    example_immersion,
    hyperbolic_spectrum,
    perturbed_torus_immersion,
    spectrum_from_dict,
    spectrum_to_dict,
    sphere_spectrum_from_k1,
    sphere_spectrum_from_s,
    transport_product,
    validate_normal,
    validate_point,
    verify_identities,
)
from imcf.isocatalog import ADMISSIBLE_K1

SQRT3 = math.sqrt(3.0)

# Lower edges sit 0.05 above the generator bounds: the reference forms
# for the g=4 and g=6 identities divide by k1**2 - bound**2, so one ulp
# of k1 near the bound is worth ~1e-10 of absolute residual there.
admissible_k1 = {
    2: st.floats(0.05, 8.0),
    3: st.floats(SQRT3 + 0.05, 8.0),
    4: st.floats(1.0 + 0.05, 8.0),
    6: st.floats(SQRT3 + 0.05, 8.0),
}


# ---------------------------------------------------------------------------
# generators


def test_sphere_spectrum_from_s_values():
    spec = sphere_spectrum_from_s(1, math.pi / 4.0, 2)
    assert spec.n == 2
    assert spec.entries == ((pytest.approx(1.0, abs=1e-15), 2),)

    s = math.atan2(1.0, math.sqrt(2.0))
    spec = sphere_spectrum_from_s(2, s, 1)
    assert spec.curvatures[0] == pytest.approx(math.sqrt(2.0), abs=1e-14)
    assert spec.curvatures[1] == pytest.approx(-math.sqrt(2.0) / 2.0, abs=1e-14)

    spec = sphere_spectrum_from_s(4, math.atan2(1.0, 3.0), 1)
    assert np.allclose(spec.curvatures, (3.0, 0.5, -1.0 / 3.0, -2.0), atol=1e-13)


def test_sphere_spectrum_from_s_domain():
    for bad in (0.0, math.pi / 3.0, -0.1):
        with pytest.raises(DomainError):
            sphere_spectrum_from_s(3, bad, 1)
    with pytest.raises(DomainError):
        sphere_spectrum_from_s(5, 0.1, 1)
    with pytest.raises(DomainError):
        sphere_spectrum_from_s(2, 0.3, 0)


@given(
    g=st.sampled_from((1, 2, 3, 4, 6)),
    frac=st.floats(1e-3, 1.0 - 1e-3),
    m=st.integers(1, 3),
)
def test_generator_round_trip(g, frac, m):
    s = frac * math.pi / g
    spec = sphere_spectrum_from_s(g, s, m)
    assert spec.n == g * m
    # Reading the angle back from the leading curvature reproduces s.
    assert abs(math.atan2(1.0, spec.curvatures[0]) - s) <= 1e-12
    assert spec.meta["s"] == pytest.approx(s)
    assert spec.meta["tau"] == pytest.approx(math.cos(g * s))


@given(g=st.sampled_from((3, 4, 6)), data=st.data())
def test_ordering_chain(g, data):
    k1 = data.draw(admissible_k1[g])
    ks = sphere_spectrum_from_k1(g, k1, 1).curvatures
    assert all(a > b for a, b in zip(ks, ks[1:]))
    negatives = [k for k in ks if k < 0.0]
    assert len(negatives) == g // 2  # chain splits in half around zero


def test_from_k1_matches_from_s():
    for g in (2, 3, 4, 6):
        k1 = ADMISSIBLE_K1[g] + 0.7
        via_k1 = sphere_spectrum_from_k1(g, k1, 1)
        via_s = sphere_spectrum_from_s(g, math.atan2(1.0, k1), 1)
        assert np.allclose(via_k1.curvatures, via_s.curvatures, atol=1e-12)


def test_admissible_bounds_enforced():
    cases = ((2, 0.0), (2, -1.0), (3, SQRT3), (4, 1.0), (6, SQRT3), (6, 1.5))
    for g, k1 in cases:
        with pytest.raises(DomainError):
            sphere_spectrum_from_k1(g, k1, 1)
    with pytest.raises(DomainError):
        sphere_spectrum_from_k1(5, 2.0, 1)


def test_euclidean_spectrum_values():
    spec = euclidean_spectrum(3, 2, 2.0)
    assert spec.entries == ((0.5, 2), (0.0, 1))
    full = euclidean_spectrum(2, 2, 1.0)
    assert full.entries == ((1.0, 2),)
    for bad in ((0, 1, 1.0), (2, 3, 1.0), (2, 1, 0.0), (2, 1, -2.0)):
        with pytest.raises(DomainError):
            euclidean_spectrum(*bad)


def test_hyperbolic_spectrum_values():
    horo = hyperbolic_spectrum("horosphere", 2, k=-1.0)
    assert horo.entries == ((-1.0, 2),)
    umb = hyperbolic_spectrum("umbilic", 2, k=0.5)
    assert umb.entries == ((0.5, 2),)
    cyl = hyperbolic_spectrum("cylinder", 2, k1=math.sqrt(2.0), m=1)
    assert cyl.curvatures[0] == pytest.approx(math.sqrt(2.0))
    assert cyl.curvatures[1] == pytest.approx(math.sqrt(2.0) / 2.0)
    assert cyl.meta["equal_multiplicities"] is True
    uneven = hyperbolic_spectrum("cylinder", 3, k1=2.0, m=1)
    assert uneven.multiplicities == (1, 2)
    assert uneven.meta["equal_multiplicities"] is False


def test_hyperbolic_spectrum_domain():
    with pytest.raises(DomainError):
        hyperbolic_spectrum("horosphere", 2, k=0.5)
    for bad_k in (0.0, 1.0, -1.0):
        with pytest.raises(DomainError):
            hyperbolic_spectrum("umbilic", 2, k=bad_k)
    with pytest.raises(DomainError):
        hyperbolic_spectrum("cylinder", 2, k1=0.9, m=1)
    with pytest.raises(DomainError):
        hyperbolic_spectrum("cylinder", 2, k1=2.0, m=2)
    with pytest.raises(UnknownName):
        hyperbolic_spectrum("paraboloid", 2, k=1.0)


# ---------------------------------------------------------------------------
# identities


def test_identity_values_g3():
    ks = sphere_spectrum_from_k1(3, 2.0, 1).curvatures
    assert math.fsum(ks) == pytest.approx(6.0 / 11.0, abs=1e-14)
    pair = ks[0] * ks[1] + ks[0] * ks[2] + ks[1] * ks[2]
    assert pair == pytest.approx(-3.0, abs=1e-13)
    assert ks[0] * ks[1] * ks[2] == pytest.approx(-2.0 / 11.0, abs=1e-14)
    assert np.allclose(ks[1:], (0.06002309, -1.51456855), atol=1e-6)


def test_identity_values_g4():
    ks = sphere_spectrum_from_k1(4, 3.0, 1).curvatures
    assert math.fsum(ks) == pytest.approx(7.0 / 6.0, abs=1e-14)
    assert ks[0] * ks[2] == pytest.approx(-1.0, abs=1e-14)
    assert ks[1] * ks[3] == pytest.approx(-1.0, abs=1e-14)
    assert (ks[0] + ks[2]) * (ks[1] + ks[3]) == pytest.approx(-4.0, abs=1e-13)
    assert ks[0] * ks[1] * ks[2] * ks[3] == pytest.approx(1.0, abs=1e-13)


def test_identity_values_g6():
    ks = sphere_spectrum_from_k1(6, 2.0, 1).curvatures
    assert math.fsum(ks) == pytest.approx(-351.0 / 22.0, abs=1e-12)
    for i, j in ((0, 3), (1, 4), (2, 5)):
        assert ks[i] * ks[j] == pytest.approx(-1.0, abs=1e-13)
    prod = 1.0
    for k in ks:
        prod *= k
    assert prod == pytest.approx(-1.0, abs=1e-12)
    assert ks[3] == pytest.approx(-0.5, abs=1e-14)


def test_identity_report_structure():
    rep = verify_identities(sphere_spectrum_from_k1(2, 1.3, 1))
    assert set(rep.residuals) == {"pair_product"}
    assert rep.ok()
    rep = verify_identities(sphere_spectrum_from_k1(4, 2.0, 2))
    assert set(rep.residuals) == {
        "sum",
        "cross_product_13",
        "cross_product_24",
        "bracket",
        "product",
    }
    assert rep.g == 4 and rep.k1 == 2.0
    with pytest.raises(WrongSpaceForm):
        verify_identities(euclidean_spectrum(2, 2, 1.0))


@given(g=st.sampled_from((2, 3, 4, 6)), data=st.data())
@settings(max_examples=120)
def test_identities_hold_for_random_k1(g, data):
    k1 = data.draw(admissible_k1[g])
    rep = verify_identities(sphere_spectrum_from_k1(g, k1, 1))
    assert rep.max_residual <= 1e-11


def test_tampered_spectrum_fails_identities():
    good = sphere_spectrum_from_k1(4, 3.0, 1)
    ks = list(good.curvatures)
    ks[2] += 1e-6
    bad = PrincipalSpectrum(
        sf=good.sf, n=good.n, entries=tuple((k, 1) for k in ks)
    )
    assert not verify_identities(bad).ok()


@given(g=st.sampled_from((2, 3, 4, 6)), data=st.data())
@settings(max_examples=60)
def test_product_telescopes_to_double_angle(g, data):
    # With one curvature per block the transported product collapses to
    # cos(g mu) - a sin(g mu), a = (sum k_j)/g, on the whole basin.
    k1 = data.draw(admissible_k1[g])
    spec = sphere_spectrum_from_k1(g, k1, 1)
    s = spec.meta["s"]
    a = math.fsum(spec.curvatures) / g
    mus = np.linspace(-s + 1e-6, math.pi / g - s - 1e-6, 113)
    lhs = transport_product(spec, mus)
    rhs = np.cos(g * mus) - a * np.sin(g * mus)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, abs(a))


# ---------------------------------------------------------------------------
# immersions


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_immersion_on_quadric_with_unit_normal(name):
    imm = example_immersion(name)
    (ulo, uhi, _), (vlo, vhi, _) = imm.param_domain
    us = ulo + (np.arange(32) + 0.5) * (uhi - ulo) / 32
    vs = vlo + (np.arange(32) + 0.5) * (vhi - vlo) / 32
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    pts = imm.point(uu, vv)
    nrm = imm.normal(uu, vv)
    validate_point(imm.sf, pts, tol=1e-10)
    validate_normal(imm.sf, pts, nrm, tol=1e-10)


def test_immersion_reference_points():
    cyl = example_immersion("hyperbolic_cylinder")
    r2 = math.sqrt(2.0)
    assert np.allclose(cyl.point(0.0, 0.0), (r2, 1.0, 0.0, 0.0), atol=1e-15)
    assert np.allclose(cyl.normal(0.0, 0.0), (-1.0, -r2, 0.0, 0.0), atol=1e-15)

    hopf = example_immersion("hopf_torus")
    r6, r3 = math.sqrt(6.0) / 3.0, math.sqrt(3.0) / 3.0
    assert np.allclose(hopf.point(0.0, 0.0), (r6, 0.0, r3, 0.0), atol=1e-15)
    assert np.allclose(hopf.normal(0.0, 0.0), (r3, 0.0, -r6, 0.0), atol=1e-15)

    sph = example_immersion("round_sphere", r0=1.0)
    p = sph.point(0.7, 1.1)
    assert np.allclose(sph.normal(0.7, 1.1), -p, atol=1e-15)

    with pytest.raises(UnknownName):
        example_immersion("moebius")


def test_immersion_spectra_read_back():
    assert example_immersion("horosphere").spectrum.curvatures == (-1.0,)
    assert example_immersion("clifford").spectrum.curvatures == (1.0, -1.0)
    cyl = example_immersion("euclidean_cylinder", r0=2.0)
    assert cyl.spectrum.entries == ((0.5, 1), (0.0, 1))


# ---------------------------------------------------------------------------
# finite-difference oracle


def test_round_sphere_is_isoparametric():
    rep = check_isoparametric(example_immersion("round_sphere"), mu_samples=(0.0, 0.3))
    assert rep.passed
    for row in rep.rows:
        assert row.spread <= 1e-8  # homogeneous: spread vanishes to round-off


def test_hopf_torus_is_isoparametric():
    rep = check_isoparametric(
        example_immersion("hopf_torus"), mu_samples=(0.0, -0.2, 0.2)
    )
    assert rep.passed
    # The transported reference and the finite-difference field agree.
    for row in rep.rows:
        assert row.agreement <= rep.agree_tol


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_catalog_immersions_pass_oracle(name):
    assert check_isoparametric(example_immersion(name)).passed


def test_perturbed_torus_fails_oracle():
    rep = check_isoparametric(perturbed_torus_immersion())
    assert not rep.passed
    assert max(r.spread for r in rep.rows) > 1e-2  # far beyond the tolerance


def test_focal_sample_rejected():
    with pytest.raises(DegenerateSample):
        check_isoparametric(example_immersion("round_sphere"), mu_samples=(1.0,))


# ---------------------------------------------------------------------------
# serialization


def test_spectrum_serialization_schema():
    spec = hyperbolic_spectrum("cylinder", 4, k1=2.0, m=2)
    doc = spectrum_to_dict(spec)
    assert doc == {
        "epsilon": -1,
        "n": 4,
        "entries": [{"k": 2.0, "m": 2}, {"k": 0.5, "m": 2}],
    }
    back = spectrum_from_dict(doc)
    assert back.sf.epsilon == -1
    assert back.entries == spec.entries


def test_spectrum_round_trip_all_forms():
    specs = (
        euclidean_spectrum(3, 2, 2.0),
        hyperbolic_spectrum("horosphere", 2, k=1.0),
        sphere_spectrum_from_k1(4, 3.0, 2),
    )
    for spec in specs:
        back = spectrum_from_dict(spectrum_to_dict(spec))
        assert back.n == spec.n
        assert back.sf.epsilon == spec.sf.epsilon
        assert back.entries == spec.entries


def test_spectrum_from_dict_rejects_malformed():
    for doc in (
        {},
        {"epsilon": -1, "n": 2},
        {"epsilon": -1, "n": 2, "entries": [{"k": "x", "m": 1}]},
        {"epsilon": 5, "n": 2, "entries": [{"k": 1.0, "m": 2}]},
    ):
        with pytest.raises(DomainError):
            spectrum_from_dict(doc)
