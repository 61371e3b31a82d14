import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from ovstat import parent
from ovstat.density import (
    extension_density,
    joint_os_density,
    marginal_os_density,
    nu_total_mass,
    overlap_density,
    rectangle_probability,
)
from ovstat.overlap import OverlapSpec, probability_table

UNI = parent.uniform()
EXP = parent.exponential()


def test_marginal_os_density_examples():
    # min of three uniforms at 0.5: 3 (1-x)^2
    assert marginal_os_density(UNI, 1, 3, 0.5) == pytest.approx(0.75)
    # a single draw is the parent itself
    x = np.linspace(0.1, 0.9, 9)
    assert np.allclose(marginal_os_density(UNI, 1, 1, x), UNI.pdf(x))
    # max of two exponentials
    xs = 1.3
    assert marginal_os_density(EXP, 2, 2, xs) == pytest.approx(
        2 * (1 - math.exp(-xs)) * math.exp(-xs)
    )
    with pytest.raises(ValueError):
        marginal_os_density(UNI, 0, 3, 0.5)


def test_joint_os_density_examples():
    # min and max of two uniforms: constant 2 below the diagonal
    assert joint_os_density(UNI, 1, 2, 2, 0.2, 0.6) == pytest.approx(2.0)
    assert joint_os_density(UNI, 1, 2, 2, 0.6, 0.2) == 0.0
    assert joint_os_density(UNI, 1, 2, 2, 0.4, 0.4) == 0.0
    with pytest.raises(ValueError):
        joint_os_density(UNI, 2, 2, 3, 0.1, 0.2)


def test_joint_os_density_min_max_of_three():
    # frozen value 2.4; independently re-derived by integrating the ordered
    # trivariate density 3! f(x)f(t)f(y) over the middle coordinate
    val = joint_os_density(UNI, 1, 3, 3, 0.2, 0.6)
    assert val == pytest.approx(2.4)
    oracle = quad(lambda t: 6.0, 0.2, 0.6)[0]
    assert val == pytest.approx(oracle)


def test_sliding_atom_profile():
    # one-step slide of the minimum of a pair, uniform parent:
    # atom(x) = (1-x)^2
    spec = OverlapSpec(1, 2, 2, 1, 1)
    d = overlap_density(spec, UNI)
    assert d.atom(0.5) == pytest.approx(0.25)
    x = np.linspace(0.05, 0.95, 7)
    assert np.allclose(d.atom(x), (1 - x) ** 2)
    assert d.atom_mass() == pytest.approx(1.0 / 3.0)


def test_identical_samples_purely_atomic():
    d = overlap_density(OverlapSpec(0, 3, 3, 2, 2), UNI)
    assert d.continuous(0.3, 0.6) == 0.0
    x = np.linspace(0.1, 0.9, 9)
    assert np.allclose(d.atom(x), marginal_os_density(UNI, 2, 3, x))
    assert quad(lambda t: d.atom(t), 0, 1)[0] == pytest.approx(1.0, abs=1e-8)


def test_extension_without_shared_rank_is_continuous():
    # the subsample os can never realise pooled rank j here, so no atom
    d = extension_density(1, 2, 4, 4, UNI)
    assert d.atom_terms == ()
    assert d.atom(0.5) == 0.0
    assert nu_total_mass(d) == pytest.approx(1.0, abs=1e-6)


def test_extension_matches_zero_offset_overlap():
    de = extension_density(1, 1, 1, 2, UNI)
    do = overlap_density(OverlapSpec(0, 1, 2, 1, 1), UNI)
    pts = [(0.2, 0.7), (0.7, 0.2), (0.4, 0.41)]
    for x, y in pts:
        assert de.continuous(x, y) == pytest.approx(do.continuous(x, y))
    x = np.linspace(0.1, 0.9, 5)
    assert np.allclose(de.atom(x), do.atom(x))
    # atom(x) = (1/2) * density of the pair minimum = 1 - x
    assert de.atom(0.5) == pytest.approx(0.5)


def test_diagonal_convention():
    d = overlap_density(OverlapSpec(1, 2, 2, 1, 1), UNI)
    for s in [0.2, 0.5, 0.8]:
        assert d.continuous(s, s) == 0.0


def test_extreme_slide_symmetry():
    # sliding maxima and minima have symmetric off-diagonal laws
    for spec in [OverlapSpec(2, 3, 3, 3, 3), OverlapSpec(2, 3, 3, 1, 1)]:
        d = overlap_density(spec, EXP)
        for (a, b) in [(0.3, 1.1), (0.2, 2.0), (1.4, 0.1)]:
            assert d.continuous(a, b) == pytest.approx(d.continuous(b, a))


@pytest.mark.parametrize("model", [UNI, EXP])
@pytest.mark.parametrize(
    "spec",
    [
        OverlapSpec(1, 2, 2, 1, 1),
        OverlapSpec(1, 2, 2, 2, 1),
        OverlapSpec(2, 3, 3, 2, 2),
        OverlapSpec(0, 2, 4, 1, 2),
        OverlapSpec(1, 3, 3, 3, 1),
    ],
)
def test_total_mass_and_atom_mass(spec, model):
    d = overlap_density(spec, model)
    assert nu_total_mass(d, tol=1e-6) == pytest.approx(1.0, abs=1e-6)
    table = probability_table(spec)
    atom_quad = quad(
        lambda u: d.atom(float(model.quantile(u))) * float(model.quantile_density(u)),
        0,
        1,
        epsabs=1e-12,
        epsrel=1e-12,
    )[0]
    assert atom_quad == pytest.approx(float(table.diagonal_mass()), abs=1e-8)


def test_mass_quadrature_rejects_bad_tol():
    d = overlap_density(OverlapSpec(1, 2, 2, 1, 1), UNI)
    with pytest.raises(ValueError):
        nu_total_mass(d, tol=0.0)


def test_marginalisation_recovers_both_os_densities():
    spec = OverlapSpec(1, 2, 2, 1, 1)
    d = overlap_density(spec, UNI)
    for x0 in [0.25, 0.6]:
        marg = quad(lambda y: d.continuous(x0, y), 0, 1, points=[x0], limit=200)[0]
        marg += d.atom(x0)
        assert marg == pytest.approx(marginal_os_density(UNI, spec.i, spec.m, x0), abs=1e-6)
    for y0 in [0.3, 0.75]:
        marg = quad(lambda x: d.continuous(x, y0), 0, 1, points=[y0], limit=200)[0]
        marg += d.atom(y0)
        # the second os has the same one-sample law under the shift
        assert marg == pytest.approx(marginal_os_density(UNI, spec.j, spec.n, y0), abs=1e-6)


def test_rectangle_probability_against_quadrature():
    spec = OverlapSpec(1, 2, 2, 1, 1)
    d = overlap_density(spec, UNI)
    x0, y0 = 0.55, 0.4
    direct = rectangle_probability(spec, UNI, x0, y0)
    cont = dblquad(lambda y, x: d.continuous(x, y), 0, x0, 0, y0, epsabs=1e-10)[0]
    atom = quad(lambda t: d.atom(t), 0, min(x0, y0), epsabs=1e-12)[0]
    assert direct == pytest.approx(cont + atom, abs=1e-7)
    # far corner carries all mass
    assert rectangle_probability(spec, UNI, 0.999999, 0.999999) == pytest.approx(1.0, abs=1e-5)
    assert rectangle_probability(spec, UNI, 1e-9, 1e-9) == pytest.approx(0.0, abs=1e-8)


def test_extension_density_validation():
    with pytest.raises(ValueError):
        extension_density(2, 1, 1, 2, UNI)
    with pytest.raises(ValueError):
        extension_density(1, 3, 1, 2, UNI)
