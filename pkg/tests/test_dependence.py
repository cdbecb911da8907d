import warnings

import numpy as np
import pytest

from fieldlln import Rect, rng
from fieldlln.dependence import (
    NestedBiasWarning, coupled_difference, delta_axis_estimate, delta_estimate, delta_profile,
    detect_d0, hannan_sum, orthomartingale_check, projector_norm, write_profile_csv, xI_component,
    xI_energy, xI_samples,
)
from fieldlln.models import (
    IID, AxisFilter, AxisMDS, DShift, InnovationDist, Link, ProductOM, geometric_linear_field,
)
from fieldlln.norms import NormSpec, lp_norm

RAD = InnovationDist.rademacher()
UNI = InnovationDist.uniform(-1, 1)
LP = NormSpec.lp(1.5)


def test_delta_zero_outside_window():
    f = geometric_linear_field(2, 0.5, 1)
    est = delta_estimate(f, (2, 0), LP, 500, 1)
    assert est.value == 0 and est.stderr == 0


def test_delta_linear_closed_form():
    # |eps - eps'| for independent Rademacher is 0 or 2 with prob 1/2: L^1.5 norm 2 * 0.5^(1/1.5)
    f = geometric_linear_field(2, 0.5, 2)
    base = 2 * 0.5 ** (1 / 1.5)
    prof = delta_profile(f, [(0, 0), (1, -1), (0, 2)], LP, 4000, 3)
    for k, est in prof.entries.items():
        want = 0.5 ** max(abs(c) for c in k) * base
        assert abs(est.value - want) <= 4 * est.stderr


def test_delta_holder_bound_clamp():
    f = geometric_linear_field(2, 0.5, 1, UNI, Link("clamp", bound=0.3))
    diff = coupled_difference(f, (1, 0), rng.derive(5, np.arange(3000)))
    # |g(x) - g(y)| <= |x - y| = |A_k| |eps - eps'| pointwise
    keys = rng.derive(5, np.arange(3000))
    lin = geometric_linear_field(2, 0.5, 1, UNI)
    bound = np.abs(coupled_difference(lin, (1, 0), keys))
    assert np.all(np.abs(diff) <= bound + 1e-15)


def test_delta_axis():
    ds = DShift((AxisFilter((1.0, 0.5, 0.25)), AxisFilter((1.0,))), Link("sum"))
    assert delta_axis_estimate(ds, 0, 5, LP, 100, 1).value == 0
    base = 2 * 0.5 ** (1 / 1.5)
    e0 = delta_axis_estimate(ds, 1, 0, LP, 4000, 2)
    assert abs(e0.value - base) <= 4 * e0.stderr
    lags = [delta_axis_estimate(ds, 0, u, LP, 4000, 10 + u) for u in range(3)]
    slope = np.polyfit(range(3), np.log([e.value for e in lags]), 1)[0]
    assert slope == pytest.approx(np.log(0.5), abs=0.1)
    with pytest.raises(TypeError):
        delta_axis_estimate(IID(RAD, 1), 0, 0, LP, 10, 1)


def test_projector_iid():
    m = IID(UNI, 2)
    # exact ||eps - E eps||_1.5 for U(-1, 1): (1 / 2.5)^(1/1.5)
    exact = (1 / 2.5) ** (1 / 1.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        p0 = projector_norm(m, (0, 0), LP, 400, 8, 1)
        p1 = projector_norm(m, (1, 0), LP, 100, 8, 2)
    assert abs(p0.norm_value - exact) <= 4 * p0.stderr
    assert p1.norm_value <= 4 * p1.stderr + 1e-12


def test_projector_stationarity():
    f = geometric_linear_field(2, 0.5, 1, UNI, Link("tanh"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        a = projector_norm(f, (1, 0), LP, 300, 20, 4)
        b = projector_norm(f, (3, 2), LP, 300, 20, 5, site=(2, 2))
    assert abs(a.norm_value - b.norm_value) <= 4 * np.hypot(a.stderr, b.stderr)


def test_projector_product_om_off_zero():
    om = ProductOM((AxisMDS(InnovationDist.gaussian(), 1.0, (0.5,)), AxisMDS(UNI)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        for k in [(1, 0), (0, 1), (1, 1)]:
            est = projector_norm(om, k, LP, 100, 16, 3)
            assert est.norm_value <= 4 * est.stderr + 1e-12


def test_projector_warns_on_small_inner():
    with pytest.warns(NestedBiasWarning):
        projector_norm(IID(RAD, 1), (0,), LP, 10, 4, 1)


def test_hannan_sum_iid_and_zero():
    m = IID(UNI, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        total, se, table = hannan_sum(m, LP, 1, 400, 4, 1)
    assert len(table) == 3
    assert table[0].norm_value == 0 and table[2].norm_value == 0
    assert abs(total - (1 / 2.5) ** (1 / 1.5)) <= 4 * se
    zero = IID(InnovationDist.point_mass(0.0), 1)
    assert hannan_sum(zero, LP, 1, 20, 100, 1)[0] == 0


def test_xI_additive_and_product():
    add = DShift((AxisFilter((1.0,), UNI), AxisFilter((1.0,), UNI)), Link("sum"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        x12 = xI_samples(add, (0, 1), 16, 1, 50)
        x1 = xI_samples(add, (0,), 16, 1, 50)
    # antithetic uniform redraws make the linear terms exact
    assert np.max(np.abs(x12)) < 1e-12
    f1 = add.axis_filter(0, [0], rng.derive(1, np.arange(50)))
    np.testing.assert_allclose(x1[:, 0], f1[:, 0], atol=1e-12)
    prod = DShift((AxisFilter((1.0,), UNI), AxisFilter((1.0,), UNI)), Link("product"))
    # reflecting both axes leaves the product unchanged, so E[X] is only estimated
    energy, se, _ = xI_energy(prod, (1,), 64, 2, 200)
    assert abs(energy) <= 4 * se
    full = xI_samples(prod, (0, 1), 400, 2, 50)
    x = prod.evaluate(Rect((0, 0), (0, 0)), rng.derive(2, np.arange(50)))
    # only the E[X] = 0 corner is noisy: sd (1/3) / sqrt(200)
    assert np.max(np.abs(full[:, 0] - x.reshape(-1))) < 6 * (1 / 3) / np.sqrt(200)
    with pytest.raises(TypeError):
        xI_component(IID(RAD, 2), (0,), 100, 1)


@pytest.mark.parametrize("link,want", [(Link("sum"), 1), (Link("product"), 2), (Link("tanh_product"), 2)])
def test_detect_d0(link, want):
    ds = DShift((AxisFilter((1.0, 0.5)), AxisFilter((1.0,), InnovationDist.gaussian())), link)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        assert detect_d0(ds, 64, 3).d0 == want


def test_detect_d0_constant_and_scaling():
    const = DShift((AxisFilter((0.0,)), AxisFilter((0.0,))), Link("sum"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        res = detect_d0(const, 8, 1)
        assert res.d0 == 2 and res.ambiguous
        ds = [DShift((AxisFilter((1.0, 0.5)), AxisFilter((1.0,))), Link("power_sum", alpha=0.7, scale=s))
              for s in (0.1, 1.0, 10.0)]
        assert {detect_d0(m, 32, 5).d0 for m in ds} == {1}


def test_orthomartingale_check():
    om = ProductOM((AxisMDS(InnovationDist.gaussian(), 1.0, (0.4,)), AxisMDS(UNI), AxisMDS(RAD)))
    res = orthomartingale_check(om, (1, 1, 1), 20, 64, 3, antithetic=False)
    assert len(res) == 3 and all(r.passed for r in res)
    f = geometric_linear_field(2, 0.5, 1, InnovationDist.gaussian())
    assert not all(r.passed for r in orthomartingale_check(f, (0, 0), 20, 64, 3, antithetic=False))


def test_profile_csv(tmp_path):
    prof = delta_profile(geometric_linear_field(1, 0.5, 1), [(0,), (1,)], LP, 200, 1)
    prof.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "k1,estimate,stderr,replicates"
    assert lines[1].startswith("0,") and lines[1].endswith(",200")
    write_profile_csv(tmp_path / "q.csv", [((0, 1), 1.0, 0.1, (10, 20))])
    assert (tmp_path / "q.csv").read_text().splitlines()[1] == "0,1,1.0,0.1,10x20"
