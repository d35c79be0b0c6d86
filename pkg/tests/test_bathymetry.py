from __future__ import annotations

import numpy as np
import pytest

from nhsw.bathymetry import (
    FlatBottom,
    ParabolicBottom,
    SampledBottom,
    read_bathymetry_csv,
    write_bathymetry_csv,
)
from nhsw.errors import ContractError, OutOfDomainError


def test_flat():
    zb, d1, d2 = FlatBottom(2.0).eval(7.0)
    assert (zb, d1, d2) == (2.0, 0.0, 0.0)


def test_parabolic():
    zb, d1, d2 = ParabolicBottom(0.0, 1.0).eval(2.0)
    assert (zb, d1, d2) == (2.0, 2.0, 1.0)


def test_parabolic_curvature_exact():
    x = np.linspace(-5, 5, 101)
    b = ParabolicBottom(0.3, -0.7)
    zb, d1, d2 = b(x)
    assert np.all(d2 == -0.7)
    assert np.allclose(zb, 0.3 - 0.35 * x * x, rtol=0, atol=1e-14)
    assert np.allclose(d1, -0.7 * x, rtol=0, atol=1e-14)


def test_sampled_sine_at_quarter_period():
    xs = np.linspace(0, np.pi, 2001)
    b = SampledBottom.from_function(np.sin, xs)
    zb, d1, d2 = b.eval(np.pi / 2)
    assert zb == pytest.approx(1.0, abs=1e-6)
    assert d1 == pytest.approx(0.0, abs=1e-6)
    assert d2 == pytest.approx(-1.0, abs=1e-5)
    assert b.curvature_twice_differenced


def test_sampled_derivatives_converge_at_order_two():
    errs = []
    for n in (101, 201, 401):
        xs = np.linspace(0.0, 3.0, n)
        b = SampledBottom.from_function(np.sin, xs)
        _, d1, d2 = b.eval(xs)
        errs.append((np.max(np.abs(d1 - np.cos(xs))), np.max(np.abs(d2 + np.sin(xs)))))
    errs = np.array(errs)
    orders = np.log2(errs[:-1] / errs[1:])
    assert np.all(np.abs(orders - 2.0) < 0.3)


def test_generated_kind_uses_given_slope():
    xs = np.linspace(0.0, 1.0, 51)
    b = SampledBottom(xs, xs ** 3, dzb=3 * xs ** 2, kind="generated")
    assert not b.curvature_twice_differenced
    _, d1, d2 = b.eval(xs[1:-1])
    assert np.allclose(d1, 3 * xs[1:-1] ** 2)
    assert np.allclose(d2, 6 * xs[1:-1], atol=1e-3)
    assert b.describe()["kind"] == "generated"


def test_sampled_out_of_domain():
    b = SampledBottom.from_function(np.cos, np.linspace(0, 1, 11))
    with pytest.raises(OutOfDomainError):
        b.eval(1.5)
    with pytest.raises(OutOfDomainError):
        b.eval([-0.1, 0.5])


def test_sampled_rejects_bad_samples():
    with pytest.raises(ContractError):
        SampledBottom(np.array([0.0, 2.0, 1.0]), np.zeros(3))
    with pytest.raises(ContractError):
        SampledBottom(np.linspace(0, 1, 4), np.zeros(3))


def test_csv_roundtrip(tmp_path):
    xs = np.linspace(0, 2, 21)
    write_bathymetry_csv(tmp_path / "b.csv", xs, np.cos(xs))
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "x,zb"
    b = read_bathymetry_csv(tmp_path / "b.csv")
    assert np.array_equal(b.xs, xs)
    assert np.array_equal(b.zb, np.cos(xs))


def test_csv_header_checked(tmp_path):
    (tmp_path / "b.csv").write_text("x,z\n0,0\n1,0\n2,0\n")
    with pytest.raises(ContractError):
        read_bathymetry_csv(tmp_path / "b.csv")
