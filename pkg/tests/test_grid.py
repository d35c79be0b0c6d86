from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nhsw.errors import ContractError
from nhsw.grid import Grid1D, d2dx2, ddx


def periodic_2pi(n):
    return Grid1D.from_domain(0.0, 2 * np.pi, n, "periodic")


def test_centers_and_length():
    g = Grid1D(-1.0, 0.1, 30)
    assert g.x[0] == pytest.approx(-0.95)
    assert np.all(np.diff(g.x) > 0)
    assert g.length == pytest.approx(3.0)
    assert g.faces[-1] == pytest.approx(g.x_right)


def test_centers_do_not_drift():
    g = Grid1D(0.0, 0.1, 100_000)
    # computed from the index, not by accumulation
    assert g.x[-1] == 0.0 + (100_000 - 0.5) * 0.1


@pytest.mark.parametrize("kw", [dict(dx=0.0), dict(dx=-1.0), dict(n=2), dict(bc_mode="wrap")])
def test_invalid_grid(kw):
    args = dict(x_left=0.0, dx=0.1, n=10, bc_mode="extrapolate")
    args.update(kw)
    with pytest.raises(ContractError):
        Grid1D(**args)


def test_field_validation():
    g = Grid1D(0.0, 1.0, 5)
    assert np.all(g.field(2.0) == 2.0)
    with pytest.raises(ContractError):
        g.field(np.ones(4))
    with pytest.raises(ContractError):
        g.field([1, 2, np.nan, 4, 5])
    with pytest.raises(ContractError):
        ddx(np.ones(6), g)


def test_constant_has_zero_derivatives():
    g = Grid1D(0.0, 0.3, 17)
    f = np.full(g.n, 4.2)
    assert np.allclose(ddx(f, g), 0.0, atol=1e-13)
    assert np.allclose(d2dx2(f, g), 0.0, atol=1e-11)


def test_linear_exact_including_edges():
    g = Grid1D(0.0, 0.1, 20)
    assert np.allclose(ddx(3.0 * g.x, g), 3.0, atol=1e-12)


def test_quadratic_exact_including_edges():
    g = Grid1D(-1.0, 0.05, 40)
    assert np.allclose(d2dx2(g.x ** 2, g), 2.0, atol=1e-9)
    assert np.allclose(ddx(g.x ** 2, g), 2.0 * g.x, atol=1e-12)


def test_dirichlet_needs_ghosts():
    g = Grid1D(0.0, 1.0, 5, "dirichlet")
    with pytest.raises(ContractError):
        ddx(np.arange(5.0), g)
    f = g.x.copy()
    assert np.allclose(ddx(f, g, ghosts=(g.x[0] - 1.0, g.x[-1] + 1.0)), 1.0)
    assert np.allclose(d2dx2(f, g, ghosts=(g.x[0] - 1.0, g.x[-1] + 1.0)), 0.0)


@pytest.mark.parametrize("op,exact", [(ddx, np.cos), (d2dx2, lambda x: -np.sin(x))])
def test_periodic_sine_order_two(op, exact):
    errs = []
    for n in (64, 128):
        g = periodic_2pi(n)
        errs.append(np.max(np.abs(op(np.sin(g.x), g) - exact(g.x))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("op", [ddx, d2dx2])
def test_extrapolate_edges_are_second_order(op):
    errs = []
    for n in (50, 100, 200):
        g = Grid1D.from_domain(0.3, 2.0, n)
        ref = np.cos(g.x) if op is ddx else -np.sin(g.x)
        errs.append(np.max(np.abs(op(np.sin(g.x), g) - ref)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2.0) < 0.3)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 12, elements=finite), arrays(float, 12, elements=finite), finite, finite,
       st.sampled_from(["periodic", "extrapolate"]))
def test_stencils_are_linear(f, h, a, b, mode):
    g = Grid1D(0.0, 0.25, 12, mode)
    for op in (ddx, d2dx2):
        lhs = op(a * f + b * h, g)
        rhs = a * op(f, g) + b * op(h, g)
        scale = 1.0 + np.max(np.abs(a * op(f, g))) + np.max(np.abs(b * op(h, g)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(3, 40), elements=finite))
def test_periodic_derivative_telescopes(f):
    g = Grid1D(0.0, 0.1, f.size, "periodic")
    assert abs(np.sum(ddx(f, g)) * g.dx) <= 1e-12 * (1.0 + np.max(np.abs(f)))
