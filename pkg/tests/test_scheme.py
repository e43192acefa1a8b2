import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdsylvester.errors import StartupError, ValidationError
from fdsylvester.scheme import (
    BoundaryData,
    Grid,
    SchemeCoefficients,
    SchemeId,
    SignalSpec,
    build_coefficients,
    exact_field,
    sample_boundary,
)


def test_grid_rejects_bad_steps():
    with pytest.raises(ValidationError):
        Grid(h=0.0, tau=0.1, c=1.0, n_x=5, n_t=4)
    with pytest.raises(ValidationError):
        Grid(h=0.1, tau=-1.0, c=1.0, n_x=5, n_t=4)
    with pytest.raises(ValidationError):
        Grid(h=float("nan"), tau=0.1, c=1.0, n_x=5, n_t=4)
    with pytest.raises(ValidationError):
        Grid(h=0.1, tau=0.1, c=1.0, n_x=2, n_t=4)
    with pytest.raises(ValidationError):
        Grid(h=0.1, tau=0.1, c=1.0, n_x=5, n_t=0)


def test_grid_from_cfl_and_extent():
    g = Grid.from_cfl(1.0, 64, 50, 1.0, 0.9)
    assert g.h == pytest.approx(1 / 64)
    assert g.sigma == pytest.approx(0.9)
    assert not g.is_even  # 63 interior nodes
    g2 = Grid.from_extent(2.0, 1.0, 8, 4, 2.0)
    assert (g2.h, g2.tau) == (0.25, 0.25)
    assert g2.L == pytest.approx(2.0) and g2.T == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        Grid.from_cfl(1.0, 8, 4, 0.0, 0.5)


def test_grid_nodes_and_extension():
    g = Grid(h=0.5, tau=0.25, c=1.0, n_x=5, n_t=4)
    assert g.x.shape == (6,) and g.t.shape == (5,)
    e = g.extended()
    assert e.n_t == 5 and e.h == g.h and e.tau == g.tau


@pytest.mark.parametrize("name, sid", [
    ("lax", SchemeId.LAX), ("LW", SchemeId.LAX_WENDROFF), ("lax_wendroff", SchemeId.LAX_WENDROFF),
    ("cn", SchemeId.CRANK_NICOLSON), ("Leapfrog", SchemeId.LEAPFROG),
])
def test_scheme_parse_aliases(name, sid):
    assert SchemeId.parse(name) is sid


def test_scheme_parse_unknown():
    with pytest.raises(ValidationError):
        SchemeId.parse("upwind")


def test_table_weights():
    g = Grid(h=0.1, tau=0.05, c=1.0, n_x=5, n_t=4)
    tau, h, c = g.tau, g.h, g.c
    lf = build_coefficients("leapfrog", g)
    assert (lf.alpha, lf.gamma, lf.delta, lf.epsilon) == pytest.approx((1 / (2 * tau), -1 / (2 * tau), c / (2 * h), -c / (2 * h)))
    lax = build_coefficients("lax", g)
    assert lax.beta == 0 and lax.delta == pytest.approx(-1 / (2 * tau) + c / (2 * h))
    lw = build_coefficients("lax-wendroff", g)
    s = c * tau / h
    assert lw.beta == pytest.approx(-1 / tau + c * c * tau / h ** 2)
    assert lw.epsilon == pytest.approx(-(1 + s) * c / (2 * h))
    cn = build_coefficients("cn", g)
    assert cn.has_cross and cn.implicit and cn.three_level  # eta reaches level n - 1
    assert cn.delta == cn.epsilon == cn.eta == cn.theta == pytest.approx(-c / h ** 2)


def test_coefficient_invariants():
    with pytest.raises(ValidationError):
        SchemeCoefficients.custom()
    with pytest.raises(ValidationError):
        SchemeCoefficients(SchemeId.LAX, alpha=1.0, gamma=1.0)
    with pytest.raises(ValidationError):
        SchemeCoefficients(SchemeId.LEAPFROG, alpha=1.0, zeta=1.0)
    with pytest.raises(ValidationError):
        SchemeCoefficients.custom(alpha=float("inf"))
    with pytest.raises(ValidationError):
        build_coefficients(SchemeId.CUSTOM, Grid(h=0.1, tau=0.1, c=1.0, n_x=5, n_t=4))


def test_exact_field_broadcasts():
    g = Grid(h=0.25, tau=0.1, c=1.0, n_x=4, n_t=4)
    sig = SignalSpec(1.0)
    u = exact_field(sig, g, g.x[:, None], g.t[None, :])
    assert u.shape == (5, 5)
    assert u[2, 3] == math.cos(2 * math.pi * (g.x[2] - g.c * g.t[3]))
    with pytest.raises(ValidationError):
        SignalSpec(0.0)


def test_boundary_corner_checks():
    with pytest.raises(ValidationError):
        BoundaryData(left=[1.0, 0.0], right=[0.0, 0.0], initial=[0.0, 0.0, 0.0])
    bd = BoundaryData(left=[0.0, 0.0, 0.0], right=[0.0, 0.0, 0.0], initial=[0.0] * 5)
    with pytest.raises(ValueError):
        bd.left[0] = 1.0  # frozen
    g = Grid(h=0.25, tau=0.1, c=1.0, n_x=4, n_t=2)
    bd.check(g)
    lf = build_coefficients("leapfrog", g)
    with pytest.raises(StartupError):
        bd.check(g, lf)


def test_sample_boundary_matches_exact():
    g = Grid.from_cfl(1.0, 9, 6, 1.0, 0.5)
    sig = SignalSpec(0.5)
    bd = sample_boundary(sig, g)
    assert np.array_equal(bd.left, exact_field(sig, g, 0.0, g.t))
    assert np.array_equal(bd.initial, exact_field(sig, g, g.x, 0.0))
    assert bd.startup is not None and bd.startup.shape == (10,)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.integers(3, 40), st.integers(2, 30), st.floats(0.1, 3.0))
def test_sigma_is_cfl(cfl, n_x, n_t, c):
    g = Grid.from_cfl(1.0, n_x, n_t, c, cfl)
    assert g.sigma == pytest.approx(cfl)
