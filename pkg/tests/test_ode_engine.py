import numpy as np
import pytest

from pi2.asymptotics import y_leading
from pi2.lax import compatibility_defect, pi2_residual
from pi2.ode_engine import (BVPConfig, NoConvergence, SolutionGrid, boundary_values,
                            continuation_in_T, initial_guess, jet_at, make_mesh, solve_bvp)


@pytest.fixture(scope="module")
def grid0():
    return solve_bvp(BVPConfig(L=20.0), 0.0)


# ---------------------------------------------------------------- boundary data

def test_boundary_values_large_L():
    ym, dym, yp, dyp = boundary_values(1000.0, 0.0)
    assert yp == pytest.approx(-18.17120593, abs=1e-8)
    assert ym == pytest.approx(18.17120593, abs=1e-8)
    assert dyp == pytest.approx(-(6.0 ** (1 / 3)) / 3 * 1000.0 ** (-2 / 3), rel=1e-12)
    assert dyp == pytest.approx(-0.00605707, abs=1e-8)


@pytest.mark.parametrize("T", [0.0, 1.0, -2.0])
def test_boundary_slope_matches_finite_difference(T):
    h = 1e-4
    _, dym, _, dyp = boundary_values(50.0, T)
    fd_p = (y_leading(50.0 + h, T) - y_leading(50.0 - h, T)) / (2 * h)
    fd_m = (y_leading(-50.0 + h, T) - y_leading(-50.0 - h, T)) / (2 * h)
    assert dyp == pytest.approx(fd_p, rel=1e-7)
    assert dym == pytest.approx(fd_m, rel=1e-7)


def test_boundary_antisymmetry_at_T0():
    ym, dym, yp, dyp = boundary_values(37.0, 0.0)
    assert ym == pytest.approx(-yp, abs=1e-14)
    assert dym == pytest.approx(dyp, abs=1e-16)


# ---------------------------------------------------------------- mesh and guess

def test_mesh_symmetric_and_graded():
    x = make_mesh(20.0, 16.0)
    assert x[0] == -20.0 and x[-1] == 20.0
    assert 0.0 in x
    assert np.allclose(x, -x[::-1])
    h = np.diff(x)
    assert h[len(h) // 2] < h[0] / 5


def test_initial_guess_follows_leading_order():
    x = make_mesh(10.0, 4.0)
    Y = initial_guess(x, 0.0)
    far = np.abs(x) >= 1
    assert np.allclose(Y[far, 0], [y_leading(v, 0.0) for v in x[far]])


# ---------------------------------------------------------------- solve

def test_solve_T0(grid0):
    assert grid0.residual_norm <= 1e-8
    assert grid0.engine_tag == "ode"
    assert grid0.boundary_L == 20.0
    assert grid0.y[-1] == pytest.approx(-(120.0 ** (1 / 3)), abs=1e-12)
    assert grid0.y[-1] == pytest.approx(-4.93242, abs=1e-5)
    assert not np.iscomplexobj(grid0.values)


def test_envelope_T0(grid0):
    assert np.all(np.abs(grid0.y) <= (6 * np.abs(grid0.nodes)) ** (1 / 3) + 2)


def test_bump_near_origin_for_positive_T():
    # for T > 0 the solution rises well above the leading-order envelope near x = 0
    (g,) = continuation_in_T(BVPConfig(L=20.0), [1.0])
    assert g.residual_norm <= 1e-8
    assert np.max(np.abs(g.y)) > 6.0


def test_odd_part_decays_T0(grid0):
    # (x, y) -> (-x, -y) maps solutions to solutions, but not this one to itself:
    # y(0) != 0 and the even part y(x) + y(-x) only decays like x^-2
    assert abs(jet_at(grid0, 0.0).y) > 0.1
    for x in (8.0, 10.0, 15.0):
        even = abs(jet_at(grid0, x).y + jet_at(grid0, -x).y)
        assert 0.01 / x ** 2 < even < 0.1 / x ** 2


def test_perturbed_guess_same_solution(grid0):
    rng = np.random.default_rng(0)
    nodes = grid0.nodes
    Y = grid0.values * (1 + 0.1 * rng.uniform(-1, 1, grid0.values.shape))
    other = solve_bvp(BVPConfig(L=20.0, adaptive=False), 0.0, initial_guess_grid=Y, nodes=nodes)
    assert np.max(np.abs(other.values[:, 0] - grid0.y)) <= 1e-8


def test_default_guess_vs_noisy_leading_order():
    cfg = BVPConfig(L=20.0)
    nodes = make_mesh(cfg.L, cfg.mesh_density)
    Y = initial_guess(nodes, 0.0)
    noisy = Y * (1 + 0.1 * np.random.default_rng(1).uniform(-1, 1, Y.shape))
    a = solve_bvp(cfg, 0.0)
    b = solve_bvp(cfg, 0.0, initial_guess_grid=noisy, nodes=nodes)
    for x in (-15.0, -2.0, 0.0, 3.0, 19.0):
        assert jet_at(a, x).y == pytest.approx(jet_at(b, x).y, abs=1e-8)


def test_no_convergence_reports_best_iterate():
    cfg = BVPConfig(L=20.0, newton_max_iter=1, adaptive=False)
    with pytest.raises(NoConvergence, match="no convergence") as info:
        solve_bvp(cfg, 0.0)
    assert isinstance(info.value.best, SolutionGrid)
    assert np.isfinite(info.value.residual)


def test_config_validation():
    with pytest.raises(ValueError):
        BVPConfig(L=-1.0)
    with pytest.raises(ValueError):
        BVPConfig(damping=0.0)


def test_mesh_doubling_at_zero():
    a = solve_bvp(BVPConfig(L=20.0, mesh_density=16.0), 1.0)
    b = solve_bvp(BVPConfig(L=20.0, mesh_density=32.0), 1.0)
    assert abs(jet_at(a, 0.0).y - jet_at(b, 0.0).y) <= 1e-7


def test_window_robustness(grid0):
    wide = solve_bvp(BVPConfig(L=30.0), 0.0)
    diff = max(abs(jet_at(grid0, x).y - jet_at(wide, x).y) for x in np.linspace(-10, 10, 41))
    assert diff <= 10 * 20.0 ** -2


# ---------------------------------------------------------------- continuation

def test_continuation_single_target_matches_direct(grid0):
    (g,) = continuation_in_T(BVPConfig(L=20.0), [0.0])
    for x in (-12.0, 0.0, 7.5):
        assert jet_at(g, x).y == pytest.approx(jet_at(grid0, x).y, abs=1e-9)


def test_continuation_forward():
    grids = continuation_in_T(BVPConfig(L=20.0), [0.0, 0.5, 1.0])
    assert [g.T for g in grids] == [0.0, 0.5, 1.0]
    for g in grids:
        assert g.residual_norm <= 1e-8
        ym, _, yp, _ = boundary_values(20.0, g.T)
        assert g.y[0] == pytest.approx(ym, abs=1e-12)
        assert g.y[-1] == pytest.approx(yp, abs=1e-12)


def test_continuation_backward_boundary_mirror():
    fwd = continuation_in_T(BVPConfig(L=20.0), [0.5, 1.0])
    bwd = continuation_in_T(BVPConfig(L=20.0), [-0.5, -1.0])
    for a, b in zip(fwd, bwd):
        assert b.T == -a.T
        assert b.residual_norm <= 1e-8
        assert np.isfinite(b.y).all()
        # boundary data at -T are not the mirror of those at T: the z0 branch is
        # odd only under x -> -x with T fixed
        assert b.y[0] != pytest.approx(-a.y[-1], abs=1e-6)


def test_continuation_stalls_with_error():
    cfg = BVPConfig(L=20.0, newton_max_iter=1)
    with pytest.raises(NoConvergence):
        continuation_in_T(cfg, [1.0], min_step=0.2)


# ---------------------------------------------------------------- jets

def test_jet_at_node_returns_stored_values(grid0):
    k = len(grid0.nodes) // 3
    j = jet_at(grid0, grid0.nodes[k])
    assert [j.y, j.y_x, j.y_xx, j.y_xxx] == list(grid0.values[k])


def test_jet_residual_vanishes(grid0):
    for x in (-19.3, -0.77, 0.0, 2.21, 15.5):
        assert pi2_residual(jet_at(grid0, x)) == pytest.approx(0.0, abs=1e-10)


def test_jet_defect_small(grid0):
    for x in np.linspace(-19, 19, 13):
        j = jet_at(grid0, x)
        d = compatibility_defect(1.5 - 0.5j, j)
        assert np.max(np.abs(d)) <= 10 * 1e-8


def test_jet_interpolation_consistent(grid0):
    # derivative of the interpolated y against the interpolated y_x
    x, h = 0.37, 1e-5
    fd = (jet_at(grid0, x + h).y - jet_at(grid0, x - h).y) / (2 * h)
    assert fd == pytest.approx(jet_at(grid0, x).y_x, abs=1e-6)


def test_jet_outside_window(grid0):
    with pytest.raises(ValueError):
        jet_at(grid0, 20.5)


def test_csv_header_and_digits(grid0):
    text = grid0.to_csv({"T": 0.0})
    lines = text.splitlines()
    assert lines[0] == "# T: 0.0"
    assert lines[1] == "x,y,y_x,y_xx,y_xxx,residual"
    assert len(lines) == 2 + len(grid0.nodes)
    first = lines[2].split(",")
    assert float(first[1]) == grid0.y[0]
