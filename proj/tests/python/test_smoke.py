"""Smoke checks for the Python bindings; runnable directly: python test_smoke.py"""

import math

import rmtde


def make_scenario():
    user = rmtde.UserSpec(n=8, fading=rmtde.FadingSpec.gaussian())
    return rmtde.build_scenario(8, [user])


def test_fixed_point_matches_closed_form():
    spec = make_scenario()
    m = rmtde.det_stieltjes(spec, -1.0 + 0.0j)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    assert abs(m - golden) < 1e-8

    result = rmtde.solve_fixed_point(spec, -1.0 + 0.0j)
    assert result.state.converged
    assert abs(result.state.e[0] - golden) < 1e-8
    assert result.Psi.shape == (8, 8)


def test_rate_and_diagnostics():
    spec = make_scenario()
    rate = rmtde.det_shannon(spec, 1.0)
    assert abs(rate - 0.5804576388691018) < 1e-8
    assert abs(rmtde.shannon_via_integral(spec, 1.0) - rate) < 1e-3

    diag = rmtde.uniqueness_diagnostic(spec, rmtde.solve_fixed_point(spec, -1.0 + 0.0j))
    assert diag.spectral_radius < 1.0

    ident = rmtde.moment_identity(spec)
    assert abs(ident.trace_formula - 1.0) < 1e-10
    assert abs(ident.probe - 1.0) < 1e-3


def test_sampling_and_ensembles():
    spec = make_scenario()
    draw = rmtde.assemble_channel(spec, 7)
    assert draw.B.shape == (8, 8)
    mi = rmtde.empirical_mutual_info(draw, 1.0)
    assert mi > 0.0

    r1 = rmtde.run_ensemble(spec, rmtde.Quantity.MutualInfo, [1.0 + 0.0j], 16, 3, 1)
    r2 = rmtde.run_ensemble(spec, rmtde.Quantity.MutualInfo, [1.0 + 0.0j], 16, 3, 4)
    assert r1.points[0].mean == r2.points[0].mean
    assert r1.points[0].variance == r2.points[0].variance


def test_correlation_and_json():
    R = rmtde.ula_correlation(4, 10.0, 15.0)
    assert abs(R[0, 0] - 1.0) < 1e-14
    user = rmtde.UserSpec(n=4, R=R, T=rmtde.ula_correlation(4, 0.0, 12.0),
                          fading=rmtde.FadingSpec.lognormal_with_cv(1.0))
    spec = rmtde.build_scenario(4, [user])
    text = rmtde.scenario_to_json(spec)
    back = rmtde.scenario_from_json(text)
    assert back.N == 4
    assert abs(back.users[0].R[1, 0] - spec.users[0].R[1, 0]) < 1e-12

    cv = rmtde.cv_of(rmtde.FadingSpec.nakagami(1.0))
    assert abs(cv - math.sqrt(4.0 / math.pi - 1.0)) < 1e-12


def test_covariance_optimization():
    user = rmtde.UserSpec(n=4, T=rmtde.ula_correlation(4, 0.0, 12.0))
    spec = rmtde.build_scenario(4, [user])
    sol = rmtde.optimize_covariance(spec, 1.0)
    assert sol.rate >= sol.rate_trajectory[0] - 1e-9
    assert abs(sol.Q[0].trace() - 4.0) < 1e-9

    gains = rmtde.waterfill_allocation([2.0, 1.0], 1.0)
    assert abs(gains[0] - 0.75) < 1e-12 and abs(gains[1] - 0.25) < 1e-12


def test_errors_surface_as_python_exceptions():
    try:
        rmtde.build_scenario(0, [])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
