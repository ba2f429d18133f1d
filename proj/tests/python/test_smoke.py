"""Smoke checks for the python bindings; runnable directly or under pytest."""

import math

import drfb


def default_params():
    return drfb.BatteryParams()


def test_nernst_anchor():
    p = default_params()
    assert drfb.nernst(p, 0.5) == 2.2
    assert abs(p.nernst_slope() - 0.047387) < 1e-5


def test_invert_roundtrip():
    p = default_params()
    for k in range(1, 100):
        s = k / 100.0
        assert abs(drfb.invert(p, drfb.nernst(p, s)) - s) <= 1e-10


def test_basis_partition():
    b = drfb.uniform_basis(7)
    for s in (-0.2, 0.0, 0.31, 0.5, 0.77, 1.2):
        psi = drfb.evaluate_basis(b, s)
        assert abs(sum(psi) - 1.0) <= 1e-12
        assert all(v >= 0.0 for v in psi)
    assert drfb.lipschitz_bound(b) > 0.0


def test_synthesis_and_bounds():
    p = default_params()
    q = 9.0 / 60000.0
    sol = drfb.synthesize_gains(p, 0.9 * q, 1.1 * q, tol=5e-4)
    assert min(sol.margins) >= -1e-9
    assert sol.alpha_bar > 0.0
    rep = drfb.bound_report(p, 5.6142e-8 / 60.0, drfb.uniform_basis(7), sol)
    for key in ("gamma", "delta_bar", "gamma_w", "r_x_tilde"):
        value = rep[key]
        assert value is not None and math.isfinite(value) and value >= 0.0


def test_trace_deterministic():
    p = default_params()
    t1, v1 = drfb.synthesize_trace(p, 5.6142e-8 / 60.0, 0.9, 0.9, 60.0, 3600.0,
                                   noise_w=1e-4, seed=7)
    t2, v2 = drfb.synthesize_trace(p, 5.6142e-8 / 60.0, 0.9, 0.9, 60.0, 3600.0,
                                   noise_w=1e-4, seed=7)
    assert list(t1) == list(t2)
    assert list(v1) == list(v2)
    assert abs(drfb.invert(p, v1[0]) - 0.9) < 0.01


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in tests:
        fn()
        print(f"{fn.__name__}: ok")


if __name__ == "__main__":
    main()
