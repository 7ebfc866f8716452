"""Smoke test for the `knorm` extension module.

Build and install it first:

    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml

then run `python python/smoke_test.py`.
"""

import json
import math

import knorm


def close(x, y, tol):
    return abs(x - y) <= tol * max(1.0, abs(y))


def main():
    # 1D cubic: Q = sqrt(3) sech(sqrt(3) x), |Q|^2 = 2 sqrt(3).
    q = knorm.solve_ground_state(1, 2.0)
    assert close(q.q0, math.sqrt(3.0), 1e-9), q.q0
    norms = q.norms()
    assert close(norms.q_l2, 12.0 ** 0.25, 1e-9), norms.q_l2
    assert max(norms.pohozaev_residuals()) < 1e-8
    assert q.ode_residual() < 1e-7
    assert q.to_csv().startswith("r,Q\n")
    assert len(q.r) == len(q.values) == len(q)

    # Mass-critical closed form: I(c) = -1/(4b) at c = sqrt(2) |Q|.
    q_l2 = knorm.q_l2(2, 2.0)
    params = knorm.Params(2, 2.0, a=1.0, b=1.0, c=math.sqrt(2.0) * q_l2)
    verdict = knorm.classify(params, q_l2)
    assert verdict.regime == "mass_critical"
    assert verdict.minimizer_exists and not verdict.mp_exists
    assert close(verdict.energy, -0.25, 1e-12), verdict.energy
    assert json.loads(verdict.to_json())["minimizer_exists"] is True

    red = knorm.build_reduction(params, q_l2)
    t, f = red.global_min()
    assert close(f, verdict.energy, 1e-12) and abs(red.df(t)) < 1e-9

    flow = knorm.gradient_flow_min(params, r_max=80.0, n_intervals=800, seed_width=verdict.lambda_ ** -1)
    assert flow.converged and close(flow.energy, -0.25, 1e-3), flow.energy

    # Supercritical: mountain pass, unbounded below.
    v = knorm.classify(knorm.Params(3, 3.0, c=1.0))
    assert v.mp_exists and "energy_unbounded_below" in v.flags and v.infimum is None

    # Inadmissible exponent.
    try:
        knorm.Params(3, 5.0)
    except ValueError:
        pass
    else:
        raise AssertionError("p above 2* - 2 accepted")

    print("knorm smoke test passed")


if __name__ == "__main__":
    main()
