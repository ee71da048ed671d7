"""Quick end-to-end check of the pyppok bindings.

Build and install first:  maturin build --release -m crates/python/Cargo.toml
and pip install the wheel it prints.
"""

import json
import math

import pyppok


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    pok = pyppok.PoK(3, 1.2)
    table = pok.pmf_table(1.0, 80)
    assert close(sum(table), 1.0, 1e-10)
    assert close(table[4], pok.pmf(1.0, 4), 1e-14)
    assert close(pok.mean(10.0), 72.0, 1e-12)
    assert len(pyppok.enumerate_partitions(3, 6)) == 7

    times, sizes = pok.simulate(5.0, seed=1)
    assert times == sorted(times) and all(1 <= s <= 3 for s in sizes)
    assert pok.sample_terminal(10.0, 1000, 7) == pok.sample_terminal(10.0, 1000, 7)

    gamma = pyppok.Subordinator.gamma(3.0, 4.0)
    assert close(gamma.bernstein(1.0), 3.0 * math.log(1.25), 1e-14)
    draws = gamma.sample(1.0, 20000, 3)
    assert close(sum(draws) / len(draws), 0.75, 0.02)

    tc = pyppok.TimeChanged(pyppok.PoK(2, 1.0), gamma)
    closed, _ = tc.pmf(1.5, 15, method="closed")
    quad, _ = tc.pmf(1.5, 15, method="quadrature")
    assert max(abs(a - b) for a, b in zip(closed, quad)) < 1e-8
    assert close(pyppok.TimeChanged(pok, gamma).mean(10.0), 54.0, 1e-9)

    inverse = pyppok.TimeChanged(pyppok.PoK(2, 1.0), gamma, inverse=True)
    mean, se = inverse.inverse_mean(50.0, 2000, 5)
    assert se > 0 and mean > 0

    classical = pyppok.TimeChanged(pyppok.PoK(1, 1.0), pyppok.Subordinator.drift(1.0))
    model = pyppok.RiskModel(classical, premium=2.0)
    u, g, err = model.solve_k1(float("inf"), u_max=2.0)
    assert close(g[0], 0.5, 1e-6)
    mc = model.simulate([0.0, 1.0], [1.0], horizon=200.0, n_reps=20000, seed=9)
    assert close(mc["psi"][0], 0.5, 4 * mc["psi_se"][0] + 1e-3)

    try:
        pyppok.PoK(0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("k = 0 accepted")

    passed, report = pyppok.run_validation("combinatorics", 1)
    assert passed and json.loads(report)["passed"]
    print("pyppok smoke test passed")


if __name__ == "__main__":
    main()
