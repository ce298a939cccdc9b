"""Smoke test for the choquet_roof extension module.

Build and install first, e.g. `pip install maturin && maturin develop --release`
from crates/py, then run `python python/smoke_test.py`.
"""

import json
import math

import choquet_roof as cr


def bell():
    h = 0.5
    m = [[0j] * 4 for _ in range(4)]
    for i in (0, 3):
        for j in (0, 3):
            m[i][j] = complex(h, 0)
    return cr.State(m, dims=(2, 2))


def main():
    rho = bell()
    assert rho.dim == 4 and rho.dims == (2, 2)
    assert abs(cr.wootters_eof(rho) - 1.0) < 1e-12
    assert abs(cr.concurrence(rho) - 1.0) < 1e-12

    r = cr.eof(rho, restarts=4)
    assert abs(r.value - 1.0) < 1e-6, r
    assert r.bound == "upper"
    assert abs(sum(r.ensemble.weights) - 1.0) < 1e-12

    mixed = cr.State.random(4, 3, seed=7, dims=(2, 2))
    assert abs(cr.eof(mixed, restarts=4).value - cr.wootters_eof(mixed)) < 2e-3
    assert cr.efn(mixed, 2, restarts=2).value <= math.log2(2) + 1e-9

    hull = cr.concave_hull("purity-gap", cr.State.maximally_mixed(2), mixing=0.01, restarts=1)
    assert abs(hull.value - 0.99005) < 1e-9 and hull.bound == "lower"

    nu = cr.Ensemble.random(3, 2, seed=1)
    mu = nu.refine()
    status, plan, _ = cr.dominates(mu, nu)
    assert status == "dominates" and len(plan) == len(nu)
    assert cr.dominates(nu, mu)[0] == "not-dominates"

    target = nu.barycenter().mix(cr.State.random(3, 3, seed=2), 0.01)
    steered, eps = cr.steer(nu, target)
    assert steered.barycenter().trace_distance(target) < 1e-9 and eps > 0

    again = cr.Ensemble.from_json(mu.to_json())
    assert again.distance(mu) < 1e-9

    try:
        cr.efn(rho, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("efn with n = 1 must fail")

    code, out, _ = cr.run_cli(["demo", "remark1"])
    assert code == 0 and out.splitlines()[1] == "0.1,0.905"
    code, out, _ = cr.run_cli(["oracle", "wootters", "/nonexistent.json"])
    assert code == 2

    print(json.dumps({"eof_bell": r.value, "hull": hull.value, "status": status}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
