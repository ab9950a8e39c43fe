"""Smoke test for the crossvar_py extension.

Build and install first, e.g. `pip install --no-build-isolation -e crates/python`
or `maturin develop -m crates/python/Cargo.toml`.
"""

import math

import crossvar_py as cv


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    x, y = cv.dataset("ds1")
    c = cv.crossvar_test(x, y, alpha=0.01)
    t = cv.pooled_t_test(x, y, alpha=0.01)
    close(c.p_value, 0.411, 5e-4)
    close(c.p_value, t.p_value, 1e-12)
    assert c.decision == "ACCEPT" and not c.reject
    assert c.method == "CROSSVAR"

    x4, y4 = cv.dataset("ds4")
    for policy, p, decision in [("min", 0.021, "ACCEPT"), ("max", 0.004, "REJECT"), ("avg", 0.009, "REJECT")]:
        r = cv.crossvar_test(x4, y4, alpha=0.01, n_policy=policy)
        close(r.p_value, p, 5e-4)
        assert r.decision == decision
        assert r.n_policy == policy

    f = cv.f_variance_test(*cv.dataset("ds13"))
    assert f.decision == "REJECT" and isinstance(f.df, tuple)

    m = cv.TstarModel(8)
    close(m.cdf(0.8298), 0.411, 5e-4)
    close(m.cdf(m.quantile(0.05)), 0.05, 1e-9)
    close(m.cdf_series(0.2), m.cdf(0.2), 1e-8)

    g = cv.GeneralModel(5, 1.0, 1.0)
    close(g.cdf(1.0), 1.0, 1e-6)
    value, converged = g.cdf_series(0.05)
    if converged:
        close(value, g.cdf(0.05), 1e-6)
    draws = g.sample(20000, 7)
    assert len(draws) == 20000 and all(0.0 < d < 1.0 for d in draws)
    ecdf = sum(d <= 0.5 for d in draws) / len(draws)
    close(ecdf, g.cdf(0.5), 3 / math.sqrt(len(draws)))

    curve = cv.power_study(10, 2.0, [9.2, 12.0], reps=400, seed=1)
    assert curve == cv.power_study(10, 2.0, [9.2, 12.0], reps=400, seed=1)
    assert curve[1][2] > curve[0][2]

    rates, identical = cv.type1_study(25, 3.5, reps=500, seed=42)
    assert identical
    assert all(p == t for _, p, t in rates)

    try:
        cv.crossvar_test([1.0, 1.0], [1.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate input accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
