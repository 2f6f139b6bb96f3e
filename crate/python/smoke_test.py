"""Smoke test for the balanced_gaps extension module.

Build and install first, e.g. `maturin develop --release -m crates/py/Cargo.toml`
inside a virtualenv, or `pip install ./crates/py`.
"""

import math

import balanced_gaps as bg


def close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def main():
    c = bg.classify(49)
    assert c["omega_big"] == 2 and c["threshold"] == 0.0, c
    assert bg.is_eps_balanced(6, 0.40) and not bg.is_eps_balanced(6, 0.30)

    t = bg.FactorTable(10**6, 10**6 + 100)
    assert t.factorize(10**6) == [(2, 6), (5, 6)]
    assert t.is_prime(1_000_003)
    assert len(t) == 100

    d = bg.c0(2, 0.1)
    assert d["method"] == "closed_form"
    assert close(d["value"], 2 * math.log(1.05 / 0.95), 1e-14)
    q = bg.c0(3, 0.2)
    assert close(q["value"], 0.090377114195418422, 1e-9), q
    assert q["value"] <= bg.c0_upper_bound(3, 0.2)
    tail = bg.c0_tail_sum(0.02, samples=200_000)
    assert tail["below_three_eps"]

    star = bg.count_star(10_000, 2, 0.3)
    assert star["count"] == 217, star

    value, p_max, bound = bg.singular_series([0, 2], 100_000)
    assert abs(math.log(value) - math.log(1.3203236316937391)) <= bound
    assert bg.singular_series([0, 1])[0] == 0.0
    assert bg.generate_tuple(6) == [0, 2, 6, 8, 12, 18]
    assert bg.is_admissible([0, 2, 6]) and not bg.is_admissible([0, 2, 4])

    k = bg.gpy_constants(theta=0.971)
    assert k["reference"] == [6, 16], k
    assert bg.gpy_constants(delta=0.05)["k0"] == 441
    assert bg.min_k_for_two(2, 0.2)["optimal"] == [30, 2]
    assert bg.positivity_factor(10, 1, 0.0) < 0

    w = bg.lambda_r(100, 101, [0, 2, 6], 1, 50.0)
    assert close(w[0], 2.6547770849892765, 1e-12), w
    m = bg.moment("lemma1", 10_000, [0, 2, 6], 1)
    assert close(m["empirical"], 9579.50865391602, 1e-9), m
    s = bg.moment("s_statistic", 10_000, [0, 2, 6], 1, r=2, eps=0.3)
    assert math.isfinite(s["empirical"])

    bv = bg.bv_prime_discrepancy(10_000, 10)
    assert bv["set_size"] == 1229 and len(bv["per_q"]) == 10
    assert bg.bv_star_discrepancy(10_000, 2, 0.3, 5)["set_size"] == 217
    wd = bg.weighted_discrepancy(10_000, 5, 0.5, [(1, 1.0), (2, -0.5)])
    assert len(wd["per_q"]) == 5
    assert close(bg.log_integral(1e6), 78626.503995682064, 1e-12)

    for bad in (lambda: bg.classify(1), lambda: bg.c0(2, 1.5), lambda: bg.generate_tuple(0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print(f"balanced_gaps {bg.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
