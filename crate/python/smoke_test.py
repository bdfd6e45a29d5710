"""Quick check of the Python bindings. Build first with
`maturin develop -m crates/python/Cargo.toml --release`."""

import math

import critex_py as cx


def main():
    c = cx.constants(5)
    assert abs(c["sn"]["closed_form"] - math.pi**3 / 32) < 1e-12

    eta = 0.05
    star = 15 * eta / 16
    below = cx.Problem(5, 0.8 * star, f0=1.0, eta=eta, f1="neg_t2")
    cert = below.certify()
    assert cert["verdict"] == "nonexistence_certified", cert["verdict"]
    assert below.shoot()["status"] == "not_found"

    above = below.with_mu(2 * star)
    crit = above.criteria([10.0, 20.0])
    assert crit["condition_i"]["verdict"] == "strict"
    found = cx.Problem(5, 10.0).shoot()
    assert found["status"] == "found"
    assert found["pohozaev"]["relative_defect"] < 1e-5

    samples = cx.psibar_samples(5, 0.01, 20)
    assert all(v >= 0 for _, v in samples)

    try:
        cx.Problem(6, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 6 accepted")
    try:
        cx.Problem(9, 1.0).certify()
    except cx.CritexError:
        pass
    else:
        raise AssertionError("n = 9 certified")

    print("smoke test passed:", repr(below), cert["positivity"]["margin"])


if __name__ == "__main__":
    main()
