"""Smoke test for the meanlip_py extension.

Build and stage the module first:

    cargo build -p meanlip-python --release --features extension-module
    cp target/release/libmeanlip_py.so python/meanlip_py.so
    python3 python/smoke_test.py
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import meanlip_py as ml  # noqa: E402


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    z3 = ml.Function.monomial(3)
    assert close(ml.hardy_mean(z3, 4.0, 0.5), 0.125)
    z = ml.Function.parse("monomial:1")
    assert close(ml.area_mean(z, 2.0, 0.8), 0.8 * math.sqrt(0.5), 1e-9)
    assert close(ml.dilation_gap(z, 0.9, "hardy", 3.0), 0.1)
    assert close(ml.rotation_gap(z3, 0.25, "hardy"), 2 * abs(math.sin(0.375)))

    f = ml.Function.polynomial([1 + 0j, 0.5j, -0.25])
    assert close(f(0.5 + 0j).real, 1 - 0.0625)
    assert close(ml.coefficient_norm(f, "hardy"), math.sqrt(1 + 0.25 + 0.0625))
    assert close(ml.space_norm(f, "bergman"), math.sqrt(1 + 0.25 / 2 + 0.0625 / 3))

    b = ml.Function.binomial(0.5)
    assert close(ml.space_norm(b, "hardy"), math.sqrt(4 / math.pi), 1e-9)

    xs = [2.0 ** -k for k in range(3, 12)]
    fit = ml.fit_exponent(xs, [3 * x ** 0.4 for x in xs])
    assert close(fit["alpha_hat"], 0.4)

    prof = ml.condition_profile(ml.Function.lacunary(0.5), "c", "hardy")
    assert len(prof) == 9

    w = ml.classify_weight("power:0.5")
    assert w["admissible"] and abs(w["dini_constant"] - 2.0) < 0.1
    assert not ml.classify_weight("power:1")["admissible"]

    rep = ml.equivalence_report(ml.Function.lacunary(0.5), "hardy", alpha=0.5)
    assert rep["agreement"] and rep["target_agreement"], rep
    try:
        ml.equivalence_report(z, "hardy", weight="power:1")
    except ml.MeanlipError:
        pass
    else:
        raise AssertionError("power:1 weight should be refused")
    try:
        ml.Function.parse("bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("bad spec should raise ValueError")
    assert "lacunary:0.5" in ml.corpus_ids()
    print("smoke test passed")


if __name__ == "__main__":
    main()
