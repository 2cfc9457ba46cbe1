"""Smoke test for the emlab_py extension.

Build first with `cargo build --release -p emlab-py`, then run
`python3 python/smoke_test.py`.
"""

import cmath
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    lib = os.path.join(ROOT, "target", "release", "libemlab_py.so")
    if not os.path.exists(lib):
        sys.exit(f"missing {lib}; run `cargo build --release -p emlab-py`")
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(tmp, "emlab_py.so"))
    sys.path.insert(0, tmp)
    import emlab_py

    return emlab_py


def main():
    em = load()

    sigma, beta, omega = em.root_triple(1.0)
    assert -0.5 < sigma < 0.0
    assert abs(beta - (-1.0 - sigma / 2)) < 1e-15
    assert abs(em.charpoly(1.0, sigma)) < 1e-12
    assert omega > 0

    c = em.sum_mode_coefficients(1.0, 1 + 0j, 0j, 0j)
    assert len(c) == 9 and abs(c[0] + c[1] - 1) < 1e-14

    rho, ulong, theta = em.sum_mode_evolve(0.5, 1 + 0j, 0j, 0j, 0.0)
    assert abs(rho - 1) < 1e-13 and abs(ulong) < 1e-13 and abs(theta) < 1e-13

    # B along z is transverse to k along x, so the constraints hold
    state = [0j] * 11
    state[10] = 1 + 0j
    out = em.diff_mode_evolve([1.0, 0.0, 0.0], state, 1.0)
    assert len(out) == 11 and all(cmath.isfinite(z) for z in out)

    ts = [float(t) for t in range(10, 60)]
    fit = em.fit_decay(ts, [(1 + t) ** -0.75 for t in ts], 10.0, 60.0)
    assert abs(fit["slope"] + 0.75) < 1e-12 and fit["samples"] == 50
    fit = em.fit_decay(ts, [math.exp(-0.5 * t) for t in ts], 10.0, 60.0, "exponential")
    assert abs(fit["slope"] + 0.5) < 1e-12

    ok, csv, checks = em.run("roots", [("samples", "50")])
    assert ok, checks
    assert csv.startswith("t,channel,value\n") and csv.endswith("\n")
    assert len(csv.splitlines()) == 1 + 4 * 50

    try:
        em.run("roots", [("colour", "red")])
    except ValueError as e:
        assert "colour" in str(e)
    else:
        raise AssertionError("unknown key accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
