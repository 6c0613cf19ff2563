"""Smoke test of the blackstock_py extension module.

Build first:

    cargo build --release -p blackstock-py --features extension-module

then run ``python3 python/smoke_test.py``. Set BLACKSTOCK_PY_LIB to use another build.
"""

import importlib.util
import json
import math
import os
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    candidates = [os.environ.get("BLACKSTOCK_PY_LIB")] + [
        str(ROOT / "target" / profile / "libblackstock_py.so") for profile in ("release", "debug")
    ]
    lib = next((c for c in candidates if c and os.path.exists(c)), None)
    if lib is None:
        sys.exit("libblackstock_py.so not found; build it first")
    tmp = tempfile.mkdtemp()
    target = os.path.join(tmp, "blackstock_py.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("blackstock_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    bs = load()
    w0, branch = bs.omega0(1.0, 1.0, 1.0)
    assert abs(w0 - 0.5) < 1e-15 and branch == "oscillatory", (w0, branch)
    assert abs(bs.omega0(1.0, 2.0, 0.5)[0] - 0.125) < 1e-15

    rows = bs.spectrum(1.0, 1.0, 1.0, modes=8)
    assert len(rows) == 8
    assert min(min(r[1], r[3], r[5]) for r in rows) == 0.5

    coeffs, cond = bs.extension_coefficients(2)
    assert coeffs[0] == [3.0, 2.5, 0.5], coeffs
    assert bs.extension_determinant(3) == "12"
    assert cond > 1.0

    assert sorted(bs.presets())[0] == "big-b-accumulation"
    toml = bs.preset("nonlinear-small")
    out = bs.simulate(toml, "nonlinear")
    assert set(out) >= {"time", "L2_norm_u", "guard_min"}, sorted(out)
    assert min(out["guard_min"]) > 0.99
    rate, _, r2 = bs.fit_decay(out["time"], out["L2_norm_u"], (5.0, 30.0))
    assert abs(rate - 0.5) < 0.01, rate

    times = [0.1 * i for i in range(100)]
    rate, amp, r2 = bs.fit_decay(times, [2.0 * math.exp(-0.3 * t) for t in times])
    assert abs(rate - 0.3) < 1e-12 and abs(amp - 2.0) < 1e-10 and r2 > 0.999999

    ok, report = bs.check_compat(bs.preset("incompatible-data"))
    assert not ok and not json.loads(report)["passed"]

    for bad in (lambda: bs.simulate(toml + "\nbogus = 1\n"), lambda: bs.omega0(-1.0, 1.0, 1.0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        bs.simulate(toml.replace("amplitude = 0.001", "amplitude = 3.0"), "nonlinear")
    except ArithmeticError as e:
        assert "guard" in str(e)
    else:
        raise AssertionError("expected ArithmeticError")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
