use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &str) {
    Python::with_gil(|py| {
        let m = pyo3::wrap_pymodule!(blackstock_py::blackstock_py)(py);
        let globals = PyDict::new_bound(py);
        globals.set_item("bs", m).unwrap();
        if let Err(e) = py.run_bound(code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn decay_constant_and_spectrum() {
    with_module(
        r#"
w0, branch = bs.omega0(1.0, 1.0, 1.0)
assert w0 == 0.5 and branch == "oscillatory"
assert bs.omega0(4.0, 1.0, 10.0, bc="neumann")[1] == "oscillatory"
rows = bs.spectrum(1.0, 3.0, 1.0, modes=4)
assert [r[0] for r in rows] == [1.0, 4.0, 9.0, 16.0]
assert abs(bs.mode_rate(1.0, 1.0, 3.0, 1.0) - min(1.0, rows[0][3])) < 1e-15
"#,
    );
}

#[test]
fn extension_and_fit() {
    with_module(
        r#"
c, cond = bs.extension_coefficients(1)
assert c == [[2.0, 1.0], [-1.0, -1.0]], c
assert bs.extension_determinant(4) == "288"
import math
t = [0.05 * i for i in range(200)]
rate, amp, r2 = bs.fit_decay(t, [5.0 * math.exp(-1.25 * s) for s in t])
assert abs(rate - 1.25) < 1e-12 and abs(amp - 5.0) < 1e-10
"#,
    );
}

#[test]
fn scenarios_and_errors() {
    with_module(
        r#"
toml = bs.preset("dirichlet-baseline").replace("horizon = 30.0", "horizon = 1.0")
out = bs.simulate(toml)
assert len(out["time"]) == 101 and "guard_min" not in out
assert abs(out["L2_norm_u"][0] - (3.141592653589793 / 2) ** 0.5) < 1e-12
ok, _ = bs.check_compat(toml)
assert ok
for call in (lambda: bs.preset("nope"), lambda: bs.simulate(toml, "sideways"), lambda: bs.extension_coefficients(12)):
    try:
        call()
    except (ValueError, ArithmeticError):
        pass
    else:
        raise AssertionError("expected an error")
"#,
    );
}
