//! Example commands and golden-file helpers shared by the CLI test targets.

#![allow(dead_code)]

use std::path::PathBuf;
use std::time::{Duration, Instant};

pub const EXAMPLES: &[(&str, &[&str])] = &[
    ("ml_e", &["ml", "--alpha", "1", "--z", "1"]),
    (
        "ml_sweep",
        &[
            "ml",
            "--alpha",
            "0.5",
            "--z-from",
            "-2",
            "--z-to",
            "2",
            "--z-steps",
            "8",
        ],
    ),
    (
        "deriv_power",
        &[
            "deriv", "--expr", "(t-1)^2", "--alpha", "0.5", "--rho", "1", "--a", "1", "--b", "2",
            "--t", "2", "--n-grid", "2048",
        ],
    ),
    (
        "deriv_right_sweep",
        &[
            "deriv",
            "--expr",
            "exp(t)",
            "--alpha",
            "1.5",
            "--rho",
            "2",
            "--a",
            "1",
            "--b",
            "2",
            "--side",
            "right",
            "--t-from",
            "1",
            "--t-to",
            "2",
            "--t-steps",
            "4",
        ],
    ),
    (
        "deriv_rl",
        &[
            "deriv",
            "--kind",
            "rl",
            "--expr",
            "(t^2-1)^1.5",
            "--alpha",
            "0.5",
            "--rho",
            "2",
            "--a",
            "1",
            "--b",
            "2",
            "--t",
            "1.5",
        ],
    ),
    (
        "integral_sweep",
        &[
            "integral",
            "--expr",
            "cos(t)",
            "--alpha",
            "0.7",
            "--rho",
            "0.5",
            "--a",
            "1",
            "--b",
            "3",
            "--t-from",
            "1",
            "--t-to",
            "3",
            "--t-steps",
            "4",
        ],
    ),
    (
        "solve_constant",
        &[
            "solve", "--f", "0", "--alpha", "0.5", "--rho", "1", "--a", "1", "--b", "2", "--init",
            "3", "--n-grid", "64",
        ],
    ),
    (
        "solve_eigen",
        &[
            "solve", "--f", "x", "--alpha", "0.5", "--a", "1", "--b", "2", "--init", "1",
            "--n-grid", "128",
        ],
    ),
    (
        "gronwall_series",
        &[
            "gronwall", "--v", "1", "--g", "1", "--alpha", "0.5", "--a", "1", "--b", "2",
            "--n-grid", "32",
        ],
    ),
    (
        "gronwall_ml_right",
        &[
            "gronwall", "--v", "3 - t", "--g", "2/t", "--u", "1", "--alpha", "0.7", "--rho", "1.5",
            "--a", "1", "--b", "2", "--side", "right", "--form", "ml", "--n-grid", "16",
        ],
    ),
    (
        "compare",
        &[
            "compare",
            "--f",
            "-x + t",
            "--g",
            "-x + t + 0.01*sin(t)",
            "--init-x",
            "1",
            "--init-y",
            "1.05",
            "--lipschitz",
            "1",
            "--psi",
            "0.01",
            "--alpha",
            "0.8",
            "--rho",
            "1.5",
            "--a",
            "1",
            "--b",
            "2",
            "--n-grid",
            "64",
        ],
    ),
    (
        "ibp_check",
        &[
            "ibp-check",
            "--x",
            "cos(t)",
            "--y",
            "sin(t)",
            "--alpha",
            "0.3",
            "--rho",
            "2",
            "--a",
            "1",
            "--b",
            "2",
            "--n-grid",
            "1024",
        ],
    ),
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.csv"))
}

pub fn run(args: &[&str]) -> (i32, String, Duration) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let start = Instant::now();
    let code = frackit_cli::run_with(
        std::iter::once("frackit").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), start.elapsed())
}

pub fn fields_match(got: &str, want: &str) -> bool {
    if got == want {
        return true;
    }
    match (got.parse::<f64>(), want.parse::<f64>()) {
        (Ok(g), Ok(w)) => (g - w).abs() <= 1e-9 * w.abs().max(1.0),
        _ => false,
    }
}

/// Compares a run's CSV with the committed file for `name`.
pub fn compare_golden(name: &str, out: &str) -> Result<(), String> {
    let path = golden_path(name);
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (g, w): (Vec<&str>, Vec<&str>) = (out.lines().collect(), want.lines().collect());
    if g.len() != w.len() {
        return Err(format!("{name}: {} rows, expected {}", g.len(), w.len()));
    }
    if g.first() != w.first() {
        return Err(format!("{name}: header differs"));
    }
    for (row, (gl, wl)) in g.iter().zip(&w).enumerate().skip(1) {
        let (gf, wf): (Vec<&str>, Vec<&str>) = (gl.split(',').collect(), wl.split(',').collect());
        if gf.len() != wf.len() {
            return Err(format!("{name} row {row}: field count"));
        }
        for (a, b) in gf.iter().zip(&wf) {
            if !fields_match(a, b) {
                return Err(format!("{name} row {row}: {a} vs {b}"));
            }
        }
    }
    Ok(())
}
