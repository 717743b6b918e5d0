//! Acceptance run: the default theorem suite, mapped onto the ten criteria.
//! Prints one PASS/FAIL line per criterion, then fails if any criterion did.

use std::io::Write;

use incompat_core::json::{parse_object, DomainObject};
use incompat_core::linalg::ComplexMatrix;
use incompat_core::objects::Povm;
use incompat_core::robustness::{robustness_measurements, Witness};
use incompat_core::sdp::SolverSettings;
use incompat_core::theorems::{run_suite, threads_from_env, Fixtures, SuiteConfig, SuiteRow, SuiteTable};

fn row<'a>(t: &'a SuiteTable, id: &str) -> &'a SuiteRow {
    t.rows.iter().find(|r| r.id == id).unwrap_or_else(|| panic!("missing row {id}"))
}

fn rows_pass(t: &SuiteTable, ids: &[&str], min_samples: usize) -> Result<(), String> {
    for id in ids {
        let r = row(t, id);
        if r.samples < min_samples {
            return Err(format!("{id}: {} samples < {min_samples}", r.samples));
        }
        if !r.passed {
            let failed: Vec<String> = r
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} worst {:e} vs {:e}", c.quantity, c.worst, c.bound))
                .collect();
            return Err(format!("{id}: {} {}", failed.join("; "), r.error.clone().unwrap_or_default()));
        }
    }
    Ok(())
}

fn povm(name: &str) -> Povm {
    let text = std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    match parse_object(&text).unwrap() {
        DomainObject::Povm(p) => p,
        other => panic!("{name}: {:?}", other.kind()),
    }
}

/// The MUB optimum against the Busch feasible point, plus a direct check of
/// the returned witness: joint marginals must equal `(A + r N) / (1 + r)`.
fn mub_witness() -> Result<(), String> {
    let (a, b) = (povm("mub_x.json"), povm("mub_z.json"));
    let res = robustness_measurements(&a, &b, &SolverSettings::default()).map_err(|e| e.to_string())?;
    if !(res.r > 0.0 && res.r <= 2f64.sqrt() - 1.0 + 1e-5) {
        return Err(format!("r = {} outside (0, sqrt2 - 1]", res.r));
    }
    let Witness::Measurements { joint, noise: Some((n1, n2)) } = res.witness else {
        return Err("missing noise in witness".into());
    };
    let mut worst: f64 = 0.0;
    for x in 0..2 {
        let mut row = ComplexMatrix::zeros(2, 2);
        let mut col = ComplexMatrix::zeros(2, 2);
        for y in 0..2 {
            row += joint.effect(2 * x + y);
            col += joint.effect(2 * y + x);
        }
        let want_row = (a.effect(x) + &n1.effect(x).scale(res.r)).scale(1.0 / (1.0 + res.r));
        let want_col = (b.effect(x) + &n2.effect(x).scale(res.r)).scale(1.0 / (1.0 + res.r));
        worst = worst.max(row.difference_norm(&want_row)).max(col.difference_norm(&want_col));
    }
    if worst > 1e-5 {
        return Err(format!("witness marginal residual {worst:e}"));
    }
    Ok(())
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig { threads: threads_from_env(), ..SuiteConfig::default() };
    let fixtures = Fixtures::bundled();
    let first = run_suite(&cfg, &fixtures);
    let second = run_suite(&cfg, &fixtures);

    let n = cfg.trials;
    let criteria: Vec<(&str, Result<(), String>)> = vec![
        ("1 lower bound R_I >= max(R_M, R_C)", rows_pass(&first, &["lower-bound"], n.max(50))),
        ("2 upper bound R_I <= 1 and explicit joint", rows_pass(&first, &["upper-bound"], n.max(50))),
        ("3 tightness for measure-and-prepare pairs", rows_pass(&first, &["tightness-special-mp", "tightness-generic-mp"], 20)),
        ("4 MUB regression", rows_pass(&first, &["mub-regression"], 1).and_then(|_| mub_witness())),
        ("5 post-processing transport and monotonicity", rows_pass(&first, &["post-processing-preservation", "monotonicity"], 20)),
        ("6 trash-and-prepare compatibility", rows_pass(&first, &["trash-prepare-compatibility"], 20)),
        ("7 PID counterexample", rows_pass(&first, &["pid-counterexample"], 1)),
        ("8 indecomposable compatible pairs", rows_pass(&first, &["indecomposable-pair"], 5)),
        ("9 Lueders instruments of trivial measurements", rows_pass(&first, &["lueders-trivial"], 1)),
        (
            "10 SDP reference set and determinism",
            rows_pass(&first, &["sdp-reference"], 10).and_then(|_| {
                if first.to_json() == second.to_json() {
                    Ok(())
                } else {
                    Err("two suite runs differ".into())
                }
            }),
        ),
    ];

    // Written to the raw stderr handle so the lines survive output capture.
    let mut err = std::io::stderr().lock();
    let mut failed = 0;
    for (name, result) in &criteria {
        match result {
            Ok(()) => writeln!(err, "PASS {name}").unwrap(),
            Err(e) => {
                failed += 1;
                writeln!(err, "FAIL {name}: {e}").unwrap();
            }
        }
    }
    assert!(first.all_passed && failed == 0, "{failed} criteria failed");
}
