use std::path::Path;

use incompat_core::json::{parse_object, parse_states, DomainObject, MatrixJson, ObjectJson, ObjectKind};
use incompat_core::linalg::ComplexMatrix;
use incompat_core::objects::{
    instrument_distance, make_identity_instrument, make_lueders, make_measure_prepare, make_special_measure_prepare,
    make_trash_prepare, validate_instrument, validate_povm, ChoiOperation, Instrument, Povm, ValidationReport,
};
use incompat_core::robustness::{
    marginals, robustness_channels, robustness_instruments, robustness_measurements, upper_bound_joint,
    RobustnessResult, Witness,
};
use incompat_core::sdp::{SolveStatus, SolverSettings};
use incompat_core::structure::{
    compatible_indecomposable_pair, detailed_instrument, is_indecomposable, naimark_dilate, pid_counterexample,
    RANK_TOL,
};
use incompat_core::theorems::{run_suite, sig12, threads_from_env, Fixtures, SuiteConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{
    emit_object, print_report, read, report_string, say, sibling, write, Failure, Outcome, EXIT_INVALID, EXIT_OK,
    EXIT_SOLVER, EXIT_USAGE,
};
use crate::{Command, ConstructKind, PairKind, SolverArgs};

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { path, tol } => validate(&path, tol),
        Command::Robustness { kind, first, second, solver, witness } => {
            robustness(kind, &first, &second, &settings(&solver)?, witness.as_deref())
        }
        Command::Theorems { seed, trials, out, fixtures, solver } => {
            theorems(seed, trials, out.as_deref(), fixtures.as_deref(), &settings(&solver)?)
        }
        Command::Construct { kind } => construct(kind),
    }
}

fn settings(a: &SolverArgs) -> Result<SolverSettings, Failure> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    if a.max_iter == 0 {
        return Err(Failure::usage("--max-iter must be positive"));
    }
    Ok(SolverSettings { tol: a.tol, max_iter: a.max_iter, ..SolverSettings::default() })
}

fn load(path: &Path) -> Result<DomainObject, Failure> {
    parse_object(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn wrong_kind(path: &Path, want: &str, got: ObjectKind) -> Failure {
    Failure::usage(format!("{}: expected {want}, found {got:?}", path.display()).to_lowercase())
}

fn load_povm(path: &Path) -> Result<Povm, Failure> {
    match load(path)? {
        DomainObject::Povm(p) => Ok(p),
        o => Err(wrong_kind(path, "a povm", o.kind())),
    }
}

fn load_channel(path: &Path) -> Result<ChoiOperation, Failure> {
    match load(path)? {
        DomainObject::Channel(c) => Ok(c),
        o => Err(wrong_kind(path, "a channel", o.kind())),
    }
}

fn load_instrument(path: &Path) -> Result<Instrument, Failure> {
    match load(path)? {
        DomainObject::Instrument(i) => Ok(i),
        o => Err(wrong_kind(path, "an instrument", o.kind())),
    }
}

fn load_states(path: &Path) -> Result<Vec<ComplexMatrix>, Failure> {
    parse_states(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    kind: ObjectKind,
    dim_in: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim_out: Option<usize>,
    outcomes: usize,
    summary: String,
    #[serde(flatten)]
    report: &'a ValidationReport,
}

fn validate(path: &Path, tol: f64) -> Outcome {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::usage("--tol must be non-negative"));
    }
    let obj = load(path)?;
    let (report, dim_in, dim_out, outcomes) = match &obj {
        DomainObject::Povm(p) => (validate_povm(p, tol), p.dim(), None, p.outcomes()),
        DomainObject::Channel(c) => {
            let as_instrument = Instrument::new(vec![c.clone()])?;
            (validate_instrument(&as_instrument, tol), c.dim_in(), Some(c.dim_out()), 1)
        }
        DomainObject::Instrument(i) => (validate_instrument(i, tol), i.dim_in(), Some(i.dim_out()), i.outcomes()),
    };
    print_report(&ValidateReport { kind: obj.kind(), dim_in, dim_out, outcomes, summary: report.summary(), report: &report });
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

fn status_code(s: SolveStatus) -> u8 {
    if s == SolveStatus::Optimal {
        EXIT_OK
    } else {
        EXIT_SOLVER
    }
}

fn object_value(o: DomainObject) -> Value {
    serde_json::to_value(ObjectJson::from_object(&o)).expect("plain data serializes")
}

fn witness_value(kind: &str, res: &RobustnessResult, grid: (usize, usize)) -> Value {
    let (joint, noise) = match &res.witness {
        Witness::Measurements { joint, noise } => (
            object_value(DomainObject::Povm(joint.clone())),
            noise.as_ref().map(|(a, b)| [DomainObject::Povm(a.clone()), DomainObject::Povm(b.clone())]),
        ),
        Witness::Channels { joint, noise } => (
            object_value(DomainObject::Channel(joint.clone())),
            noise.as_ref().map(|(a, b)| [DomainObject::Channel(a.clone()), DomainObject::Channel(b.clone())]),
        ),
        Witness::Instruments { joint, noise } => (
            object_value(DomainObject::Instrument(joint.clone())),
            noise.as_ref().map(|(a, b)| [DomainObject::Instrument(a.clone()), DomainObject::Instrument(b.clone())]),
        ),
    };
    json!({
        "kind": kind,
        "r": sig12(res.r),
        "grid": [grid.0, grid.1],
        "output_dims": [res.out_dims.0, res.out_dims.1],
        "joint": joint,
        "noise": noise.map(|[a, b]| vec![object_value(a), object_value(b)]),
    })
}

fn robustness(kind: PairKind, first: &Path, second: &Path, s: &SolverSettings, witness: Option<&Path>) -> Outcome {
    let (name, res, grid) = match kind {
        PairKind::Measurements => {
            let (a, b) = (load_povm(first)?, load_povm(second)?);
            ("measurements", robustness_measurements(&a, &b, s)?, (a.outcomes(), b.outcomes()))
        }
        PairKind::Channels => {
            let (a, b) = (load_channel(first)?, load_channel(second)?);
            ("channels", robustness_channels(&a, &b, s)?, (1, 1))
        }
        PairKind::Instruments => {
            let (a, b) = (load_instrument(first)?, load_instrument(second)?);
            ("instruments", robustness_instruments(&a, &b, s)?, (a.outcomes(), b.outcomes()))
        }
    };
    print_report(&json!({
        "kind": name,
        "r": res.r,
        "status": res.status,
        "residuals": res.residuals,
    }));
    if let Some(path) = witness {
        write(path, &serde_json::to_string_pretty(&witness_value(name, &res, grid)).expect("plain data serializes"))?;
    }
    Ok(status_code(res.status))
}

fn theorems(seed: u64, trials: usize, out: Option<&Path>, fixtures: Option<&Path>, s: &SolverSettings) -> Outcome {
    if trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let fixtures = match fixtures {
        Some(dir) => Fixtures::from_dir(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?,
        None => Fixtures::bundled(),
    };
    let cfg = SuiteConfig { seed, trials, threads: threads_from_env(), settings: *s };
    let table = run_suite(&cfg, &fixtures);
    match out {
        Some(path) => {
            write(path, &report_string(&table))?;
            for row in &table.rows {
                say(&format!("{} {}", if row.passed { "PASS" } else { "FAIL" }, row.id));
            }
            let verdict = if table.all_passed { "all rows pass" } else { "FAILED" };
            say(&format!("seed {} trials {}: {verdict}", table.seed, table.trials));
        }
        None => print_report(&table),
    }
    Ok(if table.all_passed { EXIT_OK } else { EXIT_USAGE })
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::usage(format!("--grid expects N1xN2, got {s:?}"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Writes the object (to `out` or stdout); with `out`, prints `report` too.
fn finish(obj: DomainObject, out: Option<&Path>, report: Value) -> Outcome {
    emit_object(&obj, out)?;
    if let Some(p) = out {
        let mut report = report;
        if let Value::Object(m) = &mut report {
            m.insert("written".into(), json!([p.display().to_string()]));
        }
        print_report(&report);
    }
    Ok(EXIT_OK)
}

fn instrument_summary(i: &Instrument) -> Value {
    json!({
        "outcomes": i.outcomes(),
        "dim_in": i.dim_in(),
        "dim_out": i.dim_out(),
        "valid": validate_instrument(i, 1e-9).valid,
        "kraus_ranks": i.operations().iter().map(|o| o.kraus_rank(RANK_TOL)).collect::<Vec<_>>(),
    })
}

fn construct(kind: ConstructKind) -> Outcome {
    match kind {
        ConstructKind::Lueders { povm, out } => {
            let i = make_lueders(&load_povm(&povm)?)?;
            let r = instrument_summary(&i);
            finish(DomainObject::Instrument(i), out.as_deref(), r)
        }
        ConstructKind::SpecialMp { povm, out } => {
            let i = make_special_measure_prepare(&load_povm(&povm)?)?;
            let r = instrument_summary(&i);
            finish(DomainObject::Instrument(i), out.as_deref(), r)
        }
        ConstructKind::Mp { povm, states, out } => {
            let i = make_measure_prepare(&load_povm(&povm)?, &load_states(&states)?)?;
            let r = instrument_summary(&i);
            finish(DomainObject::Instrument(i), out.as_deref(), r)
        }
        ConstructKind::TrashPrep { states, dim_in, probs, out } => {
            if dim_in == 0 {
                return Err(Failure::usage("--dim-in must be positive"));
            }
            let i = make_trash_prepare(dim_in, &probs, &load_states(&states)?)?;
            let r = instrument_summary(&i);
            finish(DomainObject::Instrument(i), out.as_deref(), r)
        }
        ConstructKind::Identity { dim, out } => {
            if dim == 0 {
                return Err(Failure::usage("--dim must be positive"));
            }
            let i = make_identity_instrument(dim)?;
            let r = instrument_summary(&i);
            finish(DomainObject::Instrument(i), out.as_deref(), r)
        }
        ConstructKind::Detailed { instrument, out } => {
            let d = detailed_instrument(&load_instrument(&instrument)?, RANK_TOL)?;
            let mut r = instrument_summary(&d.instrument);
            r["outcome_map"] = json!(d.outcome_map);
            r["indecomposable"] = json!(is_indecomposable(&d.instrument, RANK_TOL).iter().all(|&b| b));
            finish(DomainObject::Instrument(d.instrument), out.as_deref(), r)
        }
        ConstructKind::Naimark { povm, out } => {
            let dil = naimark_dilate(&load_povm(&povm)?)?;
            let projective = Povm::new(dil.projectors.clone())?;
            let idempotency = dil.projectors.iter().map(|p| (p * p).difference_norm(p)).fold(0.0, f64::max);
            let r = json!({
                "dim": dil.dim,
                "ancilla_dim": dil.ancilla_dim,
                "ancilla_index": dil.ancilla_index,
                "unitarity_residual": dil.unitarity_residual(),
                "projector_idempotency_residual": idempotency,
                "unitary": MatrixJson::from_matrix(&dil.unitary),
            });
            finish(DomainObject::Povm(projective), out.as_deref(), r)
        }
        ConstructKind::IndecompPair { joint, grid, out } => {
            let g = load_povm(&joint)?;
            let pair = compatible_indecomposable_pair(&g, parse_grid(&grid)?)?;
            let files = [sibling(&out, "a"), sibling(&out, "b"), sibling(&out, "joint")];
            let objects = [&pair.detailed_a.instrument, &pair.detailed_b.instrument, &pair.joint];
            for (path, obj) in files.iter().zip(objects) {
                write(path, &incompat_core::json::to_json_string(&DomainObject::Instrument(obj.clone())))?;
            }
            let m = pair.pieces.len();
            let (ma, mb) = marginals(&pair.joint, (m, m), (m, m))?;
            let all_rank_one = [&pair.detailed_a.instrument, &pair.detailed_b.instrument]
                .iter()
                .all(|i| is_indecomposable(i, RANK_TOL).iter().all(|&b| b));
            print_report(&json!({
                "pieces": pair.pieces,
                "outcome_map_a": pair.detailed_a.outcome_map,
                "outcome_map_b": pair.detailed_b.outcome_map,
                "all_rank_one": all_rank_one,
                "kraus_ranks_a": instrument_summary(&pair.detailed_a.instrument)["kraus_ranks"],
                "kraus_ranks_b": instrument_summary(&pair.detailed_b.instrument)["kraus_ranks"],
                "joint_marginal_residual": instrument_distance(&ma, &pair.detailed_a.instrument)
                    .max(instrument_distance(&mb, &pair.detailed_b.instrument)),
                "dilation_unitarity_residual": pair.dilation.unitarity_residual(),
                "written": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            }));
            Ok(EXIT_OK)
        }
        ConstructKind::UpperBoundJoint { first, second, states, out } => {
            let (i1, i2) = (load_instrument(&first)?, load_instrument(&second)?);
            let etas = load_states(&states)?;
            let [eta1, eta2] = <[ComplexMatrix; 2]>::try_from(etas)
                .map_err(|v| Failure::usage(format!("expected two noise states, found {}", v.len())))?;
            let joint = upper_bound_joint(&i1, &i2, &eta1, &eta2)?;
            let mut r = instrument_summary(&joint);
            r["grid"] = json!([i1.outcomes(), i2.outcomes()]);
            finish(DomainObject::Instrument(joint), out.as_deref(), r)
        }
        ConstructKind::PidExample { outcomes, dim, solver, out } => {
            let eta = ComplexMatrix::basis_projector(dim.max(1), 0);
            let ex = pid_counterexample(outcomes, dim, &eta, &settings(&solver)?)?;
            let files = [sibling(&out, "i"), sibling(&out, "j")];
            for (path, obj) in files.iter().zip([&ex.i, &ex.j]) {
                write(path, &incompat_core::json::to_json_string(&DomainObject::Instrument(obj.clone())))?;
            }
            let code = status_code(ex.report.status_ii).max(status_code(ex.report.status_jj));
            print_report(&json!({
                "report": ex.report,
                "written": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            }));
            Ok(code)
        }
    }
}
