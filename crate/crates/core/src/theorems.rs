//! The theorem suite: one table row per claim, each checked on seeded
//! random samples or bundled fixtures.
//!
//! Trials are independent (one RNG stream each) and may run on several
//! threads; rows and trials are always aggregated in index order, so a seed
//! fully determines the table.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use serde::Serialize;

use crate::json::{parse_object, DomainObject, JsonError};
use crate::linalg::{kron, ComplexMatrix};
use crate::objects::{
    induced_povm, instrument_distance, make_lueders, make_measure_prepare, make_special_measure_prepare,
    make_trash_prepare, povm_distance, ChoiOperation, Instrument, Povm,
};
use crate::random::{random_distribution, random_instrument, random_povm, random_state, random_unitary, trial_rng};
use crate::reference::reference_problems;
use crate::robustness::{
    marginals, robustness_instruments, robustness_measurements, upper_bound_joint, verify_bound_theorems,
    RobustnessResult,
};
use crate::sdp::{solve, SolveStatus, SolverSettings};
use crate::structure::{
    compatible_indecomposable_pair, free_operation_compat_transport, is_indecomposable, pid_counterexample,
    post_process, PostProcessingFamily, RANK_TOL,
};

/// Generalized robustness of the qubit σx/σz measurement pair, frozen from an
/// independent conic-solver computation.
pub const MUB_MEASUREMENT_ROBUSTNESS: f64 = 0.171_572_875_25;

pub const THREADS_ENV: &str = "INSTR_INCOMPAT_THREADS";

/// Worker count from the environment: unset means all cores, 0 means serial.
pub fn threads_from_env() -> usize {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().unwrap_or(0),
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

/// `f(0..count)` on up to `threads` workers, results in index order.
pub fn parallel_map<T: Send>(count: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads.min(count) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let v = f(i);
                *slots[i].lock().expect("no poisoned slot") = Some(v);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("no poisoned slot").expect("every index ran")).collect()
}

/// Rounds to 12 significant digits, the precision of every printed number.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub quantity: &'static str,
    /// Worst value over the row's samples.
    pub worst: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub id: &'static str,
    pub claim: &'static str,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteTable {
    pub seed: u64,
    pub trials: usize,
    pub all_passed: bool,
    pub rows: Vec<SuiteRow>,
}

impl SuiteTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub threads: usize,
    pub settings: SolverSettings,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 2024, trials: 50, threads: 1, settings: SolverSettings::default() }
    }
}

/// Input files some rows are built on.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub mub_x: String,
    pub mub_z: String,
    pub trivial_qubit: String,
    pub commuting_joint_d2: String,
    pub commuting_joint_d3: String,
}

pub const FIXTURE_NAMES: [&str; 5] =
    ["mub_x.json", "mub_z.json", "trivial_qubit.json", "commuting_joint_d2.json", "commuting_joint_d3.json"];

impl Fixtures {
    pub fn bundled() -> Self {
        Self {
            mub_x: include_str!("../fixtures/mub_x.json").into(),
            mub_z: include_str!("../fixtures/mub_z.json").into(),
            trivial_qubit: include_str!("../fixtures/trivial_qubit.json").into(),
            commuting_joint_d2: include_str!("../fixtures/commuting_joint_d2.json").into(),
            commuting_joint_d3: include_str!("../fixtures/commuting_joint_d3.json").into(),
        }
    }

    /// Reads the fixture files from `dir`; missing files are an error.
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |name: &str| std::fs::read_to_string(dir.join(name));
        Ok(Self {
            mub_x: read(FIXTURE_NAMES[0])?,
            mub_z: read(FIXTURE_NAMES[1])?,
            trivial_qubit: read(FIXTURE_NAMES[2])?,
            commuting_joint_d2: read(FIXTURE_NAMES[3])?,
            commuting_joint_d3: read(FIXTURE_NAMES[4])?,
        })
    }
}

fn fixture_povm(text: &str, name: &str) -> Result<Povm, String> {
    match parse_object(text) {
        Ok(DomainObject::Povm(p)) => {
            let report = crate::objects::validate_povm(&p, 1e-9);
            if report.valid {
                Ok(p)
            } else {
                Err(format!("fixture {name}: {}", report.summary()))
            }
        }
        Ok(other) => Err(format!("fixture {name}: expected a POVM, found {:?}", other.kind())),
        Err(e @ JsonError::Syntax(_)) | Err(e @ JsonError::Format(_)) | Err(e @ JsonError::Object(_)) => {
            Err(format!("fixture {name}: {e}"))
        }
    }
}

type TrialResult = Result<Vec<f64>, String>;
type JointCase = Result<(Povm, (usize, usize)), String>;

struct Bound {
    quantity: &'static str,
    relation: Relation,
    bound: f64,
}

const fn at_most(quantity: &'static str, bound: f64) -> Bound {
    Bound { quantity, relation: Relation::AtMost, bound }
}

const fn at_least(quantity: &'static str, bound: f64) -> Bound {
    Bound { quantity, relation: Relation::AtLeast, bound }
}

fn aggregate(id: &'static str, claim: &'static str, bounds: &[Bound], results: &[TrialResult]) -> SuiteRow {
    let error = results.iter().find_map(|r| r.as_ref().err().cloned());
    let checks: Vec<Check> = bounds
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let values = results.iter().filter_map(|r| r.as_ref().ok()).map(|v| v[k]);
            let worst = match s.relation {
                Relation::AtMost => values.fold(f64::NEG_INFINITY, f64::max),
                Relation::AtLeast => values.fold(f64::INFINITY, f64::min),
            };
            let passed = match s.relation {
                Relation::AtMost => worst <= s.bound,
                Relation::AtLeast => worst >= s.bound,
            };
            Check { quantity: s.quantity, worst: sig12(worst), relation: s.relation, bound: s.bound, passed }
        })
        .collect();
    SuiteRow {
        id,
        claim,
        samples: results.len(),
        passed: error.is_none() && !results.is_empty() && checks.iter().all(|c| c.passed),
        checks,
        error,
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn not_optimal(results: &[&RobustnessResult]) -> f64 {
    results.iter().filter(|r| r.status != SolveStatus::Optimal).count() as f64
}

/// Row identifiers, which also select the RNG stream family of each row.
mod rows {
    pub const BOUNDS: u32 = 1;
    pub const TIGHT_SPECIAL: u32 = 2;
    pub const TIGHT_GENERIC: u32 = 3;
    pub const TRANSPORT: u32 = 4;
    pub const MONOTONE: u32 = 5;
    pub const TRASH: u32 = 6;
    pub const LUEDERS: u32 = 7;
    pub const INDECOMPOSABLE: u32 = 8;
}

fn random_qubit_instrument(rng: &mut impl rand::Rng) -> Instrument {
    let rank = rng.gen_range(1..=2);
    random_instrument(2, 2, 2, rank, rng)
}

fn random_family(parent_outcomes: usize, rng: &mut impl rand::Rng) -> Result<PostProcessingFamily, String> {
    let children = (0..parent_outcomes)
        .map(|_| {
            let rank = rng.gen_range(1..=2);
            random_instrument(2, 2, 2, rank, rng)
        })
        .collect();
    PostProcessingFamily::new(children).map_err(err)
}

fn bounds_trial(cfg: &SuiteConfig, t: usize) -> TrialResult {
    let mut rng = trial_rng(cfg.seed, rows::BOUNDS, t as u32);
    let i1 = random_qubit_instrument(&mut rng);
    let i2 = random_qubit_instrument(&mut rng);
    let report = verify_bound_theorems(&i1, &i2, &cfg.settings).map_err(err)?;
    let eta1 = random_state(2, 2, &mut rng);
    let eta2 = random_state(2, 2, &mut rng);
    let joint = upper_bound_joint(&i1, &i2, &eta1, &eta2).map_err(err)?;
    let (m1, m2) = marginals(&joint, (2, 2), (2, 2)).map_err(err)?;
    let noisy = |i: &Instrument, eta: &ComplexMatrix| -> Result<Instrument, String> {
        let trash = make_trash_prepare(2, &[0.5, 0.5], &[eta.clone(), eta.clone()]).map_err(err)?;
        Instrument::mix(&[(0.5, i), (0.5, &trash)]).map_err(err)
    };
    let residual = instrument_distance(&m1, &noisy(&i1, &eta1)?).max(instrument_distance(&m2, &noisy(&i2, &eta2)?));
    Ok(vec![
        report.r_measurements.max(report.r_channels) - report.r_instruments,
        report.r_instruments - 1.0,
        residual,
        if report.all_optimal { 0.0 } else { 1.0 },
    ])
}

fn tightness_trial(cfg: &SuiteConfig, t: usize, generic: bool) -> TrialResult {
    let row = if generic { rows::TIGHT_GENERIC } else { rows::TIGHT_SPECIAL };
    let mut rng = trial_rng(cfg.seed, row, t as u32);
    let n1 = rng.gen_range(2..=3);
    let n2 = rng.gen_range(2..=3);
    let a1 = random_povm(2, n1, &mut rng);
    let a2 = random_povm(2, n2, &mut rng);
    let (i1, i2) = if generic {
        let s1: Vec<_> = (0..n1).map(|_| random_state(2, 2, &mut rng)).collect();
        let s2: Vec<_> = (0..n2).map(|_| random_state(2, 2, &mut rng)).collect();
        (make_measure_prepare(&a1, &s1).map_err(err)?, make_measure_prepare(&a2, &s2).map_err(err)?)
    } else {
        (make_special_measure_prepare(&a1).map_err(err)?, make_special_measure_prepare(&a2).map_err(err)?)
    };
    let ri = robustness_instruments(&i1, &i2, &cfg.settings).map_err(err)?;
    let rm = robustness_measurements(&a1, &a2, &cfg.settings).map_err(err)?;
    Ok(vec![(ri.r - rm.r).abs(), not_optimal(&[&ri, &rm])])
}

fn transport_trial(cfg: &SuiteConfig, t: usize) -> TrialResult {
    let mut rng = trial_rng(cfg.seed, rows::TRANSPORT, t as u32);
    let rank = rng.gen_range(1..=2);
    let joint = random_instrument(2, 4, 4, rank, &mut rng);
    let (p1, p2) = marginals(&joint, (2, 2), (2, 2)).map_err(err)?;
    let f1 = random_family(2, &mut rng)?;
    let f2 = random_family(2, &mut rng)?;
    let moved = free_operation_compat_transport(&joint, (2, 2), &f1, &f2).map_err(err)?;
    let (m1, m2) = marginals(&moved, (2, 2), (2, 2)).map_err(err)?;
    let c1 = post_process(&p1, &f1).map_err(err)?;
    let c2 = post_process(&p2, &f2).map_err(err)?;
    Ok(vec![instrument_distance(&m1, &c1).max(instrument_distance(&m2, &c2))])
}

fn monotone_trial(cfg: &SuiteConfig, t: usize) -> TrialResult {
    let mut rng = trial_rng(cfg.seed, rows::MONOTONE, t as u32);
    let p1 = random_qubit_instrument(&mut rng);
    let p2 = random_qubit_instrument(&mut rng);
    let c1 = post_process(&p1, &random_family(2, &mut rng)?).map_err(err)?;
    let c2 = post_process(&p2, &random_family(2, &mut rng)?).map_err(err)?;
    let rp = robustness_instruments(&p1, &p2, &cfg.settings).map_err(err)?;
    let rc = robustness_instruments(&c1, &c2, &cfg.settings).map_err(err)?;
    Ok(vec![rc.r - rp.r, not_optimal(&[&rp, &rc])])
}

fn trash_trial(cfg: &SuiteConfig, t: usize) -> TrialResult {
    let mut rng = trial_rng(cfg.seed, rows::TRASH, t as u32);
    let inst = random_qubit_instrument(&mut rng);
    let n = rng.gen_range(2..=3);
    let probs = random_distribution(n, &mut rng);
    let states: Vec<_> = (0..n).map(|_| random_state(2, 2, &mut rng)).collect();
    let trash = make_trash_prepare(2, &probs, &states).map_err(err)?;
    let res = robustness_instruments(&inst, &trash, &cfg.settings).map_err(err)?;
    // Explicit joint with the identity: ρ ↦ ρ ⊗ p_x η_x.
    let id = Instrument::new(vec![ChoiOperation::identity(2)]).map_err(err)?;
    let joint = Instrument::new(
        trash
            .operations()
            .iter()
            .map(|op| {
                let prep = crate::objects::apply_operation(op, &ComplexMatrix::identity(2).scale(0.5))?;
                ChoiOperation::new(2, 4, kron(ChoiOperation::identity(2).choi(), &prep))
            })
            .collect::<Result<_, _>>()
            .map_err(err)?,
    )
    .map_err(err)?;
    let (m1, m2) = marginals(&joint, (1, n), (2, 2)).map_err(err)?;
    let explicit = instrument_distance(&m1, &id).max(instrument_distance(&m2, &trash));
    Ok(vec![res.r, explicit, not_optimal(&[&res])])
}

fn lueders_trial(cfg: &SuiteConfig, t: usize, fixture: &Povm) -> TrialResult {
    let p = if t == 0 {
        fixture.clone()
    } else {
        let mut rng = trial_rng(cfg.seed, rows::LUEDERS, t as u32);
        Povm::trivial(2, &random_distribution(2, &mut rng)).map_err(err)?
    };
    let probs: Vec<f64> = p.effects().iter().map(|e| e[(0, 0)].re).collect();
    let lueders = make_lueders(&p).map_err(err)?;
    let basis: Vec<_> = (0..2).map(|x| ComplexMatrix::basis_projector(2, x)).collect();
    let trash = make_trash_prepare(2, &probs, &basis).map_err(err)?;
    let rl = robustness_instruments(&lueders, &lueders, &cfg.settings).map_err(err)?;
    let rt = robustness_instruments(&trash, &trash, &cfg.settings).map_err(err)?;
    let same_povm = povm_distance(&induced_povm(&lueders), &p).max(povm_distance(&induced_povm(&trash), &p));
    Ok(vec![rl.r, rt.r, same_povm, not_optimal(&[&rl, &rt])])
}

/// `G(x, y) = U P_x Q_y U†` for coarse-grained diagonal projectors.
fn commuting_joint(d: usize, rng: &mut impl rand::Rng) -> (Povm, (usize, usize)) {
    let u = random_unitary(d, rng);
    let labels = |n: usize, rng: &mut dyn rand::RngCore| -> Vec<usize> {
        // Every label appears at least once.
        let mut l: Vec<usize> = (0..d).map(|i| i % n).collect();
        for i in (1..d).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            l.swap(i, j);
        }
        l
    };
    let n1 = 2;
    let n2 = d.min(3);
    let l1 = labels(n1, rng);
    let l2 = labels(n2, rng);
    let effects = (0..n1 * n2)
        .map(|xy| {
            let diag: Vec<f64> = (0..d).map(|i| f64::from(u8::from(l1[i] == xy / n2 && l2[i] == xy % n2))).collect();
            ComplexMatrix::diag_real(&diag).conjugate_by(&u).hermitian_part()
        })
        .collect();
    (Povm::new(effects).expect("consistent shapes"), (n1, n2))
}

fn indecomposable_trial(cfg: &SuiteConfig, g: &Povm, grid: (usize, usize)) -> TrialResult {
    let pair = compatible_indecomposable_pair(g, grid).map_err(err)?;
    let all_rank_one = [&pair.detailed_a.instrument, &pair.detailed_b.instrument]
        .iter()
        .all(|i| is_indecomposable(i, RANK_TOL).iter().all(|&b| b));
    let res = robustness_instruments(&pair.detailed_a.instrument, &pair.detailed_b.instrument, &cfg.settings)
        .map_err(err)?;
    let (n1, n2) = grid;
    let marginal = |side_a: bool| -> Povm {
        let count = if side_a { n1 } else { n2 };
        let effects = (0..count)
            .map(|k| {
                let mut e = ComplexMatrix::zeros(g.dim(), g.dim());
                for xy in 0..n1 * n2 {
                    if (side_a && xy / n2 == k) || (!side_a && xy % n2 == k) {
                        e += g.effect(xy);
                    }
                }
                e
            })
            .collect();
        Povm::new(effects).expect("consistent shapes")
    };
    let povm_err = povm_distance(&induced_povm(&pair.coarse_a), &marginal(true))
        .max(povm_distance(&induced_povm(&pair.coarse_b), &marginal(false)));
    Ok(vec![if all_rank_one { 0.0 } else { 1.0 }, res.r, povm_err, not_optimal(&[&res])])
}

pub fn run_suite(cfg: &SuiteConfig, fixtures: &Fixtures) -> SuiteTable {
    let n = cfg.trials.max(1);
    let th = cfg.threads;
    let mut out = Vec::new();

    let bounds = parallel_map(n, th, |t| bounds_trial(cfg, t));
    let lower: Vec<TrialResult> = bounds.iter().map(|r| r.clone().map(|v| vec![v[0], v[3]])).collect();
    let upper: Vec<TrialResult> = bounds.iter().map(|r| r.clone().map(|v| vec![v[1], v[2], v[3]])).collect();
    out.push(aggregate(
        "lower-bound",
        "R_I >= max(R_M, R_C) on random qubit instrument pairs",
        &[at_most("max(R_M, R_C) - R_I", 1e-5), at_most("non-optimal solves", 0.0)],
        &lower,
    ));
    out.push(aggregate(
        "upper-bound",
        "R_I <= 1, with the explicit half-noise joint reproducing its marginals",
        &[at_most("R_I - 1", 1e-5), at_most("joint marginal residual", 1e-8), at_most("non-optimal solves", 0.0)],
        &upper,
    ));

    let tight = parallel_map(n, th, |t| tightness_trial(cfg, t, false));
    out.push(aggregate(
        "tightness-special-mp",
        "special measure-and-prepare pairs have R_I = R_M",
        &[at_most("|R_I - R_M|", 2e-5), at_most("non-optimal solves", 0.0)],
        &tight,
    ));
    let tight = parallel_map(n, th, |t| tightness_trial(cfg, t, true));
    out.push(aggregate(
        "tightness-generic-mp",
        "measure-and-prepare pairs with arbitrary target states have R_I = R_M",
        &[at_most("|R_I - R_M|", 2e-5), at_most("non-optimal solves", 0.0)],
        &tight,
    ));

    let transport = parallel_map(n, th, |t| transport_trial(cfg, t));
    out.push(aggregate(
        "post-processing-preservation",
        "post-processing a compatible pair keeps it compatible via the transported joint",
        &[at_most("transported marginal residual", 1e-8)],
        &transport,
    ));
    let monotone = parallel_map(n, th, |t| monotone_trial(cfg, t));
    out.push(aggregate(
        "monotonicity",
        "R_I does not increase under post-processing",
        &[at_most("R_I(children) - R_I(parents)", 2e-5), at_most("non-optimal solves", 0.0)],
        &monotone,
    ));

    let trash = parallel_map(n, th, |t| trash_trial(cfg, t));
    out.push(aggregate(
        "trash-prepare-compatibility",
        "every instrument is compatible with every trash-and-prepare instrument",
        &[at_most("R_I", 1e-6), at_most("identity joint marginal residual", 1e-12), at_most("non-optimal solves", 0.0)],
        &trash,
    ));

    let eta = ComplexMatrix::basis_projector(2, 0);
    let pid = match pid_counterexample(2, 2, &eta, &cfg.settings) {
        Ok(p) => {
            let r = p.report;
            let bad = [r.status_ii, r.status_jj].iter().filter(|s| **s != SolveStatus::Optimal).count();
            Ok(vec![r.r_ii, r.r_jj, r.traditional_residual_i.max(r.traditional_residual_j), r.parallel_residual_i, bad as f64])
        }
        Err(e) => Err(err(e)),
    };
    out.push(aggregate(
        "pid-counterexample",
        "copies of the trash instrument are parallel compatible, copies of the divided identity are not",
        &[
            at_most("R_I(I, I)", 1e-5),
            at_least("R_I(J, J)", 0.01),
            at_most("traditional marginal residual", 0.0),
            at_most("parallel joint residual", 1e-12),
            at_most("non-optimal solves", 0.0),
        ],
        &[pid],
    ));

    let lueders = match fixture_povm(&fixtures.trivial_qubit, FIXTURE_NAMES[2]) {
        Ok(p) => {
            let ok = p.effects().iter().all(|e| e.difference_norm(&ComplexMatrix::identity(2).scale(e[(0, 0)].re)) < 1e-12);
            if ok {
                parallel_map(n, th, |t| lueders_trial(cfg, t, &p))
            } else {
                vec![Err(format!("fixture {}: not a trivial measurement", FIXTURE_NAMES[2]))]
            }
        }
        Err(e) => vec![Err(e)],
    };
    out.push(aggregate(
        "lueders-trivial",
        "Lueders instruments of trivial measurements are incompatible while trash-and-prepare ones are not",
        &[
            at_least("R_I(Lueders pair)", 0.01),
            at_most("R_I(trash pair)", 1e-6),
            at_most("induced POVM mismatch", 1e-12),
            at_most("non-optimal solves", 0.0),
        ],
        &lueders,
    ));

    let mut cases: Vec<JointCase> = vec![
        fixture_povm(&fixtures.commuting_joint_d2, FIXTURE_NAMES[3]).map(|g| (g, (2, 2))),
        fixture_povm(&fixtures.commuting_joint_d3, FIXTURE_NAMES[4]).map(|g| (g, (2, 2))),
    ];
    for t in 0..n.clamp(3, 8) {
        let mut rng = trial_rng(cfg.seed, rows::INDECOMPOSABLE, t as u32);
        cases.push(Ok(commuting_joint(2 + t % 2, &mut rng)));
    }
    let pipeline = parallel_map(cases.len(), th, |k| match &cases[k] {
        Ok((g, grid)) => indecomposable_trial(cfg, g, *grid),
        Err(e) => Err(e.clone()),
    });
    out.push(aggregate(
        "indecomposable-pair",
        "commuting joint measurements yield compatible pairs of indecomposable instruments",
        &[
            at_most("operations with Kraus rank > 1", 0.0),
            at_most("R_I", 1e-5),
            at_most("induced POVM mismatch", 1e-9),
            at_most("non-optimal solves", 0.0),
        ],
        &pipeline,
    ));

    let mub = fixture_povm(&fixtures.mub_x, FIXTURE_NAMES[0])
        .and_then(|a| Ok((a, fixture_povm(&fixtures.mub_z, FIXTURE_NAMES[1])?)))
        .and_then(|(a, b)| robustness_measurements(&a, &b, &cfg.settings).map_err(err))
        .map(|r| {
            vec![
                (r.r - MUB_MEASUREMENT_ROBUSTNESS).abs(),
                r.r,
                r.r,
                if r.status == SolveStatus::Optimal { 0.0 } else { 1.0 },
            ]
        });
    out.push(aggregate(
        "mub-regression",
        "qubit sigma-x / sigma-z measurement robustness matches its frozen value",
        &[
            at_most("|R_M - frozen|", 1e-5),
            at_least("R_M", 1e-6),
            at_most("R_M", std::f64::consts::SQRT_2 - 1.0 + 1e-5),
            at_most("non-optimal solves", 0.0),
        ],
        &[mub],
    ));

    let problems = reference_problems();
    let reference = parallel_map(problems.len(), th, |k| {
        let r = &problems[k];
        let s = solve(&r.problem, &cfg.settings).map_err(err)?;
        Ok(vec![(s.objective_value - r.optimum).abs(), if s.status == SolveStatus::Optimal { 0.0 } else { 1.0 }])
    });
    out.push(aggregate(
        "sdp-reference",
        "the solver reproduces analytically known optima",
        &[at_most("|objective - optimum|", 1e-5), at_most("non-optimal solves", 0.0)],
        &reference,
    ));

    SuiteTable { seed: cfg.seed, trials: n, all_passed: out.iter().all(|r| r.passed), rows: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_keeps_order() {
        let serial = parallel_map(20, 0, |i| i * i);
        let threaded = parallel_map(20, 4, |i| i * i);
        assert_eq!(serial, threaded);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.171_572_875_253_81), 0.171_572_875_254);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-1.0 / 3.0), -0.333_333_333_333);
    }

    #[test]
    fn bundled_fixtures_validate() {
        let f = Fixtures::bundled();
        for (text, name) in [
            (&f.mub_x, FIXTURE_NAMES[0]),
            (&f.mub_z, FIXTURE_NAMES[1]),
            (&f.trivial_qubit, FIXTURE_NAMES[2]),
            (&f.commuting_joint_d2, FIXTURE_NAMES[3]),
            (&f.commuting_joint_d3, FIXTURE_NAMES[4]),
        ] {
            fixture_povm(text, name).unwrap();
        }
    }
}
