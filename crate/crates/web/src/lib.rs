//! Browser bindings: three small interactive computations for `www/index.html`.
//!
//! Each export returns a JSON string. The plain functions below carry the
//! logic so they can be tested natively.

use incompat_core::json::{parse_object, DomainObject, MatrixJson};
use incompat_core::linalg::{ComplexMatrix, C64};
use incompat_core::objects::{make_lueders, make_special_measure_prepare, Povm};
use incompat_core::robustness::{robustness_instruments, robustness_measurements};
use incompat_core::sdp::{SolveStatus, SolverSettings};
use incompat_core::structure::naimark_dilate;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Projective qubit measurement along `cos θ σz + sin θ σx`, with visibility `v`.
pub fn tilted_pvm(theta: f64, visibility: f64) -> Povm {
    let (c, s) = (theta.cos(), theta.sin());
    let effect = |sign: f64| {
        let half = 0.5 * sign * visibility;
        ComplexMatrix::from_fn(2, 2, |i, j| {
            let v = match (i, j) {
                (0, 0) => 0.5 + half * c,
                (1, 1) => 0.5 - half * c,
                _ => half * s,
            };
            C64::new(v, 0.0)
        })
    };
    Povm::new(vec![effect(1.0), effect(-1.0)]).expect("2x2 effects")
}

#[derive(Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub r: f64,
    pub optimal: bool,
}

/// `R_M(σz, θ)` on `steps + 1` angles spanning `[0, π/2]`.
pub fn angle_curve(steps: u32) -> Result<Vec<CurvePoint>, String> {
    let steps = steps.clamp(1, 200);
    let z = tilted_pvm(0.0, 1.0);
    let settings = SolverSettings::default();
    (0..=steps)
        .map(|k| {
            let theta = std::f64::consts::FRAC_PI_2 * f64::from(k) / f64::from(steps);
            let res = robustness_measurements(&z, &tilted_pvm(theta, 1.0), &settings).map_err(|e| e.to_string())?;
            Ok(CurvePoint { theta, r: res.r, optimal: res.status == SolveStatus::Optimal })
        })
        .collect()
}

#[derive(Serialize)]
pub struct InstrumentComparison {
    pub r_measurements: f64,
    pub r_lueders: f64,
    pub r_special_mp: f64,
    pub optimal: bool,
}

/// Robustness of two noisy tilted measurements and of two instrument
/// implementations of them.
pub fn compare_instruments(theta: f64, visibility: f64) -> Result<InstrumentComparison, String> {
    if !(0.0..=1.0).contains(&visibility) || !theta.is_finite() {
        return Err("visibility must lie in [0, 1] and the angle must be finite".into());
    }
    let a = tilted_pvm(0.0, visibility);
    let b = tilted_pvm(theta, visibility);
    let s = SolverSettings::default();
    let e = |e: incompat_core::objects::ObjectError| e.to_string();
    let rm = robustness_measurements(&a, &b, &s).map_err(|e| e.to_string())?;
    let rl = robustness_instruments(&make_lueders(&a).map_err(e)?, &make_lueders(&b).map_err(e)?, &s)
        .map_err(|e| e.to_string())?;
    let rs = robustness_instruments(
        &make_special_measure_prepare(&a).map_err(e)?,
        &make_special_measure_prepare(&b).map_err(e)?,
        &s,
    )
    .map_err(|e| e.to_string())?;
    Ok(InstrumentComparison {
        r_measurements: rm.r,
        r_lueders: rl.r,
        r_special_mp: rs.r,
        optimal: [rm.status, rl.status, rs.status].iter().all(|s| *s == SolveStatus::Optimal),
    })
}

#[derive(Serialize)]
pub struct DilationReport {
    pub dim: usize,
    pub ancilla_dim: usize,
    pub unitarity_residual: f64,
    pub unitary: MatrixJson,
    /// Outcome probabilities of `|0⟩⟨0|` from the POVM and from the dilation.
    pub povm_probabilities: Vec<f64>,
    pub dilation_probabilities: Vec<f64>,
}

/// Naimark dilation of a POVM given as an object document.
pub fn dilation(povm_json: &str) -> Result<DilationReport, String> {
    let g = match parse_object(povm_json).map_err(|e| e.to_string())? {
        DomainObject::Povm(p) => p,
        other => return Err(format!("expected a POVM, found {:?}", other.kind())),
    };
    let dil = naimark_dilate(&g).map_err(|e| e.to_string())?;
    let rho = ComplexMatrix::basis_projector(g.dim(), 0);
    Ok(DilationReport {
        dim: dil.dim,
        ancilla_dim: dil.ancilla_dim,
        unitarity_residual: dil.unitarity_residual(),
        unitary: MatrixJson::from_matrix(&dil.unitary),
        povm_probabilities: g.probabilities(&rho),
        dilation_probabilities: dil.probabilities(&rho),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("plain data serializes")).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = angleCurve)]
pub fn angle_curve_js(steps: u32) -> Result<String, JsValue> {
    to_js(angle_curve(steps))
}

#[wasm_bindgen(js_name = compareInstruments)]
pub fn compare_instruments_js(theta: f64, visibility: f64) -> Result<String, JsValue> {
    to_js(compare_instruments(theta, visibility))
}

#[wasm_bindgen(js_name = naimarkDilation)]
pub fn dilation_js(povm_json: &str) -> Result<String, JsValue> {
    to_js(dilation(povm_json))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_endpoints() {
        let c = angle_curve(4).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c[0].r.abs() < 1e-6);
        assert!((c[4].r - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-5);
        assert!(c.windows(2).all(|w| w[1].r >= w[0].r - 1e-5));
    }

    #[test]
    fn special_mp_matches_measurements() {
        let c = compare_instruments(1.0, 0.9).unwrap();
        assert!(c.optimal);
        assert!((c.r_special_mp - c.r_measurements).abs() < 2e-5);
        assert!(c.r_lueders >= c.r_measurements - 2e-5);
        assert!(compare_instruments(1.0, 1.5).is_err());
    }

    #[test]
    fn dilation_reproduces_probabilities() {
        let text = include_str!("../../core/fixtures/mub_x.json");
        let d = dilation(text).unwrap();
        assert!(d.unitarity_residual < 1e-10);
        for (a, b) in d.povm_probabilities.iter().zip(&d.dilation_probabilities) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(dilation("{}").is_err());
    }
}
