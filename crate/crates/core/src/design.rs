//! Inverse design of optical index profiles at a prescribed wavenumber `k₀`.
//!
//! A design picks a polynomial `S(z)` with `S(1) = S'(1) = 1` (the active
//! region is `[0, L]`, so `z- = 1` and `z+ = e^{-2ik₀L}`) that satisfies the
//! target condition at `z+`, then reads the potential off the `S` equation:
//!
//! ```text
//! v(x) = -4k₀² z² S''(z) / S(z),    n²(x) = 1 + 4 z² S''(z) / S(z),    z = e^{-2ik₀x}
//! ```
//!
//! * lasing: `S'(z+) = 0` makes `T` blow up;
//! * coherent perfect absorption: complex conjugate of the lasing profile;
//! * right invisibility: `z+ S'(z+) = S(z+)` makes `R^r` vanish.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitudes_from_matrix, classify, scatter, Route, ScatteringAmplitudes, SpectralFlags, Thresholds};
use crate::error::{Result, ScatterError};
use crate::evolution::evolve_transfer;
use crate::numerics::{quadrature_arc, ArcPath, Complex2x2, IntegratorConfig};
use crate::potential::{IndexProfileRecord, Potential};

/// Grid used to screen a designed profile for poles of `n²`.
pub const SINGULARITY_GRID: usize = 10_000;
/// `min |S| / max |S|` on the grid below which a profile is rejected.
pub const SINGULARITY_RATIO: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignGoal {
    Lasing,
    Cpa,
    #[serde(rename = "uinv")]
    RightInvisible,
}

impl FromStr for DesignGoal {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasing" => Ok(Self::Lasing),
            "cpa" => Ok(Self::Cpa),
            "uinv" | "right-invisible" => Ok(Self::RightInvisible),
            other => Err(ScatterError::InvalidInput(format!("unknown design goal '{other}'"))),
        }
    }
}

impl fmt::Display for DesignGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lasing => "lasing",
            Self::Cpa => "cpa",
            Self::RightInvisible => "uinv",
        })
    }
}

/// Target wavenumber, active length, goal, and strength `γ` (right-invisible only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub k0: f64,
    pub length: f64,
    pub goal: DesignGoal,
    pub gamma: Complex64,
}

impl DesignSpec {
    pub fn new(k0: f64, length: f64, goal: DesignGoal, gamma: Complex64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(ScatterError::InvalidInput(format!("k0 must be positive, got {k0}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(ScatterError::InvalidInput(format!("length must be positive, got {length}")));
        }
        if !gamma.is_finite() {
            return Err(ScatterError::InvalidInput("gamma must be finite".into()));
        }
        Ok(Self { k0, length, goal, gamma })
    }

    /// Unit target wavenumber and `L = k₀L`.
    pub fn from_k0l(k0l: f64, goal: DesignGoal, gamma: Complex64) -> Self {
        Self { k0: 1.0, length: k0l, goal, gamma }
    }

    pub fn k0l(&self) -> f64 {
        self.k0 * self.length
    }

    /// `z+ = e^{-2ik₀L}`.
    pub fn z_plus(&self) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * self.k0l())
    }

    /// `𝔤₁ = z+ + 1`.
    pub fn g1(&self) -> Complex64 {
        self.z_plus() + 1.0
    }

    /// `𝔤₂ = (z+ - 1)(2z+ + 1)`.
    pub fn g2(&self) -> Complex64 {
        let z = self.z_plus();
        (z - 1.0) * (2.0 * z + 1.0)
    }
}

/// Cubic `S(z) = Σ c_j (z - 1)^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SAnsatz {
    pub coeffs: [Complex64; 4],
}

impl SAnsatz {
    pub fn value(&self, z: Complex64) -> Complex64 {
        let u = z - 1.0;
        let [c0, c1, c2, c3] = self.coeffs;
        c0 + u * (c1 + u * (c2 + u * c3))
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let u = z - 1.0;
        let [_, c1, c2, c3] = self.coeffs;
        c1 + u * (2.0 * c2 + u * 3.0 * c3)
    }

    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        let u = z - 1.0;
        let [_, _, c2, c3] = self.coeffs;
        2.0 * c2 + u * 6.0 * c3
    }

    /// `n² = 1 + 4 z² S''/S`.
    pub fn index_squared(&self, z: Complex64) -> Complex64 {
        1.0 + 4.0 * z * z * self.second_derivative(z) / self.value(z)
    }

    /// `-S''/(S S'²)`, the left-reflection integrand.
    pub fn left_reflection_integrand(&self, z: Complex64) -> Complex64 {
        let d = self.derivative(z);
        -self.second_derivative(z) / (self.value(z) * d * d)
    }
}

/// What the construction guarantees at `k = k₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// `1/T = M22`
    pub inverse_transmission: Option<Complex64>,
    pub m11: Option<Complex64>,
    pub t: Option<Complex64>,
    pub r_right: Option<Complex64>,
    pub r_left: Option<Complex64>,
}

#[derive(Clone)]
pub struct DesignResult {
    pub spec: DesignSpec,
    pub ansatz: SAnsatz,
    /// CPA profiles are the complex conjugate of the `S`-derived profile.
    pub conjugate: bool,
    pub prediction: Prediction,
    potential: Potential,
    n2: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for DesignResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DesignResult")
            .field("spec", &self.spec)
            .field("ansatz", &self.ansatz)
            .field("conjugate", &self.conjugate)
            .field("prediction", &self.prediction)
            .finish_non_exhaustive()
    }
}

impl DesignResult {
    /// Designed potential `k²(1 - n²(x))` on `[0, L]`.
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `n²(x)`, equal to 1 outside `[0, L]`.
    pub fn n2(&self, x: f64) -> Complex64 {
        (self.n2)(x)
    }

    pub fn n2_fn(&self) -> Arc<dyn Fn(f64) -> Complex64 + Send + Sync> {
        self.n2.clone()
    }
}

fn index_fn(spec: &DesignSpec, ansatz: SAnsatz, conjugate: bool) -> Arc<dyn Fn(f64) -> Complex64 + Send + Sync> {
    let (k0, length) = (spec.k0, spec.length);
    Arc::new(move |x: f64| {
        if !(0.0..=length).contains(&x) {
            return Complex64::new(1.0, 0.0);
        }
        let n2 = ansatz.index_squared(Complex64::from_polar(1.0, -2.0 * k0 * x));
        if conjugate {
            n2.conj()
        } else {
            n2
        }
    })
}

fn screen_profile(spec: &DesignSpec, ansatz: &SAnsatz) -> Result<()> {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut where_min = 0.0;
    for i in 0..=SINGULARITY_GRID {
        let x = spec.length * i as f64 / SINGULARITY_GRID as f64;
        let s = ansatz.value(Complex64::from_polar(1.0, -2.0 * spec.k0 * x)).norm();
        if s < min {
            min = s;
            where_min = x;
        }
        max = max.max(s);
    }
    if min.is_nan() || min <= SINGULARITY_RATIO * max {
        return Err(ScatterError::SingularProfile(format!("n² denominator nearly vanishes at x = {where_min} (|S| = {min:e})")));
    }
    Ok(())
}

fn check_not_half_multiple(spec: &DesignSpec) -> Result<()> {
    let r = spec.k0l() / FRAC_PI_2;
    if (r - r.round()).abs() <= 1e-6 * r.max(1.0) {
        return Err(ScatterError::SingularProfile(format!("k0 L = {} is an integer multiple of π/2", spec.k0l())));
    }
    Ok(())
}

fn build(spec: &DesignSpec, ansatz: SAnsatz, conjugate: bool, prediction: Prediction) -> Result<DesignResult> {
    screen_profile(spec, &ansatz)?;
    let n2 = index_fn(spec, ansatz, conjugate);
    let n2_for_v = n2.clone();
    let potential = Potential::from_index(move |x| n2_for_v(x), spec.k0, (0.0, spec.length))?;
    Ok(DesignResult { spec: *spec, ansatz, conjugate, prediction, potential, n2 })
}

fn lasing_ansatz(spec: &DesignSpec) -> SAnsatz {
    // (z² - 2z+ z + 1) / (2(1 - z+)) = 1 + u + u² / (2(1 - z+)),  u = z - 1
    let one = Complex64::new(1.0, 0.0);
    SAnsatz { coeffs: [one, one, 1.0 / (2.0 * (1.0 - spec.z_plus())), Complex64::new(0.0, 0.0)] }
}

/// Threshold laser at `k₀`: `S'(z) = (z - z+)/(1 - z+)`.
pub fn design_lasing(spec: &DesignSpec) -> Result<DesignResult> {
    check_not_half_multiple(spec)?;
    let ansatz = lasing_ansatz(spec);
    let prediction = Prediction {
        inverse_transmission: Some(ansatz.derivative(spec.z_plus())),
        m11: None,
        t: None,
        r_right: None,
        r_left: None,
    };
    build(&DesignSpec { goal: DesignGoal::Lasing, ..*spec }, ansatz, false, prediction)
}

/// Coherent perfect absorber at `k₀`: conjugate of the lasing profile.
pub fn design_cpa(spec: &DesignSpec) -> Result<DesignResult> {
    check_not_half_multiple(spec)?;
    let ansatz = lasing_ansatz(spec);
    // Conjugating v maps M22 to conj(M11).
    let prediction = Prediction {
        inverse_transmission: None,
        m11: Some(ansatz.derivative(spec.z_plus()).conj()),
        t: None,
        r_right: None,
        r_left: None,
    };
    build(&DesignSpec { goal: DesignGoal::Cpa, ..*spec }, ansatz, true, prediction)
}

fn invisible_ansatz(spec: &DesignSpec) -> SAnsatz {
    let one = Complex64::new(1.0, 0.0);
    SAnsatz { coeffs: [one, one, -spec.gamma * spec.g2(), spec.gamma * spec.g1()] }
}

/// Reflectionless from the right at `k₀`: `S = γ[𝔤₁(z-1)³ - 𝔤₂(z-1)²] + z`.
pub fn design_right_invisible(spec: &DesignSpec) -> Result<DesignResult> {
    let spec = DesignSpec { goal: DesignGoal::RightInvisible, ..*spec };
    let ansatz = invisible_ansatz(&spec);
    let z_plus = spec.z_plus();
    let ds = ansatz.derivative(z_plus);
    let r_left = left_reflection(&spec, &IntegratorConfig::default()).ok();
    let prediction = Prediction {
        inverse_transmission: Some(ds),
        m11: None,
        t: Some(1.0 / ds),
        r_right: Some(ansatz.value(z_plus) / ds - z_plus),
        r_left,
    };
    build(&spec, ansatz, false, prediction)
}

/// Dispatch on `spec.goal`.
pub fn design(spec: &DesignSpec) -> Result<DesignResult> {
    match spec.goal {
        DesignGoal::Lasing => design_lasing(spec),
        DesignGoal::Cpa => design_cpa(spec),
        DesignGoal::RightInvisible => design_right_invisible(spec),
    }
}

/// `T(k₀) = 1 / (1 + γ(1 - e^{-2ik₀L})³)` for the right-invisible design.
pub fn predicted_transmission(spec: &DesignSpec) -> Result<Complex64> {
    if spec.goal != DesignGoal::RightInvisible {
        return Err(ScatterError::InvalidInput("predicted transmission is defined for the right-invisible design".into()));
    }
    let u = 1.0 - spec.z_plus();
    Ok(1.0 / (1.0 + spec.gamma * u * u * u))
}

/// `R^l(k₀) = -∫ S''/(S S'²) dw` along the arc from `z = 1` to `z+`.
///
/// Valid for any `k₀L`; the arc closes into `⌊k₀L/π⌋` full windings plus a remainder.
pub fn left_reflection(spec: &DesignSpec, cfg: &IntegratorConfig) -> Result<Complex64> {
    let ansatz = invisible_ansatz(spec);
    let path = ArcPath::new(0.0, spec.k0l())?;
    quadrature_arc(|w| ansatz.left_reflection_integrand(w), &path, cfg)
}

/// `R^l(k₀)` as a closed contour integral over `m` windings (`k₀L = mπ`).
pub fn left_reflection_contour(spec: &DesignSpec, m: u32, cfg: &IntegratorConfig) -> Result<Complex64> {
    if spec.goal != DesignGoal::RightInvisible {
        return Err(ScatterError::InvalidInput("contour reflection is defined for the right-invisible design".into()));
    }
    if m == 0 {
        return Err(ScatterError::InvalidInput("winding count must be positive".into()));
    }
    let target = m as f64 * PI;
    if (spec.k0l() - target).abs() > 1e-9 * target {
        return Err(ScatterError::InvalidInput(format!("k0 L = {} is not {m}π", spec.k0l())));
    }
    let ansatz = invisible_ansatz(spec);
    quadrature_arc(|w| ansatz.left_reflection_integrand(w), &ArcPath::windings(m), cfg)
}

/// Uniform samples of `n²` on `[0, L]`.
pub fn sample_index_profile(result: &DesignResult, n_points: usize) -> Result<IndexProfileRecord> {
    if n_points < 2 {
        return Err(ScatterError::InvalidInput("need at least two profile samples".into()));
    }
    let length = result.spec.length;
    let x: Vec<f64> = (0..n_points).map(|i| length * i as f64 / (n_points - 1) as f64).collect();
    let n2 = x.iter().map(|&x| result.n2(x)).collect();
    Ok(IndexProfileRecord { x, n2, k0: result.spec.k0, length })
}

/// One point of a `k₀L` sweep of right-invisible designs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvisibilitySweepPoint {
    pub k0l: f64,
    pub t: Complex64,
    pub r_left: Complex64,
}

/// Design-time `T` and `R^l` of right-invisible designs across `k0l_values`.
pub fn invisibility_sweep(gamma: Complex64, k0l_values: &[f64], cfg: &IntegratorConfig) -> Result<Vec<InvisibilitySweepPoint>> {
    k0l_values
        .iter()
        .map(|&k0l| {
            let spec = DesignSpec::from_k0l(k0l, DesignGoal::RightInvisible, gamma);
            Ok(InvisibilitySweepPoint { k0l, t: predicted_transmission(&spec)?, r_left: left_reflection(&spec, cfg)? })
        })
        .collect()
}

/// Forward check of a design at `k₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignVerification {
    pub transfer: Complex2x2,
    pub amplitudes: Option<ScatteringAmplitudes>,
    pub flags: Option<SpectralFlags>,
    /// Lasing `|M22|`; CPA `|M11|/‖M‖`; right-invisible `max(|R^r|, |T - T_pred|)`.
    pub goal_residual: f64,
    pub goal_confirmed: bool,
}

/// Solve the designed potential forward at `k₀` and test the goal condition.
pub fn verify_design(result: &DesignResult, route: Route, thresholds: &Thresholds, cfg: &IntegratorConfig) -> Result<DesignVerification> {
    let k0 = result.spec.k0;
    let transfer = evolve_transfer(result.potential(), k0, cfg)?.matrix();
    let amplitudes = match result.spec.goal {
        DesignGoal::Lasing => amplitudes_from_matrix(&transfer, k0).ok(),
        _ => Some(scatter(result.potential(), k0, route, cfg)?),
    };
    let flags = amplitudes.as_ref().map(|a| classify(a, thresholds));
    let (goal_residual, goal_confirmed) = match result.spec.goal {
        DesignGoal::Lasing => {
            let r = transfer.m22.norm();
            (r, r <= thresholds.singularity)
        }
        DesignGoal::Cpa => {
            let r = transfer.m11.norm() / transfer.max_norm();
            (r, r <= thresholds.cpa)
        }
        DesignGoal::RightInvisible => {
            let a = amplitudes.expect("right-invisible route always yields amplitudes");
            let t_pred = predicted_transmission(&result.spec)?;
            let r = a.r_right.norm().max((a.t - t_pred).norm());
            (r, r <= thresholds.reflection && a.r_left.norm() > thresholds.reflection)
        }
    };
    Ok(DesignVerification { transfer, amplitudes, flags, goal_residual, goal_confirmed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::solve_s;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lasing_ansatz_initial_conditions_and_zero() {
        let spec = DesignSpec::from_k0l(0.75 * PI, DesignGoal::Lasing, cz(0.0, 0.0));
        let r = design_lasing(&spec).unwrap();
        let one = cz(1.0, 0.0);
        assert!((r.ansatz.value(one) - 1.0).norm() < 1e-15);
        assert!((r.ansatz.derivative(one) - 1.0).norm() < 1e-15);
        assert!(r.ansatz.derivative(spec.z_plus()).norm() < 1e-15);
        let zp = spec.z_plus();
        for z in [cz(0.3, 0.2), cz(-1.0, 0.5)] {
            let direct = (z * z - 2.0 * zp * z + 1.0) / (2.0 * (1.0 - zp));
            assert!((r.ansatz.value(z) - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn lasing_profile_matches_explicit_formula() {
        let spec = DesignSpec::new(2.0, 0.3 * PI, DesignGoal::Lasing, cz(0.0, 0.0)).unwrap();
        let r = design_lasing(&spec).unwrap();
        let (k0, l) = (spec.k0, spec.length);
        for i in 0..=50 {
            let x = l * i as f64 / 50.0;
            let den = Complex64::from_polar(1.0, 4.0 * k0 * x) - 2.0 * Complex64::from_polar(1.0, -2.0 * k0 * (l - x)) + 1.0;
            let expected = 1.0 + 8.0 / den;
            assert!((r.n2(x) - expected).norm() < 1e-12 * expected.norm());
        }
        assert_eq!(r.n2(-0.1), cz(1.0, 0.0));
        assert_eq!(r.n2(l + 0.1), cz(1.0, 0.0));
    }

    #[test]
    fn lasing_rejects_half_pi_multiples() {
        for k0l in [PI, FRAC_PI_2, 1.5 * PI] {
            let spec = DesignSpec::from_k0l(k0l, DesignGoal::Lasing, cz(0.0, 0.0));
            assert!(matches!(design_lasing(&spec), Err(ScatterError::SingularProfile(_))));
            assert!(matches!(design_cpa(&spec), Err(ScatterError::SingularProfile(_))));
        }
    }

    #[test]
    fn cpa_is_conjugate() {
        let spec = DesignSpec::from_k0l(0.75 * PI, DesignGoal::Cpa, cz(0.0, 0.0));
        let lasing = design_lasing(&spec).unwrap();
        let cpa = design_cpa(&spec).unwrap();
        for i in 0..=40 {
            let x = spec.length * i as f64 / 40.0;
            assert_eq!(cpa.n2(x), lasing.n2(x).conj());
            assert_eq!(cpa.n2(x).im, -lasing.n2(x).im);
        }
    }

    #[test]
    fn invisible_condition_holds_on_coefficients() {
        for k0l in [0.7, 3.0 * PI, 3.5 * PI, 5.3] {
            let spec = DesignSpec::from_k0l(k0l, DesignGoal::RightInvisible, cz(1e-3, 2e-4));
            let r = design_right_invisible(&spec).unwrap();
            let zp = spec.z_plus();
            let one = cz(1.0, 0.0);
            assert!((r.ansatz.value(one) - 1.0).norm() < 1e-16);
            assert!((r.ansatz.derivative(one) - 1.0).norm() < 1e-16);
            assert!((zp * r.ansatz.derivative(zp) - r.ansatz.value(zp)).norm() < 1e-15);
            assert!((r.prediction.t.unwrap() - predicted_transmission(&spec).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn invisible_profile_matches_explicit_formulas() {
        let gamma = cz(1e-6, 0.0);
        // general form
        let spec = DesignSpec::from_k0l(2.3, DesignGoal::RightInvisible, gamma);
        let r = design_right_invisible(&spec).unwrap();
        let (g1, g2) = (spec.g1(), spec.g2());
        for i in 0..=40 {
            let x = spec.length * i as f64 / 40.0;
            let e = Complex64::from_polar(1.0, 2.0 * x);
            let num = 8.0 * gamma * (3.0 * g1 * (1.0 / e - 1.0) - g2);
            let den = e + gamma * (1.0 - e) * (1.0 - e) * (g1 / e - g1 - g2);
            let expected = 1.0 + num / den;
            assert!((r.n2(x) - expected).norm() < 1e-18 + 1e-12 * (expected - 1.0).norm());
        }
        // k0 L = mπ form
        let spec = DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, gamma);
        let r = design_right_invisible(&spec).unwrap();
        for i in 0..=40 {
            let x = spec.length * i as f64 / 40.0;
            let e = Complex64::from_polar(1.0, 2.0 * x);
            let one_e = 1.0 - e;
            let expected = 1.0 + 48.0 * gamma * one_e / (e * e + 2.0 * gamma * one_e * one_e * one_e);
            assert!((r.n2(x) - expected).norm() < 1e-16, "x = {x}");
        }
        // v(0+) = 0
        assert!(r.potential().evaluate(0.0, 1.0).norm() < 1e-18);
    }

    #[test]
    fn zero_gamma_is_vacuum() {
        let spec = DesignSpec::from_k0l(2.0, DesignGoal::RightInvisible, cz(0.0, 0.0));
        let r = design_right_invisible(&spec).unwrap();
        for i in 0..=10 {
            let x = 0.2 * i as f64;
            assert_eq!(r.n2(x), cz(1.0, 0.0));
            assert_eq!(r.potential().evaluate(x, 1.0), cz(0.0, 0.0));
        }
    }

    #[test]
    fn predicted_transmission_values() {
        let g = cz(1e-6, 0.0);
        let at = |k0l: f64| predicted_transmission(&DesignSpec::from_k0l(k0l, DesignGoal::RightInvisible, g)).unwrap();
        assert!((at(3.0 * PI) - 1.0).norm() < 1e-15);
        assert!((at(3.5 * PI) - 1.0 / (1.0 + 8e-6)).norm() < 1e-15);
        assert!((at(1.234) - at(1.234 + PI)).norm() < 1e-15);
        assert!(predicted_transmission(&DesignSpec::from_k0l(1.0, DesignGoal::Lasing, g)).is_err());
    }

    #[test]
    fn contour_preconditions() {
        let cfg = IntegratorConfig::default();
        let spec = DesignSpec::from_k0l(2.0 * PI, DesignGoal::RightInvisible, cz(1e-6, 0.0));
        assert!(left_reflection_contour(&spec, 2, &cfg).is_ok());
        assert!(left_reflection_contour(&spec, 1, &cfg).is_err());
        assert!(left_reflection_contour(&spec, 0, &cfg).is_err());
        let lasing = DesignSpec { goal: DesignGoal::Lasing, ..spec };
        assert!(left_reflection_contour(&lasing, 2, &cfg).is_err());
    }

    #[test]
    fn round_trip_through_s_equation() {
        let spec = DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, cz(1e-6, 0.0));
        let r = design_right_invisible(&spec).unwrap();
        let s = solve_s(r.potential(), spec.k0, &IntegratorConfig::default()).unwrap();
        for i in 0..=50 {
            let a = spec.length * i as f64 / 50.0;
            let (sv, dsv) = s.at(a);
            let z = s.z(a);
            assert!((sv - r.ansatz.value(z)).norm() < 1e-7);
            assert!((dsv - r.ansatz.derivative(z)).norm() < 1e-7);
        }
    }

    #[test]
    fn profile_sampling() {
        let spec = DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, cz(1e-6, 0.0));
        let r = design_right_invisible(&spec).unwrap();
        let rec = sample_index_profile(&r, 101).unwrap();
        assert_eq!(rec.x.len(), 101);
        assert_eq!(rec.x[0], 0.0);
        assert_eq!(*rec.x.last().unwrap(), spec.length);
        assert!(sample_index_profile(&r, 1).is_err());
    }

    #[test]
    fn strength_linearity_at_small_gamma() {
        let a = design_right_invisible(&DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, cz(1e-6, 0.0))).unwrap();
        let b = design_right_invisible(&DesignSpec::from_k0l(3.0 * PI, DesignGoal::RightInvisible, cz(2e-6, 0.0))).unwrap();
        for i in 1..100 {
            let x = 3.0 * PI * i as f64 / 100.0;
            let (da, db) = (a.n2(x) - 1.0, b.n2(x) - 1.0);
            if da.norm() > 1e-9 {
                assert!((db / da - 2.0).norm() < 0.02, "x = {x}");
            }
        }
    }
}
