//! Reflection and transmission amplitudes from each solver route.
//!
//! The transfer-matrix dictionary is
//!
//! ```text
//! M11 = T - R^l R^r / T    M12 = R^r / T
//! M21 = -R^l / T           M22 = 1 / T
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::evolution::{evolve_transfer, DETERMINANT_DRIFT_LIMIT};
use crate::jost::{solve_jost, solve_s, JostSolution, SFunction};
use crate::numerics::{quadrature_arc_lifted, ArcPath, Complex2x2, IntegratorConfig, I};
use crate::potential::Potential;

/// Relative floor on `F-` for every route: a pole of `T` is declared when
/// `|F-| ≤ ε (1 + |F+|)`. In matrix terms `F- = -2ik e^{-ika} M22` and
/// `F+ = 2ik e^{ika} M12`; in `S` terms `F- = -2ik e^{-ika} S'(z+)`.
pub const JOST_SINGULARITY_FLOOR: f64 = 1e-10;

/// Where a set of amplitudes came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeSource {
    Evolution,
    Jost,
    SForm,
    ClosedForm,
    Matrix,
}

/// Solver selection for [`scatter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Evolution,
    Jost,
    S,
    /// Jost route, cross-checked against the evolution route.
    #[default]
    Auto,
}

impl FromStr for Route {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evolution" => Ok(Self::Evolution),
            "jost" => Ok(Self::Jost),
            "s" | "s-form" => Ok(Self::S),
            "auto" => Ok(Self::Auto),
            other => Err(ScatterError::InvalidInput(format!("unknown route '{other}'"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Evolution => "evolution",
            Self::Jost => "jost",
            Self::S => "s",
            Self::Auto => "auto",
        })
    }
}

/// `(R^l, R^r, T)` at one real wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    pub r_left: Complex64,
    pub r_right: Complex64,
    pub t: Complex64,
    pub source: AmplitudeSource,
    /// Largest disagreement with a second route, when one was run.
    pub route_deviation: Option<f64>,
}

impl ScatteringAmplitudes {
    pub fn new(k: f64, r_left: Complex64, r_right: Complex64, t: Complex64, source: AmplitudeSource) -> Self {
        Self { k, r_left, r_right, t, source, route_deviation: None }
    }

    /// Free propagation.
    pub fn trivial(k: f64, source: AmplitudeSource) -> Self {
        Self::new(k, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), source)
    }

    /// `M11 = T - R^l R^r / T`.
    pub fn m11(&self) -> Complex64 {
        self.t - self.r_left * self.r_right / self.t
    }

    /// Largest of `|Δ| / max(1, |x|)` over the three amplitudes.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1.0);
        rel(self.r_left, other.r_left).max(rel(self.r_right, other.r_right)).max(rel(self.t, other.t))
    }

    /// Largest relative error `|Δ| / |x|` (absolute where `|x| < floor`).
    pub fn max_relative_error(&self, reference: &Self, floor: f64) -> f64 {
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(floor);
        rel(self.r_left, reference.r_left).max(rel(self.r_right, reference.r_right)).max(rel(self.t, reference.t))
    }
}

/// `T = 1/M22`, `R^r = M12/M22`, `R^l = -M21/M22`.
pub fn amplitudes_from_matrix(m: &Complex2x2, k: f64) -> Result<ScatteringAmplitudes> {
    if !m.is_finite() {
        return Err(ScatterError::InvalidTransferMatrix { drift: f64::INFINITY });
    }
    let drift = (m.det() - 1.0).norm();
    if drift > DETERMINANT_DRIFT_LIMIT * (1.0 + m.max_norm()) {
        return Err(ScatterError::InvalidTransferMatrix { drift });
    }
    let two_k = 2.0 * k;
    if two_k * m.m22.norm() <= JOST_SINGULARITY_FLOOR * (1.0 + two_k * m.m12.norm()) {
        return Err(ScatterError::SpectralSingularityEncountered { k, residual: m.m22.norm() });
    }
    Ok(ScatteringAmplitudes::new(k, -m.m21 / m.m22, m.m12 / m.m22, 1.0 / m.m22, AmplitudeSource::Matrix))
}

/// Inverse of [`amplitudes_from_matrix`].
pub fn matrix_from_amplitudes(amps: &ScatteringAmplitudes) -> Result<Complex2x2> {
    if amps.t.norm() == 0.0 || !amps.t.is_finite() {
        return Err(ScatterError::ZeroTransmission);
    }
    let t = amps.t;
    Ok(Complex2x2::new(amps.m11(), amps.r_right / t, -amps.r_left / t, 1.0 / t))
}

fn check_point_in(support: (f64, f64), a: f64) -> Result<()> {
    if a >= support.0 && a <= support.1 {
        Ok(())
    } else {
        Err(ScatterError::InvalidInput(format!("a = {a} outside solved range [{}, {}]", support.0, support.1)))
    }
}

/// Amplitudes of the truncation `v θ(a - x)` from one Jost solution.
///
/// `a = a+` gives the amplitudes of the full potential.
pub fn amplitudes_from_jost(j: &JostSolution, a: f64) -> Result<ScatteringAmplitudes> {
    check_point_in(j.support(), a)?;
    let k = j.k();
    let f_plus = j.f_plus(a);
    let f_minus = j.f_minus(a);
    let floor = JOST_SINGULARITY_FLOOR * (1.0 + f_plus.norm());
    if f_minus.norm() <= floor {
        return Err(ScatterError::SpectralSingularityEncountered { k, residual: f_minus.norm() / (2.0 * k) });
    }
    let phase = Complex64::from_polar(1.0, -k * a);
    let r_right = -phase * phase * f_plus / f_minus;
    let t = -2.0 * I * k * phase / f_minus;
    let r_left = 2.0 * I * k * j.left_integral(a);
    Ok(ScatteringAmplitudes::new(k, r_left, r_right, t, AmplitudeSource::Jost))
}

/// Amplitudes from the `S` function at the arc end point `z+`.
///
/// The left amplitude is the arc integral `-∫ S''/(S S'²) dw`, evaluated with
/// `S''` eliminated through the `S` equation: `∫ v̌ / (4k² w² S'²) dw`.
pub fn amplitudes_from_s(s: &SFunction, cfg: &IntegratorConfig) -> Result<ScatteringAmplitudes> {
    let k = s.k();
    let z_plus = s.z_plus();
    let (s_end, ds_end) = s.at_end();
    let floor = JOST_SINGULARITY_FLOOR * (1.0 + 2.0 * k * (s_end - z_plus * ds_end).norm());
    if 2.0 * k * ds_end.norm() <= floor {
        return Err(ScatterError::SpectralSingularityEncountered { k, residual: ds_end.norm() });
    }
    let r_right = s_end / ds_end - z_plus;
    let t = 1.0 / ds_end;
    let p = s.potential();
    let g = |phi: f64, w: Complex64| {
        let a = phi / k;
        let ds = s.at(a).1;
        p.evaluate(a, k) / (4.0 * k * k * w * w * ds * ds)
    };
    let mut r_left = Complex64::new(0.0, 0.0);
    for (lo, hi) in s.trajectory().steps() {
        r_left += quadrature_arc_lifted(g, &ArcPath::new(k * lo, k * hi)?, cfg)?;
    }
    Ok(ScatteringAmplitudes::new(k, r_left, r_right, t, AmplitudeSource::SForm))
}

/// Detection thresholds for [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub singularity: f64,
    pub cpa: f64,
    pub reflection: f64,
    pub transmission: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { singularity: 1e-6, cpa: 1e-6, reflection: 1e-6, transmission: 1e-6 }
    }
}

impl Thresholds {
    pub fn uniform(eps: f64) -> Self {
        Self { singularity: eps, cpa: eps, reflection: eps, transmission: eps }
    }
}

/// Which special spectral conditions hold, with the residual behind each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlags {
    pub is_spectral_singularity: bool,
    pub is_cpa: bool,
    pub is_right_reflectionless: bool,
    pub is_left_reflectionless: bool,
    pub is_right_invisible: bool,
    pub is_left_invisible: bool,
    pub is_bidirectionally_invisible: bool,
    /// `|1/T|`
    pub inverse_transmission_residual: f64,
    /// `|M11|`
    pub cpa_residual: f64,
    pub r_right_residual: f64,
    pub r_left_residual: f64,
    /// `|T - 1|`
    pub transmission_residual: f64,
}

pub fn classify(amps: &ScatteringAmplitudes, thresholds: &Thresholds) -> SpectralFlags {
    let inv_t = (1.0 / amps.t).norm();
    let m11 = amps.m11().norm();
    let rr = amps.r_right.norm();
    let rl = amps.r_left.norm();
    let t1 = (amps.t - 1.0).norm();
    let right_rl = rr <= thresholds.reflection;
    let left_rl = rl <= thresholds.reflection;
    let unit_t = t1 <= thresholds.transmission;
    SpectralFlags {
        is_spectral_singularity: inv_t <= thresholds.singularity,
        is_cpa: m11 <= thresholds.cpa,
        is_right_reflectionless: right_rl,
        is_left_reflectionless: left_rl,
        is_right_invisible: right_rl && !left_rl && unit_t,
        is_left_invisible: left_rl && !right_rl && unit_t,
        is_bidirectionally_invisible: right_rl && left_rl && unit_t,
        inverse_transmission_residual: inv_t,
        cpa_residual: m11,
        r_right_residual: rr,
        r_left_residual: rl,
        transmission_residual: t1,
    }
}

/// Amplitudes of `p` at wavenumber `k` along the chosen route.
pub fn scatter(p: &Potential, k: f64, route: Route, cfg: &IntegratorConfig) -> Result<ScatteringAmplitudes> {
    crate::evolution::check_wavenumber(k)?;
    match route {
        Route::Evolution => {
            let m = evolve_transfer(p, k, cfg)?.matrix();
            let mut amps = amplitudes_from_matrix(&m, k)?;
            amps.source = AmplitudeSource::Evolution;
            Ok(amps)
        }
        Route::Jost => {
            let j = solve_jost(p, k, cfg)?;
            amplitudes_from_jost(&j, j.support().1)
        }
        Route::S => amplitudes_from_s(&solve_s(p, k, cfg)?, cfg),
        Route::Auto => {
            let mut primary = scatter(p, k, Route::Jost, cfg)?;
            let check = scatter(p, k, Route::Evolution, cfg)?;
            primary.route_deviation = Some(primary.max_deviation(&check));
            Ok(primary)
        }
    }
}
