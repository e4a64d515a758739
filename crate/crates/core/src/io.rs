//! JSON potential descriptions and CSV/JSON record writers.
//!
//! Numbers are written with `{:e}`, the shortest representation that parses
//! back to the same `f64`, so files are bit-stable and diffable.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::ScatteringAmplitudes;
use crate::design::{design, DesignGoal, DesignResult, DesignSpec, DesignVerification, Prediction};
use crate::error::{Result, ScatterError};
use crate::evolution::TransferTrajectory;
use crate::potential::{IndexProfileRecord, Potential};

/// A complex number written as a bare real, `[re, im]`, or `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
    Parts {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) | ComplexValue::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue::Parts { re: z.re, im: z.im }
    }
}

/// Parse `"1.5"`, `"1.5+0.2i"`, `"-3e-6-1e-7i"` or `"2i"`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || ScatterError::InvalidInput(format!("cannot parse complex number '{s}'"));
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialShape {
    Zero,
    Barrier {
        height: ComplexValue,
        length: f64,
    },
    ModulatedExponential {
        height: ComplexValue,
        k0: f64,
        length: f64,
    },
    Sampled {
        x: Vec<f64>,
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    Design {
        goal: DesignGoal,
        #[serde(default = "unit")]
        k0: f64,
        #[serde(default)]
        length: Option<f64>,
        #[serde(default, rename = "k0L")]
        k0l: Option<f64>,
        #[serde(default)]
        gamma: Option<ComplexValue>,
    },
}

fn unit() -> f64 {
    1.0
}

/// Potential description accepted by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub shape: PotentialShape,
    /// Keep only `x ≤ truncate_at`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate_at: Option<f64>,
    /// Apply `x -> -x` after truncation.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub parity: bool,
}

/// A built potential and, for designed profiles, the design behind it.
#[derive(Clone, Debug)]
pub struct BuiltPotential {
    pub potential: Potential,
    pub design: Option<DesignResult>,
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ScatterError::InvalidInput(format!("potential spec: {e}")))
    }

    /// Inline JSON when the argument starts with `{`, a file path otherwise.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            return Self::from_json(arg);
        }
        let text = std::fs::read_to_string(arg).map_err(|e| ScatterError::InvalidInput(format!("reading '{arg}': {e}")))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("potential spec serializes")
    }

    pub fn build(&self) -> Result<BuiltPotential> {
        let (mut potential, design) = match &self.shape {
            PotentialShape::Zero => (Potential::zero(), None),
            PotentialShape::Barrier { height, length } => (Potential::barrier((*height).into(), *length)?, None),
            PotentialShape::ModulatedExponential { height, k0, length } => {
                (Potential::modulated_exponential((*height).into(), *k0, *length)?, None)
            }
            PotentialShape::Sampled { x, re, im } => {
                let im = if im.is_empty() { vec![0.0; re.len()] } else { im.clone() };
                if im.len() != re.len() {
                    return Err(ScatterError::InvalidInput("sampled re and im arrays differ in length".into()));
                }
                let values: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                (Potential::sampled(x, &values)?, None)
            }
            PotentialShape::Design { goal, k0, length, k0l, gamma } => {
                let length = match (length, k0l) {
                    (Some(l), None) => *l,
                    (None, Some(kl)) => kl / k0,
                    _ => return Err(ScatterError::InvalidInput("design spec needs exactly one of length and k0L".into())),
                };
                let gamma = gamma.map(Complex64::from).unwrap_or_default();
                let result = design(&DesignSpec::new(*k0, length, *goal, gamma)?)?;
                (result.potential().clone(), Some(result))
            }
        };
        if let Some(a) = self.truncate_at {
            potential = potential.truncate(a);
        }
        if self.parity {
            potential = potential.parity_reflect();
        }
        Ok(BuiltPotential { potential, design })
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x:e}")
}

/// CSV of `M(α)` at the integrator nodes.
pub fn trajectory_csv(traj: &TransferTrajectory) -> String {
    let mut out = String::from("alpha,re_m11,im_m11,re_m12,im_m12,re_m21,im_m21,re_m22,im_m22,det_drift\n");
    for (alpha, m) in traj.samples() {
        let _ = write!(out, "{}", num(alpha));
        for z in m.to_array() {
            let _ = write!(out, ",{},{}", num(z.re), num(z.im));
        }
        let _ = writeln!(out, ",{}", num((m.det() - 1.0).norm()));
    }
    out
}

/// Outcome of one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub amplitudes: Option<ScatteringAmplitudes>,
    pub status: String,
}

pub const SWEEP_HEADER: &str =
    "k,re_t,im_t,abs_t,re_rl,im_rl,abs_rl,re_rr,im_rr,abs_rr,route_deviation,status";

/// Sweep CSV; failed rows keep their `k` and status with empty amplitude fields.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    sweep_csv_with_axis(rows, "k")
}

/// Same as [`sweep_csv`] with the first column named `axis` (e.g. `k0L` for design sweeps).
pub fn sweep_csv_with_axis(rows: &[SweepRow], axis: &str) -> String {
    let mut out = format!("{axis}{}", &SWEEP_HEADER[1..]);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{}", num(row.k));
        match &row.amplitudes {
            Some(a) => {
                for z in [a.t, a.r_left, a.r_right] {
                    let _ = write!(out, ",{},{},{}", num(z.re), num(z.im), num(z.norm()));
                }
                let dev = a.route_deviation.map(num).unwrap_or_default();
                let _ = write!(out, ",{dev}");
            }
            None => out.push_str(",,,,,,,,,,"),
        }
        let _ = writeln!(out, ",{}", row.status);
    }
    out
}

/// Profile CSV with `Re n² - 1` and `Im n²` columns.
pub fn profile_csv(rec: &IndexProfileRecord) -> String {
    let mut out = String::from("x,re_n2_minus_1,im_n2\n");
    for (&x, n2) in rec.x.iter().zip(&rec.n2) {
        let _ = writeln!(out, "{},{},{}", num(x), num(n2.re - 1.0), num(n2.im));
    }
    out
}

/// Design output: spec, predictions, sampled profile and forward-check residuals.
#[derive(Clone, Debug, Serialize)]
pub struct DesignRecord {
    pub goal: DesignGoal,
    pub k0: f64,
    pub length: f64,
    pub k0l: f64,
    pub gamma: Complex64,
    pub coefficients: [Complex64; 4],
    pub prediction: Prediction,
    pub verification: Option<DesignVerification>,
    pub profile: IndexProfileRecord,
}

impl DesignRecord {
    pub fn new(result: &DesignResult, profile: IndexProfileRecord, verification: Option<DesignVerification>) -> Self {
        let spec = &result.spec;
        Self {
            goal: spec.goal,
            k0: spec.k0,
            length: spec.length,
            k0l: spec.k0l(),
            gamma: spec.gamma,
            coefficients: result.ansatz.coeffs,
            prediction: result.prediction,
            verification,
            profile,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design record serializes")
    }
}
