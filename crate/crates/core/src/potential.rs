//! Finite-range scattering potentials.
//!
//! A [`Potential`] is a profile on a closed support `[lo, hi]` and vanishes
//! identically outside it. Every evaluation takes the wavenumber `k`, which
//! energy-dependent profiles (optical index profiles) use and the rest ignore.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// `x -> n^2(x)`.
pub type IndexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
/// `(x, k) -> v(x)`.
pub type PotentialFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Uniformly sampled profile with C1 piecewise-cubic (Catmull–Rom) interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    x0: f64,
    dx: f64,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

impl SampledProfile {
    pub fn new(x: &[f64], values: &[Complex64]) -> Result<Self> {
        if x.len() != values.len() {
            return Err(ScatterError::InvalidInput(format!("{} grid points but {} values", x.len(), values.len())));
        }
        if x.len() < 2 {
            return Err(ScatterError::InvalidInput("sampled potential needs at least two points".into()));
        }
        let n = x.len();
        let dx = (x[n - 1] - x[0]) / (n - 1) as f64;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(ScatterError::InvalidInput("sample grid must be increasing".into()));
        }
        for (i, &xi) in x.iter().enumerate() {
            if (xi - (x[0] + i as f64 * dx)).abs() > 1e-9 * dx.max(x[0].abs()) {
                return Err(ScatterError::InvalidInput(format!("sample grid is not uniform at index {i}")));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ScatterError::InvalidInput("sampled values must be finite".into()));
        }
        let slopes = (0..n)
            .map(|i| match i {
                0 => (values[1] - values[0]) / dx,
                i if i == n - 1 => (values[n - 1] - values[n - 2]) / dx,
                i => (values[i + 1] - values[i - 1]) / (2.0 * dx),
            })
            .collect();
        Ok(Self { x0: x[0], dx, values: values.to_vec(), slopes })
    }

    pub fn start(&self) -> f64 {
        self.x0
    }

    pub fn end(&self) -> f64 {
        self.x0 + self.dx * (self.values.len() - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.x0 + i as f64 * self.dx).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn eval(&self, x: f64) -> Complex64 {
        let n = self.values.len();
        let s = ((x - self.x0) / self.dx).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.values[i] * h00 + self.slopes[i] * (h10 * self.dx) + self.values[i + 1] * h01 + self.slopes[i + 1] * (h11 * self.dx)
    }
}

/// The formula behind a potential, in its own coordinate.
#[derive(Clone)]
pub enum PotentialKind {
    Zero,
    /// Constant height `𝔷` on `[0, L]`.
    Barrier { height: Complex64, length: f64 },
    /// `𝔷 e^{-4 i k0 x}` on `[0, L]`.
    ModulatedExponential { height: Complex64, k0: f64, length: f64 },
    /// Optical profile: `v(x) = k^2 (1 - n^2(x))` at the evaluation wavenumber.
    IndexProfile { n2: IndexFn, reference_k: f64, breakpoints: Vec<f64> },
    Sampled(SampledProfile),
    Closure { eval: PotentialFn, breakpoints: Vec<f64> },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Barrier { height, length } => write!(f, "Barrier {{ height: {height}, length: {length} }}"),
            Self::ModulatedExponential { height, k0, length } => {
                write!(f, "ModulatedExponential {{ height: {height}, k0: {k0}, length: {length} }}")
            }
            Self::IndexProfile { reference_k, .. } => write!(f, "IndexProfile {{ reference_k: {reference_k} }}"),
            Self::Sampled(s) => write!(f, "Sampled {{ points: {}, range: [{}, {}] }}", s.values.len(), s.start(), s.end()),
            Self::Closure { breakpoints, .. } => write!(f, "Closure {{ breakpoints: {breakpoints:?} }}"),
        }
    }
}

impl PotentialKind {
    fn eval(&self, x: f64, k: f64) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Barrier { height, .. } => *height,
            Self::ModulatedExponential { height, k0, .. } => height * Complex64::from_polar(1.0, -4.0 * k0 * x),
            Self::IndexProfile { n2, .. } => (1.0 - n2(x)) * (k * k),
            Self::Sampled(s) => s.eval(x),
            Self::Closure { eval, .. } => eval(x, k),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Zero => Vec::new(),
            Self::Barrier { length, .. } | Self::ModulatedExponential { length, .. } => vec![0.0, *length],
            Self::Sampled(s) => s.grid(),
            Self::IndexProfile { breakpoints, .. } | Self::Closure { breakpoints, .. } => breakpoints.clone(),
        }
    }
}

/// A finite-range potential: a formula, a closed support, and an optional mirror.
#[derive(Clone, Debug)]
pub struct Potential {
    kind: Arc<PotentialKind>,
    lo: f64,
    hi: f64,
    mirrored: bool,
}

impl Potential {
    fn with_support(kind: PotentialKind, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ScatterError::InvalidInput(format!("support [{lo}, {hi}] must be a finite interval with lo < hi")));
        }
        Ok(Self { kind: Arc::new(kind), lo, hi, mirrored: false })
    }

    /// The zero potential, anchored at `x`.
    pub fn zero_at(x: f64) -> Self {
        Self { kind: Arc::new(PotentialKind::Zero), lo: x, hi: x, mirrored: false }
    }

    pub fn zero() -> Self {
        Self::zero_at(0.0)
    }

    pub fn barrier(height: Complex64, length: f64) -> Result<Self> {
        Self::with_support(PotentialKind::Barrier { height, length }, 0.0, length)
    }

    pub fn modulated_exponential(height: Complex64, k0: f64, length: f64) -> Result<Self> {
        if k0.is_nan() || k0 <= 0.0 {
            return Err(ScatterError::InvalidInput("modulation wavenumber must be positive".into()));
        }
        Self::with_support(PotentialKind::ModulatedExponential { height, k0, length }, 0.0, length)
    }

    pub fn sampled(x: &[f64], values: &[Complex64]) -> Result<Self> {
        let s = SampledProfile::new(x, values)?;
        let (lo, hi) = (s.start(), s.end());
        Self::with_support(PotentialKind::Sampled(s), lo, hi)
    }

    /// A potential given by an arbitrary `(x, k) -> v` evaluator on `support`.
    ///
    /// `breakpoints` lists interior points where the evaluator jumps.
    pub fn closure<F>(eval: F, support: (f64, f64), breakpoints: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::with_support(PotentialKind::Closure { eval: Arc::new(eval), breakpoints }, support.0, support.1)
    }

    /// Optical potential `v(x) = k^2 (1 - n^2(x))` on `support`.
    ///
    /// `reference_k` is the wavenumber the profile was designed for; the
    /// potential itself is evaluated with whatever `k` is passed in.
    pub fn from_index<F>(n2: F, reference_k: f64, support: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if reference_k.is_nan() || reference_k <= 0.0 {
            return Err(ScatterError::InvalidInput("wavenumber must be positive".into()));
        }
        Self::with_support(
            PotentialKind::IndexProfile { n2: Arc::new(n2), reference_k, breakpoints: Vec::new() },
            support.0,
            support.1,
        )
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    /// True when the potential vanishes everywhere.
    pub fn is_trivial(&self) -> bool {
        matches!(*self.kind, PotentialKind::Zero) || self.lo >= self.hi
    }

    /// `v(x)` at wavenumber `k`; exactly zero outside the support.
    pub fn evaluate(&self, x: f64, k: f64) -> Complex64 {
        if self.is_trivial() || x < self.lo || x > self.hi {
            return Complex64::new(0.0, 0.0);
        }
        let local = if self.mirrored { -x } else { x };
        self.kind.eval(local, k)
    }

    /// `v(x) θ(a - x)`.
    pub fn truncate(&self, a: f64) -> Self {
        if a <= self.lo || self.is_trivial() {
            return Self::zero_at(self.lo);
        }
        Self { hi: self.hi.min(a), ..self.clone() }
    }

    /// `v(x)` on `[lo, hi] ∩ support`, zero elsewhere.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let (new_lo, new_hi) = (self.lo.max(lo), self.hi.min(hi));
        if new_lo >= new_hi || self.is_trivial() {
            return Self::zero_at(new_lo.min(self.hi));
        }
        Self { lo: new_lo, hi: new_hi, ..self.clone() }
    }

    /// `v(-x)`.
    pub fn parity_reflect(&self) -> Self {
        Self { kind: self.kind.clone(), lo: -self.hi, hi: -self.lo, mirrored: !self.mirrored }
    }

    /// Sorted support endpoints plus every interior discontinuity.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![self.lo, self.hi];
        for b in self.kind.breakpoints() {
            let b = if self.mirrored { -b } else { b };
            if b > self.lo && b < self.hi {
                pts.push(b);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Sampled `n^2(x)` of an optical profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexProfileRecord {
    pub x: Vec<f64>,
    pub n2: Vec<Complex64>,
    pub k0: f64,
    pub length: f64,
}

impl IndexProfileRecord {
    /// Largest peak-to-peak swing of `Re n^2` and `Im n^2`.
    pub fn oscillation_amplitude(&self) -> f64 {
        let span = |vals: Vec<f64>| {
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        };
        let re = span(self.n2.iter().map(|z| z.re).collect());
        let im = span(self.n2.iter().map(|z| z.im).collect());
        re.max(im)
    }
}

/// `v(x) = k^2 (1 - n^2(x))` on `support`, zero outside.
pub fn potential_from_index<F>(n2: F, k: f64, support: (f64, f64)) -> Result<Potential>
where
    F: Fn(f64) -> Complex64 + Send + Sync + 'static,
{
    Potential::from_index(n2, k, support)
}
