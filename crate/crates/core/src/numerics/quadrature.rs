//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::IntegratorConfig;
use crate::error::{Result, ScatterError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let points: &[f64] = if x == 0.0 { &[center] } else { &[center - half * x, center + half * x] };
        for &p in points {
            let v = f(p);
            if !v.is_finite() {
                return Err(ScatterError::NonFiniteIntegrand { at: p });
            }
            kron += v * w;
            if j % 2 == 1 {
                gauss += v * WG[j / 2];
            }
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Ok(Panel { lo, hi, value, error })
}

/// Adaptive estimate of `∫_{x0}^{x1} f(x) dx`.
///
/// Endpoints are never sampled. The subdivision budget is `cfg.max_steps`.
pub fn quadrature_real<F>(f: F, interval: (f64, f64), cfg: &IntegratorConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    let (x0, x1) = interval;
    if !(x0.is_finite() && x1.is_finite()) {
        return Err(ScatterError::InvalidInput(format!("non-finite interval [{x0}, {x1}]")));
    }
    if x0 == x1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x1 < x0 {
        return quadrature_real(f, (x1, x0), cfg).map(|v| -v);
    }
    let first = kronrod(&f, x0, x1)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut intervals = 1usize;
    while total_err > cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
        if intervals >= cfg.max_steps {
            return Err(ScatterError::QuadratureLimitExceeded { max_intervals: cfg.max_steps });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.lo, mid)?;
        let right = kronrod(&f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        intervals += 1;
    }
    // Re-sum to shed accumulated cancellation in the running total.
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Arc `w = e^{-2iφ}` for φ running from `phase_start` to `phase_end`.
///
/// Increasing φ traverses the unit circle clockwise; a phase span of π is one full turn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcPath {
    pub phase_start: f64,
    pub phase_end: f64,
}

impl ArcPath {
    pub fn new(phase_start: f64, phase_end: f64) -> Result<Self> {
        if !(phase_start.is_finite() && phase_end.is_finite()) || phase_end < phase_start {
            return Err(ScatterError::InvalidInput(format!("invalid arc phases [{phase_start}, {phase_end}]")));
        }
        Ok(Self { phase_start, phase_end })
    }

    /// `m` full windings starting at w = 1.
    pub fn windings(m: u32) -> Self {
        Self { phase_start: 0.0, phase_end: m as f64 * PI }
    }

    pub fn winding_count(&self) -> u64 {
        ((self.phase_end - self.phase_start) / PI).floor() as u64
    }

    pub fn point(&self, phi: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * phi)
    }

    pub fn start_point(&self) -> Complex64 {
        self.point(self.phase_start)
    }

    pub fn end_point(&self) -> Complex64 {
        self.point(self.phase_end)
    }
}

/// `∫ g(w) dw` along `path`, for an integrand single-valued in `w`.
pub fn quadrature_arc<G>(g: G, path: &ArcPath, cfg: &IntegratorConfig) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    quadrature_arc_lifted(|_, w| g(w), path, cfg)
}

/// `∫ g(φ, w) dw` along `path` where the integrand may depend on the lifted phase φ.
///
/// Needed when `g` is only known along a trajectory that winds several times,
/// so that `w` alone does not determine it. The integral is taken in φ with
/// `dw = -2i w dφ`, split into quarter-turn panels.
pub fn quadrature_arc_lifted<G>(g: G, path: &ArcPath, cfg: &IntegratorConfig) -> Result<Complex64>
where
    G: Fn(f64, Complex64) -> Complex64,
{
    let span = path.phase_end - path.phase_start;
    if span == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let panel = FRAC_PI_2 / 2.0;
    let pieces = (span / panel).ceil().max(1.0) as usize;
    let integrand = |phi: f64| {
        let w = path.point(phi);
        g(phi, w) * Complex64::new(0.0, -2.0) * w
    };
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..pieces {
        let lo = path.phase_start + j as f64 * panel;
        let hi = if j + 1 == pieces { path.phase_end } else { path.phase_start + (j + 1) as f64 * panel };
        total += quadrature_real(integrand, (lo, hi), cfg)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn zero_integrand() {
        let v = quadrature_real(|_| Complex64::new(0.0, 0.0), (0.0, 1.0), &cfg()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oscillatory_exponential() {
        let v = quadrature_real(|x| (I * x).exp(), (0.0, PI), &cfg()).unwrap();
        assert!((v - 2.0 * I).norm() < 1e-12, "{v}");
    }

    #[test]
    fn polynomials_are_exact() {
        for deg in 0..=20 {
            let v = quadrature_real(|x| Complex64::new(x.powi(deg), 0.0), (0.0, 1.0), &cfg()).unwrap();
            assert!((v.re - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn reversed_interval_negates() {
        let f = |x: f64| Complex64::new(x.sin(), x.cos());
        let a = quadrature_real(f, (0.0, 2.0), &cfg()).unwrap();
        let b = quadrature_real(f, (2.0, 0.0), &cfg()).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let v = quadrature_real(|x| Complex64::new(1.0 / x.sqrt(), 0.0), (0.0, 1.0), &IntegratorConfig { rel_tol: 1e-8, ..cfg() }).unwrap();
        assert!((v.re - 2.0).abs() < 1e-7);
    }

    #[test]
    fn non_finite_integrand_reported() {
        let err = quadrature_real(|x| Complex64::new(1.0 / (x - 0.5), 0.0), (0.0, 1.0), &cfg()).unwrap_err();
        assert!(matches!(err, ScatterError::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn closed_contour_of_entire_function_vanishes() {
        let v = quadrature_arc(|_| Complex64::new(1.0, 0.0), &ArcPath::windings(1), &cfg()).unwrap();
        assert!(v.norm() < 1e-14);
        let v = quadrature_arc(|w| w * w + 3.0 * w, &ArcPath::windings(2), &cfg()).unwrap();
        assert!(v.norm() < 1e-13);
    }

    #[test]
    fn inverse_w_winds_clockwise() {
        let one = quadrature_arc(|w| 1.0 / w, &ArcPath::windings(1), &cfg()).unwrap();
        assert!((one + 2.0 * PI * I).norm() < 1e-12, "{one}");
        for m in [2u32, 3, 5, 8] {
            let v = quadrature_arc(|w| 1.0 / w, &ArcPath::windings(m), &cfg()).unwrap();
            assert!((v - one * m as f64).norm() <= 1e-10 * (one * m as f64).norm(), "m = {m}");
        }
    }

    #[test]
    fn open_arc_matches_antiderivative() {
        // ∫ w dw = (w1^2 - w0^2) / 2
        let path = ArcPath::new(0.3, 2.2).unwrap();
        let v = quadrature_arc(|w| w, &path, &cfg()).unwrap();
        let exact = (path.end_point().powi(2) - path.start_point().powi(2)) / 2.0;
        assert!((v - exact).norm() < 1e-13);
        assert_eq!(path.winding_count(), 0);
        assert_eq!(ArcPath::new(0.0, 3.5 * PI).unwrap().winding_count(), 3);
    }

    #[test]
    fn arc_rejects_backwards_phases() {
        assert!(ArcPath::new(1.0, 0.0).is_err());
    }
}
