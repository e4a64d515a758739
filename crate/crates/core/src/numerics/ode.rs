//! Dormand–Prince 5(4) integrator for complex state vectors with dense output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Tolerances and limits shared by the ODE integrator and the quadrature routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of attempted steps (ODE) or subintervals (quadrature).
    pub max_steps: usize,
    /// First trial step; `0.0` selects one automatically.
    pub initial_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 1_000_000, initial_step: 0.0 }
    }
}

impl IntegratorConfig {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        let cfg = Self { rel_tol, abs_tol, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(ScatterError::InvalidInput(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(ScatterError::InvalidInput(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_steps == 0 {
            return Err(ScatterError::InvalidInput("max_steps must be at least 1".into()));
        }
        if !(self.initial_step >= 0.0 && self.initial_step.is_finite()) {
            return Err(ScatterError::InvalidInput("initial_step must be finite and non-negative".into()));
        }
        Ok(())
    }
}

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error weights: b - b_hat.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

type State<const N: usize> = [Complex64; N];

#[derive(Clone, Debug)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [State<N>; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> State<N> {
        let theta = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        std::array::from_fn(|i| {
            r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * theta1) * theta) * theta1) * theta
        })
    }
}

/// Accepted integrator nodes plus the continuous extension between them.
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    times: Vec<f64>,
    states: Vec<State<N>>,
    segments: Vec<Segment<N>>,
}

impl<const N: usize> Trajectory<N> {
    fn single(t: f64, y: State<N>) -> Self {
        Self { times: vec![t], states: vec![y], segments: Vec::new() }
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one node")
    }

    pub fn initial_state(&self) -> State<N> {
        self.states[0]
    }

    pub fn final_state(&self) -> State<N> {
        *self.states.last().expect("trajectory has at least one node")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State<N>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Interpolated state; `t` is clamped into the integrated span.
    pub fn eval(&self, t: f64) -> State<N> {
        if self.segments.is_empty() || t <= self.start() {
            return self.initial_state();
        }
        if t >= self.end() {
            return self.final_state();
        }
        // Last segment whose start is <= t.
        let idx = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let idx = idx.min(self.segments.len() - 1);
        if self.times[idx] == t {
            return self.states[idx];
        }
        self.segments[idx].eval(t)
    }

    /// Consecutive node pairs `(t_i, t_{i+1})`; the state is polynomial inside each.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.windows(2).map(|w| (w[0], w[1]))
    }
}

fn error_norm<const N: usize>(err: &State<N>, y0: &State<N>, y1: &State<N>, cfg: &IntegratorConfig) -> f64 {
    if N == 0 {
        return 0.0;
    }
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].norm().max(y1[i].norm());
            (err[i].norm() / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn all_finite<const N: usize>(y: &State<N>) -> bool {
    y.iter().all(|z| z.is_finite())
}

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    std::array::from_fn(|i| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        y[i] + acc * h
    })
}

fn initial_step<const N: usize, F>(rhs: &F, t0: f64, y0: &State<N>, f0: &State<N>, span: f64, cfg: &IntegratorConfig) -> Result<f64>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    if cfg.initial_step > 0.0 {
        return Ok(cfg.initial_step.min(span));
    }
    let scaled = |v: &State<N>| -> f64 {
        let s: f64 = (0..N)
            .map(|i| (v[i].norm() / (cfg.abs_tol + cfg.rel_tol * y0[i].norm())).powi(2))
            .sum();
        (s / N.max(1) as f64).sqrt()
    };
    let d0 = scaled(y0);
    let d1 = scaled(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(t0 + h0, &y1);
    if !all_finite(&f1) {
        return Err(ScatterError::NonFiniteState { t: t0 + h0 });
    }
    let diff: State<N> = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = scaled(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Integrate over `[t0, t1]` calling `monitor` on every accepted state.
///
/// The monitor can abort the integration by returning an error.
pub fn integrate_with_monitor<const N: usize, F, M>(
    rhs: F,
    t_span: (f64, f64),
    y0: State<N>,
    cfg: &IntegratorConfig,
    mut monitor: M,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &State<N>) -> State<N>,
    M: FnMut(f64, &State<N>) -> Result<()>,
{
    cfg.validate()?;
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(ScatterError::InvalidInput(format!("invalid integration span [{t0}, {t1}]")));
    }
    if !all_finite(&y0) {
        return Err(ScatterError::NonFiniteState { t: t0 });
    }
    let mut traj = Trajectory::single(t0, y0);
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(traj);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if !all_finite(&k1) {
        return Err(ScatterError::NonFiniteState { t });
    }
    let mut h = initial_step(&rhs, t0, &y0, &k1, span, cfg)?;
    let mut attempts = 0usize;
    let mut last_rejected = false;

    loop {
        attempts += 1;
        if attempts > cfg.max_steps {
            return Err(ScatterError::StepLimitExceeded { t, max_steps: cfg.max_steps });
        }
        let remaining = t1 - t;
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h <= f64::EPSILON * t.abs().max(span) {
            return Err(ScatterError::StepSizeUnderflow { t });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let ys = axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let t_new = if last { t1 } else { t + h };
        let k6 = rhs(t_new, &ys);
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t_new, &y_new);

        if ![&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| all_finite(k)) || !all_finite(&y_new) {
            return Err(ScatterError::NonFiniteState { t });
        }

        let err_vec: State<N> = std::array::from_fn(|i| {
            (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h
        });
        let err = error_norm(&err_vec, &y, &y_new, cfg);

        if err <= 1.0 {
            let rcont2: State<N> = std::array::from_fn(|i| y_new[i] - y[i]);
            let rcont3: State<N> = std::array::from_fn(|i| k1[i] * h - rcont2[i]);
            let rcont4: State<N> = std::array::from_fn(|i| rcont2[i] - k7[i] * h - rcont3[i]);
            let rcont5: State<N> = std::array::from_fn(|i| {
                (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h
            });
            traj.segments.push(Segment { t0: t, h, rcont: [y, rcont2, rcont3, rcont4, rcont5] });
            traj.times.push(t_new);
            traj.states.push(y_new);
            monitor(t_new, &y_new)?;

            t = t_new;
            y = y_new;
            k1 = k7;
            if last {
                return Ok(traj);
            }
            let mut fac = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.2) };
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
            last_rejected = true;
        }
    }
}

/// Integrate `dy/dt = rhs(t, y)` over `t_span` from `y0`.
pub fn integrate_ode<const N: usize, F>(rhs: F, t_span: (f64, f64), y0: State<N>, cfg: &IntegratorConfig) -> Result<Trajectory<N>>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    integrate_with_monitor(rhs, t_span, y0, cfg, |_, _| Ok(()))
}

/// Integrate across sorted `breaks` (endpoints included), restarting the stepper at each.
///
/// Inside a piece the right-hand side only sees times strictly between its
/// endpoints, so one-sided limits are used at jump discontinuities.
pub fn integrate_ode_piecewise<const N: usize, F, M>(
    rhs: F,
    breaks: &[f64],
    y0: State<N>,
    cfg: &IntegratorConfig,
    mut monitor: M,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &State<N>) -> State<N>,
    M: FnMut(f64, &State<N>) -> Result<()>,
{
    let Some(&first) = breaks.first() else {
        return Err(ScatterError::InvalidInput("no integration span".into()));
    };
    if breaks.iter().any(|b| b.is_nan()) || breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(ScatterError::InvalidInput("breakpoints must be sorted".into()));
    }
    let mut traj = Trajectory::single(first, y0);
    let mut y = y0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi == lo {
            continue;
        }
        let nudge = 1e-13 * (hi - lo);
        let piece_rhs = |t: f64, y: &State<N>| rhs(t.clamp(lo + nudge, hi - nudge), y);
        let piece = integrate_with_monitor(piece_rhs, (lo, hi), y, cfg, &mut monitor)?;
        y = piece.final_state();
        traj.times.extend_from_slice(&piece.times[1..]);
        traj.states.extend_from_slice(&piece.states[1..]);
        traj.segments.extend(piece.segments);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn zero_field_keeps_state_constant() {
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let traj = integrate_ode(|_, _| [Complex64::new(0.0, 0.0); 2], (0.0, 3.0), y0, &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.final_state(), y0);
        assert_eq!(traj.eval(1.3), y0);
    }

    #[test]
    fn exponential_half_turn() {
        let cfg = IntegratorConfig::default();
        let traj = integrate_ode(|_, y: &[Complex64; 1]| [I * y[0]], (0.0, PI), [Complex64::new(1.0, 0.0)], &cfg).unwrap();
        let y = traj.final_state()[0];
        assert!((y + 1.0).norm() <= 10.0 * cfg.rel_tol, "y(pi) = {y}");
        assert_eq!(traj.end(), PI);
    }

    #[test]
    fn dense_output_tracks_exponential() {
        let cfg = IntegratorConfig::default();
        let traj = integrate_ode(|_, y: &[Complex64; 1]| [I * y[0]], (0.0, 10.0), [Complex64::new(1.0, 0.0)], &cfg).unwrap();
        for j in 0..=200 {
            let t = 10.0 * j as f64 / 200.0;
            let exact = Complex64::from_polar(1.0, t);
            assert!((traj.eval(t)[0] - exact).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let run = |rtol: f64| {
            let cfg = IntegratorConfig { rel_tol: rtol, abs_tol: rtol * 1e-2, ..Default::default() };
            let traj = integrate_ode(|_, y: &[Complex64; 1]| [I * y[0]], (0.0, 20.0), [Complex64::new(1.0, 0.0)], &cfg).unwrap();
            (traj.final_state()[0] - Complex64::from_polar(1.0, 20.0)).norm()
        };
        let coarse = run(1e-6);
        let fine = run(5e-7);
        assert!(fine <= coarse, "coarse {coarse:e}, fine {fine:e}");
        assert!(run(1e-10) < coarse * 1e-2);
    }

    #[test]
    fn step_limit_is_reported() {
        let cfg = IntegratorConfig { max_steps: 5, ..Default::default() };
        let err = integrate_ode(|_, y: &[Complex64; 1]| [I * y[0] * 100.0], (0.0, 100.0), [Complex64::new(1.0, 0.0)], &cfg).unwrap_err();
        assert!(matches!(err, ScatterError::StepLimitExceeded { .. }));
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let err = integrate_ode(|_, _: &[Complex64; 1]| [Complex64::new(f64::NAN, 0.0)], (0.0, 1.0), [Complex64::new(1.0, 0.0)], &IntegratorConfig::default())
            .unwrap_err();
        assert!(matches!(err, ScatterError::NonFiniteState { .. }));
    }

    #[test]
    fn piecewise_uses_one_sided_values() {
        // dy/dt = step(t - 1): y(2) = 1 exactly.
        let rhs = |t: f64, _: &[Complex64; 1]| [Complex64::new(if t > 1.0 { 1.0 } else { 0.0 }, 0.0)];
        let traj = integrate_ode_piecewise(rhs, &[0.0, 1.0, 2.0], [Complex64::new(0.0, 0.0)], &IntegratorConfig::default(), |_, _| Ok(())).unwrap();
        assert!((traj.final_state()[0].re - 1.0).abs() < 1e-12);
        assert!(traj.eval(0.999)[0].norm() < 1e-12);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(IntegratorConfig::new(1e-8, -1.0).is_err());
    }
}
