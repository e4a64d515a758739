//! Transfer matrix as the evolution operator of a 2x2 matrix Hamiltonian.
//!
//! With `τ = kx` the matrix `M(α)` of the truncated potential `v(x)θ(a - x)`,
//! `α = ka`, obeys `i dM/dα = H(α) M` with `M = 1` to the left of the support.
//! `H` vanishes outside the support, so the limits at `±∞` are reached at the
//! support edges.

use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::numerics::{integrate_ode_piecewise, Complex2x2, IntegratorConfig, Trajectory};
use crate::potential::Potential;

/// Largest tolerated `|det M - 1|` before a trajectory is rejected.
pub const DETERMINANT_DRIFT_LIMIT: f64 = 1e-6;

/// `H(τ) = v(τ/k)/(2k²) [[1, e^{-2iτ}], [-e^{2iτ}, -1]]`.
#[derive(Clone, Debug)]
pub struct MatrixHamiltonian {
    potential: Potential,
    k: f64,
}

impl MatrixHamiltonian {
    pub fn new(potential: Potential, k: f64) -> Result<Self> {
        check_wavenumber(k)?;
        Ok(Self { potential, k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn at(&self, tau: f64) -> Complex2x2 {
        let v = self.potential.evaluate(tau / self.k, self.k);
        hamiltonian_matrix(v, self.k, tau)
    }
}

fn hamiltonian_matrix(v: Complex64, k: f64, tau: f64) -> Complex2x2 {
    let s = v / (2.0 * k * k);
    let e = Complex64::from_polar(1.0, -2.0 * tau);
    Complex2x2::new(s, s * e, -s * e.conj(), -s)
}

pub(crate) fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::InvalidInput(format!("wavenumber must be positive and finite, got {k}")))
    }
}

/// `H(τ)` for potential `p` at wavenumber `k`.
pub fn hamiltonian_at(h: &MatrixHamiltonian, tau: f64) -> Complex2x2 {
    h.at(tau)
}

/// `M(α)` sampled at integrator nodes, with dense output in between.
#[derive(Clone, Debug)]
pub struct TransferTrajectory {
    k: f64,
    traj: Trajectory<4>,
}

impl TransferTrajectory {
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `(α_start, α_end)` = `k·(a-, a+)`.
    pub fn alpha_range(&self) -> (f64, f64) {
        (self.traj.start(), self.traj.end())
    }

    /// Full transfer matrix of the potential.
    pub fn matrix(&self) -> Complex2x2 {
        Complex2x2::from_array(self.traj.final_state())
    }

    /// `M(α)`: identity before the support, constant after it.
    pub fn at(&self, alpha: f64) -> Complex2x2 {
        Complex2x2::from_array(self.traj.eval(alpha))
    }

    /// Integrator nodes `(α_i, M(α_i))`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex2x2)> + '_ {
        self.traj.times().iter().zip(self.traj.states()).map(|(&a, s)| (a, Complex2x2::from_array(*s)))
    }

    pub fn len(&self) -> usize {
        self.traj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.is_empty()
    }

    /// `max_i |det M(α_i) - 1|` over the stored nodes.
    pub fn max_determinant_drift(&self) -> f64 {
        self.samples().map(|(_, m)| (m.det() - 1.0).norm()).fold(0.0, f64::max)
    }
}

/// Integrate `i dM/dα = H(α) M` across the support of `p`.
pub fn evolve_transfer(p: &Potential, k: f64, cfg: &IntegratorConfig) -> Result<TransferTrajectory> {
    check_wavenumber(k)?;
    let breaks: Vec<f64> = p.breakpoints().into_iter().map(|x| k * x).collect();
    let id = Complex2x2::identity().to_array();
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |alpha: f64, m: &[Complex64; 4]| {
        let v = p.evaluate(alpha / k, k);
        let h = hamiltonian_matrix(v, k, alpha).scale(minus_i);
        (h * Complex2x2::from_array(*m)).to_array()
    };
    let monitor = |alpha: f64, m: &[Complex64; 4]| {
        let drift = (Complex2x2::from_array(*m).det() - 1.0).norm();
        if drift > DETERMINANT_DRIFT_LIMIT {
            Err(ScatterError::DeterminantDrift { alpha, drift })
        } else {
            Ok(())
        }
    };
    let traj = integrate_ode_piecewise(rhs, &breaks, id, cfg, monitor)?;
    Ok(TransferTrajectory { k, traj })
}

/// `max |M₂M₁ - M|` for the split of `p` at `split_a`.
///
/// `M₁` belongs to `v θ(split_a - x)`, `M₂` to the remainder.
pub fn compose_check(p: &Potential, k: f64, split_a: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let (lo, hi) = p.support();
    if !p.is_trivial() && !(split_a >= lo && split_a <= hi) {
        return Err(ScatterError::InvalidInput(format!("split point {split_a} outside support [{lo}, {hi}]")));
    }
    let m1 = evolve_transfer(&p.truncate(split_a), k, cfg)?.matrix();
    let m2 = evolve_transfer(&p.restrict(split_a, f64::INFINITY), k, cfg)?.matrix();
    let m = evolve_transfer(p, k, cfg)?.matrix();
    Ok((m2 * m1 - m).max_norm())
}
