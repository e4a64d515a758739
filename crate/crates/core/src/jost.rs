//! Jost-solution route and its `S(z)` and Riccati reformulations.
//!
//! All three are integrated in the real coordinate `a` with the universal
//! initial data at the left support edge `a-`:
//!
//! * Jost: `ψ'' = (v - k²) ψ`, `ψ(a-) = e^{-ika-}`, `ψ'(a-) = -ik e^{-ika-}`.
//! * S-form: `z²S'' + v̌ S/(4k²) = 0` on `z = e^{-2ika}`, `S(z-) = z-`, `S'(z-) = 1`.
//! * Riccati: `dR/dz = v̌ (R + z)² / (4k²z²)`, `R(z-) = 0`.
//!
//! Working in `a` keeps every trajectory single-valued when the arc winds
//! around the unit circle more than once.

use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::evolution::check_wavenumber;
use crate::numerics::{integrate_ode_piecewise, IntegratorConfig, Trajectory, I};
use crate::potential::Potential;

/// `|R^r|` above which the Riccati integration is abandoned.
pub const RICCATI_BLOWUP: f64 = 1e8;

/// `ψ_{k-}`, `ψ'_{k-}` and the running integral `∫ v/F-²` across the support.
#[derive(Clone, Debug)]
pub struct JostSolution {
    k: f64,
    potential: Potential,
    traj: Trajectory<3>,
}

impl JostSolution {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn support(&self) -> (f64, f64) {
        (self.traj.start(), self.traj.end())
    }

    /// Nodes of `[ψ, ψ', ∫ v/F-²]`.
    pub fn trajectory(&self) -> &Trajectory<3> {
        &self.traj
    }

    /// `(ψ(x), ψ'(x))`, for `x` inside the support.
    pub fn at(&self, x: f64) -> (Complex64, Complex64) {
        let [psi, dpsi, _] = self.traj.eval(x);
        (psi, dpsi)
    }

    /// `∫_{a-}^{a} v / F-² dx`, so that `R^l(a) = 2ik` times this value.
    pub fn left_integral(&self, a: f64) -> Complex64 {
        self.traj.eval(a)[2]
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        self.at(x).0
    }

    /// `F+(k, x) = ψ' + ikψ`.
    pub fn f_plus(&self, x: f64) -> Complex64 {
        let (psi, dpsi) = self.at(x);
        dpsi + I * self.k * psi
    }

    /// `F-(k, x) = ψ' - ikψ`.
    pub fn f_minus(&self, x: f64) -> Complex64 {
        let (psi, dpsi) = self.at(x);
        dpsi - I * self.k * psi
    }

    /// `1/T(a) = -F-(k, a) e^{ika} / (2ik)`, finite even at a spectral singularity.
    pub fn inverse_transmission(&self, a: f64) -> Complex64 {
        -self.f_minus(a) * Complex64::from_polar(1.0, self.k * a) / (2.0 * I * self.k)
    }
}

/// Solve the Jost initial-value problem across the support of `p`.
pub fn solve_jost(p: &Potential, k: f64, cfg: &IntegratorConfig) -> Result<JostSolution> {
    check_wavenumber(k)?;
    let breaks = p.breakpoints();
    let a_minus = breaks[0];
    let psi0 = Complex64::from_polar(1.0, -k * a_minus);
    let y0 = [psi0, -I * k * psi0, Complex64::new(0.0, 0.0)];
    let k2 = k * k;
    let rhs = |x: f64, y: &[Complex64; 3]| {
        let v = p.evaluate(x, k);
        let f_minus = y[1] - I * k * y[0];
        [y[1], (v - k2) * y[0], v / (f_minus * f_minus)]
    };
    let traj = integrate_ode_piecewise(rhs, &breaks, y0, cfg, |_, _| Ok(()))?;
    Ok(JostSolution { k, potential: p.clone(), traj })
}

/// `S` and `S' = dS/dz` along the arc `z = e^{-2ika}`.
#[derive(Clone, Debug)]
pub struct SFunction {
    k: f64,
    potential: Potential,
    traj: Trajectory<2>,
}

impl SFunction {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn support(&self) -> (f64, f64) {
        (self.traj.start(), self.traj.end())
    }

    pub fn trajectory(&self) -> &Trajectory<2> {
        &self.traj
    }

    /// Arc point for position `a`.
    pub fn z(&self, a: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * self.k * a)
    }

    pub fn z_minus(&self) -> Complex64 {
        self.z(self.traj.start())
    }

    pub fn z_plus(&self) -> Complex64 {
        self.z(self.traj.end())
    }

    /// `(S, S')` at the arc point belonging to `a`.
    pub fn at(&self, a: f64) -> (Complex64, Complex64) {
        let [s, ds] = self.traj.eval(a);
        (s, ds)
    }

    /// `(S(z+), S'(z+))`.
    pub fn at_end(&self) -> (Complex64, Complex64) {
        let [s, ds] = self.traj.final_state();
        (s, ds)
    }

    /// `S''` from the differential equation.
    pub fn second_derivative(&self, a: f64) -> Complex64 {
        let (s, _) = self.at(a);
        let z = self.z(a);
        -self.potential.evaluate(a, self.k) * s / (4.0 * self.k * self.k * z * z)
    }

    /// `e^{ika} S(e^{-2ika})`, which equals `ψ_{k-}(a)`.
    pub fn jost_value(&self, a: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.k * a) * self.at(a).0
    }
}

/// Integrate the `S` equation along the arc, parametrized by `a`.
pub fn solve_s(p: &Potential, k: f64, cfg: &IntegratorConfig) -> Result<SFunction> {
    check_wavenumber(k)?;
    let breaks = p.breakpoints();
    let z_minus = Complex64::from_polar(1.0, -2.0 * k * breaks[0]);
    let y0 = [z_minus, Complex64::new(1.0, 0.0)];
    // ds/da = S' dz/da with dz/da = -2ik z;  dS'/da = S'' dz/da = i v S / (2k z).
    let rhs = |a: f64, y: &[Complex64; 2]| {
        let z = Complex64::from_polar(1.0, -2.0 * k * a);
        let v = p.evaluate(a, k);
        [-2.0 * I * k * z * y[1], I * v * y[0] / (2.0 * k * z)]
    };
    let traj = integrate_ode_piecewise(rhs, &breaks, y0, cfg, |_, _| Ok(()))?;
    Ok(SFunction { k, potential: p.clone(), traj })
}

/// Right-reflection amplitude of every truncation `v θ(a - x)`.
#[derive(Clone, Debug)]
pub struct RiccatiTrajectory {
    k: f64,
    traj: Trajectory<1>,
}

impl RiccatiTrajectory {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn support(&self) -> (f64, f64) {
        (self.traj.start(), self.traj.end())
    }

    /// `R^r` of the potential truncated at `a`.
    pub fn r_right(&self, a: f64) -> Complex64 {
        self.traj.eval(a)[0]
    }

    pub fn r_right_final(&self) -> Complex64 {
        self.traj.final_state()[0]
    }

    pub fn trajectory(&self) -> &Trajectory<1> {
        &self.traj
    }
}

/// Integrate the Riccati equation for `R^r` from `R^r(z-) = 0`.
///
/// Fails with [`ScatterError::BlowUp`] once `|R^r|` exceeds [`RICCATI_BLOWUP`];
/// the linear `S` equation stays regular there and should be used instead.
pub fn solve_riccati(p: &Potential, k: f64, cfg: &IntegratorConfig) -> Result<RiccatiTrajectory> {
    check_wavenumber(k)?;
    let breaks = p.breakpoints();
    // dR/da = dR/dz · (-2ikz) = -i v (R + z)² / (2kz)
    let rhs = |a: f64, y: &[Complex64; 1]| {
        let z = Complex64::from_polar(1.0, -2.0 * k * a);
        let w = y[0] + z;
        [-I * p.evaluate(a, k) * w * w / (2.0 * k * z)]
    };
    let monitor = |a: f64, y: &[Complex64; 1]| {
        let magnitude = y[0].norm();
        if magnitude > RICCATI_BLOWUP {
            Err(ScatterError::BlowUp { a, magnitude })
        } else {
            Ok(())
        }
    };
    let traj = integrate_ode_piecewise(rhs, &breaks, [Complex64::new(0.0, 0.0)], cfg, monitor)?;
    Ok(RiccatiTrajectory { k, traj })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{barrier_amplitudes, BarrierClosedForm};

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn free_jost_solution() {
        let k = 1.7;
        let p = Potential::closure(|_, _| cz(0.0, 0.0), (-1.0, 2.0), vec![]).unwrap();
        let j = solve_jost(&p, k, &cfg()).unwrap();
        for i in 0..=30 {
            let x = -1.0 + 3.0 * i as f64 / 30.0;
            assert!((j.psi(x) - Complex64::from_polar(1.0, -k * x)).norm() < 1e-9);
            assert!(j.f_plus(x).norm() < 1e-8);
        }
    }

    #[test]
    fn initial_conditions_are_exact() {
        let k = 0.8;
        let p = Potential::barrier(cz(1.0, 0.5), 2.0).unwrap().restrict(0.4, 2.0);
        let j = solve_jost(&p, k, &cfg()).unwrap();
        let (psi, dpsi) = j.at(0.4);
        let phase = Complex64::from_polar(1.0, k * 0.4);
        assert!((psi * phase - 1.0).norm() < 1e-15);
        assert!((dpsi * phase + I * k).norm() < 1e-15);
        let s = solve_s(&p, k, &cfg()).unwrap();
        let (s0, ds0) = s.at(0.4);
        assert!((s0 - s.z_minus()).norm() < 1e-15);
        assert_eq!(ds0, cz(1.0, 0.0));
    }

    #[test]
    fn free_s_function_is_identity_map() {
        let k = 1.1;
        let p = Potential::closure(|_, _| cz(0.0, 0.0), (0.0, 5.0), vec![]).unwrap();
        let s = solve_s(&p, k, &cfg()).unwrap();
        let (sp, dsp) = s.at_end();
        assert!((sp - s.z_plus()).norm() < 1e-9);
        assert!((dsp - 1.0).norm() < 1e-12);
        assert!(solve_riccati(&p, k, &cfg()).unwrap().r_right_final().norm() < 1e-15);
    }

    #[test]
    fn s_and_jost_are_equivalent() {
        let k = 1.3;
        let p = Potential::barrier(cz(2.5, -0.6), 2.2).unwrap();
        let j = solve_jost(&p, k, &cfg()).unwrap();
        let s = solve_s(&p, k, &cfg()).unwrap();
        for i in 0..=40 {
            let a = 2.2 * i as f64 / 40.0;
            let diff = (s.jost_value(a) - j.psi(a)).norm();
            assert!(diff <= 1e-9 * (1.0 + j.psi(a).norm()), "a = {a}: {diff:e}");
        }
    }

    #[test]
    fn riccati_matches_barrier_and_s_identity() {
        let (z, k, l) = (cz(1.8, 0.4), 1.1, 1.9);
        let p = Potential::barrier(z, l).unwrap();
        let ric = solve_riccati(&p, k, &cfg()).unwrap();
        let exact = barrier_amplitudes(&BarrierClosedForm::new(z, k, l)).unwrap();
        assert!((ric.r_right_final() - exact.r_right).norm() < 1e-7);
        let s = solve_s(&p, k, &cfg()).unwrap();
        for i in 0..=20 {
            let a = l * i as f64 / 20.0;
            let (sv, dsv) = s.at(a);
            let via_s = sv / dsv - s.z(a);
            assert!((ric.r_right(a) - via_s).norm() < 1e-7, "a = {a}");
        }
    }

    #[test]
    fn riccati_blow_up_at_pole() {
        // The lasing design puts a zero of S' at z+, i.e. a pole of R^r(a) at a = L.
        let spec = crate::design::DesignSpec::from_k0l(0.75 * std::f64::consts::PI, crate::design::DesignGoal::Lasing, cz(0.0, 0.0));
        let design = crate::design::design_lasing(&spec).unwrap();
        let err = solve_riccati(design.potential(), spec.k0, &cfg()).unwrap_err();
        assert!(matches!(err, ScatterError::BlowUp { .. }), "{err}");
    }

    #[test]
    fn born_order_linearity() {
        let k = 1.0;
        let base = |c: f64| Potential::barrier(cz(0.7 * c, 0.3 * c), 2.0).unwrap();
        let tight = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-16, ..cfg() };
        let r4 = solve_riccati(&base(1e-4), k, &tight).unwrap().r_right_final();
        let r5 = solve_riccati(&base(1e-5), k, &tight).unwrap().r_right_final();
        let ratio = r4 / r5;
        assert!((ratio - 10.0).norm() < 1e-2, "ratio {ratio}");
    }
}
