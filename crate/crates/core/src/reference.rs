//! Closed-form oracles: the rectangular barrier and the modulated exponential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{AmplitudeSource, ScatteringAmplitudes};
use crate::error::{Result, ScatterError};
use crate::numerics::{Complex2x2, I};

/// `sin(w)/w`, with its series near the removable singularity.
pub(crate) fn sinc(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        let w2 = w * w;
        1.0 - w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sin() / w
    }
}

/// Barrier of height `𝔷` on `[0, L]` probed at wavenumber `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierClosedForm {
    pub height: Complex64,
    pub k: f64,
    pub length: f64,
}

impl BarrierClosedForm {
    pub fn new(height: Complex64, k: f64, length: f64) -> Self {
        Self { height, k, length }
    }

    /// `𝔫² = 1 - 𝔷/k²`.
    pub fn index_squared(&self) -> Complex64 {
        1.0 - self.height / (self.k * self.k)
    }

    /// Principal branch of `𝔫`.
    pub fn index(&self) -> Complex64 {
        self.index_squared().sqrt()
    }

    /// Transfer matrix of the full barrier.
    pub fn transfer(&self) -> Complex2x2 {
        barrier_transfer(self.k * self.length, self)
    }
}

fn barrier_entries(alpha: f64, n: Complex64, n2: Complex64) -> Complex2x2 {
    // sin(𝔫α)/𝔫 and cos(𝔫α) are even in 𝔫, so either branch of the root works.
    let s = sinc(n * alpha) * alpha;
    let cos = (n * alpha).cos();
    let phase = Complex64::from_polar(1.0, -alpha);
    let half_sum = (n2 + 1.0) / 2.0;
    let half_diff = (n2 - 1.0) / 2.0;
    Complex2x2::new(
        (cos + I * half_sum * s) * phase,
        I * half_diff * s * phase,
        -I * half_diff * s * phase.conj(),
        (cos - I * half_sum * s) * phase.conj(),
    )
}

/// `M(α)` for the barrier: identity for `α < 0`, frozen at `M(kL)` beyond `kL`.
pub fn barrier_transfer(alpha: f64, params: &BarrierClosedForm) -> Complex2x2 {
    if alpha < 0.0 {
        return Complex2x2::identity();
    }
    let alpha = alpha.min(params.k * params.length);
    barrier_entries(alpha, params.index(), params.index_squared())
}

/// Same as [`barrier_transfer`] but with an explicit choice of the root `𝔫`.
pub fn barrier_transfer_with_index(alpha: f64, params: &BarrierClosedForm, n: Complex64) -> Complex2x2 {
    if alpha < 0.0 {
        return Complex2x2::identity();
    }
    let alpha = alpha.min(params.k * params.length);
    barrier_entries(alpha, n, n * n)
}

/// Central-difference residual `‖(ΔM/Δα) M⁻¹ + i H(α)‖∞` on the closed form.
pub fn barrier_hamiltonian_check(params: &BarrierClosedForm, alpha: f64, h: f64) -> Result<f64> {
    let kl = params.k * params.length;
    if !(alpha - h > 0.0 && alpha + h < kl) {
        return Err(ScatterError::InvalidInput(format!("alpha ± h must lie inside (0, {kl})")));
    }
    let plus = barrier_transfer(alpha + h, params);
    let minus = barrier_transfer(alpha - h, params);
    let deriv = (plus - minus).scale(Complex64::new(0.5 / h, 0.0));
    let inv = barrier_transfer(alpha, params)
        .inverse()
        .ok_or_else(|| ScatterError::InvalidInput("singular closed-form matrix".into()))?;
    let s = params.height / (2.0 * params.k * params.k);
    let e = Complex64::from_polar(1.0, -2.0 * alpha);
    let ham = Complex2x2::new(s, s * e, -s * e.conj(), -s);
    Ok((deriv * inv + ham.scale(I)).max_norm())
}

/// `v = 𝔷 e^{-4ik₀x}` on `[0, L]`, probed at `k = k₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpPotentialClosedForm {
    pub height: Complex64,
    pub k0: f64,
    pub length: f64,
}

impl ExpPotentialClosedForm {
    pub fn new(height: Complex64, k0: f64, length: f64) -> Self {
        Self { height, k0, length }
    }

    /// `𝔞 = √𝔷 / 2k₀`.
    pub fn a(&self) -> Complex64 {
        self.height.sqrt() / (2.0 * self.k0)
    }

    /// `𝔟 = 𝔞(1 - e^{-2ik₀L})`.
    pub fn b(&self) -> Complex64 {
        self.a() * self.one_minus_z_plus()
    }

    fn one_minus_z_plus(&self) -> Complex64 {
        1.0 - Complex64::from_polar(1.0, -2.0 * self.k0 * self.length)
    }
}

/// Amplitudes of the modulated exponential at `k = k₀`.
///
/// Written in terms of `cos 𝔟`, `sin 𝔟 / 𝔞` and `𝔞 sin 𝔟`, which are even in
/// `𝔞` and regular as `𝔟 → 0`.
pub fn exp_potential_amplitudes(params: &ExpPotentialClosedForm) -> Result<ScatteringAmplitudes> {
    let u = params.one_minus_z_plus();
    let a = params.a();
    let a2 = params.height / (4.0 * params.k0 * params.k0);
    let b = a * u;
    let sinc_b = sinc(b);
    let sin_over_a = u * sinc_b;
    let a_sin = a2 * u * sinc_b;
    let cos_b = b.cos();
    let denom = cos_b + a_sin;
    if denom.norm() < 1e-14 {
        return Err(ScatterError::PoleEncountered(format!("cos 𝔟 + 𝔞 sin 𝔟 = {denom}")));
    }
    let t = 1.0 / denom;
    let r_left = -a_sin / denom;
    let r_right = (cos_b - sin_over_a) / denom - 1.0 + u;
    Ok(ScatteringAmplitudes::new(params.k0, r_left, r_right, t, AmplitudeSource::ClosedForm))
}

/// Amplitudes read off the barrier's closed-form transfer matrix.
pub fn barrier_amplitudes(params: &BarrierClosedForm) -> Result<ScatteringAmplitudes> {
    let m = params.transfer();
    if m.m22.norm() < 1e-300 {
        return Err(ScatterError::PoleEncountered("barrier M22 = 0".into()));
    }
    Ok(ScatteringAmplitudes::new(params.k, -m.m21 / m.m22, m.m12 / m.m22, 1.0 / m.m22, AmplitudeSource::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_before_barrier() {
        let p = BarrierClosedForm::new(cz(2.0, 1.0), 1.0, 3.0);
        assert_eq!(barrier_transfer(-0.1, &p), Complex2x2::identity());
        assert!((barrier_transfer(0.0, &p) - Complex2x2::identity()).max_norm() < 1e-15);
    }

    #[test]
    fn quarter_wave_hand_case() {
        let k = 1.0;
        let p = BarrierClosedForm::new(cz(-3.0, 0.0), k, FRAC_PI_2);
        let m = p.transfer();
        let expected = Complex2x2::new(cz(0.0, 1.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, -1.0));
        assert!((m - expected).max_norm() < 1e-15, "{m}");
    }

    #[test]
    fn determinant_is_one_and_branch_independent() {
        let mut seed = 0x9e37_79b9_u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let p = BarrierClosedForm::new(cz(10.0 * next() - 5.0, 10.0 * next() - 5.0), 0.2 + 2.0 * next(), 3.0);
            let alpha = 3.0 * next() * p.k;
            let m = barrier_transfer(alpha, &p);
            assert!((m.det() - 1.0).norm() < 1e-12 * (1.0 + m.max_norm().powi(2)));
            let flipped = barrier_transfer_with_index(alpha, &p, -p.index());
            assert!((m - flipped).max_norm() <= 1e-15 * (1.0 + m.max_norm()));
        }
    }

    #[test]
    fn vanishing_height_limit() {
        let k = 1.3;
        let p = BarrierClosedForm::new(cz(1e-12 * k * k, 0.0), k, 2.0);
        assert!((p.transfer() - Complex2x2::identity()).max_norm() < 1e-11);
    }

    #[test]
    fn index_zero_is_removable() {
        // 𝔷 = k² gives 𝔫 = 0.
        let k = 1.0;
        let exact = BarrierClosedForm::new(cz(1.0, 0.0), k, 1.0).transfer();
        let near = BarrierClosedForm::new(cz(1.0 + 1e-9, 0.0), k, 1.0).transfer();
        assert!(exact.is_finite());
        assert!((exact - near).max_norm() < 1e-8);
        // 𝔫 → 0: cos → 1, sin(𝔫α)/𝔫 → α.
        let alpha = k;
        let m11 = (1.0 + I * 0.5 * alpha) * Complex64::from_polar(1.0, -alpha);
        assert!((exact.m11 - m11).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_check_is_second_order() {
        for z in [cz(2.0, 0.0), cz(1.5, -0.8)] {
            let p = BarrierClosedForm::new(z, 1.0, 3.0);
            let r1 = barrier_hamiltonian_check(&p, 1.0, 1e-4).unwrap();
            let r2 = barrier_hamiltonian_check(&p, 1.0, 2e-4).unwrap();
            assert!(r1 <= 1e-6, "{r1:e}");
            let ratio = r2 / r1;
            assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn exponential_free_limit_at_integer_half_turns() {
        // k₀L = π makes 𝔟 = 0.
        let amps = exp_potential_amplitudes(&ExpPotentialClosedForm::new(cz(0.3, 0.2), 1.0, PI)).unwrap();
        assert!(amps.r_left.norm() < 1e-15);
        assert!(amps.r_right.norm() < 1e-15);
        assert!((amps.t - 1.0).norm() < 1e-15);
    }

    #[test]
    fn exponential_period_pi_in_k0l() {
        let k0 = 1.4;
        let base = ExpPotentialClosedForm::new(cz(0.5, -0.1), k0, 0.7);
        let shifted = ExpPotentialClosedForm { length: base.length + PI / k0, ..base };
        let a = exp_potential_amplitudes(&base).unwrap();
        let b = exp_potential_amplitudes(&shifted).unwrap();
        assert!(a.max_deviation(&b) < 1e-12);
    }

    #[test]
    fn exponential_matches_tan_cot_form_away_from_limits() {
        // Direct transcription with tan and cot.
        let p = ExpPotentialClosedForm::new(cz(0.04, 0.0), 1.0, PI / 3.0);
        let (a, b) = (p.a(), p.b());
        let rr = 1.0 / (1.0 + a * b.tan()) - 1.0 / (a * (a + 1.0 / b.tan())) + b / a - 1.0;
        let rl = -a / (1.0 / b.tan() + a);
        let t = 1.0 / (b.cos() + a * b.sin());
        let amps = exp_potential_amplitudes(&p).unwrap();
        assert!((amps.r_right - rr).norm() < 1e-13);
        assert!((amps.r_left - rl).norm() < 1e-13);
        assert!((amps.t - t).norm() < 1e-13);
    }
}
