//! Spin-polarimetric fringes and mixed-state phase extraction.
//!
//! A beam of purity r′ polarized along +z passes a π/2 spin turner, the
//! evolution U(ξ, δ, ζ), an analyzer rotation of angle η, and a second π/2
//! turner before detection. The detected intensity is
//!
//! ```text
//! I(η) = (1 − r′)/2 + r′·[cos²ξ·cos²δ + sin²ξ·cos²(ζ − η)]
//! ```
//!
//! a fringe with period π in η. Together with a reference exposure I₀ taken
//! with the evolution switched off, the fringe extrema determine the magnitude
//! of the mixed-state phase Φ = arg Tr(ρU) without interferometry.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use thiserror::Error;

use crate::fit::{fit_cosine, CosineFit, FitError};
use crate::linalg::Mat2;
use crate::spin::{mixed_phase_theory, wrap_angle, BlochVector, SpinError, Su2Params};

#[derive(Debug, Error)]
pub enum PolarimetryError {
    #[error("beam purity {0:.3e} is below 1e-12: the mixed-state phase carries no signal")]
    PurityZero(f64),
    #[error("extraction ratio {value:.6e} outside [0, 1] beyond tolerance")]
    OutOfDomain { value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no U(ξ, δ, ζ) realizes the requested phase split: {0}")]
    NoRealization(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Detector-side noise applied when synthesizing a fringe scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Ideal apparatus: only counting statistics.
    None,
    /// Gaussian jitter of the turner rotation angle around π/2, fast compared
    /// to an exposure, with standard deviation `sigma` radians. Its averaged
    /// effect is a purity reduction by exp(−σ²/2).
    AngleJitter { sigma: f64 },
}

/// Scan settings for a synthetic polarimeter run.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarimeterConfig {
    pub params: Su2Params,
    pub purity: f64,
    pub eta: Vec<f64>,
    pub counts_per_point: f64,
    pub seed: u64,
    /// Skip count sampling and return exact model means.
    pub analytic: bool,
}

/// Ideal fringe intensity for a pure beam, normalized to unit incident flux.
pub fn pure_intensity(params: Su2Params, eta: f64) -> f64 {
    let (cx, sx) = (params.xi().cos(), params.xi().sin());
    let cd = params.delta().cos();
    let ca = (params.zeta() - eta).cos();
    cx * cx * cd * cd + sx * sx * ca * ca
}

/// Fringe intensity for a beam of purity `purity` polarized along +z.
pub fn mixed_intensity(params: Su2Params, purity: f64, eta: f64) -> f64 {
    0.5 * (1.0 - purity) + purity * pure_intensity(params, eta)
}

/// Measured fringe landmarks, in detector count units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeStats {
    pub i_max: f64,
    pub i_min: f64,
    pub i_zero: f64,
    pub var_i_max: f64,
    pub var_i_min: f64,
    pub var_i_zero: f64,
}

/// Phase magnitude with its propagated standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub phase: f64,
    pub sigma: f64,
}

/// Recover |Φ| ∈ [0, π/2] of the mixed-state phase from fringe extrema and a
/// reference exposure `i_zero` (evolution off), all in common count units.
///
/// Writing I_n = 2·i_zero/(1 + r′) for the incident-flux normalization,
///
/// ```text
/// A = (i_min/I_n − (1 − r′)/2) / r′      (= cos²ξ·cos²δ)
/// B = r′·((1 + r′)/2 − i_max/I_n)        (= r′²·cos²ξ·sin²δ)
/// Φ = arccos √(A / (A + B))
/// ```
///
/// The ratio is clamped into [0, 1] when it strays by at most 1e-9 from
/// rounding; larger excursions indicate inconsistent inputs and fail. The
/// branch sign of Φ is not observable in the extrema alone, so the principal
/// value is returned.
pub fn extract_phase(
    i_max: f64,
    i_min: f64,
    i_zero: f64,
    purity: f64,
) -> Result<f64, PolarimetryError> {
    let (a, b) = extraction_terms(i_max, i_min, i_zero, purity)?;
    let ratio = a / (a + b);
    Ok(clamped_ratio(ratio)?.sqrt().acos())
}

fn extraction_terms(
    i_max: f64,
    i_min: f64,
    i_zero: f64,
    purity: f64,
) -> Result<(f64, f64), PolarimetryError> {
    if purity < 1e-12 {
        return Err(PolarimetryError::PurityZero(purity));
    }
    if purity > 1.0 + 1e-12 {
        return Err(PolarimetryError::InvalidInput(format!(
            "purity {purity} exceeds 1"
        )));
    }
    if i_zero <= 0.0 {
        return Err(PolarimetryError::InvalidInput(format!(
            "reference intensity {i_zero} must be positive"
        )));
    }
    let i_norm = 2.0 * i_zero / (1.0 + purity);
    let a = (i_min / i_norm - 0.5 * (1.0 - purity)) / purity;
    let b = purity * (0.5 * (1.0 + purity) - i_max / i_norm);
    if !(a + b).is_finite() || a + b <= 0.0 {
        return Err(PolarimetryError::OutOfDomain { value: a + b });
    }
    Ok((a, b))
}

fn clamped_ratio(ratio: f64) -> Result<f64, PolarimetryError> {
    if !ratio.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&ratio) {
        return Err(PolarimetryError::OutOfDomain { value: ratio });
    }
    Ok(ratio.clamp(0.0, 1.0))
}

/// A synthesized fringe scan with its fitted description.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub eta: Vec<f64>,
    pub counts: Vec<f64>,
    /// Exact model means the counts were drawn from.
    pub model: Vec<f64>,
    pub fit: CosineFit,
    /// Reference exposure (evolution off), same units as `counts`.
    pub i_zero: f64,
    pub i_zero_mean: f64,
    /// Beam purity after noise averaging; this is what extraction should use.
    pub effective_purity: f64,
}

impl FringeScan {
    /// Fringe landmarks from the fitted model and the reference exposure.
    pub fn stats(&self) -> FringeStats {
        let f = &self.fit;
        let g_bc = if f.amplitude > 0.0 { f.bc / f.amplitude } else { 0.0 };
        let g_bs = if f.amplitude > 0.0 { f.bs / f.amplitude } else { 0.0 };
        let var_amp = g_bc * g_bc * f.cov[1][1]
            + 2.0 * g_bc * g_bs * f.cov[1][2]
            + g_bs * g_bs * f.cov[2][2];
        let cov_offset_amp = g_bc * f.cov[0][1] + g_bs * f.cov[0][2];
        FringeStats {
            i_max: f.offset + f.amplitude,
            i_min: f.offset - f.amplitude,
            i_zero: self.i_zero,
            var_i_max: (f.cov[0][0] + var_amp + 2.0 * cov_offset_amp).max(0.0),
            var_i_min: (f.cov[0][0] + var_amp - 2.0 * cov_offset_amp).max(0.0),
            var_i_zero: self.i_zero.max(1.0),
        }
    }

    /// Extract |Φ| from the fitted fringe with its propagated 1σ uncertainty.
    pub fn phase_estimate(&self) -> Result<PhaseEstimate, PolarimetryError> {
        let s = self.stats();
        let r = self.effective_purity;
        let (a, b) = extraction_terms(s.i_max, s.i_min, s.i_zero, r)?;
        let ratio = clamped_ratio(a / (a + b))?;
        let phase = ratio.sqrt().acos();

        // linear propagation through Φ(ratio(A, B)(i_max, i_min, i_zero))
        let i_norm = 2.0 * s.i_zero / (1.0 + r);
        let sum = a + b;
        let d_ratio_da = b / (sum * sum);
        let d_ratio_db = -a / (sum * sum);
        let da_dmin = 1.0 / (r * i_norm);
        let db_dmax = -r / i_norm;
        // i_norm scales with i_zero, so both normalized extrema shift together
        let da_dzero = -(s.i_min / i_norm) / (r * s.i_zero);
        let db_dzero = r * (s.i_max / i_norm) / s.i_zero;
        let d_ratio_dmax = d_ratio_db * db_dmax;
        let d_ratio_dmin = d_ratio_da * da_dmin;
        let d_ratio_dzero = d_ratio_da * da_dzero + d_ratio_db * db_dzero;
        let denom = (ratio * (1.0 - ratio)).sqrt();
        let d_phase_dratio = if denom > 0.0 { -0.5 / denom } else { f64::INFINITY };
        let var_ratio = d_ratio_dmax * d_ratio_dmax * s.var_i_max
            + d_ratio_dmin * d_ratio_dmin * s.var_i_min
            + d_ratio_dzero * d_ratio_dzero * s.var_i_zero;
        Ok(PhaseEstimate {
            phase,
            sigma: d_phase_dratio.abs() * var_ratio.max(0.0).sqrt(),
        })
    }
}

/// Synthesize a polarimeter fringe scan and fit it at the fringe harmonic.
///
/// Counts at each analyzer setting are Poisson draws around the model means
/// (or the exact means in analytic mode), fitted by weighted least squares
/// with inverse-variance weights taken from a first-pass fit, so the reported
/// covariance reflects counting statistics.
pub fn simulate_fringe_scan(
    config: &PolarimeterConfig,
    noise: NoiseModel,
) -> Result<FringeScan, PolarimetryError> {
    if !(0.0..=1.0 + 1e-12).contains(&config.purity) {
        return Err(PolarimetryError::InvalidInput(format!(
            "purity {} outside [0, 1]",
            config.purity
        )));
    }
    if config.counts_per_point <= 0.0 || !config.counts_per_point.is_finite() {
        return Err(PolarimetryError::InvalidInput(format!(
            "counts_per_point {} must be positive",
            config.counts_per_point
        )));
    }
    if config.eta.len() < 4 {
        return Err(PolarimetryError::InvalidInput(format!(
            "eta grid needs at least 4 points, got {}",
            config.eta.len()
        )));
    }
    let effective_purity = match noise {
        NoiseModel::None => config.purity,
        NoiseModel::AngleJitter { sigma } => {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(PolarimetryError::InvalidInput(format!(
                    "jitter sigma {sigma} must be a nonnegative number"
                )));
            }
            config.purity * (-0.5 * sigma * sigma).exp()
        }
    };

    let model: Vec<f64> = config
        .eta
        .iter()
        .map(|&eta| config.counts_per_point * mixed_intensity(config.params, effective_purity, eta))
        .collect();
    let i_zero_mean = config.counts_per_point * 0.5 * (1.0 + effective_purity);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draw = |mean: f64| -> Result<f64, PolarimetryError> {
        if config.analytic {
            return Ok(mean);
        }
        if mean <= 0.0 {
            return Ok(0.0);
        }
        let dist = Poisson::new(mean)
            .map_err(|e| PolarimetryError::InvalidInput(format!("poisson mean {mean}: {e}")))?;
        Ok(dist.sample(&mut rng))
    };
    let mut counts = Vec::with_capacity(model.len());
    for &mean in &model {
        counts.push(draw(mean)?);
    }
    let i_zero = draw(i_zero_mean)?;

    // two-pass fit: the first pass supplies Poisson variances for the second
    let first = fit_cosine(&config.eta, &counts, 2.0, None)?;
    let weights: Vec<f64> = config
        .eta
        .iter()
        .map(|&x| 1.0 / first.predict(x).max(1.0))
        .collect();
    let fit = fit_cosine(&config.eta, &counts, 2.0, Some(&weights))?;

    Ok(FringeScan {
        eta: config.eta.clone(),
        counts,
        model,
        fit,
        i_zero,
        i_zero_mean,
        effective_purity,
    })
}

/// Monte-Carlo action of a spin turner with angle jitter: applies the spin
/// rotation exp(−i(π/2 + ε)σ_x/2) with ε drawn from N(0, σ²) and averages the
/// resulting density matrices over `draws` realizations.
///
/// In closed form the channel maps r·ẑ to (0, −r·e^{−σ²/2}, 0): a purity loss
/// by exp(−σ²/2) on top of the ideal π/2 turn.
pub fn depolarize(bloch: &BlochVector, sigma: f64, draws: u32, seed: u64) -> BlochVector {
    let rho = bloch.density();
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite nonnegative sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Mat2::zero();
    for _ in 0..draws.max(1) {
        let theta = std::f64::consts::FRAC_PI_2 + normal.sample(&mut rng);
        let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let u = Mat2::new(
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        );
        acc = acc.add(&u.mul(&rho).mul(&u.adjoint()));
    }
    let avg = acc.scale(Complex64::new(1.0 / draws.max(1) as f64, 0.0));
    BlochVector {
        rx: 2.0 * avg.m[0][1].re,
        ry: -2.0 * avg.m[0][1].im,
        rz: avg.m[0][0].re - avg.m[1][1].re,
    }
}

/// Mixed-state phases of a geometric-only, a dynamical-only, and a combined
/// evolution, demonstrating that mixed-state phases do not add.
#[derive(Debug, Clone, PartialEq)]
pub struct NonAdditivityReport {
    pub purity: f64,
    pub phi_g: f64,
    pub phi_d: f64,
    /// Φ(r′, φ_g): mixed phase of the purely geometric evolution.
    pub mixed_geometric: f64,
    /// Φ(r′, φ_d): mixed phase of the purely dynamical evolution.
    pub mixed_dynamical: f64,
    /// Φ(r′, φ_g + φ_d): mixed phase of the combined evolution.
    pub mixed_total: f64,
    pub additive_sum: f64,
    /// Concrete U(ξ, δ, ζ) parameter sets realizing the three evolutions.
    pub realizations: [Su2Params; 3],
}

impl NonAdditivityReport {
    /// Non-additivity gap Φ_tot − (Φ_g + Φ_d); zero only for pure beams or
    /// vanishing component phases.
    pub fn gap(&self) -> f64 {
        self.mixed_total - self.additive_sum
    }
}

/// Find unitary realizations for a geometric-only phase φ_g, a dynamical-only
/// phase φ_d, and their combination, and evaluate the mixed-state phase of
/// each at beam purity r′.
///
/// A geometric-only evolution takes ξ = π/4 (equatorial loop, dynamical part
/// vanishes); a dynamical-only one takes ξ = 0. The combined evolution needs
/// δ = φ_g + φ_d and cos 2ξ = φ_d/δ, which is only solvable when the target
/// phases and their sum lie in (−π, π] and the ratio in (−1, 1].
pub fn non_additivity_report(
    purity: f64,
    phi_g: f64,
    phi_d: f64,
) -> Result<NonAdditivityReport, PolarimetryError> {
    if !(0.0..=1.0 + 1e-12).contains(&purity) {
        return Err(PolarimetryError::InvalidInput(format!(
            "purity {purity} outside [0, 1]"
        )));
    }
    for (name, v) in [("phi_g", phi_g), ("phi_d", phi_d), ("phi_g + phi_d", phi_g + phi_d)] {
        if (wrap_angle(v) - v).abs() > 1e-12 {
            return Err(PolarimetryError::NoRealization(format!(
                "{name} = {v} lies outside (−π, π], where total phases live"
            )));
        }
    }
    let delta = phi_g + phi_d;
    let combined = if delta == 0.0 {
        if phi_g != 0.0 {
            // φ_g = −φ_d ≠ 0: total phase 0 forces δ = 0, which has no
            // geometric content
            return Err(PolarimetryError::NoRealization(format!(
                "phi_g = {phi_g} with phi_g + phi_d = 0 requires δ = 0, \
                 which realizes only the trivial split"
            )));
        }
        Su2Params::identity()
    } else {
        let ratio = phi_d / delta;
        if !(-1.0..=1.0).contains(&ratio) {
            return Err(PolarimetryError::NoRealization(format!(
                "cos 2ξ = φ_d/δ = {ratio:.6} falls outside [−1, 1]"
            )));
        }
        if ratio == -1.0 {
            return Err(PolarimetryError::NoRealization(
                "cos 2ξ = −1 puts ξ at π/2, where the return amplitude and the \
                 phase vanish"
                    .to_string(),
            ));
        }
        Su2Params::new(0.5 * ratio.acos(), delta, 0.0)
    };
    let realizations = [
        Su2Params::new(std::f64::consts::FRAC_PI_4, phi_g, 0.0),
        Su2Params::new(0.0, phi_d, 0.0),
        combined,
    ];
    let mixed_geometric = mixed_phase_theory(purity, phi_g)?;
    let mixed_dynamical = mixed_phase_theory(purity, phi_d)?;
    let mixed_total = mixed_phase_theory(purity, delta)?;
    Ok(NonAdditivityReport {
        purity,
        phi_g,
        phi_d,
        mixed_geometric,
        mixed_dynamical,
        mixed_total,
        additive_sum: mixed_geometric + mixed_dynamical,
        realizations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{decompose_phase, mixed_phase_general, su2_from_params, total_phase};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn ideal_stats(params: Su2Params, purity: f64) -> (f64, f64, f64) {
        let i_min = mixed_intensity(params, purity, params.zeta() + FRAC_PI_2);
        let i_max = mixed_intensity(params, purity, params.zeta());
        let i_zero = 0.5 * (1.0 + purity);
        (i_max, i_min, i_zero)
    }

    #[test]
    fn intensity_extrema_sit_at_analyzer_alignment() {
        let p = Su2Params::new(0.6, 0.9, 1.3);
        let on_peak = pure_intensity(p, 1.3);
        for &eta in &[0.0, 0.4, 2.2, -1.0] {
            assert!(pure_intensity(p, eta) <= on_peak + 1e-15);
        }
    }

    #[test]
    fn extract_phase_recovers_mixed_phase() {
        let cases = [
            (0.5, FRAC_PI_4, FRAC_PI_4),
            (1.0, 0.3, 0.7),
            (0.25, 1.1, 1.2),
            (0.8, 0.2, 0.05),
        ];
        for &(purity, xi, delta) in &cases {
            let p = Su2Params::new(xi, delta, 0.4);
            let (i_max, i_min, i_zero) = ideal_stats(p, purity);
            let got = extract_phase(i_max, i_min, i_zero, purity).unwrap();
            let want = mixed_phase_theory(purity, delta).unwrap().abs();
            assert!(
                (got - want).abs() < 1e-12,
                "r = {purity}, ξ = {xi}, δ = {delta}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn extract_phase_worked_example() {
        // r′ = 1/2, ξ = δ = π/4: extrema 5/8 and 3/8, reference 3/4,
        // Φ = arctan(1/2)
        let got = extract_phase(0.625, 0.375, 0.75, 0.5).unwrap();
        assert!((got - 0.5f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn extract_phase_degenerate_minimum_gives_right_angle() {
        // ξ = π/4, δ = π/2, r′ = 1/2: i_min sits at the fully mixed floor, so
        // A = 0 and the evolution carries a quarter-turn phase
        let got = extract_phase(0.5, 0.25, 0.75, 0.5).unwrap();
        assert!((got - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn extract_phase_rejects_bad_inputs() {
        assert!(matches!(
            extract_phase(0.6, 0.4, 0.7, 1e-13),
            Err(PolarimetryError::PurityZero(_))
        ));
        // i_min far below the mixed floor: ratio < 0 beyond tolerance
        assert!(matches!(
            extract_phase(0.875, 0.1, 0.75, 0.5),
            Err(PolarimetryError::OutOfDomain { .. })
        ));
        assert!(matches!(
            extract_phase(0.6, 0.4, 0.0, 0.5),
            Err(PolarimetryError::InvalidInput(_))
        ));
    }

    #[test]
    fn analytic_scan_reproduces_theory_phase() {
        let config = PolarimeterConfig {
            params: Su2Params::new(0.7, 0.6, 1.0),
            purity: 0.8,
            eta: (0..24).map(|k| PI * k as f64 / 24.0).collect(),
            counts_per_point: 5000.0,
            seed: 7,
            analytic: true,
        };
        let scan = simulate_fringe_scan(&config, NoiseModel::None).unwrap();
        let est = scan.phase_estimate().unwrap();
        let want = mixed_phase_theory(0.8, 0.6).unwrap();
        assert!((est.phase - want).abs() < 1e-9);
        // fitted fringe phase locks to 2ζ
        assert!((wrap_angle(scan.fit.phase - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn sampled_scan_is_close_and_deterministic() {
        let config = PolarimeterConfig {
            params: Su2Params::new(0.7, 0.6, 0.2),
            purity: 0.8,
            eta: (0..32).map(|k| PI * k as f64 / 32.0).collect(),
            counts_per_point: 20000.0,
            seed: 42,
            analytic: false,
        };
        let a = simulate_fringe_scan(&config, NoiseModel::None).unwrap();
        let b = simulate_fringe_scan(&config, NoiseModel::None).unwrap();
        assert_eq!(a.counts, b.counts);
        let est = a.phase_estimate().unwrap();
        let want = mixed_phase_theory(0.8, 0.6).unwrap();
        assert!((est.phase - want).abs() < 5.0 * est.sigma.max(1e-6));
    }

    #[test]
    fn jitter_reduces_effective_purity() {
        let config = PolarimeterConfig {
            params: Su2Params::new(0.7, 0.6, 0.2),
            purity: 0.9,
            eta: (0..16).map(|k| PI * k as f64 / 16.0).collect(),
            counts_per_point: 1000.0,
            seed: 1,
            analytic: true,
        };
        let scan = simulate_fringe_scan(&config, NoiseModel::AngleJitter { sigma: 0.3 }).unwrap();
        let want = 0.9 * (-0.5f64 * 0.09).exp();
        assert!((scan.effective_purity - want).abs() < 1e-15);
        let est = scan.phase_estimate().unwrap();
        let theory = mixed_phase_theory(want, 0.6).unwrap();
        assert!((est.phase - theory).abs() < 1e-9);
    }

    #[test]
    fn depolarize_matches_closed_form() {
        let bloch = BlochVector::new(0.0, 0.0, 0.85).unwrap();
        let sigma = 0.4;
        let out = depolarize(&bloch, sigma, 200_000, 11);
        let want_ry = -0.85 * (-0.5f64 * sigma * sigma).exp();
        // MC error on ⟨cos ε⟩ is ~σ/√N and on ⟨sin ε⟩ ~σ/√N
        let tol = 4.0 * 0.85 * sigma / (200_000f64).sqrt();
        assert!((out.ry - want_ry).abs() < tol, "ry = {}, want {}", out.ry, want_ry);
        assert!(out.rx.abs() < 1e-12);
        assert!(out.rz.abs() < tol);
        assert!(out.purity() <= bloch.purity() + 1e-12);
    }

    #[test]
    fn depolarize_zero_sigma_is_exact_quarter_turn() {
        let bloch = BlochVector::new(0.0, 0.0, 0.6).unwrap();
        let out = depolarize(&bloch, 0.0, 10, 3);
        assert!((out.ry + 0.6).abs() < 1e-12);
        assert!(out.rx.abs() < 1e-12);
        assert!(out.rz.abs() < 1e-12);
    }

    #[test]
    fn non_additivity_worked_example() {
        let rep = non_additivity_report(0.5, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!((rep.mixed_total - FRAC_PI_2).abs() < 1e-12);
        assert!((rep.additive_sum - 2.0 * 0.5f64.atan()).abs() < 1e-12);
        assert!((rep.gap() - (FRAC_PI_2 - 2.0 * 0.5f64.atan())).abs() < 1e-12);
        assert!(rep.gap() > 0.64 && rep.gap() < 0.65);
    }

    #[test]
    fn realizations_carry_the_right_phase_split() {
        let rep = non_additivity_report(0.7, 0.5, 0.9).unwrap();
        let d0 = decompose_phase(rep.realizations[0]);
        assert!((d0.geometric - 0.5).abs() < 1e-12 && d0.dynamical.abs() < 1e-12);
        let d1 = decompose_phase(rep.realizations[1]);
        assert!((d1.dynamical - 0.9).abs() < 1e-12 && d1.geometric.abs() < 1e-12);
        let d2 = decompose_phase(rep.realizations[2]);
        assert!((d2.geometric - 0.5).abs() < 1e-12);
        assert!((d2.dynamical - 0.9).abs() < 1e-12);
        // general trace formula agrees with the closed form on each realization
        let rho = BlochVector::new(0.0, 0.0, 0.7).unwrap();
        for (params, want) in rep
            .realizations
            .iter()
            .zip([rep.mixed_geometric, rep.mixed_dynamical, rep.mixed_total])
        {
            let u = su2_from_params(*params);
            let got = mixed_phase_general(&rho, &u).unwrap().phase;
            assert!((got - want).abs() < 1e-12);
            assert!((total_phase(&u).unwrap() - decompose_phase(*params).total).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_beam_phases_are_additive() {
        let rep = non_additivity_report(1.0, 0.4, 0.3).unwrap();
        assert!(rep.gap().abs() < 1e-12);
    }

    #[test]
    fn unrealizable_splits_are_rejected() {
        assert!(matches!(
            non_additivity_report(0.5, 2.0, 2.0),
            Err(PolarimetryError::NoRealization(_))
        ));
        assert!(matches!(
            non_additivity_report(0.5, 0.4, -0.4),
            Err(PolarimetryError::NoRealization(_))
        ));
        // φ_d/δ = −1 would need ξ = π/2 where the phase is invisible
        assert!(matches!(
            non_additivity_report(0.5, 2.0, -1.0),
            Err(PolarimetryError::NoRealization(_))
        ));
        assert!(non_additivity_report(0.5, 0.0, 0.0).is_ok());
    }
}
