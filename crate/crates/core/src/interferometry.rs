//! Spin-path interferometry with rf flippers in the rotating frame.
//!
//! One interferometer arm carries an rf spin flipper whose field phase φ
//! imprints a geometric phase γ = φ_I − φ₀ on the flipped spinor: the flip
//! down along one meridian and back up along another encloses a lune of solid
//! angle Ω = −2(φ_I − φ₀), and γ = −Ω/2. The recombined beam is a path-spin
//! entangled state whose O-beam interferogram shifts by ±γ depending on the
//! incident polarization.
//!
//! The rf interaction is the rotating-frame flip unitary parameterized by the
//! classical field phase; photon-exchange energy appears only through the
//! e^{iωt} bookkeeping factor on the flipped component. A second flipper at
//! half frequency downstream makes that factor stationary, which
//! [`time_dependence_residual`] verifies.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

use crate::fit::{fit_cosine, linear_fit, unwrap_angles, FitError};
use crate::linalg::Mat2;
use crate::spin::{wrap_angle, SpinError, Unitary2};

/// Reduced Planck constant (J·s, CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;

/// Neutron magnetic moment (J/T, CODATA 2018); negative: the moment is
/// antiparallel to the spin.
pub const NEUTRON_MAGNETIC_MOMENT: f64 = -9.6623651e-27;

#[derive(Debug, Error)]
pub enum InterferometryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Operating parameters of an rf spin flipper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfFlipperConfig {
    /// Static guide field B₀ (tesla).
    pub b0: f64,
    /// Time the neutron is exposed to the rf field (seconds).
    pub tau: f64,
    /// Phase of the oscillating field (radians).
    pub phi: f64,
    /// Magnetic moment of the particle (J/T).
    pub mu: f64,
}

impl RfFlipperConfig {
    /// Flipper acting on neutrons, using the physical moment.
    pub fn neutron(b0: f64, tau: f64, phi: f64) -> Self {
        Self { b0, tau, phi, mu: NEUTRON_MAGNETIC_MOMENT }
    }
}

/// Amplitude and frequency satisfying the flipper resonance condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Oscillating field amplitude (tesla).
    pub b_rf: f64,
    /// Angular frequency (rad/s), including the Bloch-Siegert correction.
    pub omega: f64,
}

impl Resonance {
    /// Frequency in hertz.
    pub fn frequency(&self) -> f64 {
        self.omega / (2.0 * PI)
    }
}

/// Resonance condition for a π flip during exposure time τ in guide field B₀:
/// b_rf = πħ/(τ|μ|) and ω = (2|μ|B₀/ħ)·(1 + b_rf²/(16B₀²)), the second factor
/// being the Bloch-Siegert shift of the linearly oscillating field.
pub fn resonance(cfg: &RfFlipperConfig) -> Result<Resonance, InterferometryError> {
    if cfg.b0 <= 0.0 || !cfg.b0.is_finite() {
        return Err(InterferometryError::InvalidParameter(format!(
            "static field b0 = {} must be positive",
            cfg.b0
        )));
    }
    if cfg.tau <= 0.0 || !cfg.tau.is_finite() {
        return Err(InterferometryError::InvalidParameter(format!(
            "exposure time tau = {} must be positive",
            cfg.tau
        )));
    }
    if cfg.mu == 0.0 || !cfg.mu.is_finite() {
        return Err(InterferometryError::InvalidParameter(format!(
            "magnetic moment mu = {} must be nonzero",
            cfg.mu
        )));
    }
    let mu = cfg.mu.abs();
    let b_rf = PI * HBAR / (cfg.tau * mu);
    let larmor = 2.0 * mu * cfg.b0 / HBAR;
    let bloch_siegert = 1.0 + b_rf * b_rf / (16.0 * cfg.b0 * cfg.b0);
    Ok(Resonance { b_rf, omega: larmor * bloch_siegert })
}

/// Rotating-frame π-flip unitary of an rf flipper with field phase `phi`:
/// |⇑⟩ ↦ e^{iφ}|⇓⟩ and |⇓⟩ ↦ e^{−iφ}|⇑⟩, with no extra global phase.
pub fn rf_flip(phi: f64) -> Unitary2 {
    Unitary2::from_exact(Mat2::new(
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, -phi),
        Complex64::from_polar(1.0, phi),
        Complex64::new(0.0, 0.0),
    ))
}

/// Geometric phase γ = φ_I − φ₀ (wrapped into (−π, π]) acquired between a flip
/// at field phase φ₀ and one at φ_I.
///
/// The pair traces a closed lune on the Bloch sphere bounded by the meridians
/// at azimuths φ₀ and φ_I, and γ equals −Ω/2 of that lune. At the operator
/// level the composition rf_flip(φ_I)·rf_flip(φ₀)† is diagonal and γ is the
/// phase of its ⇓⇓ entry (the ⇑⇑ entry carries −γ).
pub fn geometric_phase_of_flip_pair(phi_i: f64, phi_0: f64) -> f64 {
    wrap_angle(phi_i - phi_0)
}

/// Incident beam polarization along ±z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Up,
    Down,
}

impl Polarization {
    /// Sign s of the fringe shift s·γ this polarization produces.
    pub fn sign(&self) -> f64 {
        match self {
            Polarization::Up => 1.0,
            Polarization::Down => -1.0,
        }
    }
}

/// Joint path-spin state over the basis {|I⇑⟩, |I⇓⟩, |II⇑⟩, |II⇓⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinPathState {
    amps: [Complex64; 4],
}

impl SpinPathState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self, InterferometryError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(InterferometryError::InvalidParameter(format!(
                "state norm {norm} differs from 1 beyond 1e-12"
            )));
        }
        Ok(Self { amps })
    }

    pub fn amps(&self) -> [Complex64; 4] {
        self.amps
    }

    /// Reduced path density matrix (spin traced out), basis {|I⟩, |II⟩}.
    pub fn reduced_path(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for p in 0..2 {
            for q in 0..2 {
                for s in 0..2 {
                    m.m[p][q] += self.amps[2 * p + s] * self.amps[2 * q + s].conj();
                }
            }
        }
        m
    }

    /// Reduced spin density matrix (path traced out), basis {|⇑⟩, |⇓⟩}.
    pub fn reduced_spin(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for s in 0..2 {
            for t in 0..2 {
                for p in 0..2 {
                    m.m[s][t] += self.amps[2 * p + s] * self.amps[2 * p + t].conj();
                }
            }
        }
        m
    }

    /// Expectation ⟨ψ|(P ⊗ S)|ψ⟩ of a product operator, path factor first.
    /// Real part is returned; it is the full value for Hermitian factors.
    pub fn expect_product(&self, path_op: &Mat2, spin_op: &Mat2) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..2 {
            for s in 0..2 {
                for q in 0..2 {
                    for t in 0..2 {
                        acc += self.amps[2 * p + s].conj()
                            * path_op.m[p][q]
                            * spin_op.m[s][t]
                            * self.amps[2 * q + t];
                    }
                }
            }
        }
        acc.re
    }

    /// Apply a spin-only unitary to both path components.
    pub fn apply_spin(&self, u: &Mat2) -> SpinPathState {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for p in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    amps[2 * p + s] += u.m[s][t] * self.amps[2 * p + t];
                }
            }
        }
        SpinPathState { amps }
    }
}

/// Path-spin entangled state (1/√2)(|I⟩|⇑⟩ + e^{iχ}e^{iγ}|II⟩|⇓⟩): χ is the
/// adjustable path phase, γ the spin phase imprinted by the flippers.
pub fn build_entangled_state(chi: f64, gamma: f64) -> SpinPathState {
    let inv = 1.0 / 2.0f64.sqrt();
    SpinPathState {
        amps: [
            Complex64::new(inv, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(inv, chi + gamma),
        ],
    }
}

/// Maximum time variation of the recombined state once the half-frequency
/// flipper has acted.
///
/// The flipped component of the two-path state carries the bookkeeping factor
/// e^{iωt}. Passing both components through a flipper at frequency ω/2 and
/// time offset `separation` (the flight time T between the flipper centers)
/// trades that factor for the constant e^{−iωT}: each component picks up
/// e^{∓i((ω/2)(t+T)+φ)}, leaving the relative phase stationary.
///
/// The state at each grid time is reduced to a fixed gauge (the largest
/// amplitude is made real positive), then the maximum norm distance from the
/// grid average is returned. With the compensating flipper this is a few
/// machine epsilons; [`time_dependence_residual_uncompensated`] shows the
/// order-unity residual without it.
pub fn time_dependence_residual(t_grid: &[f64], omega: f64, separation: f64) -> f64 {
    residual_over_grid(t_grid, omega, separation, true)
}

/// Residual of the same state without the half-frequency flipper; the e^{iωt}
/// factor survives and the state oscillates at ω.
pub fn time_dependence_residual_uncompensated(
    t_grid: &[f64],
    omega: f64,
    separation: f64,
) -> f64 {
    residual_over_grid(t_grid, omega, separation, false)
}

fn residual_over_grid(t_grid: &[f64], omega: f64, separation: f64, compensated: bool) -> f64 {
    if t_grid.is_empty() {
        return 0.0;
    }
    // representative fixed settings; the residual is independent of them
    let (chi, phi_i, phi_ii) = (0.4, 1.1, 0.6);
    let inv = 1.0 / 2.0f64.sqrt();
    let states: Vec<[Complex64; 4]> = t_grid
        .iter()
        .map(|&t| {
            // two-path state with the flipped component carrying e^{iωt}
            let mut amps = [Complex64::new(0.0, 0.0); 4];
            amps[0] = Complex64::new(inv, 0.0);
            amps[3] = Complex64::from_polar(inv, omega * t + chi + phi_i);
            if compensated {
                let theta = 0.5 * omega * (t + separation) + phi_ii;
                let flipped = [
                    amps[1] * Complex64::from_polar(1.0, -theta),
                    amps[0] * Complex64::from_polar(1.0, theta),
                    amps[3] * Complex64::from_polar(1.0, -theta),
                    amps[2] * Complex64::from_polar(1.0, theta),
                ];
                amps = flipped;
            }
            fix_gauge(amps)
        })
        .collect();
    let n = states.len() as f64;
    let mut mean = [Complex64::new(0.0, 0.0); 4];
    for s in &states {
        for k in 0..4 {
            mean[k] += s[k];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    states
        .iter()
        .map(|s| {
            (0..4)
                .map(|k| (s[k] - mean[k]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Rotate away the global phase: the leading amplitude becomes real positive.
/// Near-ties in magnitude resolve to the lowest index so the anchor cannot
/// jump between grid points on rounding noise.
fn fix_gauge(amps: [Complex64; 4]) -> [Complex64; 4] {
    let max_norm = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max_norm < 1e-15 {
        return amps;
    }
    let lead = amps
        .iter()
        .copied()
        .find(|a| a.norm() >= max_norm * (1.0 - 1e-9))
        .expect("max exists");
    let phase = Complex64::from_polar(1.0, -lead.arg());
    amps.map(|a| a * phase)
}

/// Interferogram scan settings.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerScan {
    /// Path phase settings χ (radians); must span a full 2π period for fits.
    pub chi: Vec<f64>,
    /// Field phase of the in-arm flipper.
    pub phi_i: f64,
    /// Field phase of the downstream half-frequency flipper.
    pub phi_ii: f64,
    pub initial_polarization: Polarization,
    /// Spin-turner angle δ before analysis (π/2 in the standard setup).
    pub analysis_delta: f64,
}

impl InterferometerScan {
    pub fn new(chi: Vec<f64>, phi_i: f64, phi_ii: f64, polarization: Polarization) -> Self {
        Self {
            chi,
            phi_i,
            phi_ii,
            initial_polarization: polarization,
            analysis_delta: FRAC_PI_2,
        }
    }

    /// Fringe shift s·(φ_I − φ_II) this scan is built to show.
    pub fn expected_shift(&self) -> f64 {
        wrap_angle(self.initial_polarization.sign() * (self.phi_i - self.phi_ii))
    }
}

/// O-beam intensity at path phase `chi`, evaluated through the explicit
/// 4-dimensional pipeline: build the entangled state with γ = ±(φ_I − φ_II)
/// (sign from the initial polarization), project the path factor onto
/// (|I⟩ + |II⟩)/√2, rotate the spin by the turner angle δ in the x̂,ẑ plane,
/// and project onto |⇑⟩.
///
/// Equals (1/4)(1 + sin δ · cos(χ + s·(φ_I − φ_II))), so δ = π/2 gives the
/// full-contrast interferogram (1/4)(1 + cos(χ ± γ)).
pub fn o_beam_intensity(scan: &InterferometerScan, chi: f64) -> f64 {
    let gamma = scan.initial_polarization.sign() * (scan.phi_i - scan.phi_ii);
    let state = build_entangled_state(chi, gamma);
    let half = Complex64::new(0.5, 0.0);
    let o_projector = Mat2::new(half, half, half, half);
    // turner in the x̂,ẑ plane with the sense that maps ẑ toward x̂ tilting
    // the analyzed direction; applied to the spin before the ⇑ projection
    let (c, s) = ((0.5 * scan.analysis_delta).cos(), (0.5 * scan.analysis_delta).sin());
    let turner = Mat2::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    );
    let up = Mat2::outer([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let analyzed = turner.adjoint().mul(&up).mul(&turner);
    state.expect_product(&o_projector, &analyzed)
}

/// Fitted phase of the O-beam fringe: the Φ in I(χ) ∝ 1 + V·cos(χ + Φ),
/// wrapped into (−π, π]. Equals s·(φ_I − φ_II) for the ideal instrument.
pub fn fringe_phase(scan: &InterferometerScan) -> Result<f64, InterferometryError> {
    require_full_period(&scan.chi)?;
    let ys: Vec<f64> = scan.chi.iter().map(|&chi| o_beam_intensity(scan, chi)).collect();
    let fit = fit_cosine(&scan.chi, &ys, 1.0, None)?;
    Ok(wrap_angle(-fit.phase))
}

/// Fringe phases against a sweep of the in-arm flipper phase φ_I, with the
/// straight line fitted through them.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipperPhaseScan {
    /// (φ_I, unwrapped fringe phase) pairs.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Mean fitted fringe visibility (amplitude over offset).
    pub contrast: f64,
}

/// Sweep φ_I over `phi_i_values`, fit each interferogram, and fit a line to
/// the unwrapped fringe phases. The slope is +1 for incident polarization up
/// and −1 for down.
pub fn flipper_phase_scan(
    scan: &InterferometerScan,
    phi_i_values: &[f64],
) -> Result<FlipperPhaseScan, InterferometryError> {
    if phi_i_values.len() < 2 {
        return Err(InterferometryError::InvalidParameter(format!(
            "flipper phase sweep needs at least 2 settings, got {}",
            phi_i_values.len()
        )));
    }
    require_full_period(&scan.chi)?;
    let mut phases = Vec::with_capacity(phi_i_values.len());
    let mut contrast_sum = 0.0;
    for &phi_i in phi_i_values {
        let step = InterferometerScan { phi_i, ..scan.clone() };
        let ys: Vec<f64> = step.chi.iter().map(|&chi| o_beam_intensity(&step, chi)).collect();
        let fit = fit_cosine(&step.chi, &ys, 1.0, None)?;
        phases.push(wrap_angle(-fit.phase));
        contrast_sum += fit.amplitude / fit.offset;
    }
    let unwrapped = unwrap_angles(&phases);
    let (slope, intercept) = linear_fit(phi_i_values, &unwrapped)?;
    Ok(FlipperPhaseScan {
        points: phi_i_values.iter().copied().zip(unwrapped).collect(),
        slope,
        intercept,
        contrast: contrast_sum / phi_i_values.len() as f64,
    })
}

fn require_full_period(chi: &[f64]) -> Result<(), InterferometryError> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in chi {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    // hi − lo is −∞ for an empty grid, which correctly lands here
    if hi - lo < 2.0 * PI - 1e-9 {
        return Err(InterferometryError::InvalidParameter(format!(
            "chi grid spans {:.6} rad; fitting needs a full 2π period",
            hi - lo
        )));
    }
    Ok(())
}
