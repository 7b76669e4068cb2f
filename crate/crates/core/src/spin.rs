//! SU(2) spinor evolution and Pancharatnam phases for spin-1/2 beams.
//!
//! The central object is the one-parameter family of evolutions
//!
//! ```text
//! U(ξ, δ, ζ) = [ e^{iδ} cos ξ     −e^{−iζ} sin ξ ]
//!              [ e^{iζ} sin ξ      e^{−iδ} cos ξ ]
//! ```
//!
//! in the {|⇑⟩, |⇓⟩} basis. Its total (Pancharatnam) phase on |⇑⟩ is
//! arg⟨⇑|U|⇑⟩ = δ, which splits into a dynamical part δ·cos2ξ and a
//! geometric part δ·(1 − cos2ξ) fixed by the traced Bloch-sphere path.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::linalg::Mat2;

/// Visibility below which a phase argument is numerically meaningless.
pub const VISIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SpinError {
    #[error("state norm {0:.6e} differs from 1 beyond 1e-12")]
    NotNormalized(f64),
    #[error("Bloch vector norm {0:.6e} exceeds 1 beyond 1e-12")]
    BlochTooLong(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("phase undefined: visibility {0:.3e} below 1e-12")]
    UndefinedPhase(f64),
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Absolute distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Pure spinor state a|⇑⟩ + b|⇓⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub amp_up: Complex64,
    pub amp_down: Complex64,
}

impl SpinState {
    pub fn new(amp_up: Complex64, amp_down: Complex64) -> Result<Self, SpinError> {
        let norm = (amp_up.norm_sqr() + amp_down.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SpinError::NotNormalized(norm));
        }
        Ok(Self { amp_up, amp_down })
    }

    pub fn up() -> Self {
        Self { amp_up: Complex64::new(1.0, 0.0), amp_down: Complex64::new(0.0, 0.0) }
    }

    pub fn down() -> Self {
        Self { amp_up: Complex64::new(0.0, 0.0), amp_down: Complex64::new(1.0, 0.0) }
    }

    /// Bloch vector ⟨σ⟩ of the state; always unit length for pure states.
    pub fn bloch(&self) -> BlochVector {
        let (a, b) = (self.amp_up, self.amp_down);
        let cross = a.conj() * b;
        BlochVector {
            rx: 2.0 * cross.re,
            ry: 2.0 * cross.im,
            rz: a.norm_sqr() - b.norm_sqr(),
        }
    }

    pub fn as_vector(&self) -> [Complex64; 2] {
        [self.amp_up, self.amp_down]
    }
}

/// Bloch vector (rx, ry, rz) of a possibly mixed spin state; ‖r‖ is the purity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self, SpinError> {
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(SpinError::BlochTooLong(norm));
        }
        Ok(Self { rx, ry, rz })
    }

    /// ρ = (1 + r·σ)/2.
    pub fn density(&self) -> Mat2 {
        let h = 0.5;
        Mat2::new(
            Complex64::new(h * (1.0 + self.rz), 0.0),
            Complex64::new(h * self.rx, -h * self.ry),
            Complex64::new(h * self.rx, h * self.ry),
            Complex64::new(h * (1.0 - self.rz), 0.0),
        )
    }

    pub fn purity(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }
}

/// Evolution parameters (ξ, δ, ζ), each stored wrapped into (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Params {
    xi: f64,
    delta: f64,
    zeta: f64,
}

impl Su2Params {
    pub fn new(xi: f64, delta: f64, zeta: f64) -> Self {
        Self { xi: wrap_angle(xi), delta: wrap_angle(delta), zeta: wrap_angle(zeta) }
    }

    pub fn identity() -> Self {
        Self { xi: 0.0, delta: 0.0, zeta: 0.0 }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

/// Validated unitary 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: Mat2,
}

impl Unitary2 {
    /// Checks unitarity (‖U†U − 1‖∞ ≤ 1e-12, which forces |det U| = 1).
    pub fn new(m: Mat2) -> Result<Self, SpinError> {
        let defect = m.unitarity_defect();
        if defect > 1e-12 {
            return Err(SpinError::NotUnitary(defect));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_exact(m: Mat2) -> Self {
        debug_assert!(m.unitarity_defect() <= 1e-12);
        Self { m }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.m.m[r][c]
    }

    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        Self { m: self.m.mul(&rhs.m) }
    }

    pub fn adjoint(&self) -> Unitary2 {
        Self { m: self.m.adjoint() }
    }

    pub fn apply(&self, state: &SpinState) -> SpinState {
        let v = self.m.apply(state.as_vector());
        SpinState { amp_up: v[0], amp_down: v[1] }
    }
}

/// Build U(ξ, δ, ζ); exactly unitary by construction.
pub fn su2_from_params(p: Su2Params) -> Unitary2 {
    let (cx, sx) = (p.xi.cos(), p.xi.sin());
    Unitary2::from_exact(Mat2::new(
        Complex64::from_polar(cx, p.delta),
        -Complex64::from_polar(sx, -p.zeta),
        Complex64::from_polar(sx, p.zeta),
        Complex64::from_polar(cx, -p.delta),
    ))
}

/// Total (Pancharatnam) phase arg⟨⇑|U|⇑⟩ of an evolution of |⇑⟩.
///
/// Undefined when the return amplitude vanishes (ξ → π/2: the evolved state is
/// orthogonal to the reference).
pub fn total_phase(u: &Unitary2) -> Result<f64, SpinError> {
    let amp = u.entry(0, 0);
    let vis = amp.norm();
    if vis < VISIBILITY_TOL {
        return Err(SpinError::UndefinedPhase(vis));
    }
    Ok(amp.arg())
}

/// Total phase split into dynamical and geometric parts, each in (−π, π].
///
/// total ≡ dynamical + geometric (mod 2π); the geometric part equals −Ω/2 for
/// the solid angle Ω enclosed by the Bloch path of |⇑⟩ with geodesic closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
}

pub fn decompose_phase(p: Su2Params) -> PhaseDecomposition {
    let c2 = (2.0 * p.xi).cos();
    PhaseDecomposition {
        total: wrap_angle(p.delta),
        dynamical: wrap_angle(p.delta * c2),
        geometric: wrap_angle(p.delta * (1.0 - c2)),
    }
}

/// Phase and visibility of a mixed-state evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedPhase {
    pub phase: f64,
    pub visibility: f64,
}

/// Mixed-state Pancharatnam phase arg Tr(ρU) with visibility |Tr(ρU)|.
pub fn mixed_phase_general(rho: &BlochVector, u: &Unitary2) -> Result<MixedPhase, SpinError> {
    let t = rho.density().mul(u.matrix()).trace();
    let visibility = t.norm();
    if visibility < VISIBILITY_TOL {
        return Err(SpinError::UndefinedPhase(visibility));
    }
    Ok(MixedPhase { phase: t.arg(), visibility })
}

/// Closed-form mixed-state phase Φ = arg[(1+r′)e^{iδ} + (1−r′)e^{−iδ}] for a
/// beam of purity r′ polarized along +z.
///
/// Equals the quadrant-correct branch of arctan(r′·tanδ), and matches
/// [`mixed_phase_general`] for any U(ξ, δ, ζ) with cos ξ > 0 (for cos ξ < 0
/// the trace changes sign and the phase shifts by π).
pub fn mixed_phase_theory(purity: f64, delta: f64) -> Result<f64, SpinError> {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&purity));
    let y = purity * delta.sin();
    let x = delta.cos();
    let vis = (x * x + y * y).sqrt();
    if vis < VISIBILITY_TOL {
        return Err(SpinError::UndefinedPhase(vis));
    }
    Ok(y.atan2(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn params_are_wrapped() {
        let p = Su2Params::new(3.0 * PI, -PI, 5.0 * PI / 2.0);
        assert!((p.xi() - PI).abs() < TOL);
        assert!((p.delta() - PI).abs() < TOL);
        assert!((p.zeta() - PI / 2.0).abs() < TOL);
    }

    #[test]
    fn su2_total_phase_is_delta() {
        let p = Su2Params::new(PI / 4.0, PI / 3.0, PI / 5.0);
        let u = su2_from_params(p);
        assert!(u.matrix().unitarity_defect() < TOL);
        assert!((u.matrix().det().norm() - 1.0).abs() < TOL);
        assert!((total_phase(&u).unwrap() - PI / 3.0).abs() < TOL);
    }

    #[test]
    fn total_phase_undefined_at_vanishing_visibility() {
        let p = Su2Params::new(PI / 2.0 - 1e-13, 0.4, 0.1);
        let u = su2_from_params(p);
        assert!(matches!(total_phase(&u), Err(SpinError::UndefinedPhase(_))));
    }

    #[test]
    fn decomposition_splits_and_reassembles() {
        let p = Su2Params::new(PI / 6.0, 0.6, 0.0);
        let d = decompose_phase(p);
        assert!((d.geometric - 0.3).abs() < TOL);
        assert!((d.dynamical - 0.3).abs() < TOL);
        assert!(angle_distance(d.total, d.dynamical + d.geometric) < TOL);
    }

    #[test]
    fn pure_geometric_at_xi_quarter_pi() {
        let d = decompose_phase(Su2Params::new(PI / 4.0, 1.1, 0.7));
        assert!((d.dynamical).abs() < TOL);
        assert!((d.geometric - 1.1).abs() < TOL);
    }

    #[test]
    fn mixed_phase_theory_examples() {
        let phi = mixed_phase_theory(0.5, PI / 4.0).unwrap();
        assert!((phi - 0.5f64.atan()).abs() < TOL);
        assert!((phi - 0.463647609001).abs() < 1e-9);
        assert!(mixed_phase_theory(0.0, 0.3).unwrap().abs() < TOL);
        // Fully mixed beam at δ = π/2: Tr(ρU) = cos δ = 0.
        assert!(matches!(
            mixed_phase_theory(0.0, PI / 2.0),
            Err(SpinError::UndefinedPhase(_))
        ));
    }

    #[test]
    fn mixed_phase_general_matches_theory() {
        let rho = BlochVector::new(0.0, 0.0, 0.8).unwrap();
        let u = su2_from_params(Su2Params::new(0.9, 1.2, -0.4));
        let got = mixed_phase_general(&rho, &u).unwrap();
        let want = mixed_phase_theory(0.8, 1.2).unwrap();
        assert!((got.phase - want).abs() < TOL);
    }

    #[test]
    fn mixed_phase_general_rejects_zero_visibility() {
        let rho = BlochVector::new(0.0, 0.0, 0.0).unwrap();
        let u = su2_from_params(Su2Params::new(0.0, PI / 2.0, 0.0));
        assert!(matches!(mixed_phase_general(&rho, &u), Err(SpinError::UndefinedPhase(_))));
    }

    #[test]
    fn bloch_of_evolved_up_state() {
        let p = Su2Params::new(0.7, 0.3, 1.1);
        let s = su2_from_params(p).apply(&SpinState::up());
        let b = s.bloch();
        // polar angle 2ξ, azimuth ζ − δ
        assert!((b.rz - (2.0f64 * 0.7).cos()).abs() < TOL);
        assert!((b.ry.atan2(b.rx) - wrap_angle(1.1 - 0.3)).abs() < TOL);
    }

    #[test]
    fn constructors_validate() {
        assert!(SpinState::new(Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.5)).is_err());
        assert!(BlochVector::new(0.9, 0.9, 0.9).is_err());
        let bad = Mat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        assert!(matches!(Unitary2::new(bad), Err(SpinError::NotUnitary(_))));
    }
}
