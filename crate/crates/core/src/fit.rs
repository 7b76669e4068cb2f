//! Least-squares fits for fringe data.
//!
//! The workhorse is a linear fit of `y = a + A·cos(k·x − φ)` at a fixed
//! harmonic k, parameterized as `a + bc·cos(kx) + bs·sin(kx)` so the normal
//! equations stay linear. Amplitude and phase follow from (bc, bs), and the
//! parameter covariance comes from the inverted normal matrix.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("x, y and weight arrays must have equal lengths")]
    LengthMismatch,
    #[error("normal equations are singular (degenerate sample positions)")]
    SingularSystem,
    #[error("no significant fringe contrast (amplitude {amplitude:.3e} vs noise {sigma:.3e})")]
    NoContrast { amplitude: f64, sigma: f64 },
}

/// Result of a cosine fit `y = offset + amplitude·cos(harmonic·x − phase)`.
///
/// `phase` lives in (−π, π] and is expressed in the `harmonic·x` domain: the
/// fringe crest sits at `x = phase / harmonic` (mod period). `cov` is the
/// covariance of (offset, bc, bs) in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub harmonic: f64,
    pub bc: f64,
    pub bs: f64,
    pub cov: [[f64; 3]; 3],
    pub rss: f64,
    pub n: usize,
}

impl CosineFit {
    /// Model prediction at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        self.offset + self.bc * (self.harmonic * x).cos() + self.bs * (self.harmonic * x).sin()
    }

    /// Standard deviation of the fitted phase, from linear error propagation
    /// through `phase = atan2(bs, bc)`.
    pub fn phase_sigma(&self) -> f64 {
        let a2 = self.amplitude * self.amplitude;
        if a2 == 0.0 {
            return f64::INFINITY;
        }
        let g_bc = -self.bs / a2;
        let g_bs = self.bc / a2;
        (g_bc * g_bc * self.cov[1][1]
            + 2.0 * g_bc * g_bs * self.cov[1][2]
            + g_bs * g_bs * self.cov[2][2])
            .max(0.0)
            .sqrt()
    }

    /// Standard deviation of the fitted amplitude.
    pub fn amplitude_sigma(&self) -> f64 {
        if self.amplitude == 0.0 {
            return (0.5 * (self.cov[1][1] + self.cov[2][2])).max(0.0).sqrt();
        }
        let g_bc = self.bc / self.amplitude;
        let g_bs = self.bs / self.amplitude;
        (g_bc * g_bc * self.cov[1][1]
            + 2.0 * g_bc * g_bs * self.cov[1][2]
            + g_bs * g_bs * self.cov[2][2])
            .max(0.0)
            .sqrt()
    }

    /// Standard deviation of the fitted offset.
    pub fn offset_sigma(&self) -> f64 {
        self.cov[0][0].max(0.0).sqrt()
    }
}

/// Solve the symmetric 3x3 system `m·x = v` and return (solution, m⁻¹).
fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<([f64; 3], [[f64; 3]; 3])> {
    // Gaussian elimination with partial pivoting on the augmented [m | I | v].
    let mut a = [[0.0f64; 7]; 3];
    for r in 0..3 {
        a[r][..3].copy_from_slice(&m[r]);
        a[r][3 + r] = 1.0;
        a[r][6] = v[r];
    }
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        let pivot = a[col][col];
        for entry in a[col].iter_mut() {
            *entry /= pivot;
        }
        for row in 0..3 {
            if row != col {
                let factor = a[row][col];
                let pivot_row = a[col];
                for (entry, p) in a[row].iter_mut().zip(pivot_row) {
                    *entry -= factor * p;
                }
            }
        }
    }
    let x = [a[0][6], a[1][6], a[2][6]];
    let mut inv = [[0.0f64; 3]; 3];
    for r in 0..3 {
        inv[r].copy_from_slice(&a[r][3..6]);
    }
    Some((x, inv))
}

/// Weighted linear least squares for `y = a + bc·cos(kx) + bs·sin(kx)`.
///
/// With `weights = Some(w)` the weights are taken as inverse variances and the
/// returned covariance is the inverse normal matrix; without weights the
/// residual variance is estimated as rss/(n − 3) and scales the covariance.
pub fn fit_cosine(
    xs: &[f64],
    ys: &[f64],
    harmonic: f64,
    weights: Option<&[f64]>,
) -> Result<CosineFit, FitError> {
    if xs.len() != ys.len() || weights.is_some_and(|w| w.len() != xs.len()) {
        return Err(FitError::LengthMismatch);
    }
    let n = xs.len();
    if n < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: n });
    }
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]);
        let basis = [1.0, (harmonic * xs[i]).cos(), (harmonic * xs[i]).sin()];
        for r in 0..3 {
            v[r] += w * basis[r] * ys[i];
            for c in 0..3 {
                m[r][c] += w * basis[r] * basis[c];
            }
        }
    }
    let (theta, mut cov) = solve3(m, v).ok_or(FitError::SingularSystem)?;
    let (offset, bc, bs) = (theta[0], theta[1], theta[2]);
    let mut rss = 0.0;
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]);
        let pred = offset + bc * (harmonic * xs[i]).cos() + bs * (harmonic * xs[i]).sin();
        rss += w * (ys[i] - pred) * (ys[i] - pred);
    }
    if weights.is_none() {
        let sigma2 = rss / (n as f64 - 3.0);
        for row in cov.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= sigma2;
            }
        }
    }
    let amplitude = bc.hypot(bs);
    let fit = CosineFit {
        offset,
        amplitude,
        phase: bs.atan2(bc),
        harmonic,
        bc,
        bs,
        cov,
        rss,
        n,
    };
    let sigma = fit.amplitude_sigma();
    let floor = 1e-12 * offset.abs().max(1.0);
    if amplitude < floor || amplitude <= 3.0 * sigma {
        return Err(FitError::NoContrast { amplitude, sigma });
    }
    Ok(fit)
}

/// Ordinary least squares for `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch);
    }
    let n = xs.len();
    if n < 2 {
        return Err(FitError::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = nf * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(FitError::SingularSystem);
    }
    let slope = (nf * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / nf;
    Ok((slope, intercept))
}

/// Remove 2π jumps from a sequence of wrapped angles so consecutive
/// differences are at most π in magnitude.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut shift = 0.0;
    for (i, &a) in angles.iter().enumerate() {
        if i > 0 {
            let prev: f64 = out[i - 1];
            let mut val = a + shift;
            while val - prev > std::f64::consts::PI {
                shift -= 2.0 * std::f64::consts::PI;
                val = a + shift;
            }
            while prev - val > std::f64::consts::PI {
                shift += 2.0 * std::f64::consts::PI;
                val = a + shift;
            }
            out.push(val);
        } else {
            out.push(a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn recovers_exact_cosine() {
        let xs: Vec<f64> = (0..32).map(|k| 2.0 * PI * k as f64 / 32.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 + 1.5 * (2.0 * x - 0.8).cos()).collect();
        let fit = fit_cosine(&xs, &ys, 2.0, None).unwrap();
        assert!((fit.offset - 3.0).abs() < 1e-10);
        assert!((fit.amplitude - 1.5).abs() < 1e-10);
        assert!((fit.phase - 0.8).abs() < 1e-10);
        assert!(fit.rss < 1e-18);
        for x in [0.0, 0.3, 1.7] {
            assert!((fit.predict(x) - (3.0 + 1.5 * (2.0 * x - 0.8).cos())).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_covariance_is_inverse_normal_matrix() {
        let xs: Vec<f64> = (0..16).map(|k| 2.0 * PI * k as f64 / 16.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 10.0 + 4.0 * x.cos()).collect();
        let w = vec![0.25; 16];
        let fit = fit_cosine(&xs, &ys, 1.0, Some(&w)).unwrap();
        // on a uniform full-period grid the basis is orthogonal:
        // var(offset) = 1/Σw, var(bc) = var(bs) = 2/Σw
        assert!((fit.cov[0][0] - 0.25).abs() < 1e-12);
        assert!((fit.cov[1][1] - 0.5).abs() < 1e-12);
        assert!((fit.cov[2][2] - 0.5).abs() < 1e-12);
        assert!(fit.cov[0][1].abs() < 1e-12);
    }

    #[test]
    fn flat_data_has_no_contrast() {
        let xs: Vec<f64> = (0..12).map(|k| k as f64 * 0.5).collect();
        let ys = vec![2.0; 12];
        assert!(matches!(
            fit_cosine(&xs, &ys, 1.0, None),
            Err(FitError::NoContrast { .. })
        ));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(matches!(
            fit_cosine(&[0.0, 1.0], &[0.0, 1.0], 1.0, None),
            Err(FitError::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_cosine(&[0.0; 5], &[1.0, 1.0, 1.0, 1.0, 1.0], 1.0, None),
            Err(FitError::SingularSystem)
        ));
        assert!(matches!(
            fit_cosine(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0], 1.0, None),
            Err(FitError::LengthMismatch)
        ));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (slope, intercept) = linear_fit(&xs, &ys).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let wrapped = [3.0, -3.0, 2.9, -2.9];
        let un = unwrap_angles(&wrapped);
        for pair in un.windows(2) {
            assert!((pair[1] - pair[0]).abs() <= PI + 1e-12);
        }
        assert!((un[1] - (2.0 * PI - 3.0)).abs() < 1e-12);
    }
}
