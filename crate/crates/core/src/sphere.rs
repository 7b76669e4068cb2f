//! Closed paths on the Bloch sphere and their enclosed solid angle.
//!
//! The solid angle of a closed piecewise-geodesic polygon is computed from the
//! Gauss–Bonnet theorem: with geodesic sides the integrated geodesic curvature
//! vanishes, so Ω = 2π − Σ τ_i where τ_i is the turning (exterior) angle at
//! vertex i. The result is reduced modulo 4π into (−2π, 2π], which fixes the
//! orientation convention: a counterclockwise circuit seen from outside the
//! sphere encloses positive Ω.
//!
//! Smooth curves are handled by inscribing a fine polygon; the discretization
//! error falls off as 1/N² in the number of samples per arc.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("path needs at least 3 vertices, got {0}")]
    TooShort(usize),
    #[error("vertex {index} has norm {norm:.6e}, expected 1 within 1e-12")]
    NotUnit { index: usize, norm: f64 },
    #[error("vertices {0} and {1} are antipodal: the geodesic between them is ambiguous")]
    AntipodalSegment(usize, usize),
}

/// Unit 3-vector helpers local to this module.
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn norm_sqr(a: [f64; 3]) -> f64 {
    dot(a, a)
}

/// A closed path of unit vectors on the sphere, traversed in order with the
/// last vertex connected back to the first by a geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePath {
    vertices: Vec<[f64; 3]>,
}

impl SpherePath {
    /// Validates unit norms, removes consecutive duplicates (closer than
    /// 1e-13, including a duplicated closing point), and rejects antipodal
    /// consecutive pairs, for which the connecting geodesic is ambiguous.
    pub fn new(vertices: Vec<[f64; 3]>) -> Result<Self, PathError> {
        for (i, v) in vertices.iter().enumerate() {
            let n = norm(*v);
            if (n - 1.0).abs() > 1e-12 {
                return Err(PathError::NotUnit { index: i, norm: n });
            }
        }
        let mut kept: Vec<[f64; 3]> = Vec::with_capacity(vertices.len());
        let mut kept_idx: Vec<usize> = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if let Some(last) = kept.last() {
                if norm(sub(*v, *last)) < 1e-13 {
                    continue;
                }
            }
            kept.push(*v);
            kept_idx.push(i);
        }
        // The closure edge may also be degenerate if the caller repeated the
        // starting point at the end.
        while kept.len() > 1 && norm(sub(kept[0], *kept.last().unwrap())) < 1e-13 {
            kept.pop();
            kept_idx.pop();
        }
        if kept.len() < 3 {
            return Err(PathError::TooShort(kept.len()));
        }
        for k in 0..kept.len() {
            let j = (k + 1) % kept.len();
            if norm(sub(kept[k], [-kept[j][0], -kept[j][1], -kept[j][2]])) < 1e-12 {
                return Err(PathError::AntipodalSegment(kept_idx[k], kept_idx[j]));
            }
        }
        Ok(Self { vertices: kept })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    /// Oriented solid angle in (−2π, 2π] enclosed by the geodesic polygon.
    pub fn solid_angle(&self) -> f64 {
        let n = self.vertices.len();
        let mut turning_sum = 0.0;
        for i in 0..n {
            let a = self.vertices[(i + n - 1) % n];
            let b = self.vertices[i];
            let c = self.vertices[(i + 1) % n];
            turning_sum += turning_angle(a, b, c);
        }
        wrap_solid_angle(2.0 * std::f64::consts::PI - turning_sum)
    }
}

/// Turning angle at vertex b between the incoming geodesic from a and the
/// outgoing geodesic to c, signed positive for a left turn (counterclockwise
/// seen from outside the sphere).
///
/// The tangent of the geodesic from b toward c is the projection of (c − b)
/// onto the tangent plane at b; using the chord difference keeps the formula
/// exact in the limit of short edges, where normalized cross-product forms
/// lose all significant digits.
fn turning_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    // project chord d onto tangent plane at b: d − (d·b)b, with
    // d·b = −‖d‖²/2 for unit endpoints.
    let din = sub(a, b);
    let dout = sub(c, b);
    let tin = [
        -(din[0] + 0.5 * norm_sqr(din) * b[0]),
        -(din[1] + 0.5 * norm_sqr(din) * b[1]),
        -(din[2] + 0.5 * norm_sqr(din) * b[2]),
    ];
    let tout = [
        dout[0] + 0.5 * norm_sqr(dout) * b[0],
        dout[1] + 0.5 * norm_sqr(dout) * b[1],
        dout[2] + 0.5 * norm_sqr(dout) * b[2],
    ];
    dot(b, cross(tin, tout)).atan2(dot(tin, tout))
}

/// Reduce a solid angle modulo 4π into (−2π, 2π].
pub fn wrap_solid_angle(omega: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = omega.rem_euclid(2.0 * two_pi);
    if y > two_pi {
        y - 2.0 * two_pi
    } else {
        y
    }
}

/// Lune bounded by two meridians: down the `az_up` meridian is traversed
/// upward (⇓ to ⇑) and the `az_down` meridian downward (⇑ to ⇓).
///
/// Each meridian is sampled with `steps` interior points so the poles appear
/// exactly once; the enclosed solid angle is 2·wrap(az_up − az_down) up to the
/// (−2π, 2π] reduction.
pub fn two_meridian_lune(az_up: f64, az_down: f64, steps: usize) -> SpherePath {
    let steps = steps.max(2);
    let mut pts: Vec<[f64; 3]> = Vec::with_capacity(2 * steps + 2);
    // south pole, then up the az_up meridian (exclusive of poles)
    pts.push([0.0, 0.0, -1.0]);
    for k in 1..steps {
        let theta = std::f64::consts::PI * (1.0 - k as f64 / steps as f64);
        pts.push([
            theta.sin() * az_up.cos(),
            theta.sin() * az_up.sin(),
            theta.cos(),
        ]);
    }
    pts.push([0.0, 0.0, 1.0]);
    for k in 1..steps {
        let theta = std::f64::consts::PI * k as f64 / steps as f64;
        pts.push([
            theta.sin() * az_down.cos(),
            theta.sin() * az_down.sin(),
            theta.cos(),
        ]);
    }
    SpherePath::new(pts).expect("lune construction yields a valid path")
}
