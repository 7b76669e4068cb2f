//! Derivative-free minimization of smooth 2-d objectives.
//!
//! A plain Nelder–Mead simplex is all the Bell-angle search needs: the
//! objectives are analytic and the simplex collapses quadratically near a
//! nondegenerate optimum. The driver restarts are the caller's concern; this
//! module only polishes from a given start point.

/// Outcome of a converged simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmResult {
    pub x: [f64; 2],
    pub value: f64,
    pub iterations: usize,
}

/// Minimize `f` from `start` until the simplex's value spread drops below
/// `f_tol`. Returns `None` if the iteration cap is exhausted first.
pub(crate) fn nelder_mead_min<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    scale: f64,
    f_tol: f64,
    max_iter: usize,
) -> Option<NmResult> {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex = [
        start,
        [start[0] + scale, start[1]],
        [start[0], start[1] + scale],
    ];
    let mut values = simplex.map(&mut f);

    for iter in 0..max_iter {
        // order best → worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);

        if (values[worst] - values[best]).abs() < f_tol {
            return Some(NmResult { x: simplex[best], value: values[best], iterations: iter });
        }

        let centroid = [
            0.5 * (simplex[best][0] + simplex[mid][0]),
            0.5 * (simplex[best][1] + simplex[mid][1]),
        ];
        let reflect = [
            centroid[0] + ALPHA * (centroid[0] - simplex[worst][0]),
            centroid[1] + ALPHA * (centroid[1] - simplex[worst][1]),
        ];
        let f_reflect = f(reflect);

        if f_reflect < values[best] {
            let expand = [
                centroid[0] + GAMMA * (reflect[0] - centroid[0]),
                centroid[1] + GAMMA * (reflect[1] - centroid[1]),
            ];
            let f_expand = f(expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[mid] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let contract = [
                centroid[0] + RHO * (simplex[worst][0] - centroid[0]),
                centroid[1] + RHO * (simplex[worst][1] - centroid[1]),
            ];
            let f_contract = f(contract);
            if f_contract < values[worst] {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                for i in [mid, worst] {
                    simplex[i] = [
                        simplex[best][0] + SIGMA * (simplex[i][0] - simplex[best][0]),
                        simplex[best][1] + SIGMA * (simplex[i][1] - simplex[best][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let r = nelder_mead_min(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            [0.0, 0.0],
            0.5,
            1e-14,
            500,
        )
        .unwrap();
        assert!((r.x[0] - 1.5).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
        assert!(r.value < 1e-11);
    }

    #[test]
    fn minimizes_trig_objective() {
        // smooth periodic surface with minimum at (π/3, −π/6)
        let r = nelder_mead_min(
            |x| -((x[0] - std::f64::consts::FRAC_PI_3).cos() + (x[1] + std::f64::consts::FRAC_PI_6).cos()),
            [0.5, -0.3],
            0.2,
            1e-14,
            800,
        )
        .unwrap();
        assert!((r.x[0] - std::f64::consts::FRAC_PI_3).abs() < 1e-5);
        assert!((r.x[1] + std::f64::consts::FRAC_PI_6).abs() < 1e-5);
    }

    #[test]
    fn exhausting_iterations_returns_none() {
        assert!(nelder_mead_min(|x| x[0] * x[0] + x[1] * x[1], [5.0, 5.0], 1.0, 1e-30, 3).is_none());
    }
}
