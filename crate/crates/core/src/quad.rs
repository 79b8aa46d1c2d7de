//! Gauss–Legendre quadrature with composite doubling refinement.

use crate::error::{Error, Result};

/// An n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least a 2-point rule");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 1..n {
                    let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite integration over `intervals` equal panels.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        intervals: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / intervals as f64;
        (0..intervals)
            .map(|k| self.integrate(a + k as f64 * h, a + (k + 1) as f64 * h, &mut f))
            .sum()
    }
}

/// Integrates with panel-count doubling until two successive estimates agree
/// to `tol` (relative to max(1, |I|)). Errors if the refinement stalls.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    tol: f64,
    mut f: F,
) -> Result<f64> {
    let mut prev = rule.integrate_composite(a, b, 1, &mut f);
    let mut intervals = 2;
    for refinement in 1..=12 {
        let cur = rule.integrate_composite(a, b, intervals, &mut f);
        let residual = (cur - prev).abs();
        if residual <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
        intervals *= 2;
        if refinement == 12 {
            return Err(Error::QuadratureNotConverged {
                residual,
                refinements: refinement,
            });
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomial_exactly() {
        let rule = GaussLegendre::new(8);
        // 8-point rule is exact for degree <= 15.
        let got = rule.integrate(0.0, 2.0, |x| x.powi(9) - 3.0 * x.powi(4) + 1.0);
        let exact = 2.0f64.powi(10) / 10.0 - 3.0 * 2.0f64.powi(5) / 5.0 + 2.0;
        assert_abs_diff_eq!(got, exact, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_handles_decaying_exponential() {
        let rule = GaussLegendre::new(16);
        let got = integrate_adaptive(&rule, 0.0, 1.0, 1e-13, |x| (-5.0 * x).exp()).unwrap();
        assert_abs_diff_eq!(got, (1.0 - (-5.0f64).exp()) / 5.0, epsilon = 1e-12);
    }

    #[test]
    fn nodes_symmetric_and_weights_sum_to_two() {
        for n in [2, 5, 16, 33, 64] {
            let rule = GaussLegendre::new(n);
            let sum: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-13);
            for i in 0..n {
                assert_abs_diff_eq!(rule.nodes[i], -rule.nodes[n - 1 - i], epsilon = 1e-14);
            }
        }
    }
}
