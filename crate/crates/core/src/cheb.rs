//! Chebyshev–Gauss–Lobatto grid on `[-1, 1]`: barycentric interpolation,
//! differentiation matrix and coefficient transform.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Cheb {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Cheb {
    /// `n` nodes `u_j = cos(πj/(n-1))`, so `u_0 = 1` and `u_{n-1} = -1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least two Chebyshev nodes");
        let m = (n - 1) as f64;
        let nodes = (0..n)
            .map(|j| {
                // symmetric evaluation keeps u_j = -u_{n-1-j} exactly
                (PI * (m - 2.0 * j as f64) / (2.0 * m)).sin()
            })
            .collect();
        let mut weights: Vec<f64> = (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Cheb { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lagrange basis values `ℓ_j(v)`; exact unit vector when `v` hits a node.
    pub fn basis(&self, v: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        if let Some(j) = self.nodes.iter().position(|&u| (v - u).abs() < 1e-15) {
            out[j] = 1.0;
            return out;
        }
        let mut sum = 0.0;
        for (o, (&u, &w)) in out.iter_mut().zip(self.nodes.iter().zip(&self.weights)) {
            *o = w / (v - u);
            sum += *o;
        }
        out.iter_mut().for_each(|o| *o /= sum);
        out
    }

    pub fn interpolate(&self, values: &[Complex64], v: f64) -> Complex64 {
        debug_assert_eq!(values.len(), self.len());
        self.basis(v).iter().zip(values).map(|(b, f)| f * b).sum()
    }

    /// `D[i][j] = ℓ_j'(u_i)`.
    pub fn diff_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let x = &self.nodes;
        let c = |j: usize| {
            let e = if j == 0 || j == n - 1 { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                e
            } else {
                -e
            }
        };
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                if i != j {
                    let v = c(i) / c(j) / (x[i] - x[j]);
                    d[(i, j)] = v;
                    row += v;
                }
            }
            d[(i, i)] = -row;
        }
        d
    }

    /// Coefficients `a_k` of `Σ a_k T_k(u)` through the node values.
    pub fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let m = (n - 1) as f64;
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, f) in values.iter().enumerate() {
                    let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    acc += f * (w * (PI * (k * j) as f64 / m).cos());
                }
                let scale = if k == 0 || k == n - 1 { 1.0 / m } else { 2.0 / m };
                acc * scale
            })
            .collect()
    }
}

/// Largest coefficient magnitude among the last `tail` coefficients, relative
/// to the largest overall.
pub fn coefficient_tail(coeffs: &[Complex64], tail: usize) -> f64 {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let start = coeffs.len().saturating_sub(tail);
    coeffs[start..].iter().map(|c| c.norm()).fold(0.0, f64::max) / max
}
