//! Two-variable working-set ascent for the epsilon-SVR dual.
//!
//! The dual is written over `2n` variables `beta = [alpha; alpha*]` with
//! signs `s = [+1; -1]`:
//!
//! ```text
//! min  1/2 beta' Q beta + p' beta
//! s.t. s' beta = 0,  0 <= beta <= C
//! Q_tu = s_t s_u K(x_t, x_u),  p = [eps - y; eps + y]
//! ```
//!
//! Each step picks the maximal violating pair and solves the two-variable
//! subproblem exactly.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Curvature used when the pair's second derivative vanishes.
const TAU: f64 = 1e-12;

pub(crate) struct DualSolution {
    /// `alpha_i - alpha*_i` for every training sample.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Final maximal violation `max_up(-sG) - min_low(-sG)`.
    pub gap: f64,
}

struct Dual<'a> {
    kernel: &'a [f64],
    n: usize,
    c: f64,
    beta: Vec<f64>,
    grad: Vec<f64>,
}

impl Dual<'_> {
    fn sign(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    fn q(&self, t: usize, u: usize) -> f64 {
        self.sign(t) * self.sign(u) * self.kernel[(t % self.n) * self.n + u % self.n]
    }

    fn in_up(&self, t: usize) -> bool {
        if t < self.n {
            self.beta[t] < self.c
        } else {
            self.beta[t] > 0.0
        }
    }

    fn in_low(&self, t: usize) -> bool {
        if t < self.n {
            self.beta[t] > 0.0
        } else {
            self.beta[t] < self.c
        }
    }

    fn score(&self, t: usize) -> f64 {
        -self.sign(t) * self.grad[t]
    }

    /// Index and value of `max_up(-sG)` and `min_low(-sG)`.
    fn violating_pair(&self) -> ((usize, f64), (usize, f64)) {
        let mut up = (usize::MAX, f64::NEG_INFINITY);
        let mut low = (usize::MAX, f64::INFINITY);
        for t in 0..2 * self.n {
            let s = self.score(t);
            if self.in_up(t) && s > up.1 {
                up = (t, s);
            }
            if self.in_low(t) && s < low.1 {
                low = (t, s);
            }
        }
        (up, low)
    }

    fn update_pair(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (old_i, old_j) = (self.beta[i], self.beta[j]);
        let qii = self.q(i, i);
        let qjj = self.q(j, j);
        let qij = self.q(i, j);
        let (mut ai, mut aj) = (old_i, old_j);
        if self.sign(i) != self.sign(j) {
            let quad = qii + qjj + 2.0 * qij;
            let quad = if quad <= 0.0 { TAU } else { quad };
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = qii + qjj - 2.0 * qij;
            let quad = if quad <= 0.0 { TAU } else { quad };
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.beta[i] = ai;
        self.beta[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..2 * self.n {
            self.grad[t] += self.q(t, i) * di + self.q(t, j) * dj;
        }
    }

    fn bias(&self, up: f64, low: f64) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        for t in 0..2 * self.n {
            if self.beta[t] > 0.0 && self.beta[t] < self.c {
                sum += self.score(t);
                free += 1;
            }
        }
        if free > 0 {
            sum / free as f64
        } else {
            0.5 * (up + low)
        }
    }
}

/// Solves the dual for a precomputed row-major `n x n` kernel matrix.
pub(crate) fn solve(
    kernel: &[f64],
    y: &[f64],
    c: f64,
    epsilon: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<DualSolution> {
    let n = y.len();
    let mut grad = vec![0.0; 2 * n];
    for i in 0..n {
        grad[i] = epsilon - y[i];
        grad[i + n] = epsilon + y[i];
    }
    let mut dual = Dual {
        kernel,
        n,
        c,
        beta: vec![0.0; 2 * n],
        grad,
    };
    let mut iterations = 0;
    loop {
        let ((i, up), (j, low)) = dual.violating_pair();
        let gap = up - low;
        if i == usize::MAX || j == usize::MAX || gap <= tol {
            let bias = dual.bias(up, low);
            let coefficients = (0..n).map(|t| dual.beta[t] - dual.beta[t + n]).collect();
            return Ok(DualSolution {
                coefficients,
                bias,
                iterations,
                gap: gap.max(0.0),
            });
        }
        if iterations >= max_iterations {
            return Err(Error::IterationCap { iterations, gap });
        }
        dual.update_pair(i, j);
        iterations += 1;
    }
}
