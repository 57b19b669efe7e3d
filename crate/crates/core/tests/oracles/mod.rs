//! Independent reference solvers used by the integration tests.
#![allow(dead_code)]

/// Brute-force solution of the epsilon-SVR dual.
pub struct QpSolution {
    /// `alpha_i - alpha*_i`
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl QpSolution {
    pub fn predict_training(&self, kmat: &[Vec<f64>]) -> Vec<f64> {
        kmat.iter()
            .map(|row| row.iter().zip(&self.coefficients).map(|(k, c)| k * c).sum::<f64>() + self.bias)
            .collect()
    }
}

pub fn gaussian_matrix(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    x.iter()
        .map(|a| {
            x.iter()
                .map(|b| {
                    let d: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                    (-gamma * d).exp()
                })
                .collect()
        })
        .collect()
}

/// Euclidean projection of `v` onto `{z in [0, c]^m : sum_i s_i z_i = 0}`.
fn project(v: &[f64], s: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> { v.iter().zip(s).map(|(vi, si)| (vi - lambda * si).clamp(0.0, c)).collect() };
    let balance = |z: &[f64]| -> f64 { z.iter().zip(s).map(|(zi, si)| zi * si).sum() };
    // balance(at(lambda)) is non-increasing in lambda.
    let mut lo = -1.0;
    let mut hi = 1.0;
    while balance(&at(lo)) < 0.0 {
        lo *= 2.0;
    }
    while balance(&at(hi)) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if balance(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Accelerated projected gradient on
/// `min 1/2 (a - a*)' K (a - a*) + eps sum(a + a*) - y'(a - a*)`
/// over `0 <= a, a* <= C`, `sum(a - a*) = 0`.
pub fn brute_force_svr(kmat: &[Vec<f64>], y: &[f64], c: f64, eps: f64, iterations: usize) -> QpSolution {
    let n = y.len();
    let s: Vec<f64> = (0..2 * n).map(|t| if t < n { 1.0 } else { -1.0 }).collect();
    // Hessian is [[K, -K], [-K, K]]; its largest eigenvalue is at most 2 * max row sum of |K|.
    let row_max = kmat.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / (2.0 * row_max);
    let grad = |z: &[f64]| -> Vec<f64> {
        let coef: Vec<f64> = (0..n).map(|i| z[i] - z[n + i]).collect();
        let kc: Vec<f64> = kmat.iter().map(|r| r.iter().zip(&coef).map(|(k, c)| k * c).sum()).collect();
        (0..2 * n)
            .map(|t| {
                let i = t % n;
                s[t] * (kc[i] - y[i]) + eps
            })
            .collect()
    };
    let mut z = vec![0.0; 2 * n];
    let mut w = z.clone();
    let mut momentum = 1.0f64;
    for _ in 0..iterations {
        let g = grad(&w);
        let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
        let next = project(&trial, &s, c);
        let m_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        w = next
            .iter()
            .zip(&z)
            .map(|(a, b)| a + (momentum - 1.0) / m_next * (a - b))
            .collect();
        z = next;
        momentum = m_next;
    }
    let coefficients: Vec<f64> = (0..n).map(|i| z[i] - z[n + i]).collect();

    // Bias from stationarity: free variables pin f(x_i) = y_i -+ eps.
    let f0: Vec<f64> = kmat.iter().map(|r| r.iter().zip(&coefficients).map(|(k, c)| k * c).sum()).collect();
    let margin = 1e-7 * c;
    let mut free = Vec::new();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        for (val, sign) in [(z[i], 1.0), (z[n + i], -1.0)] {
            let b = y[i] - sign * eps - f0[i];
            if val > margin && val < c - margin {
                free.push(b);
            } else if (val <= margin) == (sign > 0.0) {
                // alpha at 0 or alpha* at C
                lo = lo.max(b);
            } else {
                hi = hi.min(b);
            }
        }
    }
    let bias = if free.is_empty() {
        0.5 * (lo + hi)
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    QpSolution { coefficients, bias }
}

/// Minimum SSE of `alpha * x^beta` over a dense grid with both steps `step`,
/// `alpha` in `[alpha_min, 1]` and `beta` in `(0, 1)`.
pub fn dense_grid_sse(points: &[(usize, f64)], alpha_min: f64, step: f64) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let n_beta = (1.0 / step).round() as usize;
    let n_alpha = ((1.0 - alpha_min) / step).floor() as usize;
    for bi in 1..n_beta {
        let beta = bi as f64 * step;
        let powers: Vec<f64> = points.iter().map(|&(e, _)| (e as f64).powf(beta)).collect();
        for ai in 0..=n_alpha {
            let alpha = alpha_min + ai as f64 * step;
            let sse: f64 = points
                .iter()
                .zip(&powers)
                .map(|(&(_, a), p)| (a - alpha * p) * (a - alpha * p))
                .sum();
            if sse < best.0 {
                best = (sse, alpha, beta);
            }
        }
    }
    best
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `||a - b|| / max(||a|| + ||b||, tiny)`
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / (norm(a) + norm(b)).max(1e-300)
}

pub fn variance(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64
}
