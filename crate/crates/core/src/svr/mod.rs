//! Epsilon-insensitive support vector regression.
//!
//! A trained model evaluates `f(x) = sum_i c_i K(x_i, x) + b` over its
//! support vectors, where `c_i = alpha_i - alpha*_i` are the dual
//! coefficients.

mod kernel;
mod solver;

use alloc::vec::Vec;

pub use kernel::{kernel_eval, KernelSpec};

use crate::error::{Error, Result};

/// Hard cap on working-set steps.
pub const MAX_ITERATIONS: usize = 1_000_000;
/// Coefficients with magnitude at or below this are not kept as support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-4;

/// Box constraint and tube width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrHyper {
    pub c: f64,
    pub epsilon: f64,
}

impl Default for SvrHyper {
    fn default() -> Self {
        Self { c: 10.0, epsilon: 0.01 }
    }
}

impl SvrHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter { name: "C", value: self.c });
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        Ok(())
    }
}

/// A trained regression model.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    support_vectors: Vec<Vec<f64>>,
    dual_coeffs: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    dim: usize,
}

impl SvrModel {
    pub fn new(
        support_vectors: Vec<Vec<f64>>,
        dual_coeffs: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        dim: usize,
    ) -> Result<Self> {
        kernel.validate()?;
        if support_vectors.len() != dual_coeffs.len() {
            return Err(Error::LengthMismatch {
                features: support_vectors.len(),
                targets: dual_coeffs.len(),
            });
        }
        for sv in &support_vectors {
            if sv.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: sv.len(),
                });
            }
            if sv.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("support vector"));
            }
        }
        if !bias.is_finite() || dual_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("model coefficients"));
        }
        Ok(Self {
            support_vectors,
            dual_coeffs,
            bias,
            kernel,
            dim,
        })
    }

    /// A model with no support vectors, predicting `bias` everywhere.
    pub fn bias_only(bias: f64, kernel: KernelSpec, dim: usize) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), bias, kernel, dim)
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn dual_coeffs(&self) -> &[f64] {
        &self.dual_coeffs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Feature dimension the model was trained on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sv(&self) -> usize {
        self.support_vectors.len()
    }

    /// `sum_i c_i K(x_i, x) + b`, unclamped.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coeffs)
            .map(|(sv, c)| c * self.kernel.apply(sv, x))
            .sum::<f64>()
            + self.bias)
    }
}

pub fn predict(model: &SvrModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

/// Training output with the full coefficient vector, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrSolution {
    pub model: SvrModel,
    /// `alpha_i - alpha*_i` for every training sample, in input order.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    /// Maximal KKT violation of the dual at termination.
    pub gap: f64,
}

fn check_training_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            features: x.len(),
            targets: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::EmptyData("training set (need at least 2 samples)"));
    }
    let dim = x[0].len();
    for row in x {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }
    Ok(dim)
}

/// Trains an epsilon-SVR and keeps the full dual solution.
pub fn train_svr_detailed(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: KernelSpec,
    hyper: SvrHyper,
    tol: f64,
) -> Result<SvrSolution> {
    let dim = check_training_data(x, y)?;
    kernel.validate()?;
    hyper.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let n = x.len();
    let mut kmat = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.apply(&x[i], &x[j]);
            kmat[i * n + j] = v;
            kmat[j * n + i] = v;
        }
    }
    let dual = solver::solve(&kmat, y, hyper.c, hyper.epsilon, tol, MAX_ITERATIONS)?;
    let (support_vectors, dual_coeffs): (Vec<_>, Vec<_>) = x
        .iter()
        .zip(&dual.coefficients)
        .filter(|(_, c)| c.abs() > SUPPORT_THRESHOLD)
        .map(|(sv, &c)| (sv.clone(), c))
        .unzip();
    let model = SvrModel::new(support_vectors, dual_coeffs, dual.bias, kernel, dim)?;
    Ok(SvrSolution {
        model,
        coefficients: dual.coefficients,
        iterations: dual.iterations,
        gap: dual.gap,
    })
}

/// Trains an epsilon-SVR on feature rows `x` and targets `y`.
pub fn train_svr(x: &[Vec<f64>], y: &[f64], kernel: KernelSpec, hyper: SvrHyper, tol: f64) -> Result<SvrModel> {
    train_svr_detailed(x, y, kernel, hyper, tol).map(|s| s.model)
}

/// Per-sample violation of the epsilon-SVR optimality conditions.
///
/// With residual `r = y - f(x)`: a zero coefficient needs `|r| <= eps`, a
/// free positive (negative) coefficient needs `r = eps` (`r = -eps`), and a
/// coefficient at `+C` (`-C`) needs `r >= eps` (`r <= -eps`).
pub fn kkt_violations(
    x: &[Vec<f64>],
    y: &[f64],
    coefficients: &[f64],
    bias: f64,
    kernel: &KernelSpec,
    hyper: &SvrHyper,
) -> Vec<f64> {
    let bound = hyper.c * (1.0 - 1e-12);
    x.iter()
        .zip(y)
        .zip(coefficients)
        .map(|((xi, &yi), &ci)| {
            let f: f64 = x
                .iter()
                .zip(coefficients)
                .map(|(xj, cj)| cj * kernel.apply(xj, xi))
                .sum::<f64>()
                + bias;
            let r = yi - f;
            let eps = hyper.epsilon;
            if ci.abs() <= SUPPORT_THRESHOLD {
                (r.abs() - eps).max(0.0)
            } else if ci >= bound {
                (eps - r).max(0.0)
            } else if ci > 0.0 {
                (r - eps).abs()
            } else if ci <= -bound {
                (r + eps).max(0.0)
            } else {
                (r + eps).abs()
            }
        })
        .collect()
}

/// Mean squared prediction error over a test set.
pub fn mse(model: &SvrModel, x_test: &[Vec<f64>], y_test: &[f64]) -> Result<f64> {
    if x_test.is_empty() {
        return Err(Error::EmptyData("test set"));
    }
    if x_test.len() != y_test.len() {
        return Err(Error::LengthMismatch {
            features: x_test.len(),
            targets: y_test.len(),
        });
    }
    let mut total = 0.0;
    for (x, y) in x_test.iter().zip(y_test) {
        let e = model.predict(x)? - y;
        total += e * e;
    }
    Ok(total / x_test.len() as f64)
}
