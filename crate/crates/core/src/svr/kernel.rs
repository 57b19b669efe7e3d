use crate::error::{Error, Result};

/// Kernel function of the regression model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `<x, y>`
    Linear,
    /// `(<x, y> + coef0)^degree`
    Polynomial { degree: u32, coef0: f64 },
    /// `exp(-gamma * |x - y|^2)`
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        let k = KernelSpec::Gaussian { gamma };
        k.validate()?;
        Ok(k)
    }

    /// Gaussian kernel with `gamma = 1 / dim`.
    pub fn default_gaussian(dim: usize) -> Self {
        KernelSpec::Gaussian {
            gamma: 1.0 / dim.max(1) as f64,
        }
    }

    pub fn polynomial(degree: u32, coef0: f64) -> Result<Self> {
        let k = KernelSpec::Polynomial { degree, coef0 };
        k.validate()?;
        Ok(k)
    }

    /// `(<x, y> + 1)^3`
    pub fn default_polynomial() -> Self {
        KernelSpec::Polynomial { degree: 3, coef0: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::Gaussian { .. } => "gaussian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree, coef0 } => {
                if degree == 0 {
                    Err(Error::InvalidParameter { name: "degree", value: 0.0 })
                } else if !coef0.is_finite() {
                    Err(Error::InvalidParameter { name: "coef0", value: coef0 })
                } else {
                    Ok(())
                }
            }
            KernelSpec::Gaussian { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { name: "gamma", value: gamma })
                }
            }
        }
    }

    /// Kernel value without a dimension check.
    pub(crate) fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, coef0 } => libm::pow(dot(x, y) + coef0, degree as f64),
            KernelSpec::Gaussian { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-gamma * d2)
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Evaluates `spec` on two feature vectors of equal length.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(spec.apply(x, y))
}
