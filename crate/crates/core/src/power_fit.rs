//! Constrained least-squares fit of the saturating power law `g(x) = alpha * x^beta`.
//!
//! The feasible region is `alpha > acc_max / fin_epoch` and `0 < beta < 1`,
//! realized as closed bounds with a small margin. For a fixed `beta` the
//! optimal `alpha` has a closed form; that value is projected onto its
//! bound, leaving a one-dimensional search over `beta`. The search scans a
//! uniform grid and then refines the best cell (and the cell holding the
//! log-log regression slope, when available) by golden-section search.

use crate::error::{Error, Result};

/// Margin added to the lower bound on `alpha`.
pub const ALPHA_MARGIN: f64 = 1e-12;
pub const BETA_MIN: f64 = 1e-6;
pub const BETA_MAX: f64 = 1.0 - 1e-6;
/// Points in the initial `beta` scan.
pub const BETA_GRID: usize = 512;
/// Width at which golden-section refinement stops.
pub const BETA_TOL: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Fitted parameters of `alpha * x^beta` and the context of the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub alpha: f64,
    pub beta: f64,
    /// Sum of squared residuals on the fitted points.
    pub sse: f64,
    pub acc_max: f64,
    pub fin_epoch: usize,
}

impl PowerFit {
    /// Lower bound on `alpha` used by the fit.
    pub fn alpha_floor(acc_max: f64, fin_epoch: usize) -> f64 {
        acc_max / fin_epoch as f64 + ALPHA_MARGIN
    }

    /// Raw model value at `epoch`.
    pub fn eval(&self, epoch: f64) -> f64 {
        self.alpha * libm::pow(epoch, self.beta)
    }

    /// Extrapolated accuracy at `fin_epoch`, clamped to `[acc_max, 1]`.
    pub fn predict_final(&self) -> f64 {
        predict_final(self)
    }
}

/// Closed-form least-squares `alpha` for a fixed `beta`, before projection.
pub fn unconstrained_alpha(points: &[(usize, f64)], beta: f64) -> f64 {
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(e, a)| {
        let xb = libm::pow(e as f64, beta);
        (num + a * xb, den + xb * xb)
    });
    num / den
}

struct Problem<'a> {
    log_epochs: &'a [f64],
    accs: &'a [f64],
    alpha_floor: f64,
}

impl Problem<'_> {
    /// Constrained `alpha` and the resulting SSE for a fixed `beta`.
    fn profile(&self, beta: f64) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&lx, &a) in self.log_epochs.iter().zip(self.accs) {
            let xb = libm::exp(beta * lx);
            num += a * xb;
            den += xb * xb;
        }
        let alpha = (num / den).max(self.alpha_floor);
        let sse = self
            .log_epochs
            .iter()
            .zip(self.accs)
            .map(|(&lx, &a)| {
                let r = a - alpha * libm::exp(beta * lx);
                r * r
            })
            .sum();
        (alpha, sse)
    }

    fn golden(&self, mut lo: f64, mut hi: f64) -> (f64, f64) {
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.profile(x1).1;
        let mut f2 = self.profile(x2).1;
        while hi - lo > BETA_TOL {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.profile(x1).1;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.profile(x2).1;
            }
        }
        let mid = 0.5 * (lo + hi);
        // The bracket ends may beat the interior when the minimum sits on a bound.
        [mid, lo, hi]
            .into_iter()
            .map(|b| (b, self.profile(b).1))
            .fold((mid, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
    }
}

fn grid_beta(i: usize) -> f64 {
    BETA_MIN + (BETA_MAX - BETA_MIN) * i as f64 / (BETA_GRID - 1) as f64
}

/// Slope of the log-log regression `ln a = ln alpha + beta ln x`, if all accuracies are positive.
fn log_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.iter().any(|&(_, a)| a <= 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), &(e, a)| {
        (sx + libm::log(e as f64), sy + libm::log(a))
    });
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(e, a)| {
        let dx = libm::log(e as f64) - mx;
        (sxy + dx * (libm::log(a) - my), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

/// Constrained nonlinear least-squares fit of `alpha * epoch^beta` to `points`.
///
/// `points` are `(epoch, accuracy)` pairs with 1-based epochs. `acc_max` is
/// the largest observed accuracy and `fin_epoch` the epoch budget; together
/// they set the lower bound on `alpha`.
pub fn fit_power_law(points: &[(usize, f64)], acc_max: f64, fin_epoch: usize) -> Result<PowerFit> {
    let mut distinct = 0;
    for (i, &(e, a)) in points.iter().enumerate() {
        if e == 0 {
            return Err(Error::InvalidCurve("epochs are 1-based".into()));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidCurve(alloc::format!("accuracy {a} outside [0, 1]")));
        }
        if !points[..i].iter().any(|&(e2, _)| e2 == e) {
            distinct += 1;
        }
    }
    if distinct < 2 {
        return Err(Error::TooFewPoints(distinct));
    }
    if !(0.0..=1.0).contains(&acc_max) {
        return Err(Error::InvalidParameter { name: "acc_max", value: acc_max });
    }
    let max_epoch = points.iter().map(|p| p.0).max().unwrap_or(0);
    if fin_epoch < max_epoch {
        return Err(Error::InvalidParameter {
            name: "fin_epoch",
            value: fin_epoch as f64,
        });
    }
    if points.iter().all(|&(_, a)| a == 0.0) {
        return Err(Error::DegenerateCurve);
    }

    let log_epochs: alloc::vec::Vec<f64> = points.iter().map(|&(e, _)| libm::log(e as f64)).collect();
    let accs: alloc::vec::Vec<f64> = points.iter().map(|p| p.1).collect();
    let problem = Problem {
        log_epochs: &log_epochs,
        accs: &accs,
        alpha_floor: PowerFit::alpha_floor(acc_max, fin_epoch),
    };

    let mut best_cell = 0;
    let mut best_sse = f64::INFINITY;
    for i in 0..BETA_GRID {
        let sse = problem.profile(grid_beta(i)).1;
        if sse < best_sse {
            best_sse = sse;
            best_cell = i;
        }
    }
    let mut cells = alloc::vec![best_cell];
    if let Some(slope) = log_log_slope(points) {
        if slope > BETA_MIN && slope < BETA_MAX {
            let warm = libm::round((slope - BETA_MIN) / (BETA_MAX - BETA_MIN) * (BETA_GRID - 1) as f64) as usize;
            if warm != best_cell {
                cells.push(warm.min(BETA_GRID - 1));
            }
        }
    }

    let mut beta = grid_beta(best_cell);
    let mut sse = best_sse;
    for cell in cells {
        let lo = grid_beta(cell.saturating_sub(1));
        let hi = grid_beta((cell + 1).min(BETA_GRID - 1));
        let (b, f) = problem.golden(lo, hi);
        if f < sse {
            beta = b;
            sse = f;
        }
    }
    let (alpha, sse_final) = problem.profile(beta);
    debug_assert!((sse_final - sse).abs() <= 1e-15 + 1e-12 * sse);
    Ok(PowerFit {
        alpha,
        beta,
        sse: sse_final,
        acc_max,
        fin_epoch,
    })
}

/// `alpha * fin_epoch^beta`, clamped to `[acc_max, 1]`.
pub fn predict_final(fit: &PowerFit) -> f64 {
    fit.eval(fit.fin_epoch as f64).max(fit.acc_max).min(1.0)
}
