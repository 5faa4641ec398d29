use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Largest `|analytic - central| / (|analytic| + |central| + 1e-12)`
    /// over the coordinates that were compared.
    pub max_rel_error: f64,
    /// Coordinate attaining `max_rel_error`.
    pub worst_index: Option<usize>,
    pub checked: usize,
    /// Coordinates where the one-sided differences disagree in a way only a
    /// kink explains; they are excluded from the error metric.
    pub kinks: Vec<usize>,
}

/// Compares an analytic gradient against central differences.
///
/// `f` maps a parameter vector to `(value, analytic gradient)`. It is
/// evaluated twice at `params` first; any disagreement means `f` is not
/// deterministic and the check is rejected.
pub fn finite_diff_check<F>(mut f: F, params: &[f64], step: f64) -> Result<GradCheckReport>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::invalid("finite difference step must lie in (0, 1e-3]"));
    }
    let (v0, analytic) = f(params)?;
    let (v1, analytic_again) = f(params)?;
    if v0.to_bits() != v1.to_bits() || analytic != analytic_again {
        return Err(Error::NonDeterministic);
    }
    if analytic.len() != params.len() {
        return Err(Error::invalid("gradient length differs from parameter count"));
    }

    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_index: None,
        checked: 0,
        kinks: Vec::new(),
    };
    let mut p = params.to_vec();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + step;
        let plus = f(&p)?.0;
        p[i] = orig - step;
        let minus = f(&p)?.0;
        p[i] = orig;

        let forward = (plus - v0) / step;
        let backward = (v0 - minus) / step;
        // Smooth functions give one-sided slopes that differ by O(step); a
        // kink inside the stencil makes them differ by O(1).
        let spread = libm::fabs(forward - backward);
        if spread > 1e-2 * (libm::fabs(forward) + libm::fabs(backward)) + 1e-6 {
            report.kinks.push(i);
            continue;
        }
        let central = (plus - minus) / (2.0 * step);
        let a = analytic[i];
        let err = libm::fabs(a - central) / (libm::fabs(a) + libm::fabs(central) + 1e-12);
        report.checked += 1;
        if err > report.max_rel_error || report.worst_index.is_none() {
            report.max_rel_error = err;
            report.worst_index = Some(i);
        }
    }
    Ok(report)
}
