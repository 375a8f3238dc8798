use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 0 when `degenerate`.
    pub r2: f64,
    pub n: usize,
    /// All x or all y identical, so r² is undefined.
    pub degenerate: bool,
}

/// Ordinary least squares with intercept, computed from centered sums.
///
/// When every x (or every y) is the same the fit is flagged degenerate:
/// slope 0, intercept the mean of y, r² 0.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<RegressionFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::Input(format!(
            "a line fit needs at least 2 points, got {n}"
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Input("fit points must be finite".into()));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;

    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let all_x_equal = points.iter().all(|p| p.0 == points[0].0);
    let all_y_equal = points.iter().all(|p| p.1 == points[0].1);
    if all_x_equal || all_y_equal || sxx == 0.0 || syy == 0.0 {
        return Ok(RegressionFit {
            slope: 0.0,
            intercept: mean_y,
            r2: 0.0,
            n,
            degenerate: true,
        });
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(RegressionFit {
        slope,
        intercept,
        r2,
        n,
        degenerate: false,
    })
}
