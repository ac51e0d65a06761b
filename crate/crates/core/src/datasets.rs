//! Synthetic datasets used by the experiments.

use crate::error::Result;
use crate::kernel::Point;
use crate::numerics::RngStream;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledData {
    pub y: Vec<f64>,
    pub labels: Vec<usize>,
}

/// Two-component 1-d Gaussian mixture with equal weights.
pub fn two_gaussians(n: usize, means: (f64, f64), sd: f64, rng: &mut RngStream) -> LabeledData {
    let mut y = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let z = usize::from(rng.uniform() < 0.5);
        let m = if z == 0 { means.0 } else { means.1 };
        y.push(m + sd * rng.normal());
        labels.push(z);
    }
    LabeledData { y, labels }
}

/// Components at ±1 with unit variance.
pub fn poor_sep(n: usize, rng: &mut RngStream) -> LabeledData {
    two_gaussians(n, (-1.0, 1.0), 1.0, rng)
}

/// Components at ±3 with unit variance.
pub fn well_sep(n: usize, rng: &mut RngStream) -> LabeledData {
    two_gaussians(n, (-3.0, 3.0), 1.0, rng)
}

pub const RARE_FRACTION: f64 = 0.02;
pub const RARE_OFFSET: f64 = 6.0;

/// Pose surrogate in `d` dimensions: a dominant standard normal mode plus a
/// 2% mode at distance 6 along the first axis with half the spread.
pub fn rare_mode(n: usize, d: usize, rng: &mut RngStream) -> Result<Vec<Point>> {
    let n_rare = ((n as f64) * RARE_FRACTION).round() as usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        if i < n_rare {
            for v in x.iter_mut() {
                *v *= 0.5;
            }
            x[0] += RARE_OFFSET;
        }
        out.push(x);
    }
    Ok(out)
}
