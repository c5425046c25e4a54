//! Comparison measures between signals.

use crate::error::{Error, Result};

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::invalid(format!(
            "correlation needs two sequences of equal length >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::invalid("correlation is undefined for a constant sequence"));
    }
    Ok(sab / (saa.sqrt() * sbb.sqrt()))
}

/// `‖a - b‖₂ / ‖b‖₂`.
pub fn relative_error(a: &[f64], reference: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.iter().zip(reference) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}
