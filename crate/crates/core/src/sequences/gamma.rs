use crate::error::{Error, Result};

/// Growth rate of the recursive h-superincreasing base sequence: the largest
/// positive root of `x^(h+1) - 2x^h + 1`, skipping the trivial root at 1.
///
/// For `h >= 2` the root lies in `(2h/(h+1), 2)`, where the polynomial is
/// increasing, and is found by bisection to within 1e-12. For `h = 1` the
/// polynomial is `(x-1)^2` and the result is 1.
pub fn gamma_bound(h: usize) -> Result<f64> {
    if h == 0 {
        return Err(Error::InvalidInput("h must be at least 1".into()));
    }
    if h == 1 {
        return Ok(1.0);
    }
    let hf = h as f64;
    // x^h (x - 2) + 1 < 0  <=>  h ln x + ln(2 - x) > 0, which stays finite for large h.
    let below_root = |x: f64| hf * x.ln() + (2.0 - x).ln() > 0.0;
    let (mut lo, mut hi) = (2.0 * hf / (hf + 1.0), 2.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below_root(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
