use crate::error::{LtllError, Result};

/// Bisection on a bracketing interval. Returns the midpoint of the final
/// bracket once its width is at most `tol`, or an exact root if one is hit.
pub fn bisect_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) || !(lo < hi) {
        return Err(LtllError::Domain(format!(
            "bisection needs lo < hi and tol > 0 (lo = {lo}, hi = {hi}, tol = {tol})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (f_lo, f_hi) = (f(a), f(b));
    if f_lo == 0.0 {
        return Ok(a);
    }
    if f_hi == 0.0 {
        return Ok(b);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(LtllError::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut fa = f_lo;
    // 2000 halvings exhaust any f64 interval
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
