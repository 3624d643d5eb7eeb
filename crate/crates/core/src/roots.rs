//! Bracketed root refinement on sampled grids.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 200;

/// A root located by a grid scan: either a grid point where the function is
/// exactly zero or a cell with a strict sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Bracket {
    Exact(f64),
    Interval(f64, f64),
}

/// Samples `f` at `cells + 1` evenly spaced points on `[lo, hi]`.
pub(crate) fn scan<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, cells: usize) -> Vec<Bracket> {
    let step = (hi - lo) / cells as f64;
    let xs: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { hi } else { lo + step * i as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..=cells {
        if ys[i] == 0.0 {
            out.push(Bracket::Exact(xs[i]));
        } else if i < cells && ys[i + 1] != 0.0 && (ys[i] < 0.0) != (ys[i + 1] < 0.0) {
            // NaN samples compare false on both sides and never bracket
            if ys[i].is_finite() && ys[i + 1].is_finite() {
                out.push(Bracket::Interval(xs[i], xs[i + 1]));
            }
        }
    }
    out
}

/// Bisection until the bracket is narrower than `tol` (or cannot shrink).
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NumericalFailure {
        context: format!("bisection on [{lo}, {hi}]"),
        iterations: MAX_BISECTIONS,
    })
}

/// Newton steps from `x`, each accepted only if it stays inside `[lo, hi]`
/// and does not increase `|f|`.
pub(crate) fn polish<F, D>(f: &F, df: &D, mut x: f64, lo: f64, hi: f64, steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fx = f(x);
    for _ in 0..steps {
        let slope = df(x);
        if fx == 0.0 || slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - fx / slope;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let f_next = f(next);
        if f_next.abs() > fx.abs() {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

/// Bisection to `tol` followed by a Newton polish inside the bracket.
pub(crate) fn refine<F, D>(f: &F, df: &D, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    match bracket {
        Bracket::Exact(x) => Ok(x),
        Bracket::Interval(lo, hi) => {
            let x = bisect(f, lo, hi, tol)?;
            Ok(polish(f, df, x, lo, hi, 4))
        }
    }
}
