//! Small numerical utilities shared across the crate: safeguarded bisection,
//! golden-section minimization, Gauss-Legendre quadrature and a stable
//! arccosh near 1.

use crate::error::{numerical, Error, Result};

/// Safeguarded bisection on a bracketing interval.
///
/// Requires a sign change on `[lo, hi]`. Iterates until the interval shrinks
/// to relative machine precision, then checks that the residual is below
/// `tol_residual` (the roots used here are all simple, so this is a cheap
/// guarantee rather than a convergence criterion).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol_residual: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() {
        return numerical(format!("bisection endpoints not finite: f({lo})={flo}, f({hi})={fhi}"));
    }
    if flo * fhi > 0.0 {
        return numerical(format!(
            "bisection bracket failure on [{lo}, {hi}]: f has signs ({flo:.3e}, {fhi:.3e})"
        ));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval collapsed to adjacent floats
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let res = f(mid).abs();
    if res > tol_residual {
        return numerical(format!(
            "bisection converged to x={mid} but residual {res:.3e} exceeds {tol_residual:.1e}"
        ));
    }
    Ok(mid)
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol_x: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (lo, hi);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol_x {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// 64-point Gauss-Legendre nodes/weights on [-1, 1], generated by Newton
/// iteration on the Legendre polynomial (standard Golub-Welsch-free recipe).
fn gauss_legendre_64() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static TABLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 64usize;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and P'_n(x)
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            xs[i] = -x;
            xs[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            ws[i] = w;
            ws[n - 1 - i] = w;
        }
        (xs, ws)
    })
}

/// 64-point Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (xs, ws) = gauss_legendre_64();
    let c = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut s = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        s += w * f(m + c * x);
    }
    c * s
}

/// arccosh(1 + x) for x >= 0, accurate for tiny x where the naive form
/// loses all digits (needed because r(a) -> 0 with a square-root cusp).
pub fn acosh1p(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    (x + (x * (2.0 + x)).sqrt()).ln_1p()
}

/// Linear interpolation of tabulated samples `(xs, ys)` (xs strictly
/// increasing) at `x`; errors outside the table.
pub fn lerp_table(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.len() < 2 || x < xs[0] || x > xs[xs.len() - 1] {
        return Err(Error::Domain(format!(
            "interpolation point {x} outside table range [{}, {}]",
            xs.first().copied().unwrap_or(f64::NAN),
            xs.last().copied().unwrap_or(f64::NAN)
        )));
    }
    let j = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
        Ok(j) => return Ok(ys[j]),
        Err(j) => j.clamp(1, xs.len() - 1),
    };
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    Ok(ys[j - 1] * (1.0 - t) + ys[j] * t)
}

/// Log-spaced grid from `lo` to `hi` inclusive (endpoints exact).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_simple_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        // degree-127 exactness is overkill; spot-check a transcendental
        let v = gauss_legendre(f64::sin, 0.0, std::f64::consts::PI);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn acosh1p_matches_naive_form_away_from_one() {
        for &x in &[1e-3, 0.1, 1.0, 10.0] {
            assert!((acosh1p(x) - (1.0 + x).acosh()).abs() < 1e-13);
        }
        // and stays finite/positive where the naive form loses digits
        assert!(acosh1p(1e-18) > 0.0);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, _) = golden_min(|x| (x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
    }
}
