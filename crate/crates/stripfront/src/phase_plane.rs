//! Phase-plane quantities of the stationary equation v'' + f(x, v) = 0.
//!
//! Inside the strip the trajectory through (a, 0) is the graph of
//! w² = v² - a², i.e. v = a·cosh(x - c). Outside, orbits conserve
//! E = w²/2 + F_l(v). The two intersection ordinates are
//!
//!   v₁(a): cosh trajectory meets the outer heteroclinic level E = F_l(1),
//!          the unique root of v² - a² = 2∫_v¹ f_l in (a, 1);
//!   v₂(a): cosh trajectory meets the homoclinic level E = 0,
//!          the unique root of v² - a² = -2∫₀^v f_l in (a, θ], only for a ≤ θ.
//!
//! The spans R(a) = arccosh(v₁/a), r(a) = arccosh(v₂/a) and ℓ(a) = R - r
//! measure how much strip width the cosh piece consumes between those
//! junctions; the critical half-width is L* = ℓ(θ)/2 = R(θ)/2.
//!
//! R and r are strictly decreasing in a. ℓ is **not** monotone up to θ:
//! since v₂(a) - a vanishes linearly, r(a) ~ C·√(θ-a) has a square-root cusp
//! at a = θ while R is smooth there, so ℓ decreases only up to an interior
//! minimum a*(α) and then rises into the endpoint. The infimum of ℓ is
//! therefore ℓ(a*) < ℓ(θ), and ℓ(a) = 2L has two roots for
//! 2L ∈ (ℓ(a*), ℓ(θ)]. See `ell_interior_minimum` and
//! `small_existence_half_width`; `critical_half_width` keeps the ℓ(θ)/2
//! definition, which is the true appearance threshold of the non-monotone
//! ground profile (R + r is genuinely monotone).

use crate::error::{domain, numerical, Result};
use crate::numerics::{acosh1p, bisect, golden_min, log_grid};
use crate::reaction::{
    bistable, potential, potential_at_one, potential_diff, tail_factor_one, theta,
};

/// Residual tolerance for all quartic root solves in this module.
const ROOT_TOL: f64 = 1e-12;

/// Intersection ordinates and spans for one well ordinate `a`.
///
/// `v2`, `small_span` and `ell` are present only when a ≤ θ(α) (beyond the
/// balance ordinate the cosh trajectory misses the homoclinic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanTable {
    pub a: f64,
    pub v1: f64,
    pub v2: Option<f64>,
    pub big_span: f64,
    pub small_span: Option<f64>,
    pub ell: Option<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("alpha must lie in (0, 0.5); got {alpha}"));
    }
    Ok(())
}

/// h(v) = v² - a² - 2∫_v¹ f_l, written through the exact quartic tail factor
/// so that no O(1) cancellation occurs near v = 1.
#[inline]
fn outer_junction_residual(alpha: f64, a: f64, v: f64) -> f64 {
    let z = 1.0 - v;
    v * v - a * a - z * z * tail_factor_one(alpha, z)
}

/// The unique root v₁ ∈ (a, 1) of v² - a² = 2∫_v¹ f_l.
///
/// h(a) = -2∫_a¹ f_l < 0 and h(1) = 1 - a² > 0 bracket the root, and
/// h'(v) = 2v + 2f_l(v) > 0 makes it unique.
pub fn v1_of_a(alpha: f64, a: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("v1_of_a requires a in (0, 1); got {a}"));
    }
    let v = bisect(|v| outer_junction_residual(alpha, a, v), a, 1.0, ROOT_TOL)?;
    Ok(v)
}

/// v₂(a) - a for 0 < a ≤ θ, solved in the offset d = v - a to keep relative
/// accuracy as the root collapses onto a near the balance ordinate.
fn v2_delta(alpha: f64, a: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let th = theta(alpha)?;
    if !(a > 0.0) {
        return domain(format!("v2_of_a requires a > 0; got {a}"));
    }
    if a > th {
        return domain(format!(
            "v2_of_a: no intersection with the homoclinic for a = {a} > theta = {th}"
        ));
    }
    if a == th {
        return Ok(0.0); // degenerate tangency, returned exactly
    }
    let h2 = |d: f64| d * (2.0 * a + d) + 2.0 * (potential(alpha, a) + potential_diff(alpha, a, d));
    let d = bisect(h2, 0.0, th - a, ROOT_TOL)?;
    Ok(d)
}

/// The unique root v₂ ∈ (a, θ] of v² - a² = -2∫₀^v f_l; exactly θ at a = θ.
pub fn v2_of_a(alpha: f64, a: f64) -> Result<f64> {
    Ok(a + v2_delta(alpha, a)?)
}

/// Spans of the cosh trajectory through (a, 0): R = arccosh(v₁/a), and for
/// a ≤ θ also r = arccosh(v₂/a) and ℓ = R - r.
pub fn spans(alpha: f64, a: f64) -> Result<SpanTable> {
    let v1 = v1_of_a(alpha, a)?;
    let big_span = acosh1p((v1 - a) / a);
    let th = theta(alpha)?;
    if a <= th {
        let d = v2_delta(alpha, a)?;
        let small_span = acosh1p(d / a);
        Ok(SpanTable {
            a,
            v1,
            v2: Some(a + d),
            big_span,
            small_span: Some(small_span),
            ell: Some(big_span - small_span),
        })
    } else {
        Ok(SpanTable { a, v1, v2: None, big_span, small_span: None, ell: None })
    }
}

/// L* = ℓ(θ)/2 = R(θ)/2 (r(θ) = 0): the appearance threshold of the ground
/// profile, and the half-width scale all regime comparisons use.
pub fn critical_half_width(alpha: f64) -> Result<f64> {
    let th = theta(alpha)?;
    let v1 = v1_of_a(alpha, th)?;
    Ok(0.5 * acosh1p((v1 - th) / th))
}

/// The interior minimum of ℓ on (0, θ): returns (a*, ℓ(a*)).
///
/// Located by a coarse log-grid scan followed by golden-section refinement;
/// ℓ(a*) is the true infimum of ℓ (strictly below ℓ(θ) = 2L*).
pub fn ell_interior_minimum(alpha: f64) -> Result<(f64, f64)> {
    let th = theta(alpha)?;
    let ell = |a: f64| -> f64 {
        match spans(alpha, a) {
            Ok(t) => t.ell.unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let grid = log_grid(1e-4, th * (1.0 - 1e-13), 256);
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for (i, &a) in grid.iter().enumerate() {
        let e = ell(a);
        if e < best_val {
            best_val = e;
            best = i;
        }
    }
    if best == 0 || best + 1 == grid.len() {
        return numerical(format!(
            "ell minimum scan hit the grid boundary at alpha = {alpha} (index {best})"
        ));
    }
    let (a_star, ell_min) = golden_min(ell, grid[best - 1], grid[best + 1], 1e-13 * th);
    Ok((a_star, ell_min))
}

/// The true existence threshold L_s = ℓ(a*)/2 of small-type profiles:
/// ℓ(a) = 2L is solvable iff L ≥ L_s. Strictly below `critical_half_width`.
pub fn small_existence_half_width(alpha: f64) -> Result<f64> {
    Ok(ell_interior_minimum(alpha)?.1 / 2.0)
}

/// Infimum of ℓ over an n-point log grid on [1e-4, θ] — the tabulated route
/// to the infimum. Because of the endpoint cusp this settles near ℓ(a*),
/// not near ℓ(θ).
pub fn ell_grid_infimum(alpha: f64, n: usize) -> Result<f64> {
    let th = theta(alpha)?;
    let mut inf = f64::INFINITY;
    for a in log_grid(1e-4, th, n) {
        if let Some(e) = spans(alpha, a)?.ell {
            inf = inf.min(e);
        }
    }
    Ok(inf)
}

/// Rows of (a, v₁, v₂, R, r, ℓ) over an increasing grid of a (the Figure-2
/// style dataset). The grid must stay inside (0, θ].
pub fn span_curve(alpha: f64, a_grid: &[f64]) -> Result<Vec<SpanTable>> {
    let th = theta(alpha)?;
    if a_grid.is_empty() {
        return domain("span_curve: empty a grid");
    }
    for w in a_grid.windows(2) {
        if w[1] <= w[0] {
            return domain(format!("span_curve: grid not strictly increasing at {} -> {}", w[0], w[1]));
        }
    }
    if a_grid[0] <= 0.0 || *a_grid.last().unwrap() > th {
        return domain(format!(
            "span_curve: grid must lie in (0, theta = {th}]; got [{}, {}]",
            a_grid[0],
            a_grid.last().unwrap()
        ));
    }
    a_grid.iter().map(|&a| spans(alpha, a)).collect()
}
