//! Exact piecewise stationary profiles of v'' + f(x, v) = 0.
//!
//! Every profile glues an explicit a·cosh(x - c) strip piece to outer orbits
//! of the autonomous bistable equation, selected by their conserved energy
//! E = w²/2 + F_l(v):
//!
//! * big:    minimum a at x = 0, R(a) = L, outer pieces ride the E = F_l(1)
//!           level up to 1 on both sides;
//! * small:  strictly decreasing, ℓ(a) = 2L (stable branch), left piece to 1,
//!           right piece rides the homoclinic E = 0 down to 0;
//! * ground: ℓ-center inside the strip, R(a) + r(a) = 2L, right piece climbs
//!           the homoclinic to its apex θ at x₂ > L and then decays;
//! * compact bump: even solution of the outer equation with peak a ∈ (θ, 1)
//!           and compact support [-x₀, x₀];
//! * periodic: closed orbit around (α, 0) through (a, 0), 0 < a < α;
//! * barrier: weak upper solution 1+ε₀ / Γ₅* / cosh-type strip piece /
//!           periodic tail, C¹ except for a downward corner at -L̄.
//!
//! Outward integration of the second-order system into the saddles (1,0) and
//! (0,0) is exponentially ill-conditioned (transverse errors grow like
//! e^{2λ·span}), so saddle-bound stretches integrate the energy-restricted
//! first-order equation in the contracting variable instead: z' = -z·√G₁(z)
//! toward v = 1 and v' = -v·√G₀(v) toward 0, where G are the exact quartic
//! energy factors (no cancellation). Turning points and compact orbits, which
//! are well-conditioned, use the plain second-order system. Tails switch to
//! the linearized exponential once the deviation drops below 1e-8.

use crate::error::{domain, numerical, Error, Result};
use crate::grid::Grid1D;
use crate::numerics::lerp_table;
use crate::ode::Dopri5;
use crate::phase_plane::{critical_half_width, ell_interior_minimum, spans, v1_of_a, v2_of_a};
use crate::reaction::{
    bistable, potential, potential_at_one, reaction_value, tail_factor_one, tail_factor_zero,
    theta, ModelParams,
};

/// Tail switch threshold: beyond it the nonlinear orbit is replaced by its
/// linearization (rates √(1-α) toward 1, √α toward 0).
pub const TAIL_SWITCH: f64 = 1e-8;
/// Distance from a turning point below which the second-order system takes
/// over from the energy-restricted first-order form.
const APEX_BAND: f64 = 1e-5;
/// Matching tolerance at the strip edges.
pub const MATCH_TOL: f64 = 1e-8;
const RTOL: f64 = 1e-10;
const ATOL_2D: f64 = 1e-12;
const TINY: f64 = f64::MIN_POSITIVE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Big,
    Small,
    Ground,
    CompactBump,
    Periodic,
    Barrier,
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProfileKind::Big => "big",
            ProfileKind::Small => "small",
            ProfileKind::Ground => "ground",
            ProfileKind::CompactBump => "bump",
            ProfileKind::Periodic => "periodic",
            ProfileKind::Barrier => "barrier",
        };
        f.write_str(s)
    }
}

/// Junction residuals |Δv|, |Δv'| at the strip edges.
#[derive(Debug, Clone, Copy)]
pub struct MatchingReport {
    pub dv_left: f64,
    pub dw_left: f64,
    pub dv_right: f64,
    pub dw_right: f64,
}

impl MatchingReport {
    pub fn worst(&self) -> f64 {
        self.dv_left.max(self.dw_left).max(self.dv_right).max(self.dw_right)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Meta {
    /// interior minimum location (ground)
    pub x1: Option<f64>,
    /// right maximum with v = θ (ground)
    pub x2: Option<f64>,
    /// support radius x₀ (compact bump)
    pub support_radius: Option<f64>,
    /// slope at +x₀ (compact bump)
    pub edge_slope: Option<f64>,
    /// orbit period (periodic)
    pub period: Option<f64>,
    /// plateau level 1+ε₀ (barrier)
    pub plateau: Option<f64>,
    /// corner abscissa -L̄ (barrier)
    pub corner: Option<f64>,
    /// V̄'(-L̄-0) - V̄'(-L̄+0) > 0 (barrier)
    pub corner_jump: Option<f64>,
    /// ε with V̄ - 𝒱_s ≥ 3ε (barrier)
    pub clearance_epsilon: Option<f64>,
    /// ε₁ = min V̄ > 0 (barrier)
    pub floor: Option<f64>,
    pub matching: Option<MatchingReport>,
}

/// A sampled stationary object. `xs` is strictly increasing; for grid-built
/// kinds it is the caller's grid, for the bump it is the support slice of the
/// grid plus the exact endpoints ±x₀, for the periodic orbit one period.
#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub kind: ProfileKind,
    pub alpha: f64,
    pub half_width: f64,
    pub a: f64,
    pub center_shift: f64,
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
    pub meta: Meta,
}

impl StationaryProfile {
    /// Linear interpolation between samples.
    pub fn eval(&self, x: f64) -> Result<f64> {
        lerp_table(&self.xs, &self.vs, x)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

// ---------------------------------------------------------------------------
// well-parameter solves

fn big_span_of(alpha: f64, a: f64) -> Result<f64> {
    Ok(spans(alpha, a)?.big_span)
}

/// The unique a ∈ (0,1) with R(a) = L (exists for every L > 0).
pub fn solve_a_big(p: &ModelParams) -> Result<f64> {
    let (alpha, l) = (p.alpha(), p.half_width());
    if !(l > 0.0) {
        return domain("solve_a_big requires a positive strip half-width");
    }
    let hi = 1.0 - 1e-13;
    let mut lo = 0.25;
    while big_span_of(alpha, lo)? < l {
        lo *= 0.25;
        if lo < 1e-250 {
            return numerical(format!("could not bracket R(a) = {l}"));
        }
    }
    let f = |a: f64| big_span_of(alpha, a).unwrap_or(f64::NAN) - l;
    crate::numerics::bisect(f, lo, hi, 1e-10)
}

fn ell_of(alpha: f64, a: f64) -> Result<f64> {
    spans(alpha, a)?
        .ell
        .ok_or_else(|| Error::Domain(format!("ell undefined at a = {a} (beyond theta)")))
}

/// The stable small-profile parameter: the smallest root of ℓ(a) = 2L.
///
/// ℓ decreases from +∞ to its interior minimum ℓ(a*) and then rises into the
/// cusp at θ, so the equation is solvable iff 2L ≥ ℓ(a*) — i.e. L ≥ L_s, a
/// threshold strictly below L* = ℓ(θ)/2. For 2L ∈ [ℓ(a*), ℓ(θ)] a second
/// root exists on the rising branch (see `solve_a_small_upper`); that branch
/// continues the unstable ground family and is not what residue dynamics
/// selects, so this function always returns the left root.
pub fn solve_a_small(p: &ModelParams) -> Result<f64> {
    let (alpha, l) = (p.alpha(), p.half_width());
    let (a_star, ell_min) = ell_interior_minimum(alpha)?;
    let target = 2.0 * l;
    if target < ell_min - 1e-12 {
        return domain(format!(
            "no small profile: 2L = {target} is below the ell minimum {ell_min} (L_s = {})",
            ell_min / 2.0
        ));
    }
    if target <= ell_min {
        return Ok(a_star);
    }
    let mut lo = a_star * 0.5;
    while ell_of(alpha, lo)? < target {
        lo *= 0.5;
        if lo < 1e-250 {
            return numerical(format!("could not bracket ell(a) = {target}"));
        }
    }
    let f = |a: f64| ell_of(alpha, a).unwrap_or(f64::NAN) - target;
    crate::numerics::bisect(f, lo, a_star, 1e-10)
}

/// The second (unstable-branch) root of ℓ(a) = 2L on [a*, θ], which exists
/// for L ∈ [L_s, L*]; equals θ at L = L*. Diagnostic only.
pub fn solve_a_small_upper(p: &ModelParams) -> Result<f64> {
    let (alpha, l) = (p.alpha(), p.half_width());
    let th = theta(alpha)?;
    let (a_star, ell_min) = ell_interior_minimum(alpha)?;
    let target = 2.0 * l;
    let ell_theta = 2.0 * critical_half_width(alpha)?;
    if target < ell_min - 1e-12 || target > ell_theta + 1e-12 {
        return domain(format!(
            "upper small branch needs 2L in [{ell_min}, {ell_theta}]; got {target}"
        ));
    }
    if (target - ell_theta).abs() <= 1e-12 {
        return Ok(th);
    }
    if target <= ell_min {
        return Ok(a_star);
    }
    let f = |a: f64| ell_of(alpha, a).unwrap_or(f64::NAN) - target;
    crate::numerics::bisect(f, a_star, th, 1e-10)
}

/// The unique a ∈ (0, θ) with R(a) + r(a) = 2L; requires L > L* strictly
/// (R + r decreases monotonically onto 2L* at a = θ).
pub fn solve_a_ground(p: &ModelParams) -> Result<f64> {
    let (alpha, l) = (p.alpha(), p.half_width());
    let lstar = critical_half_width(alpha)?;
    if l <= lstar {
        return domain(format!(
            "no ground profile: L = {l} must exceed the critical half-width L* = {lstar}"
        ));
    }
    let th = theta(alpha)?;
    let sum = |a: f64| -> Result<f64> {
        let t = spans(alpha, a)?;
        Ok(t.big_span + t.small_span.expect("a <= theta"))
    };
    let target = 2.0 * l;
    let hi = th * (1.0 - 1e-14);
    let mut lo = th * 0.5;
    while sum(lo)? < target {
        lo *= 0.5;
        if lo < 1e-250 {
            return numerical(format!("could not bracket R + r = {target}"));
        }
    }
    let f = |a: f64| sum(a).map(|s| s - target).unwrap_or(f64::NAN);
    crate::numerics::bisect(f, lo, hi, 1e-10)
}

// ---------------------------------------------------------------------------
// outer-piece samplers

/// Samples the E = F_l(1) orbit approaching v = 1, in the deviation z = 1 - v:
/// z' = -z√G₁(z) until z < TAIL_SWITCH, then z = z_s e^{-√(1-α)(ξ-ξ_s)}.
/// `targets` ascending, measured from the junction; returns z at each target.
fn sample_tail_to_one(alpha: f64, z0: f64, targets: &[f64]) -> Result<Vec<f64>> {
    let rate = (1.0 - alpha).sqrt();
    let mut out = Vec::with_capacity(targets.len());
    if z0 <= TAIL_SWITCH {
        for &t in targets {
            out.push(z0 * (-rate * t).exp());
        }
        return Ok(out);
    }
    let rhs = move |_x: f64, y: &[f64; 1]| [-y[0] * tail_factor_one(alpha, y[0]).max(0.0).sqrt()];
    let mut st = Dopri5::new(rhs, 0.0, [z0], RTOL, TINY);
    let mut switch: Option<(f64, f64)> = None;
    for &t in targets {
        match switch {
            Some((xs, zs)) => out.push(zs * (-rate * (t - xs)).exp()),
            None => {
                if st.advance_to_crossing(0, TAIL_SWITCH, t)? {
                    switch = Some((st.x, st.y[0]));
                    out.push(st.y[0] * (-rate * (t - st.x)).exp());
                } else {
                    out.push(st.y[0]);
                }
            }
        }
    }
    Ok(out)
}

/// Samples the homoclinic descent toward v = 0: v' = -v√G₀(v) until
/// v < TAIL_SWITCH, then v = v_s e^{-√α(ξ-ξ_s)}.
fn sample_tail_to_zero(alpha: f64, v0: f64, targets: &[f64]) -> Result<Vec<f64>> {
    let rate = alpha.sqrt();
    let mut out = Vec::with_capacity(targets.len());
    if v0 <= TAIL_SWITCH {
        for &t in targets {
            out.push(v0 * (-rate * t).exp());
        }
        return Ok(out);
    }
    let rhs = move |_x: f64, y: &[f64; 1]| [-y[0] * tail_factor_zero(alpha, y[0]).max(0.0).sqrt()];
    let mut st = Dopri5::new(rhs, 0.0, [v0], RTOL, TINY);
    let mut switch: Option<(f64, f64)> = None;
    for &t in targets {
        match switch {
            Some((xs, vs)) => out.push(vs * (-rate * (t - xs)).exp()),
            None => {
                if st.advance_to_crossing(0, TAIL_SWITCH, t)? {
                    switch = Some((st.x, st.y[0]));
                    out.push(st.y[0] * (-rate * (t - st.x)).exp());
                } else {
                    out.push(st.y[0]);
                }
            }
        }
    }
    Ok(out)
}

/// Samples the homoclinic right piece from a junction state (v_start, w_start)
/// at offset 0. Handles the ascending case (ground: climb to the apex θ at
/// some offset, recorded and returned, then descend) and the descending case
/// (small), including a start inside the apex band. Returns (values, apex
/// offset if crossed).
fn sample_homoclinic_right(
    alpha: f64,
    v_start: f64,
    w_start: f64,
    targets: &[f64],
) -> Result<(Vec<f64>, Option<f64>)> {
    let th = theta(alpha)?;
    let gate = th - APEX_BAND;
    let mut vals = Vec::with_capacity(targets.len());
    let mut apex: Option<f64> = None;

    // Phase boundaries first (event pass), then sampling with exact landing.
    let mut xi_arc_start = 0.0;
    let mut arc_entry = [v_start, w_start];
    let mut need_arc = w_start > 0.0 || v_start > gate;

    // 1-D ascend up to the apex band
    let mut ascend_end = 0.0;
    if w_start > 0.0 && v_start < gate {
        let rhs = move |_x: f64, y: &[f64; 1]| [y[0] * tail_factor_zero(alpha, y[0]).max(0.0).sqrt()];
        let mut st = Dopri5::new(rhs, 0.0, [v_start], RTOL, TINY);
        if !st.advance_to_crossing(0, gate, 1e4)? {
            return numerical("homoclinic ascent never reached the apex band");
        }
        ascend_end = st.x;
        let v = st.y[0];
        arc_entry = [v, v * tail_factor_zero(alpha, v).max(0.0).sqrt()];
        xi_arc_start = ascend_end;
        need_arc = true;
    }

    // second-order arc across the apex
    let mut arc_end = xi_arc_start;
    let mut descend_start_v = v_start;
    if need_arc {
        let rhs2 = move |_x: f64, y: &[f64; 2]| [y[1], -bistable(alpha, y[0])];
        let mut st = Dopri5::new(rhs2, xi_arc_start, arc_entry, RTOL, ATOL_2D);
        if st.y[1] > 0.0 {
            if !st.advance_to_crossing(1, 0.0, xi_arc_start + 1e4)? {
                return numerical("apex (w = 0) not reached on the homoclinic arc");
            }
            apex = Some(st.x);
        } else if st.y[1] == 0.0 {
            apex = Some(st.x);
        }
        if !st.advance_to_crossing(0, gate, st.x + 1e4)? {
            return numerical("homoclinic arc never left the apex band");
        }
        arc_end = st.x;
        descend_start_v = st.y[0];
    }

    // sampling pass
    let n_ascend = targets.iter().take_while(|&&t| t < ascend_end && need_arc).count();
    let in_arc_end = if need_arc { arc_end } else { 0.0 };
    let n_arc = targets[n_ascend..].iter().take_while(|&&t| t < in_arc_end).count();

    if n_ascend > 0 {
        let rhs = move |_x: f64, y: &[f64; 1]| [y[0] * tail_factor_zero(alpha, y[0]).max(0.0).sqrt()];
        let mut st = Dopri5::new(rhs, 0.0, [v_start], RTOL, TINY);
        for &t in &targets[..n_ascend] {
            st.advance_to(t)?;
            vals.push(st.y[0]);
        }
    }
    if need_arc && n_arc > 0 {
        let rhs2 = move |_x: f64, y: &[f64; 2]| [y[1], -bistable(alpha, y[0])];
        let mut st = Dopri5::new(rhs2, xi_arc_start, arc_entry, RTOL, ATOL_2D);
        for &t in &targets[n_ascend..n_ascend + n_arc] {
            st.advance_to(t)?;
            vals.push(st.y[0]);
        }
    }
    let rest: Vec<f64> = targets[n_ascend + n_arc..].iter().map(|&t| t - in_arc_end).collect();
    let tail_vals = sample_tail_to_zero(alpha, descend_start_v, &rest)?;
    vals.extend(tail_vals);
    Ok((vals, apex))
}

// ---------------------------------------------------------------------------
// assembly of the three strip profiles

fn partition_targets(grid: &Grid1D, l: f64) -> (Vec<f64>, Vec<usize>, Vec<f64>, Vec<usize>) {
    // left targets ξ = -x - L (ascending) with their node indices, and right
    // targets ξ = x - L (ascending) with theirs
    let mut left_xi = Vec::new();
    let mut left_idx = Vec::new();
    let mut right_xi = Vec::new();
    let mut right_idx = Vec::new();
    for i in 0..grid.n {
        let x = grid.node(i);
        if x < -l {
            left_xi.push(-x - l);
            left_idx.push(i);
        } else if x > l {
            right_xi.push(x - l);
            right_idx.push(i);
        }
    }
    left_xi.reverse();
    left_idx.reverse();
    (left_xi, left_idx, right_xi, right_idx)
}

/// Builds one of the three strip-anchored profiles (big / small / ground) on
/// the caller's grid. Verifies the C¹ matching at ±L to `MATCH_TOL`.
pub fn build_profile(kind: ProfileKind, p: &ModelParams, grid: &Grid1D) -> Result<StationaryProfile> {
    grid.check_covers_strip(p)?;
    let (alpha, l) = (p.alpha(), p.half_width());
    let (a, shift) = match kind {
        ProfileKind::Big => (solve_a_big(p)?, 0.0),
        ProfileKind::Small => {
            let a = solve_a_small(p)?;
            let t = spans(alpha, a)?;
            (a, 0.5 * (t.big_span + t.small_span.expect("small branch has r")))
        }
        ProfileKind::Ground => {
            let a = solve_a_ground(p)?;
            let t = spans(alpha, a)?;
            (a, 0.5 * (t.big_span - t.small_span.expect("ground has r")))
        }
        other => {
            return domain(format!(
                "build_profile handles big/small/ground; use the dedicated builder for {other}"
            ))
        }
    };

    let v1 = v1_of_a(alpha, a)?;
    let middle = |x: f64| a * (x - shift).cosh();
    let middle_w = |x: f64| a * (x - shift).sinh();

    // junction states implied by the energy levels
    let w1 = (v1 * v1 - a * a).max(0.0).sqrt(); // |slope| where the cosh meets the outer level
    let matching = {
        let (mv_l, mw_l) = (middle(-l), middle_w(-l));
        let (mv_r, mw_r) = (middle(l), middle_w(l));
        let (ov_r, ow_r) = match kind {
            ProfileKind::Big => (v1, w1),
            ProfileKind::Small | ProfileKind::Ground => {
                let v2 = v2_of_a(alpha, a)?;
                let w2 = ((v2 - a) * (v2 + a)).max(0.0).sqrt();
                (v2, if kind == ProfileKind::Ground { w2 } else { -w2 })
            }
            _ => unreachable!(),
        };
        MatchingReport {
            dv_left: (mv_l - v1).abs(),
            dw_left: (mw_l - (-w1)).abs(),
            dv_right: (mv_r - ov_r).abs(),
            dw_right: (mw_r - ow_r).abs(),
        }
    };
    if matching.worst() > MATCH_TOL {
        return numerical(format!(
            "matching violation for {kind}: worst junction residual {:.3e}",
            matching.worst()
        ));
    }

    let (left_xi, left_idx, right_xi, right_idx) = partition_targets(grid, l);

    // left outer piece: always the E = F_l(1) level climbing to 1
    let left_z = sample_tail_to_one(alpha, 1.0 - v1, &left_xi)?;

    // right outer piece
    let mut x2_offset = None;
    let right_v: Vec<f64> = match kind {
        ProfileKind::Big => sample_tail_to_one(alpha, 1.0 - v1, &right_xi)?
            .into_iter()
            .map(|z| 1.0 - z)
            .collect(),
        ProfileKind::Small | ProfileKind::Ground => {
            let v2 = v2_of_a(alpha, a)?;
            let w_junction = middle_w(l);
            let (vals, apex) = sample_homoclinic_right(alpha, v2, w_junction, &right_xi)?;
            x2_offset = apex;
            vals
        }
        _ => unreachable!(),
    };

    let mut vs = vec![0.0; grid.n];
    for i in 0..grid.n {
        let x = grid.node(i);
        if x.abs() <= l {
            vs[i] = middle(x);
        }
    }
    for (k, &i) in left_idx.iter().enumerate() {
        vs[i] = 1.0 - left_z[k];
    }
    for (k, &i) in right_idx.iter().enumerate() {
        vs[i] = right_v[k];
    }

    let mut meta = Meta { matching: Some(matching), ..Meta::default() };
    if kind == ProfileKind::Ground {
        meta.x1 = Some(shift);
        meta.x2 = x2_offset.map(|o| l + o);
        debug_assert!(shift > -l && shift < l);
    }
    Ok(StationaryProfile {
        kind,
        alpha,
        half_width: l,
        a,
        center_shift: shift,
        xs: grid.xs(),
        vs,
        meta,
    })
}

/// Builds the small profile for an explicit well parameter (either ℓ-branch);
/// used for diagnostics around the fold.
pub fn build_small_with_a(p: &ModelParams, a: f64, grid: &Grid1D) -> Result<StationaryProfile> {
    let t = spans(p.alpha(), a)?;
    let r = t.small_span.ok_or_else(|| Error::Domain(format!("a = {a} beyond theta")))?;
    let two_l = t.ell.expect("ell present with r");
    if (two_l - 2.0 * p.half_width()).abs() > 1e-8 {
        return domain(format!(
            "a = {a} has ell = {two_l}, inconsistent with 2L = {}",
            2.0 * p.half_width()
        ));
    }
    let _ = r;
    // reuse the main builder by swapping the solved parameter in
    let mut profile = build_profile(ProfileKind::Small, p, grid)?;
    if (profile.a - a).abs() > 1e-9 {
        // caller asked for the other branch: rebuild the pieces by hand
        let alpha = p.alpha();
        let l = p.half_width();
        let shift = 0.5 * (t.big_span + r);
        let v1 = t.v1;
        let v2 = t.v2.expect("v2 present");
        let (left_xi, left_idx, right_xi, right_idx) = partition_targets(grid, l);
        let left_z = sample_tail_to_one(alpha, 1.0 - v1, &left_xi)?;
        let w_junction = a * (l - shift).sinh();
        let (right_v, _) = sample_homoclinic_right(alpha, v2, w_junction, &right_xi)?;
        let mut vs = vec![0.0; grid.n];
        for i in 0..grid.n {
            let x = grid.node(i);
            if x.abs() <= l {
                vs[i] = a * (x - shift).cosh();
            }
        }
        for (k, &i) in left_idx.iter().enumerate() {
            vs[i] = 1.0 - left_z[k];
        }
        for (k, &i) in right_idx.iter().enumerate() {
            vs[i] = right_v[k];
        }
        profile = StationaryProfile {
            kind: ProfileKind::Small,
            alpha,
            half_width: l,
            a,
            center_shift: shift,
            xs: grid.xs(),
            vs,
            meta: Meta::default(),
        };
    }
    Ok(profile)
}

/// The compactly supported even solution with peak a ∈ (θ, 1): samples on the
/// grid nodes inside (-x₀, x₀) plus the exact endpoints where v = 0.
pub fn build_compact_bump(alpha: f64, a: f64, grid: &Grid1D) -> Result<StationaryProfile> {
    let th = theta(alpha)?;
    if !(a > th && a < 1.0) {
        return domain(format!("compact bump needs a in (theta = {th}, 1); got {a}"));
    }
    let rhs = move |_x: f64, y: &[f64; 2]| [y[1], -bistable(alpha, y[0])];
    // event pass: support radius
    let mut st = Dopri5::new(rhs, 0.0, [a, 0.0], RTOL, ATOL_2D);
    let mut x0 = None;
    let mut limit = 50.0;
    for _ in 0..100 {
        if st.advance_to_crossing(0, 0.0, limit)? {
            x0 = Some(st.x);
            break;
        }
        limit += 50.0;
    }
    let x0 = x0.ok_or_else(|| Error::Numerical("bump never reached v = 0".into()))?;
    let edge_slope = st.y[1];

    // sampling pass over |x| < x0
    let mut offsets: Vec<f64> = grid
        .xs()
        .iter()
        .map(|x| x.abs())
        .filter(|&ax| ax < x0)
        .collect();
    offsets.sort_by(|p, q| p.partial_cmp(q).unwrap());
    offsets.dedup();
    let mut st = Dopri5::new(rhs, 0.0, [a, 0.0], RTOL, ATOL_2D);
    let mut by_offset = Vec::with_capacity(offsets.len());
    for &t in &offsets {
        st.advance_to(t)?;
        by_offset.push(st.y[0]);
    }
    let lookup = |ax: f64| -> f64 {
        let j = offsets.binary_search_by(|p| p.partial_cmp(&ax).unwrap()).unwrap();
        by_offset[j]
    };

    let mut xs = vec![-x0];
    let mut vs = vec![0.0];
    for x in grid.xs() {
        if x.abs() < x0 {
            xs.push(x);
            vs.push(lookup(x.abs()));
        }
    }
    xs.push(x0);
    vs.push(0.0);

    Ok(StationaryProfile {
        kind: ProfileKind::CompactBump,
        alpha,
        half_width: 0.0,
        a,
        center_shift: 0.0,
        xs,
        vs,
        meta: Meta {
            support_radius: Some(x0),
            edge_slope: Some(edge_slope),
            ..Meta::default()
        },
    })
}

/// One period of the closed orbit around (α, 0) through (a, 0), 0 < a < α,
/// sampled uniformly; the period comes from the second w-zero return.
pub fn build_periodic(alpha: f64, a: f64) -> Result<StationaryProfile> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("alpha must lie in (0, 0.5); got {alpha}"));
    }
    if !(a > 0.0 && a < alpha) {
        return domain(format!("periodic orbit needs a in (0, alpha = {alpha}); got {a}"));
    }
    let rhs = move |_x: f64, y: &[f64; 2]| [y[1], -bistable(alpha, y[0])];
    let mut st = Dopri5::new(rhs, 0.0, [a, 0.0], RTOL, ATOL_2D);
    // leave the initial turning point before arming the w = 0 events
    st.advance_to(0.25)?;
    if !st.advance_to_crossing(1, 0.0, 1e4)? {
        return numerical("periodic orbit: no half-period return");
    }
    let half = st.x;
    st.advance_to(half + 0.25)?;
    if !st.advance_to_crossing(1, 0.0, half + 1e4)? {
        return numerical("periodic orbit: no full-period return");
    }
    let period = st.x;

    let n = 1025usize;
    let mut st = Dopri5::new(rhs, 0.0, [a, 0.0], RTOL, ATOL_2D);
    let mut xs = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    xs.push(0.0);
    vs.push(a);
    for i in 1..n {
        let t = period * i as f64 / (n - 1) as f64;
        st.advance_to(t)?;
        xs.push(t);
        vs.push(st.y[0]);
    }
    Ok(StationaryProfile {
        kind: ProfileKind::Periodic,
        alpha,
        half_width: 0.0,
        a,
        center_shift: 0.0,
        xs,
        vs,
        meta: Meta { period: Some(period), ..Meta::default() },
    })
}

// ---------------------------------------------------------------------------
// barrier

/// Barrier construction knobs: trajectory offset δ below the heteroclinic
/// level and plateau margin ε₀.
#[derive(Debug, Clone, Copy)]
pub struct BarrierConfig {
    pub delta: f64,
    pub eps0: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self { delta: 1e-2, eps0: 5e-2 }
    }
}

struct BarrierCandidate {
    v_d: f64,
    w_d: f64,
    v_e: f64,
    w_e: f64,
}

/// Landing state of the strip piece started at (v_d, w_d) at x = -L,
/// propagated analytically through v'' = v over the width 2L.
fn strip_propagate(v_d: f64, w_d: f64, two_l: f64) -> (f64, f64) {
    let (c, s) = (two_l.cosh(), two_l.sinh());
    (v_d * c + w_d * s, v_d * s + w_d * c)
}

fn barrier_candidate(alpha: f64, two_l: f64, delta: f64, v_d: f64) -> Option<BarrierCandidate> {
    let z = 1.0 - v_d;
    let w_d = -(delta * delta + z * z * tail_factor_one(alpha, z)).sqrt();
    if w_d * w_d >= v_d * v_d {
        return None; // strip trajectory would reach v = 0
    }
    let (v_e, w_e) = strip_propagate(v_d, w_d, two_l);
    if v_e <= 0.0 {
        return None;
    }
    let th = theta(alpha).ok()?;
    let e_land = 0.5 * w_e * w_e + potential(alpha, v_e);
    let e_center = potential(alpha, alpha);
    // must land strictly inside the nest of closed orbits around (alpha, 0)
    let margin = 1e-3 * e_center.abs();
    if !(e_land > e_center + margin && e_land < -margin) {
        return None;
    }
    if v_e >= th {
        return None;
    }
    let v_hi = crate::numerics::bisect(|v| potential(alpha, v) - e_land, alpha, th, 1e-14).ok()?;
    if v_e > v_hi - 1e-9 {
        return None;
    }
    Some(BarrierCandidate { v_d, w_d, v_e, w_e })
}

/// Samples one barrier candidate on the given abscissas. Returns
/// (values, corner -L̄). The Γ₅* piece is integrated leftward in v (its
/// speed is bounded below by δ, so there is no saddle anywhere on it).
fn sample_barrier(
    p: &ModelParams,
    cfg: &BarrierConfig,
    cand: &BarrierCandidate,
    xs: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let (alpha, l) = (p.alpha(), p.half_width());
    let plateau = 1.0 + cfg.eps0;
    let delta = cfg.delta;

    // Γ₅* leftward: dv/dξ = +sqrt(δ² + z²G₁(z)), ξ = -(x + L)
    let rhs5 = move |_x: f64, y: &[f64; 1]| {
        let z = 1.0 - y[0];
        [(delta * delta + z * z * tail_factor_one(alpha, z)).sqrt()]
    };
    let mut st5 = Dopri5::new(rhs5, 0.0, [cand.v_d], RTOL, ATOL_2D);
    if !st5.advance_to_crossing(0, plateau, 1e4)? {
        return numerical("barrier: trajectory below the heteroclinic never reached 1 + eps0");
    }
    let lbar = l + st5.x;

    // left targets between -L̄ and -L, mirrored to ascending ξ
    let mut gamma5_xi: Vec<f64> = xs
        .iter()
        .filter(|&&x| x < -l && x > -lbar)
        .map(|&x| -x - l)
        .collect();
    gamma5_xi.reverse();
    let mut st5 = Dopri5::new(rhs5, 0.0, [cand.v_d], RTOL, ATOL_2D);
    let mut gamma5_vals = Vec::with_capacity(gamma5_xi.len());
    for &t in &gamma5_xi {
        st5.advance_to(t)?;
        gamma5_vals.push(st5.y[0]);
    }
    gamma5_vals.reverse();

    // periodic tail rightward from the landing state
    let rhs2 = move |_x: f64, y: &[f64; 2]| [y[1], -bistable(alpha, y[0])];
    let right_xi: Vec<f64> = xs.iter().filter(|&&x| x > l).map(|&x| x - l).collect();
    let mut stp = Dopri5::new(rhs2, 0.0, [cand.v_e, cand.w_e], RTOL, ATOL_2D);
    let mut right_vals = Vec::with_capacity(right_xi.len());
    for &t in &right_xi {
        stp.advance_to(t)?;
        right_vals.push(stp.y[0]);
    }

    let mut vals = Vec::with_capacity(xs.len());
    let mut i5 = 0;
    let mut ir = 0;
    for &x in xs {
        let v = if x <= -lbar {
            plateau
        } else if x < -l {
            i5 += 1;
            gamma5_vals[i5 - 1]
        } else if x <= l {
            let xi = x + l;
            cand.v_d * xi.cosh() + cand.w_d * xi.sinh()
        } else {
            ir += 1;
            right_vals[ir - 1]
        };
        vals.push(v);
    }
    Ok((vals, -lbar))
}

/// Builds the weak upper solution V̄ for L > L*: plateau 1+ε₀ left of -L̄,
/// the Γ₅* orbit (energy δ²/2 + F_l(1)) on [-L̄, -L], a cosh-type strip piece
/// on [-L, L] landing on a closed orbit, and that periodic orbit on [L, ∞).
///
/// The free junction ordinate v_D is scanned over its feasibility window and
/// chosen to maximize the clearance min(V̄ - 𝒱_s); the report carries
/// ε = clearance/3.
pub fn build_barrier(
    p: &ModelParams,
    cfg: &BarrierConfig,
    grid: &Grid1D,
) -> Result<StationaryProfile> {
    grid.check_covers_strip(p)?;
    let (alpha, l) = (p.alpha(), p.half_width());
    if !(cfg.delta > 0.0 && cfg.eps0 > 0.0) {
        return domain("barrier needs positive delta and eps0");
    }
    let lstar = critical_half_width(alpha)?;
    if l <= lstar {
        return domain(format!("barrier requires L > L* = {lstar}; got {l}"));
    }
    let small = build_profile(ProfileKind::Small, p, grid)?;

    // feasibility scan over the junction ordinate
    let two_l = 2.0 * l;
    let mut feasible = Vec::new();
    let mut attempts = Vec::new();
    for i in 1..400 {
        let v_d = 0.05 + (0.995 - 0.05) * i as f64 / 400.0;
        match barrier_candidate(alpha, two_l, cfg.delta, v_d) {
            Some(c) => feasible.push(c),
            None => {
                if attempts.len() < 4 {
                    let z = 1.0 - v_d;
                    let w_d = -(cfg.delta * cfg.delta + z * z * tail_factor_one(alpha, z)).sqrt();
                    let (v_e, w_e) = strip_propagate(v_d, w_d, two_l);
                    attempts.push(format!("(v_D={v_d:.4}, w_D={w_d:.4}) -> (v_E={v_e:.4}, w_E={w_e:.4})"));
                }
            }
        }
    }
    if feasible.is_empty() {
        return numerical(format!(
            "barrier: no strip trajectory lands on a closed orbit over [{}]; sample junctions: {}",
            two_l,
            attempts.join(", ")
        ));
    }

    // coarse clearance ranking (every 8th node), then the full build
    let coarse: Vec<f64> = grid.xs().iter().copied().step_by(8).collect();
    let small_coarse: Vec<f64> = coarse.iter().map(|&x| small.eval(x).unwrap()).collect();
    let mut best: Option<(f64, usize)> = None;
    for (k, cand) in feasible.iter().enumerate() {
        if let Ok((vals, _)) = sample_barrier(p, cfg, cand, &coarse) {
            let clearance = vals
                .iter()
                .zip(&small_coarse)
                .map(|(v, s)| v - s)
                .fold(f64::INFINITY, f64::min);
            if best.map_or(true, |(c, _)| clearance > c) {
                best = Some((clearance, k));
            }
        }
    }
    let (_, k_best) = best.ok_or_else(|| Error::Numerical("barrier: every candidate failed to sample".into()))?;
    let cand = &feasible[k_best];

    let xs = grid.xs();
    let (vals, corner) = sample_barrier(p, cfg, cand, &xs)?;
    let clearance = vals
        .iter()
        .zip(&small.vs)
        .map(|(v, s)| v - s)
        .fold(f64::INFINITY, f64::min);
    if clearance <= 0.0 {
        return numerical(format!(
            "barrier clears the small profile nowhere: min(V - Vs) = {clearance:.3e}"
        ));
    }
    let floor = vals.iter().copied().fold(f64::INFINITY, f64::min);
    // corner: V̄'(-L̄-0) = 0 on the plateau, V̄'(-L̄+0) < 0 on Γ₅*
    let z_pl = 1.0 - (1.0 + cfg.eps0);
    let corner_jump = (cfg.delta * cfg.delta + z_pl * z_pl * tail_factor_one(alpha, z_pl)).sqrt();
    let a_mid = (cand.v_d * cand.v_d - cand.w_d * cand.w_d).sqrt();

    Ok(StationaryProfile {
        kind: ProfileKind::Barrier,
        alpha,
        half_width: l,
        a: a_mid,
        center_shift: -l + (cand.v_d / a_mid).acosh(),
        xs,
        vs: vals,
        meta: Meta {
            plateau: Some(1.0 + cfg.eps0),
            corner: Some(corner),
            corner_jump: Some(corner_jump),
            clearance_epsilon: Some(clearance / 3.0),
            floor: Some(floor),
            ..Meta::default()
        },
    })
}

/// Pointwise weak-upper-solution residual -V̄'' - f(x, V̄) evaluated through
/// the piece ODEs (each smooth piece satisfies -V'' = f_piece(V) exactly):
/// zero on matching pieces, -f_l(1+ε₀) > 0 on the plateau. Returns the
/// минимум over samples; a weak upper solution has min ≥ 0.
pub fn barrier_weak_residual(profile: &StationaryProfile, p: &ModelParams) -> Result<f64> {
    if profile.kind != ProfileKind::Barrier {
        return domain("weak residual is defined for the barrier");
    }
    let corner = profile.meta.corner.expect("barrier has corner");
    let l = profile.half_width;
    let mut min_res = f64::INFINITY;
    for (&x, &v) in profile.xs.iter().zip(&profile.vs) {
        let neg_second = if x <= corner {
            0.0
        } else if x < -l {
            bistable(profile.alpha, v) // Γ₅* solves v'' + f_l = 0
        } else if x <= l {
            -v // strip piece solves v'' - v = 0
        } else {
            bistable(profile.alpha, v)
        };
        min_res = min_res.min(neg_second - reaction_value(p, x, v));
    }
    Ok(min_res)
}

// ---------------------------------------------------------------------------
// verification helpers

/// Max over interior uniform-stencil points of |δ²v/h² + f(x, v)|, skipping
/// stencils that straddle the strip edges (±L), the barrier corner, or a
/// non-uniform seam (bump support endpoints). The bump and the periodic
/// orbit solve the outer equation regardless of x, so they are checked
/// against f_l alone.
pub fn ode_residual(profile: &StationaryProfile, p: &ModelParams) -> f64 {
    let xs = &profile.xs;
    let vs = &profile.vs;
    let mut kinks = vec![];
    match profile.kind {
        ProfileKind::Big | ProfileKind::Small | ProfileKind::Ground => {
            kinks.push(-profile.half_width);
            kinks.push(profile.half_width);
        }
        ProfileKind::Barrier => {
            kinks.push(-profile.half_width);
            kinks.push(profile.half_width);
            if let Some(c) = profile.meta.corner {
                kinks.push(c);
            }
        }
        _ => {}
    }
    let outer_only = matches!(profile.kind, ProfileKind::CompactBump | ProfileKind::Periodic);
    let mut worst = 0.0f64;
    for i in 1..xs.len() - 1 {
        let hl = xs[i] - xs[i - 1];
        let hr = xs[i + 1] - xs[i];
        if (hl - hr).abs() > 1e-9 * hl.max(hr) {
            continue;
        }
        let h = hl;
        if kinks.iter().any(|&k| (xs[i] - k).abs() < 1.5 * h) {
            continue;
        }
        let second = (vs[i - 1] - 2.0 * vs[i] + vs[i + 1]) / (h * h);
        let f = if outer_only {
            bistable(profile.alpha, vs[i])
        } else {
            reaction_value(p, xs[i], vs[i])
        };
        worst = worst.max((second + f).abs());
    }
    worst
}

/// Strict-ordering report for profiles sharing one grid.
#[derive(Debug, Clone, Copy)]
pub struct OrderingReport {
    pub ordered: bool,
    /// min over nodes of (ground - small)
    pub min_gap_small_ground: f64,
    /// min over nodes of (big - ground)
    pub min_gap_ground_big: f64,
}

/// Checks 𝒱_s < 𝒱_g < 𝒱_b at every common node.
pub fn check_ordering(
    small: &StationaryProfile,
    ground: &StationaryProfile,
    big: &StationaryProfile,
) -> Result<OrderingReport> {
    for other in [ground, big] {
        if other.xs.len() != small.xs.len()
            || small
                .xs
                .iter()
                .zip(&other.xs)
                .any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return domain("ordering check requires profiles on a common grid");
        }
    }
    let mut gap_sg = f64::INFINITY;
    let mut gap_gb = f64::INFINITY;
    for i in 0..small.xs.len() {
        gap_sg = gap_sg.min(ground.vs[i] - small.vs[i]);
        gap_gb = gap_gb.min(big.vs[i] - ground.vs[i]);
    }
    Ok(OrderingReport {
        ordered: gap_sg > 0.0 && gap_gb > 0.0,
        min_gap_small_ground: gap_sg,
        min_gap_ground_big: gap_gb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHA: f64 = 0.25;
    const LSTAR_25: f64 = 0.326_326_101_318_844_43;
    // frozen pre-build (independent bisection/quadrature at 40+ digits)
    const A_BIG_HALF: f64 = 0.811_232_541_402_760_24; // L = L*/2
    const A_BIG_LSTAR: f64 = 0.639_036_815_880_347_89; // L = L*
    const A_SMALL_2LSTAR: f64 = 0.108_371_771_549_170_59;
    const A_GROUND_2LSTAR: f64 = 0.238_831_722_915_596_18;
    const A_SMALL_LSTAR_STABLE: f64 = 0.291_019_413_628_899_98;

    fn params(l: f64) -> ModelParams {
        ModelParams::new(ALPHA, l).unwrap()
    }

    #[test]
    fn solve_a_big_frozen_and_definition() {
        for (l, expect) in [(0.5 * LSTAR_25, A_BIG_HALF), (LSTAR_25, A_BIG_LSTAR)] {
            let a = solve_a_big(&params(l)).unwrap();
            assert!((a - expect).abs() < 1e-9, "a_big({l}) = {a}");
            // a cosh(L) = v1(a) is the defining junction
            let v1 = v1_of_a(ALPHA, a).unwrap();
            assert!((a * l.cosh() - v1).abs() < 1e-8);
        }
        // L -> 0 gives a -> 1, large L gives small a
        assert!(solve_a_big(&params(1e-6)).unwrap() > 0.999);
        assert!(solve_a_big(&params(8.0)).unwrap() < 0.01);
    }

    #[test]
    fn solve_a_small_branches() {
        let p = params(2.0 * LSTAR_25);
        let a = solve_a_small(&p).unwrap();
        assert!((a - A_SMALL_2LSTAR).abs() < 1e-9, "a_small = {a}");
        let t = spans(ALPHA, a).unwrap();
        assert!((t.ell.unwrap() - 4.0 * LSTAR_25).abs() < 1e-10);

        // at L = L* the stable branch is NOT theta: theta belongs to the
        // rising branch of ell
        let p_star = params(LSTAR_25);
        let a_stable = solve_a_small(&p_star).unwrap();
        assert!((a_stable - A_SMALL_LSTAR_STABLE).abs() < 1e-9, "a = {a_stable}");
        let a_upper = solve_a_small_upper(&p_star).unwrap();
        assert!((a_upper - theta(ALPHA).unwrap()).abs() < 1e-9, "upper = {a_upper}");

        // below the fold nothing exists
        assert!(solve_a_small(&params(0.5 * LSTAR_25)).is_err());
        assert!(solve_a_small_upper(&params(2.0 * LSTAR_25)).is_err());
    }

    #[test]
    fn solve_a_ground_frozen_and_regime() {
        let a = solve_a_ground(&params(2.0 * LSTAR_25)).unwrap();
        assert!((a - A_GROUND_2LSTAR).abs() < 1e-9, "a_ground = {a}");
        let t = spans(ALPHA, a).unwrap();
        assert!((t.big_span + t.small_span.unwrap() - 4.0 * LSTAR_25).abs() < 1e-10);
        // ell(a) + 2r(a) = 2L for the same a
        assert!((t.ell.unwrap() + 2.0 * t.small_span.unwrap() - 4.0 * LSTAR_25).abs() < 1e-10);
        // ordering of the well parameters
        assert!(a > A_SMALL_2LSTAR);
        assert!(solve_a_ground(&params(LSTAR_25)).is_err());
        // L -> L*+ pushes a to theta
        let a_near = solve_a_ground(&params(LSTAR_25 * (1.0 + 1e-8))).unwrap();
        assert!((a_near - theta(ALPHA).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn big_profile_shape() {
        let p = params(0.5 * LSTAR_25);
        let grid = Grid1D::with_spacing(-20.0, 20.0, 0.01).unwrap();
        let prof = build_profile(ProfileKind::Big, &p, &grid).unwrap();
        // minimum a at x = 0
        let mid = prof.eval(0.0).unwrap();
        assert!((mid - prof.a).abs() < 1e-12);
        // even: v(-x) = v(x)
        for &x in &[0.5, 1.0, 3.0, 7.5, 15.0] {
            let d = (prof.eval(x).unwrap() - prof.eval(-x).unwrap()).abs();
            assert!(d < 1e-10, "evenness at {x}: {d:.2e}");
        }
        // approaches 1 away from the strip
        assert!((1.0 - prof.eval(19.5).unwrap()) < 1e-6);
        assert!(prof.meta.matching.unwrap().worst() < MATCH_TOL);
        let res = ode_residual(&prof, &p);
        assert!(res < 1e-3, "residual {res:.2e}");
    }

    #[test]
    fn small_profile_monotone() {
        let p = params(2.0 * LSTAR_25);
        let grid = Grid1D::with_spacing(-25.0, 25.0, 0.01).unwrap();
        let prof = build_profile(ProfileKind::Small, &p, &grid).unwrap();
        for w in prof.vs.windows(2) {
            assert!(w[1] < w[0], "small profile must decrease strictly");
        }
        assert!(1.0 - prof.vs[0] < 1e-8);
        assert!(*prof.vs.last().unwrap() < 1e-4);
        assert!(prof.meta.matching.unwrap().worst() < MATCH_TOL);
    }

    #[test]
    fn ground_profile_extrema() {
        let p = params(2.0 * LSTAR_25);
        let grid = Grid1D::with_spacing(-25.0, 25.0, 0.01).unwrap();
        let prof = build_profile(ProfileKind::Ground, &p, &grid).unwrap();
        let x1 = prof.meta.x1.unwrap();
        let x2 = prof.meta.x2.unwrap();
        // frozen oracle: x1 = ell/2 = 0.3736470775, x2 = 3.9361085385
        assert!((x1 - 0.373_647_077_530_326).abs() < 1e-9, "x1 = {x1}");
        assert!((x2 - 3.936_108_538_466_219).abs() < 1e-6, "x2 = {x2}");
        assert!(x1 > -p.half_width() && x1 < p.half_width());
        assert!(x2 > p.half_width());
        // v(x2) = theta
        let v_at_x2 = prof.eval(x2).unwrap();
        assert!((v_at_x2 - theta(ALPHA).unwrap()).abs() < 1e-6, "v(x2) = {v_at_x2}");
        // interior minimum value is a
        assert!((prof.eval(x1).unwrap() - prof.a).abs() < 1e-10);
    }

    #[test]
    fn bump_even_with_energy_slope() {
        let a = (theta(ALPHA).unwrap() + 1.0) / 2.0;
        let grid = Grid1D::with_spacing(-10.0, 10.0, 0.01).unwrap();
        let bump = build_compact_bump(ALPHA, a, &grid).unwrap();
        let x0 = bump.meta.support_radius.unwrap();
        assert!((x0 - 4.475_491_985_315_583).abs() < 1e-8, "x0 = {x0}");
        let slope = bump.meta.edge_slope.unwrap();
        let expect = -(2.0 * potential(ALPHA, a)).sqrt();
        assert!((slope - expect).abs() < 1e-9, "slope {slope} vs {expect}");
        for &x in &[0.3, 1.7, 3.9] {
            let d = (bump.eval(x).unwrap() - bump.eval(-x).unwrap()).abs();
            assert!(d < 1e-10);
        }
        assert!(build_compact_bump(ALPHA, 0.2, &grid).is_err());
        // support grows as a drops toward theta
        let th = theta(ALPHA).unwrap();
        let radii: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|d| {
                build_compact_bump(ALPHA, th + d, &grid)
                    .unwrap()
                    .meta
                    .support_radius
                    .unwrap()
            })
            .collect();
        assert!(radii[0] < radii[1] && radii[1] < radii[2], "radii {radii:?}");
    }

    #[test]
    fn periodic_orbit_basics() {
        let orbit = build_periodic(ALPHA, 0.125).unwrap();
        let period = orbit.meta.period.unwrap();
        assert!((period - 15.651_773_402_000_77).abs() < 1e-6, "T = {period}");
        let max = orbit.vs.iter().cloned().fold(f64::MIN, f64::max);
        let min = orbit.vs.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - 0.349_961_358_307_994_5).abs() < 1e-8);
        assert!(min >= 0.125 - 1e-9);
        assert!(max < theta(ALPHA).unwrap());
        // near the center the period approaches 2π/√(α(1-α))
        let t_lin = 2.0 * std::f64::consts::PI / (ALPHA * (1.0 - ALPHA)).sqrt();
        let near = build_periodic(ALPHA, ALPHA - 1e-4).unwrap().meta.period.unwrap();
        assert!((near - t_lin).abs() / t_lin < 1e-6, "near-center period {near}");
        assert!(build_periodic(ALPHA, ALPHA).is_err());
    }

    #[test]
    fn residual_drops_with_grid_refinement() {
        let p = params(0.5 * LSTAR_25);
        let mut last = f64::INFINITY;
        let mut orders = vec![];
        for &h in &[0.04, 0.02, 0.01] {
            let grid = Grid1D::with_spacing(-15.0, 15.0, h).unwrap();
            let prof = build_profile(ProfileKind::Big, &p, &grid).unwrap();
            let r = ode_residual(&prof, &p);
            if last.is_finite() {
                orders.push((last / r).log2());
            }
            last = r;
        }
        for o in &orders {
            assert!((o - 2.0).abs() < 0.35, "observed order {o}");
        }
    }

    #[test]
    fn builds_are_bit_stable() {
        let p = params(2.0 * LSTAR_25);
        let grid = Grid1D::with_spacing(-12.0, 12.0, 0.05).unwrap();
        let a = build_profile(ProfileKind::Ground, &p, &grid).unwrap();
        let b = build_profile(ProfileKind::Ground, &p, &grid).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.vs, b.vs);
    }

    #[test]
    fn ordering_at_twice_critical() {
        let p = params(2.0 * LSTAR_25);
        let grid = Grid1D::with_spacing(-20.0, 20.0, 0.02).unwrap();
        let s = build_profile(ProfileKind::Small, &p, &grid).unwrap();
        let g = build_profile(ProfileKind::Ground, &p, &grid).unwrap();
        let b = build_profile(ProfileKind::Big, &p, &grid).unwrap();
        let rep = check_ordering(&s, &g, &b).unwrap();
        assert!(rep.ordered, "gaps: {rep:?}");
        assert!(rep.min_gap_small_ground > 0.0 && rep.min_gap_ground_big > 0.0);
        // identical profiles are not strictly ordered
        let rep2 = check_ordering(&s, &s, &b).unwrap();
        assert!(!rep2.ordered);
        // grid mismatch is rejected
        let other = Grid1D::with_spacing(-20.0, 20.0, 0.04).unwrap();
        let s2 = build_profile(ProfileKind::Small, &p, &other).unwrap();
        assert!(check_ordering(&s2, &g, &b).is_err());
    }

    #[test]
    fn barrier_builds_and_dominates_small() {
        let p = params(2.0 * LSTAR_25);
        let grid = Grid1D::with_spacing(-30.0, 30.0, 0.02).unwrap();
        let bar = build_barrier(&p, &BarrierConfig::default(), &grid).unwrap();
        let eps = bar.meta.clearance_epsilon.unwrap();
        assert!(eps > 0.0, "clearance epsilon {eps}");
        assert!(bar.meta.floor.unwrap() > 0.0);
        assert!(bar.meta.corner_jump.unwrap() > 0.0);
        let corner = bar.meta.corner.unwrap();
        assert!(corner < -p.half_width() && corner > grid.x_min);
        // weak upper solution residual is nonnegative (piecewise exact)
        let res = barrier_weak_residual(&bar, &p).unwrap();
        assert!(res >= -1e-8, "weak residual {res}");
        // plateau on the far left
        assert_eq!(bar.vs[0], 1.0 + BarrierConfig::default().eps0);
        // and the barrier fails below the critical width
        assert!(build_barrier(&params(0.9 * LSTAR_25), &BarrierConfig::default(), &grid).is_err());
    }
}
