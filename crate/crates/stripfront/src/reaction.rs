//! The heterogeneous reaction term and its potentials.
//!
//! Outside the strip the growth law is the cubic bistable f_l(u) = u(u-α)(1-u)
//! with 0 < α < 1/2; inside the open strip |x| < L the medium is hostile and
//! the law is -u. The balance ordinate θ(α) is where the outer potential
//! ∫₀^θ f_l vanishes; it is the peak of the homoclinic orbit and the single
//! most-used constant downstream.

use crate::error::{domain, Result};

/// Model parameters: the bistable unstable zero α and the strip half-width L.
///
/// The strip is the open set |x| < L; at |x| = L the bistable branch applies.
/// That choice is measure-zero for the PDE but fixes determinism of nodal
/// reaction evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    half_width: f64,
}

impl ModelParams {
    /// Validates 0 < alpha < 1/2 and half_width > 0.
    pub fn new(alpha: f64, half_width: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return domain(format!("alpha must lie in the open interval (0, 0.5); got {alpha}"));
        }
        if !(half_width > 0.0) {
            return domain(format!("half_width must be positive; got {half_width}"));
        }
        Ok(Self { alpha, half_width })
    }

    /// Degenerate strip of zero width: the cubic applies everywhere.
    /// Only used by diagnostics (e.g. checking that u ≡ 1 is an equilibrium
    /// of the homogeneous bistable problem); `new` itself rejects L = 0.
    pub fn without_strip(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return domain(format!("alpha must lie in the open interval (0, 0.5); got {alpha}"));
        }
        Ok(Self { alpha, half_width: 0.0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

/// The cubic bistable branch f_l(u) = u(u-α)(1-u).
#[inline]
pub fn bistable(alpha: f64, u: f64) -> f64 {
    u * (u - alpha) * (1.0 - u)
}

/// d f_l / du = -3u² + 2(1+α)u - α.
#[inline]
pub fn bistable_prime(alpha: f64, u: f64) -> f64 {
    -3.0 * u * u + 2.0 * (1.0 + alpha) * u - alpha
}

/// The reaction term f(x, u) of the full model: bistable for |x| ≥ L,
/// -u inside the open strip.
#[inline]
pub fn reaction_value(p: &ModelParams, x: f64, u: f64) -> f64 {
    if x.abs() >= p.half_width {
        bistable(p.alpha, u)
    } else {
        -u
    }
}

/// Potential of the outer branch, F_l(u) = ∫₀ᵘ f_l = -u⁴/4 + (1+α)u³/3 - αu²/2.
#[inline]
pub fn potential(alpha: f64, u: f64) -> f64 {
    ((-0.25 * u + (1.0 + alpha) / 3.0) * u - 0.5 * alpha) * u * u
}

/// `potential` rooted at the model parameters, F_l(u).
pub fn outer_potential(p: &ModelParams, u: f64) -> f64 {
    potential(p.alpha, u)
}

/// F_l(a + d) - F_l(a) evaluated by the exact quartic Taylor expansion in d.
/// Avoids the catastrophic cancellation of subtracting two O(1) quartics when
/// d is tiny (near-center periodic orbits, v₂ close to a).
#[inline]
pub fn potential_diff(alpha: f64, a: f64, d: f64) -> f64 {
    let f0 = bistable(alpha, a);
    let f1 = bistable_prime(alpha, a);
    let f2 = -6.0 * a + 2.0 * (1.0 + alpha);
    ((-0.25 * d + f2 / 6.0) * d + 0.5 * f1) * d * d + f0 * d
}

/// The balance ordinate θ(α) ∈ (α, 1): the unique zero of ∫₀^θ f_l in (α, 1),
/// in closed form θ = [4(α+1) - √(16(α+1)² - 72α)]/6.
pub fn theta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("theta requires alpha in (0, 0.5); got {alpha}"));
    }
    let disc = (16.0 * (alpha + 1.0) * (alpha + 1.0) - 72.0 * alpha).max(0.0);
    Ok((4.0 * (alpha + 1.0) - disc.sqrt()) / 6.0)
}

/// F_l(1) = (1-2α)/12, the energy level of the outer heteroclinic trajectory.
#[inline]
pub fn potential_at_one(alpha: f64) -> f64 {
    (1.0 - 2.0 * alpha) / 12.0
}

/// (1-α) - (4-2α)z/3 + z²/2 = 2[F_l(1) - F_l(1-z)]/z², the exact quartic
/// factor of the outer energy near u = 1. Evaluating the factor instead of
/// the difference keeps full relative precision in the tails.
#[inline]
pub fn tail_factor_one(alpha: f64, z: f64) -> f64 {
    (1.0 - alpha) - (4.0 - 2.0 * alpha) * z / 3.0 + 0.5 * z * z
}

/// α - 2(1+α)v/3 + v²/2 = -2F_l(v)/v², the quartic factor of the homoclinic
/// energy near u = 0.
#[inline]
pub fn tail_factor_zero(alpha: f64, v: f64) -> f64 {
    alpha - 2.0 * (1.0 + alpha) * v / 3.0 + 0.5 * v * v
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHA: f64 = 0.25;

    #[test]
    fn params_reject_bad_ranges() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 1.0).is_err());
        assert!(ModelParams::new(-0.1, 1.0).is_err());
        assert!(ModelParams::new(0.25, 0.0).is_err());
        assert!(ModelParams::new(0.25, -2.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(0.25, 1.0).is_ok());
    }

    #[test]
    fn reaction_branches() {
        let p = ModelParams::new(ALPHA, 1.0).unwrap();
        assert_eq!(reaction_value(&p, 2.0, 0.0), 0.0);
        assert_eq!(reaction_value(&p, 0.0, 1.0), -1.0);
        assert_eq!(reaction_value(&p, 2.0, 1.0), 0.0);
        // the strip is open: |x| = L uses the bistable branch
        assert_eq!(reaction_value(&p, 1.0, 1.0), 0.0);
        assert_eq!(reaction_value(&p, -1.0, 1.0), 0.0);
    }

    #[test]
    fn cubic_roots_and_sign_pattern() {
        for &u in &[0.0, ALPHA, 1.0] {
            assert_eq!(bistable(ALPHA, u), 0.0);
        }
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let f = bistable(ALPHA, u);
            if u < ALPHA {
                assert!(f < 0.0, "f({u}) = {f} should be negative below alpha");
            } else if u > ALPHA && (u - ALPHA) > 1e-12 && u < 1.0 {
                assert!(f > 0.0, "f({u}) = {f} should be positive in (alpha, 1)");
            }
        }
    }

    #[test]
    fn potential_derivative_matches_cubic() {
        // central finite differences, relative error < 1e-6 on 100 points
        let h = 1e-6;
        for i in 1..=100 {
            let u = i as f64 / 101.0;
            let fd = (potential(ALPHA, u + h) - potential(ALPHA, u - h)) / (2.0 * h);
            let f = bistable(ALPHA, u);
            let scale = f.abs().max(1e-3);
            assert!(
                (fd - f).abs() / scale < 1e-6,
                "dF/du mismatch at u={u}: fd={fd}, f={f}"
            );
        }
    }

    #[test]
    fn potential_closed_form_values() {
        assert_eq!(potential(0.25, 0.0), 0.0);
        // balanced case: ∫₀¹ f = (1-2α)/12 = 0 at α = 1/2
        assert!(potential(0.5, 1.0).abs() < 1e-16);
        // α = 0.25: ∫₀¹ f = 1/24, cross-checked by quadrature in tests/oracles.rs
        assert!((potential(0.25, 1.0) - 1.0 / 24.0).abs() < 1e-16);
        assert!((potential_at_one(0.25) - 1.0 / 24.0).abs() < 1e-16);
    }

    #[test]
    fn theta_domain_and_limits() {
        assert!(theta(0.5).is_err());
        assert!(theta(0.0).is_err());
        // alpha -> 1/2 gives theta -> 1 (discriminant vanishes)
        let t = theta(0.5 - 1e-12).unwrap();
        assert!(t > 1.0 - 1e-5 && t <= 1.0, "theta(0.5-) = {t}");
        // alpha -> 0 gives theta -> 0
        assert!(theta(1e-9).unwrap() < 1e-4);
    }

    #[test]
    fn theta_balances_the_potential() {
        // defining relation ∫₀^θ f_l = 0, |.| < 1e-12 across the alpha range,
        // and α < θ < 1 throughout
        for i in 0..50 {
            let alpha = 0.01 + 0.48 * i as f64 / 49.0;
            let t = theta(alpha).unwrap();
            assert!(t > alpha && t < 1.0, "theta({alpha}) = {t} outside (alpha, 1)");
            assert!(
                potential(alpha, t).abs() < 1e-12,
                "potential at theta({alpha}) = {:e}",
                potential(alpha, t)
            );
        }
    }

    #[test]
    fn theta_quadratic_root_oracle() {
        // independent route: smaller root of 3θ² - 4(1+α)θ + 6α = 0 via the
        // cancellation-free form 12α / (4(1+α) + √disc)
        for &alpha in &[0.05, 0.1, 0.25, 0.4, 0.49] {
            let disc = (16.0 * (alpha + 1.0f64) * (alpha + 1.0) - 72.0 * alpha).sqrt();
            let oracle = 12.0 * alpha / (4.0 * (1.0 + alpha) + disc);
            assert!((theta(alpha).unwrap() - oracle).abs() < 1e-14);
        }
    }

    #[test]
    fn potential_diff_is_cancellation_free() {
        // agreement with the direct difference where that is accurate
        for &(a, d) in &[(0.3, 0.1), (0.7, -0.2), (0.1, 0.05)] {
            let exact = potential(ALPHA, a + d) - potential(ALPHA, a);
            assert!((potential_diff(ALPHA, a, d) - exact).abs() < 1e-15);
        }
        // and a relative-precision check at tiny d: leading term is f_l(a) d
        let (a, d) = (0.3, 1e-9);
        let lead = bistable(ALPHA, a) * d + bistable_prime(ALPHA, a) * d * d / 2.0;
        let got = potential_diff(ALPHA, a, d);
        assert!((got - lead).abs() / lead.abs() < 1e-12);
    }

    #[test]
    fn tail_factors_match_potentials() {
        for i in 1..40 {
            let z = i as f64 / 40.0;
            let lhs = z * z * tail_factor_one(ALPHA, z);
            let rhs = 2.0 * (potential_at_one(ALPHA) - potential(ALPHA, 1.0 - z));
            assert!((lhs - rhs).abs() < 1e-15, "tail_factor_one at z={z}");
            let v = z;
            let lhs0 = v * v * tail_factor_zero(ALPHA, v);
            let rhs0 = -2.0 * potential(ALPHA, v);
            assert!((lhs0 - rhs0).abs() < 1e-15, "tail_factor_zero at v={v}");
        }
    }
}
