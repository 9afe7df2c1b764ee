//! Long-time classification and sharp-threshold location.
//!
//! Every front-like datum evolves to one of the stationary states available
//! at the given width: the big profile (spreading), the small profile
//! (residue), or — above the critical width — the ground profile
//! (transition). A run is classified by evolving to steadiness and matching
//! the final field against the built profiles on a window, with a margin
//! rule; two rigorous early-exit certificates (domination of a compactly
//! supported bump placed beyond the strip ⇒ spreading; staying below the
//! barrier upper solution ⇒ residue) shortcut the long near-threshold tails
//! during bisection.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{domain, numerical, Error, Result};
use crate::grid::Grid1D;
use crate::pde::{evolve_observed, make_initial, sup_distance, InitialData, ObserverVerdict, SimConfig};
use crate::phase_plane::critical_half_width;
use crate::reaction::{theta, ModelParams};
use crate::stationary::{
    build_barrier, build_compact_bump, build_profile, BarrierConfig, ProfileKind,
    StationaryProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Spreading,
    Residue,
    Transition,
    Undetermined,
}

impl Label {
    /// Position in the σ-ordering Residue ⪯ (Transition|Undetermined) ⪯ Spreading.
    fn rank(self) -> u8 {
        match self {
            Label::Residue => 0,
            Label::Transition | Label::Undetermined => 1,
            Label::Spreading => 2,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Spreading => "spreading",
            Label::Residue => "residue",
            Label::Transition => "transition",
            Label::Undetermined => "undetermined",
        })
    }
}

/// Classification record for one run.
#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub label: Label,
    pub dist_small: Option<f64>,
    pub dist_ground: Option<f64>,
    pub dist_big: Option<f64>,
    pub steady: bool,
    pub final_time: f64,
    /// which early-exit certificate fired, if any
    pub certificate: Option<&'static str>,
}

/// Classifier knobs.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// half-width of the matching window (clipped to the grid минус margin)
    pub window: f64,
    /// winning distance must be below this, runner-up above twice it
    pub classify_tol: f64,
    /// allow certificate early exits (audit mode turns them off)
    pub early_exit: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { window: 20.0, classify_tol: 1e-3, early_exit: true }
    }
}

/// Compactly supported stationary bump shifted beyond the strip, reduced to
/// nodal values on the simulation grid (padded by its interpolation error so
/// the certificate stays conservative).
#[derive(Debug, Clone)]
pub struct CertificateBump {
    pub peak: f64,
    pub shift: f64,
    pub support_radius: f64,
    nodal: Vec<(usize, f64)>,
}

impl CertificateBump {
    /// Places V_a with a = (θ+1)/2 at x₁ = L + x₀ + 1 (support strictly right
    /// of the strip). Fails if the grid cannot host the support.
    pub fn new(p: &ModelParams, grid: &Grid1D) -> Result<Self> {
        let a = 0.5 * (theta(p.alpha())? + 1.0);
        let probe = Grid1D::with_spacing(-1.0, 1.0, grid.h().min(0.01))?;
        let bump = build_compact_bump(p.alpha(), a, &probe)?;
        let x0 = bump.meta.support_radius.expect("bump has support radius");
        let shift = p.half_width() + x0 + 1.0;
        if shift + x0 > grid.x_max - 1.0 {
            return domain(format!(
                "grid x_max = {} cannot host the spreading certificate bump (needs {})",
                grid.x_max,
                shift + x0 + 1.0
            ));
        }
        // rebuild on the support at grid resolution for nodal evaluation
        let dense = Grid1D::with_spacing(-(x0 + 1.0), x0 + 1.0, grid.h().min(0.01))?;
        let bump = build_compact_bump(p.alpha(), a, &dense)?;
        let pad = 1e-4; // covers linear-interpolation sag of the bump table
        let mut nodal = Vec::new();
        for i in 0..grid.n {
            let y = grid.node(i) - shift;
            if y.abs() < x0 {
                nodal.push((i, bump.eval(y)? + pad));
            }
        }
        Ok(Self { peak: a, shift, support_radius: x0, nodal })
    }

    fn dominated_by(&self, values: &[f64]) -> bool {
        self.nodal.iter().all(|&(i, v)| values[i] >= v)
    }
}

/// True iff the field dominates the shifted bump nodewise. By comparison the
/// solution then stays above a stationary bump forever, which pins its
/// ω-limit to the big profile: a rigorous early spreading verdict.
pub fn spreading_certificate(field: &crate::pde::Field, bump: &CertificateBump) -> bool {
    bump.dominated_by(&field.values)
}

/// Stationary profiles available at the session's width.
#[derive(Debug)]
pub struct ProfileSet {
    pub big: StationaryProfile,
    pub small: Option<StationaryProfile>,
    pub ground: Option<StationaryProfile>,
}

/// A classification context: profiles, certificates and a per-σ cache,
/// shared by bisections and sweeps.
pub struct Session {
    pub p: ModelParams,
    pub grid: Grid1D,
    pub sim: SimConfig,
    pub cls: ClassifyConfig,
    pub family: InitialData,
    pub profiles: ProfileSet,
    bump: Option<CertificateBump>,
    barrier: Option<StationaryProfile>,
    cache: BTreeMap<u64, Outcome>,
}

impl Session {
    pub fn new(
        p: &ModelParams,
        grid: &Grid1D,
        sim: &SimConfig,
        cls: &ClassifyConfig,
        family: &InitialData,
    ) -> Result<Self> {
        grid.check_covers_strip(p)?;
        sim.validate()?;
        let big = build_profile(ProfileKind::Big, p, grid)?;
        let small = build_profile(ProfileKind::Small, p, grid).ok();
        let ground = if p.half_width() > critical_half_width(p.alpha())? {
            Some(build_profile(ProfileKind::Ground, p, grid)?)
        } else {
            None
        };
        let bump = CertificateBump::new(p, grid).ok();
        let barrier = if cls.early_exit && ground.is_some() {
            build_barrier(p, &BarrierConfig::default(), grid).ok()
        } else {
            None
        };
        Ok(Self {
            p: *p,
            grid: *grid,
            sim: *sim,
            cls: *cls,
            family: *family,
            profiles: ProfileSet { big, small, ground },
            bump,
            barrier,
            cache: BTreeMap::new(),
        })
    }

    /// A grid that honors the default truncation and still contains the
    /// whole σ bracket with margin.
    pub fn auto_grid(p: &ModelParams, h: f64, bracket: (f64, f64)) -> Result<Grid1D> {
        let half = p.half_width() + 40.0;
        let x_min = (-half).min(bracket.0 - 15.0);
        let x_max = half.max(bracket.1 + 15.0);
        Grid1D::with_spacing(x_min, x_max, h)
    }

    /// The matching window, clipped to stay 10 units inside the grid.
    pub fn window(&self) -> (f64, f64) {
        let w = self
            .cls
            .window
            .min(self.grid.x_max - 10.0)
            .min(-self.grid.x_min - 10.0);
        (-w, w)
    }

    fn distances(&self, field: &crate::pde::Field) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
        let win = self.window();
        let d_small = match &self.profiles.small {
            Some(s) => Some(sup_distance(field, s, win)?),
            None => None,
        };
        let d_ground = match &self.profiles.ground {
            Some(g) => Some(sup_distance(field, g, win)?),
            None => None,
        };
        let d_big = Some(sup_distance(field, &self.profiles.big, win)?);
        Ok((d_small, d_ground, d_big))
    }

    /// Classifies the family member at shift σ (cached).
    pub fn classify_sigma(&mut self, sigma: f64) -> Result<Outcome> {
        if let Some(out) = self.cache.get(&sigma.to_bits()) {
            return Ok(*out);
        }
        let out = self.classify_fresh(sigma)?;
        self.cache.insert(sigma.to_bits(), out);
        Ok(out)
    }

    fn classify_fresh(&self, sigma: f64) -> Result<Outcome> {
        let data = self.family.with_sigma(sigma);
        let field = make_initial(&data, &self.grid, &self.p)?;
        let mut certificate: Option<&'static str> = None;
        let (final_field, steady) = evolve_observed(field, &self.p, &self.sim, |f| {
            if self.cls.early_exit {
                if let Some(b) = &self.bump {
                    if b.dominated_by(&f.values) {
                        certificate = Some("spreading-bump");
                        return ObserverVerdict::Stop;
                    }
                }
                if let Some(bar) = &self.barrier {
                    if f.values.iter().zip(&bar.vs).all(|(u, v)| *u <= v + 1e-12) {
                        certificate = Some("residue-barrier");
                        return ObserverVerdict::Stop;
                    }
                }
            }
            ObserverVerdict::Continue
        })?;
        let (dist_small, dist_ground, dist_big) = self.distances(&final_field)?;
        let label = match certificate {
            Some("spreading-bump") => Label::Spreading,
            Some("residue-barrier") => Label::Residue,
            _ => {
                if !steady {
                    Label::Undetermined
                } else {
                    self.margin_rule(dist_small, dist_ground, dist_big)
                }
            }
        };
        Ok(Outcome {
            label,
            dist_small,
            dist_ground,
            dist_big,
            steady,
            final_time: final_field.time,
            certificate,
        })
    }

    fn margin_rule(&self, ds: Option<f64>, dg: Option<f64>, db: Option<f64>) -> Label {
        let tol = self.cls.classify_tol;
        let mut cands: Vec<(Label, f64)> = Vec::new();
        if let Some(d) = ds {
            cands.push((Label::Residue, d));
        }
        if let Some(d) = dg {
            cands.push((Label::Transition, d));
        }
        if let Some(d) = db {
            cands.push((Label::Spreading, d));
        }
        cands.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        match cands.as_slice() {
            [] => Label::Undetermined,
            [(l, d)] => {
                if *d < tol {
                    *l
                } else {
                    Label::Undetermined
                }
            }
            [(l, d), (_, d2), ..] => {
                if *d < tol && *d2 > 2.0 * tol {
                    *l
                } else {
                    Label::Undetermined
                }
            }
        }
    }
}

/// One-shot classification with a fresh session (spec-shaped convenience).
pub fn classify(
    p: &ModelParams,
    data: &InitialData,
    grid: &Grid1D,
    sim: &SimConfig,
    cls: &ClassifyConfig,
) -> Result<Outcome> {
    let mut s = Session::new(p, grid, sim, cls, data)?;
    s.classify_sigma(data.sigma())
}

/// Bisection brackets for the residue/spreading thresholds.
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    /// bracket around σ_* (last Residue / first non-Residue)
    pub sigma_lower: Option<(f64, f64)>,
    /// bracket around σ* (last non-Spreading / first Spreading)
    pub sigma_upper: Option<(f64, f64)>,
    /// Theorem-1.1-style alternative: every probed σ spreads
    pub all_spreading: bool,
    /// every classified (σ, outcome), ascending in σ
    pub log: Vec<(f64, Outcome)>,
}

fn collect_log(session: &Session) -> Vec<(f64, Outcome)> {
    session
        .cache
        .iter()
        .map(|(bits, out)| (f64::from_bits(*bits), *out))
        .collect()
}

fn check_monotone_log(log: &[(f64, Outcome)]) -> Result<()> {
    // cache keys are u64 bit patterns; for the finite same-sign σ values used
    // here的 ordering may interleave negatives, so sort by value
    let mut sorted: Vec<_> = log.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut prev: Option<(f64, u8)> = None;
    for (sigma, out) in &sorted {
        let r = out.label.rank();
        if let Some((ps, pr)) = prev {
            if r < pr {
                return numerical(format!(
                    "outcome order violated: sigma = {ps} ranked {pr}, sigma = {sigma} ranked {r}"
                ));
            }
        }
        prev = Some((*sigma, r));
    }
    Ok(())
}

/// Locates the sharp thresholds by two monotone bisections over σ.
///
/// The bracket endpoints must classify as Residue (low) and Spreading (high);
/// a failing endpoint widens the bracket once (×2) before giving up. If even
/// the widened low end spreads, the documented all-spreading alternative is
/// returned instead of an error.
pub fn find_thresholds(
    session: &mut Session,
    bracket: (f64, f64),
    sigma_tol: f64,
) -> Result<ThresholdResult> {
    if !(sigma_tol > 0.0) {
        return domain("sigma_tol must be positive");
    }
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return domain(format!("invalid bracket [{lo}, {hi}]"));
    }
    if lo - 5.0 < session.grid.x_min || hi + 5.0 > session.grid.x_max {
        return domain(format!(
            "bracket [{lo}, {hi}] does not fit the grid [{}, {}]; widen the grid",
            session.grid.x_min, session.grid.x_max
        ));
    }

    let mut out_lo = session.classify_sigma(lo)?;
    let mut out_hi = session.classify_sigma(hi)?;
    let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    if out_lo.label != Label::Residue || out_hi.label != Label::Spreading {
        // one automatic ×2 widening, if the wider bracket still fits
        let (wlo, whi) = (c - 2.0 * w, c + 2.0 * w);
        if wlo - 5.0 >= session.grid.x_min && whi + 5.0 <= session.grid.x_max {
            if out_lo.label != Label::Residue {
                lo = wlo;
                out_lo = session.classify_sigma(lo)?;
            }
            if out_hi.label != Label::Spreading {
                hi = whi;
                out_hi = session.classify_sigma(hi)?;
            }
        }
    }
    if out_lo.label == Label::Spreading && out_hi.label == Label::Spreading {
        let log = collect_log(session);
        return Ok(ThresholdResult { sigma_lower: None, sigma_upper: None, all_spreading: true, log });
    }
    if out_lo.label != Label::Residue {
        return numerical(format!(
            "bracket precondition failed: classify({lo}) = {} (wanted residue)",
            out_lo.label
        ));
    }
    if out_hi.label != Label::Spreading {
        return numerical(format!(
            "bracket precondition failed: classify({hi}) = {} (wanted spreading)",
            out_hi.label
        ));
    }

    // σ_*: separates Residue from not-Residue
    let (mut a, mut b) = (lo, hi);
    while b - a > sigma_tol {
        let mid = 0.5 * (a + b);
        if session.classify_sigma(mid)?.label == Label::Residue {
            a = mid;
        } else {
            b = mid;
        }
    }
    let sigma_lower = (a, b);

    // σ*: separates Spreading from not-Spreading
    let (mut a2, mut b2) = (lo, hi);
    while b2 - a2 > sigma_tol {
        let mid = 0.5 * (a2 + b2);
        if session.classify_sigma(mid)?.label == Label::Spreading {
            b2 = mid;
        } else {
            a2 = mid;
        }
    }
    let sigma_upper = (a2, b2);

    let log = collect_log(session);
    check_monotone_log(&log)?;
    if sigma_lower.1 > sigma_upper.1 + sigma_tol {
        return numerical(format!(
            "bracket consistency violated: sigma_* hi {} above sigma^* hi {}",
            sigma_lower.1, sigma_upper.1
        ));
    }
    Ok(ThresholdResult {
        sigma_lower: Some(sigma_lower),
        sigma_upper: Some(sigma_upper),
        all_spreading: false,
        log,
    })
}

/// Distance-to-ground trace for a near-threshold run.
#[derive(Debug, Clone)]
pub struct ShadowTrace {
    pub min_dist: f64,
    pub min_time: f64,
    /// (t, sup-distance to the ground profile) at every whole time unit
    pub trace: Vec<(f64, f64)>,
}

/// Evolves the σ-shifted datum to t_max (no early exits, no steadiness stop)
/// recording the windowed distance to the unstable ground profile each unit
/// of time; the minimum is the shadowing depth.
pub fn ground_shadowing(session: &Session, sigma: f64) -> Result<ShadowTrace> {
    let ground = session
        .profiles
        .ground
        .as_ref()
        .ok_or_else(|| Error::Domain("ground shadowing requires L > L*".into()))?;
    let data = session.family.with_sigma(sigma);
    let field = make_initial(&data, &session.grid, &session.p)?;
    let win = session.window();
    let mut trace = vec![(0.0, sup_distance(&field, ground, win)?)];
    let sim = SimConfig { steady_tol: f64::MIN_POSITIVE, ..session.sim };
    let mut err: Option<Error> = None;
    let (_, _) = evolve_observed(field, &session.p, &sim, |f| {
        match sup_distance(f, ground, win) {
            Ok(d) => {
                trace.push((f.time, d));
                ObserverVerdict::Continue
            }
            Err(e) => {
                err = Some(e);
                ObserverVerdict::Stop
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let (mut min_dist, mut min_time) = (f64::INFINITY, 0.0);
    for &(t, d) in &trace {
        if d < min_dist {
            min_dist = d;
            min_time = t;
        }
    }
    Ok(ShadowTrace { min_dist, min_time, trace })
}

/// Regime label by comparison with L* (the ℓ(θ)/2 definition).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Spreading,
    Dichotomy,
    Trichotomy,
}

impl std::fmt::Display for Regime {
    fmt_impl!();
}

macro_rules! _unused {
    () => {};
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub half_width: f64,
    pub lstar: f64,
    pub regime: Regime,
    pub thresholds: Option<ThresholdResult>,
    pub error: Option<String>,
}

/// Per-width regime table; with `with_thresholds` each row also attempts the
/// bisection pair. Rows run in parallel, output order follows the input.
pub fn regime_sweep(
    alpha: f64,
    l_values: &[f64],
    family: &InitialData,
    h: f64,
    sim: &SimConfig,
    cls: &ClassifyConfig,
    bracket: (f64, f64),
    sigma_tol: f64,
    with_thresholds: bool,
) -> Result<Vec<SweepRow>> {
    let lstar = critical_half_width(alpha)?;
    let rows: Vec<SweepRow> = l_values
        .par_iter()
        .map(|&l| {
            let regime = if l < lstar {
                Regime::Spreading
            } else if l == lstar {
                Regime::Dichotomy
            } else {
                Regime::Trichotomy
            };
            let mut row = SweepRow { half_width: l, lstar, regime, thresholds: None, error: None };
            if with_thresholds {
                let attempt = (|| -> Result<ThresholdResult> {
                    let p = ModelParams::new(alpha, l)?;
                    let grid = Session::auto_grid(&p, h, bracket)?;
                    let mut session = Session::new(&p, &grid, sim, cls, family)?;
                    find_thresholds(&mut session, bracket, sigma_tol)
                })();
                match attempt {
                    Ok(t) => row.thresholds = Some(t),
                    Err(e) => row.error = Some(e.to_string()),
                }
            }
            row
        })
        .collect();
    Ok(rows)
}
