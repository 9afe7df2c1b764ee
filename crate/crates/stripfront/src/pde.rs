//! IMEX finite-difference solver for u_t = u_xx + f(x, u) on a truncated
//! line with zero-flux ends.
//!
//! One step treats diffusion implicitly (backward Euler, tridiagonal solve —
//! unconditionally stable) and the reaction explicitly at the current state.
//! Both sub-steps are monotone as long as dt ≤ 1/Lip(f), so the discrete
//! comparison principle holds and nodal values stay inside
//! [0, max(1, sup u₀)]; that bound is asserted every step rather than
//! clamped. The reaction is evaluated nodally, each node using its own
//! branch of f — no smoothing across the strip edges.

use crate::error::{domain, numerical, Result};
use crate::grid::Grid1D;
use crate::reaction::{bistable_prime, reaction_value, ModelParams};
use crate::stationary::StationaryProfile;

/// Front-like initial data families: limits 1 at -∞ and 0 at +∞,
/// non-increasing in x, shifted by σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// u = 1 for x < σ, 0 for x ≥ σ.
    Step { sigma: f64 },
    /// u = 1/(1 + e^{k(x-σ)}), k > 0.
    LogisticFront { k: f64, sigma: f64 },
}

impl InitialData {
    pub fn sigma(&self) -> f64 {
        match *self {
            InitialData::Step { sigma } => sigma,
            InitialData::LogisticFront { sigma, .. } => sigma,
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> InitialData {
        match *self {
            InitialData::Step { .. } => InitialData::Step { sigma },
            InitialData::LogisticFront { k, .. } => InitialData::LogisticFront { k, sigma },
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            InitialData::Step { .. } => "step",
            InitialData::LogisticFront { .. } => "logistic",
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialData::Step { sigma } => {
                if x < sigma {
                    1.0
                } else {
                    0.0
                }
            }
            InitialData::LogisticFront { k, sigma } => 1.0 / (1.0 + (k * (x - sigma)).exp()),
        }
    }

    /// The decay-rate guard of the front family: k must avoid the stationary
    /// tail rates √α and √(1-α) (they separate the data from every stationary
    /// solution at infinity; only the parameter check is enforceable on a
    /// truncated grid).
    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if let InitialData::LogisticFront { k, .. } = *self {
            if !(k > 0.0) {
                return domain(format!("logistic front needs k > 0; got {k}"));
            }
            for (rate, name) in [(p.alpha().sqrt(), "sqrt(alpha)"), ((1.0 - p.alpha()).sqrt(), "sqrt(1-alpha)")] {
                if (k - rate).abs() <= 1e-12 * rate.max(1.0) {
                    return domain(format!("logistic steepness k = {k} coincides with {name}"));
                }
            }
        }
        Ok(())
    }
}

/// Time-marching configuration.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    /// steadiness threshold on the unit-time sup increment ‖u(t+1)-u(t)‖∞
    pub steady_tol: f64,
    /// snapshot cadence in time units; 0 disables periodic snapshots
    pub snapshot_every: f64,
    /// disable the reaction term (pure-diffusion validation mode)
    pub diffusion_only: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 1e-2, t_max: 400.0, steady_tol: 1e-5, snapshot_every: 0.0, diffusion_only: false }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return domain(format!("dt must be positive; got {}", self.dt));
        }
        if !(self.t_max > 0.0) || !(self.steady_tol > 0.0) {
            return domain("t_max and steady_tol must be positive");
        }
        Ok(())
    }
}

/// A discretized solution at one time.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn sup_norm_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Discretizes the initial data onto the grid.
pub fn make_initial(data: &InitialData, grid: &Grid1D, p: &ModelParams) -> Result<Field> {
    data.validate(p)?;
    let values = grid.xs().iter().map(|&x| data.eval(x)).collect();
    Ok(Field { grid: *grid, values, time: 0.0 })
}

/// Global Lipschitz bound of f(x, ·) in u over [0, cap]: the strip branch
/// contributes 1, the cubic its extreme slope over the range.
pub fn reaction_lipschitz(p: &ModelParams, cap: f64) -> f64 {
    let alpha = p.alpha();
    let mut m: f64 = 1.0;
    for u in [0.0, cap, (1.0 + alpha) / 3.0] {
        if (0.0..=cap).contains(&u) {
            m = m.max(bistable_prime(alpha, u).abs());
        }
    }
    m
}

/// Reusable stepper: the implicit tridiagonal factorization depends only on
/// (grid, dt), so it is prepared once.
pub struct Stepper {
    p: ModelParams,
    dt: f64,
    diffusion_only: bool,
    /// maximum-principle cap max(1, sup u₀)
    cap: f64,
    xs: Vec<f64>,
    // Thomas algorithm prefactorization of (I - dt·D₂)
    lower: Vec<f64>,
    cprime: Vec<f64>,
    denom: Vec<f64>,
    scratch: Vec<f64>,
    steps: u64,
    t0: f64,
}

impl Stepper {
    pub fn new(p: &ModelParams, field: &Field, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let sup0 = field.values.iter().cloned().fold(0.0, f64::max);
        if field.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return domain("initial field must be finite and nonnegative");
        }
        let cap = sup0.max(1.0);
        let lip = reaction_lipschitz(p, cap);
        if cfg.dt > 1.0 / lip {
            return domain(format!(
                "dt = {} exceeds the reaction stability bound 1/Lip(f) = {}",
                cfg.dt,
                1.0 / lip
            ));
        }
        let n = field.grid.n;
        let h = field.grid.h();
        let r = cfg.dt / (h * h);
        // rows of I - dt·D₂ with mirrored (zero-flux) end stencils
        let mut lower = vec![-r; n];
        let mut diag = vec![1.0 + 2.0 * r; n];
        let mut upper = vec![-r; n];
        upper[0] = -2.0 * r;
        lower[n - 1] = -2.0 * r;
        diag[0] = 1.0 + 2.0 * r;
        diag[n - 1] = 1.0 + 2.0 * r;
        // Thomas forward elimination (matrix is constant per run)
        let mut cprime = vec![0.0; n];
        let mut denom = vec![0.0; n];
        denom[0] = diag[0];
        cprime[0] = upper[0] / denom[0];
        for i in 1..n {
            denom[i] = diag[i] - lower[i] * cprime[i - 1];
            cprime[i] = if i + 1 < n { upper[i] / denom[i] } else { 0.0 };
        }
        if denom.iter().any(|d| d.abs() < 1e-300) {
            return numerical("tridiagonal factorization became singular");
        }
        let mut s = Self {
            p: *p,
            dt: cfg.dt,
            diffusion_only: cfg.diffusion_only,
            cap,
            xs: field.grid.xs(),
            lower,
            cprime,
            denom,
            scratch: vec![0.0; n],
            steps: (field.time / cfg.dt).round() as u64,
            t0: 0.0,
        };
        s.t0 = field.time - s.steps as f64 * cfg.dt;
        Ok(s)
    }

    /// One IMEX step in place: explicit reaction at the current state, then
    /// the implicit diffusion solve; asserts the discrete maximum principle.
    pub fn advance(&mut self, field: &mut Field) -> Result<()> {
        let n = field.values.len();
        let u = &mut field.values;
        let rhs = &mut self.scratch;
        if self.diffusion_only {
            rhs.copy_from_slice(u);
        } else {
            for i in 0..n {
                rhs[i] = u[i] + self.dt * reaction_value(&self.p, self.xs[i], u[i]);
            }
        }
        // Thomas solve (I - dt D₂) u_new = rhs
        u[0] = rhs[0] / self.denom[0];
        for i in 1..n {
            u[i] = (rhs[i] - self.lower[i] * u[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            u[i] -= self.cprime[i] * u[i + 1];
        }
        // discrete maximum principle, asserted with 1e-12 slack
        for (i, &v) in u.iter().enumerate() {
            if !v.is_finite() {
                return numerical(format!("non-finite value at node {i}, t = {}", field.time));
            }
            if v < -1e-12 || v > self.cap + 1e-12 {
                return numerical(format!(
                    "maximum principle violated at node {i}: u = {v} outside [0, {}]",
                    self.cap
                ));
            }
        }
        self.steps += 1;
        field.time = self.t0 + self.steps as f64 * self.dt;
        Ok(())
    }
}

/// One IMEX step as a pure function (allocating convenience wrapper).
pub fn step(field: &Field, p: &ModelParams, cfg: &SimConfig) -> Result<Field> {
    let mut out = field.clone();
    let mut stepper = Stepper::new(p, field, cfg)?;
    stepper.advance(&mut out)?;
    Ok(out)
}

/// What an observer may do at each whole time unit.
pub enum ObserverVerdict {
    Continue,
    Stop,
}

/// Marches until the unit-time sup increment drops below `steady_tol` or
/// t ≥ t_max. The observer (if any) runs at every whole time unit and may
/// stop the run early. Returns the final field and whether steadiness fired.
pub fn evolve_observed(
    field: Field,
    p: &ModelParams,
    cfg: &SimConfig,
    mut observer: impl FnMut(&Field) -> ObserverVerdict,
) -> Result<(Field, bool)> {
    let mut f = field;
    let mut stepper = Stepper::new(p, &f, cfg)?;
    let steps_per_unit = (1.0 / cfg.dt).round().max(1.0) as u64;
    let mut last_unit = f.values.clone();
    let mut steady = false;
    let mut k: u64 = 0;
    while f.time < cfg.t_max - 0.5 * cfg.dt {
        stepper.advance(&mut f)?;
        k += 1;
        if k % steps_per_unit == 0 {
            let diff = f
                .values
                .iter()
                .zip(&last_unit)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            last_unit.copy_from_slice(&f.values);
            if diff < cfg.steady_tol {
                steady = true;
                break;
            }
            if let ObserverVerdict::Stop = observer(&f) {
                break;
            }
        }
    }
    Ok((f, steady))
}

/// Plain evolve: march to steadiness or t_max.
pub fn evolve(field: Field, p: &ModelParams, cfg: &SimConfig) -> Result<(Field, bool)> {
    evolve_observed(field, p, cfg, |_| ObserverVerdict::Continue)
}

/// Sup distance between the field and a profile over a window, the profile
/// interpolated onto the field nodes.
pub fn sup_distance(field: &Field, profile: &StationaryProfile, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if lo >= hi {
        return domain(format!("empty window [{lo}, {hi}]"));
    }
    let (plo, phi) = profile.x_range();
    if lo < field.grid.x_min || hi > field.grid.x_max || lo < plo || hi > phi {
        return domain(format!(
            "window [{lo}, {hi}] not contained in field [{}, {}] and profile [{plo}, {phi}]",
            field.grid.x_min, field.grid.x_max
        ));
    }
    let same_grid = profile.xs.len() == field.grid.n
        && (profile.xs[0] - field.grid.x_min).abs() < 1e-12
        && (profile.xs[profile.xs.len() - 1] - field.grid.x_max).abs() < 1e-12;
    let mut worst = 0.0f64;
    for i in 0..field.grid.n {
        let x = field.grid.node(i);
        if x < lo || x > hi {
            continue;
        }
        let pv = if same_grid { profile.vs[i] } else { profile.eval(x)? };
        worst = worst.max((field.values[i] - pv).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::ModelParams;

    fn p() -> ModelParams {
        ModelParams::new(0.25, 1.0).unwrap()
    }

    #[test]
    fn initial_data_families() {
        let grid = Grid1D::new(-5.0, 5.0, 11).unwrap();
        let f = make_initial(&InitialData::Step { sigma: 0.0 }, &grid, &p()).unwrap();
        assert_eq!(f.values[0], 1.0);
        assert_eq!(f.values[10], 0.0);
        // x = sigma belongs to the 0 side
        assert_eq!(f.values[5], 0.0);
        let g = make_initial(&InitialData::LogisticFront { k: 1.0, sigma: 0.0 }, &grid, &p()).unwrap();
        assert!((g.values[5] - 0.5).abs() < 1e-15);
        // monotone in sigma, nodewise
        let g2 = make_initial(&InitialData::LogisticFront { k: 1.0, sigma: 1.0 }, &grid, &p()).unwrap();
        for (a, b) in g.values.iter().zip(&g2.values) {
            assert!(a <= b);
        }
    }

    #[test]
    fn logistic_rate_guard() {
        let k_bad = 0.25f64.sqrt();
        assert!(InitialData::LogisticFront { k: k_bad, sigma: 0.0 }.validate(&p()).is_err());
        let k_bad2 = 0.75f64.sqrt();
        assert!(InitialData::LogisticFront { k: k_bad2, sigma: 0.0 }.validate(&p()).is_err());
        assert!(InitialData::LogisticFront { k: 1.0, sigma: 0.0 }.validate(&p()).is_ok());
        assert!(InitialData::LogisticFront { k: -1.0, sigma: 0.0 }.validate(&p()).is_err());
    }

    #[test]
    fn equilibria_are_fixed() {
        let grid = Grid1D::new(-10.0, 10.0, 401).unwrap();
        let cfg = SimConfig { dt: 0.01, ..Default::default() };
        // u ≡ 0 with the strip
        let zero = Field { grid, values: vec![0.0; grid.n], time: 0.0 };
        let out = step(&zero, &p(), &cfg).unwrap();
        assert!(out.values.iter().all(|&v| v.abs() < 1e-15));
        // u ≡ 1 without a strip (pure cubic medium)
        let nostrip = ModelParams::without_strip(0.25).unwrap();
        let one = Field { grid, values: vec![1.0; grid.n], time: 0.0 };
        let out = step(&one, &nostrip, &cfg).unwrap();
        for &v in &out.values {
            assert!((v - 1.0).abs() < 1e-13, "u=1 must stay fixed; got {v}");
        }
    }

    #[test]
    fn dt_stability_guard() {
        let grid = Grid1D::new(-5.0, 5.0, 101).unwrap();
        let field = Field { grid, values: vec![0.5; grid.n], time: 0.0 };
        let cfg = SimConfig { dt: 1.5, ..Default::default() };
        assert!(Stepper::new(&p(), &field, &cfg).is_err());
    }

    #[test]
    fn time_advances_by_dt_exactly() {
        let grid = Grid1D::new(-5.0, 5.0, 101).unwrap();
        let cfg = SimConfig { dt: 0.01, ..Default::default() };
        let mut f = make_initial(&InitialData::Step { sigma: 0.0 }, &grid, &p()).unwrap();
        let mut st = Stepper::new(&p(), &f, &cfg).unwrap();
        for k in 1..=1000u64 {
            st.advance(&mut f).unwrap();
            assert!((f.time - k as f64 * 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_kernel_oracle() {
        // pure diffusion of u0 = exp(-x²/8): exact solution
        // sqrt(2/(2+t)) exp(-x²/(4(2+t)))
        let grid = Grid1D::with_spacing(-25.0, 25.0, 0.02).unwrap();
        let cfg = SimConfig { dt: 1e-3, t_max: 1.0, diffusion_only: true, steady_tol: 1e-30, ..Default::default() };
        let values = grid.xs().iter().map(|&x| (-x * x / 8.0).exp()).collect();
        let mut f = Field { grid, values, time: 0.0 };
        let mut st = Stepper::new(&p(), &f, &cfg).unwrap();
        while f.time < 1.0 - 1e-9 {
            st.advance(&mut f).unwrap();
        }
        let mut worst = 0.0f64;
        for (i, &x) in grid.xs().iter().enumerate() {
            let exact = (2.0 / 3.0f64).sqrt() * (-x * x / 12.0).exp();
            worst = worst.max((f.values[i] - exact).abs());
        }
        assert!(worst < 1e-4, "heat kernel sup error {worst:.3e}");
    }

    #[test]
    fn comparison_principle_for_ordered_sigmas() {
        let p = p();
        let grid = Grid1D::with_spacing(-15.0, 15.0, 0.05).unwrap();
        let cfg = SimConfig { dt: 0.01, t_max: 20.0, steady_tol: 1e-12, ..Default::default() };
        let mut lo = make_initial(&InitialData::Step { sigma: -1.0 }, &grid, &p).unwrap();
        let mut hi = make_initial(&InitialData::Step { sigma: 1.0 }, &grid, &p).unwrap();
        let mut st_lo = Stepper::new(&p, &lo, &cfg).unwrap();
        let mut st_hi = Stepper::new(&p, &hi, &cfg).unwrap();
        for _ in 0..2000 {
            st_lo.advance(&mut lo).unwrap();
            st_hi.advance(&mut hi).unwrap();
            for (a, b) in lo.values.iter().zip(&hi.values) {
                assert!(a <= &(b + 1e-10), "comparison violated: {a} > {b}");
            }
        }
    }

    #[test]
    fn evolve_reports_steadiness() {
        let p = p();
        let grid = Grid1D::with_spacing(-15.0, 15.0, 0.05).unwrap();
        let cfg = SimConfig { dt: 0.01, t_max: 300.0, steady_tol: 1e-6, ..Default::default() };
        let f = make_initial(&InitialData::Step { sigma: 0.0 }, &grid, &p).unwrap();
        let (out, steady) = evolve(f, &p, &cfg).unwrap();
        assert!(steady, "expected steadiness before t_max; stopped at {}", out.time);
        assert!(out.time < 300.0);
    }

    #[test]
    fn sup_distance_basics() {
        let pm = p();
        let grid = Grid1D::with_spacing(-12.0, 12.0, 0.05).unwrap();
        let prof = crate::stationary::build_profile(crate::stationary::ProfileKind::Big, &pm, &grid)
            .unwrap();
        let field = Field { grid, values: prof.vs.clone(), time: 0.0 };
        assert!(sup_distance(&field, &prof, (-5.0, 5.0)).unwrap() < 1e-15);
        let mut shifted = field.clone();
        for v in &mut shifted.values {
            *v += 0.125;
        }
        let d = sup_distance(&shifted, &prof, (-5.0, 5.0)).unwrap();
        assert!((d - 0.125).abs() < 1e-12);
        assert!(sup_distance(&field, &prof, (-50.0, 5.0)).is_err());
    }
}
