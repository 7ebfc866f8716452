//! Radial ground state Q of
//!
//! ```text
//! -ΔQ + kappa Q - sigma Q^{p+1} = 0,   kappa = (4 + 2p - Np)/(Np),  sigma = 4/(Np)
//! ```
//!
//! solved by shooting on Q(0) with fixed-step RK4 and bisection, plus the
//! integral norms of Q, the Pohozaev/Nehari identities they satisfy, and the
//! sharp Gagliardo-Nirenberg constant built from |Q|_{L^2}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::RadialField;
use crate::quadrature::{derivative, radial_laplacian, sphere_measure, RadialRule};

/// Upper bound 2* - 2 on the exponent p (infinite for N <= 2).
pub fn exponent_bound(dim: u32) -> f64 {
    if dim == 3 {
        4.0
    } else {
        f64::INFINITY
    }
}

/// Rejects (N, p) outside 1 <= N <= 3, 0 < p < 2* - 2.
pub fn check_admissible(dim: u32, p: f64) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Inadmissible(format!("dimension N = {dim} must be 1, 2 or 3")));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Inadmissible(format!("exponent p = {p} must be positive and finite")));
    }
    let bound = exponent_bound(dim);
    if p >= bound {
        return Err(Error::Inadmissible(format!(
            "exponent p = {p} must be below 2* - 2 = {bound} for N = {dim}"
        )));
    }
    Ok(())
}

/// Coefficients of the ground-state equation for a given (N, p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldEqCoeffs {
    pub kappa: f64,
    pub sigma: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub dim: u32,
}

impl FieldEqCoeffs {
    pub fn new(dim: u32, p: f64) -> Result<Self> {
        check_admissible(dim, p)?;
        let np = dim as f64 * p;
        let linear = 4.0 + 2.0 * p - np;
        if linear <= 0.0 {
            return Err(Error::Inadmissible(format!("4 + 2p - Np = {linear} must be positive")));
        }
        Ok(FieldEqCoeffs { kappa: linear / np, sigma: 4.0 / np, p, dim })
    }

    /// Nonlinear term sigma |q|^p q.
    #[inline]
    fn nonlinearity(&self, q: f64) -> f64 {
        self.sigma * q.abs().powf(self.p) * q
    }

    /// Decay rate sqrt(kappa) of the linearized tail.
    pub fn decay_rate(&self) -> f64 {
        self.kappa.sqrt()
    }
}

/// Settings for [`solve_ground_state`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolverConfig {
    /// RK4 step in units of the decay length 1/sqrt(kappa).
    pub step: f64,
    /// Start of integration; the origin is seeded by a Taylor expansion.
    pub r0: f64,
    /// Initial shooting bracket for Q(0).
    pub bracket: (f64, f64),
    /// Relative bisection width on Q(0).
    pub q0_tol: f64,
    /// The shot is trusted down to `match_fraction * Q(0)`; beyond, the
    /// linearized decaying solution takes over.
    pub match_fraction: f64,
    /// Truncation radius in decay lengths.
    pub r_max_scale: f64,
    /// Bound on the discrete ODE residual, relative to its largest term.
    pub residual_tol: f64,
    /// Bound on the truncated tail of every norm, relative to the norm.
    pub tail_tol: f64,
    /// Total step halvings allowed when the residual check fails.
    pub max_refinements: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step: 2.0e-3,
            r0: 1.0e-6,
            bracket: (0.1, 50.0),
            q0_tol: 1.0e-15,
            match_fraction: 1.0e-5,
            r_max_scale: 40.0,
            residual_tol: 1.0e-7,
            tail_tol: 1.0e-12,
            max_refinements: 8,
        }
    }
}

/// Radial samples of Q on a uniform grid starting at r = 0.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroundStateProfile {
    pub coeffs: FieldEqCoeffs,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub q0: f64,
    pub r_max: f64,
}

impl GroundStateProfile {
    pub fn dim(&self) -> u32 {
        self.coeffs.dim
    }

    pub fn p(&self) -> f64 {
        self.coeffs.p
    }

    /// Grid spacing; errors if the grid is not uniform from the origin.
    pub fn step(&self) -> Result<f64> {
        uniform_step(&self.r_grid)
    }

    /// Checks positivity, strict decay, the size of the last sample and the
    /// exponential log-slope of the outer quarter.
    pub fn validate(&self) -> Result<()> {
        let v = &self.values;
        if v.len() != self.r_grid.len() || v.len() < 8 {
            return Err(Error::InvalidInput("profile needs at least eight samples".into()));
        }
        self.step()?;
        if !(self.q0 > 0.0) || v[0] != self.q0 {
            return Err(Error::InvalidInput("profile must start at Q(0) = q0 > 0".into()));
        }
        if let Some(i) = v.windows(2).position(|w| !(w[1] < w[0]) || w[1] < 0.0) {
            return Err(Error::InvalidInput(format!(
                "profile is not positive and strictly decreasing at r = {}",
                self.r_grid[i + 1]
            )));
        }
        let last = *v.last().unwrap();
        if !(last < 1e-8 * self.q0) {
            return Err(Error::InvalidInput(format!(
                "profile has not decayed: Q(r_max)/Q(0) = {:e}",
                last / self.q0
            )));
        }
        let n = v.len() - 1;
        let i = 3 * n / 4;
        if v[n] > 0.0 {
            let slope = (v[i] / v[n]).ln() / (self.r_grid[n] - self.r_grid[i]);
            let rate = self.coeffs.decay_rate();
            // For small p the nonlinear term fades slowly and still slows the decay.
            let c = &self.coeffs;
            let slowest = (c.kappa - c.sigma * v[i].powf(c.p)).max(0.0).sqrt();
            if slope < 0.95 * slowest || slope > 1.05 * rate {
                return Err(Error::InvalidInput(format!(
                    "tail log-slope {slope} inconsistent with decay rate {rate}"
                )));
            }
        }
        Ok(())
    }

    /// Max-norm of Q'' + (N-1)/r Q' - kappa Q + sigma Q^{p+1}, relative to
    /// the largest of the three terms on the grid (kappa Q(0) alone is far too
    /// small a scale near 2* - 2, where kappa vanishes). The outermost two
    /// samples use one-sided stencils and are skipped.
    pub fn ode_residual(&self) -> Result<f64> {
        let h = self.step()?;
        let lap = radial_laplacian(self.dim(), &self.values, h);
        let c = &self.coeffs;
        let n = self.values.len();
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for i in 0..n - 2 {
            let q = self.values[i];
            let (linear, nonlinear) = (c.kappa * q, c.nonlinearity(q));
            worst = worst.max((lap[i] - linear + nonlinear).abs());
            scale = scale.max(lap[i].abs()).max(linear.abs()).max(nonlinear.abs());
        }
        Ok(worst / scale)
    }

    /// Profile CSV with header `r,Q`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,Q\n");
        for (r, q) in self.r_grid.iter().zip(&self.values) {
            out.push_str(&format!("{r:.16e},{q:.16e}\n"));
        }
        out
    }

    /// The profile as a generic radial field.
    pub fn to_field(&self) -> RadialField {
        RadialField {
            dim: self.dim(),
            r_grid: self.r_grid.clone(),
            values: self.values.clone(),
            metadata: Some(format!("ground state Q, N={}, p={}", self.dim(), self.p())),
        }
    }
}

pub(crate) fn uniform_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(Error::InvalidInput("grid must start at r = 0 with at least two points".into()));
    }
    let h = grid[1];
    if !(h > 0.0) {
        return Err(Error::InvalidInput("grid spacing must be positive".into()));
    }
    for (i, r) in grid.iter().enumerate() {
        if (r - i as f64 * h).abs() > 1e-9 * h * (i as f64).max(1.0) {
            return Err(Error::InvalidInput(format!("grid is not uniform at index {i}")));
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ShotOutcome {
    /// Q crossed zero: Q(0) too large.
    Overshoot,
    /// Q' turned positive while Q > 0: Q(0) too small.
    Undershoot,
    /// Neither event before r_max.
    Undecided,
}

struct Shot {
    outcome: ShotOutcome,
    /// Q on grid points 1..; entry k is Q(k h), k >= 1.
    values: Vec<f64>,
}

struct Shooter {
    coeffs: FieldEqCoeffs,
    h: f64,
    n_intervals: usize,
    r0: f64,
}

impl Shooter {
    fn rhs(&self, r: f64, q: f64, dq: f64) -> (f64, f64) {
        let c = &self.coeffs;
        let friction = if self.coeffs.dim == 1 { 0.0 } else { (c.dim as f64 - 1.0) / r * dq };
        (dq, c.kappa * q - c.nonlinearity(q) - friction)
    }

    fn rk4(&self, r: f64, q: f64, dq: f64, h: f64) -> (f64, f64) {
        let (k1q, k1p) = self.rhs(r, q, dq);
        let (k2q, k2p) = self.rhs(r + 0.5 * h, q + 0.5 * h * k1q, dq + 0.5 * h * k1p);
        let (k3q, k3p) = self.rhs(r + 0.5 * h, q + 0.5 * h * k2q, dq + 0.5 * h * k2p);
        let (k4q, k4p) = self.rhs(r + h, q + h * k3q, dq + h * k3p);
        (
            q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
            dq + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    }

    fn shoot(&self, q0: f64, record: bool) -> Shot {
        let c = &self.coeffs;
        let curvature = (c.kappa * q0 - c.nonlinearity(q0)) / c.dim as f64;
        let mut q = q0 + 0.5 * curvature * self.r0 * self.r0;
        let mut dq = curvature * self.r0;
        // Geometric substeps up to the first grid point: the (N-1)/r term
        // varies by orders of magnitude across [r0, h].
        let mut r = self.r0;
        while r < self.h {
            let step = (0.05 * r).min(self.h - r);
            let (nq, ndq) = self.rk4(r, q, dq, step);
            q = nq;
            dq = ndq;
            r = if self.h - r <= 0.05 * r { self.h } else { r + step };
        }
        let mut values = Vec::new();
        for k in 1..=self.n_intervals {
            if k > 1 {
                // Near the origin h (N-1)/r is not small; split those steps.
                let sub = (512 / k).clamp(1, 16);
                let dh = self.h / sub as f64;
                for j in 0..sub {
                    let r = (k - 1) as f64 * self.h + j as f64 * dh;
                    let (nq, ndq) = self.rk4(r, q, dq, dh);
                    q = nq;
                    dq = ndq;
                }
            }
            if record {
                values.push(q);
            }
            // Blow-up only happens for amplitudes far above Q(0).
            if q <= 0.0 || !q.is_finite() || !dq.is_finite() {
                return Shot { outcome: ShotOutcome::Overshoot, values };
            }
            if dq > 0.0 {
                return Shot { outcome: ShotOutcome::Undershoot, values };
            }
        }
        Shot { outcome: ShotOutcome::Undecided, values }
    }
}

/// e^z K_0(z) = ∫_0^∞ exp(-z (cosh t - 1)) dt, by the trapezoid rule
/// (spectrally accurate for this analytic, rapidly decaying integrand).
pub(crate) fn scaled_bessel_k0(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let t_end = (1.0 + 40.0 / z).acosh();
    let dt = 0.02;
    let n = (t_end / dt).ceil() as usize;
    let mut sum = 0.5;
    for k in 1..=n {
        let t = k as f64 * dt;
        sum += (-z * (t.cosh() - 1.0)).exp();
    }
    sum * dt
}

/// Decaying solution of the linearized radial equation, up to a constant.
fn linear_tail_ratio(dim: u32, rate: f64, r: f64, r_ref: f64) -> f64 {
    let exp = (-rate * (r - r_ref)).exp();
    match dim {
        1 => exp,
        2 => exp * scaled_bessel_k0(rate * r) / scaled_bessel_k0(rate * r_ref),
        _ => exp * r_ref / r,
    }
}

/// Solves the radial ground-state equation by shooting on Q(0).
///
/// Near 2* - 2 the core of Q is far narrower than its decay length, so a step
/// measured in decay lengths can be too coarse there. When the ODE residual
/// check fails the step is refined, jumping directly to the level its h⁴
/// scaling predicts, up to `max_refinements` halvings in total.
pub fn solve_ground_state(dim: u32, p: f64, cfg: &SolverConfig) -> Result<GroundStateProfile> {
    let coeffs = FieldEqCoeffs::new(dim, p)?;
    if !(cfg.step > 0.0 && cfg.r_max_scale > 0.0 && cfg.match_fraction > 0.0) {
        return Err(Error::InvalidInput("solver step, radius and match fraction must be positive".into()));
    }
    let mut level = 0;
    loop {
        let step = cfg.step * 0.5f64.powi(level as i32);
        let jump = match solve_with_step(coeffs, step, cfg) {
            Ok(profile) => {
                let residual = profile.ode_residual()?;
                if residual <= cfg.residual_tol {
                    return Ok(profile);
                }
                if level >= cfg.max_refinements {
                    return Err(Error::ShootingDiverged(format!(
                        "ODE residual {residual:e} exceeds {:e} at step {step:e}; refine the step",
                        cfg.residual_tol
                    )));
                }
                // Factor 4 margin on the predicted residual.
                ((4.0 * residual / cfg.residual_tol).log2() / 4.0).ceil().max(1.0) as u32
            }
            Err(Error::ShootingDiverged(_)) if level < cfg.max_refinements => 1,
            Err(err) => return Err(err),
        };
        level = (level + jump).min(cfg.max_refinements);
    }
}

fn solve_with_step(coeffs: FieldEqCoeffs, step: f64, cfg: &SolverConfig) -> Result<GroundStateProfile> {
    let dim = coeffs.dim;
    let rate = coeffs.decay_rate();
    let h = step / rate;
    if !(cfg.r0 > 0.0 && cfg.r0 < h) {
        return Err(Error::InvalidInput(format!("r0 = {} must lie in (0, h = {h})", cfg.r0)));
    }
    let mut n_intervals = (cfg.r_max_scale / step).ceil() as usize;
    n_intervals = n_intervals.div_ceil(4) * 4;
    let shooter = Shooter { coeffs, h, n_intervals, r0: cfg.r0 };

    let (mut lo, mut hi) = cfg.bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("bad shooting bracket [{lo}, {hi}]")));
    }
    let lo_outcome = shooter.shoot(lo, false).outcome;
    let mut hi_outcome = shooter.shoot(hi, false).outcome;
    // A coarse step can misclassify very large amplitudes; walk the upper
    // end down until it overshoots.
    let top = hi;
    while hi_outcome != ShotOutcome::Overshoot && 0.7 * hi > lo {
        hi *= 0.7;
        hi_outcome = shooter.shoot(hi, false).outcome;
    }
    if hi_outcome != ShotOutcome::Overshoot {
        hi = top;
    }
    if lo_outcome != ShotOutcome::Undershoot || hi_outcome != ShotOutcome::Overshoot {
        return Err(Error::NoBracket {
            lo,
            hi,
            reason: format!("lower end {lo_outcome:?}, upper end {hi_outcome:?}"),
        });
    }
    for _ in 0..200 {
        if hi - lo <= cfg.q0_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shooter.shoot(mid, false).outcome {
            ShotOutcome::Overshoot => hi = mid,
            ShotOutcome::Undershoot => lo = mid,
            // Numerically exact hit: the whole grid decays monotonically.
            ShotOutcome::Undecided => {
                lo = mid;
                hi = mid;
                break;
            }
        }
    }

    let under = shooter.shoot(lo, true);
    let over = shooter.shoot(hi, true);
    let q0 = 0.5 * (lo + hi);
    let threshold = cfg.match_fraction * q0;
    let reach = under.values.len().min(over.values.len());
    let Some(m) = (0..reach).find(|&k| under.values[k] < threshold && over.values[k] < threshold)
    else {
        return Err(Error::ShootingDiverged(format!(
            "bracketing shots separate before Q falls below {threshold:e}; refine the step"
        )));
    };
    let gap = (under.values[m] - over.values[m]).abs();
    let q_match = 0.5 * (under.values[m] + over.values[m]);
    if !(q_match > 0.0) || gap > 1e-2 * q_match {
        return Err(Error::ShootingDiverged(format!(
            "bracketing shots disagree by {:e} (relative) at the matching radius",
            gap / q_match
        )));
    }

    let r_grid: Vec<f64> = (0..=n_intervals).map(|i| i as f64 * h).collect();
    let r_match = (m + 1) as f64 * h;
    // Log-slope of the shot minus that of the linear solution at the match,
    // both from the same backward stencil so its truncation error cancels.
    // The gap is the nonlinear term, of order Q^p, and it fades like
    // Q^p along the tail. Matching it keeps Q' continuous, which matters for
    // small p where sigma Q^p is far from negligible at the match.
    let backward = |f: &dyn Fn(usize) -> f64| (3.0 * f(m) - 4.0 * f(m - 1) + f(m - 2)) / (2.0 * h);
    let shot = |k: usize| 0.5 * (under.values[k] + over.values[k]);
    let lin = |k: usize| linear_tail_ratio(dim, rate, (k + 1) as f64 * h, r_match);
    let excess = if m >= 2 { backward(&shot) / q_match - backward(&lin) } else { 0.0 };
    let fade = coeffs.p * rate;
    let correction = |r: f64| (excess * (1.0 - (-fade * (r - r_match)).exp()) / fade).exp();
    let mut values = Vec::with_capacity(n_intervals + 1);
    values.push(q0);
    for k in 0..n_intervals {
        let r = (k + 1) as f64 * h;
        if k <= m {
            values.push(0.5 * (under.values[k] + over.values[k]));
        } else {
            values.push(q_match * linear_tail_ratio(dim, rate, r, r_match) * correction(r));
        }
    }
    let profile = GroundStateProfile { coeffs, r_max: r_grid[n_intervals], r_grid, values, q0 };
    profile.validate()?;
    Ok(profile)
}

/// Amplitude of the one-dimensional sech profile.
pub fn closed_form_amplitude(p: f64) -> Result<f64> {
    let c = FieldEqCoeffs::new(1, p)?;
    Ok((c.kappa * (p + 2.0) / (2.0 * c.sigma)).powf(1.0 / p))
}

/// Q(x) = A sech^{2/p}((p/2) sqrt(kappa) x), the explicit solution for N = 1.
pub fn closed_form_1d(p: f64, r_grid: &[f64]) -> Result<GroundStateProfile> {
    let c = FieldEqCoeffs::new(1, p)?;
    if r_grid.first() != Some(&0.0) || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must start at 0 and increase strictly".into()));
    }
    let amp = closed_form_amplitude(p)?;
    let k = 0.5 * p * c.decay_rate();
    let values = r_grid
        .iter()
        .map(|&x| {
            let e = (-k * x).exp();
            let sech = 2.0 * e / (1.0 + e * e);
            amp * sech.powf(2.0 / p)
        })
        .collect();
    Ok(GroundStateProfile {
        coeffs: c,
        r_grid: r_grid.to_vec(),
        values,
        q0: amp,
        r_max: *r_grid.last().unwrap(),
    })
}

/// Integral norms of Q: B = ∫Q², A = ∫|∇Q|², C = ∫Q^{p+2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QNorms {
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub pnorm: f64,
    pub q_l2: f64,
}

impl QNorms {
    /// Builds norms from already-known integrals.
    pub fn from_integrals(grad_sq: f64, mass_sq: f64, pnorm: f64) -> Result<Self> {
        if !(grad_sq > 0.0 && mass_sq > 0.0 && pnorm > 0.0) {
            return Err(Error::InvalidInput("norms must be positive".into()));
        }
        Ok(QNorms { mass_sq, grad_sq, pnorm, q_l2: mass_sq.sqrt() })
    }
}

/// Default tail tolerance of [`compute_norms`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Radial Simpson quadrature of the three norms with an exponential-tail
/// correction beyond r_max.
pub fn compute_norms(profile: &GroundStateProfile) -> Result<QNorms> {
    compute_norms_with_tol(profile, DEFAULT_TAIL_TOL)
}

pub fn compute_norms_with_tol(profile: &GroundStateProfile, tail_tol: f64) -> Result<QNorms> {
    let h = profile.step()?;
    let v = &profile.values;
    if v.len() < 8 || v.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
        return Err(Error::InvalidInput("profile must be finite and nonnegative".into()));
    }
    if !(profile.q0 > 0.0) || v.iter().all(|&q| q == 0.0) {
        return Err(Error::InvalidInput("zero profile".into()));
    }
    let dim = profile.dim();
    let p = profile.p();
    let rule = RadialRule::new(dim, h, v.len());
    let dq = derivative(v, h);
    let mut mass = rule.integrate_with(|i| v[i] * v[i]);
    let mut grad = rule.integrate_with(|i| dq[i] * dq[i]);
    let mut pnorm = rule.integrate_with(|i| v[i].powf(p + 2.0));

    // ∫_R^∞ e^{-2 rate r} r^{N-1} dr ≈ e^{-2 rate R} R^{N-1}/(2 rate).
    let rate = profile.coeffs.decay_rate();
    let r_end = profile.r_max;
    let q_end = *v.last().unwrap();
    let shell = sphere_measure(dim) * r_end.powi(dim as i32 - 1);
    let tail_mass = shell * q_end * q_end / (2.0 * rate);
    let tail_grad = rate * rate * tail_mass;
    let tail_p = shell * q_end.powf(p + 2.0) / ((p + 2.0) * rate);
    let worst = (tail_mass / mass).max(tail_grad / grad).max(tail_p / pnorm);
    if worst > tail_tol {
        return Err(Error::TailTooLarge { estimate: worst, tol: tail_tol });
    }
    mass += tail_mass;
    grad += tail_grad;
    pnorm += tail_p;
    QNorms::from_integrals(grad, mass, pnorm)
}

/// Relative residuals of A = B and A = 2C/(p+2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub grad_vs_mass: f64,
    pub grad_vs_pnorm: f64,
    pub tol: f64,
    pub pass: bool,
}

impl PohozaevReport {
    pub fn residuals(&self) -> [f64; 2] {
        [self.grad_vs_mass, self.grad_vs_pnorm]
    }
}

pub fn check_pohozaev(norms: &QNorms, p: f64, tol: f64) -> PohozaevReport {
    let a = norms.grad_sq;
    let grad_vs_mass = ((a - norms.mass_sq) / a).abs();
    let grad_vs_pnorm = ((a - 2.0 * norms.pnorm / (p + 2.0)) / a).abs();
    PohozaevReport {
        grad_vs_mass,
        grad_vs_pnorm,
        tol,
        pass: grad_vs_mass < tol && grad_vs_pnorm < tol,
    }
}

/// Sharp Gagliardo-Nirenberg constant (p+2)/(2 |Q|_{L^2}^p).
pub fn gn_constant(norms: &QNorms, p: f64) -> f64 {
    (p + 2.0) / (2.0 * norms.q_l2.powf(p))
}

/// Outcome of testing one field against the Gagliardo-Nirenberg inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GNCertificate {
    pub constant: f64,
    /// ∫|u|^{p+2} over the right-hand side; at most 1 when the inequality holds.
    pub ratio: f64,
}

pub fn check_gn(field: &RadialField, constant: f64, p: f64) -> Result<GNCertificate> {
    let mass = field.mass()?;
    let grad = field.grad_norm_sq()?;
    if !(mass > 0.0 && grad > 0.0) {
        return Err(Error::InvalidInput("GN check needs a nonzero field".into()));
    }
    let np = field.dim as f64 * p;
    let rhs = constant * grad.powf(np / 4.0) * mass.powf((2.0 * (p + 2.0) - np) / 4.0);
    Ok(GNCertificate { constant, ratio: field.pnorm(p)? / rhs })
}

/// JSON layout of the norms export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsExport {
    #[serde(rename = "N")]
    pub dim: u32,
    pub p: f64,
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub pnorm: f64,
    pub q_l2: f64,
    pub pohozaev_residuals: [f64; 2],
}

impl NormsExport {
    pub fn new(dim: u32, p: f64, norms: &QNorms) -> Self {
        NormsExport {
            dim,
            p,
            mass_sq: norms.mass_sq,
            grad_sq: norms.grad_sq,
            pnorm: norms.pnorm,
            q_l2: norms.q_l2,
            pohozaev_residuals: check_pohozaev(norms, p, 0.0).residuals(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(dim: u32, p: f64) -> GroundStateProfile {
        solve_ground_state(dim, p, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn coefficients() {
        let c = FieldEqCoeffs::new(1, 2.0).unwrap();
        assert_eq!((c.kappa, c.sigma), (3.0, 2.0));
        let c = FieldEqCoeffs::new(1, 4.0).unwrap();
        assert_eq!((c.kappa, c.sigma), (2.0, 1.0));
        let c = FieldEqCoeffs::new(3, 2.0).unwrap();
        assert!((c.kappa - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.sigma - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn admissibility() {
        assert!(check_admissible(3, 3.99).is_ok());
        assert!(matches!(check_admissible(3, 4.0), Err(Error::Inadmissible(_))));
        assert!(matches!(check_admissible(3, 5.0), Err(Error::Inadmissible(_))));
        assert!(matches!(check_admissible(2, 0.0), Err(Error::Inadmissible(_))));
        assert!(matches!(check_admissible(4, 1.0), Err(Error::Inadmissible(_))));
        assert!(check_admissible(1, 100.0).is_ok());
    }

    #[test]
    fn closed_form_values() {
        let grid: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let q = closed_form_1d(2.0, &grid).unwrap();
        assert!((q.values[0] - 3f64.sqrt()).abs() < 1e-15);
        assert!(*q.values.last().unwrap() < 1e-25);
        let q = closed_form_1d(4.0, &grid).unwrap();
        assert!((q.values[0] - 6f64.powf(0.25)).abs() < 1e-15);
    }

    /// The sech formula satisfies the ODE: substitute into the residual.
    #[test]
    fn closed_form_satisfies_ode() {
        for p in [1.0, 2.0, 3.0, 4.0] {
            let grid: Vec<f64> = (0..=8000).map(|i| i as f64 * 0.0025).collect();
            let q = closed_form_1d(p, &grid).unwrap();
            assert!(q.ode_residual().unwrap() < 1e-8, "p = {p}");
        }
    }

    #[test]
    fn shooting_matches_sech_closed_form() {
        for (p, q0) in [(2.0, 3f64.sqrt()), (4.0, 6f64.powf(0.25))] {
            let q = solve(1, p);
            assert!((q.q0 - q0).abs() < 1e-8, "p = {p}: q0 = {}", q.q0);
            let exact = closed_form_1d(p, &q.r_grid).unwrap();
            let sup = q.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(sup < 1e-6 * q0, "p = {p}: sup error {sup:e}");
        }
    }

    #[test]
    fn analytic_norms_for_cubic_case() {
        // ∫sech²(kx) = 2/k, ∫sech⁴(kx) = 4/(3k), ∫sech²tanh²(kx) = 2/(3k), k = √3.
        let k = 3f64.sqrt();
        let (b, a, c) = (3.0 * 2.0 / k, 9.0 * 2.0 / (3.0 * k), 9.0 * 4.0 / (3.0 * k));
        assert!((b - 2.0 * k).abs() < 1e-14 && (a - 2.0 * k).abs() < 1e-14);
        assert!((c - 4.0 * k).abs() < 1e-14);

        let grid: Vec<f64> = (0..=20000).map(|i| i as f64 * 1e-3).collect();
        let norms = compute_norms(&closed_form_1d(2.0, &grid).unwrap()).unwrap();
        assert!((norms.mass_sq - b).abs() < 1e-10 * b);
        assert!((norms.grad_sq - a).abs() < 1e-10 * a);
        assert!((norms.pnorm - c).abs() < 1e-10 * c);
        assert!((norms.q_l2 - 1.8612097182041991).abs() < 1e-9);
        assert!(check_pohozaev(&norms, 2.0, 1e-10).pass);
        assert!((gn_constant(&norms, 2.0) - 1.0 / k).abs() < 1e-9);
    }

    #[test]
    fn three_dimensional_cubic_identities() {
        let norms = compute_norms(&solve(3, 2.0)).unwrap();
        let report = check_pohozaev(&norms, 2.0, 1e-6);
        assert!(report.pass, "{report:?}");
        assert!((norms.grad_sq - norms.pnorm / 2.0).abs() < 1e-6 * norms.grad_sq);
    }

    #[test]
    fn small_exponents_hand_off_smoothly_to_the_tail() {
        // sigma Q^p is still ~1e-3 kappa at the match radius here.
        for (dim, p) in [(3, 2.0 / 3.0), (2, 0.25), (1, 0.1)] {
            let q = solve_ground_state(dim, p, &SolverConfig { max_refinements: 0, ..SolverConfig::default() }).unwrap();
            assert!(q.ode_residual().unwrap() < 1e-7, "N={dim} p={p}");
            let report = check_pohozaev(&compute_norms(&q).unwrap(), p, 1e-6);
            assert!(report.pass, "N={dim} p={p}: {report:?}");
        }
    }

    #[test]
    fn halving_the_step_changes_norms_negligibly() {
        let coarse = compute_norms(&solve(2, 1.0)).unwrap();
        let cfg = SolverConfig { step: 1.0e-3, ..SolverConfig::default() };
        let fine = compute_norms(&solve_ground_state(2, 1.0, &cfg).unwrap()).unwrap();
        for (x, y) in [
            (coarse.mass_sq, fine.mass_sq),
            (coarse.grad_sq, fine.grad_sq),
            (coarse.pnorm, fine.pnorm),
        ] {
            assert!(((x - y) / y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn pohozaev_constructed_cases() {
        let ok = QNorms::from_integrals(1.0, 1.0, 2.0).unwrap();
        let r = check_pohozaev(&ok, 2.0, 1e-12);
        assert!(r.pass && r.grad_vs_mass == 0.0 && r.grad_vs_pnorm == 0.0);
        let bad = QNorms::from_integrals(1.0, 2.0, 1.0).unwrap();
        let r = check_pohozaev(&bad, 2.0, 1e-6);
        assert!(!r.pass);
        assert_eq!(r.grad_vs_mass, 1.0);
    }

    #[test]
    fn gn_constant_arithmetic() {
        let n = QNorms::from_integrals(1.0, 1.0, 1.0).unwrap();
        assert_eq!(gn_constant(&n, 2.0), 2.0);
        let n = QNorms::from_integrals(4.0, 4.0, 1.0).unwrap();
        assert_eq!(gn_constant(&n, 4.0), 0.1875);
    }

    #[test]
    fn zero_profile_rejected() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let mut q = closed_form_1d(2.0, &grid).unwrap();
        q.values.iter_mut().for_each(|v| *v = 0.0);
        assert!(compute_norms(&q).is_err());
    }

    #[test]
    fn short_truncation_radius_is_reported() {
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.01).collect();
        let q = closed_form_1d(2.0, &grid).unwrap();
        assert!(matches!(compute_norms(&q), Err(Error::TailTooLarge { .. })));
    }

    #[test]
    fn bad_bracket_is_reported() {
        let cfg = SolverConfig { bracket: (2.0, 50.0), ..SolverConfig::default() };
        assert!(matches!(solve_ground_state(1, 2.0, &cfg), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn bessel_k0_reference_values() {
        // K0(1) = 0.42102443824070834, K0(5) = 3.691098334042594e-3.
        assert!((scaled_bessel_k0(1.0) * (-1f64).exp() - 0.42102443824070834).abs() < 1e-13);
        assert!((scaled_bessel_k0(5.0) * (-5f64).exp() - 3.691098334042594e-3).abs() < 1e-15);
    }
}
