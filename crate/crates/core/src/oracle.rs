//! Independent numerical checks of the closed forms: a brute-force scan of
//! f_p, a mass-constrained gradient flow on E, and maximization of E along
//! the dilation path.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{energy, RadialField};
use crate::ground_state::FieldEqCoeffs;
use crate::quadrature::sphere_measure;
use crate::scalar_reduction::{Params, ScalarReduction};

/// f_p sampled on a log-spaced grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionScan {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub argmin: usize,
    pub argmax: usize,
}

impl ReductionScan {
    fn neighbors(&self, k: usize) -> (f64, f64) {
        let last = self.t.len() - 1;
        (self.t[k.saturating_sub(1)], self.t[(k + 1).min(last)])
    }

    pub fn t_min(&self) -> f64 {
        self.t[self.argmin]
    }

    pub fn t_max(&self) -> f64 {
        self.t[self.argmax]
    }

    /// Grid neighbors of the argmin; the true minimizer lies between them
    /// unless it sits at the edge of the scanned range.
    pub fn min_bracket(&self) -> (f64, f64) {
        self.neighbors(self.argmin)
    }

    pub fn max_bracket(&self) -> (f64, f64) {
        self.neighbors(self.argmax)
    }
}

pub fn scan_reduction(red: &ScalarReduction, t_lo: f64, t_hi: f64, n: usize) -> Result<ReductionScan> {
    if !(t_lo > 0.0 && t_hi > t_lo) || n < 1000 {
        return Err(Error::InvalidInput("scan needs 0 < t_lo < t_hi and n >= 1000".into()));
    }
    let log_lo = t_lo.ln();
    let dlog = (t_hi.ln() - log_lo) / (n - 1) as f64;
    let t: Vec<f64> = (0..n).map(|k| (log_lo + k as f64 * dlog).exp()).collect();
    let f: Vec<f64> = t.iter().map(|&t| red.f(t)).collect();
    let argmin = (0..n).min_by(|&i, &j| f[i].total_cmp(&f[j])).unwrap();
    let argmax = (0..n).max_by(|&i, &j| f[i].total_cmp(&f[j])).unwrap();
    Ok(ReductionScan { t, f, argmin, argmax })
}

/// Uniform radial grid [0, r_max] with `n_intervals` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowGrid {
    pub r_max: f64,
    pub n_intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub grid: FlowGrid,
    /// Initial pseudo-time step; adapted by backtracking.
    pub step: f64,
    pub max_iters: usize,
    /// Stop once the energy drops by less than this over the stall window.
    pub energy_tol: f64,
    pub seed_width: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            grid: FlowGrid { r_max: 30.0, n_intervals: 600 },
            step: 1e-3,
            max_iters: 200_000,
            energy_tol: 1e-12,
            seed_width: 1.0,
        }
    }
}

/// Iterations over which the energy decrease is measured for stopping.
pub const STALL_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub iterations: usize,
    pub converged: bool,
    /// Energy fell below -1e12 or stopped being finite.
    pub diverged: bool,
    /// Energy of the final iterate in the flow's own discretization.
    pub discrete_energy: f64,
    /// E of the final field by fourth-order quadrature, after rescaling to
    /// mass c² under the same quadrature.
    pub energy: f64,
    /// ∫|∇u|² of the final field.
    pub grad_norm_sq: f64,
    /// Largest relative deviation of the discrete mass from c².
    pub mass_drift: f64,
    pub final_step: f64,
    /// Discrete energy after every accepted iteration (entry 0 is the seed).
    pub history: Vec<f64>,
    pub field: RadialField,
}

impl FlowReport {
    /// Energy-vs-iteration CSV.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,energy\n");
        for (k, e) in self.history.iter().enumerate() {
            out.push_str(&format!("{k},{e:.16e}\n"));
        }
        out
    }
}

/// Second-order finite-volume discretization of the energy on a radial grid
/// with a Dirichlet condition at r_max. Its gradient is exact, so every
/// accepted step decreases the discrete energy.
struct FlowDiscretization {
    params: Params,
    cell: Vec<f64>,
    face: Vec<f64>,
}

impl FlowDiscretization {
    fn new(params: &Params, grid: &FlowGrid) -> Self {
        let dim = params.dim as i32;
        let omega = sphere_measure(params.dim);
        let n = grid.n_intervals;
        let h = grid.r_max / n as f64;
        let ball = |r: f64| omega * r.max(0.0).powi(dim) / dim as f64;
        let cell = (0..=n)
            .map(|i| {
                let r = i as f64 * h;
                let outer = if i == n { r } else { r + 0.5 * h };
                ball(outer) - ball(r - 0.5 * h)
            })
            .collect();
        let face = (0..n).map(|i| omega * ((i as f64 + 0.5) * h).powi(dim - 1) / h).collect();
        FlowDiscretization { params: *params, cell, face }
    }

    fn mass(&self, u: &[f64]) -> f64 {
        self.cell.iter().zip(u).map(|(w, v)| w * v * v).sum()
    }

    fn grad_sq(&self, u: &[f64]) -> f64 {
        self.face.iter().enumerate().map(|(i, s)| s * (u[i + 1] - u[i]).powi(2)).sum()
    }

    fn energy(&self, u: &[f64]) -> (f64, f64) {
        let prm = &self.params;
        let a_u = self.grad_sq(u);
        let pn: f64 = self.cell.iter().zip(u).map(|(w, v)| w * v.abs().powf(prm.p + 2.0)).sum();
        (0.5 * prm.a * a_u + 0.25 * prm.b * a_u * a_u - pn / (prm.p + 2.0), a_u)
    }

    /// L²(cell)-gradient (a + bA)(-Δu) - |u|^p u projected orthogonally to u.
    fn projected_gradient(&self, u: &[f64], a_u: f64, out: &mut [f64]) {
        let prm = &self.params;
        let n = u.len() - 1;
        let stiff = prm.a + prm.b * a_u;
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { self.face[i - 1] * (u[i] - u[i - 1]) };
            let right = self.face[i] * (u[i + 1] - u[i]);
            out[i] = stiff * (left - right) / self.cell[i] - u[i].abs().powf(prm.p) * u[i];
        }
        out[n] = 0.0;
        let along: f64 = (0..=n).map(|i| self.cell[i] * out[i] * u[i]).sum::<f64>() / self.mass(u);
        for i in 0..n {
            out[i] -= along * u[i];
        }
    }

    fn normalize(&self, u: &mut [f64]) {
        let scale = self.params.c / self.mass(u).sqrt();
        u.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Normalized steepest descent on S_c from a Gaussian seed: an explicit step
/// along the projected gradient, renormalization to mass c², and step
/// halving until the energy does not increase.
pub fn gradient_flow_min(params: &Params, cfg: &FlowConfig) -> Result<FlowReport> {
    params.validate()?;
    let n = cfg.grid.n_intervals;
    if !(cfg.grid.r_max > 0.0 && n >= 16 && n % 2 == 0) {
        return Err(Error::InvalidInput("flow grid needs r_max > 0 and an even count >= 16".into()));
    }
    if !(cfg.step > 0.0 && cfg.energy_tol > 0.0 && cfg.seed_width > 0.0) {
        return Err(Error::InvalidInput("flow step, energy_tol and seed_width must be positive".into()));
    }
    let disc = FlowDiscretization::new(params, &cfg.grid);
    let h = cfg.grid.r_max / n as f64;
    let w = cfg.seed_width;
    let mut u: Vec<f64> = (0..=n)
        .map(|i| {
            let r = i as f64 * h;
            (-r * r / (2.0 * w * w)).exp()
        })
        .collect();
    u[n] = 0.0;
    disc.normalize(&mut u);

    let c2 = params.c * params.c;
    let (mut e, mut a_u) = disc.energy(&u);
    let mut history = vec![e];
    let mut grad = vec![0.0; n + 1];
    let mut trial = vec![0.0; n + 1];
    let mut tau = cfg.step;
    let mut mass_drift: f64 = 0.0;
    let mut converged = false;
    let mut diverged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        disc.projected_gradient(&u, a_u, &mut grad);
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..=n {
                trial[i] = u[i] - tau * grad[i];
            }
            disc.normalize(&mut trial);
            let (e_new, a_new) = disc.energy(&trial);
            if e_new.is_finite() && e_new <= e {
                std::mem::swap(&mut u, &mut trial);
                e = e_new;
                a_u = a_new;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            // No descent even for a vanishing step: stationary to rounding.
            converged = true;
            break;
        }
        iterations += 1;
        tau *= 1.25;
        mass_drift = mass_drift.max((disc.mass(&u) - c2).abs() / c2);
        history.push(e);
        if e < -1e12 || !e.is_finite() {
            diverged = true;
            break;
        }
        if iterations >= STALL_WINDOW && history[iterations - STALL_WINDOW] - e < cfg.energy_tol {
            converged = true;
            break;
        }
    }

    let r_grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut field = RadialField::new(params.dim, r_grid, u)?;
    let simpson_mass = field.mass()?;
    if simpson_mass > 0.0 {
        let scale = params.c / simpson_mass.sqrt();
        field.values.iter_mut().for_each(|v| *v *= scale);
    }
    let field = field.with_metadata(format!("gradient flow minimizer, c={}", params.c));
    let quad_energy = energy(&field, params)?;
    Ok(FlowReport {
        iterations,
        converged,
        diverged,
        discrete_energy: e,
        energy: quad_energy,
        grad_norm_sq: field.grad_norm_sq()?,
        mass_drift,
        final_step: tau,
        history,
        field,
    })
}

/// Initial ∫|∇u|² of the Gaussian seed of width w and mass c²: N c²/(2w²).
pub fn seed_grad_norm_sq(dim: u32, c: f64, width: f64) -> f64 {
    dim as f64 * c * c / (2.0 * width * width)
}

/// Seed width whose gradient norm is t: w = c sqrt(N/(2t)).
pub fn seed_width_for(dim: u32, c: f64, t: f64) -> f64 {
    c * (dim as f64 / (2.0 * t)).sqrt()
}

/// Energy of the Gaussian seed in the continuum.
pub fn seed_energy(params: &Params, width: f64) -> f64 {
    let n = params.dim as f64;
    let p = params.p;
    let t = seed_grad_norm_sq(params.dim, params.c, width);
    // ∫ (A e^{-r²/(2w²)})^{p+2} = A^{p+2} (2π w²/(p+2))^{N/2}, A² (π w²)^{N/2} = c².
    let amp = params.c / (PI * width * width).powf(n / 4.0);
    let pnorm = amp.powf(p + 2.0) * (2.0 * PI * width * width / (p + 2.0)).powf(n / 2.0);
    0.5 * params.a * t + 0.25 * params.b * t * t - pnorm / (p + 2.0)
}

/// Flow settings sized for a minimizer at gradient norm `t_star`: the
/// rescaled Q lives on the length 1/lambda with lambda = sqrt(t_star)/c, so the
/// grid reaches 30 decay lengths and resolves lambda r in steps of 0.04.
pub fn flow_config_for(params: &Params, t_star: f64) -> Result<FlowConfig> {
    params.validate()?;
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::InvalidInput(format!("t_star = {t_star} must be positive")));
    }
    let lambda = t_star.sqrt() / params.c;
    let decay = FieldEqCoeffs::new(params.dim, params.p)?.decay_rate();
    let r_max = 30.0 / (decay * lambda);
    let n_intervals = ((r_max * lambda / 0.04).ceil() as usize).max(200).div_ceil(2) * 2;
    Ok(FlowConfig {
        grid: FlowGrid { r_max, n_intervals },
        seed_width: seed_width_for(params.dim, params.c, t_star),
        ..FlowConfig::default()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMax {
    pub s_star: f64,
    pub max_energy: f64,
    /// Grid cell [s_k-1, s_k+1] around the grid argmax.
    pub bracket: (f64, f64),
    pub s: Vec<f64>,
    pub energies: Vec<f64>,
}

/// Maximizes s -> E(s^{N/4} u(s^{1/2} x)) over a log grid on [s_lo, s_hi],
/// then refines by golden-section search inside the winning cell.
pub fn path_max(base: &RadialField, params: &Params, s_lo: f64, s_hi: f64, n: usize) -> Result<PathMax> {
    if !(s_lo > 0.0 && s_lo < 1.0 && s_hi > 1.0) || n < 3 {
        return Err(Error::InvalidInput("path_max needs 0 < s_lo < 1 < s_hi and n >= 3".into()));
    }
    let eval = |s: f64| -> Result<f64> { energy(&base.dilate(s)?, params) };
    let dlog = (s_hi / s_lo).ln() / (n - 1) as f64;
    let s: Vec<f64> = (0..n).map(|k| s_lo * (k as f64 * dlog).exp()).collect();
    let energies = s.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let k = (0..n).max_by(|&i, &j| energies[i].total_cmp(&energies[j])).unwrap();
    let bracket = (s[k.saturating_sub(1)], s[(k + 1).min(n - 1)]);

    let (mut lo, mut hi) = (bracket.0.ln(), bracket.1.ln());
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut e1 = eval(x1.exp())?;
    let mut e2 = eval(x2.exp())?;
    while hi - lo > 1e-10 {
        if e1 > e2 {
            hi = x2;
            x2 = x1;
            e2 = e1;
            x1 = hi - golden * (hi - lo);
            e1 = eval(x1.exp())?;
        } else {
            lo = x1;
            x1 = x2;
            e1 = e2;
            x2 = lo + golden * (hi - lo);
            e2 = eval(x2.exp())?;
        }
    }
    let s_ref = (0.5 * (lo + hi)).exp();
    let e_ref = eval(s_ref)?;
    let (s_star, max_energy) =
        if e_ref >= energies[k] { (s_ref, e_ref) } else { (s[k], energies[k]) };
    Ok(PathMax { s_star, max_energy, bracket, s, energies })
}
