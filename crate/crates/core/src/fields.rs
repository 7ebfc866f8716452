//! Radial grid functions on R^N and the operators applied to them: the
//! mass-preserving rescaling of Q, the dilation path s^{N/4} u(s^{1/2} x),
//! the Kirchhoff energy, the residual of the Euler-Lagrange equation and the
//! Nehari-Pohozaev identity of constrained critical points.
//!
//! Fields live on uniform grids starting at the origin. Rescaling and
//! dilation act on the grid itself (r -> r/lambda) instead of resampling,
//! so the scaling identities hold up to rounding.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ground_state::{compute_norms, uniform_step, GroundStateProfile};
use crate::quadrature::{derivative, radial_laplacian, RadialRule};
use crate::scalar_reduction::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    #[serde(rename = "N")]
    pub dim: u32,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: Option<String>,
}

/// The three integrals entering the energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldIntegrals {
    pub mass: f64,
    pub grad_norm_sq: f64,
    pub pnorm: f64,
}

impl RadialField {
    pub fn new(dim: u32, r_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let field = RadialField { dim, r_grid, values, metadata: None };
        field.validate()?;
        Ok(field)
    }

    pub fn with_metadata(mut self, note: impl Into<String>) -> Self {
        self.metadata = Some(note.into());
        self
    }

    /// Gaussian exp(-r²/(2w²)) scaled to mass c² on [0, r_max].
    pub fn gaussian(dim: u32, c: f64, width: f64, r_max: f64, n_intervals: usize) -> Result<Self> {
        if !(c > 0.0 && width > 0.0 && r_max > 0.0) || n_intervals < 8 {
            return Err(Error::InvalidInput("gaussian needs positive c, width, r_max".into()));
        }
        // ∫ exp(-r²/w²) dx over R^N = (π w²)^{N/2}.
        let amp = c / (PI * width * width).powf(dim as f64 / 4.0);
        let h = r_max / n_intervals as f64;
        let r_grid: Vec<f64> = (0..=n_intervals).map(|i| i as f64 * h).collect();
        let values = r_grid.iter().map(|r| amp * (-r * r / (2.0 * width * width)).exp()).collect();
        Ok(RadialField::new(dim, r_grid, values)?
            .with_metadata(format!("gaussian, c={c}, width={width}")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidInput(format!("dimension {} unsupported", self.dim)));
        }
        if self.values.len() != self.r_grid.len() || self.values.len() < 8 {
            return Err(Error::InvalidInput("field needs at least eight samples on its grid".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field has non-finite samples".into()));
        }
        uniform_step(&self.r_grid)?;
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.r_grid[1]
    }

    fn rule(&self) -> RadialRule {
        RadialRule::new(self.dim, self.step(), self.values.len())
    }

    pub fn mass(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.rule().integrate_with(|i| self.values[i] * self.values[i]))
    }

    pub fn grad_norm_sq(&self) -> Result<f64> {
        self.validate()?;
        let du = derivative(&self.values, self.step());
        Ok(self.rule().integrate_with(|i| du[i] * du[i]))
    }

    pub fn pnorm(&self, p: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.rule().integrate_with(|i| self.values[i].abs().powf(p + 2.0)))
    }

    pub fn integrals(&self, p: f64) -> Result<FieldIntegrals> {
        Ok(FieldIntegrals {
            mass: self.mass()?,
            grad_norm_sq: self.grad_norm_sq()?,
            pnorm: self.pnorm(p)?,
        })
    }

    /// Largest relative change of mass, gradient norm and p-norm between the
    /// grid and its every-other-sample subgrid.
    pub fn richardson_estimate(&self, p: f64) -> Result<[f64; 3]> {
        let fine = self.integrals(p)?;
        let n = self.values.len() - 1;
        if n % 2 != 0 || n < 16 {
            return Err(Error::InvalidInput(
                "Richardson check needs an even interval count of at least 16".into(),
            ));
        }
        let coarse = RadialField {
            dim: self.dim,
            r_grid: self.r_grid.iter().step_by(2).copied().collect(),
            values: self.values.iter().step_by(2).copied().collect(),
            metadata: None,
        }
        .integrals(p)?;
        let rel = |a: f64, b: f64| if a == 0.0 { (a - b).abs() } else { ((a - b) / a).abs() };
        Ok([
            rel(fine.mass, coarse.mass),
            rel(fine.grad_norm_sq, coarse.grad_norm_sq),
            rel(fine.pnorm, coarse.pnorm),
        ])
    }

    /// Errors with [`Error::GridTooCoarse`] when halving the step moves any
    /// integral by more than `tol` (relative).
    pub fn richardson_check(&self, p: f64, tol: f64) -> Result<()> {
        let est = self.richardson_estimate(p)?;
        for (estimate, quantity) in est.into_iter().zip(["mass", "grad_norm_sq", "pnorm"]) {
            if estimate > tol {
                return Err(Error::GridTooCoarse { quantity, estimate, tol });
            }
        }
        Ok(())
    }

    /// v(r) = s^{N/4} u(s^{1/2} r), realized on the grid r_i / s^{1/2}.
    pub fn dilate(&self, s: f64) -> Result<RadialField> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation factor s = {s} must be positive")));
        }
        let root = s.sqrt();
        let amp = s.powf(self.dim as f64 / 4.0);
        Ok(RadialField {
            dim: self.dim,
            r_grid: self.r_grid.iter().map(|r| r / root).collect(),
            values: self.values.iter().map(|u| amp * u).collect(),
            metadata: Some(format!("dilation s={s}")),
        })
    }

    /// Discrete L² distance to another field on the same grid, relative to
    /// this field's L² norm.
    pub fn relative_l2_distance(&self, other: &RadialField) -> Result<f64> {
        if self.r_grid.len() != other.r_grid.len() || self.dim != other.dim {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        let rule = self.rule();
        let diff = rule.integrate_with(|i| (self.values[i] - other.values[i]).powi(2));
        Ok((diff / self.mass()?).sqrt())
    }

    /// CSV with header `r,u`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u\n");
        for (r, u) in self.r_grid.iter().zip(&self.values) {
            out.push_str(&format!("{r:.16e},{u:.16e}\n"));
        }
        out
    }
}

fn check_dims(field: &RadialField, params: &Params) -> Result<()> {
    if field.dim != params.dim {
        return Err(Error::InvalidInput(format!(
            "field dimension {} does not match N = {}",
            field.dim, params.dim
        )));
    }
    Ok(())
}

/// u(r) = (c λ^{N/2} / |Q|_{L²}) Q(λ r), on the grid r_i / λ.
pub fn rescale_ground_state(profile: &GroundStateProfile, c: f64, lambda: f64) -> Result<RadialField> {
    let q_l2 = compute_norms(profile)?.q_l2;
    rescale_with_norm(profile, q_l2, c, lambda)
}

/// As [`rescale_ground_state`] with a precomputed |Q|_{L²}.
pub fn rescale_with_norm(
    profile: &GroundStateProfile,
    q_l2: f64,
    c: f64,
    lambda: f64,
) -> Result<RadialField> {
    if !(c > 0.0 && lambda > 0.0 && q_l2 > 0.0) {
        return Err(Error::InvalidInput("rescaling needs c, lambda, |Q| > 0".into()));
    }
    let dim = profile.dim();
    let amp = c * lambda.powf(dim as f64 / 2.0) / q_l2;
    Ok(RadialField {
        dim,
        r_grid: profile.r_grid.iter().map(|r| r / lambda).collect(),
        values: profile.values.iter().map(|q| amp * q).collect(),
        metadata: Some(format!("rescaled ground state, c={c}, lambda={lambda}")),
    })
}

/// E(u) = (a/2) A + (b/4) A² - ∫|u|^{p+2}/(p+2), A = ∫|∇u|².
pub fn energy(field: &RadialField, params: &Params) -> Result<f64> {
    check_dims(field, params)?;
    let integrals = field.integrals(params.p)?;
    Ok(energy_from_integrals(&integrals, params))
}

pub fn energy_from_integrals(integrals: &FieldIntegrals, params: &Params) -> f64 {
    let a_u = integrals.grad_norm_sq;
    0.5 * params.a * a_u + 0.25 * params.b * a_u * a_u - integrals.pnorm / (params.p + 2.0)
}

/// Relative L² residual of -(a + b A) Δu - |u|^p u - μ u.
///
/// Normalized by the largest of the three term norms so that the value is
/// invariant under rescaling. The outermost two samples (one-sided stencils
/// on an already negligible tail) are left out.
pub fn pde_residual(field: &RadialField, params: &Params, mu: f64) -> Result<f64> {
    check_dims(field, params)?;
    let h = field.step();
    let u = &field.values;
    let kirchhoff = params.a + params.b * field.grad_norm_sq()?;
    let lap = radial_laplacian(field.dim, u, h);
    let n = u.len();
    let cutoff = |i: usize| if i < n - 2 { 1.0 } else { 0.0 };
    let rule = field.rule();
    let sq = |f: &dyn Fn(usize) -> f64| rule.integrate_with(|i| cutoff(i) * f(i).powi(2)).sqrt();
    let nonlinear = |i: usize| u[i].abs().powf(params.p) * u[i];
    let residual = sq(&|i| -kirchhoff * lap[i] - nonlinear(i) - mu * u[i]);
    let scale = sq(&|i| kirchhoff * lap[i])
        .max(sq(&nonlinear))
        .max(sq(&|i| mu * u[i]));
    if scale == 0.0 {
        return Err(Error::InvalidInput("zero field".into()));
    }
    Ok(residual / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalIdentityReport {
    /// (a/2)A + (b/2)A² - pN/(4(p+2)) ∫|u|^{p+2}
    pub defect: f64,
    /// `defect` over (a/2)A + (b/2)A².
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// The Nehari-Pohozaev identity satisfied by every constrained critical point.
pub fn check_critical_identity(
    field: &RadialField,
    params: &Params,
    tol: f64,
) -> Result<CriticalIdentityReport> {
    check_dims(field, params)?;
    let ints = field.integrals(params.p)?;
    let a_u = ints.grad_norm_sq;
    let quadratic = 0.5 * params.a * a_u + 0.5 * params.b * a_u * a_u;
    let defect =
        quadratic - params.p * params.dim as f64 / (4.0 * (params.p + 2.0)) * ints.pnorm;
    let residual = (defect / quadratic).abs();
    Ok(CriticalIdentityReport { defect, residual, tol, pass: residual < tol })
}
