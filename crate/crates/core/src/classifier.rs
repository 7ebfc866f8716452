//! Regime table: existence of minimizers and mountain pass critical points,
//! their scaling λ, energy level and Lagrange multiplier, for any admissible
//! (N, p, a, b, c).

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{rescale_with_norm, RadialField};
use crate::ground_state::{check_admissible, GroundStateProfile};
use crate::scalar_reduction::{
    build_reduction, mass_critical_energy, mountain_pass_closed_form, thresholds, within_band,
    young_energy, CriticalPoint, Params, Thresholds,
};

/// Gap below f(t_0) at which the true minimum is reported as disagreeing
/// with the Young-point energy.
pub const DISCREPANCY_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// p < 4/N
    Subcritical,
    /// p = 4/N
    MassCritical,
    /// 4/N < p < 8/N
    Intermediate,
    /// p = 8/N
    KirchhoffCritical,
    /// p > 8/N
    Supercritical,
}

impl Regime {
    /// Position of p relative to 4/N and 8/N; the boundaries use the
    /// relative threshold band.
    pub fn of(dim: u32, p: f64) -> Regime {
        let n = dim as f64;
        let (mass_p, kirchhoff_p) = (4.0 / n, 8.0 / n);
        if within_band(p, mass_p) {
            Regime::MassCritical
        } else if within_band(p, kirchhoff_p) {
            Regime::KirchhoffCritical
        } else if p < mass_p {
            Regime::Subcritical
        } else if p < kirchhoff_p {
            Regime::Intermediate
        } else {
            Regime::Supercritical
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::MassCritical => "mass_critical",
            Regime::Intermediate => "intermediate",
            Regime::KirchhoffCritical => "kirchhoff_critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// c lies within the relative band of a critical mass.
    AtThreshold,
    /// The true minimum of f_p lies below f_p(t_0), the value the published
    /// closed form assigns to I(c).
    PaperDiscrepancy,
    /// I(c) = -∞.
    EnergyUnboundedBelow,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::AtThreshold => "at_threshold",
            Flag::PaperDiscrepancy => "paper_discrepancy",
            Flag::EnergyUnboundedBelow => "energy_unbounded_below",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub params: Params,
    pub q_l2: f64,
    pub regime: Regime,
    pub minimizer_exists: bool,
    pub mp_exists: bool,
    /// ∫|∇u|² of the distinguished critical point.
    pub t_star: Option<f64>,
    /// Scaling with t_star = c² λ².
    pub lambda: Option<f64>,
    /// I(c) for minimizer verdicts (0, not attained, when no minimizer
    /// exists but I is finite), γ(c) for mountain pass verdicts.
    pub energy: Option<f64>,
    /// I(c); absent when the functional is unbounded below on S_c.
    pub infimum: Option<f64>,
    pub mu: Option<f64>,
    pub thresholds: Thresholds,
    /// Young equality point t_0 with f_p(t_0), for 4/N < p < 8/N.
    pub young_point: Option<CriticalPoint>,
    /// Energy given by the published closed form where one exists: the
    /// p = 4/N formula, f_p(t_0) for 4/N < p < 8/N, and the p = 8/N
    /// mountain pass level [(c/c_*)^{(8-2N)/N} - 1]^{-1}/(4b).
    pub closed_form_energy: Option<f64>,
    pub flags: BTreeSet<Flag>,
}

impl Verdict {
    fn empty(params: &Params, q_l2: f64, thresholds: Thresholds) -> Self {
        Verdict {
            params: *params,
            q_l2,
            regime: Regime::of(params.dim, params.p),
            minimizer_exists: false,
            mp_exists: false,
            t_star: None,
            lambda: None,
            energy: None,
            infimum: None,
            mu: None,
            thresholds,
            young_point: None,
            closed_form_energy: None,
            flags: BTreeSet::new(),
        }
    }

    fn set_critical_point(&mut self, t_star: f64) -> Result<()> {
        self.t_star = Some(t_star);
        self.lambda = Some(t_star.sqrt() / self.params.c);
        self.mu = Some(multiplier(&self.params, self.q_l2, t_star)?);
        Ok(())
    }

    /// Energy not attained: I(c) = 0 and no critical point is reported.
    fn set_vanishing(&mut self) {
        self.energy = Some(0.0);
        self.infimum = Some(0.0);
    }

    /// The minimizer or mountain pass field as a rescaling of Q.
    pub fn critical_field(&self, profile: &GroundStateProfile) -> Option<Result<RadialField>> {
        let lambda = self.lambda?;
        Some(rescale_with_norm(profile, self.q_l2, self.params.c, lambda).map(|f| {
            let kind = if self.mp_exists { "mountain pass" } else { "minimizer" };
            f.with_metadata(format!("{kind}, c={}, lambda={lambda}", self.params.c))
        }))
    }

    pub fn flags_string(&self) -> String {
        self.flags.iter().map(Flag::as_str).collect::<Vec<_>>().join("|")
    }

    /// One row of the phase-diagram CSV.
    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        format!(
            "{},{:.16e},{:.16e},{},{},{},{},{},{},{},{}",
            self.params.dim,
            self.params.p,
            self.params.c,
            self.regime,
            self.minimizer_exists,
            self.mp_exists,
            opt(self.energy),
            opt(self.t_star),
            opt(self.lambda),
            opt(self.mu),
            self.flags_string()
        )
    }
}

pub const CSV_HEADER: &str = "N,p,c,regime,minimizer_exists,mp_exists,energy,t_star,lambda,mu,flags";

/// μ = -(4 + 2p - Np)(c λ^{N/2})^p / (4 |Q|^p), λ = √t_star / c.
pub fn multiplier(params: &Params, q_l2: f64, t_star: f64) -> Result<f64> {
    check_admissible(params.dim, params.p)?;
    let n = params.dim as f64;
    let linear = 4.0 + 2.0 * params.p - n * params.p;
    if !(linear > 0.0) {
        return Err(Error::Precondition(format!("4 + 2p - Np = {linear} must be positive")));
    }
    if !(t_star > 0.0 && q_l2 > 0.0 && params.c > 0.0) {
        return Err(Error::InvalidInput("multiplier needs t_star, |Q|, c > 0".into()));
    }
    let lambda = t_star.sqrt() / params.c;
    Ok(-linear * (params.c * lambda.powf(n / 2.0)).powf(params.p) / (4.0 * q_l2.powf(params.p)))
}

pub fn classify(params: &Params, q_l2: f64) -> Result<Verdict> {
    params.validate()?;
    let red = build_reduction(params, q_l2)?;
    let th = thresholds(params, q_l2);
    let mut v = Verdict::empty(params, q_l2, th);
    let c = params.c;
    for threshold in [th.c_star_mass, th.c_star_mp].into_iter().flatten() {
        if threshold > 0.0 && within_band(c, threshold) {
            v.flags.insert(Flag::AtThreshold);
        }
    }
    match v.regime {
        Regime::Subcritical => {
            let cp = red.global_min()?;
            v.minimizer_exists = true;
            v.set_critical_point(cp.t_star)?;
            v.energy = Some(cp.f_value);
            v.infimum = Some(cp.f_value);
        }
        Regime::MassCritical => {
            let threshold = th.c_star_mass.expect("p = 4/N");
            if c <= threshold || v.flags.contains(&Flag::AtThreshold) {
                v.set_vanishing();
            } else {
                let cp = red.global_min()?;
                let closed = mass_critical_energy(params, q_l2);
                v.minimizer_exists = true;
                v.set_critical_point(cp.t_star)?;
                v.energy = Some(closed);
                v.infimum = Some(closed);
                v.closed_form_energy = Some(closed);
            }
        }
        Regime::Intermediate => {
            let threshold = th.c_star_mass.expect("4/N < p < 8/N");
            let young = red.young_point()?;
            v.young_point = Some(young);
            v.closed_form_energy = Some(young_energy(params, q_l2)?);
            if c < threshold && !v.flags.contains(&Flag::AtThreshold) {
                v.set_vanishing();
            } else {
                let cp = red.global_min()?;
                v.minimizer_exists = true;
                v.set_critical_point(cp.t_star)?;
                v.energy = Some(cp.f_value);
                v.infimum = Some(cp.f_value);
                if cp.f_value < young.f_value - DISCREPANCY_GAP {
                    v.flags.insert(Flag::PaperDiscrepancy);
                }
            }
        }
        Regime::KirchhoffCritical | Regime::Supercritical => {
            let c_mp = th.c_star_mp;
            let has_geometry = match c_mp {
                Some(c_mp) => c > c_mp && !within_band(c, c_mp),
                None => true,
            };
            if !has_geometry {
                v.set_vanishing();
            } else {
                let cp = red.global_max()?;
                v.mp_exists = true;
                v.set_critical_point(cp.t_star)?;
                v.energy = Some(cp.f_value);
                v.flags.insert(Flag::EnergyUnboundedBelow);
                if c_mp.is_some() {
                    v.closed_form_energy = Some(mountain_pass_closed_form(params, q_l2)?.gamma_published);
                }
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(dim: u32, p: f64, a: f64, b: f64, c: f64, q: f64) -> Verdict {
        classify(&Params::new(dim, p, a, b, c).unwrap(), q).unwrap()
    }

    #[test]
    fn regime_boundaries() {
        assert_eq!(Regime::of(3, 4.0 / 3.0), Regime::MassCritical);
        assert_eq!(Regime::of(3, 8.0 / 3.0), Regime::KirchhoffCritical);
        assert_eq!(Regime::of(3, 1.3), Regime::Subcritical);
        assert_eq!(Regime::of(3, 2.0), Regime::Intermediate);
        assert_eq!(Regime::of(3, 3.0), Regime::Supercritical);
        assert_eq!(Regime::of(1, 4.0 * (1.0 + 1e-13)), Regime::MassCritical);
        assert_eq!(Regime::of(1, 4.0 * (1.0 + 1e-9)), Regime::Intermediate);
    }

    #[test]
    fn mass_critical_existence_switch() {
        let q = 2.0;
        let v = verdict(2, 2.0, 1.0, 1.0, q, q);
        assert!(!v.minimizer_exists && v.flags.contains(&Flag::AtThreshold));
        assert_eq!(v.energy, Some(0.0));
        let v = verdict(2, 2.0, 1.0, 1.0, 0.5 * q, q);
        assert!(!v.minimizer_exists && v.t_star.is_none());
        let v = verdict(2, 2.0, 1.0, 1.0, 2f64.sqrt() * q, q);
        assert!(v.minimizer_exists && !v.mp_exists);
        assert!((v.energy.unwrap() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn multiplier_unit_case() {
        let q = 1.8612097182041991;
        let prm = Params::new(1, 2.0, 1.0, 1.0, q).unwrap();
        assert!((multiplier(&prm, q, q * q).unwrap() + 1.5).abs() < 1e-14);
    }

    #[test]
    fn kirchhoff_critical_below_and_above() {
        let q = 1.5;
        let c_mp = thresholds(&Params::new(2, 4.0, 1.0, 1.0, 1.0).unwrap(), q).c_star_mp.unwrap();
        let v = verdict(2, 4.0, 1.0, 1.0, 0.9 * c_mp, q);
        assert!(!v.minimizer_exists && !v.mp_exists);
        let v = verdict(2, 4.0, 1.0, 1.0, c_mp, q);
        assert!(!v.mp_exists && v.flags.contains(&Flag::AtThreshold));
        let v = verdict(2, 4.0, 1.0, 1.0, 2f64.sqrt() * c_mp, q);
        assert!(v.mp_exists && !v.minimizer_exists);
        assert!(v.flags.contains(&Flag::EnergyUnboundedBelow));
        assert!(v.infimum.is_none());
        assert!((v.t_star.unwrap() - 1.0).abs() < 1e-12);
        assert!((v.energy.unwrap() - 0.25).abs() < 1e-12);
        assert!(v.mu.unwrap() < 0.0);
    }

    #[test]
    fn verdict_invariants_over_a_grid() {
        let q = 2.3;
        for dim in 1..=3u32 {
            for &p in &[0.5, 4.0 / dim as f64, 1.9, 8.0 / dim as f64, 3.5] {
                if p >= crate::ground_state::exponent_bound(dim) {
                    continue;
                }
                for &c in &[0.5, 2.0, 5.0, 20.0, 80.0] {
                    let v = verdict(dim, p, 1.0, 0.7, c, q);
                    assert!(!(v.minimizer_exists && v.mp_exists));
                    if let (Some(t), Some(l)) = (v.t_star, v.lambda) {
                        assert!((l - t.sqrt() / c).abs() < 1e-14 * l);
                        assert!(v.mu.unwrap() < 0.0);
                    }
                    if v.mp_exists {
                        assert!(v.energy.unwrap() > 0.0);
                    }
                    if v.minimizer_exists {
                        assert!(v.energy.unwrap() <= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_names() {
        let v = verdict(3, 2.0, 1.0, 1.0, 40.0, 2.0);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"regime\":\"intermediate\""));
        assert!(json.contains("paper_discrepancy"));
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn csv_row_matches_header() {
        let v = verdict(1, 10.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(v.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        assert!(v.csv_row().ends_with("energy_unbounded_below"));
    }
}
