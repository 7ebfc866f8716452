//! The one-variable reduction of the energy along Q-scalings,
//!
//! ```text
//! f(t) = (a/2) t + (b/4) t² - D t^{Np/4},   D = c^{(2(p+2)-Np)/2} / (2 |Q|^p),
//! ```
//!
//! which bounds E(u) from below at t = ∫|∇u|² and equals it on scalings of Q.
//! Its global minimum gives I(c), its maximum (for p >= 8/N) the mountain
//! pass level; the critical masses separate the cases.

use serde::{Deserialize, Serialize};

use crate::classifier::Regime;
use crate::error::{Error, Result};
use crate::ground_state::check_admissible;

/// Relative band inside which a mass is considered equal to a threshold, and
/// an exponent equal to 4/N or 8/N.
pub const THRESHOLD_BAND: f64 = 1e-12;

pub fn within_band(x: f64, reference: f64) -> bool {
    (x - reference).abs() <= THRESHOLD_BAND * reference.abs()
}

/// Problem data of the constrained functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "N")]
    pub dim: u32,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Params {
    pub fn new(dim: u32, p: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        let params = Params { dim, p, a, b, c };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_admissible(self.dim, self.p)?;
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Inadmissible(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn with_c(&self, c: f64) -> Self {
        Params { c, ..*self }
    }

    /// Np/4, the exponent of the power term.
    pub fn power(&self) -> f64 {
        self.dim as f64 * self.p / 4.0
    }
}

/// (2(p+2) - Np)/2, the exponent of c in D and in the critical masses.
pub fn mass_exponent(dim: u32, p: f64) -> f64 {
    let e = (2.0 * (p + 2.0) - dim as f64 * p) / 2.0;
    assert!(e > 0.0, "mass exponent must be positive for admissible (N, p), got {e}");
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarReduction {
    pub lin: f64,
    pub quad: f64,
    pub dcoef: f64,
    pub power: f64,
    pub params: Params,
    pub q_l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    GlobalMin,
    GlobalMax,
    YoungEquality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t_star: f64,
    pub kind: CriticalKind,
    pub f_value: f64,
    pub derivative_residual: f64,
}

/// Critical masses: c* separating existence of minimizers, and c_* (only
/// for p = 8/N) above which the mountain pass geometry appears.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Absent for p >= 8/N, where no mass admits a minimizer.
    pub c_star_mass: Option<f64>,
    pub c_star_mp: Option<f64>,
}

pub fn build_reduction(params: &Params, q_l2: f64) -> Result<ScalarReduction> {
    params.validate()?;
    if !(q_l2 > 0.0 && q_l2.is_finite()) {
        return Err(Error::InvalidInput(format!("|Q|_L2 = {q_l2} must be positive")));
    }
    let e = mass_exponent(params.dim, params.p);
    let power = match Regime::of(params.dim, params.p) {
        Regime::MassCritical => 1.0,
        Regime::KirchhoffCritical => 2.0,
        _ => params.power(),
    };
    Ok(ScalarReduction {
        lin: params.a / 2.0,
        quad: params.b / 4.0,
        dcoef: params.c.powf(e) / (2.0 * q_l2.powf(params.p)),
        power,
        params: *params,
        q_l2,
    })
}

impl ScalarReduction {
    /// Reduction with explicit coefficients. The attached parameters are the
    /// N = 1, |Q| = 1 problem with the same coefficients.
    pub fn from_coefficients(lin: f64, quad: f64, dcoef: f64, power: f64) -> Self {
        let p = 4.0 * power;
        let c = (2.0 * dcoef).powf(1.0 / mass_exponent(1, p));
        ScalarReduction {
            lin,
            quad,
            dcoef,
            power,
            params: Params { dim: 1, p, a: 2.0 * lin, b: 4.0 * quad, c },
            q_l2: 1.0,
        }
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        self.lin * t + self.quad * t * t - self.dcoef * t.powf(self.power)
    }

    #[inline]
    pub fn df(&self, t: f64) -> f64 {
        self.lin + 2.0 * self.quad * t - self.power * self.dcoef * t.powf(self.power - 1.0)
    }

    #[inline]
    pub fn d2f(&self, t: f64) -> f64 {
        2.0 * self.quad - self.power * (self.power - 1.0) * self.dcoef * t.powf(self.power - 2.0)
    }

    /// (f, f', f'') at t > 0.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!("f_p is defined for t > 0, got {t}")));
        }
        Ok((self.f(t), self.df(t), self.d2f(t)))
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.params.dim, self.params.p)
    }

    pub fn thresholds(&self) -> Thresholds {
        thresholds(&self.params, self.q_l2)
    }

    fn critical_point(&self, t_star: f64, kind: CriticalKind) -> CriticalPoint {
        CriticalPoint { t_star, kind, f_value: self.f(t_star), derivative_residual: self.df(t_star).abs() }
    }

    /// Sign of f' as t -> 0+ and as t -> ∞.
    fn asymptotic_signs(&self) -> (f64, f64) {
        let near_zero = if self.dcoef == 0.0 || self.power > 1.0 {
            1.0
        } else if self.power < 1.0 {
            -1.0
        } else {
            (self.lin - self.dcoef).signum()
        };
        let at_infinity = if self.dcoef == 0.0 || self.power < 2.0 {
            1.0
        } else if self.power > 2.0 {
            -1.0
        } else {
            (self.quad - self.dcoef).signum()
        };
        (near_zero, at_infinity)
    }

    /// All sign changes of f' on (0, ∞), located on a log grid that starts
    /// at [1e-12, 1e12] and widens until f' shows its asymptotic signs, then
    /// refined by bisection and polished by Newton.
    pub fn stationary_points(&self) -> Vec<f64> {
        let (s0, s_inf) = self.asymptotic_signs();
        let mut lo = 1e-12;
        while self.df(lo).signum() != s0 && lo > 1e-290 {
            lo *= 1e-4;
        }
        let mut hi = 1e12;
        while self.df(hi).signum() != s_inf && hi < 1e290 {
            hi *= 1e4;
        }
        let per_decade = 100.0;
        let n = ((hi / lo).log10() * per_decade).ceil() as usize;
        let ratio = (hi / lo).powf(1.0 / n as f64);
        let mut roots = Vec::new();
        let mut t_prev = lo;
        let mut d_prev = self.df(lo);
        for k in 1..=n {
            let t = if k == n { hi } else { lo * ratio.powi(k as i32) };
            let d = self.df(t);
            if d == 0.0 {
                roots.push(t);
            } else if d_prev != 0.0 && d.signum() != d_prev.signum() {
                roots.push(self.refine_root(t_prev, t));
            }
            t_prev = t;
            d_prev = d;
        }
        roots
    }

    fn refine_root(&self, mut lo: f64, mut hi: f64) -> f64 {
        let lo_sign = self.df(lo).signum();
        while hi - lo > 1e-14 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.df(mid).signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..4 {
            let (d, dd) = (self.df(t), self.d2f(t));
            if dd == 0.0 {
                break;
            }
            let next = t - d / dd;
            if !(next > 0.0) || self.df(next).abs() >= d.abs() {
                break;
            }
            t = next;
        }
        t
    }

    /// Global minimizer t_p of f on (0, ∞) (p < 8/N).
    pub fn global_min(&self) -> Result<CriticalPoint> {
        let thresholds = self.thresholds();
        match self.regime() {
            Regime::KirchhoffCritical | Regime::Supercritical => Err(Error::Precondition(
                "f_p is unbounded below or has no interior minimum for p >= 8/N".into(),
            )),
            Regime::MassCritical => {
                let threshold = thresholds.c_star_mass.unwrap_or(0.0);
                if self.params.c <= threshold || within_band(self.params.c, threshold) {
                    return Err(Error::NoNegativeMinimum { c: self.params.c, threshold });
                }
                let t = (self.dcoef - self.lin) / (2.0 * self.quad);
                Ok(self.critical_point(t, CriticalKind::GlobalMin))
            }
            Regime::Intermediate => {
                let threshold = thresholds.c_star_mass.unwrap_or(0.0);
                if within_band(self.params.c, threshold) {
                    let t0 = young_abscissa(&self.params)?;
                    return Ok(self.critical_point(t0, CriticalKind::GlobalMin));
                }
                if self.params.c < threshold {
                    return Err(Error::NoNegativeMinimum { c: self.params.c, threshold });
                }
                self.lowest_local_min()
                    .filter(|cp| cp.f_value < 0.0)
                    .ok_or(Error::NoNegativeMinimum { c: self.params.c, threshold })
            }
            Regime::Subcritical => self.lowest_local_min().ok_or_else(|| {
                Error::RootFinding("no stationary point of f_p found in the subcritical case".into())
            }),
        }
    }

    fn lowest_local_min(&self) -> Option<CriticalPoint> {
        self.stationary_points()
            .into_iter()
            .filter(|&t| self.d2f(t) > 0.0 || (self.d2f(t) == 0.0 && self.power < 1.0))
            .map(|t| self.critical_point(t, CriticalKind::GlobalMin))
            .min_by(|x, y| x.f_value.total_cmp(&y.f_value))
    }

    /// Maximizer t̄_p of f (p > 8/N, or p = 8/N above c_*).
    pub fn global_max(&self) -> Result<CriticalPoint> {
        match self.regime() {
            Regime::KirchhoffCritical => {
                let c_mp = self.thresholds().c_star_mp.expect("defined for p = 8/N");
                if self.params.c <= c_mp || within_band(self.params.c, c_mp) {
                    return Err(Error::NoMountainPass(format!(
                        "p = 8/N requires c > c_* = {c_mp}, got c = {}",
                        self.params.c
                    )));
                }
                let t = self.lin / (2.0 * (self.dcoef - self.quad));
                Ok(self.critical_point(t, CriticalKind::GlobalMax))
            }
            Regime::Supercritical => self
                .stationary_points()
                .into_iter()
                .filter(|&t| self.d2f(t) < 0.0)
                .map(|t| self.critical_point(t, CriticalKind::GlobalMax))
                .max_by(|x, y| x.f_value.total_cmp(&y.f_value))
                .ok_or_else(|| Error::RootFinding("no maximum of f_p found".into())),
            _ => Err(Error::NoMountainPass("requires p >= 8/N".into())),
        }
    }

    /// Equality point t_0 of the Young bound (4/N < p < 8/N).
    pub fn young_point(&self) -> Result<CriticalPoint> {
        let t0 = young_abscissa(&self.params)?;
        Ok(self.critical_point(t0, CriticalKind::YoungEquality))
    }

    /// CSV `t,f,fprime,fsecond` over the given abscissae.
    pub fn curve_csv(&self, ts: &[f64]) -> String {
        let mut out = String::from("t,f,fprime,fsecond\n");
        for &t in ts {
            out.push_str(&format!(
                "{t:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.f(t),
                self.df(t),
                self.d2f(t)
            ));
        }
        out
    }
}

/// t_0 = 2(Np-4) a / ((8-Np) b).
pub fn young_abscissa(params: &Params) -> Result<f64> {
    if Regime::of(params.dim, params.p) != Regime::Intermediate {
        return Err(Error::Precondition("the Young point needs 4/N < p < 8/N".into()));
    }
    let np = params.dim as f64 * params.p;
    Ok(2.0 * (np - 4.0) * params.a / ((8.0 - np) * params.b))
}

/// G with (a/2) t + (b/4) t² >= G t^{Np/4} for all t > 0 (4/N < p < 8/N).
pub fn young_constant(params: &Params) -> Result<f64> {
    young_abscissa(params)?;
    let np = params.dim as f64 * params.p;
    Ok((2.0 * params.a / (8.0 - np)).powf((8.0 - np) / 4.0)
        * (params.b / (np - 4.0)).powf((np - 4.0) / 4.0))
}

pub fn thresholds(params: &Params, q_l2: f64) -> Thresholds {
    let (dim, p) = (params.dim, params.p);
    let n = dim as f64;
    let c_star_mass = match Regime::of(dim, p) {
        Regime::Subcritical => Some(0.0),
        Regime::MassCritical => Some(params.a.powf(n / 4.0) * q_l2),
        Regime::Intermediate => {
            let g = young_constant(params).expect("intermediate regime");
            Some((2.0 * q_l2.powf(p) * g).powf(1.0 / mass_exponent(dim, p)))
        }
        Regime::KirchhoffCritical | Regime::Supercritical => None,
    };
    let c_star_mp = (Regime::of(dim, p) == Regime::KirchhoffCritical)
        .then(|| (params.b * q_l2.powf(8.0 / n) / 2.0).powf(n / (8.0 - 2.0 * n)));
    Thresholds { c_star_mass, c_star_mp }
}

/// I(c) for p = 4/N above the threshold, in closed form.
pub fn mass_critical_energy(params: &Params, q_l2: f64) -> f64 {
    let n = params.dim as f64;
    let excess = params.c.powf(4.0 / n) - params.a * q_l2.powf(4.0 / n);
    -excess * excess / (4.0 * params.b * q_l2.powf(8.0 / n))
}

/// Closed forms for p = 8/N, c > c_*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountainPassClosedForm {
    pub t_bar: f64,
    /// a t̄ / 4, from f'(t̄) = 0.
    pub gamma: f64,
    /// [(c/c_*)^{(8-2N)/N} - 1]^{-1} / (4b); equals `gamma` only when a = 1.
    pub gamma_published: f64,
}

pub fn mountain_pass_closed_form(params: &Params, q_l2: f64) -> Result<MountainPassClosedForm> {
    let c_mp = thresholds(params, q_l2)
        .c_star_mp
        .ok_or_else(|| Error::Precondition("closed form needs p = 8/N".into()))?;
    if params.c <= c_mp || within_band(params.c, c_mp) {
        return Err(Error::NoMountainPass(format!("c = {} <= c_* = {c_mp}", params.c)));
    }
    let n = params.dim as f64;
    let x = (params.c / c_mp).powf((8.0 - 2.0 * n) / n) - 1.0;
    let t_bar = params.a / (params.b * x);
    Ok(MountainPassClosedForm {
        t_bar,
        gamma: params.a * t_bar / 4.0,
        gamma_published: 1.0 / (4.0 * params.b * x),
    })
}

/// (c*^e - c^e) t_0^{Np/4} / (2|Q|^p): the published I(c) for 4/N < p < 8/N,
/// which equals f(t_0).
pub fn young_energy(params: &Params, q_l2: f64) -> Result<f64> {
    let t0 = young_abscissa(params)?;
    let c_star = thresholds(params, q_l2).c_star_mass.expect("intermediate regime");
    let e = mass_exponent(params.dim, params.p);
    Ok((c_star.powf(e) - params.c.powf(e)) / (2.0 * q_l2.powf(params.p)) * t0.powf(params.power()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn red(dim: u32, p: f64, a: f64, b: f64, c: f64, q: f64) -> ScalarReduction {
        build_reduction(&Params::new(dim, p, a, b, c).unwrap(), q).unwrap()
    }

    #[test]
    fn coefficients_by_substitution() {
        let r = red(1, 2.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!((r.lin, r.quad, r.dcoef, r.power), (0.5, 0.25, 0.5, 0.5));
        let r = red(2, 1.0, 2.0, 4.0, 3.7, 1.3);
        assert_eq!((r.lin, r.quad), (1.0, 1.0));
        let r = red(3, 2.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!((r.power, r.dcoef), (1.5, 0.5));
    }

    #[test]
    fn mass_exponent_values() {
        assert_eq!(mass_exponent(1, 2.0), 3.0);
        assert_eq!(mass_exponent(3, 2.0), 1.0);
        assert_eq!(mass_exponent(2, 4.0), 2.0);
    }

    #[test]
    fn eval_by_hand() {
        let r = ScalarReduction::from_coefficients(0.5, 0.25, 0.5, 0.5);
        let (f, df, d2f) = r.eval(1.0).unwrap();
        assert_eq!(f, 0.25);
        assert_eq!(df, 0.5 + 0.5 - 0.25);
        assert_eq!(d2f, 0.5 + 0.125);
        assert!(r.eval(0.0).is_err());
        assert!(r.eval(-1.0).is_err());
        let r = ScalarReduction::from_coefficients(0.5, 0.25, 0.0, 0.5);
        for t in [1e-6, 1.0, 1e3] {
            assert!(r.f(t) > 0.0);
        }
    }

    #[test]
    fn young_point_arithmetic() {
        let p = |dim, p, a, b| Params::new(dim, p, a, b, 1.0).unwrap();
        assert_eq!(young_abscissa(&p(3, 2.0, 1.0, 1.0)).unwrap(), 2.0);
        assert_eq!(young_abscissa(&p(3, 2.0, 2.0, 1.0)).unwrap(), 4.0);
        assert!((young_abscissa(&p(2, 3.0, 1.0, 3.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(young_abscissa(&p(3, 1.0, 1.0, 1.0)).is_err());
        assert!(young_abscissa(&p(3, 3.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn threshold_cases() {
        let q = 2.5;
        let t = thresholds(&Params::new(3, 1.0, 1.0, 1.0, 1.0).unwrap(), q);
        assert_eq!(t.c_star_mass, Some(0.0));
        assert_eq!(t.c_star_mp, None);
        let t = thresholds(&Params::new(2, 2.0, 1.0, 1.0, 1.0).unwrap(), q);
        assert_eq!(t.c_star_mass, Some(q));
        let t = thresholds(&Params::new(2, 2.0, 16.0, 1.0, 1.0).unwrap(), q);
        assert!((t.c_star_mass.unwrap() - 4.0 * q).abs() < 1e-14);
        // N=3, p=2, a=b=1: c* = √2 |Q|².
        let t = thresholds(&Params::new(3, 2.0, 1.0, 1.0, 1.0).unwrap(), q);
        assert!((t.c_star_mass.unwrap() - 2f64.sqrt() * q * q).abs() < 1e-12);
        let t = thresholds(&Params::new(1, 8.0, 1.0, 2.0, 1.0).unwrap(), q);
        assert_eq!(t.c_star_mass, None);
        assert!((t.c_star_mp.unwrap() - (2.0 * q.powi(8) / 2.0).powf(1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn at_intermediate_threshold_min_is_young_point() {
        let q = 2.0;
        let c_star = 2f64.sqrt() * q * q;
        let r = red(3, 2.0, 1.0, 1.0, c_star, q);
        let cp = r.global_min().unwrap();
        assert_eq!(cp.t_star, 2.0);
        assert!(cp.f_value.abs() < 1e-12);
        assert!((r.f(2.0)).abs() < 1e-12, "f(t_0) = 0 at c = c*");
        let below = red(3, 2.0, 1.0, 1.0, 0.99 * c_star, q);
        assert!(matches!(below.global_min(), Err(Error::NoNegativeMinimum { .. })));
    }

    #[test]
    fn mass_critical_min_closed_form() {
        let q = 1.7;
        let (a, b, c) = (0.8, 1.3, 3.0);
        let r = red(2, 2.0, a, b, c, q);
        let cp = r.global_min().unwrap();
        let t = (c * c - a * q * q) / (b * q * q);
        assert!((cp.t_star - t).abs() < 1e-14 * t);
        let prm = Params::new(2, 2.0, a, b, c).unwrap();
        assert!((cp.f_value - mass_critical_energy(&prm, q)).abs() < 1e-12);
        assert!(red(2, 2.0, 1.0, 1.0, q, q).global_min().is_err());
    }

    #[test]
    fn mountain_pass_closed_form_unit_case() {
        let q = 1.3;
        let c_mp = thresholds(&Params::new(1, 8.0, 1.0, 1.0, 1.0).unwrap(), q).c_star_mp.unwrap();
        let prm = Params::new(1, 8.0, 1.0, 1.0, 2f64.powf(1.0 / 6.0) * c_mp).unwrap();
        let cf = mountain_pass_closed_form(&prm, q).unwrap();
        assert!((cf.t_bar - 1.0).abs() < 1e-12);
        assert!((cf.gamma - 0.25).abs() < 1e-12 && (cf.gamma_published - 0.25).abs() < 1e-12);
        let cp = build_reduction(&prm, q).unwrap().global_max().unwrap();
        assert!((cp.t_star - 1.0).abs() < 1e-12);
        assert!((cp.f_value - 0.25).abs() < 1e-12);
        let low = prm.with_c(c_mp);
        assert!(matches!(build_reduction(&low, q).unwrap().global_max(), Err(Error::NoMountainPass(_))));
    }

    #[test]
    fn published_gamma_misses_factor_a_squared() {
        let q = 1.1;
        let prm = Params::new(2, 4.0, 3.0, 1.0, 1.0).unwrap();
        let c_mp = thresholds(&prm, q).c_star_mp.unwrap();
        let cf = mountain_pass_closed_form(&prm.with_c(1.5 * c_mp), q).unwrap();
        assert!((cf.gamma - 9.0 * cf.gamma_published).abs() < 1e-12 * cf.gamma);
    }

    #[test]
    fn supercritical_max_and_limits() {
        let r = red(1, 10.0, 1.0, 1.0, 1.0, 1.0);
        let cp = r.global_max().unwrap();
        assert!(cp.f_value > 0.0 && r.d2f(cp.t_star) < 0.0);
        assert!(r.global_min().is_err());
        let huge = ScalarReduction::from_coefficients(0.5, 0.25, 1e12, 2.5);
        let cp = huge.global_max().unwrap();
        assert!(cp.t_star < 1e-6 && cp.f_value > 0.0 && cp.f_value < 1e-6);
    }

    #[test]
    fn subcritical_vanishing_coefficient() {
        let r = ScalarReduction::from_coefficients(0.5, 0.25, 1e-10, 0.5);
        let cp = r.global_min().unwrap();
        assert!(cp.t_star < 1e-15);
        assert!(cp.f_value < 0.0 && cp.f_value > -1e-15);
    }

    #[test]
    fn sign_near_origin_follows_power() {
        for (p, negative) in [(1.0, true), (2.0, false), (2.5, false)] {
            let r = red(3, p, 1.0, 1.0, 50.0, 1.0);
            assert_eq!(r.f(1e-8) < 0.0, negative, "p = {p}");
        }
    }

    proptest! {
        #[test]
        fn young_bound_holds(dim in 1u32..=3, frac in 0.05f64..0.95, a in 0.1f64..10.0, b in 0.1f64..10.0, t in -6.0f64..6.0) {
            let n = dim as f64;
            let p = 4.0 / n + frac * 4.0 / n;
            prop_assume!(p < crate::ground_state::exponent_bound(dim));
            let prm = Params::new(dim, p, a, b, 1.0).unwrap();
            let g = young_constant(&prm).unwrap();
            let t = 10f64.powf(t);
            let lhs = a * t / 2.0 + b * t * t / 4.0;
            prop_assert!(lhs >= g * t.powf(n * p / 4.0) * (1.0 - 1e-12));
            let t0 = young_abscissa(&prm).unwrap();
            let at_t0 = a * t0 / 2.0 + b * t0 * t0 / 4.0 - g * t0.powf(n * p / 4.0);
            prop_assert!(at_t0.abs() < 1e-10 * (a * t0 / 2.0 + b * t0 * t0 / 4.0));
        }

        #[test]
        fn extrema_are_stationary(dim in 1u32..=3, p in 0.1f64..3.9, a in 0.2f64..5.0, b in 0.2f64..5.0, c in 0.5f64..20.0, q in 0.5f64..5.0) {
            let r = red(dim, p, a, b, c, q);
            let found = match r.regime() {
                Regime::KirchhoffCritical | Regime::Supercritical => r.global_max().ok(),
                _ => r.global_min().ok(),
            };
            if let Some(cp) = found {
                let scale = 1f64.max(r.df(cp.t_star / 2.0).abs());
                prop_assert!(cp.derivative_residual < 1e-10 * scale, "{cp:?}");
                match cp.kind {
                    CriticalKind::GlobalMin => prop_assert!(r.d2f(cp.t_star) >= 0.0),
                    _ => prop_assert!(r.d2f(cp.t_star) < 0.0),
                }
            }
        }

        #[test]
        fn common_scaling_keeps_extremum(lin in 0.1f64..5.0, quad in 0.1f64..5.0, d in 0.1f64..5.0, power in 0.1f64..3.0, s in 0.01f64..100.0) {
            prop_assume!((power - 1.0).abs() > 1e-3 && (power - 2.0).abs() > 1e-3);
            let base = ScalarReduction::from_coefficients(lin, quad, d, power);
            let scaled = ScalarReduction::from_coefficients(s * lin, s * quad, s * d, power);
            let t = 0.7;
            prop_assert!((scaled.f(t) - s * base.f(t)).abs() <= 1e-12 * (s * base.f(t)).abs().max(s));
            let roots = base.stationary_points();
            let scaled_roots = scaled.stationary_points();
            prop_assert_eq!(roots.len(), scaled_roots.len());
            for (x, y) in roots.iter().zip(&scaled_roots) {
                prop_assert!((x - y).abs() < 1e-9 * x);
            }
        }
    }
}
