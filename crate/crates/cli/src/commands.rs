use std::fs;
use std::io::Write;
use std::path::Path;

use knorm_core::classifier::{classify as classify_params, Verdict, CSV_HEADER};
use knorm_core::fields::{check_critical_identity, energy, pde_residual, rescale_with_norm, RadialField};
use knorm_core::ground_state::{
    check_gn, check_pohozaev, compute_norms, gn_constant, solve_ground_state, GroundStateProfile, NormsExport,
    QNorms, SolverConfig,
};
use knorm_core::oracle::{flow_config_for, gradient_flow_min, path_max, scan_reduction, FlowConfig};
use knorm_core::scalar_reduction::{build_reduction, Params};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{default_path, solve_entry, Cache, Entry};
use crate::{
    ClassifyArgs, CliError, Curve, CurveArgs, Format, PhaseArgs, SolveQArgs, Suite, SweepArgs, VerifyArgs,
};

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn solve_with_norms(dim: u32, p: f64, cfg: &SolverConfig) -> Result<(GroundStateProfile, QNorms), CliError> {
    let q = solve_ground_state(dim, p, cfg)?;
    let norms = compute_norms(&q)?;
    let mut cache = Cache::open(&default_path());
    cache.insert(dim, p, cfg, Entry { q_l2: norms.q_l2, q0: q.q0 });
    cache.save();
    Ok((q, norms))
}

fn cached_q_l2(dim: u32, p: f64, cfg: &SolverConfig, given: Option<f64>) -> Result<f64, CliError> {
    if let Some(q) = given {
        if !(q > 0.0 && q.is_finite()) {
            return Err(CliError::Usage(format!("--q-l2 = {q} must be positive")));
        }
        return Ok(q);
    }
    let mut cache = Cache::open(&default_path());
    let q = cache.q_l2(dim, p, cfg)?;
    cache.save();
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub norms: NormsExport,
    pub q0: f64,
    pub gn_constant: f64,
    pub ode_residual: f64,
    pub step: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub tol: f64,
    pub pass: bool,
}

pub fn solve_q(args: &SolveQArgs, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = args.grid.solver_config()?;
    let (q, norms) = solve_with_norms(args.dim, args.p, &cfg)?;
    let pohozaev = check_pohozaev(&norms, args.p, args.tol);
    let report = SolveReport {
        norms: NormsExport::new(args.dim, args.p, &norms),
        q0: q.q0,
        gn_constant: gn_constant(&norms, args.p),
        ode_residual: q.ode_residual()?,
        step: q.step()?,
        r_max: q.r_max,
        n_points: q.values.len(),
        tol: args.tol,
        pass: pohozaev.pass,
    };
    emit(out, &to_json(&report))?;
    if let Some(path) = &args.profile_csv {
        fs::write(path, q.to_csv())?;
    }
    if !pohozaev.pass {
        return Err(CliError::Verification(format!(
            "Pohozaev residuals {:?} exceed {:e}",
            pohozaev.residuals(),
            args.tol
        )));
    }
    Ok(())
}

pub fn classify(args: &ClassifyArgs, out: Option<&Path>) -> Result<(), CliError> {
    let prm = args.params.params()?;
    let cfg = args.grid.solver_config()?;
    let q_l2 = cached_q_l2(prm.dim, prm.p, &cfg, args.q_l2)?;
    let v = classify_params(&prm, q_l2)?;
    match args.format {
        Format::Json => emit(out, &to_json(&v)),
        Format::Csv => emit(out, &format!("{CSV_HEADER}\n{}\n", v.csv_row())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: Params,
    pub suite: String,
    pub regime: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

struct Checks {
    list: Vec<Check>,
    tol_override: Option<f64>,
}

impl Checks {
    /// Records `value <= tol` (tolerance overridable from the command line).
    fn push(&mut self, name: &str, value: f64, tol: f64) {
        let tol = self.tol_override.unwrap_or(tol);
        self.list.push(Check { name: name.into(), value, tol, pass: value.is_finite() && value <= tol });
    }
}

fn rel(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        x.abs()
    } else {
        ((x - y) / y).abs()
    }
}

struct Context {
    prm: Params,
    q: GroundStateProfile,
    norms: QNorms,
    verdict: Verdict,
}

impl Context {
    /// The verdict's critical point, or Q rescaled to mass c² at lambda = 1.
    fn base_field(&self) -> Result<(RadialField, f64), CliError> {
        match self.verdict.critical_field(&self.q) {
            Some(field) => Ok((field?, self.verdict.t_star.expect("critical point has t_star"))),
            None => {
                let c = self.prm.c;
                Ok((rescale_with_norm(&self.q, self.norms.q_l2, c, 1.0)?, c * c))
            }
        }
    }
}

fn identities_suite(ctx: &Context, checks: &mut Checks) -> Result<(), CliError> {
    let p = ctx.prm.p;
    let pz = check_pohozaev(&ctx.norms, p, 0.0);
    checks.push("pohozaev_grad_vs_mass", pz.grad_vs_mass, 1e-6);
    checks.push("pohozaev_grad_vs_pnorm", pz.grad_vs_pnorm, 1e-6);
    let gn = check_gn(&ctx.q.to_field(), gn_constant(&ctx.norms, p), p)?;
    checks.push("gn_ratio_of_q", (gn.ratio - 1.0).abs(), 1e-6);
    if let (Some(field), Some(mu)) = (ctx.verdict.critical_field(&ctx.q), ctx.verdict.mu) {
        let field = field?;
        let c2 = ctx.prm.c * ctx.prm.c;
        checks.push("critical_point_mass", rel(field.mass()?, c2), 1e-8);
        checks.push("pde_residual", pde_residual(&field, &ctx.prm, mu)?, 1e-6);
        checks.push("critical_identity", check_critical_identity(&field, &ctx.prm, 0.0)?.residual, 1e-6);
        if let Some(e) = ctx.verdict.energy {
            checks.push("energy_vs_reduction", rel(energy(&field, &ctx.prm)?, e), 1e-8);
        }
    }
    Ok(())
}

fn oracle_suite(ctx: &Context, checks: &mut Checks) -> Result<(), CliError> {
    let v = &ctx.verdict;
    if v.minimizer_exists {
        let cfg = flow_config_for(&ctx.prm, v.t_star.expect("minimizer has t_star"))?;
        let flow = gradient_flow_min(&ctx.prm, &cfg)?;
        checks.push("flow_vs_closed_form", rel(flow.energy, v.energy.expect("minimizer energy")), 1e-3);
        checks.push("flow_mass_drift", flow.mass_drift, 1e-12);
    } else if v.mp_exists {
        let red = build_reduction(&ctx.prm, ctx.norms.q_l2)?;
        let t_bar = v.t_star.expect("mountain pass has t_star");
        let scan = scan_reduction(&red, t_bar * 1e-3, t_bar * 1e3, 100_001)?;
        checks.push("scan_max_vs_closed_form", rel(scan.f[scan.argmax], v.energy.expect("gamma")), 1e-6);
        let (lo, hi) = scan.max_bracket();
        checks.push("scan_argmax_outside_cell", if lo <= t_bar && t_bar <= hi { 0.0 } else { 1.0 }, 0.0);
    } else {
        let cfg = FlowConfig { max_iters: 20_000, ..FlowConfig::default() };
        let flow = gradient_flow_min(&ctx.prm, &cfg)?;
        let infimum = v.infimum.unwrap_or(0.0);
        checks.push("flow_below_infimum", (infimum - flow.energy).max(0.0), 1e-6);
    }
    Ok(())
}

fn path_suite(ctx: &Context, checks: &mut Checks) -> Result<(), CliError> {
    let (base, t) = ctx.base_field()?;
    let red = build_reduction(&ctx.prm, ctx.norms.q_l2)?;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let s = 0.1 * 100f64.powf(k as f64 / 19.0);
        let e = energy(&base.dilate(s)?, &ctx.prm)?;
        let expected = red.f(t * s);
        // Relative to the linear term where f crosses zero.
        let scale = expected.abs().max(0.5 * ctx.prm.a * t * s);
        worst = worst.max((e - expected).abs() / scale);
    }
    checks.push("path_identity", worst, 1e-6);
    if ctx.verdict.mp_exists {
        let pm = path_max(&base, &ctx.prm, 0.1, 10.0, 41)?;
        checks.push("path_max_vs_gamma", rel(pm.max_energy, ctx.verdict.energy.expect("gamma")), 1e-6);
        let (lo, hi) = pm.bracket;
        checks.push("path_argmax_outside_cell", if lo <= 1.0 && 1.0 <= hi { 0.0 } else { 1.0 }, 0.0);
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs, out: Option<&Path>) -> Result<(), CliError> {
    let prm = args.params.params()?;
    if let Some(t) = args.tol {
        if !(t >= 0.0) {
            return Err(CliError::Usage(format!("--tol = {t} must be non-negative")));
        }
    }
    let cfg = args.grid.solver_config()?;
    let (q, norms) = solve_with_norms(prm.dim, prm.p, &cfg)?;
    let verdict = classify_params(&prm, norms.q_l2)?;
    let ctx = Context { prm, q, norms, verdict };
    let mut checks = Checks { list: Vec::new(), tol_override: args.tol };
    if matches!(args.suite, Suite::Identities | Suite::All) {
        identities_suite(&ctx, &mut checks)?;
    }
    if matches!(args.suite, Suite::Oracle | Suite::All) {
        oracle_suite(&ctx, &mut checks)?;
    }
    if matches!(args.suite, Suite::Path | Suite::All) {
        path_suite(&ctx, &mut checks)?;
    }
    let pass = checks.list.iter().all(|c| c.pass);
    let suite = format!("{:?}", args.suite).to_lowercase();
    let report = VerifyReport { params: prm, suite, regime: ctx.verdict.regime.to_string(), checks: checks.list, pass };
    emit(out, &to_json(&report))?;
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

/// |Q|_{L²} for each exponent, solving cache misses in parallel.
fn q_l2_table(dim: u32, ps: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>, CliError> {
    let mut cache = Cache::open(&default_path());
    let missing: Vec<f64> = ps.iter().copied().filter(|&p| cache.lookup(dim, p, cfg).is_none()).collect();
    let solved: Vec<(f64, knorm_core::Result<Entry>)> =
        missing.par_iter().map(|&p| (p, solve_entry(dim, p, cfg).map(|(e, _)| e))).collect();
    for (p, entry) in solved {
        cache.insert(dim, p, cfg, entry?);
    }
    cache.save();
    Ok(ps.iter().map(|&p| cache.lookup(dim, p, cfg).expect("filled above").q_l2).collect())
}

pub fn phase_diagram(args: &PhaseArgs, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = args.grid.solver_config()?;
    let ps = args.p_range.linspace(args.n);
    let cs = args.c_range.linspace(args.n);
    let mut points = Vec::with_capacity(ps.len() * cs.len());
    for &p in &ps {
        for &c in &cs {
            points.push(Params::new(args.dim, p, args.a, args.b, c)?);
        }
    }
    let q_l2 = q_l2_table(args.dim, &ps, &cfg)?;
    let rows: Vec<knorm_core::Result<String>> = points
        .par_iter()
        .enumerate()
        .map(|(k, prm)| classify_params(prm, q_l2[k / cs.len()]).map(|v| v.csv_row()))
        .collect();
    let mut text = format!("{CSV_HEADER}\n");
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    emit(out, &text)
}

pub const SWEEP_HEADER: &str = "flow_energy,flow_delta,flow_iterations,flow_converged";

pub fn sweep(args: &SweepArgs, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = args.grid.solver_config()?;
    let cs = args.c_range.linspace(args.n);
    let points = cs
        .iter()
        .map(|&c| Params::new(args.dim, args.p, args.a, args.b, c))
        .collect::<knorm_core::Result<Vec<_>>>()?;
    let q_l2 = match args.q_l2 {
        Some(q) => cached_q_l2(args.dim, args.p, &cfg, Some(q))?,
        None if points.is_empty() => 0.0,
        None => cached_q_l2(args.dim, args.p, &cfg, None)?,
    };
    let rows: Vec<knorm_core::Result<String>> = points
        .par_iter()
        .map(|prm| {
            let v = classify_params(prm, q_l2)?;
            let mut row = v.csv_row();
            if v.minimizer_exists {
                let flow = gradient_flow_min(prm, &flow_config_for(prm, v.t_star.expect("t_star"))?)?;
                let e = v.energy.expect("minimizer energy");
                row.push_str(&format!(
                    ",{:.16e},{:.16e},{},{}",
                    flow.energy,
                    rel(flow.energy, e),
                    flow.iterations,
                    flow.converged
                ));
            } else {
                row.push_str(",,,,");
            }
            Ok(row)
        })
        .collect();
    let mut text = format!("{CSV_HEADER},{SWEEP_HEADER}\n");
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    emit(out, &text)
}

pub fn curve(args: &CurveArgs, out: Option<&Path>) -> Result<(), CliError> {
    let prm = args.params.params()?;
    let cfg = args.grid.solver_config()?;
    if args.range.lo <= 0.0 && args.range.hi >= args.range.lo && args.n > 0 {
        return Err(CliError::Usage("--range must be positive (log-spaced)".into()));
    }
    let xs = args.range.logspace(args.n);
    let mut text;
    match args.what {
        Curve::F | Curve::Fprime => {
            let q_l2 = cached_q_l2(prm.dim, prm.p, &cfg, args.q_l2)?;
            let red = build_reduction(&prm, q_l2)?;
            let (name, eval): (&str, &dyn Fn(f64) -> f64) = match args.what {
                Curve::F => ("f", &|t| red.f(t)),
                _ => ("fprime", &|t| red.df(t)),
            };
            text = format!("t,{name}\n");
            for t in xs {
                text.push_str(&format!("{t:.16e},{:.16e}\n", eval(t)));
            }
        }
        Curve::PathEnergy => {
            let (q, norms) = solve_with_norms(prm.dim, prm.p, &cfg)?;
            let verdict = classify_params(&prm, norms.q_l2)?;
            let ctx = Context { prm, q, norms, verdict };
            let (base, t) = ctx.base_field()?;
            let red = build_reduction(&prm, norms.q_l2)?;
            text = String::from("s,energy,f_reduced\n");
            for s in xs {
                let e = energy(&base.dilate(s)?, &prm)?;
                text.push_str(&format!("{s:.16e},{e:.16e},{:.16e}\n", red.f(t * s)));
            }
        }
    }
    emit(out, &text)
}
