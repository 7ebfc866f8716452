use knorm_core::classifier::{classify, multiplier, Flag};
use knorm_core::fields::{energy, pde_residual, rescale_with_norm, RadialField};
use knorm_core::ground_state::{compute_norms, solve_ground_state, GroundStateProfile, SolverConfig};
use knorm_core::oracle::{flow_config_for, gradient_flow_min, path_max, seed_grad_norm_sq, seed_width_for, FlowConfig, FlowGrid};
use knorm_core::scalar_reduction::{build_reduction, thresholds, Params};

fn ground_state(dim: u32, p: f64) -> (GroundStateProfile, f64) {
    let q = solve_ground_state(dim, p, &SolverConfig::default()).unwrap();
    let q_l2 = compute_norms(&q).unwrap().q_l2;
    (q, q_l2)
}

/// Linear interpolation of `field` onto `grid` (zero beyond its last sample).
fn resample(field: &RadialField, grid: &[f64]) -> RadialField {
    let h = field.step();
    let last = field.values.len() - 1;
    let values = grid
        .iter()
        .map(|&r| {
            let x = r / h;
            let i = x.floor() as usize;
            if i >= last {
                return 0.0;
            }
            let w = x - i as f64;
            (1.0 - w) * field.values[i] + w * field.values[i + 1]
        })
        .collect();
    RadialField::new(field.dim, grid.to_vec(), values).unwrap()
}

#[test]
fn subcritical_flow_matches_reduction_and_profile() {
    let (q, q_l2) = ground_state(1, 2.0);
    let prm = Params::new(1, 2.0, 1.0, 1.0, 1.0).unwrap();
    let v = classify(&prm, q_l2).unwrap();
    let i_c = v.energy.unwrap();
    let flow = gradient_flow_min(&prm, &FlowConfig::default()).unwrap();
    assert!(flow.converged);
    assert!(((flow.energy - i_c) / i_c).abs() < 1e-3, "{} vs {i_c}", flow.energy);
    assert!(flow.mass_drift < 1e-12);

    let exact = resample(&v.critical_field(&q).unwrap().unwrap(), &flow.field.r_grid);
    let dist = exact.relative_l2_distance(&flow.field).unwrap();
    assert!(dist < 1e-2, "L2 distance {dist}");
}

#[test]
fn flow_settles_below_young_value_past_threshold() {
    let (_, q_l2) = ground_state(3, 2.0);
    let base = Params::new(3, 2.0, 1.0, 1.0, 1.0).unwrap();
    let c = 1.05 * thresholds(&base, q_l2).c_star_mass.unwrap();
    let prm = base.with_c(c);
    let v = classify(&prm, q_l2).unwrap();
    assert!(v.flags.contains(&Flag::PaperDiscrepancy));
    let young = v.young_point.unwrap().f_value;
    let i_c = v.energy.unwrap();
    assert!(i_c < young);

    let w = seed_width_for(3, c, v.t_star.unwrap());
    let cfg = FlowConfig { grid: FlowGrid { r_max: 4000.0, n_intervals: 2000 }, seed_width: w, ..FlowConfig::default() };
    let flow = gradient_flow_min(&prm, &cfg).unwrap();
    assert!(((flow.energy - i_c) / i_c).abs() < 1e-3, "{} vs {i_c}", flow.energy);
    assert!(flow.energy < young);
}

#[test]
fn flow_vanishes_below_mass_critical_threshold() {
    let (_, q_l2) = ground_state(2, 2.0);
    let prm = Params::new(2, 2.0, 1.0, 1.0, 0.8 * q_l2).unwrap();
    let v = classify(&prm, q_l2).unwrap();
    assert!(!v.minimizer_exists && v.infimum == Some(0.0));

    let cfg = FlowConfig {
        grid: FlowGrid { r_max: 60.0, n_intervals: 600 },
        max_iters: 20_000,
        ..FlowConfig::default()
    };
    let flow = gradient_flow_min(&prm, &cfg).unwrap();
    assert!(flow.history.iter().all(|&e| e > 0.0));
    assert!(flow.history.windows(2).all(|w| w[1] <= w[0]));
    assert!(flow.energy > 0.0 && flow.energy < 0.1 * flow.history[0]);
    assert!(flow.grad_norm_sq < 0.1 * seed_grad_norm_sq(2, prm.c, cfg.seed_width));
}

#[test]
fn path_from_any_scaling_of_q_reaches_gamma() {
    let (q, q_l2) = ground_state(1, 8.0);
    let base = Params::new(1, 8.0, 1.0, 1.0, 1.0).unwrap();
    let prm = base.with_c(2f64.powf(1.0 / 6.0) * thresholds(&base, q_l2).c_star_mp.unwrap());
    let gamma = build_reduction(&prm, q_l2).unwrap().global_max().unwrap().f_value;

    // Start at t = 3 t̄ = 3: the maximum sits at s = 1/3.
    let u = rescale_with_norm(&q, q_l2, prm.c, 3f64.sqrt() / prm.c).unwrap();
    let pm = path_max(&u, &prm, 0.01, 10.0, 200).unwrap();
    assert!(((pm.max_energy - gamma) / gamma).abs() < 1e-6);
    assert!((pm.s_star - 1.0 / 3.0).abs() < 1e-4);
    assert!(*pm.energies.last().unwrap() < 0.0);
}

#[test]
fn multiplier_solves_the_equation_at_a_stationary_scaling() {
    let (q, q_l2) = ground_state(1, 2.0);
    // f'(c²) = 0 at c = |Q| needs a + b c² = 1/2 with b c² = 1/4.
    let prm = Params::new(1, 2.0, 0.25, 0.25 / (q_l2 * q_l2), q_l2).unwrap();
    let mu = multiplier(&prm, q_l2, q_l2 * q_l2).unwrap();
    assert!((mu + 1.5).abs() < 1e-12);
    let u = rescale_with_norm(&q, q_l2, q_l2, 1.0).unwrap();
    assert!(pde_residual(&u, &prm, mu).unwrap() < 1e-6);
}

#[test]
fn every_verdict_critical_point_solves_the_equation() {
    for (dim, p, c_scale) in [(1, 2.0, 1.0), (3, 1.0, 3.0), (2, 2.0, 1.5), (3, 2.0, 1.1), (3, 3.0, 1.0), (2, 4.0, 1.3)] {
        let (q, q_l2) = ground_state(dim, p);
        let base = Params::new(dim, p, 1.0, 1.0, 1.0).unwrap();
        let th = thresholds(&base, q_l2);
        let c = c_scale * [th.c_star_mass, th.c_star_mp].into_iter().flatten().fold(1.0, f64::max);
        let prm = base.with_c(c);
        let v = classify(&prm, q_l2).unwrap();
        assert!(v.minimizer_exists || v.mp_exists, "N={dim} p={p}");
        let u = v.critical_field(&q).unwrap().unwrap();
        let res = pde_residual(&u, &prm, v.mu.unwrap()).unwrap();
        assert!(res < 1e-6, "N={dim} p={p}: residual {res:e}");
        let e = energy(&u, &prm).unwrap();
        let expected = v.energy.unwrap();
        assert!(((e - expected) / expected).abs() < 1e-8, "N={dim} p={p}: {e} vs {expected}");
    }
}

#[test]
fn sized_flow_config_reproduces_minimizer_energies() {
    for (dim, p, c_scale) in [(1, 2.0, 1.0), (2, 2.0, std::f64::consts::SQRT_2), (3, 2.0, 1.2)] {
        let (_, q_l2) = ground_state(dim, p);
        let base = Params::new(dim, p, 1.0, 1.0, 1.0).unwrap();
        let th = thresholds(&base, q_l2);
        let c = c_scale * th.c_star_mass.filter(|&t| t > 0.0).unwrap_or(1.0);
        let prm = base.with_c(c);
        let v = classify(&prm, q_l2).unwrap();
        let cfg = flow_config_for(&prm, v.t_star.unwrap()).unwrap();
        let flow = gradient_flow_min(&prm, &cfg).unwrap();
        let i_c = v.energy.unwrap();
        assert!(((flow.energy - i_c) / i_c).abs() < 1e-3, "N={dim}: {} vs {i_c}", flow.energy);
    }
}
