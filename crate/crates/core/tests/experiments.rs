use std::fs;

use arnold_lab::dynamics::{PhaseState, TrigPerturbation};
use arnold_lab::experiments::{
    build_pseudo_orbit, emit_diffusion_reports, emit_stability_reports, run_diffusion_sweep, run_stability,
    sample_initial_state, DiffusionRecord, ExperimentConfig, PseudoOrbit,
};
use arnold_lab::integrator::{integrate, ActionDriftObserver, Observer};
use arnold_lab::scalar::norm2;

fn diffusion_cfg(mus: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!("pert = \"arnold\"\nmu_list = {mus}\nomega_i = [0.4]\nomega_f = [0.6]\n"))
        .unwrap()
}

fn orbit(mu: f64) -> (ExperimentConfig, PseudoOrbit) {
    let cfg = diffusion_cfg("[0.02]");
    let o = build_pseudo_orbit(&cfg, &TrigPerturbation::arnold(1), mu).unwrap();
    (cfg, o)
}

#[test]
fn segments_are_true_flow_arcs() {
    let pert = TrigPerturbation::arnold(1);
    for mu in [0.05, 0.02, 0.01] {
        let (cfg, o) = orbit(mu);
        let st = cfg.stepper();
        let bound = 10.0 * cfg.dt * cfg.dt;
        for s in &o.segments {
            let e = integrate(&s.start, s.end.time - s.start.time, mu, &pert, &st, &mut []).unwrap().final_state;
            let err = [e.q - s.end.q, e.p - s.end.p, e.action[0] - s.end.action[0], e.phi[0] - s.end.phi[0]]
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(err <= bound, "mu = {mu}: re-integration differs by {err}");
        }
    }
}

fn check_ledger(r: &DiffusionRecord, cfg: &ExperimentConfig) {
    let budget = cfg.c_jump * r.mu;
    assert!(r.jump_sizes.iter().all(|&j| j <= budget * (1.0 + 1e-12)));
    for (j, (di, dp)) in r.jump_sizes.iter().zip(r.delta_i.iter().zip(&r.delta_p)) {
        assert!((j - (norm2(di).powi(2) + dp * dp).sqrt()).abs() < 1e-15);
    }
    // action moved by logged jumps plus the flow's own drift between crossings
    let moved = norm2(&r.final_action.iter().zip(&cfg.omega_i).map(|(a, b)| a - b).collect::<Vec<_>>());
    let jumps: f64 = r.delta_i.iter().map(|d| norm2(d)).sum();
    let flow: f64 = r.natural_drift.iter().sum();
    assert!(jumps + flow >= moved - 1e-12);
    // İ = −μ ∂_φ f bounds each arc's drift
    let sup = TrigPerturbation::<f64>::arnold(1).phi_gradient_bound();
    for (d, t) in r.natural_drift.iter().zip(r.transition_durations()) {
        assert!(*d <= r.mu * sup * t + 1e-12, "drift {d} over {t}");
    }
    // the ledger bound with k·max|İ|·max T_s
    let t_max = r.transition_durations().into_iter().fold(0.0, f64::max);
    let total: f64 = r.jump_sizes.iter().sum();
    assert!(total >= moved - r.k() as f64 * r.mu * sup * t_max);
}

#[test]
fn jump_ledger_holds() {
    for mu in [0.05, 0.02, 0.01] {
        let (cfg, o) = orbit(mu);
        assert!(o.record.reached);
        check_ledger(&o.record, &cfg);
    }
}

#[test]
fn budget_forces_a_lower_bound_on_transitions() {
    // without the flow's drift at least |ω_F − ω_I|/(c_jump·μ) jumps would be needed;
    // with it the logged jumps and the logged drift must still cover the distance
    let (cfg, o) = orbit(0.02);
    let r = &o.record;
    let covered = r.k() as f64 * cfg.c_jump * r.mu + r.natural_drift.iter().sum::<f64>();
    assert!(covered >= 0.2 - 1e-12);
    assert!(r.k() >= 1);
}

#[test]
fn sweep_times_and_transition_scaling() {
    let cfg = diffusion_cfg("[0.05, 0.02, 0.01]");
    let recs: Vec<DiffusionRecord> =
        run_diffusion_sweep(&cfg).unwrap().into_iter().map(|e| e.result.unwrap()).collect();
    let t: Vec<f64> = recs.iter().map(|r| r.t_total()).collect();
    assert!(t.windows(2).all(|w| w[1] >= w[0]), "{t:?}");
    let median = |r: &DiffusionRecord| {
        let mut v = r.transition_durations();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    };
    let ratio = median(&recs[2]) / median(&recs[0]);
    let log_ratio = (1.0f64 / 0.01).ln() / (1.0f64 / 0.05).ln();
    assert!(ratio <= 1.5 * log_ratio, "median transition ratio {ratio}");
}

#[test]
fn reports_are_deterministic() {
    let mut cfg = diffusion_cfg("[0.05, 0.02]");
    cfg.mu_list = vec![0.05, 0.02];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        emit_diffusion_reports(&cfg, &run_diffusion_sweep(&cfg).unwrap(), dir.path()).unwrap();
    }
    for f in ["diffusion.csv", "summary.json", "time_law.dat"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }

    let mut s = ExperimentConfig::from_toml("pert = \"arnold\"\nmu_list = [0.01]\nsamples = 4\nseed = 11\n").unwrap();
    s.kappa0 = 0.05;
    for dir in [&a, &b] {
        emit_stability_reports(&s, &run_stability(&s).unwrap(), dir.path()).unwrap();
    }
    for f in ["stability.csv", "summary.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

fn drift_over(state: &PhaseState<f64>, mu: f64, window: f64, cfg: &ExperimentConfig) -> f64 {
    let mut st = cfg.stepper();
    st.record_stride = usize::MAX;
    let mut obs = ActionDriftObserver::new(state);
    integrate(state, window, mu, &TrigPerturbation::arnold(1), &st, &mut [&mut obs as &mut dyn Observer<f64>]).unwrap();
    obs.max_drift
}

#[test]
fn halving_mu_never_increases_drift() {
    let cfg = ExperimentConfig::from_toml("pert = \"arnold\"\nmu_list = [1e-3]\n").unwrap();
    let mu = 1e-3;
    let window = (cfg.kappa0 / mu) * (1.0 / mu).ln();
    for band in 0..cfg.bands.len() {
        for sample in 0..8 {
            let x = sample_initial_state(&cfg, 1, band, sample);
            let (a, b) = (drift_over(&x, mu, window, &cfg), drift_over(&x, mu / 2.0, window, &cfg));
            assert!(b <= a, "band {band}, sample {sample}: {a} -> {b}");
        }
    }
}

#[test]
fn invariant_set_and_zero_coupling_do_not_drift() {
    let cfg = ExperimentConfig::from_toml("pert = \"arnold\"\nmu_list = [1e-3]\n").unwrap();
    let on_torus = PhaseState::new(vec![1.3], vec![0.4], 0.0, 0.0, 0.0).unwrap();
    assert_eq!(drift_over(&on_torus, 1e-2, 500.0, &cfg), 0.0);
    let x = sample_initial_state(&cfg, 1, 0, 3);
    assert_eq!(drift_over(&x, 0.0, 500.0, &cfg), 0.0);
}
