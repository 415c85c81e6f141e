use majorana_core::cauchy::{extract_j_from_b, CauchyProblem, InitialChoices, SimConfig, Simulation};
use majorana_core::fields::{FnScalar, FnVector, VectorField};
use majorana_core::jet::{coordinates, Jet4};
use majorana_core::spinor_ops::{gauge_shift, PhysParams};

fn small(cells: usize, steps: usize) -> SimConfig {
    let mut cfg = SimConfig {
        cells: [cells; 3],
        steps,
        snapshot_every: 2,
        ..SimConfig::default()
    };
    cfg.margin = cfg.required_margin();
    cfg
}

#[test]
fn zero_data_without_coupling_stays_zero() {
    let mut cfg = small(8, 10);
    cfg.params.e = 0.0;
    cfg.choices = InitialChoices::default();
    let sim = Simulation::new(cfg).unwrap();
    let run = sim.evolve(sim.initial_state().unwrap(), 10).unwrap();
    assert_eq!(run.snapshots.len(), 6);
    for s in &run.snapshots {
        assert!(s.b.iter().chain(s.bdot.iter()).flatten().all(|&v| v == 0.0));
        let (b0, bd0) = sim.gauge_component(s).unwrap();
        assert!(b0.iter().chain(bd0.iter()).all(|&v| v == 0.0));
    }
    assert!(run.drift.iter().all(|d| d.max_drift == 0.0));
}

#[test]
fn identical_inputs_give_bit_identical_runs() {
    let sim = Simulation::new(small(10, 6)).unwrap();
    let a = sim.evolve(sim.initial_state().unwrap(), 6).unwrap();
    let b = sim.evolve(sim.initial_state().unwrap(), 6).unwrap();
    assert_eq!(a.final_state, b.final_state);
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.drift, b.drift);
}

#[test]
fn gauge_condition_holds_at_every_output() {
    let sim = Simulation::new(small(10, 6)).unwrap();
    let run = sim.evolve(sim.initial_state().unwrap(), 6).unwrap();
    for s in &run.snapshots {
        let (b0, _) = sim.gauge_component(s).unwrap();
        for i in 0..sim.grid.len() {
            let x = sim.grid.coord(sim.grid.multi(i));
            let (j, _) = sim.problem.current_and_rate([s.time, x[0], x[1], x[2]]);
            let jb = j[0] * b0[i] - (0..3).map(|k| j[k + 1] * s.b[k][i]).sum::<f64>();
            let scale = j[0] * b0[i].abs() + 1e-300;
            assert!(jb.abs() <= 1e-12 * scale.max(1.0), "node {i}: {jb}");
        }
    }
}

#[test]
fn evolution_never_touches_the_matter() {
    let sim = Simulation::new(small(10, 4)).unwrap();
    let before = sim.problem.current_and_rate([0.0, 0.1, 0.2, -0.3]);
    sim.evolve(sim.initial_state().unwrap(), 4).unwrap();
    assert_eq!(before, sim.problem.current_and_rate([0.0, 0.1, 0.2, -0.3]));
}

#[test]
fn harmonic_gauge_shift_leaves_the_current_unchanged() {
    let cfg = SimConfig::default();
    let problem = CauchyProblem::from_config(&cfg).unwrap();
    let x = [0.15, -0.1, 0.2];
    let order = 5;
    let tower = problem.exact_tower(x, order).unwrap();
    let exact = FnVector(move |_: &Jet4| tower.clone());
    // □θ = 0 for each term
    let theta = FnScalar(|c: &Jet4| {
        let wave = (&c[1] - &c[0]).scale(2.0).sin();
        let quad = &c[0].square() + &c[2].square().scale(-1.0);
        &(&wave.scale(0.4) + &quad.scale(-0.3)) + &(&c[0] * &c[3]).scale(0.2)
    });
    let shifted = gauge_shift(&exact, theta, &cfg.params).unwrap();
    let at = coordinates([0.0, x[0], x[1], x[2]], order);
    let (b, b2) = (exact.eval(&at), shifted.eval(&at));
    let moved = (0..4).map(|mu| (&b2[mu] - &b[mu]).max_abs()).fold(0.0, f64::max);
    assert!(moved > 0.1);
    let j = extract_j_from_b(&b, &cfg.params).unwrap();
    let j2 = extract_j_from_b(&b2, &cfg.params).unwrap();
    for mu in 0..4 {
        let diff = (&j2[mu] - &j[mu]).max_abs();
        assert!(diff < 1e-11, "mu = {mu}: {diff}");
    }
}

#[test]
fn coupling_is_required_for_the_gauge_shift() {
    let params = PhysParams::new(1.0, 0.0).unwrap();
    let zero = FnVector(|c: &Jet4| c.clone());
    assert!(gauge_shift(zero, FnScalar(|c: &Jet4| c[0].clone()), &params).is_err());
}
