use std::f64::consts::PI;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use majorana_core::cauchy::{drift_convergence, end_to_end, CauchyState, EvolutionRun, Simulation};
use majorana_core::clifford::{
    bilinear, gamma5, gamma_mu, DiracSpinor, GammaMatrix, MajoranaSpinor, METRIC,
};
use majorana_core::fields::{majorana_plane_wave, SpinorField, Superposition};
use majorana_core::lattice::dump_csv;
use majorana_core::phase_recovery::{recover_majorana, MatterCurrent, RecoveryOptions};
use majorana_core::spinor_ops::{
    apply_chiral_rotation, axial_current, chiral_phase_between, ghost_field, ghost_residual,
    majorana_current, reconstruct_from_current, FourVector, PhysParams,
};
use majorana_core::worked_example::{evaluate_example, ExampleConfig};

use crate::config::RunConfig;
use crate::report::Check;

/// Checks plus free-form payload; the caller wraps them into a report.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Setup mistakes abort the command; numerical failures become error checks.
fn as_check(name: &str, e: majorana_core::Error) -> Result<Check> {
    match e.root() {
        majorana_core::Error::InvalidConfig(_) | majorana_core::Error::BoundaryTooClose { .. } => {
            Err(e.into())
        }
        _ => Ok(Check::error(name, e)),
    }
}

fn real4(r: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| r.random_range(-1.0..1.0))
}

pub fn verify(seed: u64, trials: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let id = GammaMatrix::identity();
    let mut bad = 0;
    for mu in 0..4 {
        for nu in 0..4 {
            let g = if mu == nu { METRIC[mu] as i64 } else { 0 };
            let want = id.scale(num_complex::Complex::new(2 * g, 0));
            bad += usize::from(gamma_mu(mu).anticommutator(&gamma_mu(nu)) != want);
        }
        bad += usize::from(gamma5().anticommutator(&gamma_mu(mu)) != GammaMatrix::zero());
    }
    bad += usize::from(gamma5() * gamma5() != id);
    checks.push(Check::within(
        "clifford identities (failures)",
        bad as f64,
        0.0,
    ));

    let mut axial: f64 = 0.0;
    for _ in 0..trials {
        let s = DiracSpinor(std::array::from_fn(|_| {
            num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }));
        let p = s.0;
        let im = |a: num_complex::Complex64, b: num_complex::Complex64| 2.0 * (a * b.conj()).im;
        let formula = [
            im(p[0], p[1]) + im(p[3], p[2]),
            im(p[2], p[0]) + im(p[1], p[3]),
            im(p[0], p[1]) + im(p[2], p[3]),
            im(p[0], p[3]) + im(p[1], p[2]),
        ];
        let ja = axial_current(&s);
        for mu in 0..4 {
            axial = axial.max((ja.0[mu] - formula[mu]).abs());
        }
    }
    checks.push(Check::within(
        "axial-current component formulas",
        axial,
        1e-12,
    ));

    let (mut alg, mut recon, mut phase, mut ghost, mut d0): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let params = PhysParams { m: 1.0, e: 1.0 };
    let mut failures = Vec::new();
    for _ in 0..trials {
        let phi = MajoranaSpinor(real4(&mut rng));
        let d = phi.to_dirac();
        let j = majorana_current(&phi);
        alg = alg
            .max(axial_current(&d).max_abs())
            .max(bilinear(&d, &id, &d).norm())
            .max(bilinear(&d, &gamma5(), &d).norm())
            .max(j.dot(&j).abs());
        match reconstruct_from_current(&j, 1e-10) {
            Ok(psi) => {
                let back = majorana_current(&psi);
                recon = recon
                    .max(back.sub(&j).max_abs())
                    .max((psi.norm_sqr() - j.0[0]).abs());
            }
            Err(e) => failures.push(format!("reconstruction: {e}")),
        }
        let phi0 = rng.random_range(0.0..2.0 * PI);
        match chiral_phase_between(&apply_chiral_rotation(&phi, phi0), &phi, 1e-10) {
            Ok(got) => {
                let dd = (got - phi0).rem_euclid(PI);
                phase = phase.max(dd.min(PI - dd));
            }
            Err(e) => failures.push(format!("chiral phase: {e}")),
        }
        let b = FourVector(real4(&mut rng));
        let b = b.sub(&FourVector::new(j.dot(&b) / j.0[0], 0.0, 0.0, 0.0));
        match ghost_field(&b, &phi, &params, 1e-10) {
            Ok(dg) => {
                d0 = d0.max(dg.0[0].abs());
                ghost = ghost.max(ghost_residual(&b, &dg, &phi, &params).norm());
            }
            Err(e) => failures.push(format!("ghost field: {e}")),
        }
    }
    checks.push(Check::within("Majorana algebra", alg, 1e-12));
    checks.push(Check::within(
        "current reconstruction round trip",
        recon,
        1e-12,
    ));
    let mut ray: f64 = 0.0;
    for lambda in [1e-3, 1.0, 7.0] {
        let j = FourVector::new(lambda, 0.0, -lambda, 0.0);
        match reconstruct_from_current(&j, 1e-10) {
            Ok(psi) => ray = ray.max(majorana_current(&psi).sub(&j).max_abs() / lambda),
            Err(e) => failures.push(format!("degenerate ray: {e}")),
        }
    }
    checks.push(Check::within(
        "reconstruction on the degenerate ray",
        ray,
        1e-12,
    ));
    checks.push(Check::within("chiral phase mod pi", phase, 1e-10));
    checks.push(Check::within("ghost residual", ghost, 1e-10));
    checks.push(Check::within("ghost time component", d0, 1e-10));
    if !failures.is_empty() {
        checks.push(Check::error("suite errors", failures.join("; ")));
    }
    Outcome {
        checks,
        data: Value::Null,
    }
}

pub fn example(masses: &[f64], probe: [f64; 3]) -> Outcome {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let at_origin = probe == [0.0; 3];
    for &m in masses {
        let cfg = ExampleConfig {
            probe,
            ..ExampleConfig::new(m)
        };
        match evaluate_example(&cfg) {
            Ok(rep) => {
                if let Some(dev) = rep.max_target_deviation {
                    checks.push(Check::within(
                        format!("m={m}: closed-form values"),
                        dev,
                        1e-9,
                    ));
                }
                if at_origin {
                    let phi = rep.solution.phi.min(PI - rep.solution.phi);
                    checks.push(Check::within(
                        format!("m={m}: phase is 0 mod pi"),
                        phi,
                        1e-9,
                    ));
                }
                let f = &rep.frame;
                let ortho = (f.v.dot(&f.v) + 1.0)
                    .abs()
                    .max((f.u.dot(&f.u) + 1.0).abs())
                    .max(f.v.dot(&f.u).abs());
                checks.push(Check::within(
                    format!("m={m}: frame orthonormality"),
                    ortho,
                    1e-12,
                ));
                reports.push(serde_json::to_value(&rep).expect("report serialises"));
            }
            Err(e) => {
                checks.push(Check::error(format!("m={m}: evaluation"), &e));
                reports.push(json!({ "m": m, "error": e.to_string() }));
            }
        }
    }
    Outcome {
        checks,
        data: json!({ "reports": reports }),
    }
}

pub fn roundtrip(cfg: &RunConfig) -> Result<Outcome> {
    let params = PhysParams::new(cfg.sim.params.m, cfg.sim.params.e)?;
    let waves = cfg
        .sim
        .modes
        .iter()
        .map(|m| majorana_plane_wave(m.momentum, m.seed, &params))
        .collect::<majorana_core::Result<Vec<_>>>()?;
    let matter = Superposition::new(waves);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = cfg.radius;
    let points: Vec<[f64; 4]> = (0..cfg.points)
        .map(|_| std::array::from_fn(|_| rng.random_range(-r..=r)))
        .collect();
    let opts = RecoveryOptions {
        unit_tol: cfg.unit_tol,
        ..RecoveryOptions::default()
    };
    let report = match recover_majorana(&MatterCurrent(&matter), &points, &params, &opts) {
        Ok(rep) => rep,
        Err(e) => {
            return Ok(Outcome {
                checks: vec![Check::error("recovery", e)],
                data: Value::Null,
            });
        }
    };
    let (mut plus, mut minus, mut unit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for e in &report.entries {
        if let Some(got) = e.majorana {
            let truth = MajoranaSpinor(matter.value_at(e.point));
            let got = MajoranaSpinor(got);
            plus = plus.max(got.dist(&truth) / truth.norm());
            minus = minus.max(got.dist(&truth.scale(-1.0)) / truth.norm());
            unit = unit.max(e.residual_unit.unwrap_or(f64::INFINITY));
        }
    }
    let checks = vec![
        Check::flag(
            "points recovered",
            report.recovered() > 0,
            Some(report.recovered() as f64),
        ),
        Check::within("max relative error (global sign)", plus.min(minus), 1e-6),
        Check::within("max unit-circle residual", unit, cfg.unit_tol),
    ];
    Ok(Outcome {
        checks,
        data: json!({ "skipped": report.skipped(), "entries": report.entries }),
    })
}

fn write_snapshots(sim: &Simulation, run: &EvolutionRun, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    for (i, s) in run.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:04}.csv");
        let (b0, _) = sim.gauge_component(s)?;
        let fields: Vec<&[f64]> = vec![
            &b0, &s.b[0], &s.b[1], &s.b[2], &s.bdot[0], &s.bdot[1], &s.bdot[2],
        ];
        dump_csv(
            &dir.join(&name),
            &sim.grid,
            &["b0", "b1", "b2", "b3", "bdot1", "bdot2", "bdot3"],
            &fields,
        )?;
        files.push(name);
    }
    Ok(files)
}

fn max_abs(s: &CauchyState) -> f64 {
    s.b.iter()
        .chain(s.bdot.iter())
        .flat_map(|f| f.iter())
        .fold(0.0, |m, v| m.max(v.abs()))
}

pub fn evolve(cfg: &RunConfig, csv_dir: Option<&Path>) -> Result<Outcome> {
    let sim_cfg = cfg.simulation();
    let sim = Simulation::new(sim_cfg.clone())?;
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    let run = if cfg.convergence {
        match drift_convergence(&sim_cfg) {
            Ok((conv, run)) => {
                checks.push(Check::within(
                    "drift convergence order deviation",
                    (conv.order - conv.nominal as f64).abs(),
                    0.3,
                ));
                data.insert("convergence".into(), serde_json::to_value(&conv)?);
                Some(run)
            }
            Err(e) => {
                checks.push(as_check("evolution", e)?);
                None
            }
        }
    } else {
        match sim
            .initial_state()
            .and_then(|s| sim.evolve(s, sim_cfg.steps))
        {
            Ok(run) => Some(run),
            Err(e) => {
                checks.push(as_check("evolution", e)?);
                None
            }
        }
    };
    if let Some(run) = run {
        let last = run
            .drift
            .last()
            .expect("drift series starts with the initial state");
        checks.push(Check::flag(
            "evolution completed",
            true,
            Some(sim_cfg.steps as f64),
        ));
        data.insert("final_max_drift".into(), json!(last.max_drift));
        data.insert(
            "final_max_abs_field".into(),
            json!(max_abs(&run.final_state)),
        );
        data.insert("drift".into(), serde_json::to_value(&run.drift)?);
        data.insert(
            "snapshot_times".into(),
            json!(run.snapshots.iter().map(|s| s.time).collect::<Vec<_>>()),
        );
        if let Some(dir) = csv_dir {
            data.insert("csv_files".into(), json!(write_snapshots(&sim, &run, dir)?));
        }
    }
    Ok(Outcome {
        checks,
        data: Value::Object(data),
    })
}

pub fn fourth_deriv(cfg: &RunConfig) -> Result<Outcome> {
    let e2e = cfg.end_to_end();
    let rep = match end_to_end(&e2e) {
        Ok(r) => r,
        Err(e) => {
            return Ok(Outcome {
                checks: vec![as_check("end-to-end", e)?],
                data: Value::Null,
            })
        }
    };
    let checks = rep
        .probes
        .iter()
        .map(|p| {
            Check::within(
                format!("probe {:?}: relative error", p.point),
                p.rel_error,
                1e-2,
            )
        })
        .collect();
    Ok(Outcome {
        checks,
        data: serde_json::to_value(&rep)?,
    })
}
