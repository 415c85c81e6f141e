//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p majorana-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use majorana_core::cauchy::{drift_convergence, end_to_end, EndToEndConfig, SimConfig};
use majorana_core::clifford::{
    bilinear, gamma5, gamma_mu, real_forms, DiracSpinor, GammaMatrix, MajoranaSpinor, METRIC,
};
use majorana_core::fields::{majorana_plane_wave, SpinorField, Superposition};
use majorana_core::jet::{self, Jet, Jet4};
use majorana_core::phase_recovery::{
    current_of, recover_majorana, FrameFields, MatterCurrent, RecoveryOptions,
};
use majorana_core::spinor_ops::{
    apply_chiral_rotation, axial_current, chiral_phase_between, ghost_field, ghost_residual,
    majorana_current, reconstruct_from_current, FourVector, PhysParams,
};
use majorana_core::worked_example::{evaluate_example, ExampleConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn real4(r: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| r.random_range(-1.0..1.0))
}

fn dirac(r: &mut ChaCha8Rng) -> DiracSpinor {
    DiracSpinor(std::array::from_fn(|_| {
        Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    }))
}

fn superposition(r: &mut ChaCha8Rng, p: &PhysParams) -> Superposition {
    let n = r.random_range(1..=3);
    let waves = (0..n)
        .map(|_| {
            let k: [f64; 3] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
            majorana_plane_wave(k, real4(r), p).expect("random seeds have nonzero projections")
        })
        .collect();
    Superposition::new(waves)
}

fn point(r: &mut ChaCha8Rng, radius: f64) -> [f64; 4] {
    std::array::from_fn(|_| r.random_range(-radius..radius))
}

fn clifford_identities() -> Outcome {
    let t = Instant::now();
    let id = GammaMatrix::identity();
    let two = |g: f64| id.scale(num_complex::Complex::new(2 * g as i64, 0));
    let mut failures = 0;
    for mu in 0..4 {
        for nu in 0..4 {
            let g = if mu == nu { METRIC[mu] } else { 0.0 };
            if gamma_mu(mu).anticommutator(&gamma_mu(nu)) != two(g) {
                failures += 1;
            }
        }
        if gamma5().anticommutator(&gamma_mu(mu)) != GammaMatrix::zero() {
            failures += 1;
        }
    }
    if gamma5() * gamma5() != id {
        failures += 1;
    }
    let el = t.elapsed().as_secs_f64();
    outcome(
        failures == 0 && el < 1.0,
        format!("{failures} failed identities of 21, {el:.3} s (limit 1 s)"),
    )
}

fn axial_formulas() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s = dirac(&mut r);
        let p = s.0;
        let im = |a: Complex64, b: Complex64| 2.0 * (a * b.conj()).im;
        let formula = [
            im(p[0], p[1]) + im(p[3], p[2]),
            im(p[2], p[0]) + im(p[1], p[3]),
            im(p[0], p[1]) + im(p[2], p[3]),
            im(p[0], p[3]) + im(p[1], p[2]),
        ];
        let lib = axial_current(&s);
        for mu in 0..4 {
            let m = bilinear(&s, &(gamma5() * gamma_mu(mu)), &s);
            worst = worst
                .max((m.re - formula[mu]).abs())
                .max(m.im.abs())
                .max((lib.0[mu] - formula[mu]).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation {worst:.2e} over 10^4 spinors (tol 1e-12)"),
    )
}

fn majorana_algebra() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let m = MajoranaSpinor(real4(&mut r));
        let d = m.to_dirac();
        let ja = axial_current(&d);
        let ss = bilinear(&d, &GammaMatrix::identity(), &d);
        let s5 = bilinear(&d, &gamma5(), &d);
        let j = majorana_current(&m);
        worst = worst
            .max(ja.max_abs())
            .max(ss.norm())
            .max(s5.norm())
            .max(j.dot(&j).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |ja|, |ΦΦ|, |Φγ5Φ|, |J·J| = {worst:.2e} (tol 1e-12)"),
    )
}

fn reconstruction() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let j = majorana_current(&MajoranaSpinor(real4(&mut r)));
        let psi = match reconstruct_from_current(&j, 1e-10) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("reconstruction failed: {e}")),
        };
        let back = majorana_current(&psi);
        worst = worst
            .max(back.sub(&j).max_abs())
            .max((psi.norm_sqr() - j.0[0]).abs());
    }
    let mut ray_worst: f64 = 0.0;
    for lambda in [1e-3, 0.5, 1.0, 7.0] {
        let j = FourVector::new(lambda, 0.0, -lambda, 0.0);
        let psi = match reconstruct_from_current(&j, 1e-10) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("degenerate ray failed: {e}")),
        };
        let back = majorana_current(&psi);
        ray_worst = ray_worst.max(back.sub(&j).max_abs() / lambda);
    }
    outcome(
        worst <= 1e-12 && ray_worst <= 1e-12,
        format!("round trip {worst:.2e}, degenerate ray {ray_worst:.2e} (tol 1e-12)"),
    )
}

fn chiral_phase() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let psi = MajoranaSpinor(real4(&mut r));
        let phi0 = r.random_range(0.0..2.0 * PI);
        let target = apply_chiral_rotation(&psi, phi0);
        let phi = match chiral_phase_between(&target, &psi, 1e-10) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("phase extraction failed: {e}")),
        };
        let d = (phi - phi0).rem_euclid(PI);
        worst = worst.max(d.min(PI - d));
    }
    outcome(
        worst <= 1e-10,
        format!("max error mod π {worst:.2e} (tol 1e-10)"),
    )
}

fn ghost() -> Outcome {
    let mut r = rng(6);
    let params = PhysParams::new(1.0, r.random_range(0.5..2.0)).unwrap();
    let (mut worst, mut d0): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let phi = MajoranaSpinor(real4(&mut r));
        let j = majorana_current(&phi);
        let b0 = FourVector(real4(&mut r));
        // remove the J-component along the time axis so J·B = 0
        let b = b0.sub(&FourVector::new(j.dot(&b0) / j.0[0], 0.0, 0.0, 0.0));
        let d = match ghost_field(&b, &phi, &params, 1e-10) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("ghost field failed: {e}")),
        };
        d0 = d0.max(d.0[0].abs());
        let res = ghost_residual(&b, &d, &phi, &params);
        worst = worst.max(res.norm());
    }
    outcome(
        worst <= 1e-10 && d0 <= 1e-10,
        format!("max residual {worst:.2e}, max |D0| {d0:.2e} over 10^3 cases (tol 1e-10)"),
    )
}

fn worked_example() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0] {
        let rep = match evaluate_example(&ExampleConfig::new(m)) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("m = {m}: {e}")),
        };
        let phi = rep.solution.phi.min(PI - rep.solution.phi);
        worst = worst
            .max(rep.max_target_deviation.unwrap_or(f64::INFINITY))
            .max(phi);
    }
    let el = t.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && el < 10.0,
        format!("max deviation from closed forms {worst:.2e} (tol 1e-9), {el:.3} s"),
    )
}

/// Gradient of φ along `x` where Φ = ±exp(iγ⁵φ)ψ, from the jets of
/// c = ψ·Φ and s = (Kψ)·Φ (tan φ = s/c).
fn phase_derivative(x: &Jet4, c: &Jet, s: &Jet) -> f64 {
    let dc = jet::directional(x, c).unwrap().value();
    let ds = jet::directional(x, s).unwrap().value();
    let (c, s) = (c.value(), s.value());
    (c * ds - s * dc) / (c * c + s * s)
}

fn transport() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let params = PhysParams::new(r.random_range(0.5..2.0), 1.0).unwrap();
        let matter = superposition(&mut r, &params);
        let p = point(&mut r, 1.0);
        let big = matter.jet_at(p, 3);
        let fields = match FrameFields::from_current(&current_of(&big), params.m) {
            Ok(f) => f,
            Err(e) => return outcome(false, format!("frame at {p:?}: {e}")),
        };
        let k = jet::apply_matrix(&real_forms().chiral, &fields.psi);
        let dot = |a: &Jet4, b: &Jet4| {
            let mut acc = &a[0] * &b[0];
            for i in 1..4 {
                acc += &(&a[i] * &b[i]);
            }
            acc
        };
        let c = dot(&fields.psi, &big);
        let s = dot(&k, &big);
        let phi = s.value().atan2(c.value());
        let m = params.m;
        let lhs = [
            phase_derivative(&fields.v, &c, &s),
            phase_derivative(&fields.u, &c, &s),
            phase_derivative(&fields.w, &c, &s),
        ];
        let rhs = [
            fields.q.value() - m * (2.0 * phi).sin(),
            fields.r.value() + m * (2.0 * phi).cos(),
            fields.p.value(),
        ];
        for i in 0..3 {
            worst = worst.max((lhs[i] - rhs[i]).abs());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max residual of the three equations {worst:.2e} (tol 1e-6)"),
    )
}

fn round_trip() -> Outcome {
    let t = Instant::now();
    let mut r = rng(9);
    let params = PhysParams::new(1.0, 1.0).unwrap();
    let matter = superposition(&mut r, &params);
    let points: Vec<[f64; 4]> = (0..100).map(|_| point(&mut r, 0.5)).collect();
    let report = match recover_majorana(
        &MatterCurrent(&matter),
        &points,
        &params,
        &RecoveryOptions::default(),
    ) {
        Ok(rep) => rep,
        Err(e) => return outcome(false, format!("recovery failed: {e}")),
    };
    let (mut rel, mut unit, mut skipped) = ([0.0f64; 2], 0.0f64, 0);
    for e in &report.entries {
        let Some(got) = e.majorana else {
            skipped += 1;
            continue;
        };
        let truth = MajoranaSpinor(matter.value_at(e.point));
        let got = MajoranaSpinor(got);
        rel[0] = rel[0].max(got.dist(&truth) / truth.norm());
        rel[1] = rel[1].max(got.dist(&truth.scale(-1.0)) / truth.norm());
        unit = unit.max(e.residual_unit.unwrap_or(f64::INFINITY));
    }
    let rel = rel[0].min(rel[1]);
    let el = t.elapsed().as_secs_f64();
    outcome(
        skipped == 0 && rel <= 1e-6 && unit <= 1e-6 && el < 60.0,
        format!(
            "rel error {rel:.2e} (one global sign), unit residual {unit:.2e}, {skipped} skipped, {el:.2} s"
        ),
    )
}

fn free_invariants() -> Outcome {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let params = PhysParams::new(r.random_range(0.5..2.0), 1.0).unwrap();
        let matter = superposition(&mut r, &params);
        let p = point(&mut r, 2.0);
        let f = match FrameFields::from_canonical(matter.jet_at(p, 3), params.m) {
            Ok(f) => f,
            Err(e) => return outcome(false, format!("frame at {p:?}: {e}")),
        };
        worst = worst
            .max(f.q.value().abs())
            .max((f.r.value() + params.m).abs())
            .max(f.p.value().abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max |q|, |r + m|, |p| = {worst:.2e} (tol 1e-10)"),
    )
}

fn drift() -> Outcome {
    let t = Instant::now();
    let cfg = SimConfig::default();
    match drift_convergence(&cfg) {
        Ok((d, _)) => {
            let el = t.elapsed().as_secs_f64();
            let ok = (d.order - d.nominal as f64).abs() <= 0.3 && el <= 300.0;
            outcome(
                ok,
                format!(
                    "drift {:.3e} ({}³) -> {:.3e} ({}³), order {:.3} vs {} (±0.3), {el:.1} s",
                    d.coarse_drift,
                    d.coarse_cells[0],
                    d.fine_drift,
                    d.fine_cells[0],
                    d.order,
                    d.nominal
                ),
            )
        }
        Err(e) => outcome(false, format!("evolution failed: {e}")),
    }
}

fn end_to_end_check() -> Outcome {
    let mut errs = Vec::new();
    for cells in [64, 80] {
        match end_to_end(&EndToEndConfig::reference(cells)) {
            Ok(rep) => errs.push((cells, rep.max_rel_error)),
            Err(e) => return outcome(false, format!("{cells}³: {e}")),
        }
    }
    let ok = errs.iter().all(|e| e.1 <= 1e-2) && errs[1].1 < errs[0].1;
    outcome(
        ok,
        format!(
            "max rel error vs time stencil {:.2e} ({}³) -> {:.2e} ({}³) (tol 1e-2, decreasing)",
            errs[0].1, errs[0].0, errs[1].1, errs[1].0
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Clifford identities", clifford_identities),
        ("axial-current component formulas", axial_formulas),
        ("Majorana algebra", majorana_algebra),
        ("current reconstruction", reconstruction),
        ("chiral phase relation", chiral_phase),
        ("ghost field", ghost),
        ("worked example", worked_example),
        ("transport equations", transport),
        ("phase-recovery round trip", round_trip),
        ("free-matter invariants", free_invariants),
        ("constraint drift convergence", drift),
        ("end-to-end fourth derivative", end_to_end_check),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
