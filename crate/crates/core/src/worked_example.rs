//! A fully explicit frame on the x⁰ = 0 hyperplane with q = 0, r = −m,
//! p = 0 (free matter), pushed through the phase-recovery pipeline.
//!
//! v = (0, v¹, x², x³), v¹ = √(1 − (x²)² − (x³)²),
//! u = (0, (−x¹x³ − u²x²)/v¹, u², x¹),
//! u² = (−x¹x²x³ + √((x¹x²x³)² + (1 − (x³)²)((1 − (x¹)²)(1 − (x²)²) − (x³)²))) / (1 − (x³)²).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{self, Jet, Jet4};
use crate::phase_recovery::{
    expand_in_frame, scalar_p, solve_phase, vector_w, vectors_ts, DerivativeScalars, FrameData,
    FrameExpansion, PhaseSolution, UNIT_TOL_ANALYTIC,
};
use crate::spinor_ops::{FourVector, PhysParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleConfig {
    pub m: f64,
    pub probe: [f64; 3],
    /// Radius of the ball used when sampling the frame invariants.
    pub radius: f64,
}

impl ExampleConfig {
    pub fn new(m: f64) -> Self {
        ExampleConfig {
            m,
            probe: [0.0; 3],
            radius: 0.5,
        }
    }
}

fn radicands(x: [f64; 3]) -> (f64, f64, f64) {
    let [x1, x2, x3] = x;
    let a = 1.0 - x2 * x2 - x3 * x3;
    let c = 1.0 - x3 * x3;
    let p = x1 * x2 * x3;
    let b = p * p + c * ((1.0 - x1 * x1) * (1.0 - x2 * x2) - x3 * x3);
    (a, b, c)
}

/// Whether the frame is defined (and smooth) at `x`.
pub fn in_domain(x: [f64; 3]) -> bool {
    let (a, b, c) = radicands(x);
    a > 0.0 && b > 0.0 && c > 0.0
}

/// The frame as jets in the coordinates `x` (only x¹, x², x³ are read).
pub fn example_vu_jet(x: &Jet4) -> Result<(Jet4, Jet4)> {
    let pt = [x[1].value(), x[2].value(), x[3].value()];
    if !in_domain(pt) {
        return Err(Error::OutOfDomain(format!("{pt:?}")));
    }
    let order = jet::min_order4(x);
    let (x1, x2, x3) = (&x[1], &x[2], &x[3]);
    let one = Jet::constant(1.0, order);
    let v1 = (&(&one - &x2.square()) - &x3.square()).sqrt();
    let c = &one - &x3.square();
    let p = &(x1 * x2) * x3;
    let inner = &(&(&one - &x1.square()) * &(&one - &x2.square())) - &x3.square();
    let rad = (&p.square() + &(&c * &inner)).sqrt();
    let u2 = (&rad - &p).div(&c);
    let u1 = (&(-(x1 * x3)) - &(&u2 * x2)).div(&v1);
    let zero = Jet::zero(order);
    Ok((
        [zero.clone(), v1, x2.clone(), x3.clone()],
        [zero, u1, u2, x1.clone()],
    ))
}

/// v and u at a point of the x⁰ = 0 hyperplane.
pub fn example_vu(x: [f64; 3]) -> Result<(FourVector, FourVector)> {
    let (v, u) = example_vu_jet(&jet::coordinates([0.0, x[0], x[1], x[2]], 0))?;
    Ok((FourVector(jet::values4(&v)), FourVector(jet::values4(&u))))
}

/// Closed-form values at the origin as functions of m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleTargets {
    pub w: [f64; 4],
    pub t: [f64; 4],
    pub s: [f64; 4],
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub det: f64,
}

impl ExampleTargets {
    pub fn at_origin(m: f64) -> Self {
        ExampleTargets {
            w: [0.0, 0.0, 1.0 - 2.0 * m, -1.0],
            t: [0.0, 0.0, -2.0 * m, -2.0 + 2.0 * m],
            s: [0.0, -1.0, 0.0, 0.0],
            a: [0.0, -2.0 + 4.0 * m - 4.0 * m * m, 2.0 - 2.0 * m],
            b: [-1.0, 0.0, 0.0],
            det: m * m * (2.0 - 4.0 * m + 4.0 * m * m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub m: f64,
    pub probe: [f64; 3],
    pub frame: FrameData,
    pub expansion: FrameExpansion,
    pub solution: PhaseSolution,
    /// Largest deviation from [`ExampleTargets`]; only present at the origin.
    pub max_target_deviation: Option<f64>,
}

/// Frame data and expansion at the probe (no phase solve).
pub fn example_frame(
    cfg: &ExampleConfig,
) -> Result<(FrameData, FrameExpansion, DerivativeScalars)> {
    if !(cfg.m.is_finite() && cfg.m >= 0.0) {
        return Err(Error::InvalidParams(format!("m = {}", cfg.m)));
    }
    let x = jet::coordinates([0.0, cfg.probe[0], cfg.probe[1], cfg.probe[2]], 2);
    let (v, u) = example_vu_jet(&x)?;
    let q = Jet::constant(0.0, 2);
    let r = Jet::constant(-cfg.m, 2);
    let w = vector_w(&v, &u, &q, &r)?;
    let p = scalar_p(&q, &r, &v, &u, cfg.m)?;
    let (t, s) = vectors_ts(&w, &v, &u)?;
    let fv = |x: &Jet4| FourVector(jet::values4(x));
    let frame = FrameData {
        v: fv(&v),
        u: fv(&u),
        w: fv(&w),
        t: fv(&t),
        s: fv(&s),
        q: q.value(),
        r: r.value(),
        p: p.value(),
    };
    let exp = expand_in_frame(&frame.t, &frame.s, &frame.v, &frame.u, &frame.w)?;
    let ds = DerivativeScalars {
        w_dq: jet::directional(&w, &q)?.value(),
        v_dp: jet::directional(&v, &p)?.value(),
        w_dr: jet::directional(&w, &r)?.value(),
        u_dp: jet::directional(&u, &p)?.value(),
    };
    Ok((frame, exp, ds))
}

pub fn evaluate_example(cfg: &ExampleConfig) -> Result<ExampleReport> {
    let (frame, expansion, ds) = example_frame(cfg)?;
    let params = PhysParams::new(cfg.m, 1.0)?;
    let solution = solve_phase(&frame, &expansion, &ds, &params, UNIT_TOL_ANALYTIC)?;
    let max_target_deviation = (cfg.probe == [0.0; 3]).then(|| {
        let tg = ExampleTargets::at_origin(cfg.m);
        let mut dev = (solution.det - tg.det).abs();
        for (got, want) in [(frame.w.0, tg.w), (frame.t.0, tg.t), (frame.s.0, tg.s)] {
            for i in 0..4 {
                dev = dev.max((got[i] - want[i]).abs());
            }
        }
        for (got, want) in [(expansion.a, tg.a), (expansion.b, tg.b)] {
            for i in 0..3 {
                dev = dev.max((got[i] - want[i]).abs());
            }
        }
        dev
    });
    Ok(ExampleReport {
        m: cfg.m,
        probe: cfg.probe,
        frame,
        expansion,
        solution,
        max_target_deviation,
    })
}
