//! Cauchy problem for the potential B^μ driven by free Majorana matter.
//!
//! Component form used throughout (upper indices, ∂_k = ∂/∂x^k):
//!
//! ```text
//! constraint   C  = −∇²B⁰ − ∂_k Ḃ^k − e J⁰                  = 0
//! evolution    B̈^k = ∇²B^k − ∂_k(Ḃ⁰ + ∂_l B^l) + e J^k
//! gauge        B⁰ = J^k B^k / J⁰        (from J_μ B^μ = 0)
//! ```
//!
//! Matter is a closed-form free solution and never reacts to B. The lattice
//! evolves B^k, Ḃ^k (k = 1, 2, 3) by RK4 with the Laplacian built as
//! Σ D_l D_l from the same first-derivative operators D_l used for the
//! divergence, so the discrete constraint changes only through the
//! discretisation error of ∂_μ J^μ.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::real_forms;
use crate::error::{Error, Result};
use crate::fields::{dirac_time_derivatives, majorana_plane_wave, SpinorField, Superposition};
use crate::jet::{self, coordinates, Jet, Jet4};
use crate::lattice::{fornberg_weights, lattice_jet, stencil_radius, Gradient, Grid};
use crate::phase_recovery::{
    current_of, recover_from_fields, recovered_spinor_jet, FrameFields, PointRecovery,
};
use crate::spinor_ops::PhysParams;

/// One plane-wave matter mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatterMode {
    pub momentum: [f64; 3],
    pub seed: [f64; 4],
}

/// amp · exp(−|x − center|² / width²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amp: f64,
    pub center: [f64; 3],
    pub width: f64,
}

impl Bump {
    pub fn value(&self, x: [f64; 3]) -> f64 {
        let r2: f64 = (0..3).map(|a| (x[a] - self.center[a]).powi(2)).sum();
        self.amp * (-r2 / (self.width * self.width)).exp()
    }

    /// Jet in the spatial coordinates `x[1..4]`.
    pub fn jet(&self, x: &Jet4) -> Jet {
        let order = jet::min_order4(x);
        let mut r2 = Jet::zero(order);
        for a in 0..3 {
            r2 += &x[a + 1].add_scalar(-self.center[a]).square();
        }
        r2.scale(-1.0 / (self.width * self.width))
            .exp()
            .scale(self.amp)
    }
}

fn sum_bumps(b: &[Bump], x: [f64; 3]) -> f64 {
    b.iter().map(|b| b.value(x)).sum()
}

fn sum_bump_jets(b: &[Bump], x: &Jet4) -> Jet {
    let mut acc = Jet::zero(jet::min_order4(x));
    for bump in b {
        acc += &bump.jet(x);
    }
    acc
}

/// The freely chosen initial data: B¹, B², B³, Ḃ¹, Ḃ² on x⁰ = 0 and Ḃ³ on
/// the line x⁰ = 0, x³ = x³_min. Ḃ³ elsewhere follows from the constraint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialChoices {
    pub b: [Vec<Bump>; 3],
    pub bdot: [Vec<Bump>; 2],
    /// Evaluated at (x¹, x², x³_min).
    pub bdot3_line: Vec<Bump>,
}

impl InitialChoices {
    /// A fixed smooth perturbation used by the defaults and the tests.
    pub fn sample() -> Self {
        let bump = |amp, center, width| Bump { amp, center, width };
        InitialChoices {
            b: [
                vec![bump(0.3, [0.2, -0.1, 0.1], 1.0)],
                vec![bump(-0.2, [-0.3, 0.2, 0.0], 1.2)],
                vec![bump(0.25, [0.1, 0.3, -0.2], 0.9)],
            ],
            bdot: [
                vec![bump(0.1, [0.0, 0.2, -0.1], 1.1)],
                vec![bump(-0.15, [0.2, 0.0, 0.3], 1.0)],
            ],
            bdot3_line: vec![bump(0.05, [0.1, -0.2, 0.0], 1.5)],
        }
    }

    /// The same choices with every bump width multiplied by `factor`.
    pub fn widened(mut self, factor: f64) -> Self {
        for b in self.b.iter_mut().chain(self.bdot.iter_mut()).flatten() {
            b.width *= factor;
        }
        for b in &mut self.bdot3_line {
            b.width *= factor;
        }
        self
    }
}

/// Configuration of a lattice run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub cells: [usize; 3],
    pub dt: f64,
    pub steps: usize,
    pub params: PhysParams,
    pub modes: Vec<MatterMode>,
    /// Accuracy order of the spatial stencils (even).
    pub accuracy: usize,
    /// Cells next to each face excluded from accuracy checks.
    pub margin: usize,
    /// Keep every n-th state (0 keeps only the final one).
    pub snapshot_every: usize,
    pub choices: InitialChoices,
    /// dt ≤ cfl · min h.
    pub cfl: f64,
    /// Abort when max |B|, |Ḃ| exceeds this factor times its initial value (plus one).
    pub blowup: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lo: [-2.0; 3],
            hi: [2.0; 3],
            cells: [32; 3],
            dt: 0.00625,
            steps: 200,
            params: PhysParams { m: 1.0, e: 1.0 },
            modes: default_modes(),
            accuracy: 4,
            margin: 12,
            snapshot_every: 0,
            choices: InitialChoices::sample(),
            cfl: 0.5,
            blowup: 1e3,
        }
    }
}

/// A dominant mode plus a weaker one, so J⁰ stays positive everywhere.
pub fn default_modes() -> Vec<MatterMode> {
    vec![
        MatterMode {
            momentum: [0.5, 0.1, -0.2],
            seed: [1.0, 0.3, -0.2, 0.5],
        },
        MatterMode {
            momentum: [-0.2, 0.4, 0.3],
            seed: [0.08, -0.24, 0.16, 0.04],
        },
    ]
}

impl SimConfig {
    pub fn grid(&self) -> Grid {
        Grid {
            n: self.cells.map(|c| c + 1),
            lo: self.lo,
            h: std::array::from_fn(|a| (self.hi[a] - self.lo[a]) / self.cells[a] as f64),
        }
    }

    pub fn h_min(&self) -> f64 {
        let g = self.grid();
        g.h[0].min(g.h[1]).min(g.h[2])
    }

    /// Cells the evolution can contaminate from the faces, plus the stencil.
    pub fn required_margin(&self) -> usize {
        stencil_radius(1, self.accuracy)
            + (self.steps as f64 * self.dt / self.h_min()).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.accuracy == 0 || self.accuracy % 2 != 0 || self.accuracy > 8 {
            return bad(format!(
                "accuracy must be 2, 4, 6 or 8 (got {})",
                self.accuracy
            ));
        }
        for a in 0..3 {
            if !(self.hi[a] > self.lo[a]) || self.cells[a] < 2 {
                return bad(format!("axis {a}: empty extent or fewer than 2 cells"));
            }
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive (got {})", self.dt));
        }
        if self.dt > self.cfl * self.h_min() {
            return bad(format!(
                "dt = {} exceeds {} · h = {}",
                self.dt,
                self.cfl,
                self.cfl * self.h_min()
            ));
        }
        if self.margin < self.required_margin() {
            return bad(format!(
                "margin {} below the causal requirement {}",
                self.margin,
                self.required_margin()
            ));
        }
        if 2 * self.margin + 1 > self.cells.iter().copied().min().unwrap_or(0) + 1 {
            return bad("margin leaves no interior".into());
        }
        PhysParams::new(self.params.m, self.params.e)?;
        Ok(())
    }
}

/// Matter, parameters and free data: everything defining the exact problem.
#[derive(Clone, Debug)]
pub struct CauchyProblem {
    pub params: PhysParams,
    pub matter: Arc<Superposition>,
    pub choices: InitialChoices,
    /// x³ of the line carrying the free Ḃ³ data.
    pub z0: f64,
}

/// 4-point Gauss–Legendre rule on [−1, 1].
const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// Longest sub-interval used when integrating the constraint along x³.
const QUAD_SEGMENT: f64 = 0.125;

fn segments(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let n = ((b - a).abs() / QUAD_SEGMENT).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n).map(move |i| (a + i as f64 * h, a + (i + 1) as f64 * h))
}

fn gauss_nodes(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(move |(x, w)| (mid + half * x, w * half))
}

impl CauchyProblem {
    pub fn new(
        params: PhysParams,
        modes: &[MatterMode],
        choices: InitialChoices,
        z0: f64,
    ) -> Result<Self> {
        let waves = modes
            .iter()
            .map(|m| majorana_plane_wave(m.momentum, m.seed, &params))
            .collect::<Result<Vec<_>>>()?;
        Ok(CauchyProblem {
            params,
            matter: Arc::new(Superposition::new(waves)),
            choices,
            z0,
        })
    }

    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        CauchyProblem::new(cfg.params, &cfg.modes, cfg.choices.clone(), cfg.lo[2])
    }

    /// J^μ of the matter as jets in the coordinates `x`.
    pub fn current(&self, x: &Jet4) -> Jet4 {
        current_of(&self.matter.eval(x))
    }

    /// J and ∂₀J at a point.
    pub fn current_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        let (phi, dphi) = self.matter.value_and_rate(p);
        let f = real_forms();
        let mut j = [0.0; 4];
        let mut dj = [0.0; 4];
        for mu in 0..4 {
            let c = &f.current[mu];
            for a in 0..4 {
                for b in 0..4 {
                    let w = c[(a, b)];
                    if w != 0.0 {
                        j[mu] += w * phi[a] * phi[b];
                        dj[mu] += 2.0 * w * phi[a] * dphi[b];
                    }
                }
            }
        }
        (j, dj)
    }

    /// The free B^k (time-independent jets).
    pub fn b_initial(&self, x: &Jet4) -> [Jet; 3] {
        std::array::from_fn(|k| sum_bump_jets(&self.choices.b[k], x))
    }

    fn bdot12_initial(&self, x: &Jet4) -> [Jet; 2] {
        std::array::from_fn(|k| sum_bump_jets(&self.choices.bdot[k], x))
    }

    /// f = −eJ⁰ − ∇²B⁰ − ∂₁Ḃ¹ − ∂₂Ḃ² on x⁰ = 0, so that ∂₃Ḃ³ = f
    /// enforces the constraint. Spatial jet of the given order.
    pub fn constraint_source(&self, x: [f64; 3], order: usize) -> Result<Jet> {
        if order + 2 > jet::MAX_ORDER {
            return Err(Error::OrderTooHigh(order + 2));
        }
        let big = coordinates([0.0, x[0], x[1], x[2]], order + 2);
        let j = self.current(&big).map(|c| c.mask_time_orders(0));
        let b = self.b_initial(&big);
        let b0 = b0_from(&j, &b)?;
        let mut lap = Jet::zero(order);
        for l in 1..4 {
            lap += &b0.derivative(l).derivative(l);
        }
        let small = coordinates([0.0, x[0], x[1], x[2]], order + 1);
        let bd = self.bdot12_initial(&small);
        let div12 = &bd[0].derivative(1) + &bd[1].derivative(2);
        let e = self.params.e;
        Ok(&(&j[0].truncate(order).scale(-e) - &lap) - &div12)
    }

    fn constraint_source_value(&self, x: [f64; 3]) -> f64 {
        self.constraint_source(x, 0)
            .map(|j| j.value())
            .unwrap_or(f64::NAN)
    }

    fn line_value(&self, x1: f64, x2: f64) -> f64 {
        sum_bumps(&self.choices.bdot3_line, [x1, x2, self.z0])
    }

    /// Ḃ³(x) = line value + ∫_{z0}^{x³} f dx³ by composite Gauss–Legendre.
    pub fn bdot3_value(&self, x: [f64; 3]) -> f64 {
        let mut acc = self.line_value(x[0], x[1]);
        for (a, b) in segments(self.z0, x[2]) {
            for (s, w) in gauss_nodes(a, b) {
                acc += w * self.constraint_source_value([x[0], x[1], s]);
            }
        }
        acc
    }

    /// Spatial jet of Ḃ³ at `x`.
    pub fn bdot3_jet(&self, x: [f64; 3], order: usize) -> Result<Jet> {
        if order == 0 {
            return Ok(Jet::constant(self.bdot3_value(x), 0));
        }
        // transverse part: line data plus ∫_{z0}^{x³} f, as a jet in x¹, x²
        let mut transverse = Jet::zero(order);
        let line_x: Jet4 = {
            let mut c = coordinates([0.0, x[0], x[1], self.z0], order);
            c[3] = Jet::constant(self.z0, order);
            c
        };
        transverse += &sum_bump_jets(&self.choices.bdot3_line, &line_x);
        for (a, b) in segments(self.z0, x[2]) {
            for (s, w) in gauss_nodes(a, b) {
                let f = self.constraint_source([x[0], x[1], s], order)?;
                for (i, c) in f.coeffs().iter().enumerate() {
                    let m = jet::multi_index(i);
                    if m[0] == 0 && m[3] == 0 {
                        transverse.coeffs_mut()[i] += w * c;
                    }
                }
            }
        }
        let along = self.constraint_source(x, order - 1)?.integrate(3);
        Ok(&transverse + &along)
    }

    /// Jets of (B^k, Ḃ^k) on x⁰ = 0 at `x`.
    pub fn initial_jets(&self, x: [f64; 3], order: usize) -> Result<([Jet; 3], [Jet; 3])> {
        let c = coordinates([0.0, x[0], x[1], x[2]], order);
        let b = self.b_initial(&c);
        let [d1, d2] = self.bdot12_initial(&c);
        Ok((b, [d1, d2, self.bdot3_jet(x, order)?]))
    }

    /// Exact jets of B^μ at (0, x) to the given total order, by Picard
    /// iteration of the evolution equations on jets.
    pub fn exact_tower(&self, x: [f64; 3], order: usize) -> Result<Jet4> {
        if order < 2 || order > jet::MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        let c = coordinates([0.0, x[0], x[1], x[2]], order);
        let j = self.current(&c);
        let (b_init, bd_init) = self.initial_jets(x, order)?;
        let t = &c[0];
        let base: [Jet; 3] = std::array::from_fn(|k| &b_init[k] + &(t * &bd_init[k]));
        let mut b = base.clone();
        let e = self.params.e;
        for _ in 0..order {
            let b0 = b0_from(&j, &b)?;
            let mut s = b0.derivative(0);
            for l in 1..4 {
                s += &b[l - 1].derivative(l);
            }
            let next: [Jet; 3] = std::array::from_fn(|k| {
                let mut f = j[k + 1].truncate(order - 2).scale(e);
                for l in 1..4 {
                    f += &b[k].derivative(l).derivative(l);
                }
                f = &f - &s.derivative(k + 1);
                &base[k] + &f.integrate(0).integrate(0)
            });
            b = next;
        }
        let b0 = b0_from(&j, &b)?;
        Ok([b0, b[0].clone(), b[1].clone(), b[2].clone()])
    }
}

/// B⁰ = J^k B^k / J⁰ on jets.
fn b0_from(j: &Jet4, b: &[Jet; 3]) -> Result<Jet> {
    if !(j[0].value() > 0.0) {
        return Err(Error::VanishingDensity(j[0].value()));
    }
    let mut num = &j[1] * &b[0];
    num += &(&j[2] * &b[1]);
    num += &(&j[3] * &b[2]);
    Ok(&num * &j[0].recip())
}

/// J^μ from jets of B^μ (valid to time order T) via the field equations;
/// the result is two orders lower and valid to time order T − 2.
pub fn extract_j_from_b(b: &Jet4, params: &PhysParams) -> Result<Jet4> {
    let e = params.require_charge()?;
    let order = jet::min_order4(b);
    if order < 2 {
        return Err(Error::OrderExhausted {
            have: order,
            need: 2,
        });
    }
    let lap = |f: &Jet| {
        let mut acc = Jet::zero(order - 2);
        for l in 1..4 {
            acc += &f.derivative(l).derivative(l);
        }
        acc
    };
    let mut div = Jet::zero(order - 1);
    for l in 1..4 {
        div += &b[l].derivative(l);
    }
    let mut j0 = -lap(&b[0]);
    for k in 1..4 {
        j0 = &j0 - &b[k].derivative(0).derivative(k);
    }
    let mut out = [j0.scale(1.0 / e), Jet::zero(0), Jet::zero(0), Jet::zero(0)];
    let bd0 = b[0].derivative(0);
    for k in 1..4 {
        let jk = &(&(&b[k].derivative(0).derivative(0) - &lap(&b[k])) + &bd0.derivative(k))
            + &div.derivative(k);
        out[k] = jk.scale(1.0 / e);
    }
    Ok(out)
}

/// Fourth time derivatives of B^μ at a point, with the recovery data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourthDerivative {
    /// ∂₀⁴B^μ.
    pub b4: [f64; 4],
    pub recovery: PointRecovery,
    /// max |J from B − J from the recovered Φ| at the point.
    pub current_mismatch: f64,
}

/// ∂₀⁴B^μ on a hyperplane from jets of B^μ with time order ≤ 3.
///
/// The jets need total order ≥ 7; coefficients of time order above 3 are
/// ignored. Steps: J from B; Φ from J by phase recovery; φ lifted to a
/// spatial jet of order 4 by the transport equations; the time tower of Φ
/// from the free Dirac equation; then the twice time-differentiated
/// evolution equation for B^k and the four times differentiated
/// J_μB^μ = 0 for B⁰.
pub fn fourth_derivative_b(
    b: &Jet4,
    params: &PhysParams,
    unit_tol: f64,
) -> Result<FourthDerivative> {
    let order = jet::min_order4(b);
    if order < 7 {
        return Err(Error::OrderExhausted {
            have: order,
            need: 7,
        });
    }
    let b: Jet4 = std::array::from_fn(|mu| b[mu].truncate(7).mask_time_orders(3));
    let j = extract_j_from_b(&b, params)?;
    let j: Jet4 = std::array::from_fn(|mu| j[mu].mask_time_orders(1));
    if !(j[0].value() > 0.0) {
        return Err(Error::VanishingDensity(j[0].value()));
    }
    let fields = FrameFields::from_current(&j, params.m)?;
    let recovery = recover_from_fields(&fields, params, unit_tol)?;
    let phi = fields.lift_phase(recovery.solution.phi, 4)?;
    let spatial = recovered_spinor_jet(&fields, &phi);
    let tower = dirac_time_derivatives(&spatial, params, 4)?;
    let jm = current_of(&tower);
    let current_mismatch = (0..4)
        .map(|mu| (jm[mu].value() - j[mu].value()).abs())
        .fold(0.0, f64::max);

    let d = |f: &Jet, a: [usize; 4]| f.partial(&a);
    let e = params.e;
    let mut b4 = [0.0; 4];
    for k in 1..4 {
        let mut lap = 0.0;
        let mut grad_div = 0.0;
        for l in 1..4 {
            let mut a = [2, 0, 0, 0];
            a[l] += 2;
            lap += d(&b[k], a);
            let mut a = [2, 0, 0, 0];
            a[k] += 1;
            a[l] += 1;
            grad_div += d(&b[l], a);
        }
        let mut a = [3, 0, 0, 0];
        a[k] = 1;
        b4[k] = lap - d(&b[0], a) - grad_div + e * d(&jm[k], [2, 0, 0, 0]);
    }
    // J_μ B^μ = 0 differentiated four times
    let bn = |n: usize, mu: usize| {
        if n == 4 {
            b4[mu]
        } else {
            d(&b[mu], [n, 0, 0, 0])
        }
    };
    let jn = |n: usize, mu: usize| d(&jm[mu], [n, 0, 0, 0]);
    let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
    let mut rest = 0.0;
    for n in 1..=4 {
        let mink = jn(n, 0) * bn(4 - n, 0) - (1..4).map(|k| jn(n, k) * bn(4 - n, k)).sum::<f64>();
        rest += binom[n] * mink;
    }
    let js_b4: f64 = (1..4).map(|k| jn(0, k) * b4[k]).sum();
    b4[0] = (js_b4 - rest) / jn(0, 0);
    Ok(FourthDerivative {
        b4,
        recovery,
        current_mismatch,
    })
}

/// Lattice state on a time slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyState {
    pub time: f64,
    pub b: [Vec<f64>; 3],
    pub bdot: [Vec<f64>; 3],
}

/// A configured lattice simulation.
pub struct Simulation {
    pub cfg: SimConfig,
    pub problem: CauchyProblem,
    pub grid: Grid,
    grad: Gradient,
}

/// Matter current and its rate on every grid point.
struct MatterSlice {
    j: [Vec<f64>; 4],
    dj: [Vec<f64>; 4],
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Simulation> {
        cfg.validate()?;
        let problem = CauchyProblem::from_config(&cfg)?;
        let grid = cfg.grid();
        let grad = Gradient::new(&grid, cfg.accuracy)?;
        Ok(Simulation {
            cfg,
            problem,
            grid,
            grad,
        })
    }

    fn matter_slice(&self, t: f64) -> Result<MatterSlice> {
        let n = self.grid.len();
        let vals: Vec<([f64; 4], [f64; 4])> = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = self.grid.coord(self.grid.multi(i));
                self.problem.current_and_rate([t, x[0], x[1], x[2]])
            })
            .collect();
        let mut j: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        let mut dj: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        let mut min_j0 = f64::INFINITY;
        for (i, (a, b)) in vals.into_iter().enumerate() {
            for mu in 0..4 {
                j[mu][i] = a[mu];
                dj[mu][i] = b[mu];
            }
            min_j0 = min_j0.min(a[0]);
        }
        if !(min_j0 > 0.0) {
            return Err(Error::VanishingDensity(min_j0));
        }
        Ok(MatterSlice { j, dj })
    }

    /// B⁰ and Ḃ⁰ from the gauge condition.
    fn b0_and_rate(
        &self,
        m: &MatterSlice,
        b: &[Vec<f64>; 3],
        bd: &[Vec<f64>; 3],
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let mut b0 = vec![0.0; n];
        let mut bd0 = vec![0.0; n];
        for i in 0..n {
            let j0 = m.j[0][i];
            let mut jb = 0.0;
            let mut djb = 0.0;
            let mut jbd = 0.0;
            for k in 0..3 {
                jb += m.j[k + 1][i] * b[k][i];
                djb += m.dj[k + 1][i] * b[k][i];
                jbd += m.j[k + 1][i] * bd[k][i];
            }
            b0[i] = jb / j0;
            bd0[i] = (djb + jbd) / j0 - jb * m.dj[0][i] / (j0 * j0);
        }
        (b0, bd0)
    }

    fn d(&self, axis: usize, f: &[f64]) -> Vec<f64> {
        self.grad.d[axis].applied(&self.grid, f)
    }

    fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let mut acc = self.grid.zeros();
        for a in 0..3 {
            let dd = self.d(a, &self.d(a, f));
            for (x, y) in acc.iter_mut().zip(dd) {
                *x += y;
            }
        }
        acc
    }

    /// B̈^k = ∇²B^k − ∂_k(Ḃ⁰ + ∇·B) + eJ^k on the lattice.
    fn acceleration(&self, t: f64, b: &[Vec<f64>; 3], bd: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3]> {
        let m = self.matter_slice(t)?;
        let (_, bd0) = self.b0_and_rate(&m, b, bd);
        let mut s = bd0;
        for l in 0..3 {
            for (x, y) in s.iter_mut().zip(self.d(l, &b[l])) {
                *x += y;
            }
        }
        let e = self.cfg.params.e;
        let mut out: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::new());
        for k in 0..3 {
            let mut acc = self.laplacian(&b[k]);
            let ds = self.d(k, &s);
            for i in 0..acc.len() {
                acc[i] += e * m.j[k + 1][i] - ds[i];
            }
            out[k] = acc;
        }
        Ok(out)
    }

    /// Lattice constraint −∇²B⁰ − ∂_kḂ^k − eJ⁰ at every point.
    pub fn constraint(&self, state: &CauchyState) -> Result<Vec<f64>> {
        let m = self.matter_slice(state.time)?;
        let (b0, _) = self.b0_and_rate(&m, &state.b, &state.bdot);
        let mut c = self.laplacian(&b0);
        for k in 0..3 {
            for (x, y) in c.iter_mut().zip(self.d(k, &state.bdot[k])) {
                *x += y;
            }
        }
        let e = self.cfg.params.e;
        for (x, j0) in c.iter_mut().zip(&m.j[0]) {
            *x = -*x - e * j0;
        }
        Ok(c)
    }

    /// Grid indices at least `margin` cells from every face.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&i| self.grid.boundary_distance(self.grid.multi(i)) >= self.cfg.margin)
            .collect()
    }

    /// B⁰ and Ḃ⁰ of a state on every grid point.
    pub fn gauge_component(&self, state: &CauchyState) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = self.matter_slice(state.time)?;
        Ok(self.b0_and_rate(&m, &state.b, &state.bdot))
    }

    /// Samples the free data and integrates the constraint for Ḃ³ column by
    /// column; checked against an independent evaluation at the centre.
    pub fn initial_state(&self) -> Result<CauchyState> {
        let g = &self.grid;
        let ch = &self.problem.choices;
        self.matter_slice(0.0)?;
        let b = std::array::from_fn(|k| g.sample(|x| sum_bumps(&ch.b[k], x)));
        let mut bdot: [Vec<f64>; 3] = [
            g.sample(|x| sum_bumps(&ch.bdot[0], x)),
            g.sample(|x| sum_bumps(&ch.bdot[1], x)),
            g.zeros(),
        ];
        let (nx, ny, nz) = (g.n[0], g.n[1], g.n[2]);
        let columns: Vec<Vec<f64>> = (0..nx * ny)
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c / ny, c % ny);
                let x0 = g.coord([i, j, 0]);
                let mut acc = self.problem.line_value(x0[0], x0[1]);
                let mut col = Vec::with_capacity(nz);
                let start = self.problem.z0;
                // the line sits at z0; integrate from there to the first node
                for (a, b) in segments(start, x0[2]) {
                    for (s, w) in gauss_nodes(a, b) {
                        acc += w * self.problem.constraint_source_value([x0[0], x0[1], s]);
                    }
                }
                col.push(acc);
                for k in 1..nz {
                    let (a, b) = (g.coord([i, j, k - 1])[2], g.coord([i, j, k])[2]);
                    for (s, w) in gauss_nodes(a, b) {
                        acc += w * self.problem.constraint_source_value([x0[0], x0[1], s]);
                    }
                    col.push(acc);
                }
                col
            })
            .collect();
        for (c, col) in columns.iter().enumerate() {
            let (i, j) = (c / ny, c % ny);
            for (k, v) in col.iter().enumerate() {
                bdot[2][g.index([i, j, k])] = *v;
            }
        }
        let centre = g.n.map(|n| n / 2);
        let reference = self.problem.bdot3_value(g.coord(centre));
        let got = bdot[2][g.index(centre)];
        let tol = 1e-8 * (1.0 + reference.abs());
        if (got - reference).abs() > tol {
            return Err(Error::ConstraintResidual {
                residual: (got - reference).abs(),
                tol,
            });
        }
        Ok(CauchyState { time: 0.0, b, bdot })
    }

    fn rk4_step(&self, s: &CauchyState) -> Result<CauchyState> {
        self.rk4_step_by(s, self.cfg.dt)
    }

    fn rk4_step_by(&self, s: &CauchyState, dt: f64) -> Result<CauchyState> {
        let t = s.time;
        let axpy = |x: &[Vec<f64>; 3], y: &[Vec<f64>; 3], a: f64| -> [Vec<f64>; 3] {
            std::array::from_fn(|k| x[k].iter().zip(&y[k]).map(|(p, q)| p + a * q).collect())
        };
        let k1b = s.bdot.clone();
        let k1v = self.acceleration(t, &s.b, &s.bdot)?;
        let b2 = axpy(&s.b, &k1b, 0.5 * dt);
        let v2 = axpy(&s.bdot, &k1v, 0.5 * dt);
        let k2v = self.acceleration(t + 0.5 * dt, &b2, &v2)?;
        let b3 = axpy(&s.b, &v2, 0.5 * dt);
        let v3 = axpy(&s.bdot, &k2v, 0.5 * dt);
        let k3v = self.acceleration(t + 0.5 * dt, &b3, &v3)?;
        let b4 = axpy(&s.b, &v3, dt);
        let v4 = axpy(&s.bdot, &k3v, dt);
        let k4v = self.acceleration(t + dt, &b4, &v4)?;
        let combine = |x: &[Vec<f64>; 3],
                       a: &[Vec<f64>; 3],
                       b: &[Vec<f64>; 3],
                       c: &[Vec<f64>; 3],
                       d: &[Vec<f64>; 3]|
         -> [Vec<f64>; 3] {
            std::array::from_fn(|k| {
                (0..x[k].len())
                    .map(|i| {
                        x[k][i] + dt / 6.0 * (a[k][i] + 2.0 * b[k][i] + 2.0 * c[k][i] + d[k][i])
                    })
                    .collect()
            })
        };
        Ok(CauchyState {
            time: t + dt,
            b: combine(&s.b, &k1b, &v2, &v3, &v4),
            bdot: combine(&s.bdot, &k1v, &k2v, &k3v, &k4v),
        })
    }

    /// Advances `steps` RK4 steps, monitoring the interior constraint after
    /// every step.
    pub fn evolve(&self, initial: CauchyState, steps: usize) -> Result<EvolutionRun> {
        let norm = |s: &CauchyState| {
            s.b.iter()
                .chain(s.bdot.iter())
                .flat_map(|f| f.iter())
                .fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let bound = self.cfg.blowup * (norm(&initial) + 1.0);
        let interior = self.interior();
        let c0 = self.constraint(&initial)?;
        let max_on = |c: &[f64]| interior.iter().fold(0.0f64, |m, &i| m.max(c[i].abs()));
        let mut drift = vec![DriftSample {
            time: initial.time,
            max_constraint: max_on(&c0),
            max_drift: 0.0,
        }];
        let mut snapshots = vec![initial.clone()];
        let mut state = initial;
        for step in 1..=steps {
            state = self.rk4_step(&state)?;
            let n = norm(&state);
            if !(n <= bound) {
                return Err(Error::Instability { norm: n, bound });
            }
            let c = self.constraint(&state)?;
            let d = interior
                .iter()
                .fold(0.0f64, |m, &i| m.max((c[i] - c0[i]).abs()));
            drift.push(DriftSample {
                time: state.time,
                max_constraint: max_on(&c),
                max_drift: d,
            });
            let every = self.cfg.snapshot_every;
            if (every > 0 && step % every == 0) || step == steps {
                snapshots.push(state.clone());
            }
        }
        Ok(EvolutionRun {
            snapshots,
            drift,
            initial_constraint: c0,
            final_state: state,
        })
    }

    /// Seven states at t = jΔ, j = −3..=3, with Δ = `stride`·dt, obtained by
    /// evolving the initial data backward and forward.
    pub fn snapshot_stack(&self, initial: &CauchyState, stride: usize) -> Result<Vec<CauchyState>> {
        if stride == 0 {
            return Err(Error::InvalidConfig(
                "snapshot stride must be positive".into(),
            ));
        }
        let mut out = Vec::with_capacity(7);
        for dir in [-1.0, 1.0] {
            let mut state = initial.clone();
            let mut side = Vec::with_capacity(3);
            for step in 1..=3 * stride {
                state = self.rk4_step_by(&state, dir * self.cfg.dt)?;
                if step % stride == 0 {
                    side.push(state.clone());
                }
            }
            if dir < 0.0 {
                side.reverse();
                out.extend(side);
                out.push(initial.clone());
            } else {
                out.extend(side);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSample {
    pub time: f64,
    /// max |C| over the interior.
    pub max_constraint: f64,
    /// max |C(t) − C(0)| over the interior.
    pub max_drift: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub snapshots: Vec<CauchyState>,
    pub drift: Vec<DriftSample>,
    pub initial_constraint: Vec<f64>,
    pub final_state: CauchyState,
}

/// Seven equally spaced states centred on the evaluation time, from which
/// time derivatives are taken with 7-point stencils.
pub struct SnapshotStack<'a> {
    pub sim: &'a Simulation,
    pub states: &'a [CauchyState],
    pub spacing: f64,
}

impl SnapshotStack<'_> {
    fn weights(&self, d: usize) -> Vec<f64> {
        let nodes: Vec<f64> = (-3..=3).map(|i| i as f64 * self.spacing).collect();
        fornberg_weights(0.0, &nodes, d)[d].clone()
    }

    fn b0_fields(&self) -> Result<Vec<Vec<f64>>> {
        self.states
            .iter()
            .map(|s| self.sim.gauge_component(s).map(|(b0, _)| b0))
            .collect()
    }

    /// Jets of B^μ at a grid point on the centre slice: spatial order
    /// `order − n` for the n-th time derivative, n ≤ 3.
    pub fn hyperplane_jet(&self, at: [usize; 3], order: usize, accuracy: usize) -> Result<Jet4> {
        if self.states.len() != 7 {
            return Err(Error::InvalidConfig("snapshot stack needs 7 states".into()));
        }
        let g = &self.sim.grid;
        let centre = &self.states[3];
        let b0s = self.b0_fields()?;
        let (_, bd0) = self.sim.gauge_component(centre)?;
        let mut out: Jet4 = jet::zero4(order);
        let fact = [1.0, 1.0, 2.0, 6.0];
        for n in 0..=3usize.min(order) {
            for mu in 0..4 {
                let field: Vec<f64> = match (n, mu) {
                    (0, 0) => b0s[3].clone(),
                    (0, k) => centre.b[k - 1].clone(),
                    (1, 0) => bd0.clone(),
                    (1, k) => centre.bdot[k - 1].clone(),
                    (d, 0) => {
                        let w = self.weights(d);
                        (0..g.len())
                            .map(|i| (0..7).map(|s| w[s] * b0s[s][i]).sum())
                            .collect()
                    }
                    (d, k) => {
                        let w = self.weights(d);
                        (0..g.len())
                            .map(|i| (0..7).map(|s| w[s] * self.states[s].b[k - 1][i]).sum())
                            .collect()
                    }
                };
                let sj = lattice_jet(g, &field, at, order - n, accuracy)?;
                for (i, c) in sj.coeffs().iter().enumerate() {
                    let mut a = jet::multi_index(i);
                    if a[0] != 0 {
                        continue;
                    }
                    a[0] = n;
                    let idx = jet::index_of(&a);
                    out[mu].coeffs_mut()[idx] = c / fact[n];
                }
            }
        }
        Ok(out)
    }

    /// ∂₀⁴B^μ at a grid point by the 7-point stencil.
    pub fn fourth_time_derivative(&self, at: [usize; 3]) -> Result<[f64; 4]> {
        let g = &self.sim.grid;
        let i = g.index(at);
        let b0s = self.b0_fields()?;
        let w = self.weights(4);
        let mut out = [0.0; 4];
        out[0] = (0..7).map(|s| w[s] * b0s[s][i]).sum();
        for k in 1..4 {
            out[k] = (0..7).map(|s| w[s] * self.states[s].b[k - 1][i]).sum();
        }
        Ok(out)
    }
}

/// Constraint drift |C(T) − C(0)| of a run and of the same run on a grid
/// with half the cells (dt doubled, steps halved), compared on the coarse
/// interior nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftConvergence {
    pub coarse_cells: [usize; 3],
    pub fine_cells: [usize; 3],
    pub coarse_drift: f64,
    pub fine_drift: f64,
    /// log₂(coarse / fine).
    pub order: f64,
    /// min(stencil accuracy, 4).
    pub nominal: usize,
    pub points: usize,
}

fn final_drift(sim: &Simulation) -> Result<(Vec<f64>, EvolutionRun)> {
    let run = sim.evolve(sim.initial_state()?, sim.cfg.steps)?;
    let c1 = sim.constraint(&run.final_state)?;
    let d = c1
        .iter()
        .zip(&run.initial_constraint)
        .map(|(a, b)| a - b)
        .collect();
    Ok((d, run))
}

pub fn drift_convergence(fine: &SimConfig) -> Result<(DriftConvergence, EvolutionRun)> {
    if fine.cells.iter().any(|c| c % 2 != 0) || fine.steps % 2 != 0 {
        return Err(Error::InvalidConfig(
            "refinement study needs even cell and step counts".into(),
        ));
    }
    let mut coarse = fine.clone();
    coarse.cells = fine.cells.map(|c| c / 2);
    coarse.dt = 2.0 * fine.dt;
    coarse.steps = fine.steps / 2;
    coarse.margin = coarse.required_margin();
    let fs = Simulation::new(fine.clone())?;
    let cs = Simulation::new(coarse)?;
    let (df, run) = final_drift(&fs)?;
    let (dc, _) = final_drift(&cs)?;
    let (mut ec, mut ef, mut points) = (0.0f64, 0.0f64, 0);
    for i in cs.interior() {
        let x = cs.grid.coord(cs.grid.multi(i));
        let Some(at) = fs.grid.locate(x) else {
            continue;
        };
        if fs.grid.boundary_distance(at) < fs.cfg.margin {
            continue;
        }
        ec = ec.max(dc[i].abs());
        ef = ef.max(df[fs.grid.index(at)].abs());
        points += 1;
    }
    if points == 0 {
        return Err(Error::InvalidConfig("no common interior points".into()));
    }
    Ok((
        DriftConvergence {
            coarse_cells: cs.cfg.cells,
            fine_cells: fs.cfg.cells,
            coarse_drift: ec,
            fine_drift: ef,
            order: (ec / ef).log2(),
            nominal: fine.accuracy.min(4),
            points,
        },
        run,
    ))
}

/// Lattice run comparing [`fourth_derivative_b`] on hyperplane jets with the
/// 7-point time stencil of the evolved potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndToEndConfig {
    /// `steps` is ignored; the run length follows from `at` and `stride`.
    pub sim: SimConfig,
    /// Stack spacing in steps.
    pub stride: usize,
    /// Accuracy of the spatial stencils used for the hyperplane jets.
    pub jet_accuracy: usize,
    /// Physical probe points; each must be a grid node.
    pub probes: Vec<[f64; 3]>,
    /// Time of the hyperplane; a multiple of dt.
    pub at: f64,
    pub unit_tol: f64,
}

impl EndToEndConfig {
    /// Reference setup on [−3, 3]³ with `cells` per axis and stack spacing 1/128.
    pub fn reference(cells: usize) -> Self {
        let spacing = 1.0 / 128.0;
        let h = 6.0 / cells as f64;
        let stride = (spacing / (0.25 * h)).ceil().max(1.0) as usize;
        let sim = SimConfig {
            lo: [-3.0; 3],
            hi: [3.0; 3],
            cells: [cells; 3],
            dt: spacing / stride as f64,
            steps: 3 * stride,
            accuracy: 6,
            choices: InitialChoices::sample().widened(2.0),
            ..SimConfig::default()
        };
        EndToEndConfig {
            sim,
            stride,
            jet_accuracy: 8,
            probes: vec![[0.0; 3], [0.375, 0.0, -0.375], [0.0, 0.375, 0.0]],
            at: 0.0,
            unit_tol: crate::phase_recovery::UNIT_TOL_LATTICE,
        }
    }

    /// The simulation config actually run: steps cover `at` plus three stack
    /// spacings, and the margin is the causal one.
    pub fn effective_sim(&self) -> Result<SimConfig> {
        let mut sim = self.sim.clone();
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be positive".into()));
        }
        let n_at = self.at / sim.dt;
        if !(self.at >= 0.0) || (n_at - n_at.round()).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "at = {} is not a non-negative multiple of dt",
                self.at
            )));
        }
        sim.steps = n_at.round() as usize + 3 * self.stride;
        sim.margin = sim.required_margin();
        Ok(sim)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeComparison {
    pub point: [f64; 3],
    /// ∂₀⁴B^μ from the hyperplane data.
    pub recovered: [f64; 4],
    /// ∂₀⁴B^μ from the time stencil.
    pub finite_difference: [f64; 4],
    /// Closed-form value, available on the initial hyperplane only.
    pub exact: Option<[f64; 4]>,
    /// max_μ |recovered − fd| / max_μ |fd|.
    pub rel_error: f64,
    pub unit_residual: f64,
    pub current_mismatch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndToEndReport {
    pub cells: [usize; 3],
    pub h: f64,
    pub spacing: f64,
    pub at: f64,
    pub probes: Vec<ProbeComparison>,
    pub max_rel_error: f64,
}

pub fn relative_error(got: &[f64; 4], want: &[f64; 4]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = (0..4).fold(0.0f64, |m, i| m.max((got[i] - want[i]).abs()));
    diff / scale
}

pub fn end_to_end(cfg: &EndToEndConfig) -> Result<EndToEndReport> {
    let sim_cfg = cfg.effective_sim()?;
    let sim = Simulation::new(sim_cfg)?;
    let g = &sim.grid;
    let reach = sim.cfg.margin + stencil_radius(7, cfg.jet_accuracy);
    let mut nodes = Vec::with_capacity(cfg.probes.len());
    for &p in &cfg.probes {
        let at = g
            .locate(p)
            .ok_or_else(|| Error::InvalidConfig(format!("probe {p:?} is not a grid node")))?;
        if g.boundary_distance(at) < reach {
            return Err(Error::BoundaryTooClose {
                index: at,
                needed: reach,
            });
        }
        nodes.push(at);
    }
    let mut centre = sim.initial_state()?;
    let n_at = (cfg.at / sim.cfg.dt).round() as usize;
    if n_at > 0 {
        centre = sim.evolve(centre, n_at)?.final_state;
    }
    let states = sim.snapshot_stack(&centre, cfg.stride)?;
    let spacing = cfg.stride as f64 * sim.cfg.dt;
    let stack = SnapshotStack {
        sim: &sim,
        states: &states,
        spacing,
    };
    let mut probes = Vec::with_capacity(nodes.len());
    for (&p, &at) in cfg.probes.iter().zip(&nodes) {
        let b = stack.hyperplane_jet(at, 7, cfg.jet_accuracy)?;
        let out = fourth_derivative_b(&b, &sim.cfg.params, cfg.unit_tol)
            .map_err(|e| e.at([cfg.at, p[0], p[1], p[2]]))?;
        let fd = stack.fourth_time_derivative(at)?;
        let exact = if n_at == 0 {
            let t = sim.problem.exact_tower(p, 6)?;
            Some(std::array::from_fn(|mu| t[mu].partial(&[4, 0, 0, 0])))
        } else {
            None
        };
        probes.push(ProbeComparison {
            point: p,
            recovered: out.b4,
            finite_difference: fd,
            exact,
            rel_error: relative_error(&out.b4, &fd),
            unit_residual: out.recovery.solution.residual_unit,
            current_mismatch: out.current_mismatch,
        });
    }
    let max_rel_error = probes.iter().fold(0.0f64, |m, p| m.max(p.rel_error));
    Ok(EndToEndReport {
        cells: sim.cfg.cells,
        h: sim.cfg.h_min(),
        spacing,
        at: cfg.at,
        probes,
        max_rel_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> CauchyProblem {
        CauchyProblem::new(
            PhysParams::new(1.0, 1.0).unwrap(),
            &default_modes(),
            InitialChoices::sample(),
            -2.0,
        )
        .unwrap()
    }

    #[test]
    fn vacuum_wave_has_no_current() {
        // B = (0, sin(x³ − t), 0, 0): □B = 0 and ∂·B = 0
        let c = coordinates([0.3, 0.1, -0.2, 0.4], 4);
        let ph = &c[3] - &c[0];
        let z = Jet::zero(4);
        let b = [z.clone(), ph.sin(), z.clone(), z];
        let j = extract_j_from_b(&b, &PhysParams::new(1.0, 1.0).unwrap()).unwrap();
        for c in &j {
            assert!(c.max_abs() < 1e-12);
        }
    }

    #[test]
    fn zero_charge_rejected() {
        let b = jet::zero4(3);
        assert_eq!(
            extract_j_from_b(&b, &PhysParams::new(1.0, 0.0).unwrap()),
            Err(Error::ZeroCharge)
        );
    }

    #[test]
    fn exact_tower_satisfies_field_equations() {
        let p = problem();
        let x = [0.1, -0.2, 0.15];
        let b = p.exact_tower(x, 6).unwrap();
        let j = extract_j_from_b(&b, &p.params).unwrap();
        let truth = p.current(&coordinates([0.0, x[0], x[1], x[2]], 4));
        for mu in 0..4 {
            let diff = (&j[mu] - &truth[mu]).max_abs();
            assert!(diff < 1e-10, "mu = {mu}: {diff}");
        }
    }

    #[test]
    fn initial_ddot_b3_integrates_constraint() {
        let p = problem();
        let x = [0.2, 0.1, -0.3];
        let jet = p.bdot3_jet(x, 2).unwrap();
        assert!((jet.value() - p.bdot3_value(x)).abs() < 1e-12);
        let f = p.constraint_source(x, 1).unwrap();
        assert!((jet.coeff(&[0, 0, 0, 1]) - f.value()).abs() < 1e-12);
        // ∂₁ of the quadrature agrees with a central difference
        let h = 1e-4;
        let fd = (p.bdot3_value([x[0] + h, x[1], x[2]]) - p.bdot3_value([x[0] - h, x[1], x[2]]))
            / (2.0 * h);
        assert!((jet.coeff(&[0, 1, 0, 0]) - fd).abs() < 1e-7);
    }

    #[test]
    fn fourth_derivative_matches_exact_tower() {
        let p = problem();
        let x = [0.1, -0.2, 0.15];
        let b = p.exact_tower(x, 8).unwrap();
        let out = fourth_derivative_b(&b, &p.params, 1e-6).unwrap();
        for mu in 0..4 {
            let want = b[mu].partial(&[4, 0, 0, 0]);
            let err = (out.b4[mu] - want).abs();
            assert!(
                err < 1e-8 * (1.0 + want.abs()),
                "mu = {mu}: {} vs {want}",
                out.b4[mu]
            );
        }
    }
}
