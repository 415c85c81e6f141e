//! Recovery of the Majorana spinor Φ from jets of its current J.
//!
//! From J the canonical spinor ψ is built, then the frame v, u, the scalars
//! q, r, the commutator vector w, the scalar p and the vectors t, s. With
//! t = a₁v + a₂u + a₃w and s = b₁v + b₂u + b₃w, sin 2φ and cos 2φ solve a
//! 2×2 linear system and Φ = exp(iγ⁵φ)ψ, unique up to sign.
//!
//! Index conventions: `v[μ]` is the contravariant component, derivatives
//! are ∂/∂x^μ, and `X·∂f` means `Σ_ν X^ν ∂_ν f` with no metric factor.
//! The time components of v, u, w, t, s vanish identically, so only the
//! time-zero slice of every quantity (plus one time derivative of ψ inside
//! q and r) is ever used.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{real_forms, MajoranaSpinor};
use crate::error::{Error, Result};
use crate::fields::SpinorField;
use crate::jet::{self, bilinear_form, directional, Jet, Jet4};
use crate::spinor_ops::{
    apply_chiral_rotation, chiral_rotation_jet, reconstruct_jet, FourVector, PhysParams,
};

/// Largest accepted condition number of the spatial [v u w] matrix.
pub const MAX_FRAME_CONDITION: f64 = 1e6;
/// The determinant floor is this factor times m².
pub const DET_FLOOR_FACTOR: f64 = 1e-8;
/// Unit-circle tolerance for analytic input.
pub const UNIT_TOL_ANALYTIC: f64 = 1e-6;
/// Unit-circle tolerance for lattice input.
pub const UNIT_TOL_LATTICE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameData {
    pub v: FourVector,
    pub u: FourVector,
    pub w: FourVector,
    pub t: FourVector,
    pub s: FourVector,
    pub q: f64,
    pub r: f64,
    pub p: f64,
}

/// t = a₁v + a₂u + a₃w, s = b₁v + b₂u + b₃w.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameExpansion {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub cond: f64,
}

/// The directional derivatives entering the phase system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivativeScalars {
    pub w_dq: f64,
    pub v_dp: f64,
    pub w_dr: f64,
    pub u_dp: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSolution {
    pub sin2phi: f64,
    pub cos2phi: f64,
    pub residual_unit: f64,
    /// In [0, π).
    pub phi: f64,
    pub det: f64,
}

fn density(psi: &Jet4) -> Jet {
    let mut n = psi[0].square();
    for c in &psi[1..] {
        n += &c.square();
    }
    n
}

fn inverse_density(psi: &Jet4) -> Result<Jet> {
    let n = density(psi);
    if !(n.value() > 0.0) {
        return Err(Error::VanishingDensity(n.value()));
    }
    Ok(n.recip())
}

/// v^μ = ψᵀ(iγ^μ)ψ/ψᵀψ and u^μ = ψᵀ(γ⁵γ^μ)ψ/ψᵀψ for a real spinor jet ψ.
pub fn frame_vectors(psi: &Jet4) -> Result<(Jet4, Jet4)> {
    let f = real_forms();
    let inv = inverse_density(psi)?;
    let v = std::array::from_fn(|mu| &bilinear_form(&f.frame_v[mu], psi, psi) * &inv);
    let u = std::array::from_fn(|mu| &bilinear_form(&f.frame_u[mu], psi, psi) * &inv);
    Ok((v, u))
}

/// q = Σ ψᵀγ⁵γ^μ∂_μψ/ψᵀψ and r = −i Σ ψᵀγ^μ∂_μψ/ψᵀψ, one order below ψ.
pub fn scalars_qr(psi: &Jet4) -> Result<(Jet, Jet)> {
    let order = jet::min_order4(psi);
    if order == 0 {
        return Err(Error::OrderExhausted { have: 0, need: 1 });
    }
    let f = real_forms();
    let inv = inverse_density(psi)?.truncate(order - 1);
    let base: Jet4 = std::array::from_fn(|i| psi[i].truncate(order - 1));
    let mut q = Jet::zero(order - 1);
    let mut r = Jet::zero(order - 1);
    for mu in 0..4 {
        let d: Jet4 = std::array::from_fn(|i| psi[i].derivative(mu));
        q += &bilinear_form(&f.scalar_q[mu], &base, &d);
        r += &bilinear_form(&f.scalar_r[mu], &base, &d);
    }
    Ok((&q * &inv, &r * &inv))
}

fn lie_bracket(x: &Jet4, y: &Jet4) -> Result<Jet4> {
    let mut out: Vec<Jet> = Vec::with_capacity(4);
    for mu in 0..4 {
        out.push(&directional(x, &y[mu])? - &directional(y, &x[mu])?);
    }
    Ok(out.try_into().expect("four components"))
}

/// w^μ = u·∂v^μ − v·∂u^μ + 2r u^μ + 2q v^μ.
pub fn vector_w(v: &Jet4, u: &Jet4, q: &Jet, r: &Jet) -> Result<Jet4> {
    let br = lie_bracket(u, v)?;
    Ok(std::array::from_fn(|mu| {
        &(&br[mu] + &(r * &u[mu]).scale(2.0)) + &(q * &v[mu]).scale(2.0)
    }))
}

/// p = u·∂q − v·∂r + 2r² + 2q² − 2m².
pub fn scalar_p(q: &Jet, r: &Jet, v: &Jet4, u: &Jet4, m: f64) -> Result<Jet> {
    let a = &directional(u, q)? - &directional(v, r)?;
    let quad = (&r.square() + &q.square())
        .scale(2.0)
        .add_scalar(-2.0 * m * m);
    Ok(&a + &quad)
}

/// t = [w, v] and s = [w, u] as vector-field commutators.
pub fn vectors_ts(w: &Jet4, v: &Jet4, u: &Jet4) -> Result<(Jet4, Jet4)> {
    Ok((lie_bracket(w, v)?, lie_bracket(w, u)?))
}

/// Solves for the coefficients of t and s in the spatial basis (v, u, w).
pub fn expand_in_frame(
    t: &FourVector,
    s: &FourVector,
    v: &FourVector,
    u: &FourVector,
    w: &FourVector,
) -> Result<FrameExpansion> {
    let m = Matrix3::from_columns(&[
        nalgebra::Vector3::from(v.spatial()),
        nalgebra::Vector3::from(u.spatial()),
        nalgebra::Vector3::from(w.spatial()),
    ]);
    let sv = m.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(cond <= MAX_FRAME_CONDITION) {
        return Err(Error::DegenerateFrame { cond });
    }
    let lu = m.lu();
    let solve = |rhs: [f64; 3]| -> Result<[f64; 3]> {
        let x = lu
            .solve(&nalgebra::Vector3::from(rhs))
            .ok_or(Error::DegenerateFrame { cond })?;
        Ok([x[0], x[1], x[2]])
    };
    Ok(FrameExpansion {
        a: solve(t.spatial())?,
        b: solve(s.spatial())?,
        cond,
    })
}

/// The 2×2 phase system
///
/// ```text
/// [ −m a₁        m a₂ + 2mp ] [sin2φ]   [ w·∂q − v·∂p − a₁q − a₂r − a₃p ]
/// [ −m b₁ + 2mp  m b₂       ] [cos2φ] = [ w·∂r − u·∂p − b₁q − b₂r − b₃p ]
/// ```
pub fn solve_phase(
    frame: &FrameData,
    exp: &FrameExpansion,
    ds: &DerivativeScalars,
    params: &PhysParams,
    unit_tol: f64,
) -> Result<PhaseSolution> {
    let m = params.m;
    let (a, b, p, q, r) = (exp.a, exp.b, frame.p, frame.q, frame.r);
    let m11 = -m * a[0];
    let m12 = m * a[1] + 2.0 * m * p;
    let m21 = -m * b[0] + 2.0 * m * p;
    let m22 = m * b[1];
    let det = m11 * m22 - m12 * m21;
    let floor = DET_FLOOR_FACTOR * m * m;
    if !(det.abs() > floor) {
        return Err(Error::VanishingDeterminant { det, floor });
    }
    let r1 = ds.w_dq - ds.v_dp - a[0] * q - a[1] * r - a[2] * p;
    let r2 = ds.w_dr - ds.u_dp - b[0] * q - b[1] * r - b[2] * p;
    let sin2phi = (r1 * m22 - m12 * r2) / det;
    let cos2phi = (m11 * r2 - m21 * r1) / det;
    let residual_unit = (sin2phi * sin2phi + cos2phi * cos2phi - 1.0).abs();
    if !(residual_unit <= unit_tol) {
        return Err(Error::UnitCircleViolation {
            residual: residual_unit,
        });
    }
    let phi = (0.5 * sin2phi.atan2(cos2phi)).rem_euclid(PI);
    Ok(PhaseSolution {
        sin2phi,
        cos2phi,
        residual_unit,
        phi: if phi >= PI { 0.0 } else { phi },
        det,
    })
}

/// Jets of every frame quantity at one point. Orders for a current jet of
/// order N: ψ, v, u: N; q, r, w: N − 1; p: N − 2.
#[derive(Clone, Debug)]
pub struct FrameFields {
    pub psi: Jet4,
    pub v: Jet4,
    pub u: Jet4,
    pub q: Jet,
    pub r: Jet,
    pub w: Jet4,
    pub p: Jet,
    pub m: f64,
}

fn assert_spatial(x: &Jet4, name: &str) {
    assert!(
        x[0].max_abs() == 0.0,
        "time component of {name} must vanish identically"
    );
}

impl FrameFields {
    /// Builds the frame from jets of the current (order ≥ 3; only
    /// coefficients of time order ≤ 1 are read).
    pub fn from_current(j: &Jet4, m: f64) -> Result<FrameFields> {
        FrameFields::from_canonical(reconstruct_jet(j)?, m)
    }

    /// Builds the frame from any real spinor jet; it is first replaced by
    /// the canonical spinor carrying the same current.
    pub fn from_spinor(psi: &Jet4, m: f64) -> Result<FrameFields> {
        let f = real_forms();
        let j: Jet4 = std::array::from_fn(|mu| bilinear_form(&f.current[mu], psi, psi));
        FrameFields::from_current(&j, m)
    }

    /// Builds the frame from the given spinor jet as is.
    pub fn from_canonical(psi: Jet4, m: f64) -> Result<FrameFields> {
        let order = jet::min_order4(&psi);
        if order < 3 {
            return Err(Error::OrderExhausted {
                have: order,
                need: 3,
            });
        }
        let (v, u) = frame_vectors(&psi)?;
        let (q, r) = scalars_qr(&psi)?;
        let w = vector_w(&v, &u, &q, &r)?;
        let p = scalar_p(&q, &r, &v, &u, m)?;
        assert_spatial(&v, "v");
        assert_spatial(&u, "u");
        assert_spatial(&w, "w");
        Ok(FrameFields {
            psi,
            v,
            u,
            q,
            r,
            w,
            p,
            m,
        })
    }

    pub fn frame_data(&self) -> Result<FrameData> {
        let (t, s) = vectors_ts(&self.w, &self.v, &self.u)?;
        assert_spatial(&t, "t");
        assert_spatial(&s, "s");
        let fv = |x: &Jet4| FourVector(jet::values4(x));
        Ok(FrameData {
            v: fv(&self.v),
            u: fv(&self.u),
            w: fv(&self.w),
            t: fv(&t),
            s: fv(&s),
            q: self.q.value(),
            r: self.r.value(),
            p: self.p.value(),
        })
    }

    pub fn derivative_scalars(&self) -> Result<DerivativeScalars> {
        Ok(DerivativeScalars {
            w_dq: directional(&self.w, &self.q)?.value(),
            v_dp: directional(&self.v, &self.p)?.value(),
            w_dr: directional(&self.w, &self.r)?.value(),
            u_dp: directional(&self.u, &self.p)?.value(),
        })
    }

    pub fn psi_value(&self) -> MajoranaSpinor {
        MajoranaSpinor(jet::values4(&self.psi))
    }

    /// Spatial jet of φ of the given order from its value at the point,
    /// integrating v·∂φ = q − m sin2φ, u·∂φ = r + m cos2φ, w·∂φ = p order by
    /// order. Needs q, r, w, p to order `order − 1`.
    pub fn lift_phase(&self, phi0: f64, order: usize) -> Result<Jet> {
        if order == 0 {
            return Ok(Jet::constant(phi0, 0));
        }
        let k1 = order - 1;
        let have = self.p.order().min(self.w[0].order());
        if have < k1 {
            return Err(Error::OrderExhausted {
                have: have + 1,
                need: order,
            });
        }
        let slice = |j: &Jet| j.truncate(k1).mask_time_orders(0);
        let rows: [[Jet; 3]; 3] = [
            std::array::from_fn(|k| slice(&self.v[k + 1])),
            std::array::from_fn(|k| slice(&self.u[k + 1])),
            std::array::from_fn(|k| slice(&self.w[k + 1])),
        ];
        let inv = inverse3(&rows)?;
        let (q, r, p) = (slice(&self.q), slice(&self.r), slice(&self.p));
        let m = self.m;
        let mut phi = Jet::constant(phi0, order);
        for _ in 0..order {
            let two = phi.truncate(k1).scale(2.0);
            let rhs = [
                &q - &two.sin().scale(m),
                &r + &two.cos().scale(m),
                p.clone(),
            ];
            let grad: [Jet; 3] = std::array::from_fn(|k| {
                let mut g = Jet::zero(k1);
                for (j, f) in rhs.iter().enumerate() {
                    g += &(&inv[k][j] * f);
                }
                g
            });
            let mut next = Jet::constant(phi0, order);
            for i in 1..jet::jet_size(order) {
                let a = jet::multi_index(i);
                if a[0] != 0 {
                    continue;
                }
                let k = (1..4).find(|&k| a[k] > 0).expect("nonconstant index");
                let mut b = a;
                b[k] -= 1;
                next.coeffs_mut()[i] = grad[k - 1].coeff(&b) / a[k] as f64;
            }
            phi = next;
        }
        Ok(phi)
    }
}

fn inverse3(m: &[[Jet; 3]; 3]) -> Result<[[Jet; 3]; 3]> {
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        &(&m[r0][c0] * &m[r1][c1]) - &(&m[r0][c1] * &m[r1][c0])
    };
    let c: [[Jet; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| cof(i, j)));
    let det = &(&(&m[0][0] * &c[0][0]) + &(&m[0][1] * &c[0][1])) + &(&m[0][2] * &c[0][2]);
    if det.value().abs() < 1e-14 {
        return Err(Error::DegenerateFrame {
            cond: f64::INFINITY,
        });
    }
    let inv_det = det.recip();
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| &c[j][i] * &inv_det)
    }))
}

/// Everything recovered at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecovery {
    pub frame: FrameData,
    pub expansion: FrameExpansion,
    pub scalars: DerivativeScalars,
    pub solution: PhaseSolution,
    pub psi: [f64; 4],
    /// exp(iγ⁵φ)ψ, before any sign fixing.
    pub majorana: [f64; 4],
}

/// The full per-point pipeline on a current jet of order ≥ 3.
pub fn recover_from_fields(
    fields: &FrameFields,
    params: &PhysParams,
    unit_tol: f64,
) -> Result<PointRecovery> {
    let frame = fields.frame_data()?;
    let expansion = expand_in_frame(&frame.t, &frame.s, &frame.v, &frame.u, &frame.w)?;
    let scalars = fields.derivative_scalars()?;
    let solution = solve_phase(&frame, &expansion, &scalars, params, unit_tol)?;
    let psi = fields.psi_value();
    Ok(PointRecovery {
        frame,
        expansion,
        scalars,
        solution,
        psi: psi.0,
        majorana: apply_chiral_rotation(&psi, solution.phi).0,
    })
}

pub fn recover_at(j: &Jet4, params: &PhysParams, unit_tol: f64) -> Result<PointRecovery> {
    let fields = FrameFields::from_current(j, params.m)?;
    recover_from_fields(&fields, params, unit_tol)
}

/// Spatial jet of the recovered Φ = exp(iγ⁵φ)ψ on the time slice through
/// the expansion point.
pub fn recovered_spinor_jet(fields: &FrameFields, phi: &Jet) -> Jet4 {
    let psi: Jet4 =
        std::array::from_fn(|i| fields.psi[i].truncate(phi.order()).mask_time_orders(0));
    chiral_rotation_jet(&psi, phi)
}

/// Anything that can produce jets of the current at a point.
pub trait CurrentSource: Sync {
    fn current_jet(&self, point: [f64; 4], order: usize) -> Result<Jet4>;
}

/// The current of an analytic real spinor field.
pub struct MatterCurrent<S>(pub S);

impl<S: SpinorField> CurrentSource for MatterCurrent<S> {
    fn current_jet(&self, point: [f64; 4], order: usize) -> Result<Jet4> {
        if order > jet::MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        Ok(current_of(&self.0.jet_at(point, order)))
    }
}

/// J^μ = Φ̄γ^μΦ for a real spinor jet.
pub fn current_of(phi: &Jet4) -> Jet4 {
    let f = real_forms();
    std::array::from_fn(|mu| bilinear_form(&f.current[mu], phi, phi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOptions {
    pub unit_tol: f64,
    /// Current jet order handed to the pipeline (≥ 3).
    pub order: usize,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            unit_tol: UNIT_TOL_ANALYTIC,
            order: 3,
        }
    }
}

/// Per-point entry of a recovery report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryEntry {
    pub point: [f64; 4],
    pub phi: Option<f64>,
    pub residual_unit: Option<f64>,
    pub det: Option<f64>,
    pub cond: Option<f64>,
    /// Φ after the sign sweep.
    pub majorana: Option<[f64; 4]>,
    pub sign: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub entries: Vec<RecoveryEntry>,
}

impl RecoveryReport {
    pub fn recovered(&self) -> usize {
        self.entries.iter().filter(|e| e.majorana.is_some()).count()
    }

    pub fn skipped(&self) -> usize {
        self.entries.len() - self.recovered()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn is_atypical(e: &Error) -> bool {
    matches!(
        e.root(),
        Error::DegenerateFrame { .. } | Error::VanishingDeterminant { .. }
    )
}

/// Recovers Φ at every probe point, skipping atypical points (dependent
/// frame or vanishing determinant) and fixing the overall sign: the first
/// recovered point gets its first nonzero component positive, every later
/// point is aligned with its nearest already-fixed neighbour.
pub fn recover_majorana(
    source: &dyn CurrentSource,
    points: &[[f64; 4]],
    params: &PhysParams,
    opts: &RecoveryOptions,
) -> Result<RecoveryReport> {
    let results: Vec<Result<PointRecovery>> = points
        .par_iter()
        .map(|&p| {
            source
                .current_jet(p, opts.order)
                .and_then(|j| recover_at(&j, params, opts.unit_tol))
        })
        .collect();
    let mut entries = Vec::with_capacity(points.len());
    let mut fixed: Vec<usize> = Vec::new();
    for (idx, (res, &point)) in results.into_iter().zip(points).enumerate() {
        let rec = match res {
            Ok(r) => r,
            Err(e) if is_atypical(&e) => {
                entries.push(RecoveryEntry {
                    point,
                    phi: None,
                    residual_unit: None,
                    det: None,
                    cond: None,
                    majorana: None,
                    sign: None,
                    error: Some(e.to_string()),
                });
                continue;
            }
            Err(e) => return Err(e.at(point)),
        };
        let phi = MajoranaSpinor(rec.majorana);
        let sign = match nearest(points, &fixed, point) {
            None => {
                let norm = phi.norm();
                let first = phi
                    .0
                    .iter()
                    .find(|c| c.abs() > 1e-14 * norm)
                    .copied()
                    .unwrap_or(1.0);
                first.signum()
            }
            Some(nb) => {
                let other =
                    MajoranaSpinor(entries[nb].majorana.expect("fixed entries are recovered"));
                let overlap = phi.dot(&other);
                if overlap.abs() <= 1e-12 * phi.norm() * other.norm() {
                    return Err(Error::SignAmbiguous { overlap }.at(point));
                }
                overlap.signum()
            }
        };
        entries.push(RecoveryEntry {
            point,
            phi: Some(rec.solution.phi),
            residual_unit: Some(rec.solution.residual_unit),
            det: Some(rec.solution.det),
            cond: Some(rec.expansion.cond),
            majorana: Some(phi.scale(sign).0),
            sign: Some(sign),
            error: None,
        });
        fixed.push(idx);
    }
    Ok(RecoveryReport { entries })
}

fn nearest(points: &[[f64; 4]], fixed: &[usize], p: [f64; 4]) -> Option<usize> {
    fixed
        .iter()
        .map(|&i| {
            let d: f64 = (0..4).map(|k| (points[i][k] - p[k]).powi(2)).sum();
            (i, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}
