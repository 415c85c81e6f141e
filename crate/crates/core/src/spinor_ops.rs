//! Pointwise spinor constructions: currents, the phase decomposition
//! Ψ = e^{iθ}Φ, reconstruction of a Majorana spinor from its (null) current,
//! chiral rotations, the ghost field D, and the gauge shift A → B.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    apply_real, bilinear, gamma5, gamma_mu, quad, real_forms, DiracSpinor, MajoranaSpinor, METRIC,
};
use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::jet::{self, Jet, Jet4};

/// Default relative tolerance for approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Threshold on (J⁰ + J²)/J⁰ below which the reconstruction switches axes.
pub const DEGENERATE_AXIS_EPS: f64 = 1e-8;

/// Contravariant components (V⁰, V¹, V², V³).
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    /// Minkowski product a⁰b⁰ − Σ aᵏbᵏ.
    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|i| METRIC[i] * self.0[i] * other.0[i]).sum()
    }

    /// Covariant components.
    pub fn lower(&self) -> FourVector {
        FourVector(std::array::from_fn(|i| METRIC[i] * self.0[i]))
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector(self.0.map(|x| x * s))
    }

    pub fn add(&self, o: &FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn sub(&self, o: &FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }

    /// Euclidean norm of the four components.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Mass and charge, natural units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub m: f64,
    pub e: f64,
}

impl PhysParams {
    /// Validated constructor: m ≥ 0 and both finite. A zero charge is
    /// accepted (it decouples matter from the potential); operations that
    /// divide by e reject it.
    pub fn new(m: f64, e: f64) -> Result<Self> {
        if !m.is_finite() || !e.is_finite() || m < 0.0 {
            return Err(Error::InvalidParams(format!("m = {m}, e = {e}")));
        }
        Ok(PhysParams { m, e })
    }

    pub fn require_charge(&self) -> Result<f64> {
        if self.e == 0.0 {
            Err(Error::ZeroCharge)
        } else {
            Ok(self.e)
        }
    }
}

/// Ψ = e^{iθ}Φ with Φ real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDecomposition {
    pub theta: f64,
    pub phi_spinor: MajoranaSpinor,
}

impl PhaseDecomposition {
    pub fn recompose(&self) -> DiracSpinor {
        self.phi_spinor
            .to_dirac()
            .scale(Complex64::from_polar(1.0, self.theta))
    }

    /// The equivalent representative (θ + π, −Φ).
    pub fn alternate(&self) -> PhaseDecomposition {
        PhaseDecomposition {
            theta: self.theta + PI,
            phi_spinor: self.phi_spinor.scale(-1.0),
        }
    }
}

/// J^μ = Ψ̄γ^μΨ.
pub fn vector_current(s: &DiracSpinor) -> FourVector {
    FourVector(std::array::from_fn(|mu| bilinear(s, &gamma_mu(mu), s).re))
}

/// J^μ for a real spinor, using the real quadratic forms.
pub fn majorana_current(s: &MajoranaSpinor) -> FourVector {
    let f = real_forms();
    FourVector(std::array::from_fn(|mu| quad(&f.current[mu], &s.0)))
}

/// j_a^μ = Ψ̄γ⁵γ^μΨ.
pub fn axial_current(s: &DiracSpinor) -> FourVector {
    let g5 = gamma5();
    FourVector(std::array::from_fn(|mu| {
        bilinear(s, &(g5 * gamma_mu(mu)), s).re
    }))
}

/// Splits Ψ with vanishing axial current into e^{iθ}Φ, Φ real.
///
/// The axial constraint makes Ψ₁Ψ₂* and Ψ₄Ψ₃* real, so each pair shares a
/// phase (θ for the first, β for the second); the remaining two components
/// force sin(θ − β) = 0 whenever both pairs are nonzero. θ is read from the
/// larger-modulus component of the first pair (or of the second pair when
/// the first vanishes); β ∈ {θ, θ + π} is absorbed into the signs of Φ₃, Φ₄.
/// The result is canonicalised to θ ∈ [0, π).
pub fn decompose_phase(s: &DiracSpinor, tol: f64) -> Result<PhaseDecomposition> {
    let norm = s.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroSpinor);
    }
    let ja = axial_current(s);
    if ja.max_abs() > tol * norm * norm {
        return Err(Error::AxialCurrentNonzero {
            magnitude: ja.max_abs(),
        });
    }
    let c = &s.0;
    let first = c[0].norm_sqr() + c[1].norm_sqr();
    let second = c[2].norm_sqr() + c[3].norm_sqr();
    let pivot = if first >= second * 1e-24 && first > 0.0 {
        if c[0].norm() >= c[1].norm() {
            c[0]
        } else {
            c[1]
        }
    } else if c[2].norm() >= c[3].norm() {
        c[2]
    } else {
        c[3]
    };
    let mut theta = pivot.arg().rem_euclid(PI);
    if theta >= PI {
        theta = 0.0;
    }
    let rot = Complex64::from_polar(1.0, -theta);
    let mut phi = [0.0; 4];
    let mut imag = 0.0f64;
    for i in 0..4 {
        let z = c[i] * rot;
        phi[i] = z.re;
        imag = imag.max(z.im.abs());
    }
    if imag > tol.sqrt() * norm {
        // the axial check passed but the components are not co-phased
        return Err(Error::AxialCurrentNonzero { magnitude: imag });
    }
    Ok(PhaseDecomposition {
        theta,
        phi_spinor: MajoranaSpinor(phi),
    })
}

/// Spinor rotation used when J⁰ + J² vanishes: a quarter turn about the x¹
/// axis, with `current(S χ) = R current(χ)` for the spatial rotation `R`.
struct AxisSwap {
    spinor: Matrix4<f64>,
    rotation: Matrix3<f64>,
}

fn axis_swap() -> &'static AxisSwap {
    static SWAP: OnceLock<AxisSwap> = OnceLock::new();
    SWAP.get_or_init(|| {
        let n = (gamma_mu(2) * gamma_mu(3)).to_real();
        let a = PI / 4.0;
        let spinor = Matrix4::identity() * a.cos() + n * a.sin();
        let f = real_forms();
        let rotation = Matrix3::from_fn(|k, l| {
            let m = spinor.transpose() * f.alpha[k + 1] * spinor * f.alpha[l + 1];
            m.trace() / 4.0
        });
        AxisSwap { spinor, rotation }
    })
}

fn canonical_from_current(j: &[f64; 4]) -> [f64; 4] {
    let s = j[0] + j[2];
    let n = (2.0 * s).sqrt();
    [0.0, s / n, -j[1] / n, j[3] / n]
}

/// ψ = (0, J⁰+J², −J¹, J³)/√(2(J⁰+J²)), a Majorana spinor carrying current J.
///
/// On the ray J ∝ (1, 0, −1, 0) the formula is singular; there the current is
/// rotated a quarter turn about x¹, reconstructed, and rotated back.
pub fn reconstruct_from_current(j: &FourVector, tol: f64) -> Result<MajoranaSpinor> {
    let j0 = j.0[0];
    if !(j0 > 0.0) {
        return Err(Error::NonpositiveDensity(j0));
    }
    let jj = j.dot(j);
    if jj.abs() > tol * j0 * j0 {
        return Err(Error::NotNull { residual: jj });
    }
    if j0 + j.0[2] >= DEGENERATE_AXIS_EPS * j0 {
        return Ok(MajoranaSpinor(canonical_from_current(&j.0)));
    }
    let swap = axis_swap();
    let js = nalgebra::Vector3::new(j.0[1], j.0[2], j.0[3]);
    let jr = swap.rotation.transpose() * js;
    let rotated = [j0, jr[0], jr[1], jr[2]];
    if rotated[0] + rotated[2] < DEGENERATE_AXIS_EPS * j0 {
        return Err(Error::DegenerateAxis);
    }
    let chi = canonical_from_current(&rotated);
    Ok(MajoranaSpinor(apply_real(&swap.spinor, &chi)))
}

/// Jet version of [`reconstruct_from_current`]; the fallback branch is chosen
/// from the value at the expansion point.
pub fn reconstruct_jet(j: &Jet4) -> Result<Jet4> {
    let j0 = j[0].value();
    if !(j0 > 0.0) {
        return Err(Error::NonpositiveDensity(j0));
    }
    let build = |j: &Jet4| -> Jet4 {
        let s = &j[0] + &j[2];
        let inv = (&s * 2.0).sqrt().recip();
        [
            Jet::zero(s.order()),
            &s * &inv,
            -(&j[1] * &inv),
            &j[3] * &inv,
        ]
    };
    if j0 + j[2].value() >= DEGENERATE_AXIS_EPS * j0 {
        return Ok(build(j));
    }
    let swap = axis_swap();
    let rt = swap.rotation.transpose();
    let rotated: Jet4 = [
        j[0].clone(),
        &(&j[1].scale(rt[(0, 0)]) + &j[2].scale(rt[(0, 1)])) + &j[3].scale(rt[(0, 2)]),
        &(&j[1].scale(rt[(1, 0)]) + &j[2].scale(rt[(1, 1)])) + &j[3].scale(rt[(1, 2)]),
        &(&j[1].scale(rt[(2, 0)]) + &j[2].scale(rt[(2, 1)])) + &j[3].scale(rt[(2, 2)]),
    ];
    if rotated[0].value() + rotated[2].value() < DEGENERATE_AXIS_EPS * j0 {
        return Err(Error::DegenerateAxis);
    }
    Ok(jet::apply_matrix(&swap.spinor, &build(&rotated)))
}

/// exp(iγ⁵φ)s; stays real because iγ⁵ is real here.
pub fn apply_chiral_rotation(s: &MajoranaSpinor, phi: f64) -> MajoranaSpinor {
    let k = apply_real(&real_forms().chiral, &s.0);
    let (sn, cs) = phi.sin_cos();
    MajoranaSpinor(std::array::from_fn(|i| cs * s.0[i] + sn * k[i]))
}

/// Jet version: exp(iγ⁵φ)ψ for jet-valued ψ and φ.
pub fn chiral_rotation_jet(psi: &Jet4, phi: &Jet) -> Jet4 {
    let k = jet::apply_matrix(&real_forms().chiral, psi);
    let (sn, cs) = (phi.sin(), phi.cos());
    std::array::from_fn(|i| &(&cs * &psi[i]) + &(&sn * &k[i]))
}

/// The φ ∈ [0, π) with exp(iγ⁵φ)·reference = ±target.
///
/// With ξ¹ = Φ₁ + iΦ₂ and ξ² = Φ₃ + iΦ₄ the rotation acts as
/// ξ¹ → ξ¹e^{−iφ}, ξ² → ξ²e^{iφ}; both pairs are combined for stability.
pub fn chiral_phase_between(
    target: &MajoranaSpinor,
    reference: &MajoranaSpinor,
    tol: f64,
) -> Result<f64> {
    let (nt, nr) = (target.norm_sqr(), reference.norm_sqr());
    if nt == 0.0 || nr == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let jt = majorana_current(target);
    let jr = majorana_current(reference);
    let mismatch = jt.sub(&jr).max_abs();
    if mismatch > tol * jt.0[0].max(jr.0[0]) {
        return Err(Error::CurrentMismatch { mismatch });
    }
    let xi = |s: &MajoranaSpinor| {
        (
            Complex64::new(s.0[0], s.0[1]),
            Complex64::new(s.0[2], s.0[3]),
        )
    };
    let (t1, t2) = xi(target);
    let (r1, r2) = xi(reference);
    let z = t1 * r1.conj() + (t2 * r2.conj()).conj();
    let phi = (-z.arg()).rem_euclid(PI);
    Ok(if phi >= PI { 0.0 } else { phi })
}

/// D = −e[(B·V)U − (B·U)V]/(V·V) with V^μ = iΦ̄γ⁰γ^μΦ, U^μ = Φ̄γ⁰γ⁵γ^μΦ.
pub fn ghost_field(
    b: &FourVector,
    phi: &MajoranaSpinor,
    params: &PhysParams,
    tol: f64,
) -> Result<FourVector> {
    let f = real_forms();
    let v = FourVector(std::array::from_fn(|mu| quad(&f.frame_v[mu], &phi.0)));
    let u = FourVector(std::array::from_fn(|mu| quad(&f.frame_u[mu], &phi.0)));
    let vv = v.dot(&v);
    let n2 = phi.norm_sqr();
    if n2 == 0.0 || vv.abs() <= 1e-300 {
        return Err(Error::ZeroSpinor);
    }
    let j = majorana_current(phi);
    let jb = j.dot(b);
    if jb.abs() > tol * j.norm() * b.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::ConstraintViolated { residual: jb });
    }
    let (bv, bu) = (b.dot(&v), b.dot(&u));
    Ok(u.scale(bv).sub(&v.scale(bu)).scale(-params.e / vv))
}

/// (−eB̂ + iγ⁵D̂)Φ with X̂ = X_μγ^μ; vanishes when D is the ghost field.
pub fn ghost_residual(
    b: &FourVector,
    d: &FourVector,
    phi: &MajoranaSpinor,
    params: &PhysParams,
) -> DiracSpinor {
    let slash = |x: &FourVector| {
        let xl = x.lower();
        let mut m = Matrix4::<Complex64>::zeros();
        for mu in 0..4 {
            m += gamma_mu(mu).to_complex() * Complex64::new(xl.0[mu], 0.0);
        }
        m
    };
    let i5 = gamma5().to_complex() * Complex64::new(0.0, 1.0);
    let op = slash(b) * Complex64::new(-params.e, 0.0) + i5 * slash(d);
    phi.to_dirac().apply(&op)
}

/// B with e B_μ = e A_μ + θ_{,μ}, i.e. B^μ = A^μ + g^{μμ} ∂_μθ / e.
pub struct GaugeShift<A, T> {
    pub a: A,
    pub theta: T,
    pub e: f64,
}

impl<A: VectorField, T: crate::fields::ScalarField> VectorField for GaugeShift<A, T> {
    fn eval(&self, x: &Jet4) -> Jet4 {
        let a = self.a.eval(x);
        // coordinate jets are linear, so padding keeps them exact and the
        // gradient of θ keeps the order of A
        let order = jet::min_order4(x);
        let theta = if order < jet::MAX_ORDER {
            let padded: Jet4 = std::array::from_fn(|mu| x[mu].pad(order + 1));
            self.theta.eval(&padded)
        } else {
            self.theta.eval(x)
        };
        std::array::from_fn(|mu| &a[mu] + &theta.derivative(mu).scale(METRIC[mu] / self.e))
    }
}

pub fn gauge_shift<A: VectorField, T: crate::fields::ScalarField>(
    a: A,
    theta: T,
    params: &PhysParams,
) -> Result<GaugeShift<A, T>> {
    let e = params.require_charge()?;
    Ok(GaugeShift { a, theta, e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FnScalar, FnVector};
    use crate::jet::coordinates;
    use approx::assert_relative_eq;

    #[test]
    fn current_of_basis_spinor() {
        let j = vector_current(&DiracSpinor::from_real([0.0, 1.0, 0.0, 0.0]));
        for (a, b) in j.0.iter().zip([1.0, 0.0, 1.0, 0.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_eq!(vector_current(&DiracSpinor::zero()), FourVector::ZERO);
    }

    #[test]
    fn axial_current_component_example() {
        let s = DiracSpinor([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert_relative_eq!(axial_current(&s).0[0], -2.0, epsilon = 1e-15);
    }

    #[test]
    fn decompose_examples() {
        let psi = MajoranaSpinor([1.0, 2.0, 0.0, 1.0])
            .to_dirac()
            .scale(Complex64::from_polar(1.0, PI / 4.0));
        let d = decompose_phase(&psi, 1e-10).unwrap();
        assert_relative_eq!(d.theta, PI / 4.0, epsilon = 1e-14);
        assert!(d.phi_spinor.dist(&MajoranaSpinor([1.0, 2.0, 0.0, 1.0])) < 1e-14);

        let d = decompose_phase(&DiracSpinor::from_real([3.0, 0.0, 0.0, 0.0]), 1e-10).unwrap();
        assert_eq!(d.theta, 0.0);
        assert_eq!(d.phi_spinor, MajoranaSpinor([3.0, 0.0, 0.0, 0.0]));

        // second pair only
        let psi =
            DiracSpinor::from_real([0.0, 0.0, -1.0, 2.0]).scale(Complex64::from_polar(1.0, 2.0));
        let d = decompose_phase(&psi, 1e-10).unwrap();
        assert!((0.0..PI).contains(&d.theta));
        assert!(d.recompose().sub(&psi).norm() < 1e-13);
    }

    #[test]
    fn decompose_errors() {
        assert_eq!(
            decompose_phase(&DiracSpinor::zero(), 1e-10),
            Err(Error::ZeroSpinor)
        );
        let s = DiracSpinor([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(matches!(
            decompose_phase(&s, 1e-10),
            Err(Error::AxialCurrentNonzero { .. })
        ));
    }

    #[test]
    fn reconstruct_examples() {
        let psi = reconstruct_from_current(&FourVector::new(1.0, 0.0, 1.0, 0.0), 1e-12).unwrap();
        assert!(psi.dist(&MajoranaSpinor([0.0, 1.0, 0.0, 0.0])) < 1e-15);
        let psi = reconstruct_from_current(&FourVector::new(2.0, 0.0, 2.0, 0.0), 1e-12).unwrap();
        assert!(psi.dist(&MajoranaSpinor([0.0, 2f64.sqrt(), 0.0, 0.0])) < 1e-15);
        assert_relative_eq!(psi.norm_sqr(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstruct_degenerate_ray() {
        for scale in [1.0, 0.01, 250.0] {
            let j = FourVector::new(1.0, 0.0, -1.0, 0.0).scale(scale);
            let psi = reconstruct_from_current(&j, 1e-12).unwrap();
            let back = majorana_current(&psi);
            assert!(back.sub(&j).max_abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn reconstruct_errors() {
        assert!(matches!(
            reconstruct_from_current(&FourVector::new(0.0, 0.0, 0.0, 0.0), 1e-10),
            Err(Error::NonpositiveDensity(_))
        ));
        assert!(matches!(
            reconstruct_from_current(&FourVector::new(1.0, 0.0, 0.0, 0.0), 1e-10),
            Err(Error::NotNull { .. })
        ));
    }

    #[test]
    fn chiral_phase_examples() {
        let psi = MajoranaSpinor([0.0, 1.0, 0.0, 0.0]);
        assert_eq!(chiral_phase_between(&psi, &psi, 1e-12).unwrap(), 0.0);
        let target = MajoranaSpinor([1.0, 0.0, 0.0, 0.0]);
        let phi = chiral_phase_between(&target, &psi, 1e-12).unwrap();
        assert_relative_eq!(phi, PI / 2.0, epsilon = 1e-14);
        assert!(apply_chiral_rotation(&psi, phi).dist(&target) < 1e-14);
        assert!(matches!(
            chiral_phase_between(&MajoranaSpinor([0.0, 0.0, 1.0, 0.0]), &psi, 1e-12),
            Err(Error::CurrentMismatch { .. })
        ));
    }

    #[test]
    fn chiral_rotation_special_angles() {
        let s = MajoranaSpinor([0.3, -1.0, 2.0, 0.5]);
        assert_eq!(apply_chiral_rotation(&s, 0.0), s);
        assert!(apply_chiral_rotation(&s, PI).dist(&s.scale(-1.0)) < 1e-15);
    }

    #[test]
    fn ghost_field_zero_potential() {
        let params = PhysParams::new(1.0, 0.7).unwrap();
        let phi = MajoranaSpinor([0.3, -1.0, 2.0, 0.5]);
        let d = ghost_field(&FourVector::ZERO, &phi, &params, 1e-10).unwrap();
        assert_eq!(d.max_abs(), 0.0);
        assert_eq!(
            ghost_field(
                &FourVector::new(1.0, 0.0, 0.0, 0.0),
                &MajoranaSpinor([0.0; 4]),
                &params,
                1e-10
            ),
            Err(Error::ZeroSpinor)
        );
    }

    #[test]
    fn gauge_shift_examples() {
        let params = PhysParams::new(1.0, 0.5).unwrap();
        let zero = FnVector(|x: &Jet4| std::array::from_fn(|_| Jet::zero(x[0].order())));
        let theta = FnScalar(|x: &Jet4| x[1].scale(0.5));
        let b = gauge_shift(zero, theta, &params).unwrap();
        let at = coordinates([0.1, -0.4, 2.0, 0.3], 1);
        let bj = b.eval(&at);
        let lowered = FourVector(std::array::from_fn(|mu| bj[mu].value())).lower();
        assert_eq!(lowered.0, [0.0, 1.0, 0.0, 0.0]);

        let constant = FnScalar(|x: &Jet4| Jet::constant(3.0, x[0].order()));
        let a = FnVector(|x: &Jet4| [x[2].clone(), x[0].clone(), x[3].square(), x[1].sin()]);
        let b = gauge_shift(&a, constant, &params).unwrap();
        let (bv, av) = (b.eval(&at), a.eval(&at));
        for mu in 0..4 {
            assert_eq!(bv[mu], av[mu]);
        }

        let no_charge = PhysParams::new(1.0, 0.0).unwrap();
        assert!(gauge_shift(&a, FnScalar(|x: &Jet4| x[0].clone()), &no_charge).is_err());
    }
}
