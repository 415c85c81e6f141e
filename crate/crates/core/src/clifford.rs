//! Gamma matrices in the Majorana representation and spinor bilinears.
//!
//! The matrices are those of Itzykson and Zuber (all γ^μ purely imaginary,
//! charge conjugation equal to complex conjugation). Writing `γ^μ = i·G^μ`
//! with `G^μ` an integer matrix:
//!
//! | matrix | `G` (rows)                                     |
//! |--------|------------------------------------------------|
//! | γ⁰     | (0,0,0,−1) (0,0,1,0) (0,−1,0,0) (1,0,0,0)       |
//! | γ¹     | (1,0,0,0) (0,−1,0,0) (0,0,1,0) (0,0,0,−1)       |
//! | γ²     | (0,0,0,1) (0,0,−1,0) (0,−1,0,0) (1,0,0,0)       |
//! | γ³     | (0,−1,0,0) (−1,0,0,0) (0,0,0,−1) (0,0,−1,0)     |
//! | γ⁵     | (0,−1,0,0) (1,0,0,0) (0,0,0,1) (0,0,−1,0)       |
//!
//! with `γ⁵ = iγ⁰γ¹γ²γ³`. In this basis the axial current reads
//! `j_a⁰ = 2 Im(Ψ₁Ψ₂* + Ψ₄Ψ₃*)`, `j_a¹ = 2 Im(Ψ₃Ψ₁* + Ψ₂Ψ₄*)`,
//! `j_a² = 2 Im(Ψ₁Ψ₂* + Ψ₃Ψ₄*)`, `j_a³ = 2 Im(Ψ₁Ψ₄* + Ψ₂Ψ₃*)`.
//!
//! Those four formulas do not pin the representation completely: replacing
//! the upper-right block `M = -iσ₂` of `G⁰` by any rotation `[[a, b], [−b, a]]`
//! (and `γᵏ = γ⁰αᵏ` with the same `αᵏ = γ⁰γᵏ`) reproduces them as well. The
//! family differs by a constant chiral rotation of the basis, which shifts the
//! chiral phase φ by a constant; the choice above is frozen as canonical.

use std::ops::{Mul, Neg};
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};

type GaussInt = Complex<i64>;

const G0: [[i64; 4]; 4] = [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]];
const G1: [[i64; 4]; 4] = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]];
const G2: [[i64; 4]; 4] = [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]];
const G3: [[i64; 4]; 4] = [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]];

/// Minkowski metric diag(+1, −1, −1, −1).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// A 4×4 matrix with Gaussian-integer entries (products of gamma matrices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaMatrix(pub Matrix4<GaussInt>);

impl GammaMatrix {
    pub fn identity() -> Self {
        GammaMatrix(Matrix4::from_fn(|i, j| {
            if i == j {
                Complex::new(1, 0)
            } else {
                Complex::new(0, 0)
            }
        }))
    }

    pub fn zero() -> Self {
        GammaMatrix(Matrix4::from_element(Complex::new(0, 0)))
    }

    fn imaginary(g: [[i64; 4]; 4]) -> Self {
        GammaMatrix(Matrix4::from_fn(|i, j| Complex::new(0, g[i][j])))
    }

    pub fn scale(&self, c: GaussInt) -> Self {
        GammaMatrix(self.0.map(|z| z * c))
    }

    pub fn anticommutator(&self, other: &GammaMatrix) -> GammaMatrix {
        GammaMatrix(self.0 * other.0 + other.0 * self.0)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> GammaMatrix {
        GammaMatrix(self.0.transpose().map(|z| z.conj()))
    }

    pub fn real_part(&self) -> Matrix4<i64> {
        self.0.map(|z| z.re)
    }

    pub fn imag_part(&self) -> Matrix4<i64> {
        self.0.map(|z| z.im)
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.0.iter().all(|z| z.re == 0)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0)
    }

    pub fn to_complex(&self) -> Matrix4<Complex64> {
        self.0.map(|z| Complex64::new(z.re as f64, z.im as f64))
    }

    /// Real part as a float matrix; panics in debug builds if the matrix is not real.
    pub fn to_real(&self) -> Matrix4<f64> {
        debug_assert!(self.is_real());
        self.0.map(|z| z.re as f64)
    }
}

impl Mul for GammaMatrix {
    type Output = GammaMatrix;
    fn mul(self, rhs: GammaMatrix) -> GammaMatrix {
        GammaMatrix(self.0 * rhs.0)
    }
}

impl Neg for GammaMatrix {
    type Output = GammaMatrix;
    fn neg(self) -> GammaMatrix {
        GammaMatrix(-self.0)
    }
}

struct GammaSet {
    mu: [GammaMatrix; 4],
    five: GammaMatrix,
}

fn gamma_set() -> &'static GammaSet {
    static SET: OnceLock<GammaSet> = OnceLock::new();
    SET.get_or_init(|| {
        let mu = [
            GammaMatrix::imaginary(G0),
            GammaMatrix::imaginary(G1),
            GammaMatrix::imaginary(G2),
            GammaMatrix::imaginary(G3),
        ];
        let five = (mu[0] * mu[1] * mu[2] * mu[3]).scale(Complex::new(0, 1));
        GammaSet { mu, five }
    })
}

/// Returns γ^index for index 0..=3, or γ⁵ for index 5.
pub fn gamma(index: usize) -> Result<GammaMatrix> {
    match index {
        0..=3 => Ok(gamma_set().mu[index]),
        5 => Ok(gamma_set().five),
        i => Err(Error::InvalidGammaIndex(i)),
    }
}

/// γ^μ for μ in 0..4; panics on other indices.
pub fn gamma_mu(mu: usize) -> GammaMatrix {
    gamma_set().mu[mu]
}

pub fn gamma5() -> GammaMatrix {
    gamma_set().five
}

/// Four complex components Ψ₁..Ψ₄.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracSpinor(pub [Complex64; 4]);

impl DiracSpinor {
    pub fn zero() -> Self {
        DiracSpinor([Complex64::new(0.0, 0.0); 4])
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        DiracSpinor(c.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        DiracSpinor(self.0.map(|z| z * c))
    }

    pub fn apply(&self, m: &Matrix4<Complex64>) -> Self {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..4 {
                *o += m[(i, j)] * self.0[j];
            }
        }
        DiracSpinor(out)
    }

    pub fn sub(&self, other: &DiracSpinor) -> Self {
        DiracSpinor([0, 1, 2, 3].map(|i| self.0[i] - other.0[i]))
    }
}

/// Four real components: a Majorana spinor in this representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajoranaSpinor(pub [f64; 4]);

impl MajoranaSpinor {
    pub fn to_dirac(&self) -> DiracSpinor {
        DiracSpinor::from_real(self.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, other: &MajoranaSpinor) -> f64 {
        (0..4).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        MajoranaSpinor(self.0.map(|x| x * c))
    }

    pub fn dist(&self, other: &MajoranaSpinor) -> f64 {
        (0..4)
            .map(|i| (self.0[i] - other.0[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<MajoranaSpinor> for DiracSpinor {
    fn from(s: MajoranaSpinor) -> Self {
        s.to_dirac()
    }
}

/// Ψ̄ = Ψ†γ⁰ as a row of four complex numbers.
pub fn dirac_adjoint(s: &DiracSpinor) -> [Complex64; 4] {
    let g0 = gamma_mu(0).to_complex();
    let mut row = [Complex64::new(0.0, 0.0); 4];
    for (j, r) in row.iter_mut().enumerate() {
        for i in 0..4 {
            *r += s.0[i].conj() * g0[(i, j)];
        }
    }
    row
}

/// s̄ m t.
pub fn bilinear(s: &DiracSpinor, m: &GammaMatrix, t: &DiracSpinor) -> Complex64 {
    let row = dirac_adjoint(s);
    let mt = t.apply(&m.to_complex());
    (0..4).map(|i| row[i] * mt.0[i]).sum()
}

/// Charge conjugation, which is complex conjugation in this representation.
pub fn charge_conjugate(s: &DiracSpinor) -> DiracSpinor {
    DiracSpinor(s.0.map(|z| z.conj()))
}

/// Real matrices used by the field pipelines, derived once from the gamma set.
///
/// For a real spinor ψ every bilinear below is a real quadratic (or bilinear)
/// form; quadratic forms are stored symmetrised so that forms which vanish
/// identically on real spinors are exactly zero.
#[derive(Debug, Clone)]
pub struct RealForms {
    /// `J^μ = ψᵀ current[μ] ψ`: identity for μ = 0 and γ⁰γᵏ otherwise.
    pub current: [Matrix4<f64>; 4],
    /// `v^μ |ψ|² = ψᵀ frame_v[μ] ψ`, from `iψ̄γ⁰γ^μψ`.
    pub frame_v: [Matrix4<f64>; 4],
    /// `u^μ |ψ|² = ψᵀ frame_u[μ] ψ`, from `ψ̄γ⁰γ⁵γ^μψ`.
    pub frame_u: [Matrix4<f64>; 4],
    /// `q |ψ|² = Σ_μ ψᵀ scalar_q[μ] ∂_μψ` (not symmetrised).
    pub scalar_q: [Matrix4<f64>; 4],
    /// `r |ψ|² = Σ_μ ψᵀ scalar_r[μ] ∂_μψ` (not symmetrised).
    pub scalar_r: [Matrix4<f64>; 4],
    /// The real matrix iγ⁵; `exp(iγ⁵φ) = cos φ + sin φ · chiral`.
    pub chiral: Matrix4<f64>,
    /// Free Dirac flow `∂₀Φ = −Σ_k alpha[k] ∂_kΦ + m·mass Φ` (index 0 unused).
    pub alpha: [Matrix4<f64>; 4],
    pub mass: Matrix4<f64>,
}

fn sym(m: Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

pub fn real_forms() -> &'static RealForms {
    static FORMS: OnceLock<RealForms> = OnceLock::new();
    FORMS.get_or_init(|| {
        let g = |mu: usize| gamma_mu(mu);
        let g0 = g(0);
        let g5 = gamma5();
        let i = Complex::new(0, 1);
        let current = [0, 1, 2, 3].map(|mu| sym((g0 * g(mu)).to_real()));
        let frame_v = [0, 1, 2, 3].map(|mu| sym((g0 * g0 * g(mu)).scale(i).to_real()));
        let frame_u = [0, 1, 2, 3].map(|mu| sym((g0 * g0 * g5 * g(mu)).to_real()));
        let scalar_q = [0, 1, 2, 3].map(|mu| (g5 * g(mu)).to_real());
        let scalar_r = [0, 1, 2, 3].map(|mu| g(mu).scale(-i).to_real());
        let chiral = g5.scale(i).to_real();
        let alpha = [0, 1, 2, 3].map(|mu| (g0 * g(mu)).to_real());
        // −i m γ⁰ = m·Im(γ⁰)
        let mass = g0.imag_part().map(|x| x as f64);
        RealForms {
            current,
            frame_v,
            frame_u,
            scalar_q,
            scalar_r,
            chiral,
            alpha,
            mass,
        }
    })
}

/// ψᵀ M ψ for a real 4-vector.
pub fn quad(m: &Matrix4<f64>, s: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += s[i] * m[(i, j)] * s[j];
        }
    }
    acc
}

/// M s for a real 4-vector.
pub fn apply_real(m: &Matrix4<f64>, s: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..4 {
            *o += m[(i, j)] * s[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric_int(mu: usize) -> i64 {
        if mu == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn gamma_zero_squares_to_identity() {
        let g0 = gamma(0).unwrap();
        assert_eq!(g0 * g0, GammaMatrix::identity());
    }

    #[test]
    fn clifford_relations_exact() {
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = gamma_mu(mu).anticommutator(&gamma_mu(nu));
                let expected = if mu == nu {
                    GammaMatrix::identity().scale(Complex::new(2 * metric_int(mu), 0))
                } else {
                    GammaMatrix::zero()
                };
                assert_eq!(ac, expected, "mu={mu} nu={nu}");
            }
            assert_eq!(gamma5().anticommutator(&gamma_mu(mu)), GammaMatrix::zero());
        }
        assert_eq!(gamma5() * gamma5(), GammaMatrix::identity());
    }

    #[test]
    fn hermiticity_and_reality() {
        for mu in 0..4 {
            assert!(gamma_mu(mu).is_purely_imaginary());
        }
        assert_eq!(gamma_mu(0).adjoint(), gamma_mu(0));
        for k in 1..4 {
            assert_eq!(gamma_mu(k).adjoint(), -gamma_mu(k));
        }
        // iγ⁵ is real, so chiral rotations keep spinors real
        assert!(gamma5().scale(Complex::new(0, 1)).is_real());
    }

    #[test]
    fn invalid_index() {
        assert_eq!(gamma(4), Err(Error::InvalidGammaIndex(4)));
        assert!(gamma(5).is_ok());
    }

    #[test]
    fn adjoint_of_zero_is_zero() {
        let row = dirac_adjoint(&DiracSpinor::zero());
        assert!(row.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn gamma0_bilinear_is_norm() {
        let s = DiracSpinor([
            Complex64::new(0.3, -1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(-0.7, 0.1),
            Complex64::new(0.0, 1.5),
        ]);
        let b = bilinear(&s, &gamma_mu(0), &s);
        assert!((b.re - s.norm_sqr()).abs() < 1e-12);
        assert!(b.im.abs() < 1e-12);
        let phase = Complex64::from_polar(1.0, 0.77);
        let g = gamma5() * gamma_mu(2);
        let b1 = bilinear(&s, &g, &s);
        let b2 = bilinear(&s.scale(phase), &g, &s.scale(phase));
        assert!((b1 - b2).norm() < 1e-12);
    }

    #[test]
    fn charge_conjugation() {
        let phi = DiracSpinor::from_real([1.0, -2.0, 0.5, 3.0]);
        assert_eq!(charge_conjugate(&phi), phi);
        let iphi = phi.scale(Complex64::new(0.0, 1.0));
        assert_eq!(
            charge_conjugate(&iphi),
            phi.scale(Complex64::new(0.0, -1.0))
        );
    }

    #[test]
    fn real_forms_vanish_on_time_components() {
        let f = real_forms();
        assert_eq!(f.frame_v[0], Matrix4::zeros());
        assert_eq!(f.frame_u[0], Matrix4::zeros());
        assert_eq!(f.current[0], Matrix4::identity());
        assert_eq!(f.chiral * f.chiral, -Matrix4::identity());
    }
}
