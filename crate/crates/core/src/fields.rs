//! Smooth fields evaluated on coordinate jets, so that every field yields
//! its Taylor expansion to any order at any point. Includes free Majorana
//! plane waves and the Dirac time-derivative tower.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clifford::real_forms;
use crate::error::{Error, Result};
use crate::jet::{self, coordinates, Jet, Jet4};
use crate::spinor_ops::PhysParams;

pub trait ScalarField: Send + Sync {
    /// The field composed with the coordinate jets `x`.
    fn eval(&self, x: &Jet4) -> Jet;

    fn jet_at(&self, point: [f64; 4], order: usize) -> Jet {
        self.eval(&coordinates(point, order))
    }

    fn value_at(&self, point: [f64; 4]) -> f64 {
        self.jet_at(point, 0).value()
    }
}

pub trait VectorField: Send + Sync {
    fn eval(&self, x: &Jet4) -> Jet4;

    fn jet_at(&self, point: [f64; 4], order: usize) -> Jet4 {
        self.eval(&coordinates(point, order))
    }

    fn value_at(&self, point: [f64; 4]) -> [f64; 4] {
        jet::values4(&self.jet_at(point, 0))
    }
}

/// Real (Majorana) spinor fields.
pub trait SpinorField: Send + Sync {
    fn eval(&self, x: &Jet4) -> Jet4;

    fn jet_at(&self, point: [f64; 4], order: usize) -> Jet4 {
        self.eval(&coordinates(point, order))
    }

    fn value_at(&self, point: [f64; 4]) -> [f64; 4] {
        jet::values4(&self.jet_at(point, 0))
    }

    /// (Φ, ∂₀Φ) at a point.
    fn value_and_rate(&self, point: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        let j = self.jet_at(point, 1);
        (
            jet::values4(&j),
            std::array::from_fn(|i| j[i].coeff(&[1, 0, 0, 0])),
        )
    }
}

macro_rules! forward {
    ($tr:ident, $out:ty) => {
        impl<T: $tr + ?Sized> $tr for &T {
            fn eval(&self, x: &Jet4) -> $out {
                (**self).eval(x)
            }
        }
        impl<T: $tr + ?Sized> $tr for Box<T> {
            fn eval(&self, x: &Jet4) -> $out {
                (**self).eval(x)
            }
        }
        impl<T: $tr + ?Sized> $tr for Arc<T> {
            fn eval(&self, x: &Jet4) -> $out {
                (**self).eval(x)
            }
        }
    };
}

forward!(ScalarField, Jet);
forward!(VectorField, Jet4);

impl<T: SpinorField + ?Sized> SpinorField for &T {
    fn eval(&self, x: &Jet4) -> Jet4 {
        (**self).eval(x)
    }
    fn value_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        (**self).value_and_rate(p)
    }
}

impl<T: SpinorField + ?Sized> SpinorField for Box<T> {
    fn eval(&self, x: &Jet4) -> Jet4 {
        (**self).eval(x)
    }
    fn value_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        (**self).value_and_rate(p)
    }
}

impl<T: SpinorField + ?Sized> SpinorField for Arc<T> {
    fn eval(&self, x: &Jet4) -> Jet4 {
        (**self).eval(x)
    }
    fn value_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        (**self).value_and_rate(p)
    }
}

/// Closure-backed scalar field.
pub struct FnScalar<F>(pub F);
/// Closure-backed vector field.
pub struct FnVector<F>(pub F);
/// Closure-backed spinor field.
pub struct FnSpinor<F>(pub F);

impl<F: Fn(&Jet4) -> Jet + Send + Sync> ScalarField for FnScalar<F> {
    fn eval(&self, x: &Jet4) -> Jet {
        (self.0)(x)
    }
}

impl<F: Fn(&Jet4) -> Jet4 + Send + Sync> VectorField for FnVector<F> {
    fn eval(&self, x: &Jet4) -> Jet4 {
        (self.0)(x)
    }
}

impl<F: Fn(&Jet4) -> Jet4 + Send + Sync> SpinorField for FnSpinor<F> {
    fn eval(&self, x: &Jet4) -> Jet4 {
        (self.0)(x)
    }
}

/// `X^ν ∂_ν f` at a point, as a jet of the given order.
pub fn directional_derivative(
    f: &dyn ScalarField,
    x: &dyn VectorField,
    at: [f64; 4],
    order: usize,
) -> Result<Jet> {
    if order + 1 > jet::MAX_ORDER {
        return Err(Error::OrderTooHigh(order + 1));
    }
    let fj = f.jet_at(at, order + 1);
    let xj = x.jet_at(at, order);
    jet::directional(&xj, &fj)
}

/// Φ = c_re cos θ − c_im sin θ with θ = k·x − ωt: the real part of a
/// positive-energy solution c e^{iθ} of the free Dirac equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub k: [f64; 3],
    pub omega: f64,
    pub c_re: [f64; 4],
    pub c_im: [f64; 4],
}

/// Projects `seed` onto the positive-energy eigenspace of
/// H = α·k + i m Im(γ⁰) and returns the resulting real plane wave.
pub fn majorana_plane_wave(
    momentum: [f64; 3],
    seed: [f64; 4],
    params: &PhysParams,
) -> Result<PlaneWave> {
    let f = real_forms();
    let k2: f64 = momentum.iter().map(|k| k * k).sum();
    let omega = (k2 + params.m * params.m).sqrt();
    if !omega.is_finite() || omega == 0.0 {
        return Err(Error::InvalidParams(format!(
            "plane wave needs k ≠ 0 or m > 0 (k = {momentum:?}, m = {})",
            params.m
        )));
    }
    let mut ak = nalgebra::Matrix4::<f64>::zeros();
    for (i, k) in momentum.iter().enumerate() {
        ak += f.alpha[i + 1] * *k;
    }
    let s = nalgebra::Vector4::from(seed);
    let c_re = (s + ak * s / omega) * 0.5;
    let c_im = f.mass * s * (params.m / (2.0 * omega));
    let amp = (c_re.norm_squared() + c_im.norm_squared()).sqrt();
    if amp <= 1e-12 * s.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroAmplitude);
    }
    Ok(PlaneWave {
        k: momentum,
        omega,
        c_re: c_re.into(),
        c_im: c_im.into(),
    })
}

impl PlaneWave {
    fn phase(&self, p: [f64; 4]) -> f64 {
        self.k[0] * p[1] + self.k[1] * p[2] + self.k[2] * p[3] - self.omega * p[0]
    }
}

impl SpinorField for PlaneWave {
    fn eval(&self, x: &Jet4) -> Jet4 {
        let theta = &(&(&x[1].scale(self.k[0]) + &x[2].scale(self.k[1])) + &x[3].scale(self.k[2]))
            - &x[0].scale(self.omega);
        let (c, s) = (theta.cos(), theta.sin());
        std::array::from_fn(|i| &c.scale(self.c_re[i]) - &s.scale(self.c_im[i]))
    }

    fn value_at(&self, p: [f64; 4]) -> [f64; 4] {
        let (s, c) = self.phase(p).sin_cos();
        std::array::from_fn(|i| self.c_re[i] * c - self.c_im[i] * s)
    }

    fn value_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        let (s, c) = self.phase(p).sin_cos();
        (
            std::array::from_fn(|i| self.c_re[i] * c - self.c_im[i] * s),
            std::array::from_fn(|i| self.omega * (self.c_re[i] * s + self.c_im[i] * c)),
        )
    }
}

/// A finite sum of plane waves (still a free solution).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Superposition {
    pub waves: Vec<PlaneWave>,
}

impl Superposition {
    pub fn new(waves: Vec<PlaneWave>) -> Self {
        Superposition { waves }
    }
}

impl SpinorField for Superposition {
    fn eval(&self, x: &Jet4) -> Jet4 {
        let mut acc = jet::zero4(jet::min_order4(x));
        for w in &self.waves {
            let p = w.eval(x);
            for i in 0..4 {
                acc[i] += &p[i];
            }
        }
        acc
    }

    fn value_at(&self, p: [f64; 4]) -> [f64; 4] {
        self.value_and_rate(p).0
    }

    fn value_and_rate(&self, p: [f64; 4]) -> ([f64; 4], [f64; 4]) {
        let mut v = [0.0; 4];
        let mut r = [0.0; 4];
        for w in &self.waves {
            let (a, b) = w.value_and_rate(p);
            for i in 0..4 {
                v[i] += a[i];
                r[i] += b[i];
            }
        }
        (v, r)
    }
}

/// Completes a spatial jet of a free Dirac solution into a full spacetime
/// jet by solving ∂₀Φ = −Σ αᵏ∂ₖΦ + m Im(γ⁰) Φ order by order.
///
/// Only the time-independent coefficients of `spatial` are read. The result
/// has the order of `spatial` and is exact in all time orders up to `upto`;
/// coefficients with higher time order are zero.
pub fn dirac_time_derivatives(spatial: &Jet4, params: &PhysParams, upto: usize) -> Result<Jet4> {
    let order = jet::min_order4(spatial);
    if upto > order {
        return Err(Error::OrderExhausted {
            have: order,
            need: upto,
        });
    }
    let f = real_forms();
    let mut level: Jet4 = std::array::from_fn(|i| spatial[i].mask_time_orders(0));
    let mut out = jet::zero4(order);
    let mut fact = 1.0;
    for n in 0..=upto {
        if n > 0 {
            fact *= n as f64;
        }
        // level holds ∂₀ⁿΦ restricted to its time-0 slice, at order `order - n`
        for (comp, lv) in out.iter_mut().zip(&level) {
            for (i, &v) in lv.coeffs().iter().enumerate() {
                let a = jet::multi_index(i);
                if a[0] == 0 && v != 0.0 {
                    let mut b = a;
                    b[0] = n;
                    let idx = jet::index_of(&b);
                    if idx < comp.coeffs().len() {
                        comp.coeffs_mut()[idx] = v / fact;
                    }
                }
            }
        }
        if n == upto {
            break;
        }
        let lower = order - n - 1;
        let mut next: Jet4 = std::array::from_fn(|i| level[i].truncate(lower).scale(0.0));
        let mass = jet::apply_matrix(&f.mass, &level);
        for i in 0..4 {
            next[i] += &mass[i].truncate(lower).scale(params.m);
        }
        for k in 1..4 {
            let d: Jet4 = std::array::from_fn(|i| level[i].derivative(k));
            let ad = jet::apply_matrix(&f.alpha[k], &d);
            for i in 0..4 {
                next[i] += &ad[i].scale(-1.0);
            }
        }
        level = std::array::from_fn(|i| next[i].mask_time_orders(0));
    }
    Ok(out)
}

/// ∂₀Φ + Σ αᵏ∂ₖΦ − m Im(γ⁰)Φ, one order below the input.
pub fn dirac_residual(phi: &Jet4, params: &PhysParams) -> Result<Jet4> {
    let order = jet::min_order4(phi);
    if order == 0 {
        return Err(Error::OrderExhausted { have: 0, need: 1 });
    }
    let f = real_forms();
    let mut out: Jet4 = std::array::from_fn(|i| phi[i].derivative(0));
    for k in 1..4 {
        let d: Jet4 = std::array::from_fn(|i| phi[i].derivative(k));
        let ad = jet::apply_matrix(&f.alpha[k], &d);
        for i in 0..4 {
            out[i] += &ad[i];
        }
    }
    let mass = jet::apply_matrix(&f.mass, phi);
    for i in 0..4 {
        out[i] += &mass[i].truncate(order - 1).scale(-params.m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysParams {
        PhysParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn plane_wave_solves_dirac() {
        let w = majorana_plane_wave([0.3, -0.2, 0.5], [1.0, 0.2, -0.4, 0.7], &params()).unwrap();
        let r = dirac_residual(&w.jet_at([0.2, 0.1, -0.3, 0.4], 4), &params()).unwrap();
        for c in &r {
            assert!(c.max_abs() < 1e-12, "{}", c.max_abs());
        }
    }

    #[test]
    fn value_and_rate_matches_jet() {
        let w = majorana_plane_wave([0.3, -0.2, 0.5], [1.0, 0.2, -0.4, 0.7], &params()).unwrap();
        let sup = Superposition::new(vec![w.clone(), w]);
        let p = [0.7, 0.1, -0.3, 0.4];
        let (v, r) = sup.value_and_rate(p);
        let j = sup.jet_at(p, 1);
        for i in 0..4 {
            assert!((v[i] - j[i].value()).abs() < 1e-14);
            assert!((r[i] - j[i].coeff(&[1, 0, 0, 0])).abs() < 1e-14);
        }
    }

    #[test]
    fn time_tower_reproduces_plane_wave() {
        let w = majorana_plane_wave([0.4, 0.1, -0.5], [0.3, 1.0, 0.5, -0.2], &params()).unwrap();
        let p = [0.0, 0.2, -0.1, 0.3];
        let full = w.jet_at(p, 5);
        let tower = dirac_time_derivatives(&full, &params(), 5).unwrap();
        for i in 0..4 {
            assert!((&full[i] - &tower[i]).max_abs() < 1e-12);
        }
    }

    #[test]
    fn zero_momentum_massless_rejected() {
        let p = PhysParams::new(0.0, 1.0).unwrap();
        assert!(majorana_plane_wave([0.0; 3], [1.0, 0.0, 0.0, 0.0], &p).is_err());
    }

    #[test]
    fn directional_of_coordinate() {
        let f = FnScalar(|x: &Jet4| &x[1] * &x[2]);
        let v = FnVector(|x: &Jet4| std::array::from_fn(|_| Jet::constant(1.0, x[0].order())));
        let d = directional_derivative(&f, &v, [0.0, 2.0, 3.0, 0.0], 0).unwrap();
        assert!((d.value() - 5.0).abs() < 1e-14);
    }
}
