//! Truncated multivariate Taylor expansions ("jets") in the four spacetime
//! coordinates.
//!
//! A jet of order `n` stores the Taylor coefficients `∂^α f / α!` for every
//! multi-index `α = (α₀, α₁, α₂, α₃)` with `|α| ≤ n`. Coefficients are laid
//! out in graded order (all degree-0 terms, then degree 1, ...), so a jet of
//! order `k < n` is a prefix of the order-`n` layout and truncation is a
//! slice. Arithmetic follows the truncated Leibniz and chain rules.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 10;

/// A multi-index over (x⁰, x¹, x², x³).
pub type MultiIndex = [usize; 4];

struct Tables {
    exps: Vec<MultiIndex>,
    /// `sizes[n]` = number of monomials of degree ≤ n.
    sizes: Vec<usize>,
    lookup: Vec<u32>,
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`, sorted by degree of `k`.
    products: Vec<(u32, u32, u32)>,
    /// `product_ends[n]` = number of triples whose output degree is ≤ n.
    product_ends: Vec<usize>,
    factorial: Vec<f64>,
}

const STRIDE: usize = MAX_ORDER + 2;

fn flat(a: &MultiIndex) -> usize {
    ((a[0] * STRIDE + a[1]) * STRIDE + a[2]) * STRIDE + a[3]
}

fn degree(a: &MultiIndex) -> usize {
    a.iter().sum()
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exps = Vec::new();
        let mut sizes = Vec::new();
        for d in 0..=MAX_ORDER {
            for a0 in (0..=d).rev() {
                for a1 in (0..=d - a0).rev() {
                    for a2 in (0..=d - a0 - a1).rev() {
                        exps.push([a0, a1, a2, d - a0 - a1 - a2]);
                    }
                }
            }
            sizes.push(exps.len());
        }
        let mut lookup = vec![u32::MAX; STRIDE.pow(4)];
        for (i, a) in exps.iter().enumerate() {
            lookup[flat(a)] = i as u32;
        }
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let c = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                if degree(&c) <= MAX_ORDER {
                    products.push((i as u32, j as u32, lookup[flat(&c)]));
                }
            }
        }
        products.sort_by_key(|&(_, _, k)| degree(&exps[k as usize]));
        let mut product_ends = Vec::new();
        for n in 0..=MAX_ORDER {
            product_ends.push(
                products
                    .iter()
                    .take_while(|&&(_, _, k)| degree(&exps[k as usize]) <= n)
                    .count(),
            );
        }
        let mut factorial = vec![1.0; MAX_ORDER + 2];
        for k in 1..factorial.len() {
            factorial[k] = factorial[k - 1] * k as f64;
        }
        Tables {
            exps,
            sizes,
            lookup,
            products,
            product_ends,
            factorial,
        }
    })
}

/// Number of coefficients in a jet of the given order.
pub fn jet_size(order: usize) -> usize {
    tables().sizes[order]
}

/// Linear position of a multi-index in the graded layout.
pub fn index_of(a: &MultiIndex) -> usize {
    assert!(degree(a) <= MAX_ORDER, "multi-index {a:?} beyond MAX_ORDER");
    tables().lookup[flat(a)] as usize
}

/// Multi-index stored at a linear position.
pub fn multi_index(i: usize) -> MultiIndex {
    tables().exps[i]
}

fn multi_factorial(a: &MultiIndex) -> f64 {
    let f = &tables().factorial;
    a.iter().map(|&k| f[k]).product()
}

/// Truncated Taylor expansion of a scalar about a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    c: Vec<f64>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} > {MAX_ORDER}");
        Jet {
            order,
            c: vec![0.0; jet_size(order)],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Jet::zero(order);
        j.c[0] = value;
        j
    }

    /// The coordinate function x^mu expanded about `at`.
    pub fn variable(mu: usize, at: f64, order: usize) -> Self {
        let mut j = Jet::constant(at, order);
        if order >= 1 {
            let mut a = [0; 4];
            a[mu] = 1;
            j.c[index_of(&a)] = 1.0;
        }
        j
    }

    pub fn from_coeffs(order: usize, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), jet_size(order));
        Jet { order, c }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.c
    }

    /// Taylor coefficient `∂^α f / α!`, zero beyond the jet order.
    pub fn coeff(&self, a: &MultiIndex) -> f64 {
        if degree(a) > self.order {
            0.0
        } else {
            self.c[index_of(a)]
        }
    }

    pub fn set_coeff(&mut self, a: &MultiIndex, v: f64) {
        assert!(degree(a) <= self.order);
        self.c[index_of(a)] = v;
    }

    /// Partial derivative `∂^α f` at the expansion point.
    pub fn partial(&self, a: &MultiIndex) -> f64 {
        self.coeff(a) * multi_factorial(a)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            order,
            c: self.c[..jet_size(order)].to_vec(),
        }
    }

    /// Extends with zero coefficients up to `order` (no-op when already higher).
    pub fn pad(&self, order: usize) -> Jet {
        if order <= self.order {
            return self.clone();
        }
        let mut c = self.c.clone();
        c.resize(jet_size(order), 0.0);
        Jet { order, c }
    }

    /// ∂f/∂x^mu as a jet one order lower. Panics on an order-0 jet.
    pub fn derivative(&self, mu: usize) -> Jet {
        assert!(self.order >= 1, "jet order exhausted");
        let order = self.order - 1;
        let n = jet_size(order);
        let mut c = vec![0.0; n];
        for (i, out) in c.iter_mut().enumerate() {
            let mut a = multi_index(i);
            a[mu] += 1;
            *out = self.c[index_of(&a)] * a[mu] as f64;
        }
        Jet { order, c }
    }

    pub fn try_derivative(&self, mu: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderExhausted { have: 0, need: 1 });
        }
        Ok(self.derivative(mu))
    }

    /// Antiderivative in x^mu vanishing on the hyperplane x^mu = center,
    /// one order higher.
    pub fn integrate(&self, mu: usize) -> Jet {
        let order = self.order + 1;
        assert!(order <= MAX_ORDER, "jet order exhausted");
        let mut out = Jet::zero(order);
        for (i, &v) in self.c.iter().enumerate() {
            let mut a = multi_index(i);
            a[mu] += 1;
            out.c[index_of(&a)] = v / a[mu] as f64;
        }
        out
    }

    /// Keeps only coefficients whose x⁰ power is at most `max_time_order`.
    pub fn mask_time_orders(&self, max_time_order: usize) -> Jet {
        let mut out = self.clone();
        for (i, v) in out.c.iter_mut().enumerate() {
            if multi_index(i)[0] > max_time_order {
                *v = 0.0;
            }
        }
        out
    }

    /// Maximum absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            order: self.order,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    fn binary(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.order.min(other.order);
        let n = jet_size(order);
        Jet {
            order,
            c: (0..n).map(|i| f(self.c[i], other.c[i])).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let t = tables();
        let mut c = vec![0.0; jet_size(order)];
        for &(i, j, k) in &t.products[..t.product_ends[order]] {
            c[k as usize] += self.c[i as usize] * other.c[j as usize];
        }
        Jet { order, c }
    }

    /// `f(self)` given `derivs[k] = f^(k)(self.value())` for k = 0..=order.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let f = &tables().factorial;
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0], self.order);
        let mut power = Jet::constant(1.0, self.order);
        for (k, d) in derivs.iter().enumerate().take(self.order + 1).skip(1) {
            power = &power * &h;
            if *d != 0.0 {
                out += &power.scale(d / f[k]);
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let x = self.value();
        let mut d = Vec::with_capacity(self.order + 1);
        let mut term = 1.0 / x;
        for k in 0..=self.order {
            d.push(term);
            term *= -((k + 1) as f64) / x;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let x = self.value();
        let mut d = Vec::with_capacity(self.order + 1);
        let mut coef = 1.0;
        for k in 0..=self.order {
            d.push(coef * x.powf(p - k as f64));
            coef *= p - k as f64;
        }
        self.compose(&d)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        self.compose(&(0..=self.order).map(|k| cycle[k % 4]).collect::<Vec<_>>())
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        self.compose(&(0..=self.order).map(|k| cycle[k % 4]).collect::<Vec<_>>())
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                let r = Jet::constant(rhs, self.order);
                self.$m(&r)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.binary(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.binary(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.product(b));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if rhs.order < self.order {
            self.order = rhs.order;
            self.c.truncate(jet_size(rhs.order));
        }
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
    }
}

/// A four-component quantity (vector or spinor) with jet-valued entries.
pub type Jet4 = [Jet; 4];

pub fn zero4(order: usize) -> Jet4 {
    std::array::from_fn(|_| Jet::zero(order))
}

pub fn constant4(v: [f64; 4], order: usize) -> Jet4 {
    v.map(|x| Jet::constant(x, order))
}

pub fn values4(j: &Jet4) -> [f64; 4] {
    std::array::from_fn(|i| j[i].value())
}

pub fn min_order4(j: &Jet4) -> usize {
    j.iter().map(Jet::order).min().unwrap_or(0)
}

/// `sᵀ M t` with jet entries; zero matrix entries are skipped.
pub fn bilinear_form(m: &nalgebra::Matrix4<f64>, s: &Jet4, t: &Jet4) -> Jet {
    let order = min_order4(s).min(min_order4(t));
    let mut acc = Jet::zero(order);
    for j in 0..4 {
        let mut col = Jet::zero(order);
        let mut any = false;
        for i in 0..4 {
            let w = m[(i, j)];
            if w != 0.0 {
                col += &s[i].scale(w);
                any = true;
            }
        }
        if any {
            acc += &(&col * &t[j]);
        }
    }
    acc
}

/// `M s` with jet entries.
pub fn apply_matrix(m: &nalgebra::Matrix4<f64>, s: &Jet4) -> Jet4 {
    let order = min_order4(s);
    std::array::from_fn(|i| {
        let mut acc = Jet::zero(order);
        for j in 0..4 {
            let w = m[(i, j)];
            if w != 0.0 {
                acc += &s[j].scale(w);
            }
        }
        acc
    })
}

/// `X^ν ∂_ν f` as a jet one order below `f`.
pub fn directional(x: &Jet4, f: &Jet) -> Result<Jet> {
    if f.order() == 0 {
        return Err(Error::OrderExhausted { have: 0, need: 1 });
    }
    let mut acc = Jet::zero(f.order() - 1);
    for nu in 0..4 {
        if x[nu].max_abs() == 0.0 {
            continue;
        }
        acc += &(&x[nu] * &f.derivative(nu));
    }
    Ok(acc)
}

/// Coordinate jets `x^μ` about `point`.
pub fn coordinates(point: [f64; 4], order: usize) -> Jet4 {
    std::array::from_fn(|mu| Jet::variable(mu, point[mu], order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn layout_is_graded_prefix() {
        assert_eq!(jet_size(0), 1);
        assert_eq!(jet_size(1), 5);
        assert_eq!(jet_size(2), 15);
        assert_eq!(jet_size(4), 70);
        for i in 0..jet_size(3) {
            assert_eq!(index_of(&multi_index(i)), i);
        }
    }

    #[test]
    fn polynomial_product_matches_expansion() {
        // (1 + x + 2y)(3 - y + x z) about the origin
        let x = Jet::variable(1, 0.0, 3);
        let y = Jet::variable(2, 0.0, 3);
        let z = Jet::variable(3, 0.0, 3);
        let f = &(&x + 1.0) + &y.scale(2.0);
        let g = &(&(&x * &z) - &y) + 3.0;
        let p = &f * &g;
        assert_eq!(p.coeff(&[0, 0, 0, 0]), 3.0);
        assert_eq!(p.coeff(&[0, 1, 0, 0]), 3.0);
        assert_eq!(p.coeff(&[0, 0, 1, 0]), 5.0);
        assert_eq!(p.coeff(&[0, 0, 2, 0]), -2.0);
        assert_eq!(p.coeff(&[0, 1, 0, 1]), 1.0);
        assert_eq!(p.coeff(&[0, 2, 0, 1]), 1.0);
        assert_eq!(p.coeff(&[0, 1, 1, 1]), 2.0);
    }

    #[test]
    fn univariate_series() {
        let x = Jet::variable(0, 0.0, 5);
        let e = x.exp();
        assert_relative_eq!(e.coeff(&[4, 0, 0, 0]), 1.0 / 24.0, epsilon = 1e-15);
        let s = x.sin();
        assert_relative_eq!(s.coeff(&[3, 0, 0, 0]), -1.0 / 6.0, epsilon = 1e-15);
        let c = x.cos();
        assert_relative_eq!(c.coeff(&[4, 0, 0, 0]), 1.0 / 24.0, epsilon = 1e-15);
        let r = (&x + 1.0).recip();
        for k in 0..=5 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(r.coeff(&[k, 0, 0, 0]), sign, epsilon = 1e-14);
        }
        let q = (&x + 4.0).sqrt();
        assert_relative_eq!(q.value(), 2.0);
        assert_relative_eq!(q.partial(&[1, 0, 0, 0]), 0.25);
        assert_relative_eq!(q.partial(&[2, 0, 0, 0]), -1.0 / 32.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_and_integral() {
        let x = Jet::variable(1, 2.0, 4);
        let f = &x * &x * &x;
        let d = f.derivative(1);
        assert_eq!(d.order(), 3);
        assert_relative_eq!(d.value(), 12.0);
        assert_relative_eq!(d.partial(&[0, 1, 0, 0]), 12.0);
        let back = d.integrate(1);
        assert_relative_eq!(back.partial(&[0, 3, 0, 0]), 6.0);
        assert_eq!(back.value(), 0.0);
    }

    #[test]
    fn directional_needs_order() {
        let f = Jet::constant(1.0, 0);
        assert!(directional(&zero4(0), &f).is_err());
        let x = coordinates([0.0, 0.3, -0.2, 0.1], 2);
        let dir = constant4([0.0, 1.0, 0.0, 0.0], 2);
        assert_relative_eq!(directional(&dir, &x[1]).unwrap().value(), 1.0);
    }
}
