//! Sparse multivariate polynomials over the rationals.
//!
//! Used wherever an identity has to hold exactly: symbolic unfolding parameters,
//! elimination of view-line parameters, resultants. Up to [`MAX_VARS`] variables,
//! addressed by index; callers keep their own naming.

use crate::scalar::{Scalar, ScalarKind, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_VARS: usize = 8;

/// Exponent vector; compared lexicographically.
pub type Monomial = [u8; MAX_VARS];

#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; MAX_VARS], c);
        }
        Self { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Q::from_int(n))
    }

    pub fn var(k: usize) -> Self {
        let mut m = [0; MAX_VARS];
        m[k] = 1;
        Self::term(m, Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let mut p = Self::default();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        self.is_constant().then(|| self.coeff(&[0; MAX_VARS]))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::default();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, k: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[k] as u32).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max()
    }

    /// Coefficients with respect to variable `k`: `result[d]` multiplies `var_k^d`.
    pub fn coeffs_in(&self, k: usize) -> Vec<MPoly> {
        let deg = self.degree_in(k).unwrap_or(0) as usize;
        let mut out = vec![MPoly::default(); deg + 1];
        for (m, c) in &self.terms {
            let mut mm = *m;
            let d = mm[k] as usize;
            mm[k] = 0;
            out[d].add_term(mm, c.clone());
        }
        out
    }

    /// Rebuilds a polynomial from coefficients in variable `k`.
    pub fn from_coeffs_in(k: usize, coeffs: &[MPoly]) -> Self {
        let v = Self::var(k);
        let mut acc = Self::default();
        for c in coeffs.iter().rev() {
            acc = &(&acc * &v) + c;
        }
        acc
    }

    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            if m[k] > 0 {
                let mut mm = *m;
                mm[k] -= 1;
                out.add_term(mm, c * Q::from_int(m[k] as i64));
            }
        }
        out
    }

    /// Replaces variable `k` by `value`.
    pub fn substitute(&self, k: usize, value: &MPoly) -> Self {
        let coeffs = self.coeffs_in(k);
        let mut acc = Self::default();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[k].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (k, &e) in m.iter().enumerate() {
                    if e > 0 {
                        t *= point[k].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (*dm, dc.clone());
        let mut rem = self.clone();
        let mut quot = MPoly::default();
        while let Some((rm, rc)) = rem.leading() {
            if !rm.iter().zip(dm.iter()).all(|(a, b)| a >= b) {
                return None;
            }
            let mut qm = [0u8; MAX_VARS];
            for i in 0..MAX_VARS {
                qm[i] = rm[i] - dm[i];
            }
            let qc = rc / &dc;
            let t = MPoly::term(qm, qc);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut out = [u8::MAX; MAX_VARS];
        if self.terms.is_empty() {
            return [0; MAX_VARS];
        }
        for m in self.terms.keys() {
            for i in 0..MAX_VARS {
                out[i] = out[i].min(m[i]);
            }
        }
        out
    }

    /// Divides out the monomial content restricted to `vars`.
    pub fn strip_monomial(&self, vars: &[usize]) -> (Self, Monomial) {
        let content = self.monomial_content();
        let mut strip = [0u8; MAX_VARS];
        for &k in vars {
            strip[k] = content[k];
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mm = *m;
                for i in 0..MAX_VARS {
                    mm[i] -= strip[i];
                }
                (mm, c.clone())
            })
            .collect();
        (Self { terms }, strip)
    }

    /// Divides by `factor` as many times as it divides exactly; returns the multiplicity removed.
    pub fn strip_factor(&self, factor: &MPoly) -> (Self, u32) {
        let mut cur = self.clone();
        let mut n = 0;
        if factor.is_constant() || cur.is_zero() {
            return (cur, 0);
        }
        while let Some(q) = cur.div_exact(factor) {
            cur = q;
            n += 1;
        }
        (cur, n)
    }

    /// Scales so that the coefficient of `m` is one; `None` if that coefficient vanishes.
    pub fn normalized_at(&self, m: &Monomial) -> Option<Self> {
        let c = self.coeff(m);
        if c.is_zero() {
            return None;
        }
        Some(self.scale(&(Q::one() / c)))
    }

    /// Maps variables: variable `i` of `self` becomes variable `map[i]`.
    pub fn rename(&self, map: &[usize]) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let mut mm = [0u8; MAX_VARS];
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    mm[map[i]] += e;
                }
            }
            out.add_term(mm, c.clone());
        }
        out
    }

    pub fn display_with<'a>(&'a self, names: &'a [&'a str]) -> impl fmt::Display + 'a {
        Named { p: self, names }
    }
}

struct Named<'a> {
    p: &'a MPoly,
    names: &'a [&'a str],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let is_const = m.iter().all(|&e| e == 0);
            let mut parts = Vec::new();
            if is_const || !mag.is_one() {
                parts.push(mag.to_string());
            }
            for (k, &e) in m.iter().enumerate() {
                let name = self.names.get(k).copied().unwrap_or("?");
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"]))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut m = [0u8; MAX_VARS];
                for i in 0..MAX_VARS {
                    m[i] = m1[i] + m2[i];
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl Zero for MPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MPoly {
    fn one() -> Self {
        Self::constant(Q::one())
    }
}

impl Scalar for MPoly {
    const KIND: ScalarKind = ScalarKind::Symbolic;

    fn from_int(n: i64) -> Self {
        MPoly::int(n)
    }

    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn as_f64(&self) -> Option<f64> {
        self.constant_value().and_then(|c| c.to_f64())
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one();
    }
    let mut sign = false;
    let mut prev = MPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return MPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss step must divide exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Sylvester resultant of `p` and `q` with respect to variable `k`.
pub fn resultant(p: &MPoly, q: &MPoly, k: usize) -> MPoly {
    let pc = p.coeffs_in(k);
    let qc = q.coeffs_in(k);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    if p.is_zero() || q.is_zero() {
        return MPoly::zero();
    }
    if m == 0 {
        return pc[0].pow(n as u32);
    }
    if n == 0 {
        return qc[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![MPoly::zero(); size]; size];
    // Rows hold coefficients from the highest power down.
    for r in 0..n {
        for (d, c) in pc.iter().enumerate() {
            mat[r][r + (m - d)] = c.clone();
        }
    }
    for r in 0..m {
        for (d, c) in qc.iter().enumerate() {
            mat[n + r][r + (n - d)] = c.clone();
        }
    }
    determinant(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    const X: usize = 0;
    const Y: usize = 1;

    fn x() -> MPoly {
        MPoly::var(X)
    }
    fn y() -> MPoly {
        MPoly::var(Y)
    }

    #[test]
    fn arithmetic_and_substitution() {
        let p = &(&x() * &x()) + &y().pow(3);
        let s = p.substitute(X, &y());
        assert_eq!(s, &y().pow(2) + &y().pow(3));
        assert_eq!(p.eval(&[qi(2), qi(-1)]), qi(3));
        assert_eq!(p.partial(Y), y().pow(2).scale(&qi(3)));
    }

    #[test]
    fn exact_division() {
        let a = &x() + &y();
        let b = &x() - &y().scale(&q(1, 2));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!((&prod + &MPoly::int(1)).div_exact(&a), None);
        let (stripped, n) = (&prod * &a).strip_factor(&a);
        assert_eq!(n, 2);
        assert_eq!(stripped, b);
    }

    #[test]
    fn resultant_detects_common_root() {
        // (x - 1)(x - 2) and (x - 2)(x + 5) share x = 2.
        let p = &(&x() - &MPoly::int(1)) * &(&x() - &MPoly::int(2));
        let r = &(&x() - &MPoly::int(2)) * &(&x() + &MPoly::int(5));
        assert!(resultant(&p, &r, X).is_zero());
        // Res_x(x^2 - y, x - 1) = 1 - y.
        let p = &(&x() * &x()) - &y();
        let r = &x() - &MPoly::int(1);
        assert_eq!(resultant(&p, &r, X), &MPoly::int(1) - &y());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = vec![
            vec![x(), MPoly::int(2), y()],
            vec![MPoly::int(0), MPoly::int(0), MPoly::int(3)],
            vec![MPoly::int(1), x(), MPoly::int(4)],
        ];
        // Expansion along the middle row: -3 * (x*x - 2*1).
        let expect = (&(&x() * &x()) - &MPoly::int(2)).scale(&qi(-3));
        assert_eq!(determinant(m), expect);
    }
}
