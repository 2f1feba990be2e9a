//! Truncated power series in two variables.
//!
//! A [`Jet`] of order `N` stores every coefficient of `x^i y^j` with `i + j <= N`
//! densely, graded by total degree. Products and compositions truncate to the
//! smaller order of their operands, so a jet of order `N` is always exact up to
//! degree `N`.

use crate::scalar::{Scalar, ScalarKind, Q};
use serde_json::{json, Value};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Working truncation order used across the crate.
pub const DEFAULT_ORDER: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("scalar kind mismatch: {0:?} vs {1:?}")]
    KindMismatch(ScalarKind, ScalarKind),
    #[error("substitution must preserve the origin (component {0} has a nonzero constant term)")]
    NonzeroConstant(usize),
    #[error("malformed jet json: {0}")]
    Json(String),
}

/// Source variable of a jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Evaluation point near the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetPoint {
    pub x: f64,
    pub y: f64,
}

impl JetPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[inline]
fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[derive(Clone, PartialEq)]
pub struct Jet<S> {
    order: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(order: usize) -> Self {
        Self { order, coeffs: vec![S::zero(); len_for(order)] }
    }

    pub fn constant(order: usize, c: S) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = c;
        j
    }

    pub fn monomial(order: usize, i: usize, j: usize, c: S) -> Self {
        let mut out = Self::zero(order);
        out.set(i, j, c);
        out
    }

    pub fn x(order: usize) -> Self {
        Self::monomial(order, 1, 0, S::one())
    }

    pub fn y(order: usize) -> Self {
        Self::monomial(order, 0, 1, S::one())
    }

    /// Builds a jet from `(i, j, coefficient)` triples; terms above `order` are dropped,
    /// repeated multi-indices accumulate.
    pub fn from_terms<I>(order: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut out = Self::zero(order);
        for (i, j, c) in terms {
            if i + j <= order {
                let k = index(i, j);
                out.coeffs[k] = out.coeffs[k].clone() + c;
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> ScalarKind {
        S::KIND
    }

    /// Coefficient of `x^i y^j`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> S {
        if i + j <= self.order {
            self.coeffs[index(i, j)].clone()
        } else {
            S::zero()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> Option<&S> {
        (i + j <= self.order).then(|| &self.coeffs[index(i, j)])
    }

    /// Sets a coefficient; silently ignores multi-indices beyond the order.
    pub fn set(&mut self, i: usize, j: usize, c: S) {
        if i + j <= self.order {
            self.coeffs[index(i, j)] = c;
        }
    }

    pub fn constant_term(&self) -> S {
        self.coeffs[0].clone()
    }

    /// Nonzero terms as `(i, j, &c)`, by increasing total degree.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        (0..=self.order)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(move |(i, j)| (i, j, &self.coeffs[index(i, j)]))
            .filter(|(_, _, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms().next().map(|(i, j, _)| i + j)
    }

    /// Homogeneous part of degree `d`, as coefficients of `x^(d-j) y^j` for `j = 0..=d`.
    pub fn homogeneous(&self, d: usize) -> Vec<S> {
        (0..=d).map(|j| self.coeff(d - j, j)).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self { order, coeffs: self.coeffs[..len_for(order)].to_vec() }
    }

    /// Raises the nominal order, padding with zeros. Only meaningful for jets that
    /// are known to be exact polynomials.
    pub fn with_order(&self, order: usize) -> Self {
        if order <= self.order {
            return self.truncate(order);
        }
        let mut out = Self::zero(order);
        out.coeffs[..self.coeffs.len()].clone_from_slice(&self.coeffs);
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let order = self.order.min(rhs.order);
        let n = len_for(order);
        Self { order, coeffs: (0..n).map(|k| f(&self.coeffs[k], &rhs.coeffs[k])).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul_jet(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = Self::zero(order);
        for (i1, j1, a) in self.truncate(order).terms() {
            let d1 = i1 + j1;
            for d2 in 0..=(order - d1) {
                for j2 in 0..=d2 {
                    let i2 = d2 - j2;
                    let b = &rhs.coeffs[index(i2, j2)];
                    if b.is_zero() {
                        continue;
                    }
                    let k = index(i1 + i2, j1 + j2);
                    out.coeffs[k] = out.coeffs[k].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::constant(self.order, S::one());
        for _ in 0..n {
            acc = acc.mul_jet(self);
        }
        acc
    }

    /// Formal partial derivative; the order drops by one (an order-0 jet yields the zero jet).
    pub fn partial(&self, var: Var) -> Self {
        if self.order == 0 {
            return Self::zero(0);
        }
        let order = self.order - 1;
        let mut out = Self::zero(order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let (src, factor) = match var {
                    Var::X => (index(i + 1, j), i + 1),
                    Var::Y => (index(i, j + 1), j + 1),
                };
                let c = &self.coeffs[src];
                if !c.is_zero() {
                    out.coeffs[index(i, j)] = c.clone() * S::from_int(factor as i64);
                }
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        self.partial(Var::X)
    }

    pub fn dy(&self) -> Self {
        self.partial(Var::Y)
    }

    /// Polynomial evaluation of the truncated series.
    pub fn eval(&self, x: &S, y: &S) -> S {
        // Horner in y for each power of x.
        let mut acc = S::zero();
        for i in (0..=self.order).rev() {
            let mut inner = S::zero();
            for j in (0..=(self.order - i)).rev() {
                inner = inner * y.clone() + self.coeffs[index(i, j)].clone();
            }
            acc = acc * x.clone() + inner;
        }
        acc
    }

    /// Substitutes `(x, y) -> (g1, g2)`; both `g` components must vanish at the origin.
    /// The result has order `min(self.order, g1.order, g2.order)`.
    pub fn compose(&self, g1: &Self, g2: &Self) -> Result<Self, JetError> {
        if !g1.constant_term().is_zero() {
            return Err(JetError::NonzeroConstant(1));
        }
        if !g2.constant_term().is_zero() {
            return Err(JetError::NonzeroConstant(2));
        }
        let order = self.order.min(g1.order).min(g2.order);
        let g1 = g1.truncate(order);
        let g2 = g2.truncate(order);
        let mut p1 = vec![Self::constant(order, S::one())];
        let mut p2 = vec![Self::constant(order, S::one())];
        for k in 1..=order {
            p1.push(p1[k - 1].mul_jet(&g1));
            p2.push(p2[k - 1].mul_jet(&g2));
        }
        let mut out = Self::zero(order);
        for (i, j, c) in self.truncate(order).terms() {
            let term = p1[i].mul_jet(&p2[j]).scale(c);
            out = &out + &term;
        }
        Ok(out)
    }

    /// Re-expands the polynomial at `(x0, y0)`: returns `h(u, v) = f(x0 + u, y0 + v)`.
    /// Exact when the jet is a polynomial of degree at most its order.
    pub fn translate(&self, x0: &S, y0: &S) -> Self {
        let order = self.order;
        let u = Self::x(order) + Self::constant(order, x0.clone());
        let v = Self::y(order) + Self::constant(order, y0.clone());
        let mut pu = vec![Self::constant(order, S::one())];
        let mut pv = vec![Self::constant(order, S::one())];
        for k in 1..=order {
            pu.push(pu[k - 1].mul_jet(&u));
            pv.push(pv[k - 1].mul_jet(&v));
        }
        let mut out = Self::zero(order);
        for (i, j, c) in self.terms() {
            out = &out + &pu[i].mul_jet(&pv[j]).scale(c);
        }
        out
    }

    /// Largest coefficient magnitude (at least 1), the scale used by float zero tests.
    pub fn scale_hint(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(1.0, f64::max)
    }
}

impl Jet<f64> {
    pub fn eval_at(&self, p: JetPoint) -> f64 {
        self.eval(&p.x, &p.y)
    }

    /// Value and gradient at a point.
    pub fn eval_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        (self.eval(&x, &y), self.dx().eval(&x, &y), self.dy().eval(&x, &y))
    }
}

impl Jet<Q> {
    pub fn to_f64(&self) -> Jet<f64> {
        self.map(|c| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        self.mul_jet(rhs)
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.map(|c| -c.clone())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$m(&rhs)
            }
        }
        impl<S: Scalar> $tr<&Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: &Jet<S>) -> Jet<S> {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("terms", &self.terms().map(|(i, j, c)| (i, j, c.clone())).collect::<Vec<_>>())
            .finish()
    }
}

/// Binary jet operation selected at run time.
#[derive(Clone, Debug)]
pub enum JetOp<S> {
    Add,
    Sub,
    Mul,
    Scale(S),
}

pub fn arithmetic<S: Scalar>(a: &Jet<S>, b: &Jet<S>, op: &JetOp<S>) -> Jet<S> {
    match op {
        JetOp::Add => a + b,
        JetOp::Sub => a - b,
        JetOp::Mul => a * b,
        JetOp::Scale(s) => a.scale(s),
    }
}

/// A jet whose scalar kind is only known at run time (CLI input, JSON files).
#[derive(Clone, Debug, PartialEq)]
pub enum DynJet {
    Float(Jet<f64>),
    Rational(Jet<Q>),
}

impl DynJet {
    pub fn kind(&self) -> ScalarKind {
        match self {
            DynJet::Float(_) => ScalarKind::Float,
            DynJet::Rational(_) => ScalarKind::Rational,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            DynJet::Float(j) => j.order(),
            DynJet::Rational(j) => j.order(),
        }
    }

    pub fn combine(&self, other: &DynJet, op: DynOp) -> Result<DynJet, JetError> {
        match (self, other) {
            (DynJet::Float(a), DynJet::Float(b)) => {
                let op = match op {
                    DynOp::Add => JetOp::Add,
                    DynOp::Sub => JetOp::Sub,
                    DynOp::Mul => JetOp::Mul,
                };
                Ok(DynJet::Float(arithmetic(a, b, &op)))
            }
            (DynJet::Rational(a), DynJet::Rational(b)) => {
                let op = match op {
                    DynOp::Add => JetOp::Add,
                    DynOp::Sub => JetOp::Sub,
                    DynOp::Mul => JetOp::Mul,
                };
                Ok(DynJet::Rational(arithmetic(a, b, &op)))
            }
            (a, b) => Err(JetError::KindMismatch(a.kind(), b.kind())),
        }
    }

    /// `{"order": N, "kind": "float" | "rational", "coeffs": [[i, j, value], ...]}`;
    /// rational values are strings `"p/q"`. `kind` is optional on input and only
    /// matters when `coeffs` is empty.
    pub fn to_json(&self) -> Value {
        match self {
            DynJet::Float(j) => json!({
                "order": j.order(),
                "kind": "float",
                "coeffs": j.terms().map(|(i, k, c)| json!([i, k, c])).collect::<Vec<_>>(),
            }),
            DynJet::Rational(j) => json!({
                "order": j.order(),
                "kind": "rational",
                "coeffs": j.terms().map(|(i, k, c)| json!([i, k, c.to_string()])).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<DynJet, JetError> {
        let bad = |m: &str| JetError::Json(m.to_string());
        let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| bad("missing order"))? as usize;
        let coeffs = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing coeffs"))?;
        let mut floats = Vec::new();
        let mut rats = Vec::new();
        for entry in coeffs {
            let arr = entry.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("entry must be [i, j, value]"))?;
            let i = arr[0].as_u64().ok_or_else(|| bad("bad i"))? as usize;
            let j = arr[1].as_u64().ok_or_else(|| bad("bad j"))? as usize;
            if i + j > order {
                return Err(bad("multi-index exceeds order"));
            }
            match &arr[2] {
                Value::String(s) => rats.push((i, j, crate::scalar::parse_q(s).ok_or_else(|| bad("bad rational"))?)),
                Value::Number(n) => floats.push((i, j, n.as_f64().ok_or_else(|| bad("bad number"))?)),
                _ => return Err(bad("value must be a number or a rational string")),
            }
        }
        let declared = match v.get("kind").map(|k| k.as_str()) {
            None => None,
            Some(Some("float")) => Some(ScalarKind::Float),
            Some(Some("rational")) => Some(ScalarKind::Rational),
            Some(_) => return Err(bad("kind must be \"float\" or \"rational\"")),
        };
        let found = match (floats.is_empty(), rats.is_empty()) {
            (true, true) => declared.unwrap_or(ScalarKind::Float),
            (false, true) => ScalarKind::Float,
            (true, false) => ScalarKind::Rational,
            (false, false) => return Err(JetError::KindMismatch(ScalarKind::Float, ScalarKind::Rational)),
        };
        match (declared, found) {
            (Some(d), f) if d != f => Err(JetError::KindMismatch(d, f)),
            (_, ScalarKind::Float) => Ok(DynJet::Float(Jet::from_terms(order, floats))),
            (_, _) => Ok(DynJet::Rational(Jet::from_terms(order, rats))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum DynOp {
    Add,
    Sub,
    Mul,
}
