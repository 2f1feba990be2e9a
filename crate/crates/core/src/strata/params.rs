use super::systems::{VA, VB, VC};
use super::{Sign, StrataError, StratumId, StratumKind, StratumPoint, UnfoldingId};
use crate::poly::{MPoly, MAX_VARS};
use crate::scalar::{q, q_sign, qi, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

/// Which `a`-component to use for the cusp+fold stratum of `I2,3`.
///
/// `Corrected` is `±½√(-y)(3c+5y)`, the form that solves the bi-germ system and lies
/// on the octic. `Verbatim` drops the factor `½` and is kept for comparison only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspFoldForm {
    #[default]
    Corrected,
    Verbatim,
}

/// `coef · √rad` with `rad ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Surd {
    #[serde(serialize_with = "ser_q")]
    pub coef: Q,
    #[serde(serialize_with = "ser_q")]
    pub rad: Q,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl Surd {
    pub fn rational(v: Q) -> Self {
        Self { coef: v, rad: Q::one() }
    }

    pub fn square(&self) -> Q {
        &self.coef * &self.coef * &self.rad
    }

    pub fn sign(&self) -> i32 {
        if self.rad.is_zero() {
            0
        } else {
            q_sign(&self.coef)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.coef.to_f64().unwrap_or(f64::NAN) * self.rad.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// The exact value when the radicand is a rational square.
    pub fn as_rational(&self) -> Option<Q> {
        rational_sqrt(&self.rad).map(|r| &self.coef * &r)
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.sign() == other.sign() && self.square() == other.square()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}*sqrt({})", self.coef, self.rad),
        }
    }
}

/// Square root of a nonnegative rational whose numerator and denominator are squares.
pub fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Exact parameter point; only `a` may be irrational.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactPoint {
    pub a: Surd,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    #[serde(serialize_with = "ser_opt_q")]
    pub c: Option<Q>,
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl ExactPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        let mut out = vec![self.a.to_f64(), self.b.to_f64().unwrap_or(f64::NAN)];
        if let Some(c) = &self.c {
            out.push(c.to_f64().unwrap_or(f64::NAN));
        }
        out
    }
}

fn arity(internal_len: usize, expected: usize) -> Result<(), StrataError> {
    if internal_len != expected {
        Err(StrataError::Arity { expected, found: internal_len })
    } else {
        Ok(())
    }
}

fn domain(kind: StratumKind, ok: bool, reason: &str) -> Result<(), StrataError> {
    if ok {
        Ok(())
    } else {
        Err(StrataError::Domain { stratum: kind, reason: reason.to_string() })
    }
}

fn check_pair(u: UnfoldingId, kind: StratumKind) -> Result<(), StrataError> {
    if u.strata().contains(&kind) {
        Ok(())
    } else {
        Err(StrataError::InvalidPair { unfolding: u, stratum: kind })
    }
}

fn internal_len(u: UnfoldingId, kind: StratumKind) -> usize {
    use StratumKind::*;
    match (u, kind) {
        (UnfoldingId::I23, BeaksLips | Swallowtail | CuspFold) => 2,
        (UnfoldingId::I23, _) => 1,
        (UnfoldingId::Sharksfin, _) => 1,
        (UnfoldingId::OddSharksfin, Gulls) => 1,
        (UnfoldingId::OddSharksfin, _) => 2,
    }
}

/// Floating-point parametrization with the corrected cusp+fold form.
pub fn parametrize_stratum(u: UnfoldingId, id: StratumId, internal: &[f64]) -> Result<StratumPoint, StrataError> {
    parametrize_stratum_with(u, id, internal, CuspFoldForm::Corrected)
}

pub fn parametrize_stratum_with(
    u: UnfoldingId,
    id: StratumId,
    internal: &[f64],
    form: CuspFoldForm,
) -> Result<StratumPoint, StrataError> {
    use StratumKind::*;
    check_pair(u, id.kind)?;
    arity(internal.len(), internal_len(u, id.kind))?;
    let s = id.sign.factor() as f64;
    let params = match (u, id.kind) {
        (UnfoldingId::I23, BeaksLips) => {
            let (y, c) = (internal[0], internal[1]);
            let r = c + 3.0 * y;
            // Rounding of the edge value y = −c/3 may leave r a few ulps below zero.
            domain(id.kind, r >= -4.0 * f64::EPSILON * (c.abs() + 3.0 * y.abs()), "c + 3y must be nonnegative")?;
            vec![s * 4.0 * y * r.max(0.0).sqrt(), -y * (4.0 * c + 9.0 * y), c]
        }
        (UnfoldingId::I23, Goose) => {
            let c = internal[0];
            domain(id.kind, c > 0.0, "c must be positive")?;
            vec![s * 8.0 / (9.0 * 3f64.sqrt()) * c.powf(1.5), 4.0 / 9.0 * c * c, c]
        }
        (UnfoldingId::I23, Swallowtail) => {
            let (y, c) = (internal[0], internal[1]);
            domain(id.kind, c + 4.0 * y > 0.0, "c + 4y must be positive")?;
            vec![s * y * (4.0 * c + 15.0 * y) / (c + 4.0 * y).sqrt(), -2.0 * y * (2.0 * c + 5.0 * y), c]
        }
        (UnfoldingId::I23, Butterfly) => {
            let c = internal[0];
            domain(id.kind, c > 0.0, "c must be positive")?;
            vec![s / 5f64.sqrt() * c.powf(1.5), 0.4 * c * c, c]
        }
        (UnfoldingId::I23, CuspFold) => {
            let (y, c) = (internal[0], internal[1]);
            domain(id.kind, y < 0.0, "y must be negative")?;
            let half = match form {
                CuspFoldForm::Corrected => 0.5,
                CuspFoldForm::Verbatim => 1.0,
            };
            vec![s * half * (-y).sqrt() * (3.0 * c + 5.0 * y), 0.25 * (c * c - 6.0 * c * y - 15.0 * y * y), c]
        }
        (UnfoldingId::I23, SharksfinAxis) => {
            let c = internal[0];
            domain(id.kind, c > 0.0, "c must be positive")?;
            vec![0.0, 0.0, c]
        }
        (UnfoldingId::I23, DeltoidAxis) => {
            let c = internal[0];
            domain(id.kind, c < 0.0, "c must be negative")?;
            vec![0.0, 0.0, c]
        }
        (UnfoldingId::Sharksfin, BeaksLines) => match id.sign {
            Sign::Plus => vec![0.0, internal[0]],
            Sign::Minus => vec![internal[0], 0.0],
        },
        (UnfoldingId::Sharksfin, Swallowtail) => {
            let t = internal[0];
            let v = t.powi(4) / 16.0 + 3.0 * t.powi(9) / 32.0;
            match id.sign {
                Sign::Plus => vec![v, t],
                Sign::Minus => vec![t, v],
            }
        }
        (UnfoldingId::OddSharksfin, BeaksLines) => match id.sign {
            Sign::Plus => vec![0.0, internal[0], internal[1]],
            Sign::Minus => vec![internal[0], 0.0, internal[1]],
        },
        (UnfoldingId::OddSharksfin, Tacnode) => {
            let (b, c) = (internal[0], internal[1]);
            domain(id.kind, c < 0.0, "c must be negative")?;
            vec![c * c / 4.0, b, c]
        }
        (UnfoldingId::OddSharksfin, Gulls) => {
            let b = internal[0];
            domain(id.kind, b != 0.0, "b must be nonzero")?;
            vec![0.0, b, 0.0]
        }
        (UnfoldingId::OddSharksfin, Swallowtail) => return Err(StrataError::NoClosedForm(id.kind)),
        _ => return Err(StrataError::InvalidPair { unfolding: u, stratum: id.kind }),
    };
    Ok(StratumPoint { unfolding: u, stratum: id, internal: internal.to_vec(), params })
}

/// Exact parametrization over the rationals; `a` is returned as a surd.
pub fn parametrize_exact(
    u: UnfoldingId,
    id: StratumId,
    internal: &[Q],
    form: CuspFoldForm,
) -> Result<ExactPoint, StrataError> {
    use StratumKind::*;
    check_pair(u, id.kind)?;
    arity(internal.len(), internal_len(u, id.kind))?;
    let s = qi(id.sign.factor());
    let surd = |coef: Q, rad: Q| Surd { coef, rad };
    let rat = Surd::rational;
    let pt = match (u, id.kind) {
        (UnfoldingId::I23, BeaksLips) => {
            let (y, c) = (&internal[0], &internal[1]);
            let rad = c + qi(3) * y;
            domain(id.kind, !rad.is_negative(), "c + 3y must be nonnegative")?;
            ExactPoint { a: surd(&s * qi(4) * y, rad), b: -(y * (qi(4) * c + qi(9) * y)), c: Some(c.clone()) }
        }
        (UnfoldingId::I23, Goose) => {
            let c = &internal[0];
            domain(id.kind, c.is_positive(), "c must be positive")?;
            ExactPoint { a: surd(&s * q(8, 27) * c, qi(3) * c), b: q(4, 9) * c * c, c: Some(c.clone()) }
        }
        (UnfoldingId::I23, Swallowtail) => {
            let (y, c) = (&internal[0], &internal[1]);
            let rad = c + qi(4) * y;
            domain(id.kind, rad.is_positive(), "c + 4y must be positive")?;
            ExactPoint {
                a: surd(&s * y * (qi(4) * c + qi(15) * y) / &rad, rad),
                b: -(qi(2) * y * (qi(2) * c + qi(5) * y)),
                c: Some(c.clone()),
            }
        }
        (UnfoldingId::I23, Butterfly) => {
            let c = &internal[0];
            domain(id.kind, c.is_positive(), "c must be positive")?;
            ExactPoint { a: surd(&s * c / qi(5), qi(5) * c), b: q(2, 5) * c * c, c: Some(c.clone()) }
        }
        (UnfoldingId::I23, CuspFold) => {
            let (y, c) = (&internal[0], &internal[1]);
            domain(id.kind, y.is_negative(), "y must be negative")?;
            let half = match form {
                CuspFoldForm::Corrected => q(1, 2),
                CuspFoldForm::Verbatim => qi(1),
            };
            ExactPoint {
                a: surd(&s * half * (qi(3) * c + qi(5) * y), -y.clone()),
                b: (c * c - qi(6) * c * y - qi(15) * y * y) / qi(4),
                c: Some(c.clone()),
            }
        }
        (UnfoldingId::I23, SharksfinAxis | DeltoidAxis) => {
            let c = &internal[0];
            let ok = if id.kind == SharksfinAxis { c.is_positive() } else { c.is_negative() };
            domain(id.kind, ok, "sign of c does not match the axis")?;
            ExactPoint { a: rat(Q::zero()), b: Q::zero(), c: Some(c.clone()) }
        }
        (UnfoldingId::Sharksfin, BeaksLines) => match id.sign {
            Sign::Plus => ExactPoint { a: rat(Q::zero()), b: internal[0].clone(), c: None },
            Sign::Minus => ExactPoint { a: rat(internal[0].clone()), b: Q::zero(), c: None },
        },
        (UnfoldingId::Sharksfin, Swallowtail) => {
            let t = &internal[0];
            let v = num_traits::pow(t.clone(), 4) * q(1, 16) + num_traits::pow(t.clone(), 9) * q(3, 32);
            match id.sign {
                Sign::Plus => ExactPoint { a: rat(v), b: t.clone(), c: None },
                Sign::Minus => ExactPoint { a: rat(t.clone()), b: v, c: None },
            }
        }
        (UnfoldingId::OddSharksfin, BeaksLines) => match id.sign {
            Sign::Plus => ExactPoint { a: rat(Q::zero()), b: internal[0].clone(), c: Some(internal[1].clone()) },
            Sign::Minus => ExactPoint { a: rat(internal[0].clone()), b: Q::zero(), c: Some(internal[1].clone()) },
        },
        (UnfoldingId::OddSharksfin, Tacnode) => {
            let (b, c) = (&internal[0], &internal[1]);
            domain(id.kind, c.is_negative(), "c must be negative")?;
            ExactPoint { a: rat(c * c / qi(4)), b: b.clone(), c: Some(c.clone()) }
        }
        (UnfoldingId::OddSharksfin, Gulls) => {
            domain(id.kind, !internal[0].is_zero(), "b must be nonzero")?;
            ExactPoint { a: rat(Q::zero()), b: internal[0].clone(), c: Some(Q::zero()) }
        }
        (UnfoldingId::OddSharksfin, Swallowtail) => return Err(StrataError::NoClosedForm(id.kind)),
        _ => return Err(StrataError::InvalidPair { unfolding: u, stratum: id.kind }),
    };
    Ok(pt)
}

/// `a^2` of an exact `I2,3` stratum point; always rational.
pub fn a_squared_exact(id: StratumId, internal: &[Q], form: CuspFoldForm) -> Result<Q, StrataError> {
    Ok(parametrize_exact(UnfoldingId::I23, id, internal, form)?.a.square())
}

fn poly_from(terms: &[(i64, u8, u8, u8)]) -> MPoly {
    let mut p = MPoly::zero();
    for &(c, ea, eb, ec) in terms {
        let mut m = [0u8; MAX_VARS];
        m[VA] = ea;
        m[VB] = eb;
        m[VC] = ec;
        p = &p + &MPoly::term(m, qi(c));
    }
    p
}

/// Defining polynomial of a surface stratum of `I2,3` in the variables `(a, b, c)`.
pub fn implicit_residual_poly(kind: StratumKind) -> Result<MPoly, StrataError> {
    Ok(match kind {
        StratumKind::BeaksLips => {
            poly_from(&[(243, 4, 0, 0), (-864, 2, 1, 1), (256, 2, 0, 3), (768, 0, 3, 0), (-256, 0, 2, 2)])
        }
        StratumKind::Swallowtail => poly_from(&[
            (640, 4, 1, 0),
            (-240, 4, 0, 2),
            (-2280, 2, 2, 1),
            (1536, 2, 1, 3),
            (-256, 2, 0, 5),
            (2025, 0, 4, 0),
            (-1440, 0, 3, 2),
            (256, 0, 2, 4),
        ]),
        StratumKind::CuspFold => poly_from(&[
            (18225, 8, 0, 0),
            (14580, 6, 0, 3),
            (-68850, 4, 2, 2),
            (2646, 4, 0, 6),
            (54000, 2, 4, 1),
            (-1620, 2, 2, 5),
            (-108, 2, 0, 9),
            (-10000, 0, 6, 0),
            (1425, 0, 4, 4),
            (-66, 0, 2, 8),
            (1, 0, 0, 12),
        ]),
        other => return Err(StrataError::NoImplicitForm(other)),
    })
}

/// Value of the defining polynomial at `(a, b, c)`.
pub fn implicit_residual(kind: StratumKind, p: &[f64]) -> Result<f64, StrataError> {
    let poly = implicit_residual_poly(kind)?;
    let mut pt = [0.0; MAX_VARS];
    pt[VA] = p[0];
    pt[VB] = p[1];
    pt[VC] = p[2];
    Ok(poly.eval_f64(&pt))
}

/// Exact value at a point whose `a` is a surd; the polynomials are even in `a`.
pub fn implicit_residual_exact(kind: StratumKind, p: &ExactPoint) -> Result<Q, StrataError> {
    let poly = implicit_residual_poly(kind)?;
    let a2 = p.a.square();
    let c = p.c.clone().unwrap_or_else(Q::zero);
    let mut acc = Q::zero();
    for (m, coef) in poly.terms() {
        debug_assert!(m[VA] % 2 == 0, "defining polynomials are even in a");
        acc += coef
            * num_traits::pow(a2.clone(), (m[VA] / 2) as usize)
            * num_traits::pow(p.b.clone(), m[VB] as usize)
            * num_traits::pow(c.clone(), m[VC] as usize);
    }
    Ok(acc)
}
