//! A-type recognition of plane-to-plane germs by jet criteria.
//!
//! For a corank-one germ `f = (f1, f2)` the recognition data are the Jacobian
//! `λ = det df`, a vector field `η` spanning `ker df` along `{λ = 0}`, and, when the
//! Hessian of `λ` at the origin has rank one, a direction `θ` spanning its kernel.
//! The classifier walks the criteria rows fold, cusp, swallowtail, lips, beaks,
//! butterfly, gulls, goose and returns the first match.
//!
//! Corank-two germs are sorted by their quadratic pencil only (see
//! [`classify_corank2_2jet`]).

use crate::jets::{Jet, JetError, Var};
use crate::scalar::Scalar;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecognitionError {
    #[error("map-germ must send the origin to the origin (component {0} has a constant term)")]
    NotOriginPreserving(usize),
    #[error("operation requires corank {expected}, germ has corank {found}")]
    Corank { expected: u8, found: u8 },
    #[error("no kernel-field convention registered for corank-two germs")]
    NoKernelConvention,
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// `f = (f1, f2): (R^2, 0) -> (R^2, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapGerm<S: Scalar> {
    pub f1: Jet<S>,
    pub f2: Jet<S>,
}

impl<S: Scalar> MapGerm<S> {
    pub fn new(f1: Jet<S>, f2: Jet<S>) -> Result<Self, RecognitionError> {
        if !f1.constant_term().is_zero() {
            return Err(RecognitionError::NotOriginPreserving(1));
        }
        if !f2.constant_term().is_zero() {
            return Err(RecognitionError::NotOriginPreserving(2));
        }
        Ok(Self { f1, f2 })
    }

    /// The germ of the same polynomial map at `(x0, y0)`, recentred so that
    /// `(x0, y0) -> (0, 0)` in both source and target.
    pub fn from_map_at(f1: &Jet<S>, f2: &Jet<S>, x0: &S, y0: &S) -> Self {
        let mut g1 = f1.translate(x0, y0);
        let mut g2 = f2.translate(x0, y0);
        g1.set(0, 0, S::zero());
        g2.set(0, 0, S::zero());
        Self { f1: g1, f2: g2 }
    }

    pub fn order(&self) -> usize {
        self.f1.order().min(self.f2.order())
    }

    /// Largest coefficient magnitude of the two components (at least 1).
    pub fn scale(&self) -> f64 {
        self.f1.scale_hint().max(self.f2.scale_hint())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> MapGerm<T> {
        MapGerm { f1: self.f1.map(f), f2: self.f2.map(f) }
    }

    /// Source/target change `τ ∘ f ∘ σ`, with `σ` and `τ` given by component jets.
    pub fn conjugate(&self, sigma: (&Jet<S>, &Jet<S>), tau: (&Jet<S>, &Jet<S>)) -> Result<Self, RecognitionError> {
        let g1 = self.f1.compose(sigma.0, sigma.1)?;
        let g2 = self.f2.compose(sigma.0, sigma.1)?;
        let h1 = tau.0.compose(&g1, &g2)?;
        let h2 = tau.1.compose(&g1, &g2)?;
        Self::new(h1, h2)
    }
}

/// `η = η1 ∂/∂x + η2 ∂/∂y`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelField<S: Scalar> {
    pub eta1: Jet<S>,
    pub eta2: Jet<S>,
}

impl<S: Scalar> KernelField<S> {
    /// Directional derivative `η g`; the order drops by one.
    pub fn apply(&self, g: &Jet<S>) -> Jet<S> {
        &(&self.eta1 * &g.partial(Var::X)) + &(&self.eta2 * &g.partial(Var::Y))
    }

    /// `η^k g` for `k = 0..=n`.
    pub fn tower(&self, g: &Jet<S>, n: usize) -> Vec<Jet<S>> {
        let mut out = vec![g.clone()];
        for _ in 0..n {
            let next = self.apply(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }

    /// The Euler-type field `-x ∂/∂x + y ∂/∂y`, a kernel field of the `I2,3`
    /// unfolding `(x^2 + y^3 + ax + by + cy^2, xy)` along its whole singular set.
    pub fn i23_euler(order: usize) -> Self {
        Self { eta1: -Jet::x(order), eta2: Jet::y(order) }
    }

    pub fn scale(&self, unit: &Jet<S>) -> Self {
        Self { eta1: &self.eta1 * unit, eta2: &self.eta2 * unit }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelConvention {
    /// `(-f1_y, f1_x)`, falling back to `(-f2_y, f2_x)` when `∇f1(0) = 0`.
    Gradient,
    /// `-x ∂/∂x + y ∂/∂y`, valid for the `I2,3` unfolding family.
    I23Euler,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "reason", rename_all = "snake_case")]
pub enum SingularityClass {
    Regular,
    Fold,
    Cusp,
    Swallowtail,
    Lips,
    Beaks,
    Butterfly,
    Gulls,
    Goose,
    Sharksfin,
    Deltoid,
    OddSharksfin,
    I23Candidate,
    DeltoidTwoJet,
    HyperbolicPairDegenerate,
    Unresolved(String),
}

impl SingularityClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Regular => "regular",
            Self::Fold => "fold",
            Self::Cusp => "cusp",
            Self::Swallowtail => "swallowtail",
            Self::Lips => "lips",
            Self::Beaks => "beaks",
            Self::Butterfly => "butterfly",
            Self::Gulls => "gulls",
            Self::Goose => "goose",
            Self::Sharksfin => "sharksfin",
            Self::Deltoid => "deltoid",
            Self::OddSharksfin => "odd_sharksfin",
            Self::I23Candidate => "i23_candidate",
            Self::DeltoidTwoJet => "deltoid_two_jet",
            Self::HyperbolicPairDegenerate => "hyperbolic_pair_degenerate",
            Self::Unresolved(_) => "unresolved",
        }
    }

    pub fn is_unresolved(&self) -> bool {
        matches!(self, Self::Unresolved(_))
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unresolved(r) => write!(f, "unresolved ({r})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Values at the origin used by [`classify_corank1`].
#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport<S: Scalar> {
    pub lambda0: S,
    pub dlambda0: [S; 2],
    /// `η^k λ(0)` for `k = 1..=4`.
    pub eta_tower: Vec<S>,
    pub hessian: [[S; 2]; 2],
    pub hess_det: S,
    pub hess_rank: u8,
    /// Kernel direction of the Hessian; present only when its rank is one.
    pub theta: Option<[S; 2]>,
    pub theta3lambda0: Option<S>,
    /// Coefficient scale of the input germ; float zero tests are relative to it.
    pub scale: f64,
}

impl<S: Scalar + fmt::Display> CriteriaReport<S> {
    pub fn to_json(&self) -> Value {
        let s = |v: &S| match v.as_f64() {
            Some(f) if S::KIND == crate::scalar::ScalarKind::Float => json!(f),
            _ => json!(v.to_string()),
        };
        json!({
            "lambda0": s(&self.lambda0),
            "dlambda0": [s(&self.dlambda0[0]), s(&self.dlambda0[1])],
            "eta_tower": self.eta_tower.iter().map(s).collect::<Vec<_>>(),
            "hess_det": s(&self.hess_det),
            "hess_rank": self.hess_rank,
            "theta3lambda0": self.theta3lambda0.as_ref().map(s),
        })
    }
}

// Polynomial degree of each recognition quantity in the germ coefficients;
// float zero tests use `scale^degree`.
const DEG_LAMBDA: i32 = 2;
const DEG_ETA_STEP: i32 = 1;
const DEG_DET: i32 = 4;
const DEG_THETA3: i32 = 8;

fn zero<S: Scalar>(v: &S, scale: f64, deg: i32) -> bool {
    v.is_negligible(scale.powi(deg))
}

/// `2 - rank df(0)`.
pub fn corank<S: Scalar>(f: &MapGerm<S>) -> u8 {
    let sc = f.scale();
    let a = f.f1.coeff(1, 0);
    let b = f.f1.coeff(0, 1);
    let c = f.f2.coeff(1, 0);
    let d = f.f2.coeff(0, 1);
    if [&a, &b, &c, &d].iter().all(|v| zero(*v, sc, 1)) {
        return 2;
    }
    let det = a * d - b * c;
    if zero(&det, sc, 2) {
        1
    } else {
        0
    }
}

/// `λ = f1_x f2_y - f1_y f2_x`, of order `N - 1`.
pub fn jacobian_jet<S: Scalar>(f: &MapGerm<S>) -> Jet<S> {
    let f1x = f.f1.partial(Var::X);
    let f1y = f.f1.partial(Var::Y);
    let f2x = f.f2.partial(Var::X);
    let f2y = f.f2.partial(Var::Y);
    &(&f1x * &f2y) - &(&f1y * &f2x)
}

pub fn kernel_field<S: Scalar>(f: &MapGerm<S>) -> Result<KernelField<S>, RecognitionError> {
    kernel_field_with(f, KernelConvention::Gradient)
}

pub fn kernel_field_with<S: Scalar>(
    f: &MapGerm<S>,
    convention: KernelConvention,
) -> Result<KernelField<S>, RecognitionError> {
    let order = f.order().saturating_sub(1);
    match convention {
        KernelConvention::I23Euler => Ok(KernelField::i23_euler(order)),
        KernelConvention::Gradient => {
            let cr = corank(f);
            if cr == 2 {
                return Err(RecognitionError::NoKernelConvention);
            }
            let sc = f.scale();
            let f1x = f.f1.partial(Var::X);
            let f1y = f.f1.partial(Var::Y);
            let use_f1 = !(zero(&f1x.constant_term(), sc, 1) && zero(&f1y.constant_term(), sc, 1));
            let (gx, gy) = if use_f1 { (f1x, f1y) } else { (f.f2.partial(Var::X), f.f2.partial(Var::Y)) };
            Ok(KernelField { eta1: -gy, eta2: gx })
        }
    }
}

/// Recognition data at the origin of a corank-one germ.
pub fn criteria_report<S: Scalar>(f: &MapGerm<S>) -> Result<CriteriaReport<S>, RecognitionError> {
    let cr = corank(f);
    if cr != 1 {
        return Err(RecognitionError::Corank { expected: 1, found: cr });
    }
    let eta = kernel_field(f)?;
    Ok(report_with(f, &eta))
}

/// Like [`criteria_report`] but with a caller-supplied kernel field.
pub fn report_with<S: Scalar>(f: &MapGerm<S>, eta: &KernelField<S>) -> CriteriaReport<S> {
    let scale = f.scale();
    let lambda = jacobian_jet(f);
    let tower = eta.tower(&lambda, 4);
    let eta_tower: Vec<S> = tower[1..].iter().map(|j| j.constant_term()).collect();

    let lxx = lambda.coeff(2, 0) * S::from_int(2);
    let lxy = lambda.coeff(1, 1);
    let lyy = lambda.coeff(0, 2) * S::from_int(2);
    let hess_det = lxx.clone() * lyy.clone() - lxy.clone() * lxy.clone();
    let all_zero = [&lxx, &lxy, &lyy].iter().all(|v| zero(*v, scale, DEG_LAMBDA));
    let hess_rank = if all_zero {
        0
    } else if zero(&hess_det, scale, DEG_DET) {
        1
    } else {
        2
    };
    let (theta, theta3lambda0) = if hess_rank == 1 {
        let th = if zero(&lxx, scale, DEG_LAMBDA) && zero(&lxy, scale, DEG_LAMBDA) {
            [lyy.clone(), -lxy.clone()]
        } else {
            [-lxy.clone(), lxx.clone()]
        };
        let (t1, t2) = (th[0].clone(), th[1].clone());
        let cubic = lambda.coeff(3, 0) * t1.clone() * t1.clone() * t1.clone()
            + lambda.coeff(2, 1) * t1.clone() * t1.clone() * t2.clone()
            + lambda.coeff(1, 2) * t1.clone() * t2.clone() * t2.clone()
            + lambda.coeff(0, 3) * t2.clone() * t2.clone() * t2.clone();
        (Some(th), Some(cubic * S::from_int(6)))
    } else {
        (None, None)
    };

    CriteriaReport {
        lambda0: lambda.constant_term(),
        dlambda0: [lambda.coeff(1, 0), lambda.coeff(0, 1)],
        eta_tower,
        hessian: [[lxx, lxy.clone()], [lxy, lyy]],
        hess_det,
        hess_rank,
        theta,
        theta3lambda0,
        scale,
    }
}

/// Walks the criteria rows in order; the first satisfied row wins.
pub fn decide<S: Scalar>(r: &CriteriaReport<S>) -> SingularityClass {
    use SingularityClass::*;
    let sc = r.scale;
    let eta = |k: usize| &r.eta_tower[k - 1];
    let eta_zero = |k: usize| zero(eta(k), sc, DEG_LAMBDA + DEG_ETA_STEP * k as i32);

    if !eta_zero(1) {
        return Fold;
    }
    let dl_zero = r.dlambda0.iter().all(|v| zero(v, sc, DEG_LAMBDA));
    if !dl_zero {
        if !eta_zero(2) {
            return Cusp;
        }
        if !eta_zero(3) {
            return Swallowtail;
        }
        if !eta_zero(4) {
            return Butterfly;
        }
        return Unresolved("dλ(0) ≠ 0 but η^kλ(0) = 0 for k ≤ 4".into());
    }
    let det_sign = match r.hess_det.sign(sc.powi(DEG_DET)) {
        Some(s) => s,
        None => return Unresolved("sign of det H_λ(0) is not decidable".into()),
    };
    match (r.hess_rank, det_sign) {
        (2, 1) => Lips,
        (2, _) => {
            if !eta_zero(2) {
                Beaks
            } else if !eta_zero(3) {
                Gulls
            } else {
                Unresolved("det H_λ(0) < 0 with η²λ(0) = η³λ(0) = 0".into())
            }
        }
        (1, _) => {
            let t3 = r.theta3lambda0.as_ref().expect("rank one carries θ");
            if eta_zero(2) {
                Unresolved("rk H_λ(0) = 1 with η²λ(0) = 0".into())
            } else if zero(t3, sc, DEG_THETA3) {
                Unresolved("rk H_λ(0) = 1 with θ³λ(0) = 0".into())
            } else {
                Goose
            }
        }
        _ => Unresolved("H_λ(0) = 0".into()),
    }
}

pub fn classify_corank1<S: Scalar>(f: &MapGerm<S>) -> Result<SingularityClass, RecognitionError> {
    Ok(decide(&criteria_report(f)?))
}

/// Dispatches on the corank: regular, corank-one criteria, or the 2-jet pencil.
pub fn classify<S: Scalar>(f: &MapGerm<S>) -> SingularityClass {
    match corank(f) {
        0 => SingularityClass::Regular,
        1 => classify_corank1(f).expect("corank checked"),
        _ => classify_corank2_2jet(f).expect("corank checked"),
    }
}

/// Quadratic form `A x^2 + B xy + C y^2`.
type Quad<S> = [S; 3];

fn quad<S: Scalar>(j: &Jet<S>) -> Quad<S> {
    [j.coeff(2, 0), j.coeff(1, 1), j.coeff(0, 2)]
}

/// Coefficients `(P, R, T)` of `Δ(s, t) = P s^2 + 2R st + T t^2`, the discriminant
/// `B^2 - 4AC` of the pencil member `s Q1 + t Q2`.
pub fn pencil_discriminant<S: Scalar>(f: &MapGerm<S>) -> [S; 3] {
    let [a1, b1, c1] = quad(&f.f1);
    let [a2, b2, c2] = quad(&f.f2);
    let four = S::from_int(4);
    let two = S::from_int(2);
    let p = b1.clone() * b1.clone() - four.clone() * a1.clone() * c1.clone();
    let t = b2.clone() * b2.clone() - four * a2.clone() * c2.clone();
    let r = b1 * b2 - two * (a1 * c2 + a2 * c1);
    [p, r, t]
}

/// Sorts a corank-two germ by the pencil of its quadratic parts.
///
/// Indefinite discriminant: a hyperbolic pair, refined by the lowest odd power
/// surviving on each kernel line (see [`hyperbolic_pair_orders`]). Definite: the
/// deltoid 2-jet. Rank one: the `I2,3` K-orbit. Identically zero: unresolved.
pub fn classify_corank2_2jet<S: Scalar>(f: &MapGerm<S>) -> Result<SingularityClass, RecognitionError> {
    let cr = corank(f);
    if cr != 2 {
        return Err(RecognitionError::Corank { expected: 2, found: cr });
    }
    let sc = f.scale();
    let [p, r, t] = pencil_discriminant(f);
    let det = p.clone() * t.clone() - r.clone() * r.clone();
    let det_sign = match det.sign(sc.powi(8)) {
        Some(s) => s,
        None => return Ok(SingularityClass::Unresolved("pencil discriminant is symbolic".into())),
    };
    let all_zero = [&p, &r, &t].iter().all(|v| zero(*v, sc, 4));
    Ok(match det_sign {
        1 => {
            if p.sign(sc.powi(4)) == Some(1) || t.sign(sc.powi(4)) == Some(1) {
                SingularityClass::DeltoidTwoJet
            } else {
                SingularityClass::Unresolved("negative definite pencil discriminant".into())
            }
        }
        -1 => {
            let fl = f.map(|c| c.as_f64().unwrap_or(f64::NAN));
            match hyperbolic_pair_orders(&fl) {
                Some((3, 3)) => SingularityClass::Sharksfin,
                Some((3, 5)) | Some((5, 3)) => SingularityClass::OddSharksfin,
                _ => SingularityClass::HyperbolicPairDegenerate,
            }
        }
        _ if all_zero => SingularityClass::Unresolved("quadratic pencil is degenerate".into()),
        _ => SingularityClass::I23Candidate,
    })
}

/// Root directions `(s, t)` of `P s^2 + 2R st + T t^2` when it is indefinite.
fn pencil_roots(p: f64, r: f64, t: f64) -> [(f64, f64); 2] {
    let disc = (r * r - p * t).max(0.0).sqrt();
    if p.abs().max(t.abs()) <= 1e-12 * r.abs() {
        return [(1.0, 0.0), (0.0, 1.0)];
    }
    if t.abs() >= p.abs() {
        // s = 1, t = (-R ± sqrt) / T
        [(t, -r + disc), (t, -r - disc)]
    } else {
        // t = 1, s = (-R ± sqrt) / P
        [(-r + disc, p), (-r - disc, p)]
    }
}

/// Writes the perfect square `A x^2 + B xy + C y^2` as `κ ℓ^2`; returns `ℓ` coefficients.
fn square_root_line(q: [f64; 3]) -> [f64; 2] {
    let [a, b, c] = q;
    if a.abs() >= c.abs() {
        [1.0, b / (2.0 * a)]
    } else {
        [b / (2.0 * c), 1.0]
    }
}

/// For a hyperbolic pair, reduces the germ linearly to `(κ1 u^2 + …, κ2 v^2 + …)` and
/// returns, for each component restricted to the other's kernel line, the least power
/// that survives after removing powers of the other component. `None` when the input
/// is not a hyperbolic pair.
pub fn hyperbolic_pair_orders(f: &MapGerm<f64>) -> Option<(usize, usize)> {
    let sc = f.scale();
    let [p, r, t] = pencil_discriminant(f);
    if p * t - r * r >= 0.0 {
        return None;
    }
    let roots = pencil_roots(p, r, t);
    let q1 = quad(&f.f1);
    let q2 = quad(&f.f2);
    let member =
        |(s, u): (f64, f64)| -> [f64; 3] { [s * q1[0] + u * q2[0], s * q1[1] + u * q2[1], s * q1[2] + u * q2[2]] };
    let d1 = member(roots[0]);
    let d2 = member(roots[1]);
    let l1 = square_root_line(d1);
    let l2 = square_root_line(d2);
    // (u, v) = L (x, y); invert for the source substitution.
    let det = l1[0] * l2[1] - l1[1] * l2[0];
    if det.abs() < 1e-12 {
        return None;
    }
    let order = f.order();
    let x_of = Jet::from_terms(order, [(1, 0, l2[1] / det), (0, 1, -l1[1] / det)]);
    let y_of = Jet::from_terms(order, [(1, 0, -l2[0] / det), (0, 1, l1[0] / det)]);
    let g1 = &f.f1.scale(&roots[0].0) + &f.f2.scale(&roots[0].1);
    let g2 = &f.f1.scale(&roots[1].0) + &f.f2.scale(&roots[1].1);
    let h1 = g1.compose(&x_of, &y_of).ok()?;
    let h2 = g2.compose(&x_of, &y_of).ok()?;
    let tol = 1e-9 * sc.powi(3);
    // h1 restricted to u = 0 is a series in v; h2 restricted to v = 0 a series in u.
    let h1_line: Vec<f64> = (0..=order).map(|k| h1.coeff(0, k)).collect();
    let h2_on_v: Vec<f64> = (0..=order).map(|k| h2.coeff(0, k)).collect();
    let h2_line: Vec<f64> = (0..=order).map(|k| h2.coeff(k, 0)).collect();
    let h1_on_u: Vec<f64> = (0..=order).map(|k| h1.coeff(k, 0)).collect();
    let k1 = odd_order(h1_line, &h2_on_v, tol)?;
    let k2 = odd_order(h2_line, &h1_on_u, tol)?;
    Some((k1, k2))
}

/// Least degree surviving in `h` after subtracting polynomials in `g`, where
/// `g = α s^2 + …` with `α ≠ 0`. Returns `usize::MAX` if nothing survives up to the order.
fn odd_order(mut h: Vec<f64>, g: &[f64], tol: f64) -> Option<usize> {
    let n = h.len();
    if g.len() < 3 || g[2].abs() <= tol {
        return None;
    }
    let mut powers = vec![vec![0.0; n]];
    powers[0][0] = 1.0;
    for m in 1..=n / 2 {
        let prev = &powers[m - 1];
        let mut next = vec![0.0; n];
        for (i, &a) in prev.iter().enumerate() {
            for (j, &b) in g.iter().enumerate() {
                if i + j < n {
                    next[i + j] += a * b;
                }
            }
        }
        powers.push(next);
    }
    for k in 1..n {
        if h[k].abs() <= tol {
            continue;
        }
        if k % 2 == 1 {
            return Some(k);
        }
        let m = k / 2;
        let lead = powers[m][k];
        let factor = h[k] / lead;
        for i in 0..n {
            h[i] -= factor * powers[m][i];
        }
    }
    Some(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MPoly;
    use crate::scalar::{qi, Q};
    use num_traits::Zero;

    const N: usize = crate::jets::DEFAULT_ORDER;

    fn germ(f1: &[(usize, usize, i64)], f2: &[(usize, usize, i64)]) -> MapGerm<Q> {
        let j = |t: &[(usize, usize, i64)]| Jet::from_terms(N, t.iter().map(|&(i, k, c)| (i, k, qi(c))));
        MapGerm::new(j(f1), j(f2)).unwrap()
    }

    fn fold() -> MapGerm<Q> {
        germ(&[(1, 0, 1)], &[(0, 2, 1)])
    }

    #[test]
    fn corank_examples() {
        assert_eq!(corank(&fold()), 1);
        assert_eq!(corank(&germ(&[(2, 0, 1), (0, 3, 1)], &[(1, 1, 1)])), 2);
        assert_eq!(corank(&germ(&[(1, 0, 1)], &[(0, 1, 1)])), 0);
    }

    #[test]
    fn rejects_constant_terms() {
        let f1 = Jet::from_terms(N, [(0, 0, qi(1)), (1, 0, qi(1))]);
        assert_eq!(MapGerm::new(f1, Jet::y(N)).unwrap_err(), RecognitionError::NotOriginPreserving(1));
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian_jet(&fold()), Jet::from_terms(N - 1, [(0, 1, qi(2))]));
        let i23 = germ(&[(2, 0, 1), (0, 3, 1)], &[(1, 1, 1)]);
        assert_eq!(jacobian_jet(&i23), Jet::from_terms(N - 1, [(2, 0, qi(2)), (0, 3, qi(-3))]));
    }

    /// The I2,3 unfolding with symbolic parameters a, b, c (variables 0, 1, 2).
    fn symbolic_g() -> MapGerm<MPoly> {
        let (a, b, c) = (MPoly::var(0), MPoly::var(1), MPoly::var(2));
        let f1 = Jet::from_terms(N, [(2, 0, MPoly::int(1)), (0, 3, MPoly::int(1)), (1, 0, a), (0, 1, b), (0, 2, c)]);
        let f2 = Jet::from_terms(N, [(1, 1, MPoly::int(1))]);
        MapGerm { f1, f2 }
    }

    #[test]
    fn symbolic_jacobian_of_i23_unfolding() {
        let g = symbolic_g();
        let (a, b, c) = (MPoly::var(0), MPoly::var(1), MPoly::var(2));
        // x(2x + a) - y(3y^2 + 2cy + b)
        let expect = Jet::from_terms(
            N - 1,
            [(2, 0, MPoly::int(2)), (1, 0, a), (0, 3, MPoly::int(-3)), (0, 2, -(c.scale(&qi(2)))), (0, 1, -b)],
        );
        assert_eq!(jacobian_jet(&g), expect);
    }

    #[test]
    fn symbolic_kernel_field_of_i23_unfolding() {
        let g = symbolic_g();
        let eta = kernel_field(&g).unwrap();
        let (a, b, c) = (MPoly::var(0), MPoly::var(1), MPoly::var(2));
        let eta1 = Jet::from_terms(N - 1, [(0, 2, MPoly::int(-3)), (0, 1, -(c.scale(&qi(2)))), (0, 0, -b)]);
        let eta2 = Jet::from_terms(N - 1, [(1, 0, MPoly::int(2)), (0, 0, a)]);
        assert_eq!(eta, KernelField { eta1, eta2 });
    }

    #[test]
    fn fold_kernel_is_d_dy() {
        let eta = kernel_field(&fold()).unwrap();
        assert_eq!(eta.eta1, Jet::zero(N - 1));
        assert_eq!(eta.eta2, Jet::constant(N - 1, qi(1)));
    }

    #[test]
    fn corank_two_needs_a_convention() {
        let i23 = germ(&[(2, 0, 1), (0, 3, 1)], &[(1, 1, 1)]);
        assert_eq!(kernel_field(&i23).unwrap_err(), RecognitionError::NoKernelConvention);
        let eta = kernel_field_with(&i23, KernelConvention::I23Euler).unwrap();
        assert_eq!(eta.eta1, -Jet::x(N - 1));
        assert_eq!(eta.eta2, Jet::y(N - 1));
    }

    #[test]
    fn goose_report() {
        let r = criteria_report(&germ(&[(1, 0, 1)], &[(0, 3, 1), (3, 1, 1)])).unwrap();
        assert_eq!(r.dlambda0, [qi(0), qi(0)]);
        assert_eq!(r.hess_rank, 1);
        assert_eq!(r.eta_tower[1], qi(6));
        assert!(!r.theta3lambda0.clone().unwrap().is_zero());
        assert_eq!(decide(&r), SingularityClass::Goose);
    }

    #[test]
    fn cusp_report() {
        let r = criteria_report(&germ(&[(1, 0, 1)], &[(1, 1, 1), (0, 3, 1)])).unwrap();
        assert_eq!(r.eta_tower[0], qi(0));
        assert_eq!(r.eta_tower[1], qi(6));
        assert_eq!(r.dlambda0, [qi(1), qi(0)]);
        let r = criteria_report(&fold()).unwrap();
        assert_eq!(r.eta_tower[0], qi(2));
    }

    #[test]
    fn criteria_report_requires_corank_one() {
        let i23 = germ(&[(2, 0, 1), (0, 3, 1)], &[(1, 1, 1)]);
        assert_eq!(criteria_report(&i23).unwrap_err(), RecognitionError::Corank { expected: 1, found: 2 });
    }

    #[test]
    fn lips_and_beaks_by_hessian_sign() {
        let lips = criteria_report(&germ(&[(1, 0, 1)], &[(0, 3, 1), (2, 1, 1)])).unwrap();
        let beaks = criteria_report(&germ(&[(1, 0, 1)], &[(0, 3, 1), (2, 1, -1)])).unwrap();
        // λ = 3y^2 ± x^2, so H = diag(±2, 6).
        assert_eq!(lips.hess_det, qi(12));
        assert_eq!(beaks.hess_det, qi(-12));
        assert_eq!(decide(&lips), SingularityClass::Lips);
        assert_eq!(decide(&beaks), SingularityClass::Beaks);
    }

    #[test]
    fn corank_one_normal_forms() {
        use SingularityClass::*;
        let cases: Vec<(MapGerm<Q>, SingularityClass)> = vec![
            (fold(), Fold),
            (germ(&[(1, 0, 1)], &[(1, 1, 1), (0, 3, 1)]), Cusp),
            (germ(&[(1, 0, 1)], &[(1, 1, 1), (0, 4, 1)]), Swallowtail),
            (germ(&[(1, 0, 1)], &[(1, 1, 1), (0, 5, 1), (0, 7, 1)]), Butterfly),
            (germ(&[(1, 0, 1)], &[(1, 2, 1), (0, 4, 1), (0, 5, 1)]), Gulls),
            (germ(&[(1, 0, 1)], &[(0, 3, 1), (3, 1, 1)]), Goose),
        ];
        for (g, want) in cases {
            assert_eq!(classify_corank1(&g).unwrap(), want);
        }
    }

    #[test]
    fn degenerate_corank_one_is_unresolved() {
        // (x, xy + y^6): η^kλ(0) = 0 for k ≤ 4.
        let g = germ(&[(1, 0, 1)], &[(1, 1, 1), (0, 6, 1)]);
        assert!(classify_corank1(&g).unwrap().is_unresolved());
        // (x, y^3): λ = 3y^2, rank-one Hessian with θ³λ = 0.
        let g = germ(&[(1, 0, 1)], &[(0, 3, 1)]);
        assert!(classify_corank1(&g).unwrap().is_unresolved());
    }

    #[test]
    fn fallback_kernel_uses_second_component() {
        // (y^2 + x^3 ... , x): ∇f1(0) = 0.
        let g = germ(&[(0, 2, 1)], &[(1, 0, 1)]);
        let eta = kernel_field(&g).unwrap();
        assert_eq!(eta.eta1, Jet::zero(N - 1));
        assert_eq!(eta.eta2, Jet::constant(N - 1, qi(1)));
        assert_eq!(classify(&g), SingularityClass::Fold);
    }

    #[test]
    fn corank_two_normal_forms() {
        use SingularityClass::*;
        let sharksfin = germ(&[(2, 0, 1), (0, 3, 1)], &[(0, 2, 1), (3, 0, 1)]);
        let deltoid = germ(&[(2, 0, 1), (0, 2, -1), (3, 0, 1)], &[(1, 1, 1)]);
        let i23 = germ(&[(2, 0, 1), (0, 3, 1)], &[(1, 1, 1)]);
        let odd = germ(&[(2, 0, 1), (0, 5, 1)], &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(classify_corank2_2jet(&sharksfin).unwrap(), Sharksfin);
        assert_eq!(classify_corank2_2jet(&deltoid).unwrap(), DeltoidTwoJet);
        assert_eq!(classify_corank2_2jet(&i23).unwrap(), I23Candidate);
        assert_eq!(classify_corank2_2jet(&odd).unwrap(), OddSharksfin);
        // Even powers on a kernel line are absorbed by the other component.
        let odd_with_y4 = germ(&[(2, 0, 1), (0, 4, 3), (0, 5, 1)], &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(classify_corank2_2jet(&odd_with_y4).unwrap(), OddSharksfin);
        let flat = germ(&[(2, 0, 1)], &[(2, 0, 2)]);
        assert!(classify_corank2_2jet(&flat).unwrap().is_unresolved());
        assert_eq!(classify(&fold()), Fold);
        assert_eq!(classify(&germ(&[(1, 0, 1)], &[(0, 1, 1)])), Regular);
    }

    #[test]
    fn hyperbolic_pair_in_rotated_coordinates() {
        // (xy, x^2 + y^2/10 + y^3): an elliptic-crosscap projection.
        let f1 = Jet::from_terms(N, [(1, 1, 1.0)]);
        let f2 = Jet::from_terms(N, [(2, 0, 1.0), (0, 2, 0.1), (0, 3, 1.0)]);
        let g = MapGerm::new(f1, f2).unwrap();
        assert_eq!(classify(&g), SingularityClass::Sharksfin);
        let f2 = Jet::from_terms(N, [(2, 0, 1.0), (0, 2, -0.1), (0, 3, 1.0)]);
        let g = MapGerm::new(Jet::from_terms(N, [(1, 1, 1.0)]), f2).unwrap();
        assert_eq!(classify(&g), SingularityClass::DeltoidTwoJet);
    }
}
