//! Parallel projections of crosscaps and planar caustics of the D₅ family.
//!
//! The crosscap family `(y, xy + g, α(t)y² + x² + φ)` is projected along `(1, v, w)`;
//! the resulting plane map is the I₂,₃ unfolding in disguise, with
//! `(a, b, c) = (2v, −w, t)`. Parabolic and flecnodal curves are the source loci where
//! some projection is beaks/lips or swallowtail, obtained by eliminating `(v, w)`.

use crate::contour::{apparent_contour, dist_pt, ContourDiagram, ContourError, Counts, PlaneMap, Polyline, Window};
use crate::poly::{determinant, resultant, MPoly, Monomial, MAX_VARS};
use crate::recognition::MapGerm;
use crate::scalar::{Scalar, Q};
use crate::strata::systems::{poly_to_jet_f64, poly_to_jet_q};
use crate::strata::{section_curves, SectionWindow, StratumKind, UnfoldingId};
use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const GX: usize = 0;
pub const GY: usize = 1;
/// View-direction parameters and the family parameter of the crosscap family.
pub const GV: usize = 2;
pub const GW: usize = 3;
pub const GT: usize = 4;

/// Default largest arclength between consecutive pictures of a sweep.
pub const DEFAULT_SWEEP_STEP: f64 = 3e-3;

/// Order of the power series that replaces rational slice equations and curve branches.
pub const SERIES_ORDER: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("crosscap family violates its jet conditions: {0}")]
    Family(String),
    #[error("elimination of the view direction degenerated ({0})")]
    Degenerate(&'static str),
    #[error("caustic slice is not transverse on the window")]
    NotTransverse,
    #[error("frame spacing too coarse: two strata crossings between frames {0} and {1}")]
    Refine(usize, usize),
    #[error("path needs at least one point")]
    EmptyPath,
    #[error(transparent)]
    Contour(#[from] ContourError),
}

fn mono(i: u8, j: u8) -> Monomial {
    let mut m = [0; MAX_VARS];
    m[GX] = i;
    m[GY] = j;
    m
}

fn xy_term(i: u8, j: u8, c: Q) -> MPoly {
    MPoly::term(mono(i, j), c)
}

/// The surface family `(y, xy + g(x,y,t), α(t)y² + x² + φ(x,y,t))` near a crosscap.
#[derive(Clone, Debug, PartialEq)]
pub struct CrosscapFamily {
    /// `α` as a polynomial in `t` (variable [`GT`]).
    pub alpha: MPoly,
    pub g: MPoly,
    pub phi: MPoly,
}

impl CrosscapFamily {
    /// `g = 0`, `φ = y³`, `α = t`.
    pub fn typical() -> Self {
        Self::with_coeffs(Q::one(), Q::zero(), Q::zero())
    }

    /// `g = d₄x⁴`, `φ = c₀₃y³ + c₁₂xy²`, `α = t`.
    pub fn with_coeffs(c03: Q, c12: Q, d4: Q) -> Self {
        Self { alpha: MPoly::var(GT), g: xy_term(4, 0, d4), phi: &xy_term(0, 3, c03) + &xy_term(1, 2, c12) }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let low = |p: &MPoly| p.terms().any(|(m, _)| m[GX] as u32 + m[GY] as u32 + m[GT] as u32 <= 2);
        let foreign = |p: &MPoly| {
            p.terms().any(|(m, _)| m.iter().enumerate().any(|(k, &e)| e > 0 && k != GX && k != GY && k != GT))
        };
        if foreign(&self.g)
            || foreign(&self.phi)
            || self.alpha.terms().any(|(m, _)| m.iter().enumerate().any(|(k, &e)| e > 0 && k != GT))
        {
            return Err(GeometryError::Family("only x, y and t may appear".into()));
        }
        if low(&self.g) || low(&self.phi) {
            return Err(GeometryError::Family("g and φ must have vanishing 2-jet".into()));
        }
        if !self.alpha.coeff(&[0; MAX_VARS]).is_zero() {
            return Err(GeometryError::Family("α(0) must vanish".into()));
        }
        let g0 = self.g.substitute(GT, &MPoly::zero());
        if g0.degree_in(GY).unwrap_or(0) > 0 {
            return Err(GeometryError::Family("g(x, y, 0) must not depend on y".into()));
        }
        Ok(())
    }
}

/// The projection of the family along `(1, v, w)`, as polynomials in `x, y, v, w, t`.
pub fn projection_map(cf: &CrosscapFamily) -> (MPoly, MPoly) {
    let x = MPoly::var(GX);
    let y = MPoly::var(GY);
    let p1 = &(&(&x * &y) - &(&MPoly::var(GV) * &y)) + &cf.g;
    let p2 = &(&(&(&x * &x) + &(&cf.alpha * &(&y * &y))) - &(&MPoly::var(GW) * &y)) + &cf.phi;
    (p1, p2)
}

/// Parameters of the I₂,₃ unfolding matching the view direction `(v, w)` at `t`.
pub fn g_parameters(v: f64, w: f64, t: f64) -> [f64; 3] {
    [2.0 * v, -w, t]
}

fn point5(v: f64, w: f64, t: f64) -> [f64; MAX_VARS] {
    let mut p = [0.0; MAX_VARS];
    p[GV] = v;
    p[GW] = w;
    p[GT] = t;
    p
}

/// The plane-to-plane germ of the projection along `(1, v, w)` at the crosscap point.
pub fn projection_germ(cf: &CrosscapFamily, v: f64, w: f64, t: f64) -> MapGerm<f64> {
    let (p1, p2) = projection_map(cf);
    let pt = point5(v, w, t);
    MapGerm { f1: poly_to_jet_f64(&p1, &pt, SERIES_ORDER), f2: poly_to_jet_f64(&p2, &pt, SERIES_ORDER) }
}

fn fix_params(p: &MPoly, v: &Q, w: &Q, t: &Q) -> MPoly {
    p.substitute(GV, &MPoly::constant(v.clone()))
        .substitute(GW, &MPoly::constant(w.clone()))
        .substitute(GT, &MPoly::constant(t.clone()))
}

/// Exact version of [`projection_germ`].
pub fn projection_germ_q(cf: &CrosscapFamily, v: &Q, w: &Q, t: &Q) -> MapGerm<Q> {
    let (p1, p2) = projection_map(cf);
    MapGerm {
        f1: poly_to_jet_q(&fix_params(&p1, v, w, t), SERIES_ORDER),
        f2: poly_to_jet_q(&fix_params(&p2, v, w, t), SERIES_ORDER),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveLabel {
    Parabolic,
    Flecnodal,
    DoublePoint,
    Other,
}

/// An implicit curve germ `poly(x, y) = 0` through the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurveGerm {
    pub poly: MPoly,
    pub label: CurveLabel,
}

impl PlaneCurveGerm {
    pub fn new(poly: MPoly, label: CurveLabel) -> Self {
        Self { poly, label }
    }
}

/// Splits `p` as `p1·var + p0`; `None` unless `p` is affine in `var`.
fn affine_in(p: &MPoly, var: usize) -> Option<(MPoly, MPoly)> {
    let c = p.coeffs_in(var);
    match c.len() {
        0 => Some((MPoly::zero(), MPoly::zero())),
        1 => Some((MPoly::zero(), c[0].clone())),
        2 => Some((c[1].clone(), c[0].clone())),
        _ => None,
    }
}

/// `p` with `var := −num/den`, cleared of the denominator.
fn eliminate_affine(p: &MPoly, var: usize, den: &MPoly, num: &MPoly) -> MPoly {
    let c = p.coeffs_in(var);
    let d = c.len().saturating_sub(1) as u32;
    let minus_num = -num.clone();
    c.iter()
        .enumerate()
        .fold(MPoly::zero(), |acc, (k, ck)| &acc + &(&(ck * &minus_num.pow(k as u32)) * &den.pow(d - k as u32)))
}

fn scaled_by(p: &MPoly, m: Monomial, target: Q) -> Option<MPoly> {
    let c = p.coeff(&m);
    (!c.is_zero()).then(|| p.scale(&(target / c)))
}

/// Parabolic and flecnodal curves of the family at parameter `t`.
///
/// The parabolic curve is where `λ = λₓ = λ_y = 0` for some view direction; since `λ`
/// is affine in `(v, w)`, this is a 3×3 determinant. The flecnodal curve is where
/// `λ = ηλ = η²λ = 0` with `η = (−∂P₁/∂y, ∂P₁/∂x)`; `w` is eliminated through `λ` and
/// `v` by a resultant, and monomial factors in `(x, y)` (where `η` degenerates) are
/// removed while `t` is still a free variable, so components that only become monomial
/// at a special `t` survive.
/// The parabolic polynomial is scaled to `x² + …`, the flecnodal one to `4x²y + …`.
pub fn characteristic_curves(cf: &CrosscapFamily, t: &Q) -> Result<(PlaneCurveGerm, PlaneCurveGerm), GeometryError> {
    cf.validate()?;
    let (p1, p2) = projection_map(cf);
    let tt = MPoly::constant(t.clone());
    let lam = &(&p1.partial(GX) * &p2.partial(GY)) - &(&p1.partial(GY) * &p2.partial(GX));

    let mut rows = Vec::new();
    for e in [lam.clone(), lam.partial(GX), lam.partial(GY)] {
        let (ev, rest) = affine_in(&e, GV).ok_or(GeometryError::Degenerate("λ is not affine in v"))?;
        let (ew, e0) = affine_in(&rest, GW).ok_or(GeometryError::Degenerate("λ is not affine in w"))?;
        if ev.degree_in(GW).unwrap_or(0) > 0 {
            return Err(GeometryError::Degenerate("λ has a vw term"));
        }
        rows.push(vec![ev, ew, e0]);
    }
    let par = determinant(rows).substitute(GT, &tt);
    if par.is_zero() {
        return Err(GeometryError::Degenerate("parabolic determinant vanishes"));
    }
    let par = scaled_by(&par, mono(2, 0), Q::one()).unwrap_or(par);

    let eta = |f: &MPoly| &(&(-p1.partial(GY)) * &f.partial(GX)) + &(&p1.partial(GX) * &f.partial(GY));
    let l1 = eta(&lam);
    let l2 = eta(&l1);
    let (lw, l0) = affine_in(&lam, GW).ok_or(GeometryError::Degenerate("λ is not affine in w"))?;
    if lw.is_zero() {
        return Err(GeometryError::Degenerate("λ does not involve w"));
    }
    let a = eliminate_affine(&l1, GW, &lw, &l0);
    let b = eliminate_affine(&l2, GW, &lw, &l0);
    let r = resultant(&a, &b, GV);
    if r.is_zero() {
        return Err(GeometryError::Degenerate("flecnodal resultant vanishes"));
    }
    let (mut fl, _) = r.strip_monomial(&[GX, GY]);
    if !lw.is_constant() {
        let (rest, _) = fl.strip_factor(&lw);
        fl = rest;
    }
    let fl = fl.substitute(GT, &tt);
    if fl.is_zero() {
        return Err(GeometryError::Degenerate("flecnodal polynomial vanishes at this t"));
    }
    let fl = scaled_by(&fl, mono(2, 1), Q::from_int(4)).or_else(|| scaled_by(&fl, mono(2, 0), Q::one())).unwrap_or(fl);
    Ok((PlaneCurveGerm::new(par, CurveLabel::Parabolic), PlaneCurveGerm::new(fl, CurveLabel::Flecnodal)))
}

/// Dense `f64` coefficients `c[i][j]` of `x^i y^j`.
fn dense(p: &MPoly) -> Vec<Vec<f64>> {
    let dx = p.degree_in(GX).unwrap_or(0) as usize;
    let dy = p.degree_in(GY).unwrap_or(0) as usize;
    let mut c = vec![vec![0.0; dy + 1]; dx + 1];
    for (m, q) in p.terms() {
        c[m[GX] as usize][m[GY] as usize] += q.to_f64().unwrap_or(f64::NAN);
    }
    c
}

fn swap_xy(c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ny = c.first().map_or(0, |r| r.len());
    (0..ny).map(|j| c.iter().map(|r| r[j]).collect()).collect()
}

fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if *ai == 0.0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `h(s(u), u)` as a power series in `u`, where `h` is given by dense coefficients with
/// the graph variable first.
fn compose(c: &[Vec<f64>], s: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    let mut spow = vec![0.0; n + 1];
    spow[0] = 1.0;
    for row in c {
        for (j, cij) in row.iter().enumerate() {
            if j <= n {
                for k in 0..=n - j {
                    out[k + j] += cij * spow[k];
                }
            }
        }
        spow = series_mul(&spow, s, n);
    }
    out
}

/// Which coordinate a branch is a graph over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphAxis {
    /// `x = s(y)`.
    OverY,
    /// `y = s(x)`.
    OverX,
}

/// A smooth branch through the origin as a power series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub axis: GraphAxis,
    /// Unit tangent direction `(dx, dy)`.
    pub tangent: [f64; 2],
    /// `s₀ = 0, s₁, …, s_N`.
    pub coeffs: Vec<f64>,
}

fn real_roots(p: &[f64]) -> Vec<(f64, bool)> {
    // Coefficients from the constant term upwards; returns roots with a simplicity flag.
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| *c == 0.0) {
        p.pop();
    }
    let d = p.len().saturating_sub(1);
    if d == 0 {
        return vec![];
    }
    let lead = p[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -p[i] / lead;
    }
    let scale = p.iter().fold(0.0f64, |a, c| a.max(c.abs())) / lead.abs();
    let tol = 1e-9 * (1.0 + scale);
    let eig = m.complex_eigenvalues();
    let mut roots: Vec<f64> = eig.iter().filter(|z| z.im.abs() <= tol).map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    roots
        .iter()
        .map(|&r| {
            let close = eig.iter().filter(|z| (z.re - r).abs() <= 1e-6 * (1.0 + r.abs()) && z.im.abs() <= 1e-6).count();
            (r, close == 1)
        })
        .fold(Vec::new(), |mut acc: Vec<(f64, bool)>, (r, simple)| {
            if !acc.iter().any(|(q, _)| (q - r).abs() <= 1e-6 * (1.0 + r.abs())) {
                acc.push((r, simple));
            }
            acc
        })
}

/// Smooth branches of `{h = 0}` at the origin, expanded to order `n`.
///
/// Fails with the tangent directions that are multiple (singular branches).
pub fn curve_branches(h: &MPoly, n: usize) -> Result<Vec<Branch>, Vec<[f64; 2]>> {
    let c = dense(h);
    let m = h.terms().map(|(mo, _)| mo[GX] as usize + mo[GY] as usize).min().unwrap_or(0);
    let coef = |i: usize, j: usize| c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0);
    // p(s) = h_m(s, 1) for the directions (s, 1).
    let p: Vec<f64> = (0..=m).map(|i| coef(i, m - i)).collect();
    let mut out = Vec::new();
    let mut bad = Vec::new();
    let unit = |v: [f64; 2]| {
        let l = v[0].hypot(v[1]);
        [v[0] / l, v[1] / l]
    };
    for (s1, simple) in real_roots(&p) {
        if !simple {
            bad.push(unit([s1, 1.0]));
            continue;
        }
        out.push(branch_series(&c, m, s1, n, GraphAxis::OverY, unit([s1, 1.0])));
    }
    // Multiplicity of the horizontal direction (1, 0).
    let horiz = (0..=m).rev().take_while(|&i| p[i] == 0.0).count();
    if horiz == 1 {
        let sw = swap_xy(&c);
        out.push(branch_series(&sw, m, 0.0, n, GraphAxis::OverX, [1.0, 0.0]));
    } else if horiz > 1 {
        bad.push([1.0, 0.0]);
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(bad)
    }
}

fn branch_series(c: &[Vec<f64>], m: usize, s1: f64, n: usize, axis: GraphAxis, tangent: [f64; 2]) -> Branch {
    let mut s = vec![0.0; n + 1];
    if n >= 1 {
        s[1] = s1;
    }
    // h_x along the branch starts with p'(s₁)·u^(m−1).
    let dp: f64 = (1..=m)
        .map(|i| i as f64 * c.get(i).and_then(|r| r.get(m - i)).copied().unwrap_or(0.0) * s1.powi(i as i32 - 1))
        .sum();
    let top = n + m;
    for k in 2..=n {
        let r = compose(c, &s, top);
        s[k] = -r[k + m - 1] / dp;
    }
    Branch { axis, tangent, coeffs: s }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ContactOrder {
    Exact(u32),
    /// The branches agree to the working order.
    AtLeast(u32),
    /// Branch extraction failed; the order is at least this.
    Unresolved(u32),
}

/// How branches of two curves are matched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BranchPairing {
    /// Each branch of the first curve with the branch of the second of nearest tangent.
    #[default]
    NearestTangent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchContact {
    pub tangent: [f64; 2],
    pub other_tangent: [f64; 2],
    pub order: ContactOrder,
}

/// Contact orders between paired smooth branches of two curve germs.
pub fn contact_order(c1: &PlaneCurveGerm, c2: &PlaneCurveGerm, pairing: BranchPairing, n: usize) -> Vec<BranchContact> {
    let BranchPairing::NearestTangent = pairing;
    let (b1, b2) = match (curve_branches(&c1.poly, n), curve_branches(&c2.poly, n)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            let dirs = a.err().or(b.err()).unwrap_or_default();
            return dirs
                .into_iter()
                .map(|d| BranchContact { tangent: d, other_tangent: d, order: ContactOrder::Unresolved(2) })
                .collect();
        }
    };
    let angle = |a: [f64; 2], b: [f64; 2]| (a[0] * b[1] - a[1] * b[0]).abs();
    b1.iter()
        .filter_map(|p| {
            let q = b2.iter().min_by(|x, y| angle(p.tangent, x.tangent).total_cmp(&angle(p.tangent, y.tangent)))?;
            let order = if angle(p.tangent, q.tangent) > 1e-9 || p.axis != q.axis {
                ContactOrder::Exact(1)
            } else {
                let differs = |k: usize| {
                    let size = p.coeffs[k].abs().max(q.coeffs[k].abs()).max(1e-6);
                    (p.coeffs[k] - q.coeffs[k]).abs() > 1e-8 * size
                };
                match (1..=n).find(|&k| differs(k)) {
                    Some(k) => ContactOrder::Exact(k as u32),
                    None => ContactOrder::AtLeast(n as u32 + 1),
                }
            };
            Some(BranchContact { tangent: p.tangent, other_tangent: q.tangent, order })
        })
        .collect()
}

fn antiderivative_y(p: &MPoly) -> MPoly {
    p.terms().fold(MPoly::zero(), |acc, (m, c)| {
        let mut m2 = *m;
        m2[GY] += 1;
        &acc + &MPoly::term(m2, c / Q::from_int(m2[GY] as i64))
    })
}

/// Zero set of `h` on a window: traced branches plus isolated real points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveCensus {
    pub branches: Vec<Polyline>,
    /// Smallest `|∇h|` on each branch, relative to the largest `|h|` on the grid per unit length.
    pub branch_min_gradient: Vec<f64>,
    pub isolated_points: Vec<[f64; 2]>,
}

/// Sign census of `h(x, y)` on the window grid.
///
/// Branches come from marching squares. Isolated points are grid minima of `|h|` with no
/// sign change around them, refined by Newton's method on `∇h = 0` and kept when `h`
/// vanishes there and the Hessian is definite.
pub fn curve_census(h: &MPoly, w: &Window) -> Result<CurveCensus, GeometryError> {
    w.validate()?;
    let map = PlaneMap::from_mpolys(&MPoly::var(GX), &antiderivative_y(h))?;
    let branches = crate::contour::singular_set_trace(&map, w)?;
    let n = w.resolution;
    let cell = w.cell();
    let at = |i: usize, j: usize| {
        [w.xmin + (w.xmax - w.xmin) * i as f64 / n as f64, w.ymin + (w.ymax - w.ymin) * j as f64 / n as f64]
    };
    let hv = |p: [f64; 2]| map.lambda(p);
    let grid: Vec<Vec<f64>> = (0..=n).into_par_iter().map(|i| (0..=n).map(|j| hv(at(i, j))).collect()).collect();
    let scale = grid.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let span = (w.xmax - w.xmin).max(w.ymax - w.ymin);
    let grad = |p: [f64; 2]| map.grad_lambda(p);
    let branch_min_gradient = branches
        .iter()
        .map(|b| b.points.iter().map(|p| grad(*p)[0].hypot(grad(*p)[1])).fold(f64::INFINITY, f64::min) * span / scale)
        .collect();
    let hxx = |p: [f64; 2]| {
        let e = 1e-6 * (1.0 + p[0].abs());
        [
            (grad([p[0] + e, p[1]])[0] - grad([p[0] - e, p[1]])[0]) / (2.0 * e),
            (grad([p[0], p[1] + e])[0] - grad([p[0], p[1] - e])[0]) / (2.0 * e),
            (grad([p[0], p[1] + e])[1] - grad([p[0], p[1] - e])[1]) / (2.0 * e),
        ]
    };
    let mut isolated: Vec<[f64; 2]> = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let v = grid[i][j].abs();
            let mut ok = true;
            let sg = grid[i][j] >= 0.0;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    let u = grid[(i as i64 + di) as usize][(j as i64 + dj) as usize];
                    if (di, dj) != (0, 0) && (u.abs() < v || (u >= 0.0) != sg) {
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            let mut p = at(i, j);
            for _ in 0..30 {
                let g = grad(p);
                let [a, b, d] = hxx(p);
                let det = a * d - b * b;
                if det.abs() < f64::MIN_POSITIVE {
                    break;
                }
                let step = [(d * g[0] - b * g[1]) / det, (a * g[1] - b * g[0]) / det];
                p = [p[0] - step[0], p[1] - step[1]];
                if step[0].hypot(step[1]) < 1e-15 * (1.0 + p[0].abs() + p[1].abs()) {
                    break;
                }
            }
            let [a, b, d] = hxx(p);
            let near = dist_pt(p, at(i, j)) <= 2.0 * cell;
            if near
                && hv(p).abs() <= 1e-9 * scale
                && a * d - b * b > 0.0
                && !isolated.iter().any(|q| dist_pt(*q, p) < cell)
            {
                isolated.push(p);
            }
        }
    }
    Ok(CurveCensus { branches, branch_min_gradient, isolated_points: isolated })
}

/// Linear coefficients of the slice `t₁ = q₁ − a₁μ₁ − a₂μ₂, t₂ = q₂ − b₁μ₁ − b₂μ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CausticFrame {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl CausticFrame {
    pub const TRIVIAL: CausticFrame = CausticFrame { a1: 0.0, a2: 0.0, b1: 0.0, b2: 0.0 };
    pub const PERTURBED: CausticFrame = CausticFrame { a1: 0.1, a2: 0.05, b1: -0.08, b2: 0.06 };

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "trivial" => Some(Self::TRIVIAL),
            "perturbed" => Some(Self::PERTURBED),
            _ => None,
        }
    }

    /// Checks that the slice can be solved for `(q₁, q₂)` as a convergent series on
    /// the window (the denominator `1 − a₂y − b₂y²` stays near 1).
    pub fn check(&self, w: &Window) -> Result<(), GeometryError> {
        let r = [w.ymin.abs(), w.ymax.abs()].into_iter().fold(0.0, f64::max);
        let finite = [self.a1, self.a2, self.b1, self.b2].iter().all(|c| c.is_finite());
        if !finite || self.a2.abs() * r + self.b2.abs() * r * r >= 0.5 {
            return Err(GeometryError::NotTransverse);
        }
        Ok(())
    }
}

fn qf(v: f64) -> Q {
    crate::scalar::q_from_f64(v).unwrap_or_else(Q::zero)
}

/// The reduced caustic map `(μ₁, μ₂)` of the slice at `(t₁, t₂)`, with `μ₂` expanded
/// to total degree [`SERIES_ORDER`] in `(x, y)`.
pub fn caustic_map(frame: &CausticFrame, t1: f64, t2: f64) -> (MPoly, MPoly) {
    let x = MPoly::var(GX);
    let y = MPoly::var(GY);
    let num = [
        xy_term(2, 0, Q::one()),
        xy_term(0, 3, Q::one()),
        xy_term(0, 1, qf(t1)),
        xy_term(0, 2, qf(t2)),
        xy_term(1, 2, qf(frame.a1)),
        xy_term(1, 3, qf(frame.b1)),
    ]
    .iter()
    .fold(MPoly::zero(), |a, b| &a + b);
    // 1/(1 − d) = Σ dᵏ with d = a₂y + b₂y².
    let d = &xy_term(0, 1, qf(frame.a2)) + &xy_term(0, 2, qf(frame.b2));
    let mut inv = MPoly::one();
    let mut pw = MPoly::one();
    for _ in 0..SERIES_ORDER {
        pw = truncate(&(&pw * &d), SERIES_ORDER);
        if pw.is_zero() {
            break;
        }
        inv = &inv + &pw;
    }
    (&x * &y, truncate(&(&num * &inv), SERIES_ORDER))
}

fn truncate(p: &MPoly, order: usize) -> MPoly {
    p.terms()
        .filter(|(m, _)| m[GX] as usize + m[GY] as usize <= order)
        .fold(MPoly::zero(), |a, (m, c)| &a + &MPoly::term(*m, c.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausticSection {
    pub t: [f64; 2],
    pub diagram: ContourDiagram,
}

/// The planar caustic of the slice at `(t₁, t₂)`.
pub fn lagrange_caustic_section(
    frame: &CausticFrame,
    t1: f64,
    t2: f64,
    w: &Window,
) -> Result<CausticSection, GeometryError> {
    frame.check(w)?;
    let (m1, m2) = caustic_map(frame, t1, t2);
    let map = PlaneMap::from_mpolys(&m1, &m2)?;
    Ok(CausticSection { t: [t1, t2], diagram: apparent_contour(&map, w)? })
}

/// A wall of the reference section `{a = 0}` of the I₂,₃ bifurcation set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectionWall {
    pub kind: StratumKind,
    /// The `b` (that is `t₁`) coordinate of the wall on the slice.
    pub b: f64,
}

/// Walls met by the line `{a = 0}` in the `c`-slice, read off `section_curves`.
///
/// With the trivial frame these are the walls of the caustic family in the
/// `(t₁, t₂) = (b, c)` plane.
pub fn caustic_walls(c: f64, b_range: (f64, f64)) -> Result<Vec<SectionWall>, GeometryError> {
    let h = 1e-3;
    let win = SectionWindow { a: (-h, h), b: b_range };
    let curves = section_curves(UnfoldingId::I23, c, &win, 2048).map_err(ContourError::from)?;
    let mut walls: Vec<SectionWall> = Vec::new();
    let mut push = |kind: StratumKind, b: f64| {
        let tol = 1e-6 * (1.0 + b.abs());
        if !walls.iter().any(|w| w.kind == kind && (w.b - b).abs() <= 1e-4 * (b_range.1 - b_range.0) + tol) {
            walls.push(SectionWall { kind, b });
        }
    };
    for cv in &curves {
        let kind = match cv.stratum.kind {
            StratumKind::SharksfinAxis | StratumKind::DeltoidAxis => StratumKind::SharksfinAxis,
            k => k,
        };
        let pts = &cv.points;
        if pts.len() == 1 {
            if pts[0][0].abs() <= 1e-9 {
                push(kind, pts[0][1]);
            }
            continue;
        }
        for s in pts.windows(2) {
            let (p, q) = (s[0], s[1]);
            if (p[0] < 0.0 && q[0] > 0.0) || (p[0] > 0.0 && q[0] < 0.0) {
                let u = p[0] / (p[0] - q[0]);
                push(kind, p[1] + u * (q[1] - p[1]));
            }
        }
        // Sheets that end on the plane (the two signs meet there).
        for e in [pts[0], pts[pts.len() - 1]] {
            if e[0].abs() <= 1e-5 * (1.0 + c.abs()) {
                push(kind, e[1]);
            }
        }
    }
    // Sheets through the corank-two point belong to the axis wall.
    let axis: Vec<f64> = walls.iter().filter(|w| w.kind == StratumKind::SharksfinAxis).map(|w| w.b).collect();
    walls.retain(|w| w.kind == StratumKind::SharksfinAxis || !axis.iter().any(|b| (w.b - b).abs() <= 1e-9));
    walls.sort_by(|a, b| a.b.total_cmp(&b.b));
    Ok(walls)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepFrame {
    /// Arclength along the path.
    pub s: f64,
    pub t: [f64; 2],
    pub counts: Counts,
}

/// A change of the caustic picture between consecutive frames.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingLogEntry {
    /// Index of the frame before the change.
    pub frame: usize,
    /// Arclength where the counts jump, located by bisection.
    pub s: f64,
    pub t: [f64; 2],
    pub before: Counts,
    pub after: Counts,
    /// Nearest reference wall crossing, with its arclength distance.
    pub stratum: Option<StratumKind>,
    pub distance: f64,
}

/// Where the path crosses a wall of the reference section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceCrossing {
    pub s: f64,
    pub t: [f64; 2],
    pub kind: StratumKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub frame: CausticFrame,
    pub window: Window,
    /// Arclength between consecutive frames.
    pub spacing: f64,
    pub frames: Vec<SweepFrame>,
    pub crossings: Vec<CrossingLogEntry>,
    pub reference: Vec<ReferenceCrossing>,
}

impl Sweep {
    /// Counts of the frames farther than `guard` (in arclength) from every reference
    /// crossing.
    pub fn settled_counts(&self, guard: f64) -> Vec<Counts> {
        self.frames
            .iter()
            .filter(|f| self.reference.iter().all(|r| (r.s - f.s).abs() > guard))
            .map(|f| f.counts)
            .collect()
    }
}

struct PathParam {
    pts: Vec<[f64; 2]>,
    cum: Vec<f64>,
}

impl PathParam {
    fn new(path: &[[f64; 2]]) -> Self {
        let mut cum = vec![0.0];
        for s in path.windows(2) {
            let l = cum.last().copied().unwrap_or(0.0) + dist_pt(s[0], s[1]);
            cum.push(l);
        }
        Self { pts: path.to_vec(), cum }
    }

    fn length(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    fn at(&self, s: f64) -> [f64; 2] {
        if self.pts.len() == 1 || self.length() == 0.0 {
            return self.pts[0];
        }
        let k = self.cum.partition_point(|&c| c <= s).clamp(1, self.pts.len() - 1);
        let (s0, s1) = (self.cum[k - 1], self.cum[k]);
        let u = if s1 > s0 { ((s - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 0.0 };
        let (p, q) = (self.pts[k - 1], self.pts[k]);
        [p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])]
    }
}

fn wall_values(c: f64, b_range: (f64, f64)) -> Result<Vec<SectionWall>, GeometryError> {
    caustic_walls(c, b_range)
}

/// Caustic pictures along a path in the `(t₁, t₂)` plane with a log of their changes.
///
/// Pictures are taken at equal arclength, at most `step` apart. Between frames whose counts differ,
/// the jump is located by bisection. Independently, the crossings of the path with the
/// reference walls (the section `{a = 0}` of the I₂,₃ bifurcation set, exact for the
/// trivial frame) are located; every logged change is labelled with the nearest one.
/// Two reference crossings between the same pair of frames is a
/// [`GeometryError::Refine`] request.
pub fn perestroika_sweep(
    frame: &CausticFrame,
    path: &[[f64; 2]],
    step: f64,
    w: &Window,
) -> Result<Sweep, GeometryError> {
    if path.is_empty() {
        return Err(GeometryError::EmptyPath);
    }
    frame.check(w)?;
    w.validate()?;
    let pp = PathParam::new(path);
    let len = pp.length();
    let frames = if step > 0.0 { ((len / step).ceil() as usize + 1).max(2) } else { 2 };
    let spacing = len / (frames - 1) as f64;
    let counts_at = |s: f64| -> Result<Counts, GeometryError> {
        let t = pp.at(s);
        Ok(lagrange_caustic_section(frame, t[0], t[1], w)?.diagram.counts)
    };
    let fr: Vec<SweepFrame> = (0..frames)
        .into_par_iter()
        .map(|k| {
            let s = spacing * k as f64;
            Ok(SweepFrame { s, t: pp.at(s), counts: counts_at(s)? })
        })
        .collect::<Result<_, GeometryError>>()?;

    // Reference crossings.
    let bmin = path.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let bmax = path.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 + 0.5 * (bmax - bmin);
    let b_range = (bmin - pad, bmax + pad);
    let walls: Vec<Vec<SectionWall>> = fr.par_iter().map(|f| wall_values(f.t[1], b_range)).collect::<Result<_, _>>()?;
    let rank_of = |ws: &[SectionWall], k: usize| ws[..k].iter().filter(|w| w.kind == ws[k].kind).count();
    let find = |ws: &[SectionWall], kind: StratumKind, rank: usize| {
        ws.iter().filter(|w| w.kind == kind).nth(rank).map(|w| w.b)
    };
    let mut reference = Vec::new();
    for k in 0..frames.saturating_sub(1) {
        if len == 0.0 {
            break;
        }
        let mut here = 0;
        for (i, wl) in walls[k].iter().enumerate() {
            let rank = rank_of(&walls[k], i);
            let Some(b1) = find(&walls[k + 1], wl.kind, rank) else { continue };
            let g0 = fr[k].t[0] - wl.b;
            let g1 = fr[k + 1].t[0] - b1;
            if g0 == 0.0 || g0 * g1 < 0.0 {
                let (mut lo, mut hi) = (fr[k].s, fr[k + 1].s);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    let t = pp.at(mid);
                    let ws = wall_values(t[1], b_range)?;
                    match find(&ws, wl.kind, rank) {
                        Some(b) if (t[0] - b) * g0 > 0.0 => lo = mid,
                        Some(_) => hi = mid,
                        None => break,
                    }
                }
                let s = 0.5 * (lo + hi);
                reference.push(ReferenceCrossing { s, t: pp.at(s), kind: wl.kind });
                here += 1;
            }
        }
        if here > 1 {
            return Err(GeometryError::Refine(k, k + 1));
        }
    }

    // Jumps of the counts.
    let mut crossings = Vec::new();
    for k in 0..frames - 1 {
        if fr[k].counts == fr[k + 1].counts {
            continue;
        }
        let (mut lo, mut hi) = (fr[k].s, fr[k + 1].s);
        let (before, mut after) = (fr[k].counts, fr[k + 1].counts);
        while hi - lo > spacing / 64.0 {
            let mid = 0.5 * (lo + hi);
            let c = counts_at(mid)?;
            if c == before {
                lo = mid;
            } else {
                hi = mid;
                after = c;
            }
        }
        let s = 0.5 * (lo + hi);
        let nearest = reference.iter().min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs()));
        crossings.push(CrossingLogEntry {
            frame: k,
            s,
            t: pp.at(s),
            before,
            after,
            stratum: nearest.map(|r| r.kind),
            distance: nearest.map_or(f64::INFINITY, |r| (r.s - s).abs()),
        });
    }
    Ok(Sweep { frame: *frame, window: *w, spacing, frames: fr, crossings, reference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognition::{classify_corank2_2jet, SingularityClass};
    use crate::scalar::{q, qi};

    fn xy(i: u8, j: u8, c: Q) -> MPoly {
        xy_term(i, j, c)
    }

    #[test]
    fn projection_at_zero_is_the_i23_germ() {
        let g = projection_germ_q(&CrosscapFamily::typical(), &qi(0), &qi(0), &qi(0));
        let expect1 = poly_to_jet_q(&xy(1, 1, qi(1)), SERIES_ORDER);
        let expect2 = poly_to_jet_q(&(&xy(2, 0, qi(1)) + &xy(0, 3, qi(1))), SERIES_ORDER);
        assert_eq!(g.f1, expect1);
        assert_eq!(g.f2, expect2);
    }

    #[test]
    fn projection_is_a_translate_of_the_unfolding() {
        // P(x, y) = G(x − v, y; 2v, −w, t) + (v², 0) with the components swapped.
        let (v, w, t) = (0.07, -0.04, 0.11);
        let p = projection_germ(&CrosscapFamily::typical(), v, w, t);
        let prm = g_parameters(v, w, t);
        let (g1, g2) = UnfoldingId::I23.components();
        let mut pt = [0.0; MAX_VARS];
        for (k, val) in prm.iter().enumerate() {
            pt[crate::strata::systems::VA + k] = *val;
        }
        for (x, y) in [(0.1, 0.2), (-0.3, 0.05), (0.02, -0.4)] {
            pt[0] = x - v;
            pt[1] = y;
            let a = p.f1.eval(&x, &y);
            let b = p.f2.eval(&x, &y);
            assert!((a - g2.eval_f64(&pt)).abs() < 1e-12);
            assert!((b - g1.eval_f64(&pt) - v * v).abs() < 1e-12);
        }
    }

    #[test]
    fn crosscap_regimes_follow_the_sign_of_t() {
        let cf = CrosscapFamily::typical();
        let pos = classify_corank2_2jet(&projection_germ(&cf, 0.0, 0.0, 0.1)).unwrap();
        let neg = classify_corank2_2jet(&projection_germ(&cf, 0.0, 0.0, -0.1)).unwrap();
        assert_eq!(pos, SingularityClass::Sharksfin);
        assert_eq!(neg, SingularityClass::DeltoidTwoJet);
    }

    #[test]
    fn characteristic_curves_of_the_typical_family() {
        let cf = CrosscapFamily::typical();
        let t = q(1, 7);
        let (par, fl) = characteristic_curves(&cf, &t).unwrap();
        // x² − y²(t + 3y) and x²(t + 4y) − y²(t + 7y/2)².
        let tt = MPoly::constant(t.clone());
        let x2 = xy(2, 0, qi(1));
        let y2 = xy(0, 2, qi(1));
        let expect_par = &x2 - &(&y2 * &(&tt + &xy(0, 1, qi(3))));
        let inner = &tt + &xy(0, 1, q(7, 2));
        let expect_fl = &(&x2 * &(&tt + &xy(0, 1, qi(4)))) - &(&y2 * &inner.pow(2));
        assert_eq!(par.poly, expect_par);
        assert_eq!(fl.poly, expect_fl);
    }

    #[test]
    fn flecnodal_survives_a_perturbed_family() {
        let cf = CrosscapFamily::with_coeffs(qi(1), q(1, 20), q(1, 10));
        let (par, fl) = characteristic_curves(&cf, &q(1, 10)).unwrap();
        assert!(!par.poly.is_zero() && !fl.poly.is_zero());
        let pc = contact_order(&par, &fl, BranchPairing::NearestTangent, 8);
        assert_eq!(pc.len(), 2);
    }

    #[test]
    fn invalid_families_are_rejected() {
        let mut cf = CrosscapFamily::typical();
        cf.phi = &cf.phi + &xy(0, 2, qi(1));
        assert!(matches!(cf.validate(), Err(GeometryError::Family(_))));
        let mut cf = CrosscapFamily::typical();
        cf.g = xy(1, 3, qi(1));
        assert!(matches!(cf.validate(), Err(GeometryError::Family(_))));
    }

    #[test]
    fn tangency_and_identity_orders() {
        let line = PlaneCurveGerm::new(xy(0, 1, qi(1)), CurveLabel::Other);
        let parabola = PlaneCurveGerm::new(&xy(0, 1, qi(1)) - &xy(2, 0, qi(1)), CurveLabel::Other);
        let c = contact_order(&line, &parabola, BranchPairing::NearestTangent, 6);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].order, ContactOrder::Exact(2));
        let c = contact_order(&parabola, &parabola, BranchPairing::NearestTangent, 6);
        assert_eq!(c[0].order, ContactOrder::AtLeast(7));
        let cross = PlaneCurveGerm::new(xy(1, 0, qi(1)), CurveLabel::Other);
        assert_eq!(contact_order(&line, &cross, BranchPairing::NearestTangent, 6)[0].order, ContactOrder::Exact(1));
    }

    #[test]
    fn cusp_has_no_smooth_branch() {
        let cusp = PlaneCurveGerm::new(&xy(2, 0, qi(1)) - &xy(0, 3, qi(3)), CurveLabel::Parabolic);
        let c = contact_order(&cusp, &cusp, BranchPairing::NearestTangent, 6);
        assert!(matches!(c[0].order, ContactOrder::Unresolved(_)));
    }

    #[test]
    fn caustic_map_of_the_trivial_frame_is_the_unfolding() {
        let (m1, m2) = caustic_map(&CausticFrame::TRIVIAL, 0.02, -0.1);
        let expect = [xy(2, 0, qi(1)), xy(0, 3, qi(1)), xy(0, 1, qf(0.02)), xy(0, 2, qf(-0.1))]
            .iter()
            .fold(MPoly::zero(), |a, b| &a + b);
        assert_eq!(m1, xy(1, 1, qi(1)));
        assert_eq!(m2, expect);
    }

    #[test]
    fn perturbed_slice_solves_the_frame_equations() {
        let f = CausticFrame::PERTURBED;
        let (t1, t2) = (0.01, 0.2);
        let (m1, m2) = caustic_map(&f, t1, t2);
        for (x, y) in [(0.05, 0.03), (-0.02, 0.04)] {
            let mut p = [0.0; MAX_VARS];
            p[0] = x;
            p[1] = y;
            let (mu1, mu2) = (m1.eval_f64(&p), m2.eval_f64(&p));
            let q1 = t1 + f.a1 * mu1 + f.a2 * mu2;
            let q2 = t2 + f.b1 * mu1 + f.b2 * mu2;
            let lag = x * x + y.powi(3) + q1 * y + q2 * y * y;
            assert!((lag - mu2).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_path_keeps_its_counts() {
        let w = Window::square(0.6, 128);
        let sw = perestroika_sweep(&CausticFrame::TRIVIAL, &[[0.02, 0.2]], DEFAULT_SWEEP_STEP, &w).unwrap();
        assert!(sw.frames.windows(2).all(|p| p[0].counts == p[1].counts));
        assert!(sw.crossings.is_empty());
    }

    #[test]
    fn trivial_frame_walls_on_a_positive_slice() {
        let c = 0.3;
        let walls = caustic_walls(c, (-0.05, 0.05)).unwrap();
        let expect = [
            (-c * c / 5.0, StratumKind::CuspFold),
            (0.0, StratumKind::SharksfinAxis),
            (c * c / 4.0, StratumKind::CuspFold),
            (c * c / 3.0, StratumKind::BeaksLips),
        ];
        assert_eq!(walls.len(), expect.len(), "{walls:?}");
        for (w, (b, k)) in walls.iter().zip(expect) {
            assert_eq!(w.kind, k);
            assert!((w.b - b).abs() < 1e-5, "{w:?}");
        }
    }

    #[test]
    fn flecnodal_at_zero_is_a_line_times_a_cusp() {
        let (par, fl) = characteristic_curves(&CrosscapFamily::typical(), &qi(0)).unwrap();
        assert_eq!(par.poly, &xy(2, 0, qi(1)) - &xy(0, 3, qi(3)));
        let cusp = &xy(2, 0, qi(4)) - &xy(0, 3, q(49, 4));
        assert_eq!(fl.poly.div_exact(&xy(0, 1, qi(1))), Some(cusp));
    }

    #[test]
    fn elliptic_branches_have_third_order_contact() {
        let t = 0.1f64;
        let (par, fl) = characteristic_curves(&CrosscapFamily::typical(), &q(1, 10)).unwrap();
        // x = ±y√(t + 3y) against x = ±y(t + 7y/2)/√(t + 4y), expanded by hand.
        let rt = t.sqrt();
        let par_series = [0.0, rt, 1.5 / rt, -9.0 / (8.0 * t * rt)];
        let fl_series = [0.0, rt, 1.5 / rt, -1.0 / (t * rt)];
        for (curve, series) in [(&par, par_series), (&fl, fl_series)] {
            let br = curve_branches(&curve.poly, SERIES_ORDER).unwrap();
            assert_eq!(br.len(), 2);
            for b in &br {
                assert_eq!(b.axis, GraphAxis::OverY);
                let sg = b.coeffs[1].signum();
                for k in 1..4 {
                    assert!(
                        (b.coeffs[k] - sg * series[k]).abs() < 1e-9 * series[k].abs().max(1.0),
                        "{k}: {:?}",
                        b.coeffs
                    );
                }
            }
        }
        let c = contact_order(&par, &fl, BranchPairing::NearestTangent, SERIES_ORDER);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|b| b.order == ContactOrder::Exact(3)), "{c:?}");
    }

    #[test]
    fn hyperbolic_parabolic_curve_has_an_isolated_point() {
        let (par, _) = characteristic_curves(&CrosscapFamily::typical(), &q(-1, 10)).unwrap();
        let census = curve_census(&par.poly, &Window::square(0.6, 512)).unwrap();
        assert_eq!(census.branches.len(), 1);
        assert!(census.branch_min_gradient[0] > 1e-4);
        assert_eq!(census.isolated_points.len(), 1);
        assert!(dist_pt(census.isolated_points[0], [0.0, 0.0]) < 1e-9);
    }
}
