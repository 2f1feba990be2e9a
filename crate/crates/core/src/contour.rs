//! Singular sets and apparent contours of polynomial plane maps on a rectangular window.
//!
//! `{λ = 0}` is extracted by marching squares and polished onto the curve; its image is
//! the apparent contour. Cusps are located where the image velocity along the singular
//! curve reverses, and double folds by intersecting image segments whose preimages are
//! far apart in the source.

use crate::jets::Jet;
use crate::poly::MPoly;
use crate::recognition::MapGerm;
use crate::scalar::{Scalar, Q};
use crate::strata::{
    parametrize_stratum, predicted_source, section_curves, SectionWindow, StrataError, StratumId, UnfoldingId,
};
use nalgebra::{Matrix4, Vector4};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_RESOLUTION: usize = 512;
pub const DEFAULT_HALF_WIDTH: f64 = 0.6;
pub const MIN_RESOLUTION: usize = 32;
/// Double-point preimages must be more than this many grid cells apart.
pub const DISTINCT_CELLS: f64 = 10.0;
/// Default minimal distance of a parameter point from every stratum.
pub const DEFAULT_STRATUM_MARGIN: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("invalid window: {0}")]
    Window(String),
    #[error("λ vanishes identically on {} grid cell(s), first at {:?}", .0.len(), .0.first())]
    DegenerateCells(Vec<(usize, usize)>),
    #[error("parameter point lies within {distance:.3e} of stratum {stratum}")]
    NearStratum { distance: f64, stratum: StratumId },
    #[error("map must be polynomial in x and y only")]
    NotPlanar,
    #[error(transparent)]
    Strata(#[from] StrataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    /// Grid cells per axis.
    pub resolution: usize,
}

impl Default for Window {
    fn default() -> Self {
        Self::square(DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION)
    }
}

impl Window {
    pub fn square(r: f64, resolution: usize) -> Self {
        Self { xmin: -r, xmax: r, ymin: -r, ymax: r, resolution }
    }

    /// Square of half-width `r` around `center`.
    pub fn centered(center: [f64; 2], r: f64, resolution: usize) -> Self {
        Self { xmin: center[0] - r, xmax: center[0] + r, ymin: center[1] - r, ymax: center[1] + r, resolution }
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        Self { resolution, ..*self }
    }

    pub fn validate(&self) -> Result<(), ContourError> {
        if !(self.xmin < self.xmax && self.ymin < self.ymax) {
            return Err(ContourError::Window("empty rectangle".into()));
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(ContourError::Window(format!("resolution {} is below {MIN_RESOLUTION}", self.resolution)));
        }
        Ok(())
    }

    /// Grid spacing (the larger of the two axes).
    pub fn cell(&self) -> f64 {
        let n = self.resolution as f64;
        ((self.xmax - self.xmin) / n).max((self.ymax - self.ymin) / n)
    }

    fn vertex(&self, i: usize, j: usize) -> [f64; 2] {
        let n = self.resolution as f64;
        [self.xmin + (self.xmax - self.xmin) * i as f64 / n, self.ymin + (self.ymax - self.ymin) * j as f64 / n]
    }
}

/// Dense polynomial in `(x, y)` with float coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2 {
    terms: Vec<(u32, u32, f64)>,
}

impl Poly2 {
    /// Collapses every variable other than `x` (0) and `y` (1) at `point`.
    pub fn from_mpoly_at(p: &MPoly, point: &[f64]) -> Self {
        let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
        for (m, c) in p.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (k, &e) in m.iter().enumerate().skip(2) {
                if e > 0 {
                    t *= point[k].powi(e as i32);
                }
            }
            *acc.entry((m[0] as u32, m[1] as u32)).or_insert(0.0) += t;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|t| t.1 != 0.0).map(|((i, j), c)| (i, j, c)).collect();
        terms.sort_by_key(|t| (t.0, t.1));
        Self { terms }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    pub fn dx(&self) -> Self {
        let terms = self.terms.iter().filter(|t| t.0 > 0).map(|&(i, j, c)| (i - 1, j, c * i as f64)).collect();
        Self { terms }
    }

    pub fn dy(&self) -> Self {
        let terms = self.terms.iter().filter(|t| t.1 > 0).map(|&(i, j, c)| (i, j - 1, c * j as f64)).collect();
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn jet_to_mpoly<S: Scalar>(j: &Jet<S>) -> Option<MPoly> {
    let mut out = MPoly::default();
    for (i, k, c) in j.terms() {
        let q = crate::scalar::q_from_f64(c.as_f64()?)?;
        let mut m = [0u8; crate::poly::MAX_VARS];
        m[0] = i as u8;
        m[1] = k as u8;
        out = &out + &MPoly::term(m, q);
    }
    Some(out)
}

/// A polynomial map `(f1, f2)` of the plane with its Jacobian data precomputed.
#[derive(Clone, Debug)]
pub struct PlaneMap {
    f: [Poly2; 2],
    df: [[Poly2; 2]; 2],
    lambda: Poly2,
    dlambda: [Poly2; 2],
}

impl PlaneMap {
    /// From polynomials in the variables `x` (index 0) and `y` (index 1); other
    /// variables are evaluated at `point`.
    pub fn from_mpolys_at(f1: &MPoly, f2: &MPoly, point: &[f64]) -> Self {
        let lam = &(&f1.partial(0) * &f2.partial(1)) - &(&f1.partial(1) * &f2.partial(0));
        let p = |m: &MPoly| Poly2::from_mpoly_at(m, point);
        Self {
            f: [p(f1), p(f2)],
            df: [[p(&f1.partial(0)), p(&f1.partial(1))], [p(&f2.partial(0)), p(&f2.partial(1))]],
            lambda: p(&lam),
            dlambda: [p(&lam.partial(0)), p(&lam.partial(1))],
        }
    }

    pub fn from_mpolys(f1: &MPoly, f2: &MPoly) -> Result<Self, ContourError> {
        let planar = |p: &MPoly| p.terms().all(|(m, _)| m.iter().skip(2).all(|&e| e == 0));
        if !planar(f1) || !planar(f2) {
            return Err(ContourError::NotPlanar);
        }
        Ok(Self::from_mpolys_at(f1, f2, &[0.0; crate::poly::MAX_VARS]))
    }

    /// The member of an unfolding at `params`.
    pub fn from_unfolding(u: UnfoldingId, params: &[f64]) -> Self {
        let (f1, f2) = u.components();
        let mut point = [0.0; crate::poly::MAX_VARS];
        for (i, v) in params.iter().enumerate() {
            point[crate::strata::systems::VA + i] = *v;
        }
        Self::from_mpolys_at(&f1, &f2, &point)
    }

    /// The polynomial map represented by a germ's jets.
    pub fn from_germ<S: Scalar>(g: &MapGerm<S>) -> Result<Self, ContourError> {
        let f1 = jet_to_mpoly(&g.f1).ok_or(ContourError::NotPlanar)?;
        let f2 = jet_to_mpoly(&g.f2).ok_or(ContourError::NotPlanar)?;
        Self::from_mpolys(&f1, &f2)
    }

    pub fn from_germ_q(g: &MapGerm<Q>) -> Result<Self, ContourError> {
        Self::from_germ(g)
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [self.f[0].eval(p[0], p[1]), self.f[1].eval(p[0], p[1])]
    }

    pub fn lambda(&self, p: [f64; 2]) -> f64 {
        self.lambda.eval(p[0], p[1])
    }

    pub fn grad_lambda(&self, p: [f64; 2]) -> [f64; 2] {
        [self.dlambda[0].eval(p[0], p[1]), self.dlambda[1].eval(p[0], p[1])]
    }

    pub fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let e = |q: &Poly2| q.eval(p[0], p[1]);
        [[e(&self.df[0][0]), e(&self.df[0][1])], [e(&self.df[1][0]), e(&self.df[1][1])]]
    }

    /// `ηλ` for the kernel field built from the dominant row of the Jacobian.
    pub fn eta_lambda(&self, p: [f64; 2]) -> f64 {
        let j = self.jacobian(p);
        let row = if j[0][0].hypot(j[0][1]) >= j[1][0].hypot(j[1][1]) { j[0] } else { j[1] };
        let g = self.grad_lambda(p);
        -row[1] * g[0] + row[0] * g[1]
    }

    /// Moves `p` onto `{λ = 0}` along the gradient.
    fn polish(&self, mut p: [f64; 2]) -> [f64; 2] {
        for _ in 0..8 {
            let l = self.lambda(p);
            let g = self.grad_lambda(p);
            let n2 = g[0] * g[0] + g[1] * g[1];
            if !(n2 > 0.0) || l == 0.0 {
                break;
            }
            let step = [l * g[0] / n2, l * g[1] / n2];
            p = [p[0] - step[0], p[1] - step[1]];
            if step[0].abs() + step[1].abs() < 1e-16 {
                break;
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (k, (k + 1) % n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cusp {
    pub source: [f64; 2],
    pub image: [f64; 2],
    /// `ηλ` at the refined point, for a kernel field of unit-scale rows.
    pub eta_lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublePoint {
    pub image: [f64; 2],
    pub p: [f64; 2],
    pub q: [f64; 2],
    /// `|F(p) - F(q)|` after refinement.
    pub gap: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Counts {
    pub components: usize,
    pub cusps: usize,
    pub double_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContourDiagram {
    pub window: Window,
    pub singular_polylines: Vec<Polyline>,
    pub contour_polylines: Vec<Polyline>,
    pub cusps: Vec<Cusp>,
    pub double_points: Vec<DoublePoint>,
    pub counts: Counts,
    /// Source points where a cusp and a double point are closer than the grid resolves.
    pub collisions: Vec<[f64; 2]>,
    /// Largest `|λ|` over polished vertices, relative to the grid scale of `λ`.
    pub max_rel_lambda: f64,
}

fn edge_key(n: usize, i: usize, j: usize, vertical: bool) -> usize {
    2 * (j * (n + 1) + i) + vertical as usize
}

/// Marching squares on `{λ = 0}`; vertices are polished onto the curve.
pub fn singular_set_trace(f: &PlaneMap, w: &Window) -> Result<Vec<Polyline>, ContourError> {
    Ok(trace(f, w)?.0)
}

fn trace(f: &PlaneMap, w: &Window) -> Result<(Vec<Polyline>, f64), ContourError> {
    w.validate()?;
    let n = w.resolution;
    let vals: Vec<Vec<f64>> =
        (0..=n).into_par_iter().map(|j| (0..=n).map(|i| f.lambda(w.vertex(i, j))).collect()).collect();
    let scale = vals.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let pos = |i: usize, j: usize| vals[j][i] >= 0.0;

    let mut degenerate = Vec::new();
    let mut points: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut crossing = |i0: usize, j0: usize, i1: usize, j1: usize, vertical: bool| -> usize {
        let key = edge_key(n, i0, j0, vertical);
        points.entry(key).or_insert_with(|| {
            let (v0, v1) = (vals[j0][i0], vals[j1][i1]);
            let t = if v0 == v1 { 0.5 } else { v0 / (v0 - v1) };
            let (p0, p1) = (w.vertex(i0, j0), w.vertex(i1, j1));
            [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])]
        });
        key
    };
    for j in 0..n {
        for i in 0..n {
            let corners = [vals[j][i], vals[j][i + 1], vals[j + 1][i + 1], vals[j + 1][i]];
            if corners.iter().all(|v| *v == 0.0) {
                let c = w.vertex(i, j);
                let h = w.cell() / 2.0;
                if f.lambda([c[0] + h, c[1] + h]) == 0.0 {
                    degenerate.push((i, j));
                    continue;
                }
            }
            let s = [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)];
            // Edges: 0 bottom, 1 right, 2 top, 3 left.
            let mut e = |k: usize| match k {
                0 => crossing(i, j, i + 1, j, false),
                1 => crossing(i + 1, j, i + 1, j + 1, true),
                2 => crossing(i, j + 1, i + 1, j + 1, false),
                _ => crossing(i, j, i, j + 1, true),
            };
            let cut = [s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]];
            let segs: Vec<(usize, usize)> = match cut.iter().filter(|c| **c).count() {
                2 => {
                    let ks: Vec<usize> = (0..4).filter(|k| cut[*k]).collect();
                    vec![(e(ks[0]), e(ks[1]))]
                }
                4 => {
                    let c = w.vertex(i, j);
                    let h = w.cell() / 2.0;
                    let centre = f.lambda([c[0] + h, c[1] + h]) >= 0.0;
                    if centre == s[0] {
                        vec![(e(0), e(1)), (e(2), e(3))]
                    } else {
                        vec![(e(0), e(3)), (e(1), e(2))]
                    }
                }
                _ => vec![],
            };
            for (a, b) in segs {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }
    if !degenerate.is_empty() {
        return Err(ContourError::DegenerateCells(degenerate));
    }

    // Chain: open chains start at degree-one nodes, the rest are loops.
    let mut keys: Vec<usize> = adj.keys().copied().collect();
    keys.sort_unstable();
    let mut used: HashMap<usize, bool> = HashMap::new();
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    let starts: Vec<usize> = keys.iter().copied().filter(|k| adj[k].len() == 1).chain(keys.iter().copied()).collect();
    for s in starts {
        if used.contains_key(&s) {
            continue;
        }
        let mut chain = vec![s];
        used.insert(s, true);
        let mut cur = s;
        let closed;
        loop {
            let next = adj[&cur].iter().copied().find(|nb| !used.contains_key(nb));
            match next {
                Some(nb) => {
                    used.insert(nb, true);
                    chain.push(nb);
                    cur = nb;
                }
                None => {
                    closed = chain.len() > 2 && adj[&cur].contains(&s);
                    break;
                }
            }
        }
        if chain.len() >= 2 {
            chains.push((chain, closed));
        }
    }
    let mut max_rel = 0.0f64;
    let lines: Vec<Polyline> = chains
        .into_iter()
        .map(|(chain, closed)| {
            let mut pts: Vec<[f64; 2]> = Vec::with_capacity(chain.len());
            // Crossings on edges through a zero vertex coincide; keep one of each.
            for p in chain.iter().map(|k| f.polish(points[k])) {
                if pts.last().is_none_or(|q| dist(*q, p) > 1e-9 * w.cell()) {
                    pts.push(p);
                }
            }
            if closed && pts.len() > 1 && dist(pts[0], pts[pts.len() - 1]) <= 1e-9 * w.cell() {
                pts.pop();
            }
            Polyline { points: pts, closed }
        })
        .filter(|l| l.points.len() >= 2)
        .collect();
    for l in &lines {
        for p in &l.points {
            max_rel = max_rel.max(f.lambda(*p).abs() / scale);
        }
    }
    Ok((lines, max_rel))
}

/// Image-velocity sign along a singular polyline, against a continuously oriented image line.
fn velocity_signs(f: &PlaneMap, pts: &[[f64; 2]]) -> Vec<(f64, [f64; 2])> {
    let mut out: Vec<(f64, [f64; 2])> = Vec::with_capacity(pts.len());
    for (k, p) in pts.iter().enumerate() {
        let prev = if k > 0 { Some(out[k - 1].1) } else { None };
        out.push(velocity(f, *p, pts, k, prev));
    }
    out
}

fn velocity(f: &PlaneMap, p: [f64; 2], pts: &[[f64; 2]], k: usize, prev_dir: Option<[f64; 2]>) -> (f64, [f64; 2]) {
    let g = f.grad_lambda(p);
    let mut t = [-g[1], g[0]];
    // Orient the tangent along the polyline so that it agrees with the chain direction.
    let (a, b) = if k + 1 < pts.len() { (pts[k], pts[k + 1]) } else { (pts[k.saturating_sub(1)], pts[k]) };
    if t[0] * (b[0] - a[0]) + t[1] * (b[1] - a[1]) < 0.0 {
        t = [-t[0], -t[1]];
    }
    image_sign(f, p, t, prev_dir)
}

fn image_sign(f: &PlaneMap, p: [f64; 2], t: [f64; 2], prev_dir: Option<[f64; 2]>) -> (f64, [f64; 2]) {
    let j = f.jacobian(p);
    let v = [j[0][0] * t[0] + j[0][1] * t[1], j[1][0] * t[0] + j[1][1] * t[1]];
    let c1 = [j[0][0], j[1][0]];
    let c2 = [j[0][1], j[1][1]];
    let mut u = if c1[0].hypot(c1[1]) >= c2[0].hypot(c2[1]) { c1 } else { c2 };
    if let Some(d) = prev_dir {
        if u[0] * d[0] + u[1] * d[1] < 0.0 {
            u = [-u[0], -u[1]];
        }
    }
    (v[0] * u[0] + v[1] * u[1], u)
}

fn lerp(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Euclidean distance of two plane points.
pub fn dist_pt(a: [f64; 2], b: [f64; 2]) -> f64 {
    dist(a, b)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

fn find_cusps(f: &PlaneMap, lines: &[Polyline]) -> Vec<Cusp> {
    let mut out = Vec::new();
    for l in lines {
        if l.points.len() < 2 {
            continue;
        }
        let signs = velocity_signs(f, &l.points);
        for (a, b) in l.segments() {
            let (sa, ua) = signs[a];
            let sb = if b == 0 {
                // Closing segment of a loop: carry the orientation all the way round.
                velocity(f, l.points[0], &l.points, 0, Some(ua)).0
            } else {
                signs[b].0
            };
            if positive(sa) == positive(sb) {
                continue;
            }
            let (pa, pb) = (l.points[a], l.points[b]);
            let tangent = [pb[0] - pa[0], pb[1] - pa[1]];
            let at = |s: f64| -> (f64, [f64; 2]) {
                let p = f.polish(lerp(pa, pb, s));
                let g = f.grad_lambda(p);
                let mut t = [-g[1], g[0]];
                if t[0] * tangent[0] + t[1] * tangent[1] < 0.0 {
                    t = [-t[0], -t[1]];
                }
                (image_sign(f, p, t, Some(ua)).0, p)
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..48 {
                let mid = 0.5 * (lo + hi);
                if positive(at(mid).0) == positive(sa) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let p = at(0.5 * (lo + hi)).1;
            let j = f.jacobian(p);
            let norm = j[0][0].hypot(j[0][1]).max(j[1][0].hypot(j[1][1])).max(f64::MIN_POSITIVE);
            let gl = f.grad_lambda(p);
            let gn = gl[0].hypot(gl[1]).max(f64::MIN_POSITIVE);
            out.push(Cusp { source: p, image: f.apply(p), eta_lambda: f.eta_lambda(p) / (norm * gn) });
        }
    }
    out
}

/// Newton on `F(p) = F(q)`, `λ(p) = λ(q) = 0`.
fn refine_double(f: &PlaneMap, p: [f64; 2], q: [f64; 2]) -> Option<([f64; 2], [f64; 2])> {
    let mut v = Vector4::new(p[0], p[1], q[0], q[1]);
    for _ in 0..30 {
        let (p, q) = ([v[0], v[1]], [v[2], v[3]]);
        let (fp, fq) = (f.apply(p), f.apply(q));
        let r = Vector4::new(fp[0] - fq[0], fp[1] - fq[1], f.lambda(p), f.lambda(q));
        let (jp, jq) = (f.jacobian(p), f.jacobian(q));
        let (gp, gq) = (f.grad_lambda(p), f.grad_lambda(q));
        let m = Matrix4::new(
            jp[0][0], jp[0][1], -jq[0][0], -jq[0][1], jp[1][0], jp[1][1], -jq[1][0], -jq[1][1], gp[0], gp[1], 0.0, 0.0,
            0.0, 0.0, gq[0], gq[1],
        );
        let d = m.lu().solve(&r)?;
        v -= d;
        if d.amax() < 1e-15 * (1.0 + v.amax()) {
            break;
        }
    }
    v.iter().all(|x| x.is_finite()).then_some(([v[0], v[1]], [v[2], v[3]]))
}

fn seg_intersection(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> Option<(f64, f64)> {
    let r = [a1[0] - a0[0], a1[1] - a0[1]];
    let s = [b1[0] - b0[0], b1[1] - b0[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den == 0.0 {
        return None;
    }
    let d = [b0[0] - a0[0], b0[1] - a0[1]];
    let t = (d[0] * s[1] - d[1] * s[0]) / den;
    let u = (d[0] * r[1] - d[1] * r[0]) / den;
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then_some((t, u))
}

fn find_double_points(f: &PlaneMap, src: &[Polyline], img: &[Polyline], w: &Window) -> Vec<DoublePoint> {
    let h = w.cell();
    // Segments as (line, a, b).
    let segs: Vec<(usize, usize, usize)> =
        img.iter().enumerate().flat_map(|(li, l)| l.segments().map(move |(a, b)| (li, a, b))).collect();
    if segs.is_empty() {
        return vec![];
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for l in img {
        for p in &l.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let nb = ((segs.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
    let size = [((hi[0] - lo[0]) / nb as f64).max(1e-300), ((hi[1] - lo[1]) / nb as f64).max(1e-300)];
    let cell = |p: f64, k: usize| (((p - lo[k]) / size[k]) as usize).min(nb - 1);
    let mut buckets: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (si, &(li, a, b)) in segs.iter().enumerate() {
        let (p, q) = (img[li].points[a], img[li].points[b]);
        for bx in cell(p[0].min(q[0]), 0)..=cell(p[0].max(q[0]), 0) {
            for by in cell(p[1].min(q[1]), 1)..=cell(p[1].max(q[1]), 1) {
                buckets.entry((bx, by)).or_default().push(si);
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<DoublePoint> = Vec::new();
    let mut bucket_keys: Vec<_> = buckets.keys().copied().collect();
    bucket_keys.sort_unstable();
    for key in bucket_keys {
        let list = &buckets[&key];
        for (x, &s1) in list.iter().enumerate() {
            for &s2 in &list[x + 1..] {
                let pair = (s1.min(s2), s1.max(s2));
                if !seen.insert(pair) {
                    continue;
                }
                let (l1, a1, b1) = segs[pair.0];
                let (l2, a2, b2) = segs[pair.1];
                if l1 == l2 && (a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2) {
                    continue;
                }
                let Some((t, u)) =
                    seg_intersection(img[l1].points[a1], img[l1].points[b1], img[l2].points[a2], img[l2].points[b2])
                else {
                    continue;
                };
                let p0 = lerp(src[l1].points[a1], src[l1].points[b1], t);
                let q0 = lerp(src[l2].points[a2], src[l2].points[b2], u);
                if dist(p0, q0) <= DISTINCT_CELLS * h {
                    continue;
                }
                let (p, q) = match refine_double(f, p0, q0) {
                    Some((p, q))
                        if dist(p, p0) < 2.0 * h && dist(q, q0) < 2.0 * h && dist(p, q) > DISTINCT_CELLS * h =>
                    {
                        (p, q)
                    }
                    _ => (p0, q0),
                };
                if out.iter().any(|d| {
                    (dist(d.p, p) < 3.0 * h && dist(d.q, q) < 3.0 * h)
                        || (dist(d.p, q) < 3.0 * h && dist(d.q, p) < 3.0 * h)
                }) {
                    continue;
                }
                let (fp, fq) = (f.apply(p), f.apply(q));
                out.push(DoublePoint {
                    image: [(fp[0] + fq[0]) / 2.0, (fp[1] + fq[1]) / 2.0],
                    p,
                    q,
                    gap: dist(fp, fq),
                });
            }
        }
    }
    out.sort_by(|a, b| a.image[0].total_cmp(&b.image[0]).then(a.image[1].total_cmp(&b.image[1])));
    out
}

/// Singular set, apparent contour, cusps and double folds of `f` on `w`.
pub fn apparent_contour(f: &PlaneMap, w: &Window) -> Result<ContourDiagram, ContourError> {
    let (singular, max_rel_lambda) = trace(f, w)?;
    let contour: Vec<Polyline> = singular
        .iter()
        .map(|l| Polyline { points: l.points.iter().map(|p| f.apply(*p)).collect(), closed: l.closed })
        .collect();
    let cusps = find_cusps(f, &singular);
    let double_points = find_double_points(f, &singular, &contour, w);
    let h = w.cell();
    let collisions = cusps
        .iter()
        .filter(|c| double_points.iter().any(|d| dist(c.source, d.p) < 2.0 * h || dist(c.source, d.q) < 2.0 * h))
        .map(|c| c.source)
        .collect();
    let counts = Counts { components: singular.len(), cusps: cusps.len(), double_points: double_points.len() };
    Ok(ContourDiagram {
        window: *w,
        singular_polylines: singular,
        contour_polylines: contour,
        cusps,
        double_points,
        counts,
        collisions,
        max_rel_lambda,
    })
}

fn seg_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, lerp(a, b, s))
}

/// Distance from a parameter point to the nearest stratum on its `c`-slice.
///
/// The odd-shaped sharksfin swallowtail has no parametrization and is not considered.
pub fn stratum_distance(u: UnfoldingId, params: &[f64]) -> Result<Option<(f64, StratumId)>, ContourError> {
    let c = params.get(2).copied().unwrap_or(0.0);
    let p = [params[0], params[1]];
    let r = 0.05 + p[0].abs().max(p[1].abs()) * 0.1;
    let win = SectionWindow { a: (p[0] - r, p[0] + r), b: (p[1] - r, p[1] + r) };
    let curves = section_curves(u, c, &win, 2048)?;
    let mut best: Option<(f64, StratumId)> = None;
    for cv in &curves {
        let d = if cv.points.len() == 1 {
            dist(p, cv.points[0])
        } else {
            cv.points.windows(2).map(|s| seg_distance(p, s[0], s[1])).fold(f64::INFINITY, f64::min)
        };
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, cv.stratum));
        }
    }
    Ok(best)
}

/// The regime invariant `(components, cusps, double points)` of the member at `params`.
///
/// Fails with [`ContourError::NearStratum`] when `params` is within `margin` of a stratum.
pub fn contour_features(u: UnfoldingId, params: &[f64], w: &Window, margin: f64) -> Result<Counts, ContourError> {
    if let Some((d, s)) = stratum_distance(u, params)? {
        if d < margin {
            return Err(ContourError::NearStratum { distance: d, stratum: s });
        }
    }
    Ok(apparent_contour(&PlaneMap::from_unfolding(u, params), w)?.counts)
}

/// Largest parameter step taken off a wall.
pub const MAX_CROSSING_STEP: f64 = 1e-3;
/// Half-width of the source window around the singular point(s) of a wall crossing.
pub const CROSSING_HALF_WIDTH: f64 = 0.05;

/// Counts on the two sides of a wall along a short segment normal to it in the `c`-slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallCrossing {
    pub stratum: StratumId,
    pub internal: Vec<f64>,
    /// The point on the wall.
    pub base: Vec<f64>,
    /// Unit normal to the wall in the `(a, b)`-plane.
    pub normal: [f64; 2],
    pub step: f64,
    /// Distance from `base` to the nearest other stratum in the slice.
    pub gap: f64,
    pub window: Window,
    /// Counts at `base - step * normal`.
    pub before: Counts,
    /// Counts at `base + step * normal`.
    pub after: Counts,
}

impl WallCrossing {
    pub fn delta_cusps(&self) -> i64 {
        self.after.cusps as i64 - self.before.cusps as i64
    }

    pub fn delta_double_points(&self) -> i64 {
        self.after.double_points as i64 - self.before.double_points as i64
    }

    pub fn delta_components(&self) -> i64 {
        self.after.components as i64 - self.before.components as i64
    }
}

fn slice_gap(u: UnfoldingId, id: StratumId, p: [f64; 2], c: f64) -> Result<f64, ContourError> {
    let r = 0.02;
    let win = SectionWindow { a: (p[0] - r, p[0] + r), b: (p[1] - r, p[1] + r) };
    let mut best = r;
    for cv in section_curves(u, c, &win, 8192)? {
        if cv.stratum == id && cv.points.len() > 1 {
            continue;
        }
        best = cv.points.iter().map(|q| dist(p, *q)).fold(best, f64::min);
    }
    Ok(best)
}

/// Crosses the wall of stratum `id` of the I₂,₃ family at `internal = [y, c]`.
///
/// The step is a quarter of the distance to the nearest other stratum in the slice
/// (at most [`MAX_CROSSING_STEP`]), so that only this wall is crossed. Counts are taken
/// on a source window around the singular point(s) of the wall, which keeps the far
/// parts of the contour out of the comparison.
pub fn wall_crossing(
    u: UnfoldingId,
    id: StratumId,
    internal: &[f64],
    resolution: usize,
) -> Result<WallCrossing, ContourError> {
    let sp = parametrize_stratum(u, id, internal)?;
    if sp.params.len() != 3 || internal.len() != 2 {
        return Err(StrataError::InvalidPair { unfolding: u, stratum: id.kind }.into());
    }
    let c = sp.params[2];
    let base = [sp.params[0], sp.params[1]];
    // Tangent by central differences along the sweep coordinate.
    let h = 1e-6 * (1.0 + internal[0].abs());
    let at = |y: f64| parametrize_stratum(u, id, &[y, internal[1]]).map(|q| [q.params[0], q.params[1]]);
    let (lo, hi) = match (at(internal[0] - h), at(internal[0] + h)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(_), Ok(r)) => (base, r),
        (Ok(l), Err(_)) => (l, base),
        (Err(e), Err(_)) => return Err(e.into()),
    };
    let t = [hi[0] - lo[0], hi[1] - lo[1]];
    let tn = t[0].hypot(t[1]);
    let normal = [-t[1] / tn, t[0] / tn];
    let gap = slice_gap(u, id, base, c)?;
    let step = (gap / 4.0).min(MAX_CROSSING_STEP);
    let src = predicted_source(&sp);
    let n = src.len() as f64;
    let center = [src.iter().map(|p| p[0]).sum::<f64>() / n, src.iter().map(|p| p[1]).sum::<f64>() / n];
    let spread = src.iter().map(|p| dist(*p, center)).fold(0.0, f64::max);
    let window = Window::centered(center, CROSSING_HALF_WIDTH + spread, resolution);
    window.validate()?;
    let counts = |s: f64| -> Result<Counts, ContourError> {
        let q = [base[0] + s * step * normal[0], base[1] + s * step * normal[1], c];
        Ok(apparent_contour(&PlaneMap::from_unfolding(u, &q), &window)?.counts)
    };
    Ok(WallCrossing {
        stratum: id,
        internal: internal.to_vec(),
        base: sp.params.clone(),
        normal,
        step,
        gap,
        window,
        before: counts(-1.0)?,
        after: counts(1.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_germ;

    fn map(src: &str) -> PlaneMap {
        PlaneMap::from_germ(&parse_germ(src, 9).unwrap()).unwrap()
    }

    #[test]
    fn fold_is_one_straight_line() {
        let w = Window::square(1.0, 64);
        let lines = singular_set_trace(&map("(x, y^2)"), &w).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].points.iter().all(|p| p[1].abs() < 1e-12));
        let d = apparent_contour(&map("(x, y^2)"), &w).unwrap();
        assert_eq!(d.counts, Counts { components: 1, cusps: 0, double_points: 0 });
    }

    #[test]
    fn cusp_map_has_one_cusp() {
        let d = apparent_contour(&map("(x, x*y + y^3)"), &Window::square(0.5, 128)).unwrap();
        assert_eq!(d.counts, Counts { components: 1, cusps: 1, double_points: 0 });
        assert!(d.cusps[0].source[0].abs() < 1e-8 && d.cusps[0].source[1].abs() < 1e-8);
        assert!(d.cusps[0].eta_lambda.abs() < 1e-8);
    }

    #[test]
    fn swallowtail_unfolding_has_a_double_point() {
        // (x, xy + y^4 - t y^2) for t > 0: two cusps and one transverse double fold.
        let d = apparent_contour(&map("(x, x*y + y^4 - 0.2*y^2)"), &Window::square(0.6, 256)).unwrap();
        assert_eq!(d.counts, Counts { components: 1, cusps: 2, double_points: 1 });
        let dp = &d.double_points[0];
        assert!(dp.gap < 1e-10);
    }

    #[test]
    fn lips_perturbation_is_a_loop_with_two_cusps() {
        let d = apparent_contour(&map("(x, y^3 + x^2*y - 0.04*y)"), &Window::square(0.6, 256)).unwrap();
        assert_eq!(d.counts.components, 1);
        assert!(d.singular_polylines[0].closed);
        assert_eq!(d.counts.cusps, 2);
    }

    #[test]
    fn bad_windows_and_degenerate_maps() {
        assert!(matches!(apparent_contour(&map("(x, y)"), &Window::square(1.0, 8)), Err(ContourError::Window(_))));
        assert!(matches!(
            apparent_contour(&map("(x, x^2)"), &Window::square(1.0, 32)),
            Err(ContourError::DegenerateCells(_))
        ));
    }

    #[test]
    fn deltoid_side_of_i23_has_three_cusps() {
        let w = Window::square(0.15, 256);
        for p in [[0.006, 0.006, -0.3], [-0.01, -0.004, -0.3], [0.0, 0.006, -0.3]] {
            let counts = contour_features(UnfoldingId::I23, &p, &w, DEFAULT_STRATUM_MARGIN).unwrap();
            assert_eq!(counts, Counts { components: 1, cusps: 3, double_points: 0 }, "{p:?}");
        }
    }

    #[test]
    fn beaks_lips_wall_trades_two_cusps() {
        use crate::strata::{Sign, StratumKind};
        let id = StratumId::new(StratumKind::BeaksLips, Sign::Minus);
        let wc = wall_crossing(UnfoldingId::I23, id, &[0.3, -0.3], 512).unwrap();
        assert!(wc.step < wc.gap);
        assert_eq!(wc.delta_cusps().abs(), 2);
        assert_eq!(wc.delta_double_points(), 0);
    }

    #[test]
    fn swallowtail_wall_creates_two_cusps_and_a_double_fold() {
        use crate::strata::{Sign, StratumKind};
        let id = StratumId::new(StratumKind::Swallowtail, Sign::Minus);
        let wc = wall_crossing(UnfoldingId::I23, id, &[0.15, -0.3], 512).unwrap();
        assert_eq!(wc.delta_cusps().abs(), 2);
        assert_eq!(wc.delta_double_points(), wc.delta_cusps() / 2);
    }

    #[test]
    fn cusp_fold_wall_keeps_cusps() {
        use crate::strata::{Sign, StratumKind};
        let id = StratumId::new(StratumKind::CuspFold, Sign::Plus);
        let lo = wall_crossing(UnfoldingId::I23, id, &[-0.1, -0.3], 256).unwrap();
        let hi = wall_crossing(UnfoldingId::I23, id, &[-0.1, -0.3], 512).unwrap();
        assert_eq!((lo.before, lo.after), (hi.before, hi.after));
        assert_eq!(lo.delta_cusps(), 0);
        assert_eq!(lo.delta_double_points().abs(), 2);
    }
}
