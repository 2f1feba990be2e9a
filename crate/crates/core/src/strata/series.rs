use super::systems::{EtaChoice, VA, VB, VC, VX, VY};
use super::{StrataError, UnfoldingId};
use crate::numeric::{trace_branch, ContinuationOptions, NewtonOptions, PolySystem};
use crate::poly::{MPoly, MAX_VARS};
use crate::scalar::{q_from_f64, Q};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// Degree of the weighted least-squares polynomial fitted to `a(b)`.
pub const SWALLOWTAIL_FIT_DEGREE: usize = 17;
/// Number of reported leading coefficients (`b^0 … b^9`).
pub const REPORTED_COEFFS: usize = 10;
pub const FIT_WINDOW: (f64, f64) = (0.02, 0.25);
pub const FIT_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesFit {
    /// Coefficients of `b^0 … b^9`.
    pub coeffs: Vec<f64>,
    /// All fitted coefficients up to [`SWALLOWTAIL_FIT_DEGREE`].
    pub full: Vec<f64>,
    pub samples: usize,
    /// Largest relative misfit `|a - p(b)| / |a|` over the samples.
    pub max_rel_misfit: f64,
}

/// Contact orders of the odd-shaped sharksfin swallowtail surface with the beaks planes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OddContacts {
    /// Slice value used for the two branch orders.
    pub c: f64,
    /// Order of `a` in `c` at fixed `b`: contact with `{a = 0}` along the `b`-axis.
    pub axis_order: f64,
    /// Order of `b` in `a` on the branch tangent to `{b = 0}`.
    pub branch_a_order: f64,
    /// Order of `a` in `b` on the branch tangent to `{a = 0}` (absent for `c = 0`).
    pub branch_b_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "unfolding", rename_all = "snake_case")]
pub enum SeriesResult {
    Sharksfin(SeriesFit),
    OddSharksfin(OddContacts),
}

fn swallowtail_equations(u: UnfoldingId) -> Vec<MPoly> {
    u.eta_tower(EtaChoice::Gradient, 2)
}

/// Rewrites `eqs` under `var ↦ t^power · var` and divides out the common power of `t`.
fn scaled(eqs: &[MPoly], t: usize, scalings: &[(usize, u32)]) -> Vec<MPoly> {
    let tv = MPoly::var(t);
    eqs.iter()
        .map(|e| {
            let mut out = e.clone();
            for &(k, p) in scalings {
                out = out.substitute(k, &(&tv.pow(p) * &MPoly::var(k)));
            }
            out.strip_monomial(&[t]).0
        })
        .collect()
}

fn pt(assign: &[(usize, f64)]) -> Vec<f64> {
    crate::numeric::point(assign)
}

/// Samples `(b, a)` of the `a = a(b)` swallowtail branch of the sharksfin.
///
/// The branch is traced in the blown-up coordinates `x = b^3 X`, `y = b^2 Y`, `a = b^4 A`
/// from `(X, Y, A) = (-1/4, -1/4, 1/16)` at `b = 0`, then each sample is polished by
/// Newton's method at fixed `b`.
pub fn sharksfin_swallowtail_samples(n: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>, StrataError> {
    if !(lo < hi) || n < 2 {
        return Err(StrataError::EmptyWindow);
    }
    let eqs = scaled(&swallowtail_equations(UnfoldingId::Sharksfin), VB, &[(VX, 3), (VY, 2), (VA, 4)]);
    let curve = PolySystem::new(eqs.clone(), vec![VX, VY, VA, VB]);
    let mut start = pt(&[(VX, -0.25), (VY, -0.25), (VA, 0.0625)]);
    let seed_sys = PolySystem::new(eqs.clone(), vec![VX, VY, VA]);
    seed_sys.newton(&mut start, NewtonOptions::default())?;
    let traced = trace_branch(&curve, &start, &[0.0, 0.0, 0.0, 1.0], ContinuationOptions::default(), |p| p[VB] >= hi)?;
    let fixed_b = PolySystem::new(eqs, vec![VX, VY, VA]);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let b = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let near =
            traced.iter().min_by(|p, q| (p[VB] - b).abs().total_cmp(&(q[VB] - b).abs())).expect("trace has points");
        let mut p = near.clone();
        p[VB] = b;
        fixed_b.newton(&mut p, NewtonOptions::default())?;
        let exact = refine_exact(&fixed_b, &p)?;
        let a = num_traits::pow(q_from_f64(b).expect("finite"), 4) * &exact[VA];
        out.push((b, a.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(out)
}

/// Iterative refinement of a Newton solution with residuals evaluated in exact arithmetic.
///
/// The Jacobian solve stays in `f64`; accumulating the corrections as rationals carries
/// the solution beyond double precision so that derived quantities round correctly.
fn refine_exact(sys: &PolySystem, p: &[f64]) -> Result<Vec<Q>, StrataError> {
    let mut q: Vec<Q> = p.iter().map(|v| q_from_f64(*v).unwrap_or_else(Q::zero)).collect();
    let mut f: Vec<f64> = p.to_vec();
    for _ in 0..3 {
        let r: Vec<f64> = sys.equations().iter().map(|e| e.eval(&q).to_f64().unwrap_or(f64::NAN)).collect();
        let j = sys.jacobian(&f);
        let delta = j
            .lu()
            .solve(&nalgebra::DVector::from_vec(r))
            .ok_or(StrataError::Numeric(crate::numeric::NumericError::Singular))?;
        for (d, &k) in delta.iter().zip(sys.unknowns()) {
            q[k] -= q_from_f64(*d).unwrap_or_else(Q::zero);
            f[k] = q[k].to_f64().unwrap_or(f64::NAN);
        }
    }
    Ok(q)
}

/// Exact value `m · 2^e` of a finite float.
fn dyadic(v: f64) -> Option<(BigInt, i64)> {
    if !v.is_finite() {
        return None;
    }
    let (mant, exp, sign) = num_traits::Float::integer_decode(v);
    Some((BigInt::from(sign) * BigInt::from(mant), exp as i64))
}

/// `m1 · 2^e1 + m2 · 2^e2` without rounding.
fn dyadic_add(acc: &mut (BigInt, i64), m: BigInt, e: i64) {
    if acc.0.is_zero() {
        *acc = (m, e);
    } else if e >= acc.1 {
        acc.0 += m << (e - acc.1) as usize;
    } else {
        acc.0 = (&acc.0 << (acc.1 - e) as usize) + m;
        acc.1 = e;
    }
}

/// Fraction-free Gaussian elimination on an integer system `m x = rhs`, solved exactly.
fn solve_bareiss(mut m: Vec<Vec<BigInt>>, mut rhs: Vec<BigInt>) -> Option<Vec<Q>> {
    let n = rhs.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let piv = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
            rhs[i] = (&rhs[i] * &m[k][k] - &m[i][k] * &rhs[k]) / &prev;
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Q::zero(); n];
    for r in (0..n).rev() {
        let mut acc = Q::from_integer(rhs[r].clone());
        for k in r + 1..n {
            acc -= Q::from_integer(m[r][k].clone()) * &x[k];
        }
        x[r] = acc / Q::from_integer(m[r][r].clone());
    }
    Some(x)
}

/// Weighted least-squares polynomial of degree `deg` through `(b, a)`.
///
/// Each residual is weighted by `2^(-4k)` where `2^k ≤ |b| < 2^(k+1)`, a power-of-two
/// stand-in for `1/b^4` that keeps the fit close to relative. Samples are exact binary
/// rationals and the weights are powers of two, so the normal equations are assembled
/// and solved without rounding; only the final conversion to `f64` is inexact.
pub fn weighted_poly_fit(samples: &[(f64, f64)], deg: usize) -> Option<Vec<f64>> {
    let n = deg + 1;
    let zero = || (BigInt::zero(), 0i64);
    // Moment k is Σ w² b^k; rhs i is Σ w² a b^i.
    let mut moments = vec![zero(); 2 * n - 1];
    let mut rhs = vec![zero(); n];
    for &(b, a) in samples {
        let (bm, be) = dyadic(b)?;
        let (am, ae) = dyadic(a)?;
        if bm.is_zero() {
            return None;
        }
        let octave = be + bm.bits() as i64 - 1;
        let w2 = -8 * octave;
        let mut pw = (BigInt::one(), w2);
        for slot in moments.iter_mut() {
            dyadic_add(slot, pw.0.clone(), pw.1);
            pw = (&pw.0 * &bm, pw.1 + be);
        }
        let mut pw = (am, ae + w2);
        for slot in rhs.iter_mut() {
            dyadic_add(slot, pw.0.clone(), pw.1);
            pw = (&pw.0 * &bm, pw.1 + be);
        }
    }
    let emin = moments.iter().chain(&rhs).filter(|d| !d.0.is_zero()).map(|d| d.1).min()?;
    let int = |d: &(BigInt, i64)| {
        if d.0.is_zero() {
            BigInt::zero()
        } else {
            &d.0 << (d.1 - emin) as usize
        }
    };
    let m: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| int(&moments[i + j])).collect()).collect();
    let r: Vec<BigInt> = rhs.iter().map(int).collect();
    let sol = solve_bareiss(m, r)?;
    Some(sol.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
}

fn horner(coeffs: &[f64], b: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * b + c)
}

fn sharksfin_fit() -> Result<SeriesFit, StrataError> {
    let samples = sharksfin_swallowtail_samples(FIT_SAMPLES, FIT_WINDOW.0, FIT_WINDOW.1)?;
    let full = weighted_poly_fit(&samples, SWALLOWTAIL_FIT_DEGREE)
        .ok_or(StrataError::Numeric(crate::numeric::NumericError::Singular))?;
    let max_rel_misfit = samples.iter().map(|&(b, a)| ((a - horner(&full, b)) / a).abs()).fold(0.0, f64::max);
    Ok(SeriesFit { coeffs: full[..REPORTED_COEFFS].to_vec(), full, samples: samples.len(), max_rel_misfit })
}

/// Order of `v(t)` at `t = 0` from the ratios of successive halvings.
fn order_estimate(vals: &[(f64, f64)]) -> f64 {
    let k = vals.len();
    let (t1, v1) = vals[k - 2];
    let (t2, v2) = vals[k - 1];
    (v1.abs() / v2.abs()).ln() / (t1 / t2).ln()
}

/// Solves a blown-up swallowtail system along `t = t0 / 2^k` and estimates the order of `target`.
fn blown_up_order(
    eqs: &[MPoly],
    t: usize,
    scalings: &[(usize, u32)],
    target: usize,
    seed: &[(usize, f64)],
    fixed: &[(usize, f64)],
    t0: f64,
) -> Result<f64, StrataError> {
    let sys_eqs = scaled(eqs, t, scalings);
    let unknowns: Vec<usize> = scalings.iter().map(|s| s.0).collect();
    let sys = PolySystem::new(sys_eqs, unknowns);
    let mut p = vec![0.0; MAX_VARS];
    for &(k, v) in seed.iter().chain(fixed) {
        p[k] = v;
    }
    // Converge on the blown-up solution at t = 0 first, then continue outward in halvings.
    p[t] = 0.0;
    sys.newton(&mut p, NewtonOptions::default())?;
    let power = scalings.iter().find(|s| s.0 == target).map(|s| s.1).unwrap_or(0) as i32;
    let mut vals = Vec::new();
    for k in (0..8).rev() {
        let tv = t0 / f64::powi(2.0, k);
        p[t] = tv;
        sys.newton(&mut p, NewtonOptions::default())?;
        vals.push((tv, p[target] * tv.powi(power)));
    }
    vals.reverse();
    Ok(order_estimate(&vals))
}

/// Contact orders of the odd-shaped sharksfin swallowtail surface with the beaks planes.
///
/// * along the `b`-axis at `b = 0.2`: `a` as a function of `c`,
/// * on the slice `c`, the branch `b = b(a)` near `{b = 0}`,
/// * on the slice `c ≠ 0`, the branch `a = a(b)` near `{a = 0}`.
pub fn odd_sharksfin_contacts(c: f64) -> Result<OddContacts, StrataError> {
    let eqs = swallowtail_equations(UnfoldingId::OddSharksfin);
    let b0: f64 = 0.2;
    let axis_order = blown_up_order(
        &eqs,
        VC,
        &[(VX, 2), (VY, 1), (VA, 3)],
        VA,
        &[(VX, -b0.powi(3) / 4.0), (VY, -b0 * b0 / 4.0), (VA, b0.powi(4) / 16.0)],
        &[(VB, b0)],
        0.02,
    )?;
    let branch_a_order = blown_up_order(
        &eqs,
        VA,
        &[(VX, 2), (VY, 3), (VB, 4)],
        VB,
        &[(VX, -0.25), (VY, -0.25), (VB, 0.0625)],
        &[(VC, c)],
        0.05,
    )?;
    let branch_b_order = if c == 0.0 {
        None
    } else {
        Some(blown_up_order(
            &eqs,
            VB,
            &[(VX, 3), (VY, 2), (VA, 4)],
            VA,
            &[(VX, -c * c / 4.0), (VY, -c / 4.0), (VA, c.powi(3) / 16.0)],
            &[(VC, c)],
            0.05,
        )?)
    };
    Ok(OddContacts { c, axis_order, branch_a_order, branch_b_order })
}

/// Numerical swallowtail series of the sharksfin families.
///
/// For the sharksfin the result is a polynomial fit of `a(b)`; for the odd-shaped
/// sharksfin, where no closed form exists, it is the set of contact orders on slice `c`.
pub fn series_fit_swallowtail(u: UnfoldingId, c: f64) -> Result<SeriesResult, StrataError> {
    match u {
        UnfoldingId::Sharksfin => Ok(SeriesResult::Sharksfin(sharksfin_fit()?)),
        UnfoldingId::OddSharksfin => Ok(SeriesResult::OddSharksfin(odd_sharksfin_contacts(c)?)),
        UnfoldingId::I23 => Err(StrataError::InvalidPair { unfolding: u, stratum: super::StratumKind::Swallowtail }),
    }
}
