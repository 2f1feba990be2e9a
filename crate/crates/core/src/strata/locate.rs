use super::systems::{EtaChoice, VA, VB, VC, VX, VX2, VY, VY2};
use super::{expected_class, Sign, StrataError, StratumKind, StratumPoint, UnfoldingId};
use crate::jets::DEFAULT_ORDER;
use crate::numeric::{NewtonOptions, PolySystem};
use crate::poly::{resultant, MPoly, MAX_VARS};
use crate::recognition::{classify, SingularityClass};
use crate::scalar::{qi, Q};
use num_traits::Zero;
use serde::Serialize;

/// Source points `p` (cusp) and `q` (fold) of a cusp+fold bi-germ of `I2,3`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiGermWitness {
    pub p: [f64; 2],
    pub q: [f64; 2],
    pub params: [f64; 3],
    /// `xy - XY`, `F1(p) - F1(q)`, `λ(p)`, `λ(q)`, `ηλ(p)`.
    pub residuals: [f64; 5],
    pub p_class: SingularityClass,
    pub q_class: SingularityClass,
}

impl MultiGermWitness {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Local { class: SingularityClass },
    MultiGerm { witness: MultiGermWitness },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Located {
    /// Parameter point after refinement onto the stratum.
    pub params: Vec<f64>,
    /// Source point(s) of the singularity.
    pub source: Vec<[f64; 2]>,
    pub outcome: Outcome,
    /// Largest residual of the defining system at the refined point.
    pub residual: f64,
}

/// Source point(s) where the stratum's singularity sits, read off the parametrization.
pub fn predicted_source(sp: &StratumPoint) -> Vec<[f64; 2]> {
    use StratumKind::*;
    let p = &sp.params;
    let s = sp.stratum.sign.factor() as f64;
    match (sp.unfolding, sp.stratum.kind) {
        (UnfoldingId::I23, BeaksLips) => vec![[-p[0] / 4.0, sp.internal[0]]],
        (UnfoldingId::I23, Goose) => vec![[-p[0] / 4.0, -2.0 * p[2] / 9.0]],
        (UnfoldingId::I23, Swallowtail) => {
            let (y, c) = (sp.internal[0], sp.internal[1]);
            vec![[-s * y * (c + 4.0 * y).sqrt(), y]]
        }
        (UnfoldingId::I23, Butterfly) => {
            let c = sp.internal[0];
            let y = -c / 5.0;
            vec![[-s * y * (c + 4.0 * y).sqrt(), y]]
        }
        (UnfoldingId::I23, CuspFold) => {
            let (y, c) = (sp.internal[0], sp.internal[1]);
            let r = (-y).sqrt();
            let big_y = -(c + 3.0 * y) / 2.0;
            let big_x = s * y * r;
            vec![[s * r * big_y, y], [big_x, big_y]]
        }
        (UnfoldingId::Sharksfin, Swallowtail) => {
            let t = sp.internal[0];
            match sp.stratum.sign {
                Sign::Plus => vec![[-t.powi(3) / 4.0, -t * t / 4.0]],
                Sign::Minus => vec![[-t * t / 4.0, -t.powi(3) / 4.0]],
            }
        }
        _ => vec![[0.0, 0.0]],
    }
}

fn hessian_det(lambda: &MPoly) -> MPoly {
    let lxx = lambda.partial(VX).partial(VX);
    let lxy = lambda.partial(VX).partial(VY);
    let lyy = lambda.partial(VY).partial(VY);
    &(&lxx * &lyy) - &(&lxy * &lxy)
}

/// The defining system of a stratum and the unknowns Newton may move.
fn defining_system(u: UnfoldingId, kind: StratumKind, sign: Sign) -> Option<PolySystem> {
    use StratumKind::*;
    let eta = if u == UnfoldingId::I23 { EtaChoice::Euler } else { EtaChoice::Gradient };
    let tower = u.eta_tower(eta, 3);
    let lam = tower[0].clone();
    let grad = || vec![lam.clone(), lam.partial(VX), lam.partial(VY)];
    // The free parameter for line and curve strata of the sharksfin families.
    let free = match sign {
        Sign::Plus => VA,
        Sign::Minus => VB,
    };
    Some(match (u, kind) {
        (UnfoldingId::I23, BeaksLips) => PolySystem::new(grad(), vec![VX, VY, VA]),
        (UnfoldingId::I23, Goose) => {
            let mut eqs = grad();
            eqs.push(hessian_det(&lam));
            PolySystem::new(eqs, vec![VX, VY, VA, VB])
        }
        (UnfoldingId::I23, Swallowtail) => PolySystem::new(tower[..3].to_vec(), vec![VX, VY, VA]),
        (UnfoldingId::I23, Butterfly) => PolySystem::new(tower.clone(), vec![VX, VY, VA, VB]),
        (UnfoldingId::I23, CuspFold) => {
            let (f1, _) = u.components();
            let to_q = [VX2, VY2, 2, 3, 4, 5, 6, 7];
            let xy = &MPoly::var(VX) * &MPoly::var(VY);
            let xy2 = &MPoly::var(VX2) * &MPoly::var(VY2);
            let eqs = vec![&xy - &xy2, &f1 - &f1.rename(&to_q), lam.clone(), lam.rename(&to_q), tower[1].clone()];
            PolySystem::new(eqs, vec![VX, VY, VX2, VY2, VA])
        }
        (UnfoldingId::Sharksfin | UnfoldingId::OddSharksfin, Swallowtail) => {
            PolySystem::new(tower[..3].to_vec(), vec![VX, VY, free])
        }
        (UnfoldingId::Sharksfin | UnfoldingId::OddSharksfin, BeaksLines) => PolySystem::new(grad(), vec![VX, VY, free]),
        _ => return None,
    })
}

fn classify_at(u: UnfoldingId, params: &[f64], p: [f64; 2]) -> SingularityClass {
    classify(&u.germ_at_f64(params, p[0], p[1], DEFAULT_ORDER))
}

/// Refines a stratum point and classifies the singularity it carries.
///
/// The defining system is solved by Newton's method in the source coordinates plus one
/// (or two) parameters, starting from `params` and the source point predicted by
/// `seed`. The germ at the refined point is then classified and compared with the
/// class the stratum prescribes; a disagreement is returned as
/// [`StrataError::Mismatch`]. Cusp+fold points yield a [`MultiGermWitness`].
pub fn locate_and_classify(u: UnfoldingId, params: &[f64], seed: &StratumPoint) -> Result<Located, StrataError> {
    use StratumKind::*;
    let kind = seed.stratum.kind;
    if !u.strata().contains(&kind) {
        return Err(StrataError::InvalidPair { unfolding: u, stratum: kind });
    }
    if params.len() != u.param_dim() {
        return Err(StrataError::Arity { expected: u.param_dim(), found: params.len() });
    }
    let src = predicted_source(seed);
    let mut pt = vec![0.0; MAX_VARS];
    for (i, v) in params.iter().enumerate() {
        pt[VA + i] = *v;
    }
    pt[VX] = src[0][0];
    pt[VY] = src[0][1];
    if let Some(q) = src.get(1) {
        pt[VX2] = q[0];
        pt[VY2] = q[1];
    }

    let residual = match kind {
        SharksfinAxis | DeltoidAxis | Gulls => {
            // The organizing point sits at the source origin with a = b = 0 (and c = 0 for gulls).
            pt[VX] = 0.0;
            pt[VY] = 0.0;
            pt[VA] = 0.0;
            if kind == Gulls {
                pt[VC] = 0.0;
            } else {
                pt[VB] = 0.0;
            }
            0.0
        }
        Tacnode => return Err(StrataError::NotLocatable(kind)),
        _ => {
            let sys = defining_system(u, kind, seed.stratum.sign).ok_or(StrataError::NotLocatable(kind))?;
            sys.newton(&mut pt, NewtonOptions::default())?.residual
        }
    };
    let refined: Vec<f64> = (0..u.param_dim()).map(|i| pt[VA + i]).collect();
    let p = [pt[VX], pt[VY]];

    if kind == CuspFold {
        let q = [pt[VX2], pt[VY2]];
        let sys = defining_system(u, kind, seed.stratum.sign).expect("cusp+fold system");
        let r = sys.residual(&pt);
        let witness = MultiGermWitness {
            p,
            q,
            params: [refined[0], refined[1], refined[2]],
            residuals: [r[0], r[1], r[2], r[3], r[4]],
            p_class: classify_at(u, &refined, p),
            q_class: classify_at(u, &refined, q),
        };
        let distinct = (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-8;
        if witness.p_class != SingularityClass::Cusp || witness.q_class != SingularityClass::Fold || !distinct {
            return Err(StrataError::Mismatch {
                expected: "cusp + fold at distinct points".into(),
                found: format!("{} + {}", witness.p_class, witness.q_class),
            });
        }
        return Ok(Located { params: refined, source: vec![p, q], outcome: Outcome::MultiGerm { witness }, residual });
    }

    let class = classify_at(u, &refined, p);
    if let Some(expected) = expected_class(u, seed) {
        if class != expected {
            return Err(StrataError::Mismatch { expected: expected.to_string(), found: class.to_string() });
        }
    }
    Ok(Located { params: refined, source: vec![p], outcome: Outcome::Local { class }, residual })
}

/// Result of eliminating the source point from the gulls conditions on `I2,3`.
#[derive(Clone, Debug, PartialEq)]
pub struct GullsElimination {
    /// `λ` and `η²λ` after `a = -4x`, `b = -4cy - 9y^2` (from `dλ = 0`).
    pub lambda: MPoly,
    pub eta2_lambda: MPoly,
    /// Resultant of the two with respect to `x`.
    pub resultant: MPoly,
    /// The resultant is `constant · y^y_power`.
    pub constant: Option<Q>,
    pub y_power: u8,
    /// `λ` restricted to `y = 0`.
    pub lambda_on_y0: MPoly,
    /// Whether the system forces `x = y = a = b = 0`.
    pub forces_origin: bool,
}

/// Exact elimination showing that `dλ = λ = η²λ = 0` has only the origin as solution.
pub fn gulls_elimination() -> GullsElimination {
    let u = UnfoldingId::I23;
    let tower = u.eta_tower(EtaChoice::Euler, 2);
    let (x, y, c) = (MPoly::var(VX), MPoly::var(VY), MPoly::var(VC));
    let a_val = x.scale(&qi(-4));
    let b_val = &(&c * &y).scale(&qi(-4)) - &y.pow(2).scale(&qi(9));
    let sub = |p: &MPoly| p.substitute(VA, &a_val).substitute(VB, &b_val);
    let lambda = sub(&tower[0]);
    let eta2_lambda = sub(&tower[2]);
    let res = resultant(&lambda, &eta2_lambda, VX);
    let (rest, content) = res.strip_monomial(&[VY]);
    let constant = rest.constant_value();
    let lambda_on_y0 = lambda.substitute(VY, &MPoly::zero());
    // λ(x, 0) must be a nonzero multiple of a power of x alone.
    let (lam_rest, lam_content) = lambda_on_y0.strip_monomial(&[VX]);
    let forces_origin =
        constant.is_some() && content[VY] > 0 && lam_rest.constant_value().is_some() && lam_content[VX] > 0;
    GullsElimination {
        lambda,
        eta2_lambda,
        resultant: res,
        constant,
        y_power: content[VY],
        lambda_on_y0,
        forces_origin,
    }
}

/// Exact class of the odd-shaped sharksfin member at `(a, b, c)`, at the source origin.
pub fn odd_sharksfin_origin_class(params: &[Q]) -> SingularityClass {
    let u = UnfoldingId::OddSharksfin;
    let zero = qi(0);
    classify(&u.germ_at_q(params, &zero, &zero, DEFAULT_ORDER))
}
