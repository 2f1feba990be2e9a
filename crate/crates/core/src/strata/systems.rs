//! The unfolding families as polynomials in `(x, y, a, b, c)` and their recognition
//! quantities.

use crate::jets::Jet;
use crate::poly::{MPoly, MAX_VARS};
use crate::recognition::MapGerm;
use crate::scalar::Q;
use num_traits::{ToPrimitive, Zero};

use super::UnfoldingId;

/// Variable slots shared by every symbolic system in this module.
pub const VX: usize = 0;
pub const VY: usize = 1;
pub const VA: usize = 2;
pub const VB: usize = 3;
pub const VC: usize = 4;
/// Second source point of a bi-germ.
pub const VX2: usize = 5;
pub const VY2: usize = 6;

/// Vector field used to differentiate along the kernel of the differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaChoice {
    /// `(-f1_y, f1_x)`.
    Gradient,
    /// `-x ∂/∂x + y ∂/∂y`, for the `I2,3` family only.
    Euler,
}

fn v(k: usize) -> MPoly {
    MPoly::var(k)
}

impl UnfoldingId {
    /// Components of the family.
    pub fn components(&self) -> (MPoly, MPoly) {
        let (x, y, a, b, c) = (v(VX), v(VY), v(VA), v(VB), v(VC));
        match self {
            UnfoldingId::Sharksfin => (&(&x.pow(2) + &y.pow(3)) + &(&a * &y), &(&y.pow(2) + &x.pow(3)) + &(&b * &x)),
            UnfoldingId::OddSharksfin => {
                (&(&(&x.pow(2) + &y.pow(5)) + &(&c * &y.pow(3))) + &(&a * &y), &(&y.pow(2) + &x.pow(3)) + &(&b * &x))
            }
            UnfoldingId::I23 => (&(&(&(&x.pow(2) + &y.pow(3)) + &(&a * &x)) + &(&b * &y)) + &(&c * &y.pow(2)), &x * &y),
        }
    }

    /// Jacobian determinant `λ`.
    pub fn lambda(&self) -> MPoly {
        let (f1, f2) = self.components();
        &(&f1.partial(VX) * &f2.partial(VY)) - &(&f1.partial(VY) * &f2.partial(VX))
    }

    pub fn eta(&self, choice: EtaChoice) -> (MPoly, MPoly) {
        match choice {
            EtaChoice::Euler => (-v(VX), v(VY)),
            EtaChoice::Gradient => {
                let (f1, _) = self.components();
                (-f1.partial(VY), f1.partial(VX))
            }
        }
    }

    /// `[λ, ηλ, …, η^n λ]`.
    pub fn eta_tower(&self, choice: EtaChoice, n: usize) -> Vec<MPoly> {
        let (e1, e2) = self.eta(choice);
        let mut out = vec![self.lambda()];
        for _ in 0..n {
            let g = out.last().expect("nonempty");
            let next = &(&e1 * &g.partial(VX)) + &(&e2 * &g.partial(VY));
            out.push(next);
        }
        out
    }

    /// The member of the family at `params`, as float jets in `(x, y)`.
    pub fn member_f64(&self, params: &[f64], order: usize) -> (Jet<f64>, Jet<f64>) {
        let (f1, f2) = self.components();
        let pt = param_point(self, params);
        (poly_to_jet_f64(&f1, &pt, order), poly_to_jet_f64(&f2, &pt, order))
    }

    pub fn member_q(&self, params: &[Q], order: usize) -> (Jet<Q>, Jet<Q>) {
        let (f1, f2) = self.components();
        let mut f1 = f1;
        let mut f2 = f2;
        for (i, p) in params.iter().enumerate() {
            let val = MPoly::constant(p.clone());
            f1 = f1.substitute(VA + i, &val);
            f2 = f2.substitute(VA + i, &val);
        }
        (poly_to_jet_q(&f1, order), poly_to_jet_q(&f2, order))
    }

    /// Germ of the member at `params`, recentred at the source point `(x0, y0)`.
    pub fn germ_at_f64(&self, params: &[f64], x0: f64, y0: f64, order: usize) -> MapGerm<f64> {
        let (f1, f2) = self.member_f64(params, order);
        MapGerm::from_map_at(&f1, &f2, &x0, &y0)
    }

    pub fn germ_at_q(&self, params: &[Q], x0: &Q, y0: &Q, order: usize) -> MapGerm<Q> {
        let (f1, f2) = self.member_q(params, order);
        MapGerm::from_map_at(&f1, &f2, x0, y0)
    }
}

fn param_point(u: &UnfoldingId, params: &[f64]) -> Vec<f64> {
    assert_eq!(params.len(), u.param_dim(), "parameter count for {u:?}");
    let mut pt = vec![0.0; crate::poly::MAX_VARS];
    for (i, p) in params.iter().enumerate() {
        pt[VA + i] = *p;
    }
    pt
}

/// Collapses every non-source variable at `pt` and returns the result as a jet in `(x, y)`.
pub fn poly_to_jet_f64(p: &MPoly, pt: &[f64], order: usize) -> Jet<f64> {
    let mut j = Jet::zero(order);
    for (m, c) in p.terms() {
        let (i, k) = (m[VX] as usize, m[VY] as usize);
        if i + k > order {
            continue;
        }
        let mut t = c.to_f64().unwrap_or(f64::NAN);
        for (var, &e) in m.iter().enumerate().skip(2) {
            if e > 0 {
                t *= pt[var].powi(e as i32);
            }
        }
        let cur = j.coeff(i, k);
        j.set(i, k, cur + t);
    }
    j
}

/// Jet of a polynomial in `(x, y)` alone.
pub fn poly_to_jet_q(p: &MPoly, order: usize) -> Jet<Q> {
    let mut j = Jet::zero(order);
    for (m, c) in p.terms() {
        assert!(m.iter().skip(2).all(|&e| e == 0), "polynomial has parameters left");
        let (i, k) = (m[VX] as usize, m[VY] as usize);
        if i + k <= order {
            let cur = j.coeff(i, k);
            j.set(i, k, cur + c.clone());
        }
    }
    j
}

/// Polynomial in `(x, y)` with the coefficients of a rational jet.
pub fn jet_to_poly_q(j: &Jet<Q>) -> MPoly {
    j.terms().fold(MPoly::zero(), |acc, (i, k, c)| {
        let mut m = [0u8; MAX_VARS];
        m[VX] = i as u8;
        m[VY] = k as u8;
        &acc + &MPoly::term(m, c.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognition::jacobian_jet;

    #[test]
    fn lambda_of_i23_family() {
        // x(2x + a) - y(3y^2 + 2cy + b)
        let (x, y, a, b, c) = (v(VX), v(VY), v(VA), v(VB), v(VC));
        let want = &(&x * &(&x.scale(&Q::from_integer(2.into())) + &a))
            - &(&y
                * &(&(&y.pow(2).scale(&Q::from_integer(3.into())) + &(&c * &y).scale(&Q::from_integer(2.into())))
                    + &b));
        assert_eq!(UnfoldingId::I23.lambda(), want);
    }

    #[test]
    fn euler_field_is_a_kernel_field_of_i23() {
        // dG · (-x, y) = (-λ, 0) identically.
        let u = UnfoldingId::I23;
        let (f1, f2) = u.components();
        let (e1, e2) = u.eta(EtaChoice::Euler);
        let d1 = &(&f1.partial(VX) * &e1) + &(&f1.partial(VY) * &e2);
        let d2 = &(&f2.partial(VX) * &e1) + &(&f2.partial(VY) * &e2);
        assert_eq!(d1, -u.lambda());
        assert_eq!(d2, MPoly::int(0));
    }

    #[test]
    fn member_jets_match_symbolic_lambda() {
        let germ = UnfoldingId::I23.germ_at_f64(&[0.1, -0.2, 0.3], 0.0, 0.0, 9);
        let lam = jacobian_jet(&germ);
        let pt = [0.0, 0.0, 0.1, -0.2, 0.3, 0.0, 0.0, 0.0];
        let sym = UnfoldingId::I23.lambda();
        assert!((lam.coeff(1, 0) - sym.partial(VX).eval_f64(&pt)).abs() < 1e-15);
        assert!((lam.coeff(0, 1) - sym.partial(VY).eval_f64(&pt)).abs() < 1e-15);
    }
}
