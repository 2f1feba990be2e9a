use planegerm::scalar::{q, qi};
use planegerm::strata::{implicit_residual_exact, parametrize_exact, CuspFoldForm, ExactPoint};
use planegerm::strata::{Sign, StratumId, StratumKind, UnfoldingId};
use planegerm::Q;

fn exact(kind: StratumKind, sign: Sign, y: Q, c: Q) -> ExactPoint {
    parametrize_exact(UnfoldingId::I23, StratumId::new(kind, sign), &[y, c], CuspFoldForm::Corrected).unwrap()
}

#[test]
fn beaks_lips_point_at_unit_height() {
    // a = ±4y√(c+3y), b = −y(4c+9y): at y = c = 1 this is (±8, −13, 1).
    for (sign, a) in [(Sign::Plus, 8i32), (Sign::Minus, -8)] {
        let p = exact(StratumKind::BeaksLips, sign, qi(1), qi(1));
        assert_eq!(p.a.square(), qi(64));
        assert_eq!(p.a.sign(), a.signum());
        assert_eq!(p.b, qi(-13));
        assert_eq!(p.c, Some(qi(1)));
        assert_eq!(implicit_residual_exact(StratumKind::BeaksLips, &p).unwrap(), qi(0));
    }
}

#[test]
fn swallowtail_point_has_an_irrational_a() {
    // a² = y²(4c+15y)²/(c+4y) = 361/5 and b = −2y(2c+5y) = −14 at y = c = 1.
    let p = exact(StratumKind::Swallowtail, Sign::Plus, qi(1), qi(1));
    assert_eq!(p.a.square(), q(361, 5));
    assert!(p.a.as_rational().is_none());
    assert_eq!(p.b, qi(-14));
    assert_eq!(implicit_residual_exact(StratumKind::Swallowtail, &p).unwrap(), qi(0));
}

#[test]
fn goose_point_on_the_unit_slice() {
    let id = StratumId::new(StratumKind::Goose, Sign::Plus);
    let p = parametrize_exact(UnfoldingId::I23, id, &[qi(1)], CuspFoldForm::Corrected).unwrap();
    assert_eq!(p.a.square(), q(64, 243));
    assert_eq!(p.b, q(4, 9));
    // The goose curve is the cuspidal edge of the beaks/lips surface
    // 243a⁴ − 864a²bc + 256a²c³ + 768b³ − 256b²c² = 0.
    let (a2, b, c) = (p.a.square(), p.b.clone(), qi(1));
    let bl = qi(243) * &a2 * &a2 - qi(864) * &a2 * &b * &c + qi(256) * &a2 * &c * &c * &c + qi(768) * &b * &b * &b
        - qi(256) * &b * &b * &c * &c;
    assert_eq!(bl, qi(0));
    assert_eq!(implicit_residual_exact(StratumKind::BeaksLips, &p).unwrap(), qi(0));
}

#[test]
fn domain_violations_are_errors() {
    let id = StratumId::new(StratumKind::BeaksLips, Sign::Plus);
    assert!(parametrize_exact(UnfoldingId::I23, id, &[qi(-1), qi(1)], CuspFoldForm::Corrected).is_err());
    assert!(parametrize_exact(UnfoldingId::I23, id, &[qi(1)], CuspFoldForm::Corrected).is_err());
}
