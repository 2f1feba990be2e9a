use planegerm::geometry::{
    caustic_walls, characteristic_curves, contact_order, projection_germ, BranchPairing, ContactOrder, CrosscapFamily,
    CurveLabel, PlaneCurveGerm,
};
use planegerm::recognition::{classify_corank2_2jet, SingularityClass};
use planegerm::scalar::qi;
use planegerm::strata::StratumKind;
use planegerm::MPoly;

fn x() -> MPoly {
    MPoly::var(0)
}

fn y() -> MPoly {
    MPoly::var(1)
}

#[test]
fn projection_regimes() {
    let cf = CrosscapFamily::typical();
    let cls = |t: f64| classify_corank2_2jet(&projection_germ(&cf, 0.0, 0.0, t)).unwrap();
    assert_eq!(cls(0.1), SingularityClass::Sharksfin);
    assert_eq!(cls(-0.1), SingularityClass::DeltoidTwoJet);
    assert_eq!(cls(0.0), SingularityClass::I23Candidate);
}

#[test]
fn parabolic_curve_at_zero_is_a_cusp() {
    // At t = 0 the parabolic curve is x² − 3y³.
    let (par, _) = characteristic_curves(&CrosscapFamily::typical(), &qi(0)).unwrap();
    let expect = &x().pow(2) - &(&MPoly::int(3) * &y().pow(3));
    assert_eq!(par.poly, expect);
}

#[test]
fn contact_between_a_line_and_a_parabola() {
    let line = PlaneCurveGerm::new(y(), CurveLabel::Other);
    let parabola = PlaneCurveGerm::new(&y() - &x().pow(2), CurveLabel::Other);
    assert_eq!(contact_order(&line, &parabola, BranchPairing::NearestTangent, 6)[0].order, ContactOrder::Exact(2));
    assert!(matches!(
        contact_order(&parabola, &parabola, BranchPairing::NearestTangent, 6)[0].order,
        ContactOrder::AtLeast(_)
    ));
}

#[test]
fn caustic_section_walls_match_closed_forms() {
    let c: f64 = 0.25;
    let walls = caustic_walls(c, (-0.1, 0.1)).unwrap();
    let find = |k: StratumKind| walls.iter().find(|w| w.kind == k).map(|w| w.b);
    let bl = find(StratumKind::BeaksLips).expect("beaks/lips wall");
    let cf = find(StratumKind::CuspFold).expect("cusp/fold wall");
    assert!((bl - c * c / 3.0).abs() < 2e-3, "{bl}");
    assert!((cf + c * c / 5.0).abs() < 2e-3, "{cf}");
}
