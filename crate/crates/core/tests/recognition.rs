use planegerm::parse::parse_germ;
use planegerm::recognition::{classify, classify_corank2_2jet, corank, SingularityClass};

fn class_of(src: &str) -> SingularityClass {
    classify(&parse_germ(src, 9).unwrap())
}

#[test]
fn higher_order_terms_do_not_change_determined_classes() {
    use SingularityClass::*;
    assert_eq!(class_of("(x, y)"), Regular);
    assert_eq!(class_of("(x + y^2, y + x*y)"), Regular);
    assert_eq!(class_of("(x, y^2 + x^2*y^3)"), Fold);
    assert_eq!(class_of("(x, x*y + y^3 + y^4 + x^2*y^2)"), Cusp);
    assert_eq!(class_of("(x + y^5, x*y + y^4 + x^3)"), Swallowtail);
}

#[test]
fn lips_and_beaks_differ_by_the_sign_of_the_quadratic_term() {
    assert_eq!(class_of("(x, y^3 + 2*x^2*y + y^4)"), SingularityClass::Lips);
    assert_eq!(class_of("(x, y^3 - 2*x^2*y + y^4)"), SingularityClass::Beaks);
}

#[test]
fn corank_two_germs_are_sorted_by_the_pencil() {
    use SingularityClass::*;
    let germ = |s: &str| parse_germ(s, 6).unwrap();
    assert_eq!(corank(&germ("(x^2 + y^3, y^2 + x^3)")), 2);
    assert_eq!(classify_corank2_2jet(&germ("(x^2 + y^3, y^2 + x^3)")).unwrap(), Sharksfin);
    assert_eq!(classify_corank2_2jet(&germ("(x^2 - y^2 + x^3, x*y)")).unwrap(), DeltoidTwoJet);
    assert_eq!(classify_corank2_2jet(&germ("(x^2 + y^3, x*y)")).unwrap(), I23Candidate);
}

#[test]
fn corank_one_classifier_rejects_corank_two() {
    let g = parse_germ("(x^2 + y^3, x*y)", 6).unwrap();
    assert!(planegerm::recognition::classify_corank1(&g).is_err());
}
