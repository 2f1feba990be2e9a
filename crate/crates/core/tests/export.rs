use planegerm::contour::{apparent_contour, ContourDiagram, PlaneMap, Window};
use planegerm::export::{
    curve_from_json, curve_json, diagram_csv, diagram_json, diagram_svg, section_svg, strata_csv, Metadata,
};
use planegerm::geometry::{characteristic_curves, CrosscapFamily};
use planegerm::scalar::q;
use planegerm::strata::{section_curves, SectionWindow, UnfoldingId};

fn class_count(svg: &str, class: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).expect("well-formed svg");
    doc.descendants().filter(|n| n.attribute("class") == Some(class)).count()
}

fn deltoid_diagram() -> ContourDiagram {
    let f = PlaneMap::from_unfolding(UnfoldingId::I23, &[0.004, -0.003, -0.3]);
    apparent_contour(&f, &Window::square(0.15, 256)).unwrap()
}

#[test]
fn deltoid_svg_has_three_cusp_markers() {
    let d = deltoid_diagram();
    let svg = diagram_svg(&d, &Metadata::new().window(&d.window));
    assert_eq!(class_count(&svg, "cusp"), 3);
    assert_eq!(class_count(&svg, "cusp-source"), 3);
}

#[test]
fn positive_i23_section_marks_geese_and_butterflies() {
    let w = SectionWindow::square(2.0);
    let curves = section_curves(UnfoldingId::I23, 1.0, &w, 128).unwrap();
    let svg = section_svg(&curves, &w, &Metadata::new().window(&w));
    assert_eq!(class_count(&svg, "marker goose"), 2);
    assert_eq!(class_count(&svg, "marker butterfly"), 2);
}

#[test]
fn empty_diagram_is_a_valid_svg() {
    let d = ContourDiagram {
        window: Window::square(0.5, 64),
        singular_polylines: vec![],
        contour_polylines: vec![],
        cusps: vec![],
        double_points: vec![],
        counts: Default::default(),
        collisions: vec![],
        max_rel_lambda: 0.0,
    };
    let svg = diagram_svg(&d, &Metadata::new());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(!doc.descendants().any(|n| matches!(n.tag_name().name(), "polyline" | "polygon" | "circle")));
}

#[test]
fn coordinates_carry_at_most_six_decimals() {
    let d = deltoid_diagram();
    let svg = diagram_svg(&d, &Metadata::new());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    for n in doc.descendants() {
        for attr in ["points", "cx", "cy"] {
            if let Some(v) = n.attribute(attr) {
                for num in v.split([' ', ',']).filter(|s| !s.is_empty()) {
                    let decimals = num.split('.').nth(1).map_or(0, str::len);
                    assert!(decimals <= 6, "{num}");
                    assert!(!num.contains('e'), "{num}");
                }
            }
        }
    }
}

#[test]
fn exports_are_deterministic() {
    let a = deltoid_diagram();
    let b = deltoid_diagram();
    let meta = Metadata::new().window(&a.window).tolerance("stratum_margin", 1e-3);
    assert_eq!(diagram_csv(&a, &meta), diagram_csv(&b, &meta));
    assert_eq!(diagram_json(&a, &meta).to_string(), diagram_json(&b, &meta).to_string());
    let w = SectionWindow::square(1.0);
    let c1 = section_curves(UnfoldingId::I23, 0.5, &w, 64).unwrap();
    let c2 = section_curves(UnfoldingId::I23, 0.5, &w, 64).unwrap();
    assert_eq!(strata_csv(&c1, 0.5, &meta), strata_csv(&c2, 0.5, &meta));
}

#[test]
fn strata_csv_rows_lie_on_the_slice() {
    let w = SectionWindow::square(1.0);
    let curves = section_curves(UnfoldingId::I23, 0.5, &w, 64).unwrap();
    let csv = strata_csv(&curves, 0.5, &Metadata::new());
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("stratum,sign,curve,internal,a,b,c"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), curves.iter().map(|c| c.points.len()).sum::<usize>());
    assert!(rows.iter().all(|r| r.ends_with(",0.5")));
}

#[test]
fn curve_tables_round_trip() {
    for t in [q(0, 1), q(1, 10), q(-3, 7)] {
        let (par, fl) = characteristic_curves(&CrosscapFamily::typical(), &t).unwrap();
        for c in [par, fl] {
            let v = curve_json(&c);
            let text = serde_json::to_string(&v).unwrap();
            let back = curve_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, c);
        }
    }
}
