//! SVG, CSV and JSON renderings of contour diagrams, stratum sections, sweeps and
//! curve germs. Every figure carries a metadata block (tool version, tolerances, window).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::contour::{ContourDiagram, Polyline, Window};
use crate::geometry::{CurveLabel, PlaneCurveGerm, Sweep};
use crate::jets::{DynJet, Jet};
use crate::strata::systems::jet_to_poly_q;
use crate::strata::{CurveShape, LabeledCurve, SectionWindow};
use crate::Q;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed curve table: {0}")]
    Table(String),
}

/// Reproducibility header attached to every exported figure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub window: Option<Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub extra: BTreeMap<String, Value>,
}

impl Metadata {
    pub fn new() -> Self {
        Self {
            tool: "planegerm",
            version: env!("CARGO_PKG_VERSION"),
            window: None,
            tolerances: BTreeMap::new(),
            extra: BTreeMap::new(),
        }
    }

    pub fn window<W: Serialize>(mut self, w: &W) -> Self {
        self.window = serde_json::to_value(w).ok();
        self
    }

    pub fn tolerance(mut self, name: &str, v: f64) -> Self {
        self.tolerances.insert(name.to_string(), v);
        self
    }

    pub fn with<V: Serialize>(mut self, key: &str, v: V) -> Self {
        self.extra.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    /// The metadata as `# `-prefixed CSV comment lines.
    fn csv_header(&self) -> String {
        format!("# {}\n", serde_json::to_string(&self.to_json()).unwrap_or_default())
    }
}

impl Default for Metadata {
    fn default() -> Self {
        Self::new()
    }
}

/// `v` rounded to six decimals, printed without exponent and without `-0`.
pub fn round6(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const PANEL: f64 = 480.0;
const GAP: f64 = 20.0;

#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn of_window(w: &Window) -> Self {
        Self { x0: w.xmin, x1: w.xmax, y0: w.ymin, y1: w.ymax }
    }

    /// Bounding box of the polylines, padded by 5%; `fallback` when there are none.
    fn around<'a>(pts: impl Iterator<Item = &'a [f64; 2]>, fallback: Frame) -> Self {
        let mut f = Frame { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
        for p in pts {
            f.x0 = f.x0.min(p[0]);
            f.x1 = f.x1.max(p[0]);
            f.y0 = f.y0.min(p[1]);
            f.y1 = f.y1.max(p[1]);
        }
        if !(f.x0 < f.x1 || f.y0 < f.y1) {
            return fallback;
        }
        let pad = 0.05 * (f.x1 - f.x0).max(f.y1 - f.y0);
        Frame { x0: f.x0 - pad, x1: f.x1 + pad, y0: f.y0 - pad, y1: f.y1 + pad }
    }

    fn span(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }
}

/// Opens a panel whose user coordinates are the mathematical ones (y pointing up).
fn open_panel(out: &mut String, id: &str, x: f64, f: Frame) {
    let _ = writeln!(
        out,
        r#"<svg id="{id}" x="{}" y="0" width="{PANEL}" height="{PANEL}" viewBox="{} {} {} {}" preserveAspectRatio="xMidYMid meet">"#,
        round6(x),
        round6(f.x0),
        round6(-f.y1),
        round6(f.x1 - f.x0),
        round6(f.y1 - f.y0),
    );
    out.push_str(r#"<g transform="scale(1,-1)">"#);
    out.push('\n');
}

fn close_panel(out: &mut String) {
    out.push_str("</g>\n</svg>\n");
}

fn points_attr(pts: &[[f64; 2]]) -> String {
    pts.iter().map(|p| format!("{},{}", round6(p[0]), round6(p[1]))).collect::<Vec<_>>().join(" ")
}

fn polyline_element(out: &mut String, class: &str, line: &Polyline, extra: &str) {
    let tag = if line.closed { "polygon" } else { "polyline" };
    let _ = writeln!(
        out,
        r#"<{tag} class="{class}"{extra} fill="none" stroke-width="1" vector-effect="non-scaling-stroke" points="{}"/>"#,
        points_attr(&line.points)
    );
}

fn marker(out: &mut String, class: &str, p: [f64; 2], r: f64) {
    let _ = writeln!(out, r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#, round6(p[0]), round6(p[1]), round6(r));
}

fn svg_open(width: f64, meta: &Metadata) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{PANEL}" viewBox="0 0 {w} {PANEL}">"#,
        w = round6(width)
    );
    let _ = writeln!(out, "<metadata>{}</metadata>", xml_escape(&meta.to_json().to_string()));
    out.push_str(
        "<style>.singular{stroke:#1f4e9a}.contour{stroke:#9a1f1f}.cusp,.cusp-source{fill:#d08c00}\
         .double-point,.double-point-source{fill:#2a8a2a}</style>\n",
    );
    out
}

/// Source panel (singular set) and target panel (apparent contour) side by side.
///
/// Cusps are drawn once as `class="cusp"` at their image and once as `cusp-source`;
/// double points as `double-point` and their two preimages as `double-point-source`.
pub fn diagram_svg(d: &ContourDiagram, meta: &Metadata) -> String {
    let mut out = svg_open(2.0 * PANEL + GAP, meta);
    let src = Frame::of_window(&d.window);
    out.push_str(r#"<g id="source-layer">"#);
    out.push('\n');
    open_panel(&mut out, "source", 0.0, src);
    for l in &d.singular_polylines {
        polyline_element(&mut out, "singular", l, "");
    }
    let r = 0.008 * src.span();
    for c in &d.cusps {
        marker(&mut out, "cusp-source", c.source, r);
    }
    for dp in &d.double_points {
        marker(&mut out, "double-point-source", dp.p, r);
        marker(&mut out, "double-point-source", dp.q, r);
    }
    close_panel(&mut out);
    out.push_str("</g>\n");

    let tgt = Frame::around(d.contour_polylines.iter().flat_map(|l| l.points.iter()), src);
    out.push_str(r#"<g id="image-layer">"#);
    out.push('\n');
    open_panel(&mut out, "target", PANEL + GAP, tgt);
    for l in &d.contour_polylines {
        polyline_element(&mut out, "contour", l, "");
    }
    let r = 0.008 * tgt.span();
    for c in &d.cusps {
        marker(&mut out, "cusp", c.image, r);
    }
    for dp in &d.double_points {
        marker(&mut out, "double-point", dp.image, r);
    }
    close_panel(&mut out);
    out.push_str("</g>\n</svg>\n");
    out
}

/// The `(a, b)` section with one polyline per stratum piece and a
/// `class="marker <kind>"` circle per isolated point.
pub fn section_svg(curves: &[LabeledCurve], window: &SectionWindow, meta: &Metadata) -> String {
    let mut out = svg_open(PANEL, meta);
    let f = Frame { x0: window.a.0, x1: window.a.1, y0: window.b.0, y1: window.b.1 };
    open_panel(&mut out, "section", 0.0, f);
    let r = 0.01 * f.span();
    for c in curves {
        let extra = format!(r#" data-sign="{}""#, c.stratum.sign.as_char());
        match c.shape {
            CurveShape::Polyline => {
                let line = Polyline { points: c.points.clone(), closed: false };
                polyline_element(&mut out, &format!("stratum {}", c.stratum.kind), &line, &extra);
            }
            CurveShape::Point => {
                for p in &c.points {
                    marker(&mut out, &format!("marker {}", c.stratum.kind), *p, r);
                }
            }
        }
    }
    close_panel(&mut out);
    out.push_str("</svg>\n");
    out
}

/// Rows `layer,polyline,index,x,y` for every polyline and marker of the diagram.
pub fn diagram_csv(d: &ContourDiagram, meta: &Metadata) -> String {
    let mut out = meta.csv_header();
    out.push_str("layer,polyline,index,x,y\n");
    let mut row = |layer: &str, k: usize, i: usize, p: [f64; 2]| {
        let _ = writeln!(out, "{layer},{k},{i},{},{}", round6(p[0]), round6(p[1]));
    };
    for (layer, lines) in [("singular", &d.singular_polylines), ("contour", &d.contour_polylines)] {
        for (k, l) in lines.iter().enumerate() {
            for (i, p) in l.points.iter().enumerate() {
                row(layer, k, i, *p);
            }
        }
    }
    for (k, c) in d.cusps.iter().enumerate() {
        row("cusp_source", k, 0, c.source);
        row("cusp_image", k, 0, c.image);
    }
    for (k, dp) in d.double_points.iter().enumerate() {
        row("double_point_source", k, 0, dp.p);
        row("double_point_source", k, 1, dp.q);
        row("double_point_image", k, 0, dp.image);
    }
    out
}

/// Rows `stratum,sign,curve,internal,a,b,c` for the points of a `{c = const}` section.
pub fn strata_csv(curves: &[LabeledCurve], c: f64, meta: &Metadata) -> String {
    let mut out = meta.csv_header();
    out.push_str("stratum,sign,curve,internal,a,b,c\n");
    for (k, cv) in curves.iter().enumerate() {
        for (t, p) in cv.internal.iter().zip(&cv.points) {
            let _ = writeln!(
                out,
                "{},{},{k},{},{},{},{}",
                cv.stratum.kind,
                cv.stratum.sign.as_char(),
                round6(*t),
                round6(p[0]),
                round6(p[1]),
                round6(c)
            );
        }
    }
    out
}

/// Counts, cusps and double points (no polylines) with the metadata block.
pub fn diagram_json(d: &ContourDiagram, meta: &Metadata) -> Value {
    json!({
        "metadata": meta.to_json(),
        "counts": d.counts,
        "cusps": d.cusps,
        "double_points": d.double_points,
        "collisions": d.collisions,
        "max_rel_lambda": d.max_rel_lambda,
    })
}

/// Frame counts and the crossing log of a sweep.
pub fn sweep_json(s: &Sweep, meta: &Metadata) -> Value {
    json!({
        "metadata": meta.to_json(),
        "frame": s.frame,
        "spacing": s.spacing,
        "frames": s.frames,
        "crossings": s.crossings,
        "reference": s.reference,
    })
}

/// File name of frame `k` in a numbered sweep export.
pub fn frame_file_name(k: usize) -> String {
    format!("frame_{k:04}.svg")
}

fn label_name(l: CurveLabel) -> &'static str {
    match l {
        CurveLabel::Parabolic => "parabolic",
        CurveLabel::Flecnodal => "flecnodal",
        CurveLabel::DoublePoint => "double_point",
        CurveLabel::Other => "other",
    }
}

/// Coefficient table of a curve germ, in the rational jet format.
pub fn curve_json(c: &PlaneCurveGerm) -> Value {
    let order = c.poly.total_degree().unwrap_or(0) as usize;
    let mut jet = Jet::<Q>::zero(order);
    for (m, v) in c.poly.terms() {
        jet.set(m[0] as usize, m[1] as usize, v.clone());
    }
    json!({ "label": label_name(c.label), "poly": DynJet::Rational(jet).to_json() })
}

/// Inverse of [`curve_json`].
pub fn curve_from_json(v: &Value) -> Result<PlaneCurveGerm, ExportError> {
    let label = match v.get("label").and_then(Value::as_str) {
        Some("parabolic") => CurveLabel::Parabolic,
        Some("flecnodal") => CurveLabel::Flecnodal,
        Some("double_point") => CurveLabel::DoublePoint,
        Some("other") => CurveLabel::Other,
        other => return Err(ExportError::Table(format!("unknown label {other:?}"))),
    };
    let poly = v.get("poly").ok_or_else(|| ExportError::Table("missing poly".into()))?;
    let jet = match DynJet::from_json(poly).map_err(|e| ExportError::Table(e.to_string()))? {
        DynJet::Rational(j) => j,
        DynJet::Float(j) if j.is_zero() => Jet::zero(j.order()),
        DynJet::Float(_) => return Err(ExportError::Table("coefficients must be rational".into())),
    };
    let p = jet_to_poly_q(&jet);
    Ok(PlaneCurveGerm::new(p, label))
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, ExportError> {
    let path = dir.join(name);
    fs::create_dir_all(dir).map_err(|source| ExportError::Io { path: dir.to_path_buf(), source })?;
    fs::write(&path, contents).map_err(|source| ExportError::Io { path: path.clone(), source })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_drops_noise_and_negative_zero() {
        assert_eq!(round6(0.1234564), "0.123456");
        assert_eq!(round6(-0.0000004), "0");
        assert_eq!(round6(2.0), "2");
        assert_eq!(round6(1e-7), "0");
    }

    #[test]
    fn metadata_is_embedded_and_escaped() {
        let meta = Metadata::new().with("note", "a<b");
        let d = ContourDiagram {
            window: Window::square(1.0, 64),
            singular_polylines: vec![],
            contour_polylines: vec![],
            cusps: vec![],
            double_points: vec![],
            counts: Default::default(),
            collisions: vec![],
            max_rel_lambda: 0.0,
        };
        let svg = diagram_svg(&d, &meta);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains(r#""tool":"planegerm""#));
        let csv = diagram_csv(&d, &meta);
        assert!(csv.starts_with("# {"));
    }
}
