use super::{parametrize_stratum, Sign, StrataError, StratumId, StratumKind, UnfoldingId};
use serde::Serialize;

/// Rectangle `[a0, a1] × [b0, b1]` in the `(a, b)`-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectionWindow {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl SectionWindow {
    pub fn square(r: f64) -> Self {
        Self { a: (-r, r), b: (-r, r) }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.a.0 && p[0] <= self.a.1 && p[1] >= self.b.0 && p[1] <= self.b.1
    }

    fn radius(&self) -> f64 {
        [self.a.0, self.a.1, self.b.0, self.b.1].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn is_empty(&self) -> bool {
        !(self.a.0 < self.a.1 && self.b.0 < self.b.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveShape {
    Polyline,
    Point,
}

/// One connected piece of a stratum inside the window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledCurve {
    pub stratum: StratumId,
    pub shape: CurveShape,
    /// Sweep coordinate of each point (`y`, or the line/series parameter).
    pub internal: Vec<f64>,
    /// `(a, b)` of each point.
    pub points: Vec<[f64; 2]>,
}

/// Samples count of the coarse pass that locates the in-window sweep intervals.
const COARSE: usize = 4096;

/// Sweeps `param(t)` for `t` in `range`, keeping the parts inside the window.
fn sweep(
    id: StratumId,
    range: (f64, f64),
    window: &SectionWindow,
    resolution: usize,
    param: &dyn Fn(f64) -> Option<[f64; 2]>,
) -> Vec<LabeledCurve> {
    let (lo, hi) = range;
    let at = |i: usize, n: usize| lo + (hi - lo) * i as f64 / n as f64;
    // Intervals [t_i, t_j] of the coarse grid whose points fall inside the window.
    let mut intervals = Vec::new();
    let mut open: Option<usize> = None;
    for i in 0..=COARSE {
        let inside = param(at(i, COARSE)).is_some_and(|p| window.contains(p));
        match (inside, open) {
            (true, None) => open = Some(i.saturating_sub(1)),
            (false, Some(s)) => {
                intervals.push((s, i));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        intervals.push((s, COARSE));
    }
    let mut out = Vec::new();
    for (s, e) in intervals {
        let (t0, t1) = (at(s, COARSE), at(e, COARSE));
        let mut cur = LabeledCurve { stratum: id, shape: CurveShape::Polyline, internal: vec![], points: vec![] };
        for k in 0..resolution {
            let t = t0 + (t1 - t0) * k as f64 / (resolution - 1) as f64;
            match param(t) {
                Some(p) if window.contains(p) => {
                    cur.internal.push(t);
                    cur.points.push(p);
                }
                _ => {
                    if cur.points.len() >= 2 {
                        out.push(cur.clone());
                    }
                    cur.internal.clear();
                    cur.points.clear();
                }
            }
        }
        if cur.points.len() >= 2 {
            out.push(cur);
        }
    }
    out
}

fn point(id: StratumId, t: f64, p: [f64; 2], window: &SectionWindow) -> Option<LabeledCurve> {
    window.contains(p).then(|| LabeledCurve {
        stratum: id,
        shape: CurveShape::Point,
        internal: vec![t],
        points: vec![p],
    })
}

/// Intersection of the bifurcation diagram with the slice `{c = const}` inside `window`.
///
/// Curves come from sweeping the parametrizations (with `resolution` samples per
/// connected piece); codimension-two strata appear as isolated points. The sharksfin
/// has no `c` and ignores it. The odd-shaped sharksfin swallowtail has no closed form
/// and is not included.
pub fn section_curves(
    u: UnfoldingId,
    c: f64,
    window: &SectionWindow,
    resolution: usize,
) -> Result<Vec<LabeledCurve>, StrataError> {
    use StratumKind::*;
    if window.is_empty() {
        return Err(StrataError::EmptyWindow);
    }
    if resolution < 16 {
        return Err(StrataError::Resolution(resolution));
    }
    let r = window.radius();
    // Every parametrization grows at least like |t|^(3/2) beyond this range.
    let span = 2.0 * (r.sqrt() + c.abs()) + r + 1.0;
    let mut out = Vec::new();
    let ab = |id: StratumId, internal: &[f64]| -> Option<[f64; 2]> {
        parametrize_stratum(u, id, internal).ok().map(|sp| [sp.params[0], sp.params[1]])
    };
    for sign in [Sign::Plus, Sign::Minus] {
        match u {
            UnfoldingId::I23 => {
                let bl = StratumId::new(BeaksLips, sign);
                out.extend(sweep(bl, (-c / 3.0, span), window, resolution, &|y| ab(bl, &[y, c])));
                let sw = StratumId::new(Swallowtail, sign);
                let eps = 1e-12 * (1.0 + c.abs());
                out.extend(sweep(sw, (-c / 4.0 + eps, span), window, resolution, &|y| ab(sw, &[y, c])));
                let cf = StratumId::new(CuspFold, sign);
                out.extend(sweep(cf, (-span, -eps), window, resolution, &|y| ab(cf, &[y, c])));
                if c > 0.0 {
                    let g = StratumId::new(Goose, sign);
                    out.extend(ab(g, &[c]).and_then(|p| point(g, -2.0 * c / 9.0, p, window)));
                    let bf = StratumId::new(Butterfly, sign);
                    out.extend(ab(bf, &[c]).and_then(|p| point(bf, -c / 5.0, p, window)));
                }
            }
            UnfoldingId::Sharksfin => {
                let line = StratumId::new(BeaksLines, sign);
                let sw = StratumId::new(Swallowtail, sign);
                let range = match sign {
                    Sign::Plus => window.b,
                    Sign::Minus => window.a,
                };
                out.extend(sweep(line, range, window, resolution, &|t| ab(line, &[t])));
                out.extend(sweep(sw, range, window, resolution, &|t| ab(sw, &[t])));
            }
            UnfoldingId::OddSharksfin => {
                let line = StratumId::new(BeaksLines, sign);
                let range = match sign {
                    Sign::Plus => window.b,
                    Sign::Minus => window.a,
                };
                out.extend(sweep(line, range, window, resolution, &|t| ab(line, &[t, c])));
            }
        }
    }
    match u {
        UnfoldingId::I23 if c > 0.0 => {
            out.extend(point(StratumId::plus(SharksfinAxis), c, [0.0, 0.0], window));
        }
        UnfoldingId::I23 if c < 0.0 => {
            out.extend(point(StratumId::plus(DeltoidAxis), c, [0.0, 0.0], window));
        }
        UnfoldingId::OddSharksfin if c < 0.0 => {
            let t = StratumId::plus(Tacnode);
            out.extend(sweep(t, window.b, window, resolution, &|b| ab(t, &[b, c])));
        }
        UnfoldingId::OddSharksfin if c == 0.0 => {
            let g = StratumId::plus(Gulls);
            out.extend(sweep(g, window.b, window, resolution, &|b| ab(g, &[b])));
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(curves: &[LabeledCurve], kind: StratumKind, shape: CurveShape) -> usize {
        curves.iter().filter(|c| c.stratum.kind == kind && c.shape == shape).count()
    }

    #[test]
    fn negative_slice_has_no_codimension_two_points() {
        let cs = section_curves(UnfoldingId::I23, -1.0, &SectionWindow::square(2.0), 64).unwrap();
        assert!(count(&cs, StratumKind::BeaksLips, CurveShape::Polyline) >= 1);
        assert!(count(&cs, StratumKind::Swallowtail, CurveShape::Polyline) >= 1);
        assert_eq!(count(&cs, StratumKind::DeltoidAxis, CurveShape::Point), 1);
        assert_eq!(count(&cs, StratumKind::Goose, CurveShape::Point), 0);
        assert_eq!(count(&cs, StratumKind::Butterfly, CurveShape::Point), 0);
    }

    #[test]
    fn positive_slice_has_goose_and_butterfly_points() {
        let cs = section_curves(UnfoldingId::I23, 1.0, &SectionWindow::square(2.0), 64).unwrap();
        assert_eq!(count(&cs, StratumKind::Goose, CurveShape::Point), 2);
        assert_eq!(count(&cs, StratumKind::Butterfly, CurveShape::Point), 2);
        let labels: std::collections::HashSet<_> =
            cs.iter().filter(|c| c.shape == CurveShape::Polyline).map(|c| c.stratum).collect();
        assert_eq!(labels.len(), 6);
    }

    #[test]
    fn sharksfin_plane() {
        let cs = section_curves(UnfoldingId::Sharksfin, 0.0, &SectionWindow::square(0.5), 32).unwrap();
        assert_eq!(count(&cs, StratumKind::BeaksLines, CurveShape::Polyline), 2);
        assert_eq!(count(&cs, StratumKind::Swallowtail, CurveShape::Polyline), 2);
        for c in &cs {
            for p in &c.points {
                assert!(SectionWindow::square(0.5).contains(*p));
            }
        }
    }

    #[test]
    fn bad_inputs() {
        let empty = SectionWindow { a: (1.0, 0.0), b: (0.0, 1.0) };
        assert_eq!(section_curves(UnfoldingId::I23, 1.0, &empty, 32), Err(StrataError::EmptyWindow));
        assert_eq!(
            section_curves(UnfoldingId::I23, 1.0, &SectionWindow::square(1.0), 8),
            Err(StrataError::Resolution(8))
        );
    }
}
