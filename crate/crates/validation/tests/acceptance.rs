//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion compares library output against values computed here from the
//! explicit formulas of the unfolding `G = (x² + y³ + ax + by + cy², xy)`, from hand
//! series, or from closed-form wall positions.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planegerm::contour::{apparent_contour, stratum_distance, wall_crossing, PlaneMap, Window};
use planegerm::geometry::{
    characteristic_curves, contact_order, curve_branches, curve_census, perestroika_sweep, BranchPairing, CausticFrame,
    ContactOrder, CrosscapFamily, GraphAxis, DEFAULT_SWEEP_STEP, SERIES_ORDER,
};
use planegerm::parse::{parse_germ, parse_jet};
use planegerm::recognition::{classify_corank1, MapGerm, SingularityClass};
use planegerm::scalar::{q, qi};
use planegerm::strata::systems::{jet_to_poly_q, VC, VX, VY};
use planegerm::strata::{
    gulls_elimination, implicit_residual_exact, locate_and_classify, odd_sharksfin_origin_class, parametrize_exact,
    parametrize_stratum, series_fit_swallowtail, CuspFoldForm, ExactPoint, Outcome, SeriesResult, Sign, StratumId,
    StratumKind, UnfoldingId,
};
use planegerm::{Jet, MPoly, Q};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn rng(id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + id)
}

fn rand_q(r: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Q {
    q(r.gen_range(lo..=hi), r.gen_range(1..=den))
}

fn rand_sign(r: &mut ChaCha8Rng) -> Sign {
    if r.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn i23(kind: StratumKind, sign: Sign, internal: &[Q], form: CuspFoldForm) -> ExactPoint {
    parametrize_exact(UnfoldingId::I23, StratumId::new(kind, sign), internal, form).expect("inside the domain")
}

fn a_squared(p: &ExactPoint) -> Q {
    &p.a.coef * &p.a.coef * &p.a.rad
}

/// Beaks/lips: the source point is `x = -a/4`, where `λ = λ_x = λ_y = 0` reduces to
/// `a² = 8(6y³ + 2cy²)` and `b = -9y² - 4cy`.
fn beaks_lips_oracle(p: &ExactPoint, y: &Q, c: &Q) -> bool {
    let a2 = a_squared(p);
    let lambda = -(&a2 / qi(8)) - qi(3) * y * y * y - qi(2) * c * y * y - &p.b * y;
    let ly = qi(9) * y * y + qi(4) * c * y + &p.b;
    lambda == qi(0) && ly == qi(0)
}

/// Swallowtail: `λ = ηλ = η²λ = 0` for `η = -x∂x + y∂y` gives `x² = y²(c + 4y)`,
/// `b = -2y(2c + 5y)` and `a x = K - 2x²` with `K = 3y³ + 2cy² + by`.
fn swallowtail_oracle(p: &ExactPoint, y: &Q, c: &Q) -> bool {
    let x2 = y * y * (c + qi(4) * y);
    let k = qi(3) * y * y * y + qi(2) * c * y * y + &p.b * y;
    let t = &k - qi(2) * &x2;
    p.b == -(qi(2) * y * (qi(2) * c + qi(5) * y)) && a_squared(p) * &x2 == &t * &t
}

fn criterion_1() -> Verdict {
    use StratumKind::*;
    let mut r = rng(1);
    let mut notes = Vec::new();
    let mut ok = true;
    for kind in [BeaksLips, Swallowtail, CuspFold] {
        let (mut n, mut bad, mut oracle_bad) = (0, 0, 0);
        while n < 1000 {
            let (y, c) = (rand_q(&mut r, -60, 60, 40), rand_q(&mut r, -60, 60, 40));
            let in_domain = match kind {
                BeaksLips => c.clone() + qi(3) * &y >= qi(0),
                Swallowtail => c.clone() + qi(4) * &y > qi(0),
                _ => y < qi(0),
            };
            if !in_domain {
                continue;
            }
            n += 1;
            let p = i23(kind, rand_sign(&mut r), &[y.clone(), c.clone()], CuspFoldForm::Corrected);
            if implicit_residual_exact(kind, &p).map_or(true, |v| v != qi(0)) {
                bad += 1;
            }
            let oracle = match kind {
                BeaksLips => beaks_lips_oracle(&p, &y, &c),
                Swallowtail => swallowtail_oracle(&p, &y, &c),
                _ => true,
            };
            if !oracle {
                oracle_bad += 1;
            }
        }
        ok &= bad == 0 && oracle_bad == 0;
        notes.push(format!("{kind}: {bad}/1000 nonzero residuals, {oracle_bad} oracle mismatches"));
    }
    let printed = i23(CuspFold, Sign::Plus, &[qi(-1), qi(0)], CuspFoldForm::Verbatim);
    let printed_res = implicit_residual_exact(CuspFold, &printed).expect("residual");
    ok &= printed_res != qi(0);
    notes.push(format!("printed cusp+fold residual at (c, y) = (0, -1): {printed_res}"));
    verdict(ok, notes.join("; "))
}

fn criterion_2() -> Verdict {
    use StratumKind::*;
    let mut r = rng(2);
    let mut bad = 0;
    for _ in 0..100 {
        let c = q(r.gen_range(1..=500), r.gen_range(1..=97));
        for (edge, wall, y) in [(Goose, BeaksLips, -q(2, 9) * &c), (Butterfly, Swallowtail, -q(1, 5) * &c)] {
            let mut edges: Vec<ExactPoint> = [Sign::Plus, Sign::Minus]
                .iter()
                .map(|s| i23(edge, *s, std::slice::from_ref(&c), CuspFoldForm::Corrected))
                .collect();
            for s in [Sign::Plus, Sign::Minus] {
                let w = i23(wall, s, &[y.clone(), c.clone()], CuspFoldForm::Corrected);
                match edges.iter().position(|e| *e == w) {
                    Some(k) => {
                        edges.remove(k);
                    }
                    None => bad += 1,
                }
            }
        }
    }
    verdict(bad == 0, format!("100 rational c > 0, {bad} mismatches"))
}

fn normal_forms() -> Vec<(&'static str, SingularityClass)> {
    use SingularityClass::*;
    vec![
        ("(x, y^2)", Fold),
        ("(x, x*y + y^3)", Cusp),
        ("(x, x*y + y^4)", Swallowtail),
        ("(x, y^3 + x^2*y)", Lips),
        ("(x, y^3 - x^2*y)", Beaks),
        ("(x, x*y + y^5 + y^7)", Butterfly),
        ("(x, x*y^2 + y^4 + y^5)", Gulls),
        ("(x, y^3 + x^3*y)", Goose),
    ]
}

fn random_diffeo(r: &mut ChaCha8Rng) -> (Jet<Q>, Jet<Q>) {
    let n = planegerm::DEFAULT_ORDER;
    loop {
        let l: Vec<i64> = (0..4).map(|_| r.gen_range(-3..=3)).collect();
        if l[0] * l[3] == l[1] * l[2] {
            continue;
        }
        let mut comp = |lin: (i64, i64)| {
            let mut terms = vec![(1, 0, qi(lin.0)), (0, 1, qi(lin.1))];
            for d in 2..=3 {
                for i in 0..=d {
                    terms.push((i, d - i, rand_q(r, -2, 2, 3)));
                }
            }
            Jet::from_terms(n, terms)
        };
        let u = comp((l[0], l[1]));
        let v = comp((l[2], l[3]));
        return (u, v);
    }
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let mut notes = Vec::new();
    let mut ok = true;
    for (src, class) in normal_forms() {
        let g: MapGerm<Q> = parse_germ(src, planegerm::DEFAULT_ORDER).expect("normal form parses");
        let base = classify_corank1(&g).expect("corank one");
        let (mut bad, mut skipped) = (0, 0);
        for _ in 0..100 {
            let (s1, s2) = random_diffeo(&mut r);
            let (t1, t2) = random_diffeo(&mut r);
            let h = g.conjugate((&s1, &s2), (&t1, &t2)).expect("origin preserving");
            match classify_corank1(&h) {
                Ok(c) if c.is_unresolved() => skipped += 1,
                Ok(c) if c == class => {}
                _ => bad += 1,
            }
        }
        ok &= base == class && bad == 0;
        notes.push(format!("{}: {bad} mismatches, {skipped} unresolved", class.name()));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_4() -> Verdict {
    match series_fit_swallowtail(UnfoldingId::Sharksfin, 0.0) {
        Ok(SeriesResult::Sharksfin(fit)) => {
            let c = &fit.coeffs;
            let r4 = (c[4] - 1.0 / 16.0).abs() / (1.0 / 16.0);
            let r9 = (c[9] - 3.0 / 32.0).abs() / (3.0 / 32.0);
            let mid = c[5..=8].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            verdict(
                r4 <= 1e-3 && r9 <= 0.05 && mid < 1e-4,
                format!("b^4 {:.10} (rel {r4:.1e}), b^9 {:.6} (rel {r9:.1e}), max |b^5..b^8| {mid:.1e}", c[4], c[9]),
            )
        }
        other => verdict(false, format!("{other:?}")),
    }
}

fn g_components(p: [f64; 3], x: f64, y: f64) -> (f64, f64, f64, f64) {
    let (a, b, c) = (p[0], p[1], p[2]);
    let f1 = x * x + y * y * y + a * x + b * y + c * y * y;
    let lambda = 2.0 * x * x + a * x - 3.0 * y * y * y - 2.0 * c * y * y - b * y;
    let eta_lambda = -4.0 * x * x - a * x - 9.0 * y * y * y - 4.0 * c * y * y - b * y;
    (f1, x * y, lambda, eta_lambda)
}

/// Lips when the Hessian of `λ` at `x = -a/4` is definite: `det = 4(-18y - 4c) > 0`.
fn beaks_lips_label(y: f64, c: f64) -> SingularityClass {
    if -18.0 * y - 4.0 * c > 0.0 {
        SingularityClass::Lips
    } else {
        SingularityClass::Beaks
    }
}

fn criterion_5() -> Verdict {
    use StratumKind::*;
    let mut r = rng(5);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for kind in [BeaksLips, Goose, Swallowtail, Butterfly, CuspFold, SharksfinAxis, DeltoidAxis] {
        let mut bad = 0;
        let mut first = None;
        for _ in 0..100 {
            let mag: f64 = r.gen_range(0.2..1.0);
            let c = if r.gen_bool(0.5) { mag } else { -mag };
            let (internal, specials) = match kind {
                BeaksLips => (vec![-c / 3.0, c], vec![0.0, -2.0 * c / 9.0]),
                Swallowtail => (vec![-c / 4.0, c], vec![0.0, -c / 5.0]),
                CuspFold => (vec![0.0, c], vec![-c / 3.0, -3.0 * c / 5.0]),
                Goose | Butterfly | SharksfinAxis => (vec![mag], vec![]),
                _ => (vec![-mag], vec![]),
            };
            let internal = if internal.len() == 2 {
                let y = loop {
                    let u = r.gen_range(0.03..1.0) * mag;
                    let y = if kind == CuspFold { -u } else { internal[0] + u };
                    if specials.iter().all(|s| (y - s).abs() > 0.02 * mag) {
                        break y;
                    }
                };
                vec![y, c]
            } else {
                internal
            };
            let sign = if kind.is_signed() { rand_sign(&mut r) } else { Sign::Plus };
            let expected = match kind {
                BeaksLips => Some(beaks_lips_label(internal[0], internal[1])),
                Goose => Some(SingularityClass::Goose),
                Swallowtail => Some(SingularityClass::Swallowtail),
                Butterfly => Some(SingularityClass::Butterfly),
                SharksfinAxis => Some(SingularityClass::Sharksfin),
                DeltoidAxis => Some(SingularityClass::DeltoidTwoJet),
                _ => None,
            };
            let located = parametrize_stratum(UnfoldingId::I23, StratumId::new(kind, sign), &internal)
                .and_then(|sp| locate_and_classify(UnfoldingId::I23, &sp.params, &sp));
            let good = match (&located, &expected) {
                (Ok(l), Some(e)) => matches!(&l.outcome, Outcome::Local { class } if class == e),
                (Ok(l), None) => match &l.outcome {
                    Outcome::MultiGerm { witness: w } => {
                        let (fp, gp, lp, ep) = g_components(w.params, w.p[0], w.p[1]);
                        let (fq, gq, lq, _) = g_components(w.params, w.q[0], w.q[1]);
                        let res = [gp - gq, fp - fq, lp, lq, ep].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                        worst = worst.max(res);
                        res <= 1e-10
                            && w.p_class == SingularityClass::Cusp
                            && w.q_class == SingularityClass::Fold
                            && (w.p[0] - w.q[0]).hypot(w.p[1] - w.q[1]) > 1e-8
                    }
                    Outcome::Local { .. } => false,
                },
                (Err(_), _) => false,
            };
            if !good {
                bad += 1;
                first.get_or_insert_with(|| format!("{internal:?} {located:?}"));
            }
        }
        ok &= bad == 0;
        notes.push(match first {
            None => format!("{kind}: 0/100"),
            Some(f) => format!("{kind}: {bad}/100, first {f}"),
        });
    }
    notes.push(format!("worst cusp+fold witness residual {worst:.1e}"));
    verdict(ok, notes.join("; "))
}

fn criterion_6() -> Verdict {
    let g = gulls_elimination();
    // After a = -4x and b = -4cy - 9y²: λ = -2x² + 6y³ + 2cy² and η²λ = 4x² - 18y³ - 4cy².
    // Then λ = 0 gives η²λ = -6y³, so y = 0, x = 0 and a = b = 0.
    let (x, y, c) = (MPoly::var(VX), MPoly::var(VY), MPoly::var(VC));
    let lambda = &(&x.pow(2).scale(&qi(-2)) + &y.pow(3).scale(&qi(6))) + &(&c * &y.pow(2)).scale(&qi(2));
    let eta2 = &(&x.pow(2).scale(&qi(4)) - &y.pow(3).scale(&qi(18))) - &(&c * &y.pow(2)).scale(&qi(4));
    let hand = g.lambda == lambda && g.eta2_lambda == eta2;
    let mut r = rng(6);
    let mut bad = 0;
    for _ in 0..20 {
        let b = loop {
            let v = rand_q(&mut r, -9, 9, 7);
            if v != qi(0) {
                break v;
            }
        };
        let on = odd_sharksfin_origin_class(&[qi(0), b.clone(), qi(0)]);
        let off = odd_sharksfin_origin_class(&[qi(0), b, q(1, 7)]);
        if on != SingularityClass::Gulls || off == SingularityClass::Gulls {
            bad += 1;
        }
    }
    verdict(
        g.forces_origin && hand && bad == 0,
        format!(
            "elimination forces origin: {}, reduced system matches hand reduction: {hand}, odd sharksfin b-axis: {bad}/20 mismatches",
            g.forces_origin
        ),
    )
}

fn criterion_7() -> Verdict {
    use StratumKind::*;
    let mut r = rng(7);
    let mut notes = Vec::new();
    let (mut n, mut bad) = (0, 0);
    while n < 20 {
        let rad = r.gen_range(0.004..0.01);
        let th: f64 = r.gen_range(0.0..std::f64::consts::TAU);
        let p = [rad * th.cos(), rad * th.sin(), r.gen_range(-0.35..-0.25)];
        if !matches!(stratum_distance(UnfoldingId::I23, &p), Ok(Some((d, _))) if d > 1e-3) {
            continue;
        }
        n += 1;
        let f = PlaneMap::from_unfolding(UnfoldingId::I23, &p);
        for res in [256, 512] {
            if !matches!(apparent_contour(&f, &Window::square(0.15, res)), Ok(d) if d.counts.cusps == 3) {
                bad += 1;
            }
        }
    }
    let mut ok = bad == 0;
    notes.push(format!("deltoid: 20 perturbations at 256 and 512, {bad} failures"));
    for (kind, count) in [(BeaksLips, 4), (Swallowtail, 3), (CuspFold, 3)] {
        let mut seen = Vec::new();
        let mut kind_ok = true;
        for _ in 0..count {
            let c: f64 = r.gen_range(-0.35..-0.15);
            let u = r.gen_range(0.05..0.4) * c.abs();
            let y = match kind {
                BeaksLips => -c / 3.0 + u,
                Swallowtail => -c / 4.0 + u,
                _ => -u,
            };
            let id = StratumId::new(kind, rand_sign(&mut r));
            match (wall_crossing(UnfoldingId::I23, id, &[y, c], 256), wall_crossing(UnfoldingId::I23, id, &[y, c], 512))
            {
                (Ok(lo), Ok(hi)) => {
                    let (dc, dd) = (hi.delta_cusps(), hi.delta_double_points());
                    let expected = match kind {
                        BeaksLips => dc.abs() == 2,
                        Swallowtail => dc.abs() == 2 && 2 * dd == dc,
                        _ => dd.abs() == 1,
                    };
                    let stable = (lo.before, lo.after) == (hi.before, hi.after);
                    kind_ok &= expected && stable;
                    seen.push(format!("Δcusps {dc} Δdouble {dd}{}", if stable { "" } else { " unstable" }));
                }
                (a, b) => {
                    kind_ok = false;
                    seen.push(format!("{:?}", a.err().or(b.err())));
                }
            }
        }
        ok &= kind_ok;
        notes.push(format!("{kind} [{}]: {}", if kind_ok { "ok" } else { "mismatch" }, seen.join(", ")));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_8() -> Verdict {
    let cf = CrosscapFamily::typical();
    let poly = |s: &str| jet_to_poly_q(&parse_jet(s, 8).expect("parses"));
    let mut notes = Vec::new();
    let (par0, fl0) = characteristic_curves(&cf, &qi(0)).expect("curves at t = 0");
    let p0 = par0.poly == poly("x^2 - 3*y^3");
    let f0 = fl0.poly == &poly("y") * &poly("4*x^2 - 49/4*y^3");
    notes.push(format!("t = 0: parabolic {p0}, flecnodal {f0}"));

    // x = ±(√t·y + 3/(2√t)·y² + k·y³ + …) with k = -9/(8t√t) (parabolic) and -1/(t√t) (flecnodal).
    let t = 0.1f64;
    let st = t.sqrt();
    let par_series = [0.0, st, 1.5 / st, -9.0 / (8.0 * t * st)];
    let fl_series = [0.0, st, 1.5 / st, -1.0 / (t * st)];
    let first_difference = (0..4).find(|&k| (par_series[k] - fl_series[k]).abs() > 1e-9).unwrap_or(4) as u32;
    let (par, fl) = characteristic_curves(&cf, &q(1, 10)).expect("curves at t = 0.1");
    let series_match = |h: &MPoly, oracle: &[f64; 4]| match curve_branches(h, SERIES_ORDER) {
        Ok(bs) => {
            bs.len() == 2
                && bs.iter().all(|b| {
                    let s = if b.coeffs[1] > 0.0 { 1.0 } else { -1.0 };
                    b.axis == GraphAxis::OverY
                        && (0..4).all(|k| (b.coeffs[k] - s * oracle[k]).abs() <= 1e-8 * (1.0 + oracle[k].abs()))
                })
        }
        Err(_) => false,
    };
    let branches_ok = series_match(&par.poly, &par_series) && series_match(&fl.poly, &fl_series);
    let orders: Vec<ContactOrder> =
        contact_order(&par, &fl, BranchPairing::NearestTangent, SERIES_ORDER).into_iter().map(|c| c.order).collect();
    let contacts = orders.len() == 2
        && orders.iter().all(|o| *o == ContactOrder::Exact(first_difference))
        && first_difference == 3;
    notes.push(format!("t = 0.1: branches match series {branches_ok}, contact orders {orders:?}"));

    let (parn, _) = characteristic_curves(&cf, &q(-1, 10)).expect("curves at t = -0.1");
    let census = curve_census(&parn.poly, &Window::square(0.6, 512));
    let split = match &census {
        Ok(c) => {
            c.branches.len() == 1
                && c.branch_min_gradient.iter().all(|g| *g > 1e-4)
                && c.isolated_points.len() == 1
                && c.isolated_points[0][0].hypot(c.isolated_points[0][1]) < 1e-9
        }
        Err(_) => false,
    };
    notes.push(format!("t = -0.1: smooth branch plus isolated point {split}"));
    verdict(p0 && f0 && branches_ok && contacts && split, notes.join("; "))
}

/// Walls of the trivial caustic family in the `(t₁, t₂) = (b, c)` plane for `c > 0`:
/// the sharksfin axis `b = 0`, beaks/lips at `y = -c/3` (`b = c²/3`) and cusp+fold at
/// `y = -3c/5` (`b = -c²/5`).
fn oracle_walls(c: f64) -> [f64; 3] {
    [0.0, c * c / 3.0, -c * c / 5.0]
}

fn oracle_crossings(p0: [f64; 2], p1: [f64; 2]) -> Vec<f64> {
    let len = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
    let at = |u: f64| [p0[0] + u * (p1[0] - p0[0]), p0[1] + u * (p1[1] - p0[1])];
    let mut out = Vec::new();
    for k in 0..3 {
        let g = |u: f64| {
            let p = at(u);
            p[0] - oracle_walls(p[1])[k]
        };
        let n = 4000;
        for i in 0..n {
            let (mut lo, mut hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            if g(lo).signum() == g(hi).signum() {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == g(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi) * len);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn criterion_9() -> Verdict {
    let mut r = rng(9);
    let frame = CausticFrame::preset("trivial").expect("trivial frame");
    let w = Window::square(0.6, 512);
    let (mut ok, mut worst, mut notes) = (true, 0.0f64, Vec::new());
    for _ in 0..5 {
        let mut pt = || [r.gen_range(-0.03..0.04), r.gen_range(0.2..0.3)];
        let path = [pt(), pt()];
        let truth = oracle_crossings(path[0], path[1]);
        let sweeps = (
            perestroika_sweep(&frame, &path, DEFAULT_SWEEP_STEP, &w),
            perestroika_sweep(&frame, &path, DEFAULT_SWEEP_STEP, &w.with_resolution(1024)),
        );
        let (lo, hi) = match sweeps {
            (Ok(lo), Ok(hi)) => (lo, hi),
            (a, b) => {
                ok = false;
                notes.push(format!("{:?}", a.err().or(b.err())));
                continue;
            }
        };
        let limit = 2.0 * lo.spacing;
        for s in [&lo, &hi] {
            for det in &s.crossings {
                let d = truth.iter().map(|t| (t - det.s).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d / lo.spacing);
                ok &= d <= limit;
            }
            for t in &truth {
                ok &= s.crossings.iter().any(|det| (det.s - t).abs() <= limit);
            }
        }
        let settled = |s: &planegerm::geometry::Sweep| -> Vec<_> {
            s.frames.iter().filter(|f| truth.iter().all(|t| (t - f.s).abs() > limit)).map(|f| f.counts).collect()
        };
        let stable = settled(&lo) == settled(&hi);
        ok &= stable;
        notes.push(format!("{} walls, {} detections, stable {stable}", truth.len(), lo.crossings.len()));
    }
    verdict(ok, format!("worst offset {worst:.2} cells; {}", notes.join("; ")))
}

/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Verdict, Option<f64>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("stratum identities", criterion_1, Some(5.0)),
        ("edge coincidences", criterion_2, None),
        ("corank-one classification", criterion_3, Some(30.0)),
        ("sharksfin series", criterion_4, Some(10.0)),
        ("recognition on strata", criterion_5, None),
        ("gulls exclusion", criterion_6, None),
        ("contour regimes", criterion_7, Some(120.0)),
        ("crosscap curves", criterion_8, None),
        ("caustic sections", criterion_9, None),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        let in_time = budget.is_none_or(|b| secs < b);
        let passed = v.passed && in_time;
        if !passed {
            failed += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(", budget {b:.0} s"));
        println!(
            "{} criterion {}: {name} ({secs:.1} s{budget}) {}",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
