//! Bifurcation-diagram scans, transitions along one-parameter families and
//! flap/swallowtail markers.

use crate::energies::{jet2_reduced, ParamT};
use crate::geometry::InvariantPoint;
use crate::singular::{
    classified_invariant_points, classify_rank_zero, cusp_refine, degenerate_rank_one_locus, find_rank_one, Branch,
    Location, SingularPointRecord, WilliamsonType,
};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Default number of `j` steps in a diagram scan.
pub const DEFAULT_J_STEPS: usize = 600;
/// Local refinement factor where the rank-one count changes.
pub const REFINE: usize = 4;
/// Bisection tolerance for transition parameters.
pub const TAU_TOL: f64 = 1e-10;
/// Window in `j` within which a hyperbolic segment counts as attached to a rank-zero value.
pub const FLAP_WINDOW: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramKind {
    EllipticRegularValue,
    HyperbolicRegularValue,
    RankZeroValue(WilliamsonType),
    ParabolicCandidate,
}

impl DiagramKind {
    pub fn label(&self) -> String {
        match self {
            DiagramKind::EllipticRegularValue => "elliptic-regular".into(),
            DiagramKind::HyperbolicRegularValue => "hyperbolic-regular".into(),
            DiagramKind::RankZeroValue(w) => format!("rank-zero-{}", w.label()),
            DiagramKind::ParabolicCandidate => "parabolic-candidate".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagramPoint {
    pub j: f64,
    pub h: f64,
    pub kind: DiagramKind,
    pub source: SingularPointRecord,
}

impl DiagramPoint {
    /// Short description of the originating point: `u=..;theta2=..` or the invariant point's name.
    pub fn source_label(&self) -> String {
        match self.source.location {
            Location::Invariant(ip) => ip.name().to_string(),
            Location::Reduced { u, .. } => {
                let b = self.source.branch.map(|b| b.label()).unwrap_or("theta2=0");
                format!("u={u};{b}")
            }
        }
    }
}

/// One linear-in-`tau` component of a family template.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub c0: f64,
    pub c1: f64,
}

impl Affine {
    pub fn at(&self, tau: f64) -> f64 {
        self.c0 + self.c1 * tau
    }

    /// Parses sums of terms such as `tau/2`, `-3*tau`, `0.5`, `1/3*tau + 0.1`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse family component '{s}'"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms: Vec<(f64, &str)> = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        let mut sign = 1.0;
        for i in 0..=bytes.len() {
            let at_split = i == bytes.len()
                || ((bytes[i] == b'+' || bytes[i] == b'-') && i > 0 && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/'));
            if at_split {
                let term = &compact[start..i];
                let (sg, body) = match term.strip_prefix('-') {
                    Some(b) => (-1.0, b),
                    None => (1.0, term.strip_prefix('+').unwrap_or(term)),
                };
                if body.is_empty() {
                    return Err(bad());
                }
                terms.push((sign * sg, body));
                if i < bytes.len() {
                    sign = 1.0;
                    start = i;
                }
            }
        }
        let mut out = Affine { c0: 0.0, c1: 0.0 };
        for (sg, body) in terms {
            let mut coef = sg;
            let mut has_tau = false;
            let mut op = '*';
            let mut tok = String::new();
            let apply = |tok: &str, op: char, coef: &mut f64, has_tau: &mut bool| -> Result<()> {
                if tok == "tau" || tok == "t" {
                    if op == '/' || *has_tau {
                        return Err(bad());
                    }
                    *has_tau = true;
                    return Ok(());
                }
                let v: f64 = tok.parse().map_err(|_| bad())?;
                if op == '*' {
                    *coef *= v;
                } else {
                    *coef /= v;
                }
                Ok(())
            };
            for ch in body.chars() {
                if ch == '*' || ch == '/' {
                    apply(&tok, op, &mut coef, &mut has_tau)?;
                    tok.clear();
                    op = ch;
                } else {
                    tok.push(ch);
                }
            }
            apply(&tok, op, &mut coef, &mut has_tau)?;
            if has_tau {
                out.c1 += coef;
            } else {
                out.c0 += coef;
            }
        }
        Ok(out)
    }
}

/// `tau -> t(tau)` with an affine template and a `tau` range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyPath {
    pub template: String,
    pub components: [Affine; 4],
    pub tau_min: f64,
    pub tau_max: f64,
}

impl FamilyPath {
    pub fn parse(template: &str, tau_min: f64, tau_max: f64) -> Result<Self> {
        let parts: Vec<&str> = template.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidInput(format!("family '{template}' needs four components")));
        }
        if !(tau_min.is_finite() && tau_max.is_finite() && tau_min < tau_max) {
            return Err(Error::InvalidInput(format!("tau range [{tau_min}, {tau_max}] is empty")));
        }
        let mut components = [Affine { c0: 0.0, c1: 0.0 }; 4];
        for (c, p) in components.iter_mut().zip(parts) {
            *c = Affine::parse(p)?;
        }
        Ok(FamilyPath { template: template.to_string(), components, tau_min, tau_max })
    }

    pub fn at(&self, tau: f64) -> ParamT {
        let c = &self.components;
        ParamT::new(c[0].at(tau), c[1].at(tau), c[2].at(tau), c[3].at(tau))
    }

    pub fn is_constant(&self) -> bool {
        self.components.iter().all(|c| c.c1 == 0.0)
    }
}

fn kind_of(r: &SingularPointRecord) -> DiagramKind {
    match (r.rank, r.wtype) {
        (0, w) => DiagramKind::RankZeroValue(w),
        (_, WilliamsonType::HyperbolicRegular) => DiagramKind::HyperbolicRegularValue,
        (_, WilliamsonType::EllipticRegular) => DiagramKind::EllipticRegularValue,
        _ => DiagramKind::ParabolicCandidate,
    }
}

fn rank_one_at(t: &ParamT, j: f64) -> Result<Vec<SingularPointRecord>> {
    match find_rank_one(t, j) {
        Err(Error::NoConvergence(_)) => Ok(Vec::new()),
        r => r,
    }
}

fn signature(rs: &[SingularPointRecord]) -> (usize, usize) {
    let hyp = rs.iter().filter(|r| r.wtype == WilliamsonType::HyperbolicRegular).count();
    (rs.len(), hyp)
}

/// Parabolic candidate between two `j` samples whose rank-one counts differ.
fn cusp_between(t: &ParamT, ja: f64, ra: &[SingularPointRecord], jb: f64, rb: &[SingularPointRecord]) -> Option<(f64, f64)> {
    let (jm, rm) = if ra.len() >= rb.len() { (ja, ra) } else { (jb, rb) };
    // The pair about to merge: closest neighbours on one branch.
    let mut best: Option<(f64, f64)> = None;
    for w in rm.windows(2) {
        let (ua, ub) = (w[0].u()?, w[1].u()?);
        if ua.signum() != ub.signum() || w[0].wtype == w[1].wtype {
            continue;
        }
        let d = (ub - ua).abs();
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, 0.5 * (ua + ub)));
        }
    }
    let (_, u0) = best?;
    let (js, us) = cusp_refine(t, jm, u0).ok()?;
    let pad = (jb - ja).abs();
    if js < ja.min(jb) - pad || js > ja.max(jb) + pad || !(js > 0.0 && js < 3.0) {
        return None;
    }
    let confirmed = degenerate_rank_one_locus(t, js).ok()?.into_iter().any(|u| (u - us).abs() < 1e-5);
    confirmed.then_some((js, us))
}

/// Singular values of `(J, H_t)` for `j` on a grid over `[j_min, j_max]`.
pub fn scan_diagram(t: &ParamT, j_min: f64, j_max: f64, steps: usize) -> Result<Vec<DiagramPoint>> {
    if t.t1 == 0.0 {
        return Err(Error::DegenerateFamily("t1 = 0: rank-one criterion degenerate".into()));
    }
    if !(0.0 <= j_min && j_min < j_max && j_max <= 3.0) || steps == 0 {
        return Err(Error::InvalidInput(format!("need 0 <= j_min < j_max <= 3 and steps > 0, got [{j_min}, {j_max}] / {steps}")));
    }
    let grid: Vec<f64> = (0..=steps)
        .map(|k| j_min + (j_max - j_min) * k as f64 / steps as f64)
        .filter(|&j| j > 0.0 && j < 3.0)
        .collect();
    let coarse: Vec<(f64, Vec<SingularPointRecord>)> = grid
        .par_iter()
        .map(|&j| rank_one_at(t, j).map(|r| (j, r)))
        .collect::<Result<_>>()?;

    // Refine where the number or type of rank-one points changes.
    let extra: Vec<f64> = coarse
        .windows(2)
        .filter(|w| signature(&w[0].1) != signature(&w[1].1))
        .flat_map(|w| (1..REFINE).map(move |k| w[0].0 + (w[1].0 - w[0].0) * k as f64 / REFINE as f64))
        .collect();
    let fine: Vec<(f64, Vec<SingularPointRecord>)> = extra
        .par_iter()
        .map(|&j| rank_one_at(t, j).map(|r| (j, r)))
        .collect::<Result<_>>()?;
    let mut all = coarse;
    all.extend(fine);
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut points: Vec<DiagramPoint> = Vec::new();
    for (j, recs) in &all {
        for r in recs {
            points.push(DiagramPoint { j: *j, h: r.h, kind: kind_of(r), source: r.clone() });
        }
    }
    let cusps: Vec<(f64, f64)> = all
        .par_windows(2)
        .filter(|w| w[0].1.len() != w[1].1.len())
        .filter_map(|w| cusp_between(t, w[0].0, &w[0].1, w[1].0, &w[1].1))
        .collect();
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for (js, us) in cusps {
        if seen.iter().any(|&(a, b)| (a - js).abs() < 1e-7 && (b - us).abs() < 1e-6) {
            continue;
        }
        seen.push((js, us));
        let h = jet2_reduced(t, js, us, 0.0)?.v;
        let source = SingularPointRecord {
            location: Location::Reduced { u: us, v: 0.0 },
            rank: 1,
            wtype: WilliamsonType::Degenerate,
            branch: Some(if us >= 0.0 { Branch::Zero } else { Branch::Pi }),
            j: js,
            h,
            degeneracy_margin: 0.0,
        };
        points.push(DiagramPoint { j: js, h, kind: DiagramKind::ParabolicCandidate, source });
    }
    for r in classified_invariant_points(t)? {
        if r.j >= j_min && r.j <= j_max {
            points.push(DiagramPoint { j: r.j, h: r.h, kind: kind_of(&r), source: r });
        }
    }
    points.sort_by(|a, b| a.j.total_cmp(&b.j).then(a.h.total_cmp(&b.h)));
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransitionObservable {
    /// Williamson type of an invariant rank-zero point.
    RankZeroType(InvariantPoint),
    /// Whether hyperbolic-regular points exist at the given `j`.
    HyperbolicAt(f64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ObsValue {
    Type(WilliamsonType),
    Flag(bool),
}

fn observe(path: &FamilyPath, obs: TransitionObservable, tau: f64) -> Result<ObsValue> {
    let t = path.at(tau);
    Ok(match obs {
        TransitionObservable::RankZeroType(ip) => ObsValue::Type(classify_rank_zero(&t, ip, 3)),
        TransitionObservable::HyperbolicAt(j) => {
            ObsValue::Flag(rank_one_at(&t, j)?.iter().any(|r| r.wtype == WilliamsonType::HyperbolicRegular))
        }
    })
}

fn is_degenerate(v: &ObsValue) -> bool {
    *v == ObsValue::Type(WilliamsonType::Degenerate)
}

/// Parameter values along `path` where the observable changes, refined by bisection.
pub fn trace_transition(path: &FamilyPath, obs: TransitionObservable, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidInput("at least two samples are needed".into()));
    }
    let taus: Vec<f64> = (0..=steps)
        .map(|k| path.tau_min + (path.tau_max - path.tau_min) * k as f64 / steps as f64)
        .collect();
    let vals: Vec<ObsValue> = taus.par_iter().map(|&tau| observe(path, obs, tau)).collect::<Result<_>>()?;
    let mut out: Vec<f64> = Vec::new();
    let push = |x: f64, out: &mut Vec<f64>| {
        if !out.iter().any(|&y| (y - x).abs() < 1e3 * TAU_TOL) {
            out.push(x);
        }
    };
    for k in 0..steps {
        let (a, b) = (&vals[k], &vals[k + 1]);
        if a == b {
            continue;
        }
        if is_degenerate(b) {
            push(taus[k + 1], &mut out);
            continue;
        }
        if is_degenerate(a) {
            continue;
        }
        let (mut lo, mut hi) = (taus[k], taus[k + 1]);
        while hi - lo > TAU_TOL {
            let mid = 0.5 * (lo + hi);
            let v = observe(path, obs, mid)?;
            if is_degenerate(&v) {
                lo = mid;
                hi = mid;
                break;
            }
            if v == *a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        push(0.5 * (lo + hi), &mut out);
    }
    if out.is_empty() && vals.first() == vals.last() {
        return Err(Error::NoTransition);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Diagram snapshot for one family parameter.
#[derive(Clone, Debug)]
pub struct FlapSnapshot {
    pub tau: f64,
    pub t: ParamT,
    pub points: Vec<DiagramPoint>,
    /// Elliptic-elliptic values with hyperbolic-regular values nearby (within [`FLAP_WINDOW`]).
    pub flap_markers: Vec<(f64, f64)>,
    /// Crossings of two regular-value curves (elliptic or hyperbolic): self-overlap of the image.
    pub overlap_markers: Vec<(f64, f64)>,
}

fn flap_markers(points: &[DiagramPoint]) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter(|p| p.kind == DiagramKind::RankZeroValue(WilliamsonType::EllipticElliptic))
        .filter(|p| {
            points
                .iter()
                .any(|q| {
                    q.kind == DiagramKind::HyperbolicRegularValue
                        && (q.j - p.j).abs() < FLAP_WINDOW
                        && (q.h - p.h).abs() < FLAP_WINDOW * (1.0 + p.h.abs())
                })
        })
        .map(|p| (p.j, p.h))
        .collect()
}

fn overlap_markers(points: &[DiagramPoint]) -> Vec<(f64, f64)> {
    // Regular-value curves per j-sample in u order; a swap of their h order marks a crossing.
    let mut by_j: Vec<(f64, Vec<(f64, f64, bool)>)> = Vec::new();
    for p in points.iter() {
        let hyp = match p.kind {
            DiagramKind::EllipticRegularValue => false,
            DiagramKind::HyperbolicRegularValue => true,
            _ => continue,
        };
        let u = p.source.u().unwrap_or(0.0);
        match by_j.last_mut() {
            Some((j, v)) if *j == p.j => v.push((u, p.h, hyp)),
            _ => by_j.push((p.j, vec![(u, p.h, hyp)])),
        }
    }
    let mut out = Vec::new();
    for w in by_j.windows(2) {
        let (ja, jb) = (w[0].0, w[1].0);
        let mut a = w[0].1.clone();
        let mut b = w[1].1.clone();
        a.sort_by(|x, y| x.0.total_cmp(&y.0));
        b.sort_by(|x, y| x.0.total_cmp(&y.0));
        // Curves can only be matched by order when no branch appears or vanishes.
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.2 != y.2) {
            continue;
        }
        for p in 0..a.len() {
            for q in p + 1..a.len() {
                let (da, db) = (a[p].1 - a[q].1, b[p].1 - b[q].1);
                if da != 0.0 && db != 0.0 && da.signum() != db.signum() {
                    let s = da / (da - db);
                    out.push((ja + s * (jb - ja), a[p].1 + s * (b[p].1 - a[p].1)));
                }
            }
        }
    }
    out
}

/// Per-`tau` diagrams with flap and overlap markers along a family.
pub fn export_flap_swallowtail_data(path: &FamilyPath, tau_steps: usize, j_steps: usize) -> Result<Vec<FlapSnapshot>> {
    let taus: Vec<f64> = if tau_steps == 0 {
        vec![path.tau_min]
    } else {
        (0..=tau_steps)
            .map(|k| path.tau_min + (path.tau_max - path.tau_min) * k as f64 / tau_steps as f64)
            .collect()
    };
    taus.iter()
        .map(|&tau| {
            let t = path.at(tau);
            let points = scan_diagram(&t, 0.0, 3.0, j_steps)?;
            Ok(FlapSnapshot {
                tau,
                t,
                flap_markers: flap_markers(&points),
                overlap_markers: overlap_markers(&points),
                points,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_terms() {
        let p = |s| Affine::parse(s).unwrap();
        assert_eq!(p("tau/2"), Affine { c0: 0.0, c1: 0.5 });
        assert_eq!(p("tau"), Affine { c0: 0.0, c1: 1.0 });
        assert_eq!(p("0"), Affine { c0: 0.0, c1: 0.0 });
        assert_eq!(p("-3*tau + 0.5"), Affine { c0: 0.5, c1: -3.0 });
        assert_eq!(p("1e-3"), Affine { c0: 1e-3, c1: 0.0 });
        assert!(Affine::parse("tau*tau").is_err());
        assert!(Affine::parse("1/tau").is_err());
        assert!(Affine::parse("").is_err());
    }

    #[test]
    fn family_evaluates() {
        let f = FamilyPath::parse("tau/2,tau/2,tau/3,tau", 0.0, 1.0).unwrap();
        let t = f.at(0.6);
        assert!((t.t1 - 0.3).abs() < 1e-15 && (t.t3 - 0.2).abs() < 1e-15 && t.t4 == 0.6);
        assert!(FamilyPath::parse("tau,0,0", 0.0, 1.0).is_err());
        assert!(FamilyPath::parse("tau,0,0,0", 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_family_has_no_transition() {
        let f = FamilyPath::parse("0.3,0,0,0", 0.0, 1.0).unwrap();
        let r = trace_transition(&f, TransitionObservable::RankZeroType(InvariantPoint::P2), 8);
        assert_eq!(r, Err(Error::NoTransition));
    }

    #[test]
    fn scan_rejects_bad_input() {
        let t = ParamT::new(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(scan_diagram(&t, 0.0, 3.0, 10), Err(Error::DegenerateFamily(_))));
        let t = ParamT::new(0.25, 0.0, 0.0, 0.0);
        assert!(scan_diagram(&t, 2.0, 1.0, 10).is_err());
    }
}
