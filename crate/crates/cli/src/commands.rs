use crate::{BifurcationArgs, ClassifyArgs, Detect, Failure, FibreArgs, Format, ParamArgs, SingularArgs, SweepArgs, VerifyArgs};
use octabif_core::bifurcation::{
    export_flap_swallowtail_data, scan_diagram, trace_transition, DiagramPoint, FamilyPath, TransitionObservable,
};
use octabif_core::fibres::{fibre_graph, reduced_level_set, stacked_torus_count, BouquetGraph, ReducedFibre};
use octabif_core::geometry::InvariantPoint;
use octabif_core::singular::{classify_rank_zero, classify_rank_zero_detailed, find_rank_one, invariant_points, WilliamsonType};
use octabif_core::verify::{run_suite, Mutation};
use octabif_core::{Error, ParamT};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        let mut b = serde_json::to_string(&x).expect("finite float serializes");
        if b.ends_with(".0") {
            b.truncate(b.len() - 2);
        }
        b
    } else {
        format!("{x}")
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            match so.write_all(text.as_bytes()).and_then(|_| so.flush()) {
                // Reader went away (e.g. `| head`).
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_t(p: &ParamArgs) -> Result<ParamT, Failure> {
    if p.t.contains("tau") {
        let tau = p.tau.ok_or_else(|| Failure::Usage("--t is a template in tau; pass --tau".into()))?;
        let fam = FamilyPath::parse(&p.t, tau, tau + 1.0)?;
        return Ok(fam.at(tau));
    }
    if p.tau.is_some() {
        return Err(Failure::Usage("--tau given but --t has no tau".into()));
    }
    Ok(ParamT::parse(&p.t)?)
}

#[derive(Serialize)]
struct PointOut {
    u: f64,
    v: f64,
    #[serde(rename = "type")]
    kind: &'static str,
    branch: &'static str,
    h: f64,
    degeneracy_margin: f64,
}

#[derive(Serialize)]
struct SingularOut {
    t: [f64; 4],
    j: f64,
    points: Vec<PointOut>,
}

pub fn singular(a: &SingularArgs) -> Result<(), Failure> {
    let t = parse_t(&a.param)?;
    let recs = find_rank_one(&t, a.j)?;
    let points: Vec<PointOut> = recs
        .iter()
        .filter_map(|r| {
            let (u, v) = r.uv()?;
            Some(PointOut {
                u,
                v,
                kind: r.wtype.label(),
                branch: r.branch.map(|b| b.label()).unwrap_or("theta2=0"),
                h: r.h,
                degeneracy_margin: r.degeneracy_margin,
            })
        })
        .collect();
    let text = match a.format {
        Format::Json => json(&SingularOut { t: t.as_array(), j: a.j, points }),
        Format::Csv => {
            let mut s = String::from("u,v,type,branch,h,degeneracy_margin\n");
            for p in &points {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    num(p.u),
                    num(p.v),
                    p.kind,
                    p.branch,
                    num(p.h),
                    num(p.degeneracy_margin)
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

#[derive(Serialize)]
struct ComponentOut {
    id: usize,
    vertices: Vec<usize>,
    polylines: Vec<usize>,
    isolated_points: usize,
    open: bool,
    k: Option<usize>,
    k_lower_bound: Option<usize>,
}

#[derive(Serialize)]
struct FibreSummary {
    t: [f64; 4],
    j: f64,
    h: Option<f64>,
    level: Option<f64>,
    vertices: Vec<[f64; 2]>,
    edges: Vec<(usize, usize)>,
    free_loops: usize,
    isolated_points: usize,
    faces: usize,
    faces_with_singular: usize,
    euler_defect: i64,
    through_missed_point: bool,
    components: Vec<ComponentOut>,
}

fn summary(t: &ParamT, j: f64, f: &ReducedFibre, g: &BouquetGraph) -> FibreSummary {
    let components = g
        .components
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let (k, k_lower_bound) = match stacked_torus_count(g, id) {
                Ok(k) => (Some(k), None),
                Err(Error::OpenComponent { lower_bound }) => (None, Some(lower_bound)),
                Err(_) => (None, None),
            };
            ComponentOut {
                id,
                vertices: c.vertices.clone(),
                polylines: c.polylines.clone(),
                isolated_points: c.points,
                open: c.open,
                k,
                k_lower_bound,
            }
        })
        .collect();
    FibreSummary {
        t: t.as_array(),
        j,
        h: Some(f.h),
        level: Some(f.level),
        vertices: g.vertices.clone(),
        edges: g.edges.clone(),
        free_loops: g.free_loops,
        isolated_points: g.isolated_points,
        faces: g.faces,
        faces_with_singular: g.faces_with_singular,
        euler_defect: g.euler_defect(),
        through_missed_point: f.through_missed,
        components,
    }
}

fn empty_summary(t: &ParamT, j: f64) -> FibreSummary {
    FibreSummary {
        t: t.as_array(),
        j,
        h: None,
        level: None,
        vertices: Vec::new(),
        edges: Vec::new(),
        free_loops: 0,
        isolated_points: 0,
        faces: 0,
        faces_with_singular: 0,
        euler_defect: 0,
        through_missed_point: false,
        components: Vec::new(),
    }
}

const CONTOUR_HEADER: &str = "component_id,polyline_id,u,v\n";

fn contour_csv(f: &ReducedFibre, g: &BouquetGraph) -> String {
    let mut s = String::from(CONTOUR_HEADER);
    for (i, pl) in f.polylines.iter().enumerate() {
        let c = g.polyline_component[i];
        for p in &pl.points {
            let _ = writeln!(s, "{c},{i},{},{}", num(p[0]), num(p[1]));
        }
    }
    s
}

pub fn fibre(a: &FibreArgs) -> Result<(), Failure> {
    let t = parse_t(&a.param)?;
    let h = if a.h.trim().eq_ignore_ascii_case("auto") {
        let recs = find_rank_one(&t, a.j)?;
        let lowest = recs
            .iter()
            .filter(|r| r.wtype == WilliamsonType::HyperbolicRegular)
            .filter_map(|r| r.u().map(|u| (u, r.h)))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        match lowest {
            Some((_, h)) => h,
            None => {
                eprintln!("warning: no hyperbolic point at j = {}; fibre left empty", num(a.j));
                if let Some(p) = &a.csv {
                    emit(Some(p), CONTOUR_HEADER)?;
                }
                if let Some(p) = &a.svg {
                    emit(Some(p), &crate::svg::render(None, None))?;
                }
                return emit(a.summary.as_deref(), &json(&empty_summary(&t, a.j)));
            }
        }
    } else {
        a.h.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("--h expects a real or 'auto', got {:?}", a.h)))?
    };
    let f = reduced_level_set(&t, a.j, h, a.grid)?;
    let g = fibre_graph(&f)?;
    if let Some(p) = &a.csv {
        emit(Some(p), &contour_csv(&f, &g))?;
    }
    if let Some(p) = &a.svg {
        emit(Some(p), &crate::svg::render(Some(&f), Some(&g)))?;
    }
    emit(a.summary.as_deref(), &json(&summary(&t, a.j, &f, &g)))
}

fn diagram_csv(points: &[DiagramPoint]) -> String {
    let mut s = String::from("j,h,kind,source\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", num(p.j), num(p.h), p.kind.label(), p.source_label());
    }
    s
}

pub fn bifurcation(a: &BifurcationArgs) -> Result<(), Failure> {
    let t = parse_t(&a.param)?;
    let points = scan_diagram(&t, a.j_min, a.j_max, a.steps)?;
    emit(a.out.as_deref(), &diagram_csv(&points))
}

#[derive(Serialize)]
struct TransitionEvent {
    tau: f64,
    observable: String,
    before: String,
    after: String,
}

#[derive(Serialize)]
struct TransitionsOut {
    family: String,
    tau_min: f64,
    tau_max: f64,
    detect: &'static str,
    tau_star: Vec<f64>,
    events: Vec<TransitionEvent>,
}

#[derive(Serialize)]
struct SnapshotOut {
    index: usize,
    tau: f64,
    t: [f64; 4],
    diagram: String,
    flap_markers: Vec<(f64, f64)>,
    overlap_markers: Vec<(f64, f64)>,
}

fn hyperbolic_present(t: &ParamT, j: f64) -> String {
    match find_rank_one(t, j) {
        Ok(rs) => rs.iter().any(|r| r.wtype == WilliamsonType::HyperbolicRegular).to_string(),
        Err(_) => "undetermined".into(),
    }
}

pub fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let path = FamilyPath::parse(&a.family, a.tau_min, a.tau_max)?;
    let observables: Vec<(String, TransitionObservable)> = match a.detect {
        Detect::Rank0Type => {
            let points = if a.point.trim().eq_ignore_ascii_case("all") {
                InvariantPoint::ALL.to_vec()
            } else {
                vec![InvariantPoint::parse(&a.point)
                    .ok_or_else(|| Failure::Usage(format!("unknown invariant point {:?}", a.point)))?]
            };
            points
                .into_iter()
                .map(|ip| (ip.name().to_string(), TransitionObservable::RankZeroType(ip)))
                .collect()
        }
        Detect::HyperbolicAt => {
            let j = a.j.ok_or_else(|| Failure::Usage("--detect hyperbolic-at needs --j".into()))?;
            vec![(format!("hyperbolic-at-j={}", num(j)), TransitionObservable::HyperbolicAt(j))]
        }
    };
    let probe = |obs: TransitionObservable, tau: f64| -> String {
        let t = path.at(tau);
        match obs {
            TransitionObservable::RankZeroType(ip) => classify_rank_zero(&t, ip, 3).label().to_string(),
            TransitionObservable::HyperbolicAt(j) => hyperbolic_present(&t, j),
        }
    };
    let mut events = Vec::new();
    for (name, obs) in &observables {
        let taus = match trace_transition(&path, *obs, a.steps) {
            Ok(v) => v,
            Err(Error::NoTransition) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        for tau in taus {
            let d = 1e-6 * (1.0 + tau.abs());
            events.push(TransitionEvent {
                tau,
                observable: name.clone(),
                before: probe(*obs, tau - d),
                after: probe(*obs, tau + d),
            });
        }
    }
    events.sort_by(|x, y| x.tau.total_cmp(&y.tau).then(x.observable.cmp(&y.observable)));
    let mut tau_star: Vec<f64> = Vec::new();
    for e in &events {
        if !tau_star.iter().any(|&s| (s - e.tau).abs() < 1e-8) {
            tau_star.push(e.tau);
        }
    }
    let out = TransitionsOut {
        family: a.family.clone(),
        tau_min: a.tau_min,
        tau_max: a.tau_max,
        detect: match a.detect {
            Detect::Rank0Type => "rank0-type",
            Detect::HyperbolicAt => "hyperbolic-at",
        },
        tau_star,
        events,
    };
    let text = json(&out);
    let Some(dir) = &a.out_dir else {
        if a.diagrams > 0 {
            return Err(Failure::Usage("--diagrams needs --out-dir".into()));
        }
        return emit(None, &text);
    };
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    emit(Some(&dir.join("transitions.json")), &text)?;
    if a.diagrams > 0 {
        let snaps = export_flap_swallowtail_data(&path, a.diagrams, a.j_steps)?;
        let mut index = Vec::new();
        for (k, s) in snaps.iter().enumerate() {
            let name = format!("diagram_{k:04}.csv");
            emit(Some(&dir.join(&name)), &diagram_csv(&s.points))?;
            index.push(SnapshotOut {
                index: k,
                tau: s.tau,
                t: s.t.as_array(),
                diagram: name,
                flap_markers: s.flap_markers.clone(),
                overlap_markers: s.overlap_markers.clone(),
            });
        }
        emit(Some(&dir.join("diagrams.json")), &json(&index))?;
    }
    emit(None, &text)
}

#[derive(Serialize)]
struct InvariantOut {
    name: &'static str,
    j: f64,
    h: f64,
    #[serde(rename = "type")]
    kind: &'static str,
    degeneracy_margin: f64,
}

#[derive(Serialize)]
struct ClassifyOut {
    t: [f64; 4],
    points: Vec<InvariantOut>,
}

pub fn classify_invariant(a: &ClassifyArgs) -> Result<(), Failure> {
    let t = parse_t(&a.param)?;
    if a.draws == 0 {
        return Err(Failure::Usage("--draws must be positive".into()));
    }
    let mut points = Vec::new();
    for (r, ip) in invariant_points(&t).into_iter().zip(InvariantPoint::ALL) {
        let (w, m) = classify_rank_zero_detailed(&t, ip, a.draws)?;
        points.push(InvariantOut { name: ip.name(), j: r.j, h: r.h, kind: w.label(), degeneracy_margin: m });
    }
    emit(a.out.as_deref(), &json(&ClassifyOut { t: t.as_array(), points }))
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let mutation = Mutation::parse(&a.mutate)?;
    let report = run_suite(a.seed, a.samples, mutation)?;
    emit(a.out.as_deref(), &json(&report))?;
    if a.out.is_some() {
        let mut so = std::io::stdout().lock();
        let _ = writeln!(so, "{}", if report.passed { "PASS" } else { "FAIL" });
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}
