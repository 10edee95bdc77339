//! Reduced level sets of `H_t` and their saddle graphs.
//!
//! In polar chart-1 coordinates `w = r e^{i theta}` the reduced Hamiltonian is
//! `Gamma(r) + t1 cos(theta) Omega(r)` with `Omega > 0` inside the chart, so a
//! level set meets the circle of radius `r` where `cos(theta) = c(r)`,
//! `c = (h - Gamma) / (t1 Omega)`. Radii with `|c| <= 1` form gaps between the
//! points where the level set crosses the `u`-axis; each such gap carries one
//! closed curve, and curves meet only at hyperbolic points on the axis.
//! Topology is therefore read off the axis profile `g(u) = H^red(u, 0)` and the
//! contour polylines are sampled from the exact parametrisation.
//!
//! Chart 1 misses one point of the reduced sphere for `j < 1` and two for
//! `j > 1`; they sit at the boundary radii, where `Omega` vanishes.

use crate::energies::{gamma_bar_omega, gamma_cap, jet2_reduced, ParamT};
use crate::geometry;
use crate::numerics::Polyline;
use crate::singular::{find_rank_one, SingularPointRecord, WilliamsonType};
use crate::{Error, Result};

/// Default number of radial samples per contour curve.
pub const DEFAULT_GRID: usize = 800;
/// Same-level tolerance relative to `1 + |h|`.
pub const EPS_H_REL: f64 = 1e-5;
/// Rank-one points closer than this (relative to the slice width) to a chart-missed
/// point are absorbed into it when building fibre topology.
pub const EDGE_HUG: f64 = 1e-6;
/// Upper bound on hyperbolic points in one fibre.
pub const MAX_HYPERBOLIC: usize = 12;

pub fn eps_h(h: f64) -> f64 {
    EPS_H_REL * (1.0 + h.abs())
}

/// A point of the reduced sphere not covered by chart 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MissedPoint {
    /// Inner boundary circle (`|w|` minimal) or outer one.
    pub inner: bool,
    pub radius: f64,
    /// Value of `H^red` at the point.
    pub h: f64,
    /// `H^red` has an extremum at the point, or at a critical point within `probe` of it
    /// (the radial term dominates the angular one on the circle of that radius).
    pub extremum: bool,
    /// Radial distance used for the extremum test; zero when no extremum was found.
    pub probe: f64,
    /// Bound on `|H^red - h|` over the probe disc.
    pub spread: f64,
}

/// Where a level curve meets the `u`-axis (or leaves the chart).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisEvent {
    /// Transversal crossing at `u`.
    Crossing { u: f64 },
    /// Hyperbolic point on the level; index into the fibre's vertex list.
    Vertex { u: f64, index: usize },
    /// Elliptic point on the level: an isolated point of the level set.
    Isolated { u: f64 },
}

impl AxisEvent {
    pub fn u(&self) -> f64 {
        match *self {
            AxisEvent::Crossing { u } | AxisEvent::Vertex { u, .. } | AxisEvent::Isolated { u } => u,
        }
    }
    fn r(&self) -> f64 {
        self.u().abs()
    }
    fn sign(&self) -> f64 {
        if self.u() >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Radial gap between consecutive events; `inside` when `|c| <= 1` there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    pub r0: f64,
    pub r1: f64,
    pub inside: bool,
}

#[derive(Clone, Debug)]
pub struct ReducedFibre {
    pub t: ParamT,
    pub j: f64,
    /// Requested level.
    pub h: f64,
    /// Level actually used; snapped to a hyperbolic value within `eps_h`.
    pub level: f64,
    /// One closed curve per inside gap, in gap order.
    pub polylines: Vec<Polyline>,
    /// Gap index of each polyline.
    pub polyline_gap: Vec<usize>,
    /// Every rank-one point at this `j`, sorted by `u`.
    pub singular_all: Vec<SingularPointRecord>,
    /// Rank-one points with value within `eps_h` of the level.
    pub singular_on_fibre: Vec<SingularPointRecord>,
    pub missed: Vec<MissedPoint>,
    /// True when the level passes through a chart-missed point.
    pub through_missed: bool,
    /// Axis events sorted by radius.
    pub events: Vec<AxisEvent>,
    /// `events.len() + 1` gaps between the chart's inner and outer radius.
    pub gaps: Vec<Gap>,
    pub r_min: f64,
    pub r_max: f64,
}

impl ReducedFibre {
    /// Hyperbolic points on the fibre: the vertices of its saddle graph.
    pub fn hyperbolic(&self) -> Vec<&SingularPointRecord> {
        self.singular_on_fibre
            .iter()
            .filter(|r| r.wtype == WilliamsonType::HyperbolicRegular)
            .collect()
    }

    /// `c(r) = (level - Gamma(r)) / (t1 Omega(r))`.
    pub fn c_of_r(&self, r: f64) -> f64 {
        c_of_r(&self.t, self.j, self.level, r)
    }
}

fn c_of_r(t: &ParamT, j: f64, h: f64, r: f64) -> f64 {
    let r1 = (2.0 * j).sqrt();
    match gamma_bar_omega(r1, r) {
        Ok(o) if o > 0.0 => (h - gamma_cap(t, r1, r)) / (t.t1 * o),
        _ => f64::INFINITY,
    }
}

/// `g(u) = H^red(u, 0)`, extended to the boundary radii by the missed-point values.
fn axis_value(t: &ParamT, j: f64, r_min: f64, r_max: f64, u: f64) -> f64 {
    let r1 = (2.0 * j).sqrt();
    if u.abs() <= r_min || u.abs() >= r_max {
        let r = if u.abs() <= r_min { r_min } else { r_max };
        return gamma_cap(t, r1, r);
    }
    match jet2_reduced(t, j, u, 0.0) {
        Ok(jet) => jet.v,
        Err(_) => gamma_cap(t, r1, u.abs()),
    }
}

fn missed_points(t: &ParamT, j: f64, r_min: f64, r_max: f64) -> Vec<MissedPoint> {
    let r1 = (2.0 * j).sqrt();
    let mut out = Vec::new();
    let mut push = |inner: bool, r: f64| {
        let h = gamma_cap(t, r1, r);
        let mut m = MissedPoint { inner, radius: r, h, extremum: false, probe: 0.0, spread: 0.0 };
        // Smallest probe radius on a decade ladder at which the radial change wins.
        for k in (3..=12).rev() {
            let d = (r_max - r_min) * 10f64.powi(-k);
            let rr = if inner { r + d } else { r - d };
            let Ok(o) = gamma_bar_omega(r1, rr) else { continue };
            let (radial, angular) = ((gamma_cap(t, r1, rr) - h).abs(), (t.t1 * o).abs());
            if radial > angular {
                m.extremum = true;
                m.probe = d;
                m.spread = 2.0 * (radial + angular);
                break;
            }
        }
        out.push(m);
    };
    if r_min > 0.0 {
        push(true, r_min);
    }
    push(false, r_max);
    out
}

/// Level set of `H_t^{red,j}` at `h`; `grid` is the number of radial samples per curve.
pub fn reduced_level_set(t: &ParamT, j: f64, h: f64, grid: usize) -> Result<ReducedFibre> {
    if !(j > 0.0 && j < 3.0) {
        return Err(Error::Domain(format!("j = {j} must lie in (0, 3)")));
    }
    if grid < 16 {
        return Err(Error::InvalidInput(format!("grid {grid} below the minimum of 16")));
    }
    if t.t1 == 0.0 {
        return Err(Error::DegenerateFamily("t1 = 0: reduced level sets are circles; no rank-one points".into()));
    }
    let (lo, hi) = geometry::reduced_slice(j)?;
    let r_min = lo.max(0.0).sqrt();
    let r_max = hi.sqrt();
    let singular_all = find_rank_one(t, j)?;

    let mut level = h;
    if let Some(r) = singular_all
        .iter()
        .filter(|r| r.wtype == WilliamsonType::HyperbolicRegular && (r.h - h).abs() < eps_h(h))
        .min_by(|a, b| (a.h - h).abs().total_cmp(&(b.h - h).abs()))
    {
        level = r.h;
    }
    let missed = missed_points(t, j, r_min, r_max);
    let through_missed = missed.iter().any(|m| (m.h - level).abs() < eps_h(level));
    let singular_on_fibre: Vec<SingularPointRecord> = singular_all
        .iter()
        .filter(|r| (r.h - level).abs() < eps_h(level))
        .cloned()
        .collect();

    // Axis events: attached critical points, then one crossing per monotone piece.
    let mut events: Vec<AxisEvent> = Vec::new();
    let mut vertex_count = 0;
    let mut breaks: Vec<(f64, f64)> = Vec::new(); // (u, g(u) - level), zero when attached
    // Hyperbolic points group within eps_h; elliptic ones only on an exact match.
    let attached = |r: &SingularPointRecord| match r.wtype {
        WilliamsonType::HyperbolicRegular => (r.h - level).abs() < eps_h(level),
        _ => (r.h - level).abs() <= 4.0 * f64::EPSILON * (1.0 + level.abs()),
    };
    for r in singular_all.iter().filter(|r| !hugs_edge(r, r_min, r_max)) {
        let u = r.u().unwrap();
        if attached(r) {
            if r.wtype == WilliamsonType::HyperbolicRegular {
                events.push(AxisEvent::Vertex { u, index: vertex_count });
                vertex_count += 1;
            } else {
                events.push(AxisEvent::Isolated { u });
            }
            breaks.push((u, 0.0));
        } else {
            breaks.push((u, r.h - level));
        }
    }
    let ends: Vec<(f64, f64)> = if r_min > 0.0 {
        vec![(-r_max, -r_min), (r_min, r_max)]
    } else {
        vec![(-r_max, r_max)]
    };
    let g = |u: f64| axis_value(t, j, r_min, r_max, u) - level;
    for (a, b) in ends {
        let mut pts: Vec<(f64, f64)> = vec![(a, if through_missed_at(&missed, a, level) { 0.0 } else { g(a) })];
        pts.extend(breaks.iter().copied().filter(|(u, _)| *u > a && *u < b));
        pts.push((b, if through_missed_at(&missed, b, level) { 0.0 } else { g(b) }));
        for w in pts.windows(2) {
            let ((ua, fa), (ub, fb)) = (w[0], w[1]);
            if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                events.push(AxisEvent::Crossing { u: bisect(&g, ua, ub, fa) });
            }
        }
    }
    events.sort_by(|x, y| x.r().total_cmp(&y.r()));

    let mut gaps = Vec::with_capacity(events.len() + 1);
    let mut r0 = r_min;
    for k in 0..=events.len() {
        let r1 = if k < events.len() { events[k].r() } else { r_max };
        let mid = 0.5 * (r0 + r1);
        let inside = r1 > r0 && c_of_r(t, j, level, mid).abs() <= 1.0;
        gaps.push(Gap { r0, r1, inside });
        r0 = r1;
    }

    let mut polylines = Vec::new();
    let mut polyline_gap = Vec::new();
    for (k, gap) in gaps.iter().enumerate() {
        if gap.inside {
            polylines.push(gap_curve(t, j, level, gap, grid));
            polyline_gap.push(k);
        }
    }

    Ok(ReducedFibre {
        t: *t,
        j,
        h,
        level,
        polylines,
        polyline_gap,
        singular_all,
        singular_on_fibre,
        missed,
        through_missed,
        events,
        gaps,
        r_min,
        r_max,
    })
}

fn hugs_edge(r: &SingularPointRecord, r_min: f64, r_max: f64) -> bool {
    let a = r.u().map_or(0.0, f64::abs);
    let tol = EDGE_HUG * (r_max - r_min);
    r_max - a < tol || (r_min > 0.0 && a - r_min < tol)
}

fn through_missed_at(missed: &[MissedPoint], u: f64, level: f64) -> bool {
    missed
        .iter()
        .any(|m| (m.radius - u.abs()).abs() < 1e-12 * (1.0 + m.radius) && (m.h - level).abs() < eps_h(level))
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg = fa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = g(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == neg {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Closed curve over an inside gap: upper arc `theta = arccos c(r)` outwards, mirror back.
fn gap_curve(t: &ParamT, j: f64, level: f64, gap: &Gap, n: usize) -> Polyline {
    let theta = |r: f64| c_of_r(t, j, level, r).clamp(-1.0, 1.0).acos();
    let rs: Vec<f64> = (0..=n)
        .map(|i| {
            // Cosine spacing concentrates samples where the arcs meet the axis.
            let s = 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / n as f64).cos();
            gap.r0 + (gap.r1 - gap.r0) * s
        })
        .collect();
    let upper: Vec<[f64; 2]> = rs
        .iter()
        .map(|&r| {
            let th = if r <= gap.r0 || r >= gap.r1 { theta(r.clamp(gap.r0, gap.r1) * (1.0 - 1e-15)) } else { theta(r) };
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    let mut pts = upper.clone();
    for p in upper.iter().rev().skip(1).take(upper.len().saturating_sub(2)) {
        pts.push([p[0], -p[1]]);
    }
    Polyline { points: pts, closed: true }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphComponent {
    /// Indices into [`BouquetGraph::vertices`].
    pub vertices: Vec<usize>,
    /// Indices into the fibre's polylines.
    pub polylines: Vec<usize>,
    /// Number of isolated (elliptic) points in the component.
    pub points: usize,
    /// The component passes through a chart-missed point.
    pub open: bool,
}

/// Saddle graph of a fibre. `S` (half-period points) is always empty for this family.
#[derive(Clone, Debug)]
pub struct BouquetGraph {
    /// Hyperbolic points `(u, v)`.
    pub vertices: Vec<[f64; 2]>,
    /// Arcs between vertices; `(a, a)` is a loop.
    pub edges: Vec<(usize, usize)>,
    /// Closed level curves without vertices.
    pub free_loops: usize,
    /// Isolated points of the level set.
    pub isolated_points: usize,
    /// Branch ends seen at each vertex (4 for a nondegenerate saddle).
    pub arm_ends: Vec<usize>,
    /// Connected components of the complement on the reduced sphere.
    pub faces: usize,
    /// Faces containing at least one singular point of `H^red`.
    pub faces_with_singular: usize,
    pub n_components: usize,
    pub components: Vec<GraphComponent>,
    /// Component of each polyline.
    pub polyline_component: Vec<usize>,
    /// Corner points `S` of the bouquet; empty by the period-2pi property.
    pub corner_points: Vec<[f64; 2]>,
}

impl BouquetGraph {
    /// `faces - edges + vertices + isolated - (n_components + 1)`; zero when Euler's formula holds.
    pub fn euler_defect(&self) -> i64 {
        self.faces as i64 - self.edges.len() as i64 + self.vertices.len() as i64 + self.isolated_points as i64
            - (self.n_components as i64 + 1)
    }

    pub fn edges_match_vertices(&self) -> bool {
        self.vertices.is_empty() || self.edges.len() == 2 * self.vertices.len()
    }

    pub fn is_hyperbolic(&self) -> bool {
        !self.vertices.is_empty()
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Builds the saddle graph of a fibre together with its face count.
///
/// Faces are counted independently of the edges: each outside gap contributes
/// one region of the complement, each inside gap two (around `theta = 0` and
/// `theta = pi`), glued across the axis events.
pub fn fibre_graph(f: &ReducedFibre) -> Result<BouquetGraph> {
    let vertices: Vec<[f64; 2]> = f
        .events
        .iter()
        .filter_map(|e| match e {
            AxisEvent::Vertex { u, .. } => Some((*u, e)),
            _ => None,
        })
        .map(|(u, _)| [u, 0.0])
        .collect();
    // Vertex list order follows the index assigned at construction (increasing u).
    let mut vertices_by_index = vec![[0.0, 0.0]; vertices.len()];
    for e in &f.events {
        if let AxisEvent::Vertex { u, index } = e {
            vertices_by_index[*index] = [*u, 0.0];
        }
    }
    let nv = vertices_by_index.len();
    let ng = f.gaps.len();
    let ne = f.events.len();

    // Curves: one per inside gap, bounded by the events on either side.
    let mut edges = Vec::new();
    let mut arm_ends = vec![0usize; nv];
    let mut free_loops = 0;
    let mut dsu = Dsu::new(nv + ng + ne);
    let end_vertex = |k: usize| match f.events.get(k) {
        Some(AxisEvent::Vertex { index, .. }) => Some(*index),
        _ => None,
    };
    for (gi, gap) in f.gaps.iter().enumerate() {
        if !gap.inside {
            continue;
        }
        let left = if gi == 0 { None } else { end_vertex(gi - 1) };
        let right = end_vertex(gi);
        match (left, right) {
            (Some(a), Some(b)) => {
                edges.push((a.min(b), a.max(b)));
                edges.push((a.min(b), a.max(b)));
                arm_ends[a] += 2;
                arm_ends[b] += 2;
                dsu.union(nv + gi, a);
                dsu.union(nv + gi, b);
            }
            (Some(a), None) | (None, Some(a)) => {
                edges.push((a, a));
                arm_ends[a] += 2;
                dsu.union(nv + gi, a);
            }
            (None, None) => free_loops += 1,
        }
    }
    for (k, e) in f.events.iter().enumerate() {
        match e {
            AxisEvent::Vertex { .. } => {
                let (l, r) = (f.gaps[k].inside, f.gaps[k + 1].inside);
                if !(l && r) {
                    return Err(Error::GraphInconsistent(format!(
                        "hyperbolic point at u = {} is not flanked by level curves",
                        e.u()
                    )));
                }
            }
            AxisEvent::Crossing { .. } => {
                if f.gaps[k].inside == f.gaps[k + 1].inside {
                    return Err(Error::GraphInconsistent(format!(
                        "axis crossing at u = {} does not bound a level curve",
                        e.u()
                    )));
                }
            }
            AxisEvent::Isolated { .. } => {}
        }
    }

    // Components in a fixed order: those with vertices (by lowest vertex), then the rest by gap.
    let mut components: Vec<GraphComponent> = Vec::new();
    let mut comp_of_root: std::collections::BTreeMap<usize, usize> = Default::default();
    let new_comp = |components: &mut Vec<GraphComponent>| {
        components.push(GraphComponent { vertices: vec![], polylines: vec![], points: 0, open: false });
        components.len() - 1
    };
    for v in 0..nv {
        let root = dsu.find(v);
        let id = match comp_of_root.get(&root) {
            Some(&id) => id,
            None => {
                let id = new_comp(&mut components);
                comp_of_root.insert(root, id);
                id
            }
        };
        components[id].vertices.push(v);
    }
    let mut polyline_component = vec![0; f.polylines.len()];
    for (pi, &gi) in f.polyline_gap.iter().enumerate() {
        let root = dsu.find(nv + gi);
        let id = match comp_of_root.get(&root) {
            Some(&id) => id,
            None => {
                let id = new_comp(&mut components);
                comp_of_root.insert(root, id);
                id
            }
        };
        components[id].polylines.push(pi);
        let gap = f.gaps[gi];
        let touches = f.through_missed
            && ((gi == 0 && f.r_min > 0.0) || gi == ng - 1)
            && f.missed.iter().any(|m| (m.h - f.level).abs() < eps_h(f.level)
                && ((m.inner && gap.r0 == m.radius) || (!m.inner && gap.r1 == m.radius)));
        components[id].open |= touches;
        polyline_component[pi] = id;
    }
    let mut isolated_points = 0;
    for e in &f.events {
        if let AxisEvent::Isolated { .. } = e {
            let id = new_comp(&mut components);
            components[id].points = 1;
            isolated_points += 1;
        }
    }

    let (faces, faces_with_singular) = count_faces(f)?;
    Ok(BouquetGraph {
        vertices: vertices_by_index,
        edges,
        free_loops,
        isolated_points,
        arm_ends,
        faces,
        faces_with_singular,
        n_components: components.len(),
        components,
        polyline_component,
        corner_points: Vec::new(),
    })
}

/// Pieces of the complement: gap `k` outside -> piece `3k`; inside -> `3k+1`
/// (around `theta = 0`) and `3k+2` (around `theta = pi`).
fn count_faces(f: &ReducedFibre) -> Result<(usize, usize)> {
    let ng = f.gaps.len();
    let mut dsu = Dsu::new(3 * ng);
    let zero_side = |k: usize| 3 * k + 1;
    let pi_side = |k: usize| 3 * k + 2;
    let outside = |k: usize| 3 * k;
    for (k, e) in f.events.iter().enumerate() {
        let (l, r) = (k, k + 1);
        let s = e.sign();
        match e {
            AxisEvent::Crossing { .. } => {
                // On the inside gap the piece on the crossing's side pinches off.
                let (gin, gout) = if f.gaps[l].inside { (l, r) } else { (r, l) };
                let survivor = if s > 0.0 { pi_side(gin) } else { zero_side(gin) };
                dsu.union(survivor, outside(gout));
            }
            AxisEvent::Vertex { .. } => {
                if s > 0.0 {
                    dsu.union(pi_side(l), pi_side(r));
                } else {
                    dsu.union(zero_side(l), zero_side(r));
                }
            }
            AxisEvent::Isolated { .. } => {
                if f.gaps[l].inside || f.gaps[r].inside {
                    return Err(Error::GraphInconsistent(format!(
                        "isolated level point at u = {} touches a level curve",
                        e.u()
                    )));
                }
                dsu.union(outside(l), outside(r));
            }
        }
    }
    let pieces: Vec<usize> = (0..ng)
        .flat_map(|k| if f.gaps[k].inside { vec![zero_side(k), pi_side(k)] } else { vec![outside(k)] })
        .collect();
    let mut roots: Vec<usize> = pieces.iter().map(|&p| dsu.find(p)).collect();
    roots.sort_unstable();
    roots.dedup();

    // Mark faces that contain a singular point.
    let mut hit: Vec<usize> = Vec::new();
    let piece_at = |r: f64, s: f64| -> Option<usize> {
        let tol = 1e-12 * (1.0 + r);
        let k = match f.events.iter().position(|e| (e.r() - r).abs() < tol) {
            // Same radius as an axis event on the other half-axis: either neighbouring gap works.
            Some(k) if f.events[k].sign() != s => k,
            Some(_) => return None,
            None => f.gaps.iter().position(|g| r > g.r0 && r < g.r1)?,
        };
        Some(if !f.gaps[k].inside {
            outside(k)
        } else if s > 0.0 {
            zero_side(k)
        } else {
            pi_side(k)
        })
    };
    for rec in f.singular_all.iter().filter(|r| !hugs_edge(r, f.r_min, f.r_max)) {
        let u = rec.u().unwrap();
        if let Some(p) = piece_at(u.abs(), u.signum()) {
            hit.push(dsu.find(p));
        }
    }
    for m in f.missed.iter().filter(|m| m.extremum && (m.h - f.level).abs() > m.spread) {
        let k = if m.inner { 0 } else { ng - 1 };
        if !f.gaps[k].inside {
            hit.push(dsu.find(outside(k)));
        }
    }
    hit.sort_unstable();
    hit.dedup();
    Ok((roots.len(), hit.len()))
}

/// `k` of the `k`-stacked torus over a closed component: vertices + 1.
pub fn stacked_torus_count(g: &BouquetGraph, component: usize) -> Result<usize> {
    let c = g
        .components
        .get(component)
        .ok_or_else(|| Error::InvalidInput(format!("no component {component}")))?;
    let k = c.vertices.len() + 1;
    if c.open {
        Err(Error::OpenComponent { lower_bound: k })
    } else {
        Ok(k)
    }
}

/// Connected components of the reduced level set and whether any passes a chart-missed point.
pub fn count_fibre_components(t: &ParamT, j: f64, h: f64) -> Result<(usize, bool)> {
    let f = reduced_level_set(t, j, h, 16)?;
    let g = fibre_graph(&f)?;
    Ok((g.n_components, g.components.iter().any(|c| c.open)))
}

/// Sizes of groups of hyperbolic points sharing a value within `eps_h`.
pub fn hyperbolic_groups(records: &[SingularPointRecord]) -> Vec<usize> {
    let mut hs: Vec<f64> = records
        .iter()
        .filter(|r| r.wtype == WilliamsonType::HyperbolicRegular)
        .map(|r| r.h)
        .collect();
    hs.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut k = 0;
    while k < hs.len() {
        let mut e = k + 1;
        while e < hs.len() && hs[e] - hs[e - 1] < eps_h(hs[e]) {
            e += 1;
        }
        groups.push(e - k);
        k = e;
    }
    groups
}

/// Largest number of hyperbolic points sharing one fibre at level `j`.
pub fn max_hyperbolic_at(t: &ParamT, j: f64) -> Result<usize> {
    Ok(hyperbolic_groups(&find_rank_one(t, j)?).into_iter().max().unwrap_or(0))
}

/// Largest number of hyperbolic points sharing a fibre over `j_samples` interior levels.
pub fn max_hyperbolic_audit(t: &ParamT, j_samples: usize) -> Result<usize> {
    let mut best = 0;
    for k in 0..j_samples {
        let j = 3.0 * (k as f64 + 0.5) / j_samples as f64;
        best = best.max(max_hyperbolic_at(t, j)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_stack() -> ParamT {
        ParamT::new(0.25, 1.0 / 3.0, 1.0 / 3.0, 1.0)
    }

    fn graph(t: &ParamT, j: f64, h: f64) -> (ReducedFibre, BouquetGraph) {
        let f = reduced_level_set(t, j, h, 64).unwrap();
        let g = fibre_graph(&f).unwrap();
        (f, g)
    }

    #[test]
    fn figure_eight() {
        let (f, g) = graph(&two_stack(), 2.0, 1.4296537614);
        assert_eq!((g.vertices.len(), g.edges.len(), g.faces), (1, 2, 3));
        assert_eq!(g.edges, vec![(0, 0), (0, 0)]);
        assert_eq!(g.arm_ends, vec![4]);
        assert_eq!(g.euler_defect(), 0);
        assert!((g.vertices[0][0] - 1.48116).abs() < 1e-5);
        assert_eq!(stacked_torus_count(&g, 0), Ok(2));
        // Both loops pass through the saddle.
        for p in &f.polylines {
            let d = p.points.iter().map(|q| (q[0] - g.vertices[0][0]).hypot(q[1])).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn empty_fibre_above_max() {
        let (f, g) = graph(&two_stack(), 2.0, 50.0);
        assert!(f.polylines.is_empty());
        assert_eq!((g.vertices.len(), g.edges.len(), g.faces, g.n_components), (0, 0, 1, 0));
        assert!(!g.is_hyperbolic());
        assert_eq!(g.euler_defect(), 0);
    }

    #[test]
    fn regular_fibre_is_one_loop() {
        let (_, g) = graph(&two_stack(), 2.0, 1.6);
        assert_eq!((g.free_loops, g.n_components, g.faces), (1, 1, 2));
        assert_eq!(g.faces_with_singular, g.faces);
    }

    #[test]
    fn level_snaps_within_eps() {
        let f = reduced_level_set(&two_stack(), 2.0, 1.42965, 16).unwrap();
        assert!((f.level - 1.4296537614).abs() < 1e-9);
        let f = reduced_level_set(&two_stack(), 2.0, 1.43, 16).unwrap();
        assert_eq!(f.level, 1.43);
    }

    #[test]
    fn rejects_bad_input() {
        let t = two_stack();
        assert!(matches!(reduced_level_set(&t, 3.0, 0.0, 64), Err(Error::Domain(_))));
        assert!(matches!(reduced_level_set(&t, 0.0, 0.0, 64), Err(Error::Domain(_))));
        assert!(reduced_level_set(&t, 1.5, 0.0, 4).is_err());
        let t0 = ParamT::new(0.0, 1.0, 1.0, 1.0);
        assert!(matches!(reduced_level_set(&t0, 1.5, 0.0, 64), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn open_component_reports_lower_bound() {
        // Level through the (regular) inner missed point.
        let t = ParamT::new(0.5, 0.5, 1.0 / 3.0, 1.0);
        let m = reduced_level_set(&t, 1.65125, 0.0, 16).unwrap().missed[0].clone();
        assert!(m.inner && !m.extremum);
        let (f, g) = graph(&t, 1.65125, m.h);
        assert!(f.through_missed);
        let open: Vec<usize> = (0..g.n_components).filter(|&c| g.components[c].open).collect();
        assert!(!open.is_empty());
        assert!(matches!(stacked_torus_count(&g, open[0]), Err(Error::OpenComponent { .. })));
    }

    #[test]
    fn hyperbolic_grouping() {
        use crate::singular::{Location, SingularPointRecord};
        let rec = |h: f64, w| SingularPointRecord {
            location: Location::Reduced { u: 0.0, v: 0.0 },
            rank: 1,
            wtype: w,
            branch: None,
            j: 1.0,
            h,
            degeneracy_margin: 0.0,
        };
        let hy = WilliamsonType::HyperbolicRegular;
        let el = WilliamsonType::EllipticRegular;
        let rs = [rec(1.0, hy), rec(1.0 + 1e-7, hy), rec(2.0, hy), rec(1.0, el)];
        assert_eq!(hyperbolic_groups(&rs), vec![2, 1]);
        assert!(hyperbolic_groups(&[]).is_empty());
    }
}
