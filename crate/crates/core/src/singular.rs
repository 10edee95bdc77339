//! Location and Williamson typing of singular points.

use crate::energies::{self, jet2_chart, jet2_reduced, polar_radial_derivs, Observable, ParamT};
use crate::geometry::{self, InvariantPoint};
use crate::numerics::{degeneracy_poly, eigen4, rank_one_poly, real_roots, Cx, Jet};
use crate::{Error, Result};
use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Determinant-sign floor for rank-one typing, relative to `1 + max|Hessian|`.
pub const EPS_CLS: f64 = 1e-8;
/// Eigenvalue-collision floor for rank-zero typing, relative to the spectral radius.
pub const EPS_EIG: f64 = 1e-7;
/// Reduced-gradient bound for emitted rank-one records (relaxed to a Newton-step
/// bound where the Hessian blows up near the chart edge).
pub const GRAD_TOL: f64 = 1e-8;
/// Relative residual of the branch condition `Gamma' + sign t1 Omega' = 0` at a polynomial root.
pub const BRANCH_TOL: f64 = 1e-3;
/// Squared radius margin keeping rank-one roots off the chart boundary.
pub const ROOT_MARGIN: f64 = 1e-9;
/// Seed for the generic `(c1, c2)` draws used in rank-zero typing.
pub const DRAW_SEED: u64 = 0x0c7a_9011;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WilliamsonType {
    EllipticElliptic,
    FocusFocus,
    EllipticHyperbolic,
    HyperbolicHyperbolic,
    EllipticRegular,
    HyperbolicRegular,
    Degenerate,
    Unclassified,
}

impl WilliamsonType {
    pub fn label(self) -> &'static str {
        match self {
            Self::EllipticElliptic => "elliptic-elliptic",
            Self::FocusFocus => "focus-focus",
            Self::EllipticHyperbolic => "elliptic-hyperbolic",
            Self::HyperbolicHyperbolic => "hyperbolic-hyperbolic",
            Self::EllipticRegular => "elliptic-regular",
            Self::HyperbolicRegular => "hyperbolic-regular",
            Self::Degenerate => "degenerate",
            Self::Unclassified => "unclassified",
        }
    }
}

/// Angle of `w` at a rank-one point: `theta2 = 0` for `u > 0`, `pi` for `u < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    #[serde(rename = "theta2=0")]
    Zero,
    #[serde(rename = "theta2=pi")]
    Pi,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Zero => 1.0,
            Branch::Pi => -1.0,
        }
    }
    pub fn label(self) -> &'static str {
        match self {
            Branch::Zero => "theta2=0",
            Branch::Pi => "theta2=pi",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    /// Reduced chart-1 coordinates `w = u + iv` at the record's `j`.
    Reduced { u: f64, v: f64 },
    Invariant(InvariantPoint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPointRecord {
    pub location: Location,
    pub rank: u8,
    pub wtype: WilliamsonType,
    pub branch: Option<Branch>,
    pub j: f64,
    pub h: f64,
    /// Distance of the classifying quantity from its degeneracy threshold.
    pub degeneracy_margin: f64,
}

impl SingularPointRecord {
    /// Position in the reduced chart; invariant points map to `None`.
    pub fn uv(&self) -> Option<(f64, f64)> {
        match self.location {
            Location::Reduced { u, v } => Some((u, v)),
            Location::Invariant(_) => None,
        }
    }

    pub fn u(&self) -> Option<f64> {
        self.uv().map(|p| p.0)
    }
}

/// The four invariant rank-zero points with their `(J, H_t)` values; types unset.
pub fn invariant_points(t: &ParamT) -> Vec<SingularPointRecord> {
    InvariantPoint::ALL
        .iter()
        .map(|&ip| {
            let p = ip.ambient();
            SingularPointRecord {
                location: Location::Invariant(ip),
                rank: 0,
                wtype: WilliamsonType::Unclassified,
                branch: None,
                j: energies::eval_j(&p),
                h: energies::eval_ht(t, &p),
                degeneracy_margin: 0.0,
            }
        })
        .collect()
}

fn check_j(j: f64) -> Result<()> {
    if j > 0.0 && j < 3.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("j = {j} must lie in (0, 3)")))
    }
}

fn hessian_type(jet: &Jet<2>) -> (WilliamsonType, f64) {
    let hs = jet.h;
    let det = hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0];
    let hmax = hs.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = EPS_CLS * (1.0 + hmax);
    let wt = if det < -eps {
        WilliamsonType::HyperbolicRegular
    } else if det > eps {
        WilliamsonType::EllipticRegular
    } else {
        WilliamsonType::Degenerate
    };
    (wt, (det.abs() - eps).max(0.0))
}

/// Reduced Hessian at a critical point `(u, 0)` with the transverse entry in
/// closed form: `d2/dv2 = H_r / r + H_thth / r^2` and `H_r = 0`, leaving
/// `-sign(u) t1 Omega / r^2`. The dropped term cancels catastrophically near the chart edge.
fn axis_hessian(t: &ParamT, j: f64, u: f64, jet: &Jet<2>) -> Result<Jet<2>> {
    let r = u.abs();
    let om = energies::gamma_bar_omega((2.0 * j).sqrt(), r)?;
    let mut out = *jet;
    out.h[0][1] = 0.0;
    out.h[1][0] = 0.0;
    out.h[1][1] = -u.signum() * t.t1 * om / (r * r);
    Ok(out)
}

/// Types the rank-one point `(u, 0)` from the sign of the reduced Hessian determinant.
pub fn classify_rank_one(t: &ParamT, j: f64, u: f64) -> Result<(WilliamsonType, f64)> {
    let jet = jet2_reduced(t, j, u, 0.0)?;
    let g = jet.g[0].hypot(jet.g[1]);
    if g > 1e-6 {
        return Err(Error::NotSingular(g));
    }
    Ok(hessian_type(&axis_hessian(t, j, u, &jet)?))
}

/// All rank-one singular points of `(J, H_t)` on the reduced level `j`, sorted by `u`.
pub fn find_rank_one(t: &ParamT, j: f64) -> Result<Vec<SingularPointRecord>> {
    check_j(j)?;
    let r1 = (2.0 * j).sqrt();
    let poly = rank_one_poly(t, r1)?;
    let (lo, hi) = geometry::reduced_slice(j)?;
    let slo = lo.max(0.0);
    let mut cands: Vec<(f64, Branch, bool)> = Vec::new();
    for root in real_roots(&poly, slo, hi)? {
        let s = root.x;
        let rads = geometry::radicands(1, r1 * r1, s)?;
        if s <= ROOT_MARGIN || rads.iter().any(|&r| r <= ROOT_MARGIN) {
            continue;
        }
        let r2 = s.sqrt();
        let [g1, _, o1, _] = polar_radial_derivs(t, r1, r2)?;
        let scale = g1.abs() + (t.t1 * o1).abs() + 1.0;
        for br in [Branch::Zero, Branch::Pi] {
            let res = (g1 + br.sign() * t.t1 * o1).abs() / scale;
            if res < BRANCH_TOL {
                cands.push((br.sign() * r2, br, res < 1e-6));
            }
        }
    }

    let mut out: Vec<SingularPointRecord> = Vec::new();
    for (u0, br, strict) in cands {
        // Loose candidates (near-tangencies, roots hugging the chart edge) must polish.
        let (u, jet) = match polish(t, j, u0) {
            Ok(x) => x,
            Err(_) if !strict => continue,
            Err(e) => return Err(e),
        };
        if u.signum() != br.sign() {
            continue;
        }
        if out.iter().any(|r| (r.u().unwrap() - u).abs() < 1e-7) {
            continue;
        }
        let (wtype, margin) = hessian_type(&axis_hessian(t, j, u, &jet)?);
        out.push(SingularPointRecord {
            location: Location::Reduced { u, v: 0.0 },
            rank: 1,
            wtype,
            branch: Some(br),
            j,
            h: jet.v,
            degeneracy_margin: margin,
        });
    }
    out.sort_by(|a, b| a.u().unwrap().total_cmp(&b.u().unwrap()));
    Ok(out)
}

/// Gradient below [`GRAD_TOL`], or, where the Hessian is large near the chart
/// edge, a Newton step below `1e-12 (1 + |u|)`.
fn converged(u: f64, jet: &Jet<2>) -> bool {
    let g = jet.g[0].hypot(jet.g[1]);
    g < GRAD_TOL || (jet.h[0][0] != 0.0 && g / jet.h[0][0].abs() < 1e-12 * (1.0 + u.abs()))
}

/// Refines a polynomial root to a zero of `d/du H^red(u, 0)`: Newton inside a
/// `1e-5` window, else bisection on a sign change bracketed within `1e-3`.
fn polish(t: &ParamT, j: f64, u0: f64) -> Result<(f64, Jet<2>)> {
    let jet_at = |u: f64| jet2_reduced(t, j, u, 0.0);
    let mut u = u0;
    let mut best: Option<(f64, Jet<2>)> = None;
    for _ in 0..30 {
        let Ok(jet) = jet_at(u) else { break };
        if best.as_ref().map_or(true, |(_, b)| jet.g[0].abs() < b.g[0].abs()) {
            best = Some((u, jet));
        }
        if jet.g[0].abs() < 1e-14 || jet.h[0][0] == 0.0 {
            break;
        }
        let next = u - jet.g[0] / jet.h[0][0];
        if (next - u0).abs() > 1e-5 * (1.0 + u0.abs()) {
            break;
        }
        u = next;
    }
    if let Some((u, jet)) = best.as_ref() {
        if converged(*u, jet) {
            return Ok((*u, *jet));
        }
    }
    let scale = 1.0 + u0.abs();
    let g0 = jet_at(u0).map(|x| x.g[0]).ok();
    let mut step = 1e-8 * scale;
    while step <= 1e-3 * scale {
        for (a, b) in [(u0 - step, u0), (u0, u0 + step)] {
            let (Ok(ja), Ok(jb)) = (jet_at(a), jet_at(b)) else { continue };
            let (ga, gb) = (if a == u0 { g0.unwrap_or(ja.g[0]) } else { ja.g[0] }, jb.g[0]);
            if ga == 0.0 {
                return Ok((a, ja));
            }
            if (ga < 0.0) != (gb < 0.0) {
                let (mut lo, mut hi, glo) = (a, b, ga);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let gm = jet_at(mid)?.g[0];
                    if (gm < 0.0) == (glo < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let um = 0.5 * (lo + hi);
                return Ok((um, jet_at(um)?));
            }
        }
        step *= 2.0;
    }
    match best {
        Some((_, jet)) => Err(Error::NoConvergence(format!(
            "rank-one point near u = {u0} (j = {j}): residual gradient {:e}",
            jet.g[0].abs()
        ))),
        None => Err(Error::NoConvergence(format!("rank-one point near u = {u0} (j = {j}) left the chart"))),
    }
}

const OMEGA_INV: [[f64; 4]; 4] = [
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
];

fn to_matrix(h: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, k| h[i][k])
}

/// Hessians of `J` and `H_t` at an invariant point, in the chart where it is the origin.
pub fn rank_zero_hessians(t: &ParamT, ip: InvariantPoint) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    let o = Complex64::new(0.0, 0.0);
    let hj = jet2_chart(t, ip.chart(), o, o, Observable::J)?;
    let hh = jet2_chart(t, ip.chart(), o, o, Observable::Ht)?;
    Ok((to_matrix(&hj.h), to_matrix(&hh.h)))
}

/// `omega^{-1} (c1 d2J + c2 d2H_t)` at an invariant point.
pub fn rank_zero_operator(t: &ParamT, ip: InvariantPoint, c1: f64, c2: f64) -> Result<Matrix4<f64>> {
    let (hj, hh) = rank_zero_hessians(t, ip)?;
    Ok(to_matrix(&OMEGA_INV) * (hj * c1 + hh * c2))
}

/// Williamson type read off four eigenvalues, with the relative collision margin.
pub fn type_from_eigenvalues(ev: &[Complex64; 4]) -> (WilliamsonType, f64) {
    let rho = ev.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if rho == 0.0 {
        return (WilliamsonType::Degenerate, 0.0);
    }
    let eps = EPS_EIG * rho;
    let mut gap = f64::INFINITY;
    for i in 0..4 {
        for k in i + 1..4 {
            gap = gap.min((ev[i] - ev[k]).norm());
        }
    }
    let margin = gap / rho;
    if gap <= eps {
        return (WilliamsonType::Degenerate, margin);
    }
    let (mut ni, mut nr, mut nc) = (0, 0, 0);
    for z in ev {
        if z.re.abs() <= eps {
            ni += 1;
        } else if z.im.abs() <= eps {
            nr += 1;
        } else {
            nc += 1;
        }
    }
    let wt = match (ni, nr, nc) {
        (4, 0, 0) => WilliamsonType::EllipticElliptic,
        (0, 0, 4) => WilliamsonType::FocusFocus,
        (2, 2, 0) => WilliamsonType::EllipticHyperbolic,
        (0, 4, 0) => WilliamsonType::HyperbolicHyperbolic,
        _ => WilliamsonType::Degenerate,
    };
    (wt, margin)
}

/// Fixed-seed generic coefficient pairs on the unit circle with `|c2| >= 0.1`.
pub fn generic_draws(n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(DRAW_SEED);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (c1, c2) = (a.cos(), a.sin());
        if c2.abs() >= 0.1 {
            out.push((c1, c2));
        }
    }
    out
}

/// Rank-zero type and margin agreed across `c_draws` generic draws.
pub fn classify_rank_zero_detailed(t: &ParamT, ip: InvariantPoint, c_draws: usize) -> Result<(WilliamsonType, f64)> {
    let (hj, hh) = rank_zero_hessians(t, ip)?;
    let oi = to_matrix(&OMEGA_INV);
    let mut agreed: Option<WilliamsonType> = None;
    let mut margin = f64::INFINITY;
    for (c1, c2) in generic_draws(c_draws.max(1)) {
        let ev = eigen4(&(oi * (hj * c1 + hh * c2)))?;
        let (wt, m) = type_from_eigenvalues(&ev);
        margin = margin.min(m);
        match agreed {
            None => agreed = Some(wt),
            Some(prev) if prev != wt => return Ok((WilliamsonType::Degenerate, 0.0)),
            _ => {}
        }
    }
    Ok((agreed.unwrap_or(WilliamsonType::Degenerate), margin))
}

pub fn classify_rank_zero(t: &ParamT, ip: InvariantPoint, c_draws: usize) -> WilliamsonType {
    classify_rank_zero_detailed(t, ip, c_draws)
        .map(|x| x.0)
        .unwrap_or(WilliamsonType::Degenerate)
}

/// Invariant points typed under `t` using three generic draws.
pub fn classified_invariant_points(t: &ParamT) -> Result<Vec<SingularPointRecord>> {
    let mut pts = invariant_points(t);
    for r in pts.iter_mut() {
        if let Location::Invariant(ip) = r.location {
            let (wt, m) = classify_rank_zero_detailed(t, ip, 3)?;
            r.wtype = wt;
            r.degeneracy_margin = m;
        }
    }
    Ok(pts)
}

/// `det(omega^{-1}(c1 d2J + c2 d2H_t))` at the four invariant points.
pub fn nonneg_det_check(t: &ParamT, c1: f64, c2: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, ip) in InvariantPoint::ALL.iter().enumerate() {
        out[k] = rank_zero_operator(t, *ip, c1, c2)?.determinant();
    }
    Ok(out)
}

/// `h(x, u) = H_t(phi_1(x, u))` for real `x, u`, with jets in `(x, u)`.
fn axis_jet(t: &ParamT, x: f64, u: f64) -> Result<Jet<2>> {
    let z = Cx::real(Jet::<2>::var(x, 0));
    let w = Cx::real(Jet::<2>::var(u, 1));
    let amb = geometry::embed_generic(1, z, w)?;
    Ok(energies::ht_generic(t, &amb))
}

/// Refines a cusp: solves `h_u = h_uu = 0` in `(j, u)` from a nearby start.
pub fn cusp_refine(t: &ParamT, j0: f64, u0: f64) -> Result<(f64, f64)> {
    let mut x = (2.0 * j0).sqrt();
    let mut u = u0;
    let d = 1e-6;
    for _ in 0..60 {
        let c = axis_jet(t, x, u)?;
        let (f, g) = (c.g[1], c.h[1][1]);
        if f.abs() < 1e-12 && g.abs() < 1e-10 {
            return Ok((x * x / 2.0, u));
        }
        let gx = (axis_jet(t, x + d, u)?.h[1][1] - axis_jet(t, x - d, u)?.h[1][1]) / (2.0 * d);
        let gu = (axis_jet(t, x, u + d)?.h[1][1] - axis_jet(t, x, u - d)?.h[1][1]) / (2.0 * d);
        let (fx, fu) = (c.h[0][1], c.h[1][1]);
        let det = fx * gu - fu * gx;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f * gu - fu * g) / det;
        let du = (fx * g - f * gx) / det;
        x -= dx;
        u -= du;
        if !(x.is_finite() && u.is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence(format!("cusp refinement from j = {j0}, u = {u0}")))
}

/// Parabolic candidates on level `j`: `u`-values where both the rank-one and the
/// degeneracy condition hold on a common branch, refined to the exact cusp and
/// accepted when the cusp lies within `1e-4` of `j`.
pub fn degenerate_rank_one_locus(t: &ParamT, j: f64) -> Result<Vec<f64>> {
    check_j(j)?;
    let r1 = (2.0 * j).sqrt();
    let poly = degeneracy_poly(t, r1)?;
    let (lo, hi) = geometry::reduced_slice(j)?;
    let mut out: Vec<f64> = Vec::new();
    for root in real_roots(&poly, lo.max(0.0), hi)? {
        let s = root.x;
        let rads = geometry::radicands(1, r1 * r1, s)?;
        if s <= ROOT_MARGIN || rads.iter().any(|&r| r <= ROOT_MARGIN) {
            continue;
        }
        let r2 = s.sqrt();
        let [_, g2, _, o2] = polar_radial_derivs(t, r1, r2)?;
        let scale = g2.abs() + (t.t1 * o2).abs() + 1.0;
        for sg in [1.0, -1.0] {
            if (g2 + sg * t.t1 * o2).abs() >= 1e-6 * scale {
                continue;
            }
            if let Ok((js, us)) = cusp_refine(t, j, sg * r2) {
                if (js - j).abs() < 1e-4 && !out.iter().any(|&v| (v - us).abs() < 1e-6) {
                    out.push(us);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
