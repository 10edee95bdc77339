//! Randomised property suite over the whole pipeline.

use crate::energies::{
    flow_j, gamma_bar_omega, gamma_cap, jet2_chart, jet2_reduced, ht_weighted, poisson_bracket_scaled, Observable,
    GAMMA_WEIGHTS,
};
use crate::fibres::{fibre_graph, max_hyperbolic_audit, reduced_level_set};
use crate::geometry::{self, ChartPoint, PolarPoint};
use crate::numerics::Cx;
use crate::singular::{find_rank_one, nonneg_det_check, WilliamsonType};
use crate::{Error, ParamT, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Deliberate perturbations used to check that the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    None,
    /// Flips the sign of the `gamma_2` weight on the chart side of the polar identity.
    Gamma2Sign,
}

impl Mutation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mutation::None),
            "gamma2-sign" => Ok(Mutation::Gamma2Sign),
            _ => Err(Error::InvalidInput(format!("unknown mutation '{s}'"))),
        }
    }

    fn weights(self) -> [f64; 4] {
        let mut w = GAMMA_WEIGHTS;
        if self == Mutation::Gamma2Sign {
            w[1] = -w[1];
        }
        w
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: usize,
    pub mutation: Mutation,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
    pub seconds: f64,
}

/// Number of random parameter draws for the hyperbolic-count bound.
pub const MAX_HYP_DRAWS: usize = 100;
/// `j` samples per draw for the hyperbolic-count bound.
pub const MAX_HYP_J_SAMPLES: usize = 24;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_t(rng: &mut ChaCha8Rng) -> ParamT {
    let mut t = ParamT::new(0.0, 0.0, 0.0, 0.0);
    while t.t1.abs() < 1e-3 || t.t3.abs() < 1e-3 {
        t = ParamT::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    }
    t
}

fn cx(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI))
}

/// A random point of chart `nu` whose radicands all exceed `margin`.
fn random_chart_point(rng: &mut ChaCha8Rng, margin: f64) -> ChartPoint {
    loop {
        let nu = rng.gen_range(1..=8u8);
        let (z, w) = (cx(rng, 3.0), cx(rng, 3.0));
        if let Ok(r) = geometry::radicands(nu, z.norm_sqr(), w.norm_sqr()) {
            if r.iter().all(|&v| v > margin) {
                return ChartPoint { chart: nu, z, w };
            }
        }
    }
}

/// A random reduced point `(j, w)` strictly inside the slice, away from its edges.
fn random_reduced(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    loop {
        let j = rng.gen_range(0.05..2.95);
        let (lo, hi) = geometry::reduced_slice(j).expect("j in range");
        let b = rng.gen_range(lo.max(0.0)..hi);
        let pad = 0.02 * (hi - lo.max(0.0));
        if b < lo + pad || b > hi - pad {
            continue;
        }
        let w = Complex64::from_polar(b.sqrt(), rng.gen_range(-PI..PI));
        return (j, w.re, w.im);
    }
}

fn collect(name: &str, tol: f64, errs: Vec<f64>) -> PropertyResult {
    let failures = errs.iter().filter(|e| !(**e <= tol)).count();
    let max_error = errs.iter().copied().fold(0.0, |m: f64, e| if e.is_nan() { f64::INFINITY } else { m.max(e) });
    PropertyResult { name: name.into(), samples: errs.len(), max_error, tolerance: tol, failures, passed: failures == 0 }
}

fn par_samples<F>(seed: u64, stream: u64, n: usize, f: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, stream);
            rng.set_word_pos(i as u128 * 4096);
            f(&mut rng)
        })
        .collect()
}

fn manifold_residuals(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 1, n, |rng| {
        let c = random_chart_point(rng, 1e-6);
        let p = geometry::chart_embed(c.chart, c.z, c.w).expect("inside chart");
        geometry::manifold_residual(&p).iter().fold(0.0, |m: f64, r| m.max(r.abs()))
    });
    collect("manifold-residual", 1e-10, errs)
}

fn brackets(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 2, n, |rng| {
        let t = random_t(rng);
        let c = random_chart_point(rng, 1e-3);
        match poisson_bracket_scaled(&t, &c) {
            Ok((b, s)) => b.abs() / (1.0 + s),
            Err(_) => f64::NAN,
        }
    });
    collect("poisson-bracket", 1e-10, errs)
}

fn polar_identity(seed: u64, n: usize, m: Mutation) -> PropertyResult {
    let w = m.weights();
    let errs = par_samples(seed, 3, n, |rng| {
        let t = random_t(rng);
        let (j, u, v) = random_reduced(rng);
        let (r1, r2) = ((2.0 * j).sqrt(), u.hypot(v));
        let p = PolarPoint { r1, r2, theta1: rng.gen_range(-PI..PI), theta2: v.atan2(u) };
        let c = geometry::polar_to_chart(&p);
        let Ok(amb) = geometry::embed_generic::<f64>(1, Cx::new(c.z.re, c.z.im), Cx::new(c.w.re, c.w.im)) else {
            return f64::NAN;
        };
        let lhs = ht_weighted(&t, &amb, &w);
        let Ok(om) = gamma_bar_omega(r1, r2) else { return f64::NAN };
        let rhs = gamma_cap(&t, r1, r2) + t.t1 * p.theta2.cos() * om;
        (lhs - rhs).abs() / (1.0 + rhs.abs())
    });
    collect("polar-identity", 1e-10, errs)
}

fn jets_vs_differences(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 4, n, |rng| {
        let t = random_t(rng);
        let (j, u, v) = random_reduced(rng);
        let d = 1e-5;
        let f = |u: f64, v: f64| jet2_reduced(&t, j, u, v).map(|x| x.v);
        let g = |u: f64, v: f64| jet2_reduced(&t, j, u, v).map(|x| x.g);
        let run = || -> Result<f64> {
            let jet = jet2_reduced(&t, j, u, v)?;
            let fd_g = [
                (f(u + d, v)? - f(u - d, v)?) / (2.0 * d),
                (f(u, v + d)? - f(u, v - d)?) / (2.0 * d),
            ];
            let (gu_p, gu_m, gv_p, gv_m) = (g(u + d, v)?, g(u - d, v)?, g(u, v + d)?, g(u, v - d)?);
            let fd_h = [
                [(gu_p[0] - gu_m[0]) / (2.0 * d), (gv_p[0] - gv_m[0]) / (2.0 * d)],
                [(gu_p[1] - gu_m[1]) / (2.0 * d), (gv_p[1] - gv_m[1]) / (2.0 * d)],
            ];
            let scale_g = 1.0 + jet.g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let scale_h = 1.0 + jet.h.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            let mut e: f64 = 0.0;
            for k in 0..2 {
                e = e.max((jet.g[k] - fd_g[k]).abs() / scale_g);
                for l in 0..2 {
                    e = e.max((jet.h[k][l] - fd_h[k][l]).abs() / scale_h);
                }
            }
            // Four-variable chart jets on chart 1.
            let c = ChartPoint { chart: 1, z: Complex64::new((2.0 * j).sqrt(), 0.0), w: Complex64::new(u, v) };
            let j4 = jet2_chart(&t, 1, c.z, c.w, Observable::Ht)?;
            let d4 = |k: usize, s: f64| -> Result<f64> {
                let mut x = [c.z.re, c.z.im, c.w.re, c.w.im];
                x[k] += s;
                Ok(jet2_chart(&t, 1, Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]), Observable::Ht)?.v)
            };
            let s4 = 1.0 + j4.g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for k in 0..4 {
                e = e.max(((d4(k, d)? - d4(k, -d)?) / (2.0 * d) - j4.g[k]).abs() / s4);
            }
            Ok(e)
        };
        run().unwrap_or(f64::NAN)
    });
    collect("jets-vs-differences", 1e-6, errs)
}

fn flow_period(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 5, n, |rng| {
        let mut c = random_chart_point(rng, 1e-6);
        c.chart = 1;
        if !geometry::chart_contains(1, c.z, c.w) {
            c = ChartPoint { chart: 1, z: Complex64::new(2.0, 0.0), w: cx(rng, 1.0) };
        }
        match flow_j(&c, 2.0 * PI) {
            Ok(e) => (e.z - c.z).norm().max((e.w - c.w).norm()),
            Err(_) => f64::NAN,
        }
    });
    collect("flow-period", 1e-12, errs)
}

fn nonneg_dets(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 6, n, |rng| {
        let t = random_t(rng);
        let a: f64 = rng.gen_range(-PI..PI);
        match nonneg_det_check(&t, a.cos(), a.sin()) {
            // Report how far below zero the smallest determinant falls.
            Ok(d) => d.iter().fold(0.0f64, |m, &x| m.max(-x)),
            Err(_) => f64::NAN,
        }
    });
    collect("nonneg-det", 1e-9, errs)
}

/// Euler identity, two edges per vertex on closed hyperbolic fibres, and one singular point per face.
fn fibre_audits(seed: u64, n: usize) -> PropertyResult {
    let errs = par_samples(seed, 7, n, |rng| {
        let t = random_t(rng);
        let j = rng.gen_range(0.05..2.95);
        let Ok(recs) = find_rank_one(&t, j) else { return f64::NAN };
        let hyp: Vec<f64> = recs.iter().filter(|r| r.wtype == WilliamsonType::HyperbolicRegular).map(|r| r.h).collect();
        let h = if !hyp.is_empty() && rng.gen_bool(0.5) {
            hyp[rng.gen_range(0..hyp.len())]
        } else {
            let hs: Vec<f64> = recs.iter().map(|r| r.h).collect();
            let (lo, hi) = hs.iter().fold((-5.0f64, 5.0f64), |(a, b), &h| (a.min(h), b.max(h)));
            rng.gen_range(lo - 1.0..hi + 1.0)
        };
        let run = || -> Result<f64> {
            let f = reduced_level_set(&t, j, h, 16)?;
            let g = fibre_graph(&f)?;
            let closed = g.components.iter().all(|c| !c.open);
            let mut bad = g.euler_defect().unsigned_abs() as f64;
            if closed && !g.edges_match_vertices() {
                bad += 1.0;
            }
            if g.arm_ends.iter().any(|&a| a != 4) || !g.corner_points.is_empty() {
                bad += 1.0;
            }
            if !f.through_missed && g.faces_with_singular != g.faces {
                bad += 1.0;
            }
            Ok(bad)
        };
        run().unwrap_or(f64::NAN)
    });
    collect("fibre-graph-audit", 0.0, errs)
}

fn hyperbolic_bound(seed: u64) -> PropertyResult {
    let errs = par_samples(seed, 8, MAX_HYP_DRAWS, |rng| {
        let t = random_t(rng);
        match max_hyperbolic_audit(&t, MAX_HYP_J_SAMPLES) {
            Ok(k) => k as f64,
            Err(_) => f64::NAN,
        }
    });
    collect("max-hyperbolic-per-fibre", 12.0, errs)
}

/// Runs all properties with `samples` random draws each (the hyperbolic bound uses a fixed 100).
pub fn run_suite(seed: u64, samples: usize, mutation: Mutation) -> Result<SuiteReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let start = Instant::now();
    let properties = vec![
        manifold_residuals(seed, samples),
        brackets(seed, samples),
        polar_identity(seed, samples, mutation),
        jets_vs_differences(seed, samples),
        flow_period(seed, samples),
        nonneg_dets(seed, samples),
        fibre_audits(seed, samples),
        hyperbolic_bound(seed),
    ];
    let passed = properties.iter().all(|p| p.passed);
    Ok(SuiteReport { seed, samples, mutation, properties, passed, seconds: start.elapsed().as_secs_f64() })
}
