//! The integrals `J`, `H`, the perturbations `gamma_1..gamma_4`, the family
//! `H_t`, its polar split `Gamma_t + t1 cos(theta2) Omega`, and derivatives.

use crate::geometry::{self, AmbientPoint, ChartPoint};
use crate::numerics::{Cx, Jet, Poly, Scalar};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamT {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl ParamT {
    pub const fn new(t1: f64, t2: f64, t3: f64, t4: f64) -> Self {
        ParamT { t1, t2, t3, t4 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t1, self.t2, self.t3, self.t4]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        ParamT::new(a[0], a[1], a[2], a[3])
    }

    /// Parses `"t1,t2,t3,t4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad parameter list {s:?}: {e}")))?;
        if v.len() != 4 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("expected 4 finite reals, got {s:?}")));
        }
        Ok(ParamT::new(v[0], v[1], v[2], v[3]))
    }
}

/// A momentum-map value `(J, H_t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub j: f64,
    pub h: f64,
}

/// Prefactors of `gamma_1..gamma_4`.
pub const GAMMA_WEIGHTS: [f64; 4] = [1.0 / 50.0, 1.0 / 50.0, 1.0 / 50.0, 1.0 / 100.0];

pub fn j_generic<T: Scalar>(z: &[Cx<T>; 8]) -> T {
    z[0].norm_sqr() * 0.5
}

pub fn h_generic<T: Scalar>(z: &[Cx<T>; 8]) -> T {
    z[2].norm_sqr() * 0.5
}

/// `gamma_k` without its prefactor.
fn gamma_raw<T: Scalar>(k: usize, z: &[Cx<T>; 8]) -> T {
    let m = |i: usize| z[i].norm_sqr();
    match k {
        1 => z[1].mul(z[2]).mul(z[3]).conj().mul(z[5].mul(z[6]).mul(z[7])).re,
        2 => (m(4) * m(3)).sq(),
        3 => (m(3) * m(6)).sq(),
        _ => (m(4) * m(6)).sq(),
    }
}

/// `H_t` with custom gamma prefactors; [`GAMMA_WEIGHTS`] gives the family proper.
pub fn ht_weighted<T: Scalar>(t: &ParamT, z: &[Cx<T>; 8], w: &[f64; 4]) -> T {
    let ts = t.as_array();
    let mut acc = h_generic(z) * (1.0 - 2.0 * t.t1);
    for k in 0..4 {
        if ts[k] != 0.0 {
            acc = acc + gamma_raw(k + 1, z) * (ts[k] * w[k]);
        }
    }
    acc
}

pub fn ht_generic<T: Scalar>(t: &ParamT, z: &[Cx<T>; 8]) -> T {
    ht_weighted(t, z, &GAMMA_WEIGHTS)
}

fn as_cx(p: &AmbientPoint) -> [Cx<f64>; 8] {
    p.z.map(|c| Cx::new(c.re, c.im))
}

pub fn eval_j(p: &AmbientPoint) -> f64 {
    p.z[0].norm_sqr() / 2.0
}

pub fn eval_h(p: &AmbientPoint) -> f64 {
    p.z[2].norm_sqr() / 2.0
}

pub fn eval_gamma(k: usize, p: &AmbientPoint) -> Result<f64> {
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidInput(format!("gamma index {k} outside 1..=4")));
    }
    Ok(GAMMA_WEIGHTS[k - 1] * gamma_raw(k, &as_cx(p)))
}

pub fn eval_ht(t: &ParamT, p: &AmbientPoint) -> f64 {
    ht_generic(t, &as_cx(p))
}

pub fn eval_ht_weighted(t: &ParamT, p: &AmbientPoint, w: &[f64; 4]) -> f64 {
    ht_weighted(t, &as_cx(p), w)
}

/// Product of the five chart-1 radicands entering `Omega`, as a function of `a = r1^2`, `b = r2^2`.
pub fn omega_radicand(a: f64, b: f64) -> f64 {
    (8.0 - b) * (2.0 + 2.0 * a - b) * (6.0 - 2.0 * a + b) * (4.0 + a - b) * (2.0 - a + b)
}

/// [`omega_radicand`] as a polynomial in `b` at fixed `a`.
pub fn omega_radicand_poly(a: f64) -> Poly {
    [(8.0, -1.0), (2.0 + 2.0 * a, -1.0), (6.0 - 2.0 * a, 1.0), (4.0 + a, -1.0), (2.0 - a, 1.0)]
        .iter()
        .fold(Poly::constant(1.0), |p, &(c0, c1)| p.mul(&Poly::linear(c0, c1)))
}

/// The amplitude `Omega(r1, r2)` of the `gamma_1` term in polar form.
pub fn gamma_bar_omega(r1: f64, r2: f64) -> Result<f64> {
    let (a, b) = (r1 * r1, r2 * r2);
    let factors = [8.0 - b, 2.0 + 2.0 * a - b, 6.0 - 2.0 * a + b, 4.0 + a - b, 2.0 - a + b];
    if factors.iter().any(|&f| f <= 0.0) {
        return Err(Error::Domain(format!("(r1, r2) = ({r1}, {r2}) outside the polar domain")));
    }
    Ok(r2 / 50.0 * omega_radicand(a, b).sqrt())
}

/// Monomials of `100 * Gamma_t` as (coefficient, t-index or 0, power of a, power of b).
const GAMMA_TERMS: [(f64, usize, i32, i32); 45] = [
    (100.0, 0, 0, 0), (50.0, 0, 0, 1), (-50.0, 0, 1, 0),
    (-200.0, 1, 0, 0), (-100.0, 1, 0, 1), (100.0, 1, 1, 0),
    (2592.0, 2, 0, 0), (864.0, 2, 0, 1), (72.0, 2, 0, 2), (-2592.0, 2, 1, 0), (-576.0, 2, 1, 1),
    (-24.0, 2, 1, 2), (936.0, 2, 2, 0), (120.0, 2, 2, 1), (2.0, 2, 2, 2), (-144.0, 2, 3, 0),
    (-8.0, 2, 3, 1), (8.0, 2, 4, 0),
    (1152.0, 3, 0, 0), (-192.0, 3, 0, 1), (-88.0, 3, 0, 2), (8.0, 3, 0, 3), (2.0, 3, 0, 4),
    (-192.0, 3, 1, 0), (304.0, 3, 1, 1), (-16.0, 3, 1, 2), (-12.0, 3, 1, 3), (-184.0, 3, 2, 0),
    (-8.0, 3, 2, 1), (26.0, 3, 2, 2), (16.0, 3, 3, 0), (-24.0, 3, 3, 1), (8.0, 3, 4, 0),
    (576.0, 4, 0, 0), (-288.0, 4, 0, 1), (36.0, 4, 0, 2), (96.0, 4, 1, 0), (24.0, 4, 1, 1),
    (-12.0, 4, 1, 2), (-44.0, 4, 2, 0), (16.0, 4, 2, 1), (1.0, 4, 2, 2), (-4.0, 4, 3, 0),
    (-2.0, 4, 3, 1), (1.0, 4, 4, 0),
];

/// `100 * Gamma_t` as a polynomial in `b = r2^2` at fixed `a = r1^2`.
pub fn gamma_cap_poly(t: &ParamT, a: f64) -> Poly {
    let tw = [1.0, t.t1, t.t2, t.t3, t.t4];
    let mut c = vec![0.0; 5];
    for &(k, ti, pa, pb) in &GAMMA_TERMS {
        c[pb as usize] += k * tw[ti] * a.powi(pa);
    }
    Poly::new(c)
}

/// `Gamma_t(r1, r2)`: the `theta2`-independent part of `H_t` in polar chart-1 coordinates.
pub fn gamma_cap(t: &ParamT, r1: f64, r2: f64) -> f64 {
    gamma_cap_poly(t, r1 * r1).eval(r2 * r2) / 100.0
}

/// `Gamma_t` recomputed from the chart: at `theta2 = pi/2` the `gamma_1` term vanishes.
pub fn gamma_cap_from_chart(t: &ParamT, r1: f64, r2: f64) -> Result<f64> {
    let p = geometry::chart_embed(1, Complex64::new(r1, 0.0), Complex64::new(0.0, r2))?;
    Ok(eval_ht(t, &p))
}

/// Maximum discrepancy between [`gamma_cap`] and [`gamma_cap_from_chart`] on a fixed grid.
pub fn gamma_cap_self_test() -> f64 {
    let ts = [
        ParamT::new(0.0, 0.0, 0.0, 0.0),
        ParamT::new(0.25, 1.0 / 3.0, 1.0 / 3.0, 1.0),
        ParamT::new(0.5, -6.0225, -4.015, -12.045),
        ParamT::new(-0.7, 0.3, 1.9, -0.4),
    ];
    let mut worst: f64 = 0.0;
    for t in &ts {
        for i in 1..30 {
            let j = 3.0 * i as f64 / 30.0;
            let (lo, hi) = geometry::reduced_slice(j).unwrap();
            for k in 1..20 {
                let b = lo.max(0.0) + (hi - lo.max(0.0)) * k as f64 / 20.0;
                let (r1, r2) = ((2.0 * j).sqrt(), b.sqrt());
                if let Ok(g) = gamma_cap_from_chart(t, r1, r2) {
                    let d = (g - gamma_cap(t, r1, r2)).abs() / (1.0 + g.abs());
                    worst = worst.max(d);
                }
            }
        }
    }
    worst
}

/// Radial derivatives of the polar split at `(r1, r2)` with `r2 > 0`:
/// `(dGamma/dr2, d2Gamma/dr2^2, dOmega/dr2, d2Omega/dr2^2)`.
pub fn polar_radial_derivs(t: &ParamT, r1: f64, r2: f64) -> Result<[f64; 4]> {
    let a = r1 * r1;
    let g = gamma_cap_poly(t, a).in_square();
    let dg = g.derivative();
    let p = omega_radicand_poly(a).in_square();
    let dp = p.derivative();
    let n1 = p.add(&dp.shift().scale(0.5));
    let pv = p.eval(r2);
    if pv <= 0.0 {
        return Err(Error::Domain(format!("(r1, r2) = ({r1}, {r2}) outside the polar domain")));
    }
    let sp = pv.sqrt();
    let o1 = n1.eval(r2) / (50.0 * sp);
    let o2 = (2.0 * n1.derivative().eval(r2) * pv - n1.eval(r2) * dp.eval(r2)) / (100.0 * pv * sp);
    Ok([dg.eval(r2) / 100.0, dg.derivative().eval(r2) / 100.0, o1, o2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    J,
    Ht,
}

/// Value, gradient and Hessian of `(u, v) -> H_t(reduced_chart_embed(j, u + iv))`.
pub fn jet2_reduced(t: &ParamT, j: f64, u: f64, v: f64) -> Result<Jet<2>> {
    jet2_reduced_weighted(t, j, u, v, &GAMMA_WEIGHTS)
}

pub fn jet2_reduced_weighted(t: &ParamT, j: f64, u: f64, v: f64, w: &[f64; 4]) -> Result<Jet<2>> {
    if !(0.0..3.0).contains(&j) {
        return Err(Error::Domain(format!("j = {j} outside [0, 3)")));
    }
    let z = Cx::real(Jet::<2>::constant((2.0 * j).sqrt()));
    let wz = Cx::new(Jet::var(u, 0), Jet::var(v, 1));
    let amb = geometry::embed_generic(1, z, wz)?;
    Ok(ht_weighted(t, &amb, w))
}

/// Exact derivatives of `f o phi_nu` with respect to `(x, y, u, v)`.
pub fn jet2_chart(t: &ParamT, nu: u8, z: Complex64, w: Complex64, f: Observable) -> Result<Jet<4>> {
    let zj = Cx::new(Jet::<4>::var(z.re, 0), Jet::var(z.im, 1));
    let wj = Cx::new(Jet::<4>::var(w.re, 2), Jet::var(w.im, 3));
    let amb = geometry::embed_generic(nu, zj, wj)?;
    Ok(match f {
        Observable::J => j_generic(&amb),
        Observable::Ht => ht_generic(t, &amb),
    })
}

/// Time-`s` flow of `J` in chart 1: rotates `z` by `e^{is}`.
pub fn flow_j(c: &ChartPoint, s: f64) -> Result<ChartPoint> {
    if c.chart != 1 {
        return Err(Error::Domain(format!(
            "flow of J is exposed on chart 1 only (got chart {})",
            c.chart
        )));
    }
    Ok(ChartPoint { z: c.z * Complex64::from_polar(1.0, s), ..*c })
}

/// `{f, g}` for the standard form `dx^dy + du^dv` from two gradients.
pub fn bracket(df: &[f64; 4], dg: &[f64; 4]) -> f64 {
    df[0] * dg[1] - df[1] * dg[0] + df[2] * dg[3] - df[3] * dg[2]
}

/// `{J, H_t}` in chart coordinates, together with the scale `|dJ| |dH_t|`.
pub fn poisson_bracket_scaled(t: &ParamT, c: &ChartPoint) -> Result<(f64, f64)> {
    let dj = jet2_chart(t, c.chart, c.z, c.w, Observable::J)?.g;
    let dh = jet2_chart(t, c.chart, c.z, c.w, Observable::Ht)?.g;
    let norm = |g: &[f64; 4]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((bracket(&dj, &dh), norm(&dj) * norm(&dh)))
}

pub fn poisson_bracket(t: &ParamT, c: &ChartPoint) -> Result<f64> {
    poisson_bracket_scaled(t, c).map(|(b, _)| b)
}
