//! Charts of the octagon manifold, the manifold equations and polar coordinates.

use crate::numerics::{Cx, Scalar};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Radicands at or below this value count as outside a chart.
pub const EPS_DOM: f64 = 1e-12;

/// A point of the level set of the defining moment map, as 8 complex numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientPoint {
    pub z: [Complex64; 8],
}

impl AmbientPoint {
    pub fn from_real(x: [f64; 8]) -> Self {
        AmbientPoint { z: x.map(|v| Complex64::new(v, 0.0)) }
    }

    pub fn moduli_sq(&self) -> [f64; 8] {
        self.z.map(|c| c.norm_sqr())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub chart: u8,
    pub z: Complex64,
    pub w: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// `|z_k|^2` for the six dependent slots of chart `nu` as `c0 + cx*|z|^2 + cu*|w|^2`.
/// Chart `nu` uses `z_nu` and `z_{nu+1}` (cyclically) as free coordinates.
const CHART_TABLE: [[(usize, f64, f64, f64); 6]; 8] = [
    [(2, 2., -1., 1.), (3, 6., -2., 1.), (4, 6., -1., 0.), (5, 8., 0., -1.), (6, 4., 1., -1.), (7, 2., 2., -1.)],
    [(0, 2., 1., -1.), (3, 2., -1., 2.), (4, 4., -1., 1.), (5, 8., -1., 0.), (6, 6., 0., -1.), (7, 6., 1., -2.)],
    [(0, 4., 1., -1.), (1, 2., 2., -1.), (4, 2., -1., 1.), (5, 6., -2., 1.), (6, 6., -1., 0.), (7, 8., 0., -1.)],
    [(0, 6., 0., -1.), (1, 6., 1., -2.), (2, 2., 1., -1.), (5, 2., -1., 2.), (6, 4., -1., 1.), (7, 8., -1., 0.)],
    [(0, 6., -1., 0.), (1, 8., 0., -1.), (2, 4., 1., -1.), (3, 2., 2., -1.), (6, 2., -1., 1.), (7, 6., -2., 1.)],
    [(0, 4., -1., 1.), (1, 8., -1., 0.), (2, 6., 0., -1.), (3, 6., 1., -2.), (4, 2., 1., -1.), (7, 2., -1., 2.)],
    [(0, 2., -1., 1.), (1, 6., -2., 1.), (2, 6., -1., 0.), (3, 8., 0., -1.), (4, 4., 1., -1.), (5, 2., 2., -1.)],
    [(1, 2., -1., 2.), (2, 4., -1., 1.), (3, 8., -1., 0.), (4, 6., 0., -1.), (5, 6., 1., -2.), (6, 2., 1., -1.)],
];

fn check_chart(nu: u8) -> Result<usize> {
    if (1..=8).contains(&nu) {
        Ok(nu as usize - 1)
    } else {
        Err(Error::Domain(format!("chart index {nu} outside 1..=8")))
    }
}

/// The six manifold-equation residuals, zero exactly on the manifold.
pub fn manifold_residual(p: &AmbientPoint) -> [f64; 6] {
    let m = p.moduli_sq();
    [
        m[0] + m[4] - 6.0,
        m[1] + m[4] + m[6] - 10.0,
        m[2] + m[6] - 6.0,
        m[3] - m[4] + m[6] - 4.0,
        m[4] - m[5] + m[6] - 2.0,
        m[4] - m[6] + m[7] - 4.0,
    ]
}

/// The six radicands of chart `nu` at `|z|^2 = x`, `|w|^2 = u`.
pub fn radicands(nu: u8, x: f64, u: f64) -> Result<[f64; 6]> {
    let k = check_chart(nu)?;
    Ok(CHART_TABLE[k].map(|(_, c0, cx, cu)| c0 + cx * x + cu * u))
}

/// Chart embedding over any [`Scalar`]; real slots are positive square roots.
pub fn embed_generic<T: Scalar>(nu: u8, z: Cx<T>, w: Cx<T>) -> Result<[Cx<T>; 8]> {
    let k = check_chart(nu)?;
    let x = z.norm_sqr();
    let u = w.norm_sqr();
    let zero = Cx::real(T::cst(0.0));
    let mut out = [zero; 8];
    out[k] = z;
    out[(k + 1) % 8] = w;
    for &(slot, c0, cx, cu) in &CHART_TABLE[k] {
        let r = x * cx + u * cu + c0;
        if r.val() <= EPS_DOM {
            return Err(Error::Domain(format!(
                "chart {nu}: radicand for z{} is {:e}",
                slot + 1,
                r.val()
            )));
        }
        out[slot] = Cx::real(r.sqrt());
    }
    Ok(out)
}

pub fn chart_embed(nu: u8, z: Complex64, w: Complex64) -> Result<AmbientPoint> {
    let c = embed_generic::<f64>(nu, Cx::new(z.re, z.im), Cx::new(w.re, w.im))?;
    Ok(AmbientPoint { z: c.map(|c| Complex64::new(c.re, c.im)) })
}

pub fn chart_contains(nu: u8, z: Complex64, w: Complex64) -> bool {
    radicands(nu, z.norm_sqr(), w.norm_sqr())
        .map(|r| r.iter().all(|&v| v > EPS_DOM))
        .unwrap_or(false)
}

pub fn polar_to_chart(p: &PolarPoint) -> ChartPoint {
    ChartPoint {
        chart: 1,
        z: Complex64::from_polar(p.r1, p.theta1),
        w: Complex64::from_polar(p.r2, p.theta2),
    }
}

/// Inverse of [`polar_to_chart`]. Angles lie in `(-pi, pi]`.
pub fn chart_to_polar(c: &ChartPoint) -> Result<PolarPoint> {
    if c.chart != 1 {
        return Err(Error::Domain(format!("polar coordinates need chart 1, got {}", c.chart)));
    }
    if c.z.norm() == 0.0 || c.w.norm() == 0.0 {
        return Err(Error::AngleUndefined);
    }
    let ang = |a: f64| if a <= -PI { a + 2.0 * PI } else { a };
    Ok(PolarPoint { r1: c.z.norm(), r2: c.w.norm(), theta1: ang(c.z.arg()), theta2: ang(c.w.arg()) })
}

/// Reduced chart at level `j`: `z1 = sqrt(2j)` real, `z2 = w`.
pub fn reduced_chart_embed(j: f64, w: Complex64) -> Result<AmbientPoint> {
    if !(0.0..3.0).contains(&j) {
        return Err(Error::Domain(format!("j = {j} outside [0, 3)")));
    }
    chart_embed(1, Complex64::new((2.0 * j).sqrt(), 0.0), w)
}

/// Open interval of `|w|^2` for which `(sqrt(2j), w)` lies in chart 1.
/// A negative lower end means the origin `w = 0` is inside the chart.
pub fn reduced_slice(j: f64) -> Result<(f64, f64)> {
    let a = 2.0 * j;
    if !(0.0..6.0).contains(&a) {
        return Err(Error::Domain(format!("j = {j} outside [0, 3)")));
    }
    let lo = (a - 2.0).max(2.0 * a - 6.0);
    let hi = 8.0_f64.min(4.0 + a).min(2.0 + 2.0 * a);
    Ok((lo, hi))
}

/// The four rank-zero points whose coordinates do not depend on `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantPoint {
    P2,
    P3,
    P6,
    P7,
}

impl InvariantPoint {
    pub const ALL: [InvariantPoint; 4] = [Self::P2, Self::P3, Self::P6, Self::P7];

    /// Chart in which the point is the origin.
    pub fn chart(self) -> u8 {
        match self {
            Self::P2 => 2,
            Self::P3 => 3,
            Self::P6 => 6,
            Self::P7 => 7,
        }
    }

    pub fn ambient(self) -> AmbientPoint {
        let s2 = 2f64.sqrt();
        let s6 = 6f64.sqrt();
        let s8 = 8f64.sqrt();
        AmbientPoint::from_real(match self {
            Self::P2 => [s2, 0., 0., s2, 2., s8, s6, s6],
            Self::P3 => [2., s2, 0., 0., s2, s6, s6, s8],
            Self::P6 => [2., s8, s6, s6, s2, 0., 0., s2],
            Self::P7 => [s2, s6, s6, s8, 2., s2, 0., 0.],
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::P2 => "phi2(0,0)",
            Self::P3 => "phi3(0,0)",
            Self::P6 => "phi6(0,0)",
            Self::P7 => "phi7(0,0)",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p2" | "phi2" | "2" => Some(Self::P2),
            "p3" | "phi3" | "3" => Some(Self::P3),
            "p6" | "phi6" | "6" => Some(Self::P6),
            "p7" | "phi7" | "7" => Some(Self::P7),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn residual_examples() {
        let p = chart_embed(1, c(0.), c(0.)).unwrap();
        assert!(manifold_residual(&p).iter().all(|r| r.abs() < 1e-14));
        let ones = AmbientPoint::from_real([1.0; 8]);
        assert_eq!(manifold_residual(&ones), [-4., -7., -4., -3., -1., -3.]);
    }

    #[test]
    fn embed_examples() {
        let s = f64::sqrt;
        let p = chart_embed(1, c(0.), c(0.)).unwrap();
        let want = [0., 0., s(2.), s(6.), s(6.), s(8.), 2., s(2.)];
        for k in 0..8 {
            assert!((p.z[k].re - want[k]).abs() < 1e-15);
        }
        let p = chart_embed(1, c(1.), c(1.)).unwrap();
        let want = [1., 1., s(2.), s(5.), s(5.), s(7.), 2., s(3.)];
        for k in 0..8 {
            assert!((p.z[k].re - want[k]).abs() < 1e-15);
        }
        for ip in InvariantPoint::ALL {
            let p = chart_embed(ip.chart(), c(0.), c(0.)).unwrap();
            let q = ip.ambient();
            for k in 0..8 {
                assert!((p.z[k] - q.z[k]).norm() < 1e-15, "{ip:?} slot {k}");
            }
            assert!(manifold_residual(&q).iter().all(|r| r.abs() < 1e-14));
        }
    }

    #[test]
    fn containment() {
        assert!(chart_contains(1, c(0.), c(0.)));
        assert!(!chart_contains(1, c(6f64.sqrt()), c(0.)));
        assert!(chart_contains(1, c(2.), c(2.)));
        assert!(!chart_contains(1, c(2.), c(1.4)));
        assert!(chart_embed(1, c(2.), c(1.4)).is_err());
        let (lo, hi) = reduced_slice(2.0).unwrap();
        assert_eq!((lo, hi), (2.0, 8.0));
    }

    #[test]
    fn polar_examples() {
        let cp = polar_to_chart(&PolarPoint { r1: 2.0, r2: 1.48116, theta1: 0.0, theta2: 0.0 });
        assert_eq!((cp.z, cp.w), (c(2.0), c(1.48116)));
        let p = chart_to_polar(&ChartPoint { chart: 1, z: c(-1.66216), w: c(1.0) }).unwrap();
        assert!((p.r1 - 1.66216).abs() < 1e-15 && (p.theta1 - PI).abs() < 1e-15);
        assert_eq!(
            chart_to_polar(&ChartPoint { chart: 1, z: c(0.0), w: c(1.0) }),
            Err(Error::AngleUndefined)
        );
    }

    #[test]
    fn reduced_embed() {
        // At j = 1 the origin is the invariant point phi2(0,0), which chart 1 misses.
        assert!(matches!(reduced_chart_embed(1.0, c(0.)), Err(Error::Domain(_))));
        let p = reduced_chart_embed(1.0, c(0.5)).unwrap();
        assert!((p.z[0].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(manifold_residual(&p).iter().all(|r| r.abs() < 1e-14));
        assert!(reduced_chart_embed(2.0, c(2.23607)).is_ok());
        assert_eq!(reduced_chart_embed(0.0, c(0.)).unwrap(), chart_embed(1, c(0.), c(0.)).unwrap());
    }
}
