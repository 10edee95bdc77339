//! Real-root isolation for univariate polynomials.

use super::poly::Poly;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Number of uniform scan cells used to bracket sign changes.
pub const SCAN_CELLS: usize = 4096;
/// Roots closer than this (relative to `max(1, |x|)`) are merged into one cluster.
pub const CLUSTER_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    /// 1 for a simple root; larger values are hints from clustering or
    /// from a touching (sign-preserving) root of the derivative.
    pub multiplicity: usize,
}

fn rel_residual(p: &Poly, x: f64) -> f64 {
    let s = p.abs_scale(x);
    if s == 0.0 {
        0.0
    } else {
        p.eval(x).abs() / s
    }
}

/// Safeguarded Newton inside a sign-change bracket.
fn refine(p: &Poly, dp: &Poly, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = p.eval(a);
    if fa == 0.0 {
        return Ok(a);
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..400 {
        let fx = p.eval(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let width = b - a;
        if width <= 1e-14 * x.abs().max(1.0) || rel_residual(p, x) < 1e-16 {
            break;
        }
        let d = dp.eval(x);
        let xn = x - fx / d;
        x = if d != 0.0 && xn > a && xn < b && (xn - x).abs() < 0.5 * width {
            xn
        } else {
            0.5 * (a + b)
        };
    }
    if rel_residual(p, x) < 1e-12 || (b - a) < 1e-13 * x.abs().max(1.0) {
        Ok(x)
    } else {
        Err(Error::NoConvergence(format!(
            "root refinement stalled near {x} (bracket width {})",
            b - a
        )))
    }
}

fn roots_raw(p: &Poly, lo: f64, hi: f64) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no isolated roots".into()));
    }
    let deg = p.degree();
    if deg == 0 {
        return Ok(vec![]);
    }
    let dp = p.derivative();
    let crit: Vec<f64> = if deg >= 2 {
        roots_raw(&dp, lo, hi)?.into_iter().map(|r| r.x).collect()
    } else {
        vec![]
    };
    let mut xs: Vec<f64> = (0..=SCAN_CELLS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_CELLS as f64)
        .collect();
    xs.extend(crit.iter().copied());
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut out = Vec::new();
    let vals: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
    for k in 0..xs.len() {
        if vals[k] == 0.0 {
            out.push(Root { x: xs[k], multiplicity: 1 });
            continue;
        }
        if k + 1 < xs.len() && vals[k + 1] != 0.0 && (vals[k] < 0.0) != (vals[k + 1] < 0.0) {
            out.push(Root { x: refine(p, &dp, xs[k], xs[k + 1])?, multiplicity: 1 });
        }
    }
    // Touching roots: critical points where p vanishes to rounding without a sign change.
    for &c in &crit {
        if rel_residual(p, c) < 1e-12 && !out.iter().any(|r| (r.x - c).abs() <= CLUSTER_TOL * c.abs().max(1.0)) {
            out.push(Root { x: c, multiplicity: 2 });
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(out)
}

/// All real roots of `p` in `[lo, hi]`, sorted, with nearby roots clustered.
pub fn real_roots(p: &Poly, lo: f64, hi: f64) -> Result<Vec<Root>> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty root interval [{lo}, {hi}]")));
    }
    let raw = roots_raw(p, lo, hi)?;
    let mut out: Vec<Root> = Vec::new();
    for r in raw {
        match out.last_mut() {
            Some(last) if (r.x - last.x).abs() <= CLUSTER_TOL * r.x.abs().max(1.0) => {
                let m = last.multiplicity + r.multiplicity;
                last.x = (last.x * last.multiplicity as f64 + r.x * r.multiplicity as f64) / m as f64;
                last.multiplicity = m;
            }
            _ => out.push(r),
        }
    }
    Ok(out)
}

/// Roots from the eigenvalues of the companion matrix, for cross-checking.
pub fn companion_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = p.lead();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NoConvergence("companion eigenvalues".into()))?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_quadratic() {
        let p = Poly::new(vec![-4.0, 0.0, 1.0]);
        let r = real_roots(&p, 0.0, 10.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].x - 2.0).abs() < 1e-14);
    }

    #[test]
    fn double_root_reported_once() {
        let p = Poly::from_roots(&[1.5, 3.0, 3.0, -1.0]);
        let r = real_roots(&p, 0.0, 5.0).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].x - 3.0).abs() < 1e-7);
    }

    #[test]
    fn companion_matches() {
        let p = Poly::from_roots(&[-2.0, 0.5, 4.0]);
        let ev = companion_roots(&p).unwrap();
        let re: Vec<f64> = ev.iter().map(|c| c.re).collect();
        for (a, b) in re.iter().zip([-2.0, 0.5, 4.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
