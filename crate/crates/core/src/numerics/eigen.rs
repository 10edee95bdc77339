//! Eigenvalues of small dense matrices.

use crate::{Error, Result};
use nalgebra::{linalg::Schur, Matrix4};
use num_complex::Complex64;

/// Characteristic polynomial coefficients, ascending, by Faddeev-LeVerrier.
fn char_poly(m: &Matrix4<f64>) -> [f64; 5] {
    let mut c = [0.0; 5];
    c[4] = 1.0;
    let mut mk = Matrix4::<f64>::zeros();
    for k in 1..=4 {
        mk = m * mk + Matrix4::identity() * c[5 - k];
        c[4 - k] = -(m * mk).trace() / k as f64;
    }
    c
}

fn eval_c(c: &[f64; 5], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(c[4], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..4).rev() {
        dp = dp * z + p;
        p = p * z + c[k];
    }
    (p, dp)
}

/// Simultaneous (Aberth-Ehrlich) iteration on the characteristic polynomial.
fn aberth(c: &[f64; 5]) -> Result<[Complex64; 4]> {
    let bound = 1.0 + c[..4].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: [Complex64; 4] =
        std::array::from_fn(|k| Complex64::from_polar(0.5 * bound, 0.4 + k as f64 * std::f64::consts::FRAC_PI_2));
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..4 {
            let (p, dp) = eval_c(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..4).filter(|&i| i != k).map(|i| 1.0 / (z[k] - z[i])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            return Ok(z);
        }
    }
    let worst = z.iter().map(|&x| eval_c(c, x).0.norm()).fold(0.0f64, f64::max);
    if worst < 1e-10 * bound.powi(4) {
        Ok(z)
    } else {
        Err(Error::NoConvergence("4x4 eigenvalues".into()))
    }
}

/// Eigenvalues of a real 4x4 matrix sorted by (real, imaginary) part.
///
/// Uses a real Schur decomposition; when the QR iteration does not settle
/// (it can cycle on complex quadruples) the characteristic polynomial is
/// solved instead.
pub fn eigen4(m: &Matrix4<f64>) -> Result<[Complex64; 4]> {
    let mut out = match Schur::try_new(*m, f64::EPSILON, 10_000) {
        Some(s) => {
            let ev = s.complex_eigenvalues();
            [ev[0], ev[1], ev[2], ev[3]]
        }
        None => aberth(&char_poly(m))?,
    };
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}
