//! Polynomials whose roots contain every rank-one singular point on a reduced level.
//!
//! Along `v = 0` the reduced Hamiltonian is `Gamma(r2) + sigma t1 Omega(r2)`
//! with `sigma = +-1`. Squaring `dGamma = -sigma t1 dOmega` and clearing the
//! square root in `Omega` gives a polynomial in `r2` with only even powers.

use super::poly::{sum_polys, Poly};
use crate::energies::{gamma_cap_poly, omega_radicand_poly, ParamT};
use crate::{Error, Result};

/// The template polynomials `(f1, f2, f3)` in `r2` at fixed `r1`.
///
/// `f1 = (dG/dr2)^2 / 16` with `G = 100 Gamma`, `f2 = t1^2 (P + r2 P'/2)^2`,
/// `f3 = -P` with `P` the radicand product of `Omega`.
pub fn rank_one_templates(t: &ParamT, r1: f64) -> (Poly, Poly, Poly) {
    let a = r1 * r1;
    let dg = gamma_cap_poly(t, a).in_square().derivative();
    let p = omega_radicand_poly(a).in_square();
    let n1 = p.add(&p.derivative().shift().scale(0.5));
    let f1 = dg.mul(&dg).scale(1.0 / 16.0);
    let f2 = n1.mul(&n1).scale(t.t1 * t.t1);
    (f1, f2, p.scale(-1.0))
}

/// The numerator `(4 f1 f3 + f2) / 625` as a polynomial in `r2` (degree 24).
pub fn rank_one_poly_r2(t: &ParamT, r1: f64) -> Poly {
    let (f1, f2, f3) = rank_one_templates(t, r1);
    sum_polys(&[f1.mul(&f3).scale(4.0 / 625.0), f2.scale(1.0 / 625.0)])
}

/// Largest odd-power coefficient relative to the largest coefficient.
pub fn odd_power_ratio(p: &Poly) -> f64 {
    let max = p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let odd = p.coeffs.iter().skip(1).step_by(2).fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        0.0
    } else {
        odd / max
    }
}

fn even_part(p: &Poly) -> Poly {
    Poly::new(p.coeffs.iter().step_by(2).copied().collect())
}

/// Rank-one polynomial in `s = r2^2`, together with a flag set when `t1 = 0`
/// (the polynomial then reduces to the `f1 f3` part alone).
pub fn rank_one_poly_flagged(t: &ParamT, r1: f64) -> (Poly, bool) {
    let p = rank_one_poly_r2(t, r1);
    debug_assert!(odd_power_ratio(&p) < 1e-9, "odd powers in rank-one polynomial");
    (even_part(&p), t.t1 == 0.0)
}

/// Rank-one polynomial in `s = r2^2`; degree 12 whenever `t3 != 0`.
pub fn rank_one_poly(t: &ParamT, r1: f64) -> Result<Poly> {
    if t.t1 == 0.0 {
        return Err(Error::DegenerateFamily("t1 = 0: rank-one criterion degenerate".into()));
    }
    Ok(rank_one_poly_flagged(t, r1).0)
}

/// Polynomial in `s = r2^2` vanishing where `(d2Gamma)^2 = t1^2 (d2Omega)^2`.
pub fn degeneracy_poly(t: &ParamT, r1: f64) -> Result<Poly> {
    if t.t1 == 0.0 {
        return Err(Error::DegenerateFamily("t1 = 0: degeneracy criterion undefined".into()));
    }
    let a = r1 * r1;
    let d2g = gamma_cap_poly(t, a).in_square().derivative().derivative();
    let p = omega_radicand_poly(a).in_square();
    let dp = p.derivative();
    let n1 = p.add(&dp.shift().scale(0.5));
    let m = n1.derivative().mul(&p).scale(2.0).sub(&n1.mul(&dp));
    let lhs = d2g.mul(&d2g).mul(&p.mul(&p).mul(&p));
    let rhs = m.mul(&m).scale(t.t1 * t.t1);
    let d = sum_polys(&[lhs, rhs.scale(-1.0)]);
    debug_assert!(odd_power_ratio(&d) < 1e-9, "odd powers in degeneracy polynomial");
    Ok(even_part(&d))
}
