//! Dense univariate polynomials with compensated arithmetic.

/// Polynomial with coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

// Error-free transformations (Knuth two-sum, FMA two-product).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Accumulator carrying a running sum and its rounding error.
#[derive(Clone, Copy, Default)]
struct Acc {
    s: f64,
    c: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.s, x);
        self.s = s;
        self.c += e;
    }
    fn add_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.c += e;
    }
    fn get(self) -> f64 {
        self.s + self.c
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c + x`, i.e. linear factor with root `-c`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(1.0), |p, &r| p.mul(&Poly::linear(-r, 1.0)))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Compensated Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        let mut s = self.coeffs[n - 1];
        let mut c = 0.0f64;
        for i in (0..n - 1).rev() {
            let (p, pe) = two_prod(s, x);
            let (t, se) = two_sum(p, self.coeffs[i]);
            s = t;
            c = c.mul_add(x, pe + se);
        }
        s + c
    }

    /// Sum of |a_i| |x|^i, the natural scale for residuals at `x`.
    pub fn abs_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + o.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Product with compensated convolution sums.
    pub fn mul(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Acc::default();
            let lo = k.saturating_sub(o.coeffs.len() - 1);
            let hi = k.min(self.coeffs.len() - 1);
            for i in lo..=hi {
                acc.add_prod(self.coeffs[i], o.coeffs[k - i]);
            }
            out.push(acc.get());
        }
        Poly::new(out)
    }

    /// `x * self`.
    pub fn shift(&self) -> Poly {
        let mut c = vec![0.0];
        c.extend_from_slice(&self.coeffs);
        Poly::new(c)
    }

    /// Composes with `x -> x^2`.
    pub fn in_square(&self) -> Poly {
        let mut c = vec![0.0; 2 * self.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            c[2 * i] = a;
        }
        Poly::new(c)
    }
}

/// Sum of many polynomial terms with a single compensated pass per coefficient.
pub fn sum_polys(terms: &[Poly]) -> Poly {
    let n = terms.iter().map(|p| p.coeffs.len()).max().unwrap_or(1);
    let coeffs = (0..n)
        .map(|i| {
            let mut acc = Acc::default();
            for p in terms {
                if let Some(&c) = p.coeffs.get(i) {
                    acc.add(c);
                }
            }
            acc.get()
        })
        .collect();
    Poly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Poly::from_roots(&[1.0, -2.0, 3.0]);
        assert_eq!(p.coeffs, vec![6.0, -5.0, -2.0, 1.0]);
        assert_eq!(p.eval(3.0), 0.0);
        assert_eq!(p.derivative().coeffs, vec![-5.0, -4.0, 3.0]);
        assert_eq!(p.sub(&p).degree(), 0);
        assert!(p.sub(&p).is_zero());
        assert_eq!(Poly::linear(1.0, 1.0).in_square().coeffs, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn compensated_eval_beats_cancellation() {
        // (x - 1)^8 expanded; naive Horner loses most digits near x = 1.
        let p = Poly::from_roots(&[1.0; 8]);
        let x = 1.0 + 1e-3;
        let exact = 1e-24;
        assert!((p.eval(x) - exact).abs() < 1e-26);
    }
}
