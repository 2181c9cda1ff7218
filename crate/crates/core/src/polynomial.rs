//! Dense univariate polynomials and breakpoint-partitioned piecewise polynomials.
//!
//! Everything the kernel and basis layers manipulate — kernel slices, the ψ
//! collocation functions, their derivatives — is a polynomial of degree ≤ 7 on
//! a subinterval of [0, 1], so this module keeps the representation dense
//! (monomial coefficients `c0 + c1 t + … + cd t^d`) and the arithmetic exact:
//! products are formed by coefficient convolution and integrals of products by
//! evaluating the antiderivative, with no quadrature error beyond rounding.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolynomialError {
    /// Evaluation point outside the supported domain [0, 1].
    #[error("evaluation point {t} outside [0, 1]")]
    OutOfDomain { t: f64 },
    /// Breakpoint sequence is not strictly increasing from 0 to 1.
    #[error("invalid breakpoints: {reason}")]
    InvalidBreakpoints { reason: String },
    /// Piece count does not match the breakpoint intervals.
    #[error("expected {expected} pieces for the breakpoint set, got {got}")]
    PieceCountMismatch { expected: usize, got: usize },
}

/// Dense polynomial `sum coeffs[i] * t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The monomial `t^degree`.
    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluate the `order`-th derivative at `t` by Horner recurrence on the
    /// differentiated coefficients. Orders beyond the degree return 0.
    pub fn eval(&self, t: f64, order: usize) -> f64 {
        if order == 0 {
            return horner(&self.coeffs, t);
        }
        if order > self.degree() {
            return 0.0;
        }
        horner(&derive_coeffs(&self.coeffs, order), t)
    }

    /// Coefficient-level k-fold derivative.
    pub fn derivative(&self, k: usize) -> Polynomial {
        if k > self.degree() {
            return Polynomial::zero();
        }
        Polynomial::new(derive_coeffs(&self.coeffs, k))
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = c / (i as f64 + 1.0);
        }
        Polynomial::new(out)
    }

    /// Coefficient convolution product.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn derive_coeffs(coeffs: &[f64], k: usize) -> Vec<f64> {
    let mut cur: Vec<f64> = coeffs.to_vec();
    for _ in 0..k {
        if cur.len() <= 1 {
            return vec![0.0];
        }
        cur = cur
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as f64 * c)
            .collect();
    }
    cur
}

/// Exact `∫_a^b p(v) q(v) dv` via the antiderivative of the convolution product.
pub fn integrate_product(p: &Polynomial, q: &Polynomial, a: f64, b: f64) -> f64 {
    debug_assert!(a <= b, "integration bounds must satisfy a <= b");
    let anti = p.mul(q).antiderivative();
    anti.eval(b, 0) - anti.eval(a, 0)
}

/// Piecewise polynomial over [0, 1]: `pieces[k]` is active on
/// `(breakpoints[k], breakpoints[k+1]]`, with the leftmost piece also covering
/// `t = 0`. At an interior breakpoint the left piece wins (the `t ≤ s` branch
/// convention).
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(
        breakpoints: Vec<f64>,
        pieces: Vec<Polynomial>,
    ) -> Result<Self, PolynomialError> {
        if breakpoints.len() < 2 {
            return Err(PolynomialError::InvalidBreakpoints {
                reason: "need at least two breakpoints".into(),
            });
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(PolynomialError::InvalidBreakpoints {
                reason: "breakpoints must span [0, 1]".into(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PolynomialError::InvalidBreakpoints {
                reason: "breakpoints must be strictly increasing".into(),
            });
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(PolynomialError::PieceCountMismatch {
                expected: breakpoints.len() - 1,
                got: pieces.len(),
            });
        }
        Ok(Self { breakpoints, pieces })
    }

    /// Single piece spanning all of [0, 1].
    pub fn single(piece: Polynomial) -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![piece],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    fn piece_index(&self, t: f64) -> usize {
        // left-closed convention: first interval whose right endpoint is >= t
        for (j, &bp) in self.breakpoints.iter().enumerate().skip(1) {
            if t <= bp {
                return j - 1;
            }
        }
        self.pieces.len() - 1
    }

    /// Evaluate the `order`-th derivative of the piece containing `t`.
    pub fn eval(&self, t: f64, order: usize) -> Result<f64, PolynomialError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(PolynomialError::OutOfDomain { t });
        }
        Ok(self.pieces[self.piece_index(t)].eval(t, order))
    }

    /// The piece active on an interval `(a, b)` with no breakpoint inside.
    pub fn piece_on(&self, a: f64, b: f64) -> &Polynomial {
        &self.pieces[self.piece_index(0.5 * (a + b))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_gauss_legendre;
    use proptest::prelude::*;

    #[test]
    fn constant_eval() {
        let p = Polynomial::constant(1.0);
        assert_eq!(p.eval(0.7, 0), 1.0);
    }

    #[test]
    fn monomial_eval_and_high_derivative() {
        let p = Polynomial::monomial(7);
        assert_eq!(p.eval(0.5, 0), 0.0078125); // 2^-7
        assert_eq!(p.eval(0.3, 7), 5040.0); // 7!
        assert_eq!(p.eval(0.9, 8), 0.0);
    }

    #[test]
    fn derivative_of_cubic() {
        let p = Polynomial::monomial(3);
        assert_eq!(p.derivative(1).coeffs(), &[0.0, 0.0, 3.0]);
    }

    #[test]
    fn derivative_identity_and_exhaustion() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5]);
        assert_eq!(p.derivative(0), p);
        assert_eq!(Polynomial::monomial(7).derivative(8), Polynomial::zero());
    }

    #[test]
    fn derivative_matches_eval_order() {
        let p = Polynomial::new(vec![0.3, -1.7, 2.2, 0.9, -0.4]);
        for k in 0..=5 {
            for &t in &[0.0, 0.31, 1.0] {
                assert!((p.derivative(k).eval(t, 0) - p.eval(t, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_integrals_exact() {
        let t = Polynomial::monomial(1);
        assert!((integrate_product(&t, &t, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        let two = Polynomial::constant(2.0);
        let three = Polynomial::constant(3.0);
        assert!((integrate_product(&two, &three, 0.0, 1.0) - 6.0).abs() < 1e-15);
        let c = Polynomial::monomial(3);
        assert!((integrate_product(&c, &c, 0.0, 1.0) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_branch_selection() {
        // W_2^1 kernel slice at s = 0.5: 1 + t on the left, 1.5 on the right
        let pw = PiecewisePolynomial::new(
            vec![0.0, 0.5, 1.0],
            vec![
                Polynomial::new(vec![1.0, 1.0]),
                Polynomial::constant(1.5),
            ],
        )
        .unwrap();
        assert!((pw.eval(0.2, 0).unwrap() - 1.2).abs() < 1e-15);
        assert!((pw.eval(0.8, 0).unwrap() - 1.5).abs() < 1e-15);
        assert!((pw.eval(0.2, 1).unwrap() - 1.0).abs() < 1e-15);
        // left piece wins exactly at the breakpoint
        assert!((pw.eval(0.5, 0).unwrap() - 1.5).abs() < 1e-15);
        assert!((pw.eval(0.5, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_domain_error() {
        let pw = PiecewisePolynomial::single(Polynomial::constant(1.0));
        assert!(matches!(
            pw.eval(-0.1, 0),
            Err(PolynomialError::OutOfDomain { .. })
        ));
        assert!(matches!(
            pw.eval(1.5, 0),
            Err(PolynomialError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn piecewise_validation() {
        assert!(PiecewisePolynomial::new(vec![0.0, 0.5], vec![Polynomial::zero()]).is_err());
        assert!(PiecewisePolynomial::new(
            vec![0.0, 0.5, 0.5, 1.0],
            vec![Polynomial::zero(); 3]
        )
        .is_err());
        assert!(PiecewisePolynomial::new(vec![0.0, 1.0], vec![]).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(-1.0f64..1.0, 1..=8).prop_map(Polynomial::new)
    }

    proptest! {
        // Exact product integration agrees with composite Gauss-Legendre.
        #[test]
        fn product_integral_matches_quadrature(
            p in arb_poly(),
            q in arb_poly(),
            a in 0.0f64..0.5,
            len in 0.01f64..0.5,
        ) {
            let b = (a + len).min(1.0);
            let exact = integrate_product(&p, &q, a, b);
            let quad = composite_gauss_legendre(64, a, b, 1, |t| p.eval(t, 0) * q.eval(t, 0));
            let scale = exact.abs().max(1e-3);
            prop_assert!((exact - quad).abs() <= 1e-12 * scale);
        }

        // Evaluation is linear in the polynomial.
        #[test]
        fn eval_linearity(
            p in arb_poly(),
            q in arb_poly(),
            alpha in -10.0f64..10.0,
            beta in -10.0f64..10.0,
            t in 0.0f64..1.0,
            k in 0usize..8,
        ) {
            let combo = p.scale(alpha).add(&q.scale(beta));
            let lhs = combo.eval(t, k);
            let rhs = alpha * p.eval(t, k) + beta * q.eval(t, k);
            let scale = (alpha * p.eval(t, k)).abs() + (beta * q.eval(t, k)).abs();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
