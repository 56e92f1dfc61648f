//! Polynomial algebra on the reference interval.
//!
//! Provides the Lagrange nodal basis on [0,1] with equispaced nodes j/p,
//! exact element stiffness/mass matrices, the constant p-th derivatives of
//! the nodal basis, and Legendre polynomial derivatives on [-1,1]. All
//! coefficients are exact rationals; floating point only appears when a
//! caller renders values at the numeric boundary.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, int_pow, rat_int, to_f64, Int, Rational};

/// Largest supported polynomial order for the exact basis layer.
pub const P_MAX: usize = 13;

fn check_order(p: usize) -> Result<()> {
    if p == 0 || p > P_MAX {
        Err(Error::UnsupportedOrder { p, max: P_MAX })
    } else {
        Ok(())
    }
}

/// Dense univariate polynomial in the monomial basis with rational
/// coefficients. Trailing zeros are trimmed, so `degree == coeffs.len()-1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![Rational::zero()])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c * x^k.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&rat_int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect();
        Self::new(out)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        let mut q = self.clone();
        for _ in 0..n {
            q = q.derivative();
        }
        q
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    /// Exact integral over [0, 1].
    pub fn integrate_unit(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / rat_int(i as i64 + 1))
            .sum()
    }
}

/// Exact reference-element matrices for order p.
///
/// `stiffness[i][j]` holds the integral of lambda_i' lambda_j' over [0,1],
/// `mass[i][j]` the integral of lambda_i lambda_j. Both are symmetric;
/// stiffness rows sum to zero because constants lie in its kernel.
#[derive(Clone, Debug)]
pub struct ElementMatrices {
    pub p: usize,
    pub stiffness: Vec<Vec<Rational>>,
    pub mass: Vec<Vec<Rational>>,
}

impl ElementMatrices {
    /// B_t entry lambda-pair bilinear form S_ij - t^2 M_ij rendered to f64.
    pub fn bt_f64(&self, i: usize, j: usize, t: f64) -> f64 {
        to_f64(&self.stiffness[i][j]) - t * t * to_f64(&self.mass[i][j])
    }
}

/// Lagrange nodal basis lambda_0..lambda_p on [0,1] with lambda_i(j/p) = delta_ij.
pub fn lagrange_basis(p: usize) -> Result<Vec<Polynomial>> {
    check_order(p)?;
    let mut basis = Vec::with_capacity(p + 1);
    for i in 0..=p {
        let xi = Rational::new(Int::from(i), Int::from(p));
        let mut num = Polynomial::constant(Rational::one());
        let mut den = Rational::one();
        for j in 0..=p {
            if j == i {
                continue;
            }
            let xj = Rational::new(Int::from(j), Int::from(p));
            num = num.mul(&Polynomial::new(vec![-xj.clone(), Rational::one()]));
            den *= &xi - &xj;
        }
        basis.push(num.scale(&den.recip()));
    }
    Ok(basis)
}

/// Exact stiffness and mass matrices of the order-p reference element.
pub fn element_matrices(p: usize) -> Result<ElementMatrices> {
    let basis = lagrange_basis(p)?;
    let derivs: Vec<Polynomial> = basis.iter().map(Polynomial::derivative).collect();
    let n = p + 1;
    let mut stiffness = vec![vec![Rational::zero(); n]; n];
    let mut mass = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let s = derivs[i].mul(&derivs[j]).integrate_unit();
            let m = basis[i].mul(&basis[j]).integrate_unit();
            stiffness[i][j] = s.clone();
            stiffness[j][i] = s;
            mass[i][j] = m.clone();
            mass[j][i] = m;
        }
    }
    Ok(ElementMatrices { p, stiffness, mass })
}

/// The constant p-th derivatives of the nodal basis:
/// lambda_i^(p) = (-1)^(p-i) C(p,i) p^p for i = 0..p.
pub fn pth_derivative_values(p: usize) -> Result<Vec<Rational>> {
    check_order(p)?;
    let pp = int_pow(p as i64, p);
    Ok((0..=p)
        .map(|i| {
            let sign = if (p - i) % 2 == 0 { 1 } else { -1 };
            Rational::from_integer(Int::from(sign) * binomial(p, i as i64) * &pp)
        })
        .collect())
}

/// d-th derivative of the Legendre polynomial of degree n on [-1,1], from
/// the Rodrigues expansion
/// L_n^(d)(s) = n!/(2^n (n-d)!) sum_m C(n+d, m+d) C(n-d, m) (s+1)^(n-m-d) (s-1)^m.
///
/// Over-differentiation (d > n) returns the zero polynomial.
pub fn legendre_derivative(n: usize, d: usize) -> Polynomial {
    if d > n {
        return Polynomial::zero();
    }
    let s_plus = Polynomial::new(vec![Rational::one(), Rational::one()]);
    let s_minus = Polynomial::new(vec![-Rational::one(), Rational::one()]);
    let mut acc = Polynomial::zero();
    for m in 0..=(n - d) {
        let c = binomial(n + d, (m + d) as i64) * binomial(n - d, m as i64);
        let mut term = Polynomial::constant(Rational::from_integer(c));
        for _ in 0..(n - m - d) {
            term = term.mul(&s_plus);
        }
        for _ in 0..m {
            term = term.mul(&s_minus);
        }
        acc = acc.add(&term);
    }
    let scale = Rational::new(factorial(n), int_pow(2, n) * factorial(n - d));
    acc.scale(&scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_traits::Signed;

    #[test]
    fn lagrange_p1_is_hat_pair() {
        let basis = lagrange_basis(1).unwrap();
        assert_eq!(basis[0], Polynomial::new(vec![rat_int(1), rat_int(-1)]));
        assert_eq!(basis[1], Polynomial::new(vec![rat_int(0), rat_int(1)]));
    }

    #[test]
    fn lagrange_p2_middle_is_4x_1mx() {
        // Interpolation-condition solve oracle: 4x(1-x) = 4x - 4x^2.
        let basis = lagrange_basis(2).unwrap();
        assert_eq!(
            basis[1],
            Polynomial::new(vec![rat_int(0), rat_int(4), rat_int(-4)])
        );
    }

    #[test]
    fn lagrange_nodal_property() {
        for p in [1usize, 2, 3, 5, 8] {
            let basis = lagrange_basis(p).unwrap();
            for (i, b) in basis.iter().enumerate() {
                for j in 0..=p {
                    let x = Rational::new(Int::from(j), Int::from(p));
                    let expect = if i == j { rat_int(1) } else { rat_int(0) };
                    assert_eq!(b.eval(&x), expect, "p={p} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn order_range_is_enforced() {
        assert!(lagrange_basis(0).is_err());
        assert!(lagrange_basis(P_MAX + 1).is_err());
        assert!(lagrange_basis(P_MAX).is_ok());
    }

    #[test]
    fn element_matrices_p1() {
        let em = element_matrices(1).unwrap();
        assert_eq!(em.stiffness[0], vec![rat_int(1), rat_int(-1)]);
        assert_eq!(em.stiffness[1], vec![rat_int(-1), rat_int(1)]);
        // Monomial integration oracle for the mass matrix.
        assert_eq!(em.mass[0], vec![rat(1, 3), rat(1, 6)]);
        assert_eq!(em.mass[1], vec![rat(1, 6), rat(1, 3)]);
    }

    #[test]
    fn partition_of_unity_and_zero_row_sums() {
        for p in 1..=8 {
            let basis = lagrange_basis(p).unwrap();
            let mut sum = Polynomial::zero();
            for b in &basis {
                sum = sum.add(b);
            }
            assert_eq!(sum, Polynomial::constant(Rational::one()), "p={p}");

            let em = element_matrices(p).unwrap();
            for row in &em.stiffness {
                let s: Rational = row.iter().sum();
                assert!(s.is_zero(), "p={p}");
            }
        }
    }

    #[test]
    fn mass_is_positive_definite_leading_minors() {
        // Sylvester criterion on exact leading minors.
        for p in 1..=6 {
            let em = element_matrices(p).unwrap();
            for m in 1..=p + 1 {
                let sub: Vec<Vec<Rational>> = (0..m)
                    .map(|i| (0..m).map(|j| em.mass[i][j].clone()).collect())
                    .collect();
                let det = crate::linalg::rational_det(&sub);
                assert!(det.is_positive(), "p={p} minor {m}");
            }
        }
    }

    #[test]
    fn stiffness_matches_gauss_quadrature() {
        // Independent numeric route: Gauss-Legendre with p+2 points is exact
        // for the degree-(2p-2) integrand.
        for p in 1..=6 {
            let em = element_matrices(p).unwrap();
            let basis = lagrange_basis(p).unwrap();
            let derivs: Vec<Polynomial> = basis.iter().map(Polynomial::derivative).collect();
            let (xs, ws) = crate::linalg::gauss_legendre_unit(p + 2);
            for i in 0..=p {
                for j in 0..=p {
                    let num: f64 = xs
                        .iter()
                        .zip(&ws)
                        .map(|(x, w)| w * derivs[i].eval_f64(*x) * derivs[j].eval_f64(*x))
                        .sum();
                    let exact = to_f64(&em.stiffness[i][j]);
                    assert!((num - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "p={p}");
                }
            }
        }
    }

    #[test]
    fn pth_derivative_examples() {
        assert_eq!(
            pth_derivative_values(1).unwrap(),
            vec![rat_int(-1), rat_int(1)]
        );
        assert_eq!(
            pth_derivative_values(2).unwrap(),
            vec![rat_int(4), rat_int(-8), rat_int(4)]
        );
    }

    #[test]
    fn pth_derivative_matches_symbolic_differentiation() {
        for p in 1..=8 {
            let basis = lagrange_basis(p).unwrap();
            let values = pth_derivative_values(p).unwrap();
            for (i, b) in basis.iter().enumerate() {
                let dp = b.nth_derivative(p);
                assert_eq!(dp, Polynomial::constant(values[i].clone()), "p={p} i={i}");
            }
        }
        // Spot value from differentiating lambda_1 three times at p = 3:
        // lambda_1 = (27 x^3 - 45 x^2 + 18 x)/2, third derivative +81,
        // matching (-1)^{p-i} C(p,i) p^p with p = 3, i = 1.
        assert_eq!(pth_derivative_values(3).unwrap()[1], rat_int(81));
    }

    #[test]
    fn legendre_examples() {
        // L_2 = (3s^2-1)/2
        assert_eq!(
            legendre_derivative(2, 0),
            Polynomial::new(vec![rat(-1, 2), rat_int(0), rat(3, 2)])
        );
        // L_3' = (15s^2-3)/2, via symbolic differentiation oracle.
        let l3 = legendre_derivative(3, 0);
        assert_eq!(legendre_derivative(3, 1), l3.derivative());
        assert_eq!(
            legendre_derivative(3, 1),
            Polynomial::new(vec![rat(-3, 2), rat_int(0), rat(15, 2)])
        );
        assert!(legendre_derivative(2, 3).is_zero());
    }

    #[test]
    fn legendre_endpoint_value() {
        // L_n^(d)(1) = (n+d)!/(2^d d! (n-d)!)
        for n in 0..=8usize {
            for d in 0..=n {
                let v = legendre_derivative(n, d).eval(&rat_int(1));
                let expect = Rational::new(
                    factorial(n + d),
                    int_pow(2, d) * factorial(d) * factorial(n - d),
                );
                assert_eq!(v, expect, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn legendre_derivative_consistency() {
        for n in 0..=7usize {
            for d in 1..=n {
                assert_eq!(
                    legendre_derivative(n, d),
                    legendre_derivative(n, d - 1).derivative(),
                    "n={n} d={d}"
                );
            }
        }
    }
}
