//! Exact series backend for the Bloch symbol.
//!
//! Builds the 1D symbol with entries that are truncated series in t, with
//! t_h substituted by an arbitrary candidate series t + delta(t). The
//! coefficient ring is generic so the penalty parameter can be a fixed
//! rational or the formal variable gamma. Also houses the exact closed
//! forms used as cross-checks: alpha_0, the A1 series, the interior
//! condensation series, the B_t(Phi, Phi) quadratic forms, and the 2D
//! cofactor of Lemma-style Kronecker mass/stiffness matrices.

use num_traits::{One, Zero};

use crate::basis::{element_matrices, lagrange_basis, Polynomial, P_MAX};
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, int_pow, GaussianRational, Int, Rational};
use crate::linalg::rational_det;
use crate::series::{elementary_series, Coeff, ElementaryKind, Series, SeriesMatrix};

fn check_order(p: usize) -> Result<()> {
    if p == 0 || p > P_MAX {
        Err(Error::UnsupportedOrder { p, max: P_MAX })
    } else {
        Ok(())
    }
}

fn c_rat<C: Coeff>(r: Rational) -> C {
    C::from_rational(&r)
}

fn c_int<C: Coeff>(n: i64) -> C {
    C::from_rational(&Rational::from_integer(Int::from(n)))
}

/// 1D symbol with series entries, t_h given as a series in t (typically
/// t + delta). The truncation order is taken from `th`.
pub fn symbol_1d_series<C: Coeff>(
    p: usize,
    gamma: &C,
    th: &Series<C>,
) -> Result<SeriesMatrix<C>> {
    check_order(p)?;
    let order = th.order();
    let em = element_matrices(p)?;
    let t = Series::<C>::identity(order);
    let t2 = t.mul(&t);
    let bt = |i: usize, j: usize| -> Series<C> {
        let s = Series::constant(c_rat::<C>(em.stiffness[i][j].clone()), order);
        s.sub(&t2.scale(&c_rat::<C>(em.mass[i][j].clone())))
    };

    let e_m = elementary_series::<C>(ElementaryKind::ExpI, &-Rational::one(), order)
        .compose(th)?;
    let e_p = elementary_series::<C>(ElementaryKind::ExpI, &Rational::one(), order)
        .compose(th)?;
    let half = c_rat::<C>(Rational::new(Int::from(1), Int::from(2)));
    let cos1 = e_m.add(&e_p).scale(&half);
    let em2 = e_m.mul(&e_m);
    let ep2 = e_p.mul(&e_p);
    let cos2 = em2.add(&ep2).scale(&half);
    let one = Series::<C>::one(order);

    let s_sign: i64 = if p % 2 == 0 { 1 } else { -1 };
    let q2 = (1 - s_sign) * (1 - s_sign);
    let p2p = c_rat::<C>(Rational::from_integer(int_pow(p as i64, 2 * p)));

    let mut entries = vec![Series::<C>::zero(order); p * p];
    // (1,1): 2 B(0,0) + 2 cos(t_h) B(p,0) + (2 + q2 - 2 q2 cos - 2 s cos2) p^{2p} gamma
    {
        let pen = Series::constant(c_int::<C>(2 + q2), order)
            .sub(&cos1.scale(&c_int::<C>(2 * q2)))
            .sub(&cos2.scale(&c_int::<C>(2 * s_sign)));
        let d00 = bt(0, 0)
            .scale(&c_int::<C>(2))
            .add(&cos1.mul(&bt(p, 0)).scale(&c_int::<C>(2)))
            .add(&pen.scale(&p2p).scale(gamma));
        entries[0] = d00;
    }
    // borders
    for j in 1..p {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let cj = c_rat::<C>(Rational::from_integer(Int::from(sign) * binomial(p, j as i64)));
        let trig_m = one
            .scale(&c_int::<C>(2 - s_sign))
            .add(&e_m.scale(&c_int::<C>(2 * s_sign - 1)))
            .sub(&e_p)
            .sub(&em2.scale(&c_int::<C>(s_sign)));
        let trig_p = one
            .scale(&c_int::<C>(2 - s_sign))
            .add(&e_p.scale(&c_int::<C>(2 * s_sign - 1)))
            .sub(&e_m)
            .sub(&ep2.scale(&c_int::<C>(s_sign)));
        entries[j] = bt(j, 0)
            .add(&e_m.mul(&bt(j, p)))
            .add(&trig_m.scale(&cj).scale(&p2p).scale(gamma));
        entries[j * p] = bt(j, 0)
            .add(&e_p.mul(&bt(j, p)))
            .add(&trig_p.scale(&cj).scale(&p2p).scale(gamma));
    }
    // interior
    let one_minus_cos = one.sub(&cos1);
    for i in 1..p {
        for j in 1..p {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let c = c_rat::<C>(Rational::from_integer(
                Int::from(2 * sign) * binomial(p, i as i64) * binomial(p, j as i64),
            ));
            entries[i * p + j] = bt(i, j).add(
                &one_minus_cos.scale(&c).scale(&p2p).scale(gamma),
            );
        }
    }
    Ok(SeriesMatrix::new(p, entries))
}

/// alpha_0 = Det(D_0), the determinant of the interior stiffness block;
/// positive for every order.
pub fn alpha0(p: usize) -> Result<Rational> {
    check_order(p)?;
    if p == 1 {
        return Ok(Rational::one());
    }
    let em = element_matrices(p)?;
    let sub: Vec<Vec<Rational>> = (1..p)
        .map(|i| (1..p).map(|j| em.stiffness[i][j].clone()).collect())
        .collect();
    Ok(rational_det(&sub))
}

/// Brute-force double sum of the combinatorial identity (0^0 = 1).
pub(crate) fn comb_n_brute(p: usize, j: usize) -> Int {
    let deg = p as i64 + 2 - 2 * j as i64;
    let mut total = Int::zero();
    for i in 1..p {
        let mut inner = Int::zero();
        for m in 0..=deg {
            inner += binomial(p + 2 * j, m - 1 + 2 * j as i64)
                * binomial(deg as usize, m)
                * int_pow(i as i64, (deg - m) as usize)
                * int_pow(i as i64 - p as i64, m as usize);
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        total += Int::from(sign) * binomial(p, i as i64) * inner;
    }
    total
}

/// Exact series of A1(t) from its closed-form representation as a ratio of
/// polynomials in t^2 (the double sums evaluated by brute force, so this
/// route is independent of the condensation linear solve).
pub fn a1_series(p: usize, order: usize) -> Result<Series<GaussianRational>> {
    check_order(p)?;
    let jmax = p / 2 + 1;
    let mut num = Series::<GaussianRational>::zero(order);
    let mut den = Series::<GaussianRational>::zero(order);
    for j in 1..=jmax {
        let power = 2 * (jmax - j);
        if power > order {
            continue;
        }
        let deg = p + 2 - 2 * j;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let num_c = Rational::new(
            Int::from(sign) * Int::from(2) * factorial(p + 1) * comb_n_brute(p, j),
            factorial(deg) * int_pow(p as i64, deg),
        );
        let den_c = Rational::new(
            Int::from(sign) * Int::from(4) * factorial(p + 2 * j),
            factorial(deg) * factorial(2 * j - 1),
        );
        num.set_coeff(
            power,
            num.coeff(power).add(&GaussianRational::from_rational(num_c)),
        );
        den.set_coeff(
            power,
            den.coeff(power).add(&GaussianRational::from_rational(den_c)),
        );
    }
    let front = if p % 2 == 0 { 1 } else { -1 };
    Ok(num.div(&den)?.scale(&GaussianRational::from_int(front)))
}

/// Interior condensation coefficient series c_i(t), d_i(t) obtained by
/// solving the interior linear system over the series ring.
pub fn condensation_series(
    p: usize,
    order: usize,
) -> Result<(Vec<Series<GaussianRational>>, Vec<Series<GaussianRational>>)> {
    check_order(p)?;
    let n = p - 1;
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let em = element_matrices(p)?;
    let t2 = {
        let t = Series::<GaussianRational>::identity(order);
        t.mul(&t)
    };
    let bt = |i: usize, j: usize| -> Series<GaussianRational> {
        Series::constant(
            GaussianRational::from_rational(em.stiffness[i][j].clone()),
            order,
        )
        .sub(&t2.scale(&GaussianRational::from_rational(em.mass[i][j].clone())))
    };
    // rows: equations B_t(xi, lambda_{a+1}) = 0; unknown columns i = 1..p-1
    let mut mat: Vec<Vec<Series<GaussianRational>>> = (0..n)
        .map(|a| (0..n).map(|b| bt(b + 1, a + 1)).collect())
        .collect();
    let mut rhs: Vec<[Series<GaussianRational>; 2]> = (0..n)
        .map(|a| [bt(0, a + 1).neg(), bt(p, a + 1).neg()])
        .collect();
    // elimination without pivoting: the t^0 block is positive definite
    for k in 0..n {
        for i in (k + 1)..n {
            let factor = mat[i][k].div(&mat[k][k])?;
            for j in k..n {
                let v = factor.mul(&mat[k][j]);
                mat[i][j] = mat[i][j].sub(&v);
            }
            for r in 0..2 {
                let v = factor.mul(&rhs[k][r]);
                rhs[i][r] = rhs[i][r].sub(&v);
            }
        }
    }
    let ord_out = rhs[0][0].order().min(mat[0][0].order());
    let mut c = vec![Series::<GaussianRational>::zero(ord_out); n];
    let mut d = vec![Series::<GaussianRational>::zero(ord_out); n];
    for k in (0..n).rev() {
        for (r, out) in [&mut c, &mut d].into_iter().enumerate() {
            let mut s = rhs[k][r].clone();
            for j in (k + 1)..n {
                s = s.sub(&mat[k][j].mul(&out[j]));
            }
            out[k] = s.div(&mat[k][k])?;
        }
    }
    Ok((c, d))
}

/// A1 recomputed from the condensation series (independent route).
pub fn a1_from_condensation(p: usize, order: usize) -> Result<Series<GaussianRational>> {
    let (c, _) = condensation_series(p, order)?;
    let mut a1 = Series::<GaussianRational>::zero(order);
    for (i0, ci) in c.iter().enumerate() {
        let i = i0 + 1;
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let w = GaussianRational::from_rational(Rational::from_integer(
            Int::from(sign) * binomial(p, i as i64),
        ));
        a1 = a1.add(&ci.scale(&w));
    }
    Ok(a1)
}

/// Exact series of B_t(Phi, Phi) for the even (Phi_e) or odd (Phi_o)
/// interior function, computed from the explicit bivariate closed form.
pub fn phi_quadratic_form_series(
    p: usize,
    even: bool,
    order: usize,
) -> Result<Series<GaussianRational>> {
    check_order(p)?;
    let (jmax, deg_base, top_off, num_fact) = if even {
        let ne = p / 2;
        (ne + 1, 2 * ne + 2, 2 * ne, factorial(2 * ne + 1))
    } else {
        let no = (p + 1) / 2;
        (no, 2 * no + 1, 2 * no - 1, factorial(2 * no))
    };
    // numerator coefficients per power of t (after clearing t^{-2j} by t^{2 jmax})
    let tdeg = 2 * jmax;
    let mut num_x: Vec<Polynomial> = vec![Polynomial::zero(); tdeg + 1];
    let mut den_t: Vec<Rational> = vec![Rational::zero(); tdeg + 1];
    let x = Polynomial::new(vec![Rational::zero(), Rational::one()]);
    let xm1 = Polynomial::new(vec![-Rational::one(), Rational::one()]);
    for j in 1..=jmax {
        let power = 2 * (jmax - j);
        let deg = deg_base - 2 * j;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let mut u = Polynomial::zero();
        for m in 0..=deg {
            let cmb = binomial(top_off + 2 * j, m as i64 - 1 + 2 * j as i64)
                * binomial(deg, m as i64);
            let mut term = Polynomial::constant(Rational::from_integer(cmb));
            for _ in 0..(deg - m) {
                term = term.mul(&x);
            }
            for _ in 0..m {
                term = term.mul(&xm1);
            }
            u = u.add(&term);
        }
        let scale = Rational::new(Int::from(sign) * Int::from(2) * &num_fact, factorial(deg));
        num_x[power] = num_x[power].add(&u.scale(&scale));
        den_t[power] += Rational::new(
            Int::from(sign) * Int::from(2) * factorial(top_off + 2 * j),
            factorial(deg) * factorial(2 * j - 1),
        );
    }
    // T(t) = int (d/dx NUM)^2 - t^2 int NUM^2, with NUM = sum_k t^k num_x[k]
    let dnum: Vec<Polynomial> = num_x.iter().map(Polynomial::derivative).collect();
    let mut t_poly = vec![Rational::zero(); 2 * tdeg + 3];
    for k1 in 0..=tdeg {
        for k2 in 0..=tdeg {
            if num_x[k1].is_zero() && dnum[k1].is_zero() {
                continue;
            }
            let dd = dnum[k1].mul(&dnum[k2]).integrate_unit();
            let mm = num_x[k1].mul(&num_x[k2]).integrate_unit();
            t_poly[k1 + k2] += dd;
            t_poly[k1 + k2 + 2] -= mm;
        }
    }
    let mut den2 = vec![Rational::zero(); 2 * tdeg + 1];
    for k1 in 0..=tdeg {
        for k2 in 0..=tdeg {
            let v = &den_t[k1] * &den_t[k2];
            den2[k1 + k2] += v;
        }
    }
    let to_series = |v: &[Rational]| -> Series<GaussianRational> {
        let mut s = Series::<GaussianRational>::zero(order + 2 * tdeg);
        for (k, c) in v.iter().enumerate() {
            if k <= s.order() {
                s.set_coeff(k, GaussianRational::from_rational(c.clone()));
            }
        }
        s
    };
    Ok(to_series(&t_poly).div(&to_series(&den2))?.truncate(order))
}

/// Kronecker product of rational matrices.
pub fn rational_kron(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let (m, n) = (a.len(), b.len());
    let mut out = vec![vec![Rational::zero(); m * n]; m * n];
    for i1 in 0..m {
        for j1 in 0..m {
            if a[i1][j1].is_zero() {
                continue;
            }
            for i2 in 0..n {
                for j2 in 0..n {
                    out[i1 * n + i2][j1 * n + j2] = &a[i1][j1] * &b[i2][j2];
                }
            }
        }
    }
    out
}

/// (1,1)-cofactor of D_1 kron M_1 + M_1 kron D_1, the quantity whose
/// non-vanishing anchors the 2D expansion.
pub fn dhat_11_cofactor(p: usize) -> Result<Rational> {
    check_order(p)?;
    let em = element_matrices(p)?;
    let basis = lagrange_basis(p)?;
    let mut d1 = vec![vec![Rational::zero(); p]; p];
    let mut m1 = vec![vec![Rational::zero(); p]; p];
    m1[0][0] = Rational::one();
    for i in 1..p {
        let integ = basis[i].integrate_unit();
        m1[0][i] = integ.clone();
        m1[i][0] = integ;
        for j in 1..p {
            d1[i][j] = em.stiffness[i][j].clone();
            m1[i][j] = em.mass[i][j].clone();
        }
    }
    let dhat = {
        let a = rational_kron(&d1, &m1);
        let b = rational_kron(&m1, &d1);
        let n = a.len();
        let mut s = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                s[i][j] = &a[i][j] + &b[i][j];
            }
        }
        s
    };
    let n = dhat.len();
    if n == 1 {
        // removing the only row/column leaves the empty matrix, det = 1
        return Ok(Rational::one());
    }
    let sub: Vec<Vec<Rational>> = (1..n)
        .map(|i| (1..n).map(|j| dhat[i][j].clone()).collect())
        .collect();
    Ok(rational_det(&sub))
}
