//! Truncated power series over exact coefficient rings.
//!
//! A [`Series`] knows its coefficients for t^0..t^order and never claims
//! accuracy beyond the smallest order of the operands of an operation. The
//! coefficient ring is a type parameter: [`GaussianRational`] for plain
//! expansions and [`GammaPoly`] when the penalty parameter is carried as a
//! formal variable through the whole computation.
//!
//! The module also provides determinants of series matrices (division-free
//! Laplace expansion with subset memoization) and an order-by-order implicit
//! root solver used to expand the discrete wave number t_h(t) from
//! Det(D) = 0.

use crate::error::{Error, Result};
use crate::exact::{factorial, GaussianRational, Rational};
use num_traits::{One, Zero};

/// Coefficient-ring requirements for series arithmetic.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact division; `None` when the quotient does not exist in the ring.
    fn div_exact(&self, rhs: &Self) -> Option<Self>;
    fn from_gaussian(g: &GaussianRational) -> Self;

    fn from_rational(r: &Rational) -> Self {
        Self::from_gaussian(&GaussianRational::from_rational(r.clone()))
    }
}

impl Coeff for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        self.checked_div(rhs).ok()
    }
    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }
}

/// Polynomial in a formal penalty parameter with Gaussian-rational
/// coefficients; `coeffs[k]` multiplies gamma^k.
#[derive(Clone, PartialEq, Debug)]
pub struct GammaPoly {
    coeffs: Vec<GaussianRational>,
}

impl GammaPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(GaussianRational::zero());
        }
        Self { coeffs }
    }

    /// The formal variable gamma itself.
    pub fn gamma() -> Self {
        Self::new(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }
}

impl Coeff for GammaPoly {
    fn zero() -> Self {
        Self::new(vec![])
    }
    fn one() -> Self {
        Self::new(vec![GaussianRational::one()])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![GaussianRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = &out[i] + c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] = &out[i] + c;
        }
        Self::new(out)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out =
            vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }
    fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < rhs.degree() {
            return None;
        }
        // polynomial long division; exact only if the remainder vanishes
        let mut rem = self.coeffs.clone();
        let dq = self.degree() - rhs.degree();
        let mut quot = vec![GaussianRational::zero(); dq + 1];
        let lead = rhs.coeffs.last().unwrap();
        for k in (0..=dq).rev() {
            let c = rem[k + rhs.degree()].checked_div(lead).ok()?;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * b);
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }
    fn from_gaussian(g: &GaussianRational) -> Self {
        Self::new(vec![g.clone()])
    }
}

/// Power series in t truncated after t^order (inclusive).
#[derive(Clone, PartialEq, Debug)]
pub struct Series<C: Coeff> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Series<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![C::zero(); order + 1])
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order + 1];
        coeffs[0] = c;
        Self::new(coeffs)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    /// The identity series t.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order + 1];
        if order >= 1 {
            coeffs[1] = C::one();
        }
        Self::new(coeffs)
    }

    /// Monomial c * t^k.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order + 1];
        if k <= order {
            coeffs[k] = c;
        }
        Self::new(coeffs)
    }

    /// Highest power with a known coefficient.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> C {
        self.coeffs.get(n).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, c: C) {
        assert!(n < self.coeffs.len());
        self.coeffs[n] = c;
    }

    /// Lowest power with a nonzero coefficient, if any within the order.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        while coeffs.len() <= order {
            coeffs.push(C::zero());
        }
        Self::new(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self::new(
            (0..=n)
                .map(|i| self.coeffs[i].add(&rhs.coeffs[i]))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self::new(
            (0..=n)
                .map(|i| self.coeffs[i].sub(&rhs.coeffs[i]))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(C::neg).collect())
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut out = vec![C::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    /// Division a / b for series with valuation(a) >= valuation(b); the
    /// result has valuation(a) - valuation(b) and order reduced by
    /// valuation(b).
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let vb = rhs.valuation().ok_or_else(|| {
            Error::DegenerateInput("series division by identically-zero series".into())
        })?;
        match self.valuation() {
            None => return Ok(Self::zero(self.order().min(rhs.order()).saturating_sub(vb))),
            Some(va) => {
                if va < vb {
                    return Err(Error::DegenerateInput(format!(
                        "series division with valuations {va} < {vb}"
                    )));
                }
            }
        }
        let n = self.order().min(rhs.order()) - vb;
        let a: Vec<C> = self.coeffs[vb..].to_vec();
        let b: Vec<C> = rhs.coeffs[vb..].to_vec();
        let mut q = vec![C::zero(); n + 1];
        for k in 0..=n {
            let mut s = a[k].clone();
            for j in 0..k {
                s = s.sub(&q[j].mul(&b[k - j]));
            }
            q[k] = s.div_exact(&b[0]).ok_or_else(|| {
                Error::DegenerateInput(
                    "series division: leading coefficient not invertible".into(),
                )
            })?;
        }
        Ok(Self::new(q))
    }

    /// Composition self(g) for g with zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeff(0).is_zero() {
            return Err(Error::DegenerateInput(
                "series composition requires zero constant term".into(),
            ));
        }
        let n = self.order().min(g.order());
        let mut acc = Series::constant(self.coeff(n), n);
        for k in (0..n).rev() {
            acc = acc.mul(g);
            let c0 = acc.coeff(0).add(&self.coeff(k));
            acc.set_coeff(0, c0);
        }
        Ok(acc)
    }

    /// Map coefficients into another ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series::new(self.coeffs.iter().map(f).collect())
    }
}

/// Elementary Maclaurin series kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementaryKind {
    /// e^(i * scale * t)
    ExpI,
    /// cos(scale * t)
    Cos,
    /// sin(scale * t)
    Sin,
}

/// Exact Maclaurin series of e^(i s t), cos(s t) or sin(s t).
pub fn elementary_series<C: Coeff>(
    kind: ElementaryKind,
    scale: &Rational,
    order: usize,
) -> Series<C> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut scale_pow = Rational::one();
    for n in 0..=order {
        let fact = Rational::from_integer(factorial(n));
        let base = &scale_pow / fact;
        let c = match kind {
            ElementaryKind::ExpI => {
                // i^n cycles 1, i, -1, -i
                match n % 4 {
                    0 => GaussianRational::from_rational(base),
                    1 => GaussianRational::new(Rational::zero(), base),
                    2 => GaussianRational::from_rational(-base),
                    _ => GaussianRational::new(Rational::zero(), -base),
                }
            }
            ElementaryKind::Cos => match n % 4 {
                0 => GaussianRational::from_rational(base),
                2 => GaussianRational::from_rational(-base),
                _ => GaussianRational::zero(),
            },
            ElementaryKind::Sin => match n % 4 {
                1 => GaussianRational::from_rational(base),
                3 => GaussianRational::from_rational(-base),
                _ => GaussianRational::zero(),
            },
        };
        coeffs.push(C::from_gaussian(&c));
        scale_pow *= scale;
    }
    Series::new(coeffs)
}

/// Square matrix of series sharing a common truncation order.
#[derive(Clone, Debug)]
pub struct SeriesMatrix<C: Coeff> {
    pub dim: usize,
    entries: Vec<Series<C>>,
}

impl<C: Coeff> SeriesMatrix<C> {
    pub fn new(dim: usize, entries: Vec<Series<C>>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let order = entries.iter().map(Series::order).min().unwrap();
        let entries = entries
            .into_iter()
            .map(|e| e.truncate(order))
            .collect();
        Self { dim, entries }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Series<C> {
        &self.entries[i * self.dim + j]
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    /// Determinant by column-by-column Laplace expansion with minors keyed
    /// on row subsets. Division-free, which keeps the computation exact for
    /// any coefficient ring; the subset table is fine for the p <= 13 sizes
    /// used here.
    pub fn det(&self) -> Series<C> {
        let m = self.dim;
        let order = self.order();
        if m == 0 {
            return Series::one(order);
        }
        let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        let mut cur: Vec<Option<Series<C>>> = vec![None; (full as usize) + 1];
        cur[0] = Some(Series::one(order));
        for col in 0..m {
            let mut next: Vec<Option<Series<C>>> = vec![None; (full as usize) + 1];
            for mask in 0..=(full as usize) {
                let minor = match &cur[mask] {
                    Some(s) => s,
                    None => continue,
                };
                for r in 0..m {
                    if mask & (1 << r) != 0 {
                        continue;
                    }
                    let entry = self.entry(r, col);
                    if entry.valuation().is_none() {
                        continue;
                    }
                    // parity of inversions introduced by assigning row r here
                    let above = ((mask as u32) >> (r + 1)).count_ones();
                    let mut term = minor.mul(entry);
                    if above % 2 == 1 {
                        term = term.neg();
                    }
                    let slot = mask | (1 << r);
                    next[slot] = Some(match next[slot].take() {
                        Some(acc) => acc.add(&term),
                        None => term,
                    });
                }
            }
            cur = next;
        }
        cur[full as usize]
            .take()
            .unwrap_or_else(|| Series::zero(order))
    }
}

/// Result of the order-by-order implicit root expansion.
pub struct RootExpansion<C: Coeff> {
    /// Correction series delta(t) = t_h(t) - t.
    pub delta: Series<C>,
    /// Observed valuation of F(t, t).
    pub sigma1: usize,
    /// Observed valuation of dF/dt_h on the diagonal.
    pub sigma2: usize,
}

/// Solve F(t + delta(t), t) = 0 order by order for the correction series
/// delta.
///
/// `build_f` maps a candidate root series t_h(t) to F(t_h(t), t). The
/// expansion hypotheses (valuation sigma1 of F on the diagonal strictly
/// larger than twice the valuation sigma2 of its t_h-derivative) are
/// measured from probes and enforced; `start_order` is the expected power
/// of the first correction, sigma1 - sigma2.
pub fn implicit_root<C: Coeff>(
    build_f: &mut dyn FnMut(&Series<C>) -> Series<C>,
    start_order: usize,
    target_order: usize,
    order: usize,
) -> Result<RootExpansion<C>> {
    let t = Series::<C>::identity(order);
    let f0 = build_f(&t);
    let sigma1 = match f0.valuation() {
        Some(v) => v,
        None => {
            // F(t, t) vanishes identically through the truncation order:
            // t_h = t is already a root to this accuracy.
            return Ok(RootExpansion {
                delta: Series::zero(target_order),
                sigma1: order + 1,
                sigma2: 0,
            });
        }
    };

    // Probe the t_h-derivative with two monomial perturbations; consistent
    // results guarantee the quadratic remainder did not contaminate the
    // leading coefficient.
    let mut probe = |m: usize| -> Result<(usize, C)> {
        let shifted = t.add(&Series::monomial(C::one(), m, order));
        let diff = build_f(&shifted).sub(&f0);
        let v = diff.valuation().ok_or_else(|| Error::ExpansionFailure {
            context: format!("probe t + t^{m} did not change F"),
        })?;
        if v < m {
            return Err(Error::ExpansionFailure {
                context: format!("probe t + t^{m} produced valuation {v} < {m}"),
            });
        }
        Ok((v - m, diff.coeff(v)))
    };
    let (s2a, f1a) = probe(2)?;
    let (s2b, f1b) = probe(3)?;
    if s2a != s2b || f1a != f1b {
        return Err(Error::ExpansionFailure {
            context: format!(
                "inconsistent derivative probes: sigma2 candidates {s2a} vs {s2b}"
            ),
        });
    }
    let sigma2 = s2a;
    let f1 = f1a;
    if sigma1 <= 2 * sigma2 {
        return Err(Error::ExpansionFailure {
            context: format!("valuation hypothesis violated: sigma1 = {sigma1}, sigma2 = {sigma2}"),
        });
    }
    if sigma1 - sigma2 != start_order {
        return Err(Error::ExpansionFailure {
            context: format!(
                "first correction sits at order {} (expected {start_order})",
                sigma1 - sigma2
            ),
        });
    }
    if target_order + sigma2 > order {
        return Err(Error::ExpansionFailure {
            context: format!(
                "truncation order {order} too small for target {target_order} with sigma2 = {sigma2}"
            ),
        });
    }

    let mut delta = Series::<C>::zero(order);
    let mut residual = f0;
    for _ in 0..=(target_order + 2) {
        let v = match residual.valuation() {
            Some(v) => v,
            None => break,
        };
        if v < sigma2 || v - sigma2 > target_order {
            break;
        }
        let m = v - sigma2;
        let c = residual
            .coeff(v)
            .div_exact(&f1)
            .ok_or_else(|| Error::ExpansionFailure {
                context: "correction coefficient not divisible by F_1' leading term".into(),
            })?
            .neg();
        delta.set_coeff(m, c);
        residual = build_f(&t.add(&delta));
    }
    Ok(RootExpansion {
        delta: delta.truncate(target_order),
        sigma1,
        sigma2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    type S = Series<GaussianRational>;

    fn gr(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_rational(rat(n, d))
    }

    fn poly(cs: &[(i64, i64)], order: usize) -> S {
        let mut s = S::zero(order);
        for (k, &(n, d)) in cs.iter().enumerate() {
            s.set_coeff(k, gr(n, d));
        }
        s
    }

    #[test]
    fn product_of_conjugate_binomials() {
        let a = poly(&[(1, 1), (1, 1)], 6);
        let b = poly(&[(1, 1), (-1, 1)], 6);
        assert_eq!(a.mul(&b), poly(&[(1, 1), (0, 1), (-1, 1)], 6));
    }

    #[test]
    fn geometric_series_by_division() {
        let one = S::one(8);
        let denom = poly(&[(1, 1), (-1, 1)], 8);
        let q = one.div(&denom).unwrap();
        for n in 0..=8 {
            assert_eq!(q.coeff(n), gr(1, 1), "coefficient of t^{n}");
        }
    }

    #[test]
    fn division_respects_valuations() {
        // (t^2 + t^3) / t = t + t^2
        let a = poly(&[(0, 1), (0, 1), (1, 1), (1, 1)], 6);
        let b = S::identity(6);
        let q = a.div(&b).unwrap();
        assert_eq!(q.coeff(1), gr(1, 1));
        assert_eq!(q.coeff(2), gr(1, 1));
        assert_eq!(q.order(), 5);
        assert!(b.div(&a.mul(&a)).is_err());
        assert!(a.div(&S::zero(6)).is_err());
    }

    #[test]
    fn cosine_composed_with_doubled_argument() {
        // term-by-term composition oracle: cos(2t) = 1 - 2t^2 + (2/3)t^4
        let cos = elementary_series::<GaussianRational>(ElementaryKind::Cos, &rat_int(1), 4);
        let two_t = S::identity(4).scale(&gr(2, 1));
        let c = cos.compose(&two_t).unwrap();
        assert_eq!(c, poly(&[(1, 1), (0, 1), (-2, 1), (0, 1), (2, 3)], 4));
        // direct scale parameter must agree
        let direct = elementary_series::<GaussianRational>(ElementaryKind::Cos, &rat_int(2), 4);
        assert_eq!(c, direct);
    }

    #[test]
    fn composition_requires_zero_constant_term() {
        let cos = elementary_series::<GaussianRational>(ElementaryKind::Cos, &rat_int(1), 4);
        let bad = S::one(4);
        assert!(cos.compose(&bad).is_err());
    }

    #[test]
    fn elementary_examples() {
        let e = elementary_series::<GaussianRational>(ElementaryKind::ExpI, &rat_int(1), 2);
        assert_eq!(e.coeff(0), gr(1, 1));
        assert_eq!(e.coeff(1), GaussianRational::new(rat_int(0), rat_int(1)));
        assert_eq!(e.coeff(2), gr(-1, 2));

        let s = elementary_series::<GaussianRational>(ElementaryKind::Sin, &rat_int(1), 1);
        assert_eq!(s, S::identity(1));
    }

    #[test]
    fn pythagorean_identity_to_order_12() {
        let cos = elementary_series::<GaussianRational>(ElementaryKind::Cos, &rat_int(1), 12);
        let sin = elementary_series::<GaussianRational>(ElementaryKind::Sin, &rat_int(1), 12);
        let lhs = cos.mul(&cos).add(&sin.mul(&sin));
        assert_eq!(lhs, S::one(12));
    }

    #[test]
    fn det_small_cases() {
        let f = poly(&[(2, 1), (5, 1)], 5);
        let m1 = SeriesMatrix::new(1, vec![f.clone()]);
        assert_eq!(m1.det(), f);

        let t = S::identity(5);
        let m2 = SeriesMatrix::new(2, vec![S::one(5), t.clone(), t.clone(), S::one(5)]);
        assert_eq!(m2.det(), poly(&[(1, 1), (0, 1), (-1, 1)], 5));
    }

    #[test]
    fn det_matches_permutation_sum_for_3x3() {
        // permutation-sum oracle on a 3x3 with rational-series entries
        let e = |cs: &[(i64, i64)]| poly(cs, 4);
        let a = vec![
            e(&[(1, 1), (1, 2)]),
            e(&[(0, 1), (1, 3)]),
            e(&[(2, 1)]),
            e(&[(1, 1), (-1, 1)]),
            e(&[(3, 1), (0, 1), (1, 5)]),
            e(&[(0, 1), (0, 1), (1, 1)]),
            e(&[(1, 2), (1, 7)]),
            e(&[(0, 1), (2, 1)]),
            e(&[(1, 1), (0, 1), (0, 1), (1, 1)]),
        ];
        let m = SeriesMatrix::new(3, a.clone());
        let idx = |i: usize, j: usize| a[3 * i + j].clone();
        let perm_sum = idx(0, 0)
            .mul(&idx(1, 1))
            .mul(&idx(2, 2))
            .add(&idx(0, 1).mul(&idx(1, 2)).mul(&idx(2, 0)))
            .add(&idx(0, 2).mul(&idx(1, 0)).mul(&idx(2, 1)))
            .sub(&idx(0, 2).mul(&idx(1, 1)).mul(&idx(2, 0)))
            .sub(&idx(0, 1).mul(&idx(1, 0)).mul(&idx(2, 2)))
            .sub(&idx(0, 0).mul(&idx(1, 2)).mul(&idx(2, 1)));
        assert_eq!(m.det(), perm_sum);
    }

    #[test]
    fn implicit_root_on_explicit_function() {
        // F(t_h, t) = t_h - t - t^3 has the explicit correction delta = t^3.
        let order = 10;
        let mut build = |th: &S| {
            let t = S::identity(order);
            let t3 = S::monomial(GaussianRational::one(), 3, order);
            th.sub(&t).sub(&t3)
        };
        let exp = implicit_root(&mut build, 3, 8, order).unwrap();
        assert_eq!(exp.sigma1, 3);
        assert_eq!(exp.sigma2, 0);
        let mut expected = S::zero(8);
        expected.set_coeff(3, GaussianRational::one());
        assert_eq!(exp.delta, expected);
    }

    #[test]
    fn implicit_root_with_feedback_terms() {
        // F(t_h, t) = (t_h - t) * (1 + t_h) - t^4: delta solves a fixed point
        // delta = t^4/(1 + t + delta); check residual vanishes exactly.
        let order = 12;
        let target = 9;
        let mut build = |th: &S| {
            let t = S::identity(order);
            let t4 = S::monomial(GaussianRational::one(), 4, order);
            th.sub(&t).mul(&S::one(order).add(th)).sub(&t4)
        };
        let exp = implicit_root(&mut build, 4, target, order).unwrap();
        let t = S::identity(order);
        let residual = build(&t.add(&exp.delta.truncate(order)));
        let v = residual.valuation();
        assert!(v.map_or(true, |v| v > target), "residual valuation {v:?}");
    }

    #[test]
    fn gamma_poly_ring_and_exact_division() {
        let g = GammaPoly::gamma();
        let a = g.mul(&g).add(&GammaPoly::one()); // gamma^2 + 1
        let b = g.add(&GammaPoly::from_gaussian(&GaussianRational::i()));
        // gamma^2 + 1 = (gamma + i)(gamma - i)
        let c = g.sub(&GammaPoly::from_gaussian(&GaussianRational::i()));
        assert_eq!(b.mul(&c), a);
        assert_eq!(a.div_exact(&b).unwrap(), c);
        assert!(a
            .div_exact(&g.add(&GammaPoly::one()))
            .is_none());
    }

    #[test]
    fn formal_gamma_series_roundtrip() {
        // (1 + gamma t)(1 - gamma t) = 1 - gamma^2 t^2
        let order = 4;
        let g = GammaPoly::gamma();
        let mut a = Series::<GammaPoly>::one(order);
        a.set_coeff(1, g.clone());
        let mut b = Series::<GammaPoly>::one(order);
        b.set_coeff(1, g.neg());
        let prod = a.mul(&b);
        assert_eq!(prod.coeff(0), GammaPoly::one());
        assert!(prod.coeff(1).is_zero());
        assert_eq!(prod.coeff(2), g.mul(&g).neg());
    }
}
