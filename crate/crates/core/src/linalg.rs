//! Small dense/banded linear algebra helpers.
//!
//! Everything here is deliberately plain: pivoted LU on small complex dense
//! matrices (symbol determinants), a banded complex LU with partial pivoting
//! for the FEM systems, cyclic Jacobi for small symmetric eigenvalue
//! problems (conditioning guards), exact rational determinants, Gauss
//! quadrature rules and a Brent root finder.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Determinant of a complex dense matrix (row-major) by pivoted LU.
pub fn complex_det(a: &[Complex64], n: usize) -> Complex64 {
    let mut m = a.to_vec();
    let mut det = Complex64::one();
    for k in 0..n {
        let mut piv = k;
        let mut best = m[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = m[i * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Complex64::zero();
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let akk = m[k * n + k];
        det *= akk;
        for i in (k + 1)..n {
            let l = m[i * n + k] / akk;
            if l.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let v = m[k * n + j];
                m[i * n + j] -= l * v;
            }
        }
    }
    det
}

/// Solve a dense complex system in place; returns the solution.
pub fn complex_solve(a: &[Complex64], b: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        let mut best = m[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = m[i * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Err(Error::SolverFailure(format!(
                "zero pivot at column {k} of dense solve"
            )));
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        let akk = m[k * n + k];
        for i in (k + 1)..n {
            let l = m[i * n + k] / akk;
            if l.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let v = m[k * n + j];
                m[i * n + j] -= l * v;
            }
            let bk = x[k];
            x[i] -= l * bk;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    Ok(x)
}

/// Solve a real symmetric positive-ish system by the same routine.
pub fn real_solve(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let ac: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let bc: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(complex_solve(&ac, &bc, n)?.iter().map(|z| z.re).collect())
}

/// Exact determinant of a rational matrix by fraction-preserving Gaussian
/// elimination with pivoting.
pub fn rational_det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let piv = match (k..n).find(|&i| !m[i][k].is_zero()) {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if piv != k {
            m.swap(k, piv);
            det = -det;
        }
        let akk = m[k][k].clone();
        det *= &akk;
        for i in (k + 1)..n {
            if m[i][k].is_zero() {
                continue;
            }
            let l = &m[i][k] / &akk;
            for j in (k + 1)..n {
                let v = &l * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Eigenvalues of a small dense real symmetric matrix by cyclic Jacobi.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-300 {
            break;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let apq = m[i][j];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[j][j] - m[i][i]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let aik = m[i][k];
                    let ajk = m[j][k];
                    m[i][k] = c * aik - s * ajk;
                    m[j][k] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = m[k][i];
                    let akj = m[k][j];
                    m[k][i] = c * aki - s * akj;
                    m[k][j] = s * aki + c * akj;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Gauss-Legendre nodes/weights on [0,1].
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    (
        xs.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        ws.iter().map(|w| 0.5 * w).collect(),
    )
}

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_value_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_value_deriv(n, x);
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn legendre_value_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Complex band matrix in LAPACK-style band storage with room for pivoting
/// fill: entry (i, j) lives at `ab[j * ld + (kl + ku + i - j)]`.
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ld: usize,
    ab: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ld,
            ab: vec![Complex64::zero(); n * ld],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ld + (self.kl + self.ku + i - j)
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(j + self.kl >= i && i + self.ku >= j, "outside band");
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        // pivoting fill extends the upper bandwidth to kl + ku
        if (j > i && j - i > self.kl + self.ku) || (i > j && i - j > self.kl) {
            return Complex64::zero();
        }
        self.ab[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    /// Factor with partial pivoting. Fill from pivoting extends the upper
    /// bandwidth to `kl + ku`; multipliers are stored in the lower band.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku, ld) = (self.kl, self.ku, self.ld);
        let upper = kl + ku;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let imax = (k + kl).min(n - 1);
            // pivot search down column k (contiguous in storage)
            let col = k * ld + kl + ku;
            let mut piv = k;
            let mut best = self.ab[col].norm_sqr();
            for i in (k + 1)..=imax {
                let v = self.ab[col + (i - k)].norm_sqr();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SolverFailure(format!(
                    "zero pivot at column {k} of banded factorization"
                )));
            }
            pivots[k] = piv;
            let jmax = (k + upper).min(n - 1);
            if piv != k {
                for j in k..=jmax {
                    let ik = j * ld + kl + ku + k - j;
                    let ip = ik + (piv - k);
                    self.ab.swap(ik, ip);
                }
            }
            let akk = self.ab[col];
            for i in (k + 1)..=imax {
                self.ab[col + (i - k)] /= akk;
            }
            for j in (k + 1)..=jmax {
                let akj = self.ab[j * ld + kl + ku + k - j];
                if akj.is_zero() {
                    continue;
                }
                let base = j * ld + kl + ku - j;
                for i in (k + 1)..=imax {
                    let l = self.ab[col + (i - k)];
                    self.ab[base + i] -= l * akj;
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku,
            ld,
            ab: self.ab,
            pivots,
        })
    }

    /// Factor and solve for one right-hand side.
    pub fn solve(self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.factor()?.solve(b))
    }
}

/// Factored band matrix with pivot sequence.
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let upper = kl + ku;
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = self.pivots[k];
            if piv != k {
                x.swap(k, piv);
            }
            let imax = (k + kl).min(n - 1);
            let col = k * ld + kl + ku;
            let xk = x[k];
            for i in (k + 1)..=imax {
                x[i] -= self.ab[col + (i - k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + upper).min(n - 1);
            let mut s = x[k];
            for j in (k + 1)..=jmax {
                s -= self.ab[j * ld + kl + ku + k - j] * x[j];
            }
            x[k] = s / self.ab[k * ld + kl + ku];
        }
        x
    }
}

/// Compressed sparse row matrix over complex doubles.
#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Csr {
    /// Build from unsorted triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::zero(); self.n];
        for i in 0..self.n {
            let mut s = Complex64::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
        y
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        Complex64::zero()
    }

    /// Largest row sum of absolute values (infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Maximal band half-widths (lower, upper).
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn to_band(&self) -> BandMatrix {
        let (kl, ku) = self.bandwidths();
        let mut band = BandMatrix::zeros(self.n, kl, ku);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                band.add(i, self.col_idx[k], self.values[k]);
            }
        }
        band
    }
}

/// Brent root refinement on [a, b] with f(a) f(b) <= 0.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::RootNotFound {
            context: format!("no sign change on [{a}, {b}]"),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1e-300);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    #[test]
    fn dense_det_of_diagonal() {
        let a = vec![
            Complex64::new(2.0, 0.0),
            Complex64::zero(),
            Complex64::zero(),
            Complex64::new(0.0, 3.0),
        ];
        let d = complex_det(&a, 2);
        assert!((d - Complex64::new(0.0, 6.0)).norm() < 1e-14);
    }

    #[test]
    fn dense_solve_roundtrip() {
        let mut rnd = rand_stream(7);
        let n = 12;
        let a: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rnd(), rnd()))
            .collect();
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(rnd(), rnd())).collect();
        let b: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect();
        let got = complex_solve(&a, &b, n).unwrap();
        for i in 0..n {
            assert!((got[i] - x[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn band_solve_matches_dense() {
        let mut rnd = rand_stream(42);
        let n = 40;
        let (kl, ku) = (3, 2);
        let mut dense = vec![Complex64::zero(); n * n];
        let mut band = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in 0..n {
                if i + ku >= j && j + kl >= i {
                    let v = Complex64::new(rnd(), rnd())
                        + if i == j {
                            Complex64::new(3.0, 0.0)
                        } else {
                            Complex64::zero()
                        };
                    dense[i * n + j] = v;
                    band.add(i, j, v);
                }
            }
        }
        let b: Vec<Complex64> = (0..n).map(|_| Complex64::new(rnd(), rnd())).collect();
        let xd = complex_solve(&dense, &b, n).unwrap();
        let xb = band.solve(&b).unwrap();
        for i in 0..n {
            assert!((xd[i] - xb[i]).norm() < 1e-9, "i = {i}");
        }
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in 1..=8usize {
            let (xs, ws) = gauss_legendre_unit(n);
            for deg in 0..(2 * n) {
                let num: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((num - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn csr_from_triplets_sums_duplicates() {
        let t = vec![
            (0, 1, Complex64::new(1.0, 0.0)),
            (1, 0, Complex64::new(2.0, 0.0)),
            (0, 1, Complex64::new(0.5, 0.0)),
            (1, 1, Complex64::new(1.0, 1.0)),
        ];
        let m = Csr::from_triplets(2, t);
        assert_eq!(m.get(0, 1), Complex64::new(1.5, 0.0));
        assert_eq!(m.get(1, 0), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(1.0, 1.0));
        assert_eq!(m.get(0, 0), Complex64::zero());
        let y = m.matvec(&[Complex64::one(), Complex64::one()]);
        assert!((y[0] - Complex64::new(1.5, 0.0)).norm() < 1e-15);
        assert!((y[1] - Complex64::new(3.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn brent_finds_cosine_root() {
        let root = brent(|x| x.cos(), 1.0, 2.0, 1e-15, 200).unwrap();
        assert!((root - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn rational_det_examples() {
        use crate::exact::rat_int;
        let a = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(3), rat_int(4)],
        ];
        assert_eq!(rational_det(&a), rat_int(-2));
    }
}
