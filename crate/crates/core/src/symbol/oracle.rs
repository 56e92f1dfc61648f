//! Independent 2D stencil assembly of the Bloch symbol.
//!
//! Cross-check for the Kronecker construction in [`super::symbol_nd`]: sums
//! the scheme's bilinear form over neighbor translates of the generating
//! nodes using straight 2D Gauss quadrature for the volume terms and the
//! per-element constancy of p-th derivatives for the face penalty. No
//! element matrices or tensor factorizations are reused, so agreement with
//! the Kronecker route is a genuine two-route check.

use num_complex::Complex64;

use crate::basis::{lagrange_basis, pth_derivative_values, Polynomial};
use crate::error::Result;
use crate::exact::to_f64;
use crate::linalg::gauss_legendre_unit;
use crate::symbol::SymbolMatrix;

struct Basis1d {
    p: i64,
    lambda: Vec<Polynomial>,
    dlambda: Vec<Polynomial>,
    pth: Vec<f64>,
}

impl Basis1d {
    fn new(p: usize) -> Result<Self> {
        let lambda = lagrange_basis(p)?;
        let dlambda = lambda.iter().map(Polynomial::derivative).collect();
        let pth = pth_derivative_values(p)?.iter().map(to_f64).collect();
        Ok(Self {
            p: p as i64,
            lambda,
            dlambda,
            pth,
        })
    }

    /// Elements supporting global node a: e with e p <= a <= (e+1) p.
    fn support(&self, a: i64) -> std::ops::RangeInclusive<i64> {
        let hi = a.div_euclid(self.p);
        let lo = (a - self.p) .div_euclid(self.p) + if (a - self.p).rem_euclid(self.p) == 0 { 0 } else { 1 };
        lo..=hi
    }

    fn value(&self, a: i64, x: f64) -> f64 {
        let e = x.floor() as i64;
        let local = a - e * self.p;
        if (0..=self.p).contains(&local) {
            self.lambda[local as usize].eval_f64(x - e as f64)
        } else {
            0.0
        }
    }

    fn deriv(&self, a: i64, x: f64) -> f64 {
        let e = x.floor() as i64;
        let local = a - e * self.p;
        if (0..=self.p).contains(&local) {
            self.dlambda[local as usize].eval_f64(x - e as f64)
        } else {
            0.0
        }
    }

    /// Jump of the constant p-th derivative across the face at x = v.
    fn jump(&self, a: i64, v: i64) -> f64 {
        let right = {
            let local = a - v * self.p;
            if (0..=self.p).contains(&local) {
                self.pth[local as usize]
            } else {
                0.0
            }
        };
        let left = {
            let local = a - (v - 1) * self.p;
            if (0..=self.p).contains(&local) {
                self.pth[local as usize]
            } else {
                0.0
            }
        };
        right - left
    }
}

/// p^2 x p^2 symbol entry-by-entry from the translated bilinear form, in
/// the same lexicographic generating-node ordering as the Kronecker route.
pub fn direct_stencil_2d(
    p: usize,
    t: f64,
    t_h: f64,
    theta: f64,
    gamma: f64,
) -> Result<SymbolMatrix> {
    let basis = Basis1d::new(p)?;
    let (qx, qw) = gauss_legendre_unit(p + 2);
    let th1 = t_h * theta.cos();
    let th2 = t_h * theta.sin();
    let ksq = t * t;

    let pitch = p as i64;
    let mass_1d = |a: i64, b: i64| -> f64 {
        let mut acc = 0.0;
        for e in basis.support(a) {
            if !basis.support(b).contains(&e) {
                continue;
            }
            for (x, w) in qx.iter().zip(&qw) {
                let xx = e as f64 + x;
                acc += w * basis.value(a, xx) * basis.value(b, xx);
            }
        }
        acc
    };

    let a_form = |a: (i64, i64), b: (i64, i64)| -> f64 {
        // volume part by 2D quadrature over shared elements
        let mut acc = 0.0;
        for e1 in basis.support(a.0) {
            if !basis.support(b.0).contains(&e1) {
                continue;
            }
            for e2 in basis.support(a.1) {
                if !basis.support(b.1).contains(&e2) {
                    continue;
                }
                for (x, wx) in qx.iter().zip(&qw) {
                    let xx = e1 as f64 + x;
                    let ax = basis.value(a.0, xx);
                    let dax = basis.deriv(a.0, xx);
                    let bx = basis.value(b.0, xx);
                    let dbx = basis.deriv(b.0, xx);
                    for (y, wy) in qx.iter().zip(&qw) {
                        let yy = e2 as f64 + y;
                        let ay = basis.value(a.1, yy);
                        let day = basis.deriv(a.1, yy);
                        let by = basis.value(b.1, yy);
                        let dby = basis.deriv(b.1, yy);
                        let grad = dax * ay * dbx * by + ax * day * bx * dby;
                        acc += wx * wy * (grad - ksq * ax * ay * bx * by);
                    }
                }
            }
        }
        // penalty: vertical faces (jump in x) and horizontal faces (jump in y)
        let mut pen = 0.0;
        for v in -3..=4i64 {
            let ja = basis.jump(a.0, v);
            if ja != 0.0 {
                let jb = basis.jump(b.0, v);
                if jb != 0.0 {
                    pen += ja * jb * mass_1d(a.1, b.1);
                }
            }
            let ja = basis.jump(a.1, v);
            if ja != 0.0 {
                let jb = basis.jump(b.1, v);
                if jb != 0.0 {
                    pen += ja * jb * mass_1d(a.0, b.0);
                }
            }
        }
        acc + gamma * pen
    };

    let dim = p * p;
    let mut out = SymbolMatrix::zeros(dim);
    for s1 in 0..p as i64 {
        for s2 in 0..p as i64 {
            let row = (s1 * pitch + s2) as usize;
            for q1 in 0..p as i64 {
                for q2 in 0..p as i64 {
                    let col = (q1 * pitch + q2) as usize;
                    let mut entry = Complex64::new(0.0, 0.0);
                    for m1 in -2..=2i64 {
                        for m2 in -2..=2i64 {
                            let v = a_form(
                                (q1 + m1 * pitch, q2 + m2 * pitch),
                                (s1, s2),
                            );
                            if v != 0.0 {
                                let phase = Complex64::from_polar(
                                    1.0,
                                    m1 as f64 * th1 + m2 as f64 * th2,
                                );
                                entry += phase * v;
                            }
                        }
                    }
                    out.set(row, col, entry);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::symbol_nd;

    #[test]
    fn kronecker_matches_direct_stencil() {
        for p in [1usize, 2] {
            let (t, th, theta, gamma) = (0.3, 0.31, 0.6, 0.02);
            let kron = symbol_nd(2, p, t, th, &[theta], gamma).unwrap();
            let direct = direct_stencil_2d(p, t, th, theta, gamma).unwrap();
            let scale = kron.max_norm().max(1.0);
            for i in 0..kron.dim {
                for j in 0..kron.dim {
                    let d = (kron.entry(i, j) - direct.entry(i, j)).norm();
                    assert!(d <= 1e-12 * scale, "p={p} ({i},{j}) differ by {d:.3e}");
                }
            }
        }
    }

    #[test]
    fn direct_stencil_axis_direction_is_consistent_with_1d() {
        // at theta = 0, p = 1 the 2D entry reduces to the 1D symbol value
        let (t, th, gamma) = (0.25, 0.26, 0.01);
        let direct = direct_stencil_2d(1, t, th, 0.0, gamma).unwrap();
        let d1 = crate::symbol::symbol_1d(1, t, th, gamma).unwrap();
        // second Kronecker factor contributes M^0 * D^{0,0} = 0 at p = 1
        let m0 = crate::symbol::mass_symbol(1, 0.0).unwrap();
        let expect = d1.entry(0, 0) * m0.entry(0, 0);
        assert!((direct.entry(0, 0) - expect).norm() < 1e-12);
    }
}
