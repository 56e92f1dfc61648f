//! Discrete wave numbers and phase-error analysis.
//!
//! The discrete wave number k_h is the root in t_h of the real part of the
//! symbol determinant nearest to t = kh. On top of the root finder this
//! module provides the closed-form penalty parameter gamma_0, the
//! dispersion-free gamma_opt found by a safeguarded root search in gamma,
//! the exact phase-error expansion extracted with the series backend, and
//! log-log order fitting for convergence studies.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{factorial, to_f64, GaussianRational, Int, Rational};
use crate::linalg::brent;
use crate::series::{implicit_root, Coeff, GammaPoly, Series};
use crate::symbol::{exact::symbol_1d_series, symbol_1d, symbol_nd, SymbolMatrix};

/// Validity window for kh/p in the numeric root finder.
pub const VALIDITY_WINDOW: f64 = 1.2;

/// One dispersion sample.
#[derive(Clone, Debug)]
pub struct DispersionRecord {
    pub d: usize,
    pub p: usize,
    pub k: f64,
    pub h: f64,
    pub t: f64,
    pub gamma: f64,
    pub direction: Vec<f64>,
    pub k_h: f64,
    pub phase_diff: f64,
}

/// (1/(2p+1)) (p!/(2p)!)^2, the leading FEM dispersion coefficient.
pub fn cstar(p: usize) -> Rational {
    let r = Rational::new(factorial(p), factorial(2 * p));
    Rational::new(Int::one(), Int::from(2 * p as i64 + 1)) * &r * &r
}

/// Closed-form penalty parameter cancelling the leading dispersion term.
pub fn gamma0(p: usize) -> Rational {
    -cstar(p)
}

pub fn gamma0_f64(p: usize) -> f64 {
    to_f64(&gamma0(p))
}

/// The coefficient c_p of the t^{2p+3} phase-error term at gamma = gamma_0,
/// from the double-factorial formula: |gamma_0|/24 |r_p/(2p+3)!! - 1| with
/// r_p = 9 for p = 1 and 24 (2p-3)!! otherwise.
pub fn cp_formula(p: usize) -> Rational {
    let r_p = if p == 1 {
        Rational::from_integer(Int::from(9))
    } else {
        Rational::from_integer(Int::from(24) * crate::exact::double_factorial(2 * p as i64 - 3))
    };
    let dd = Rational::from_integer(crate::exact::double_factorial(2 * p as i64 + 3));
    let inner = (r_p / dd - Rational::one()).abs();
    gamma0(p).abs() / Rational::from_integer(Int::from(24)) * inner
}

/// Real part of the determinant with a Hermitian-residue gate: the
/// imaginary part must be negligible against both the determinant itself
/// and its Hadamard-style magnitude bound (the latter keeps the gate
/// meaningful right at a root, where the determinant vanishes).
pub fn re_det_checked(m: &SymbolMatrix) -> Result<f64> {
    let det = m.det();
    let scale = m.det_scale().max(det.norm());
    if det.im.abs() > 1e-10 * scale {
        return Err(Error::HermitianityLoss {
            im: det.im.abs(),
            scale,
        });
    }
    Ok(det.re)
}

fn check_window(p: usize, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::DegenerateInput(format!("t = kh = {t} must be positive")));
    }
    if t / p as f64 > VALIDITY_WINDOW * (1.0 + 1e-12) {
        return Err(Error::DegenerateInput(format!(
            "kh/p = {} outside validity window {}",
            t / p as f64,
            VALIDITY_WINDOW
        )));
    }
    Ok(())
}

/// Discrete wave number: the root t_h of Re Det(D) nearest to t = kh,
/// divided by h. Brackets from half-width 1e-3 t^{2p+1} (the predicted gap
/// scale), doubling until a sign change and capping at 0.4 t.
pub fn discrete_wavenumber(
    d: usize,
    p: usize,
    k: f64,
    h: f64,
    gamma: f64,
    direction: &[f64],
) -> Result<f64> {
    let t = k * h;
    check_window(p, t)?;
    let g = |th: f64| -> Result<f64> {
        re_det_checked(&symbol_nd(d, p, t, th, direction, gamma)?)
    };
    let mut w = 1e-3 * t.powi(2 * p as i32 + 1);
    let cap = 0.4 * t;
    let mut lo;
    let mut hi;
    loop {
        lo = t - w;
        hi = t + w;
        let (glo, ghi) = (g(lo)?, g(hi)?);
        if glo == 0.0 {
            return Ok(lo / h);
        }
        if ghi == 0.0 {
            return Ok(hi / h);
        }
        if glo * ghi < 0.0 {
            break;
        }
        w *= 2.0;
        if w > cap {
            return Err(Error::RootNotFound {
                context: format!(
                    "no sign change of Re det within |t_h - t| <= {cap:.3e} (d={d}, p={p}, t={t}, gamma={gamma}, direction={direction:?})"
                ),
            });
        }
    }
    // the closure result inside brent cannot fail where the bracket endpoints succeeded
    let root = brent(
        |th| {
            re_det_checked(&symbol_nd(d, p, t, th, direction, gamma).expect("symbol"))
                .unwrap_or(f64::NAN)
        },
        lo,
        hi,
        1e-14,
        200,
    )?;
    Ok(root / h)
}

/// |k - k_h| in a single direction.
pub fn phase_difference_at(
    d: usize,
    p: usize,
    k: f64,
    h: f64,
    gamma: f64,
    direction: &[f64],
) -> Result<f64> {
    Ok((k - discrete_wavenumber(d, p, k, h, gamma, direction)?).abs())
}

/// Phase difference as the maximum of |k - k_h| over a uniform direction
/// sweep on [0, pi/2] (trivial in 1D); returns the maximum and the argmax
/// direction. `theta_steps` counts subdivisions, so the sweep has
/// theta_steps + 1 points per angle including both axis directions.
pub fn phase_difference(
    d: usize,
    p: usize,
    k: f64,
    h: f64,
    gamma: f64,
    theta_steps: usize,
) -> Result<(f64, Vec<f64>)> {
    let directions: Vec<Vec<f64>> = match d {
        1 => vec![vec![]],
        2 => (0..=theta_steps)
            .map(|j| vec![j as f64 * std::f64::consts::FRAC_PI_2 / theta_steps as f64])
            .collect(),
        3 => {
            let mut out = Vec::new();
            for j1 in 0..=theta_steps {
                for j2 in 0..=theta_steps {
                    out.push(vec![
                        j1 as f64 * std::f64::consts::FRAC_PI_2 / theta_steps as f64,
                        j2 as f64 * std::f64::consts::FRAC_PI_2 / theta_steps as f64,
                    ]);
                }
            }
            out
        }
        _ => {
            return Err(Error::DegenerateInput(format!(
                "dimension {d} unsupported"
            )))
        }
    };
    let results: Vec<Result<(f64, Vec<f64>)>> = directions
        .par_iter()
        .map(|dir| {
            phase_difference_at(d, p, k, h, gamma, dir).map(|v| (v, dir.clone()))
        })
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in results {
        let (v, dir) = r?;
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, dir));
        }
    }
    Ok(best.unwrap())
}

/// Default number of sweep subdivisions per angle.
pub fn default_theta_steps(d: usize) -> usize {
    match d {
        3 => 16,
        _ => 64,
    }
}

/// Dispersion-free penalty parameter: the root in gamma of
/// Det(D^{t,t}(gamma)) = 0 nearest to gamma_0, found by expanding a
/// bracket around gamma_0 (up to 10^3 |gamma_0|) and refining with Brent.
pub fn gamma_opt(p: usize, t: f64) -> Result<f64> {
    check_window(p, t)?;
    let g0 = gamma0_f64(p);
    let q = |gamma: f64| -> Result<f64> { re_det_checked(&symbol_1d(p, t, t, gamma)?) };
    let q0 = q(g0)?;
    if q0 == 0.0 {
        return Ok(g0);
    }
    let mut w = 1e-3 * g0.abs();
    let cap = 1e3 * g0.abs();
    loop {
        for (lo, hi) in [(g0 - w, g0), (g0, g0 + w)] {
            let (qlo, qhi) = (q(lo)?, q(hi)?);
            if qlo * qhi <= 0.0 {
                return brent(
                    |gamma| {
                        re_det_checked(&symbol_1d(p, t, t, gamma).expect("symbol"))
                            .unwrap_or(f64::NAN)
                    },
                    lo,
                    hi,
                    1e-15,
                    300,
                );
            }
        }
        w *= 2.0;
        if w > cap {
            return Err(Error::RootNotFound {
                context: format!(
                    "no gamma root within |gamma - gamma0| <= 1e3 |gamma0| (p={p}, t={t})"
                ),
            });
        }
    }
}

/// Closed-form gamma_opt for p = 1 (cross-check oracle):
/// ((6+t^2) cos t - 6 + 2 t^2) / 12 / (1 - cos t)^2.
pub fn gamma_opt_p1_closed_form(t: f64) -> f64 {
    ((6.0 + t * t) * t.cos() - 6.0 + 2.0 * t * t) / 12.0 / (1.0 - t.cos()).powi(2)
}

/// How the penalty parameter enters an exact expansion.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaMode {
    /// Carry gamma as a formal polynomial variable.
    Formal,
    /// Substitute the exact closed-form gamma_0(p).
    Gamma0,
    /// Substitute a fixed exact value.
    Fixed(Rational),
}

/// Exact phase expansion: delta(t) = (k_h - k) h as a series in t.
#[derive(Clone, Debug)]
pub struct PhaseExpansion {
    pub p: usize,
    pub gamma: GammaMode,
    /// Nonzero coefficients of delta by power of t; constant polynomials in
    /// gamma unless the mode is formal.
    pub coefficients: Vec<(usize, GammaPoly)>,
}

/// Default truncation order of the determinant series: the c_p term sits
/// at t^{2p+3}, needing the determinant through t^{2p+4}; two safety
/// orders beyond that.
pub fn default_truncation(p: usize) -> usize {
    2 * p + 6
}

/// Exact expansion of delta(t) = t_h(t) - t for a fixed rational gamma.
pub fn phase_expansion_fixed(
    p: usize,
    gamma: &Rational,
    target_order: usize,
) -> Result<Series<GaussianRational>> {
    let order = default_truncation(p).max(target_order + 1);
    let gamma_c = GaussianRational::from_rational(gamma.clone());
    let start = if (cstar(p) + gamma).is_zero() {
        2 * p + 3
    } else {
        2 * p + 1
    };
    let mut build = |th: &Series<GaussianRational>| {
        symbol_1d_series(p, &gamma_c, th)
            .expect("series symbol")
            .det()
    };
    Ok(implicit_root(&mut build, start, target_order, order)?.delta)
}

/// Exact expansion of delta(t) with gamma carried as a formal variable.
pub fn phase_expansion_formal(p: usize, target_order: usize) -> Result<Series<GammaPoly>> {
    let order = default_truncation(p).max(target_order + 1);
    let gamma = GammaPoly::gamma();
    let mut build =
        |th: &Series<GammaPoly>| symbol_1d_series(p, &gamma, th).expect("series symbol").det();
    Ok(implicit_root(&mut build, 2 * p + 1, target_order, order)?.delta)
}

/// Exact phase expansion in record form.
pub fn phase_expansion(p: usize, mode: GammaMode, target_order: usize) -> Result<PhaseExpansion> {
    let delta: Series<GammaPoly> = match &mode {
        GammaMode::Formal => phase_expansion_formal(p, target_order)?,
        GammaMode::Gamma0 => {
            phase_expansion_fixed(p, &gamma0(p), target_order)?.map(GammaPoly::from_gaussian)
        }
        GammaMode::Fixed(g) => {
            phase_expansion_fixed(p, g, target_order)?.map(GammaPoly::from_gaussian)
        }
    };
    let coefficients = (0..=delta.order())
        .filter_map(|n| {
            let c = delta.coeff(n);
            if c.is_zero() {
                None
            } else {
                Some((n, c))
            }
        })
        .collect();
    Ok(PhaseExpansion {
        p,
        gamma: mode,
        coefficients,
    })
}

/// Least-squares slope of log err versus log x.
pub fn order_fit(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "order fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(x, e)| x <= 0.0 || e <= 0.0) {
        return Err(Error::DegenerateInput(
            "order fit needs positive samples".into(),
        ));
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, e) in samples {
        let (lx, ly) = (x.ln(), e.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
