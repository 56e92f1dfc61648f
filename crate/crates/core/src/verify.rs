//! Aggregated identity suites.
//!
//! Each suite pits a closed form against an independent evaluation route
//! (brute-force sums, linear solves, direct stencil assembly, quadrature)
//! and reports a pass/fail with measured details. The CLI `verify`
//! subcommand and the acceptance tests both run these.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::Result;
use crate::fem::{assemble, ExampleProblem, TensorMesh};
use crate::symbol::exact::dhat_11_cofactor;
use crate::symbol::oracle::direct_stencil_2d;
use crate::symbol::{
    comb_identity_n, condensation_coeffs, condensed, q_transform, symbol_1d, symbol_nd,
};

/// Outcome of one identity suite.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }
}

/// A2 = (-1)^p A1 for the condensation coefficients.
pub fn a2_parity_suite() -> CheckResult {
    let name = "condensation-a2-parity";
    let mut worst: f64 = 0.0;
    for p in 1..=6 {
        for t in [0.1, 0.5, 1.0] {
            let cc = match condensation_coeffs(p, t) {
                Ok(c) => c,
                Err(e) => return CheckResult::fail(name, format!("p={p} t={t}: {e}")),
            };
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let rel = (cc.a2 - sign * cc.a1).abs() / cc.a1.abs().max(1.0);
            worst = worst.max(rel);
        }
    }
    if worst <= 1e-12 {
        CheckResult::pass(name, format!("worst relative defect {worst:.3e}"))
    } else {
        CheckResult::fail(name, format!("worst relative defect {worst:.3e} > 1e-12"))
    }
}

/// Brute-force double sum equals the closed form for all valid indices.
pub fn comb_identity_suite() -> CheckResult {
    let name = "combinatorial-identity";
    let mut count = 0;
    for p in 1..=12 {
        for j in 1..=(p / 2 + 1) {
            if let Err(e) = comb_identity_n(p, j) {
                return CheckResult::fail(name, format!("p={p} j={j}: {e}"));
            }
            count += 1;
        }
    }
    CheckResult::pass(name, format!("{count} index pairs equal exactly"))
}

/// Decay rates of the condensed matrix: |D~_11| = O(t^{2p+2}) and
/// |D~_{1,j+1}| = O(t^{p+2}), estimated by halving t.
pub fn condensed_decay_suite() -> CheckResult {
    let name = "condensed-decay-rates";
    let gamma = 0.05;
    let condensed_at = |p: usize, t: f64| -> Result<crate::symbol::SymbolMatrix> {
        let cc = condensation_coeffs(p, t)?;
        let q = q_transform(p, t, &cc);
        Ok(condensed(&q, &symbol_1d(p, t, t, gamma)?))
    };
    let mut details = Vec::new();
    for p in 1..=4usize {
        let (t1, t2) = (0.3, 0.15);
        let (m1, m2) = match (condensed_at(p, t1), condensed_at(p, t2)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return CheckResult::fail(name, format!("p={p}: {e}")),
        };
        let order11 = (m1.entry(0, 0).norm() / m2.entry(0, 0).norm()).log2();
        let expect11 = 2.0 * p as f64 + 2.0;
        if (order11 - expect11).abs() > 0.2 {
            return CheckResult::fail(
                name,
                format!("p={p}: (1,1) decay order {order11:.3} vs {expect11}"),
            );
        }
        details.push(format!("p={p}:(1,1)~t^{order11:.2}"));
        if p >= 2 {
            let orderb = (m1.entry(0, 1).norm() / m2.entry(0, 1).norm()).log2();
            let expectb = p as f64 + 2.0;
            if (orderb - expectb).abs() > 0.2 {
                return CheckResult::fail(
                    name,
                    format!("p={p}: border decay order {orderb:.3} vs {expectb}"),
                );
            }
            details.push(format!("p={p}:(1,2)~t^{orderb:.2}"));
        }
    }
    CheckResult::pass(name, details.join(" "))
}

/// Kronecker-assembled 2D symbol equals the direct stencil assembly.
pub fn kronecker_stencil_suite() -> CheckResult {
    let name = "kronecker-vs-stencil";
    let (t, th, theta, gamma) = (0.3, 0.31, 0.6, 0.02);
    let mut worst: f64 = 0.0;
    for p in [1usize, 2] {
        let kron = match symbol_nd(2, p, t, th, &[theta], gamma) {
            Ok(m) => m,
            Err(e) => return CheckResult::fail(name, format!("p={p}: {e}")),
        };
        let direct = match direct_stencil_2d(p, t, th, theta, gamma) {
            Ok(m) => m,
            Err(e) => return CheckResult::fail(name, format!("p={p}: {e}")),
        };
        let scale = kron.max_norm().max(1.0);
        for i in 0..kron.dim {
            for j in 0..kron.dim {
                worst = worst.max((kron.entry(i, j) - direct.entry(i, j)).norm() / scale);
            }
        }
    }
    if worst <= 1e-12 {
        CheckResult::pass(name, format!("worst entrywise defect {worst:.3e}"))
    } else {
        CheckResult::fail(name, format!("worst entrywise defect {worst:.3e} > 1e-12"))
    }
}

/// The (1,1)-cofactor anchoring the 2D expansion is nonzero.
pub fn dhat_cofactor_suite() -> CheckResult {
    let name = "2d-cofactor-nonzero";
    let mut vals = Vec::new();
    for p in 1..=4 {
        match dhat_11_cofactor(p) {
            Ok(c) if !c.is_zero() => vals.push(format!("p={p}:{c}")),
            Ok(_) => return CheckResult::fail(name, format!("p={p}: cofactor vanished")),
            Err(e) => return CheckResult::fail(name, format!("p={p}: {e}")),
        }
    }
    CheckResult::pass(name, vals.join(" "))
}

/// Penalty form vanishes on interpolants of globally smooth degree-p
/// polynomials, relative to the matrix norm.
pub fn penalty_consistency_suite() -> CheckResult {
    let name = "penalty-consistency";
    let mut worst: f64 = 0.0;
    for p in 1..=3usize {
        let mesh = TensorMesh::new(1, 6).unwrap();
        let with = match assemble(&mesh, p, 3.0, 0.5, ExampleProblem::Ex1) {
            Ok(s) => s,
            Err(e) => return CheckResult::fail(name, format!("1d p={p}: {e}")),
        };
        let without = assemble(&mesh, p, 3.0, 0.0, ExampleProblem::Ex1).unwrap();
        let n1 = mesh.nodes_per_dim(p);
        let v: Vec<Complex64> = (0..n1)
            .map(|i| {
                let x = i as f64 / (n1 - 1) as f64;
                Complex64::new(x.powi(p as i32), 0.0)
            })
            .collect();
        let quad = j_form(&with.matrix, &without.matrix, &v);
        worst = worst.max(quad / with.matrix.norm_inf());

        if p <= 2 {
            let mesh2 = TensorMesh::new(2, 3).unwrap();
            let w2 = match assemble(&mesh2, p, 3.0, 0.5, ExampleProblem::Ex2PlaneWave) {
                Ok(s) => s,
                Err(e) => return CheckResult::fail(name, format!("2d p={p}: {e}")),
            };
            let wo2 = assemble(&mesh2, p, 3.0, 0.0, ExampleProblem::Ex2PlaneWave).unwrap();
            let m1 = mesh2.nodes_per_dim(p);
            let mut v2 = vec![Complex64::zero(); m1 * m1];
            for ix in 0..m1 {
                for iy in 0..m1 {
                    let x = ix as f64 / (m1 - 1) as f64;
                    let y = iy as f64 / (m1 - 1) as f64;
                    v2[ix * m1 + iy] =
                        Complex64::new(x.powi(p as i32) + 0.7 * y.powi(p as i32), 0.0);
                }
            }
            let quad2 = j_form(&w2.matrix, &wo2.matrix, &v2);
            worst = worst.max(quad2 / w2.matrix.norm_inf());
        }
    }
    if worst <= 1e-12 {
        CheckResult::pass(name, format!("worst J-form ratio {worst:.3e}"))
    } else {
        CheckResult::fail(name, format!("worst J-form ratio {worst:.3e} > 1e-12"))
    }
}

fn j_form(with: &crate::linalg::Csr, without: &crate::linalg::Csr, v: &[Complex64]) -> f64 {
    let jv: Vec<Complex64> = with
        .matvec(v)
        .iter()
        .zip(without.matvec(v))
        .map(|(a, b)| a - b)
        .collect();
    v.iter()
        .zip(&jv)
        .map(|(vi, ji)| vi.conj() * ji)
        .sum::<Complex64>()
        .norm()
}

/// Run every suite.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        a2_parity_suite(),
        comb_identity_suite(),
        condensed_decay_suite(),
        kronecker_stencil_suite(),
        dhat_cofactor_suite(),
        penalty_consistency_suite(),
    ]
}
