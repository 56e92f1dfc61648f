//! CIP-FEM Helmholtz solver on tensor-product meshes.
//!
//! Reproduces the paper-style experiments: assembly of the continuous
//! Galerkin bilinear form with the p-th normal-derivative jump penalty,
//! Robin (and, in 1D, Dirichlet) boundary conditions, banded direct solves
//! with residual verification, relative H^1 errors against the analytic
//! solutions, and the critical-mesh-size search.
//!
//! Two benchmark problems are built in: a 1D problem with constant source,
//! homogeneous Dirichlet condition on the left and an absorbing Robin
//! condition on the right, and a 2D plane-wave problem on the unit square
//! with Robin data derived from the exact solution sin(k (x+y) / sqrt(2)).

use num_complex::Complex64;
use num_traits::Zero;
use std::time::Instant;

use crate::basis::{lagrange_basis, pth_derivative_values, Polynomial, P_MAX};
use crate::dispersion::{gamma0_f64, gamma_opt};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::linalg::{gauss_legendre_unit, Csr};

/// Uniform tensor-product mesh of the unit interval/square.
#[derive(Clone, Debug)]
pub struct TensorMesh {
    pub d: usize,
    pub n: usize,
    pub h: f64,
}

impl TensorMesh {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if !(d == 1 || d == 2) || n == 0 {
            return Err(Error::DegenerateInput(format!(
                "mesh needs d in {{1,2}} and n >= 1 (got d={d}, n={n})"
            )));
        }
        Ok(Self {
            d,
            n,
            h: 1.0 / n as f64,
        })
    }

    /// Global nodes per dimension for order p.
    pub fn nodes_per_dim(&self, p: usize) -> usize {
        self.n * p + 1
    }

    pub fn dofs(&self, p: usize) -> usize {
        self.nodes_per_dim(p).pow(self.d as u32)
    }
}

/// The two benchmark problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleProblem {
    /// 1D: -u'' - k^2 u = 1 on (0,1), u(0) = 0, u'(1) + i k u(1) = 0.
    Ex1,
    /// 2D: -Laplace(u) - k^2 u = 0 on the unit square, Robin data from the
    /// exact diagonal plane wave sin(k (x+y)/sqrt(2)).
    Ex2PlaneWave,
}

impl ExampleProblem {
    pub fn dim(&self) -> usize {
        match self {
            ExampleProblem::Ex1 => 1,
            ExampleProblem::Ex2PlaneWave => 2,
        }
    }

    /// Exact solution value and gradient.
    ///
    /// For Ex1 the closed form is derived from the boundary system: with
    /// the particular solution -1/k^2 of -u'' - k^2 u = 1, the conditions
    /// u(0) = 0 and u'(1) + i k u(1) = 0 pin the homogeneous modes to
    /// u(x) = [(cos kx - 1) + i (e^{-ik} - 1) sin kx] / k^2.
    pub fn exact(&self, k: f64, x: &[f64]) -> (Complex64, Vec<Complex64>) {
        match self {
            ExampleProblem::Ex1 => {
                let xx = x[0];
                let b = Complex64::new(0.0, 1.0) * (Complex64::from_polar(1.0, -k) - 1.0);
                let u = (Complex64::new((k * xx).cos() - 1.0, 0.0) + b * (k * xx).sin())
                    / (k * k);
                let du = (Complex64::new(-(k * xx).sin(), 0.0) + b * (k * xx).cos()) / k;
                (u, vec![du])
            }
            ExampleProblem::Ex2PlaneWave => {
                let c = k * std::f64::consts::FRAC_1_SQRT_2;
                let s = c * (x[0] + x[1]);
                let u = Complex64::new(s.sin(), 0.0);
                let g = Complex64::new(c * s.cos(), 0.0);
                (u, vec![g, g])
            }
        }
    }

    /// Robin boundary data g = du/dn + i k u at a boundary point with the
    /// given outward normal.
    fn robin_g(&self, k: f64, x: &[f64], normal: &[f64]) -> Complex64 {
        let (u, grad) = self.exact(k, x);
        let dn: Complex64 = grad
            .iter()
            .zip(normal)
            .map(|(g, n)| g * Complex64::new(*n, 0.0))
            .sum();
        dn + Complex64::new(0.0, k) * u
    }

    fn source(&self) -> f64 {
        match self {
            ExampleProblem::Ex1 => 1.0,
            ExampleProblem::Ex2PlaneWave => 0.0,
        }
    }
}

/// Reference-element tables used by assembly and error quadrature.
struct RefTables {
    p: usize,
    qx: Vec<f64>,
    qw: Vec<f64>,
    /// basis values at quadrature points, [i][q]
    val: Vec<Vec<f64>>,
    /// basis derivative values at quadrature points, [i][q]
    der: Vec<Vec<f64>>,
    /// reference stiffness/mass by the same quadrature
    s: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
    /// constant p-th derivatives
    pth: Vec<f64>,
}

impl RefTables {
    fn new(p: usize) -> Result<Self> {
        if p == 0 || p > P_MAX {
            return Err(Error::UnsupportedOrder { p, max: P_MAX });
        }
        let basis = lagrange_basis(p)?;
        let derivs: Vec<Polynomial> = basis.iter().map(Polynomial::derivative).collect();
        let (qx, qw) = gauss_legendre_unit(p + 2);
        let val: Vec<Vec<f64>> = basis
            .iter()
            .map(|b| qx.iter().map(|&x| b.eval_f64(x)).collect())
            .collect();
        let der: Vec<Vec<f64>> = derivs
            .iter()
            .map(|b| qx.iter().map(|&x| b.eval_f64(x)).collect())
            .collect();
        let nq = qx.len();
        let mut s = vec![vec![0.0; p + 1]; p + 1];
        let mut m = vec![vec![0.0; p + 1]; p + 1];
        for i in 0..=p {
            for j in 0..=p {
                for q in 0..nq {
                    s[i][j] += qw[q] * der[i][q] * der[j][q];
                    m[i][j] += qw[q] * val[i][q] * val[j][q];
                }
            }
        }
        let pth = pth_derivative_values(p)?.iter().map(to_f64).collect();
        Ok(Self {
            p,
            qx,
            qw,
            val,
            der,
            s,
            m,
            pth,
        })
    }

    /// Signed jump weights of the p-th derivative across an interior face,
    /// covering the 2p+1 nodes of the two adjacent elements.
    fn jump_pattern(&self) -> Vec<f64> {
        let p = self.p;
        let mut g = vec![0.0; 2 * p + 1];
        for i in 0..=p {
            // right element contributes +, left element -
            g[p + i] += self.pth[i];
            g[i] -= self.pth[i];
        }
        g
    }
}

/// Assembled sparse complex system.
pub struct FESystem {
    pub mesh: TensorMesh,
    pub p: usize,
    pub k: f64,
    pub gamma: f64,
    pub matrix: Csr,
    pub rhs: Vec<Complex64>,
    pub example: ExampleProblem,
    /// Dirichlet-eliminated dofs (value zero).
    pub dirichlet: Vec<usize>,
}

/// Assemble the CIP-FEM system for one of the benchmark problems.
///
/// Volume terms use tensorized Gauss quadrature with p+2 points per
/// direction (exact for the polynomial integrands); the face penalty uses
/// the per-element constancy of p-th derivatives, reducing faces to jump
/// weights times 1D edge mass matrices; Robin terms add i k boundary mass.
pub fn assemble(
    mesh: &TensorMesh,
    p: usize,
    k: f64,
    gamma: f64,
    example: ExampleProblem,
) -> Result<FESystem> {
    if mesh.d != example.dim() {
        return Err(Error::DegenerateInput(format!(
            "mesh dimension {} does not match example dimension {}",
            mesh.d,
            example.dim()
        )));
    }
    let tables = RefTables::new(p)?;
    match mesh.d {
        1 => assemble_1d(mesh, k, gamma, example, &tables),
        2 => assemble_2d(mesh, k, gamma, example, &tables),
        _ => unreachable!(),
    }
}

fn assemble_1d(
    mesh: &TensorMesh,
    k: f64,
    gamma: f64,
    example: ExampleProblem,
    tb: &RefTables,
) -> Result<FESystem> {
    let p = tb.p;
    let (n, h) = (mesh.n, mesh.h);
    let nn = mesh.nodes_per_dim(p);
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut rhs = vec![Complex64::zero(); nn];

    // identical volume block on every element
    let mut a_loc = vec![vec![0.0; p + 1]; p + 1];
    for i in 0..=p {
        for j in 0..=p {
            a_loc[i][j] = tb.s[i][j] / h - k * k * h * tb.m[i][j];
        }
    }
    let f = example.source();
    let f_loc: Vec<f64> = (0..=p)
        .map(|i| {
            h * f
                * tb.qw
                    .iter()
                    .zip(&tb.val[i])
                    .map(|(w, v)| w * v)
                    .sum::<f64>()
        })
        .collect();
    for e in 0..n {
        for i in 0..=p {
            let gi = e * p + i;
            rhs[gi] += Complex64::new(f_loc[i], 0.0);
            for j in 0..=p {
                triplets.push((gi, e * p + j, Complex64::new(a_loc[i][j], 0.0)));
            }
        }
    }

    // interior-face penalty: gamma h^{2p-1} (h^{-p} pattern)(h^{-p} pattern)^T
    // collapses to gamma / h
    let pattern = tb.jump_pattern();
    let pen = gamma / h;
    if gamma != 0.0 {
        for face in 1..n {
            let base = (face - 1) * p;
            for (a, &wa) in pattern.iter().enumerate() {
                if wa == 0.0 {
                    continue;
                }
                for (b, &wb) in pattern.iter().enumerate() {
                    if wb == 0.0 {
                        continue;
                    }
                    triplets.push((base + a, base + b, Complex64::new(pen * wa * wb, 0.0)));
                }
            }
        }
    }

    // boundary conditions per example
    let mut dirichlet = Vec::new();
    match example {
        ExampleProblem::Ex1 => {
            // the Robin condition at x = 1 is homogeneous: only i k u(1) v(1)
            triplets.push((nn - 1, nn - 1, Complex64::new(0.0, k)));
            dirichlet.push(0);
        }
        ExampleProblem::Ex2PlaneWave => unreachable!(),
    }

    apply_dirichlet(&mut triplets, &mut rhs, &dirichlet);
    Ok(FESystem {
        mesh: mesh.clone(),
        p,
        k,
        gamma,
        matrix: Csr::from_triplets(nn, triplets),
        rhs,
        example,
        dirichlet,
    })
}

fn assemble_2d(
    mesh: &TensorMesh,
    k: f64,
    gamma: f64,
    example: ExampleProblem,
    tb: &RefTables,
) -> Result<FESystem> {
    let p = tb.p;
    let (n, h) = (mesh.n, mesh.h);
    let n1 = mesh.nodes_per_dim(p);
    let nn = n1 * n1;
    let idx = |ix: usize, iy: usize| ix * n1 + iy;
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut rhs = vec![Complex64::zero(); nn];

    // identical volume block per element (tensorized quadrature factors)
    let nb = p + 1;
    let mut vol = vec![0.0; nb * nb * nb * nb];
    for i1 in 0..nb {
        for j1 in 0..nb {
            for i2 in 0..nb {
                for j2 in 0..nb {
                    let v = tb.s[i1][i2] * tb.m[j1][j2] + tb.m[i1][i2] * tb.s[j1][j2]
                        - k * k * h * h * tb.m[i1][i2] * tb.m[j1][j2];
                    vol[((i1 * nb + j1) * nb + i2) * nb + j2] = v;
                }
            }
        }
    }
    for ex in 0..n {
        for ey in 0..n {
            for i1 in 0..nb {
                for j1 in 0..nb {
                    let gi = idx(ex * p + i1, ey * p + j1);
                    for i2 in 0..nb {
                        for j2 in 0..nb {
                            let v = vol[((i1 * nb + j1) * nb + i2) * nb + j2];
                            if v != 0.0 {
                                triplets.push((
                                    gi,
                                    idx(ex * p + i2, ey * p + j2),
                                    Complex64::new(v, 0.0),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    // face penalty: jump weights in the normal direction times edge mass in
    // the tangential direction; the h powers cancel exactly in 2D
    if gamma != 0.0 {
        let pattern = tb.jump_pattern();
        for face in 1..n {
            for et in 0..n {
                for (a, &wa) in pattern.iter().enumerate() {
                    if wa == 0.0 {
                        continue;
                    }
                    for (b, &wb) in pattern.iter().enumerate() {
                        if wb == 0.0 {
                            continue;
                        }
                        let w = gamma * wa * wb;
                        for t1 in 0..nb {
                            for t2 in 0..nb {
                                let v = Complex64::new(w * tb.m[t1][t2], 0.0);
                                // vertical faces x = face h
                                triplets.push((
                                    idx((face - 1) * p + a, et * p + t1),
                                    idx((face - 1) * p + b, et * p + t2),
                                    v,
                                ));
                                // horizontal faces y = face h
                                triplets.push((
                                    idx(et * p + t1, (face - 1) * p + a),
                                    idx(et * p + t2, (face - 1) * p + b),
                                    v,
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    // Robin boundary on all four edges: i k edge mass plus the g data
    let robin = Complex64::new(0.0, k);
    let edges: [(bool, usize, [f64; 2]); 4] = [
        (true, 0, [0.0, -1.0]),      // y = 0, varying x
        (true, n1 - 1, [0.0, 1.0]),  // y = 1
        (false, 0, [-1.0, 0.0]),     // x = 0, varying y
        (false, n1 - 1, [1.0, 0.0]), // x = 1
    ];
    for (x_varies, fixed, normal) in edges {
        let fixed_coord = if fixed == 0 { 0.0 } else { 1.0 };
        for e in 0..n {
            for i in 0..nb {
                let gi = if x_varies {
                    idx(e * p + i, fixed)
                } else {
                    idx(fixed, e * p + i)
                };
                for j in 0..nb {
                    let gj = if x_varies {
                        idx(e * p + j, fixed)
                    } else {
                        idx(fixed, e * p + j)
                    };
                    triplets.push((gi, gj, robin * (h * tb.m[i][j])));
                }
                let mut acc = Complex64::zero();
                for (q, &xq) in tb.qx.iter().enumerate() {
                    let s = (e as f64 + xq) * h;
                    let point = if x_varies {
                        [s, fixed_coord]
                    } else {
                        [fixed_coord, s]
                    };
                    acc += example.robin_g(k, &point, &normal) * (tb.qw[q] * tb.val[i][q] * h);
                }
                rhs[gi] += acc;
            }
        }
    }

    Ok(FESystem {
        mesh: mesh.clone(),
        p,
        k,
        gamma,
        matrix: Csr::from_triplets(nn, triplets),
        rhs,
        example,
        dirichlet: vec![],
    })
}

fn apply_dirichlet(
    triplets: &mut Vec<(usize, usize, Complex64)>,
    rhs: &mut [Complex64],
    dirichlet: &[usize],
) {
    if dirichlet.is_empty() {
        return;
    }
    let is_dir = |i: usize| dirichlet.contains(&i);
    triplets.retain(|&(i, j, _)| !is_dir(i) && !is_dir(j));
    for &i in dirichlet {
        triplets.push((i, i, Complex64::new(1.0, 0.0)));
        rhs[i] = Complex64::zero();
    }
}

/// Direct banded solve with a verified relative residual of at most 1e-10
/// (one step of iterative refinement is applied if the first pass misses).
pub fn solve(system: &FESystem) -> Result<Vec<Complex64>> {
    let lu = system.matrix.to_band().factor()?;
    let mut x = lu.solve(&system.rhs);
    let norm_b = l2(&system.rhs).max(1e-300);
    let mut r = residual(system, &x);
    if l2(&r) > 1e-12 * norm_b {
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        r = residual(system, &x);
    }
    let rel = l2(&r) / norm_b;
    if rel > 1e-10 {
        return Err(Error::SolverFailure(format!(
            "relative residual {rel:.3e} exceeds 1e-10 (n={}, p={}, k={})",
            system.mesh.n, system.p, system.k
        )));
    }
    Ok(x)
}

fn residual(system: &FESystem, x: &[Complex64]) -> Vec<Complex64> {
    let ax = system.matrix.matvec(x);
    system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Nodal interpolant of the exact solution.
pub fn interpolant(
    mesh: &TensorMesh,
    p: usize,
    k: f64,
    example: ExampleProblem,
) -> Vec<Complex64> {
    let n1 = mesh.nodes_per_dim(p);
    match mesh.d {
        1 => (0..n1)
            .map(|i| example.exact(k, &[i as f64 / ((n1 - 1) as f64)]).0)
            .collect(),
        _ => {
            let mut out = vec![Complex64::zero(); n1 * n1];
            for ix in 0..n1 {
                for iy in 0..n1 {
                    let x = ix as f64 / ((n1 - 1) as f64);
                    let y = iy as f64 / ((n1 - 1) as f64);
                    out[ix * n1 + iy] = example.exact(k, &[x, y]).0;
                }
            }
            out
        }
    }
}

/// H^1 quantities over the mesh by per-element Gauss quadrature: returns
/// (|u - u_h|_{H1}, |u|_{H1}) against the example's exact solution, or
/// (|u_h|_{H1}, 0) when `example` is None.
fn h1_quadrature(
    mesh: &TensorMesh,
    p: usize,
    k: f64,
    coeffs: &[Complex64],
    example: Option<ExampleProblem>,
) -> (f64, f64) {
    let tb = RefTables::new(p).expect("reference tables");
    let (n, h) = (mesh.n, mesh.h);
    let nb = p + 1;
    let nq = tb.qx.len();
    let mut err2 = 0.0;
    let mut norm2 = 0.0;
    match mesh.d {
        1 => {
            for e in 0..n {
                for q in 0..nq {
                    let x = (e as f64 + tb.qx[q]) * h;
                    let mut uh = Complex64::zero();
                    let mut duh = Complex64::zero();
                    for i in 0..nb {
                        let c = coeffs[e * p + i];
                        uh += c * tb.val[i][q];
                        duh += c * (tb.der[i][q] / h);
                    }
                    let w = tb.qw[q] * h;
                    match example {
                        Some(exm) => {
                            let (u, grad) = exm.exact(k, &[x]);
                            err2 += w * ((u - uh).norm_sqr() + (grad[0] - duh).norm_sqr());
                            norm2 += w * (u.norm_sqr() + grad[0].norm_sqr());
                        }
                        None => err2 += w * (uh.norm_sqr() + duh.norm_sqr()),
                    }
                }
            }
        }
        _ => {
            let n1 = mesh.nodes_per_dim(p);
            for exl in 0..n {
                for ey in 0..n {
                    for qx in 0..nq {
                        for qy in 0..nq {
                            let x = (exl as f64 + tb.qx[qx]) * h;
                            let y = (ey as f64 + tb.qx[qy]) * h;
                            let mut uh = Complex64::zero();
                            let mut dux = Complex64::zero();
                            let mut duy = Complex64::zero();
                            for i in 0..nb {
                                for j in 0..nb {
                                    let c = coeffs[(exl * p + i) * n1 + ey * p + j];
                                    uh += c * (tb.val[i][qx] * tb.val[j][qy]);
                                    dux += c * (tb.der[i][qx] * tb.val[j][qy] / h);
                                    duy += c * (tb.val[i][qx] * tb.der[j][qy] / h);
                                }
                            }
                            let w = tb.qw[qx] * tb.qw[qy] * h * h;
                            match example {
                                Some(exm) => {
                                    let (u, grad) = exm.exact(k, &[x, y]);
                                    err2 += w
                                        * ((u - uh).norm_sqr()
                                            + (grad[0] - dux).norm_sqr()
                                            + (grad[1] - duy).norm_sqr());
                                    norm2 += w
                                        * (u.norm_sqr()
                                            + grad[0].norm_sqr()
                                            + grad[1].norm_sqr());
                                }
                                None => {
                                    err2 +=
                                        w * (uh.norm_sqr() + dux.norm_sqr() + duy.norm_sqr())
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (err2.sqrt(), norm2.sqrt())
}

/// Relative H^1 error of a discrete solution against the example's exact
/// solution.
pub fn h1_relative_error(
    mesh: &TensorMesh,
    p: usize,
    k: f64,
    coeffs: &[Complex64],
    example: ExampleProblem,
) -> f64 {
    let (err, norm) = h1_quadrature(mesh, p, k, coeffs, Some(example));
    err / norm
}

/// H^1 norm of an FE coefficient vector.
pub fn fe_h1_norm(mesh: &TensorMesh, p: usize, coeffs: &[Complex64]) -> f64 {
    h1_quadrature(mesh, p, 0.0, coeffs, None).0
}

/// Pollution indicator |u_h - I_h u|_{H1} / |u|_{H1}: the distance of the
/// FE solution from the interpolant. Unlike the total error this is not
/// floored by the interpolation error, so its growth in k exposes the
/// pollution order directly.
pub fn pollution_h1(
    mesh: &TensorMesh,
    p: usize,
    k: f64,
    coeffs: &[Complex64],
    example: ExampleProblem,
) -> f64 {
    let interp = interpolant(mesh, p, k, example);
    let diff: Vec<Complex64> = coeffs.iter().zip(&interp).map(|(a, b)| a - b).collect();
    let num = fe_h1_norm(mesh, p, &diff);
    let (_, den) = h1_quadrature(mesh, p, k, &interp, Some(example));
    num / den
}

/// One full pipeline run.
#[derive(Clone, Debug)]
pub struct ErrorRecord {
    pub p: usize,
    pub k: f64,
    pub n: usize,
    pub gamma: f64,
    pub rel_h1_error: f64,
    pub dofs: usize,
    pub wall_seconds: f64,
}

/// assemble -> solve -> error for one parameter set.
pub fn run_example(
    example: ExampleProblem,
    p: usize,
    k: f64,
    n: usize,
    gamma: f64,
) -> Result<ErrorRecord> {
    let start = Instant::now();
    let mesh = TensorMesh::new(example.dim(), n)?;
    let system = assemble(&mesh, p, k, gamma, example)?;
    let sol = solve(&system)?;
    let rel = h1_relative_error(&mesh, p, k, &sol, example);
    Ok(ErrorRecord {
        p,
        k,
        n,
        gamma,
        rel_h1_error: rel,
        dofs: mesh.dofs(p),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Penalty-parameter selection rules for studies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaRule {
    /// Classical FEM: gamma = 0.
    Fem,
    /// Closed-form gamma_0(p).
    Gamma0,
    /// Dispersion-free gamma_opt(p, kh).
    GammaOpt,
    /// Fixed explicit value.
    Value(f64),
}

impl GammaRule {
    /// Resolve the rule at a given (p, t = kh); gamma_opt is only defined
    /// inside the validity window.
    pub fn resolve(&self, p: usize, t: f64) -> Result<f64> {
        match self {
            GammaRule::Fem => Ok(0.0),
            GammaRule::Gamma0 => Ok(gamma0_f64(p)),
            GammaRule::GammaOpt => gamma_opt(p, t),
            GammaRule::Value(v) => Ok(*v),
        }
    }
}

/// Critical-mesh-size search result.
#[derive(Clone, Debug)]
pub struct CriticalMesh {
    /// Largest mesh size meeting the tolerance, h = 1/n.
    pub h: f64,
    pub n: usize,
    pub err: f64,
    /// The bracketing rung just above: (n, err) with err > eps, so any
    /// non-monotonicity on the tested ladder stays visible in the report.
    pub below: Option<(usize, f64)>,
}

/// Largest h = 1/n with relative H^1 error <= eps, by doubling n until the
/// tolerance is met and then bisecting integers.
pub fn critical_mesh_size(
    example: ExampleProblem,
    p: usize,
    k: f64,
    eps: f64,
    rule: GammaRule,
) -> Result<CriticalMesh> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DegenerateInput(format!(
            "tolerance eps = {eps} outside (0,1)"
        )));
    }
    let n_cap: usize = if example.dim() == 2 {
        1024 / p
    } else {
        1 << 20
    };
    let err_at = |n: usize| -> Result<f64> {
        let t = k / n as f64;
        let gamma = match rule.resolve(p, t) {
            Ok(g) => g,
            // outside the gamma_opt validity window the mesh is far too
            // coarse to meet any tolerance below 1
            Err(_) => return Ok(f64::INFINITY),
        };
        Ok(run_example(example, p, k, n, gamma)?.rel_h1_error)
    };
    let mut n_lo = (k / 20.0).ceil().max(2.0) as usize;
    let mut e_lo = err_at(n_lo)?;
    if e_lo <= eps {
        return Ok(CriticalMesh {
            h: 1.0 / n_lo as f64,
            n: n_lo,
            err: e_lo,
            below: None,
        });
    }
    let mut n_hi = n_lo;
    let mut e_hi;
    loop {
        n_hi *= 2;
        if n_hi > n_cap {
            return Err(Error::ResourceExhausted(format!(
                "error never reached {eps} up to n = {n_cap} (p={p}, k={k}, rule={rule:?})"
            )));
        }
        e_hi = err_at(n_hi)?;
        if e_hi <= eps {
            break;
        }
        n_lo = n_hi;
        e_lo = e_hi;
    }
    while n_hi - n_lo > 1 {
        let mid = (n_lo + n_hi) / 2;
        let e_mid = err_at(mid)?;
        if e_mid <= eps {
            n_hi = mid;
            e_hi = e_mid;
        } else {
            n_lo = mid;
            e_lo = e_mid;
        }
    }
    Ok(CriticalMesh {
        h: 1.0 / n_hi as f64,
        n: n_hi,
        err: e_hi,
        below: Some((n_lo, e_lo)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex1_exact_solution_satisfies_problem() {
        let k = 7.3;
        let ex = ExampleProblem::Ex1;
        let (u0, _) = ex.exact(k, &[0.0]);
        assert!(u0.norm() < 1e-15);
        let (u1, du1) = ex.exact(k, &[1.0]);
        let robin = du1[0] + Complex64::new(0.0, k) * u1;
        assert!(robin.norm() < 1e-15, "robin residual {robin}");
        // interior equation by central differences: -u'' - k^2 u = 1
        let x = 0.4321;
        let d = 1e-5;
        let (um, _) = ex.exact(k, &[x - d]);
        let (uc, _) = ex.exact(k, &[x]);
        let (up, _) = ex.exact(k, &[x + d]);
        let upp = (up - 2.0 * uc + um) / (d * d);
        let res = -upp - k * k * uc - Complex64::new(1.0, 0.0);
        assert!(res.norm() < 1e-4, "pde residual {res}");
    }

    #[test]
    fn ex2_exact_vanishes_at_origin_and_solves_pde() {
        let k = 5.0;
        let ex = ExampleProblem::Ex2PlaneWave;
        assert!(ex.exact(k, &[0.0, 0.0]).0.norm() < 1e-16);
        let (x, y, d) = (0.3, 0.52, 1e-5);
        let lap = (ex.exact(k, &[x + d, y]).0
            + ex.exact(k, &[x - d, y]).0
            + ex.exact(k, &[x, y + d]).0
            + ex.exact(k, &[x, y - d]).0
            - 4.0 * ex.exact(k, &[x, y]).0)
            / (d * d);
        let res = -lap - k * k * ex.exact(k, &[x, y]).0;
        assert!(res.norm() < 1e-4);
    }

    #[test]
    fn one_element_solve_matches_hand_computation() {
        // single element, p = 1, h = 1: after eliminating the Dirichlet
        // node the system is (1 - k^2/3 + ik) u_1 = 1/2
        let k = 0.3;
        let mesh = TensorMesh::new(1, 1).unwrap();
        let sys = assemble(&mesh, 1, k, 0.0, ExampleProblem::Ex1).unwrap();
        assert!(
            (sys.matrix.get(1, 1) - Complex64::new(1.0 - k * k / 3.0, k)).norm() < 1e-14
        );
        assert!(sys.matrix.get(1, 0).norm() == 0.0, "dirichlet column");
        let sol = solve(&sys).unwrap();
        let expect = Complex64::new(0.5, 0.0) / Complex64::new(1.0 - k * k / 3.0, k);
        assert!((sol[1] - expect).norm() < 1e-14);
        assert!(sol[0].norm() == 0.0);
    }

    #[test]
    fn gamma_zero_equals_skipped_penalty_and_tiny_gamma_is_continuous() {
        // gamma = 0 skips the penalty loop entirely, so the matrix is the
        // plain FEM matrix; a tiny gamma must stay within solver accuracy
        let mesh = TensorMesh::new(1, 5).unwrap();
        let a0 = assemble(&mesh, 2, 11.0, 0.0, ExampleProblem::Ex1).unwrap();
        let tiny = assemble(&mesh, 2, 11.0, 1e-15, ExampleProblem::Ex1).unwrap();
        let s0 = solve(&a0).unwrap();
        let s1 = solve(&tiny).unwrap();
        let scale = s0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in s0.iter().zip(&s1) {
            assert!((a - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn penalty_stencil_p1_hand_check() {
        // on a 4-element mesh the penalty adds gamma/h (1,-2,1) outer
        // products at each interior node
        let (n, p, k) = (4usize, 1usize, 2.0);
        let gamma = 0.37;
        let mesh = TensorMesh::new(1, n).unwrap();
        let with = assemble(&mesh, p, k, gamma, ExampleProblem::Ex1).unwrap();
        let without = assemble(&mesh, p, k, 0.0, ExampleProblem::Ex1).unwrap();
        let h = mesh.h;
        let mut expect = vec![vec![0.0; n + 1]; n + 1];
        for face in 1..n {
            let pattern = [1.0, -2.0, 1.0];
            for a in 0..3 {
                for b in 0..3 {
                    expect[face - 1 + a][face - 1 + b] += gamma / h * pattern[a] * pattern[b];
                }
            }
        }
        // rows/columns touching the Dirichlet node are eliminated
        for i in 1..=n {
            for j in 1..=n {
                let got = (with.matrix.get(i, j) - without.matrix.get(i, j)).re;
                assert!(
                    (got - expect[i][j]).abs() < 1e-9,
                    "({i},{j}): {got} vs {}",
                    expect[i][j]
                );
            }
        }
    }

    #[test]
    fn penalty_vanishes_on_smooth_polynomials() {
        // J applied to the interpolant of x^p is zero: the p-th derivative
        // is globally constant
        for p in 1..=3usize {
            let mesh = TensorMesh::new(1, 6).unwrap();
            let with = assemble(&mesh, p, 3.0, 0.5, ExampleProblem::Ex1).unwrap();
            let without = assemble(&mesh, p, 3.0, 0.0, ExampleProblem::Ex1).unwrap();
            let n1 = mesh.nodes_per_dim(p);
            let v: Vec<Complex64> = (0..n1)
                .map(|i| {
                    let x = i as f64 / (n1 - 1) as f64;
                    Complex64::new(x.powi(p as i32), 0.0)
                })
                .collect();
            let jv: Vec<Complex64> = with
                .matrix
                .matvec(&v)
                .iter()
                .zip(without.matrix.matvec(&v))
                .map(|(a, b)| a - b)
                .collect();
            let quad: Complex64 = v.iter().zip(&jv).map(|(vi, ji)| vi.conj() * ji).sum();
            let scale = with.matrix.norm_inf();
            assert!(
                quad.norm() <= 1e-12 * scale,
                "p={p}: J-form {quad} vs scale {scale}"
            );
        }
    }

    #[test]
    fn penalty_vanishes_on_smooth_polynomials_2d() {
        let p = 2usize;
        let mesh = TensorMesh::new(2, 3).unwrap();
        let with = assemble(&mesh, p, 3.0, 0.5, ExampleProblem::Ex2PlaneWave).unwrap();
        let without = assemble(&mesh, p, 3.0, 0.0, ExampleProblem::Ex2PlaneWave).unwrap();
        let n1 = mesh.nodes_per_dim(p);
        let mut v = vec![Complex64::zero(); n1 * n1];
        for ix in 0..n1 {
            for iy in 0..n1 {
                let x = ix as f64 / (n1 - 1) as f64;
                let y = iy as f64 / (n1 - 1) as f64;
                v[ix * n1 + iy] =
                    Complex64::new(x.powi(p as i32) + 0.7 * y.powi(p as i32), 0.0);
            }
        }
        let jv: Vec<Complex64> = with
            .matrix
            .matvec(&v)
            .iter()
            .zip(without.matrix.matvec(&v))
            .map(|(a, b)| a - b)
            .collect();
        let quad: Complex64 = v.iter().zip(&jv).map(|(vi, ji)| vi.conj() * ji).sum();
        assert!(quad.norm() <= 1e-12 * with.matrix.norm_inf());
    }

    #[test]
    fn solver_residual_is_verified() {
        let mesh = TensorMesh::new(1, 64).unwrap();
        let sys = assemble(&mesh, 2, 40.0, gamma0_f64(2), ExampleProblem::Ex1).unwrap();
        let sol = solve(&sys).unwrap();
        let r = residual(&sys, &sol);
        assert!(l2(&r) <= 1e-10 * l2(&sys.rhs));
    }

    #[test]
    fn interpolant_error_decays_at_order_p() {
        let k = 10.0;
        for p in 1..=2usize {
            let mut samples = Vec::new();
            for n in [8usize, 16, 32, 64] {
                let mesh = TensorMesh::new(1, n).unwrap();
                let interp = interpolant(&mesh, p, k, ExampleProblem::Ex1);
                let e = h1_relative_error(&mesh, p, k, &interp, ExampleProblem::Ex1);
                samples.push((mesh.h, e));
            }
            let slope = crate::dispersion::order_fit(&samples).unwrap();
            assert!(
                (slope - p as f64).abs() < 0.15,
                "p={p}: interpolation slope {slope}"
            );
        }
    }

    #[test]
    fn interpolant_of_itself_has_zero_fe_distance() {
        let mesh = TensorMesh::new(1, 8).unwrap();
        let (p, k) = (2, 3.0);
        let interp = interpolant(&mesh, p, k, ExampleProblem::Ex1);
        let diff: Vec<Complex64> = interp.iter().zip(&interp).map(|(a, b)| a - b).collect();
        assert_eq!(fe_h1_norm(&mesh, p, &diff), 0.0);
        let e = h1_relative_error(&mesh, p, k, &interp, ExampleProblem::Ex1);
        assert!(e > 0.0 && e < 0.05, "interp error {e}");
    }

    #[test]
    fn bloch_consistency_ties_assembly_to_symbol() {
        // interior rows of the assembled 1D matrix reproduce the symbol
        // entries after Bloch substitution
        for p in 1..=3usize {
            let n = 12;
            let mesh = TensorMesh::new(1, n).unwrap();
            let t = 0.4;
            let k = t / mesh.h;
            let gamma = 0.021;
            let sys = assemble(&mesh, p, k, gamma, ExampleProblem::Ex1).unwrap();
            let beta = 0.53; // arbitrary Bloch phase
            let sym = crate::symbol::symbol_1d(p, t, beta, gamma).unwrap();
            let r = n / 2; // generating cell far from the boundary
            for s in 0..p {
                for q in 0..p {
                    let row = r * p + s;
                    let mut acc = Complex64::zero();
                    for m in -2i64..=2 {
                        let col = (r as i64 + m) * p as i64 + q as i64;
                        let a = sys.matrix.get(row, col as usize);
                        acc += a * Complex64::from_polar(1.0, m as f64 * beta) * mesh.h;
                    }
                    let expect = sym.entry(s, q);
                    assert!(
                        (acc - expect).norm() <= 1e-12 * sym.max_norm(),
                        "p={p} ({s},{q}): {acc} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn run_example_end_to_end_small() {
        let rec = run_example(ExampleProblem::Ex1, 1, 10.0, 100, 0.0).unwrap();
        assert!(rec.rel_h1_error < 0.1, "error {}", rec.rel_h1_error);
        assert_eq!(rec.dofs, 101);

        let rec2 = run_example(ExampleProblem::Ex2PlaneWave, 1, 5.0, 12, 0.0).unwrap();
        assert!(rec2.rel_h1_error < 0.2, "2d error {}", rec2.rel_h1_error);
    }

    #[test]
    fn critical_mesh_size_definition_check() {
        // small k: the returned h satisfies the defining inequality and one
        // element fewer violates it
        let got =
            critical_mesh_size(ExampleProblem::Ex2PlaneWave, 1, 4.0, 0.5, GammaRule::Fem)
                .unwrap();
        assert!(got.err <= 0.5);
        if let Some((n_below, e_below)) = got.below {
            assert_eq!(n_below, got.n - 1);
            assert!(e_below > 0.5);
        }
        let check = run_example(ExampleProblem::Ex2PlaneWave, 1, 4.0, got.n, 0.0).unwrap();
        assert!((check.rel_h1_error - got.err).abs() < 1e-12);
    }
}
