use cipwave_core::dispersion::*;
use cipwave_core::fem::*;

fn main() {
    for (p, n) in [(1usize, 23852usize), (2, 2220)] {
        let mut samples = vec![];
        for j in 0..5 {
            let k = 100.0 * 2f64.powi(j);
            let mesh = TensorMesh::new(1, n).unwrap();
            let gopt = gamma_opt(p, k * mesh.h).unwrap();
            let sys0 = assemble(&mesh, p, k, 0.0, ExampleProblem::Ex1).unwrap();
            let syso = assemble(&mesh, p, k, gopt, ExampleProblem::Ex1).unwrap();
            let u0 = solve(&sys0).unwrap();
            let uo = solve(&syso).unwrap();
            let diff: Vec<_> = u0.iter().zip(&uo).map(|(a, b)| a - b).collect();
            let interp = interpolant(&mesh, p, k, ExampleProblem::Ex1);
            let poll = fe_h1_norm(&mesh, p, &diff) / fe_h1_norm(&mesh, p, &interp);
            let pred = phase_difference_at(1, p, k, mesh.h, 0.0, &[]).unwrap();
            println!("p={p} n={n} k={k}: poll(vs opt)={poll:.4e}  |k-kh|={pred:.4e}");
            samples.push((k, poll));
        }
        let slope = order_fit(&samples).unwrap();
        println!("p={p} fem: slope {slope:.4} expect {}", 2 * p + 1);
    }
}
