use cipwave_core::dispersion::*;
fn main() {
    let k = 1000.0;
    for (p, gamma_is_g0, t0, npts) in [
        (3usize, true, 1.2, 3), (3, true, 1.0, 3), (3, true, 1.4, 3), (3, true, 1.6, 3),
        (3, false, 0.8, 4), (3, false, 1.0, 4),
        (2, true, 0.8, 4), (2, true, 0.6, 4),
        (1, false, 0.4, 4), (1, true, 0.6, 4),
    ] {
        let gamma = if gamma_is_g0 { gamma0_f64(p) } else { 0.0 };
        let mut samples = vec![];
        let mut t = t0;
        for _ in 0..npts {
            let h = t / k;
            let pd = phase_difference_at(1, p, k, h, gamma, &[]).unwrap();
            samples.push((h, pd));
            t /= 2.0;
        }
        let slope = order_fit(&samples).unwrap();
        let expect = if gamma_is_g0 { 2*p+2 } else { 2*p };
        println!("p={p} g0={gamma_is_g0} t0={t0} npts={npts}: slope {slope:.4} expect {expect} diff {:.4}", (slope - expect as f64).abs());
    }
}
