use mesonwp::model::*;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() {
    let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
    let basis = enumerate_physical_basis(&spec).unwrap();
    let h = build_hamiltonian(&spec).unwrap().matrix(&basis).unwrap();
    // also exercise a complex sector compression to stress B != 0
    let b = momentum_sector_basis(&spec, &basis, std::f64::consts::PI / 3.0).unwrap();
    let hk = b.adjoint() * &h * &b;
    for (tag, m) in [("full(real)", h.clone()), ("sector(complex)", hk.clone())] {
        let d = m.nrows();
        let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let c = m[(i, j)];
                big[(i, j)] = c.re;
                big[(i + d, j + d)] = c.re;
                big[(i, j + d)] = -c.im;
                big[(i + d, j)] = c.im;
            }
        }
        let eig = big.clone().symmetric_eigen();
        // residual of doubled problem
        let mut worst = 0.0f64;
        for k in 0..2 * d {
            let v = eig.eigenvectors.column(k);
            let r = (&big * v - v * eig.eigenvalues[k]).norm();
            if r > worst { worst = r; }
        }
        // recover a complex eigenvector and check residual vs m
        let mut worst_c = 0.0f64;
        for k in 0..2 * d {
            let v = eig.eigenvectors.column(k);
            let mut z = nalgebra::DVector::<Complex64>::zeros(d);
            for i in 0..d { z[i] = Complex64::new(v[i], v[i + d]); }
            let n = z.norm();
            if n < 1e-8 { continue; }
            z /= Complex64::new(n, 0.0);
            let r = (&m * &z - &z * Complex64::new(eig.eigenvalues[k], 0.0)).norm();
            if r > worst_c { worst_c = r; }
        }
        println!("{tag}: dim {d}, doubled residual {worst:e}, complex-recovered residual {worst_c:e}");
    }
}
