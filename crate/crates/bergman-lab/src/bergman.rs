//! placeholder
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn probe_eigen() -> (Vec<f64>, DMatrix<Complex64>) {
    let g = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.3),
            Complex64::new(0.5, -0.3),
            Complex64::new(1.0, 0.0),
        ],
    );
    let eig = g.symmetric_eigen();
    (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
}
