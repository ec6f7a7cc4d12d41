use num_complex::Complex64;

use super::CMatrix;

/// Generalized Gell-Mann matrices, normalised so that `Tr(F_a F_b) = δ_ab`.
///
/// Order: symmetric pairs `(j,k)`, antisymmetric pairs, then diagonals.
pub fn gell_mann_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(s, 0.0);
            m[(k, j)] = Complex64::new(s, 0.0);
            out.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(0.0, -s);
            m[(k, j)] = Complex64::new(0.0, s);
            out.push(m);
        }
    }
    for l in 1..d {
        let lf = l as f64;
        let norm = 1.0 / (lf * (lf + 1.0)).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-lf * norm, 0.0);
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{max_hermitian_defect, trace_product};

    #[test]
    fn orthonormal_traceless_hermitian() {
        for d in 2..=6 {
            let basis = gell_mann_basis(d);
            assert_eq!(basis.len(), d * d - 1);
            for (i, a) in basis.iter().enumerate() {
                assert!(a.trace().norm() < 1e-14);
                assert!(max_hermitian_defect(a) < 1e-15);
                for (j, b) in basis.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((trace_product(a, b) - expected).norm() < 1e-14, "d={d} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn qubit_case_is_scaled_pauli() {
        let b = gell_mann_basis(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[0][(0, 1)].re - s).abs() < 1e-15);
        assert!((b[1][(0, 1)].im + s).abs() < 1e-15);
        assert!((b[2][(1, 1)].re + s).abs() < 1e-15);
    }
}
