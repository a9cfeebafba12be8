//! Test-only oracles: dense Kronecker products and full matrix-vector
//! application, kept independent of the bit-indexed gate kernel in `qstate`.

use num_complex::Complex64;

use crate::qstate::Gate2;

pub fn mat_identity() -> Gate2 {
    Gate2::identity()
}

/// Dense Kronecker product of two 2x2 gates as a row-major 4x4 matrix.
pub fn kron(a: &Gate2, b: &Gate2) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![Complex64::new(0.0, 0.0); 4]; 4];
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[2 * ar + br][2 * ac + bc] = a.entry(ar, ac) * b.entry(br, bc);
                }
            }
        }
    }
    out
}

/// Kronecker product of a dense matrix with a 2x2 gate (extends to 3 qubits).
pub fn kron_mat(a: &[Vec<Complex64>], b: &Gate2) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); 2 * n]; 2 * n];
    for (ar, row) in a.iter().enumerate() {
        for (ac, &av) in row.iter().enumerate() {
            for br in 0..2 {
                for bc in 0..2 {
                    out[2 * ar + br][2 * ac + bc] = av * b.entry(br, bc);
                }
            }
        }
    }
    out
}

/// Dense matrix-vector product.
pub fn apply_full(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Plain inner product `⟨a|b⟩` over amplitude slices.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
