//! Small dense complex matrices used for Clifford table construction, PTM
//! extraction, and the brute-force oracle.

use ndarray::Array2;
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn cre(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn cim(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

/// 2x2 matrix of a single-site Pauli code.
pub fn pauli_matrix(code: u8) -> CMat {
    match code & 3 {
        0 => identity(2),
        1 => ndarray::array![[czero(), cre(1.0)], [cre(1.0), czero()]],
        2 => ndarray::array![[czero(), cim(-1.0)], [cim(1.0), czero()]],
        _ => ndarray::array![[cre(1.0), czero()], [czero(), cre(-1.0)]],
    }
}

/// Kronecker product with `a` on the most significant qubits.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let v = a[(ia, ja)];
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = v * b[(ib, jb)];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|v| v.conj())
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

/// Tensor product of single-site Paulis; the first code lands on the most
/// significant qubit.
pub fn substring_matrix(codes: &[u8]) -> CMat {
    let mut m = pauli_matrix(codes[0]);
    for &c in &codes[1..] {
        m = kron(&m, &pauli_matrix(c));
    }
    m
}

/// Decode a packed substring index (first site in the lowest crumb) into
/// per-site codes.
pub fn substring_codes(arity: usize, index: usize) -> Vec<u8> {
    (0..arity).map(|i| ((index >> (2 * i)) & 3) as u8).collect()
}

/// Dense matrix of a packed substring index.
pub fn substring_matrix_from_index(arity: usize, index: usize) -> CMat {
    substring_matrix(&substring_codes(arity, index))
}

/// Unitary of a Pauli rotation exp(-i theta G / 2) over the generator's
/// dense substring matrix.
pub fn rotation_unitary(generator: &CMat, theta: f64) -> CMat {
    let dim = generator.dim().0;
    let half = theta / 2.0;
    identity(dim).mapv(|v| v * cre(half.cos())) + generator.mapv(|v| v * cim(-half.sin()))
}
