#![allow(dead_code)]

pub mod brute;

use mflef::mf::{koszul_mf, MFMorphism, MatrixFactorization};
use mflef::poly::{PolyMatrix, Polynomial};
use mflef::Scalar;

pub fn x(n: usize, i: usize) -> Polynomial {
    Polynomial::var(n, i)
}

pub fn c(n: usize, s: Scalar) -> Polynomial {
    Polynomial::constant(n, s)
}

pub fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

pub fn zeta(m: u32, k: i64) -> Scalar {
    Scalar::zeta_pow(m, k)
}

/// Rank one factorization `(a, b)` of `a b`.
pub fn mf1(n: usize, a: Polynomial, b: Polynomial) -> MatrixFactorization {
    let w = &a * &b;
    MatrixFactorization::new(w, PolyMatrix::from_rows(n, vec![vec![a]]), PolyMatrix::from_rows(n, vec![vec![b]])).unwrap()
}

pub fn diag(n: usize, entries: &[Scalar]) -> PolyMatrix {
    let mut m = PolyMatrix::zeros(entries.len(), entries.len(), n);
    for (i, e) in entries.iter().enumerate() {
        m.set(i, i, c(n, e.clone()));
    }
    m
}

/// Diagonal even morphism `source -> target` with constant entries.
pub fn diag_morphism(source: &MatrixFactorization, target: &MatrixFactorization, entries: &[Scalar]) -> MFMorphism {
    MFMorphism::new(source.clone(), target.clone(), 0, diag(source.nvars(), entries)).unwrap()
}

/// Koszul factorization of `x_1^2 + ... + x_n^2`.
pub fn koszul_quadric(n: usize) -> MatrixFactorization {
    let v: Vec<Polynomial> = (0..n).map(|i| x(n, i)).collect();
    koszul_mf(n, &v, &v).unwrap()
}

/// `+1` on even generators, `-1` on odd ones.
pub fn parity_entries(e: &MatrixFactorization) -> Vec<Scalar> {
    (0..e.rank()).map(|i| if e.parity_of(i) == 0 { int(1) } else { int(-1) }).collect()
}

pub fn fermat(n: usize, degrees: &[u32]) -> Polynomial {
    let mut w = Polynomial::zero(n);
    for (i, &d) in degrees.iter().enumerate() {
        w = &w + &x(n, i).pow(d);
    }
    w
}
