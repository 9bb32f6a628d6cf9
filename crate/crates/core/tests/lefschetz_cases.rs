//! Trace formula cases with hand-derived values.

mod common;

use common::{c, diag_morphism, int, mf1, x, zeta};
use mflef::lefschetz::{boundary_bulk, lhs_hlf, rhs_hlf, verify_hlf, verify_isolated, Engine};
use mflef::mf::{pullback, tensor_mf, MFMorphism};
use mflef::milnor::trace_space;
use mflef::poly::{Polynomial, Symmetry};
use mflef::Scalar;

fn linear_factor_mfs() -> [mflef::mf::MatrixFactorization; 2] {
    let n = 2;
    // x^3 + y^3 = (x + y)(x + zeta y)(x + zeta^2 y)
    let a = mf1(n, &x(n, 0) + &x(n, 1), x(n, 0).pow(2) - &x(n, 0) * &x(n, 1) + x(n, 1).pow(2));
    let z = |k| c(n, zeta(3, k));
    let b = mf1(n, &x(n, 0) + &(&z(1) * &x(n, 1)), &(&x(n, 0) + &x(n, 1)) * &(&x(n, 0) + &(&z(2) * &x(n, 1))));
    [a, b]
}

/// With `t = id` both sides are Euler pairings; for two lines in `x^3 + y^3` they
/// form the Cartan matrix of `A_2`.
#[test]
fn euler_pairings_of_lines() {
    let [a, b] = linear_factor_mfs();
    let t = Symmetry::identity(2);
    let expected = [[2, -1], [-1, 2]];
    for (i, ea) in [&a, &b].into_iter().enumerate() {
        for (j, eb) in [&a, &b].into_iter().enumerate() {
            let r = verify_hlf(ea, eb, &t, &MFMorphism::identity(ea), &MFMorphism::identity(eb), None, Engine::Both).unwrap();
            assert!(r.equal, "{i}{j}: {} vs {}", r.lhs, r.rhs);
            assert_eq!(r.lhs, int(expected[i][j]), "{i}{j}");
        }
    }
}

#[test]
fn quadric_euler_pairing() {
    let n = 2;
    let i = c(n, zeta(4, 1));
    let a = mf1(n, &x(n, 0) + &(&i * &x(n, 1)), &x(n, 0) - &(&i * &x(n, 1)));
    let t = Symmetry::identity(2);
    let id = MFMorphism::identity(&a);
    let r = verify_hlf(&a, &a, &t, &id, &id, None, Engine::Both).unwrap();
    assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(1), int(1)));
}

/// `(x + y, ...) (x) (z, z^2)` on `x^3 + y^3 + z^3` rotated in `z`: two-dimensional fixed locus.
#[test]
fn cubic_rotated_in_one_coordinate() {
    let n = 3;
    let line = mf1(n, &x(n, 0) + &x(n, 1), x(n, 0).pow(2) - &x(n, 0) * &x(n, 1) + x(n, 1).pow(2));
    let e = tensor_mf(&line, &mf1(n, x(n, 2), x(n, 2).pow(2))).unwrap();
    let t = Symmetry::from_exponents(3, &[0, 0, 1]);
    let te = pullback(&t, &e).unwrap();
    // generators (e0 f0, e1 f1 | e1 f0, e0 f1); the z-factor acts by zeta on f1
    let alpha = diag_morphism(&e, &te, &[int(1), zeta(3, 1), int(1), zeta(3, 1)]);
    assert!(alpha.is_closed());
    let beta = alpha.inverse().unwrap();
    let lhs = lhs_hlf(&e, &e, &t, &alpha, &beta).unwrap();
    let rhs = rhs_hlf(&e, &e, &t, &alpha, &beta, None).unwrap();
    let expected = &int(4) + &(&int(2) * &zeta(3, 1));
    assert_eq!(lhs, expected);
    assert_eq!(rhs, expected);
}

/// Isolated fixed point: both sides reduce to `str(alpha|_0) str(beta|_0) / (1 - t)`.
#[test]
fn a2_rotation() {
    let e = mf1(1, x(1, 0), x(1, 0).pow(2));
    let t = Symmetry::from_exponents(3, &[1]);
    let alpha = diag_morphism(&e, &pullback(&t, &e).unwrap(), &[int(1), zeta(3, 1)]);
    let beta = alpha.inverse().unwrap();
    let r = verify_isolated(&e, &e, &t, &alpha, &beta, None, Engine::Both).unwrap();
    assert!(r.equal);
    // (1 - z)(1 - z^2)/(1 - z) = 1 - z^2
    assert_eq!(r.lhs, &int(1) - &zeta(3, 2));
}

/// Chern characters: zero for `(x, x)` on `x^2`, a nonzero constant for a quadric in two variables.
#[test]
fn chern_characters_of_quadrics() {
    let e = mf1(1, x(1, 0), x(1, 0));
    let t = Symmetry::identity(1);
    let space = trace_space(e.potential(), &t, None).unwrap();
    let ch = boundary_bulk(&space, &e, &MFMorphism::identity(&e)).unwrap();
    assert_eq!(ch.parity, 1);
    assert!(ch.class.is_zero());

    let n = 2;
    let i = c(n, zeta(4, 1));
    let e = mf1(n, &x(n, 0) + &(&i * &x(n, 1)), &x(n, 0) - &(&i * &x(n, 1)));
    let t = Symmetry::identity(n);
    let space = trace_space(e.potential(), &t, None).unwrap();
    let ch = boundary_bulk(&space, &e, &MFMorphism::identity(&e)).unwrap();
    assert_eq!(ch.parity, 0);
    assert!(!ch.class.is_zero() && ch.class.is_constant());
    let zero = boundary_bulk(&space, &e, &MFMorphism::identity(&e).scale(&Scalar::zero())).unwrap();
    assert_eq!(zero.class, Polynomial::zero(n));
}
