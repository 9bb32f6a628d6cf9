//! Milnor algebras, the residue functional and the trace spaces `H(w_t)`.

use std::collections::HashMap;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::groebner::{GroebnerBasis, ModVec};
use crate::linalg::Matrix;
use crate::poly::{hessian_determinant, Monomial, Polynomial, Symmetry, WeightSystem};
use crate::scalars::Scalar;

/// `R / (d_1 w, ..., d_n w)` with its standard monomial basis and residue.
#[derive(Clone, Debug)]
pub struct MilnorAlgebra {
    w: Polynomial,
    weights: Option<WeightSystem>,
    gb: GroebnerBasis,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Socle monomial and the residue of that monomial.
    socle: Option<(Monomial, Scalar)>,
}

pub fn milnor_data(w: &Polynomial) -> Result<MilnorAlgebra> {
    MilnorAlgebra::new(w, None)
}

impl MilnorAlgebra {
    /// Uses `weights` when given, otherwise infers them; without weights the residue is unavailable.
    pub fn new(w: &Polynomial, weights: Option<WeightSystem>) -> Result<Self> {
        let n = w.nvars();
        let jac: Vec<Polynomial> = (0..n).map(|i| w.partial_derivative(i)).collect();
        let gb = GroebnerBasis::ideal(&jac, n);
        let basis: Vec<Monomial> = gb
            .standard_monomials()
            .map_err(|_| Error::NonIsolated(format!("Jacobian ideal of {w} has infinite colength")))?
            .into_iter()
            .map(|(_, m)| m)
            .collect();
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let weights = match weights {
            Some(ws) => {
                if !ws.is_quasi_homogeneous(w) && n > 0 {
                    return Err(Error::NonHomogeneous(format!("{w} is not homogeneous for the given weights")));
                }
                Some(ws)
            }
            None => WeightSystem::infer(w),
        };
        let mut alg = MilnorAlgebra { w: w.clone(), weights, gb, basis, index, socle: None };
        alg.socle = alg.compute_socle()?;
        Ok(alg)
    }

    fn compute_socle(&self) -> Result<Option<(Monomial, Scalar)>> {
        let n = self.w.nvars();
        if n == 0 {
            return Ok(Some((Monomial::one(0), Scalar::one())));
        }
        let Some(ws) = &self.weights else { return Ok(None) };
        let degs: Vec<Rational64> = self.basis.iter().map(|m| m.weighted_degree(&ws.weights)).collect();
        let top = *degs.iter().max().unwrap();
        let tops: Vec<&Monomial> = self.basis.iter().zip(&degs).filter(|(_, d)| **d == top).map(|(m, _)| m).collect();
        if tops.len() != 1 {
            return Err(Error::Internal(format!("top weighted degree of the Milnor algebra of {} is not one-dimensional", self.w)));
        }
        let s = tops[0].clone();
        let h = self.normal_form(&hessian_determinant(&self.w));
        let hc = h.coefficient(&s);
        let inv = hc.inv().ok_or_else(|| Error::Internal("Hessian vanishes in the socle".into()))?;
        Ok(Some((s, &Scalar::from_int(self.milnor_number() as i64) * &inv)))
    }

    pub fn potential(&self) -> &Polynomial {
        &self.w
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn weights(&self) -> Option<&WeightSystem> {
        self.weights.as_ref()
    }

    pub fn milnor_number(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn jacobian_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn socle_monomial(&self) -> Option<&Monomial> {
        self.socle.as_ref().map(|(m, _)| m)
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let n = self.w.nvars();
        self.gb.normal_form(&ModVec::from_polys(std::slice::from_ref(f), n)).to_polys().remove(0)
    }

    pub fn coordinates(&self, f: &Polynomial) -> Vec<Scalar> {
        let nf = self.normal_form(f);
        let mut out = vec![Scalar::zero(); self.basis.len()];
        for (m, c) in nf.terms() {
            out[self.index[m]] = c.clone();
        }
        out
    }

    /// Residue normalized by `Res(hess w) = mu`; the identity in zero variables.
    pub fn residue(&self, f: &Polynomial) -> Result<Scalar> {
        let (s, lambda) = self
            .socle
            .as_ref()
            .ok_or_else(|| Error::NonHomogeneous(format!("residue requires a quasi-homogeneous potential, got {}", self.w)))?;
        Ok(&self.normal_form(f).coefficient(s) * lambda)
    }

    pub fn residue_pairing(&self, f: &Polynomial, g: &Polynomial) -> Result<Scalar> {
        self.residue(&(f * g))
    }

    /// Residue pairing on the standard basis.
    pub fn gram_matrix(&self) -> Result<Matrix> {
        let n = self.w.nvars();
        let mut g = Matrix::zeros(self.basis.len(), self.basis.len());
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let p = Polynomial::term(n, a.mul(b), Scalar::one());
                g.set(i, j, self.residue(&p)?);
            }
        }
        Ok(g)
    }
}

/// `H(w_t)`: the Milnor algebra of `w` restricted to the fixed subspace, shifted by `n - k`.
#[derive(Clone, Debug)]
pub struct TraceSpace {
    pub t: Symmetry,
    pub fixed: Vec<usize>,
    pub moving: Vec<usize>,
    pub w_t: Polynomial,
    pub algebra: MilnorAlgebra,
    /// `(n - k) mod 2`.
    pub parity: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSpaceElement {
    pub t: Symmetry,
    pub fixed: Vec<usize>,
    /// Normal form in the fixed variables.
    pub class: Polynomial,
    pub parity: u8,
}

pub fn trace_space(w: &Polynomial, t: &Symmetry, weights: Option<&WeightSystem>) -> Result<TraceSpace> {
    if !crate::poly::check_symmetry(w, t) {
        return Err(Error::NotSymmetry(format!("{} does not preserve {w}", t.literal())));
    }
    let fixed = t.fixed();
    let moving = t.moving();
    let w_t = w.restrict(&fixed);
    let ws = weights.cloned().or_else(|| WeightSystem::infer(w)).map(|ws| ws.restrict(&fixed));
    let algebra = MilnorAlgebra::new(&w_t, ws).map_err(|e| match e {
        Error::NonIsolated(m) => Error::NonIsolated(format!("restricted potential w_t: {m}")),
        e => e,
    })?;
    Ok(TraceSpace { t: t.clone(), parity: (fixed.len() % 2) as u8, fixed, moving, w_t, algebra })
}

impl TraceSpace {
    pub fn element(&self, class: &Polynomial) -> TraceSpaceElement {
        TraceSpaceElement {
            t: self.t.clone(),
            fixed: self.fixed.clone(),
            class: self.algebra.normal_form(class),
            parity: self.parity,
        }
    }

    pub fn zero(&self) -> TraceSpaceElement {
        self.element(&Polynomial::zero(self.fixed.len()))
    }

    /// Superdimension `(-1)^{n-k} mu(w_t)`.
    pub fn sdim(&self) -> i64 {
        let mu = self.algebra.milnor_number() as i64;
        if self.parity == 1 { -mu } else { mu }
    }
}

/// Sign `(-1)^{m(m-1)/2}` attached to the residue pairing on an `m`-dimensional fixed locus.
pub fn pairing_sign(m: usize) -> Scalar {
    if (m * m.saturating_sub(1) / 2).is_multiple_of(2) {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// `sign(m) * prod_{moving}(1 - t_i)^{-1} * Res(u v)` on `H(w_t) x H(w_{t^-1})`.
pub fn canonical_pairing(space: &TraceSpace, u: &TraceSpaceElement, v: &TraceSpaceElement) -> Result<Scalar> {
    if u.fixed != v.fixed || u.fixed != space.fixed {
        return Err(Error::Precondition("pairing arguments have different fixed loci".into()));
    }
    if v.t != u.t.inverse() {
        return Err(Error::Precondition("pairing arguments are not over inverse symmetries".into()));
    }
    let mut factor = pairing_sign(space.fixed.len());
    for &i in &space.moving {
        let d = Scalar::one() - u.t.roots()[i].to_scalar();
        factor = &factor * &d.inv().expect("moving coordinate");
    }
    Ok(&factor * &space.algebra.residue_pairing(&u.class, &v.class)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn q(a: i64, b: i64) -> Scalar {
        Scalar::from_frac(a, b)
    }

    #[test]
    fn milnor_numbers() {
        let a = milnor_data(&x(1, 0).pow(2)).unwrap();
        assert_eq!(a.milnor_number(), 1);
        let a = milnor_data(&x(1, 0).pow(3)).unwrap();
        assert_eq!(a.basis(), &[Monomial::one(1), Monomial::var(1, 0)]);
        let a = milnor_data(&(x(2, 0).pow(3) + x(2, 1).pow(3))).unwrap();
        assert_eq!(a.milnor_number(), 4);
        assert!(matches!(milnor_data(&(x(2, 0).pow(2))), Err(Error::NonIsolated(_))));
    }

    #[test]
    fn residues() {
        let a = milnor_data(&x(1, 0).pow(2)).unwrap();
        assert_eq!(a.residue(&Polynomial::one(1)).unwrap(), q(1, 2));
        let a = milnor_data(&x(1, 0).pow(3)).unwrap();
        assert_eq!(a.residue(&x(1, 0)).unwrap(), q(1, 3));
        assert_eq!(a.residue(&Polynomial::one(1)).unwrap(), Scalar::zero());
        assert_eq!(a.residue_pairing(&x(1, 0), &x(1, 0)).unwrap(), Scalar::zero());
        let w = x(2, 0).pow(3) + x(2, 1).pow(3);
        let a = milnor_data(&w).unwrap();
        assert_eq!(a.residue(&(x(2, 0) * x(2, 1))).unwrap(), q(1, 9));
        assert_eq!(a.residue(&hessian_determinant(&w)).unwrap(), Scalar::from_int(4));
        assert_ne!(a.gram_matrix().unwrap().determinant(), Scalar::zero());
    }

    #[test]
    fn zero_variables() {
        let a = milnor_data(&Polynomial::zero(0)).unwrap();
        assert_eq!(a.milnor_number(), 1);
        assert_eq!(a.residue(&Polynomial::constant(0, q(5, 7))).unwrap(), q(5, 7));
    }

    #[test]
    fn trace_spaces_and_pairing() {
        let t = Symmetry::from_exponents(2, &[1]);
        let s = trace_space(&x(1, 0).pow(2), &t, None).unwrap();
        assert_eq!((s.algebra.milnor_number(), s.parity), (1, 0));
        let one = s.element(&Polynomial::one(0));
        let inv = TraceSpaceElement { t: t.inverse(), ..one.clone() };
        assert_eq!(canonical_pairing(&s, &one, &inv).unwrap(), q(1, 2));

        let w = x(2, 0).pow(3) + x(2, 1).pow(3);
        let t = Symmetry::from_exponents(3, &[1, 0]);
        let s = trace_space(&w, &t, None).unwrap();
        assert_eq!((s.algebra.milnor_number(), s.parity), (2, 1));
        let u = s.element(&Polynomial::one(1));
        let v = TraceSpaceElement { t: t.inverse(), ..s.element(&x(1, 0)) };
        let expected = &(Scalar::one() - Scalar::zeta(3)).inv().unwrap() * &q(1, 3);
        assert_eq!(canonical_pairing(&s, &u, &v).unwrap(), expected);

        let t = Symmetry::from_exponents(2, &[1, 1]);
        let s = trace_space(&(x(2, 0).pow(2) + x(2, 1).pow(2)), &t, None).unwrap();
        assert_eq!((s.algebra.milnor_number(), s.parity), (1, 0));
        assert!(trace_space(&x(1, 0).pow(3), &Symmetry::from_exponents(2, &[1]), None).is_err());
    }
}
