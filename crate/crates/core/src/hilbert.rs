//! Hilbert series data of graded modules and the checks tying them to stabilizations.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groebner::{free_resolution, FreeResolution, Lifter};
use crate::lefschetz::LefschetzReport;
use crate::mf::stabilize_module;
use crate::milnor::milnor_data;
use crate::poly::{PolyMatrix, Polynomial};
use crate::scalars::Scalar;

/// `R^r / <columns of relations>` with generator degrees, standard grading on `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModulePresentation {
    pub gen_degrees: Vec<i64>,
    pub relations: PolyMatrix,
}

impl GradedModulePresentation {
    pub fn new(gen_degrees: Vec<i64>, relations: PolyMatrix) -> Result<Self> {
        if relations.rows() != gen_degrees.len() {
            return Err(Error::Dimension(format!(
                "{} generator degrees but relations have {} rows",
                gen_degrees.len(),
                relations.rows()
            )));
        }
        for (j, c) in relations.columns().iter().enumerate() {
            let mut deg = None;
            for (p, d) in c.iter().zip(&gen_degrees) {
                for (m, _) in p.terms() {
                    let x = m.degree() as i64 + d;
                    if *deg.get_or_insert(x) != x {
                        return Err(Error::NonHomogeneous(format!("relation {} is not homogeneous", j + 1)));
                    }
                }
            }
        }
        Ok(GradedModulePresentation { gen_degrees, relations })
    }

    pub fn nvars(&self) -> usize {
        self.relations.nvars()
    }

    pub fn resolution(&self) -> Result<FreeResolution> {
        free_resolution(&self.relations, &self.gen_degrees)
    }

    /// Does `w` kill every generator.
    pub fn annihilated_by(&self, w: &Polynomial) -> bool {
        let n = self.nvars();
        let r = self.gen_degrees.len();
        let lifter = Lifter::from_matrix(&self.relations);
        (0..r).all(|j| {
            let v: Vec<Polynomial> = (0..r).map(|i| if i == j { w.clone() } else { Polynomial::zero(n) }).collect();
            lifter.contains(&v)
        })
    }
}

/// Laurent polynomial in `t` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent(BTreeMap<i64, BigInt>);

impl Laurent {
    pub fn zero() -> Self {
        Laurent(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(e: i64, c: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(e, &BigInt::from(c));
        l
    }

    pub fn from_coeffs(it: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut l = Laurent::zero();
        for (e, c) in it {
            l.add_term(e, &BigInt::from(c));
        }
        l
    }

    pub fn add_term(&mut self, e: i64, c: &BigInt) {
        let v = self.0.entry(e).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.0.get(&e).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }

    pub fn eval(&self, t: i64) -> BigInt {
        assert!(t != 0 || self.0.keys().all(|&e| e >= 0));
        let mut acc = BigInt::zero();
        for (&e, c) in &self.0 {
            if e >= 0 {
                acc += c * BigInt::from(t).pow(e as u32);
            } else {
                // only t = +-1 is needed for negative exponents
                assert!(t == 1 || t == -1, "negative exponent at t = {t}");
                acc += if t == -1 && e.is_odd() { -c } else { c.clone() };
            }
        }
        acc
    }

    /// `(1 - t)^k`.
    pub fn one_minus_t_pow(k: u32) -> Laurent {
        let base = Laurent::from_coeffs([(0, 1), (1, -1)]);
        (0..k).fold(Laurent::one(), |acc, _| acc.mul(&base))
    }

    /// Exact quotient by `1 - t`, if it divides.
    pub fn div_one_minus_t(&self) -> Option<Laurent> {
        if self.is_zero() {
            return Some(Laurent::zero());
        }
        if !self.eval(1).is_zero() {
            return None;
        }
        // q(t) (1 - t) = p(t): q_e = sum_{j <= e} p_j
        let lo = *self.0.keys().next().unwrap();
        let hi = *self.0.keys().next_back().unwrap();
        let mut out = Laurent::zero();
        let mut acc = BigInt::zero();
        for e in lo..hi {
            acc += self.coeff(e);
            out.add_term(e, &acc);
        }
        Some(out)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&e, c) in &self.0 {
            let neg = c.is_negative();
            let a = c.abs();
            let body = match (e, a.is_one()) {
                (0, _) => a.to_string(),
                (1, true) => "t".into(),
                (1, false) => format!("{a}*t"),
                (_, true) => format!("t^{e}"),
                (_, false) => format!("{a}*t^{e}"),
            };
            if first {
                write!(f, "{}{body}", if neg { "-" } else { "" })?;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
            first = false;
        }
        Ok(())
    }
}

/// `sum_i (-1)^i sum_{generators g of F_i} t^{deg g}` over the minimal resolution.
pub fn chi_polynomial(m: &GradedModulePresentation) -> Result<Laurent> {
    Ok(chi_of_resolution(&m.resolution()?))
}

pub fn chi_of_resolution(res: &FreeResolution) -> Laurent {
    let mut chi = Laurent::zero();
    for (i, degs) in res.degrees.iter().enumerate() {
        let s = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for &d in degs {
            chi.add_term(d, &s);
        }
    }
    chi
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertData {
    pub chi: Laurent,
    pub krull_dim: usize,
    pub multiplicity: Laurent,
}

/// `chi = e (1 - t)^{n - d}` with `e(1) != 0`.
pub fn multiplicity_data(chi: &Laurent, n: usize) -> Result<HilbertData> {
    if chi.is_zero() {
        return Err(Error::Precondition("chi polynomial is zero".into()));
    }
    let mut e = chi.clone();
    let mut order = 0usize;
    while let Some(q) = e.div_one_minus_t() {
        e = q;
        order += 1;
    }
    if order > n {
        return Err(Error::Internal(format!("chi vanishes to order {order} > {n} at t = 1")));
    }
    Ok(HilbertData { chi: chi.clone(), krull_dim: n - order, multiplicity: e })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvenMultiplicityReport {
    pub e_at_minus_one: BigInt,
    pub krull_dim: usize,
    /// `d(M) - floor(n/2)`; nonpositive bounds are vacuous.
    pub exponent: i64,
    pub pass: bool,
    pub micros: u128,
}

/// `2^{d(M) - floor(n/2)}` divides `e_M(-1)` for `M` killed by a smooth even-degree `w`.
pub fn verify_even_multiplicity_divisibility(m: &GradedModulePresentation, w: &Polynomial) -> Result<EvenMultiplicityReport> {
    let start = Instant::now();
    let n = m.nvars();
    let deg = match w.homogeneous_degree(&vec![num_rational::Rational64::one(); n]) {
        Some(Some(d)) => *d.numer(),
        _ => return Err(Error::NonHomogeneous("potential is not homogeneous".into())),
    };
    if deg % 2 != 0 {
        return Err(Error::Precondition(format!("potential has odd degree {deg}")));
    }
    milnor_data(w).map_err(|_| Error::Precondition("projective hypersurface is singular".into()))?;
    if !m.annihilated_by(w) {
        return Err(Error::Precondition("w does not annihilate the module".into()));
    }
    let data = multiplicity_data(&chi_polynomial(m)?, n)?;
    let e = data.multiplicity.eval(-1);
    let exponent = data.krull_dim as i64 - (n / 2) as i64;
    let pass = exponent <= 0 || e.is_zero() || (&e % BigInt::from(2).pow(exponent as u32)).is_zero();
    Ok(EvenMultiplicityReport { e_at_minus_one: e, krull_dim: data.krull_dim, exponent, pass, micros: start.elapsed().as_micros() })
}

/// `str((-1)^*, A|_0) = chi_M(-1)` for the stabilization `A` of `M`.
pub fn chi_stabilization_consistency(m: &GradedModulePresentation, w: &Polynomial) -> Result<LefschetzReport> {
    let start = Instant::now();
    let st = stabilize_module(&m.relations, &m.gen_degrees, w)?;
    let alpha = st
        .alpha
        .ok_or_else(|| Error::Precondition("potential must have even degree".into()))?;
    let lhs = alpha.supertrace_at_origin();
    let chi = chi_of_resolution(&st.resolution);
    let rhs = Scalar::from_rational(num_rational::BigRational::from_integer(chi.eval(-1)));
    let equal = lhs == rhs;
    Ok(LefschetzReport {
        kind: "chi-stabilization".into(),
        lhs,
        rhs,
        equal,
        engine: "resolution".into(),
        micros: start.elapsed().as_micros(),
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn module(n: usize, rels: Vec<Polynomial>) -> GradedModulePresentation {
        GradedModulePresentation::new(vec![0], PolyMatrix::from_rows(n, vec![rels])).unwrap()
    }

    #[test]
    fn chi_examples() {
        let k = module(2, vec![x(2, 0), x(2, 1)]);
        assert_eq!(chi_polynomial(&k).unwrap(), Laurent::one_minus_t_pow(2));
        let r = GradedModulePresentation::new(vec![0], PolyMatrix::zeros(1, 0, 2)).unwrap();
        assert_eq!(chi_polynomial(&r).unwrap(), Laurent::one());
        let w = x(2, 0).pow(3) + x(2, 1).pow(3);
        assert_eq!(chi_polynomial(&module(2, vec![w])).unwrap(), Laurent::from_coeffs([(0, 1), (3, -1)]));
    }

    #[test]
    fn multiplicities() {
        let d = multiplicity_data(&Laurent::from_coeffs([(0, 1), (2, -1)]), 2).unwrap();
        assert_eq!((d.krull_dim, d.multiplicity), (1, Laurent::from_coeffs([(0, 1), (1, 1)])));
        let d = multiplicity_data(&Laurent::one_minus_t_pow(2), 2).unwrap();
        assert_eq!((d.krull_dim, d.multiplicity), (0, Laurent::one()));
        let d = multiplicity_data(&Laurent::one(), 2).unwrap();
        assert_eq!((d.krull_dim, d.multiplicity), (2, Laurent::one()));
    }

    #[test]
    fn even_multiplicity() {
        let n = 2;
        let w = x(n, 0).pow(2) + x(n, 1).pow(2);
        let r = verify_even_multiplicity_divisibility(&module(n, vec![w.clone()]), &w).unwrap();
        assert_eq!((r.e_at_minus_one.clone(), r.pass), (BigInt::zero(), true));
        let i = Polynomial::constant(n, Scalar::zeta(4));
        let m = module(n, vec![&x(n, 0) - &(&i * &x(n, 1))]);
        let r = verify_even_multiplicity_divisibility(&m, &w).unwrap();
        assert_eq!((r.e_at_minus_one.clone(), r.pass), (BigInt::one(), true));
        let cubic = x(n, 0).pow(3) + x(n, 1).pow(3);
        assert!(verify_even_multiplicity_divisibility(&module(n, vec![cubic.clone()]), &cubic).is_err());
    }

    #[test]
    fn stabilization_consistency() {
        let r = chi_stabilization_consistency(&module(1, vec![x(1, 0)]), &x(1, 0).pow(2)).unwrap();
        assert_eq!((r.lhs.clone(), r.equal), (Scalar::from_int(2), true));
        let w = x(2, 0).pow(2) + x(2, 1).pow(2);
        let r = chi_stabilization_consistency(&module(2, vec![x(2, 0), x(2, 1)]), &w).unwrap();
        assert_eq!((r.lhs.clone(), r.equal), (Scalar::from_int(4), true));
        let r = chi_stabilization_consistency(&module(2, vec![w.clone()]), &w).unwrap();
        assert_eq!((r.lhs.clone(), r.equal), (Scalar::zero(), true));
    }

    #[test]
    fn laurent_display() {
        assert_eq!(Laurent::one_minus_t_pow(2).to_string(), "1 - 2*t + t^2");
    }
}
