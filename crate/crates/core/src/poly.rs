//! Sparse multivariate polynomials over [`Scalar`], polynomial matrices, diagonal
//! symmetries and weight systems.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive};

use crate::linalg::Matrix;
use crate::scalars::{RootOfUnity, Scalar};

/// Exponent vector. Ordered by degree-reverse-lexicographic order with `x_1 > x_2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn weighted_degree(&self, weights: &[Rational64]) -> Rational64 {
        self.0.iter().zip(weights).map(|(&e, w)| w * Rational64::from_integer(e as i64)).sum()
    }

    fn format(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Default variable names `x1, x2, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(nvars, Monomial::var(nvars, i), Scalar::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.nvars(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled_shifted(&mut self, c: &Scalar, m: &Monomial, other: &Polynomial) {
        for (om, oc) in &other.terms {
            self.add_term(om.mul(m), &(c * oc));
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[i] -= 1;
            out.add_term(nm, &(c * &Scalar::from_int(e as i64)));
        }
        out
    }

    /// `f(t_1 x_1, ..., t_n x_n)`.
    pub fn scale_substitute(&self, t: &Symmetry) -> Polynomial {
        assert_eq!(t.len(), self.nvars, "symmetry length must match the variable count");
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut r = RootOfUnity::one();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    r = r.mul(&t.0[i].pow(e as i64));
                }
            }
            let v = if r.is_one() { c.clone() } else { c * &r.to_scalar() };
            out.add_term(m.clone(), &v);
        }
        out
    }

    /// Rename variables into a ring with `nvars` variables; variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c);
        }
        out
    }

    /// Set the variables outside `keep` to zero and re-index onto `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(keep.len());
        'terms: for (m, c) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 && !keep.contains(&i) {
                    continue 'terms;
                }
            }
            out.add_term(Monomial(keep.iter().map(|&i| m.0[i]).collect()), c);
        }
        out
    }

    /// Weighted degree shared by all terms, `Some(None)` for the zero polynomial.
    pub fn homogeneous_degree(&self, weights: &[Rational64]) -> Option<Option<Rational64>> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = m.weighted_degree(weights);
            match deg {
                None => deg = Some(d),
                Some(x) if x != d => return None,
                _ => {}
            }
        }
        Some(deg)
    }

    /// Largest denominator order among the coefficients.
    pub fn coefficient_order(&self) -> u32 {
        self.terms.values().fold(1, |acc, c| acc.lcm(&c.order()))
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let (neg, body) = format_term(m, c, names);
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn format_term(m: &Monomial, c: &Scalar, names: &[String]) -> (bool, String) {
    let mono = m.format(names);
    let d = c.descend();
    let (neg, abs) = match d.as_rational() {
        Some(q) if q.is_negative() => (true, -&d),
        Some(_) => (false, d.clone()),
        None => (false, d.clone()),
    };
    let rational = abs.as_rational().is_some();
    let cs = abs.to_string();
    let body = if mono.is_empty() {
        if rational { cs } else { format!("({cs})") }
    } else if abs.is_one() {
        mono
    } else if rational {
        format!("{cs}*{mono}")
    } else {
        format!("({cs})*{mono}")
    };
    (neg, body)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(&default_names(self.nvars)))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Scalar::from_int(-1))
    }
}

macro_rules! owned_poly_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
owned_poly_binop!(Add, add);
owned_poly_binop!(Sub, sub);
owned_poly_binop!(Mul, mul);

/// Diagonal symmetry `x_i -> t_i x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry(Vec<RootOfUnity>);

impl Symmetry {
    pub fn new(roots: Vec<RootOfUnity>) -> Self {
        Symmetry(roots)
    }

    /// `(zeta_m^e_1, ..., zeta_m^e_n)`.
    pub fn from_exponents(order: u32, exps: &[i64]) -> Self {
        Symmetry(exps.iter().map(|&e| RootOfUnity::new(order, e)).collect())
    }

    pub fn identity(n: usize) -> Self {
        Symmetry(vec![RootOfUnity::one(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn roots(&self) -> &[RootOfUnity] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Symmetry(self.0.iter().map(RootOfUnity::inverse).collect())
    }

    pub fn compose(&self, other: &Symmetry) -> Self {
        assert_eq!(self.len(), other.len());
        Symmetry(self.0.iter().zip(&other.0).map(|(a, b)| a.mul(b)).collect())
    }

    pub fn pow(&self, k: i64) -> Self {
        Symmetry(self.0.iter().map(|r| r.pow(k)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(RootOfUnity::is_one)
    }

    /// Indices with `t_i = 1`.
    pub fn fixed(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_one()).collect()
    }

    /// Indices with `t_i != 1`.
    pub fn moving(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_one()).collect()
    }

    /// Order of `t` as a group element.
    pub fn group_order(&self) -> u32 {
        self.0.iter().fold(1, |acc, r| acc.lcm(&r.multiplicative_order()))
    }

    /// Cyclotomic order large enough to hold every `t_i`.
    pub fn field_order(&self) -> u32 {
        self.0.iter().fold(1, |acc, r| acc.lcm(&r.order()))
    }

    /// `zeta(m)^[e_1,...,e_n]` over the common field order.
    pub fn literal(&self) -> String {
        let m = self.field_order();
        let exps: Vec<String> = self.0.iter().map(|r| (r.exponent() * (m / r.order())).to_string()).collect();
        format!("zeta({})^[{}]", m, exps.join(","))
    }
}

/// Is `f(t x) == f(x)`.
pub fn check_symmetry(w: &Polynomial, t: &Symmetry) -> bool {
    t.len() == w.nvars() && &w.scale_substitute(t) == w
}

/// Difference quotients `Delta_i w` in the ring `(x_1..x_n, y_1..y_n)`, with
/// `sum_i Delta_i w * (y_i - x_i) = w(y) - w(x)`.
pub fn difference_quotients(w: &Polynomial) -> Vec<Polynomial> {
    let n = w.nvars();
    (0..n)
        .map(|i| {
            // g = w(y_1..y_{i-1}, x_i, ..., x_n)
            let map: Vec<usize> = (0..n).map(|j| if j < i { n + j } else { j }).collect();
            let g = w.embed(2 * n, &map);
            let mut out = Polynomial::zero(2 * n);
            for (m, c) in g.terms() {
                let k = m.0[i];
                if k == 0 {
                    continue;
                }
                // (y^k - x^k) / (y - x) = sum_{a+b=k-1} y^a x^b
                for a in 0..k {
                    let mut e = m.0.clone();
                    e[i] = k - 1 - a;
                    e[n + i] += a;
                    out.add_term(Monomial(e), c);
                }
            }
            out
        })
        .collect()
}

pub fn hessian_matrix(w: &Polynomial) -> PolyMatrix {
    let n = w.nvars();
    let first: Vec<Polynomial> = (0..n).map(|i| w.partial_derivative(i)).collect();
    let mut h = PolyMatrix::zeros(n, n, n);
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, first[i].partial_derivative(j));
        }
    }
    h
}

pub fn hessian_determinant(w: &Polynomial) -> Polynomial {
    hessian_matrix(w).determinant()
}

/// Positive weights making a polynomial quasi-homogeneous of weighted degree one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSystem {
    pub weights: Vec<Rational64>,
    pub degree: Rational64,
}

impl WeightSystem {
    pub fn new(weights: Vec<Rational64>) -> Self {
        WeightSystem { weights, degree: Rational64::one() }
    }

    /// Minimum-norm solution of the term equations, when it is positive.
    pub fn infer(w: &Polynomial) -> Option<WeightSystem> {
        let n = w.nvars();
        if w.is_zero() {
            return if n == 0 { Some(WeightSystem::new(vec![])) } else { None };
        }
        if n == 0 {
            return None;
        }
        let rows: Vec<Vec<Scalar>> = w
            .terms()
            .map(|(m, _)| {
                let mut r: Vec<Scalar> = m.exponents().iter().map(|&e| Scalar::from_int(e as i64)).collect();
                r.push(Scalar::one());
                r
            })
            .collect();
        let mut aug = Matrix::from_rows(rows);
        let pivots = aug.rref();
        if pivots.last() == Some(&n) {
            return None;
        }
        let k = pivots.len();
        // reduced system R q = b with R full row rank; q = R^T (R R^T)^-1 b
        let r = Matrix::from_rows((0..k).map(|i| (0..n).map(|j| aug.get(i, j).clone()).collect()).collect());
        let b: Vec<Scalar> = (0..k).map(|i| aug.get(i, n).clone()).collect();
        let mut rt = Matrix::zeros(n, k);
        for i in 0..k {
            for j in 0..n {
                rt.set(j, i, r.get(i, j).clone());
            }
        }
        let y = r.mul(&rt).solve(&b)?;
        let q = rt.mul_vec(&y);
        let mut weights = Vec::with_capacity(n);
        for s in q {
            let v = s.as_rational()?;
            let num = v.numer().to_i64()?;
            let den = v.denom().to_i64()?;
            let r = Rational64::new(num, den);
            if !r.is_positive() {
                return None;
            }
            weights.push(r);
        }
        let ws = WeightSystem::new(weights);
        ws.is_quasi_homogeneous(w).then_some(ws)
    }

    pub fn is_quasi_homogeneous(&self, w: &Polynomial) -> bool {
        w.homogeneous_degree(&self.weights) == Some(Some(self.degree))
    }

    /// Weighted degree of the Hessian, i.e. the socle degree of the Milnor algebra.
    pub fn socle_degree(&self) -> Rational64 {
        self.weights.iter().map(|q| self.degree - q * 2).sum()
    }

    /// Restriction to a subset of the variables.
    pub fn restrict(&self, keep: &[usize]) -> WeightSystem {
        WeightSystem { weights: keep.iter().map(|&i| self.weights[i]).collect(), degree: self.degree }
    }
}

/// Dense matrix of polynomials in a fixed number of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, data: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, Polynomial::one(nvars));
        }
        m
    }

    pub fn scalar_identity(n: usize, nvars: usize, c: &Polynomial) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Polynomial>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged polynomial matrix");
        PolyMatrix { rows: r, cols: c, nvars, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(nvars: usize, rows: usize, cols: &[Vec<Polynomial>]) -> Self {
        let mut m = Self::zeros(rows, cols.len(), nvars);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_scalars(m: &Matrix, nvars: usize) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), nvars);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, Polynomial::constant(nvars, m.get(i, j).clone()));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Polynomial {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.data[i * self.cols + j] = p;
    }

    pub fn column(&self, j: usize) -> Vec<Polynomial> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Polynomial>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Polynomial> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Polynomial> {
        self.data.iter()
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        let data: Vec<Polynomial> = self.data.iter().map(f).collect();
        let nvars = data.first().map_or(self.nvars, Polynomial::nvars);
        PolyMatrix { rows: self.rows, cols: self.cols, nvars, data }
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "polynomial matrix shapes do not compose");
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a * b;
                    let e = out.get_mut(i, j);
                    for (m, c) in p.terms() {
                        e.add_term(m.clone(), c);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Polynomial::zero(self.nvars);
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, c: &Polynomial) -> PolyMatrix {
        self.map(|p| p * c)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(rows.len(), cols.len(), self.nvars);
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Place `block` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &PolyMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn partial_derivative(&self, i: usize) -> PolyMatrix {
        self.map(|p| p.partial_derivative(i))
    }

    pub fn scale_substitute(&self, t: &Symmetry) -> PolyMatrix {
        self.map(|p| p.scale_substitute(t))
    }

    pub fn restrict(&self, keep: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rows, self.cols, keep.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).restrict(keep));
            }
        }
        out
    }

    pub fn embed(&self, nvars: usize, map: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rows, self.cols, nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).embed(nvars, map));
            }
        }
        out
    }

    /// Entrywise value at the origin.
    pub fn eval_at_zero(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).constant_term());
            }
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.data.iter().all(Polynomial::is_constant)
    }

    pub fn trace(&self) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Laplace expansion along the first row.
    pub fn determinant(&self) -> Polynomial {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => Polynomial::one(self.nvars),
            1 => self.get(0, 0).clone(),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                let mut acc = Polynomial::zero(self.nvars);
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                    let mut minor = PolyMatrix::zeros(n - 1, n - 1, self.nvars);
                    for i in 1..n {
                        for (b, &c) in cols.iter().enumerate() {
                            minor.set(i - 1, b, self.get(i, c).clone());
                        }
                    }
                    let term = a * &minor.determinant();
                    acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    /// Inverse over the polynomial ring by Gauss-Jordan with unit (nonzero constant) pivots.
    pub fn inverse(&self) -> Option<PolyMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = PolyMatrix::identity(n, self.nvars);
        for c in 0..n {
            let p = (c..n).find(|&i| {
                let e = a.get(i, c);
                !e.is_zero() && e.is_constant()
            })?;
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    inv.data.swap(p * n + j, c * n + j);
                }
            }
            let u = a.get(c, c).constant_term().inv()?;
            for j in 0..n {
                let v = a.get(c, j).scale(&u);
                a.set(c, j, v);
                let v = inv.get(c, j).scale(&u);
                inv.set(c, j, v);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    let v = a.get(i, j) - &(&f * a.get(c, j));
                    a.set(i, j, v);
                    let v = inv.get(i, j) - &(&f * inv.get(c, j));
                    inv.set(i, j, v);
                }
            }
        }
        Some(inv)
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut out = String::from("{ ");
        for i in 0..self.rows {
            if i > 0 {
                out.push_str(" ; ");
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).format(names)).collect();
            out.push_str(&row.join(", "));
        }
        out.push_str(" }");
        out
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(&default_names(self.nvars)))
    }
}
