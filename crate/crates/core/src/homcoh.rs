//! Cohomology of the morphism complex `Hom(A, B)` of two matrix factorizations.
//!
//! Two engines compute the supertrace of an induced endomorphism: a Gröbner engine that
//! presents `H = ker / im` as a finite quotient module, and a graded engine that works one
//! internal degree at a time with scalar linear algebra.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::groebner::{GroebnerBasis, Lifter, ModVec, QuotientBasis};
use crate::linalg::Matrix;
use crate::mf::{pullback, MFMorphism, MatrixFactorization};
use crate::poly::{Monomial, PolyMatrix, Polynomial, Symmetry, WeightSystem};
use crate::scalars::Scalar;

/// `Hom(A, B)` as a free module; basis elements are the matrix units `E_ij : a_j -> b_i`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub a: MatrixFactorization,
    pub b: MatrixFactorization,
    /// Matrix units of each parity.
    units: [Vec<(usize, usize)>; 2],
    /// `d[p]: Hom_p -> Hom_{1-p}`.
    d: [PolyMatrix; 2],
}

pub fn hom_complex(a: &MatrixFactorization, b: &MatrixFactorization) -> Result<HomComplex> {
    HomComplex::new(a, b)
}

impl HomComplex {
    pub fn new(a: &MatrixFactorization, b: &MatrixFactorization) -> Result<Self> {
        if a.potential() != b.potential() {
            return Err(Error::Dimension("Hom between factorizations of different potentials".into()));
        }
        let n = a.nvars();
        let mut units: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
        for i in 0..b.rank() {
            for j in 0..a.rank() {
                units[((b.parity_of(i) + a.parity_of(j)) % 2) as usize].push((i, j));
            }
        }
        let index: [HashMap<(usize, usize), usize>; 2] =
            [0, 1].map(|p| units[p].iter().enumerate().map(|(k, &u)| (u, k)).collect());
        let da = a.delta();
        let db = b.delta();
        let d = [0usize, 1].map(|p| {
            let q = 1 - p;
            let sign = if p == 0 { Scalar::from_int(-1) } else { Scalar::one() };
            let mut m = PolyMatrix::zeros(units[q].len(), units[p].len(), n);
            for (col, &(i, j)) in units[p].iter().enumerate() {
                for k in 0..b.rank() {
                    let e = db.get(k, i);
                    if !e.is_zero() {
                        let row = index[q][&(k, j)];
                        let v = m.get(row, col) + e;
                        m.set(row, col, v);
                    }
                }
                for l in 0..a.rank() {
                    let e = da.get(j, l);
                    if !e.is_zero() {
                        let row = index[q][&(i, l)];
                        let v = m.get(row, col) + &e.scale(&sign);
                        m.set(row, col, v);
                    }
                }
            }
            m
        });
        if !d[1].mul(&d[0]).is_zero() || !d[0].mul(&d[1]).is_zero() {
            return Err(Error::Internal("Hom differential does not square to zero".into()));
        }
        Ok(HomComplex { a: a.clone(), b: b.clone(), units, d })
    }

    pub fn nvars(&self) -> usize {
        self.a.nvars()
    }

    pub fn rank(&self, p: usize) -> usize {
        self.units[p].len()
    }

    pub fn units(&self, p: usize) -> &[(usize, usize)] {
        &self.units[p]
    }

    /// Differential out of parity `p`.
    pub fn differential(&self, p: usize) -> &PolyMatrix {
        &self.d[p]
    }

    pub fn to_vector(&self, p: usize, phi: &PolyMatrix) -> Vec<Polynomial> {
        self.units[p].iter().map(|&(i, j)| phi.get(i, j).clone()).collect()
    }

    pub fn to_matrix(&self, p: usize, v: &[Polynomial]) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.b.rank(), self.a.rank(), self.nvars());
        for (&(i, j), x) in self.units[p].iter().zip(v) {
            m.set(i, j, x.clone());
        }
        m
    }

    pub fn apply_differential(&self, phi: &MFMorphism) -> PolyMatrix {
        phi.differential()
    }
}

/// One parity of the cohomology: `ker = <k_1..k_s>`, `H = R^s / N`.
#[derive(Clone, Debug)]
pub struct CohomologyPart {
    kernel: Lifter,
    kernel_gens: Vec<Vec<Polynomial>>,
    quotient: QuotientBasis,
    pub representatives: Vec<PolyMatrix>,
}

#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub parts: [CohomologyPart; 2],
}

impl CohomologyBasis {
    pub fn dims(&self) -> (usize, usize) {
        (self.parts[0].representatives.len(), self.parts[1].representatives.len())
    }

    /// Coordinates of a cocycle of parity `p` (a full morphism matrix).
    pub fn coordinates(&self, hx: &HomComplex, p: usize, phi: &PolyMatrix) -> Result<Vec<Scalar>> {
        let part = &self.parts[p];
        let v = hx.to_vector(p, phi);
        let lifted = part
            .kernel
            .lift(&v)
            .map_err(|_| Error::NotClosed("element is not a cocycle".into()))?;
        let s = part.kernel_gens.len();
        let mv = ModVec::from_polys(&lifted, hx.nvars());
        debug_assert_eq!(mv.rank(), s);
        Ok(part.quotient.coordinates(&mv))
    }
}

pub fn cohomology(hx: &HomComplex) -> Result<CohomologyBasis> {
    let n = hx.nvars();
    let part = |p: usize| -> Result<CohomologyPart> {
        let q = 1 - p;
        let rank = hx.rank(p);
        let d_out = hx.differential(p);
        let kernel_gens = Lifter::new(&d_out.columns(), hx.rank(q), n).syzygies();
        let kernel = Lifter::new(&kernel_gens, rank, n);
        let s = kernel_gens.len();
        let mut rel: Vec<Vec<Polynomial>> = Vec::new();
        for col in hx.differential(q).columns() {
            let l = kernel
                .lift(&col)
                .map_err(|_| Error::Internal("coboundary is not a cocycle".into()))?;
            rel.push(l);
        }
        rel.extend(kernel.syzygies());
        let gb = GroebnerBasis::from_polys(&rel, s, n);
        let quotient = QuotientBasis::new(gb)
            .map_err(|_| Error::NonIsolated("morphism cohomology is infinite-dimensional".into()))?;
        let representatives = quotient
            .basis
            .iter()
            .map(|(j, m)| {
                let v: Vec<Polynomial> = kernel_gens[*j].iter().map(|x| x.mul_term(m, &Scalar::one())).collect();
                hx.to_matrix(p, &v)
            })
            .collect();
        Ok(CohomologyPart { kernel, kernel_gens, quotient, representatives })
    };
    Ok(CohomologyBasis { parts: [part(0)?, part(1)?] })
}

/// The map `phi -> beta o t^* phi o alpha` on `H(Hom(A, B))`, one matrix per parity.
pub fn induced_endomorphism(
    hx: &HomComplex,
    basis: &CohomologyBasis,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
) -> Result<[Matrix; 2]> {
    check_twisted(hx, t, alpha, beta)?;
    let mut out = [Matrix::zeros(0, 0), Matrix::zeros(0, 0)];
    for p in 0..2 {
        let reps = &basis.parts[p].representatives;
        let cols: Vec<Vec<Scalar>> = reps
            .iter()
            .map(|phi| {
                let img = beta.matrix.mul(&phi.scale_substitute(t)).mul(&alpha.matrix);
                basis.coordinates(hx, p, &img)
            })
            .collect::<Result<_>>()?;
        out[p] = Matrix::from_columns(&cols, reps.len());
    }
    Ok(out)
}

fn same_mf(x: &MatrixFactorization, y: &MatrixFactorization) -> bool {
    x.potential() == y.potential() && x.d0() == y.d0() && x.d1() == y.d1()
}

/// `alpha: A -> t^* A` and `beta: t^* B -> B`, both even and closed.
fn check_twisted(hx: &HomComplex, t: &Symmetry, alpha: &MFMorphism, beta: &MFMorphism) -> Result<()> {
    if alpha.parity != 0 || beta.parity != 0 {
        return Err(Error::Precondition("alpha and beta must be even".into()));
    }
    if !same_mf(&alpha.source, &hx.a) || !same_mf(&alpha.target, &pullback(t, &hx.a)?) {
        return Err(Error::Precondition("alpha must map A to t^*A".into()));
    }
    if !same_mf(&beta.target, &hx.b) || !same_mf(&beta.source, &pullback(t, &hx.b)?) {
        return Err(Error::Precondition("beta must map t^*B to B".into()));
    }
    if !alpha.is_closed() {
        return Err(Error::NotClosed("alpha".into()));
    }
    if !beta.is_closed() {
        return Err(Error::NotClosed("beta".into()));
    }
    Ok(())
}

/// Trace on the even part minus trace on the odd part.
pub fn supertrace_on_cohomology(mats: &[Matrix; 2]) -> Scalar {
    &mats[0].trace() - &mats[1].trace()
}

/// Generator degrees for the graded engine: the stored grading, or one inferred from weights.
pub fn grading_of(e: &MatrixFactorization, weights: &WeightSystem) -> Result<Vec<Rational64>> {
    match e.grading() {
        Some(g) => Ok(g.to_vec()),
        None => e
            .infer_grading(weights)
            .ok_or_else(|| Error::NonHomogeneous("factorization admits no internal grading".into())),
    }
}

/// Socle degree plus the spread of generator degrees plus one.
pub fn default_window(weights: &WeightSystem, ga: &[Rational64], gb: &[Rational64]) -> Rational64 {
    let all: Vec<Rational64> = ga.iter().chain(gb).copied().collect();
    let spread = match (all.iter().max(), all.iter().min()) {
        (Some(a), Some(b)) => a - b,
        _ => Rational64::zero(),
    };
    weights.socle_degree() + spread + weights.degree
}

/// Monomials of weighted degree at most `bound`, grouped by degree.
fn monomials_up_to(weights: &[Rational64], bound: Rational64) -> BTreeMap<Rational64, Vec<Monomial>> {
    let n = weights.len();
    let mut out: BTreeMap<Rational64, Vec<Monomial>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![Monomial::one(n)];
    while let Some(m) = stack.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        out.entry(m.weighted_degree(weights)).or_default().push(m.clone());
        for i in 0..n {
            let next = m.mul(&Monomial::var(n, i));
            if next.weighted_degree(weights) <= bound {
                stack.push(next);
            }
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// Scalar basis of `Hom_p` in internal degree `deg`: triples `(i, j, m)` with
/// `deg(m) + deg(b_i) - deg(a_j) = deg`.
struct GradedPiece {
    basis: Vec<(usize, usize, Monomial)>,
    index: HashMap<(usize, usize, Monomial), usize>,
}

struct GradedHom<'a> {
    hx: &'a HomComplex,
    ga: Vec<Rational64>,
    gb: Vec<Rational64>,
    monos: BTreeMap<Rational64, Vec<Monomial>>,
    half: Rational64,
}

impl GradedHom<'_> {
    fn piece(&self, p: usize, deg: Rational64) -> GradedPiece {
        let mut basis = Vec::new();
        for &(i, j) in self.hx.units(p) {
            let need = deg - self.gb[i] + self.ga[j];
            if need.is_negative() {
                continue;
            }
            if let Some(ms) = self.monos.get(&need) {
                for m in ms {
                    basis.push((i, j, m.clone()));
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(k, b)| (b, k)).collect();
        GradedPiece { basis, index }
    }

    fn express(&self, piece: &GradedPiece, phi: &PolyMatrix) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); piece.basis.len()];
        for i in 0..phi.rows() {
            for j in 0..phi.cols() {
                for (m, c) in phi.get(i, j).terms() {
                    let k = piece.index.get(&(i, j, m.clone())).ok_or_else(|| {
                        Error::NonHomogeneous("map does not preserve the internal grading".into())
                    })?;
                    v[*k] = c.clone();
                }
            }
        }
        Ok(v)
    }

    fn unit(&self, (i, j, m): &(usize, usize, Monomial)) -> PolyMatrix {
        let n = self.hx.nvars();
        let mut phi = PolyMatrix::zeros(self.hx.b.rank(), self.hx.a.rank(), n);
        phi.set(*i, *j, Polynomial::term(n, m.clone(), Scalar::one()));
        phi
    }

    /// Matrix of the differential from `Hom_p` in degree `deg`.
    fn differential(&self, p: usize, deg: Rational64, src: &GradedPiece) -> Result<Matrix> {
        let tgt = self.piece(1 - p, deg + self.half);
        let da = self.hx.a.delta();
        let db = self.hx.b.delta();
        let cols: Vec<Vec<Scalar>> = src
            .basis
            .iter()
            .map(|u| {
                let phi = self.unit(u);
                let right = phi.mul(&da);
                let d = if p == 0 { db.mul(&phi).sub(&right) } else { db.mul(&phi).add(&right) };
                self.express(&tgt, &d)
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(&cols, tgt.basis.len()))
    }
}

/// Trace of `g` restricted to the invariant subspace spanned by the columns of `sub`.
fn trace_on_subspace(sub: &[Vec<Scalar>], g: &Matrix) -> Scalar {
    if sub.is_empty() {
        return Scalar::zero();
    }
    let k = sub.len();
    let dim = sub[0].len();
    // rref of [B | gB] leaves the coordinates of gB in the first k rows
    let mut cols: Vec<Vec<Scalar>> = sub.to_vec();
    cols.extend(sub.iter().map(|v| g.mul_vec(v)));
    let mut m = Matrix::from_columns(&cols, dim);
    let pivots = m.rref();
    debug_assert_eq!(&pivots[..k], &(0..k).collect::<Vec<_>>()[..]);
    let mut acc = Scalar::zero();
    for i in 0..k {
        acc += m.get(i, k + i);
    }
    acc
}

/// Independent columns spanning the column space.
fn column_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let mut r = m.clone();
    let pivots = r.rref();
    pivots.iter().map(|&c| m.column(c)).collect()
}

/// Per-degree supertrace on cohomology summed over internal degrees in `[-window, window]`.
#[allow(clippy::too_many_arguments)]
pub fn graded_euler_supertrace(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: &WeightSystem,
    window: Rational64,
) -> Result<Scalar> {
    let hx = HomComplex::new(a, b)?;
    check_twisted(&hx, t, alpha, beta)?;
    let ga = grading_of(a, weights)?;
    let gb = grading_of(b, weights)?;
    let spread = ga.iter().chain(&gb).fold(Rational64::zero(), |acc, x| acc.max(x.abs()));
    let half = weights.degree / 2;
    let monos = monomials_up_to(&weights.weights, window * 2 + spread * 2 + weights.degree);
    let gh = GradedHom { hx: &hx, ga, gb, monos, half };
    // internal degrees that occur
    let mut degrees = BTreeSet::new();
    for p in 0..2 {
        for &(i, j) in hx.units(p) {
            for d in gh.monos.keys() {
                let deg = *d + gh.gb[i] - gh.ga[j];
                if deg.abs() <= window {
                    degrees.insert(deg);
                }
            }
        }
    }
    let mut total = Scalar::zero();
    for &deg in &degrees {
        for p in 0..2 {
            let piece = gh.piece(p, deg);
            if piece.basis.is_empty() {
                continue;
            }
            let out = gh.differential(p, deg, &piece)?;
            let incoming_piece = gh.piece(1 - p, deg - half);
            let incoming = gh.differential(1 - p, deg - half, &incoming_piece)?;
            let cols: Vec<Vec<Scalar>> = piece
                .basis
                .iter()
                .map(|u| {
                    let img = beta.matrix.mul(&gh.unit(u).scale_substitute(t)).mul(&alpha.matrix);
                    gh.express(&piece, &img)
                })
                .collect::<Result<_>>()?;
            let g = Matrix::from_columns(&cols, piece.basis.len());
            let z = out.kernel();
            let bnd = column_basis(&incoming);
            let tr = &trace_on_subspace(&z, &g) - &trace_on_subspace(&bnd, &g);
            if p == 0 {
                total += &tr;
            } else {
                total -= &tr;
            }
        }
    }
    Ok(total)
}
