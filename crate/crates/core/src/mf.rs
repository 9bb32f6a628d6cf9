//! Matrix factorizations, their morphisms, and the constructions used to build examples.
//!
//! A factorization of `w` is a free module `E = E_0 + E_1` with ranks `(r0, r1)` and an odd
//! operator `delta = [[0, d1], [d0, 0]]` (even generators first) with `delta^2 = w`.

use std::collections::VecDeque;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groebner::{free_resolution, FreeResolution, Lifter};
use crate::linalg::Matrix;
use crate::poly::{check_symmetry, difference_quotients, PolyMatrix, Polynomial, Symmetry, WeightSystem};
use crate::scalars::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFactorization {
    w: Polynomial,
    d0: PolyMatrix,
    d1: PolyMatrix,
    /// Weighted degree of each generator, even generators first.
    grading: Option<Vec<Rational64>>,
}

impl MatrixFactorization {
    /// `d0: E_0 -> E_1` is `r1 x r0`, `d1: E_1 -> E_0` is `r0 x r1`.
    pub fn new(w: Polynomial, d0: PolyMatrix, d1: PolyMatrix) -> Result<Self> {
        let e = Self::new_unchecked(w, d0, d1)?;
        validate_mf(&e)?;
        Ok(e)
    }

    /// Shape checks only.
    pub fn new_unchecked(w: Polynomial, d0: PolyMatrix, d1: PolyMatrix) -> Result<Self> {
        if d0.rows() != d1.cols() || d0.cols() != d1.rows() {
            return Err(Error::Dimension(format!(
                "d0 is {}x{} but d1 is {}x{}",
                d0.rows(),
                d0.cols(),
                d1.rows(),
                d1.cols()
            )));
        }
        if d0.nvars() != w.nvars() || d1.nvars() != w.nvars() {
            return Err(Error::Dimension("matrix entries and potential live in different rings".into()));
        }
        Ok(MatrixFactorization { w, d0, d1, grading: None })
    }

    /// Split a full odd operator on `r0 + r1` generators.
    pub fn from_delta(w: Polynomial, r0: usize, delta: &PolyMatrix) -> Result<Self> {
        let n = delta.rows();
        let d0 = delta.submatrix(r0..n, 0..r0);
        let d1 = delta.submatrix(0..r0, r0..n);
        if !delta.submatrix(0..r0, 0..r0).is_zero() || !delta.submatrix(r0..n, r0..n).is_zero() {
            return Err(Error::InvalidMf("operator is not odd".into()));
        }
        Self::new(w, d0, d1)
    }

    pub fn potential(&self) -> &Polynomial {
        &self.w
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn r0(&self) -> usize {
        self.d0.cols()
    }

    pub fn r1(&self) -> usize {
        self.d0.rows()
    }

    pub fn rank(&self) -> usize {
        self.r0() + self.r1()
    }

    pub fn d0(&self) -> &PolyMatrix {
        &self.d0
    }

    pub fn d1(&self) -> &PolyMatrix {
        &self.d1
    }

    pub fn grading(&self) -> Option<&[Rational64]> {
        self.grading.as_deref()
    }

    /// Parity of generator `i`.
    pub fn parity_of(&self, i: usize) -> u8 {
        u8::from(i >= self.r0())
    }

    pub fn with_grading(mut self, grading: Vec<Rational64>) -> Result<Self> {
        if grading.len() != self.rank() {
            return Err(Error::Dimension(format!("{} degrees for {} generators", grading.len(), self.rank())));
        }
        self.grading = Some(grading);
        Ok(self)
    }

    pub fn without_grading(mut self) -> Self {
        self.grading = None;
        self
    }

    /// Full operator `[[0, d1], [d0, 0]]`.
    pub fn delta(&self) -> PolyMatrix {
        let (r0, r1) = (self.r0(), self.r1());
        let mut m = PolyMatrix::zeros(r0 + r1, r0 + r1, self.nvars());
        m.set_block(r0, 0, &self.d0);
        m.set_block(0, r0, &self.d1);
        m
    }

    pub fn origin(&self) -> OriginComplex {
        OriginComplex { r0: self.r0(), r1: self.r1(), delta: self.delta().eval_at_zero() }
    }

    /// Infer generator degrees from weights normalized so that `w` has degree 1 and
    /// `delta` degree 1/2.
    pub fn infer_grading(&self, weights: &WeightSystem) -> Option<Vec<Rational64>> {
        let delta = self.delta();
        let n = delta.rows();
        let half = Rational64::new(1, 2) * weights.degree;
        let mut deg: Vec<Option<Rational64>> = vec![None; n];
        for start in 0..n {
            if deg[start].is_some() {
                continue;
            }
            deg[start] = Some(Rational64::zero());
            let mut queue = VecDeque::from([start]);
            while let Some(e) = queue.pop_front() {
                let de = deg[e].unwrap();
                for f in 0..n {
                    // entry (f, e) maps e to f, and entry (e, f) maps f to e
                    for (row, col, known_is_col) in [(f, e, true), (e, f, false)] {
                        let p = delta.get(row, col);
                        let Some(Some(dp)) = p.homogeneous_degree(&weights.weights) else {
                            p.homogeneous_degree(&weights.weights)?;
                            continue;
                        };
                        // deg(row) = deg(col) + 1/2 - deg(entry)
                        let df = if known_is_col { de + half - dp } else { de - half + dp };
                        match deg[f] {
                            None => {
                                deg[f] = Some(df);
                                queue.push_back(f);
                            }
                            Some(x) if x != df => return None,
                            _ => {}
                        }
                    }
                }
            }
        }
        Some(deg.into_iter().map(Option::unwrap).collect())
    }
}

/// Both composites equal `w` times the identity.
pub fn validate_mf(e: &MatrixFactorization) -> Result<()> {
    let n = e.nvars();
    for (name, prod, r) in [("d1*d0", e.d1.mul(&e.d0), e.r0()), ("d0*d1", e.d0.mul(&e.d1), e.r1())] {
        let target = PolyMatrix::scalar_identity(r, n, &e.w);
        if prod != target {
            for i in 0..r {
                for j in 0..r {
                    if prod.get(i, j) != target.get(i, j) {
                        return Err(Error::InvalidMf(format!(
                            "{name} entry ({}, {}) is {} but should be {}",
                            i + 1,
                            j + 1,
                            prod.get(i, j),
                            target.get(i, j)
                        )));
                    }
                }
            }
        }
    }
    if e.w.is_zero() {
        return Ok(());
    }
    if e.r0() != e.r1() {
        return Err(Error::InvalidMf(format!("ranks ({}, {}) differ for a nonzero potential", e.r0(), e.r1())));
    }
    Ok(())
}

/// Koszul factorization of `sum a_i b_i` on the exterior algebra, basis by increasing bitmask.
pub fn koszul_mf(nvars: usize, a: &[Polynomial], b: &[Polynomial]) -> Result<MatrixFactorization> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("{} and {} Koszul entries", a.len(), b.len())));
    }
    let r = a.len();
    let mut w = Polynomial::zero(nvars);
    for (x, y) in a.iter().zip(b) {
        w = &w + &(x * y);
    }
    let masks: Vec<u32> = (0..1u32 << r).collect();
    let even: Vec<u32> = masks.iter().copied().filter(|m| m.count_ones() % 2 == 0).collect();
    let odd: Vec<u32> = masks.iter().copied().filter(|m| m.count_ones() % 2 == 1).collect();
    let order: Vec<u32> = even.iter().chain(&odd).copied().collect();
    let pos = |m: u32| order.iter().position(|&x| x == m).unwrap();
    let mut delta = PolyMatrix::zeros(order.len(), order.len(), nvars);
    for &s in &order {
        for i in 0..r {
            let below = (s & ((1 << i) - 1)).count_ones();
            let sign = if below % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            let (target, coeff) = if s & (1 << i) == 0 { (s | (1 << i), &a[i]) } else { (s & !(1 << i), &b[i]) };
            let (row, col) = (pos(target), pos(s));
            let v = delta.get(row, col) + &coeff.scale(&sign);
            delta.set(row, col, v);
        }
    }
    MatrixFactorization::from_delta(w, even.len(), &delta)
}

/// Graded tensor product; even part `E1_0 E2_0, E1_1 E2_1`, odd part `E1_1 E2_0, E1_0 E2_1`.
pub fn tensor_mf(e1: &MatrixFactorization, e2: &MatrixFactorization) -> Result<MatrixFactorization> {
    if e1.nvars() != e2.nvars() {
        return Err(Error::Dimension("tensor factors live in different rings".into()));
    }
    let n = e1.nvars();
    let (a0, a1, b0, b1) = (e1.r0(), e1.r1(), e2.r0(), e2.r1());
    let mut basis: Vec<(usize, usize)> = Vec::new();
    for (us, vs) in [(0..a0, 0..b0), (a0..a0 + a1, b0..b0 + b1), (a0..a0 + a1, 0..b0), (0..a0, b0..b0 + b1)] {
        for u in us {
            for v in vs.clone() {
                basis.push((u, v));
            }
        }
    }
    let r0 = a0 * b0 + a1 * b1;
    let d1 = e1.delta();
    let d2 = e2.delta();
    let total = basis.len();
    let mut delta = PolyMatrix::zeros(total, total, n);
    for (col, &(u, v)) in basis.iter().enumerate() {
        for (row, &(u2, v2)) in basis.iter().enumerate() {
            let mut x = Polynomial::zero(n);
            if v2 == v {
                x = &x + d1.get(u2, u);
            }
            if u2 == u {
                let s = d2.get(v2, v);
                x = if e1.parity_of(u) == 1 { &x - s } else { &x + s };
            }
            delta.set(row, col, x);
        }
    }
    let mut out = MatrixFactorization::from_delta(e1.potential() + e2.potential(), r0, &delta)?;
    if let (Some(g1), Some(g2)) = (e1.grading(), e2.grading()) {
        out.grading = Some(basis.iter().map(|&(u, v)| g1[u] + g2[v]).collect());
    }
    Ok(out)
}

/// `t^* E`: substitute `x -> t x` entrywise.
pub fn pullback(t: &Symmetry, e: &MatrixFactorization) -> Result<MatrixFactorization> {
    if !check_symmetry(&e.w, t) {
        return Err(Error::NotSymmetry(format!("{} does not preserve {}", t.literal(), e.w)));
    }
    Ok(MatrixFactorization {
        w: e.w.clone(),
        d0: e.d0.scale_substitute(t),
        d1: e.d1.scale_substitute(t),
        grading: e.grading.clone(),
    })
}

/// Parity shift `E[1]`, with `delta` negated.
pub fn shift(e: &MatrixFactorization) -> MatrixFactorization {
    let m = Scalar::from_int(-1);
    let grading = e.grading.as_ref().map(|g| {
        let (r0, _) = (e.r0(), e.r1());
        g[r0..].iter().chain(&g[..r0]).copied().collect()
    });
    MatrixFactorization { w: e.w.clone(), d0: e.d1.scale(&m), d1: e.d0.scale(&m), grading }
}

/// Koszul factorization of `w(y) - w(x)` in the ring `(x_1..x_n, y_1..y_n)`.
pub fn stabilized_diagonal(w: &Polynomial) -> Result<MatrixFactorization> {
    let n = w.nvars();
    let dq = difference_quotients(w);
    let b: Vec<Polynomial> =
        (0..n).map(|i| &Polynomial::var(2 * n, n + i) - &Polynomial::var(2 * n, i)).collect();
    koszul_mf(2 * n, &dq, &b)
}

/// Scalar complex `E|_0` with its odd operator.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginComplex {
    pub r0: usize,
    pub r1: usize,
    pub delta: Matrix,
}

impl OriginComplex {
    pub fn is_square_zero(&self) -> bool {
        self.delta.mul(&self.delta).is_zero()
    }
}

/// Homogeneous morphism stored as a full `(r0' + r1') x (r0 + r1)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MFMorphism {
    pub source: MatrixFactorization,
    pub target: MatrixFactorization,
    pub parity: u8,
    pub matrix: PolyMatrix,
}

impl MFMorphism {
    pub fn new(source: MatrixFactorization, target: MatrixFactorization, parity: u8, matrix: PolyMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Dimension(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        if source.potential() != target.potential() {
            return Err(Error::Dimension("morphism between factorizations of different potentials".into()));
        }
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                if (target.parity_of(i) + source.parity_of(j) + parity) % 2 == 1 && !matrix.get(i, j).is_zero() {
                    return Err(Error::Validation(format!("morphism entry ({}, {}) has the wrong parity", i + 1, j + 1)));
                }
            }
        }
        Ok(MFMorphism { source, target, parity: parity % 2, matrix })
    }

    /// Even morphism from its two diagonal blocks.
    pub fn even(source: MatrixFactorization, target: MatrixFactorization, b0: &PolyMatrix, b1: &PolyMatrix) -> Result<Self> {
        let mut m = PolyMatrix::zeros(target.rank(), source.rank(), source.nvars());
        check_block(b0, target.r0(), source.r0())?;
        check_block(b1, target.r1(), source.r1())?;
        m.set_block(0, 0, b0);
        m.set_block(target.r0(), source.r0(), b1);
        Self::new(source, target, 0, m)
    }

    /// Odd morphism from `E_0 -> E'_1` and `E_1 -> E'_0` blocks.
    pub fn odd(source: MatrixFactorization, target: MatrixFactorization, b01: &PolyMatrix, b10: &PolyMatrix) -> Result<Self> {
        let mut m = PolyMatrix::zeros(target.rank(), source.rank(), source.nvars());
        check_block(b01, target.r1(), source.r0())?;
        check_block(b10, target.r0(), source.r1())?;
        m.set_block(target.r0(), 0, b01);
        m.set_block(0, source.r0(), b10);
        Self::new(source, target, 1, m)
    }

    pub fn identity(e: &MatrixFactorization) -> Self {
        MFMorphism { source: e.clone(), target: e.clone(), parity: 0, matrix: PolyMatrix::identity(e.rank(), e.nvars()) }
    }

    /// `D(phi) = delta_B phi - (-1)^{|phi|} phi delta_A`.
    pub fn differential(&self) -> PolyMatrix {
        let left = self.target.delta().mul(&self.matrix);
        let right = self.matrix.mul(&self.source.delta());
        if self.parity == 0 { left.sub(&right) } else { left.add(&right) }
    }

    pub fn is_closed(&self) -> bool {
        self.differential().is_zero()
    }

    /// `self o other`.
    pub fn compose(&self, other: &MFMorphism) -> Result<MFMorphism> {
        if other.target.rank() != self.source.rank() {
            return Err(Error::Dimension("morphisms do not compose".into()));
        }
        Ok(MFMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            parity: (self.parity + other.parity) % 2,
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    pub fn scale(&self, c: &Scalar) -> MFMorphism {
        MFMorphism { matrix: self.matrix.scale(c), ..self.clone() }
    }

    /// `t^* phi : t^* A -> t^* B`.
    pub fn pullback(&self, t: &Symmetry) -> Result<MFMorphism> {
        Ok(MFMorphism {
            source: pullback(t, &self.source)?,
            target: pullback(t, &self.target)?,
            parity: self.parity,
            matrix: self.matrix.scale_substitute(t),
        })
    }

    /// Inverse morphism, when the matrix is invertible over the polynomial ring.
    pub fn inverse(&self) -> Result<MFMorphism> {
        let inv = self
            .matrix
            .inverse()
            .ok_or_else(|| Error::Precondition("morphism is not invertible over the polynomial ring".into()))?;
        Ok(MFMorphism { source: self.target.clone(), target: self.source.clone(), parity: self.parity, matrix: inv })
    }

    pub fn at_origin(&self) -> Matrix {
        self.matrix.eval_at_zero()
    }

    /// Supertrace of `phi|_0`; zero for odd morphisms.
    pub fn supertrace_at_origin(&self) -> Scalar {
        if self.parity == 1 {
            return Scalar::zero();
        }
        let m = self.at_origin();
        let mut acc = Scalar::zero();
        for i in 0..m.rows().min(m.cols()) {
            if self.source.parity_of(i) == 0 {
                acc += m.get(i, i);
            } else {
                acc -= m.get(i, i);
            }
        }
        acc
    }
}

fn check_block(b: &PolyMatrix, rows: usize, cols: usize) -> Result<()> {
    if b.rows() != rows || b.cols() != cols {
        return Err(Error::Dimension(format!("block is {}x{}, expected {rows}x{cols}", b.rows(), b.cols())));
    }
    Ok(())
}

pub fn morphism_closed(phi: &MFMorphism) -> bool {
    phi.is_closed()
}

/// `t^{(p-1)*} alpha o ... o t^* alpha o alpha == id`.
pub fn equivariance_power_check(alpha: &MFMorphism, t: &Symmetry, p: u32) -> Result<bool> {
    if !t.pow(p as i64).is_identity() {
        return Err(Error::Precondition(format!("{} does not have order dividing {p}", t.literal())));
    }
    let mut acc = alpha.matrix.clone();
    let mut ti = t.clone();
    for _ in 1..p {
        acc = alpha.matrix.scale_substitute(&ti).mul(&acc);
        ti = ti.compose(t);
    }
    Ok(acc == PolyMatrix::identity(alpha.source.rank(), alpha.source.nvars()))
}

pub fn restrict_to_origin(e: &MatrixFactorization) -> OriginComplex {
    e.origin()
}

pub fn supertrace_at_origin(phi: &MFMorphism) -> Scalar {
    phi.supertrace_at_origin()
}

/// Stabilization of a graded module together with the sign action.
#[derive(Clone, Debug)]
pub struct Stabilization {
    pub resolution: FreeResolution,
    pub mf: MatrixFactorization,
    /// `diag((-1)^{internal degree})`, closed as a map `A -> (-1)^* A` when `deg w` is even.
    pub alpha: Option<MFMorphism>,
    /// Internal (standard) degree of each generator of `mf`, even generators first.
    pub degrees: Vec<i64>,
}

/// Fold a free resolution of `M = R^r / <relations>` (with `w M = 0`) into a factorization via
/// higher homotopies `s^(j): F_i -> F_{i+2j-1}`.
pub fn stabilize_module(relations: &PolyMatrix, gen_degrees: &[i64], w: &Polynomial) -> Result<Stabilization> {
    let n = w.nvars();
    let r = relations.rows();
    let lifter = Lifter::from_matrix(relations);
    for j in 0..r {
        let v: Vec<Polynomial> = (0..r).map(|i| if i == j { w.clone() } else { Polynomial::zero(n) }).collect();
        if !lifter.contains(&v) {
            return Err(Error::Precondition(format!("w does not annihilate generator {}", j + 1)));
        }
    }
    let wdeg = match w.homogeneous_degree(&vec![Rational64::from_integer(1); n]) {
        Some(Some(d)) => *d.numer(),
        _ => return Err(Error::NonHomogeneous("stabilization needs a homogeneous potential".into())),
    };
    let res = free_resolution(relations, gen_degrees)?;
    let ranks = res.ranks();
    let len = ranks.len();
    // d(i): F_i -> F_{i-1}
    let d = |i: usize| -> Option<&PolyMatrix> { if i >= 1 && i < len { Some(&res.maps[i - 1]) } else { None } };
    let lifters: Vec<Option<Lifter>> = (0..len).map(|i| d(i).map(Lifter::from_matrix)).collect();
    // s[j][i]: F_i -> F_{i+2j-1}
    let mut s: Vec<Vec<Option<PolyMatrix>>> = vec![Vec::new()];
    let mut j = 1;
    while 2 * j - 1 < len {
        let mut layer: Vec<Option<PolyMatrix>> = vec![None; len];
        for i in 0..len {
            let tgt = i + 2 * j - 1;
            if tgt >= len {
                continue;
            }
            // W - s^(j)_{i-1} d_i, a map F_i -> F_{tgt-1}
            let mut rhs = if j == 1 {
                PolyMatrix::scalar_identity(ranks[i], n, w)
            } else {
                let mut acc = PolyMatrix::zeros(ranks[tgt - 1], ranks[i], n);
                for b in 1..j {
                    let a = j - b;
                    if let (Some(sb), Some(sa)) = (&s[b][i], s[a].get(i + 2 * b - 1).and_then(Option::as_ref)) {
                        acc = acc.sub(&sa.mul(sb));
                    }
                }
                acc
            };
            if i >= 1 {
                if let (Some(prev), Some(di)) = (&layer[i - 1], d(i)) {
                    rhs = rhs.sub(&prev.mul(di));
                }
            }
            let lifter = lifters[tgt].as_ref().expect("interior map");
            let mut cols = Vec::with_capacity(ranks[i]);
            for c in 0..ranks[i] {
                let lifted = lifter.lift(&rhs.column(c)).map_err(|_| {
                    Error::Internal(format!("homotopy equation unsolvable at F_{i} (layer {j})"))
                })?;
                cols.push(lifted);
            }
            let mut m = PolyMatrix::from_columns(n, ranks[tgt], &cols);
            // project onto the homogeneous component of the expected degree
            for row in 0..ranks[tgt] {
                for col in 0..ranks[i] {
                    let want = res.degrees[i][col] - res.degrees[tgt][row] + wdeg * j as i64;
                    let p = m.get(row, col);
                    let kept = Polynomial::from_terms(
                        n,
                        p.terms().filter(|(mono, _)| mono.degree() as i64 == want).map(|(mo, c)| (mo.clone(), c.clone())),
                    );
                    m.set(row, col, kept);
                }
            }
            layer[i] = Some(m);
        }
        s.push(layer);
        j += 1;
    }
    // assemble: even = F_0 + F_2 + ..., odd = F_1 + F_3 + ...
    let mut offset = vec![0usize; len];
    let (mut e_off, mut o_off) = (0, 0);
    for i in 0..len {
        if i % 2 == 0 {
            offset[i] = e_off;
            e_off += ranks[i];
        } else {
            offset[i] = o_off;
            o_off += ranks[i];
        }
    }
    let r0 = e_off;
    let global = |i: usize, k: usize| if i.is_multiple_of(2) { offset[i] + k } else { r0 + offset[i] + k };
    let total = e_off + o_off;
    let mut delta = PolyMatrix::zeros(total, total, n);
    let place = |delta: &mut PolyMatrix, from: usize, to: usize, m: &PolyMatrix| {
        for a in 0..m.rows() {
            for b in 0..m.cols() {
                let v = delta.get(global(to, a), global(from, b)) + m.get(a, b);
                delta.set(global(to, a), global(from, b), v);
            }
        }
    };
    for i in 1..len {
        place(&mut delta, i, i - 1, &res.maps[i - 1]);
    }
    for (jj, layer) in s.iter().enumerate().skip(1) {
        for (i, m) in layer.iter().enumerate() {
            if let Some(m) = m {
                place(&mut delta, i, i + 2 * jj - 1, m);
            }
        }
    }
    let mut degrees = vec![0i64; total];
    for i in 0..len {
        for k in 0..ranks[i] {
            degrees[global(i, k)] = res.degrees[i][k];
        }
    }
    let mf = MatrixFactorization::from_delta(w.clone(), r0, &delta)?;
    let alpha = if wdeg % 2 == 0 {
        let t = Symmetry::from_exponents(2, &vec![1; n]);
        let mut m = PolyMatrix::zeros(total, total, n);
        for (k, &dg) in degrees.iter().enumerate() {
            let v = if dg % 2 == 0 { 1 } else { -1 };
            m.set(k, k, Polynomial::constant(n, Scalar::from_int(v)));
        }
        let a = MFMorphism::new(mf.clone(), pullback(&t, &mf)?, 0, m)?;
        if !a.is_closed() {
            return Err(Error::Internal("sign action on the stabilization is not closed".into()));
        }
        Some(a)
    } else {
        None
    };
    Ok(Stabilization { resolution: res, mf, alpha, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn mf1(a: Polynomial, b: Polynomial) -> MatrixFactorization {
        let w = &a * &b;
        MatrixFactorization::new(w, PolyMatrix::from_rows(1, vec![vec![a]]), PolyMatrix::from_rows(1, vec![vec![b]])).unwrap()
    }

    fn diag(n: usize, entries: &[Scalar]) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(entries.len(), entries.len(), n);
        for (i, c) in entries.iter().enumerate() {
            m.set(i, i, Polynomial::constant(n, c.clone()));
        }
        m
    }

    #[test]
    fn validation() {
        assert!(MatrixFactorization::new(
            x(1, 0).pow(3),
            PolyMatrix::from_rows(1, vec![vec![x(1, 0)]]),
            PolyMatrix::from_rows(1, vec![vec![x(1, 0).pow(2)]])
        )
        .is_ok());
        let bad = MatrixFactorization::new(
            x(2, 0).pow(2),
            PolyMatrix::from_rows(2, vec![vec![x(2, 0)]]),
            PolyMatrix::from_rows(2, vec![vec![x(2, 1)]]),
        );
        assert!(matches!(bad, Err(Error::InvalidMf(_))));
    }

    #[test]
    fn koszul_and_tensor() {
        let n = 2;
        let k = koszul_mf(n, &[x(n, 0), x(n, 1)], &[x(n, 0), x(n, 1)]).unwrap();
        assert_eq!((k.r0(), k.r1()), (2, 2));
        assert_eq!(k.potential(), &(x(n, 0).pow(2) + x(n, 1).pow(2)));
        let a = koszul_mf(n, &[x(n, 0)], &[x(n, 0)]).unwrap();
        let b = koszul_mf(n, &[x(n, 1)], &[x(n, 1)]).unwrap();
        let t = tensor_mf(&a, &b).unwrap();
        assert_eq!((t.r0(), t.r1()), (2, 2));
        // same operator up to a permutation of basis vectors: compare entry multisets
        let mut e1: Vec<String> = k.delta().entries().map(|p| p.to_string()).collect();
        let mut e2: Vec<String> = t.delta().entries().map(|p| p.to_string()).collect();
        e1.sort();
        e2.sort();
        assert_eq!(e1, e2);
        let unit = MatrixFactorization::new(
            Polynomial::zero(n),
            PolyMatrix::zeros(0, 1, n),
            PolyMatrix::zeros(1, 0, n),
        )
        .unwrap();
        assert_eq!(tensor_mf(&a, &unit).unwrap(), a);
    }

    #[test]
    fn diagonal_factorizations() {
        let d = stabilized_diagonal(&x(1, 0).pow(3)).unwrap();
        assert_eq!((d.r0(), d.r1()), (1, 1));
        let d = stabilized_diagonal(&(x(2, 0) * x(2, 1))).unwrap();
        assert_eq!((d.r0(), d.r1()), (2, 2));
    }

    #[test]
    fn pullbacks_and_morphisms() {
        let a = mf1(x(1, 0), x(1, 0).pow(2));
        let t = Symmetry::from_exponents(3, &[1]);
        let ta = pullback(&t, &a).unwrap();
        assert_eq!(ta.d0().get(0, 0), &x(1, 0).scale(&Scalar::zeta(3)));
        assert_eq!(pullback(&t.inverse(), &ta).unwrap(), a);
        let z = Scalar::zeta(3);
        let alpha = MFMorphism::new(a.clone(), ta.clone(), 0, diag(1, &[Scalar::one(), z.clone()])).unwrap();
        assert!(alpha.is_closed());
        assert_eq!(alpha.supertrace_at_origin(), Scalar::one() - z.clone());
        assert!(equivariance_power_check(&alpha, &t, 3).unwrap());
        let bad = MFMorphism::new(a.clone(), ta, 0, diag(1, &[Scalar::one(), -z])).unwrap();
        assert!(!equivariance_power_check(&bad, &t, 3).unwrap());

        let b = mf1(x(1, 0), x(1, 0));
        let m1 = Symmetry::from_exponents(2, &[1]);
        let tb = pullback(&m1, &b).unwrap();
        let one = MFMorphism::new(b.clone(), tb.clone(), 0, diag(1, &[Scalar::one(), Scalar::one()])).unwrap();
        assert!(!one.is_closed());
        let sg = MFMorphism::new(b.clone(), tb, 0, diag(1, &[Scalar::one(), Scalar::from_int(-1)])).unwrap();
        assert!(sg.is_closed());
        assert_eq!(sg.supertrace_at_origin(), Scalar::from_int(2));
        assert_eq!(MFMorphism::identity(&b).supertrace_at_origin(), Scalar::zero());
    }

    #[test]
    fn gradings() {
        let a = mf1(x(1, 0), x(1, 0).pow(2));
        let ws = WeightSystem::infer(a.potential()).unwrap();
        let g = a.infer_grading(&ws).unwrap();
        // x has degree 1/3: deg(odd) = deg(even) + 1/2 - 1/3
        assert_eq!(g, vec![Rational64::zero(), Rational64::new(1, 6)]);
    }

    #[test]
    fn stabilizations() {
        // M = R/(x), w = x^2
        let n = 1;
        let s = stabilize_module(&PolyMatrix::from_rows(n, vec![vec![x(n, 0)]]), &[0], &x(n, 0).pow(2)).unwrap();
        assert_eq!(s.mf, mf1(x(n, 0), x(n, 0)));
        assert_eq!(s.alpha.unwrap().supertrace_at_origin(), Scalar::from_int(2));
        // M = k over k[x, y], w = x^2 + y^2
        let n = 2;
        let w = x(n, 0).pow(2) + x(n, 1).pow(2);
        let s = stabilize_module(&PolyMatrix::from_rows(n, vec![vec![x(n, 0), x(n, 1)]]), &[0], &w).unwrap();
        assert_eq!((s.mf.r0(), s.mf.r1()), (2, 2));
        assert_eq!(s.alpha.unwrap().supertrace_at_origin(), Scalar::from_int(4));
        // M = R/(w): contractible
        let s = stabilize_module(&PolyMatrix::from_rows(n, vec![vec![w.clone()]]), &[0], &w).unwrap();
        assert_eq!(s.alpha.unwrap().supertrace_at_origin(), Scalar::zero());
        // w does not annihilate R/(x)
        assert!(stabilize_module(&PolyMatrix::from_rows(n, vec![vec![x(n, 0)]]), &[0], &x(n, 1).pow(2)).is_err());
    }
}
