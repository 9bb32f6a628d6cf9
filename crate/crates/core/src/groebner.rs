//! Gröbner bases for submodules of free modules `R^r`, `R = Q(zeta)[x_1..x_n]`.
//!
//! Terms are ordered position-over-term: a lower component index dominates, ties are
//! broken by grevlex. Rank one gives the ideal case.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::poly::{Monomial, PolyMatrix, Polynomial};
use crate::scalars::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Key {
    pub comp: usize,
    pub mono: Monomial,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.comp.cmp(&self.comp).then_with(|| self.mono.cmp(&other.mono))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse element of `R^rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModVec {
    rank: usize,
    nvars: usize,
    terms: BTreeMap<Key, Scalar>,
}

impl ModVec {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        ModVec { rank, nvars, terms: BTreeMap::new() }
    }

    pub fn from_polys(v: &[Polynomial], nvars: usize) -> Self {
        let mut out = ModVec::zero(v.len(), nvars);
        for (comp, p) in v.iter().enumerate() {
            for (m, c) in p.terms() {
                out.terms.insert(Key { comp, mono: m.clone() }, c.clone());
            }
        }
        out
    }

    /// The basis vector `m * e_comp`.
    pub fn basis(rank: usize, nvars: usize, comp: usize, mono: Monomial) -> Self {
        let mut out = ModVec::zero(rank, nvars);
        out.terms.insert(Key { comp, mono }, Scalar::one());
        out
    }

    pub fn to_polys(&self) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(self.nvars); self.rank];
        for (k, c) in &self.terms {
            out[k.comp].add_term(k.mono.clone(), c);
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<(&Key, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &Key) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, k: Key, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled_shifted(&mut self, c: &Scalar, m: &Monomial, other: &ModVec) {
        for (k, x) in &other.terms {
            self.add_term(Key { comp: k.comp, mono: k.mono.mul(m) }, c * x);
        }
    }

    pub fn add(&self, other: &ModVec) -> ModVec {
        let mut out = self.clone();
        out.add_scaled_shifted(&Scalar::one(), &Monomial::one(self.nvars), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> ModVec {
        let mut out = ModVec::zero(self.rank, self.nvars);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect();
        }
        out
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.lead() {
            if !c.is_one() {
                let inv = c.inv().expect("nonzero leading coefficient");
                for v in self.terms.values_mut() {
                    *v = &*v * &inv;
                }
            }
        }
    }

    /// Split into the components `< r` and the rest, re-indexed.
    pub fn split(&self, r: usize) -> (ModVec, ModVec) {
        let mut top = ModVec::zero(r, self.nvars);
        let mut bottom = ModVec::zero(self.rank - r, self.nvars);
        for (k, c) in &self.terms {
            if k.comp < r {
                top.terms.insert(k.clone(), c.clone());
            } else {
                bottom.terms.insert(Key { comp: k.comp - r, mono: k.mono.clone() }, c.clone());
            }
        }
        (top, bottom)
    }
}

/// Reduced Gröbner basis of a submodule of `R^rank`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    rank: usize,
    nvars: usize,
    elems: Vec<ModVec>,
    by_comp: Vec<Vec<usize>>,
}

impl GroebnerBasis {
    /// Buchberger's algorithm with the normal selection strategy and the chain criterion.
    pub fn new(gens: Vec<ModVec>, rank: usize, nvars: usize) -> Self {
        let mut b = Builder { rank, nvars, elems: Vec::new(), by_comp: vec![Vec::new(); rank], pairs: BTreeSet::new() };
        for g in gens {
            let r = b.reduce(g);
            if !r.is_zero() {
                b.insert(r);
            }
        }
        while let Some(p) = b.pairs.pop_first() {
            let (_, j, i) = p;
            if b.skip(i, j) {
                continue;
            }
            let s = b.spoly(i, j);
            let r = b.reduce(s);
            if !r.is_zero() {
                b.insert(r);
            }
        }
        b.finish()
    }

    pub fn from_polys(gens: &[Vec<Polynomial>], rank: usize, nvars: usize) -> Self {
        Self::new(gens.iter().map(|g| ModVec::from_polys(g, nvars)).collect(), rank, nvars)
    }

    pub fn ideal(gens: &[Polynomial], nvars: usize) -> Self {
        Self::new(gens.iter().map(|g| ModVec::from_polys(std::slice::from_ref(g), nvars)).collect(), 1, nvars)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn elements(&self) -> &[ModVec] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn normal_form(&self, v: &ModVec) -> ModVec {
        reduce_with(&self.elems, &self.by_comp, v.clone(), self.rank, self.nvars)
    }

    pub fn contains(&self, v: &ModVec) -> bool {
        self.normal_form(v).is_zero()
    }

    /// Monomials `m e_c` outside the leading module, sorted by component then ascending
    /// order. Fails when the quotient is infinite-dimensional.
    pub fn standard_monomials(&self) -> Result<Vec<(usize, Monomial)>> {
        let n = self.nvars;
        let mut out = Vec::new();
        for comp in 0..self.rank {
            let leads: Vec<&Monomial> = self.by_comp[comp].iter().map(|&i| &self.elems[i].lead().unwrap().0.mono).collect();
            if leads.iter().any(|m| m.is_one()) {
                continue;
            }
            for var in 0..n {
                let pure = leads.iter().any(|m| {
                    m.exponents().iter().enumerate().all(|(i, &e)| if i == var { e > 0 } else { e == 0 })
                });
                if !pure {
                    return Err(Error::NonIsolated(format!(
                        "quotient is infinite-dimensional in component {comp} (no pure power of variable {})",
                        var + 1
                    )));
                }
            }
            let mut seen = BTreeSet::new();
            let mut queue = VecDeque::from([Monomial::one(n)]);
            while let Some(m) = queue.pop_front() {
                if seen.contains(&m) || leads.iter().any(|l| l.divides(&m)) {
                    continue;
                }
                for i in 0..n {
                    queue.push_back(m.mul(&Monomial::var(n, i)));
                }
                seen.insert(m);
            }
            out.extend(seen.into_iter().map(|m| (comp, m)));
        }
        Ok(out)
    }
}

struct Builder {
    rank: usize,
    nvars: usize,
    elems: Vec<ModVec>,
    by_comp: Vec<Vec<usize>>,
    pairs: BTreeSet<(u32, usize, usize)>,
}

impl Builder {
    fn lead_key(&self, i: usize) -> &Key {
        self.elems[i].lead().unwrap().0
    }

    fn reduce(&self, v: ModVec) -> ModVec {
        reduce_with(&self.elems, &self.by_comp, v, self.rank, self.nvars)
    }

    fn insert(&mut self, mut g: ModVec) {
        g.make_monic();
        let idx = self.elems.len();
        let lk = g.lead().unwrap().0.clone();
        self.elems.push(g);
        for &i in &self.by_comp[lk.comp] {
            let l = self.lead_key(i).mono.lcm(&lk.mono);
            self.pairs.insert((l.degree(), idx, i));
        }
        self.by_comp[lk.comp].push(idx);
    }

    fn pending(&self, a: usize, b: usize) -> bool {
        let (j, i) = if a > b { (a, b) } else { (b, a) };
        let l = self.lead_key(i).mono.lcm(&self.lead_key(j).mono);
        self.pairs.contains(&(l.degree(), j, i))
    }

    fn skip(&self, i: usize, j: usize) -> bool {
        let ki = self.lead_key(i);
        let kj = self.lead_key(j);
        if self.rank == 1 && ki.mono.is_coprime(&kj.mono) {
            return true;
        }
        let l = ki.mono.lcm(&kj.mono);
        self.by_comp[ki.comp].iter().any(|&k| {
            k != i && k != j && self.lead_key(k).mono.divides(&l) && !self.pending(i, k) && !self.pending(j, k)
        })
    }

    fn spoly(&self, i: usize, j: usize) -> ModVec {
        let mi = &self.lead_key(i).mono;
        let mj = &self.lead_key(j).mono;
        let l = mi.lcm(mj);
        let mut s = ModVec::zero(self.rank, self.nvars);
        s.add_scaled_shifted(&Scalar::one(), &mi.quotient_of(&l), &self.elems[i]);
        s.add_scaled_shifted(&Scalar::from_int(-1), &mj.quotient_of(&l), &self.elems[j]);
        s
    }

    fn finish(self) -> GroebnerBasis {
        let n = self.elems.len();
        let keys: Vec<Key> = (0..n).map(|i| self.lead_key(i).clone()).collect();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| {
                !(0..n).any(|j| {
                    j != i
                        && keys[j].comp == keys[i].comp
                        && keys[j].mono.divides(&keys[i].mono)
                        && (keys[j].mono != keys[i].mono || j < i)
                })
            })
            .collect();
        let mut elems: Vec<ModVec> = keep.iter().map(|&i| self.elems[i].clone()).collect();
        elems.sort_by(|a, b| a.lead().unwrap().0.cmp(b.lead().unwrap().0));
        let mut by_comp = vec![Vec::new(); self.rank];
        for (i, e) in elems.iter().enumerate() {
            by_comp[e.lead().unwrap().0.comp].push(i);
        }
        // tail reduction; leading terms are untouched since the leads are minimal
        for i in 0..elems.len() {
            let g = elems[i].clone();
            let (k, c) = g.lead().map(|(k, c)| (k.clone(), c.clone())).unwrap();
            let mut tail = g.clone();
            tail.terms.remove(&k);
            let mut r = reduce_skipping(&elems, &by_comp, tail, self.rank, self.nvars, i);
            r.terms.insert(k, c);
            elems[i] = r;
        }
        GroebnerBasis { rank: self.rank, nvars: self.nvars, elems, by_comp }
    }
}

fn find_reducer(elems: &[ModVec], by_comp: &[Vec<usize>], k: &Key, skip: usize) -> Option<usize> {
    by_comp
        .get(k.comp)?
        .iter()
        .copied()
        .find(|&i| i != skip && elems[i].lead().unwrap().0.mono.divides(&k.mono))
}

fn reduce_with(elems: &[ModVec], by_comp: &[Vec<usize>], v: ModVec, rank: usize, nvars: usize) -> ModVec {
    reduce_skipping(elems, by_comp, v, rank, nvars, usize::MAX)
}

/// Full reduction; reducer `skip` is excluded. Reducers must be monic.
fn reduce_skipping(
    elems: &[ModVec],
    by_comp: &[Vec<usize>],
    mut p: ModVec,
    rank: usize,
    nvars: usize,
    skip: usize,
) -> ModVec {
    let mut r = ModVec::zero(rank, nvars);
    while let Some((k, c)) = p.terms.pop_last() {
        match find_reducer(elems, by_comp, &k, skip) {
            Some(i) => {
                let g = &elems[i];
                let (gk, _) = g.lead().unwrap();
                let q = gk.mono.quotient_of(&k.mono);
                let neg = -&c;
                for (tk, tc) in g.terms.iter().rev().skip(1) {
                    p.add_term(Key { comp: tk.comp, mono: tk.mono.mul(&q) }, &neg * tc);
                }
            }
            None => {
                r.terms.insert(k, c);
            }
        }
    }
    r
}

/// Expresses vectors in terms of fixed generators `g_1..g_c` of a submodule of `R^r`.
#[derive(Clone, Debug)]
pub struct Lifter {
    rank: usize,
    ngens: usize,
    nvars: usize,
    gb: GroebnerBasis,
}

impl Lifter {
    pub fn new(gens: &[Vec<Polynomial>], rank: usize, nvars: usize) -> Self {
        let c = gens.len();
        let aug: Vec<ModVec> = gens
            .iter()
            .enumerate()
            .map(|(j, g)| {
                assert_eq!(g.len(), rank);
                let mut v = g.clone();
                v.extend((0..c).map(|i| if i == j { Polynomial::one(nvars) } else { Polynomial::zero(nvars) }));
                ModVec::from_polys(&v, nvars)
            })
            .collect();
        Lifter { rank, ngens: c, nvars, gb: GroebnerBasis::new(aug, rank + c, nvars) }
    }

    pub fn from_matrix(m: &PolyMatrix) -> Self {
        Self::new(&m.columns(), m.rows(), m.nvars())
    }

    /// Coefficients `a` with `sum_j a_j g_j = v`.
    pub fn lift(&self, v: &[Polynomial]) -> Result<Vec<Polynomial>> {
        assert_eq!(v.len(), self.rank);
        let mut full = v.to_vec();
        full.extend((0..self.ngens).map(|_| Polynomial::zero(self.nvars)));
        let r = self.gb.normal_form(&ModVec::from_polys(&full, self.nvars));
        let (top, bottom) = r.split(self.rank);
        if !top.is_zero() {
            return Err(Error::NotMember);
        }
        Ok(bottom.scale(&Scalar::from_int(-1)).to_polys())
    }

    pub fn contains(&self, v: &[Polynomial]) -> bool {
        self.lift(v).is_ok()
    }

    /// Generators of the syzygy module of the generators, as vectors in `R^c`.
    pub fn syzygies(&self) -> Vec<Vec<Polynomial>> {
        self.gb
            .elements()
            .iter()
            .filter_map(|e| {
                let (top, bottom) = e.split(self.rank);
                top.is_zero().then(|| bottom.to_polys())
            })
            .collect()
    }

    /// Gröbner basis of the submodule generated by the `g_j`.
    pub fn image_basis(&self) -> GroebnerBasis {
        let elems: Vec<ModVec> = self
            .gb
            .elements()
            .iter()
            .filter_map(|e| {
                let (top, _) = e.split(self.rank);
                (!top.is_zero()).then_some(top)
            })
            .collect();
        GroebnerBasis::new(elems, self.rank, self.nvars)
    }
}

/// Generators of the kernel of `R^c -> R^r` given by the columns.
pub fn syzygy_basis(cols: &[Vec<Polynomial>], rank: usize, nvars: usize) -> Vec<Vec<Polynomial>> {
    Lifter::new(cols, rank, nvars).syzygies()
}

/// Degree of a homogeneous column under the standard grading with shifted components.
pub fn column_degree(col: &[Polynomial], gen_degrees: &[i64]) -> Option<i64> {
    col.iter()
        .zip(gen_degrees)
        .find_map(|(p, d)| p.leading_term().map(|(m, _)| m.degree() as i64 + d))
}

/// Degree-sorted subset of columns generating the same submodule (minimal in the graded case).
pub fn minimal_generators(
    cols: &[Vec<Polynomial>],
    rank: usize,
    nvars: usize,
    gen_degrees: &[i64],
) -> Vec<Vec<Polynomial>> {
    let mut sorted: Vec<(i64, Vec<Polynomial>)> = cols
        .iter()
        .filter(|c| c.iter().any(|p| !p.is_zero()))
        .map(|c| (column_degree(c, gen_degrees).unwrap_or(0), c.clone()))
        .collect();
    sorted.sort_by_key(|(d, _)| *d);
    let mut kept: Vec<Vec<Polynomial>> = Vec::new();
    let mut gb = GroebnerBasis::new(Vec::new(), rank, nvars);
    for (_, c) in sorted {
        if !gb.contains(&ModVec::from_polys(&c, nvars)) {
            kept.push(c);
            gb = GroebnerBasis::from_polys(&kept, rank, nvars);
        }
    }
    kept
}

/// Graded free resolution `... -> F_2 -> F_1 -> F_0`; `maps[i]` is `F_{i+1} -> F_i`.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    pub nvars: usize,
    pub maps: Vec<PolyMatrix>,
    pub degrees: Vec<Vec<i64>>,
}

impl FreeResolution {
    pub fn ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(Vec::len).collect()
    }

    pub fn length(&self) -> usize {
        self.maps.len()
    }
}

/// Minimal graded free resolution of `R^r / <relations>` where `relations` has `r` rows.
pub fn free_resolution(relations: &PolyMatrix, gen_degrees: &[i64]) -> Result<FreeResolution> {
    let nvars = relations.nvars();
    let r = relations.rows();
    if gen_degrees.len() != r {
        return Err(Error::Dimension(format!("{} generator degrees for {} generators", gen_degrees.len(), r)));
    }
    for c in relations.columns() {
        let degs: BTreeSet<i64> = c
            .iter()
            .zip(gen_degrees)
            .flat_map(|(p, d)| p.terms().map(move |(m, _)| m.degree() as i64 + d))
            .collect();
        if degs.len() > 1 {
            return Err(Error::NonHomogeneous("relation column is not homogeneous".into()));
        }
    }
    let mut maps = Vec::new();
    let mut degrees = vec![gen_degrees.to_vec()];
    let mut cols = minimal_generators(&relations.columns(), r, nvars, gen_degrees);
    let mut rows = r;
    while !cols.is_empty() {
        if maps.len() > nvars + 1 {
            return Err(Error::Internal("resolution did not terminate".into()));
        }
        let prev = degrees.last().unwrap().clone();
        let degs: Vec<i64> = cols.iter().map(|c| column_degree(c, &prev).unwrap_or(0)).collect();
        let m = PolyMatrix::from_columns(nvars, rows, &cols);
        let syz = syzygy_basis(&cols, rows, nvars);
        rows = cols.len();
        cols = minimal_generators(&syz, rows, nvars, &degs);
        maps.push(m);
        degrees.push(degs);
    }
    let mut res = FreeResolution { nvars, maps, degrees };
    prune(&mut res);
    Ok(res)
}

/// Remove unit entries by simultaneous change of bases, keeping `d^2 = 0`.
pub fn prune(res: &mut FreeResolution) {
    loop {
        let mut found = None;
        'search: for (i, d) in res.maps.iter().enumerate() {
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    let e = d.get(r, c);
                    if !e.is_zero() && e.is_constant() {
                        found = Some((i, r, c));
                        break 'search;
                    }
                }
            }
        }
        let Some((i, r, c)) = found else { break };
        eliminate_unit(res, i, r, c);
    }
    while res.maps.last().is_some_and(|m| m.cols() == 0) {
        res.maps.pop();
        res.degrees.pop();
    }
}

fn eliminate_unit(res: &mut FreeResolution, i: usize, r: usize, c: usize) {
    let nvars = res.nvars;
    let u = res.maps[i].get(r, c).constant_term();
    let uinv = u.inv().unwrap();
    let d = res.maps[i].clone();
    // row ops on d_i; compensate on the columns of the map out of F_i's target
    let a: Vec<Polynomial> = (0..d.rows()).map(|k| d.get(k, c).scale(&uinv)).collect();
    let mut d2 = d.clone();
    for k in 0..d.rows() {
        if k == r || a[k].is_zero() {
            continue;
        }
        for j in 0..d.cols() {
            let v = d2.get(k, j) - &(&a[k] * d2.get(r, j));
            d2.set(k, j, v);
        }
    }
    if i > 0 {
        let prev = &mut res.maps[i - 1];
        for k in 0..d.rows() {
            if k == r || a[k].is_zero() {
                continue;
            }
            for row in 0..prev.rows() {
                let v = prev.get(row, r) + &(prev.get(row, k) * &a[k]);
                prev.set(row, r, v);
            }
        }
    }
    // column ops on d_i; compensate on the rows of the next map
    let b: Vec<Polynomial> = (0..d2.cols()).map(|k| d2.get(r, k).scale(&uinv)).collect();
    for k in 0..d2.cols() {
        if k == c || b[k].is_zero() {
            continue;
        }
        for row in 0..d2.rows() {
            let v = d2.get(row, k) - &(d2.get(row, c) * &b[k]);
            d2.set(row, k, v);
        }
    }
    if i + 1 < res.maps.len() {
        let next = &mut res.maps[i + 1];
        for k in 0..d2.cols() {
            if k == c || b[k].is_zero() {
                continue;
            }
            for col in 0..next.cols() {
                let v = next.get(c, col) + &(&b[k] * next.get(k, col));
                next.set(c, col, v);
            }
        }
    }
    res.maps[i] = delete(&d2, Some(r), Some(c), nvars);
    if i > 0 {
        res.maps[i - 1] = delete(&res.maps[i - 1], None, Some(r), nvars);
    }
    if i + 1 < res.maps.len() {
        res.maps[i + 1] = delete(&res.maps[i + 1], Some(c), None, nvars);
    }
    res.degrees[i].remove(r);
    res.degrees[i + 1].remove(c);
}

fn delete(m: &PolyMatrix, row: Option<usize>, col: Option<usize>, nvars: usize) -> PolyMatrix {
    let rows: Vec<usize> = (0..m.rows()).filter(|&k| Some(k) != row).collect();
    let cols: Vec<usize> = (0..m.cols()).filter(|&k| Some(k) != col).collect();
    let mut out = PolyMatrix::zeros(rows.len(), cols.len(), nvars);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            out.set(a, b, m.get(i, j).clone());
        }
    }
    out
}

/// Finite-dimensional quotient `R^r / N` with a monomial basis.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub gb: GroebnerBasis,
    pub basis: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl QuotientBasis {
    pub fn new(gb: GroebnerBasis) -> Result<Self> {
        let basis = gb.standard_monomials()?;
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(QuotientBasis { gb, basis, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the class of `v` in the standard monomial basis.
    pub fn coordinates(&self, v: &ModVec) -> Vec<Scalar> {
        let nf = self.gb.normal_form(v);
        let mut out = vec![Scalar::zero(); self.basis.len()];
        for (k, c) in nf.terms() {
            let i = self.index[&(k.comp, k.mono.clone())];
            out[i] = c.clone();
        }
        out
    }

    pub fn element(&self, i: usize) -> ModVec {
        let (comp, m) = &self.basis[i];
        ModVec::basis(self.gb.rank(), self.gb.nvars(), *comp, m.clone())
    }
}
