//! Boundary-bulk classes, both sides of the holomorphic Lefschetz formula, and the checks
//! derived from it.

use std::time::Instant;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::homcoh::{
    cohomology, default_window, graded_euler_supertrace, grading_of, induced_endomorphism, supertrace_on_cohomology,
    CohomologyBasis, HomComplex,
};
use crate::mf::{equivariance_power_check, pullback, MFMorphism, MatrixFactorization};
use crate::milnor::{canonical_pairing, milnor_data, pairing_sign, trace_space, TraceSpace, TraceSpaceElement};
use crate::poly::{Polynomial, Symmetry, WeightSystem};
use crate::scalars::{one_minus_zeta_valuation, Scalar};

/// Which cohomology engine computes the left-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Groebner,
    Graded,
    Both,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Groebner => "groebner",
            Engine::Graded => "graded",
            Engine::Both => "both",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LefschetzReport {
    pub kind: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub equal: bool,
    /// Engines that produced each side.
    pub engine: String,
    pub micros: u128,
    pub notes: Vec<String>,
}

impl LefschetzReport {
    fn new(kind: &str, lhs: Scalar, rhs: Scalar, engine: String, start: Instant) -> Self {
        let equal = lhs == rhs;
        LefschetzReport { kind: kind.into(), lhs, rhs, equal, engine, micros: start.elapsed().as_micros(), notes: Vec::new() }
    }
}

fn sign(odd: bool) -> Scalar {
    if odd { Scalar::from_int(-1) } else { Scalar::one() }
}

/// Sign of the permutation listing moving coordinates first, then fixed ones.
pub fn shuffle_sign(t: &Symmetry) -> Scalar {
    let moving = t.moving();
    let fixed = t.fixed();
    let inversions: usize = moving.iter().map(|&i| fixed.iter().filter(|&&j| j < i).count()).sum();
    sign(inversions % 2 == 1)
}

/// `prod_{moving} (1 - t_i)^{-1}`.
pub fn moving_factor(t: &Symmetry) -> Scalar {
    let mut acc = Scalar::one();
    for i in t.moving() {
        acc = &acc * &(Scalar::one() - t.roots()[i].to_scalar()).inv().expect("moving coordinate");
    }
    acc
}

/// `tau(alpha)`: the supertrace of `d_{f_m} delta o ... o d_{f_1} delta o alpha` over the fixed
/// coordinates, restricted to the fixed locus and reduced in `H(w_t)`.
pub fn boundary_bulk(space: &TraceSpace, e: &MatrixFactorization, alpha: &MFMorphism) -> Result<TraceSpaceElement> {
    let t = &space.t;
    if t.len() != e.nvars() {
        return Err(Error::Dimension("symmetry length differs from the variable count".into()));
    }
    let target = pullback(t, e)?;
    if alpha.source.d0() != e.d0() || alpha.source.d1() != e.d1() {
        return Err(Error::Precondition("morphism source is not the given factorization".into()));
    }
    if alpha.target.d0() != target.d0() || alpha.target.d1() != target.d1() {
        return Err(Error::Precondition("morphism target is not the pullback t^*E".into()));
    }
    if !alpha.is_closed() {
        return Err(Error::NotClosed("boundary-bulk input".into()));
    }
    let m = space.fixed.len();
    if (alpha.parity as usize + m) % 2 == 1 {
        return Ok(space.zero());
    }
    let delta = target.delta();
    let mut comp = alpha.matrix.clone();
    for &f in &space.fixed {
        comp = delta.partial_derivative(f).mul(&comp);
    }
    // even composite: supertrace over the generators of E
    let mut st = Polynomial::zero(e.nvars());
    for i in 0..e.rank() {
        let d = comp.get(i, i);
        st = if e.parity_of(i) == 0 { &st + d } else { &st - d };
    }
    let restricted = st.restrict(&space.fixed).scale(&shuffle_sign(t));
    Ok(space.element(&restricted))
}

/// `beta(t^{-1} x)`, viewed as a map `B -> (t^{-1})^* B`.
pub fn tilde_beta(t: &Symmetry, beta: &MFMorphism) -> Result<MFMorphism> {
    let ti = t.inverse();
    MFMorphism::new(beta.target.clone(), pullback(&ti, &beta.target)?, beta.parity, beta.matrix.scale_substitute(&ti))
}

/// `<tau^A(alpha), tau^B(tilde beta)>`.
pub fn rhs_hlf(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: Option<&WeightSystem>,
) -> Result<Scalar> {
    let space = trace_space(a.potential(), t, weights)?;
    let inv_space = trace_space(a.potential(), &t.inverse(), weights)?;
    let u = boundary_bulk(&space, a, alpha)?;
    let v = boundary_bulk(&inv_space, b, &tilde_beta(t, beta)?)?;
    canonical_pairing(&space, &u, &v)
}

/// Cohomology of `Hom(A, B)`, reusable across morphisms.
#[derive(Clone, Debug)]
pub struct HomData {
    pub hx: HomComplex,
    pub basis: CohomologyBasis,
}

impl HomData {
    pub fn new(a: &MatrixFactorization, b: &MatrixFactorization) -> Result<Self> {
        let hx = HomComplex::new(a, b)?;
        let basis = cohomology(&hx)?;
        Ok(HomData { hx, basis })
    }

    pub fn lhs(&self, t: &Symmetry, alpha: &MFMorphism, beta: &MFMorphism) -> Result<Scalar> {
        let mats = induced_endomorphism(&self.hx, &self.basis, t, alpha, beta)?;
        Ok(supertrace_on_cohomology(&mats))
    }
}

/// `str((F, alpha, beta)_*, Hom(A, B))` by the Gröbner engine.
pub fn lhs_hlf(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
) -> Result<Scalar> {
    HomData::new(a, b)?.lhs(t, alpha, beta)
}

fn weights_for(w: &Polynomial, weights: Option<&WeightSystem>) -> Result<WeightSystem> {
    weights
        .cloned()
        .or_else(|| WeightSystem::infer(w))
        .ok_or_else(|| Error::NonHomogeneous(format!("{w} is not quasi-homogeneous")))
}

/// Graded-engine value: the degree window grows by `deg w` until two consecutive windows give
/// the same value (at most four steps). Returns the value and the window used.
pub fn graded_lhs(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: &WeightSystem,
) -> Result<(Scalar, Rational64)> {
    let ga = grading_of(a, weights)?;
    let gb = grading_of(b, weights)?;
    let mut window = default_window(weights, &ga, &gb);
    let mut value = graded_euler_supertrace(a, b, t, alpha, beta, weights, window)?;
    for _ in 0..4 {
        let wider = graded_euler_supertrace(a, b, t, alpha, beta, weights, window + weights.degree)?;
        if wider == value {
            return Ok((value, window));
        }
        window += weights.degree;
        value = wider;
    }
    Err(Error::Internal(format!("graded engine did not stabilize up to window {window}")))
}

/// Left-hand side with the requested engine; with `Both` a disagreement is an error.
pub fn lhs_with_engine(
    data: Option<&HomData>,
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: Option<&WeightSystem>,
    engine: Engine,
) -> Result<(Scalar, Vec<String>)> {
    let groebner = || -> Result<Scalar> {
        match data {
            Some(d) => d.lhs(t, alpha, beta),
            None => lhs_hlf(a, b, t, alpha, beta),
        }
    };
    match engine {
        Engine::Groebner => Ok((groebner()?, Vec::new())),
        Engine::Graded => {
            let ws = weights_for(a.potential(), weights)?;
            let (v, win) = graded_lhs(a, b, t, alpha, beta, &ws)?;
            Ok((v, vec![format!("graded window {win}")]))
        }
        Engine::Both => {
            let g = groebner()?;
            let ws = weights_for(a.potential(), weights)?;
            let (v, win) = graded_lhs(a, b, t, alpha, beta, &ws)?;
            if v != g {
                return Err(Error::Internal(format!("engines disagree: groebner {g}, graded {v} (window {win})")));
            }
            Ok((g, vec![format!("graded engine agrees (window {win})")]))
        }
    }
}

fn sign_note(t: &Symmetry) -> String {
    let m = t.fixed().len();
    format!("pairing sign (-1)^(m(m-1)/2) = {} for fixed-locus dimension m = {m}", pairing_sign(m))
}

#[allow(clippy::too_many_arguments)]
pub fn verify_hlf(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: Option<&WeightSystem>,
    engine: Engine,
) -> Result<LefschetzReport> {
    let start = Instant::now();
    let (lhs, mut notes) = lhs_with_engine(None, a, b, t, alpha, beta, weights, engine)?;
    let rhs = rhs_hlf(a, b, t, alpha, beta, weights)?;
    let mut r = LefschetzReport::new("hlf", lhs, rhs, format!("lhs:{} rhs:boundary-bulk+pairing", engine.name()), start);
    notes.push(sign_note(t));
    r.notes = notes;
    Ok(r)
}

fn require_isolated(t: &Symmetry) -> Result<()> {
    if !t.fixed().is_empty() {
        return Err(Error::Precondition(format!("{} has fixed coordinates", t.literal())));
    }
    Ok(())
}

pub fn verify_isolated(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: Option<&WeightSystem>,
    engine: Engine,
) -> Result<LefschetzReport> {
    require_isolated(t)?;
    let start = Instant::now();
    let (lhs, notes) = lhs_with_engine(None, a, b, t, alpha, beta, weights, engine)?;
    let rhs = &(&alpha.supertrace_at_origin() * &beta.supertrace_at_origin()) * &moving_factor(t);
    let mut r = LefschetzReport::new("isolated", lhs, rhs, format!("lhs:{} rhs:closed-form", engine.name()), start);
    r.notes = notes;
    Ok(r)
}

/// `(-1)^n (prod t_i) tr(t | Milnor(w))` against `(-1)^{n-k} mu(w_t)`.
pub fn lunts_check(w: &Polynomial, t: &Symmetry) -> Result<LefschetzReport> {
    let start = Instant::now();
    let n = w.nvars();
    let space = trace_space(w, t, None)?;
    let alg = milnor_data(w)?;
    let mut tr = Scalar::zero();
    for m in alg.basis() {
        let mut r = crate::scalars::RootOfUnity::one();
        for (i, &e) in m.exponents().iter().enumerate() {
            r = r.mul(&t.roots()[i].pow(e as i64));
        }
        tr += &r.to_scalar();
    }
    let mut det = crate::scalars::RootOfUnity::one();
    for r in t.roots() {
        det = det.mul(r);
    }
    let lhs = &(&sign(n % 2 == 1) * &det.to_scalar()) * &tr;
    let rhs = Scalar::from_int(space.sdim());
    Ok(LefschetzReport::new("lunts", lhs, rhs, "milnor".into(), start))
}

/// For `n - k` odd the left-hand side vanishes.
pub fn zero_fixed_locus_check(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    beta: &MFMorphism,
    weights: Option<&WeightSystem>,
    engine: Engine,
) -> Result<LefschetzReport> {
    if t.fixed().len().is_multiple_of(2) {
        return Err(Error::Precondition("fixed locus has even dimension".into()));
    }
    let start = Instant::now();
    let (lhs, notes) = lhs_with_engine(None, a, b, t, alpha, beta, weights, engine)?;
    let mut r = LefschetzReport::new("zero-check", lhs, Scalar::zero(), format!("lhs:{}", engine.name()), start);
    r.notes = notes;
    Ok(r)
}

/// `str(alpha|_0) str(alpha^{-1}|_0)` against `lhs(A, A, t, alpha, alpha^{-1}) prod (1 - t_i)`.
pub fn trace_identity_check(
    a: &MatrixFactorization,
    t: &Symmetry,
    alpha: &MFMorphism,
    weights: Option<&WeightSystem>,
    engine: Engine,
) -> Result<LefschetzReport> {
    require_isolated(t)?;
    let start = Instant::now();
    let inv = alpha.inverse()?;
    let lhs = &alpha.supertrace_at_origin() * &inv.supertrace_at_origin();
    let (hl, notes) = lhs_with_engine(None, a, a, t, alpha, &inv, weights, engine)?;
    let mut prod = Scalar::one();
    for r in t.roots() {
        prod = &prod * &(Scalar::one() - r.to_scalar());
    }
    let mut r = LefschetzReport::new("trace-identity", lhs, &hl * &prod, format!("rhs:{}", engine.name()), start);
    r.notes = notes;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisibilityReport {
    pub supertrace: Scalar,
    /// `None` means infinite valuation.
    pub valuation: Option<u32>,
    pub bound: u32,
    pub m_max: u32,
    pub pass: bool,
    pub micros: u128,
}

/// `(1 - zeta_p)`-adic valuation of `str(alpha|_0)` against `ceil(n/2)`.
pub fn divisibility_check(a: &MatrixFactorization, t: &Symmetry, alpha: &MFMorphism, p: u32) -> Result<DivisibilityReport> {
    let start = Instant::now();
    require_isolated(t)?;
    if a.r0() != a.r1() {
        return Err(Error::Precondition("virtual rank is not zero".into()));
    }
    if !alpha.is_closed() {
        return Err(Error::NotClosed("alpha".into()));
    }
    if !equivariance_power_check(alpha, t, p)? {
        return Err(Error::Precondition(format!("alpha is not Z/{p}-equivariant")));
    }
    let n = a.nvars() as u32;
    let bound = n.div_ceil(2);
    let st = alpha.supertrace_at_origin();
    let valuation = one_minus_zeta_valuation(&st, p)?;
    let pass = valuation.is_none_or(|v| v >= bound);
    let m_max = bound.saturating_sub(1) / (p - 1);
    Ok(DivisibilityReport { supertrace: st, valuation, bound, m_max, pass, micros: start.elapsed().as_micros() })
}
