//! Command dispatch and report rendering for the `mflef` binary.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::document::{CaseDef, Workspace, COMMANDS};
use crate::error::{Error, Result};
use crate::hilbert::{chi_polynomial, chi_stabilization_consistency, multiplicity_data, verify_even_multiplicity_divisibility, Laurent};
use crate::lefschetz::{
    boundary_bulk, divisibility_check, lunts_check, trace_identity_check, verify_hlf, verify_isolated, zero_fixed_locus_check, Engine,
    LefschetzReport,
};
use crate::linalg::Matrix;
use crate::mf::{stabilize_module, MFMorphism, MatrixFactorization};
use crate::milnor::{canonical_pairing, pairing_sign, trace_space, MilnorAlgebra};
use crate::poly::{check_symmetry, hessian_determinant, Polynomial, Symmetry, WeightSystem};
use crate::scalars::{is_prime, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detail {
    pub key: String,
    pub value: String,
}

/// One executed command. `equal` doubles as the pass flag for non-identity commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub command: String,
    pub kind: String,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub equal: bool,
    pub engine: String,
    pub micros: u128,
    pub details: Vec<Detail>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    /// 0 pass, 1 identity violation, 2 input error.
    pub status: i32,
}

impl CaseReport {
    fn blank(command: &str) -> Self {
        CaseReport {
            case: String::new(),
            command: command.into(),
            kind: command.into(),
            lhs: None,
            rhs: None,
            equal: true,
            engine: String::new(),
            micros: 0,
            details: Vec::new(),
            notes: Vec::new(),
            error: None,
            status: 0,
        }
    }

    fn from_lefschetz(command: &str, r: LefschetzReport) -> Self {
        CaseReport {
            kind: r.kind,
            lhs: Some(r.lhs.to_string()),
            rhs: Some(r.rhs.to_string()),
            equal: r.equal,
            engine: r.engine,
            micros: r.micros,
            notes: r.notes,
            ..Self::blank(command)
        }
    }

    fn detail(&mut self, key: &str, value: impl ToString) {
        self.details.push(Detail { key: key.into(), value: value.to_string() });
    }

    fn failed(command: &str, e: &Error) -> Self {
        CaseReport { equal: false, error: Some(e.to_string()), status: exit_code_for(e), ..Self::blank(command) }
    }
}

/// Engine disagreement is an identity violation; everything else is bad input.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => 1,
        _ => 2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub schema_version: u32,
    pub command: String,
    pub exit_code: i32,
    pub reports: Vec<CaseReport>,
}

/// Runs `command` on `args`. A single argument naming a case runs that case.
pub fn run_command(command: &str, args: &[String], ws: &Workspace, engine: Engine) -> RunOutcome {
    let reports = if command == "corpus" {
        if args.is_empty() {
            run_corpus(ws, engine)
        } else {
            vec![CaseReport::failed(command, &Error::Precondition("corpus takes no arguments".into()))]
        }
    } else if !COMMANDS.contains(&command) {
        vec![CaseReport::failed(command, &Error::UnknownEntity(format!("command {command}")))]
    } else if let [single] = args {
        match ws.cases.get(single) {
            Some(c) if c.command != command => vec![CaseReport {
                case: single.clone(),
                ..CaseReport::failed(command, &Error::Precondition(format!("case `{single}` runs `{}`", c.command)))
            }],
            Some(c) => vec![run_case(single, c, ws, engine)],
            None => vec![run_direct(command, args, ws, engine)],
        }
    } else {
        vec![run_direct(command, args, ws, engine)]
    };
    let exit_code = reports.iter().map(|r| r.status).max().unwrap_or(0);
    RunOutcome { schema_version: SCHEMA_VERSION, command: command.into(), exit_code, reports }
}

fn run_direct(command: &str, args: &[String], ws: &Workspace, engine: Engine) -> CaseReport {
    let label = std::iter::once(command.to_string()).chain(args.iter().cloned()).collect::<Vec<_>>().join(" ");
    let mut r = execute(command, args, ws, engine).unwrap_or_else(|e| CaseReport::failed(command, &e));
    r.case = label;
    r
}

fn run_case(name: &str, case: &CaseDef, ws: &Workspace, engine: Engine) -> CaseReport {
    let mut r = execute(&case.command, &case.args, ws, engine).unwrap_or_else(|e| CaseReport::failed(&case.command, &e));
    r.case = name.into();
    if let (Some(expect), None) = (&case.expect, &r.error) {
        let got = r.lhs.clone().unwrap_or_default();
        if got != expect.to_string() {
            r.status = 1;
            r.notes.push(format!("expected lhs {expect}, got {got}"));
        }
    }
    r
}

fn run_corpus(ws: &Workspace, engine: Engine) -> Vec<CaseReport> {
    let cases: Vec<(&String, &CaseDef)> = ws.cases.iter().collect();
    // BTreeMap iteration is name-ordered and collect preserves it
    cases.par_iter().map(|(n, c)| run_case(n, c, ws, engine)).collect()
}

struct Args<'a> {
    command: &'a str,
    items: &'a [String],
}

impl<'a> Args<'a> {
    fn arity(&self, lo: usize, hi: usize, usage: &str) -> Result<()> {
        if self.items.len() < lo || self.items.len() > hi {
            return Err(Error::Precondition(format!("usage: {} {usage}", self.command)));
        }
        Ok(())
    }

    fn get(&self, i: usize) -> &'a str {
        &self.items[i]
    }
}

fn potential<'w>(ws: &'w Workspace, name: &str) -> Result<(&'w Polynomial, &'w [String], Option<&'w WeightSystem>)> {
    let p = ws.potential(name)?;
    Ok((&p.poly, &p.vars, ws.weights_of(name)))
}

fn mf<'w>(ws: &'w Workspace, name: &str) -> Result<(&'w MatrixFactorization, Option<&'w WeightSystem>)> {
    let def = ws.mf(name)?;
    Ok((&def.mf, ws.weights_of(&def.potential)))
}

fn morphism<'w>(ws: &'w Workspace, name: &str) -> Result<&'w MFMorphism> {
    Ok(&ws.morphism(name)?.morphism)
}

fn symmetry_for(ws: &Workspace, name: &str, w: &Polynomial) -> Result<Symmetry> {
    let t = ws.symmetry(name)?;
    if !check_symmetry(w, t) {
        return Err(Error::NotSymmetry(format!("`{name}` = {} does not preserve the potential", t.literal())));
    }
    Ok(t.clone())
}

fn fixed_names(vars: &[String], t: &Symmetry) -> Vec<String> {
    t.fixed().iter().map(|&i| vars[i].clone()).collect()
}

fn monomial_list(alg: &MilnorAlgebra, names: &[String]) -> String {
    let n = alg.nvars();
    let items: Vec<String> =
        alg.basis().iter().map(|m| Polynomial::term(n, m.clone(), Scalar::one()).format(names)).collect();
    format!("[{}]", items.join(", "))
}

fn weights_literal(w: &WeightSystem) -> String {
    let items: Vec<String> = w.weights.iter().map(|q| q.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// Executes one command; errors become exit-2 reports upstream.
pub fn execute(command: &str, items: &[String], ws: &Workspace, engine: Engine) -> Result<CaseReport> {
    let a = Args { command, items };
    let start = Instant::now();
    let mut report = match command {
        "milnor" => {
            a.arity(1, 1, "<potential>")?;
            let (w, vars, weights) = potential(ws, a.get(0))?;
            milnor_report(w, vars, weights)?
        }
        "pair" => {
            a.arity(2, 2, "<potential> <symmetry>")?;
            let (w, vars, weights) = potential(ws, a.get(0))?;
            let t = symmetry_for(ws, a.get(1), w)?;
            pair_report(w, vars, &t, weights)?
        }
        "bb" => {
            a.arity(3, 3, "<mf> <symmetry> <morphism>")?;
            let (e, weights) = mf(ws, a.get(0))?;
            let vars = ws.mf_vars(a.get(0))?;
            let t = symmetry_for(ws, a.get(1), e.potential())?;
            let alpha = morphism(ws, a.get(2))?;
            let space = trace_space(e.potential(), &t, weights)?;
            let el = boundary_bulk(&space, e, alpha)?;
            let mut r = CaseReport::blank(command);
            r.kind = "boundary-bulk".into();
            r.lhs = Some(el.class.format(&fixed_names(vars, &t)));
            r.detail("parity", el.parity);
            r.detail("fixed", format!("[{}]", fixed_names(vars, &t).join(", ")));
            r
        }
        "hlf-verify" | "isolated-verify" | "zero-check" => {
            a.arity(5, 5, "<mf A> <mf B> <symmetry> <alpha> <beta>")?;
            let (ea, weights) = mf(ws, a.get(0))?;
            let (eb, _) = mf(ws, a.get(1))?;
            let t = symmetry_for(ws, a.get(2), ea.potential())?;
            let (alpha, beta) = (morphism(ws, a.get(3))?, morphism(ws, a.get(4))?);
            let f = match command {
                "hlf-verify" => verify_hlf,
                "isolated-verify" => verify_isolated,
                _ => zero_fixed_locus_check,
            };
            CaseReport::from_lefschetz(command, f(ea, eb, &t, alpha, beta, weights, engine)?)
        }
        "lunts" => {
            a.arity(2, 2, "<potential> <symmetry>")?;
            let (w, _, _) = potential(ws, a.get(0))?;
            let t = symmetry_for(ws, a.get(1), w)?;
            CaseReport::from_lefschetz(command, lunts_check(w, &t)?)
        }
        "trace-identity" => {
            a.arity(3, 3, "<mf> <symmetry> <alpha>")?;
            let (e, weights) = mf(ws, a.get(0))?;
            let t = symmetry_for(ws, a.get(1), e.potential())?;
            CaseReport::from_lefschetz(command, trace_identity_check(e, &t, morphism(ws, a.get(2))?, weights, engine)?)
        }
        "divisibility" => {
            a.arity(3, 4, "<mf> <symmetry> <alpha> [p]")?;
            let (e, _) = mf(ws, a.get(0))?;
            let t = symmetry_for(ws, a.get(1), e.potential())?;
            let p = match items.get(3) {
                Some(s) => s.parse::<u32>().map_err(|_| Error::Precondition(format!("`{s}` is not a prime")))?,
                None => t.group_order(),
            };
            if !is_prime(p) {
                return Err(Error::NonIntegral(format!("order {p} is not prime")));
            }
            let d = divisibility_check(e, &t, morphism(ws, a.get(2))?, p)?;
            let mut r = CaseReport::blank(command);
            r.kind = "divisibility".into();
            r.lhs = Some(d.supertrace.to_string());
            r.equal = d.pass;
            r.micros = d.micros;
            r.detail("p", p);
            r.detail("valuation", d.valuation.map_or("infinity".into(), |v| v.to_string()));
            r.detail("bound", d.bound);
            r.detail("m_max", d.m_max);
            r
        }
        "stabilize" => {
            a.arity(1, 1, "<module>")?;
            let def = ws.module(a.get(0))?;
            let (w, vars, _) = potential(ws, &def.potential)?;
            let st = stabilize_module(&def.module.relations, &def.module.gen_degrees, w)?;
            let mut r = match chi_stabilization_consistency(&def.module, w) {
                Ok(c) => CaseReport::from_lefschetz(command, c),
                Err(Error::Precondition(m)) => {
                    let mut r = CaseReport::blank(command);
                    r.notes.push(format!("consistency check skipped: {m}"));
                    r
                }
                Err(e) => return Err(e),
            };
            r.detail("ranks", format!("{:?}", st.resolution.ranks()));
            r.detail("d0", st.mf.d0().format(vars));
            r.detail("d1", st.mf.d1().format(vars));
            r
        }
        "hilbert" => {
            a.arity(1, 1, "<module>")?;
            let def = ws.module(a.get(0))?;
            let (w, _, _) = potential(ws, &def.potential)?;
            let n = def.module.nvars();
            let chi = chi_polynomial(&def.module)?;
            let data = multiplicity_data(&chi, n)?;
            let rebuilt = data.multiplicity.mul(&Laurent::one_minus_t_pow((n - data.krull_dim) as u32));
            let mut r = CaseReport::blank(command);
            r.kind = "hilbert".into();
            r.lhs = Some(chi.to_string());
            r.rhs = Some(format!("({})*(1 - t)^{}", data.multiplicity, n - data.krull_dim));
            r.equal = rebuilt == chi;
            r.detail("krull_dim", data.krull_dim);
            r.detail("multiplicity", &data.multiplicity);
            match verify_even_multiplicity_divisibility(&def.module, w) {
                Ok(ev) => {
                    r.detail("e(-1)", &ev.e_at_minus_one);
                    r.detail("two_adic_bound", ev.exponent);
                    r.equal &= ev.pass;
                }
                Err(Error::Precondition(m) | Error::NonHomogeneous(m)) => r.notes.push(format!("even multiplicity check skipped: {m}")),
                Err(e) => return Err(e),
            }
            r
        }
        _ => return Err(Error::UnknownEntity(format!("command {command}"))),
    };
    if report.micros == 0 {
        report.micros = start.elapsed().as_micros();
    }
    if report.engine.is_empty() {
        report.engine = "exact".into();
    }
    report.status = if report.equal { 0 } else { 1 };
    Ok(report)
}

fn milnor_report(w: &Polynomial, vars: &[String], weights: Option<&WeightSystem>) -> Result<CaseReport> {
    let alg = MilnorAlgebra::new(w, weights.cloned())?;
    let mu = alg.milnor_number();
    let res = alg.residue(&hessian_determinant(w))?;
    let det = alg.gram_matrix()?.determinant();
    let mut r = CaseReport::blank("milnor");
    r.kind = "residue-normalization".into();
    r.lhs = Some(res.to_string());
    r.rhs = Some(mu.to_string());
    r.equal = res == Scalar::from_int(mu as i64) && !det.is_zero();
    r.detail("mu", mu);
    r.detail("basis", monomial_list(&alg, vars));
    if let Some(m) = alg.socle_monomial() {
        r.detail("socle", Polynomial::term(w.nvars(), m.clone(), Scalar::one()).format(vars));
    }
    if let Some(ws) = alg.weights() {
        r.detail("weights", weights_literal(ws));
    }
    r.detail("gram_det", det);
    Ok(r)
}

fn pair_report(w: &Polynomial, vars: &[String], t: &Symmetry, weights: Option<&WeightSystem>) -> Result<CaseReport> {
    let space = trace_space(w, t, weights)?;
    let dual = trace_space(w, &t.inverse(), weights)?;
    let n = space.fixed.len();
    let basis: Vec<Polynomial> =
        space.algebra.basis().iter().map(|m| Polynomial::term(n, m.clone(), Scalar::one())).collect();
    let mut gram = Matrix::zeros(basis.len(), basis.len());
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            gram.set(i, j, canonical_pairing(&space, &space.element(u), &dual.element(v))?);
        }
    }
    let det = gram.determinant();
    let mut r = CaseReport::blank("pair");
    r.kind = "canonical-pairing".into();
    r.lhs = Some(det.to_string());
    r.equal = !det.is_zero();
    let names = fixed_names(vars, t);
    r.detail("basis", monomial_list(&space.algebra, &names));
    r.detail("gram", gram);
    r.notes.push(format!("pairing sign {} for fixed-locus dimension {n}", pairing_sign(n)));
    Ok(r)
}

/// Deterministic human-readable rendering; timings are left to the JSON form.
pub fn render_text(out: &RunOutcome) -> String {
    let mut s = String::new();
    for r in &out.reports {
        let verdict = match r.status {
            0 => "PASS",
            1 => "FAIL",
            _ => "ERROR",
        };
        let _ = writeln!(s, "[{}] {}: {verdict}", r.case, r.kind);
        if let Some(e) = &r.error {
            let _ = writeln!(s, "  error: {e}");
            continue;
        }
        if let Some(l) = &r.lhs {
            let _ = writeln!(s, "  lhs = {l}");
        }
        if let Some(x) = &r.rhs {
            let _ = writeln!(s, "  rhs = {x}");
        }
        let _ = writeln!(s, "  equal = {}", r.equal);
        let _ = writeln!(s, "  engine = {}", r.engine);
        for d in &r.details {
            let _ = writeln!(s, "  {} = {}", d.key, d.value);
        }
        for n in &r.notes {
            let _ = writeln!(s, "  note: {n}");
        }
    }
    let count = |c: i32| out.reports.iter().filter(|r| r.status == c).count();
    let _ = writeln!(s, "summary: {} passed, {} failed, {} errors", count(0), count(1), count(2));
    s
}

pub fn render_json(out: &RunOutcome) -> String {
    serde_json::to_string_pretty(out).expect("report serializes") + "\n"
}
