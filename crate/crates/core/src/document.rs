//! Workspace documents: named potentials, symmetries, factorizations, morphisms,
//! graded modules and cases in a flat, line-oriented format.
//!
//! ```text
//! # comment
//! [potential]
//! w(x, y) = x^3 + y^3          # variable list optional, default: order of appearance
//! [weights]
//! w = [1/3, 1/3]
//! [symmetry]
//! t = zeta(3)^[1, 0]
//! [mf A]
//! potential = w
//! d0 = { x + y }               # or: koszul = { a_1, a_2 ; b_1, b_2 }
//! d1 = { x^2 - x*y + y^2 }
//! grading = [0, 1/3]           # optional
//! [morphism alpha]
//! source = A
//! target = t^*A
//! parity = 0                   # optional, default 0
//! matrix = { 1, 0 ; 0, zeta(3) }   # or: b0/b1, b01/b10, inverse = name
//! [module M]
//! potential = w
//! degrees = [0]
//! relations = { x, y }         # rows are generators
//! [case c]
//! command = hlf-verify
//! args = A, A, t, alpha, beta
//! expect = 1 - zeta(3)^2       # optional
//! ```
//! Braces may span several lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::expr::{identifiers, parse_error, Parser, Pos};
use crate::hilbert::GradedModulePresentation;
use crate::mf::{koszul_mf, pullback, MFMorphism, MatrixFactorization};
use crate::poly::{check_symmetry, PolyMatrix, Polynomial, Symmetry, WeightSystem};
use crate::scalars::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialDef {
    pub vars: Vec<String>,
    pub poly: Polynomial,
}

/// `A` or `t^*A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MfRef {
    pub symmetry: Option<String>,
    pub mf: String,
}

impl MfRef {
    fn literal(&self) -> String {
        match &self.symmetry {
            Some(t) => format!("{t}^*{}", self.mf),
            None => self.mf.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MfDef {
    pub potential: String,
    pub mf: MatrixFactorization,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismDef {
    pub source: MfRef,
    pub target: MfRef,
    pub morphism: MFMorphism,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleDef {
    pub potential: String,
    pub module: GradedModulePresentation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseDef {
    pub command: String,
    pub args: Vec<String>,
    pub expect: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Workspace {
    pub potentials: BTreeMap<String, PotentialDef>,
    /// Keyed by potential name.
    pub weights: BTreeMap<String, WeightSystem>,
    pub symmetries: BTreeMap<String, Symmetry>,
    pub mfs: BTreeMap<String, MfDef>,
    pub morphisms: BTreeMap<String, MorphismDef>,
    pub modules: BTreeMap<String, ModuleDef>,
    pub cases: BTreeMap<String, CaseDef>,
}

/// Commands a case may name.
pub const COMMANDS: [&str; 11] = [
    "milnor",
    "bb",
    "pair",
    "hlf-verify",
    "isolated-verify",
    "lunts",
    "zero-check",
    "trace-identity",
    "divisibility",
    "stabilize",
    "hilbert",
];

#[derive(Clone, Debug)]
struct Value {
    chars: Vec<(char, Pos)>,
    end: Pos,
}

impl Value {
    fn parser(&self) -> Result<Parser> {
        Parser::from_located(&self.chars, self.end)
    }

    fn start(&self) -> Pos {
        self.chars.iter().find(|c| !c.0.is_whitespace()).map_or(self.end, |c| c.1)
    }

    fn text(&self) -> String {
        self.chars.iter().map(|c| c.0).collect()
    }
}

#[derive(Debug)]
struct Assignment {
    key: String,
    key_pos: Pos,
    value: Value,
}

#[derive(Debug)]
struct Section {
    kind: String,
    name: Option<String>,
    pos: Pos,
    items: Vec<Assignment>,
}

const FLAT: [&str; 3] = ["potential", "weights", "symmetry"];
const BLOCKS: [&str; 4] = ["mf", "morphism", "module", "case"];

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut sections: Vec<Section> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let raw = strip_comment(lines[i]);
        i += 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        let col = |byte: usize| raw[..byte].chars().count() + 1;
        if trimmed.starts_with('[') {
            let pos = Pos { line: line_no, column: col(indent) };
            let inner = trimmed
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| parse_error(pos, "malformed section header"))?;
            let mut words = inner.split_whitespace();
            let kind = words.next().ok_or_else(|| parse_error(pos, "empty section header"))?.to_string();
            let name = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(parse_error(pos, "section header has extra words"));
            }
            if FLAT.contains(&kind.as_str()) {
                if name.is_some() {
                    return Err(parse_error(pos, format!("section [{kind}] takes no name")));
                }
            } else if BLOCKS.contains(&kind.as_str()) {
                match &name {
                    None => return Err(parse_error(pos, format!("section [{kind}] needs a name"))),
                    Some(n) if !is_name(n) => return Err(parse_error(pos, format!("invalid name `{n}`"))),
                    _ => {}
                }
            } else {
                return Err(parse_error(pos, format!("unknown section `{kind}`")));
            }
            sections.push(Section { kind, name, pos, items: Vec::new() });
            continue;
        }
        let eq = raw
            .find('=')
            .ok_or_else(|| parse_error(Pos { line: line_no, column: col(indent) }, "expected `key = value`"))?;
        let key_pos = Pos { line: line_no, column: col(indent) };
        let key = raw[..eq].trim().to_string();
        let section = sections
            .last_mut()
            .ok_or_else(|| parse_error(key_pos, "assignment before any section header"))?;
        let mut chars: Vec<(char, Pos)> = Vec::new();
        let start_col = col(eq + 1);
        chars.extend(raw[eq + 1..].chars().enumerate().map(|(k, c)| (c, Pos { line: line_no, column: start_col + k })));
        let mut end = Pos { line: line_no, column: start_col + raw[eq + 1..].chars().count() };
        let depth = |cs: &[(char, Pos)]| cs.iter().fold(0i64, |d, c| d + (c.0 == '{') as i64 - (c.0 == '}') as i64);
        while depth(&chars) > 0 && i < lines.len() {
            let more = strip_comment(lines[i]);
            let l = i + 1;
            i += 1;
            chars.push((' ', end));
            chars.extend(more.chars().enumerate().map(|(k, c)| (c, Pos { line: l, column: k + 1 })));
            end = Pos { line: l, column: more.chars().count() + 1 };
        }
        section.items.push(Assignment { key, key_pos, value: Value { chars, end } });
    }
    Ok(sections)
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

fn validation(what: &str, name: &str, e: Error) -> Error {
    Error::Validation(format!("{what} `{name}`: {e}"))
}

struct Block<'a> {
    kind: &'a str,
    name: &'a str,
    pos: Pos,
    fields: BTreeMap<&'a str, &'a Assignment>,
}

impl<'a> Block<'a> {
    fn new(s: &'a Section, allowed: &[&str]) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for a in &s.items {
            if !allowed.contains(&a.key.as_str()) {
                return Err(parse_error(a.key_pos, format!("unknown key `{}` in [{}]", a.key, s.kind)));
            }
            if fields.insert(a.key.as_str(), a).is_some() {
                return Err(parse_error(a.key_pos, format!("duplicate key `{}`", a.key)));
            }
        }
        Ok(Block { kind: &s.kind, name: s.name.as_deref().unwrap(), pos: s.pos, fields })
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.fields.get(key).map(|a| &a.value)
    }

    fn require(&self, key: &str) -> Result<&'a Value> {
        self.get(key)
            .ok_or_else(|| parse_error(self.pos, format!("[{} {}] is missing `{key}`", self.kind, self.name)))
    }

    fn has(&self, key: &str) -> bool {
        self.fields.contains_key(key)
    }
}

fn name_value(v: &Value) -> Result<String> {
    let mut p = v.parser()?;
    let s = p.ident()?;
    p.finish()?;
    Ok(s)
}

fn mf_ref(v: &Value) -> Result<MfRef> {
    let mut p = v.parser()?;
    let first = p.ident()?;
    if p.is_done() {
        return Ok(MfRef { symmetry: None, mf: first });
    }
    let text: String = v.text().split_whitespace().collect();
    match text.split_once("^*") {
        Some((t, a)) if is_name(t) && is_name(a) => Ok(MfRef { symmetry: Some(t.into()), mf: a.into() }),
        _ => Err(parse_error(v.start(), "expected `A` or `t^*A`")),
    }
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Workspace> {
        parse_document(text)
    }

    pub fn potential(&self, name: &str) -> Result<&PotentialDef> {
        self.potentials.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    pub fn symmetry(&self, name: &str) -> Result<&Symmetry> {
        self.symmetries.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    pub fn mf(&self, name: &str) -> Result<&MfDef> {
        self.mfs.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    pub fn morphism(&self, name: &str) -> Result<&MorphismDef> {
        self.morphisms.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    pub fn module(&self, name: &str) -> Result<&ModuleDef> {
        self.modules.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    pub fn case(&self, name: &str) -> Result<&CaseDef> {
        self.cases.get(name).ok_or_else(|| Error::UnknownEntity(name.into()))
    }

    /// Weights declared for a potential, if any.
    pub fn weights_of(&self, potential: &str) -> Option<&WeightSystem> {
        self.weights.get(potential)
    }

    /// Names of the variables of the ring an MF lives over.
    pub fn mf_vars(&self, mf: &str) -> Result<&[String]> {
        Ok(&self.potential(&self.mf(mf)?.potential)?.vars)
    }

    fn entity_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        out.extend(self.potentials.keys().map(String::as_str));
        out.extend(self.symmetries.keys().map(String::as_str));
        out.extend(self.mfs.keys().map(String::as_str));
        out.extend(self.morphisms.keys().map(String::as_str));
        out.extend(self.modules.keys().map(String::as_str));
        out.extend(self.cases.keys().map(String::as_str));
        out
    }

    fn resolve_mf(&self, r: &MfRef) -> Result<MatrixFactorization> {
        let def = self.mf(&r.mf)?;
        match &r.symmetry {
            None => Ok(def.mf.clone()),
            Some(t) => {
                let sym = self.symmetry(t)?;
                let w = &self.potential(&def.potential)?.poly;
                if !check_symmetry(w, sym) {
                    return Err(Error::Validation(format!(
                        "symmetry `{t}` = {} does not preserve potential `{}`",
                        sym.literal(),
                        def.potential
                    )));
                }
                pullback(sym, &def.mf)
            }
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.potentials.is_empty() {
            out.push_str("[potential]\n");
            for (name, p) in &self.potentials {
                let _ = writeln!(out, "{name}({}) = {}", p.vars.join(", "), p.poly.format(&p.vars));
            }
            out.push('\n');
        }
        if !self.weights.is_empty() {
            out.push_str("[weights]\n");
            for (name, w) in &self.weights {
                let _ = writeln!(out, "{name} = {}", rational_list(&w.weights));
            }
            out.push('\n');
        }
        if !self.symmetries.is_empty() {
            out.push_str("[symmetry]\n");
            for (name, t) in &self.symmetries {
                let _ = writeln!(out, "{name} = {}", t.literal());
            }
            out.push('\n');
        }
        for (name, def) in &self.mfs {
            let vars = &self.potentials[&def.potential].vars;
            let _ = writeln!(out, "[mf {name}]");
            let _ = writeln!(out, "potential = {}", def.potential);
            let _ = writeln!(out, "d0 = {}", def.mf.d0().format(vars));
            let _ = writeln!(out, "d1 = {}", def.mf.d1().format(vars));
            if let Some(g) = def.mf.grading() {
                let _ = writeln!(out, "grading = {}", rational_list(g));
            }
            out.push('\n');
        }
        for (name, def) in &self.morphisms {
            let vars = &self.potentials[&self.mfs[&def.source.mf].potential].vars;
            let _ = writeln!(out, "[morphism {name}]");
            let _ = writeln!(out, "source = {}", def.source.literal());
            let _ = writeln!(out, "target = {}", def.target.literal());
            let _ = writeln!(out, "parity = {}", def.morphism.parity);
            let _ = writeln!(out, "matrix = {}", def.morphism.matrix.format(vars));
            out.push('\n');
        }
        for (name, def) in &self.modules {
            let vars = &self.potentials[&def.potential].vars;
            let degs: Vec<String> = def.module.gen_degrees.iter().map(i64::to_string).collect();
            let rel = &def.module.relations;
            let _ = writeln!(out, "[module {name}]");
            let _ = writeln!(out, "potential = {}", def.potential);
            let _ = writeln!(out, "degrees = [{}]", degs.join(", "));
            let _ = writeln!(out, "relations = {}", if rel.cols() == 0 { "{ }".into() } else { rel.format(vars) });
            out.push('\n');
        }
        for (name, c) in &self.cases {
            let _ = writeln!(out, "[case {name}]");
            let _ = writeln!(out, "command = {}", c.command);
            if !c.args.is_empty() {
                let _ = writeln!(out, "args = {}", c.args.join(", "));
            }
            if let Some(e) = &c.expect {
                let _ = writeln!(out, "expect = {e}");
            }
            out.push('\n');
        }
        while out.ends_with("\n\n") {
            out.pop();
        }
        out
    }
}

fn rational_list(q: &[Rational64]) -> String {
    let items: Vec<String> = q.iter().map(Rational64::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// Parses and validates a document.
pub fn parse_document(text: &str) -> Result<Workspace> {
    let sections = split_sections(text)?;
    let mut ws = Workspace::default();
    let mut seen: BTreeMap<String, Pos> = BTreeMap::new();
    let mut claim = |name: &str, pos: Pos| -> Result<()> {
        if !is_name(name) || name == "zeta" {
            return Err(parse_error(pos, format!("invalid name `{name}`")));
        }
        if seen.insert(name.to_string(), pos).is_some() {
            return Err(parse_error(pos, format!("duplicate name `{name}`")));
        }
        Ok(())
    };

    // flat sections, potentials first so later sections can refer to them
    for s in sections.iter().filter(|s| s.kind == "potential") {
        for a in &s.items {
            let (name, vars) = potential_lhs(a)?;
            claim(&name, a.key_pos)?;
            let vars = match vars {
                Some(v) => v,
                None => identifiers(&a.value.text()),
            };
            let mut p = a.value.parser()?;
            let poly = p.expr(&vars)?;
            p.finish()?;
            ws.potentials.insert(name, PotentialDef { vars, poly });
        }
    }
    for s in sections.iter().filter(|s| s.kind == "symmetry") {
        for a in &s.items {
            claim(&a.key, a.key_pos)?;
            let mut p = a.value.parser()?;
            let t = p.symmetry()?;
            p.finish()?;
            ws.symmetries.insert(a.key.clone(), t);
        }
    }
    for s in sections.iter().filter(|s| s.kind == "weights") {
        for a in &s.items {
            let pot = ws.potentials.get(&a.key).ok_or_else(|| parse_error(a.key_pos, format!("unknown potential `{}`", a.key)))?;
            let mut p = a.value.parser()?;
            let w = WeightSystem::new(p.rational_list()?);
            p.finish()?;
            if w.weights.len() != pot.poly.nvars() || !w.is_quasi_homogeneous(&pot.poly) {
                return Err(Error::Validation(format!("weights for `{}` do not make it quasi-homogeneous of degree 1", a.key)));
            }
            if ws.weights.insert(a.key.clone(), w).is_some() {
                return Err(parse_error(a.key_pos, format!("duplicate weights for `{}`", a.key)));
            }
        }
    }

    for s in sections.iter().filter(|s| s.kind == "mf") {
        let b = Block::new(s, &["potential", "d0", "d1", "koszul", "grading"])?;
        claim(b.name, b.pos)?;
        let pot_name = name_value(b.require("potential")?)?;
        let pot = ws
            .potentials
            .get(&pot_name)
            .ok_or_else(|| parse_error(b.require("potential").unwrap().start(), format!("unknown potential `{pot_name}`")))?;
        let vars = &pot.vars;
        let n = vars.len();
        let mf = if let Some(k) = b.get("koszul") {
            if b.has("d0") || b.has("d1") {
                return Err(parse_error(b.pos, "give either `koszul` or `d0`/`d1`"));
            }
            let mut p = k.parser()?;
            let rows = p.matrix(vars)?;
            p.finish()?;
            if rows.len() != 2 {
                return Err(parse_error(k.start(), "koszul needs two rows `{ a_1, ... ; b_1, ... }`"));
            }
            let e = koszul_mf(n, &rows[0], &rows[1]).map_err(|e| validation("mf", b.name, e))?;
            if e.potential() != &pot.poly {
                return Err(validation("mf", b.name, Error::InvalidMf("sum a_i b_i differs from the potential".into())));
            }
            e
        } else {
            let d0 = matrix_value(b.require("d0")?, vars)?;
            let d1 = matrix_value(b.require("d1")?, vars)?;
            MatrixFactorization::new(pot.poly.clone(), d0, d1).map_err(|e| validation("mf", b.name, e))?
        };
        let mf = match b.get("grading") {
            Some(g) => {
                let mut p = g.parser()?;
                let q = p.rational_list()?;
                p.finish()?;
                mf.with_grading(q).map_err(|e| validation("mf", b.name, e))?
            }
            None => mf,
        };
        ws.mfs.insert(b.name.to_string(), MfDef { potential: pot_name, mf });
    }

    // morphisms may be inverses of one another; resolve in dependency order
    let blocks: Vec<Block> = sections
        .iter()
        .filter(|s| s.kind == "morphism")
        .map(|s| Block::new(s, &["source", "target", "parity", "matrix", "b0", "b1", "b01", "b10", "inverse"]))
        .collect::<Result<_>>()?;
    for b in &blocks {
        claim(b.name, b.pos)?;
    }
    let mut pending: Vec<&Block> = blocks.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut next = Vec::new();
        for b in pending {
            if let Some(v) = b.get("inverse") {
                let of = name_value(v)?;
                if !blocks.iter().any(|x| x.name == of) {
                    return Err(parse_error(v.start(), format!("unknown morphism `{of}`")));
                }
                match ws.morphisms.get(&of) {
                    Some(d) => {
                        if b.fields.len() != 1 {
                            return Err(parse_error(b.pos, "`inverse` takes no other keys"));
                        }
                        let m = d.morphism.inverse().map_err(|e| validation("morphism", b.name, e))?;
                        let def = MorphismDef { source: d.target.clone(), target: d.source.clone(), morphism: m };
                        ws.morphisms.insert(b.name.to_string(), def);
                    }
                    None => next.push(b),
                }
                continue;
            }
            let def = morphism_block(&ws, b)?;
            ws.morphisms.insert(b.name.to_string(), def);
        }
        if next.len() == before {
            return Err(parse_error(next[0].pos, "cyclic `inverse` references"));
        }
        pending = next;
    }

    for s in sections.iter().filter(|s| s.kind == "module") {
        let b = Block::new(s, &["potential", "degrees", "relations"])?;
        claim(b.name, b.pos)?;
        let pot_name = name_value(b.require("potential")?)?;
        let pot = ws.potential(&pot_name).map_err(|_| parse_error(b.pos, format!("unknown potential `{pot_name}`")))?;
        let mut p = b.require("degrees")?.parser()?;
        let degrees = p.int_list()?;
        p.finish()?;
        let rel = b.require("relations")?;
        let mut p = rel.parser()?;
        let rows = p.matrix(&pot.vars)?;
        p.finish()?;
        let n = pot.vars.len();
        let relations = if rows.is_empty() {
            PolyMatrix::zeros(degrees.len(), 0, n)
        } else {
            PolyMatrix::from_rows(n, rows)
        };
        let module = GradedModulePresentation::new(degrees, relations).map_err(|e| validation("module", b.name, e))?;
        ws.modules.insert(b.name.to_string(), ModuleDef { potential: pot_name, module });
    }

    let case_blocks: Vec<Block> =
        sections.iter().filter(|s| s.kind == "case").map(|s| Block::new(s, &["command", "args", "expect"])).collect::<Result<_>>()?;
    for b in &case_blocks {
        claim(b.name, b.pos)?;
    }
    let names: BTreeSet<String> = ws.entity_names().into_iter().map(str::to_string).collect();
    for b in &case_blocks {
        let cv = b.require("command")?;
        let command = cv.text().trim().to_string();
        if !COMMANDS.contains(&command.as_str()) {
            return Err(parse_error(cv.start(), format!("unknown command `{command}`")));
        }
        let args = match b.get("args") {
            Some(v) => {
                let items: Vec<String> = v.text().split(',').map(|s| s.trim().to_string()).collect();
                for a in &items {
                    let is_int = !a.is_empty() && a.chars().all(|c| c.is_ascii_digit());
                    if !is_int && !names.contains(a) {
                        return Err(Error::Validation(format!("case `{}` refers to unknown entity `{a}`", b.name)));
                    }
                    if case_blocks.iter().any(|c| c.name == a) {
                        return Err(Error::Validation(format!("case `{}` refers to case `{a}`", b.name)));
                    }
                }
                items
            }
            None => Vec::new(),
        };
        let expect = match b.get("expect") {
            Some(v) => {
                let mut p = v.parser()?;
                let s = p.scalar()?;
                p.finish()?;
                Some(s)
            }
            None => None,
        };
        ws.cases.insert(b.name.to_string(), CaseDef { command, args, expect });
    }
    Ok(ws)
}

fn potential_lhs(a: &Assignment) -> Result<(String, Option<Vec<String>>)> {
    let mut p = Parser::new(&a.key, a.key_pos)?;
    let name = p.ident()?;
    if p.is_done() {
        return Ok((name, None));
    }
    let rest = a.key[name.len()..].trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| parse_error(a.key_pos, "expected `name` or `name(vars)`"))?;
    let vars: Vec<String> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|s| s.trim().to_string()).collect()
    };
    for (i, v) in vars.iter().enumerate() {
        if !is_name(v) || v == "zeta" || vars[..i].contains(v) {
            return Err(parse_error(a.key_pos, format!("invalid variable `{v}`")));
        }
    }
    Ok((name, Some(vars)))
}

fn matrix_value(v: &Value, vars: &[String]) -> Result<PolyMatrix> {
    let mut p = v.parser()?;
    let m = p.poly_matrix(vars)?;
    p.finish()?;
    Ok(m)
}

fn morphism_block(ws: &Workspace, b: &Block) -> Result<MorphismDef> {
    let source_ref = mf_ref(b.require("source")?)?;
    let target_ref = mf_ref(b.require("target")?)?;
    let known = |r: &MfRef, v: &Value| -> Result<()> {
        if !ws.mfs.contains_key(&r.mf) {
            return Err(parse_error(v.start(), format!("unknown mf `{}`", r.mf)));
        }
        if let Some(t) = &r.symmetry {
            if !ws.symmetries.contains_key(t) {
                return Err(parse_error(v.start(), format!("unknown symmetry `{t}`")));
            }
        }
        Ok(())
    };
    known(&source_ref, b.require("source")?)?;
    known(&target_ref, b.require("target")?)?;
    let source = ws.resolve_mf(&source_ref)?;
    let target = ws.resolve_mf(&target_ref)?;
    let vars = ws.mf_vars(&source_ref.mf)?.to_vec();
    let parity = match b.get("parity") {
        Some(v) => match v.text().trim() {
            "0" => 0,
            "1" => 1,
            _ => return Err(parse_error(v.start(), "parity must be 0 or 1")),
        },
        None => 0,
    };
    let bad = |e: Error| validation("morphism", b.name, e);
    let morphism = if let Some(m) = b.get("matrix") {
        if ["b0", "b1", "b01", "b10"].iter().any(|k| b.has(k)) {
            return Err(parse_error(b.pos, "give either `matrix` or blocks"));
        }
        MFMorphism::new(source, target, parity, matrix_value(m, &vars)?).map_err(bad)?
    } else if parity == 0 {
        let b0 = matrix_value(b.require("b0")?, &vars)?;
        let b1 = matrix_value(b.require("b1")?, &vars)?;
        MFMorphism::even(source, target, &b0, &b1).map_err(bad)?
    } else {
        let b01 = matrix_value(b.require("b01")?, &vars)?;
        let b10 = matrix_value(b.require("b10")?, &vars)?;
        MFMorphism::odd(source, target, &b01, &b10).map_err(bad)?
    };
    if !morphism.is_closed() {
        return Err(bad(Error::NotClosed(format!("D({}) != 0", b.name))));
    }
    Ok(MorphismDef { source: source_ref, target: target_ref, morphism })
}
