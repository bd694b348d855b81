//! Human-authored presentations of graded rings, DG-rings and modules, plus
//! the line-oriented text grammar that is the input language of the artifact.
//!
//! Rings are products of graded-commutative monomial quotients on bigraded
//! generators; relations are restricted to monomials so that normal forms
//! need no Groebner machinery. Differential assignments send a generator to
//! zero or to a scalar multiple of a monomial one cohomological degree up.

use crate::linalg::DEFAULT_PRIME;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Exponent vector over a component's ordered generator list.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingGen {
    pub name: String,
    pub n: i32,
    pub d: i32,
}

impl RingGen {
    pub fn odd(&self) -> bool {
        self.n.rem_euclid(2) == 1
    }
}

/// One factor of a product ring: a graded-commutative polynomial algebra on
/// finitely many bigraded generators modulo monomial relations, with a
/// differential assignment per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPresentation {
    pub gens: Vec<RingGen>,
    pub rels: Vec<Monomial>,
    /// `diffs[i]` is the image of generator `i`: zero, or `coeff * monomial`
    /// of bidegree `(n_i + 1, d_i)`.
    pub diffs: Vec<Option<(i64, Monomial)>>,
}

impl ComponentPresentation {
    pub fn empty() -> Self {
        ComponentPresentation { gens: Vec::new(), rels: Vec::new(), diffs: Vec::new() }
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> (i32, i32) {
        let mut n = 0;
        let mut d = 0;
        for (i, &e) in m.iter().enumerate() {
            n += self.gens[i].n * e as i32;
            d += self.gens[i].d * e as i32;
        }
        (n, d)
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diffs.iter().all(|d| d.is_none())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub name: String,
    pub char_p: u64,
    pub components: Vec<ComponentPresentation>,
}

/// A module generator, tagged with the product-ring component it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModGen {
    pub name: String,
    pub n: i32,
    pub d: i32,
    pub component: usize,
}

/// One summand `coeff * monomial * gen` of a module relation or differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModTerm {
    pub coeff: i64,
    pub mono: Monomial,
    pub gen: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub name: String,
    pub over: String,
    pub gens: Vec<ModGen>,
    pub rels: Vec<Vec<ModTerm>>,
    /// `diffs[i]` is the image of generator `i` under the differential,
    /// of bidegree `(n_i + 1, d_i)`; empty for ordinary modules.
    pub diffs: Vec<Vec<ModTerm>>,
}

impl ModulePresentation {
    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn is_ordinary(&self) -> bool {
        self.diffs.iter().all(|d| d.is_empty())
    }

    fn term_bidegree(&self, ring: &RingPresentation, t: &ModTerm) -> (i32, i32) {
        let g = &self.gens[t.gen];
        let (mn, md) = ring.components[g.component].monomial_bidegree(&t.mono);
        (mn + g.n, md + g.d)
    }
}

impl RingPresentation {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Presentation(format!("ring {} has no components", self.name)));
        }
        let mut seen = BTreeMap::new();
        for (ci, comp) in self.components.iter().enumerate() {
            if comp.diffs.len() != comp.gens.len() {
                return Err(Error::Presentation("differential table length mismatch".into()));
            }
            for g in &comp.gens {
                if g.n > 0 {
                    return Err(Error::Presentation(format!(
                        "ring generator {} has positive cohomological degree {}",
                        g.name, g.n
                    )));
                }
                if g.d < 0 || (g.n == 0 && g.d < 1) {
                    // internal degree 0 is tolerable off the zeroth row; a
                    // generator at bidegree (0,0) would make pieces infinite
                    return Err(Error::Presentation(format!(
                        "ring generator {} at bidegree ({},{}) breaks finiteness of bigraded pieces",
                        g.name, g.n, g.d
                    )));
                }
                if let Some(prev) = seen.insert(g.name.clone(), ci) {
                    return Err(Error::Presentation(format!(
                        "generator {} declared in components {} and {}",
                        g.name, prev, ci
                    )));
                }
            }
            for rel in &comp.rels {
                if rel.len() != comp.gens.len() {
                    return Err(Error::Presentation("relation exponent length mismatch".into()));
                }
                for (i, &e) in rel.iter().enumerate() {
                    if comp.gens[i].odd() && e > 1 {
                        return Err(Error::Presentation(format!(
                            "relation uses {}^{} but odd generators square to zero",
                            comp.gens[i].name, e
                        )));
                    }
                }
                if rel.iter().all(|&e| e == 0) {
                    return Err(Error::Presentation("the unit monomial cannot be a relation".into()));
                }
            }
            for (i, diff) in comp.diffs.iter().enumerate() {
                if let Some((c, m)) = diff {
                    if *c == 0 {
                        return Err(Error::Presentation("zero-coefficient differential; omit it".into()));
                    }
                    let g = &comp.gens[i];
                    let got = comp.monomial_bidegree(m);
                    if got != (g.n + 1, g.d) {
                        return Err(Error::Presentation(format!(
                            "differential of {} has bidegree {:?}, expected {:?}",
                            g.name,
                            got,
                            (g.n + 1, g.d)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_ordinary(&self) -> bool {
        self.components.iter().all(|c| c.has_zero_differential() && c.gens.iter().all(|g| g.n == 0))
    }

    /// The induced presentation of H^0: keep the degree-0 generators, keep the
    /// relations among them, and add the differential images of degree -1
    /// generators as new monomial relations.
    pub fn h0_presentation(&self) -> RingPresentation {
        let mut components = Vec::new();
        for comp in &self.components {
            let keep: Vec<usize> =
                (0..comp.gens.len()).filter(|&i| comp.gens[i].n == 0).collect();
            let reindex = |m: &Monomial| -> Option<Monomial> {
                // None when the monomial involves a dropped generator
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 && comp.gens[i].n != 0 {
                        return None;
                    }
                }
                Some(keep.iter().map(|&i| m[i]).collect())
            };
            let gens: Vec<RingGen> = keep.iter().map(|&i| comp.gens[i].clone()).collect();
            let mut rels: Vec<Monomial> = comp.rels.iter().filter_map(|m| reindex(m)).collect();
            for (i, diff) in comp.diffs.iter().enumerate() {
                if comp.gens[i].n == -1 {
                    if let Some((_, m)) = diff {
                        if let Some(r) = reindex(m) {
                            if r.iter().any(|&e| e > 0) {
                                rels.push(r);
                            }
                        }
                    }
                }
            }
            rels.sort();
            rels.dedup();
            let n = gens.len();
            components.push(ComponentPresentation { gens, rels, diffs: vec![None; n] });
        }
        RingPresentation { name: format!("H0_{}", self.name), char_p: self.char_p, components }
    }
}

impl ModulePresentation {
    pub fn validate(&self, ring: &RingPresentation) -> Result<()> {
        if self.diffs.len() != self.gens.len() {
            return Err(Error::Presentation("module differential table length mismatch".into()));
        }
        for g in &self.gens {
            if g.component >= ring.components.len() {
                return Err(Error::Presentation(format!(
                    "module generator {} references component {} of a {}-component ring",
                    g.name,
                    g.component,
                    ring.components.len()
                )));
            }
            if g.d < 0 {
                return Err(Error::Presentation(format!(
                    "module generator {} has negative internal degree",
                    g.name
                )));
            }
        }
        for rel in &self.rels {
            if rel.is_empty() {
                return Err(Error::Presentation("empty module relation".into()));
            }
            self.check_terms(ring, rel, None, "relation")?;
        }
        for (i, diff) in self.diffs.iter().enumerate() {
            if !diff.is_empty() {
                let g = &self.gens[i];
                self.check_terms(ring, diff, Some((g.n + 1, g.d)), "differential")?;
            }
        }
        Ok(())
    }

    fn check_terms(
        &self,
        ring: &RingPresentation,
        terms: &[ModTerm],
        expect: Option<(i32, i32)>,
        what: &str,
    ) -> Result<()> {
        let mut bidegree = expect;
        for t in terms {
            if t.coeff == 0 {
                return Err(Error::Presentation(format!("zero coefficient in module {what}")));
            }
            let g = &self.gens[t.gen];
            if t.mono.len() != ring.components[g.component].gens.len() {
                return Err(Error::Presentation("module term exponent length mismatch".into()));
            }
            for (i, &e) in t.mono.iter().enumerate() {
                let rg = &ring.components[g.component].gens[i];
                if rg.odd() && e > 1 {
                    return Err(Error::Presentation(format!(
                        "module {what} uses {}^{} but odd generators square to zero",
                        rg.name, e
                    )));
                }
            }
            let bd = self.term_bidegree(ring, t);
            match bidegree {
                None => bidegree = Some(bd),
                Some(b) if b != bd => {
                    return Err(Error::Presentation(format!(
                        "inhomogeneous module {what}: term bidegrees {:?} and {:?}",
                        b, bd
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Builtin constructors
// ---------------------------------------------------------------------------

/// Koszul DG-ring K(A; f_1, ..., f_r): adjoin one odd generator `e_i` of
/// bidegree (-1, d(f_i)) per element, with differential `e_i -> f_i`.
pub fn koszul(name: &str, ring: &RingPresentation, elems: &[Monomial]) -> Result<RingPresentation> {
    if ring.components.len() != 1 {
        return Err(Error::Presentation(
            "koszul is only supported over single-component rings".into(),
        ));
    }
    let comp = &ring.components[0];
    let base = comp.gens.len();
    let mut gens = comp.gens.clone();
    let mut diffs: Vec<Option<(i64, Monomial)>> = comp.diffs.clone();
    let total = base + elems.len();
    for (k, f) in elems.iter().enumerate() {
        if f.len() != base {
            return Err(Error::Presentation("koszul element exponent length mismatch".into()));
        }
        let (fn_, fd) = comp.monomial_bidegree(f);
        if fn_ != 0 {
            return Err(Error::Presentation(format!(
                "koszul element has cohomological degree {fn_}, expected 0"
            )));
        }
        gens.push(RingGen { name: format!("e{}", k + 1), n: -1, d: fd });
        let mut img = f.clone();
        img.resize(total, 0);
        diffs.push(Some((1, img)));
    }
    let rels = comp
        .rels
        .iter()
        .map(|r| {
            let mut m = r.clone();
            m.resize(total, 0);
            m
        })
        .collect();
    let diffs = diffs
        .into_iter()
        .map(|d| {
            d.map(|(c, mut m)| {
                m.resize(total, 0);
                (c, m)
            })
        })
        .collect();
    let out = RingPresentation {
        name: name.to_string(),
        char_p: ring.char_p,
        components: vec![ComponentPresentation { gens, rels, diffs }],
    };
    out.validate()?;
    Ok(out)
}

/// Trivial extension DG-ring A x| M[1]: module generators become ring
/// generators one cohomological degree down, with all pairwise products zero
/// and zero differential.
pub fn trivial_extension(
    name: &str,
    ring: &RingPresentation,
    module: &ModulePresentation,
) -> Result<RingPresentation> {
    if ring.components.len() != 1 {
        return Err(Error::Presentation(
            "trivext is only supported over single-component rings".into(),
        ));
    }
    if !ring.is_ordinary() {
        return Err(Error::Presentation("trivext requires an ordinary base ring".into()));
    }
    if !module.is_ordinary() {
        return Err(Error::Presentation("trivext requires an ordinary (zero differential) module".into()));
    }
    let comp = &ring.components[0];
    let base = comp.gens.len();
    let mods = module.gens.len();
    let total = base + mods;
    let mut gens = comp.gens.clone();
    for g in &module.gens {
        if g.n - 1 == 0 && g.d < 1 {
            return Err(Error::Presentation(format!(
                "trivext module generator {} would land at bidegree (0,0)",
                g.name
            )));
        }
        gens.push(RingGen { name: g.name.clone(), n: g.n - 1, d: g.d });
    }
    let mut rels: Vec<Monomial> = comp
        .rels
        .iter()
        .map(|r| {
            let mut m = r.clone();
            m.resize(total, 0);
            m
        })
        .collect();
    // all products of two module elements vanish
    for i in 0..mods {
        for j in i..mods {
            let gi = &gens[base + i];
            if i == j && gi.odd() {
                continue; // odd squares already vanish
            }
            let mut m = vec![0u32; total];
            m[base + i] += 1;
            m[base + j] += 1;
            rels.push(m);
        }
    }
    // module relations become monomial ring relations
    for rel in &module.rels {
        if rel.len() != 1 {
            return Err(Error::Presentation(
                "trivext requires monomial module relations (single-term)".into(),
            ));
        }
        let t = &rel[0];
        let mut m = vec![0u32; total];
        m[..base].copy_from_slice(&t.mono);
        m[base + t.gen] += 1;
        rels.push(m);
    }
    rels.sort();
    rels.dedup();
    let out = RingPresentation {
        name: name.to_string(),
        char_p: ring.char_p,
        components: vec![ComponentPresentation { gens, rels, diffs: vec![None; total] }],
    };
    out.validate()?;
    Ok(out)
}

/// Quotient of a ring by additional monomial relations.
pub fn quotient_ring(
    name: &str,
    ring: &RingPresentation,
    monomials: &[Monomial],
) -> Result<RingPresentation> {
    if ring.components.len() != 1 {
        return Err(Error::Presentation("quot is only supported over single-component rings".into()));
    }
    let mut out = ring.clone();
    out.name = name.to_string();
    out.components[0].rels.extend(monomials.iter().cloned());
    out.components[0].rels.sort();
    out.components[0].rels.dedup();
    out.validate()?;
    Ok(out)
}

/// Shift a module presentation by `k`: M[k]^n = M^{n+k}, with the standard
/// sign twists folded into relations and differentials.
pub fn shift_presentation(
    name: &str,
    ring: &RingPresentation,
    module: &ModulePresentation,
    k: i32,
) -> Result<ModulePresentation> {
    let sign = |parity: i32| -> i64 {
        if (k * parity).rem_euclid(2) == 1 {
            -1
        } else {
            1
        }
    };
    let twist_terms = |terms: &[ModTerm], extra: i32| -> Vec<ModTerm> {
        terms
            .iter()
            .map(|t| {
                let comp = &ring.components[module.gens[t.gen].component];
                let (mn, _) = comp.monomial_bidegree(&t.mono);
                ModTerm { coeff: t.coeff * sign(mn) * sign(extra), mono: t.mono.clone(), gen: t.gen }
            })
            .collect()
    };
    let out = ModulePresentation {
        name: name.to_string(),
        over: module.over.clone(),
        gens: module
            .gens
            .iter()
            .map(|g| ModGen { name: g.name.clone(), n: g.n - k, d: g.d, component: g.component })
            .collect(),
        rels: module.rels.iter().map(|r| twist_terms(r, 0)).collect(),
        diffs: module.diffs.iter().map(|d| twist_terms(d, 1)).collect(),
    };
    out.validate(ring)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer {
    tokens: Vec<Token>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let col = i + 1;
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(line[start..i].to_string()), line: ln + 1, col });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let v: i64 = line[start..i].parse().map_err(|_| Error::Syntax {
                    line: ln + 1,
                    col,
                    msg: "integer out of range".into(),
                })?;
                out.push(Token { tok: Tok::Int(v), line: ln + 1, col });
            } else if "{}();,=*^+-@".contains(c) {
                out.push(Token { tok: Tok::Punct(c), line: ln + 1, col });
                i += 1;
            } else {
                return Err(Error::Syntax {
                    line: ln + 1,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0));
        Error::Syntax { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t.tok)
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        match self.next()? {
            Tok::Punct(p) if p == c => Ok(()),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected `{c}`, found {other:?}")))
            }
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected identifier, found {other:?}")))
            }
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        let s = self.expect_ident()?;
        if s == kw {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected `{kw}`, found `{s}`")))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_int(&mut self) -> Result<i64> {
        let neg = self.eat_punct('-');
        match self.next()? {
            Tok::Int(v) => Ok(if neg { -v } else { v }),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected integer, found {other:?}")))
            }
        }
    }
}

/// A parsed source file: named rings and modules in declaration order.
#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub rings: Vec<RingPresentation>,
    pub modules: Vec<ModulePresentation>,
    pub order: Vec<String>,
}

impl SourceFile {
    pub fn ring(&self, name: &str) -> Option<&RingPresentation> {
        self.rings.iter().find(|r| r.name == name)
    }

    pub fn module(&self, name: &str) -> Option<&ModulePresentation> {
        self.modules.iter().find(|m| m.name == name)
    }
}

/// Parse a presentation source; every entity is validated.
pub fn parse(text: &str) -> Result<SourceFile> {
    parse_with_char(text, DEFAULT_PRIME)
}

pub fn parse_with_char(text: &str, char_p: u64) -> Result<SourceFile> {
    let mut lx = Lexer { tokens: lex(text)?, pos: 0 };
    let mut file = SourceFile::default();
    while lx.peek().is_some() {
        let kw = lx.expect_ident()?;
        match kw.as_str() {
            "ring" | "dgring" => {
                let ring = parse_ring(&mut lx, &file, char_p)?;
                ring.validate()?;
                file.order.push(ring.name.clone());
                file.rings.push(ring);
            }
            "module" => {
                let module = parse_module(&mut lx, &file)?;
                let ring = file
                    .ring(&module.over)
                    .ok_or_else(|| Error::Presentation(format!("unknown ring {}", module.over)))?;
                module.validate(ring)?;
                file.order.push(module.name.clone());
                file.modules.push(module);
            }
            other => {
                lx.pos -= 1;
                return Err(lx.err(format!("expected `ring`, `dgring` or `module`, found `{other}`")));
            }
        }
    }
    Ok(file)
}

fn parse_ring(lx: &mut Lexer, file: &SourceFile, char_p: u64) -> Result<RingPresentation> {
    let name = lx.expect_ident()?;
    if lx.eat_punct('=') {
        let ctor = lx.expect_ident()?;
        lx.expect_punct('(')?;
        let base_name = lx.expect_ident()?;
        let base = file
            .ring(&base_name)
            .ok_or_else(|| Error::Presentation(format!("unknown ring {base_name}")))?
            .clone();
        match ctor.as_str() {
            "koszul" | "quot" => {
                lx.expect_punct(';')?;
                let mut monos = Vec::new();
                loop {
                    let m = parse_ring_monomial(lx, &base.components[0])?;
                    monos.push(m);
                    if !lx.eat_punct(',') {
                        break;
                    }
                }
                lx.expect_punct(')')?;
                if ctor == "koszul" {
                    koszul(&name, &base, &monos)
                } else {
                    quotient_ring(&name, &base, &monos)
                }
            }
            "trivext" => {
                lx.expect_punct(',')?;
                let mod_name = lx.expect_ident()?;
                lx.expect_punct(')')?;
                let module = file
                    .module(&mod_name)
                    .ok_or_else(|| Error::Presentation(format!("unknown module {mod_name}")))?;
                trivial_extension(&name, &base, module)
            }
            other => Err(lx.err(format!("unknown ring constructor `{other}`"))),
        }
    } else {
        lx.expect_punct('{')?;
        let mut components = Vec::new();
        if lx.peek() == Some(&Tok::Ident("component".into())) {
            while lx.peek() == Some(&Tok::Ident("component".into())) {
                lx.expect_keyword("component")?;
                lx.expect_punct('{')?;
                components.push(parse_component_body(lx)?);
            }
        } else {
            // single-component shorthand: statements directly in the ring body
            components.push(parse_component_body(lx)?);
            return Ok(RingPresentation { name, char_p, components });
        }
        lx.expect_punct('}')?;
        Ok(RingPresentation { name, char_p, components })
    }
}

fn parse_component_body(lx: &mut Lexer) -> Result<ComponentPresentation> {
    let mut comp = ComponentPresentation::empty();
    // pending diff assignments are resolved once all generators are known
    let mut pending_diffs: Vec<(String, Vec<(String, u32)>)> = Vec::new();
    loop {
        if lx.eat_punct('}') {
            break;
        }
        let kw = lx.expect_ident()?;
        match kw.as_str() {
            "gen" => {
                let gname = lx.expect_ident()?;
                lx.expect_punct('(')?;
                let n = lx.expect_int()? as i32;
                lx.expect_punct(',')?;
                let d = lx.expect_int()? as i32;
                lx.expect_punct(')')?;
                lx.expect_punct(';')?;
                comp.gens.push(RingGen { name: gname, n, d });
                comp.diffs.push(None);
            }
            "rel" => {
                let factors = parse_factor_list(lx)?;
                lx.expect_punct(';')?;
                let m = factors_to_monomial(lx, &comp, &factors)?;
                comp.rels.push(m);
            }
            "diff" => {
                let gname = lx.expect_ident()?;
                lx.expect_punct('=')?;
                let factors = parse_factor_list(lx)?;
                lx.expect_punct(';')?;
                pending_diffs.push((gname, factors));
            }
            other => return Err(lx.err(format!("expected `gen`, `rel` or `diff`, found `{other}`"))),
        }
    }
    for (gname, factors) in pending_diffs {
        let gi = comp
            .gen_index(&gname)
            .ok_or_else(|| Error::Presentation(format!("diff of unknown generator {gname}")))?;
        let m = factors_to_monomial_raw(&comp, &factors)?;
        comp.diffs[gi] = Some((1, m));
    }
    Ok(comp)
}

/// `name[^k] (* name[^k])*` as raw (name, exponent) pairs.
fn parse_factor_list(lx: &mut Lexer) -> Result<Vec<(String, u32)>> {
    let mut out = Vec::new();
    loop {
        let name = lx.expect_ident()?;
        let exp = if lx.eat_punct('^') {
            let e = lx.expect_int()?;
            if e < 1 {
                return Err(lx.err("exponent must be positive"));
            }
            e as u32
        } else {
            1
        };
        out.push((name, exp));
        if !lx.eat_punct('*') {
            break;
        }
    }
    Ok(out)
}

fn factors_to_monomial_raw(comp: &ComponentPresentation, factors: &[(String, u32)]) -> Result<Monomial> {
    let mut m = vec![0u32; comp.gens.len()];
    for (name, exp) in factors {
        let i = comp
            .gen_index(name)
            .ok_or_else(|| Error::Presentation(format!("unknown generator {name}")))?;
        m[i] += exp;
    }
    Ok(m)
}

fn factors_to_monomial(
    lx: &Lexer,
    comp: &ComponentPresentation,
    factors: &[(String, u32)],
) -> Result<Monomial> {
    factors_to_monomial_raw(comp, factors).map_err(|e| match e {
        Error::Presentation(msg) => lx.err(msg),
        other => other,
    })
}

fn parse_ring_monomial(lx: &mut Lexer, comp: &ComponentPresentation) -> Result<Monomial> {
    let factors = parse_factor_list(lx)?;
    factors_to_monomial(lx, comp, &factors)
}

fn parse_module(lx: &mut Lexer, file: &SourceFile) -> Result<ModulePresentation> {
    let name = lx.expect_ident()?;
    if lx.eat_punct('=') {
        let ctor = lx.expect_ident()?;
        lx.expect_punct('(')?;
        let base_name = lx.expect_ident()?;
        lx.expect_punct(',')?;
        let k = lx.expect_int()? as i32;
        lx.expect_punct(')')?;
        if ctor != "shift" {
            return Err(lx.err(format!("unknown module constructor `{ctor}`")));
        }
        let base = file
            .module(&base_name)
            .ok_or_else(|| Error::Presentation(format!("unknown module {base_name}")))?;
        let ring = file
            .ring(&base.over)
            .ok_or_else(|| Error::Presentation(format!("unknown ring {}", base.over)))?;
        return shift_presentation(&name, ring, base, k);
    }
    lx.expect_keyword("over")?;
    let over = lx.expect_ident()?;
    let ring = file
        .ring(&over)
        .ok_or_else(|| Error::Presentation(format!("unknown ring {over}")))?
        .clone();
    lx.expect_punct('{')?;
    let mut m = ModulePresentation {
        name,
        over,
        gens: Vec::new(),
        rels: Vec::new(),
        diffs: Vec::new(),
    };
    let mut pending_diffs: Vec<(String, Vec<ModTerm>)> = Vec::new();
    loop {
        if lx.eat_punct('}') {
            break;
        }
        let kw = lx.expect_ident()?;
        match kw.as_str() {
            "gen" => {
                let gname = lx.expect_ident()?;
                lx.expect_punct('(')?;
                let n = lx.expect_int()? as i32;
                lx.expect_punct(',')?;
                let d = lx.expect_int()? as i32;
                lx.expect_punct(')')?;
                let component = if lx.eat_punct('@') { lx.expect_int()? as usize } else { 0 };
                lx.expect_punct(';')?;
                m.gens.push(ModGen { name: gname, n, d, component });
                m.diffs.push(Vec::new());
            }
            "rel" => {
                let terms = parse_mod_terms(lx, &ring, &m)?;
                lx.expect_punct(';')?;
                m.rels.push(terms);
            }
            "diff" => {
                let gname = lx.expect_ident()?;
                lx.expect_punct('=')?;
                let terms = parse_mod_terms(lx, &ring, &m)?;
                lx.expect_punct(';')?;
                pending_diffs.push((gname, terms));
            }
            other => return Err(lx.err(format!("expected `gen`, `rel` or `diff`, found `{other}`"))),
        }
    }
    for (gname, terms) in pending_diffs {
        let gi = m
            .gen_index(&gname)
            .ok_or_else(|| Error::Presentation(format!("diff of unknown module generator {gname}")))?;
        m.diffs[gi] = terms;
    }
    Ok(m)
}

/// `[coeff*] factor*...*gen (+|- term)*`, with exactly one module generator
/// per term.
fn parse_mod_terms(
    lx: &mut Lexer,
    ring: &RingPresentation,
    module: &ModulePresentation,
) -> Result<Vec<ModTerm>> {
    let mut terms = Vec::new();
    let mut sign = 1i64;
    loop {
        let mut coeff = sign;
        if let Some(Tok::Int(_)) = lx.peek() {
            let v = lx.expect_int()?;
            coeff *= v;
            lx.expect_punct('*')?;
        }
        let factors = parse_factor_list(lx)?;
        let mut gen = None;
        let mut ring_factors = Vec::new();
        for (fname, exp) in factors {
            if let Some(gi) = module.gen_index(&fname) {
                if gen.is_some() {
                    return Err(lx.err("term contains two module generators"));
                }
                if exp != 1 {
                    return Err(lx.err("module generator cannot be raised to a power"));
                }
                gen = Some(gi);
            } else {
                ring_factors.push((fname, exp));
            }
        }
        let gi = gen.ok_or_else(|| lx.err("term is missing a module generator"))?;
        let comp = &ring.components[module.gens[gi].component];
        let mono = factors_to_monomial(lx, comp, &ring_factors)?;
        terms.push(ModTerm { coeff, mono, gen: gi });
        if lx.eat_punct('+') {
            sign = 1;
        } else if lx.eat_punct('-') {
            sign = -1;
        } else {
            break;
        }
    }
    Ok(terms)
}

// ---------------------------------------------------------------------------
// Printing (round-trip partner of `parse`)
// ---------------------------------------------------------------------------

fn print_monomial(comp: &ComponentPresentation, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        if e == 1 {
            parts.push(comp.gens[i].name.clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", comp.gens[i].name, e));
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn print_ring(r: &RingPresentation) -> String {
    let mut s = String::new();
    let kw = if r.components.iter().all(|c| c.has_zero_differential()) { "ring" } else { "dgring" };
    let _ = writeln!(s, "{} {} {{", kw, r.name);
    for comp in &r.components {
        let _ = writeln!(s, "  component {{");
        for g in &comp.gens {
            let _ = writeln!(s, "    gen {} ({},{});", g.name, g.n, g.d);
        }
        for rel in &comp.rels {
            let _ = writeln!(s, "    rel {};", print_monomial(comp, rel));
        }
        for (i, diff) in comp.diffs.iter().enumerate() {
            if let Some((_, m)) = diff {
                let _ = writeln!(s, "    diff {} = {};", comp.gens[i].name, print_monomial(comp, m));
            }
        }
        let _ = writeln!(s, "  }}");
    }
    let _ = writeln!(s, "}}");
    s
}

fn print_terms(ring: &RingPresentation, m: &ModulePresentation, terms: &[ModTerm]) -> String {
    let mut s = String::new();
    for (i, t) in terms.iter().enumerate() {
        let comp = &ring.components[m.gens[t.gen].component];
        let sign = if t.coeff < 0 { "-" } else { "+" };
        if i > 0 {
            let _ = write!(s, " {} ", sign);
        } else if t.coeff < 0 {
            let _ = write!(s, "-");
        }
        let c = t.coeff.abs();
        if c != 1 {
            let _ = write!(s, "{}*", c);
        }
        if t.mono.iter().any(|&e| e > 0) {
            let _ = write!(s, "{}*", print_monomial(comp, &t.mono));
        }
        let _ = write!(s, "{}", m.gens[t.gen].name);
    }
    s
}

pub fn print_module(ring: &RingPresentation, m: &ModulePresentation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "module {} over {} {{", m.name, m.over);
    for g in &m.gens {
        if g.component == 0 {
            let _ = writeln!(s, "  gen {} ({},{});", g.name, g.n, g.d);
        } else {
            let _ = writeln!(s, "  gen {} ({},{}) @{};", g.name, g.n, g.d, g.component);
        }
    }
    for rel in &m.rels {
        let _ = writeln!(s, "  rel {};", print_terms(ring, m, rel));
    }
    for (i, diff) in m.diffs.iter().enumerate() {
        if !diff.is_empty() {
            let _ = writeln!(s, "  diff {} = {};", m.gens[i].name, print_terms(ring, m, diff));
        }
    }
    let _ = writeln!(s, "}}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BASIC: &str = "
        ring A { component { gen x (0,1); gen y (0,1); rel x*y; } }
        dgring B = koszul(A; x^2)
        module M over A { gen m (0,0); rel y*m; }
        dgring T = trivext(A, M)
    ";

    #[test]
    fn parse_basic_file() {
        let f = parse(BASIC).unwrap();
        let a = f.ring("A").unwrap();
        assert_eq!(a.components.len(), 1);
        assert_eq!(a.components[0].gens.len(), 2);
        assert_eq!(a.components[0].rels.len(), 1);

        let b = f.ring("B").unwrap();
        assert_eq!(b.components[0].gens.len(), 3);
        let e = &b.components[0].gens[2];
        assert_eq!((e.n, e.d), (-1, 2));
        assert_eq!(b.components[0].diffs[2], Some((1, vec![2, 0, 0])));

        let t = f.ring("T").unwrap();
        assert_eq!(t.components[0].gens.len(), 3);
        let m = &t.components[0].gens[2];
        assert_eq!((m.n, m.d), (-1, 0));
        // m^2 = 0 is automatic (odd), y*m carried over as a monomial relation
        assert!(t.components[0].rels.iter().any(|r| r == &vec![0, 1, 1]));
    }

    #[test]
    fn kt_presentation() {
        let src = "ring kt { component { gen t (-2,1); } }";
        let f = parse(src).unwrap();
        let kt = f.ring("kt").unwrap();
        assert_eq!(kt.components[0].gens[0].n, -2);
        assert!(kt.components[0].has_zero_differential());
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let src = "
            ring A { component { gen x (0,1); gen y (0,2); } }
            module M over A { gen m (0,0); rel x*m + m; }
        ";
        assert!(matches!(parse(src), Err(Error::Presentation(_))));
    }

    #[test]
    fn positive_cohomological_degree_rejected() {
        let src = "ring A { component { gen x (1,1); } }";
        assert!(parse(src).is_err());
    }

    #[test]
    fn differential_bidegree_checked() {
        // delta(e) must have bidegree (n+1, d) = (0, 2); x has (0,1)
        let src = "dgring B { component { gen x (0,1); gen e (-1,2); diff e = x; } }";
        assert!(parse(src).is_err());
        let ok = "dgring B { component { gen x (0,1); gen e (-1,2); diff e = x^2; } }";
        assert!(parse(ok).is_ok());
    }

    #[test]
    fn empty_koszul_is_identity_on_generators() {
        let src = "ring A { component { gen x (0,1); gen y (0,1); rel x*y; } }";
        let f = parse(src).unwrap();
        let a = f.ring("A").unwrap();
        let k = koszul("K", a, &[]).unwrap();
        assert_eq!(k.components[0].gens, a.components[0].gens);
        assert_eq!(k.components[0].rels, a.components[0].rels);
    }

    #[test]
    fn h0_of_koszul_is_quotient() {
        let f = parse(BASIC).unwrap();
        let b = f.ring("B").unwrap();
        let h0 = b.h0_presentation();
        assert_eq!(h0.components[0].gens.len(), 2);
        // relations: x*y and x^2
        let mut rels = h0.components[0].rels.clone();
        rels.sort();
        assert_eq!(rels, vec![vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn roundtrip_print_parse() {
        let f = parse(BASIC).unwrap();
        for r in &f.rings {
            let text = print_ring(r);
            let f2 = parse_roundtrip_env(&f, &text);
            assert_eq!(f2.ring(&r.name).unwrap(), r, "ring {} did not round-trip", r.name);
        }
        for m in &f.modules {
            let ring = f.ring(&m.over).unwrap();
            let text = format!("{}{}", print_ring(ring), print_module(ring, m));
            let f2 = parse(&text).unwrap();
            assert_eq!(f2.module(&m.name).unwrap(), m);
        }
    }

    fn parse_roundtrip_env(_f: &SourceFile, text: &str) -> SourceFile {
        parse(text).unwrap()
    }

    #[test]
    fn product_ring_and_component_tags() {
        let src = "
            ring R { component { gen t (0,1); } component { gen s (0,1); } }
            module M over R { gen m (0,0); }
            module N over R { gen n (0,0) @1; }
        ";
        let f = parse(src).unwrap();
        assert_eq!(f.ring("R").unwrap().components.len(), 2);
        assert_eq!(f.module("N").unwrap().gens[0].component, 1);
    }

    #[test]
    fn shift_presentation_twists_signs() {
        let src = "
            dgring B { component { gen x (0,1); gen e (-1,2); diff e = x^2; } }
            module M over B { gen u (0,0); gen v (-1,2); diff v = x^2*u; }
            module M1 = shift(M, 1)
        ";
        let f = parse(src).unwrap();
        let m1 = f.module("M1").unwrap();
        assert_eq!(m1.gens[0].n, -1);
        assert_eq!(m1.gens[1].n, -2);
        // diff picks up (-1)^k on the differential and the monomial is even
        assert_eq!(m1.diffs[1][0].coeff, -1);
    }
}
