//! Data packs: a line-oriented text format carrying group presentations,
//! first-order calculi, bundle wiring, and connection data. Built-in packs
//! mirror the constructors exactly; the loaders cross-check declared rows
//! against derived ones instead of trusting the file.
//!
//! Grammar, per line: `key = payload`, sections `[group]`, `[calculus]`,
//! `[bundle.homogeneous]`, `[bundle.trivial]`, `[connection]`, comments `#`.
//! Elements are sums `term + term + ...`; a term is `scalar`, `word`, or
//! `scalar*word` (the split is at the last `*`); words join generator names
//! with `.`; tensor terms pair words with `|`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::focalc::{CalculusSpec, InvForm1};
use crate::hopf::{GenDef, HopfElem, Presentation, RewriteRule, Word, T2};
use crate::scalar::{parse_scalar, render_scalar, Scalar};

#[derive(Debug, Error)]
pub enum PackError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("section [{0}] missing")]
    MissingSection(String),
    #[error("key `{0}` missing in [{1}]")]
    MissingKey(String, String),
    #[error("{0}")]
    Bad(String),
}

/// raw parse: ordered (key, payload) pairs per section
#[derive(Debug, Default, Clone)]
pub struct Pack {
    pub sections: BTreeMap<String, Vec<(String, String)>>,
}

impl Pack {
    pub fn parse(text: &str) -> Result<Pack, PackError> {
        let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut current = String::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            if current.is_empty() {
                return Err(PackError::Line(ln + 1, "data before any section".into()));
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PackError::Line(ln + 1, "expected key = value".into()))?;
            sections
                .get_mut(&current)
                .unwrap()
                .push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Pack { sections })
    }

    pub fn section(&self, name: &str) -> Option<&[(String, String)]> {
        self.sections.get(name).map(|v| v.as_slice())
    }

    fn need(&self, name: &str) -> Result<&[(String, String)], PackError> {
        self.section(name)
            .ok_or_else(|| PackError::MissingSection(name.into()))
    }
}

fn get1<'a>(rows: &'a [(String, String)], key: &str, sect: &str) -> Result<&'a str, PackError> {
    rows.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| PackError::MissingKey(key.into(), sect.into()))
}

fn get_all<'a>(rows: &'a [(String, String)], key: &str) -> Vec<&'a str> {
    rows.iter()
        .filter(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .collect()
}

// ---------------------------------------------------------------------------
// element grammar

fn parse_word(txt: &str, names: &[String]) -> Option<Vec<usize>> {
    if txt == "1" {
        return Some(vec![]);
    }
    let mut out = Vec::new();
    for piece in txt.split('.') {
        out.push(names.iter().position(|n| n == piece)?);
    }
    Some(out)
}

/// split a term into (scalar text, word text); either side may be empty
fn split_term<'a>(term: &'a str, names: &[String]) -> (Option<&'a str>, Option<&'a str>) {
    if parse_word(term, names).is_some() {
        return (None, Some(term));
    }
    if let Some((l, r)) = term.rsplit_once('*') {
        if parse_word(r, names).is_some() {
            return (Some(l), Some(r));
        }
    }
    (Some(term), None)
}

pub fn parse_elem(txt: &str, names: &[String]) -> Result<Vec<(Vec<usize>, Scalar)>, PackError> {
    let mut out = Vec::new();
    if txt.trim() == "0" {
        return Ok(out);
    }
    for term in txt.split(" + ") {
        let term = term.trim();
        let (s, w) = split_term(term, names);
        let c = match s {
            Some(s) => parse_scalar(s).map_err(|e| PackError::Bad(format!("{term}: {e}")))?,
            None => Scalar::one(),
        };
        let word = match w {
            Some(w) => parse_word(w, names).unwrap(),
            None => vec![],
        };
        out.push((word, c));
    }
    Ok(out)
}

fn elem_to_hopf(parts: Vec<(Vec<usize>, Scalar)>) -> HopfElem {
    let mut e = HopfElem::zero();
    for (w, c) in parts {
        e.add_term(w.into_iter().map(|i| i as u8).collect(), c);
    }
    e
}

fn parse_hopf(txt: &str, p: &Presentation) -> Result<HopfElem, PackError> {
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    Ok(elem_to_hopf(parse_elem(txt, &names)?))
}

pub fn parse_inv1(txt: &str, basis: &[String]) -> Result<InvForm1, PackError> {
    let parts = parse_elem(txt, basis)?;
    let mut v = InvForm1::zero(basis.len());
    for (w, c) in parts {
        match w.len() {
            0 => {
                if !c.is_zero() {
                    return Err(PackError::Bad(format!("{txt}: scalar term in a frame row")));
                }
            }
            1 => v.0[w[0]] = v.0[w[0]].add(&c),
            _ => return Err(PackError::Bad(format!("{txt}: frame rows are degree 1"))),
        }
    }
    Ok(v)
}

fn parse_t2(txt: &str, p: &Presentation) -> Result<T2, PackError> {
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    let mut t = T2::zero();
    if txt.trim() == "0" {
        return Ok(t);
    }
    for term in txt.split(" + ") {
        let term = term.trim();
        let (l, r) = term
            .split_once('|')
            .ok_or_else(|| PackError::Bad(format!("{term}: tensor term needs |")))?;
        let (s, w1) = split_term(l, &names);
        let c = match s {
            Some(s) => parse_scalar(s).map_err(|e| PackError::Bad(format!("{term}: {e}")))?,
            None => Scalar::one(),
        };
        let w1 = w1
            .and_then(|w| parse_word(w, &names))
            .ok_or_else(|| PackError::Bad(format!("{term}: bad left word")))?;
        let w2 = parse_word(r, &names)
            .ok_or_else(|| PackError::Bad(format!("{term}: bad right word")))?;
        t.add_term(
            w1.into_iter().map(|i| i as u8).collect(),
            w2.into_iter().map(|i| i as u8).collect(),
            c,
        );
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// rendering (round-trips through the parser)

fn render_coeff(c: &Scalar) -> String {
    let s = render_scalar(c);
    if s[1..].contains(['+', '-']) {
        format!("({s})")
    } else {
        s
    }
}

fn render_word_pack(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter()
            .map(|&i| names[i as usize].clone())
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub fn render_hopf_pack(e: &HopfElem, p: &Presentation) -> String {
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    if e.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (w, c) in e.terms() {
        let ws = render_word_pack(w, &names);
        if w.is_empty() {
            parts.push(render_coeff(c));
        } else if c.sub(&Scalar::one()).is_zero() {
            parts.push(ws);
        } else {
            parts.push(format!("{}*{}", render_coeff(c), ws));
        }
    }
    parts.join(" + ")
}

pub fn render_inv1_pack(v: &InvForm1, basis: &[String]) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in v.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if c.sub(&Scalar::one()).is_zero() {
            parts.push(basis[i].clone());
        } else {
            parts.push(format!("{}*{}", render_coeff(c), basis[i]));
        }
    }
    parts.join(" + ")
}

fn render_t2_pack(t: &T2, p: &Presentation) -> String {
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    if t.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for ((a, b), c) in t.0.iter() {
        let body = format!(
            "{}|{}",
            render_word_pack(a, &names),
            render_word_pack(b, &names)
        );
        if c.sub(&Scalar::one()).is_zero() {
            parts.push(body);
        } else {
            parts.push(format!("{}*{}", render_coeff(c), body));
        }
    }
    parts.join(" + ")
}

// ---------------------------------------------------------------------------
// group section

pub fn group_from_pack(pack: &Pack) -> Result<Presentation, PackError> {
    let rows = pack.need("group")?;
    let name = get1(rows, "name", "group")?;
    let gen_names: Vec<String> = get1(rows, "gens", "group")?
        .split_whitespace()
        .map(|s| s.to_string())
        .collect();
    let mut star: Vec<u8> = (0..gen_names.len() as u8).collect();
    for pair in get1(rows, "star", "group")?.split_whitespace() {
        let (a, b) = pair
            .split_once(':')
            .ok_or_else(|| PackError::Bad(format!("star pair {pair}")))?;
        let ia = gen_names.iter().position(|n| n == a);
        let ib = gen_names.iter().position(|n| n == b);
        let (ia, ib) = match (ia, ib) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(PackError::Bad(format!("star pair {pair}: unknown name"))),
        };
        star[ia] = ib as u8;
        star[ib] = ia as u8;
    }
    let gens: Vec<GenDef> = gen_names
        .iter()
        .enumerate()
        .map(|(i, n)| GenDef {
            name: n.clone(),
            star: star[i],
        })
        .collect();
    let tmp = Presentation {
        name: name.into(),
        gens: gens.clone(),
        rules: vec![],
        cop: vec![],
        cou: vec![],
        ant: vec![],
        budget: 0,
    };
    let mut rules = Vec::new();
    for r in get_all(rows, "rule") {
        let (lhs, rhs) = r
            .split_once("->")
            .ok_or_else(|| PackError::Bad(format!("rule {r}")))?;
        let lhs_w = parse_word(lhs.trim(), &gen_names)
            .ok_or_else(|| PackError::Bad(format!("rule lhs {lhs}")))?;
        rules.push(RewriteRule {
            lhs: lhs_w.into_iter().map(|i| i as u8).collect(),
            rhs: parse_hopf(rhs.trim(), &tmp)?,
        });
    }
    let mut cop = vec![T2::zero(); gens.len()];
    let mut cou = vec![Scalar::zero(); gens.len()];
    let mut ant = vec![HopfElem::zero(); gens.len()];
    let idx = |n: &str| {
        gen_names
            .iter()
            .position(|g| g == n)
            .ok_or_else(|| PackError::Bad(format!("unknown generator {n}")))
    };
    for r in get_all(rows, "cop") {
        let (g, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        cop[idx(g.trim())?] = parse_t2(e.trim(), &tmp)?;
    }
    for r in get_all(rows, "cou") {
        let (g, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        cou[idx(g.trim())?] = parse_scalar(e.trim()).map_err(|e| PackError::Bad(e.to_string()))?;
    }
    for r in get_all(rows, "ant") {
        let (g, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        ant[idx(g.trim())?] = parse_hopf(e.trim(), &tmp)?;
    }
    let budget: u64 = get1(rows, "budget", "group")
        .unwrap_or("2000000")
        .parse()
        .map_err(|_| PackError::Bad("budget must be an integer".into()))?;
    Ok(Presentation {
        name: name.into(),
        gens,
        rules,
        cop,
        cou,
        ant,
        budget,
    })
}

pub fn render_group_pack(p: &Presentation) -> String {
    let mut out = String::from("[group]\n");
    out.push_str(&format!("name = {}\n", p.name));
    out.push_str(&format!(
        "gens = {}\n",
        p.gens
            .iter()
            .map(|g| g.name.clone())
            .collect::<Vec<_>>()
            .join(" ")
    ));
    let mut pairs = Vec::new();
    for (i, g) in p.gens.iter().enumerate() {
        if g.star as usize >= i {
            pairs.push(format!("{}:{}", g.name, p.gens[g.star as usize].name));
        }
    }
    out.push_str(&format!("star = {}\n", pairs.join(" ")));
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    for r in &p.rules {
        out.push_str(&format!(
            "rule = {} -> {}\n",
            render_word_pack(&r.lhs, &names),
            render_hopf_pack(&r.rhs, p)
        ));
    }
    for (i, g) in p.gens.iter().enumerate() {
        out.push_str(&format!("cop = {} -> {}\n", g.name, render_t2_pack(&p.cop[i], p)));
    }
    for (i, g) in p.gens.iter().enumerate() {
        out.push_str(&format!("cou = {} -> {}\n", g.name, render_scalar(&p.cou[i])));
    }
    for (i, g) in p.gens.iter().enumerate() {
        out.push_str(&format!("ant = {} -> {}\n", g.name, render_hopf_pack(&p.ant[i], p)));
    }
    out.push_str(&format!("budget = {}\n", p.budget));
    out
}

// ---------------------------------------------------------------------------
// calculus section

pub fn calculus_from_pack(pack: &Pack, group: Arc<Presentation>) -> Result<CalculusSpec, PackError> {
    let rows = pack.need("calculus")?;
    let name = get1(rows, "name", "calculus")?;
    let gname = get1(rows, "group", "calculus")?;
    if gname != group.name {
        return Err(PackError::Bad(format!(
            "calculus wants group {gname}, got {}",
            group.name
        )));
    }
    let basis: Vec<String> = get1(rows, "basis", "calculus")?
        .split_whitespace()
        .map(|s| s.to_string())
        .collect();
    let bicovariant = get1(rows, "bicovariant", "calculus")? == "true";
    let n = basis.len();
    let mut pi_gen = vec![InvForm1::zero(n); group.gens.len()];
    for r in get_all(rows, "pi") {
        let (g, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        let gi = group
            .gen_index(g.trim())
            .ok_or_else(|| PackError::Bad(format!("unknown generator {g}")))?;
        pi_gen[gi as usize] = parse_inv1(e.trim(), &basis)?;
    }
    let mut circ_gen = vec![vec![InvForm1::zero(n); group.gens.len()]; n];
    for r in get_all(rows, "circ") {
        let (lhs, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        let (b, g) = lhs
            .trim()
            .split_once('.')
            .ok_or_else(|| PackError::Bad(format!("circ key {lhs}")))?;
        let bi = basis
            .iter()
            .position(|x| x == b)
            .ok_or_else(|| PackError::Bad(format!("unknown basis {b}")))?;
        let gi = group
            .gen_index(g)
            .ok_or_else(|| PackError::Bad(format!("unknown generator {g}")))?;
        circ_gen[bi][gi as usize] = parse_inv1(e.trim(), &basis)?;
    }
    let mut star_tab = vec![InvForm1::zero(n); n];
    for r in get_all(rows, "star") {
        let (b, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        let bi = basis
            .iter()
            .position(|x| x == b.trim())
            .ok_or_else(|| PackError::Bad(format!("unknown basis {b}")))?;
        star_tab[bi] = parse_inv1(e.trim(), &basis)?;
    }
    let mut preimage = vec![HopfElem::zero(); n];
    for r in get_all(rows, "preimage") {
        let (b, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        let bi = basis
            .iter()
            .position(|x| x == b.trim())
            .ok_or_else(|| PackError::Bad(format!("unknown basis {b}")))?;
        preimage[bi] = parse_hopf(e.trim(), &group)?;
    }
    let mut ideal = Vec::new();
    for r in get_all(rows, "ideal") {
        ideal.push(parse_hopf(r, &group)?);
    }
    Ok(CalculusSpec::new(
        name, group, basis, bicovariant, pi_gen, circ_gen, star_tab, preimage, ideal,
    ))
}

pub fn render_calculus_pack(c: &CalculusSpec) -> String {
    let mut out = String::from("[calculus]\n");
    out.push_str(&format!("name = {}\n", c.name));
    out.push_str(&format!("group = {}\n", c.group.name));
    out.push_str(&format!("basis = {}\n", c.basis.join(" ")));
    out.push_str(&format!("bicovariant = {}\n", c.bicovariant));
    for (i, g) in c.group.gens.iter().enumerate() {
        out.push_str(&format!(
            "pi = {} -> {}\n",
            g.name,
            render_inv1_pack(&c.pi_gen[i], &c.basis)
        ));
    }
    for (b, per) in c.circ_gen.iter().enumerate() {
        for (g, v) in per.iter().enumerate() {
            out.push_str(&format!(
                "circ = {}.{} -> {}\n",
                c.basis[b],
                c.group.gens[g].name,
                render_inv1_pack(v, &c.basis)
            ));
        }
    }
    for (b, v) in c.star_tab.iter().enumerate() {
        out.push_str(&format!(
            "star = {} -> {}\n",
            c.basis[b],
            render_inv1_pack(v, &c.basis)
        ));
    }
    for (b, e) in c.preimage.iter().enumerate() {
        out.push_str(&format!(
            "preimage = {} -> {}\n",
            c.basis[b],
            render_hopf_pack(e, &c.group)
        ));
    }
    for e in &c.ideal {
        out.push_str(&format!("ideal = {}\n", render_hopf_pack(e, &c.group)));
    }
    out
}

// ---------------------------------------------------------------------------
// bundle and connection sections

#[derive(Debug, Clone)]
pub struct BundlePackSpec {
    pub kind: String,
    /// total group id (homogeneous) or base id (trivial)
    pub space: String,
    pub calculus: String,
    pub mode: String,
    pub cap: usize,
    /// declared splitting rows, cross-checked against the derived ones
    pub rho: Vec<(String, String)>,
    pub lperp: Vec<String>,
}

pub fn bundle_from_pack(pack: &Pack) -> Result<BundlePackSpec, PackError> {
    let (sect, rows) = if let Some(rows) = pack.section("bundle.homogeneous") {
        ("homogeneous", rows)
    } else if let Some(rows) = pack.section("bundle.trivial") {
        ("trivial", rows)
    } else {
        return Err(PackError::MissingSection("bundle.*".into()));
    };
    let space = if sect == "homogeneous" {
        get1(rows, "total", "bundle.homogeneous")?
    } else {
        get1(rows, "base", "bundle.trivial")?
    };
    let calculus = get1(rows, "calculus", sect)?;
    let mode = get1(rows, "mode", sect).unwrap_or("envelope");
    let cap: usize = get1(rows, "cap", sect)
        .unwrap_or("3")
        .parse()
        .map_err(|_| PackError::Bad("cap must be an integer".into()))?;
    let mut rho = Vec::new();
    for r in get_all(rows, "rho") {
        let (b, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        rho.push((b.trim().to_string(), e.trim().to_string()));
    }
    let lperp = get_all(rows, "lperp")
        .into_iter()
        .map(|s| s.to_string())
        .collect();
    Ok(BundlePackSpec {
        kind: sect.into(),
        space: space.into(),
        calculus: calculus.into(),
        mode: mode.into(),
        cap,
        rho,
        lperp,
    })
}

#[derive(Debug, Clone)]
pub struct ConnPackSpec {
    pub name: String,
    /// frame rows ϑ -> section (homogeneous), scalar coefficients may use t
    pub section: Vec<(String, String)>,
    /// frame rows ϑ -> base 1-form (trivial)
    pub potential: Vec<(String, String)>,
}

pub fn connection_from_pack(pack: &Pack) -> Result<Option<ConnPackSpec>, PackError> {
    let Some(rows) = pack.section("connection") else {
        return Ok(None);
    };
    let name = get1(rows, "name", "connection").unwrap_or("canonical");
    let mut section = Vec::new();
    for r in get_all(rows, "section") {
        let (b, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        section.push((b.trim().to_string(), e.trim().to_string()));
    }
    let mut potential = Vec::new();
    for r in get_all(rows, "potential") {
        let (b, e) = r.split_once("->").ok_or_else(|| PackError::Bad(r.into()))?;
        potential.push((b.trim().to_string(), e.trim().to_string()));
    }
    Ok(Some(ConnPackSpec {
        name: name.into(),
        section,
        potential,
    }))
}

// ---------------------------------------------------------------------------
// built-in pack ids

pub fn builtin_group(id: &str) -> Option<Presentation> {
    match id {
        "suq2" => Some(crate::hopf::suq2()),
        "u1" => Some(crate::hopf::u1()),
        _ => None,
    }
}

pub fn builtin_calculus(id: &str, lambda: Option<&Scalar>) -> Option<CalculusSpec> {
    crate::focalc::by_name(id, lambda).ok()
}

/// scenario packs: small files naming built-in group/calculus ids
pub fn builtin_scenario_pack(id: &str) -> Option<&'static str> {
    match id {
        "hopf-3d" => Some(
            "[bundle.homogeneous]\n\
             total = suq2\n\
             calculus = 3d\n\
             mode = envelope\n\
             cap = 3\n\
             rho = eta -> zeta\n\
             rho = ep -> 0\n\
             rho = em -> 0\n\
             lperp = ep\n\
             lperp = em\n\
             [connection]\n\
             name = canonical\n\
             section = zeta -> eta\n",
        ),
        "hopf-4dplus" => Some(
            "[bundle.homogeneous]\n\
             total = suq2\n\
             calculus = 4d+\n\
             mode = exterior\n\
             cap = 3\n\
             rho = tau -> (-(1-mu^3)/(1+mu))*zeta\n\
             rho = ep -> 0\n\
             rho = eta -> zeta\n\
             rho = em -> 0\n\
             lperp = ep\n\
             lperp = em\n\
             lperp = tau + ((1-mu^3)/(1+mu))*eta\n\
             [connection]\n\
             name = family\n\
             section = zeta -> t*tau + (1+t*(1-mu^3)/(1+mu))*eta\n",
        ),
        "hopf-classical" => Some(
            "[bundle.homogeneous]\n\
             total = suq2\n\
             calculus = u1-classical\n\
             mode = envelope\n\
             cap = 3\n\
             [connection]\n\
             name = canonical\n\
             section = zeta -> zeta\n",
        ),
        "line-bundle" => Some(
            "[bundle.trivial]\n\
             base = point\n\
             calculus = u1-line\n\
             mode = envelope\n\
             cap = 3\n\
             [connection]\n\
             name = canonical\n\
             section = zeta -> zeta\n",
        ),
        "trivial-default" => Some(
            "[bundle.trivial]\n\
             base = flat2\n\
             calculus = u1-classical\n\
             mode = envelope\n\
             cap = 3\n\
             [connection]\n\
             name = canonical\n",
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focalc::{calc_3d, calc_4dplus, u1_classical, u1_from_3d, u1_from_4dplus, u1_line};
    use crate::hopf::{suq2, u1};

    fn roundtrip_group(p: &Presentation) {
        let text = render_group_pack(p);
        let pack = Pack::parse(&text).unwrap();
        let q = group_from_pack(&pack).unwrap();
        assert_eq!(q.name, p.name);
        assert_eq!(q.gens.len(), p.gens.len());
        for (a, b) in q.gens.iter().zip(&p.gens) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.star, b.star);
        }
        assert_eq!(q.rules.len(), p.rules.len());
        for (a, b) in q.rules.iter().zip(&p.rules) {
            assert_eq!(a.lhs, b.lhs);
            assert_eq!(a.rhs, b.rhs);
        }
        assert_eq!(q.cop, p.cop);
        assert_eq!(q.cou, p.cou);
        assert_eq!(q.ant, p.ant);
        q.check_axioms(2).unwrap();
    }

    fn roundtrip_calc(c: &CalculusSpec, group: Arc<Presentation>) {
        let text = render_calculus_pack(c);
        let pack = Pack::parse(&text).unwrap();
        let q = calculus_from_pack(&pack, group).unwrap();
        assert_eq!(q.name, c.name);
        assert_eq!(q.basis, c.basis);
        assert_eq!(q.bicovariant, c.bicovariant);
        assert_eq!(q.pi_gen, c.pi_gen);
        assert_eq!(q.circ_gen, c.circ_gen);
        assert_eq!(q.star_tab, c.star_tab);
        assert_eq!(q.preimage, c.preimage);
        assert_eq!(q.ideal, c.ideal);
    }

    #[test]
    fn groups_roundtrip() {
        roundtrip_group(&suq2());
        roundtrip_group(&u1());
    }

    #[test]
    fn calculi_roundtrip() {
        let su = Arc::new(suq2());
        let un = Arc::new(u1());
        roundtrip_calc(&calc_3d(), su.clone());
        roundtrip_calc(&calc_4dplus(), su);
        roundtrip_calc(&u1_from_3d(), un.clone());
        roundtrip_calc(&u1_from_4dplus(), un.clone());
        roundtrip_calc(&u1_classical(), un.clone());
        roundtrip_calc(&u1_line(&Scalar::lambda()).unwrap(), un);
    }

    #[test]
    fn scenario_packs_parse() {
        for id in [
            "hopf-3d",
            "hopf-4dplus",
            "hopf-classical",
            "line-bundle",
            "trivial-default",
        ] {
            let pack = Pack::parse(builtin_scenario_pack(id).unwrap()).unwrap();
            let b = bundle_from_pack(&pack).unwrap();
            assert!(!b.calculus.is_empty());
            connection_from_pack(&pack).unwrap();
        }
    }
}
