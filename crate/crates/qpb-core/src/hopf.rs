//! Hopf *-algebras presented by generators and confluent rewrite rules.
//!
//! Elements are linear combinations of normal words. Structure maps are given
//! on generators and extended (anti)multiplicatively; well-definedness against
//! the rewrite rules is part of validation, as are the Hopf and *-axioms on a
//! degree-capped basis.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Word = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HopfError {
    #[error("rewrite budget exhausted (non-terminating rule set?)")]
    Budget,
    #[error("rewrite system not confluent: ambiguity `{witness}` resolves two ways")]
    NotConfluent { witness: String },
    #[error("axiom failure: {0}")]
    Axiom(String),
}

// ---------------------------------------------------------------------------
// Elements

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HopfElem(pub BTreeMap<Word, Scalar>);

impl HopfElem {
    pub fn zero() -> Self {
        HopfElem(BTreeMap::new())
    }
    pub fn one() -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![], Scalar::one());
        HopfElem(m)
    }
    pub fn gen(i: u8) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![i], Scalar::one());
        HopfElem(m)
    }
    pub fn word(w: Word) -> Self {
        let mut m = BTreeMap::new();
        m.insert(w, Scalar::one());
        HopfElem(m)
    }
    pub fn term(w: Word, c: Scalar) -> Self {
        let mut e = HopfElem::zero();
        e.add_term(w, c);
        e
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in o.0.iter() {
            r.add_term(w.clone(), c.clone());
        }
        r
    }
    pub fn neg(&self) -> Self {
        HopfElem(self.0.iter().map(|(w, c)| (w.clone(), c.neg())).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return HopfElem::zero();
        }
        HopfElem(self.0.iter().map(|(w, k)| (w.clone(), k.mul(c))).collect())
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.0.iter()
    }
}

// Tensor-square and -cube with componentwise word keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct T2(pub BTreeMap<(Word, Word), Scalar>);
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct T3(pub BTreeMap<(Word, Word, Word), Scalar>);

impl T2 {
    pub fn zero() -> Self {
        T2(BTreeMap::new())
    }
    pub fn term(a: Word, b: Word, c: Scalar) -> Self {
        let mut t = T2::zero();
        t.add_term(a, b, c);
        t
    }
    pub fn add_term(&mut self, a: Word, b: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry((a, b)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((a, b), c) in o.0.iter() {
            r.add_term(a.clone(), b.clone(), c.clone());
        }
        r
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl T3 {
    pub fn zero() -> Self {
        T3(BTreeMap::new())
    }
    pub fn add_term(&mut self, a: Word, b: Word, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry((a, b, w)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Presentations

#[derive(Debug, Clone)]
pub struct GenDef {
    pub name: String,
    /// index of the generator equal to this one's star
    pub star: u8,
}

#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: HopfElem,
}

#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    pub gens: Vec<GenDef>,
    pub rules: Vec<RewriteRule>,
    /// coproduct of each generator
    pub cop: Vec<T2>,
    /// counit of each generator
    pub cou: Vec<Scalar>,
    /// antipode of each generator
    pub ant: Vec<HopfElem>,
    /// rewrite step budget per normalization call
    pub budget: u64,
}

impl Presentation {
    pub fn gen_index(&self, name: &str) -> Option<u8> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as u8)
    }

    fn find_redex(&self, w: &Word) -> Option<(usize, usize)> {
        // leftmost position, then first rule in declaration order
        for pos in 0..w.len() {
            for (ri, r) in self.rules.iter().enumerate() {
                let l = r.lhs.len();
                if pos + l <= w.len() && w[pos..pos + l] == r.lhs[..] {
                    return Some((pos, ri));
                }
            }
        }
        None
    }

    pub fn try_normalize(
        &self,
        terms: Vec<(Word, Scalar)>,
        budget: u64,
    ) -> Result<HopfElem, HopfError> {
        let mut out = HopfElem::zero();
        let mut work = terms;
        let mut steps = 0u64;
        while let Some((w, c)) = work.pop() {
            if c.is_zero() {
                continue;
            }
            match self.find_redex(&w) {
                None => out.add_term(w, c),
                Some((pos, ri)) => {
                    steps += 1;
                    if steps > budget {
                        return Err(HopfError::Budget);
                    }
                    let r = &self.rules[ri];
                    let tail = &w[pos + r.lhs.len()..];
                    for (rw, rc) in r.rhs.terms() {
                        let mut nw = Vec::with_capacity(pos + rw.len() + tail.len());
                        nw.extend_from_slice(&w[..pos]);
                        nw.extend_from_slice(rw);
                        nw.extend_from_slice(tail);
                        work.push((nw, c.mul(rc)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn normalize(&self, terms: Vec<(Word, Scalar)>) -> HopfElem {
        self.try_normalize(terms, self.budget)
            .expect("rewrite budget exhausted on a validated presentation")
    }

    pub fn is_normal(&self, w: &Word) -> bool {
        self.find_redex(w).is_none()
    }

    pub fn mul(&self, a: &HopfElem, b: &HopfElem) -> HopfElem {
        let mut terms = vec![];
        for (w1, c1) in a.terms() {
            for (w2, c2) in b.terms() {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((w, c1.mul(c2)));
            }
        }
        self.normalize(terms)
    }

    pub fn mul3(&self, a: &HopfElem, b: &HopfElem, c: &HopfElem) -> HopfElem {
        self.mul(&self.mul(a, b), c)
    }

    /// counit, extended multiplicatively and linearly
    pub fn counit(&self, a: &HopfElem) -> Scalar {
        let mut acc = Scalar::zero();
        for (w, c) in a.terms() {
            let mut e = Scalar::one();
            for g in w {
                e = e.mul(&self.cou[*g as usize]);
                if e.is_zero() {
                    break;
                }
            }
            acc = acc.add(&c.mul(&e));
        }
        acc
    }

    /// coproduct, extended multiplicatively
    pub fn coproduct(&self, a: &HopfElem) -> T2 {
        let mut acc = T2::zero();
        for (w, c) in a.terms() {
            let t = self.coproduct_word(w);
            for ((x, y), k) in t.0.iter() {
                acc.add_term(x.clone(), y.clone(), k.mul(c));
            }
        }
        acc
    }

    pub fn coproduct_word(&self, w: &Word) -> T2 {
        let mut acc = T2::term(vec![], vec![], Scalar::one());
        for g in w {
            let mut next = T2::zero();
            for ((x, y), c) in acc.0.iter() {
                for ((gx, gy), gc) in self.cop[*g as usize].0.iter() {
                    let mut nx = x.clone();
                    nx.extend_from_slice(gx);
                    let mut ny = y.clone();
                    ny.extend_from_slice(gy);
                    next.add_term(nx, ny, c.mul(gc));
                }
            }
            acc = self.normalize_t2(next);
        }
        acc
    }

    pub fn normalize_t2(&self, t: T2) -> T2 {
        let mut acc = T2::zero();
        for ((x, y), c) in t.0.into_iter() {
            let nx = self.normalize(vec![(x, Scalar::one())]);
            let ny = self.normalize(vec![(y, Scalar::one())]);
            for (wx, cx) in nx.terms() {
                for (wy, cy) in ny.terms() {
                    acc.add_term(wx.clone(), wy.clone(), c.mul(cx).mul(cy));
                }
            }
        }
        acc
    }

    /// (coproduct x id) applied to the coproduct: three Sweedler legs
    pub fn coproduct3(&self, a: &HopfElem) -> T3 {
        let mut acc = T3::zero();
        for ((x, y), c) in self.coproduct(a).0.iter() {
            let tx = self.coproduct_word(x);
            for ((x1, x2), k) in tx.0.iter() {
                acc.add_term(x1.clone(), x2.clone(), y.clone(), c.mul(k));
            }
        }
        acc
    }

    /// antipode, extended antimultiplicatively
    pub fn antipode(&self, a: &HopfElem) -> HopfElem {
        let mut acc = HopfElem::zero();
        for (w, c) in a.terms() {
            let mut e = HopfElem::one();
            for g in w.iter().rev() {
                e = self.mul(&e, &self.ant[*g as usize]);
            }
            acc = acc.add(&e.scale(c));
        }
        acc
    }

    /// *-structure: antilinear antimultiplicative involution
    pub fn star(&self, a: &HopfElem) -> HopfElem {
        let mut terms = vec![];
        for (w, c) in a.terms() {
            let sw: Word = w.iter().rev().map(|g| self.gens[*g as usize].star).collect();
            terms.push((sw, c.conj()));
        }
        self.normalize(terms)
    }

    /// right adjoint coaction ad(a) = a2 (x) k(a1) a3
    pub fn adjoint(&self, a: &HopfElem) -> T2 {
        let mut acc = T2::zero();
        for ((x1, x2, x3), c) in self.coproduct3(a).0.iter() {
            let k = self.antipode(&HopfElem::word(x1.clone()));
            let right = self.mul(&k, &HopfElem::word(x3.clone()));
            for (rw, rc) in right.terms() {
                acc.add_term(x2.clone(), rw.clone(), c.mul(rc));
            }
        }
        acc
    }

    /// normal words of length <= cap, ordered by (length, lex)
    pub fn basis_words(&self, cap: usize) -> Vec<Word> {
        let mut out = vec![vec![]];
        let mut layer: Vec<Word> = vec![vec![]];
        for _ in 0..cap {
            let mut next = vec![];
            for w in &layer {
                for g in 0..self.gens.len() as u8 {
                    let mut nw = w.clone();
                    nw.push(g);
                    // prefix is normal, so any new redex must end at the last letter
                    let redex = self.rules.iter().any(|r| {
                        let l = r.lhs.len();
                        l <= nw.len() && nw[nw.len() - l..] == r.lhs[..]
                    });
                    if !redex {
                        next.push(nw);
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    pub fn render_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = vec![];
        let mut run: Option<(u8, usize)> = None;
        let flush = |parts: &mut Vec<String>, run: Option<(u8, usize)>, gens: &[GenDef]| {
            if let Some((g, n)) = run {
                if n == 1 {
                    parts.push(gens[g as usize].name.clone());
                } else {
                    parts.push(format!("{}^{}", gens[g as usize].name, n));
                }
            }
        };
        for g in w {
            match run {
                Some((pg, n)) if pg == *g => run = Some((pg, n + 1)),
                other => {
                    flush(&mut parts, other, &self.gens);
                    run = Some((*g, 1));
                }
            }
        }
        flush(&mut parts, run, &self.gens);
        parts.join("*")
    }

    pub fn render_elem(&self, a: &HopfElem) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let mut first = true;
        for (w, c) in a.terms() {
            let ws = self.render_word(w);
            let piece = if w.is_empty() {
                let cs = crate::scalar::render_scalar(c);
                if cs.contains(['+', '-']) && !cs.starts_with('-') {
                    cs
                } else if cs.starts_with('-') && cs[1..].contains(['+', '-']) {
                    format!("-({})", &cs[1..])
                } else {
                    cs
                }
            } else if c.is_one() {
                ws
            } else if c.neg().is_one() {
                format!("-{}", ws)
            } else {
                let cs = crate::scalar::render_scalar(c);
                if cs.contains(['+', '-']) && !(cs.starts_with('-') && !cs[1..].contains(['+', '-'])) {
                    format!("({})*{}", cs, ws)
                } else {
                    format!("{}*{}", cs, ws)
                }
            };
            if !first && !piece.starts_with('-') {
                out.push('+');
            }
            out.push_str(&piece);
            first = false;
        }
        out
    }

    // -- validation ---------------------------------------------------------

    /// Diamond-lemma check: every overlap and inclusion ambiguity resolves.
    pub fn check_confluence(&self) -> Result<(), HopfError> {
        let reduce = |terms: Vec<(Word, Scalar)>| self.try_normalize(terms, self.budget);
        let apply_at = |w: &Word, pos: usize, ri: usize| -> Vec<(Word, Scalar)> {
            let r = &self.rules[ri];
            let tail = &w[pos + r.lhs.len()..];
            r.rhs
                .terms()
                .map(|(rw, rc)| {
                    let mut nw = Vec::with_capacity(w.len());
                    nw.extend_from_slice(&w[..pos]);
                    nw.extend_from_slice(rw);
                    nw.extend_from_slice(tail);
                    (nw, rc.clone())
                })
                .collect()
        };
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                // overlaps: a proper suffix of r1.lhs equals a proper prefix of r2.lhs
                let max_s = r1.lhs.len().min(r2.lhs.len());
                for s in 1..max_s {
                    if r1.lhs[r1.lhs.len() - s..] == r2.lhs[..s] {
                        let mut w = r1.lhs.clone();
                        w.extend_from_slice(&r2.lhs[s..]);
                        let a = reduce(apply_at(&w, 0, i))?;
                        let b = reduce(apply_at(&w, r1.lhs.len() - s, j))?;
                        if a != b {
                            return Err(HopfError::NotConfluent { witness: self.render_word(&w) });
                        }
                    }
                }
                // inclusions: r1.lhs occurs inside r2.lhs
                if i != j && r1.lhs.len() < r2.lhs.len() {
                    for pos in 0..=r2.lhs.len() - r1.lhs.len() {
                        if r2.lhs[pos..pos + r1.lhs.len()] == r1.lhs[..] {
                            let w = r2.lhs.clone();
                            let a = reduce(apply_at(&w, pos, i))?;
                            let b = reduce(apply_at(&w, 0, j))?;
                            if a != b {
                                return Err(HopfError::NotConfluent {
                                    witness: self.render_word(&w),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Structure maps must agree on both sides of every rewrite rule.
    pub fn check_well_defined(&self) -> Result<(), HopfError> {
        for r in &self.rules {
            let lhs = HopfElem::word(r.lhs.clone());
            let fail = |what: &str| {
                Err(HopfError::Axiom(format!(
                    "{} not well-defined on rule {} -> {}",
                    what,
                    self.render_word(&r.lhs),
                    self.render_elem(&r.rhs)
                )))
            };
            if self.coproduct(&lhs) != self.coproduct(&r.rhs) {
                return fail("coproduct");
            }
            if self.counit(&lhs) != self.counit(&r.rhs) {
                return fail("counit");
            }
            if self.antipode(&lhs) != self.antipode(&r.rhs) {
                return fail("antipode");
            }
            if self.star(&lhs) != self.star(&r.rhs) {
                return fail("star");
            }
        }
        Ok(())
    }

    /// Hopf *-algebra axioms on the basis up to the given word length.
    pub fn check_axioms(&self, cap: usize) -> Result<(), HopfError> {
        self.check_confluence()?;
        self.check_well_defined()?;
        for g in &self.gens {
            let s = &self.gens[g.star as usize];
            if s.star as usize != self.gens.iter().position(|x| x.name == g.name).unwrap() {
                return Err(HopfError::Axiom(format!("star not involutive on generator {}", g.name)));
            }
        }
        for w in self.basis_words(cap) {
            let a = HopfElem::word(w.clone());
            let name = || self.render_word(&w);
            // coassociativity
            let mut l = T3::zero();
            for ((x, y), c) in self.coproduct(&a).0.iter() {
                for ((x1, x2), k) in self.coproduct_word(x).0.iter() {
                    l.add_term(x1.clone(), x2.clone(), y.clone(), c.mul(k));
                }
            }
            let mut r = T3::zero();
            for ((x, y), c) in self.coproduct(&a).0.iter() {
                for ((y1, y2), k) in self.coproduct_word(y).0.iter() {
                    r.add_term(x.clone(), y1.clone(), y2.clone(), c.mul(k));
                }
            }
            if l != r {
                return Err(HopfError::Axiom(format!("coassociativity fails on {}", name())));
            }
            // counit laws
            let mut left = HopfElem::zero();
            let mut right = HopfElem::zero();
            for ((x, y), c) in self.coproduct(&a).0.iter() {
                let ex = self.counit(&HopfElem::word(x.clone()));
                left.add_term(y.clone(), c.mul(&ex));
                let ey = self.counit(&HopfElem::word(y.clone()));
                right.add_term(x.clone(), c.mul(&ey));
            }
            if left != a || right != a {
                return Err(HopfError::Axiom(format!("counit law fails on {}", name())));
            }
            // antipode laws
            let mut m1 = HopfElem::zero();
            let mut m2 = HopfElem::zero();
            for ((x, y), c) in self.coproduct(&a).0.iter() {
                let kx = self.antipode(&HopfElem::word(x.clone()));
                m1 = m1.add(&self.mul(&kx, &HopfElem::word(y.clone())).scale(c));
                let ky = self.antipode(&HopfElem::word(y.clone()));
                m2 = m2.add(&self.mul(&HopfElem::word(x.clone()), &ky).scale(c));
            }
            let target = HopfElem::term(vec![], self.counit(&a));
            if m1 != target || m2 != target {
                return Err(HopfError::Axiom(format!("antipode law fails on {}", name())));
            }
            // star axioms
            let sa = self.star(&a);
            if self.star(&sa) != a {
                return Err(HopfError::Axiom(format!("star not involutive on {}", name())));
            }
            let mut cs = T2::zero();
            for ((x, y), c) in self.coproduct(&a).0.iter() {
                let sx = self.star(&HopfElem::word(x.clone()));
                let sy = self.star(&HopfElem::word(y.clone()));
                for (wx, cx) in sx.terms() {
                    for (wy, cy) in sy.terms() {
                        cs.add_term(wx.clone(), wy.clone(), c.conj().mul(cx).mul(cy));
                    }
                }
            }
            if cs != self.coproduct(&sa) {
                return Err(HopfError::Axiom(format!("coproduct/star compat fails on {}", name())));
            }
            if self.counit(&sa) != self.counit(&a).conj() {
                return Err(HopfError::Axiom(format!("counit/star compat fails on {}", name())));
            }
            // k(k(a*)*) = a
            let kk = self.antipode(&self.star(&self.antipode(&sa)));
            if kk != a {
                return Err(HopfError::Axiom(format!("antipode/star axiom fails on {}", name())));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Hopf algebra morphisms (with a multiplicative linear section for surjections)

#[derive(Debug, Clone)]
pub struct Morphism {
    pub src: Arc<Presentation>,
    pub dst: Arc<Presentation>,
    /// image of each source generator
    pub images: Vec<HopfElem>,
    /// per-target-generator section word in the source (extended multiplicatively)
    pub section: Vec<Word>,
}

impl Morphism {
    pub fn apply(&self, a: &HopfElem) -> HopfElem {
        let mut acc = HopfElem::zero();
        for (w, c) in a.terms() {
            let mut e = HopfElem::one();
            for g in w {
                e = self.dst.mul(&e, &self.images[*g as usize]);
                if e.is_zero() {
                    break;
                }
            }
            acc = acc.add(&e.scale(c));
        }
        acc
    }

    /// linear section on normal words of the target, multiplicative over letters
    pub fn section_word(&self, w: &Word) -> HopfElem {
        let mut terms_word: Word = vec![];
        for g in w {
            terms_word.extend_from_slice(&self.section[*g as usize]);
        }
        self.src.normalize(vec![(terms_word, Scalar::one())])
    }

    pub fn check(&self, cap: usize) -> Result<(), HopfError> {
        // well-defined against source rules
        for r in &self.src.rules {
            let lhs = self.apply(&HopfElem::word(r.lhs.clone()));
            let rhs = self.apply(&r.rhs);
            if lhs != rhs {
                return Err(HopfError::Axiom(format!(
                    "morphism not well-defined on rule {}",
                    self.src.render_word(&r.lhs)
                )));
            }
        }
        for w in self.src.basis_words(cap) {
            let a = HopfElem::word(w.clone());
            let ja = self.apply(&a);
            // intertwines coproduct
            let mut lhs = T2::zero();
            for ((x, y), c) in self.src.coproduct(&a).0.iter() {
                let jx = self.apply(&HopfElem::word(x.clone()));
                let jy = self.apply(&HopfElem::word(y.clone()));
                for (wx, cx) in jx.terms() {
                    for (wy, cy) in jy.terms() {
                        lhs.add_term(wx.clone(), wy.clone(), c.mul(cx).mul(cy));
                    }
                }
            }
            if lhs != self.dst.coproduct(&ja) {
                return Err(HopfError::Axiom(format!(
                    "morphism does not intertwine coproducts on {}",
                    self.src.render_word(&w)
                )));
            }
            if self.src.counit(&a) != self.dst.counit(&ja) {
                return Err(HopfError::Axiom("morphism does not intertwine counits".into()));
            }
            if self.apply(&self.src.antipode(&a)) != self.dst.antipode(&ja) {
                return Err(HopfError::Axiom("morphism does not intertwine antipodes".into()));
            }
            if self.apply(&self.src.star(&a)) != self.dst.star(&ja) {
                return Err(HopfError::Axiom("morphism does not intertwine stars".into()));
            }
        }
        // section really is a section
        for w in self.dst.basis_words(cap) {
            let s = self.section_word(&w);
            if self.apply(&s) != HopfElem::word(w.clone()) {
                return Err(HopfError::Axiom(format!(
                    "section fails on {}",
                    self.dst.render_word(&w)
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Built-in presentations

fn sc(src: &str) -> Scalar {
    crate::scalar::parse_scalar(src).unwrap()
}

/// Quantum SU(2): generators alpha, alpha_st, gamma, gamma_st.
pub fn suq2() -> Presentation {
    let (a, ast, g, gst) = (0u8, 1u8, 2u8, 3u8);
    let gens = vec![
        GenDef { name: "alpha".into(), star: ast },
        GenDef { name: "alpha_st".into(), star: a },
        GenDef { name: "gamma".into(), star: gst },
        GenDef { name: "gamma_st".into(), star: g },
    ];
    let rules = vec![
        RewriteRule { lhs: vec![g, a], rhs: HopfElem::term(vec![a, g], sc("1/mu")) },
        RewriteRule { lhs: vec![gst, a], rhs: HopfElem::term(vec![a, gst], sc("1/mu")) },
        RewriteRule { lhs: vec![g, ast], rhs: HopfElem::term(vec![ast, g], sc("mu")) },
        RewriteRule { lhs: vec![gst, ast], rhs: HopfElem::term(vec![ast, gst], sc("mu")) },
        RewriteRule { lhs: vec![gst, g], rhs: HopfElem::word(vec![g, gst]) },
        RewriteRule {
            lhs: vec![a, ast],
            rhs: {
                let mut e = HopfElem::one();
                e.add_term(vec![g, gst], sc("-mu^2"));
                e
            },
        },
        RewriteRule {
            lhs: vec![ast, a],
            rhs: {
                let mut e = HopfElem::one();
                e.add_term(vec![g, gst], sc("-1"));
                e
            },
        },
    ];
    let cop = vec![
        // alpha -> alpha (x) alpha - mu gamma_st (x) gamma
        {
            let mut t = T2::term(vec![a], vec![a], sc("1"));
            t.add_term(vec![gst], vec![g], sc("-mu"));
            t
        },
        // alpha_st -> alpha_st (x) alpha_st - mu gamma (x) gamma_st
        {
            let mut t = T2::term(vec![ast], vec![ast], sc("1"));
            t.add_term(vec![g], vec![gst], sc("-mu"));
            t
        },
        // gamma -> gamma (x) alpha + alpha_st (x) gamma
        {
            let mut t = T2::term(vec![g], vec![a], sc("1"));
            t.add_term(vec![ast], vec![g], sc("1"));
            t
        },
        // gamma_st -> alpha (x) gamma_st + gamma_st (x) alpha_st
        {
            let mut t = T2::term(vec![a], vec![gst], sc("1"));
            t.add_term(vec![gst], vec![ast], sc("1"));
            t
        },
    ];
    let cou = vec![sc("1"), sc("1"), sc("0"), sc("0")];
    let ant = vec![
        HopfElem::word(vec![ast]),
        HopfElem::word(vec![a]),
        HopfElem::term(vec![g], sc("-mu")),
        HopfElem::term(vec![gst], sc("-1/mu")),
    ];
    Presentation { name: "suq2".into(), gens, rules, cop, cou, ant, budget: 2_000_000 }
}

/// U(1): Laurent polynomials in the unitary grouplike z.
pub fn u1() -> Presentation {
    let (z, zs) = (0u8, 1u8);
    let gens = vec![
        GenDef { name: "z".into(), star: zs },
        GenDef { name: "z_st".into(), star: z },
    ];
    let rules = vec![
        RewriteRule { lhs: vec![z, zs], rhs: HopfElem::one() },
        RewriteRule { lhs: vec![zs, z], rhs: HopfElem::one() },
    ];
    let cop = vec![
        T2::term(vec![z], vec![z], sc("1")),
        T2::term(vec![zs], vec![zs], sc("1")),
    ];
    let cou = vec![sc("1"), sc("1")];
    let ant = vec![HopfElem::word(vec![zs]), HopfElem::word(vec![z])];
    Presentation { name: "u1".into(), gens, rules, cop, cou, ant, budget: 1_000_000 }
}

/// The defining surjection suq2 -> u1 with its multiplicative section.
pub fn j_su_to_u1(src: Arc<Presentation>, dst: Arc<Presentation>) -> Morphism {
    let images = vec![
        HopfElem::word(vec![0]), // alpha -> z
        HopfElem::word(vec![1]), // alpha_st -> z_st
        HopfElem::zero(),        // gamma -> 0
        HopfElem::zero(),        // gamma_st -> 0
    ];
    let section = vec![vec![0], vec![1]]; // z -> alpha, z_st -> alpha_st
    Morphism { src, dst, images, section }
}

/// Identity morphism (self-bundles).
pub fn j_identity(p: Arc<Presentation>) -> Morphism {
    let images = (0..p.gens.len() as u8).map(HopfElem::gen).collect();
    let section = (0..p.gens.len() as u8).map(|g| vec![g]).collect();
    Morphism { src: p.clone(), dst: p, images, section }
}

/// z-power word in u1: k >= 0 gives z^k, k < 0 gives z_st^(-k).
pub fn u1_power(k: i64) -> Word {
    if k >= 0 {
        vec![0; k as usize]
    } else {
        vec![1; (-k) as usize]
    }
}

/// If F(w) = w (x) z^k for the basis word w (with F = (id (x) j) o coproduct),
/// return k. Built-in monomials are homogeneous in this sense.
pub fn f_weight(p: &Presentation, j: &Morphism, w: &Word) -> Option<i64> {
    let t = p.coproduct_word(w);
    let mut acc = T2::zero();
    for ((x, y), c) in t.0.iter() {
        let jy = j.apply(&HopfElem::word(y.clone()));
        for (wy, cy) in jy.terms() {
            acc.add_term(x.clone(), wy.clone(), c.mul(cy));
        }
    }
    if acc.0.len() != 1 {
        return None;
    }
    let ((x, y), c) = acc.0.iter().next().unwrap();
    if x != w || !c.is_one() {
        return None;
    }
    if y.iter().all(|g| *g == 0) {
        Some(y.len() as i64)
    } else if y.iter().all(|g| *g == 1) {
        Some(-(y.len() as i64))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su() -> Presentation {
        suq2()
    }

    #[test]
    fn suq2_normal_form_basis() {
        let p = su();
        // gamma * alpha reduces
        let e = p.mul(&HopfElem::gen(2), &HopfElem::gen(0));
        assert_eq!(e, HopfElem::term(vec![0, 2], sc("1/mu")));
        // PBW shape: alpha^k or alpha_st^k times gamma^m gamma_st^n
        for w in p.basis_words(4) {
            let mut seen_a = false;
            let mut seen_ast = false;
            let mut last = 0u8;
            for g in &w {
                assert!(*g >= last || (*g < 2 && last < 2), "unsorted word {:?}", w);
                if *g == 0 {
                    seen_a = true;
                }
                if *g == 1 {
                    seen_ast = true;
                }
                last = *g;
            }
            assert!(!(seen_a && seen_ast), "alpha and alpha_st coexist in {:?}", w);
        }
    }

    #[test]
    fn suq2_confluent_and_hopf() {
        su().check_axioms(3).unwrap();
    }

    #[test]
    fn u1_confluent_and_hopf() {
        u1().check_axioms(5).unwrap();
    }

    #[test]
    fn unitarity_relations() {
        let p = su();
        // alpha alpha_st + mu^2 gamma gamma_st = 1
        let lhs = p
            .mul(&HopfElem::gen(0), &HopfElem::gen(1))
            .add(&p.mul(&HopfElem::gen(2), &HopfElem::gen(3)).scale(&sc("mu^2")));
        assert_eq!(lhs, HopfElem::one());
        // alpha_st alpha + gamma_st gamma = 1
        let lhs2 = p
            .mul(&HopfElem::gen(1), &HopfElem::gen(0))
            .add(&p.mul(&HopfElem::gen(3), &HopfElem::gen(2)));
        assert_eq!(lhs2, HopfElem::one());
    }

    #[test]
    fn antipode_values() {
        let p = su();
        assert_eq!(p.antipode(&HopfElem::gen(2)), HopfElem::term(vec![2], sc("-mu")));
        // k^2(a) is given by conjugation with the modular structure; spot check k(k(alpha)) = alpha
        assert_eq!(p.antipode(&p.antipode(&HopfElem::gen(0))), HopfElem::gen(0));
    }

    #[test]
    fn normal_form_unique_random_words() {
        // normal form is independent of multiplication bracketing
        let p = su();
        let words: Vec<Word> = vec![
            vec![2, 0, 3, 1],
            vec![3, 2, 1, 0],
            vec![0, 1, 0, 1],
            vec![3, 3, 0, 0],
            vec![1, 2, 0, 3, 2],
            vec![2, 3, 2, 3, 0, 1],
        ];
        for w in words {
            let full = p.normalize(vec![(w.clone(), Scalar::one())]);
            for cut in 1..w.len() {
                let l = HopfElem::word(w[..cut].to_vec());
                let r = HopfElem::word(w[cut..].to_vec());
                assert_eq!(p.mul(&l, &r), full, "bracketing changed normal form of {:?}", w);
            }
        }
    }

    #[test]
    fn j_morphism_checks() {
        let su = Arc::new(suq2());
        let c = Arc::new(u1());
        let j = j_su_to_u1(su.clone(), c);
        j.check(3).unwrap();
        // weights
        assert_eq!(f_weight(&su, &j, &vec![0]), Some(1));
        assert_eq!(f_weight(&su, &j, &vec![2]), Some(1));
        assert_eq!(f_weight(&su, &j, &vec![3]), Some(-1));
        assert_eq!(f_weight(&su, &j, &vec![1]), Some(-1));
        assert_eq!(f_weight(&su, &j, &vec![0, 2, 3]), Some(1));
        assert_eq!(f_weight(&su, &j, &vec![2, 3]), Some(0));
    }

    #[test]
    fn identity_morphism() {
        let su = Arc::new(suq2());
        let j = j_identity(su.clone());
        j.check(2).unwrap();
    }

    #[test]
    fn adjoint_on_grouplike() {
        // on u1 every element is ad-invariant: ad(a) = a (x) 1
        let p = u1();
        for k in [-3i64, -1, 1, 2] {
            let w = u1_power(k);
            let ad = p.adjoint(&HopfElem::word(w.clone()));
            assert_eq!(ad, T2::term(w, vec![], Scalar::one()));
        }
    }

    #[test]
    fn star_is_antimultiplicative() {
        let p = su();
        let x = HopfElem::word(vec![0, 2]);
        let y = HopfElem::word(vec![3, 1]);
        let lhs = p.star(&p.mul(&x, &y));
        let rhs = p.mul(&p.star(&y), &p.star(&x));
        assert_eq!(lhs, rhs);
    }
}
