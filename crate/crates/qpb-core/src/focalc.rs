//! First-order left-covariant (and bicovariant) *-calculi over a Hopf
//! algebra, presented as finite data packs on the invariant space: germs of
//! the generators, the right ∘-action, star, canonical preimages and the
//! defining right ideal. Everything else (π on arbitrary elements, the
//! adjoint coaction ϖ, the braid σ, the transposed commutator, the embedded
//! differential δ) is derived from the pack.

use std::sync::Arc;

use once_cell::sync::OnceCell;
use thiserror::Error;

use crate::hopf::{self, HopfElem, Presentation, Word, T2};
use crate::linalg::{self, render_row, row_add, row_is_zero, row_scale, zero_row, Echelon, Row};
use crate::report::Report;
use crate::scalar::{parse_scalar, Scalar};

#[derive(Debug, Error)]
pub enum CalcError {
    #[error("unknown calculus `{0}`")]
    UnknownCalculus(String),
    #[error("calculus `{0}` is not bicovariant; {1} is unavailable")]
    NotBicovariant(String, &'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// element of Γ_inv: coordinates over the ordered basis
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvForm1(pub Vec<Scalar>);

impl InvForm1 {
    pub fn zero(n: usize) -> Self {
        InvForm1(zero_row(n))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = zero_row(n);
        v[i] = Scalar::one();
        InvForm1(v)
    }

    pub fn is_zero(&self) -> bool {
        row_is_zero(&self.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        InvForm1(row_add(&self.0, &o.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        InvForm1(linalg::row_sub(&self.0, &o.0))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        InvForm1(row_scale(&self.0, c))
    }
}

/// First-order calculus data pack.
///
/// `circ_gen[b][g]` is basis element `b` acted on by algebra generator `g`;
/// `pi_gen[g]` is the germ of generator `g`; `preimage[b]` is a fixed
/// counit-free element with π(preimage) = basis element. The ideal list
/// records the defining right ideal of the calculus inside ker ε; validation
/// replays the pack against it.
#[derive(Clone, Debug)]
pub struct CalculusSpec {
    pub name: String,
    pub group: Arc<Presentation>,
    pub basis: Vec<String>,
    pub bicovariant: bool,
    pub pi_gen: Vec<InvForm1>,
    pub circ_gen: Vec<Vec<InvForm1>>,
    pub star_tab: Vec<InvForm1>,
    pub preimage: Vec<HopfElem>,
    pub ideal: Vec<HopfElem>,
    varpi_cache: OnceCell<Vec<Vec<HopfElem>>>,
    sigma_cache: OnceCell<Vec<Row>>,
}

impl CalculusSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        group: Arc<Presentation>,
        basis: Vec<String>,
        bicovariant: bool,
        pi_gen: Vec<InvForm1>,
        circ_gen: Vec<Vec<InvForm1>>,
        star_tab: Vec<InvForm1>,
        preimage: Vec<HopfElem>,
        ideal: Vec<HopfElem>,
    ) -> Self {
        let c = CalculusSpec {
            name: name.into(),
            group,
            basis,
            bicovariant,
            pi_gen,
            circ_gen,
            star_tab,
            preimage,
            ideal,
            varpi_cache: OnceCell::new(),
            sigma_cache: OnceCell::new(),
        };
        assert_eq!(c.pi_gen.len(), c.group.gens.len());
        assert_eq!(c.circ_gen.len(), c.dim());
        assert_eq!(c.star_tab.len(), c.dim());
        assert_eq!(c.preimage.len(), c.dim());
        c
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    pub fn zero1(&self) -> InvForm1 {
        InvForm1::zero(self.dim())
    }

    pub fn basis1(&self, i: usize) -> InvForm1 {
        InvForm1::basis(self.dim(), i)
    }

    pub fn render1(&self, v: &InvForm1) -> String {
        render_row(&v.0, &self.basis)
    }

    /// names of the tensor-square basis, row-major
    pub fn tensor_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.basis {
            for b in &self.basis {
                out.push(format!("{}(x){}", a, b));
            }
        }
        out
    }

    pub fn render2(&self, v: &Row) -> String {
        render_row(v, &self.tensor_names())
    }

    // ---- π ----------------------------------------------------------

    /// germs map π(a) = κ(a⁽¹⁾)da⁽²⁾, by the recursion
    /// π(gw) = π(g)∘w + ε(g)π(w) over the letters of each normal word
    pub fn germs_pi(&self, a: &HopfElem) -> InvForm1 {
        let a = self
            .group
            .normalize(a.terms().map(|(w, c)| (w.clone(), c.clone())).collect());
        let mut out = self.zero1();
        for (w, c) in a.terms() {
            out = out.add(&self.pi_word(w).scale(c));
        }
        out
    }

    pub(crate) fn pi_word(&self, w: &[u8]) -> InvForm1 {
        if w.is_empty() {
            return self.zero1();
        }
        let g = w[0] as usize;
        let rest = &w[1..];
        let mut out = self.circ_word(&self.pi_gen[g], rest);
        let eps = &self.group.cou[g];
        if !eps.is_zero() {
            out = out.add(&self.pi_word(rest).scale(eps));
        }
        out
    }

    // ---- ∘ ----------------------------------------------------------

    pub(crate) fn circ_word(&self, v: &InvForm1, w: &[u8]) -> InvForm1 {
        let mut cur = v.clone();
        for &g in w {
            let mut next = self.zero1();
            for (i, c) in cur.0.iter().enumerate() {
                if !c.is_zero() {
                    next = next.add(&self.circ_gen[i][g as usize].scale(c));
                }
            }
            cur = next;
        }
        cur
    }

    /// right-module action ϑ∘a, extended linearly and along PBW letters
    pub fn circ_action(&self, v: &InvForm1, a: &HopfElem) -> InvForm1 {
        let a = self
            .group
            .normalize(a.terms().map(|(w, c)| (w.clone(), c.clone())).collect());
        let mut out = self.zero1();
        for (w, c) in a.terms() {
            out = out.add(&self.circ_word(v, w).scale(c));
        }
        out
    }

    // ---- star -------------------------------------------------------

    /// antilinear star on Γ_inv
    pub fn inv_star(&self, v: &InvForm1) -> InvForm1 {
        let mut out = self.zero1();
        for (i, c) in v.0.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.star_tab[i].scale(&c.conj()));
            }
        }
        out
    }

    // ---- ϖ, σ, c^⊤ ---------------------------------------------------

    /// adjoint coaction matrix: ϖ(e_i) = Σ_j e_j ⊗ m[i][j]
    pub fn varpi_matrix(&self) -> Result<&Vec<Vec<HopfElem>>, CalcError> {
        if !self.bicovariant {
            return Err(CalcError::NotBicovariant(self.name.clone(), "varpi"));
        }
        Ok(self.varpi_cache.get_or_init(|| {
            let n = self.dim();
            let mut m = vec![vec![HopfElem::zero(); n]; n];
            for i in 0..n {
                let ad = self.group.adjoint(&self.preimage[i]);
                for ((w1, w2), c) in &ad.0 {
                    let coords = self.pi_word(w1).scale(c);
                    for (j, cc) in coords.0.iter().enumerate() {
                        if !cc.is_zero() {
                            m[i][j] = m[i][j].add(&HopfElem::term(w2.clone(), cc.clone()));
                        }
                    }
                }
            }
            m
        }))
    }

    pub fn adjoint_varpi(&self, v: &InvForm1) -> Result<Vec<(InvForm1, HopfElem)>, CalcError> {
        let m = self.varpi_matrix()?;
        let n = self.dim();
        let mut out = Vec::new();
        for j in 0..n {
            let mut leg = HopfElem::zero();
            for (i, c) in v.0.iter().enumerate() {
                if !c.is_zero() {
                    leg = leg.add(&m[i][j].scale(c));
                }
            }
            if !leg.is_zero() {
                out.push((self.basis1(j), leg));
            }
        }
        Ok(out)
    }

    /// σ(e_i⊗e_j) as columns over the row-major tensor-square basis
    pub fn sigma_cols(&self) -> Result<&Vec<Row>, CalcError> {
        if !self.bicovariant {
            return Err(CalcError::NotBicovariant(self.name.clone(), "sigma"));
        }
        let m = self.varpi_matrix()?;
        Ok(self.sigma_cache.get_or_init(|| {
            let n = self.dim();
            let mut cols = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    // σ(η⊗ϑ) = Σ_k ϑ_k ⊗ (η∘c_k) with ϖ(ϑ)=Σ_k ϑ_k⊗c_k
                    let mut col = zero_row(n * n);
                    for k in 0..n {
                        if m[j][k].is_zero() {
                            continue;
                        }
                        let moved = self.circ_action(&self.basis1(i), &m[j][k]);
                        for (l, c) in moved.0.iter().enumerate() {
                            if !c.is_zero() {
                                col[k * n + l] = col[k * n + l].add(c);
                            }
                        }
                    }
                    cols.push(col);
                }
            }
            cols
        }))
    }

    /// braid applied to tensor-square coordinates
    pub fn braid_sigma(&self, v: &Row) -> Result<Row, CalcError> {
        let cols = self.sigma_cols()?;
        Ok(linalg::apply_cols(cols, v))
    }

    /// c^⊤ = (id⊗π)ϖ on a single basis element, as tensor-square coordinates
    pub fn transposed_commutator(&self, i: usize) -> Result<Row, CalcError> {
        let m = self.varpi_matrix()?;
        let n = self.dim();
        let mut out = zero_row(n * n);
        for k in 0..n {
            let g = self.germs_pi(&m[i][k]);
            for (l, c) in g.0.iter().enumerate() {
                if !c.is_zero() {
                    out[k * n + l] = out[k * n + l].add(c);
                }
            }
        }
        Ok(out)
    }

    // ---- δ ----------------------------------------------------------

    /// germ of the coproduct: Σ π(e⁽¹⁾)⊗π(e⁽²⁾) as tensor-square coordinates
    pub fn coproduct_germ(&self, e: &HopfElem) -> Row {
        let n = self.dim();
        let cop = self.group.coproduct(e);
        let mut out = zero_row(n * n);
        for ((w1, w2), c) in &cop.0 {
            let p1 = self.pi_word(w1);
            if p1.is_zero() {
                continue;
            }
            let p2 = self.pi_word(w2);
            if p2.is_zero() {
                continue;
            }
            for (a, ca) in p1.0.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in p2.0.iter().enumerate() {
                    if cb.is_zero() {
                        continue;
                    }
                    let add = c.mul(ca).mul(cb);
                    out[a * n + b] = out[a * n + b].add(&add);
                }
            }
        }
        out
    }

    /// embedded differential δ(e_i) = −π(a⁽¹⁾)⊗π(a⁽²⁾) over the stored
    /// preimage a, as tensor-square coordinates
    pub fn embedded_delta(&self, i: usize) -> Row {
        row_scale(&self.coproduct_germ(&self.preimage[i]), &Scalar::one().neg())
    }

    pub fn embedded_delta1(&self, v: &InvForm1) -> Row {
        let n = self.dim();
        let mut out = zero_row(n * n);
        for (i, c) in v.0.iter().enumerate() {
            if !c.is_zero() {
                out = row_add(&out, &row_scale(&self.embedded_delta(i), c));
            }
        }
        out
    }

    /// (x⊗y) ↦ y*⊗x* on tensor-square coordinates (antilinear)
    pub fn twist_star2(&self, v: &Row) -> Row {
        let n = self.dim();
        let mut out = zero_row(n * n);
        for a in 0..n {
            for b in 0..n {
                let c = &v[a * n + b];
                if c.is_zero() {
                    continue;
                }
                let sb = &self.star_tab[b];
                let sa = &self.star_tab[a];
                for (l, cl) in sb.0.iter().enumerate() {
                    if cl.is_zero() {
                        continue;
                    }
                    for (m, cm) in sa.0.iter().enumerate() {
                        if cm.is_zero() {
                            continue;
                        }
                        let add = c.conj().mul(cl).mul(cm);
                        out[l * n + m] = out[l * n + m].add(&add);
                    }
                }
            }
        }
        out
    }

    // ---- validation ---------------------------------------------------

    /// replay the pack against the defining laws on all monomials of
    /// degree ≤ cap; every failing line names the violated table row
    pub fn validate_calculus(&self, cap: usize) -> Report {
        let mut rep = Report::new(format!("calculus {}", self.name));
        let p = &self.group;
        let n = self.dim();

        // the ideal sits inside ker ε and is killed by π
        for r in &self.ideal {
            let name = p.render_elem(r);
            rep.check("ideal-in-ker-counit", p.counit(r).is_zero(), || name.clone());
            rep.check("pi-kills-ideal", self.germs_pi(r).is_zero(), || {
                format!("{} -> {}", name, self.render1(&self.germs_pi(r)))
            });
        }

        // preimages: counit-free, π(preimage_i) = e_i
        for i in 0..n {
            let pre = &self.preimage[i];
            rep.check(
                "preimage-in-ker-counit",
                p.counit(pre).is_zero(),
                || self.basis[i].clone(),
            );
            let hit = self.germs_pi(pre);
            rep.check("preimage-germ", hit == self.basis1(i), || {
                format!("{} -> {}", self.basis[i], self.render1(&hit))
            });
        }

        let words: Vec<Word> = p
            .basis_words(cap)
            .into_iter()
            .filter(|w| !w.is_empty())
            .collect();

        // π Leibniz rule against the recursion: π(vw) = π(v)∘w + ε(v)π(w)
        let mut leibniz_ok = true;
        let mut leibniz_wit = String::new();
        'outer: for v in &words {
            for w in &words {
                if v.len() + w.len() > cap {
                    continue;
                }
                let prod = p.mul(&HopfElem::word(v.clone()), &HopfElem::word(w.clone()));
                let lhs = self.germs_pi(&prod);
                let ev = p.counit(&HopfElem::word(v.clone()));
                let rhs = self
                    .circ_word(&self.pi_word(v), w)
                    .add(&self.pi_word(w).scale(&ev));
                if lhs != rhs {
                    leibniz_ok = false;
                    leibniz_wit = format!("{} | {}", p.render_word(v), p.render_word(w));
                    break 'outer;
                }
            }
        }
        rep.push("pi-leibniz", leibniz_ok, (!leibniz_ok).then_some(leibniz_wit));

        // right-module law (ϑ∘v)∘w = ϑ∘(vw)
        let mut module_ok = true;
        let mut module_wit = String::new();
        'outer2: for i in 0..n {
            for v in &words {
                for w in &words {
                    if v.len() + w.len() > cap {
                        continue;
                    }
                    let lhs = self.circ_word(&self.circ_word(&self.basis1(i), v), w);
                    let prod = p.mul(&HopfElem::word(v.clone()), &HopfElem::word(w.clone()));
                    let rhs = self.circ_action(&self.basis1(i), &prod);
                    if lhs != rhs {
                        module_ok = false;
                        module_wit = format!(
                            "{} o {} | {}",
                            self.basis[i],
                            p.render_word(v),
                            p.render_word(w)
                        );
                        break 'outer2;
                    }
                }
            }
        }
        rep.push("circ-module-law", module_ok, (!module_ok).then_some(module_wit));

        // star: the table agrees with ϑ* = −π(κ(a_ϑ)*), and is an involution
        for i in 0..n {
            let formula = self
                .germs_pi(&p.star(&p.antipode(&self.preimage[i])))
                .scale(&Scalar::one().neg());
            rep.check("star-formula", self.star_tab[i] == formula, || {
                format!(
                    "{}: table {} vs {}",
                    self.basis[i],
                    self.render1(&self.star_tab[i]),
                    self.render1(&formula)
                )
            });
            let twice = self.inv_star(&self.inv_star(&self.basis1(i)));
            rep.check("star-involution", twice == self.basis1(i), || {
                format!("{} -> {}", self.basis[i], self.render1(&twice))
            });
        }

        // (ϑ∘a)* = ϑ*∘κ(a)*
        let mut sc_ok = true;
        let mut sc_wit = String::new();
        'outer3: for i in 0..n {
            for v in &words {
                let lhs = self.inv_star(&self.circ_word(&self.basis1(i), v));
                let ka = p.star(&p.antipode(&HopfElem::word(v.clone())));
                let rhs = self.circ_action(&self.inv_star(&self.basis1(i)), &ka);
                if lhs != rhs {
                    sc_ok = false;
                    sc_wit = format!("{} o {}", self.basis[i], p.render_word(v));
                    break 'outer3;
                }
            }
        }
        rep.push("star-circ-compat", sc_ok, (!sc_ok).then_some(sc_wit));

        // δ hermicity: −δ(ϑ*) = flip-star δ(ϑ)
        for i in 0..n {
            let lhs = linalg::row_scale(&self.embedded_delta1(&self.inv_star(&self.basis1(i))), &Scalar::one().neg());
            let rhs = self.twist_star2(&self.embedded_delta(i));
            rep.check("delta-hermicity", linalg::row_eq(&lhs, &rhs), || {
                format!(
                    "{}: {} vs {}",
                    self.basis[i],
                    self.render2(&lhs),
                    self.render2(&rhs)
                )
            });
        }

        if self.bicovariant {
            self.validate_covariant(&mut rep, cap);
        }

        rep
    }

    fn validate_covariant(&self, rep: &mut Report, _cap: usize) {
        let p = &self.group;
        let n = self.dim();

        // ϖ is insensitive to the ideal: (π⊗id)ad(r) = 0
        for r in &self.ideal {
            let ad = p.adjoint(r);
            let mut legs = vec![HopfElem::zero(); n];
            for ((w1, w2), c) in &ad.0 {
                let coords = self.pi_word(w1).scale(c);
                for (j, cc) in coords.0.iter().enumerate() {
                    if !cc.is_zero() {
                        legs[j] = legs[j].add(&HopfElem::term(w2.clone(), cc.clone()));
                    }
                }
            }
            let ok = legs.iter().all(|l| l.is_zero());
            rep.check("varpi-kills-ideal", ok, || p.render_elem(r));
        }

        let m = self.varpi_matrix().expect("bicovariant");

        // counit law (id⊗ε)ϖ = id
        for i in 0..n {
            let mut v = self.zero1();
            for j in 0..n {
                v.0[j] = v.0[j].add(&p.counit(&m[i][j]));
            }
            rep.check("varpi-counit", v == self.basis1(i), || {
                format!("{} -> {}", self.basis[i], self.render1(&v))
            });
        }

        // coassociativity (ϖ⊗id)ϖ = (id⊗φ)ϖ
        for i in 0..n {
            for k in 0..n {
                let mut lhs = T2::zero();
                for j in 0..n {
                    for (wa, ca) in m[j][k].terms() {
                        for (wb, cb) in m[i][j].terms() {
                            lhs.add_term(wa.clone(), wb.clone(), ca.mul(cb));
                        }
                    }
                }
                let lhs = p.normalize_t2(lhs);
                let rhs = p.coproduct(&m[i][k]);
                let mut diff = lhs;
                for ((a, b), c) in &rhs.0 {
                    diff.add_term(a.clone(), b.clone(), c.neg());
                }
                rep.check("varpi-coassoc", diff.is_zero(), || {
                    format!("{} leg {}", self.basis[i], self.basis[k])
                });
            }
        }

        // braid σ: invertible, satisfies the braid equation on basis triples
        let cols = self.sigma_cols().expect("bicovariant");
        let rank = Echelon::from_rows(n * n, cols.iter().cloned()).rank();
        rep.check("sigma-invertible", rank == n * n, || {
            format!("rank {} of {}", rank, n * n)
        });

        let apply12 = |v: &Row| -> Row {
            // σ on legs 1,2 of Γ_inv^⊗3
            let mut out = zero_row(n * n * n);
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (ab, k) = (idx / n, idx % n);
                for (tgt, cc) in cols[ab].iter().enumerate() {
                    if !cc.is_zero() {
                        out[tgt * n + k] = out[tgt * n + k].add(&c.mul(cc));
                    }
                }
            }
            out
        };
        let apply23 = |v: &Row| -> Row {
            let mut out = zero_row(n * n * n);
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (i, bc) = (idx / (n * n), idx % (n * n));
                for (tgt, cc) in cols[bc].iter().enumerate() {
                    if !cc.is_zero() {
                        out[i * n * n + tgt] = out[i * n * n + tgt].add(&c.mul(cc));
                    }
                }
            }
            out
        };
        let mut braid_ok = true;
        let mut braid_wit = String::new();
        'braid: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut e = zero_row(n * n * n);
                    e[(i * n + j) * n + k] = Scalar::one();
                    let lhs = apply12(&apply23(&apply12(&e)));
                    let rhs = apply23(&apply12(&apply23(&e)));
                    if !linalg::row_eq(&lhs, &rhs) {
                        braid_ok = false;
                        braid_wit =
                            format!("{} {} {}", self.basis[i], self.basis[j], self.basis[k]);
                        break 'braid;
                    }
                }
            }
        }
        rep.push("braid-equation", braid_ok, (!braid_ok).then_some(braid_wit));

        // δ equivariance: ϖ^⊗2 δ = (δ⊗id)ϖ
        for i in 0..n {
            let d = self.embedded_delta(i);
            // lhs[(a',b')] = Σ_{a,b} d[a,b] c_{a a'} c_{b b'}
            let mut lhs = vec![HopfElem::zero(); n * n];
            for a in 0..n {
                for b in 0..n {
                    let c = &d[a * n + b];
                    if c.is_zero() {
                        continue;
                    }
                    for ap in 0..n {
                        if m[a][ap].is_zero() {
                            continue;
                        }
                        for bp in 0..n {
                            if m[b][bp].is_zero() {
                                continue;
                            }
                            let prod = p.mul(&m[a][ap], &m[b][bp]).scale(c);
                            lhs[ap * n + bp] = lhs[ap * n + bp].add(&prod);
                        }
                    }
                }
            }
            let mut rhs = vec![HopfElem::zero(); n * n];
            for j in 0..n {
                if m[i][j].is_zero() {
                    continue;
                }
                let dj = self.embedded_delta(j);
                for (idx, c) in dj.iter().enumerate() {
                    if !c.is_zero() {
                        rhs[idx] = rhs[idx].add(&m[i][j].scale(c));
                    }
                }
            }
            let ok = lhs
                .iter()
                .zip(&rhs)
                .all(|(x, y)| x.sub(y).is_zero());
            rep.check("delta-equivariance", ok, || self.basis[i].clone());
        }
    }
}

// ---- built-in packs ---------------------------------------------------

fn sc(s: &str) -> Scalar {
    parse_scalar(s).expect("scalar literal")
}

fn v1(coords: &[&str]) -> InvForm1 {
    InvForm1(coords.iter().map(|s| sc(s)).collect())
}

fn elem(p: &Presentation, terms: &[(&str, &[u8])]) -> HopfElem {
    p.normalize(
        terms
            .iter()
            .map(|(c, w)| (w.to_vec(), sc(c)))
            .collect(),
    )
}

/// 3D left-covariant calculus on the quantum SU(2): basis (eta, ep, em)
pub fn calc_3d() -> CalculusSpec {
    let p = Arc::new(hopf::suq2());
    const A: u8 = 0;
    const AS: u8 = 1;
    const G: u8 = 2;
    const GS: u8 = 3;
    let ideal = vec![
        elem(&p, &[("1", &[G, G])]),
        elem(&p, &[("1", &[G, GS])]),
        elem(&p, &[("1", &[GS, GS])]),
        elem(&p, &[("1", &[A, G]), ("-1", &[G])]),
        elem(&p, &[("1", &[A, GS]), ("-1", &[GS])]),
        elem(&p, &[("mu^2", &[A]), ("1", &[AS]), ("-1-mu^2", &[])]),
    ];
    CalculusSpec::new(
        "3d",
        p.clone(),
        vec!["eta".into(), "ep".into(), "em".into()],
        false,
        vec![
            v1(&["1/(1+mu^2)", "0", "0"]),
            v1(&["-mu^2/(1+mu^2)", "0", "0"]),
            v1(&["0", "1", "0"]),
            v1(&["0", "0", "1"]),
        ],
        vec![
            vec![
                v1(&["1/mu^2", "0", "0"]),
                v1(&["mu^2", "0", "0"]),
                v1(&["0", "0", "0"]),
                v1(&["0", "0", "0"]),
            ],
            vec![
                v1(&["0", "1/mu", "0"]),
                v1(&["0", "mu", "0"]),
                v1(&["0", "0", "0"]),
                v1(&["0", "0", "0"]),
            ],
            vec![
                v1(&["0", "0", "1/mu"]),
                v1(&["0", "0", "mu"]),
                v1(&["0", "0", "0"]),
                v1(&["0", "0", "0"]),
            ],
        ],
        vec![
            v1(&["-1", "0", "0"]),
            v1(&["0", "0", "mu"]),
            v1(&["0", "1/mu", "0"]),
        ],
        vec![
            elem(&p, &[("1", &[A]), ("-1", &[AS])]),
            elem(&p, &[("1", &[G])]),
            elem(&p, &[("1", &[GS])]),
        ],
        ideal,
    )
}

/// 4D+ bicovariant calculus on the quantum SU(2): basis (tau, ep, eta, em)
pub fn calc_4dplus() -> CalculusSpec {
    let p = Arc::new(hopf::suq2());
    const A: u8 = 0;
    const AS: u8 = 1;
    const G: u8 = 2;
    const GS: u8 = 3;
    // a = mu^2 alpha + alpha* - (mu^3 + 1/mu), g0 = mu^2 alpha + alpha* - (1+mu^2)
    let a_shift = elem(
        &p,
        &[("mu^2", &[A]), ("1", &[AS]), ("-mu^3-1/mu", &[])],
    );
    let g0 = elem(&p, &[("mu^2", &[A]), ("1", &[AS]), ("-1-mu^2", &[])]);
    let amas = elem(&p, &[("1", &[A]), ("-1", &[AS])]);
    let gam = elem(&p, &[("1", &[G])]);
    let gams = elem(&p, &[("1", &[GS])]);
    let quad = elem(
        &p,
        &[
            ("mu^2", &[AS, AS]),
            ("-1-mu^2", &[A, AS]),
            ("1+mu^2", &[G, GS]),
            ("1", &[A, A]),
        ],
    );
    let ideal = vec![
        p.mul(&a_shift, &g0),
        p.mul(&a_shift, &gam),
        p.mul(&a_shift, &amas),
        p.mul(&a_shift, &gams),
        elem(&p, &[("1", &[G, G])]),
        p.mul(&gam, &amas),
        quad,
        p.mul(&gams, &amas),
        elem(&p, &[("1", &[GS, GS])]),
    ];
    CalculusSpec::new(
        "4d+",
        p.clone(),
        vec!["tau".into(), "ep".into(), "eta".into(), "em".into()],
        true,
        vec![
            v1(&["1/(1+mu^2)", "0", "1/(1+mu^2)", "0"]),
            v1(&["1/(1+mu^2)", "0", "-mu^2/(1+mu^2)", "0"]),
            v1(&["0", "1", "0", "0"]),
            v1(&["0", "0", "0", "1"]),
        ],
        vec![
            vec![
                v1(&[
                    "(1+mu^4)/(mu*(1+mu^2))",
                    "0",
                    "(1-mu)*(1-mu^3)/(mu*(1+mu^2))",
                    "0",
                ]),
                v1(&[
                    "(1+mu^4)/(mu*(1+mu^2))",
                    "0",
                    "-mu*(1-mu)*(1-mu^3)/(1+mu^2)",
                    "0",
                ]),
                v1(&["0", "(1-mu)*(1-mu^3)/mu", "0", "0"]),
                v1(&["0", "0", "0", "(1-mu)*(1-mu^3)/mu"]),
            ],
            vec![
                v1(&["0", "1", "0", "0"]),
                v1(&["0", "1", "0", "0"]),
                v1(&["0", "0", "0", "0"]),
                v1(&[
                    "-(1+mu)*(1-mu^2)/(mu*(1+mu^2)*(1-mu^3))",
                    "0",
                    "-(1-mu^2)/(mu*(1+mu^2))",
                    "0",
                ]),
            ],
            vec![
                v1(&[
                    "mu*(1+mu)*(1-mu^2)/((1+mu^2)*(1-mu^3))",
                    "0",
                    "2*mu/(1+mu^2)",
                    "0",
                ]),
                v1(&[
                    "-(1+mu)*(1-mu^2)/(mu*(1+mu^2)*(1-mu^3))",
                    "0",
                    "2*mu/(1+mu^2)",
                    "0",
                ]),
                v1(&["0", "-(1-mu^2)/mu", "0", "0"]),
                v1(&["0", "0", "0", "-(1-mu^2)/mu"]),
            ],
            vec![
                v1(&["0", "0", "0", "1"]),
                v1(&["0", "0", "0", "1"]),
                v1(&[
                    "-(1+mu)*(1-mu^2)/(mu*(1+mu^2)*(1-mu^3))",
                    "0",
                    "-(1-mu^2)/(mu*(1+mu^2))",
                    "0",
                ]),
                v1(&["0", "0", "0", "0"]),
            ],
        ],
        vec![
            v1(&["-1", "0", "0", "0"]),
            v1(&["0", "0", "0", "mu"]),
            v1(&["0", "0", "-1", "0"]),
            v1(&["0", "1/mu", "0", "0"]),
        ],
        vec![
            g0,
            elem(&p, &[("1", &[G])]),
            amas,
            elem(&p, &[("1", &[GS])]),
        ],
        ideal,
    )
}

const Z: u8 = 0;
const ZS: u8 = 1;

fn u1_pack(
    name: &str,
    pi_z: Scalar,
    pi_zs: Scalar,
    circ_z: Scalar,
    circ_zs: Scalar,
    ideal: Vec<Vec<(Scalar, Word)>>,
) -> CalculusSpec {
    let p = Arc::new(hopf::u1());
    let ideal = ideal
        .into_iter()
        .map(|ts| p.normalize(ts.into_iter().map(|(c, w)| (w, c)).collect()))
        .collect();
    CalculusSpec::new(
        name,
        p.clone(),
        vec!["zeta".into()],
        true,
        vec![InvForm1(vec![pi_z]), InvForm1(vec![pi_zs])],
        vec![vec![InvForm1(vec![circ_z]), InvForm1(vec![circ_zs])]],
        vec![v1(&["-1"])],
        vec![elem(&p, &[("1", &[Z]), ("-1", &[ZS])])],
        ideal,
    )
}

/// quotient of the 3D calculus along the Hopf fibration: ζ∘z = μ^{-2}ζ
pub fn u1_from_3d() -> CalculusSpec {
    u1_pack(
        "u1-from-3d",
        sc("1/(1+mu^2)"),
        sc("-mu^2/(1+mu^2)"),
        sc("1/mu^2"),
        sc("mu^2"),
        vec![vec![
            (sc("mu^2"), vec![Z]),
            (sc("1"), vec![ZS]),
            (sc("-1-mu^2"), vec![]),
        ]],
    )
}

/// quotient of the 4D+ calculus along the Hopf fibration: ζ∘z = μζ
pub fn u1_from_4dplus() -> CalculusSpec {
    u1_pack(
        "u1-from-4d+",
        sc("mu/(1+mu)"),
        sc("-1/(1+mu)"),
        sc("mu"),
        sc("1/mu"),
        vec![vec![
            (sc("1"), vec![Z]),
            (sc("mu"), vec![ZS]),
            (sc("-1-mu"), vec![]),
        ]],
    )
}

/// one-parameter line-bundle calculus: ζ∘z = λζ
pub fn u1_line(lambda: &Scalar) -> Result<CalculusSpec, CalcError> {
    let one = Scalar::one();
    let lam_inv = lambda
        .inv()
        .map_err(|_| CalcError::InvalidParameter("lambda must be invertible".into()))?;
    let denom = one.add(lambda);
    let denom_inv = denom
        .inv()
        .map_err(|_| CalcError::InvalidParameter("lambda = -1 is singular".into()))?;
    Ok(u1_pack(
        "u1-line",
        lambda.mul(&denom_inv),
        denom_inv.neg(),
        lambda.clone(),
        lam_inv,
        vec![vec![
            (one.clone(), vec![Z]),
            (lambda.clone(), vec![ZS]),
            (denom.neg(), vec![]),
        ]],
    ))
}

/// classical (commutative) calculus on U(1): ζ∘z = ζ, ideal (z−1)²
pub fn u1_classical() -> CalculusSpec {
    u1_pack(
        "u1-classical",
        sc("1/2"),
        sc("-1/2"),
        sc("1"),
        sc("1"),
        vec![vec![
            (sc("1"), vec![Z, Z]),
            (sc("-2"), vec![Z]),
            (sc("1"), vec![]),
        ]],
    )
}

/// look up a built-in pack; `lambda` feeds the line calculus (defaults to
/// the symbolic parameter)
pub fn by_name(name: &str, lambda: Option<&Scalar>) -> Result<CalculusSpec, CalcError> {
    match name {
        "3d" => Ok(calc_3d()),
        "4d+" => Ok(calc_4dplus()),
        "u1-from-3d" => Ok(u1_from_3d()),
        "u1-from-4d+" => Ok(u1_from_4dplus()),
        "u1-line" | "u1-line(lambda)" => {
            let def = Scalar::lambda();
            u1_line(lambda.unwrap_or(&def))
        }
        "u1-classical" => Ok(u1_classical()),
        other => Err(CalcError::UnknownCalculus(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_packs_validate() {
        for c in [calc_3d(), u1_from_3d(), u1_from_4dplus(), u1_classical()] {
            let rep = c.validate_calculus(3);
            assert!(rep.ok(), "{}", rep.render());
        }
        let c = u1_line(&Scalar::lambda()).unwrap();
        let rep = c.validate_calculus(4);
        assert!(rep.ok(), "{}", rep.render());
    }

    #[test]
    fn fourdplus_pack_validates() {
        let c = calc_4dplus();
        let rep = c.validate_calculus(2);
        assert!(rep.ok(), "{}", rep.render());
    }

    #[test]
    fn expected_values() {
        let c = calc_3d();
        let p = &c.group;
        // eta = pi(alpha - alpha*)
        let eta = c.germs_pi(&elem(p, &[("1", &[0]), ("-1", &[1])]));
        assert_eq!(eta, c.basis1(0));
        // gamma^2 is killed
        assert!(c.germs_pi(&elem(p, &[("1", &[2, 2])])).is_zero());
        // eta o alpha = mu^-2 eta
        let moved = c.circ_action(&c.basis1(0), &HopfElem::gen(0));
        assert_eq!(moved, c.basis1(0).scale(&sc("1/mu^2")));

        let u = u1_from_3d();
        let pz = u.germs_pi(&HopfElem::gen(0));
        assert_eq!(pz, u.basis1(0).scale(&sc("1/(1+mu^2)")));
        // delta(zeta) = -((1-mu^2)/(1+mu^2)) zeta⊗zeta
        let d = u.embedded_delta(0);
        assert_eq!(d[0], sc("-(1-mu^2)/(1+mu^2)"));

        let cl = u1_classical();
        assert!(linalg::row_is_zero(&cl.embedded_delta(0)));
        // sigma is the flip-fixing identity here
        let s = cl.braid_sigma(&vec![Scalar::one()]).unwrap();
        assert!(s[0].is_one());
    }

    #[test]
    fn line_family_members() {
        // the fibration quotients are members of the line family
        let l3 = u1_line(&sc("1/mu^2")).unwrap();
        let f3 = u1_from_3d();
        assert_eq!(l3.pi_gen, f3.pi_gen);
        assert_eq!(l3.circ_gen, f3.circ_gen);
        let l4 = u1_line(&sc("mu")).unwrap();
        let f4 = u1_from_4dplus();
        assert_eq!(l4.pi_gen, f4.pi_gen);
        assert_eq!(l4.circ_gen, f4.circ_gen);
    }

    #[test]
    fn non_bicovariant_guard() {
        let c = calc_3d();
        assert!(matches!(
            c.varpi_matrix(),
            Err(CalcError::NotBicovariant(_, _))
        ));
    }
}
