//! Quantum principal bundles: the total-space differential algebra, the
//! structure-group data, horizontality, and the vertical/translation maps
//! every connection computation sits on. Four shapes are covered:
//!
//!  * homogeneous: Ω(P) is the full calculus of the total quantum group,
//!    the structure group acts through a Hopf surjection j;
//!  * vertical: Ω(P) = ver(P) = 𝓑 ⊗ Γ_inv(𝒜), the purely vertical scenario;
//!  * line: the coefficient algebra is the structure group itself;
//!  * trivial: Ω(P) = Ω(M) ⊗̂ Γ^∧(𝒜) over an explicit base calculus.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::base::BaseDga;
use crate::focalc::{CalcError, CalculusSpec, InvForm1};
use crate::grext::{GrextError, Mode, QuotientTables};
use crate::hopf::{j_identity, j_su_to_u1, suq2, u1, HopfElem, Morphism, Presentation, Word};
use crate::linalg::{express, kernel, kron, row_is_zero, zero_row, Echelon, Row};
use crate::report::Report;
use crate::scalar::Scalar;
use crate::vert::{VForm, VertAlg};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Grext(#[from] GrextError),
    #[error("{0}")]
    Shape(String),
}

// ---------------------------------------------------------------------------
// trivial-bundle algebra Ω(M) ⊗̂ (𝒜 ⊗ Γ^∧_inv)

pub struct TrivAlg {
    pub base: Arc<BaseDga>,
    pub fiber: VertAlg,
}

/// sparse components keyed by (base degree, base column); values carry the
/// remaining fiber degree. Zero values are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivForm {
    pub deg: usize,
    pub comps: BTreeMap<(usize, usize), VForm>,
}

impl TrivForm {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn insert(&mut self, kb: usize, ib: usize, v: VForm) {
        if v.is_zero() {
            return;
        }
        match self.comps.entry((kb, ib)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&v);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &TrivForm) -> TrivForm {
        assert_eq!(self.deg, o.deg);
        let mut out = self.clone();
        for ((kb, ib), v) in &o.comps {
            out.insert(*kb, *ib, v.clone());
        }
        out
    }

    pub fn neg(&self) -> TrivForm {
        TrivForm {
            deg: self.deg,
            comps: self
                .comps
                .iter()
                .map(|(k, v)| (*k, v.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &TrivForm) -> TrivForm {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> TrivForm {
        if c.is_zero() {
            return TrivForm {
                deg: self.deg,
                comps: BTreeMap::new(),
            };
        }
        TrivForm {
            deg: self.deg,
            comps: self
                .comps
                .iter()
                .map(|(k, v)| (*k, v.scale(c)))
                .collect(),
        }
    }
}

impl TrivAlg {
    pub fn cap(&self) -> usize {
        self.base.top() + self.fiber.cap()
    }

    pub fn zero(&self, deg: usize) -> TrivForm {
        TrivForm {
            deg,
            comps: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> TrivForm {
        self.from_fiber(&self.fiber.one())
    }

    pub fn from_fiber(&self, v: &VForm) -> TrivForm {
        let mut out = self.zero(v.deg);
        out.insert(0, 0, v.clone());
        out
    }

    /// base form of degree k with scalar coordinates, fiber part 1
    pub fn from_base(&self, k: usize, row: &Row) -> TrivForm {
        let mut out = self.zero(k);
        for (ib, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.insert(k, ib, self.fiber.one().scale(c));
            }
        }
        out
    }

    /// (w ⊗ f)(w' ⊗ f') = (-1)^{∂f ∂w'} w w' ⊗ f f'
    pub fn mul(&self, x: &TrivForm, y: &TrivForm) -> Result<TrivForm, GrextError> {
        let mut out = self.zero(x.deg + y.deg);
        for ((kb1, i1), v1) in &x.comps {
            for ((kb2, i2), v2) in &y.comps {
                if kb1 + kb2 > self.base.top() {
                    continue;
                }
                let brow = self.base.mul_basis(*kb1, *i1, *kb2, *i2);
                if row_is_zero(&brow) {
                    continue;
                }
                let mut fv = self.fiber.mul(v1, v2)?;
                if fv.is_zero() {
                    continue;
                }
                if (v1.deg * kb2) % 2 == 1 {
                    fv = fv.neg();
                }
                for (jb, c) in brow.iter().enumerate() {
                    if !c.is_zero() {
                        out.insert(kb1 + kb2, jb, fv.scale(c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// d(w ⊗ f) = dw ⊗ f + (-1)^{∂w} w ⊗ df
    pub fn d(&self, x: &TrivForm) -> Result<TrivForm, GrextError> {
        let mut out = self.zero(x.deg + 1);
        for ((kb, ib), v) in &x.comps {
            if *kb < self.base.top() {
                let drow = self.base.d_basis(*kb, *ib);
                for (jb, c) in drow.iter().enumerate() {
                    if !c.is_zero() {
                        out.insert(kb + 1, jb, v.scale(c));
                    }
                }
            }
            let mut dv = self.fiber.d(v)?;
            if !dv.is_zero() {
                if kb % 2 == 1 {
                    dv = dv.neg();
                }
                out.insert(*kb, *ib, dv);
            }
        }
        Ok(out)
    }

    /// (w ⊗ f)* = (-1)^{∂w ∂f} w* ⊗ f*; base words are hermitian
    pub fn star(&self, x: &TrivForm) -> TrivForm {
        let mut out = self.zero(x.deg);
        for ((kb, ib), v) in &x.comps {
            let mut sv = self.fiber.star(v);
            if (kb * v.deg) % 2 == 1 {
                sv = sv.neg();
            }
            out.insert(*kb, *ib, sv);
        }
        out
    }

    pub fn coact(&self, x: &TrivForm) -> BTreeMap<Word, TrivForm> {
        let mut out: BTreeMap<Word, TrivForm> = BTreeMap::new();
        for ((kb, ib), v) in &x.comps {
            for (w, fv) in self.fiber.coact(v) {
                out.entry(w)
                    .or_insert_with(|| self.zero(x.deg))
                    .insert(*kb, *ib, fv);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn render(&self, x: &TrivForm) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((kb, ib), v) in &x.comps {
            let fs = self.fiber.render(v);
            if *kb == 0 {
                parts.push(fs);
            } else {
                let bn = &self.base.names[*kb][*ib];
                if fs == "1" {
                    parts.push(bn.clone());
                } else if fs.contains('+') || fs.contains(" - ") || fs.starts_with('-') {
                    parts.push(format!("{}*({})", bn, fs));
                } else {
                    parts.push(format!("{}*{}", bn, fs));
                }
            }
        }
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// representation dispatch

pub enum Rep {
    V(VertAlg),
    T(TrivAlg),
}

#[derive(Clone, Debug, PartialEq)]
pub enum El {
    V(VForm),
    T(TrivForm),
}

impl El {
    pub fn deg(&self) -> usize {
        match self {
            El::V(v) => v.deg,
            El::T(t) => t.deg,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            El::V(v) => v.is_zero(),
            El::T(t) => t.is_zero(),
        }
    }

    pub fn add(&self, o: &El) -> El {
        match (self, o) {
            (El::V(a), El::V(b)) => El::V(a.add(b)),
            (El::T(a), El::T(b)) => El::T(a.add(b)),
            _ => panic!("mixed representations"),
        }
    }

    pub fn sub(&self, o: &El) -> El {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> El {
        match self {
            El::V(a) => El::V(a.neg()),
            El::T(a) => El::T(a.neg()),
        }
    }

    pub fn scale(&self, c: &Scalar) -> El {
        match self {
            El::V(a) => El::V(a.scale(c)),
            El::T(a) => El::T(a.scale(c)),
        }
    }
}

impl Rep {
    pub fn fiber(&self) -> &VertAlg {
        match self {
            Rep::V(v) => v,
            Rep::T(t) => &t.fiber,
        }
    }

    pub fn cap(&self) -> usize {
        match self {
            Rep::V(v) => v.cap(),
            Rep::T(t) => t.cap(),
        }
    }

    pub fn zero(&self, deg: usize) -> El {
        match self {
            Rep::V(v) => El::V(v.zero(deg)),
            Rep::T(t) => El::T(t.zero(deg)),
        }
    }

    pub fn one(&self) -> El {
        match self {
            Rep::V(v) => El::V(v.one()),
            Rep::T(t) => El::T(t.one()),
        }
    }

    /// embed a coefficient-algebra element in degree 0
    pub fn from_coeff(&self, b: &HopfElem) -> El {
        match self {
            Rep::V(v) => El::V(v.from_coeff(b)),
            Rep::T(t) => El::T(t.from_fiber(&t.fiber.from_coeff(b))),
        }
    }

    /// embed an invariant 1-form of the fibre calculus
    pub fn from_inv1(&self, f: &InvForm1) -> El {
        match self {
            Rep::V(v) => El::V(v.from_inv1(f)),
            Rep::T(t) => El::T(t.from_fiber(&t.fiber.from_inv1(f))),
        }
    }

    pub fn mul(&self, x: &El, y: &El) -> Result<El, GrextError> {
        match (self, x, y) {
            (Rep::V(a), El::V(p), El::V(q)) => Ok(El::V(a.mul(p, q)?)),
            (Rep::T(a), El::T(p), El::T(q)) => Ok(El::T(a.mul(p, q)?)),
            _ => panic!("mixed representations"),
        }
    }

    pub fn d(&self, x: &El) -> Result<El, GrextError> {
        match (self, x) {
            (Rep::V(a), El::V(p)) => Ok(El::V(a.d(p)?)),
            (Rep::T(a), El::T(p)) => Ok(El::T(a.d(p)?)),
            _ => panic!("mixed representations"),
        }
    }

    pub fn star(&self, x: &El) -> El {
        match (self, x) {
            (Rep::V(a), El::V(p)) => El::V(a.star(p)),
            (Rep::T(a), El::T(p)) => El::T(a.star(p)),
            _ => panic!("mixed representations"),
        }
    }

    pub fn coact(&self, x: &El) -> BTreeMap<Word, El> {
        match (self, x) {
            (Rep::V(a), El::V(p)) => a
                .coact(p)
                .into_iter()
                .map(|(w, v)| (w, El::V(v)))
                .collect(),
            (Rep::T(a), El::T(p)) => a
                .coact(p)
                .into_iter()
                .map(|(w, v)| (w, El::T(v)))
                .collect(),
            _ => panic!("mixed representations"),
        }
    }

    pub fn is_invariant(&self, x: &El) -> bool {
        let co = self.coact(x);
        match co.len() {
            0 => x.is_zero(),
            1 => {
                let (w, v) = co.iter().next().unwrap();
                w.is_empty() && v == x
            }
            _ => false,
        }
    }

    pub fn render(&self, x: &El) -> String {
        match (self, x) {
            (Rep::V(a), El::V(p)) => a.render(p),
            (Rep::T(a), El::T(p)) => a.render(p),
            _ => panic!("mixed representations"),
        }
    }
}

// ---------------------------------------------------------------------------
// bundle contexts

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleKind {
    Homogeneous,
    Vertical,
    Line,
    Trivial,
}

/// data of a homogeneous bundle: the surjection, ρ = π_𝒜 ∘ j on the frame,
/// its kernel 𝓛⊥ and the per-degree horizontal spans it generates
pub struct HomogData {
    pub j: Arc<Morphism>,
    pub rho: Vec<InvForm1>,
    pub lperp: Vec<Row>,
    pub lperp_span: Vec<Echelon>,
}

pub struct BundleContext {
    pub name: String,
    pub kind: BundleKind,
    /// structure group 𝒜
    pub group: Arc<Presentation>,
    /// first-order calculus Γ on 𝒜
    pub gcalc: Arc<CalculusSpec>,
    /// Γ^∧(𝒜) tables (degree cap 2 suffices for δ and dζ)
    pub gtab: Arc<QuotientTables>,
    pub rep: Rep,
    pub homog: Option<HomogData>,
}

fn build_gtab(gcalc: Arc<CalculusSpec>) -> Result<Arc<QuotientTables>, GrextError> {
    Ok(Arc::new(QuotientTables::build(gcalc, Mode::Envelope, 2)?))
}

/// quantum homogeneous bundle: total group SUμ(2) with the named frame
/// calculus, structure group U(1) with the induced quotient calculus
pub fn homogeneous_bundle(
    tname: &str,
    mode: Mode,
    cap: usize,
) -> Result<BundleContext, BundleError> {
    let su = Arc::new(suq2());
    let un = Arc::new(u1());
    let (tcalc, gcalc) = match tname {
        "3d" => (crate::focalc::calc_3d(), crate::focalc::u1_from_3d()),
        "4d+" => (crate::focalc::calc_4dplus(), crate::focalc::u1_from_4dplus()),
        other => return Err(CalcError::UnknownCalculus(other.into()).into()),
    };
    let tcalc = Arc::new(tcalc);
    let gcalc = Arc::new(gcalc);
    let j = Arc::new(j_su_to_u1(su.clone(), un.clone()));
    let tab = Arc::new(QuotientTables::build(tcalc.clone(), mode, cap)?);
    let alg = VertAlg::new(
        su.clone(),
        Arc::new(j_identity(su)),
        j.clone(),
        j.clone(),
        tab.clone(),
    );
    // rho on the frame basis, its kernel, and the horizontal spans
    let n = tcalc.dim();
    let rho: Vec<InvForm1> = (0..n)
        .map(|i| gcalc.germs_pi(&j.apply(&tcalc.preimage[i])))
        .collect();
    let images: Vec<Row> = rho.iter().map(|r| r.0.clone()).collect();
    let lperp = kernel(&images);
    let mut lperp_span = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let mut ech = Echelon::new(tab.dim(k));
        if k == 0 {
            ech.insert(vec![Scalar::one()]);
        } else {
            let mut words: Vec<Row> = lperp.clone();
            for _ in 1..k {
                let mut next = Vec::new();
                for w in &words {
                    for b in &lperp {
                        next.push(kron(w, b));
                    }
                }
                words = next;
            }
            for w in words {
                let cls = tab.q.classify(k, &w);
                if !row_is_zero(&cls) {
                    ech.insert(cls);
                }
            }
        }
        lperp_span.push(ech);
    }
    Ok(BundleContext {
        name: format!("hopf-{}", tname.replace('+', "plus")),
        kind: BundleKind::Homogeneous,
        group: un,
        gcalc: gcalc.clone(),
        gtab: build_gtab(gcalc)?,
        rep: Rep::V(alg),
        homog: Some(HomogData {
            j,
            rho,
            lperp,
            lperp_span,
        }),
    })
}

/// purely vertical scenario: Ω(P) = ver(P) over the classical U(1) calculus
pub fn vertical_bundle(cap: usize) -> Result<BundleContext, BundleError> {
    let su = Arc::new(suq2());
    let un = Arc::new(u1());
    let gcalc = Arc::new(crate::focalc::u1_classical());
    let j = Arc::new(j_su_to_u1(su.clone(), un.clone()));
    let tab = Arc::new(QuotientTables::build(gcalc.clone(), Mode::Envelope, cap.max(2))?);
    let idu = Arc::new(j_identity(un.clone()));
    let alg = VertAlg::new(su, j.clone(), j.clone(), idu, tab);
    Ok(BundleContext {
        name: "hopf-classical".into(),
        kind: BundleKind::Vertical,
        group: un,
        gcalc: gcalc.clone(),
        gtab: build_gtab(gcalc)?,
        rep: Rep::V(alg),
        homog: Some(HomogData {
            j,
            rho: vec![],
            lperp: vec![],
            lperp_span: vec![],
        }),
    })
}

/// quantum line bundle: the coefficient algebra is U(1) itself,
/// carrying the λ-deformed calculus
pub fn line_bundle(lambda: &Scalar, cap: usize) -> Result<BundleContext, BundleError> {
    line_bundle_mode(lambda, Mode::Envelope, cap)
}

/// mode knob for the negative control where ω(ζ)² is kept nonzero
pub fn line_bundle_mode(
    lambda: &Scalar,
    mode: Mode,
    cap: usize,
) -> Result<BundleContext, BundleError> {
    let un = Arc::new(u1());
    let gcalc = Arc::new(crate::focalc::u1_line(lambda)?);
    let tab = Arc::new(QuotientTables::build(gcalc.clone(), mode, cap.max(2))?);
    let idu = Arc::new(j_identity(un.clone()));
    let alg = VertAlg::new(un.clone(), idu.clone(), idu.clone(), idu, tab);
    Ok(BundleContext {
        name: "line-bundle".into(),
        kind: BundleKind::Line,
        group: un,
        gcalc: gcalc.clone(),
        gtab: build_gtab(gcalc)?,
        rep: Rep::V(alg),
        homog: None,
    })
}

/// trivial bundle over an explicit base calculus, fibre U(1) with the named
/// quotient calculus (classical unless overridden)
pub fn trivial_bundle(
    base: BaseDga,
    gname: &str,
    lambda: Option<&Scalar>,
    cap: usize,
) -> Result<BundleContext, BundleError> {
    let un = Arc::new(u1());
    let gcalc = Arc::new(crate::focalc::by_name(gname, lambda)?);
    let tab = Arc::new(QuotientTables::build(gcalc.clone(), Mode::Envelope, cap.max(2))?);
    let idu = Arc::new(j_identity(un.clone()));
    let fiber = VertAlg::new(un.clone(), idu.clone(), idu.clone(), idu, tab);
    let name = format!("trivial-{}", base.name);
    Ok(BundleContext {
        name,
        kind: BundleKind::Trivial,
        group: un,
        gcalc: gcalc.clone(),
        gtab: build_gtab(gcalc)?,
        rep: Rep::T(TrivAlg {
            base: Arc::new(base),
            fiber,
        }),
        homog: None,
    })
}

impl BundleContext {
    /// decompose a crossed-product element into coefficient-word rows
    fn word_rows(v: &VForm) -> BTreeMap<Word, Row> {
        let mut out: BTreeMap<Word, Row> = BTreeMap::new();
        for (i, b) in v.comps.iter().enumerate() {
            for (w, c) in b.terms() {
                out.entry(w.clone())
                    .or_insert_with(|| zero_row(v.comps.len()))[i] = c.clone();
            }
        }
        out
    }

    /// None when horizontal; otherwise a rendered witness component
    pub fn horizontal_witness(&self, x: &El) -> Option<String> {
        match (&self.rep, x) {
            (Rep::T(t), El::T(f)) => {
                for ((kb, ib), v) in &f.comps {
                    if v.deg > 0 {
                        return Some(format!(
                            "{}*({})",
                            t.base.names[*kb][*ib],
                            t.fiber.render(v)
                        ));
                    }
                }
                None
            }
            (Rep::V(alg), El::V(v)) => match self.kind {
                BundleKind::Homogeneous => {
                    let span = &self.homog.as_ref().unwrap().lperp_span[v.deg];
                    for (w, row) in Self::word_rows(v) {
                        if !span.contains(&row) {
                            let rest = span.reduce(&row);
                            return Some(format!(
                                "{}*({})",
                                alg.coeff.render_word(&w),
                                alg.tab.render(v.deg, &rest)
                            ));
                        }
                    }
                    None
                }
                _ => {
                    if v.deg == 0 {
                        None
                    } else {
                        Some(alg.render(v))
                    }
                }
            },
            _ => panic!("mixed representations"),
        }
    }

    pub fn is_horizontal(&self, x: &El) -> bool {
        self.horizontal_witness(x).is_none()
    }

    /// x lies in Ω(M): invariant under the structure coaction and horizontal
    pub fn in_base_forms(&self, x: &El) -> bool {
        self.rep.is_invariant(x) && self.is_horizontal(x)
    }

    /// vertical component of a 1-form, as coefficients per Γ_inv(𝒜) basis
    pub fn verticalize1(&self, x: &El) -> Vec<HopfElem> {
        assert_eq!(x.deg(), 1);
        let m = self.gcalc.dim();
        let mut out = vec![HopfElem::zero(); m];
        match (&self.rep, x) {
            (Rep::T(_), El::T(f)) => {
                for ((kb, _ib), v) in &f.comps {
                    if *kb == 0 {
                        for (i, b) in v.comps.iter().enumerate() {
                            out[i] = out[i].add(b);
                        }
                    }
                }
            }
            (Rep::V(_), El::V(v)) => match self.kind {
                BundleKind::Homogeneous => {
                    let rho = &self.homog.as_ref().unwrap().rho;
                    for (i, b) in v.comps.iter().enumerate() {
                        for (k, c) in rho[i].0.iter().enumerate() {
                            if !c.is_zero() {
                                out[k] = out[k].add(&b.scale(c));
                            }
                        }
                    }
                }
                _ => {
                    for (i, b) in v.comps.iter().enumerate() {
                        out[i] = out[i].add(b);
                    }
                }
            },
            _ => panic!("mixed representations"),
        }
        out
    }

    /// translation map: pairs (q_k, b_k) with Σ q_k ⊗ F(b_k) = 1 ⊗ a,
    /// built from the multiplicative section of j via the antipode legs
    pub fn translation(&self, a: &Word) -> Vec<(HopfElem, HopfElem)> {
        let coeff = self.rep.fiber().coeff.clone();
        let b = match self.kind {
            BundleKind::Homogeneous | BundleKind::Vertical => {
                self.homog.as_ref().unwrap().j.section_word(a)
            }
            _ => HopfElem::word(a.clone()),
        };
        let mut out = Vec::new();
        for (w, c) in b.terms() {
            for ((w1, w2), c2) in coeff.coproduct_word(w).0.iter() {
                let q = coeff.antipode(&HopfElem::word(w1.clone()));
                if q.is_zero() {
                    continue;
                }
                out.push((
                    q.scale(&c.mul(c2)),
                    HopfElem::word(w2.clone()),
                ));
            }
        }
        out
    }

    /// structural bundle checks: the coaction laws, the invariant algebra,
    /// and the translation identity Σ q_k b_k⁽¹⁾ ⊗ j(b_k⁽²⁾) = 1 ⊗ a
    pub fn qpb_report(&self, word_cap: usize) -> Report {
        let mut rep = Report::new(format!("bundle {}", self.name));
        rep.absorb("fiber", self.rep.fiber().validate(word_cap));
        let coeff = self.rep.fiber().coeff.clone();
        let to_a = self.rep.fiber().to_struct.clone();
        let a = self.rep.fiber().struct_group.clone();

        // invariance of degree-0 elements is detected exactly by the counit
        // of the 𝒜-leg of F; sweep normal words
        let mut inv_ok = true;
        let mut inv_count = 0usize;
        for w in coeff.basis_words(word_cap) {
            let el = self.rep.from_coeff(&HopfElem::word(w.clone()));
            let co = self.rep.coact(&el);
            let invariant = self.rep.is_invariant(&el);
            // reconstruct through the counit: (id ⊗ ε)F = id
            let mut back = self.rep.zero(0);
            for (aw, v) in &co {
                back = back.add(&v.scale(&a.counit(&HopfElem::word(aw.clone()))));
            }
            if back != el {
                inv_ok = false;
            }
            if invariant {
                inv_count += 1;
            }
        }
        rep.push("coaction counit on window", inv_ok, None);
        rep.push(
            "invariant window nonempty",
            inv_count > 0,
            Some(format!("{} invariant words", inv_count)),
        );

        // translation identity over a window of structure-group words
        let mut tr_ok = true;
        for aw in a.basis_words(word_cap.min(2)) {
            let pairs = self.translation(&aw);
            let mut acc = crate::hopf::T2::zero();
            for (q, b) in &pairs {
                for ((b1, b2), c) in coeff.coproduct(b).0.iter() {
                    let left = coeff.mul(q, &HopfElem::word(b1.clone()));
                    let right = to_a.apply(&HopfElem::word(b2.clone()));
                    for (lw, lc) in left.terms() {
                        for (rw, rc) in right.terms() {
                            acc.add_term(lw.clone(), rw.clone(), c.mul(lc).mul(rc));
                        }
                    }
                }
            }
            let mut want = crate::hopf::T2::zero();
            want.add_term(vec![], aw.clone(), Scalar::one());
            if acc != want {
                tr_ok = false;
            }
        }
        rep.push("translation identity", tr_ok, None);
        rep
    }

    /// basis of the degree-0 part of Ω(M) over a word-length window
    pub fn base_alg_window(&self, word_cap: usize) -> Vec<HopfElem> {
        let coeff = self.rep.fiber().coeff.clone();
        coeff
            .basis_words(word_cap)
            .into_iter()
            .map(HopfElem::word)
            .filter(|b| self.rep.is_invariant(&self.rep.from_coeff(b)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// horizontal envelope of a homogeneous bundle

/// quotient of the tensor algebra over 𝓛⊥ by the projected germs of the
/// calculus ideal (the second-order constraints every horizontal product
/// satisfies inside Ω(P))
pub fn horizontal_envelope(
    ctx: &BundleContext,
    cap: usize,
) -> Result<crate::grext::GradedQuotient, BundleError> {
    let hd = ctx
        .homog
        .as_ref()
        .filter(|_| ctx.kind == BundleKind::Homogeneous)
        .ok_or_else(|| BundleError::Shape("horizontal envelope needs a homogeneous bundle".into()))?;
    let alg = ctx.rep.fiber();
    let calc = &alg.tab.calc;
    let n = calc.dim();
    let m = hd.lperp.len();
    // names for the 𝓛⊥ letters: reuse frame names when the kernel rows are
    // coordinate vectors, otherwise synthesize
    let names: Vec<String> = hd
        .lperp
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let hits: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, _)| j)
                .collect();
            if hits.len() == 1 && row[hits[0]].sub(&Scalar::one()).is_zero() {
                calc.basis[hits[0]].clone()
            } else {
                format!("h{}", i + 1)
            }
        })
        .collect();
    // germ legs of every ideal generator, both legs expressed in 𝓛⊥
    // coordinates after the complement projection
    let mut k1: Vec<Row> = Vec::new();
    let sect = section_matrix(hd, n);
    for r in &calc.ideal {
        let germ = calc.coproduct_germ(r);
        // project both legs by ϰ⊥ = id - sect∘ρ and express in 𝓛⊥
        let mut row = zero_row(m * m);
        let mut ok = true;
        for p in 0..n {
            for q in 0..n {
                let c = &germ[p * n + q];
                if c.is_zero() {
                    continue;
                }
                let lp = kappa_perp_coords(hd, &sect, p);
                let lq = kappa_perp_coords(hd, &sect, q);
                let (Some(lp), Some(lq)) = (lp, lq) else {
                    ok = false;
                    break;
                };
                for (ip, cp) in lp.iter().enumerate() {
                    for (iq, cq) in lq.iter().enumerate() {
                        let add = c.mul(cp).mul(cq);
                        if !add.is_zero() {
                            row[ip * m + iq] = row[ip * m + iq].add(&add);
                        }
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok && !row_is_zero(&row) {
            k1.push(row);
        }
    }
    let mut gens_at: Vec<Vec<Row>> = vec![vec![], vec![], k1];
    gens_at.truncate(cap + 1);
    Ok(crate::grext::GradedQuotient::build(m, cap, names, &gens_at))
}

/// default section matrix: solve sect(ρ(e_i)) coordinates against 𝓛⊥; the
/// canonical choice maps each Γ_inv(𝒜) basis vector to the ρ-preimage with
/// the smallest support (first frame vector with that ρ-image)
fn section_matrix(hd: &HomogData, n: usize) -> Vec<Row> {
    let m = hd.rho.first().map(|r| r.0.len()).unwrap_or(0);
    let mut sect = Vec::with_capacity(m);
    for k in 0..m {
        let mut found = zero_row(n);
        for (i, r) in hd.rho.iter().enumerate() {
            let unit = r.0[k].sub(&Scalar::one()).is_zero()
                && r.0.iter().enumerate().all(|(q, c)| q == k || c.is_zero());
            if unit {
                found = zero_row(n);
                found[i] = Scalar::one();
                break;
            }
        }
        sect.push(found);
    }
    sect
}

/// ϰ⊥(e_p) expressed in 𝓛⊥ coordinates
fn kappa_perp_coords(hd: &HomogData, sect: &[Row], p: usize) -> Option<Row> {
    let n = sect.first().map(|r| r.len()).unwrap_or(hd.rho.len());
    let mut v = zero_row(n);
    v[p] = Scalar::one();
    for (k, c) in hd.rho[p].0.iter().enumerate() {
        if !c.is_zero() {
            for (i, s) in sect[k].iter().enumerate() {
                v[i] = v[i].sub(&s.mul(c));
            }
        }
    }
    express(&v, &hd.lperp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn s(txt: &str) -> Scalar {
        parse_scalar(txt).unwrap()
    }

    #[test]
    fn homog_3d_rho_and_lperp() {
        let ctx = homogeneous_bundle("3d", Mode::Envelope, 2).unwrap();
        let hd = ctx.homog.as_ref().unwrap();
        // rho: eta -> zeta, eta± -> 0
        assert_eq!(hd.rho[0].0, vec![Scalar::one()]);
        assert!(hd.rho[1].is_zero());
        assert!(hd.rho[2].is_zero());
        // kernel = {ep, em}
        assert_eq!(hd.lperp.len(), 2);
        assert_eq!(hd.lperp[0], vec![Scalar::zero(), Scalar::one(), Scalar::zero()]);
        assert_eq!(hd.lperp[1], vec![Scalar::zero(), Scalar::zero(), Scalar::one()]);
        // horizontal span at degree 2 is one-dimensional: the em*ep class
        assert_eq!(hd.lperp_span[2].rank(), 1);
    }

    #[test]
    fn homog_4dplus_rho() {
        let ctx = homogeneous_bundle("4d+", Mode::Exterior, 2).unwrap();
        let hd = ctx.homog.as_ref().unwrap();
        // rho(tau) = -(1-mu^3)/(1+mu) zeta, rho(eta) = zeta, rho(eta±) = 0
        let sfac = s("-(1-mu^3)/(1+mu)");
        assert_eq!(hd.rho[0].0[0], sfac);
        assert!(hd.rho[1].is_zero());
        assert_eq!(hd.rho[2].0[0], Scalar::one());
        assert!(hd.rho[3].is_zero());
        assert_eq!(hd.lperp.len(), 3);
    }

    #[test]
    fn horizontal_envelope_3d_relations() {
        let ctx = homogeneous_bundle("3d", Mode::Envelope, 3).unwrap();
        let q = horizontal_envelope(&ctx, 3).unwrap();
        // frozen: ep² = 0, em² = 0, ep em = -mu² em ep, nothing in degree 3
        assert_eq!(q.dim(1), 2);
        assert_eq!(q.dim(2), 1);
        assert_eq!(q.dim(3), 0);
        assert_eq!(q.ideal[2].rank(), 3);
        assert_eq!(q.ideal[2].free_cols(), vec![2]);
        // ep⊗em reduces to -mu² em⊗ep
        let mut full = zero_row(4);
        full[1] = Scalar::one();
        let cls = q.classify(2, &full);
        assert_eq!(cls[0], s("-mu^2"));
    }

    #[test]
    fn translation_pairs_frozen() {
        let ctx = homogeneous_bundle("3d", Mode::Envelope, 2).unwrap();
        let su = ctx.rep.fiber().coeff.clone();
        // z translates through (κ(α), α) and (κ(-μ γ*), γ) = (α*, α), (γ*, γ)
        let pairs = ctx.translation(&vec![0u8]);
        let rendered: Vec<(String, String)> = pairs
            .iter()
            .map(|(q, b)| (su.render_elem(q), su.render_elem(b)))
            .collect();
        assert!(rendered.contains(&("alpha_st".to_string(), "alpha".to_string())));
        assert!(rendered.contains(&("gamma_st".to_string(), "gamma".to_string())));
        assert_eq!(rendered.len(), 2);
    }

    #[test]
    fn trivial_bundle_laws() {
        let ctx = trivial_bundle(crate::base::base_flat2(), "u1-classical", None, 2).unwrap();
        let rep = ctx.qpb_report(2);
        assert!(rep.ok(), "{}", rep.render());
        // d² = 0 through the mixed differential on a sample
        let Rep::T(t) = &ctx.rep else { panic!() };
        let z = ctx.rep.from_coeff(&HopfElem::gen(0));
        let e1 = El::T(t.from_base(1, &vec![Scalar::one(), Scalar::zero()]));
        let x = ctx.rep.mul(&e1, &z).unwrap();
        let dd = ctx.rep.d(&ctx.rep.d(&x).unwrap()).unwrap();
        assert!(dd.is_zero());
        assert!(!ctx.is_horizontal(&ctx.rep.d(&z).unwrap()));
        assert!(ctx.is_horizontal(&e1));
    }

    #[test]
    fn homog_bundle_membership() {
        let ctx = homogeneous_bundle("3d", Mode::Envelope, 2).unwrap();
        let su = ctx.rep.fiber().coeff.clone();
        // gamma gamma* is a base function, alpha is not
        let gg = su.mul(&HopfElem::gen(2), &HopfElem::gen(3));
        assert!(ctx.in_base_forms(&ctx.rep.from_coeff(&gg)));
        assert!(!ctx.in_base_forms(&ctx.rep.from_coeff(&HopfElem::gen(0))));
        // eta± are horizontal, eta is not
        let n = ctx.rep.fiber().tab.calc.dim();
        assert!(ctx.is_horizontal(&ctx.rep.from_inv1(&InvForm1::basis(n, 1))));
        assert!(ctx.is_horizontal(&ctx.rep.from_inv1(&InvForm1::basis(n, 2))));
        assert!(!ctx.is_horizontal(&ctx.rep.from_inv1(&InvForm1::basis(n, 0))));
        // verticalization of eta is zeta with unit coefficient
        let v = ctx.verticalize1(&ctx.rep.from_inv1(&InvForm1::basis(n, 0)));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0], HopfElem::one());
    }
}
