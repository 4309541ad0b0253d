//! Connections and everything derived from them: curvature through either
//! embedded bracket, horizontal covariant derivatives, multiplicativity and
//! regularity defects with witnesses, the Bianchi identity, characteristic
//! Weil inputs, transgression of the curvature family, and the gauge
//! operators on bundles with an explicit vertical splitting.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bundle::{BundleContext, BundleKind, El, Rep};
use crate::focalc::{CalcError, InvForm1};
use crate::grext::GrextError;
use crate::hopf::{HopfElem, Word};
use crate::linalg::{express, Row};
use crate::report::Report;
use crate::scalar::{t_common_root, Scalar, ScalarError};

#[derive(Debug, Error)]
pub enum ConnError {
    #[error(transparent)]
    Grext(#[from] GrextError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("form is not horizontal; witness {0}")]
    NotHorizontal(String),
    #[error("{0}")]
    Shape(String),
}

/// connection form on the Γ_inv(𝒜) basis
#[derive(Clone)]
pub struct Connection {
    pub name: String,
    pub omega: Vec<El>,
}

/// which embedding of δ: Γ_inv → Γ_inv ⊗ Γ_inv feeds the brackets
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    /// canonical lift of d through the quotient (vanishes when Γ^∧2 = 0)
    IotaD,
    /// coproduct germ of the stored ideal preimages
    Preimage,
}

// ---------------------------------------------------------------------------
// constructors

/// homogeneous bundle: ω = section on the structure frame
pub fn homog_connection(
    ctx: &BundleContext,
    name: &str,
    section: &[InvForm1],
) -> Result<Connection, ConnError> {
    if ctx.kind != BundleKind::Homogeneous {
        return Err(ConnError::Shape("homogeneous bundle required".into()));
    }
    Ok(Connection {
        name: name.into(),
        omega: section.iter().map(|s| ctx.rep.from_inv1(s)).collect(),
    })
}

/// canonical connection ω(e_k) = 1 ⊗ e_k (vertical, line and homogeneous
/// scenarios with the identity section)
pub fn canonical_connection(ctx: &BundleContext) -> Connection {
    let m = ctx.gcalc.dim();
    let omega = match ctx.kind {
        BundleKind::Homogeneous => {
            // section: each structure basis vector to its first ρ-preimage
            let hd = ctx.homog.as_ref().unwrap();
            (0..m)
                .map(|k| {
                    let n = hd.rho.len();
                    let i = (0..n)
                        .find(|&i| {
                            hd.rho[i].0[k].sub(&Scalar::one()).is_zero()
                                && hd.rho[i].0.iter().enumerate().all(|(q, c)| q == k || c.is_zero())
                        })
                        .expect("unit section vector");
                    ctx.rep.from_inv1(&InvForm1::basis(n, i))
                })
                .collect()
        }
        _ => (0..m)
            .map(|k| ctx.rep.from_inv1(&InvForm1::basis(m, k)))
            .collect(),
    };
    Connection {
        name: "canonical".into(),
        omega,
    }
}

/// trivial bundle: ω(e_k) = A_k + 1 ⊗ e_k over a gauge potential
pub fn trivial_connection(
    ctx: &BundleContext,
    name: &str,
    potential: &[El],
) -> Result<Connection, ConnError> {
    if ctx.kind != BundleKind::Trivial {
        return Err(ConnError::Shape("trivial bundle required".into()));
    }
    let m = ctx.gcalc.dim();
    if potential.len() != m {
        return Err(ConnError::Shape("potential rank mismatch".into()));
    }
    let omega = (0..m)
        .map(|k| potential[k].add(&ctx.rep.from_inv1(&InvForm1::basis(m, k))))
        .collect();
    Ok(Connection {
        name: name.into(),
        omega,
    })
}

// ---------------------------------------------------------------------------
// basic evaluation

pub fn omega_inv(ctx: &BundleContext, conn: &Connection, v: &InvForm1) -> El {
    let mut acc = ctx.rep.zero(1);
    for (k, c) in v.0.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&conn.omega[k].scale(c));
        }
    }
    acc
}

/// ω π_𝒜(a)
pub fn omega_pi(ctx: &BundleContext, conn: &Connection, a: &HopfElem) -> El {
    omega_inv(ctx, conn, &ctx.gcalc.germs_pi(a))
}

/// hermiticity, verticality (π_v ∘ ω = id) and covariance of the form
pub fn check_connection(ctx: &BundleContext, conn: &Connection) -> Report {
    let mut rep = Report::new(format!("connection {}", conn.name));
    let m = ctx.gcalc.dim();
    let mut herm_ok = true;
    for k in 0..m {
        let starred = ctx.rep.star(&conn.omega[k]);
        let target = omega_inv(ctx, conn, &ctx.gcalc.inv_star(&InvForm1::basis(m, k)));
        if starred != target {
            herm_ok = false;
        }
    }
    rep.push("hermitian", herm_ok, None);
    let mut vert_ok = true;
    for k in 0..m {
        let v = ctx.verticalize1(&conn.omega[k]);
        for (l, b) in v.iter().enumerate() {
            let want = if l == k { HopfElem::one() } else { HopfElem::zero() };
            if *b != want {
                vert_ok = false;
            }
        }
    }
    rep.push("verticalizes to identity", vert_ok, None);
    // F^∧ ω(ϑ) = Σ ω(ϑ_l) ⊗ c_l over the adjoint legs of ϑ
    let mut cov_ok = true;
    if let Ok(vm) = ctx.gcalc.varpi_matrix() {
        for k in 0..m {
            let got = ctx.rep.coact(&conn.omega[k]);
            let mut want: BTreeMap<Word, El> = BTreeMap::new();
            for (l, a) in vm[k].iter().enumerate() {
                for (w, c) in a.terms() {
                    let slot = want
                        .entry(w.clone())
                        .or_insert_with(|| ctx.rep.zero(1));
                    *slot = slot.add(&conn.omega[l].scale(c));
                }
            }
            want.retain(|_, v| !v.is_zero());
            if got != want {
                cov_ok = false;
            }
        }
    }
    rep.push("covariant", cov_ok, None);
    rep
}

// ---------------------------------------------------------------------------
// brackets and curvature

/// embedded δ rows (tensor-square coordinates per basis element)
pub fn delta_rows(ctx: &BundleContext, kind: BracketKind) -> Result<Vec<Row>, ConnError> {
    let m = ctx.gcalc.dim();
    match kind {
        BracketKind::Preimage => Ok((0..m).map(|i| ctx.gcalc.embedded_delta(i)).collect()),
        BracketKind::IotaD => {
            let mut out = Vec::with_capacity(m);
            for i in 0..m {
                let unit = InvForm1::basis(m, i);
                let d2 = ctx.gtab.d(1, &unit.0)?;
                out.push(ctx.gtab.q.lift(2, &d2));
            }
            Ok(out)
        }
    }
}

/// m(x ⊗ y) applied to a tensor-square row
fn pair2(ctx: &BundleContext, x: &[El], y: &[El], row: &Row) -> Result<El, ConnError> {
    let m = ctx.gcalc.dim();
    let mut acc = ctx.rep.zero(x[0].deg() + y[0].deg());
    for p in 0..m {
        for q in 0..m {
            let c = &row[p * m + q];
            if !c.is_zero() {
                acc = acc.add(&ctx.rep.mul(&x[p], &y[q])?.scale(c));
            }
        }
    }
    Ok(acc)
}

/// ⟨x, y⟩ = m(x⊗y)δ per basis element
pub fn bracket_delta(
    ctx: &BundleContext,
    x: &[El],
    y: &[El],
    kind: BracketKind,
) -> Result<Vec<El>, ConnError> {
    let rows = delta_rows(ctx, kind)?;
    rows.iter().map(|r| pair2(ctx, x, y, r)).collect()
}

/// [x, y] = m(x⊗y)c^⊤ per basis element
pub fn bracket_comm(ctx: &BundleContext, x: &[El], y: &[El]) -> Result<Vec<El>, ConnError> {
    let m = ctx.gcalc.dim();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let row = ctx.gcalc.transposed_commutator(i)?;
        out.push(pair2(ctx, x, y, &row)?);
    }
    Ok(out)
}

/// R_ω = dω − ⟨ω, ω⟩
pub fn curvature(
    ctx: &BundleContext,
    conn: &Connection,
    kind: BracketKind,
) -> Result<Vec<El>, ConnError> {
    let sq = bracket_delta(ctx, &conn.omega, &conn.omega, kind)?;
    let mut out = Vec::with_capacity(conn.omega.len());
    for (i, w) in conn.omega.iter().enumerate() {
        out.push(ctx.rep.d(w)?.sub(&sq[i]));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// covariant derivatives

/// D_ω(φ) = dφ − (−1)^∂φ Σ φ_k ω π(c_k) on horizontal forms
pub fn cov_deriv(ctx: &BundleContext, conn: &Connection, phi: &El) -> Result<El, ConnError> {
    if let Some(w) = ctx.horizontal_witness(phi) {
        return Err(ConnError::NotHorizontal(w));
    }
    let mut acc = ctx.rep.d(phi)?;
    let sign = if phi.deg() % 2 == 1 { Scalar::one().neg() } else { Scalar::one() };
    for (w, part) in ctx.rep.coact(phi) {
        let om = omega_pi(ctx, conn, &HopfElem::word(w));
        if om.is_zero() {
            continue;
        }
        acc = acc.add(&ctx.rep.mul(&part, &om)?.scale(&sign).neg());
    }
    Ok(acc)
}

/// D_ω on a tensorial form: D(T) = dT − (−1)^∂T [T, ω]
pub fn cov_deriv_ten(
    ctx: &BundleContext,
    conn: &Connection,
    t: &[El],
) -> Result<Vec<El>, ConnError> {
    let deg = t[0].deg();
    let br = bracket_comm(ctx, t, &conn.omega)?;
    let mut out = Vec::with_capacity(t.len());
    for (i, ti) in t.iter().enumerate() {
        let mut v = ctx.rep.d(ti)?;
        if deg % 2 == 1 {
            v = v.add(&br[i]);
        } else {
            v = v.sub(&br[i]);
        }
        out.push(v);
    }
    Ok(out)
}

/// q_ω(T) = ⟨ω,T⟩ − (−1)^∂T ⟨T,ω⟩ − (−1)^∂T [T,ω]
pub fn q_defect(
    ctx: &BundleContext,
    conn: &Connection,
    t: &[El],
    kind: BracketKind,
) -> Result<Vec<El>, ConnError> {
    let deg = t[0].deg();
    let a = bracket_delta(ctx, &conn.omega, t, kind)?;
    let b = bracket_delta(ctx, t, &conn.omega, kind)?;
    let c = bracket_comm(ctx, t, &conn.omega)?;
    let mut out = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        let tail = b[i].add(&c[i]);
        out.push(if deg % 2 == 1 {
            a[i].add(&tail)
        } else {
            a[i].sub(&tail)
        });
    }
    Ok(out)
}

/// the same defect through the δ-legs of ℓ^ω: q_ω(T)(ϑ) = Σ ℓ^ω(ϑ¹, T(ϑ²))
pub fn q_via_ell(
    ctx: &BundleContext,
    conn: &Connection,
    t: &[El],
    kind: BracketKind,
) -> Result<Vec<El>, ConnError> {
    let m = ctx.gcalc.dim();
    let rows = delta_rows(ctx, kind)?;
    let mut out = Vec::with_capacity(m);
    for row in &rows {
        let mut acc = ctx.rep.zero(t[0].deg() + 1);
        for p in 0..m {
            for q in 0..m {
                let c = &row[p * m + q];
                if !c.is_zero() {
                    acc = acc.add(&ell_defect(ctx, conn, p, &t[q])?.scale(c));
                }
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Bianchi residual: (D_ω − q_ω)(R_ω) − (⟨ω,⟨ω,ω⟩⟩ − ⟨⟨ω,ω⟩,ω⟩)
pub fn bianchi_residual(
    ctx: &BundleContext,
    conn: &Connection,
    kind: BracketKind,
) -> Result<Vec<El>, ConnError> {
    let r = curvature(ctx, conn, kind)?;
    let dr = cov_deriv_ten(ctx, conn, &r)?;
    let qr = q_defect(ctx, conn, &r, kind)?;
    let sq = bracket_delta(ctx, &conn.omega, &conn.omega, kind)?;
    let rhs1 = bracket_delta(ctx, &conn.omega, &sq, kind)?;
    let rhs2 = bracket_delta(ctx, &sq, &conn.omega, kind)?;
    let mut out = Vec::with_capacity(r.len());
    for i in 0..r.len() {
        out.push(dr[i].sub(&qr[i]).sub(&rhs1[i].sub(&rhs2[i])));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// defects with witnesses

/// ℓ^ω(e_p, φ) = ω(e_p)φ − (−1)^∂φ Σ φ_k ω(e_p ∘ c_k)
pub fn ell_defect(
    ctx: &BundleContext,
    conn: &Connection,
    p: usize,
    phi: &El,
) -> Result<El, ConnError> {
    let m = ctx.gcalc.dim();
    let mut acc = ctx.rep.mul(&conn.omega[p], phi)?;
    let sign = if phi.deg() % 2 == 1 { Scalar::one().neg() } else { Scalar::one() };
    for (w, part) in ctx.rep.coact(phi) {
        let tw = ctx
            .gcalc
            .circ_action(&InvForm1::basis(m, p), &HopfElem::word(w));
        if tw.is_zero() {
            continue;
        }
        let om = omega_inv(ctx, conn, &tw);
        acc = acc.add(&ctx.rep.mul(&part, &om)?.scale(&sign).neg());
    }
    Ok(acc)
}

pub struct DefectReport {
    pub tested: Vec<String>,
    pub defects: Vec<(String, El)>,
}

/// horizontal generator sweep per bundle shape: the coefficient generators
/// plus the degree-1 horizontal frame
pub fn hor_generators(ctx: &BundleContext) -> Vec<(String, El)> {
    let mut out = Vec::new();
    let fiber = ctx.rep.fiber();
    for (g, def) in fiber.coeff.gens.iter().enumerate() {
        out.push((
            def.name.clone(),
            ctx.rep.from_coeff(&HopfElem::gen(g as u8)),
        ));
    }
    match (&ctx.rep, ctx.kind) {
        (Rep::V(alg), BundleKind::Homogeneous) => {
            let hd = ctx.homog.as_ref().unwrap();
            let calc = &alg.tab.calc;
            for row in &hd.lperp {
                let v = InvForm1(row.clone());
                out.push((calc.render1(&v), ctx.rep.from_inv1(&v)));
            }
        }
        (Rep::T(t), _) => {
            for ib in 0..t.base.dim(1) {
                let mut row = vec![Scalar::zero(); t.base.dim(1)];
                row[ib] = Scalar::one();
                out.push((
                    t.base.names[1][ib].clone(),
                    El::T(t.from_base(1, &row)),
                ));
            }
        }
        _ => {}
    }
    out
}

/// regularity sweep: ℓ^ω over the structure frame × horizontal generators
pub fn regularity_defects(
    ctx: &BundleContext,
    conn: &Connection,
) -> Result<DefectReport, ConnError> {
    let m = ctx.gcalc.dim();
    let gens = hor_generators(ctx);
    let mut tested = Vec::new();
    let mut defects = Vec::new();
    for p in 0..m {
        for (name, phi) in &gens {
            let witness = format!("l({}, {})", ctx.gcalc.basis[p], name);
            tested.push(witness.clone());
            let v = ell_defect(ctx, conn, p, phi)?;
            if !v.is_zero() {
                defects.push((witness, v));
            }
        }
    }
    Ok(DefectReport { tested, defects })
}

/// multiplicativity defects r_ω(a) = ω π(a⁽¹⁾) ω π(a⁽²⁾) over the ideal
pub fn multiplicativity_defects(
    ctx: &BundleContext,
    conn: &Connection,
) -> Result<DefectReport, ConnError> {
    let mut tested = Vec::new();
    let mut defects = Vec::new();
    for a in &ctx.gcalc.ideal {
        let witness = ctx.group.render_elem(a);
        tested.push(witness.clone());
        let mut acc = ctx.rep.zero(2);
        for ((w1, w2), c) in ctx.group.coproduct(a).0.iter() {
            let l = omega_pi(ctx, conn, &HopfElem::word(w1.clone()));
            if l.is_zero() {
                continue;
            }
            let r = omega_pi(ctx, conn, &HopfElem::word(w2.clone()));
            if r.is_zero() {
                continue;
            }
            acc = acc.add(&ctx.rep.mul(&l, &r)?.scale(c));
        }
        if !acc.is_zero() {
            defects.push((witness, acc));
        }
    }
    Ok(DefectReport { tested, defects })
}

/// the affine t-locus on which every multiplicativity defect vanishes,
/// when the family has exactly one
pub fn multiplicativity_locus(report: &DefectReport) -> Option<Scalar> {
    let mut vals = Vec::new();
    for (_, el) in &report.defects {
        vals.extend(el_scalars(el));
    }
    if vals.is_empty() {
        return None;
    }
    t_common_root(&vals)
}

// ---------------------------------------------------------------------------
// horizontal projection

/// vh-split a 1-form: x = h + Σ b_k ω(e_k); returns the horizontal part
pub fn h1(ctx: &BundleContext, conn: &Connection, x: &El) -> Result<El, ConnError> {
    let v = ctx.verticalize1(x);
    let mut h = x.clone();
    for (k, b) in v.iter().enumerate() {
        if !b.is_zero() {
            let emb = ctx.rep.from_coeff(b);
            h = h.sub(&ctx.rep.mul(&emb, &conn.omega[k])?);
        }
    }
    Ok(h)
}

/// horizontal projection in degree ≤ 2. Degree 2 on a homogeneous bundle
/// solves the vh decomposition word by word against the 𝓛⊥ span; the
/// connection coefficients must be scalar there (canonical families are),
/// and symbolic t pivots are refused by the scalar layer.
pub fn h_omega(ctx: &BundleContext, conn: &Connection, x: &El) -> Result<El, ConnError> {
    match x.deg() {
        0 => Ok(x.clone()),
        1 => h1(ctx, conn, x),
        2 => match (&ctx.rep, x) {
            (Rep::T(t), El::T(f)) => {
                // strip each fibre leg, then cancel it through the matching ω
                let m = ctx.gcalc.dim();
                let mut strips = vec![t.zero(1); m];
                for ((kb, ib), v) in &f.comps {
                    if v.deg == 1 {
                        for (i, b) in v.comps.iter().enumerate() {
                            let mut w = t.zero(1);
                            w.insert(*kb, *ib, t.fiber.from_coeff(b));
                            strips[i] = strips[i].add(&w);
                        }
                    }
                }
                let mut h = x.clone();
                for (i, s) in strips.into_iter().enumerate() {
                    if !s.is_zero() {
                        h = h.sub(&ctx.rep.mul(&El::T(s), &conn.omega[i])?);
                    }
                }
                Ok(h)
            }
            (Rep::V(alg), El::V(_)) => {
                let hd = ctx
                    .homog
                    .as_ref()
                    .ok_or_else(|| ConnError::Shape("vh split needs bundle data".into()))?;
                // ω must be 1 ⊗ θ with scalar frame coordinates
                let El::V(om) = &conn.omega[0] else { unreachable!() };
                let mut theta = vec![Scalar::zero(); alg.dim(1)];
                for (i, b) in om.comps.iter().enumerate() {
                    for (w, c) in b.terms() {
                        if !w.is_empty() {
                            return Err(ConnError::Shape(
                                "vh split needs a scalar-framed connection".into(),
                            ));
                        }
                        theta[i] = theta[i].add(c);
                    }
                }
                let mut cols: Vec<Row> = Vec::new();
                for l in &hd.lperp {
                    cols.push(alg.tab.mul(1, l, 1, &theta)?);
                }
                // augment with the horizontal span so `express` solves mod hor²
                let mut gens = cols.clone();
                for a in &hd.lperp {
                    for b in &hd.lperp {
                        gens.push(alg.tab.mul(1, a, 1, b)?);
                    }
                }
                let El::V(xv) = x else { unreachable!() };
                let mut hprime = alg.zero(1);
                for (w, row) in bundle_word_rows(xv) {
                    if let Some(sol) = express(&row, &gens) {
                        for (i, c) in sol.iter().take(cols.len()).enumerate() {
                            if !c.is_zero() {
                                let mut contrib = alg.zero(1);
                                for (p, lc) in hd.lperp[i].iter().enumerate() {
                                    if !lc.is_zero() {
                                        contrib.comps[p] = contrib.comps[p]
                                            .add(&HopfElem::term(w.clone(), c.mul(lc)));
                                    }
                                }
                                hprime = hprime.add(&contrib);
                            }
                        }
                    } else {
                        return Err(ConnError::Shape(format!(
                            "vh split failed on coefficient word {}",
                            alg.coeff.render_word(&w)
                        )));
                    }
                }
                Ok(x.sub(&ctx.rep.mul(&El::V(hprime), &conn.omega[0])?))
            }
            _ => panic!("mixed representations"),
        },
        d => Err(ConnError::Shape(format!(
            "horizontal projection implemented for degree <= 2, got {d}"
        ))),
    }
}

fn bundle_word_rows(v: &crate::vert::VForm) -> BTreeMap<Word, Row> {
    let mut out: BTreeMap<Word, Row> = BTreeMap::new();
    for (i, b) in v.comps.iter().enumerate() {
        for (w, c) in b.terms() {
            out.entry(w.clone())
                .or_insert_with(|| vec![Scalar::zero(); v.comps.len()])[i] = c.clone();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// scalar plumbing over elements

pub fn el_scalars(x: &El) -> Vec<Scalar> {
    fn vf(v: &crate::vert::VForm, out: &mut Vec<Scalar>) {
        for b in &v.comps {
            for (_, c) in b.terms() {
                out.push(c.clone());
            }
        }
    }
    let mut out = Vec::new();
    match x {
        El::V(v) => vf(v, &mut out),
        El::T(t) => {
            for v in t.comps.values() {
                vf(v, &mut out);
            }
        }
    }
    out
}

pub fn el_t_free(x: &El) -> bool {
    el_scalars(x).iter().all(|c| c.t_deg() == 0)
}

fn el_map_scalars(x: &El, f: &mut dyn FnMut(&Scalar) -> Scalar) -> El {
    fn hopf(b: &HopfElem, f: &mut dyn FnMut(&Scalar) -> Scalar) -> HopfElem {
        let mut out = HopfElem::zero();
        for (w, c) in b.terms() {
            out.add_term(w.clone(), f(c));
        }
        out
    }
    fn vf(v: &crate::vert::VForm, f: &mut dyn FnMut(&Scalar) -> Scalar) -> crate::vert::VForm {
        crate::vert::VForm {
            deg: v.deg,
            comps: v.comps.iter().map(|b| hopf(b, f)).collect(),
        }
    }
    match x {
        El::V(v) => El::V(vf(v, f)),
        El::T(t) => {
            let mut out = crate::bundle::TrivForm {
                deg: t.deg,
                comps: BTreeMap::new(),
            };
            for ((kb, ib), v) in &t.comps {
                out.insert(*kb, *ib, vf(v, f));
            }
            El::T(out)
        }
    }
}

pub fn el_subst_t(x: &El, t0: &Scalar) -> Result<El, ScalarError> {
    let mut err: Option<ScalarError> = None;
    let out = el_map_scalars(x, &mut |c| match c.subst_t(t0) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            Scalar::zero()
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

pub fn el_t_derivative(x: &El) -> El {
    el_map_scalars(x, &mut |c| c.t_derivative())
}

pub fn el_t_integral_01(x: &El) -> El {
    el_map_scalars(x, &mut |c| c.t_integral_01())
}

// ---------------------------------------------------------------------------
// Weil inputs and transgression

pub struct WeilReport {
    pub value: El,
    pub invariant_input: bool,
    pub in_base: bool,
    pub closed: bool,
}

/// R_ω^⊗ on ϑ = e_{i₁} ⊗ … ⊗ e_{i_k}
pub fn curvature_power(
    ctx: &BundleContext,
    r: &[El],
    idx: &[usize],
) -> Result<El, ConnError> {
    let mut acc = ctx.rep.one();
    for &i in idx {
        acc = ctx.rep.mul(&acc, &r[i])?;
    }
    Ok(acc)
}

/// evaluate the characteristic input on ζ^⊗k and check its class properties
pub fn weil_eval(
    ctx: &BundleContext,
    conn: &Connection,
    k: usize,
    kind: BracketKind,
) -> Result<WeilReport, ConnError> {
    let r = curvature(ctx, conn, kind)?;
    let idx = vec![0usize; k];
    let value = curvature_power(ctx, &r, &idx)?;
    // ϖ^⊗k-invariance of the input
    let vm = ctx.gcalc.varpi_matrix()?;
    let mut inv = true;
    for &i in &idx {
        for (l, a) in vm[i].iter().enumerate() {
            let want = if l == i { HopfElem::one() } else { HopfElem::zero() };
            if *a != want {
                inv = false;
            }
        }
    }
    let in_base = ctx.in_base_forms(&value);
    let closed = if value.deg() + 1 <= ctx.rep.cap() {
        ctx.rep.d(&value)?.is_zero()
    } else {
        true
    };
    Ok(WeilReport {
        value,
        invariant_input: inv,
        in_base,
        closed,
    })
}

pub struct TransgressReport {
    pub derivative_matches: bool,
    pub integral: El,
    pub residual: El,
}

/// connect ω to τ along ω_t = ω + t(τ − ω); the curvature family obeys
/// (d/dt) R_t = D_{ω_t}(τ − ω), and the integrated potential closes the
/// difference of the k-th curvature powers
pub fn transgress(
    ctx: &BundleContext,
    om: &Connection,
    tau: &Connection,
    k: usize,
    kind: BracketKind,
) -> Result<TransgressReport, ConnError> {
    if k == 0 {
        return Err(ConnError::Shape("transgression needs k >= 1".into()));
    }
    for e in om.omega.iter().chain(tau.omega.iter()) {
        if !el_t_free(e) {
            return Err(ConnError::Shape(
                "transgression endpoints must be t-free".into(),
            ));
        }
    }
    let m = ctx.gcalc.dim();
    let phi: Vec<El> = (0..m).map(|i| tau.omega[i].sub(&om.omega[i])).collect();
    let omt = Connection {
        name: "family".into(),
        omega: (0..m)
            .map(|i| om.omega[i].add(&phi[i].scale(&Scalar::t())))
            .collect(),
    };
    let rt = curvature(ctx, &omt, kind)?;
    let dphi = cov_deriv_ten(ctx, &omt, &phi)?;
    let mut derivative_matches = true;
    for i in 0..m {
        if el_t_derivative(&rt[i]) != dphi[i] {
            derivative_matches = false;
        }
    }
    // ψ_t(ζ^⊗k) = Σ_p R_t^{p−1} φ R_t^{k−p}
    let mut psi = ctx.rep.zero(2 * k - 1);
    for p in 0..k {
        let mut acc = ctx.rep.one();
        for q in 0..k {
            let factor = if q == p { &phi[0] } else { &rt[0] };
            acc = ctx.rep.mul(&acc, factor)?;
        }
        psi = psi.add(&acc);
    }
    let integral = el_t_integral_01(&psi);
    let r0 = curvature(ctx, om, kind)?;
    let r1 = curvature(ctx, tau, kind)?;
    let p0 = curvature_power(ctx, &r0, &vec![0usize; k])?;
    let p1 = curvature_power(ctx, &r1, &vec![0usize; k])?;
    let residual = p1.sub(&p0).sub(&ctx.rep.d(&integral)?);
    Ok(TransgressReport {
        derivative_matches,
        integral,
        residual,
    })
}

// ---------------------------------------------------------------------------
// gauge operators (bundles with an explicit vertical splitting)

/// gauge field: values on the structure frame, degree-0 coefficients
#[derive(Clone)]
pub struct GaugeEl {
    pub name: String,
    pub vals: Vec<HopfElem>,
}

fn splitting_required(ctx: &BundleContext) -> Result<(), ConnError> {
    match ctx.kind {
        BundleKind::Homogeneous => Err(ConnError::Shape(
            "gauge operators need an explicit vertical splitting".into(),
        )),
        _ => Ok(()),
    }
}

/// tensoriality and hermiticity of a gauge field
pub fn gauge_check(ctx: &BundleContext, z: &GaugeEl) -> Report {
    let mut rep = Report::new(format!("gauge field {}", z.name));
    let m = ctx.gcalc.dim();
    let mut inv_ok = true;
    for v in &z.vals {
        if !ctx.rep.is_invariant(&ctx.rep.from_coeff(v)) {
            inv_ok = false;
        }
    }
    rep.push("tensorial", inv_ok, None);
    let mut herm_ok = true;
    for kk in 0..m {
        let st = ctx.gcalc.inv_star(&InvForm1::basis(m, kk));
        let mut want = HopfElem::zero();
        for (l, c) in st.0.iter().enumerate() {
            if !c.is_zero() {
                want = want.add(&z.vals[l].scale(c));
            }
        }
        let coeff = ctx.rep.fiber().coeff.clone();
        if coeff.star(&z.vals[kk]) != want {
            herm_ok = false;
        }
    }
    rep.push("hermitian", herm_ok, None);
    rep
}

/// ι_ζ: strip the vertical leg and substitute the gauge value,
/// ι_ζ(w) = −(−1)^∂w Σ u_k ζ(η_k)
pub fn iota(ctx: &BundleContext, z: &GaugeEl, x: &El) -> Result<El, ConnError> {
    splitting_required(ctx)?;
    if x.deg() == 0 {
        return Ok(ctx.rep.zero(0));
    }
    let sign = if x.deg() % 2 == 1 { Scalar::one() } else { Scalar::one().neg() };
    let mut acc = ctx.rep.zero(x.deg() - 1);
    match (&ctx.rep, x) {
        (Rep::V(alg), El::V(v)) => {
            // only degree-1 vertical legs exist (Γ^∧2 = 0)
            if v.deg == 1 {
                for (i, b) in v.comps.iter().enumerate() {
                    let prod = alg.coeff.mul(b, &z.vals[i]);
                    acc = acc.add(&ctx.rep.from_coeff(&prod).scale(&sign));
                }
            }
        }
        (Rep::T(t), El::T(f)) => {
            for ((kb, ib), v) in &f.comps {
                if v.deg != 1 {
                    continue;
                }
                for (i, b) in v.comps.iter().enumerate() {
                    let prod = t.fiber.coeff.mul(b, &z.vals[i]);
                    if prod.is_zero() {
                        continue;
                    }
                    let mut w = t.zero(x.deg() - 1);
                    w.insert(*kb, *ib, t.fiber.from_coeff(&prod));
                    acc = acc.add(&El::T(w).scale(&sign));
                }
            }
        }
        _ => panic!("mixed representations"),
    }
    Ok(acc)
}

/// Lie derivative ℓ_ζ = d ι_ζ + ι_ζ d
pub fn lie(ctx: &BundleContext, z: &GaugeEl, x: &El) -> Result<El, ConnError> {
    let a = ctx.rep.d(&iota(ctx, z, x)?)?;
    let b = iota(ctx, z, &ctx.rep.d(x)?)?;
    Ok(a.add(&b))
}

/// Lie bracket of gauge fields: [ζ,ξ] = m(ζ⊗ξ)c^⊤
pub fn gauge_bracket(
    ctx: &BundleContext,
    z: &GaugeEl,
    x: &GaugeEl,
) -> Result<GaugeEl, ConnError> {
    let m = ctx.gcalc.dim();
    let coeff = ctx.rep.fiber().coeff.clone();
    let mut vals = Vec::with_capacity(m);
    for i in 0..m {
        let row = ctx.gcalc.transposed_commutator(i)?;
        let mut acc = HopfElem::zero();
        for p in 0..m {
            for q in 0..m {
                let c = &row[p * m + q];
                if !c.is_zero() {
                    acc = acc.add(&coeff.mul(&z.vals[p], &x.vals[q]).scale(c));
                }
            }
        }
        vals.push(acc);
    }
    Ok(GaugeEl {
        name: format!("[{},{}]", z.name, x.name),
        vals,
    })
}
