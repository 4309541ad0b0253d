//! Finite graded-differential *-algebras over the scalar field, presented by
//! explicit basis tables per degree. These model the base-space calculus
//! Ω(M) of a trivial bundle: Ω⁰(M) is spanned by 1, higher degrees by
//! anticommuting words in the degree-1 generators.

use crate::linalg::{render_row, row_add, row_is_zero, row_scale, zero_row, Row};
use crate::report::Report;
use crate::scalar::Scalar;

/// Base calculus with basis `names[k]` in degree k; degree 0 is always ["1"].
/// Products, the differential and the star are stored as structure tables on
/// the basis. Coefficients of actual forms live elsewhere; everything here is
/// scalar-valued.
#[derive(Clone, Debug)]
pub struct BaseDga {
    pub name: String,
    pub names: Vec<Vec<String>>,
    /// subsets[k][i] = generator index set of basis word i (degree k)
    subsets: Vec<Vec<Vec<usize>>>,
    /// d_gen[g] = differential of generator g, degree-2 coordinates
    d_gen: Vec<Row>,
}

impl BaseDga {
    /// exterior algebra on `gens` anticommuting hermitian degree-1 generators;
    /// `d_gen[g]` lists (i, j, coeff) triples meaning d(e_g) += coeff·e_i e_j
    pub fn exterior(name: &str, gens: &[&str], d_gen: &[Vec<(usize, usize, Scalar)>]) -> BaseDga {
        let m = gens.len();
        let mut subsets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(m + 1);
        let mut names: Vec<Vec<String>> = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let sets = k_subsets(m, k);
            names.push(
                sets.iter()
                    .map(|s| {
                        if s.is_empty() {
                            "1".to_string()
                        } else {
                            s.iter().map(|&g| gens[g]).collect::<Vec<_>>().join("*")
                        }
                    })
                    .collect(),
            );
            subsets.push(sets);
        }
        let base = BaseDga {
            name: name.into(),
            names,
            subsets,
            d_gen: vec![],
        };
        let mut d_rows = Vec::with_capacity(m);
        for spec in d_gen {
            let mut row = zero_row(base.dim(2));
            for (i, j, c) in spec {
                let r = base.mul_word(&[*i], &[*j]);
                row = row_add(&row, &row_scale(&r, c));
            }
            d_rows.push(row);
        }
        assert_eq!(d_rows.len(), m);
        BaseDga { d_gen: d_rows, ..base }
    }

    pub fn top(&self) -> usize {
        self.names.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        if k >= self.names.len() {
            0
        } else {
            self.names[k].len()
        }
    }

    /// product of two generator words, as a row over the joint degree
    fn mul_word(&self, a: &[usize], b: &[usize]) -> Row {
        let k = a.len() + b.len();
        let mut out = zero_row(self.dim(k));
        if k > self.top() {
            return out;
        }
        let mut merged: Vec<usize> = a.to_vec();
        merged.extend_from_slice(b);
        // sort by adjacent transpositions, tracking the sign; repeats kill
        let mut sign_neg = false;
        for i in 1..merged.len() {
            let mut j = i;
            while j > 0 && merged[j - 1] >= merged[j] {
                if merged[j - 1] == merged[j] {
                    return out;
                }
                merged.swap(j - 1, j);
                sign_neg = !sign_neg;
                j -= 1;
            }
        }
        let idx = self.subsets[k]
            .iter()
            .position(|s| *s == merged)
            .expect("subset basis");
        out[idx] = if sign_neg { Scalar::one().neg() } else { Scalar::one() };
        out
    }

    /// structure row of basis product: degree (k1+k2) coordinates
    pub fn mul_basis(&self, k1: usize, i1: usize, k2: usize, i2: usize) -> Row {
        self.mul_word(&self.subsets[k1][i1].clone(), &self.subsets[k2][i2].clone())
    }

    /// differential of a basis word, degree k+1 coordinates
    pub fn d_basis(&self, k: usize, i: usize) -> Row {
        let word = self.subsets[k][i].clone();
        let mut out = zero_row(self.dim(k + 1));
        for (pos, &g) in word.iter().enumerate() {
            if row_is_zero(&self.d_gen[g]) {
                continue;
            }
            // d(e_g) inserted at pos, with the antiderivation sign
            let pre = &word[..pos];
            let suf = &word[pos + 1..];
            for (two, c) in self.d_gen[g].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mid = self.subsets[2][two].clone();
                let mut r = self.mul_word(pre, &mid);
                if row_is_zero(&r) {
                    continue;
                }
                // multiply by the suffix word
                let kk = pre.len() + 2;
                let mut acc = zero_row(self.dim(kk + suf.len()));
                for (q, rc) in r.iter().enumerate() {
                    if !rc.is_zero() {
                        let sub = self.subsets[kk][q].clone();
                        acc = row_add(&acc, &row_scale(&self.mul_word(&sub, suf), rc));
                    }
                }
                r = acc;
                let c = if pos % 2 == 1 { c.neg() } else { c.clone() };
                out = row_add(&out, &row_scale(&r, &c));
            }
        }
        out
    }

    /// star fixes every basis word (hermitian generators; the reversal sign
    /// cancels against the graded star sign), so only coefficients conjugate
    pub fn render(&self, k: usize, v: &Row) -> String {
        render_row(v, &self.names[k])
    }

    /// structural laws replayed on the tables
    pub fn validate(&self) -> Report {
        let mut rep = Report::new(format!("base calculus {}", self.name));
        let m = self.dim(1);
        // graded commutativity and associativity on basis triples
        let mut assoc_ok = true;
        let mut comm_ok = true;
        for k1 in 0..=self.top() {
            for i1 in 0..self.dim(k1) {
                for k2 in 0..=self.top() {
                    for i2 in 0..self.dim(k2) {
                        if k1 + k2 <= self.top() {
                            let ab = self.mul_basis(k1, i1, k2, i2);
                            let ba = self.mul_basis(k2, i2, k1, i1);
                            let sgn = if (k1 * k2) % 2 == 1 {
                                Scalar::one().neg()
                            } else {
                                Scalar::one()
                            };
                            if !row_is_zero(&row_add(&ab, &row_scale(&ba, &sgn.neg()))) {
                                comm_ok = false;
                            }
                        }
                        for k3 in 0..=self.top() {
                            if k1 + k2 + k3 > self.top() {
                                continue;
                            }
                            for i3 in 0..self.dim(k3) {
                                let ab = self.mul_basis(k1, i1, k2, i2);
                                let mut lhs = zero_row(self.dim(k1 + k2 + k3));
                                for (q, c) in ab.iter().enumerate() {
                                    if !c.is_zero() {
                                        lhs = row_add(
                                            &lhs,
                                            &row_scale(&self.mul_basis(k1 + k2, q, k3, i3), c),
                                        );
                                    }
                                }
                                let bc = self.mul_basis(k2, i2, k3, i3);
                                let mut rhs = zero_row(self.dim(k1 + k2 + k3));
                                for (q, c) in bc.iter().enumerate() {
                                    if !c.is_zero() {
                                        rhs = row_add(
                                            &rhs,
                                            &row_scale(&self.mul_basis(k1, i1, k2 + k3, q), c),
                                        );
                                    }
                                }
                                if !row_is_zero(&row_add(&lhs, &row_scale(&rhs, &Scalar::one().neg()))) {
                                    assoc_ok = false;
                                }
                            }
                        }
                    }
                }
            }
        }
        rep.push("associative", assoc_ok, None);
        rep.push("graded-commutative", comm_ok, None);
        // d² = 0 on generators (antiderivation extension then gives it everywhere)
        let mut dd_ok = true;
        for g in 0..m {
            let dg = &self.d_gen[g];
            let mut ddg = zero_row(self.dim(3));
            for (two, c) in dg.iter().enumerate() {
                if !c.is_zero() {
                    ddg = row_add(&ddg, &row_scale(&self.d_basis(2, two), c));
                }
            }
            if !row_is_zero(&ddg) {
                dd_ok = false;
            }
        }
        rep.push("d-squared-zero", dd_ok, None);
        // Leibniz on basis pairs
        let mut leib_ok = true;
        for k1 in 0..self.top() {
            for i1 in 0..self.dim(k1) {
                for k2 in 0..self.top() {
                    if k1 + k2 + 1 > self.top() {
                        continue;
                    }
                    for i2 in 0..self.dim(k2) {
                        let prod = self.mul_basis(k1, i1, k2, i2);
                        let mut lhs = zero_row(self.dim(k1 + k2 + 1));
                        for (q, c) in prod.iter().enumerate() {
                            if !c.is_zero() {
                                lhs = row_add(&lhs, &row_scale(&self.d_basis(k1 + k2, q), c));
                            }
                        }
                        let mut rhs = zero_row(self.dim(k1 + k2 + 1));
                        let da = self.d_basis(k1, i1);
                        for (q, c) in da.iter().enumerate() {
                            if !c.is_zero() {
                                rhs = row_add(&rhs, &row_scale(&self.mul_basis(k1 + 1, q, k2, i2), c));
                            }
                        }
                        let db = self.d_basis(k2, i2);
                        let sgn = if k1 % 2 == 1 { Scalar::one().neg() } else { Scalar::one() };
                        for (q, c) in db.iter().enumerate() {
                            if !c.is_zero() {
                                rhs = row_add(
                                    &rhs,
                                    &row_scale(&self.mul_basis(k1, i1, k2 + 1, q), &c.mul(&sgn)),
                                );
                            }
                        }
                        if !row_is_zero(&row_add(&lhs, &row_scale(&rhs, &Scalar::one().neg()))) {
                            leib_ok = false;
                        }
                    }
                }
            }
        }
        rep.push("leibniz", leib_ok, None);
        rep
    }
}

fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > m {
        return vec![];
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// flat plane: two anticommuting hermitian 1-forms, d = 0
pub fn base_flat2() -> BaseDga {
    BaseDga::exterior("flat2", &["e1", "e2"], &[vec![], vec![]])
}

/// curved threefold: de1 = e2 e3, the other generators closed
pub fn base_curved3() -> BaseDga {
    BaseDga::exterior(
        "curved3",
        &["e1", "e2", "e3"],
        &[vec![(1, 2, Scalar::one())], vec![], vec![]],
    )
}
