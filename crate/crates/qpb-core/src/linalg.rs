//! Exact dense linear algebra over the scalar field.
//!
//! Everything is tiny (dimensions are products of first-order basis sizes,
//! so <= a few hundred), but coefficients are rational functions, so the
//! point is exactness and determinism, not speed: fixed basis order, fixed
//! pivot rule (leftmost nonzero column, first insertable row), monic fully
//! reduced echelon rows. Canonical representatives are unique.

use crate::scalar::Scalar;

pub type Row = Vec<Scalar>;

pub fn zero_row(n: usize) -> Row {
    vec![Scalar::zero(); n]
}

pub fn row_is_zero(r: &Row) -> bool {
    r.iter().all(|c| c.is_zero())
}

pub fn row_eq(a: &Row, b: &Row) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).all(|(x, y)| x.sub(y).is_zero())
}

pub fn row_add(a: &Row, b: &Row) -> Row {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn row_sub(a: &Row, b: &Row) -> Row {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn row_scale(a: &Row, c: &Scalar) -> Row {
    a.iter().map(|x| x.mul(c)).collect()
}

/// tensor product of coordinate vectors (row-major nesting)
pub fn kron(a: &Row, b: &Row) -> Row {
    let mut out = zero_row(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i * b.len() + j] = x.mul(y);
            }
        }
    }
    out
}

/// linear-map application: images[i] is the image of basis vector i
pub fn apply_cols(images: &[Row], v: &Row) -> Row {
    let m = images.first().map(|r| r.len()).unwrap_or(0);
    let mut out = zero_row(m);
    for (c, img) in v.iter().zip(images) {
        if !c.is_zero() {
            out = row_add(&out, &row_scale(img, c));
        }
    }
    out
}

/// Incremental reduced row echelon form. Rows are monic at their pivot and
/// reduced against each other in both directions, so `reduce` yields the
/// canonical representative of a coset.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    /// pivot rows sorted by pivot column
    pub rows: Vec<Row>,
    /// pivot column of each row (strictly increasing)
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: impl IntoIterator<Item = Row>) -> Self {
        let mut e = Echelon::new(cols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// reduce against the current rows (canonical coset representative)
    pub fn reduce(&self, row: &Row) -> Row {
        let mut r = row.clone();
        for (p, er) in self.pivots.iter().zip(&self.rows) {
            if !r[*p].is_zero() {
                let c = r[*p].clone();
                for k in *p..self.cols {
                    r[k] = r[k].sub(&er[k].mul(&c));
                }
            }
        }
        r
    }

    pub fn contains(&self, row: &Row) -> bool {
        row_is_zero(&self.reduce(row))
    }

    /// insert a row; returns true if the rank grew
    pub fn insert(&mut self, row: Row) -> bool {
        let mut r = self.reduce(&row);
        let Some(p) = r.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let lead = r[p].clone();
        let inv = lead.inv().expect("echelon pivot must be invertible");
        for k in p..self.cols {
            r[k] = r[k].mul(&inv);
        }
        // back-substitute into existing rows
        for er in self.rows.iter_mut() {
            if !er[p].is_zero() {
                let c = er[p].clone();
                for k in p..self.cols {
                    er[k] = er[k].sub(&r[k].mul(&c));
                }
            }
        }
        let at = self.pivots.partition_point(|q| *q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// columns without a pivot
    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Express `target` as a linear combination of `gens` (coefficient vector),
/// or None if it is outside their span.
pub fn express(target: &Row, gens: &[Row]) -> Option<Row> {
    let n = target.len();
    // echelon on gens with augmented coefficient tracking
    let mut rows: Vec<(Row, Row)> = Vec::new(); // (vector, coeffs over gens)
    for (i, g) in gens.iter().enumerate() {
        let mut v = g.clone();
        let mut c = zero_row(gens.len());
        c[i] = Scalar::one();
        for (rv, rc) in &rows {
            let p = rv.iter().position(|x| !x.is_zero()).unwrap();
            if !v[p].is_zero() {
                let f = v[p].clone();
                v = row_sub(&v, &row_scale(rv, &f));
                c = row_sub(&c, &row_scale(rc, &f));
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].inv().expect("echelon pivot must be invertible");
            v = row_scale(&v, &inv);
            c = row_scale(&c, &inv);
            rows.push((v, c));
        }
    }
    let mut v = target.clone();
    let mut out = zero_row(gens.len());
    for (rv, rc) in &rows {
        let p = rv.iter().position(|x| !x.is_zero()).unwrap();
        if !v[p].is_zero() {
            let f = v[p].clone();
            v = row_sub(&v, &row_scale(rv, &f));
            out = row_add(&out, &row_scale(rc, &f));
        }
    }
    let _ = n;
    if row_is_zero(&v) {
        Some(out)
    } else {
        None
    }
}

/// Null space of the linear map e_i -> images[i]; basis rows over the source.
pub fn kernel(images: &[Row]) -> Vec<Row> {
    let n = images.len();
    let m = images.first().map(|r| r.len()).unwrap_or(0);
    // equations: for each output coordinate r, sum_i v_i images[i][r] = 0
    let mut eqs = Echelon::new(n);
    for r in 0..m {
        let row: Row = (0..n).map(|i| images[i][r].clone()).collect();
        eqs.insert(row);
    }
    let mut out = Vec::new();
    for f in eqs.free_cols() {
        let mut v = zero_row(n);
        v[f] = Scalar::one();
        for (p, er) in eqs.pivots.iter().zip(&eqs.rows) {
            if !er[f].is_zero() {
                v[*p] = er[f].neg();
            }
        }
        out.push(v);
    }
    out
}

/// "(c)*name" terms joined by " + "; zeros skipped; "0" when empty.
pub fn render_row(row: &Row, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (c, name) in row.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            parts.push(name.clone());
        } else if c.add(&Scalar::one()).is_zero() {
            parts.push(format!("-{}", name));
        } else {
            parts.push(format!("({})*{}", c, name));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
