//! Exact integer matrices and Smith normal form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer matrix, row-major, with arbitrary-precision entries:
/// unimodular transforms can outgrow any fixed width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntegerMatrix { rows: r, cols: c, data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    /// Entry `(i, j)` when it fits an `i64`.
    pub fn get_i64(&self, i: usize, j: usize) -> Option<i64> {
        self.get(i, j).to_i64()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = f * self.get(src, j);
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = f * self.get(i, src);
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = -x;
        }
    }
}

/// Smith normal form: returns `(U, D, V)` with `D = U·A·V` diagonal,
/// non-negative, each diagonal entry dividing the next, and `U`, `V` unimodular.
pub fn smith_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, IntegerMatrix) {
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(a.rows);
    let mut v = IntegerMatrix::identity(a.cols);
    diagonalize(&mut d, Some(&mut u), Some(&mut v));
    (u, d, v)
}

/// Diagonal of the Smith normal form, without transforms.
pub fn smith_diagonal(a: &IntegerMatrix) -> Vec<BigInt> {
    let mut d = a.clone();
    diagonalize(&mut d, None, None);
    (0..d.rows.min(d.cols)).map(|k| d.get(k, k).clone()).collect()
}

fn diagonalize(d: &mut IntegerMatrix, mut u: Option<&mut IntegerMatrix>, mut v: Option<&mut IntegerMatrix>) {
    let (m, n) = (d.rows, d.cols);
    let mut t = 0;
    while t < m.min(n) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let mut piv: Option<(usize, usize, BigInt)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j).abs();
                    if !x.is_zero() && piv.as_ref().is_none_or(|(_, _, b)| x < *b) {
                        piv = Some((i, j, x));
                    }
                }
            }
            let Some((pi, pj, _)) = piv else { break };
            d.swap_rows(t, pi);
            d.swap_cols(t, pj);
            if let Some(u) = u.as_deref_mut() {
                u.swap_rows(t, pi);
            }
            if let Some(v) = v.as_deref_mut() {
                v.swap_cols(t, pj);
            }
            let p = d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..m {
                let q = -nearest_quotient(d.get(i, t), &p);
                if !q.is_zero() {
                    d.add_row(i, t, &q);
                    if let Some(u) = u.as_deref_mut() {
                        u.add_row(i, t, &q);
                    }
                }
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = -nearest_quotient(d.get(t, j), &p);
                if !q.is_zero() {
                    d.add_col(j, t, &q);
                    if let Some(v) = v.as_deref_mut() {
                        v.add_col(j, t, &q);
                    }
                }
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                None => break,
                Some(i) => {
                    d.add_row(t, i, &BigInt::one());
                    if let Some(u) = u.as_deref_mut() {
                        u.add_row(t, i, &BigInt::one());
                    }
                }
            }
        }
        if t >= m.min(n) || d.get(t, t).is_zero() {
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
}

/// Quotient of `a / b` rounded to the nearest integer.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    // the floor remainder has the sign of b, so a − (q + 1)·b = r − b is
    // the other candidate
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = r.abs() * 2;
    if twice > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Nonzero invariant factors of a sparse integer matrix given as
/// `(row, col, value)` triples. Unit pivots are eliminated sparsely; the
/// residual block goes through the dense normal form.
pub fn invariant_factors(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Vec<i64> {
    let mut row: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); rows];
    let mut col: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for &(i, j, x) in entries {
        if x != 0 {
            *row[i].entry(j).or_insert(0) += x;
            col[j].push(i);
        }
    }
    for r in row.iter_mut() {
        r.retain(|_, x| *x != 0);
    }
    let mut alive_row = vec![true; rows];
    let mut alive_col = vec![true; cols];
    let mut units = 0usize;
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by_key(|&i| row[i].len());
    let mut progress = true;
    while progress {
        progress = false;
        for &r in &order {
            if !alive_row[r] {
                continue;
            }
            let Some((&c, &p)) = row[r].iter().filter(|(_, x)| x.abs() == 1).min_by_key(|(c, _)| col[**c].len()) else {
                continue;
            };
            let pivot_row: Vec<(usize, i64)> = row[r].iter().map(|(&j, &x)| (j, x)).collect();
            let others: Vec<usize> = std::mem::take(&mut col[c]);
            for &i in &others {
                if i == r || !alive_row[i] {
                    continue;
                }
                let Some(&a) = row[i].get(&c) else { continue };
                let f = -a * p; // p = ±1 so a / p = a * p
                for &(j, x) in &pivot_row {
                    let e = row[i].entry(j).or_insert(0);
                    let was_zero = *e == 0;
                    *e += f * x;
                    if *e == 0 {
                        row[i].remove(&j);
                    } else if was_zero {
                        col[j].push(i);
                    }
                }
            }
            alive_row[r] = false;
            alive_col[c] = false;
            row[r].clear();
            units += 1;
            progress = true;
        }
        if progress {
            order.retain(|&i| alive_row[i]);
            order.sort_by_key(|&i| row[i].len());
        }
    }
    let rest_rows: Vec<usize> = (0..rows).filter(|&i| alive_row[i] && !row[i].is_empty()).collect();
    let rest_cols: Vec<usize> = (0..cols).filter(|&j| alive_col[j]).collect();
    let mut out = vec![1i64; units];
    if !rest_rows.is_empty() {
        let cidx: BTreeMap<usize, usize> = rest_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut dense = IntegerMatrix::zeros(rest_rows.len(), rest_cols.len());
        for (k, &i) in rest_rows.iter().enumerate() {
            for (&j, &x) in &row[i] {
                dense.set(k, cidx[&j], BigInt::from(x));
            }
        }
        for x in smith_diagonal(&dense) {
            if !x.is_zero() {
                out.push(x.to_i64().expect("invariant factor fits i64"));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
