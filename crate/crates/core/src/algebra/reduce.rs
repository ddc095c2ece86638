//! Sparse column reduction over a prime field.

/// Sparse vector over `F_p`: sorted `(index, value)` with values in `1..p`.
pub type SparseVec = Vec<(u32, u64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    pub p: u64,
}

impl Field {
    pub const F2: Field = Field { p: 2 };
    /// Large prime standing in for the rationals.
    pub const BIG: Field = Field { p: 2_147_483_647 };

    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn inv(&self, a: u64) -> u64 {
        // Fermat
        let (mut base, mut e, mut acc) = (a % self.p, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Lift to the symmetric range `(−p/2, p/2]`.
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// `a + f·b` for sparse vectors.
    pub fn axpy(&self, a: &SparseVec, f: u64, b: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                let v = self.mul(f, b[j].1);
                if v != 0 {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = (a[i].1 + self.mul(f, b[j].1)) % self.p;
                if v != 0 {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }
}

/// Column-reduced matrix: every nonzero reduced column has a distinct low
/// (largest row index).
#[derive(Clone, Debug)]
pub struct Reduction {
    pub field: Field,
    /// Reduced columns, one per input column.
    pub reduced: Vec<SparseVec>,
    /// Column operations: `reduced[j] = Σ ops[j][k] · input[k]`, if tracked.
    pub ops: Option<Vec<SparseVec>>,
    /// `low_owner[row] = column` whose reduced low is `row`.
    pub low_owner: Vec<Option<u32>>,
}

impl Reduction {
    pub fn rank(&self) -> usize {
        self.low_owner.iter().filter(|x| x.is_some()).count()
    }

    /// Reduce `v` against the pivot columns. Returns the residue and the
    /// coefficients `c` with `v = residue + Σ c[j]·reduced[j]`.
    pub fn reduce_vector(&self, v: &SparseVec) -> (SparseVec, Vec<(u32, u64)>) {
        let f = self.field;
        let mut v = v.clone();
        let mut coeffs = Vec::new();
        while let Some(&(low, x)) = v.last() {
            match self.low_owner[low as usize] {
                Some(j) => {
                    let col = &self.reduced[j as usize];
                    let piv = col.last().unwrap().1;
                    let q = f.mul(x, f.inv(piv));
                    v = f.axpy(&v, f.p - q, col);
                    coeffs.push((j, q));
                }
                None => break,
            }
        }
        (v, coeffs)
    }
}

/// Reduce the columns of an `nrows`-row sparse matrix left to right.
pub fn reduce_columns(field: Field, nrows: usize, cols: Vec<SparseVec>, track: bool) -> Reduction {
    let n = cols.len();
    let mut reduced = cols;
    let mut ops: Option<Vec<SparseVec>> = track.then(|| (0..n).map(|j| vec![(j as u32, 1)]).collect());
    let mut low_owner: Vec<Option<u32>> = vec![None; nrows];
    for j in 0..n {
        let mut col = std::mem::take(&mut reduced[j]);
        let mut op = ops.as_mut().map(|o| std::mem::take(&mut o[j]));
        while let Some(&(low, x)) = col.last() {
            match low_owner[low as usize] {
                Some(k) => {
                    let other = &reduced[k as usize];
                    let piv = other.last().unwrap().1;
                    let q = field.p - field.mul(x, field.inv(piv));
                    col = field.axpy(&col, q, other);
                    if let (Some(op), Some(all)) = (op.as_mut(), ops.as_ref()) {
                        *op = field.axpy(op, q, &all[k as usize]);
                    }
                }
                None => {
                    low_owner[low as usize] = Some(j as u32);
                    break;
                }
            }
        }
        reduced[j] = col;
        if let (Some(op), Some(all)) = (op, ops.as_mut()) {
            all[j] = op;
        }
    }
    Reduction { field, reduced, ops, low_owner }
}

/// Rank of a small dense matrix over the field.
pub fn dense_rank(field: Field, rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        let inv = field.inv(a[rank][c]);
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = field.mul(a[i][c], inv);
                for k in 0..cols {
                    let sub = field.mul(f, a[rank][k]);
                    a[i][k] = (a[i][k] + field.p - sub) % field.p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_a_cycle_boundary() {
        // boundary of a triangle: edges as columns over vertices
        let cols = vec![vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (2, 1)]];
        let r = reduce_columns(Field::F2, 3, cols, true);
        assert_eq!(r.rank(), 2);
        assert!(r.reduced[2].is_empty());
        assert_eq!(r.ops.as_ref().unwrap()[2].len(), 3);
    }

    #[test]
    fn big_field_inverse() {
        let f = Field::BIG;
        for a in [1u64, 2, 12345, f.p - 1] {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.lift(f.from_i64(-3)), -3);
    }

    #[test]
    fn dense_rank_matches() {
        assert_eq!(dense_rank(Field::F2, &[vec![1, 1], vec![1, 1]]), 1);
        assert_eq!(dense_rank(Field::BIG, &[vec![2, 4], vec![6, 8]]), 2);
        assert_eq!(dense_rank(Field::F2, &[vec![2, 4], vec![6, 8]]), 0);
    }
}
