//! Smith normal form and Hermite-reduced lattices over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small rows. `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let data: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| BigInt::from(x)).collect()
            })
            .collect();
        Self { rows: data.len(), cols, data }
    }

    pub fn from_big_rows(cols: usize, data: Vec<Vec<BigInt>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged integer matrix");
        Self { rows: data.len(), cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r][c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        out
    }

    /// Determinant by fraction-free elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.data {
            row.swap(a, b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src][c] * k;
            self.data[dst][c] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for row in &mut self.data {
            let v = &row[src] * k;
            row[dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for x in &mut self.data[r] {
            *x = -&*x;
        }
    }
}

/// `left * m * right` is diagonal with entries `diag` followed by zeros.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let mut a = m.clone();
    let mut left = IntMatrix::identity(m.rows);
    let mut right = IntMatrix::identity(m.cols);
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if a.data[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a.data[i][j].abs() < a.data[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_cols(t, pj);
        right.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..a.rows {
            let q = a.data[i][t].div_floor(&a.data[t][t]);
            let nq = -q;
            a.add_row(i, t, &nq);
            left.add_row(i, t, &nq);
            if !a.data[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..a.cols {
            let q = a.data[t][j].div_floor(&a.data[t][t]);
            let nq = -q;
            a.add_col(j, t, &nq);
            right.add_col(j, t, &nq);
            if !a.data[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let offender = (t + 1..a.rows)
            .find(|&i| (t + 1..a.cols).any(|j| !a.data[i][j].is_multiple_of(&a.data[t][t])));
        if let Some(i) = offender {
            let one = BigInt::one();
            a.add_row(t, i, &one);
            left.add_row(t, i, &one);
            continue;
        }
        if a.data[t][t].is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    let diag = (0..t).map(|i| a.data[i][i].clone()).collect();
    Smith { diag, left, right }
}

/// A sublattice of Z^n kept in Hermite normal form, so that equal lattices
/// have identical bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    n: usize,
    // rows[i] has its pivot at pivots[i]; pivot entries are positive and
    // entries above each pivot are reduced into [0, pivot)
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl IntLattice {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: &[Vec<i64>]) -> Self {
        let mut l = Self::new(n);
        for r in rows {
            l.insert(r.iter().map(|&x| BigInt::from(x)).collect());
        }
        l
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn insert_small(&mut self, v: &[i64]) {
        self.insert(v.iter().map(|&x| BigInt::from(x)).collect());
    }

    pub fn insert(&mut self, mut v: Vec<BigInt>) {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        let mut i = 0;
        loop {
            let Some(c) = v.iter().position(|x| !x.is_zero()) else {
                break;
            };
            while i < self.rows.len() && self.pivots[i] < c {
                i += 1;
            }
            if i < self.rows.len() && self.pivots[i] == c {
                // gcd step between v and rows[i] on column c
                let a = self.rows[i][c].clone();
                let b = v[c].clone();
                let eg = a.extended_gcd(&b);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let (p, q) = (&a / &g, &b / &g);
                let new_row: Vec<BigInt> =
                    (0..self.n).map(|j| &x * &self.rows[i][j] + &y * &v[j]).collect();
                let rest: Vec<BigInt> =
                    (0..self.n).map(|j| &p * &v[j] - &q * &self.rows[i][j]).collect();
                self.rows[i] = new_row;
                v = rest;
                i += 1;
            } else {
                self.rows.insert(i, v);
                self.pivots.insert(i, c);
                break;
            }
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        for i in 0..self.rows.len() {
            let c = self.pivots[i];
            if self.rows[i][c].is_negative() {
                for x in &mut self.rows[i] {
                    *x = -&*x;
                }
            }
        }
        for i in (0..self.rows.len()).rev() {
            let c = self.pivots[i];
            let piv = self.rows[i][c].clone();
            for k in 0..i {
                let q = self.rows[k][c].div_floor(&piv);
                if q.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let v = &q * &self.rows[i][j];
                    self.rows[k][j] -= v;
                }
            }
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for j in 0..self.n {
                let t = &q * &row[j];
                v[j] -= t;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r.clone());
        }
        out
    }

    /// Image under the coordinate permutation `j -> perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> IntLattice {
        let mut out = IntLattice::new(self.n);
        for r in &self.rows {
            let mut w = vec![BigInt::zero(); self.n];
            for (j, x) in r.iter().enumerate() {
                w[perm[j]] = x.clone();
            }
            out.insert(w);
        }
        out
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_big_rows(self.n, self.rows.clone())
    }

    /// Invariant factors of Z^n / L that differ from 1, and the free rank.
    pub fn quotient_invariants(&self) -> (Vec<BigInt>, usize) {
        let s = smith_normal_form(&self.to_matrix());
        let torsion = s.diag.iter().filter(|d| !d.is_one()).cloned().collect();
        (torsion, self.n - s.rank())
    }
}
