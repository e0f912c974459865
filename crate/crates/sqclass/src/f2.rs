//! Linear algebra over F_2 with rows packed into `u64` words.
//!
//! Column `j` of a matrix (or coordinate `j` of a vector) is bit `j` of the
//! word, so the string `"110"` denotes the word `0b011`.

use std::fmt;

use crate::Error;

/// Maximum number of columns a packed row can hold.
pub const MAX_COLS: usize = 64;

#[inline]
pub fn dot(a: u64, b: u64) -> bool {
    (a & b).count_ones() & 1 == 1
}

#[inline]
fn mask(cols: usize) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

/// Parses a bit string such as `"0110"` into a packed word, column 0 first.
pub fn parse_bits(s: &str) -> Result<u64, Error> {
    if s.len() > MAX_COLS {
        return Err(Error::TooWide { cols: s.len() });
    }
    let mut w = 0u64;
    for (j, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => w |= 1 << j,
            _ => return Err(Error::Parse(format!("bad bit {ch:?} in {s:?}"))),
        }
    }
    Ok(w)
}

pub fn format_bits(w: u64, cols: usize) -> String {
    (0..cols).map(|j| if w >> j & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<u64>,
}

impl F2Matrix {
    pub fn new(cols: usize, rows: Vec<u64>) -> Result<Self, Error> {
        if cols > MAX_COLS {
            return Err(Error::TooWide { cols });
        }
        if rows.iter().any(|r| r & !mask(cols) != 0) {
            return Err(Error::Parse(format!("row has bits beyond column {cols}")));
        }
        Ok(Self { cols, rows })
    }

    pub fn zero(nrows: usize, cols: usize) -> Result<Self, Error> {
        Self::new(cols, vec![0; nrows])
    }

    pub fn identity(n: usize) -> Result<Self, Error> {
        Self::new(n, (0..n).map(|i| 1u64 << i).collect())
    }

    pub fn from_strs(rows: &[&str]) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged bit rows".into()));
        }
        let packed = rows.iter().map(|r| parse_bits(r)).collect::<Result<Vec<_>, _>>()?;
        Self::new(cols, packed)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r] >> c & 1 == 1
    }

    /// Image of a column vector: bit `i` of the result is `row_i · v`.
    pub fn apply(&self, v: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| if dot(r, v) { acc | 1 << i } else { acc })
    }

    pub fn transpose(&self) -> Result<Self, Error> {
        let mut out = vec![0u64; self.cols];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, slot) in out.iter_mut().enumerate() {
                if r >> j & 1 == 1 {
                    *slot |= 1 << i;
                }
            }
        }
        Self::new(self.rows.len(), out)
    }

    /// Reduced row-echelon form. Zero rows are moved to the bottom, so the
    /// shape is preserved.
    #[must_use]
    pub fn rref(&self) -> F2Matrix {
        let (basis, _) = echelon(&self.rows, self.cols);
        let mut rows = basis;
        rows.resize(self.rows.len(), 0);
        F2Matrix { cols: self.cols, rows }
    }

    pub fn rank(&self) -> usize {
        echelon(&self.rows, self.cols).0.len()
    }

    /// Right kernel `{x : row · x = 0 for every row}`.
    pub fn kernel(&self) -> F2Subspace {
        let (basis, pivots) = echelon(&self.rows, self.cols);
        let mut gens = Vec::new();
        for f in 0..self.cols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = 1u64 << f;
            for (row, &p) in basis.iter().zip(&pivots) {
                if row >> f & 1 == 1 {
                    v |= 1 << p;
                }
            }
            gens.push(v);
        }
        F2Subspace::from_independent(self.cols, gens)
    }

    pub fn row_space(&self) -> F2Subspace {
        F2Subspace::from_independent(self.cols, echelon(&self.rows, self.cols).0)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|&r| format_bits(r, self.cols)).collect();
        write!(f, "F2Matrix{rows:?}")
    }
}

/// Gauss-Jordan elimination. Returns the nonzero rows of the reduced form
/// sorted by pivot, together with the pivot columns.
fn echelon(rows: &[u64], cols: usize) -> (Vec<u64>, Vec<usize>) {
    let mut work: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut basis = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..cols {
        let bit = 1u64 << c;
        let Some(pos) = work.iter().position(|r| r & bit != 0) else {
            continue;
        };
        let piv = work.swap_remove(pos);
        for r in work.iter_mut().chain(basis.iter_mut()) {
            if *r & bit != 0 {
                *r ^= piv;
            }
        }
        work.retain(|&r| r != 0);
        basis.push(piv);
        pivots.push(c);
    }
    (basis, pivots)
}

/// A subspace of F_2^n stored by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Subspace {
    ambient: usize,
    basis: Vec<u64>,
}

impl F2Subspace {
    pub fn new(ambient: usize, gens: &[u64]) -> Result<Self, Error> {
        F2Matrix::new(ambient, gens.to_vec())?;
        Ok(Self::from_independent(ambient, echelon(gens, ambient).0))
    }

    fn from_independent(ambient: usize, gens: Vec<u64>) -> Self {
        let (basis, _) = echelon(&gens, ambient);
        Self { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: (0..ambient).map(|i| 1u64 << i).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    /// Reduced basis, one row per pivot in increasing pivot order.
    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn matrix(&self) -> F2Matrix {
        F2Matrix { cols: self.ambient, rows: self.basis.clone() }
    }

    /// Canonical representative of `v` modulo the subspace: every pivot bit
    /// is cleared.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            let p = b.trailing_zeros();
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        v & !mask(self.ambient) == 0 && self.reduce(v) == 0
    }

    pub fn is_subspace_of(&self, other: &F2Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|&b| other.contains(b))
    }

    pub fn annihilator(&self) -> F2Subspace {
        self.matrix().kernel()
    }

    pub fn sum(&self, other: &F2Subspace) -> F2Subspace {
        debug_assert_eq!(self.ambient, other.ambient);
        let gens: Vec<u64> = self.basis.iter().chain(&other.basis).copied().collect();
        Self::from_independent(self.ambient, gens)
    }

    pub fn intersection(&self, other: &F2Subspace) -> F2Subspace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    pub fn with(&self, v: u64) -> F2Subspace {
        let mut gens = self.basis.clone();
        gens.push(v);
        Self::from_independent(self.ambient, gens)
    }

    /// All `2^dim` vectors, in the order of their coordinates on the basis.
    pub fn elements(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        for &b in &self.basis {
            let ext: Vec<u64> = out.iter().map(|&v| v ^ b).collect();
            out.extend(ext);
        }
        out
    }

    /// Canonical coset representatives: all vectors supported on the
    /// non-pivot columns.
    pub fn coset_reps(&self) -> Vec<u64> {
        let pivots: u64 = self.basis.iter().fold(0, |acc, b| acc | 1 << b.trailing_zeros());
        let free = mask(self.ambient) & !pivots;
        let mut out = vec![0u64];
        for j in 0..self.ambient {
            if free >> j & 1 == 1 {
                let ext: Vec<u64> = out.iter().map(|&v| v | 1 << j).collect();
                out.extend(ext);
            }
        }
        out.sort_unstable();
        out
    }

    /// Every subspace of dimension `k` in F_2^ambient, each listed once.
    pub fn enumerate(ambient: usize, k: usize) -> Vec<F2Subspace> {
        let mut out = Vec::new();
        if k > ambient {
            return out;
        }
        let mut pivots = Vec::with_capacity(k);
        choose_pivots(ambient, k, 0, &mut pivots, &mut out);
        out
    }
}

fn choose_pivots(
    ambient: usize,
    k: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<F2Subspace>,
) {
    if pivots.len() == k {
        // free positions: for row i, columns after pivot i that are not pivots
        let pivot_mask: u64 = pivots.iter().fold(0, |acc, &p| acc | 1 << p);
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                ((p + 1)..ambient)
                    .filter(move |&c| pivot_mask >> c & 1 == 0)
                    .map(move |c| (i, c))
            })
            .collect();
        for fill in 0u64..(1u64 << slots.len()) {
            let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << p).collect();
            for (s, &(i, c)) in slots.iter().enumerate() {
                if fill >> s & 1 == 1 {
                    rows[i] |= 1 << c;
                }
            }
            out.push(F2Subspace { ambient, basis: rows });
        }
        return;
    }
    for p in start..ambient {
        pivots.push(p);
        choose_pivots(ambient, k, p + 1, pivots, out);
        pivots.pop();
    }
}

impl fmt::Debug for F2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis.iter().map(|&r| format_bits(r, self.ambient)).collect();
        write!(f, "F2Subspace({}; {rows:?})", self.ambient)
    }
}
