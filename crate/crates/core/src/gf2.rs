//! Dense bit vectors and bit matrices over GF(2).

use std::fmt;

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec { words, len: self.len }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the overlap `|self ∧ other|`.
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_indices(end - start, self.iter_ones().filter(|&i| i >= start && i < end).map(|i| i - start))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

/// Row-major bit matrix. Rows are [`BitVec`]s of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    ncols: usize,
}

/// Outcome of Gaussian elimination with row-operation tracking.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Reduced row echelon form; zero rows are kept at the bottom.
    pub echelon: BitMatrix,
    /// `combos[r]` records which original rows were summed into `echelon[r]`.
    pub combos: Vec<BitVec>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl Reduction {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl BitMatrix {
    pub fn new(ncols: usize) -> Self {
        BitMatrix { rows: Vec::new(), ncols }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "row length mismatch");
        BitMatrix { rows, ncols }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    /// Gauss-Jordan elimination to reduced row echelon form, tracking row combinations.
    pub fn reduce(&self) -> Reduction {
        let n = self.rows.len();
        let mut rows = self.rows.clone();
        let mut combos: Vec<BitVec> = (0..n).map(|i| BitVec::from_indices(n, [i])).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| rows[i].get(c)) else { continue };
            rows.swap(r, p);
            combos.swap(r, p);
            let (pivot_row, pivot_combo) = (rows[r].clone(), combos[r].clone());
            for i in 0..n {
                if i != r && rows[i].get(c) {
                    rows[i].xor_assign(&pivot_row);
                    combos[i].xor_assign(&pivot_combo);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Reduction { echelon: BitMatrix { rows, ncols: self.ncols }, combos, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rank_in_place()
    }

    /// Rank without combination tracking; destroys the contents.
    pub fn rank_in_place(&mut self) -> usize {
        let n = self.rows.len();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == n {
                break;
            }
            let Some(p) = (r..n).find(|&i| self.rows[i].get(c)) else { continue };
            self.rows.swap(r, p);
            let pivot = self.rows[r].clone();
            for i in r + 1..n {
                if self.rows[i].get(c) {
                    self.rows[i].xor_assign(&pivot);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the left kernel: combinations of rows that sum to zero.
    pub fn left_kernel(&self) -> Vec<BitVec> {
        let red = self.reduce();
        red.combos[red.rank()..].to_vec()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn right_kernel(&self) -> Vec<BitVec> {
        let red = self.reduce();
        let pivot_set: Vec<Option<usize>> = {
            let mut p = vec![None; self.ncols];
            for (r, &c) in red.pivots.iter().enumerate() {
                p[c] = Some(r);
            }
            p
        };
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = BitVec::zeros(self.ncols);
            v.set(free, true);
            for (r, &c) in red.pivots.iter().enumerate() {
                if red.echelon.rows[r].get(free) {
                    v.set(c, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `x^T M = target` for a row combination `x`, if one exists.
    pub fn solve_left(&self, target: &BitVec) -> Option<BitVec> {
        let red = self.reduce();
        let mut residual = target.clone();
        let mut combo = BitVec::zeros(self.rows.len());
        for (r, &c) in red.pivots.iter().enumerate() {
            if residual.get(c) {
                residual.xor_assign(&red.echelon.rows[r]);
                combo.xor_assign(&red.combos[r]);
            }
        }
        residual.is_zero().then_some(combo)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix { rows: vec![BitVec::zeros(self.rows.len()); self.ncols], ncols: self.rows.len() };
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }
}
