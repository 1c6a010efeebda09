//! Dense matrices over F2, row-major with each row packed into `u64` words.
//!
//! Column `j` of a row lives in bit `j % 64` of word `j / 64`.

use rand::Rng;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

#[inline]
pub(crate) fn parity_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

#[inline]
pub(crate) fn get_bit(words: &[u64], j: usize) -> bool {
    (words[j / 64] >> (j % 64)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], j: usize) {
    words[j / 64] ^= 1 << (j % 64);
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from packed rows; bits at or above `cols` must be clear.
    pub fn from_rows(cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let dst = m.row_mut(i);
            for (d, s) in dst.iter_mut().zip(r) {
                *d = *s;
            }
        }
        m.mask_tail();
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        rng.fill(&mut m.data[..]);
        m.mask_tail();
        m
    }

    fn mask_tail(&mut self) {
        if !self.cols.is_multiple_of(64) {
            let mask = (1u64 << (self.cols % 64)) - 1;
            for i in 0..self.rows {
                let last = i * self.stride + self.stride - 1;
                self.data[last] &= mask;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        get_bit(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if self.get(i, j) != value {
            flip_bit(self.row_mut(i), j);
        }
    }

    /// `M x`, with `x` packed like a row.
    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.rows.div_ceil(64).max(1)];
        for i in 0..self.rows {
            if parity_and(self.row(i), x) {
                flip_bit(&mut out, i);
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Reduced row-echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            let pivot_row = m.row(r).to_vec();
            for i in 0..self.rows {
                if i != r && m.get(i, c) {
                    for (d, s) in m.row_mut(i).iter_mut().zip(&pivot_row) {
                        *d ^= s;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.stride {
                self.data.swap(a * self.stride + k, b * self.stride + k);
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut space = RowSpace::new(self.cols);
        (0..self.rows).filter(|&i| space.insert(self.row(i))).count()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of `{x : M x = 0}`, each vector packed with `cols` bits.
    pub fn null_space(&self) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let stride = self.cols.div_ceil(64).max(1);
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![0u64; stride];
                flip_bit(&mut x, free);
                for (row, &pc) in pivots.iter().enumerate() {
                    if r.get(row, free) {
                        flip_bit(&mut x, pc);
                    }
                }
                x
            })
            .collect()
    }
}

/// Incrementally built row space, used to find the first dependent row of a
/// sequence without re-running elimination.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    basis: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace {
            cols,
            basis: vec![None; cols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds `row`; returns false if it was already in the span.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut r = row.to_vec();
        while let Some(top) = highest(&r) {
            match &self.basis[top] {
                Some(b) => {
                    for (d, s) in r.iter_mut().zip(b) {
                        *d ^= s;
                    }
                }
                None => {
                    debug_assert!(top < self.cols);
                    self.basis[top] = Some(r);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

fn highest(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}
