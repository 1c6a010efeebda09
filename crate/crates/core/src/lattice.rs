//! The dual lattice `L*_v` over `F2[z]` and its reduction.
//!
//! `L*_v` is spanned by `(P, 0, ..., 0)` and `(hbar_l, e_l)` for
//! `l = 1..v-1`, where `hbar_l = h_0^{-1} h_l mod P`. A vector `w` lies in it
//! iff `sum_l h_l w_l = 0 (mod P)`. Reduction brings the rows to a form with
//! distinct pivots, after which the row degrees are the successive minima.

use crate::error::{Error, Result};
use crate::f2poly::F2Poly;
use crate::genkit::{numerator_polys, LinearGenerator};

pub type Row = Vec<F2Poly>;

/// Maximum entry degree; `None` for the zero vector.
pub fn norm(row: &[F2Poly]) -> Option<usize> {
    row.iter().filter_map(F2Poly::degree).max()
}

/// `(degree, column)` of the highest-degree entry, ties going to the largest
/// column.
pub fn pivot(row: &[F2Poly]) -> Option<(usize, usize)> {
    row.iter()
        .enumerate()
        .filter_map(|(c, e)| e.degree().map(|d| (d, c)))
        .max()
}

fn add_row_shifted(rows: &mut [Row], dst: usize, src: usize, shift: usize) {
    let (d, s) = if dst < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[dst], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(dst);
        (&mut b[0], &a[src])
    };
    for (x, y) in d.iter_mut().zip(s) {
        x.add_shifted(y, shift);
    }
}

/// Cancels pivot collisions until every row has its own pivot column.
/// Rows `..placed` must already have distinct pivots.
fn reduce_rows(rows: &mut [Row], placed: usize) -> Result<()> {
    let v = rows.first().map_or(0, Vec::len);
    let mut owner: Vec<Option<usize>> = vec![None; v];
    for (i, row) in rows.iter().enumerate().take(placed) {
        let (_, c) = pivot(row).ok_or(Error::DependentRows)?;
        debug_assert!(owner[c].is_none());
        owner[c] = Some(i);
    }
    let mut work: Vec<usize> = (placed..rows.len()).rev().collect();
    while let Some(mut i) = work.pop() {
        loop {
            let (d, c) = pivot(&rows[i]).ok_or(Error::DependentRows)?;
            let Some(j) = owner[c] else {
                owner[c] = Some(i);
                break;
            };
            let (dj, _) = pivot(&rows[j]).expect("owner rows are nonzero");
            if dj <= d {
                add_row_shifted(rows, i, j, d - dj);
            } else {
                add_row_shifted(rows, j, i, dj - d);
                owner[c] = Some(i);
                i = j;
            }
        }
    }
    Ok(())
}

/// A square basis of an `F2[z]`-lattice together with the degree of its
/// determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<Row>,
    det_degree: usize,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Row>, det_degree: usize) -> Result<Self> {
        let v = rows.len();
        if v == 0 || rows.iter().any(|r| r.len() != v) {
            return Err(Error::InvalidParams(format!(
                "basis must be square and nonempty, got {} rows",
                v
            )));
        }
        Ok(LatticeBasis { rows, det_degree })
    }

    /// `(P, 0, ..., 0)` and `(hbar_l, e_l)` from the numerators `h_0..h_{v-1}`.
    pub fn dual(poly: &F2Poly, hs: &[F2Poly]) -> Result<Self> {
        let p = poly.degree().ok_or(Error::DegenerateModulus)?;
        let v = hs.len();
        let inv = hs[0].inverse_mod(poly).map_err(|_| Error::DegenerateNumerator)?;
        let mut rows = Vec::with_capacity(v);
        let mut first = vec![F2Poly::zero(); v];
        first[0] = poly.clone();
        rows.push(first);
        for (l, h) in hs.iter().enumerate().skip(1) {
            let mut row = vec![F2Poly::zero(); v];
            row[0] = inv.mul_mod(h, poly)?;
            row[l] = F2Poly::one();
            rows.push(row);
        }
        Ok(LatticeBasis { rows, det_degree: p })
    }

    pub fn v(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn det_degree(&self) -> usize {
        self.det_degree
    }
}

pub fn build_dual_basis<G: LinearGenerator>(gen: &G, v: usize, poly: &F2Poly) -> Result<LatticeBasis> {
    LatticeBasis::dual(poly, &numerator_polys(gen, v, poly)?)
}

/// Rows sorted by `(norm, pivot column)`; the norms are the successive minima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBasis {
    rows: Vec<Row>,
    minima: Vec<usize>,
}

impl ReducedBasis {
    fn finish(mut rows: Vec<Row>, det_degree: usize) -> Result<Self> {
        rows.sort_by_cached_key(|r| pivot(r));
        let minima: Vec<usize> = rows
            .iter()
            .map(|r| norm(r).ok_or(Error::DependentRows))
            .collect::<Result<_>>()?;
        let got: usize = minima.iter().sum();
        if got != det_degree {
            return Err(Error::SumRule {
                expected: det_degree,
                got,
            });
        }
        Ok(ReducedBasis { rows, minima })
    }

    pub fn v(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Successive minima, ascending.
    pub fn minima(&self) -> &[usize] {
        &self.minima
    }

    /// `k(v)`, the first successive minimum.
    pub fn k(&self) -> usize {
        self.minima[0]
    }

    /// Multiplicity of the first minimum; the shortest vectors are the
    /// nonzero combinations of the first `v'` rows.
    pub fn vprime(&self) -> usize {
        self.minima.iter().take_while(|&&m| m == self.minima[0]).count()
    }

    /// Adds one column and the row `(hbar, 0, ..., 0, 1)`, giving the
    /// reduced basis one dimension up.
    pub fn extend(&self, hbar: &F2Poly) -> Result<ReducedBasis> {
        let v = self.v() + 1;
        let mut rows: Vec<Row> = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(F2Poly::zero());
                r
            })
            .collect();
        let mut new = vec![F2Poly::zero(); v];
        new[0] = hbar.clone();
        new[v - 1] = F2Poly::one();
        rows.push(new);
        reduce_rows(&mut rows, v - 1)?;
        let det: usize = self.minima.iter().sum();
        ReducedBasis::finish(rows, det)
    }
}

pub fn reduce_basis(basis: &LatticeBasis) -> Result<ReducedBasis> {
    let mut rows = basis.rows.clone();
    reduce_rows(&mut rows, 0)?;
    ReducedBasis::finish(rows, basis.det_degree)
}

pub fn k_of_v(reduced: &ReducedBasis) -> usize {
    reduced.k()
}

/// Builds `L*_v` for increasing `v`, reusing each reduced basis for the next.
#[derive(Clone, Debug)]
pub struct DualLattice {
    p: usize,
    hbar: Vec<F2Poly>,
    current: ReducedBasis,
}

impl DualLattice {
    pub fn new<G: LinearGenerator>(gen: &G, poly: &F2Poly) -> Result<Self> {
        let w = gen.word_bits() as usize;
        let basis = LatticeBasis::dual(poly, &numerator_polys(gen, w, poly)?)?;
        let p = basis.det_degree;
        let hbar = basis.rows.iter().skip(1).map(|r| r[0].clone()).collect();
        let current = reduce_basis(&LatticeBasis::new(vec![vec![poly.clone()]], p)?)?;
        Ok(DualLattice { p, hbar, current })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn w(&self) -> usize {
        self.hbar.len() + 1
    }

    /// The reduced basis for the current dimension, starting at `v = 1`.
    pub fn current(&self) -> &ReducedBasis {
        &self.current
    }

    /// Moves to `v + 1`; `None` once `v = w`.
    pub fn advance(&mut self) -> Option<Result<&ReducedBasis>> {
        let hbar = self.hbar.get(self.current.v() - 1)?;
        Some(self.current.extend(hbar).map(|next| {
            self.current = next;
            &self.current
        }))
    }

    /// Reduced bases for `v = 1..=v_max`.
    pub fn reduce_up_to(mut self, v_max: usize) -> Result<Vec<ReducedBasis>> {
        if v_max == 0 || v_max > self.w() {
            return Err(Error::Dimension {
                v: v_max,
                w: self.w() as u32,
            });
        }
        let mut out = vec![self.current.clone()];
        while out.len() < v_max {
            out.push(self.advance().expect("v < w")?.clone());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectRow {
    pub v: usize,
    pub k: usize,
    pub d: usize,
    pub minima: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectProfile {
    pub p: usize,
    pub rows: Vec<DefectRow>,
}

impl DefectProfile {
    pub fn from_reduced(p: usize, reduced: &[ReducedBasis]) -> Self {
        let rows = reduced
            .iter()
            .map(|r| DefectRow {
                v: r.v(),
                k: r.k(),
                d: p / r.v() - r.k(),
                minima: r.minima().to_vec(),
            })
            .collect();
        DefectProfile { p, rows }
    }

    /// Sum of `d(v)` over the computed dimensions.
    pub fn delta(&self) -> usize {
        self.rows.iter().map(|r| r.d).sum()
    }
}

pub fn defect_profile<G: LinearGenerator>(gen: &G, poly: &F2Poly, v_max: usize) -> Result<DefectProfile> {
    let lattice = DualLattice::new(gen, poly)?;
    let p = lattice.p();
    Ok(DefectProfile::from_reduced(p, &lattice.reduce_up_to(v_max)?))
}
