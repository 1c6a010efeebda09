//! Shortest dual-lattice vectors, their weights and the relations they encode.
//!
//! A vector `(w_0, ..., w_{v-1})` of `L*_v` is the relation
//! `sum_{l,j} w_{j,l} y_{i+j,l} = 0` for all `i`, where `w_{j,l}` is the
//! coefficient of `z^j` in `w_l`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2poly::F2Poly;
use crate::genkit::{characteristic_poly_of, LinearGenerator};
use crate::lattice::{DualLattice, ReducedBasis};

pub const DEFAULT_BUDGET: u64 = 1 << 28;
/// Argmin patterns kept per report; the total count is always exact.
pub const ARGMIN_CAP: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub entries: Vec<F2Poly>,
}

impl LatticeVector {
    pub fn norm(&self) -> Option<usize> {
        crate::lattice::norm(&self.entries)
    }

    pub fn weight(&self) -> usize {
        self.entries.iter().map(F2Poly::weight).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub lag: usize,
    pub bit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearRelation {
    pub v: usize,
    pub weight: usize,
    pub terms: Vec<Term>,
}

impl LinearRelation {
    /// Terms are sorted and deduplicated; an empty set is rejected.
    pub fn new(v: usize, mut terms: Vec<Term>) -> Result<Self> {
        terms.sort_unstable();
        terms.dedup();
        if terms.is_empty() {
            return Err(Error::EmptyRelation);
        }
        Ok(LinearRelation {
            v,
            weight: terms.len(),
            terms,
        })
    }

    pub fn max_lag(&self) -> usize {
        self.terms.iter().map(|t| t.lag).max().unwrap_or(0)
    }

    /// Distinct lags, ascending.
    pub fn lags(&self) -> Vec<usize> {
        let mut lags: Vec<usize> = self.terms.iter().map(|t| t.lag).collect();
        lags.dedup();
        lags
    }

    /// Symmetric difference of the term sets.
    pub fn xor(&self, other: &LinearRelation) -> Option<LinearRelation> {
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| other.terms.binary_search(t).is_err())
            .chain(other.terms.iter().filter(|t| self.terms.binary_search(t).is_err()))
            .copied()
            .collect();
        terms.sort_unstable();
        LinearRelation::new(self.v.max(other.v), terms).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("relation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rel: LinearRelation = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let checked = LinearRelation::new(rel.v, rel.terms)?;
        if checked.weight != rel.weight {
            return Err(Error::Parse(format!(
                "weight field {} does not match {} distinct terms",
                rel.weight, checked.weight
            )));
        }
        Ok(checked)
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if t.lag == 0 {
                write!(f, "y_{{i,{}}}", t.bit)?;
            } else {
                write!(f, "y_{{i+{},{}}}", t.lag, t.bit)?;
            }
        }
        f.write_str(" = 0")
    }
}

pub fn vector_to_relation(vec: &LatticeVector) -> Result<LinearRelation> {
    let terms: Vec<Term> = vec
        .entries
        .iter()
        .enumerate()
        .flat_map(|(bit, e)| e.exponents().into_iter().map(move |lag| Term { lag, bit }))
        .collect();
    if terms.is_empty() {
        return Err(Error::ZeroVector);
    }
    LinearRelation::new(vec.entries.len(), terms)
}

/// XOR of the designated output bits is zero for every `i` in `0..span`,
/// starting from the current state of a copy of `gen`.
pub fn verify_relation<G: LinearGenerator>(gen: &G, rel: &LinearRelation, span: usize) -> Result<bool> {
    if rel.terms.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let w = gen.word_bits() as usize;
    if let Some(t) = rel.terms.iter().find(|t| t.bit >= w) {
        return Err(Error::BitIndex {
            index: t.bit,
            w: w as u32,
        });
    }
    if span == 0 {
        return Ok(true);
    }
    let total = span + rel.max_lag();
    let mut g = gen.clone();
    let mut ys = Vec::with_capacity(total);
    ys.push(g.output());
    while ys.len() < total {
        ys.push(g.next_word());
    }
    Ok((0..span).all(|i| {
        !rel.terms
            .iter()
            .fold(false, |acc, t| acc ^ ((ys[i + t.lag] >> (w - 1 - t.bit)) & 1 == 1))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeritReport {
    pub v: usize,
    pub k: usize,
    pub vprime: usize,
    /// `2^{v'} - 1`.
    pub shortest_vectors: u64,
    /// Vectors actually examined.
    pub enumerated: u64,
    /// The minimum weight; only an upper bound when `exact` is false.
    pub n_v: usize,
    pub exact: bool,
    /// Number of examined vectors attaining `n_v`.
    pub argmin_count: u64,
    /// Up to [`ARGMIN_CAP`] of them, sorted by term list.
    pub relations: Vec<LinearRelation>,
}

/// The first `v'` rows, each flattened to `v` fixed-width blocks.
struct Flat {
    v: usize,
    per_entry: usize,
    rows: Vec<Vec<u64>>,
}

impl Flat {
    fn new(reduced: &ReducedBasis, vprime: usize) -> Self {
        let v = reduced.v();
        let per_entry = reduced.k() / 64 + 1;
        let rows = reduced.rows()[..vprime]
            .iter()
            .map(|row| {
                let mut flat = vec![0u64; v * per_entry];
                for (l, e) in row.iter().enumerate() {
                    flat[l * per_entry..l * per_entry + e.words().len()].copy_from_slice(e.words());
                }
                flat
            })
            .collect();
        Flat { v, per_entry, rows }
    }

    fn combine(&self, mask: u64) -> Vec<u64> {
        let mut acc = vec![0u64; self.v * self.per_entry];
        for (i, row) in self.rows.iter().enumerate() {
            if mask >> i & 1 == 1 {
                xor_into(&mut acc, row);
            }
        }
        acc
    }

    fn vector(&self, mask: u64) -> LatticeVector {
        let acc = self.combine(mask);
        LatticeVector {
            entries: acc
                .chunks(self.per_entry)
                .map(|c| F2Poly::from_words(c.to_vec()))
                .collect(),
        }
    }

    fn top_bit_set(&self, acc: &[u64], k: usize) -> bool {
        (0..self.v).any(|l| acc[l * self.per_entry + k / 64] >> (k % 64) & 1 == 1)
    }
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[derive(Clone, Debug)]
struct Best {
    weight: usize,
    count: u64,
    masks: Vec<u64>,
}

impl Best {
    fn empty() -> Self {
        Best {
            weight: usize::MAX,
            count: 0,
            masks: Vec::new(),
        }
    }

    #[inline]
    fn offer(&mut self, weight: usize, mask: u64) {
        if weight < self.weight {
            self.weight = weight;
            self.count = 0;
            self.masks.clear();
        }
        if weight == self.weight {
            self.count += 1;
            if self.masks.len() < ARGMIN_CAP {
                self.masks.push(mask);
            }
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if other.weight < self.weight {
            return other;
        }
        if other.weight == self.weight {
            self.count += other.count;
            self.masks.extend(other.masks);
            self.masks.truncate(ARGMIN_CAP);
        }
        self
    }
}

/// Gray walk over the low `bits` coefficients, starting from the running
/// vector for `base` (whose low `bits` bits are clear).
fn walk(flat: &Flat, k: usize, base: u64, bits: usize) -> Best {
    let mut acc = flat.combine(base);
    let mut best = Best::empty();
    if base != 0 {
        debug_assert!(flat.top_bit_set(&acc, k));
        best.offer(popcount(&acc), base);
    }
    for s in 1u64..1 << bits {
        let i = s.trailing_zeros() as usize;
        xor_into(&mut acc, &flat.rows[i]);
        debug_assert!(flat.top_bit_set(&acc, k));
        best.offer(popcount(&acc), base | (s ^ (s >> 1)));
    }
    best
}

/// Minimum weight over all `2^{v'} - 1` shortest vectors, walked in Gray-code
/// order with one row XOR per step. Past `budget`, a deterministic sample of
/// `budget` vectors (random prefixes, each followed by a short Gray walk) is
/// examined instead and the report is marked inexact.
pub fn enumerate_min_weight(reduced: &ReducedBasis, budget: u64) -> Result<MeritReport> {
    let vprime = reduced.vprime();
    if vprime > 62 {
        return Err(Error::BudgetExceeded { vprime, budget });
    }
    let k = reduced.k();
    let flat = Flat::new(reduced, vprime);
    let total = (1u64 << vprime) - 1;
    let exact = total < budget;
    let (best, enumerated) = if exact {
        let split = vprime.saturating_sub(12).min(8);
        let low = vprime - split;
        let best = (0u64..1 << split)
            .into_par_iter()
            .map(|q| walk(&flat, k, q << low, low))
            .reduce(Best::empty, Best::merge);
        (best, total)
    } else {
        let low = 16.min(vprime - 1).min(63 - budget.max(1).leading_zeros() as usize);
        let blocks = (budget >> low).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ vprime as u64);
        let prefixes: Vec<u64> = (0..blocks)
            .map(|_| rng.gen_range(0..1u64 << (vprime - low)) << low)
            .collect();
        let best = prefixes
            .par_iter()
            .map(|&q| walk(&flat, k, q, low))
            .reduce(Best::empty, Best::merge);
        let per_block = (1u64 << low) - 1;
        let zero_blocks = prefixes.iter().filter(|&&q| q == 0).count() as u64;
        (best, blocks * per_block + (blocks - zero_blocks))
    };
    let mut relations: Vec<LinearRelation> = best
        .masks
        .iter()
        .map(|&m| vector_to_relation(&flat.vector(m)))
        .collect::<Result<_>>()?;
    relations.sort_by(|a, b| a.terms.cmp(&b.terms));
    relations.dedup();
    Ok(MeritReport {
        v: reduced.v(),
        k,
        vprime,
        shortest_vectors: total,
        enumerated,
        n_v: best.weight,
        exact,
        argmin_count: best.count,
        relations,
    })
}

/// Every shortest vector of `L*_v` as a relation, ordered by weight and
/// then by term list. Fails when there are more than `limit` of them.
pub fn shortest_relations(reduced: &ReducedBasis, limit: u64) -> Result<Vec<LinearRelation>> {
    let vprime = reduced.vprime();
    if vprime > 62 || (1u64 << vprime) - 1 > limit {
        return Err(Error::BudgetExceeded { vprime, budget: limit });
    }
    let flat = Flat::new(reduced, vprime);
    let mut out: Vec<LinearRelation> = (1u64..1 << vprime)
        .map(|m| vector_to_relation(&flat.vector(m)))
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| (a.weight, &a.terms).cmp(&(b.weight, &b.terms)));
    Ok(out)
}

/// All minimum-weight relations among the shortest vectors of `L*_v`.
pub fn minimal_relations<G: LinearGenerator>(gen: &G, v: usize, budget: u64) -> Result<Vec<LinearRelation>> {
    let poly = characteristic_poly_of(gen)?;
    let reduced = DualLattice::new(gen, &poly)?.reduce_up_to(v)?.pop().expect("v >= 1");
    let report = enumerate_min_weight(&reduced, budget)?;
    if !report.exact {
        return Err(Error::BudgetExceeded {
            vprime: report.vprime,
            budget,
        });
    }
    Ok(report.relations)
}
