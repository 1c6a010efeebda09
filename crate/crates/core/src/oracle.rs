//! Brute-force ground truth for small dense generators.
//!
//! `Phi_k` maps a state to the top `v` bits of its first `k` outputs; row
//! `i * v + l` is output `i`, bit `l`. Equidistribution at `(k, v)` is
//! surjectivity of `Phi_k`, and the relations on those bits form the dual
//! code `{c : c^T Phi_k = 0}`.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitmatrix::{get_bit, BitMatrix, RowSpace};
use crate::error::{Error, Result};
use crate::genkit::{characteristic_poly_of, LinearGenerator, SmallDenseSpec};
use crate::lattice::DualLattice;
use crate::merit::{enumerate_min_weight, LinearRelation, Term, DEFAULT_BUDGET};

pub const MAX_P: usize = 24;
pub const MAX_COUNTING_P: usize = 12;
pub const MAX_DUAL_DIM: usize = 24;

fn check_dims(spec: &SmallDenseSpec, v: usize, max_p: usize) -> Result<()> {
    if spec.p() > max_p {
        return Err(Error::OracleLimit(format!("p = {} exceeds {max_p}", spec.p())));
    }
    if v == 0 || v > spec.w() as usize {
        return Err(Error::Dimension { v, w: spec.w() });
    }
    Ok(())
}

pub fn output_map_matrix(spec: &SmallDenseSpec, k: usize, v: usize) -> Result<BitMatrix> {
    check_dims(spec, v, MAX_P)?;
    let p = spec.p();
    let w = spec.w() as usize;
    let mut phi = BitMatrix::zeros(k * v, p);
    for s in 0..p {
        let mut g = spec.unit_state(s);
        for i in 0..k {
            if i > 0 {
                g.step();
            }
            let y = g.output();
            for l in 0..v {
                if (y >> (w - 1 - l)) & 1 == 1 {
                    phi.set(i * v + l, s, true);
                }
            }
        }
    }
    Ok(phi)
}

/// Largest `k` for which `Phi_k` has full row rank `k v`.
pub fn brute_k_v(spec: &SmallDenseSpec, v: usize) -> Result<usize> {
    let p = spec.p();
    let phi = output_map_matrix(spec, p / v + 1, v)?;
    let mut space = RowSpace::new(p);
    for k in 0..=p / v {
        for l in 0..v {
            if !space.insert(phi.row(k * v + l)) {
                return Ok(k);
            }
        }
    }
    unreachable!("more than p independent rows in a p-column matrix")
}

/// `k(v)` by running every one of the `2^p` states and checking that each
/// of the `2^{kv}` cells receives exactly `2^{p-kv}` of them.
pub fn brute_k_v_by_counting(spec: &SmallDenseSpec, v: usize) -> Result<usize> {
    check_dims(spec, v, MAX_COUNTING_P)?;
    let p = spec.p();
    let w = spec.w() as usize;
    let kmax = p / v;
    let trunc = |y: u64| y >> (w - v);
    let tuples: Vec<Vec<u64>> = (0..1u64 << p)
        .map(|x| {
            let mut state = vec![0u64; 1];
            state[0] = x;
            let mut ys = Vec::with_capacity(kmax);
            for i in 0..kmax {
                if i > 0 {
                    state = spec.transition().mul_vec(&state);
                }
                ys.push(trunc(dense_output(spec, &state)));
            }
            ys
        })
        .collect();
    let mut best = 0;
    for k in 1..=kmax {
        let mut cells: HashMap<&[u64], u64> = HashMap::new();
        for t in &tuples {
            *cells.entry(&t[..k]).or_default() += 1;
        }
        let each = 1u64 << (p - k * v);
        if cells.len() as u64 == 1u64 << (k * v) && cells.values().all(|&c| c == each) {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}

fn dense_output(spec: &SmallDenseSpec, x: &[u64]) -> u64 {
    let b = spec.output_map();
    let w = b.rows();
    (0..w)
        .filter(|&l| crate::bitmatrix::parity_and(b.row(l), x))
        .fold(0u64, |y, l| y | 1 << (w - 1 - l))
}

/// Basis of `{c : c^T Phi_k = 0}`, each vector packed with `k v` bits.
pub fn dual_code_basis(spec: &SmallDenseSpec, k: usize, v: usize) -> Result<Vec<Vec<u64>>> {
    Ok(output_map_matrix(spec, k, v)?.transpose().null_space())
}

/// Minimum weight of a nonzero dual codeword; `None` if the dual code is `{0}`.
pub fn dual_code_min_weight(spec: &SmallDenseSpec, k: usize, v: usize) -> Result<Option<usize>> {
    let basis = dual_code_basis(spec, k, v)?;
    if basis.len() > MAX_DUAL_DIM {
        return Err(Error::OracleLimit(format!(
            "dual code dimension {} exceeds {MAX_DUAL_DIM}",
            basis.len()
        )));
    }
    if basis.is_empty() {
        return Ok(None);
    }
    let mut acc = vec![0u64; basis[0].len()];
    let mut best = usize::MAX;
    for s in 1u64..1 << basis.len() {
        for (a, b) in acc.iter_mut().zip(&basis[s.trailing_zeros() as usize]) {
            *a ^= b;
        }
        best = best.min(acc.iter().map(|x| x.count_ones() as usize).sum());
    }
    Ok(Some(best))
}

/// Bit `i v + l` of a codeword is term `(lag i, bit l)`.
pub fn codeword_to_relation(c: &[u64], k: usize, v: usize) -> Result<LinearRelation> {
    let terms = (0..k * v)
        .filter(|&m| get_bit(c, m))
        .map(|m| Term { lag: m / v, bit: m % v })
        .collect();
    LinearRelation::new(v, terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub v: usize,
    pub what: &'static str,
    pub lattice: Option<usize>,
    pub oracle: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestCase {
    pub index: usize,
    pub p: usize,
    pub w: u32,
    pub counted: bool,
    pub disagreements: Vec<Disagreement>,
}

impl SelftestCase {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares lattice `k(v)` and `N_v` against the oracle for every `v <= w`.
pub fn compare_with_lattice(spec: &SmallDenseSpec) -> Result<Vec<Disagreement>> {
    let gen = spec.unit_state(0);
    let poly = characteristic_poly_of(&gen)?;
    let w = spec.w() as usize;
    let reduced = DualLattice::new(&gen, &poly)?.reduce_up_to(w)?;
    let mut out = Vec::new();
    for r in &reduced {
        let v = r.v();
        let k_lat = r.k();
        let k_rank = brute_k_v(spec, v)?;
        if k_lat != k_rank {
            out.push(Disagreement {
                v,
                what: "k(v) rank",
                lattice: Some(k_lat),
                oracle: Some(k_rank),
            });
        }
        if spec.p() <= MAX_COUNTING_P {
            let k_count = brute_k_v_by_counting(spec, v)?;
            if k_count != k_rank {
                out.push(Disagreement {
                    v,
                    what: "k(v) counting",
                    lattice: Some(k_rank),
                    oracle: Some(k_count),
                });
            }
        }
        let n_lat = enumerate_min_weight(r, DEFAULT_BUDGET)?.n_v;
        let n_dual = dual_code_min_weight(spec, k_lat + 1, v)?;
        if n_dual != Some(n_lat) {
            out.push(Disagreement {
                v,
                what: "N_v",
                lattice: Some(n_lat),
                oracle: n_dual,
            });
        }
    }
    Ok(out)
}

/// Random maximal generators with `p` in `p_range`, `w` in `w_range`,
/// drawn from a seeded stream.
pub fn random_generators(
    count: usize,
    p_range: std::ops::RangeInclusive<usize>,
    w_range: std::ops::RangeInclusive<u32>,
    seed: u64,
) -> Vec<SmallDenseSpec> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(p_range.clone());
            let w = rng.gen_range(w_range.clone());
            SmallDenseSpec::random_maximal(p, w, &mut rng)
        })
        .collect()
}

pub fn selftest(specs: &[SmallDenseSpec]) -> Result<Vec<SelftestCase>> {
    specs
        .iter()
        .enumerate()
        .map(|(index, spec)| {
            Ok(SelftestCase {
                index,
                p: spec.p(),
                w: spec.w(),
                counted: spec.p() <= MAX_COUNTING_P,
                disagreements: compare_with_lattice(spec)?,
            })
        })
        .collect()
}
