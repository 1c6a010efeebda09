//! Birthday spacings with lagged, non-successive coordinates.
//!
//! Point `i` takes its coordinates from outputs `(j_t + 1) i + j_m` and
//! keeps the top `log2 d` bits of each; the box index concatenates them with
//! the first lag most significant.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poisson::ln_right_tail;
use crate::error::{Error, Result};
use crate::genkit::LinearGenerator;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirthdayParams {
    /// Replications `N`.
    pub reps: usize,
    /// Points per replication.
    pub n: usize,
    /// `d = 2^log2d` cells per axis.
    pub log2d: u32,
    /// Strictly increasing; `t = lags.len()`.
    pub lags: Vec<usize>,
    /// Replication `r` uses seed `base_seed + 1 + r`.
    pub base_seed: u32,
}

impl BirthdayParams {
    pub fn t(&self) -> usize {
        self.lags.len()
    }

    /// `n^3 / (4 d^t)`
    pub fn lambda(&self) -> f64 {
        let n = self.n as f64;
        n * n * n / (4.0 * 2f64.powi((self.log2d as usize * self.t()) as i32))
    }

    pub fn validate(&self, w: u32) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.reps == 0 {
            return bad("at least one replication is needed".into());
        }
        if self.n < 3 {
            return bad(format!("n = {} is below 3", self.n));
        }
        if self.lags.is_empty() || self.lags.windows(2).any(|p| p[0] >= p[1]) {
            return bad(format!("lags {:?} must be nonempty and strictly increasing", self.lags));
        }
        if self.log2d == 0 || self.log2d > w {
            return bad(format!("log2 d = {} must be in 1..={w}", self.log2d));
        }
        if self.log2d as usize * self.t() > 63 {
            return bad(format!(
                "box index needs {} bits, more than 63",
                self.log2d as usize * self.t()
            ));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.reps).map(|r| self.base_seed.wrapping_add(1 + r as u32))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirthdayReport {
    pub params: BirthdayParams,
    pub counts: Vec<u64>,
    pub total: u64,
    pub lambda: f64,
    pub mean: f64,
    pub p_value: f64,
    pub ln_p_value: f64,
}

/// Box indices of the first `n` points, reading outputs from `next_word`
/// and skipping unused ones.
pub fn lagged_points<G: LinearGenerator>(gen: &mut G, params: &BirthdayParams) -> Result<Vec<u64>> {
    let w = gen.word_bits();
    params.validate(w)?;
    let shift = w - params.log2d;
    let v = params.log2d;
    let stride = params.lags[params.t() - 1] + 1;
    let mut gaps = Vec::with_capacity(params.t() + 1);
    let mut pos = 0;
    for &j in &params.lags {
        gaps.push((j - pos) as u64);
        pos = j + 1;
    }
    let tail = (stride - pos) as u64;
    let mut out = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let mut idx = 0u64;
        for &gap in &gaps {
            gen.advance(gap);
            idx = (idx << v) | (gen.next_word() >> shift);
        }
        gen.advance(tail);
        out.push(idx);
    }
    Ok(out)
}

/// Number of adjacent equal values among the sorted spacings of the
/// sorted box indices. Sorts `boxes` in place.
pub fn collisions(boxes: &mut [u64]) -> u64 {
    if boxes.len() < 3 {
        return 0;
    }
    boxes.sort_unstable();
    let n = boxes.len();
    for j in 0..n - 1 {
        boxes[j] = boxes[j + 1] - boxes[j];
    }
    let spacings = &mut boxes[..n - 1];
    spacings.sort_unstable();
    spacings.windows(2).filter(|p| p[0] == p[1]).count() as u64
}

/// Runs `N` replications, replication `r` on the generator `make(seed_r)`,
/// and reports `P(Poisson(N lambda) >= Y)`.
pub fn birthday_spacings<G, F>(make: F, params: &BirthdayParams) -> Result<BirthdayReport>
where
    G: LinearGenerator,
    F: Fn(u32) -> Result<G> + Sync,
{
    let seeds: Vec<u32> = params.seeds().collect();
    let counts = seeds
        .par_iter()
        .map(|&s| {
            let started = Instant::now();
            let mut gen = make(s)?;
            let mut boxes = lagged_points(&mut gen, params)?;
            let y = collisions(&mut boxes);
            log::debug!(
                "birthday seed {s}: Y = {y} in {:.1}s",
                started.elapsed().as_secs_f64()
            );
            Ok(y)
        })
        .collect::<Result<Vec<u64>>>()?;
    let total = counts.iter().sum();
    let lambda = params.lambda();
    let mean = lambda * params.reps as f64;
    let ln_p = ln_right_tail(mean, total)?;
    Ok(BirthdayReport {
        params: params.clone(),
        counts,
        total,
        lambda,
        mean,
        p_value: ln_p.exp(),
        ln_p_value: ln_p + 0.0,
    })
}
