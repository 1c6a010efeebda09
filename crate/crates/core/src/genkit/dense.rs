//! Small generators given by explicit transition and output matrices.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LinearGenerator;
use crate::bitmatrix::{flip_bit, parity_and, BitMatrix};
use crate::error::{Error, Result};
use crate::f2poly::{berlekamp_massey, F2Poly};

/// `x_i = A x_{i-1}`, `y_i = B x_i`; row `l` of `B` is output bit `l`
/// (bit 0 is the most significant bit of the word).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallDenseSpec {
    a: BitMatrix,
    b: BitMatrix,
}

#[derive(Serialize, Deserialize)]
struct DenseConfig {
    p: usize,
    w: u32,
    a: Vec<String>,
    b: Vec<String>,
}

impl SmallDenseSpec {
    pub fn new(a: BitMatrix, b: BitMatrix) -> Result<Self> {
        let p = a.rows();
        if p == 0 || a.cols() != p {
            return Err(Error::InvalidGenerator(format!(
                "transition matrix must be square and nonempty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.cols() != p || b.rows() == 0 || b.rows() > 64 {
            return Err(Error::InvalidGenerator(format!(
                "output matrix must be w x {p} with 1 <= w <= 64, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        if !a.is_invertible() {
            return Err(Error::InvalidGenerator(
                "transition matrix is singular".into(),
            ));
        }
        Ok(SmallDenseSpec { a, b })
    }

    pub fn p(&self) -> usize {
        self.a.rows()
    }

    pub fn w(&self) -> u32 {
        self.b.rows() as u32
    }

    pub fn transition(&self) -> &BitMatrix {
        &self.a
    }

    pub fn output_map(&self) -> &BitMatrix {
        &self.b
    }

    /// Shift-register companion matrix of a monic `poly` of degree `p`:
    /// `x'_j = x_{j+1}` for `j < p-1` and `x'_{p-1} = sum_j c_j x_j`.
    pub fn companion(poly: &F2Poly, b: BitMatrix) -> Result<Self> {
        let p = poly
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidGenerator("companion polynomial must have degree >= 1".into()))?;
        let mut a = BitMatrix::zeros(p, p);
        for j in 0..p - 1 {
            a.set(j, j + 1, true);
        }
        for j in 0..p {
            a.set(p - 1, j, poly.coeff(j));
        }
        Self::new(a, b)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: DenseConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let parse_rows = |rows: &[String], expect: usize, what: &str| -> Result<Vec<Vec<u64>>> {
            if rows.len() != expect {
                return Err(Error::Parse(format!(
                    "{what} has {} rows, expected {expect}",
                    rows.len()
                )));
            }
            rows.iter()
                .map(|h| {
                    let poly = F2Poly::from_hex(h)?;
                    if poly.degree().is_some_and(|d| d >= cfg.p) {
                        return Err(Error::Parse(format!(
                            "{what} row {h} has a bit at or above p = {}",
                            cfg.p
                        )));
                    }
                    Ok(poly.words().to_vec())
                })
                .collect()
        };
        let a = BitMatrix::from_rows(cfg.p, &parse_rows(&cfg.a, cfg.p, "a")?);
        let b = BitMatrix::from_rows(cfg.p, &parse_rows(&cfg.b, cfg.w as usize, "b")?);
        Self::new(a, b)
    }

    pub fn to_toml(&self) -> String {
        let rows = |m: &BitMatrix| {
            (0..m.rows())
                .map(|i| format!("0x{}", F2Poly::from_words(m.row(i).to_vec()).to_hex()))
                .collect()
        };
        let cfg = DenseConfig {
            p: self.p(),
            w: self.w(),
            a: rows(&self.a),
            b: rows(&self.b),
        };
        toml::to_string(&cfg).expect("plain config serializes")
    }

    /// Draws random `A`, `B` until the generator has maximal period
    /// `2^p - 1`, checked by walking the orbit of a unit state (`p <= 24`).
    pub fn random_maximal<R: Rng + ?Sized>(p: usize, w: u32, rng: &mut R) -> Self {
        assert!((1..=24).contains(&p), "orbit check is limited to p <= 24");
        loop {
            let a = BitMatrix::random(p, p, rng);
            let b = BitMatrix::random(w as usize, p, rng);
            let Ok(spec) = SmallDenseSpec::new(a, b) else {
                continue;
            };
            if spec.output_map().row(0).iter().all(|&x| x == 0) {
                continue;
            }
            let gen = spec.unit_state(0);
            let bits = super::bit_stream(&gen, 0, 2 * p).expect("bit 0 exists");
            if berlekamp_massey(&bits).degree() != Some(p) {
                continue;
            }
            if spec.orbit_length(&gen.x) == Some((1u64 << p) - 1) {
                return spec;
            }
        }
    }

    /// Steps until the state returns to `x0`; `None` if that takes more
    /// than `2^p - 1` steps.
    pub fn orbit_length(&self, x0: &[u64]) -> Option<u64> {
        let limit = (1u64 << self.p().min(63)) - 1;
        let mut x = x0.to_vec();
        for n in 1..=limit {
            x = self.a.mul_vec(&x);
            if x == x0 {
                return Some(n);
            }
        }
        None
    }

    pub fn unit_state(&self, j: usize) -> SmallDense {
        let mut x = vec![0u64; self.p().div_ceil(64)];
        flip_bit(&mut x, j);
        SmallDense {
            spec: Arc::new(self.clone()),
            x,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmallDense {
    spec: Arc<SmallDenseSpec>,
    x: Vec<u64>,
}

impl SmallDense {
    pub fn new(spec: Arc<SmallDenseSpec>, raw: &[u64]) -> Result<Self> {
        let p = spec.p();
        let words = p.div_ceil(64);
        let mut x = vec![0u64; words];
        for (d, s) in x.iter_mut().zip(raw) {
            *d = *s;
        }
        let spill = raw.iter().skip(words).any(|&w| w != 0)
            || (!p.is_multiple_of(64) && x[words - 1] >> (p % 64) != 0);
        if spill || raw.len() < words {
            return Err(Error::StateSize {
                expected: p,
                got: raw.len() * 64,
            });
        }
        if x.iter().all(|&w| w == 0) {
            return Err(Error::ZeroState);
        }
        Ok(SmallDense { spec, x })
    }

    /// The zero state, for linearity checks only.
    #[cfg(test)]
    pub(crate) fn zero(spec: Arc<SmallDenseSpec>) -> Self {
        let x = vec![0u64; spec.p().div_ceil(64)];
        SmallDense { spec, x }
    }

    pub fn spec(&self) -> &SmallDenseSpec {
        &self.spec
    }
}

impl LinearGenerator for SmallDense {
    fn state_bits(&self) -> usize {
        self.spec.p()
    }

    fn word_bits(&self) -> u32 {
        self.spec.w()
    }

    fn step(&mut self) {
        self.x = self.spec.a.mul_vec(&self.x);
    }

    fn output(&self) -> u64 {
        let b = &self.spec.b;
        let w = b.rows();
        (0..w).fold(0u64, |y, l| {
            if parity_and(b.row(l), &self.x) {
                y | 1 << (w - 1 - l)
            } else {
                y
            }
        })
    }

    fn raw_state(&self) -> Vec<u64> {
        self.x.clone()
    }
}
