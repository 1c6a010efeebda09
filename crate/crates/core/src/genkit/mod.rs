//! F2-linear generators `x_i = A x_{i-1}`, `y_i = B x_i`.
//!
//! A generator value holds the current state `x_i`; [`LinearGenerator::output`]
//! is `y_i` and [`LinearGenerator::next_word`] steps first, then reads.
//! Output bit 0 is the most significant bit of the word.

pub mod dense;
pub mod mt;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2poly::{berlekamp_massey, F2Poly};

pub use dense::{SmallDense, SmallDenseSpec};
pub use mt::{Memt19937II, Mt19937};

/// Seed used whenever an analysis needs "some" nonzero state.
pub const DEFAULT_SEED: u32 = 5489;

pub trait LinearGenerator: Clone + Send + Sync {
    fn state_bits(&self) -> usize;
    fn word_bits(&self) -> u32;
    fn step(&mut self);
    /// `y_i = B x_i` for the current state, right-aligned in a `u64`.
    fn output(&self) -> u64;
    fn raw_state(&self) -> Vec<u64>;

    fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.step();
        }
    }

    #[inline]
    fn next_word(&mut self) -> u64 {
        self.step();
        self.output()
    }

    /// Output bit `l` (0 = most significant) of the current word.
    #[inline]
    fn output_bit(&self, l: usize) -> bool {
        (self.output() >> (self.word_bits() as usize - 1 - l)) & 1 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seed {
    /// Packed state bits in the generator's raw layout.
    Raw(Vec<u64>),
    /// Expanded by the MT19937 initialization recurrence.
    Integer(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Mt19937,
    Memt19937II,
    SmallDense(Arc<SmallDenseSpec>),
}

impl GeneratorSpec {
    /// Looks up a built-in generator by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "mt19937" => Ok(GeneratorSpec::Mt19937),
            "memt19937ii" | "memt19937" => Ok(GeneratorSpec::Memt19937II),
            _ => Err(Error::InvalidGenerator(format!("unknown generator '{name}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GeneratorSpec::Mt19937 => "mt19937".into(),
            GeneratorSpec::Memt19937II => "memt19937ii".into(),
            GeneratorSpec::SmallDense(s) => format!("dense-p{}-w{}", s.p(), s.w()),
        }
    }

    pub fn p(&self) -> usize {
        match self {
            GeneratorSpec::Mt19937 | GeneratorSpec::Memt19937II => mt::P,
            GeneratorSpec::SmallDense(s) => s.p(),
        }
    }

    pub fn w(&self) -> u32 {
        match self {
            GeneratorSpec::Mt19937 | GeneratorSpec::Memt19937II => 32,
            GeneratorSpec::SmallDense(s) => s.w(),
        }
    }

    pub fn make(&self, seed: &Seed) -> Result<GeneratorState> {
        let p = self.p();
        let raw = match seed {
            Seed::Raw(bits) => {
                check_raw_len(bits, p)?;
                bits.clone()
            }
            Seed::Integer(s) => match self {
                GeneratorSpec::Mt19937 => return Ok(GeneratorState::Mt(Mt19937::new(*s))),
                GeneratorSpec::Memt19937II => {
                    return Ok(GeneratorState::Memt(Memt19937II::new(*s)))
                }
                GeneratorSpec::SmallDense(_) => dense_bits_from_seed(*s, p),
            },
        };
        Ok(match self {
            GeneratorSpec::Mt19937 => GeneratorState::Mt(Mt19937::from_raw(&raw)?),
            GeneratorSpec::Memt19937II => GeneratorState::Memt(Memt19937II::from_raw(&raw)?),
            GeneratorSpec::SmallDense(s) => GeneratorState::Dense(SmallDense::new(s.clone(), &raw)?),
        })
    }

    /// A fixed nonzero state for seed-independent analyses.
    pub fn reference_state(&self) -> GeneratorState {
        match self {
            GeneratorSpec::SmallDense(s) => GeneratorState::Dense(s.unit_state(0)),
            _ => self
                .make(&Seed::Integer(DEFAULT_SEED))
                .expect("integer seeds give nonzero MT states"),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_raw_len(bits: &[u64], p: usize) -> Result<()> {
    let words = p.div_ceil(64);
    let spill = bits.iter().skip(words).any(|&w| w != 0)
        || (!p.is_multiple_of(64) && bits.get(words - 1).is_some_and(|w| w >> (p % 64) != 0));
    if bits.len() < words || spill {
        return Err(Error::StateSize {
            expected: p,
            got: bits.len() * 64,
        });
    }
    Ok(())
}

/// The first `p` bits of the MT19937 seeding words, least significant first.
fn dense_bits_from_seed(seed: u32, p: usize) -> Vec<u64> {
    let words = mt::init_genrand(seed);
    let mut out = vec![0u64; p.div_ceil(64)];
    for j in 0..p.min(32 * mt::N) {
        if (words[j / 32] >> (j % 32)) & 1 == 1 {
            out[j / 64] |= 1 << (j % 64);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum GeneratorState {
    Mt(Mt19937),
    Memt(Memt19937II),
    Dense(SmallDense),
}

macro_rules! delegate {
    ($self:expr, $g:ident => $e:expr) => {
        match $self {
            GeneratorState::Mt($g) => $e,
            GeneratorState::Memt($g) => $e,
            GeneratorState::Dense($g) => $e,
        }
    };
}

impl LinearGenerator for GeneratorState {
    fn state_bits(&self) -> usize {
        delegate!(self, g => g.state_bits())
    }

    fn word_bits(&self) -> u32 {
        delegate!(self, g => g.word_bits())
    }

    #[inline]
    fn step(&mut self) {
        delegate!(self, g => g.step())
    }

    #[inline]
    fn output(&self) -> u64 {
        delegate!(self, g => g.output())
    }

    fn raw_state(&self) -> Vec<u64> {
        delegate!(self, g => g.raw_state())
    }

    fn advance(&mut self, n: u64) {
        delegate!(self, g => g.advance(n))
    }
}

impl fmt::Debug for Mt19937 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mt19937 {{ output: {:#010x} }}", self.output())
    }
}

impl fmt::Debug for Memt19937II {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Memt19937II {{ output: {:#010x} }}", self.output())
    }
}

/// `y_{0,l}, y_{1,l}, ...` starting from the current state of a copy of `gen`.
pub fn bit_stream<G: LinearGenerator>(gen: &G, l: usize, count: usize) -> Result<Vec<bool>> {
    Ok(bit_streams(gen, l + 1, count)?.swap_remove(l))
}

/// Streams for bits `0..v` in one pass.
pub fn bit_streams<G: LinearGenerator>(gen: &G, v: usize, count: usize) -> Result<Vec<Vec<bool>>> {
    let w = gen.word_bits();
    if v > w as usize {
        return Err(Error::BitIndex { index: v - 1, w });
    }
    let mut g = gen.clone();
    let mut out = vec![Vec::with_capacity(count); v];
    for i in 0..count {
        if i > 0 {
            g.step();
        }
        let y = g.output();
        for (l, s) in out.iter_mut().enumerate() {
            s.push((y >> (w as usize - 1 - l)) & 1 == 1);
        }
    }
    Ok(out)
}

/// `P(z)` recovered by Berlekamp–Massey from `2p` bits of output bit 0.
pub fn characteristic_poly_of<G: LinearGenerator>(gen: &G) -> Result<F2Poly> {
    let p = gen.state_bits();
    let poly = berlekamp_massey(&bit_stream(gen, 0, 2 * p)?);
    let got = poly.degree().unwrap_or(0);
    if got != p {
        return Err(Error::NotMaximal { expected: p, got });
    }
    Ok(poly)
}

pub fn characteristic_poly(spec: &GeneratorSpec) -> Result<F2Poly> {
    characteristic_poly_of(&spec.reference_state())
}

/// Numerators `h_0 .. h_{v-1}` of the output bit series
/// `G_l(z) = sum_i y_{i,l} z^{-i-1} = h_l(z) / P(z)`.
pub fn numerator_polys<G: LinearGenerator>(gen: &G, v: usize, poly: &F2Poly) -> Result<Vec<F2Poly>> {
    let w = gen.word_bits();
    if v == 0 || v > w as usize {
        return Err(Error::Dimension { v, w });
    }
    let p = poly.degree().ok_or(Error::DegenerateModulus)?;
    let streams = bit_streams(gen, v, p)?;
    let hs: Vec<F2Poly> = streams
        .iter()
        .map(|bits| {
            // Y(z) = sum_{i<p} y_i z^{p-1-i}, so P * G_l = (P * Y) / z^p + (negative powers)
            let rev: Vec<bool> = bits.iter().rev().copied().collect();
            poly.mul(&F2Poly::from_bits(&rev)).shr(p)
        })
        .collect();
    if hs[0].is_zero() {
        return Err(Error::DegenerateNumerator);
    }
    let (g, _, _) = F2Poly::extgcd(&hs[0], poly)?;
    if !g.is_one() {
        return Err(Error::DegenerateNumerator);
    }
    Ok(hs)
}

/// Checks the output recurrence of MT19937 over `steps` words from the
/// default seed.
pub fn output_recurrence_check(spec: &GeneratorSpec, steps: usize) -> Result<bool> {
    if *spec != GeneratorSpec::Mt19937 {
        return Err(Error::InvalidGenerator(format!(
            "output recurrence check is defined for mt19937, not {spec}"
        )));
    }
    let mut g = Mt19937::new(DEFAULT_SEED);
    let ys: Vec<u32> = (0..steps).map(|_| g.next_word() as u32).collect();
    Ok(mt::output_recurrence_holds(&ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::BitMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(p: usize, w: u32, seed: u64) -> GeneratorSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GeneratorSpec::SmallDense(Arc::new(SmallDenseSpec::random_maximal(p, w, &mut rng)))
    }

    /// Power-series expansion of `h / P` by long division of `h z^n`.
    fn expand(h: &F2Poly, poly: &F2Poly, n: usize) -> Vec<bool> {
        let (q, _) = h.shl(n).divrem(poly).unwrap();
        (0..n).map(|i| q.coeff(n - 1 - i)).collect()
    }

    #[test]
    fn integer_seed_matches_reference_first_word() {
        let mut g = GeneratorSpec::Mt19937.make(&Seed::Integer(5489)).unwrap();
        assert_eq!(g.next_word(), 3499211612);
    }

    #[test]
    fn raw_seeds_validated() {
        let spec = dense(8, 4, 1);
        let g = spec.make(&Seed::Raw(vec![0b1100_0101])).unwrap();
        assert_eq!(g.raw_state(), vec![0b1100_0101]);
        assert!(matches!(spec.make(&Seed::Raw(vec![0])), Err(Error::ZeroState)));
        assert!(matches!(spec.make(&Seed::Raw(vec![0x100])), Err(Error::StateSize { .. })));
        assert!(matches!(
            GeneratorSpec::Mt19937.make(&Seed::Raw(vec![0; 312])),
            Err(Error::ZeroState)
        ));
        assert!(matches!(
            GeneratorSpec::Mt19937.make(&Seed::Raw(vec![1; 10])),
            Err(Error::StateSize { .. })
        ));
        let g = GeneratorSpec::Memt19937II.make(&Seed::Integer(9)).unwrap();
        let h = GeneratorSpec::Memt19937II.make(&Seed::Raw(g.raw_state())).unwrap();
        assert_eq!(bit_streams(&g, 32, 2000).unwrap(), bit_streams(&h, 32, 2000).unwrap());
        assert!(dense(8, 4, 1).make(&Seed::Integer(3)).is_ok());
    }

    #[test]
    fn builtin_names() {
        assert_eq!(GeneratorSpec::builtin("MT19937").unwrap(), GeneratorSpec::Mt19937);
        assert_eq!(GeneratorSpec::builtin("memt19937-ii").unwrap(), GeneratorSpec::Memt19937II);
        assert!(GeneratorSpec::builtin("well19937a").is_err());
    }

    #[test]
    fn bit_index_out_of_range() {
        let g = GeneratorSpec::Mt19937.reference_state();
        assert!(matches!(bit_stream(&g, 32, 4), Err(Error::BitIndex { .. })));
    }

    #[test]
    fn constant_output_bit() {
        // B reads only a state bit that is never set: bit 0 is constant zero
        let a = BitMatrix::identity(3);
        let mut b = BitMatrix::zeros(2, 3);
        b.set(0, 2, true);
        b.set(1, 0, true);
        let spec = Arc::new(SmallDenseSpec::new(a, b).unwrap());
        let g = SmallDense::new(spec, &[0b001]).unwrap();
        assert!(bit_stream(&g, 0, 50).unwrap().iter().all(|&x| !x));
        assert!(bit_stream(&g, 1, 50).unwrap().iter().all(|&x| x));
    }

    #[test]
    fn streams_are_linear_in_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..10 {
            let spec = dense(13, 6, seed);
            let GeneratorSpec::SmallDense(s) = &spec else { unreachable!() };
            let mask = (1u64 << 13) - 1;
            let (x, y) = loop {
                let x = rng.gen::<u64>() & mask;
                let y = rng.gen::<u64>() & mask;
                if x != 0 && y != 0 && x != y {
                    break (x, y);
                }
            };
            let gx = SmallDense::new(s.clone(), &[x]).unwrap();
            let gy = SmallDense::new(s.clone(), &[y]).unwrap();
            let gxy = SmallDense::new(s.clone(), &[x ^ y]).unwrap();
            let (sx, sy, sxy) = (
                bit_streams(&gx, 6, 100).unwrap(),
                bit_streams(&gy, 6, 100).unwrap(),
                bit_streams(&gxy, 6, 100).unwrap(),
            );
            for l in 0..6 {
                for i in 0..100 {
                    assert_eq!(sxy[l][i], sx[l][i] ^ sy[l][i]);
                }
            }
        }
    }

    #[test]
    fn characteristic_poly_independent_of_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..5 {
            let spec = dense(11, 4, 100 + seed);
            let want = characteristic_poly(&spec).unwrap();
            assert_eq!(want.degree(), Some(11));
            for _ in 0..10 {
                let raw = rng.gen_range(1u64..1 << 11);
                let g = spec.make(&Seed::Raw(vec![raw])).unwrap();
                assert_eq!(characteristic_poly_of(&g).unwrap(), want);
            }
        }
    }

    #[test]
    fn companion_characteristic_poly() {
        let q = F2Poly::from_exponents(&[4, 1, 0]);
        let spec = SmallDenseSpec::companion(&q, BitMatrix::identity(4)).unwrap();
        let spec = GeneratorSpec::SmallDense(Arc::new(spec));
        assert_eq!(characteristic_poly(&spec).unwrap(), q);
    }

    #[test]
    fn non_maximal_detected() {
        let spec = SmallDenseSpec::new(BitMatrix::identity(3), BitMatrix::identity(3)).unwrap();
        let g = SmallDense::new(Arc::new(spec), &[0b011]).unwrap();
        assert!(matches!(characteristic_poly_of(&g), Err(Error::NotMaximal { expected: 3, got: 1 })));
    }

    #[test]
    fn numerators_expand_back_to_streams() {
        for seed in 0..8 {
            let spec = dense(14, 5, 40 + seed);
            let poly = characteristic_poly(&spec).unwrap();
            let g = spec.make(&Seed::Integer(seed as u32 + 1)).unwrap();
            let hs = numerator_polys(&g, 5, &poly).unwrap();
            let streams = bit_streams(&g, 5, 3 * 14).unwrap();
            for (h, s) in hs.iter().zip(&streams) {
                assert!(h.degree().is_none_or(|d| d < 14));
                assert_eq!(&expand(h, &poly, 3 * 14), s);
            }
        }
    }

    #[test]
    fn identical_streams_identical_numerators() {
        let mut b = BitMatrix::zeros(3, 5);
        b.set(0, 0, true);
        b.set(1, 3, true);
        b.set(2, 0, true);
        let spec = SmallDenseSpec::companion(&F2Poly::from_exponents(&[5, 2, 0]), b).unwrap();
        let g = SmallDense::new(Arc::new(spec), &[0b10110]).unwrap();
        let poly = characteristic_poly_of(&g).unwrap();
        let hs = numerator_polys(&g, 3, &poly).unwrap();
        assert_eq!(hs[0], hs[2]);
        assert!(hs[0].degree().unwrap() < 5);
    }

    #[test]
    fn mt_numerators_expand_back() {
        let spec = GeneratorSpec::Mt19937;
        let poly = characteristic_poly(&spec).unwrap();
        let g = spec.make(&Seed::Integer(77)).unwrap();
        let hs = numerator_polys(&g, 2, &poly).unwrap();
        let streams = bit_streams(&g, 2, 3 * mt::P).unwrap();
        for (h, s) in hs.iter().zip(&streams) {
            assert_eq!(&expand(h, &poly, 3 * mt::P), s);
        }
    }

    #[test]
    fn mt_and_memt_share_characteristic_poly() {
        let p = characteristic_poly(&GeneratorSpec::Mt19937).unwrap();
        assert_eq!(p.degree(), Some(19937));
        assert_eq!(p.weight(), 135);
        assert_eq!(characteristic_poly(&GeneratorSpec::Memt19937II).unwrap(), p);
    }

    #[test]
    fn output_recurrence_check_on_mt() {
        assert!(output_recurrence_check(&GeneratorSpec::Mt19937, 10_000).unwrap());
        assert!(output_recurrence_check(&GeneratorSpec::Mt19937, 0).unwrap());
        assert!(output_recurrence_check(&GeneratorSpec::Memt19937II, 10).is_err());
    }
}
