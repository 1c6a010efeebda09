//! MT19937 and MEMT19937-II.
//!
//! Both share the same twisted recurrence; they differ only in the output
//! map. The recurrence is kept in a two-block buffer so the most recent 624
//! words are always contiguous: `buf[cur]` is the newest word `m_i`,
//! `buf[cur - k]` is `m_{i-k}`. Words are produced a block at a time.

use super::LinearGenerator;
use crate::error::{Error, Result};

pub const N: usize = 624;
pub const M: usize = 397;
pub const R: u32 = 31;
pub const P: usize = 32 * N - R as usize;
pub const MATRIX_A: u32 = 0x9908_b0df;
const UPPER: u32 = 0x8000_0000;
const LOWER: u32 = 0x7fff_ffff;

const TEMPER_B: u32 = 0x9d2c_5680;
const TEMPER_C: u32 = 0xefc6_0000;

const MEMT_LAG1: usize = 473;
const MEMT_MASK1: u32 = 0xb219_beab;
const MEMT_LAG2: usize = 588;
const MEMT_MASK2: u32 = 0x56bd_e52a;

/// The standard 32-bit seeding recurrence of the reference MT19937 code.
pub fn init_genrand(seed: u32) -> [u32; N] {
    let mut mt = [0u32; N];
    mt[0] = seed;
    for i in 1..N {
        let prev = mt[i - 1];
        mt[i] = 1_812_433_253u32
            .wrapping_mul(prev ^ (prev >> 30))
            .wrapping_add(i as u32);
    }
    mt
}

#[inline]
pub fn twist(x: u32) -> u32 {
    (x >> 1) ^ (0u32.wrapping_sub(x & 1) & MATRIX_A)
}

#[inline]
pub fn temper(mut y: u32) -> u32 {
    y ^= y >> 11;
    y ^= (y << 7) & TEMPER_B;
    y ^= (y << 15) & TEMPER_C;
    y ^= y >> 18;
    y
}

fn undo_right(y: u32, s: u32) -> u32 {
    let mut x = y;
    for _ in 0..32 / s + 1 {
        x = y ^ (x >> s);
    }
    x
}

fn undo_left(y: u32, s: u32, mask: u32) -> u32 {
    let mut x = y;
    for _ in 0..32 / s + 1 {
        x = y ^ ((x << s) & mask);
    }
    x
}

pub fn untemper(y: u32) -> u32 {
    let y = undo_right(y, 18);
    let y = undo_left(y, 15, TEMPER_C);
    let y = undo_left(y, 7, TEMPER_B);
    undo_right(y, 11)
}

#[derive(Clone)]
pub(crate) struct MtCore {
    buf: Box<[u32; 2 * N]>,
    cur: usize,
}

impl MtCore {
    pub(crate) fn from_words(words: &[u32; N]) -> Result<Self> {
        let mut buf = Box::new([0u32; 2 * N]);
        buf[..N].copy_from_slice(words);
        let core = MtCore { buf, cur: N - 1 };
        if core.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(core)
    }

    fn is_zero(&self) -> bool {
        let w = self.window();
        w[0] & UPPER == 0 && w[1..].iter().all(|&x| x == 0)
    }

    /// Oldest to newest.
    fn window(&self) -> &[u32] {
        &self.buf[self.cur + 1 - N..=self.cur]
    }

    pub(crate) fn from_raw(bits: &[u64]) -> Result<Self> {
        let bit = |j: usize| (bits[j / 64] >> (j % 64)) & 1 == 1;
        let mut words = [0u32; N];
        if bit(0) {
            words[0] = UPPER;
        }
        for (k, word) in words.iter_mut().enumerate().skip(1) {
            for b in 0..32 {
                if bit(1 + 32 * (k - 1) + b) {
                    *word |= 1 << b;
                }
            }
        }
        Self::from_words(&words)
    }

    /// Raw layout: bit 0 is the top bit of the oldest word, then each of the
    /// 623 newer words least significant bit first.
    pub(crate) fn raw_state(&self) -> Vec<u64> {
        let w = self.window();
        let mut out = vec![0u64; P.div_ceil(64)];
        let mut set = |j: usize| out[j / 64] |= 1 << (j % 64);
        if w[0] & UPPER != 0 {
            set(0);
        }
        for (k, &word) in w.iter().enumerate().skip(1) {
            for b in 0..32 {
                if (word >> b) & 1 == 1 {
                    set(1 + 32 * (k - 1) + b);
                }
            }
        }
        out
    }

    fn regenerate(&mut self) {
        let buf: &mut [u32; 2 * N] = &mut self.buf;
        for j in 0..N {
            let y = (buf[j] & UPPER) | (buf[j + 1] & LOWER);
            buf[N + j] = buf[j + M] ^ twist(y);
        }
    }

    #[inline]
    fn roll(&mut self) {
        if self.cur == 2 * N - 1 {
            self.buf.copy_within(N.., 0);
            self.cur = N - 1;
        }
        if self.cur == N - 1 {
            self.regenerate();
        }
    }

    #[inline]
    pub(crate) fn step(&mut self) {
        self.roll();
        self.cur += 1;
    }

    pub(crate) fn advance(&mut self, mut n: u64) {
        while n > 0 {
            self.roll();
            let room = (2 * N - 1 - self.cur) as u64;
            let take = n.min(room);
            self.cur += take as usize;
            n -= take;
        }
    }

    /// `m_{i-k}`
    #[inline]
    pub(crate) fn word(&self, k: usize) -> u32 {
        self.buf[self.cur - k]
    }
}

#[derive(Clone)]
pub struct Mt19937 {
    core: MtCore,
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        Mt19937 {
            core: MtCore::from_words(&init_genrand(seed)).expect("seeded state is nonzero"),
        }
    }

    pub fn from_words(words: &[u32; N]) -> Result<Self> {
        Ok(Mt19937 {
            core: MtCore::from_words(words)?,
        })
    }

    pub fn from_raw(bits: &[u64]) -> Result<Self> {
        Ok(Mt19937 {
            core: MtCore::from_raw(bits)?,
        })
    }
}

impl LinearGenerator for Mt19937 {
    fn state_bits(&self) -> usize {
        P
    }

    fn word_bits(&self) -> u32 {
        32
    }

    #[inline]
    fn step(&mut self) {
        self.core.step();
    }

    #[inline]
    fn output(&self) -> u64 {
        temper(self.core.word(0)) as u64
    }

    fn advance(&mut self, n: u64) {
        self.core.advance(n);
    }

    fn raw_state(&self) -> Vec<u64> {
        self.core.raw_state()
    }
}

/// MT19937 with the tempering replaced by a map that also reads
/// `m_{i-473}` and `m_{i-588}`.
#[derive(Clone)]
pub struct Memt19937II {
    core: MtCore,
}

impl Memt19937II {
    pub fn new(seed: u32) -> Self {
        Memt19937II {
            core: MtCore::from_words(&init_genrand(seed)).expect("seeded state is nonzero"),
        }
    }

    pub fn from_words(words: &[u32; N]) -> Result<Self> {
        Ok(Memt19937II {
            core: MtCore::from_words(words)?,
        })
    }

    pub fn from_raw(bits: &[u64]) -> Result<Self> {
        Ok(Memt19937II {
            core: MtCore::from_raw(bits)?,
        })
    }
}

impl LinearGenerator for Memt19937II {
    fn state_bits(&self) -> usize {
        P
    }

    fn word_bits(&self) -> u32 {
        32
    }

    #[inline]
    fn step(&mut self) {
        self.core.step();
    }

    #[inline]
    fn output(&self) -> u64 {
        let mut z = self.core.word(0);
        z ^= self.core.word(MEMT_LAG1) & MEMT_MASK1;
        z ^= z << 8;
        z ^= z << 14;
        (z ^ (self.core.word(MEMT_LAG2) & MEMT_MASK2)) as u64
    }

    fn advance(&mut self, n: u64) {
        self.core.advance(n);
    }

    fn raw_state(&self) -> Vec<u64> {
        self.core.raw_state()
    }
}

/// Checks the matrix-recurrence form of MT19937 directly on its outputs:
/// `y_i = y_{i-227} + T A~ (upper(T^-1 y_{i-624}) | lower(T^-1 y_{i-623}))`
/// for every `i >= 624` in the slice.
pub fn output_recurrence_holds(outputs: &[u32]) -> bool {
    (N..outputs.len()).all(|i| {
        let y = (untemper(outputs[i - N]) & UPPER) | (untemper(outputs[i - N + 1]) & LOWER);
        outputs[i] == outputs[i - (N - M)] ^ temper(twist(y))
    })
}
