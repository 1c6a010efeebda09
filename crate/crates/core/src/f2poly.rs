//! Polynomials over F2, bit-packed into `u64` words.
//!
//! Bit `j` of the packed representation is the coefficient of `z^j`. The
//! word vector is kept trimmed (no zero words above the leading term), so the
//! zero polynomial is the empty vector and its degree is `None`, which orders
//! below every `Some(d)` the way "minus infinity" should.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct F2Poly {
    words: Vec<u64>,
}

/// XOR `src << shift` into `dst`. `dst` must be long enough to hold the result.
#[inline]
fn xor_shifted_into(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    if bs == 0 {
        for (d, s) in dst[ws..ws + src.len()].iter_mut().zip(src) {
            *d ^= *s;
        }
    } else {
        let mut carry = 0u64;
        for (d, &s) in dst[ws..ws + src.len()].iter_mut().zip(src) {
            *d ^= (s << bs) | carry;
            carry = s >> (64 - bs);
        }
        if carry != 0 {
            dst[ws + src.len()] ^= carry;
        }
    }
}

/// Index of the highest set bit in `words[..=top_word]`, scanning downwards.
#[inline]
fn highest_bit(words: &[u64], top_word: usize) -> Option<usize> {
    let mut i = top_word.min(words.len().checked_sub(1)?);
    loop {
        let w = words[i];
        if w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
        if i == 0 {
            return None;
        }
        i -= 1;
    }
}

impl F2Poly {
    pub fn zero() -> Self {
        F2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        F2Poly { words: vec![1] }
    }

    /// `z^k`
    pub fn monomial(k: usize) -> Self {
        let mut words = vec![0u64; k / 64 + 1];
        words[k / 64] = 1 << (k % 64);
        F2Poly { words }
    }

    pub fn from_u64(bits: u64) -> Self {
        Self::from_words(vec![bits])
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = F2Poly { words };
        p.trim();
        p
    }

    /// Polynomial with a 1 at each listed exponent. Repeated exponents cancel.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = F2Poly::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    /// Polynomial whose coefficient of `z^j` is `bits[j]`.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[j / 64] |= 1 << (j % 64);
        }
        Self::from_words(words)
    }

    fn trim(&mut self) {
        while let Some(&0) = self.words.last() {
            self.words.pop();
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, j: usize) -> bool {
        self.words
            .get(j / 64)
            .is_some_and(|w| (w >> (j % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, j: usize) {
        if self.words.len() <= j / 64 {
            self.words.resize(j / 64 + 1, 0);
        }
        self.words[j / 64] ^= 1 << (j % 64);
        self.trim();
    }

    pub fn set_coeff(&mut self, j: usize, value: bool) {
        if self.coeff(j) != value {
            self.flip(j);
        }
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents with coefficient 1, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// `self += other * z^shift`
    pub fn add_shifted(&mut self, other: &F2Poly, shift: usize) {
        if other.is_zero() {
            return;
        }
        let need = other.words.len() + shift / 64 + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        xor_shifted_into(&mut self.words, &other.words, shift);
        self.trim();
    }

    pub fn shl(&self, k: usize) -> F2Poly {
        let mut out = F2Poly::zero();
        out.add_shifted(self, k);
        out
    }

    /// Drop the `k` lowest coefficients (floor division by `z^k`).
    pub fn shr(&self, k: usize) -> F2Poly {
        let ws = k / 64;
        let bs = k % 64;
        if ws >= self.words.len() {
            return F2Poly::zero();
        }
        let src = &self.words[ws..];
        let words = if bs == 0 {
            src.to_vec()
        } else {
            (0..src.len())
                .map(|i| (src[i] >> bs) | src.get(i + 1).map_or(0, |&hi| hi << (64 - bs)))
                .collect()
        };
        F2Poly::from_words(words)
    }

    /// Keep only the coefficients of `z^0 .. z^(k-1)`.
    pub fn truncate(&self, k: usize) -> F2Poly {
        let mut words: Vec<u64> = self.words.iter().take(k.div_ceil(64)).copied().collect();
        if !k.is_multiple_of(64) {
            if let Some(last) = words.get_mut(k / 64) {
                *last &= (1u64 << (k % 64)) - 1;
            }
        }
        F2Poly::from_words(words)
    }

    /// `z^n * self(1/z)`; requires `deg self <= n`.
    pub fn reciprocal(&self, n: usize) -> F2Poly {
        debug_assert!(self.degree().is_none_or(|d| d <= n));
        let mut words = vec![0u64; n / 64 + 1];
        for e in self.exponents() {
            let j = n - e;
            words[j / 64] |= 1 << (j % 64);
        }
        F2Poly::from_words(words)
    }

    pub fn mul(&self, other: &F2Poly) -> F2Poly {
        if self.is_zero() || other.is_zero() {
            return F2Poly::zero();
        }
        let (a, b) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![0u64; a.words.len() + b.words.len() + 1];
        for (i, &w) in a.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                xor_shifted_into(&mut out, &b.words, i * 64 + bit);
                w &= w - 1;
            }
        }
        F2Poly::from_words(out)
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn divrem(&self, divisor: &F2Poly) -> Result<(F2Poly, F2Poly)> {
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let mut r = self.words.clone();
        let Some(mut dr) = self.degree() else {
            return Ok((F2Poly::zero(), F2Poly::zero()));
        };
        if dr < db {
            return Ok((F2Poly::zero(), self.clone()));
        }
        r.push(0);
        let mut q = vec![0u64; (dr - db) / 64 + 1];
        loop {
            let s = dr - db;
            q[s / 64] |= 1 << (s % 64);
            xor_shifted_into(&mut r, &divisor.words, s);
            match highest_bit(&r, dr / 64) {
                Some(d) if d >= db => dr = d,
                _ => break,
            }
        }
        Ok((F2Poly::from_words(q), F2Poly::from_words(r)))
    }

    pub fn rem(&self, modulus: &F2Poly) -> Result<F2Poly> {
        Ok(self.divrem(modulus)?.1)
    }

    pub fn mul_mod(&self, other: &F2Poly, modulus: &F2Poly) -> Result<F2Poly> {
        self.mul(other).rem(modulus)
    }

    /// `(g, s, t)` with `g = gcd(a, b)` and `s*a + t*b = g`.
    pub fn extgcd(a: &F2Poly, b: &F2Poly) -> Result<(F2Poly, F2Poly, F2Poly)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut r0, mut s0, mut t0) = (a.clone(), F2Poly::one(), F2Poly::zero());
        let (mut r1, mut s1, mut t1) = (b.clone(), F2Poly::zero(), F2Poly::one());
        loop {
            if r0.degree() < r1.degree() {
                std::mem::swap(&mut r0, &mut r1);
                std::mem::swap(&mut s0, &mut s1);
                std::mem::swap(&mut t0, &mut t1);
            }
            let (Some(d0), Some(d1)) = (r0.degree(), r1.degree()) else {
                break;
            };
            let sh = d0 - d1;
            r0.add_shifted(&r1, sh);
            s0.add_shifted(&s1, sh);
            t0.add_shifted(&t1, sh);
        }
        Ok((r0, s0, t0))
    }

    /// Inverse of `self` modulo `modulus`, reduced below `deg modulus`.
    pub fn inverse_mod(&self, modulus: &F2Poly) -> Result<F2Poly> {
        match modulus.degree() {
            Some(d) if d >= 1 => {}
            _ => return Err(Error::DegenerateModulus),
        }
        let a = self.rem(modulus)?;
        if a.is_zero() {
            return Err(Error::NotInvertible);
        }
        let (g, s, _) = F2Poly::extgcd(&a, modulus)?;
        if !g.is_one() {
            return Err(Error::NotInvertible);
        }
        s.rem(modulus)
    }

    /// Hexadecimal coefficient string; the constant term is the least
    /// significant bit of the last digit.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::with_capacity(self.words.len() * 16);
        let (top, rest) = self.words.split_last().expect("nonzero");
        s.push_str(&format!("{top:x}"));
        for w in rest.iter().rev() {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(hex: &str) -> Result<F2Poly> {
        let hex = hex.trim();
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        let digits: Vec<u8> = hex.bytes().filter(|&c| c != b'_').collect();
        if digits.is_empty() {
            return Err(Error::Parse("empty hex string".into()));
        }
        let mut words = vec![0u64; digits.len().div_ceil(16)];
        for (i, &c) in digits.iter().rev().enumerate() {
            let v = (c as char)
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {:?}", c as char)))?;
            words[i / 16] |= (v as u64) << (4 * (i % 16));
        }
        Ok(F2Poly::from_words(words))
    }
}

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Poly(0x{})", self.to_hex())
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            None => write!(f, "deg=-inf weight=0 hex=0"),
            Some(d) => write!(f, "deg={} weight={} hex={}", d, self.weight(), self.to_hex()),
        }
    }
}

impl AddAssign<&F2Poly> for F2Poly {
    fn add_assign(&mut self, rhs: &F2Poly) {
        self.add_shifted(rhs, 0);
    }
}

impl Add<&F2Poly> for &F2Poly {
    type Output = F2Poly;
    fn add(self, rhs: &F2Poly) -> F2Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Mul<&F2Poly> for &F2Poly {
    type Output = F2Poly;
    fn mul(self, rhs: &F2Poly) -> F2Poly {
        F2Poly::mul(self, rhs)
    }
}

/// Minimal polynomial of a binary sequence by Berlekamp–Massey.
///
/// The result `C(z) = sum c_j z^j` is monic of degree equal to the linear
/// complexity `L` and satisfies `sum_j c_j * bits[i + j] = 0` for every
/// `0 <= i < len - L`. The all-zero sequence gives the constant `1`.
pub fn berlekamp_massey(bits: &[bool]) -> F2Poly {
    let n = bits.len();
    // rev bit k holds bits[n - 1 - k], so a window of ascending connection
    // coefficients lines up with descending sequence positions.
    let mut rev = vec![0u64; (n + 128) / 64 + 2];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        let k = n - 1 - i;
        rev[k / 64] |= 1 << (k % 64);
    }
    let window = |off: usize| -> u64 {
        let w = off / 64;
        let b = off % 64;
        if b == 0 {
            rev[w]
        } else {
            (rev[w] >> b) | (rev[w + 1] << (64 - b))
        }
    };

    let mut c = F2Poly::one();
    let mut b = F2Poly::one();
    let mut l = 0usize;
    let mut m: isize = -1;
    for idx in 0..n {
        let off = n - 1 - idx;
        let mut acc = 0u64;
        for (wi, &cw) in c.words.iter().enumerate() {
            acc ^= cw & window(off + 64 * wi);
        }
        if acc.count_ones() & 1 == 0 {
            continue;
        }
        let shift = (idx as isize - m) as usize;
        if 2 * l <= idx {
            let t = c.clone();
            c.add_shifted(&b, shift);
            l = idx + 1 - l;
            m = idx as isize;
            b = t;
        } else {
            c.add_shifted(&b, shift);
        }
    }
    c.reciprocal(l)
}
