//! Poisson probabilities in log space.
//!
//! The log pmf uses the saddle-point form
//! `ln p(y; mu) = -stirlerr(y) - bd0(y, mu) - ln(2 pi y) / 2`, which stays
//! accurate when `y` and `mu` are large and close.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const REL_TOL: f64 = 1e-18;

/// `ln y! - ((y + 1/2) ln y - y + ln sqrt(2 pi))`
fn stirlerr(y: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if y <= 15 {
        let n = y as f64;
        let ln_fact: f64 = (2..=y).map(|k| (k as f64).ln()).sum();
        return ln_fact - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let n = y as f64;
    let nn = n * n;
    if y > 500 {
        return (S0 - S1 / nn) / n;
    }
    if y > 80 {
        return (S0 - (S1 - S2 / nn) / nn) / n;
    }
    if y > 35 {
        return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
    }
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// `y ln(y / mu) + mu - y`, computed without cancellation near `y = mu`.
fn bd0(y: f64, mu: f64) -> f64 {
    if (y - mu).abs() < 0.1 * (y + mu) {
        let v = (y - mu) / (y + mu);
        let mut s = (y - mu) * v;
        let mut ej = 2.0 * y * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        y * (y / mu).ln() + mu - y
    }
}

/// `ln P(X = y)` for `X ~ Poisson(mu)`.
pub fn ln_pmf(mu: f64, y: u64) -> f64 {
    if y == 0 {
        return -mu;
    }
    let n = y as f64;
    -stirlerr(y) - bd0(n, mu) - 0.5 * (2.0 * PI * n).ln()
}

fn check_mean(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMean(mu))
    }
}

/// `sum_{j >= y} P(X = j) / P(X = y)`
fn upper_ratio_sum(mu: f64, y: u64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = y;
    loop {
        j += 1;
        term *= mu / j as f64;
        sum += term;
        if term < REL_TOL * sum {
            return sum;
        }
    }
}

/// `sum_{j <= y} P(X = j) / P(X = y)`
fn lower_ratio_sum(mu: f64, y: u64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = y;
    while j > 0 {
        term *= j as f64 / mu;
        sum += term;
        j -= 1;
        if term < REL_TOL * sum {
            break;
        }
    }
    sum
}

/// `ln P(X >= y)`; stays finite far below the smallest positive `f64`.
pub fn ln_right_tail(mu: f64, y: u64) -> Result<f64> {
    check_mean(mu)?;
    if y == 0 {
        return Ok(0.0);
    }
    if y as f64 > mu {
        Ok(ln_pmf(mu, y) + upper_ratio_sum(mu, y).ln())
    } else {
        let below = (ln_pmf(mu, y - 1) + lower_ratio_sum(mu, y - 1).ln()).exp();
        Ok((-below).ln_1p())
    }
}

/// `P(X >= y)` for `X ~ Poisson(mu)`.
pub fn poisson_right_tail(mu: f64, y: u64) -> Result<f64> {
    Ok(ln_right_tail(mu, y)?.exp())
}
