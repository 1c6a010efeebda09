//! Birthday spacings and the distributions used to score them.

pub mod birthday;
pub mod poisson;

pub use birthday::{birthday_spacings, collisions, lagged_points, BirthdayParams, BirthdayReport};
pub use poisson::{ln_right_tail, poisson_right_tail};

/// Kolmogorov–Smirnov distance between the sample and U(0,1), with its
/// asymptotic p-value (Stephens' small-sample correction).
pub fn ks_uniform(sample: &[f64]) -> (f64, f64) {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    (d, kolmogorov_q(lambda))
}

/// `P(K > x)` for the Kolmogorov distribution.
fn kolmogorov_q(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_accepts_a_uniform_grid_and_rejects_a_skewed_one() {
        let grid: Vec<f64> = (0..500).map(|i| (i as f64 + 0.5) / 500.0).collect();
        let (d, p) = ks_uniform(&grid);
        assert!(d < 0.002 && p > 0.99);
        let skewed: Vec<f64> = grid.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&skewed).1 < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_reference_points() {
        // classical critical values: 1.36 at 5%, 1.63 at 1%, 1.95 at 0.1%
        assert!((kolmogorov_q(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.628) - 0.01).abs() < 5e-4);
        assert!((kolmogorov_q(1.949) - 0.001).abs() < 1e-4);
    }
}
