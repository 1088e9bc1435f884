use rand::Rng;

use crate::error::{Error, Result};

/// Linear-bias rank selection over `n` ranked individuals (index 0 is best).
///
/// Draws `u ~ U[0, 1)` and returns
/// `floor(n * (b - sqrt(b^2 - 4 (b - 1) u)) / (2 (b - 1)))`, clamped to `[0, n - 1]`.
pub fn rank_select(n: usize, bias: f64, rng: &mut impl Rng) -> Result<usize> {
    if !(bias > 1.0 && bias < 2.0) {
        return Err(Error::InvalidValue {
            name: "rank_bias".into(),
            reason: format!("{bias} outside (1, 2)"),
        });
    }
    assert!(n >= 1, "cannot select from an empty population");
    let u: f64 = rng.gen();
    let root = (bias * bias - 4.0 * (bias - 1.0) * u).sqrt();
    let r = (n as f64 * (bias - root) / (2.0 * (bias - 1.0))).floor();
    Ok((r.max(0.0) as usize).min(n - 1))
}

/// Exact selection probability of each index under [`rank_select`].
///
/// The draw inverts the cdf `F(x) = b x - (b - 1) x^2` on `[0, 1]`, so index
/// `i` has probability `F((i + 1) / n) - F(i / n)`.
pub fn rank_probabilities(n: usize, bias: f64) -> Vec<f64> {
    let cdf = |x: f64| bias * x - (bias - 1.0) * x * x;
    (0..n)
        .map(|i| cdf((i + 1) as f64 / n as f64) - cdf(i as f64 / n as f64))
        .collect()
}

/// Tournament over `n` ranked individuals: `size` uniform draws with
/// replacement, best rank wins.
pub fn tournament_select(n: usize, size: usize, rng: &mut impl Rng) -> usize {
    assert!(n >= 1, "cannot select from an empty population");
    (0..size.max(1)).map(|_| rng.gen_range(0..n)).min().expect("size >= 1")
}
