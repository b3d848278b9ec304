//! Automatic choice of the split between the short-pattern and long-pattern
//! indexes. For k ≥ 2 the threshold μ follows the combined-index analysis
//! (powers of log₂ n, with a small slack ε′ = 0.1 in the odd-k exponent);
//! γ = ⌊μ/(k+1)⌋ so that every pattern of length ≥ (k+1)γ reaches the long
//! index and everything in between falls back to the compact index. For
//! k = 1 the compact index alone is already optimal, so no split is made.

/// Parameter choice for a text of length `n` and mismatch budget `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutoParams {
    /// k = 1: route every query to the compact index.
    CompactOnly,
    /// k ≥ 2: short index for m ≤ μ (with h stored substitutions), long
    /// index for m ≥ (k+1)γ, compact index in between.
    Split { mu: usize, h: usize, gamma: usize },
}

pub fn auto_params(n: usize, k: usize, _sigma: usize) -> AutoParams {
    assert!(k >= 1);
    if k == 1 {
        return AutoParams::CompactOnly;
    }
    let log = (n.max(2) as f64).log2();
    let exp = if k % 2 == 0 {
        (2 * k + 2) as f64 / (k + 2) as f64
    } else {
        2.0 * k as f64 / (k + 1) as f64 - 0.1
    };
    let mu = (log.powf(exp).floor() as usize).clamp(1, n);
    let h = if k % 2 == 0 { k / 2 } else { (k - 1) / 2 };
    let gamma = (mu / (k + 1)).max(2);
    AutoParams::Split { mu, h, gamma }
}
