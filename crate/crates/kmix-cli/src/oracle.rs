//! Brute-force reference semantics: positionwise scans for k-mismatch and
//! wildcard occurrences, and a direct evaluation of the nearly-periodic
//! occurrence definition. Everything here is deliberately naive; the point is
//! to be obviously correct, not fast.

use kmix_core::strings::{misper, smallest_period};

/// All `i` with `i + |pat| ≤ |text|` and Hamming distance at most `k`
/// between `text[i..i+|pat|)` and `pat`. The empty pattern occurs at every
/// position in `[0..n]`.
pub fn brute_kmismatch(text: &[u8], pat: &[u8], k: usize) -> Vec<u32> {
    if pat.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pat.len())
        .filter(|&i| {
            text[i..i + pat.len()]
                .iter()
                .zip(pat)
                .filter(|(a, b)| a != b)
                .count()
                <= k
        })
        .map(|i| i as u32)
        .collect()
}

/// All starts of fragments matching `pat`, where `wc` in the pattern matches
/// every text character.
pub fn brute_wildcard(text: &[u8], pat: &[u8], wc: u8) -> Vec<u32> {
    if pat.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pat.len())
        .filter(|&i| {
            text[i..i + pat.len()]
                .iter()
                .zip(pat)
                .all(|(&a, &b)| b == wc || a == b)
        })
        .map(|i| i as u32)
        .collect()
}

/// Whether the k-mismatch occurrence of `pat` at `j` is nearly periodic:
/// some pattern block `pat[iγ..(i+1)γ)` has smallest period `p ≤ ⌊τ/3⌋`
/// (τ = ⌊γ/3⌋), equals the corresponding text block, and the total mismatch
/// count splits exactly into the pattern-side and text-side misperiods of
/// that block's period window.
///
/// # Panics
/// If `j` is not a k-mismatch occurrence of `pat`.
pub fn classify_nearly_periodic(
    text: &[u8],
    pat: &[u8],
    j: usize,
    k: usize,
    gamma: usize,
) -> bool {
    let m = pat.len();
    assert!(m >= (k + 1) * gamma && j + m <= text.len());
    let frag = &text[j..j + m];
    let dist = frag.iter().zip(pat).filter(|(a, b)| a != b).count();
    assert!(dist <= k, "position {j} is not a k-mismatch occurrence");
    let tau = gamma / 3;
    for i in 0..=k {
        let bs = i * gamma;
        let p = smallest_period(&pat[bs..bs + gamma]);
        if 3 * p > tau || pat[bs..bs + gamma] != frag[bs..bs + gamma] {
            continue;
        }
        let count = |s: &[u8]| {
            let (l, r) = misper(s, bs, bs + p, s.len());
            l.len() + r.len()
        };
        if count(pat) + count(frag) == dist {
            return true;
        }
    }
    false
}
