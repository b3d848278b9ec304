//! Combinatorics on words: periods, Lyndon roots, maximal repetitions and
//! misperiods.

use crate::lce::LceIndex;

/// Hamming distance of two equal-length byte strings.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    assert_eq!(a.len(), b.len(), "hamming distance needs equal lengths");
    a.iter().zip(b.iter()).filter(|(x, y)| x != y).count()
}

/// Smallest period of `s`: the least `p >= 1` with `s[i] == s[i+p]` for all
/// valid `i`. Computed from the Morris-Pratt failure function.
pub fn smallest_period(s: &[u8]) -> usize {
    let n = s.len();
    assert!(n > 0, "period of an empty string is undefined");
    let mut fail = vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    n - fail[n - 1]
}

/// Index of the lexicographically least rotation of `s` (Booth's algorithm).
pub fn lyndon_root(s: &[u8]) -> usize {
    let n = s.len();
    assert!(n > 0);
    let mut i = 0usize;
    let mut j = 1usize;
    let mut k = 0usize;
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i = (i + k + 1).max(j + 1);
        } else {
            j = (j + k + 1).max(i + 1);
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A maximal repetition (run) `text[start ..= end]` with smallest period
/// `period` and the offset in `[0..period)` at which the lexicographically
/// least rotation of the period (the Lyndon root) first starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Run {
    pub start: usize,
    pub end: usize,
    pub period: usize,
    pub root_off: usize,
}

impl Run {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }
}

/// All runs of `text` (maximal repetitions of length at least twice their
/// smallest period), via longest common extensions around every multiple of
/// every candidate period; O(n log n) candidates overall.
///
/// `lce` / `rev_lce` must be LCE indexes of the text and the reversed text.
pub fn compute_runs(text: &[u8], lce: &LceIndex, rev_lce: &LceIndex) -> Vec<Run> {
    let n = text.len();
    let mut found: Vec<(usize, usize, usize)> = Vec::new();
    // Backward extension: longest common suffix of text[..=a] and text[..=b].
    let bwd = |a: usize, b: usize| rev_lce.lce(n - 1 - a, n - 1 - b);
    for p in 1..=n / 2 {
        let mut j = p;
        while j < n {
            let right = lce.lce(j - p, j);
            let left = if j >= p + 1 { bwd(j - p - 1, j - 1) } else { 0 };
            let start = j - p - left;
            let end = j + right - 1; // inclusive
            if end + 1 - start >= 2 * p {
                found.push((start, end, p));
            }
            j += p;
        }
    }
    // The same interval may surface with several (non-smallest) periods and
    // from several anchor multiples; keep the smallest period per interval.
    found.sort_unstable();
    found.dedup();
    let mut runs: Vec<Run> = Vec::new();
    for (start, end, p) in found {
        if let Some(last) = runs.last() {
            if last.start == start && last.end == end {
                continue; // smaller period already kept
            }
        }
        let root_off = lyndon_root(&text[start..start + p]);
        runs.push(Run { start, end, period: p, root_off });
    }
    runs.sort_unstable_by_key(|r| (r.start, r.period));
    runs
}

/// Runs long enough and periodic enough to matter at scale `tau`: length at
/// least `3*tau - 1` and period at most `tau / 3`.
pub fn tau_runs(runs: &[Run], tau: usize) -> Vec<Run> {
    runs.iter()
        .copied()
        .filter(|r| r.len() >= 3 * tau - 1 && 3 * r.period <= tau)
        .collect()
}

/// Misperiods of `s` with respect to the window `s[i..j)`: positions `a`
/// outside the window whose character differs from the unique window position
/// congruent to `a` modulo `j - i`.
///
/// Returns `(left, right)` capped at `limit` entries per side; `left` is in
/// decreasing order (closest to the window first), `right` in increasing
/// order.
pub fn misper(s: &[u8], i: usize, j: usize, limit: usize) -> (Vec<usize>, Vec<usize>) {
    assert!(i < j && j <= s.len());
    let d = j - i;
    let window_char = |a: usize| {
        let b = i + (a + d * s.len() - i) % d;
        s[b]
    };
    let mut left = Vec::new();
    let mut a = i;
    while a > 0 && left.len() < limit {
        a -= 1;
        if s[a] != window_char(a) {
            left.push(a);
        }
    }
    let mut right = Vec::new();
    let mut a = j;
    while a < s.len() && right.len() < limit {
        if s[a] != window_char(a) {
            right.push(a);
        }
        a += 1;
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods() {
        assert_eq!(smallest_period(b"abcabcab"), 3);
        assert_eq!(smallest_period(b"aaaa"), 1);
        assert_eq!(smallest_period(b"abcd"), 4);
        assert_eq!(smallest_period(b"aabaab"), 3);
    }

    #[test]
    fn lyndon_roots() {
        assert_eq!(lyndon_root(b"aab"), 0);
        assert_eq!(lyndon_root(b"baa"), 1);
        assert_eq!(lyndon_root(b"aba"), 2);
        assert_eq!(lyndon_root(b"cabab"), 1);
        assert_eq!(lyndon_root(b"aaaa"), 0);
    }

    #[test]
    fn runs_of_aabaab() {
        let t = b"aabaab";
        let rev: Vec<u8> = t.iter().rev().copied().collect();
        let lce = LceIndex::new(t);
        let rev_lce = LceIndex::new(&rev);
        let runs = compute_runs(t, &lce, &rev_lce);
        assert_eq!(
            runs,
            vec![
                Run { start: 0, end: 1, period: 1, root_off: 0 },
                Run { start: 0, end: 5, period: 3, root_off: 0 },
                Run { start: 3, end: 4, period: 1, root_off: 0 },
            ]
        );
    }

    fn naive_runs(text: &[u8]) -> Vec<(usize, usize, usize)> {
        let n = text.len();
        let mut out = Vec::new();
        for s in 0..n {
            for e in s + 1..n {
                let p = smallest_period(&text[s..=e]);
                if (e - s + 1) < 2 * p {
                    continue;
                }
                let left_ext = s > 0 && text[s - 1] == text[s - 1 + p];
                let right_ext = e + 1 < n && text[e + 1] == text[e + 1 - p];
                if !left_ext && !right_ext {
                    out.push((s, e, p));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn runs_match_naive_on_random_texts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(2..60);
            let sigma = if rng.gen_bool(0.5) { 2u8 } else { 3u8 };
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let rev: Vec<u8> = text.iter().rev().copied().collect();
            let lce = LceIndex::new(&text);
            let rev_lce = LceIndex::new(&rev);
            let got: Vec<(usize, usize, usize)> =
                compute_runs(&text, &lce, &rev_lce).iter().map(|r| (r.start, r.end, r.period)).collect();
            let mut got_sorted = got.clone();
            got_sorted.sort_unstable();
            assert_eq!(got_sorted, naive_runs(&text), "text {:?}", String::from_utf8_lossy(&text));
        }
    }

    #[test]
    fn misper_example() {
        // s = abababcab, window [2..4) = "ab"
        let s = b"abababcab";
        let (left, right) = misper(s, 2, 4, 10);
        assert_eq!(left, Vec::<usize>::new());
        assert_eq!(right, vec![6, 7, 8]);
        let (left, _) = misper(s, 6, 7, 10); // window "c"
        assert_eq!(left, vec![5, 4, 3, 2, 1, 0]);
    }
}
