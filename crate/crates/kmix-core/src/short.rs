//! Mismatch index for short patterns (length at most μ).
//!
//! The basic scheme stores, for every κ ≤ h and offset j, the compact trie
//! of κ-modified suffixes whose substitutions sit in the first μ positions
//! with the rightmost one at offset j. A query with budget k reports
//! occurrences with at most h mismatches by exact loci of the pattern in
//! these tries, and occurrences with h < d ≤ k mismatches by substituting
//! the pattern's d−h rightmost mismatch positions at query time and probing
//! tries whose stored substitutions lie strictly to the left. Splitting each
//! mismatch set at its (h+1)-th smallest element makes the decomposition
//! unique, so every occurrence is reported exactly once.
//!
//! Two refinements keep the probe count logarithmic: tries are grouped along
//! the f-sequence (t → t − f(t), with f(t) the largest power of two dividing
//! t), whose intervals tile [0..j); and grouped tries are stored as a sampled
//! trie plus a constant-time terminal-retrieval store, with exact terminal
//! ranges recovered by binary search over retrieved terminals.

use crate::kangaroo::{frag_cmp, PlainLcp};
use crate::succinct::IncreasingSeq;
use crate::text::{Frag, Sym};
use crate::trie::CompactTrie;
use std::cmp::Ordering;
use std::collections::HashMap;

/// Largest power of two dividing `t`.
pub fn f_pow2(t: usize) -> usize {
    assert!(t > 0, "f is defined for positive integers");
    t & t.wrapping_neg()
}

/// The sequence j, j−f(j), … down to (but excluding) zero.
pub fn f_sequence(j: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut t = j;
    while t > 0 {
        out.push(t);
        t -= f_pow2(t);
    }
    out
}

/// Substitution triad of a stored terminal: offset of its rightmost
/// substitution (−1 when plain), the original character, the new one.
pub type Triad = (i32, Sym, Sym);

/// Grouped trie 𝒯′ for one (κ, j): terminal count, the sampled trie 𝒯″, and
/// the retrieval directories into the shared suffix list.
pub struct GroupedTrie {
    pub num_terms: usize,
    /// Indices (into the grouped terminal order) of the sampled terminals.
    pub sampled_idx: Vec<usize>,
    /// Compact trie of the sampled terminals, labelled by grouped index.
    pub sampled: CompactTrie,
    /// Per-terminal triad, in lexicographic terminal order.
    pub triads: Vec<Triad>,
    /// For each triad: the increasing sequence of terminal indices (1-based)
    /// carrying it, and the matching list indices (1-based) of their
    /// stripped versions. The latter is increasing — removing a shared
    /// rightmost substitution preserves lexicographic order.
    pub my_triad: HashMap<Triad, IncreasingSeq>,
    pub cut: HashMap<Triad, IncreasingSeq>,
}

/// Shared list L of all (≤ h−1)-modified suffixes with substitutions in the
/// first μ positions, sorted lexicographically.
pub struct RetrievalStore {
    pub list: Vec<Frag>,
    index: HashMap<(u32, Vec<(u32, Sym)>), u32>,
}

impl RetrievalStore {
    fn key(f: &Frag) -> (u32, Vec<(u32, Sym)>) {
        (
            f.start,
            f.subs.iter().map(|s| (s.off, s.ch)).collect(),
        )
    }

    fn locate(&self, f: &Frag) -> u32 {
        self.index[&Self::key(f)]
    }
}

pub struct ShortIndex {
    pub mu: usize,
    pub h: usize,
    pub k: usize,
    pub n: usize,
    pub alphabet: Vec<u8>,
    /// Suffix tree of the text (the κ = 0 trie).
    pub t00: CompactTrie,
    /// Grouped tries keyed by (κ, j), κ ∈ [1..h], j ∈ [1..μ].
    pub grouped: HashMap<(usize, usize), GroupedTrie>,
    pub store: RetrievalStore,
    /// Basic tries 𝒯_{κ,j} keyed by (κ, rightmost offset); kept only when
    /// requested (tests cross-validate against them).
    pub basic: Option<HashMap<(usize, usize), CompactTrie>>,
}

/// All κ-modified suffixes of `text` whose substitutions lie in the first
/// `mu` positions, with the rightmost substitution offset in `range`
/// (κ = 0: the plain suffixes, `range` ignored).
fn modified_suffixes(
    text: &[u8],
    alphabet: &[u8],
    kappa: usize,
    range: std::ops::Range<usize>,
    mu: usize,
) -> Vec<Frag> {
    let n = text.len();
    let mut out = Vec::new();
    if kappa == 0 {
        return (0..n).map(|s| Frag::suffix_of(s, n)).collect();
    }
    // Choose the rightmost offset in `range`, then κ−1 offsets below it.
    fn rec(
        text: &[u8],
        alphabet: &[u8],
        s: usize,
        remaining: usize,
        max_off: usize,
        frag: &Frag,
        out: &mut Vec<Frag>,
    ) {
        if remaining == 0 {
            out.push(frag.clone());
            return;
        }
        for off in 0..max_off {
            for &c in alphabet {
                let c = c as Sym;
                if c == text[s + off] as Sym {
                    continue;
                }
                rec(text, alphabet, s, remaining - 1, off, &frag.with_sub(off, c), out);
            }
        }
    }
    for s in 0..n {
        let limit = mu.min(n - s);
        for r in range.clone() {
            if r >= limit {
                break;
            }
            for &c in alphabet {
                let c = c as Sym;
                if c == text[s + r] as Sym {
                    continue;
                }
                let f = Frag::suffix_of(s, n).with_sub(r, c);
                rec(text, alphabet, s, kappa - 1, r, &f, &mut out);
            }
        }
    }
    out
}

impl ShortIndex {
    /// Predicted terminal count across all tries, used as a build guard.
    pub fn predicted_terms(n: usize, mu: usize, h: usize, sigma: usize) -> usize {
        let mut total = n;
        let mut per_level = n as u128;
        for _ in 1..=h {
            per_level = per_level
                .saturating_mul(mu as u128)
                .saturating_mul(sigma.saturating_sub(1) as u128);
            total = total.saturating_add(per_level.min(usize::MAX as u128) as usize);
        }
        total
    }

    pub fn build(
        text: &[u8],
        mu: usize,
        h: usize,
        k: usize,
        keep_basic: bool,
        oracle: &impl PlainLcp,
    ) -> Self {
        assert!(h < k, "the stored-substitution budget must be below k");
        assert!(mu <= text.len());
        let n = text.len();
        let mut alphabet: Vec<u8> = text.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        let budget = 100_000_000usize;
        assert!(
            Self::predicted_terms(n, mu, h, alphabet.len()) <= budget,
            "predicted terminal count exceeds the build budget"
        );

        let t00 = crate::trie::suffix_trie(text, oracle);

        // Shared retrieval list: all (≤ h−1)-modified suffixes.
        let mut list: Vec<Frag> = Vec::new();
        for kappa in 0..h {
            if kappa == 0 {
                list.extend(modified_suffixes(text, &alphabet, 0, 0..0, mu));
            } else {
                list.extend(modified_suffixes(text, &alphabet, kappa, 0..mu, mu));
            }
        }
        list.sort_by(|a, b| {
            frag_cmp(a, text, b, text, oracle)
                .1
                .then_with(|| a.start.cmp(&b.start))
                .then_with(|| a.subs.len().cmp(&b.subs.len()))
        });
        let index = list
            .iter()
            .enumerate()
            .map(|(i, f)| (RetrievalStore::key(f), i as u32))
            .collect();
        let store = RetrievalStore { list, index };

        let stride = (usize::BITS - 1 - n.leading_zeros().min(usize::BITS - 1)) as usize;
        let stride = stride.max(1);

        let mut grouped = HashMap::new();
        let mut basic = keep_basic.then(HashMap::new);
        if let Some(b) = &mut basic {
            for kappa in 1..=h {
                for j in kappa.saturating_sub(1)..mu {
                    let mut terms = modified_suffixes(text, &alphabet, kappa, j..j + 1, mu);
                    if terms.is_empty() {
                        continue;
                    }
                    let labelled: Vec<(Frag, u32)> =
                        terms.drain(..).map(|f| { let s = f.start; (f, s) }).collect();
                    b.insert((kappa, j), CompactTrie::build(text, labelled, oracle));
                }
            }
        }
        for kappa in 1..=h {
            for j in 1..=mu {
                let lo = j - f_pow2(j);
                let mut terms = modified_suffixes(text, &alphabet, kappa, lo..j, mu);
                if terms.is_empty() {
                    continue;
                }
                terms.sort_by(|a, b| {
                    frag_cmp(a, text, b, text, oracle)
                        .1
                        .then_with(|| a.start.cmp(&b.start))
                        .then_with(|| {
                            a.subs
                                .iter()
                                .map(|s| (s.off, s.ch))
                                .collect::<Vec<_>>()
                                .cmp(&b.subs.iter().map(|s| (s.off, s.ch)).collect())
                        })
                });
                let num_terms = terms.len();

                // Triads and the stripped-version directories.
                let mut triads = Vec::with_capacity(num_terms);
                let mut members: HashMap<Triad, Vec<(u64, u64)>> = HashMap::new();
                for (i, f) in terms.iter().enumerate() {
                    let last = f.subs.last().expect("κ ≥ 1 terminals carry a substitution");
                    let p = last.off as usize;
                    let c_old = text[f.start as usize + p] as Sym;
                    let triad: Triad = (p as i32, c_old, last.ch);
                    let mut stripped = f.clone();
                    stripped.subs.pop();
                    let li = store.locate(&stripped);
                    triads.push(triad);
                    members
                        .entry(triad)
                        .or_default()
                        .push((i as u64 + 1, li as u64 + 1));
                }
                let mut my_triad = HashMap::new();
                let mut cut = HashMap::new();
                for (triad, pairs) in members {
                    let idxs: Vec<u64> = pairs.iter().map(|&(i, _)| i).collect();
                    let cuts: Vec<u64> = pairs.iter().map(|&(_, l)| l).collect();
                    assert!(
                        cuts.windows(2).all(|w| w[0] < w[1]),
                        "stripping a shared substitution preserves order"
                    );
                    my_triad.insert(triad, IncreasingSeq::new(idxs, num_terms as u64));
                    cut.insert(triad, IncreasingSeq::new(cuts, store.list.len() as u64));
                }

                // Sampled trie: every stride-th terminal plus first and last.
                let mut sampled_idx: Vec<usize> = (0..num_terms).step_by(stride).collect();
                if *sampled_idx.last().unwrap() != num_terms - 1 {
                    sampled_idx.push(num_terms - 1);
                }
                let sampled_terms: Vec<(Frag, u32)> = sampled_idx
                    .iter()
                    .map(|&i| (terms[i].clone(), i as u32))
                    .collect();
                let sampled = CompactTrie::from_sorted(text, sampled_terms, oracle);

                grouped.insert(
                    (kappa, j),
                    GroupedTrie {
                        num_terms,
                        sampled_idx,
                        sampled,
                        triads,
                        my_triad,
                        cut,
                    },
                );
            }
        }

        ShortIndex {
            mu,
            h,
            k,
            n,
            alphabet,
            t00,
            grouped,
            store,
            basic,
        }
    }

    /// Reconstructs the `i`-th lexicographic terminal of 𝒯′_{κ,j}.
    pub fn retrieve(&self, kappa: usize, j: usize, i: usize) -> Frag {
        let g = &self.grouped[&(kappa, j)];
        let triad = g.triads[i];
        let r = g.my_triad[&triad]
            .rank(i as u64 + 1)
            .expect("every terminal index belongs to its triad sequence");
        let li = g.cut[&triad].select(r) - 1;
        let mut f = self.store.list[li as usize].clone();
        if triad.0 >= 0 {
            f.substitute(triad.0 as usize, triad.2);
        }
        f
    }

    /// Maximal interval of 𝒯′_{κ,j} terminals with `q` as a prefix: the
    /// sampled trie narrows the search to a gap between samples, and binary
    /// search over retrieved terminals finishes inside it.
    pub fn terminal_range(
        &self,
        text: &[u8],
        kappa: usize,
        j: usize,
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> std::ops::Range<usize> {
        let Some(g) = self.grouped.get(&(kappa, j)) else {
            return 0..0;
        };
        let n_samp = g.sampled_idx.len();
        let cmp_at = |i: usize| -> (usize, Ordering) {
            let t = self.retrieve(kappa, j, i);
            frag_cmp(&t, text, q, qhost, oracle)
        };
        let below = |i: usize| -> bool {
            let (l, ord) = cmp_at(i);
            ord == Ordering::Less && l < q.len()
        };
        let within = |i: usize| -> bool {
            let (l, ord) = cmp_at(i);
            l == q.len() || ord == Ordering::Less
        };
        // Narrow [lo..hi) bounds to sample gaps, then search exactly.
        let search = |pred: &dyn Fn(usize) -> bool| -> usize {
            let s = (0..n_samp).collect::<Vec<_>>();
            let si = s.partition_point(|&x| pred(g.sampled_idx[x]));
            let lo = if si == 0 { 0 } else { g.sampled_idx[si - 1] };
            let hi = if si == n_samp { g.num_terms } else { g.sampled_idx[si] + 1 };
            lo + (lo..hi).collect::<Vec<_>>().partition_point(|&x| pred(x))
        };
        let lo = search(&below);
        let hi = search(&within);
        lo..hi
    }

    /// Occurrence starts of the terminals in `range` of 𝒯′_{κ,j}.
    fn report_range(&self, kappa: usize, j: usize, range: std::ops::Range<usize>, out: &mut Vec<u32>) {
        for i in range {
            out.push(self.retrieve(kappa, j, i).start);
        }
    }

    /// All k-mismatch occurrences of the plain pattern `q` (a fragment of
    /// `qhost`, |q| ≤ μ), via the grouped tries.
    pub fn query(
        &self,
        text: &[u8],
        q: &Frag,
        qhost: &[u8],
        k: usize,
        oracle: &impl PlainLcp,
    ) -> Vec<u32> {
        assert!(q.len() <= self.mu, "short index serves only patterns within μ");
        assert!(q.subs.is_empty(), "query patterns are plain");
        let m = q.len();
        let mut out = Vec::new();
        if m == 0 {
            return out;
        }

        // Phase 1: occurrences with at most h mismatches. Exact pattern in
        // the suffix tree, and in the grouped tries tiling offsets [0..m).
        let (pos, l) = self.t00.walk(text, q, qhost, oracle);
        if l == m {
            for t in self.t00.term_range(pos) {
                out.push(self.t00.terms[t].label);
            }
        }
        for kappa in 1..=self.h.min(k) {
            for t in f_sequence(m) {
                let r = self.terminal_range(text, kappa, t, q, qhost, oracle);
                self.report_range(kappa, t, r, &mut out);
            }
        }

        // Phase 2: d = h + e mismatches, e ≥ 1: substitute the pattern's e
        // rightmost mismatch positions (first at offset j) and probe tries
        // whose stored substitutions all sit below j.
        if k > self.h {
            self.phase2(text, q, qhost, k - self.h, 0, m, oracle, &mut out);
        }
        out
    }

    /// Enumerates pattern substitutions: `left` of them remain, offsets in
    /// `[from..m)`; on the first substitution (at offset j) the grouped
    /// tries over [0..j) are probed with the fully substituted pattern.
    #[allow(clippy::too_many_arguments)]
    fn phase2(
        &self,
        text: &[u8],
        q: &Frag,
        qhost: &[u8],
        budget: usize,
        from: usize,
        m: usize,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        for j in from..m {
            let orig = q.char_at(qhost, j);
            for &c in &self.alphabet {
                let c = c as Sym;
                if c == orig {
                    continue;
                }
                let q2 = q.with_sub(j, c);
                let first = q2.subs.first().unwrap().off as usize;
                for t in f_sequence(first) {
                    let r = self.terminal_range(text, self.h, t, &q2, qhost, oracle);
                    self.report_range(self.h, t, r, out);
                }
                if budget > 1 {
                    self.phase2(text, &q2, qhost, budget - 1, j + 1, m, oracle, out);
                }
            }
        }
    }
}

/// Reference implementation over the materialized basic tries; used to
/// cross-validate the grouped machinery.
pub fn query_short_basic(
    idx: &ShortIndex,
    text: &[u8],
    q: &Frag,
    qhost: &[u8],
    k: usize,
    oracle: &impl PlainLcp,
) -> Vec<u32> {
    assert!(q.len() <= idx.mu);
    let basic = idx.basic.as_ref().expect("basic tries were not retained");
    let m = q.len();
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let probe = |frag: &Frag, kappa: usize, j_limit: usize, out: &mut Vec<u32>| {
        if kappa == 0 {
            let (pos, l) = idx.t00.walk(text, frag, qhost, oracle);
            if l == m {
                for t in idx.t00.term_range(pos) {
                    out.push(idx.t00.terms[t].label);
                }
            }
            return;
        }
        for j in 0..j_limit {
            if let Some(trie) = basic.get(&(kappa, j)) {
                let (pos, l) = trie.walk(text, frag, qhost, oracle);
                if l == m {
                    for t in trie.term_range(pos) {
                        out.push(trie.terms[t].label);
                    }
                }
            }
        }
    };
    for kappa in 0..=idx.h.min(k) {
        probe(q, kappa, m, &mut out);
    }
    if k > idx.h {
        // Enumerate modified patterns, first substitution at offset j.
        fn rec(
            idx: &ShortIndex,
            text: &[u8],
            q: &Frag,
            qhost: &[u8],
            budget: usize,
            from: usize,
            m: usize,
            oracle: &impl PlainLcp,
            probe: &mut dyn FnMut(&Frag, usize, usize, &mut Vec<u32>),
            out: &mut Vec<u32>,
        ) {
            for j in from..m {
                let orig = q.char_at(qhost, j);
                for &c in &idx.alphabet {
                    let c = c as Sym;
                    if c == orig {
                        continue;
                    }
                    let q2 = q.with_sub(j, c);
                    let first = q2.subs.first().unwrap().off as usize;
                    probe(&q2, idx.h, first, out);
                    if budget > 1 {
                        rec(idx, text, &q2, qhost, budget - 1, j + 1, m, oracle, probe, out);
                    }
                }
            }
        }
        let mut probe_ref =
            |f: &Frag, kappa: usize, jl: usize, out: &mut Vec<u32>| probe(f, kappa, jl, out);
        rec(
            idx, text, q, qhost, k - idx.h, 0, m, oracle, &mut probe_ref, &mut out,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kangaroo::SelfLcp;
    use crate::lce::LceIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(text: &[u8], q: &[u8], k: usize) -> Vec<u32> {
        (0..text.len().saturating_sub(q.len() - 1))
            .filter(|&p| {
                text[p..p + q.len()]
                    .iter()
                    .zip(q)
                    .filter(|(a, b)| a != b)
                    .count()
                    <= k
            })
            .map(|p| p as u32)
            .collect()
    }

    fn sorted_unique(mut v: Vec<u32>) -> Vec<u32> {
        let before = v.len();
        v.sort_unstable();
        v.dedup();
        assert_eq!(v.len(), before, "exactly-once reporting");
        v
    }

    #[test]
    fn f_values_and_sequences() {
        assert_eq!(f_pow2(12), 4);
        assert_eq!(f_pow2(8), 8);
        assert_eq!(f_pow2(13), 1);
        assert_eq!(f_sequence(13), vec![13, 12, 8]);
        assert_eq!(f_sequence(6), vec![6, 4]);
    }

    #[test]
    #[should_panic(expected = "f is defined for positive integers")]
    fn f_of_zero_panics() {
        f_pow2(0);
    }

    #[test]
    fn f_sequence_tiles_prefix_intervals() {
        for j in 1..=256usize {
            let seq = f_sequence(j);
            assert!(seq.len() <= j.ilog2() as usize + 1);
            let mut intervals: Vec<(usize, usize)> =
                seq.iter().map(|&t| (t - f_pow2(t), t)).collect();
            intervals.sort_unstable();
            // Disjoint and tiling [0..j).
            let mut cursor = 0;
            for (a, b) in intervals {
                assert_eq!(a, cursor);
                cursor = b;
            }
            assert_eq!(cursor, j);
        }
    }

    #[test]
    fn every_modified_suffix_lands_in_one_basic_trie() {
        let text = b"abababababababab";
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let idx = ShortIndex::build(text, 4, 1, 2, true, &oracle);
        let basic = idx.basic.as_ref().unwrap();
        // Direct enumeration: n plain + clipped 1-modified suffixes.
        let n = text.len();
        let mut expect = 0usize;
        for s in 0..n {
            expect += 4.min(n - s) * (idx.alphabet.len() - 1);
        }
        let total: usize = basic.values().map(|t| t.num_terms()).sum();
        assert_eq!(total, expect);
        assert_eq!(idx.t00.num_terms(), n);
    }

    #[test]
    fn retrieval_matches_materialized_grouped_tries() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 256;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..3u8)).collect();
        let lce = LceIndex::new(&text);
        let oracle = SelfLcp::new(&lce);
        let mu = 16;
        let idx = ShortIndex::build(&text, mu, 1, 2, false, &oracle);
        for (&(kappa, j), g) in &idx.grouped {
            // Re-materialize the grouped terminals directly.
            let lo = j - f_pow2(j);
            let mut terms = modified_suffixes(&text, &idx.alphabet, kappa, lo..j, mu);
            terms.sort_by(|a, b| {
                frag_cmp(a, &text, b, &text, &oracle)
                    .1
                    .then_with(|| a.start.cmp(&b.start))
                    .then_with(|| {
                        a.subs
                            .iter()
                            .map(|s| (s.off, s.ch))
                            .collect::<Vec<_>>()
                            .cmp(&b.subs.iter().map(|s| (s.off, s.ch)).collect())
                    })
            });
            assert_eq!(terms.len(), g.num_terms);
            for (i, want) in terms.iter().enumerate() {
                let got = idx.retrieve(kappa, j, i);
                assert_eq!(got.start, want.start);
                assert_eq!(got.syms(&text), want.syms(&text));
            }
        }
    }

    #[test]
    fn terminal_range_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 120;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
        let lce = LceIndex::new(&text);
        let oracle = SelfLcp::new(&lce);
        let idx = ShortIndex::build(&text, 8, 1, 2, false, &oracle);
        for (&(kappa, j), g) in &idx.grouped {
            for _ in 0..20 {
                let qs = rng.gen_range(0..n);
                let ql = rng.gen_range(0..=(n - qs).min(6));
                let mut q = Frag::plain(qs, ql);
                if ql > 0 && rng.gen_bool(0.5) {
                    q.substitute(rng.gen_range(0..ql), b'a' as Sym + rng.gen_range(0..2));
                }
                let got = idx.terminal_range(&text, kappa, j, &q, &text, &oracle);
                let mut lo = g.num_terms;
                let mut hi = 0;
                for i in 0..g.num_terms {
                    let t = idx.retrieve(kappa, j, i);
                    let (l, _) = frag_cmp(&t, &text, &q, &text, &oracle);
                    if l == q.len() {
                        lo = lo.min(i);
                        hi = hi.max(i + 1);
                    }
                }
                if lo >= hi {
                    assert!(got.is_empty(), "empty range expected, got {got:?}");
                } else {
                    assert_eq!(got, lo..hi);
                }
            }
        }
        // Empty pattern covers everything.
        for (&(kappa, j), g) in &idx.grouped {
            let q = Frag::plain(0, 0);
            assert_eq!(
                idx.terminal_range(&text, kappa, j, &q, &text, &oracle),
                0..g.num_terms
            );
        }
    }

    #[test]
    fn grouped_equals_basic_equals_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for round in 0..6 {
            let n = rng.gen_range(40..200);
            let sigma: u8 = if round % 2 == 0 { 2 } else { 4 };
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let mu = 8.min(n);
            let (h, k) = (1usize, 2usize);
            // Patterns become fragments of an extended host.
            let mut host = text.clone();
            let mut patterns = Vec::new();
            for _ in 0..40 {
                let m = rng.gen_range(1..=mu);
                let p: Vec<u8> = if rng.gen_bool(0.5) {
                    let s = rng.gen_range(0..n - m + 1);
                    text[s..s + m].to_vec()
                } else {
                    (0..m).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
                };
                patterns.push((host.len(), m));
                host.extend_from_slice(&p);
            }
            let lce = LceIndex::new(&host);
            let oracle = SelfLcp::new(&lce);
            let idx = ShortIndex::build(&text, mu, h, k, true, &oracle);
            for &(qs, m) in &patterns {
                let q = Frag::plain(qs, m);
                let want = naive(&text, &host[qs..qs + m], k);
                let got = sorted_unique(idx.query(&text, &q, &host, k, &oracle));
                let via_basic =
                    sorted_unique(query_short_basic(&idx, &text, &q, &host, k, &oracle));
                assert_eq!(got, want, "grouped vs naive, round {round}");
                assert_eq!(via_basic, want, "basic vs naive, round {round}");
            }
        }
    }

    #[test]
    fn length_one_pattern_with_budget_matches_everywhere() {
        let text = b"abbabaab";
        let mut host = text.to_vec();
        host.push(b'a');
        let lce = LceIndex::new(&host);
        let oracle = SelfLcp::new(&lce);
        let idx = ShortIndex::build(text, 4, 1, 2, false, &oracle);
        let q = Frag::plain(8, 1);
        let got = sorted_unique(idx.query(text, &q, &host, 2, &oracle));
        assert_eq!(got, (0..text.len() as u32).collect::<Vec<_>>());
    }

    #[test]
    #[should_panic(expected = "within μ")]
    fn overlong_pattern_is_rejected() {
        let text = b"abcabcabc";
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let idx = ShortIndex::build(text, 4, 1, 2, false, &oracle);
        let q = Frag::plain(0, 6);
        idx.query(text, &q, text, 2, &oracle);
    }
}
