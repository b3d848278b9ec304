//! Kangaroo jumps: LCP computation between modified fragments.
//!
//! Comparing two fragments with at most `k` and `k'` substitutions costs
//! O(k + k') probes: the comparison hops between substitution offsets, and
//! each plain stretch in between is resolved by a single longest-common-
//! extension query. Two oracles provide the plain-stretch answers:
//!
//! * [`SelfLcp`] — both fragments live over the same host text (index
//!   construction, text-vs-text comparisons);
//! * [`PatternContext`] — one fragment lives over the indexed text, the other
//!   over a query pattern. Matching statistics of the pattern against the
//!   text reduce cross-host extensions to a single text-vs-text extension.

use std::cell::Cell;
use std::cmp::Ordering;

use crate::lce::{matching_statistics, LceIndex, SuffixAutomaton};
use crate::text::Frag;

/// Oracle for the longest common prefix of a plain (substitution-free)
/// stretch of the indexed text and a plain stretch of the query host.
pub trait PlainLcp {
    /// LCP of `text[text_pos..]` and `query_host[query_pos..]`.
    fn plain_lcp(&self, text_pos: usize, query_pos: usize) -> usize;
    /// Number of oracle probes made so far (observability hook).
    fn probes(&self) -> u64;
}

/// Both sides are fragments of the same host text.
pub struct SelfLcp<'a> {
    pub lce: &'a LceIndex,
    probes: Cell<u64>,
}

impl<'a> SelfLcp<'a> {
    pub fn new(lce: &'a LceIndex) -> Self {
        SelfLcp { lce, probes: Cell::new(0) }
    }
}

impl PlainLcp for SelfLcp<'_> {
    fn plain_lcp(&self, text_pos: usize, query_pos: usize) -> usize {
        self.probes.set(self.probes.get() + 1);
        self.lce.lce(text_pos, query_pos)
    }

    fn probes(&self) -> u64 {
        self.probes.get()
    }
}

/// Preprocessed query pattern: matching statistics against the indexed text
/// plus the text's LCE index reduce every text-vs-pattern extension to O(1).
pub struct PatternContext<'a> {
    pub text: &'a [u8],
    pub lce: &'a LceIndex,
    pub pattern: Vec<u8>,
    /// For each pattern start `i`: length of the longest prefix of
    /// `pattern[i..]` occurring in the text, and a witness occurrence start.
    ms: Vec<(usize, usize)>,
    probes: Cell<u64>,
}

impl<'a> PatternContext<'a> {
    /// `rev_sam` must be the suffix automaton of the reversed text.
    pub fn new(
        text: &'a [u8],
        lce: &'a LceIndex,
        rev_sam: &SuffixAutomaton,
        pattern: &[u8],
    ) -> Self {
        let ms = matching_statistics(rev_sam, text.len(), pattern);
        PatternContext {
            text,
            lce,
            pattern: pattern.to_vec(),
            ms,
            probes: Cell::new(0),
        }
    }

    /// Matching statistic for pattern start `i`: `(length, witness)`.
    pub fn stat(&self, i: usize) -> (usize, usize) {
        self.ms[i]
    }
}

impl PlainLcp for PatternContext<'_> {
    fn plain_lcp(&self, text_pos: usize, query_pos: usize) -> usize {
        self.probes.set(self.probes.get() + 1);
        if query_pos >= self.pattern.len() || text_pos >= self.text.len() {
            return 0;
        }
        let (len, wit) = self.ms[query_pos];
        if len == 0 {
            return 0;
        }
        // The pattern suffix agrees with text[wit..] for exactly `len`
        // characters, and with no text suffix for longer. Hence the LCP with
        // text[text_pos..] is the text-vs-text extension, capped at `len`:
        // beyond `len` the pattern would match a longer text substring.
        let l = self.lce.lce(wit, text_pos);
        l.min(len)
    }

    fn probes(&self) -> u64 {
        self.probes.get()
    }
}

/// LCP of `a` (fragment of the indexed text, host `ah`) and `b` (fragment of
/// the query host `bh`), hopping over the substitutions of both sides.
pub fn frag_lcp(a: &Frag, ah: &[u8], b: &Frag, bh: &[u8], oracle: &impl PlainLcp) -> usize {
    let max = a.len().min(b.len());
    let mut cur = 0usize;
    while cur < max {
        let ea = a.next_sub(cur).unwrap_or(max).min(max);
        let eb = b.next_sub(cur).unwrap_or(max).min(max);
        let stop = ea.min(eb);
        if stop > cur {
            // Plain stretch on both sides.
            let l = oracle
                .plain_lcp(a.start as usize + cur, b.start as usize + cur)
                .min(stop - cur);
            cur += l;
            if cur < stop {
                return cur;
            }
        } else {
            // A substitution sits at `cur` on at least one side.
            if a.char_at(ah, cur) != b.char_at(bh, cur) {
                return cur;
            }
            cur += 1;
        }
    }
    max
}

/// Lexicographic comparison of `a` against `b` (same host conventions as
/// [`frag_lcp`]), returning the LCP alongside the ordering.
pub fn frag_cmp(
    a: &Frag,
    ah: &[u8],
    b: &Frag,
    bh: &[u8],
    oracle: &impl PlainLcp,
) -> (usize, Ordering) {
    let l = frag_lcp(a, ah, b, bh, oracle);
    let ord = if l == a.len() && l == b.len() {
        Ordering::Equal
    } else if l == a.len() {
        Ordering::Less
    } else if l == b.len() {
        Ordering::Greater
    } else {
        a.char_at(ah, l).cmp(&b.char_at(bh, l))
    };
    (l, ord)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Sym;

    fn naive_lcp(a: &[Sym], b: &[Sym]) -> usize {
        a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
    }

    #[test]
    fn frag_lcp_same_host_with_subs() {
        let t = b"abcabcabcabc";
        let lce = LceIndex::new(t);
        let oracle = SelfLcp::new(&lce);
        let mut a = Frag::plain(0, 12);
        a.substitute(5, b'z' as Sym);
        let mut b = Frag::plain(3, 9);
        b.substitute(2, b'z' as Sym);
        // a = abcabzabcabc ; b = abzabcabc
        let av = a.syms(t);
        let bv = b.syms(t);
        for i in 0..av.len() {
            for j in 0..bv.len() {
                let (x, y) = (a.tail(i), b.tail(j));
                assert_eq!(
                    frag_lcp(&x, t, &y, t, &oracle),
                    naive_lcp(&av[i..], &bv[j..]),
                    "i={i} j={j}"
                );
            }
        }
    }

    #[test]
    fn frag_lcp_pattern_host() {
        let t = b"abracadabra";
        let lce = LceIndex::new(t);
        let rev: Vec<u8> = t.iter().rev().copied().collect();
        let sam = SuffixAutomaton::new(&rev);
        let p = b"cadxbra";
        let cx = PatternContext::new(t, &lce, &sam, p);
        let pv: Vec<Sym> = p.iter().map(|&c| c as Sym).collect();
        for i in 0..t.len() {
            for j in 0..p.len() {
                let a = Frag::suffix_of(i, t.len());
                let b = Frag::suffix_of(j, p.len());
                let tv: Vec<Sym> = t[i..].iter().map(|&c| c as Sym).collect();
                assert_eq!(
                    frag_lcp(&a, t, &b, p, &cx),
                    naive_lcp(&tv, &pv[j..]),
                    "i={i} j={j}"
                );
            }
        }
    }

    #[test]
    fn comparison_stays_within_fragment_budget() {
        // A comparison of fragments with x and y substitutions partitions the
        // query side into at most y + 2x + 1 plain pieces; anything past that
        // budget is never needed. Each oracle probe resolves one piece, so
        // the probe count per comparison must stay within the budget (the
        // hop loop actually needs only x + y + 1 probes).
        use crate::text::Frag;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..2000 {
            let n = rng.gen_range(6..80);
            let t: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
            let lce = LceIndex::new(&t);
            let oracle = SelfLcp::new(&lce);
            let mk = |rng: &mut ChaCha8Rng| {
                let s = rng.gen_range(0..n);
                let len = rng.gen_range(0..=(n - s));
                let mut f = Frag::plain(s, len);
                for _ in 0..rng.gen_range(0..=3usize) {
                    if len > 0 {
                        f.substitute(rng.gen_range(0..len), b'a' as Sym + rng.gen_range(0..2));
                    }
                }
                f
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let before = oracle.probes();
            let got = frag_lcp(&a, &t, &b, &t, &oracle);
            let probes = oracle.probes() - before;
            let (x, y) = (a.subs.len() as u64, b.subs.len() as u64);
            assert!(probes <= x + y + 1, "{probes} probes for x={x} y={y}");
            assert!(probes <= y + 2 * x + 1);
            assert_eq!(got, naive_lcp(&a.syms(&t), &b.syms(&t)));
        }
    }

    #[test]
    fn frag_cmp_orders_prefixes() {
        let t = b"aabab";
        let lce = LceIndex::new(t);
        let oracle = SelfLcp::new(&lce);
        let a = Frag::plain(0, 2); // "aa"
        let b = Frag::plain(0, 4); // "aaba"
        assert_eq!(frag_cmp(&a, t, &b, t, &oracle).1, Ordering::Less);
        assert_eq!(frag_cmp(&b, t, &a, t, &oracle).1, Ordering::Greater);
        assert_eq!(frag_cmp(&a, t, &a, t, &oracle).1, Ordering::Equal);
    }
}
