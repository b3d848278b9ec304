//! Canonical-form tries of plain text fragments.
//!
//! A compact trie of fragments of the text is *canonical* when every terminal
//! fragment `T[a..b)` either reaches the end of the text or has no outgoing
//! edge labelled `T[b]` at its node. Any fragment trie can be brought into
//! canonical form by sliding each terminal down along existing edges; the tree
//! shape, the terminal count, and the set of root-to-node path labels are all
//! preserved — only the terminal marks move.
//!
//! The point of the exercise is [`CanonicalFragTrie::query_from`]: an unrooted
//! longest-prefix query on a fragment trie is reduced to the same query on a
//! companion trie of full suffix extensions `T[a..n)`, whose answer is then
//! trimmed back to the witness fragment with a weighted-ancestor step.
//! Canonical form is exactly the condition that makes the trimmed answer
//! correct: if the true answer went deeper than the trimmed one, the witness
//! terminal would have an outgoing edge along its continuation character.

use crate::kangaroo::PlainLcp;
use crate::lce::LceIndex;
use crate::text::Frag;
use crate::trie::{CompactTrie, NodeRef};
use std::collections::HashMap;

/// Extends each plain fragment `[a..b)` to the maximal `[a..b')` such that
/// `T[a..b')` is still a prefix of one of the input fragments. This is the
/// fixed point of the terminal-sliding process: a slide step is possible
/// exactly while the continuation character stays on an existing edge, i.e.
/// while the extended fragment is a prefix of some stored fragment.
pub fn canonical_extension(lce: &LceIndex, frags: &[Frag]) -> Vec<Frag> {
    for f in frags {
        assert!(f.subs.is_empty(), "canonical form is for plain fragments");
    }
    frags
        .iter()
        .map(|f| {
            let a = f.start as usize;
            let best = frags
                .iter()
                .map(|g| lce.lce(a, g.start as usize).min(g.len()))
                .max()
                .unwrap_or(0)
                .max(f.len());
            Frag::plain(a, best)
        })
        .collect()
}

/// A canonical fragment trie together with its companion suffix-extension
/// trie, supporting unrooted longest-prefix queries from arbitrary positions.
#[derive(Clone, Debug)]
pub struct CanonicalFragTrie {
    /// Trie of the canonical fragments; terminal labels are caller-chosen.
    pub trie: CompactTrie,
    /// Trie of the suffixes `T[a..n)`, one terminal per distinct start.
    companion: CompactTrie,
    /// Terminal index in `trie` → terminal index in `companion`.
    comp_of_term: Vec<u32>,
    /// Terminal index in `companion` → representative terminal in `trie`.
    term_of_comp: Vec<u32>,
}

impl CanonicalFragTrie {
    /// Canonicalizes `frags` (plain fragments of `text`) and builds the trie
    /// plus its companion.
    pub fn canonicalize(
        text: &[u8],
        lce: &LceIndex,
        frags: Vec<(Frag, u32)>,
        oracle: &impl PlainLcp,
    ) -> Self {
        let plain: Vec<Frag> = frags.iter().map(|(f, _)| f.clone()).collect();
        let canon = canonical_extension(lce, &plain);
        let terms: Vec<(Frag, u32)> = canon
            .into_iter()
            .zip(frags.into_iter().map(|(_, l)| l))
            .collect();
        Self::from_canonical(text, lce, terms, oracle)
            .expect("canonical_extension produces canonical fragments")
    }

    /// Builds from fragments already in canonical form. Returns an error
    /// message if some fragment is extendable (i.e. the set is not canonical).
    pub fn from_canonical(
        text: &[u8],
        lce: &LceIndex,
        terms: Vec<(Frag, u32)>,
        oracle: &impl PlainLcp,
    ) -> Result<Self, String> {
        let plain: Vec<Frag> = terms.iter().map(|(f, _)| f.clone()).collect();
        for (i, (got, f)) in canonical_extension(lce, &plain).iter().zip(&plain).enumerate() {
            if got.len() != f.len() {
                return Err(format!(
                    "fragment {} = [{}, {}) is not canonical: extends to length {}",
                    i,
                    f.start,
                    f.start as usize + f.len(),
                    got.len()
                ));
            }
        }

        let trie = CompactTrie::build(text, terms, oracle);
        // In a canonical trie two fragments with the same start coincide (a
        // longer one would run along the shorter one's continuation edge), so
        // starts identify companion terminals.
        let n = text.len();
        let mut starts: Vec<u32> = trie.terms.iter().map(|t| t.frag.start).collect();
        starts.sort_unstable();
        starts.dedup();
        let comp_terms: Vec<(Frag, u32)> = starts
            .iter()
            .map(|&a| (Frag::suffix_of(a as usize, n), a))
            .collect();
        let companion = CompactTrie::build(text, comp_terms, oracle);
        let by_start: HashMap<u32, u32> = companion
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.frag.start, i as u32))
            .collect();
        let comp_of_term: Vec<u32> = trie.terms.iter().map(|t| by_start[&t.frag.start]).collect();
        let mut term_of_comp = vec![u32::MAX; companion.num_terms()];
        for (i, &c) in comp_of_term.iter().enumerate() {
            if term_of_comp[c as usize] == u32::MAX {
                term_of_comp[c as usize] = i as u32;
            }
        }
        Ok(CanonicalFragTrie {
            trie,
            companion,
            comp_of_term,
            term_of_comp,
        })
    }

    /// Unrooted longest-prefix query: the longest prefix of `q` readable in
    /// the trie content below position `v`. Returns the end position in the
    /// fragment trie, the matched length, and a witness terminal index.
    ///
    /// The query runs on the companion trie from the corresponding position
    /// and the result is trimmed to the witness fragment's length: whenever
    /// the suffix extension matched further than the fragment, canonical form
    /// guarantees no stored path continues there either.
    pub fn query_from(
        &self,
        text: &[u8],
        v: NodeRef,
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> (NodeRef, usize, usize) {
        let d = self.trie.ref_depth(v);
        // Corresponding companion position: same path label, located through
        // any terminal below `v`.
        let rep = self.trie.term_range(v).start;
        let comp_node = self.companion.terms[self.comp_of_term[rep] as usize].node;
        let v_comp = self.companion.weighted_ancestor(comp_node, d);
        let (_, full, comp_wit) = self
            .companion
            .longest_prefix_from(text, v_comp, q, qhost, oracle);
        let wit = self.term_of_comp[comp_wit] as usize;
        let frag_len = self.trie.terms[wit].frag.len();
        debug_assert!(frag_len >= d, "canonical form keeps fragments at least as deep as v");
        let l = full.min(frag_len - d);
        let pos = self.trie.weighted_ancestor(self.trie.terms[wit].node, d + l);
        (pos, l, wit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kangaroo::SelfLcp;
    use crate::text::Sym;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Order-insensitive structural fingerprint of a subtree: terminal counts
    /// plus the multiset of child fingerprints.
    fn shape(t: &CompactTrie, node: u32) -> String {
        let n = t.node(node);
        let mut kids: Vec<String> = n.children.iter().map(|(_, c)| shape(t, c)).collect();
        kids.sort();
        format!("({}:{})", n.end_count, kids.join(","))
    }

    #[test]
    fn canonical_extension_of_figure_fragments() {
        // T = abaababaabaab; the eight fragments of the worked example.
        let text = b"abaababaabaab";
        let lce = LceIndex::new(text);
        let input = [
            (4usize, 5usize),
            (1, 4),
            (6, 12),
            (7, 9),
            (10, 13),
            (2, 7),
            (3, 6),
            (5, 9),
        ];
        let frags: Vec<Frag> = input.iter().map(|&(a, b)| Frag::plain(a, b - a)).collect();
        let canon = canonical_extension(&lce, &frags);
        let got: Vec<(usize, usize)> = canon
            .iter()
            .map(|f| (f.start as usize, f.start as usize + f.len()))
            .collect();
        // "b" -> "ba", "baa" -> "baaba", "aa" -> "aaba"; the rest are already
        // canonical.
        let want = vec![
            (4, 6),
            (1, 6),
            (6, 12),
            (7, 11),
            (10, 13),
            (2, 7),
            (3, 6),
            (5, 9),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn canonicalization_preserves_shape() {
        let text = b"abaababaabaab";
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let input = [(4, 5), (1, 4), (6, 12), (7, 9), (10, 13), (2, 7), (3, 6), (5, 9)];
        let frags: Vec<(Frag, u32)> = input
            .iter()
            .enumerate()
            .map(|(i, &(a, b)): (usize, &(usize, usize))| (Frag::plain(a, b - a), i as u32))
            .collect();
        let before = CompactTrie::build(text, frags.clone(), &oracle);
        let after = CanonicalFragTrie::canonicalize(text, &lce, frags, &oracle);
        assert_eq!(before.num_nodes(), after.trie.num_nodes());
        assert_eq!(before.num_terms(), after.trie.num_terms());
        assert_eq!(shape(&before, 0), shape(&after.trie, 0));
    }

    #[test]
    fn sparse_suffix_sets_are_already_canonical() {
        let text = b"mississippi";
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let n = text.len();
        let frags: Vec<(Frag, u32)> = [0usize, 3, 4, 7, 9]
            .iter()
            .map(|&a| (Frag::suffix_of(a, n), a as u32))
            .collect();
        let t = CanonicalFragTrie::from_canonical(text, &lce, frags, &oracle);
        assert!(t.is_ok());
    }

    #[test]
    fn non_canonical_input_is_rejected() {
        let text = b"abaababaabaab";
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let frags = vec![(Frag::plain(4, 1), 0), (Frag::plain(1, 3), 1), (Frag::plain(6, 6), 2)];
        let t = CanonicalFragTrie::from_canonical(text, &lce, frags, &oracle);
        assert!(t.is_err());
    }

    fn naive_content_lcp(terms: &[Vec<Sym>], below_label: &[Sym], q: &[Sym]) -> usize {
        // Longest prefix of q readable below the position labelled
        // `below_label` in the trie of `terms`.
        terms
            .iter()
            .filter(|s| s.starts_with(below_label))
            .map(|s| {
                s[below_label.len()..]
                    .iter()
                    .zip(q.iter())
                    .take_while(|(a, b)| a == b)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn query_from_matches_naive_and_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..40 {
            let n = rng.gen_range(8..60);
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2)).collect();
            let lce = LceIndex::new(&text);
            let oracle = SelfLcp::new(&lce);
            let count = rng.gen_range(1..15);
            let frags: Vec<(Frag, u32)> = (0..count)
                .map(|i| {
                    let a = rng.gen_range(0..n);
                    let l = rng.gen_range(1..=(n - a).min(8));
                    (Frag::plain(a, l), i as u32)
                })
                .collect();
            let t = CanonicalFragTrie::canonicalize(&text, &lce, frags, &oracle);
            let content: Vec<Vec<Sym>> =
                t.trie.terms.iter().map(|x| x.frag.syms(&text)).collect();
            for _ in 0..30 {
                // Random explicit or on-edge start position.
                let node = rng.gen_range(0..t.trie.num_nodes()) as u32;
                let above = if node == 0 {
                    0
                } else {
                    rng.gen_range(0..t.trie.node(node).edge.len()) as u32
                };
                let v = NodeRef { node, above };
                let d = t.trie.ref_depth(v);
                let vlabel = &t.trie.terms[t.trie.term_range(v).start].frag.syms(&text)[..d];
                let qs = rng.gen_range(0..n);
                let ql = rng.gen_range(0..=(n - qs).min(8));
                let mut q = Frag::plain(qs, ql);
                if ql > 0 && rng.gen_bool(0.3) {
                    q.substitute(rng.gen_range(0..ql), b'c' as Sym);
                }
                let qsyms = q.syms(&text);
                let want = naive_content_lcp(&content, vlabel, &qsyms);
                let (pos, got, _) = t.query_from(&text, v, &q, &text, &oracle);
                assert_eq!(got, want, "start {v:?} q {qsyms:?}");
                assert_eq!(t.trie.ref_depth(pos), d + got);
                // The direct unrooted query on the fragment trie must agree.
                let (_, direct, _) = t.trie.longest_prefix_from(&text, v, &q, &text, &oracle);
                assert_eq!(direct, want);
            }
        }
    }
}
