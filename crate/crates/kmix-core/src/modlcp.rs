//! Longest-prefix queries on tries of modified suffixes.
//!
//! A trie of (≤k)-modified suffixes is edge-decomposed into alternating
//! phases: an *odd* phase selects, for every string still present, its longest
//! prefix up to the next modification, and stores the compact trie of those
//! plain pieces in canonical form; whatever part of the trie those pieces do
//! not cover hangs below, and an *even* phase peels a single character off
//! each uncovered branch (the modification characters). Strings with k″
//! modifications are spread over at most 2k″+1 trees, so a query visits O(k)
//! of them.
//!
//! A query walks its fragment through the current odd tree with a canonical
//! longest-prefix query; when the match stops, the uncovered continuation —
//! if the trie has one — is by construction an even entry anchored at exactly
//! the stopping position, so a hash lookup keyed by the host position decides
//! whether the walk crosses into the next phase.

use crate::canonical::CanonicalFragTrie;
use crate::kangaroo::PlainLcp;
use crate::lce::LceIndex;
use crate::text::{Frag, Sym};
use crate::trie::{CompactTrie, NodeRef};
use smallvec::SmallVec;
use std::collections::HashMap;

struct OddTree {
    cft: CanonicalFragTrie,
    /// String depth in the host trie where this tree's pieces begin.
    depth: usize,
    /// Per trie node: a terminal below it whose *original* piece (before
    /// canonical extension) is longest. Canonicalization can only extend a
    /// terminal along existing content, so a matched position is always
    /// covered by some original piece — and only those terminals belong to
    /// host strings that actually run through the matched content, which
    /// makes them safe witnesses for host-position lookups.
    deep_wit: Vec<u32>,
}

impl OddTree {
    fn new(cft: CanonicalFragTrie, depth: usize, piece_len_of_label: &HashMap<u32, usize>) -> Self {
        let trie = &cft.trie;
        let mut deep_wit = vec![0u32; trie.num_nodes()];
        let mut deep_len = vec![0usize; trie.num_nodes()];
        let mut seen = vec![false; trie.num_nodes()];
        for (i, term) in trie.terms.iter().enumerate() {
            let len = piece_len_of_label[&term.label];
            let mut node = term.node;
            loop {
                let idx = node as usize;
                if seen[idx] && deep_len[idx] >= len {
                    break;
                }
                seen[idx] = true;
                deep_len[idx] = len;
                deep_wit[idx] = i as u32;
                if node == 0 {
                    break;
                }
                node = trie.node(node).parent;
            }
        }
        OddTree {
            cft,
            depth,
            deep_wit,
        }
    }

    /// Host terminal label of a piece-covered witness at trie node `node`.
    fn host_wit(&self, node: u32) -> u32 {
        self.cft.trie.terms[self.deep_wit[node as usize] as usize].label
    }
}

#[derive(Clone, Copy)]
struct EvenEntry {
    ch: Sym,
    next_odd: u32,
}

pub struct ModTrieLcp {
    /// The trie of modified suffixes being queried.
    pub host: CompactTrie,
    odds: Vec<OddTree>,
    /// Even-phase entries, anchored at the host position where odd-phase
    /// coverage of the branch ends.
    evens: HashMap<NodeRef, SmallVec<[EvenEntry; 2]>>,
}

/// Walk state: a position inside one odd tree plus enough context to map it
/// back to the host trie.
#[derive(Clone, Copy)]
struct Cursor {
    odd: u32,
    pos: NodeRef,
    /// String depth in the host trie.
    depth: usize,
    /// A host terminal whose path runs through the current position.
    wit: u32,
}

impl ModTrieLcp {
    pub fn build(
        text: &[u8],
        lce: &LceIndex,
        terms: Vec<(Frag, u32)>,
        oracle: &impl PlainLcp,
    ) -> Self {
        let host = CompactTrie::build(text, terms, oracle);
        let mut me = ModTrieLcp {
            host,
            odds: Vec::new(),
            evens: HashMap::new(),
        };
        let all: Vec<u32> = (0..me.host.num_terms() as u32).collect();
        let mut queue: std::collections::VecDeque<(usize, Vec<u32>)> =
            std::collections::VecDeque::from([(0, all)]);
        while let Some((depth, strings)) = queue.pop_front() {
            // Pieces: the plain stretch of every string from `depth` to its
            // next modification (possibly empty when a modification sits at
            // `depth` itself).
            let pieces: Vec<Frag> = strings
                .iter()
                .map(|&t| {
                    let f = &me.host.terms[t as usize].frag;
                    let nm = f.next_sub(depth).unwrap_or(f.len());
                    Frag::plain(f.start as usize + depth, nm - depth)
                })
                .collect();
            let labelled: Vec<(Frag, u32)> = pieces
                .iter()
                .cloned()
                .zip(strings.iter().copied())
                .collect();
            let piece_len_of_label: HashMap<u32, usize> = labelled
                .iter()
                .map(|(p, label)| (*label, p.len()))
                .collect();
            let cft = CanonicalFragTrie::canonicalize(text, lce, labelled, oracle);
            me.odds.push(OddTree::new(cft, depth, &piece_len_of_label));

            // Coverage: how far each string's remaining content agrees with
            // the union of the pieces. Where coverage ends and the string
            // still has content, that continuation character forms an even
            // entry at the branch point.
            let mut groups: HashMap<(NodeRef, Sym), Vec<u32>> = HashMap::new();
            for &t in &strings {
                let f = &me.host.terms[t as usize].frag;
                let tail = f.tail(depth);
                let cov = pieces
                    .iter()
                    .map(|p| crate::kangaroo::frag_lcp(p, text, &tail, text, oracle))
                    .max()
                    .unwrap_or(0);
                if cov < tail.len() {
                    let ch = f.char_at(text, depth + cov);
                    let pos = me
                        .host
                        .weighted_ancestor(me.host.terms[t as usize].node, depth + cov);
                    groups.entry((pos, ch)).or_default().push(t);
                }
            }
            let mut grouped: Vec<((NodeRef, Sym), Vec<u32>)> = groups.into_iter().collect();
            grouped.sort_by_key(|&((pos, ch), _)| (pos.node, pos.above, ch));
            for ((pos, ch), members) in grouped {
                // FIFO processing makes tree ids predictable: the entry being
                // appended will be built after everything already queued.
                let next_odd = (me.odds.len() + queue.len()) as u32;
                let depth_next = me.host.ref_depth(pos) + 1;
                me.evens
                    .entry(pos)
                    .or_default()
                    .push(EvenEntry { ch, next_odd });
                queue.push_back((depth_next, members));
            }
        }
        me
    }

    /// Number of trees in the decomposition (odd-phase tries plus even-phase
    /// single-character entries).
    pub fn decomposition_stats(&self) -> (usize, usize) {
        (self.odds.len(), self.evens.values().map(|v| v.len()).sum())
    }

    #[cfg(test)]
    fn odd_term_counts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.odds.iter().map(|o| o.cft.trie.num_terms()).collect();
        v.sort_unstable();
        v
    }

    /// Longest prefix of `q` readable in the host trie below position `v`.
    /// Returns the host end position and the matched length.
    pub fn query(
        &self,
        text: &[u8],
        v: NodeRef,
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> (NodeRef, usize) {
        let mut cur = Cursor {
            odd: 0,
            pos: NodeRef::explicit(0),
            depth: 0,
            wit: self.host.term_range(NodeRef::explicit(0)).start as u32,
        };
        // Locate `v` in the decomposition by walking its own path label —
        // a fragment of the text side — through the trees.
        let d = self.host.ref_depth(v);
        if d > 0 {
            let path = self.host.terms[self.host.term_range(v).start]
                .frag
                .head(d);
            let walked = self.walk(text, &mut cur, &path, text, oracle);
            debug_assert_eq!(walked, d, "path label of a trie position always matches");
        }
        let l = self.walk(text, &mut cur, q, qhost, oracle);
        let end = self
            .host
            .weighted_ancestor(self.host.terms[cur.wit as usize].node, cur.depth);
        (end, l)
    }

    fn walk(
        &self,
        text: &[u8],
        cur: &mut Cursor,
        r: &Frag,
        rhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> usize {
        let mut total = 0usize;
        loop {
            if total == r.len() {
                return total;
            }
            let odd = &self.odds[cur.odd as usize];
            let rem = r.tail(total);
            let (pos, l, _wit) = odd.cft.query_from(text, cur.pos, &rem, rhost, oracle);
            if l > 0 {
                cur.pos = pos;
                cur.depth += l;
                debug_assert_eq!(cur.depth, odd.depth + odd.cft.trie.ref_depth(pos));
                // The longest-prefix witness itself may owe part of its match
                // to canonical extension, in which case its host string does
                // not run through the matched branch; a piece-covered witness
                // at the reached node always does.
                cur.wit = odd.host_wit(pos.node);
                total += l;
                if total == r.len() {
                    return total;
                }
            }
            // The odd tree is exhausted; the only way forward is an even
            // entry (a modification character) anchored at this host
            // position.
            let host_pos = self
                .host
                .weighted_ancestor(self.host.terms[cur.wit as usize].node, cur.depth);
            let ch = r.char_at(rhost, total);
            let Some(entry) = self
                .evens
                .get(&host_pos)
                .and_then(|v| v.iter().find(|e| e.ch == ch))
            else {
                return total;
            };
            let next = &self.odds[entry.next_odd as usize];
            cur.odd = entry.next_odd;
            cur.pos = NodeRef::explicit(0);
            cur.depth += 1;
            cur.wit = next.cft.trie.terms[0].label;
            total += 1;
        }
    }
}
