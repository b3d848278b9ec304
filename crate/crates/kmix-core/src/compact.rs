//! Space-reduced mismatch and wildcard indexes.
//!
//! Both indexes in this module stop the leveled substitution-tree hierarchy
//! one level early and replace the final level by succinct per-node and
//! per-path stores over the tries of the deepest built level:
//!
//! * [`NodeLabelStore`] — for every explicit node `v`, the terminals hanging
//!   off its non-heavy children, ordered by their *trimmed* content (the
//!   branch character removed). The order is not stored as a permutation but
//!   as the classic triple (subtree rank per position, rank → child pointer,
//!   per-child increasing position sequence); combined with the trie's
//!   terminal array this reconstructs every trimmed suffix in O(1).
//! * [`HeavyLabelStore`] — for every heavy path `C`, the terminals of the
//!   subtree of `C`'s head that diverge off the path, each *1-modified* by
//!   overwriting its divergence character with the heavy-path character, in
//!   lexicographic order of the modified strings. Same triple representation.
//! * [`DiffStore`] — per node, a rank/select bit vector marking where the
//!   sequence of removed branch characters changes, used to skip runs of
//!   entries whose branch character equals the pattern's (those are exact
//!   continuations, reported elsewhere).
//! * [`SampledTrimTries`] — compact tries over every ⌊log n⌋-th entry of the
//!   node and path lists (plus first and last), used to bracket the binary
//!   searches; path samples additionally carry a modified-trie LCP structure.
//!
//! The mismatch index answers k-mismatch queries from a (k−1)-level tree:
//! the walk of [`crate::errata::ErrataTree::query_overflow`] places the first
//! k−1 branching mismatches structurally and hands back the states where the
//! final one would need a missing substitution tree; those are resolved here
//! by binary searches over the stores. The wildcard index answers queries
//! with up to k wildcard positions from a tree of k−1 merged
//! wildcard-substitution levels, resolving the final wildcard branch the
//! same way.

use crate::errata::{ErrataTree, Overflow};
use crate::kangaroo::{frag_cmp, frag_lcp, PlainLcp, SelfLcp};
use crate::lce::LceIndex;
use crate::modlcp::ModTrieLcp;
use crate::succinct::{BitVecRS, IncreasingSeq};
use crate::text::{Frag, Sym, PSI};
use crate::trie::{CompactTrie, NodeId, NodeRef, NIL};
use std::cmp::Ordering;
use std::collections::HashMap;

/// Default wildcard byte in query patterns.
pub const WILDCARD: u8 = b'?';

/// First character of the edge into the heavy child of `v`; `None` at leaves.
fn heavy_char(trie: &CompactTrie, text: &[u8], v: NodeId) -> Option<Sym> {
    let h = trie.node(v).heavy;
    (h != NIL).then(|| trie.node(h).edge.char_at(text, 0))
}

/// Non-heavy children of `v`, in character order.
fn off_children(trie: &CompactTrie, v: NodeId) -> Vec<(Sym, NodeId)> {
    let node = trie.node(v);
    node.children
        .iter()
        .filter(|&(_, c)| c != node.heavy)
        .collect()
}

/// `⌈log2 r⌉` for `r >= 1`.
fn ceil_log2(r: u32) -> u32 {
    r.next_power_of_two().trailing_zeros()
}

/// Partition point of a monotone predicate over `[0..b)`, bracketed by the
/// sampled positions first so that only one inter-sample gap is searched
/// exactly.
fn partition_sampled(b: usize, samples: &[u32], pred: &dyn Fn(usize) -> bool) -> usize {
    let s = samples.partition_point(|&p| pred(p as usize));
    let mut lo = if s == 0 { 0 } else { samples[s - 1] as usize + 1 };
    let mut hi = if s == samples.len() { b } else { samples[s] as usize };
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Sampled positions of a list of length `b`: every `stride`-th plus the
/// last.
fn sample_positions(b: usize, stride: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0..b as u32).step_by(stride).collect();
    if b > 0 && *out.last().unwrap() != b as u32 - 1 {
        out.push(b as u32 - 1);
    }
    out
}

/// Change marks of a character sequence: bit `i` set iff `chars[i] !=
/// chars[i+1]`.
fn diff_bits(chars: &[Sym]) -> Vec<bool> {
    chars.windows(2).map(|w| w[0] != w[1]).collect()
}

/// Per-node store of trimmed off-path terminals (see module docs). `b_v = 0`
/// nodes store nothing.
#[derive(Default)]
pub struct NodeLabelStore {
    pub nodes: HashMap<NodeId, NodeEntries>,
}

pub struct NodeEntries {
    /// Subtree rank of each position of the trimmed-sorted list; the child
    /// with the most terminals has rank 1, ties going to the smaller first
    /// edge character.
    pub st_rank: Vec<u32>,
    /// Rank (1-based) → off-path child.
    pub tree_pointer: Vec<NodeId>,
    /// Rank (1-based) → increasing sequence of the positions (1-based) of
    /// that child's entries in the trimmed-sorted list.
    pub modified_rank: Vec<IncreasingSeq>,
}

impl NodeEntries {
    pub fn b(&self) -> usize {
        self.st_rank.len()
    }

    /// Terminal index (into `trie.terms`) of the `i`-th (0-based) entry of
    /// the trimmed-sorted list, via rank → child → restricted rank →
    /// terminal-array offset. Within one child the trimmed order equals the
    /// terminal order, because all its entries share the removed character.
    pub fn term_index(&self, trie: &CompactTrie, i: usize) -> usize {
        let r = self.st_rank[i] as usize;
        let u = self.tree_pointer[r - 1];
        let j = self.modified_rank[r - 1]
            .rank(i as u64 + 1)
            .expect("every position belongs to its child's sequence");
        trie.node(u).term_lo as usize + j as usize - 1
    }
}

impl NodeLabelStore {
    /// `n − 1 − |S′|` for the `i`-th trimmed entry at `v`, where `|S′|` is
    /// the trimmed length (terminal length minus the depth of `v` minus the
    /// removed character).
    pub fn label_prime(&self, trie: &CompactTrie, n: usize, v: NodeId, i: usize) -> i64 {
        let e = &self.nodes[&v];
        let t = e.term_index(trie, i);
        let trimmed = trie.terms[t].frag.len() - trie.node(v).depth as usize - 1;
        n as i64 - 1 - trimmed as i64
    }
}

/// Per-heavy-path store of 1-modified diverging terminals, keyed by path
/// head (see module docs).
#[derive(Default)]
pub struct HeavyLabelStore {
    pub paths: HashMap<NodeId, PathEntries>,
}

pub struct PathEntries {
    /// Hanging-subtree rank per position of the modified-sorted list;
    /// heaviest subtree = rank 1, ties by (shallower node, smaller edge
    /// character).
    pub st_rank: Vec<u32>,
    /// Rank (1-based) → (path node the terminal diverges at, off-path child
    /// it hangs off).
    pub tree_pointer: Vec<(NodeId, NodeId)>,
    /// Rank (1-based) → increasing positions (1-based) of that hanging
    /// subtree's entries in the modified-sorted list.
    pub modified_rank: Vec<IncreasingSeq>,
}

impl PathEntries {
    pub fn b(&self) -> usize {
        self.st_rank.len()
    }

    /// `(terminal index, divergence node)` of the `i`-th entry of the
    /// modified-sorted list. Within one hanging subtree the modified order
    /// equals the terminal order, because the overwritten character is
    /// shared.
    pub fn entry(&self, trie: &CompactTrie, i: usize) -> (usize, NodeId) {
        let r = self.st_rank[i] as usize;
        let (v, u) = self.tree_pointer[r - 1];
        let j = self.modified_rank[r - 1]
            .rank(i as u64 + 1)
            .expect("every position belongs to its subtree's sequence");
        (trie.node(u).term_lo as usize + j as usize - 1, v)
    }

    /// The `i`-th 1-modified string, as a fragment: the terminal with its
    /// divergence character overwritten by the heavy-path character.
    pub fn modified(&self, trie: &CompactTrie, text: &[u8], i: usize) -> Frag {
        let (t, v) = self.entry(trie, i);
        let b = heavy_char(trie, text, v).expect("a divergence node has a heavy child");
        trie.terms[t].frag.with_sub(trie.node(v).depth as usize, b)
    }
}

impl HeavyLabelStore {
    /// `n − 1 − |S′_{C,i}|`, the modified string measured from the head of
    /// the path.
    pub fn label_c(&self, trie: &CompactTrie, n: usize, head: NodeId, i: usize) -> i64 {
        let e = &self.paths[&head];
        let (t, _) = e.entry(trie, i);
        let len = trie.terms[t].frag.len() - trie.node(head).depth as usize;
        n as i64 - 1 - len as i64
    }
}

/// Per-node change-mark bit vectors over the removed branch characters.
#[derive(Default)]
pub struct DiffStore {
    pub nodes: HashMap<NodeId, BitVecRS>,
}

/// Sampled compact tries over the node and path lists. Terminal labels are
/// the original positions in the full sorted lists.
#[derive(Default)]
pub struct SampledTrimTries {
    pub nodes: HashMap<NodeId, SampledList>,
    pub paths: HashMap<NodeId, SampledPathList>,
}

pub struct SampledList {
    pub trie: CompactTrie,
    pub positions: Vec<u32>,
}

pub struct SampledPathList {
    pub lcp: ModTrieLcp,
    pub positions: Vec<u32>,
}

/// All succinct stores of one trie of the deepest level.
pub struct DeepStores {
    pub node: NodeLabelStore,
    pub heavy: HeavyLabelStore,
    pub diff: DiffStore,
    pub sampled: SampledTrimTries,
    /// `Σ ⌈log st_rank⌉` over all node-store positions, in bits: the cost of
    /// the rank arrays under variable-length coding, reported as a
    /// measurement.
    pub st_rank_bits: u64,
}

/// Builds every store for one trie. `with_heavy` additionally builds the
/// per-path stores and the diff bit vectors (the mismatch index needs them;
/// the wildcard index does not).
fn build_trie_stores(
    trie: &CompactTrie,
    text: &[u8],
    stride: usize,
    with_heavy: bool,
    lce: &LceIndex,
    oracle: &impl PlainLcp,
) -> DeepStores {
    let mut node = NodeLabelStore::default();
    let mut heavy = HeavyLabelStore::default();
    let mut diff = DiffStore::default();
    let mut sampled = SampledTrimTries::default();
    let mut st_rank_bits = 0u64;

    for v in 0..trie.num_nodes() as NodeId {
        let off = off_children(trie, v);
        if off.is_empty() {
            continue;
        }
        let d = trie.node(v).depth as usize;

        // Entries: terminal indices under off-path children, sorted by their
        // trimmed content (ties by terminal index, which keeps the per-child
        // subsequences in terminal order).
        let mut ents: Vec<u32> = Vec::new();
        for &(_, u) in &off {
            let un = trie.node(u);
            ents.extend(un.term_lo..un.term_hi);
        }
        ents.sort_by(|&a, &b| {
            let fa = trie.terms[a as usize].frag.tail(d + 1);
            let fb = trie.terms[b as usize].frag.tail(d + 1);
            frag_cmp(&fa, text, &fb, text, oracle).1.then(a.cmp(&b))
        });
        let b = ents.len();

        // Child ranks: heaviest subtree first, ties to the smaller first
        // edge character (the iteration order of `off` is already by
        // character).
        let mut ranked: Vec<(Sym, NodeId)> = off.clone();
        ranked.sort_by_key(|&(ch, u)| {
            let un = trie.node(u);
            (std::cmp::Reverse(un.term_hi - un.term_lo), ch)
        });
        let tree_pointer: Vec<NodeId> = ranked.iter().map(|&(_, u)| u).collect();
        let rank_of_child: HashMap<NodeId, u32> = tree_pointer
            .iter()
            .enumerate()
            .map(|(r, &u)| (u, r as u32 + 1))
            .collect();
        let child_of_term = |t: u32| -> NodeId {
            *off.iter()
                .map(|(_, u)| u)
                .find(|&&u| {
                    let un = trie.node(u);
                    un.term_lo <= t && t < un.term_hi
                })
                .unwrap()
        };
        let st_rank: Vec<u32> = ents
            .iter()
            .map(|&t| rank_of_child[&child_of_term(t)])
            .collect();
        st_rank_bits += st_rank.iter().map(|&r| ceil_log2(r) as u64).sum::<u64>();
        let modified_rank: Vec<IncreasingSeq> = (1..=tree_pointer.len() as u32)
            .map(|r| {
                let positions: Vec<u64> = st_rank
                    .iter()
                    .enumerate()
                    .filter(|&(_, &sr)| sr == r)
                    .map(|(i, _)| i as u64 + 1)
                    .collect();
                IncreasingSeq::new(positions, b as u64)
            })
            .collect();
        let entries = NodeEntries { st_rank, tree_pointer, modified_rank };
        for (i, &t) in ents.iter().enumerate() {
            debug_assert_eq!(
                entries.term_index(trie, i),
                t as usize,
                "store chain reconstructs the trimmed order"
            );
        }

        if with_heavy && b >= 2 {
            let chars: Vec<Sym> = ents
                .iter()
                .map(|&t| trie.terms[t as usize].frag.char_at(text, d))
                .collect();
            diff.nodes.insert(v, BitVecRS::from_bits(&diff_bits(&chars)));
        }

        let positions = sample_positions(b, stride);
        let terms: Vec<(Frag, u32)> = positions
            .iter()
            .map(|&i| (trie.terms[ents[i as usize] as usize].frag.tail(d + 1), i))
            .collect();
        sampled.nodes.insert(
            v,
            SampledList { trie: CompactTrie::from_sorted(text, terms, oracle), positions },
        );
        node.nodes.insert(v, entries);
    }

    if with_heavy {
        let heads: Vec<NodeId> =
            (0..trie.num_nodes() as NodeId).filter(|&v| trie.node(v).hp_head == v).collect();
        for head in heads {
            // Hanging subtrees: one per (path node, off-path child).
            let mut slots: Vec<(NodeId, NodeId, u32)> = Vec::new(); // (v, u, count)
            let mut cur = head;
            loop {
                for (_, u) in off_children(trie, cur) {
                    let un = trie.node(u);
                    slots.push((cur, u, un.term_hi - un.term_lo));
                }
                let h = trie.node(cur).heavy;
                if h == NIL {
                    break;
                }
                cur = h;
            }
            if slots.is_empty() {
                continue;
            }
            // Entries: (terminal, slot), sorted by the 1-modified strings.
            let mut ents: Vec<(u32, usize)> = Vec::new();
            let modfrag = |t: u32, s: usize| -> Frag {
                let (v, _, _) = slots[s];
                let bch = heavy_char(trie, text, v).unwrap();
                trie.terms[t as usize].frag.with_sub(trie.node(v).depth as usize, bch)
            };
            for (s, &(_, u, _)) in slots.iter().enumerate() {
                let un = trie.node(u);
                ents.extend((un.term_lo..un.term_hi).map(|t| (t, s)));
            }
            ents.sort_by(|&(a, sa), &(b, sb)| {
                let fa = modfrag(a, sa);
                let fb = modfrag(b, sb);
                frag_cmp(&fa, text, &fb, text, oracle).1.then(a.cmp(&b))
            });
            let b = ents.len();

            let mut order: Vec<usize> = (0..slots.len()).collect();
            order.sort_by_key(|&s| {
                let (v, u, cnt) = slots[s];
                (std::cmp::Reverse(cnt), trie.node(v).depth, trie.node(u).edge.char_at(text, 0))
            });
            let rank_of_slot: HashMap<usize, u32> =
                order.iter().enumerate().map(|(r, &s)| (s, r as u32 + 1)).collect();
            let st_rank: Vec<u32> = ents.iter().map(|&(_, s)| rank_of_slot[&s]).collect();
            let tree_pointer: Vec<(NodeId, NodeId)> =
                order.iter().map(|&s| (slots[s].0, slots[s].1)).collect();
            let modified_rank: Vec<IncreasingSeq> = (1..=order.len() as u32)
                .map(|r| {
                    let positions: Vec<u64> = st_rank
                        .iter()
                        .enumerate()
                        .filter(|&(_, &sr)| sr == r)
                        .map(|(i, _)| i as u64 + 1)
                        .collect();
                    IncreasingSeq::new(positions, b as u64)
                })
                .collect();
            let entries = PathEntries { st_rank, tree_pointer, modified_rank };
            for (i, &(t, _)) in ents.iter().enumerate() {
                debug_assert_eq!(
                    entries.entry(trie, i).0,
                    t as usize,
                    "store chain reconstructs the modified order"
                );
            }

            let positions = sample_positions(b, stride);
            let terms: Vec<(Frag, u32)> = positions
                .iter()
                .map(|&i| {
                    let (t, s) = ents[i as usize];
                    (modfrag(t, s), i)
                })
                .collect();
            let lcp = ModTrieLcp::build(text, lce, terms, oracle);
            sampled.paths.insert(head, SampledPathList { lcp, positions });
            heavy.paths.insert(head, entries);
        }
    }

    DeepStores { node, heavy, diff, sampled, st_rank_bits }
}

/// Below-the-range / within-the-range predicates for a prefix binary search:
/// `strictly_below` is true for entries lexicographically before every string
/// with prefix `q`, `at_most_within` also for entries that have `q` as a
/// prefix.
fn prefix_predicates(l: usize, ord: Ordering, qlen: usize) -> (bool, bool) {
    let below = ord == Ordering::Less && l < qlen;
    (below, below || l == qlen)
}

// ---------------------------------------------------------------------------
// k-mismatch index
// ---------------------------------------------------------------------------

/// k-mismatch index over a (k−1)-level substitution tree plus deep stores.
pub struct CompactIndex {
    pub n: usize,
    pub k: usize,
    pub tree: ErrataTree,
    /// Stores of the tries at level k−1, keyed by trie id.
    pub stores: HashMap<u32, DeepStores>,
    /// Total `Σ ⌈log st_rank⌉` over all stores, in bits.
    pub st_rank_bits: u64,
}

/// Builds the k-mismatch index: the substitution-tree hierarchy is built
/// only to level k−1, and every trie of that level gets the succinct stores
/// that resolve the final mismatch at query time.
pub fn build_compact_mismatch(text: &[u8], k: usize) -> CompactIndex {
    assert!(k >= 1, "the mismatch budget must be at least 1");
    let n = text.len();
    let lce = LceIndex::new(text);
    let oracle = SelfLcp::new(&lce);
    let positions: Vec<usize> = (0..n).collect();
    let tree = ErrataTree::build(text, &positions, k - 1, &oracle);
    let stride = (usize::BITS - 1 - n.leading_zeros()).max(1) as usize;
    let mut stores = HashMap::new();
    let mut st_rank_bits = 0u64;
    for (tid, et) in tree.tries.iter().enumerate() {
        if et.level == k - 1 {
            let ds = build_trie_stores(&et.trie, text, stride, true, &lce, &oracle);
            st_rank_bits += ds.st_rank_bits;
            stores.insert(tid as u32, ds);
        }
    }
    CompactIndex { n, k, tree, stores, st_rank_bits }
}

impl CompactIndex {
    /// All k-mismatch occurrence starts of `pattern`, sorted and unique.
    pub fn query(&self, text: &[u8], pattern: &[u8]) -> Vec<u32> {
        self.query_counted(text, pattern).0
    }

    /// As [`CompactIndex::query`], additionally returning the largest
    /// pre-dedup multiplicity of any single occurrence (1 = every occurrence
    /// was discovered exactly once).
    pub fn query_counted(&self, text: &[u8], pattern: &[u8]) -> (Vec<u32>, usize) {
        let (n, m) = (self.n, pattern.len());
        if m > n {
            return (Vec::new(), 0);
        }
        let mut host = text.to_vec();
        host.extend_from_slice(pattern);
        let lce = LceIndex::new(&host);
        let oracle = SelfLcp::new(&lce);
        let q = Frag::plain(n, m);

        let (hits, over) = self.tree.query_overflow(&host, &q, &host, self.k, &oracle);
        let mut raw = self.tree.labels(&hits);
        for st in &over {
            debug_assert_eq!(st.budget, 1, "one mismatch remains at the deepest level");
            self.overflow_hits(st, &host, &q, &oracle, &mut raw);
        }
        raw.sort_unstable();
        let max_mult = raw
            .chunk_by(|a, b| a == b)
            .map(|c| c.len())
            .max()
            .unwrap_or(0);
        raw.dedup();
        (raw, max_mult)
    }

    /// Places the one remaining mismatch of an overflow state using the deep
    /// stores: an exact walk over the trie, querying the per-path store at
    /// the end of every maximal on-heavy-path run (the mismatch sits at a
    /// path node where the text branches away while the pattern follows the
    /// path) and the per-node store wherever the pattern leaves the heavy
    /// path (the mismatch sits at the branch, the text continuing into some
    /// other off-path child). In-place charges — text following the heavy
    /// path against a diverging pattern character, or a divergence inside an
    /// edge — were already handled by the overflow-producing walk itself.
    fn overflow_hits(
        &self,
        st: &Overflow,
        host: &[u8],
        q: &Frag,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        let trie = &self.tree.tries[st.trie as usize].trie;
        let ds = &self.stores[&st.trie];
        let mut cur = st.entry;
        let mut qpos = st.qoff;
        // Maximal run of path nodes where the pattern matched the heavy
        // character: (path head, depth and pattern offset at the first).
        let mut seg: Option<(NodeId, usize, usize)> = None;

        macro_rules! flush_seg {
            () => {
                if let Some((head, d_s, qpos_s)) = seg.take() {
                    self.path_matches(trie, ds, head, d_s, qpos_s, host, q, oracle, out);
                }
            };
        }

        loop {
            if cur.above > 0 {
                let node = trie.node(cur.node);
                let avail = cur.above as usize;
                let off = node.edge.len() - avail;
                let rest = node.edge.tail(off);
                let l = frag_lcp(&rest, host, &q.tail(qpos), host, oracle).min(avail);
                qpos += l;
                if l < avail || qpos == q.len() {
                    // Pattern diverges inside the edge (an in-place charge,
                    // handled by the producing walk) or ends: nothing below
                    // here for the stores.
                    flush_seg!();
                    return;
                }
                cur = NodeRef::explicit(cur.node);
                continue;
            }

            let v = cur.node;
            if qpos == q.len() {
                flush_seg!();
                return;
            }
            let c = q.char_at(host, qpos);
            let node = trie.node(v);
            let hchar = heavy_char(trie, host, v);

            if hchar == Some(c) {
                let head = node.hp_head;
                match &mut seg {
                    Some((h, _, _)) if *h == head => {}
                    _ => {
                        flush_seg!();
                        seg = Some((head, node.depth as usize, qpos));
                    }
                }
                let heavy = node.heavy;
                let elen = trie.node(heavy).edge.len() as u32;
                cur = NodeRef { node: heavy, above: elen };
                continue;
            }

            // The pattern leaves the heavy path at v: the mismatch can sit
            // here, with the text continuing into any off-path child other
            // than the pattern's own continuation.
            flush_seg!();
            self.branch_matches(trie, ds, v, c, qpos + 1, host, q, oracle, out);
            match node.children.get(c) {
                Some(child) => {
                    let elen = trie.node(child).edge.len() as u32;
                    cur = NodeRef { node: child, above: elen };
                }
                None => return,
            }
        }
    }

    /// Store query (per-path): 1-modified strings of path `head` that have
    /// the pattern suffix from `qpos_s` as a prefix (compared from string
    /// depth `d_s`, where the on-path run began). Entries whose overwritten
    /// position lies beyond the pattern's end are exact matches of the
    /// pattern and are skipped.
    #[allow(clippy::too_many_arguments)]
    fn path_matches(
        &self,
        trie: &CompactTrie,
        ds: &DeepStores,
        head: NodeId,
        d_s: usize,
        qpos_s: usize,
        host: &[u8],
        q: &Frag,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        let Some(pe) = ds.heavy.paths.get(&head) else {
            return;
        };
        let b = pe.b();
        let samples: &[u32] = ds
            .sampled
            .paths
            .get(&head)
            .map(|s| s.positions.as_slice())
            .unwrap_or(&[]);
        let qtail = q.tail(qpos_s);
        let cmp = |i: usize| {
            let f = pe.modified(trie, host, i).tail(d_s);
            frag_cmp(&f, host, &qtail, host, oracle)
        };
        let lo = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).0
        });
        let hi = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).1
        });
        let qend_depth = d_s + qtail.len();
        for i in lo..hi {
            let (t, vdiv) = pe.entry(trie, i);
            if (trie.node(vdiv).depth as usize) < qend_depth {
                out.push(trie.terms[t].label);
            }
        }
    }

    /// Store query (per-node): trimmed off-path entries of `v` that have the
    /// pattern suffix from `qpos2` as a prefix, skipping every entry whose
    /// removed branch character equals the pattern character `c` (those are
    /// exact continuations of the pattern, reported elsewhere). Runs of
    /// equal branch characters are skipped via the diff bit vector.
    #[allow(clippy::too_many_arguments)]
    fn branch_matches(
        &self,
        trie: &CompactTrie,
        ds: &DeepStores,
        v: NodeId,
        c: Sym,
        qpos2: usize,
        host: &[u8],
        q: &Frag,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        let Some(ne) = ds.node.nodes.get(&v) else {
            return;
        };
        let d = trie.node(v).depth as usize;
        let b = ne.b();
        let samples: &[u32] = ds
            .sampled
            .nodes
            .get(&v)
            .map(|s| s.positions.as_slice())
            .unwrap_or(&[]);
        let qtail = q.tail(qpos2);
        let cmp = |i: usize| {
            let f = trie.terms[ne.term_index(trie, i)].frag.tail(d + 1);
            frag_cmp(&f, host, &qtail, host, oracle)
        };
        let lo = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).0
        });
        let hi = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).1
        });
        let diff = ds.diff.nodes.get(&v);
        let mut i = lo;
        while i < hi {
            let t = ne.term_index(trie, i);
            if trie.terms[t].frag.char_at(host, d) == c {
                // Skip the whole run of entries with this branch character.
                let Some(diff) = diff else { break };
                let ones = diff.rank1(i.min(diff.len()));
                if ones == diff.count_ones() {
                    break;
                }
                i = diff.select1(ones + 1) + 1;
            } else {
                out.push(trie.terms[t].label);
                i += 1;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Wildcard index
// ---------------------------------------------------------------------------

/// One trie of the wildcard tree: at every node with off-path children (and
/// below the deepest level) a single merged trie of all their strings with
/// the branch character replaced by the out-of-band marker.
pub struct WildTrie {
    pub trie: CompactTrie,
    pub level: usize,
    pub merged: HashMap<NodeId, u32>,
}

/// Index for patterns with up to k wildcard positions: k−1 levels of merged
/// wildcard-substitution tries plus deep stores at the last level.
pub struct WildcardIndex {
    pub n: usize,
    pub k: usize,
    pub wildcard: u8,
    pub tries: Vec<WildTrie>,
    pub stores: HashMap<u32, DeepStores>,
    pub st_rank_bits: u64,
}

/// Builds the wildcard index with the default wildcard byte `?`.
pub fn build_wildcard_index(text: &[u8], k: usize) -> WildcardIndex {
    build_wildcard_index_with(text, k, WILDCARD)
}

/// Builds the wildcard index with a caller-chosen wildcard byte. The text
/// must not contain that byte.
pub fn build_wildcard_index_with(text: &[u8], k: usize, wildcard: u8) -> WildcardIndex {
    assert!(k >= 1, "the wildcard budget must be at least 1");
    assert!(
        !text.contains(&wildcard),
        "the text must not contain the wildcard byte"
    );
    let n = text.len();
    let lce = LceIndex::new(text);
    let oracle = SelfLcp::new(&lce);
    let terms: Vec<(Frag, u32)> = (0..n).map(|p| (Frag::suffix_of(p, n), p as u32)).collect();
    let mut index = WildcardIndex {
        n,
        k,
        wildcard,
        tries: Vec::new(),
        stores: HashMap::new(),
        st_rank_bits: 0,
    };
    build_wild_trie(&mut index.tries, text, terms, 0, k - 1, &oracle);
    let stride = (usize::BITS - 1 - n.leading_zeros()).max(1) as usize;
    for (tid, wt) in index.tries.iter().enumerate() {
        if wt.level == k - 1 {
            let ds = build_trie_stores(&wt.trie, text, stride, false, &lce, &oracle);
            index.st_rank_bits += ds.st_rank_bits;
            index.stores.insert(tid as u32, ds);
        }
    }
    index
}

/// Recursive build of the wildcard tree: one merged substitution trie per
/// node (all off-path children together, branch character → marker), down to
/// `depth` levels of merging.
fn build_wild_trie(
    tries: &mut Vec<WildTrie>,
    text: &[u8],
    terms: Vec<(Frag, u32)>,
    level: usize,
    depth: usize,
    oracle: &impl PlainLcp,
) -> u32 {
    let trie = CompactTrie::build(text, terms, oracle);
    let id = tries.len() as u32;
    tries.push(WildTrie { trie, level, merged: HashMap::new() });
    if level >= depth {
        return id;
    }
    for v in 0..tries[id as usize].trie.num_nodes() as NodeId {
        let strings: Vec<(Frag, u32)> = {
            let t = &tries[id as usize].trie;
            let d = t.node(v).depth as usize;
            off_children(t, v)
                .iter()
                .flat_map(|&(_, u)| {
                    let un = t.node(u);
                    (un.term_lo..un.term_hi).map(move |ti| {
                        let term = &t.terms[ti as usize];
                        (term.frag.with_sub(d, PSI), term.label)
                    })
                })
                .collect()
        };
        if strings.is_empty() {
            continue;
        }
        let sub = build_wild_trie(tries, text, strings, level + 1, depth, oracle);
        tries[id as usize].merged.insert(v, sub);
    }
    id
}

impl WildcardIndex {
    /// All occurrence starts of `pattern`, whose wildcard bytes match any
    /// text character; sorted and unique. Panics when the pattern has more
    /// than k wildcards.
    pub fn query(&self, text: &[u8], pattern: &[u8]) -> Vec<u32> {
        let wc = pattern.iter().filter(|&&b| b == self.wildcard).count();
        assert!(wc <= self.k, "pattern has more than k wildcards");
        let (n, m) = (self.n, pattern.len());
        if m > n {
            return Vec::new();
        }
        let mut host = text.to_vec();
        host.extend_from_slice(pattern);
        let lce = LceIndex::new(&host);
        let oracle = SelfLcp::new(&lce);
        let q = Frag::plain(n, m);
        let mut out = Vec::new();
        self.wquery_in(0, NodeRef::explicit(0), 0, &host, &q, &oracle, &mut out);
        out.sort_unstable();
        debug_assert!(
            out.windows(2).all(|w| w[0] < w[1]),
            "every occurrence is discovered exactly once"
        );
        out
    }

    /// Walks `q[qoff..]` from `entry` in trie `tid`. Non-wildcard characters
    /// must match exactly; a wildcard at an explicit node branches into the
    /// merged substitution trie (all off-path children at once) plus the
    /// heavy child in place, falling back to the per-node store at the
    /// deepest level; a wildcard inside an edge simply consumes the edge
    /// character.
    #[allow(clippy::too_many_arguments)]
    fn wquery_in(
        &self,
        tid: u32,
        entry: NodeRef,
        qoff: usize,
        host: &[u8],
        q: &Frag,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        let wt = &self.tries[tid as usize];
        let trie = &wt.trie;
        let wc = self.wildcard as Sym;
        let mut cur = entry;
        let mut qpos = qoff;

        loop {
            if cur.above > 0 {
                let node = trie.node(cur.node);
                let avail = cur.above as usize;
                let off = node.edge.len() - avail;
                let rest = node.edge.tail(off);
                let mut l = 0usize;
                loop {
                    l += frag_lcp(&rest.tail(l), host, &q.tail(qpos + l), host, oracle)
                        .min(avail - l);
                    if l == avail || qpos + l == q.len() {
                        break;
                    }
                    if q.char_at(host, qpos + l) == wc {
                        l += 1; // a wildcard matches the edge character
                        continue;
                    }
                    return; // real divergence: no mismatches allowed
                }
                qpos += l;
                if qpos == q.len() {
                    let pos = NodeRef { node: cur.node, above: (avail - l) as u32 };
                    for i in trie.term_range(pos) {
                        out.push(trie.terms[i].label);
                    }
                    return;
                }
                cur = NodeRef::explicit(cur.node);
                continue;
            }

            let v = cur.node;
            if qpos == q.len() {
                for i in trie.term_range(NodeRef::explicit(v)) {
                    out.push(trie.terms[i].label);
                }
                return;
            }
            let c = q.char_at(host, qpos);
            let node = trie.node(v);

            if c == wc {
                // Branch: every off-path child via the merged trie or the
                // deep store, the heavy child in place.
                if let Some(&sub) = wt.merged.get(&v) {
                    let st = &self.tries[sub as usize].trie;
                    let e = st.weighted_ancestor(st.terms[0].node, node.depth as usize + 1);
                    self.wquery_in(sub, e, qpos + 1, host, q, oracle, out);
                } else if let Some(ds) = self.stores.get(&tid) {
                    self.wild_branch_matches(trie, ds, v, qpos + 1, host, q, oracle, out);
                }
                let heavy = node.heavy;
                if heavy == NIL {
                    return;
                }
                let elen = trie.node(heavy).edge.len() as u32;
                cur = NodeRef { node: heavy, above: elen - 1 };
                qpos += 1;
                continue;
            }

            match node.children.get(c) {
                Some(child) => {
                    let elen = trie.node(child).edge.len() as u32;
                    cur = NodeRef { node: child, above: elen };
                }
                None => return,
            }
        }
    }

    /// Deep-store resolution of the final wildcard branch: all trimmed
    /// off-path entries of `v` that have the rest of the pattern as a
    /// prefix. The rest contains no further wildcards — reaching the deepest
    /// level consumed all but one.
    #[allow(clippy::too_many_arguments)]
    fn wild_branch_matches(
        &self,
        trie: &CompactTrie,
        ds: &DeepStores,
        v: NodeId,
        qpos2: usize,
        host: &[u8],
        q: &Frag,
        oracle: &impl PlainLcp,
        out: &mut Vec<u32>,
    ) {
        let Some(ne) = ds.node.nodes.get(&v) else {
            return;
        };
        let qtail = q.tail(qpos2);
        debug_assert!(
            (0..qtail.len()).all(|i| qtail.char_at(host, i) != self.wildcard as Sym),
            "no wildcards remain at the deepest level"
        );
        let d = trie.node(v).depth as usize;
        let b = ne.b();
        let samples: &[u32] = ds
            .sampled
            .nodes
            .get(&v)
            .map(|s| s.positions.as_slice())
            .unwrap_or(&[]);
        let cmp = |i: usize| {
            let f = trie.terms[ne.term_index(trie, i)].frag.tail(d + 1);
            frag_cmp(&f, host, &qtail, host, oracle)
        };
        let lo = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).0
        });
        let hi = partition_sampled(b, samples, &|i| {
            let (l, o) = cmp(i);
            prefix_predicates(l, o, qtail.len()).1
        });
        for i in lo..hi {
            out.push(trie.terms[ne.term_index(trie, i)].label);
        }
    }
}
