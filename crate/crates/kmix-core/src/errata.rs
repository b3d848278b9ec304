//! Leveled mismatch trees over a set of text suffixes.
//!
//! Level 0 is the compact trie of the input suffixes. Every trie is
//! heavy-path decomposed, and each heavy path contributes substitution trees
//! one level down:
//!
//! * *wildcard trees*, one per (node, off-path character): the strings below
//!   that off-path child with the branching character replaced by the
//!   wildcard ψ — used when the pattern's character at the branch differs
//!   from every stored character;
//! * *main-path trees*, one per node (merged over its off-path characters):
//!   the same strings with the branching character replaced by the heavy-path
//!   character — used when the pattern agrees with the heavy path but the
//!   text branches away.
//!
//! Wildcard trees are grouped per node over their characters, main-path
//! trees per heavy path over their nodes, both as weighted-median search
//! trees, so a query touches O(log) merged group tries instead of one per
//! node. A query walks the pattern exactly and, at every point where a
//! mismatch could be charged, descends into the matching group tries with
//! the budget decremented. A match is discovered exactly once: the walk it
//! takes is determined by its actual mismatch positions, left to right.

use crate::kangaroo::{frag_lcp, PlainLcp};
use crate::text::{Frag, Sym, PSI};
use crate::trie::{CompactTrie, NodeId, NodeRef, NIL};
use std::collections::HashMap;

/// What a trie in the hierarchy stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrieKind {
    /// The level-0 trie of unmodified suffixes.
    Base,
    /// Wildcard substitution tree (branch character replaced by ψ).
    Wildcard,
    /// Main-path substitution tree (branch character replaced by the
    /// heavy-path character).
    MainPath,
}

/// A weighted-median search tree over a sorted list of substitution trees.
/// Every hierarchy node owns a merged trie of its whole key range; the
/// children split at the weighted median, whose own trie becomes a leaf.
pub struct Group {
    pub trie: u32,
    pub weight: usize,
    lo_key: u32,
    hi_key: u32,
    left: Option<Box<Group>>,
    mid: Option<Box<Group>>,
    right: Option<Box<Group>>,
}

impl Group {
    /// Tries of a minimal set of groups covering exactly the items with keys
    /// in `[a..=b]`.
    fn cover(&self, a: u32, b: u32, out: &mut Vec<u32>) {
        if a > b || b < self.lo_key || a > self.hi_key {
            return;
        }
        if a <= self.lo_key && self.hi_key <= b {
            out.push(self.trie);
            return;
        }
        if let Some(l) = &self.left {
            l.cover(a, b, out);
        }
        if let Some(m) = &self.mid {
            m.cover(a, b, out);
        }
        if let Some(r) = &self.right {
            r.cover(a, b, out);
        }
    }

    /// Root-to-leaf weight chains, for the halving property.
    pub fn chains(&self, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        prefix.push(self.weight);
        if self.left.is_none() && self.mid.is_none() && self.right.is_none() {
            out.push(prefix.clone());
        }
        for c in [&self.left, &self.mid, &self.right].into_iter().flatten() {
            c.chains(prefix, out);
        }
        prefix.pop();
    }
}

/// Substitution-tree structure of one heavy path.
struct PathInfo {
    /// Nodes of the path, head first.
    nodes: Vec<NodeId>,
    /// Main-path group hierarchy, keyed by index into `nodes`.
    main: Option<Group>,
    /// Per-node wildcard hierarchies, keyed by off-path character.
    wildcard: HashMap<NodeId, Group>,
}

pub struct ErrataTrie {
    pub trie: CompactTrie,
    pub level: usize,
    pub kind: TrieKind,
    /// Index of each node on its heavy path.
    path_index: Vec<u32>,
    /// Heavy-path structures, keyed by path head.
    paths: HashMap<NodeId, PathInfo>,
}

pub struct ErrataTree {
    pub tries: Vec<ErrataTrie>,
    pub k: usize,
}

/// A reported subtree: all terminals below `pos` in trie `trie` match.
#[derive(Clone, Copy, Debug)]
pub struct Hit {
    pub trie: u32,
    pub pos: NodeRef,
}

/// A walk state that entered a trie without substitution structures (the
/// deepest level) while still holding mismatch budget. The walk itself
/// continues — exact matches and in-place charges inside the trie are still
/// reported — but charges that would descend into substitution trees cannot
/// be placed. The caller owns those remaining mismatches; the space-reduced
/// indexes resolve them with per-node and per-path stores.
#[derive(Clone, Copy, Debug)]
pub struct Overflow {
    pub trie: u32,
    pub entry: NodeRef,
    pub qoff: usize,
    pub budget: usize,
}

impl ErrataTree {
    /// Builds the leveled structure for the suffixes of `text` starting at
    /// `positions`, supporting queries with up to `k` mismatches. Terminal
    /// labels are the suffix start positions.
    pub fn build(text: &[u8], positions: &[usize], k: usize, oracle: &impl PlainLcp) -> Self {
        assert!(!positions.is_empty(), "suffix set must be non-empty");
        let n = text.len();
        let terms: Vec<(Frag, u32)> = positions
            .iter()
            .map(|&p| (Frag::suffix_of(p, n), p as u32))
            .collect();
        let mut tree = ErrataTree { tries: Vec::new(), k };
        tree.build_trie(text, terms, 0, TrieKind::Base, oracle);
        tree
    }

    fn build_trie(
        &mut self,
        text: &[u8],
        terms: Vec<(Frag, u32)>,
        level: usize,
        kind: TrieKind,
        oracle: &impl PlainLcp,
    ) -> u32 {
        let trie = CompactTrie::build(text, terms, oracle);
        let id = self.tries.len() as u32;
        self.tries.push(ErrataTrie {
            trie,
            level,
            kind,
            path_index: Vec::new(),
            paths: HashMap::new(),
        });
        if level >= self.k {
            return id;
        }

        // Heavy-path decomposition: walk each path from its head and attach
        // the substitution trees of its nodes.
        let num_nodes = self.tries[id as usize].trie.num_nodes();
        let mut path_index = vec![0u32; num_nodes];
        let heads: Vec<NodeId> = (0..num_nodes as NodeId)
            .filter(|&v| self.tries[id as usize].trie.node(v).hp_head == v)
            .collect();
        for head in heads {
            let mut nodes = Vec::new();
            let mut cur = head;
            loop {
                path_index[cur as usize] = nodes.len() as u32;
                nodes.push(cur);
                let h = self.tries[id as usize].trie.node(cur).heavy;
                if h == NIL {
                    break;
                }
                cur = h;
            }

            let mut main_items: Vec<(u32, Vec<(Frag, u32)>)> = Vec::new();
            for (idx, &v) in nodes.iter().enumerate() {
                let (depth, heavy, off): (usize, NodeId, Vec<(Sym, NodeId)>) = {
                    let t = &self.tries[id as usize].trie;
                    let node = t.node(v);
                    (
                        node.depth as usize,
                        node.heavy,
                        node.children
                            .iter()
                            .filter(|&(_, c)| c != node.heavy)
                            .collect(),
                    )
                };
                if off.is_empty() {
                    continue;
                }
                let b = {
                    let t = &self.tries[id as usize].trie;
                    debug_assert!(heavy != NIL, "a node with off-path children has a heavy child");
                    t.node(heavy).edge.char_at(text, 0)
                };
                let mut wc_items: Vec<(u32, Vec<(Frag, u32)>)> = Vec::new();
                let mut main_strings: Vec<(Frag, u32)> = Vec::new();
                for &(a, child) in &off {
                    let strings: Vec<(Frag, u32)> = {
                        let t = &self.tries[id as usize].trie;
                        let range = t.node(child).term_lo as usize..t.node(child).term_hi as usize;
                        t.terms[range]
                            .iter()
                            .map(|term| (term.frag.clone(), term.label))
                            .collect()
                    };
                    wc_items.push((
                        a as u32,
                        strings
                            .iter()
                            .map(|(f, l)| (f.with_sub(depth, PSI), *l))
                            .collect(),
                    ));
                    main_strings
                        .extend(strings.iter().map(|(f, l)| (f.with_sub(depth, b), *l)));
                }
                let g = self.build_group(text, &wc_items, level + 1, TrieKind::Wildcard, oracle);
                self.tries[id as usize]
                    .paths
                    .entry(head)
                    .or_insert_with(|| PathInfo {
                        nodes: Vec::new(),
                        main: None,
                        wildcard: HashMap::new(),
                    })
                    .wildcard
                    .insert(v, g);
                main_items.push((idx as u32, main_strings));
            }
            if !main_items.is_empty() {
                let g = self.build_group(text, &main_items, level + 1, TrieKind::MainPath, oracle);
                let info = self.tries[id as usize].paths.get_mut(&head).unwrap();
                info.main = Some(g);
            }
            if let Some(info) = self.tries[id as usize].paths.get_mut(&head) {
                info.nodes = nodes;
            }
        }
        self.tries[id as usize].path_index = path_index;
        id
    }

    /// Builds the weighted-median hierarchy over `items` (sorted by key),
    /// materializing a merged trie per hierarchy node.
    fn build_group(
        &mut self,
        text: &[u8],
        items: &[(u32, Vec<(Frag, u32)>)],
        level: usize,
        kind: TrieKind,
        oracle: &impl PlainLcp,
    ) -> Group {
        debug_assert!(!items.is_empty());
        let merged: Vec<(Frag, u32)> = items
            .iter()
            .flat_map(|(_, strings)| strings.iter().cloned())
            .collect();
        let weight = merged.len();
        let trie = self.build_trie(text, merged, level, kind, oracle);
        if items.len() == 1 {
            return Group {
                trie,
                weight,
                lo_key: items[0].0,
                hi_key: items[0].0,
                left: None,
                mid: None,
                right: None,
            };
        }
        // Weighted median: first index where the prefix weight reaches half.
        let mut acc = 0usize;
        let mut m = items.len() - 1;
        for (i, (_, s)) in items.iter().enumerate() {
            acc += s.len();
            if 2 * acc >= weight {
                m = i;
                break;
            }
        }
        let left = (m > 0)
            .then(|| Box::new(self.build_group(text, &items[..m], level, kind, oracle)));
        let mid = Box::new(self.build_group(text, &items[m..=m], level, kind, oracle));
        let right = (m + 1 < items.len())
            .then(|| Box::new(self.build_group(text, &items[m + 1..], level, kind, oracle)));
        Group {
            trie,
            weight,
            lo_key: items[0].0,
            hi_key: items[items.len() - 1].0,
            left,
            mid: Some(mid),
            right,
        }
    }

    /// All suffixes within Hamming distance `budget` of `q` over the first
    /// `|q|` characters (suffixes shorter than `q` never match). Returns
    /// subtree handles; expand with [`ErrataTree::labels`].
    pub fn query(
        &self,
        text: &[u8],
        q: &Frag,
        qhost: &[u8],
        budget: usize,
        oracle: &impl PlainLcp,
    ) -> Vec<Hit> {
        let (out, over) = self.query_overflow(text, q, qhost, budget, oracle);
        debug_assert!(
            budget > self.k || over.is_empty(),
            "a walk within the built budget never runs out of structures"
        );
        out
    }

    /// As [`ErrataTree::query`], also collecting the walk states whose
    /// remaining budget could not be spent because the trie they reached has
    /// no substitution structures. With `budget <= k` the overflow list is
    /// always empty; with `budget == k + 1` every overflow state carries
    /// exactly one remaining mismatch.
    pub fn query_overflow(
        &self,
        text: &[u8],
        q: &Frag,
        qhost: &[u8],
        budget: usize,
        oracle: &impl PlainLcp,
    ) -> (Vec<Hit>, Vec<Overflow>) {
        let mut out = Vec::new();
        let mut over = Vec::new();
        self.query_in(
            text, 0, NodeRef::explicit(0), q, 0, qhost, budget, oracle, &mut out, &mut over,
        );
        (out, over)
    }

    /// Terminal labels of a hit list, in reporting order.
    pub fn labels(&self, hits: &[Hit]) -> Vec<u32> {
        let mut out = Vec::new();
        for h in hits {
            let t = &self.tries[h.trie as usize].trie;
            for i in t.term_range(h.pos) {
                out.push(t.terms[i].label);
            }
        }
        out
    }

    /// Walks `q[qoff..]` from `entry` (whose string depth aligns with
    /// `qoff`), spawning budgeted subqueries at every chargeable position.
    #[allow(clippy::too_many_arguments)]
    fn query_in(
        &self,
        text: &[u8],
        tid: u32,
        entry: NodeRef,
        q: &Frag,
        qoff: usize,
        qhost: &[u8],
        budget: usize,
        oracle: &impl PlainLcp,
        out: &mut Vec<Hit>,
        over: &mut Vec<Overflow>,
    ) {
        if budget > 0 && self.tries[tid as usize].level == self.k {
            over.push(Overflow { trie: tid, entry, qoff, budget });
        }
        let et = &self.tries[tid as usize];
        let trie = &et.trie;
        let mut qpos = qoff;
        let mut cur = entry;
        // Contiguous run of path nodes where q matched the heavy character:
        // (path head, first index, last index, pattern offset at the first).
        let mut seg: Option<(NodeId, u32, u32, usize)> = None;

        macro_rules! flush_seg {
            () => {
                if let Some((head, i_s, i_e, qpos_s)) = seg.take() {
                    if budget > 0 {
                        if let Some(g) = et.paths.get(&head).and_then(|p| p.main.as_ref()) {
                            let mut cover = Vec::new();
                            g.cover(i_s, i_e, &mut cover);
                            let d_s =
                                trie.node(et.paths[&head].nodes[i_s as usize]).depth as usize;
                            for gt in cover {
                                let sub = &self.tries[gt as usize].trie;
                                // All group strings share the path content
                                // above the covered nodes, so any terminal
                                // leads to the entry position.
                                let e = sub.weighted_ancestor(sub.terms[0].node, d_s);
                                self.query_in(
                                    text, gt, e, q, qpos_s, qhost, budget - 1, oracle, out,
                                    over,
                                );
                            }
                        }
                    }
                }
            };
        }

        loop {
            if cur.above > 0 {
                // Mid-edge: match the rest of the incoming edge.
                let node = trie.node(cur.node);
                let avail = cur.above as usize;
                let off = node.edge.len() - avail;
                let rest = node.edge.tail(off);
                let l = frag_lcp(&rest, text, &q.tail(qpos), qhost, oracle).min(avail);
                qpos += l;
                if qpos == q.len() {
                    flush_seg!();
                    let above = (avail - l) as u32;
                    out.push(Hit { trie: tid, pos: NodeRef { node: cur.node, above } });
                    return;
                }
                if l < avail {
                    // Divergence inside the edge: the only continuation is
                    // the edge character; charge a mismatch and go on.
                    flush_seg!();
                    if budget > 0 {
                        let pos = NodeRef { node: cur.node, above: (avail - l - 1) as u32 };
                        self.query_in(
                            text, tid, pos, q, qpos + 1, qhost, budget - 1, oracle, out, over,
                        );
                    }
                    return;
                }
                cur = NodeRef::explicit(cur.node);
                continue;
            }

            let v = cur.node;
            if qpos == q.len() {
                flush_seg!();
                out.push(Hit { trie: tid, pos: NodeRef::explicit(v) });
                return;
            }
            let c = q.char_at(qhost, qpos);
            let node = trie.node(v);
            let heavy = node.heavy;
            let hchar = (heavy != NIL).then(|| trie.node(heavy).edge.char_at(text, 0));

            if hchar == Some(c) {
                // On the heavy path: extend the main-path segment (only
                // tracked when substitution trees exist and budget remains).
                if budget > 0 && !et.path_index.is_empty() {
                    let head = node.hp_head;
                    let idx = et.path_index[v as usize];
                    match &mut seg {
                        Some((h, _, e, _)) if *h == head => *e = idx,
                        _ => {
                            flush_seg!();
                            seg = Some((head, idx, idx, qpos));
                        }
                    }
                }
                let elen = trie.node(heavy).edge.len() as u32;
                cur = NodeRef { node: heavy, above: elen };
                continue;
            }

            // q leaves the heavy path at v (or the walk dies here): charge a
            // mismatch against every stored continuation other than c.
            flush_seg!();
            if budget > 0 {
                // Off-path characters != c via the wildcard hierarchy.
                if let Some(g) = et
                    .paths
                    .get(&node.hp_head)
                    .and_then(|p| p.wildcard.get(&v))
                {
                    let mut cover = Vec::new();
                    if c > 0 {
                        g.cover(0, c as u32 - 1, &mut cover);
                    }
                    g.cover(c as u32 + 1, u32::MAX, &mut cover);
                    for gt in cover {
                        let sub = &self.tries[gt as usize].trie;
                        let e = sub.weighted_ancestor(sub.terms[0].node, node.depth as usize + 1);
                        self.query_in(text, gt, e, q, qpos + 1, qhost, budget - 1, oracle, out, over);
                    }
                }
                // The heavy continuation (== the path character) in place.
                if let Some(b) = hchar {
                    debug_assert!(b != c);
                    let elen = trie.node(heavy).edge.len() as u32;
                    let pos = NodeRef { node: heavy, above: elen - 1 };
                    self.query_in(text, tid, pos, q, qpos + 1, qhost, budget - 1, oracle, out, over);
                }
            }
            // Exact continuation into the child labelled c, if any.
            match node.children.get(c) {
                Some(child) => {
                    let elen = trie.node(child).edge.len() as u32;
                    cur = NodeRef { node: child, above: elen };
                }
                None => return,
            }
        }
    }

    /// Number of tries per level, for structural assertions.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.k + 1];
        for t in &self.tries {
            out[t.level] += 1;
        }
        out
    }

    /// Per-label occurrence count across all tries; also asserts that no
    /// label repeats within a single trie.
    pub fn label_multiplicity_stats(&self) -> HashMap<u32, usize> {
        let mut total: HashMap<u32, usize> = HashMap::new();
        for t in &self.tries {
            let mut seen = HashMap::new();
            for term in &t.trie.terms {
                let prev = seen.insert(term.label, ());
                assert!(prev.is_none(), "label repeated within one trie");
                *total.entry(term.label).or_insert(0) += 1;
            }
        }
        total
    }

    /// All group-tree weight chains, for the halving property.
    pub fn group_chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for t in &self.tries {
            for p in t.paths.values() {
                let mut prefix = Vec::new();
                if let Some(g) = &p.main {
                    g.chains(&mut prefix, &mut out);
                }
                for g in p.wildcard.values() {
                    g.chains(&mut prefix, &mut out);
                }
            }
        }
        out
    }
}
