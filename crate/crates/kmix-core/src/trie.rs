//! Compact tries over text fragments.
//!
//! A [`CompactTrie`] stores a multiset of [`Frag`] terminals. Edges are
//! labelled by fragment slices, so the whole structure lives in O(1) words per
//! node on top of the host text. Construction sorts the terminals once and
//! assembles the tree with a stack sweep over adjacent LCPs, which keeps every
//! character comparison inside the constant-time kangaroo machinery.
//!
//! Queries come in two flavours:
//! * [`CompactTrie::walk_from`] descends edge by edge from an explicit node —
//!   the right tool when the query budget is a single fragment and the start
//!   node is the root.
//! * [`CompactTrie::longest_prefix_from`] starts from an arbitrary position
//!   (possibly mid-edge) and binary-searches the terminal interval below it,
//!   finishing with a weighted-ancestor step. This is the workhorse for
//!   queries that re-enter a trie at a deep position.

use crate::kangaroo::{frag_cmp, frag_lcp, PlainLcp};
use crate::text::{Frag, Sym};
use smallvec::SmallVec;
use std::cmp::Ordering;

pub type NodeId = u32;
pub const NIL: NodeId = u32::MAX;

/// A position in a compact trie: the explicit node at or below it, and how
/// many characters above that node the position sits (0 = the node itself).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub node: NodeId,
    pub above: u32,
}

impl NodeRef {
    pub fn explicit(node: NodeId) -> Self {
        NodeRef { node, above: 0 }
    }

    pub fn is_explicit(&self) -> bool {
        self.above == 0
    }
}

/// Child edges of a node, keyed by the first character of the edge label.
/// Small fanouts use a sorted vector; large fanouts switch to a direct table
/// so lookups stay O(1) even on byte-plus-wildcard alphabets.
#[derive(Clone, Debug)]
pub enum ChildMap {
    Sorted(SmallVec<[(Sym, NodeId); 2]>),
    Table(Box<[NodeId; 257]>),
}

const TABLE_FANOUT: usize = 9;

impl ChildMap {
    pub fn new() -> Self {
        ChildMap::Sorted(SmallVec::new())
    }

    pub fn get(&self, c: Sym) -> Option<NodeId> {
        match self {
            ChildMap::Sorted(v) => v
                .binary_search_by_key(&c, |&(s, _)| s)
                .ok()
                .map(|i| v[i].1),
            ChildMap::Table(t) => {
                let id = t[c as usize];
                (id != NIL).then_some(id)
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ChildMap::Sorted(v) => v.len(),
            ChildMap::Table(t) => t.iter().filter(|&&id| id != NIL).count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ChildMap::Sorted(v) => v.is_empty(),
            ChildMap::Table(t) => t.iter().all(|&id| id == NIL),
        }
    }

    fn insert(&mut self, c: Sym, id: NodeId) {
        match self {
            ChildMap::Sorted(v) => match v.binary_search_by_key(&c, |&(s, _)| s) {
                Ok(i) => v[i].1 = id,
                Err(i) => v.insert(i, (c, id)),
            },
            ChildMap::Table(t) => t[c as usize] = id,
        }
    }

    fn maybe_promote(&mut self) {
        if let ChildMap::Sorted(v) = self {
            if v.len() >= TABLE_FANOUT {
                let mut t = Box::new([NIL; 257]);
                for &(c, id) in v.iter() {
                    t[c as usize] = id;
                }
                *self = ChildMap::Table(t);
            }
        }
    }

    /// Children in increasing order of their first edge character.
    pub fn iter(&self) -> ChildIter<'_> {
        match self {
            ChildMap::Sorted(v) => ChildIter::Sorted(v.iter()),
            ChildMap::Table(t) => ChildIter::Table(t, 0),
        }
    }
}

impl Default for ChildMap {
    fn default() -> Self {
        ChildMap::new()
    }
}

pub enum ChildIter<'a> {
    Sorted(std::slice::Iter<'a, (Sym, NodeId)>),
    Table(&'a [NodeId; 257], usize),
}

impl Iterator for ChildIter<'_> {
    type Item = (Sym, NodeId);

    fn next(&mut self) -> Option<(Sym, NodeId)> {
        match self {
            ChildIter::Sorted(it) => it.next().copied(),
            ChildIter::Table(t, pos) => {
                while *pos < 257 {
                    let c = *pos;
                    *pos += 1;
                    if t[c] != NIL {
                        return Some((c as Sym, t[c]));
                    }
                }
                None
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub parent: NodeId,
    /// Skew-binary ancestor jump pointer (see [`CompactTrie::weighted_ancestor`]).
    jump: NodeId,
    /// Node depth (number of edges from the root), used by the jump pointers.
    tdepth: u32,
    /// Label of the edge from the parent; empty at the root.
    pub edge: Frag,
    /// String depth: total label length from the root.
    pub depth: u32,
    /// Terminals in this subtree form the interval `term_lo..term_hi` of the
    /// sorted terminal array; the first `end_count` of them end exactly here.
    pub term_lo: u32,
    pub term_hi: u32,
    pub end_count: u32,
    pub children: ChildMap,
    /// Child with the largest terminal subtree (ties: smaller first edge
    /// character); `NIL` at leaves.
    pub heavy: NodeId,
    /// Topmost node of the heavy path through this node.
    pub hp_head: NodeId,
}

/// A terminal of the trie: the stored fragment, a caller-chosen label, and the
/// node its path ends at.
#[derive(Clone, Debug)]
pub struct Terminal {
    pub frag: Frag,
    pub label: u32,
    pub node: NodeId,
}

#[derive(Clone, Debug)]
pub struct CompactTrie {
    pub nodes: Vec<Node>,
    /// Terminals in lexicographic order of their fragments.
    pub terms: Vec<Terminal>,
}

impl CompactTrie {
    /// Builds the trie for `terms` (fragments of `host`). The oracle resolves
    /// plain text-vs-text LCPs; terminals may carry substitutions.
    pub fn build(host: &[u8], mut terms: Vec<(Frag, u32)>, oracle: &impl PlainLcp) -> Self {
        terms.sort_by(|a, b| {
            frag_cmp(&a.0, host, &b.0, host, oracle)
                .1
                .then_with(|| a.1.cmp(&b.1))
        });
        Self::from_sorted(host, terms, oracle)
    }

    /// As [`CompactTrie::build`], but trusts that `terms` is already sorted
    /// lexicographically.
    pub fn from_sorted(host: &[u8], terms: Vec<(Frag, u32)>, oracle: &impl PlainLcp) -> Self {
        let root = Node {
            parent: NIL,
            jump: 0,
            tdepth: 0,
            edge: Frag::plain(0, 0),
            depth: 0,
            term_lo: 0,
            term_hi: 0,
            end_count: 0,
            children: ChildMap::new(),
            heavy: NIL,
            hp_head: 0,
        };
        let mut t = CompactTrie {
            nodes: vec![root],
            terms: Vec::with_capacity(terms.len()),
        };

        // Rightmost path of the partial trie, depths strictly increasing.
        let mut stack: Vec<NodeId> = vec![0];
        let mut prev: Option<Frag> = None;
        for (frag, label) in terms {
            let l = match &prev {
                None => 0,
                Some(p) => frag_lcp(p, host, &frag, host, oracle),
            };
            let mut last = NIL;
            while t.nodes[*stack.last().unwrap() as usize].depth as usize > l {
                last = stack.pop().unwrap();
            }
            let top = *stack.last().unwrap();
            let attach = if t.nodes[top as usize].depth as usize == l {
                top
            } else {
                // Split the edge from `top` to `last` at string depth `l`.
                let mid = t.split_edge(top, last, l);
                stack.push(mid);
                mid
            };
            if frag.len() == l {
                // Duplicate of the previous terminal (or an empty fragment at
                // the root): ends at an existing position, which the stack
                // sweep guarantees is the explicit node `attach`.
                t.note_terminal(attach, frag.clone(), label);
            } else {
                let leaf = t.add_leaf(attach, &frag, l);
                stack.push(leaf);
                t.note_terminal(leaf, frag.clone(), label);
            }
            prev = Some(frag);
        }

        t.finish(host);
        t
    }

    fn split_edge(&mut self, top: NodeId, last: NodeId, l: usize) -> NodeId {
        debug_assert!(last != NIL);
        let top_depth = self.nodes[top as usize].depth as usize;
        let last_edge = self.nodes[last as usize].edge.clone();
        let cut = l - top_depth;
        let mid = self.nodes.len() as NodeId;
        let head = last_edge.head(cut);
        let node = Node {
            parent: top,
            jump: NIL,
            tdepth: 0,
            edge: head,
            depth: l as u32,
            term_lo: 0,
            term_hi: 0,
            end_count: 0,
            children: ChildMap::new(),
            heavy: NIL,
            hp_head: mid,
        };
        self.nodes.push(node);
        let tail = last_edge.tail(cut);
        self.nodes[last as usize].edge = tail;
        self.nodes[last as usize].parent = mid;
        mid
    }

    fn add_leaf(&mut self, parent: NodeId, frag: &Frag, l: usize) -> NodeId {
        let leaf = self.nodes.len() as NodeId;
        let node = Node {
            parent,
            jump: NIL,
            tdepth: 0,
            edge: frag.tail(l),
            depth: frag.len() as u32,
            term_lo: 0,
            term_hi: 0,
            end_count: 0,
            children: ChildMap::new(),
            heavy: NIL,
            hp_head: leaf,
        };
        self.nodes.push(node);
        leaf
    }

    fn note_terminal(&mut self, node: NodeId, frag: Frag, label: u32) {
        self.nodes[node as usize].end_count += 1;
        self.terms.push(Terminal { frag, label, node });
    }

    /// Fills in everything that needs the final tree shape: child maps,
    /// terminal intervals, heavy paths, and ancestor jump pointers.
    fn finish(&mut self, host: &[u8]) {
        // The stack sweep never recorded children; recover them from parents.
        for id in 1..self.nodes.len() as NodeId {
            let parent = self.nodes[id as usize].parent;
            let first = self.nodes[id as usize].edge.char_at(host, 0);
            self.nodes[parent as usize].children.insert(first, id);
        }
        for node in &mut self.nodes {
            node.children.maybe_promote();
        }

        // Terminal intervals. Terminals are in lexicographic order and every
        // subtree is a contiguous range of them; sweep them once and widen the
        // intervals of all ancestors via a second bottom-up pass.
        for node in &mut self.nodes {
            node.term_lo = u32::MAX;
            node.term_hi = 0;
        }
        for (i, term) in self.terms.iter().enumerate() {
            let n = &mut self.nodes[term.node as usize];
            n.term_lo = n.term_lo.min(i as u32);
            n.term_hi = n.term_hi.max(i as u32 + 1);
        }
        let order = self.topo_order();
        for &id in order.iter().rev() {
            let (lo, hi) = {
                let n = &self.nodes[id as usize];
                (n.term_lo, n.term_hi)
            };
            let parent = self.nodes[id as usize].parent;
            if parent != NIL && lo != u32::MAX {
                let p = &mut self.nodes[parent as usize];
                p.term_lo = p.term_lo.min(lo);
                p.term_hi = p.term_hi.max(hi);
            }
        }
        for node in &mut self.nodes {
            if node.term_lo == u32::MAX {
                node.term_lo = 0;
                node.term_hi = 0;
            }
        }

        // Heavy children, heavy-path heads, node depths, and jump pointers in
        // one top-down pass.
        for &id in &order {
            let (parent, children): (NodeId, Vec<(Sym, NodeId)>) = {
                let n = &self.nodes[id as usize];
                (n.parent, n.children.iter().collect())
            };
            if parent == NIL {
                self.nodes[id as usize].tdepth = 0;
                self.nodes[id as usize].jump = id;
            } else {
                let ptd = self.nodes[parent as usize].tdepth;
                let pj = self.nodes[parent as usize].jump;
                let pjt = self.nodes[pj as usize].tdepth;
                let pjj = self.nodes[pj as usize].jump;
                let pjjt = self.nodes[pjj as usize].tdepth;
                let n = &mut self.nodes[id as usize];
                n.tdepth = ptd + 1;
                // Skew-binary jump pointers: constant extra space per node,
                // O(log n) monotone-predicate ancestor search.
                n.jump = if ptd.wrapping_sub(pjt) == pjt.wrapping_sub(pjjt) {
                    pjj
                } else {
                    parent
                };
            }
            let mut best: NodeId = NIL;
            let mut best_w = 0u32;
            for (_, c) in children {
                let w = self.nodes[c as usize].term_hi - self.nodes[c as usize].term_lo;
                if w > best_w {
                    best_w = w;
                    best = c;
                }
            }
            self.nodes[id as usize].heavy = best;
        }
        // Heavy-path heads need parents finished first; order is top-down, so
        // do a dedicated pass.
        for &id in &order {
            let parent = self.nodes[id as usize].parent;
            let head = if parent != NIL && self.nodes[parent as usize].heavy == id {
                self.nodes[parent as usize].hp_head
            } else {
                id
            };
            self.nodes[id as usize].hp_head = head;
        }
    }

    /// Nodes ordered parent-before-child.
    fn topo_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0 as NodeId];
        while let Some(id) = stack.pop() {
            order.push(id);
            for (_, c) in self.nodes[id as usize].children.iter() {
                stack.push(c);
            }
        }
        debug_assert_eq!(order.len(), self.nodes.len());
        order
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// String depth of a position.
    pub fn ref_depth(&self, r: NodeRef) -> usize {
        self.nodes[r.node as usize].depth as usize - r.above as usize
    }

    /// Terminal interval of the subtree at `r` (positions above a node have
    /// the same subtree as the node itself).
    pub fn term_range(&self, r: NodeRef) -> std::ops::Range<usize> {
        let n = &self.nodes[r.node as usize];
        n.term_lo as usize..n.term_hi as usize
    }

    /// Terminals whose path ends exactly at the explicit node `id`.
    pub fn ends_at(&self, id: NodeId) -> std::ops::Range<usize> {
        let n = &self.nodes[id as usize];
        n.term_lo as usize..n.term_lo as usize + n.end_count as usize
    }

    /// The position at string depth `target` on the path from the root to
    /// `node`. `target` must not exceed the depth of `node`.
    pub fn weighted_ancestor(&self, node: NodeId, target: usize) -> NodeRef {
        self.weighted_ancestor_counted(node, target).0
    }

    /// As [`CompactTrie::weighted_ancestor`], also reporting the number of
    /// ancestor probes. The skew-binary jump pointers keep this logarithmic
    /// in the tree size; tests pin the bound so regressions surface.
    pub fn weighted_ancestor_counted(&self, node: NodeId, target: usize) -> (NodeRef, u32) {
        debug_assert!(target <= self.nodes[node as usize].depth as usize);
        let mut cur = node;
        let mut probes = 0u32;
        // Topmost ancestor whose string depth is still >= target: its parent
        // is strictly above the target depth, so the position sits on the
        // edge into it (or at it exactly).
        loop {
            let p = self.nodes[cur as usize].parent;
            if p == NIL || (self.nodes[p as usize].depth as usize) < target {
                break;
            }
            probes += 1;
            let j = self.nodes[cur as usize].jump;
            if j != cur && self.nodes[j as usize].depth as usize >= target {
                cur = j;
            } else {
                cur = p;
            }
        }
        (
            NodeRef {
                node: cur,
                above: (self.nodes[cur as usize].depth as usize - target) as u32,
            },
            probes,
        )
    }

    /// Character on the edge at position `r` looking downward, i.e. the
    /// character at string depth `ref_depth(r)` on the path through `r.node`.
    /// `None` when `r` is an explicit node (the continuation branches).
    pub fn char_below_on_edge(&self, host: &[u8], r: NodeRef) -> Option<Sym> {
        if r.above == 0 {
            return None;
        }
        let n = &self.nodes[r.node as usize];
        let off = n.edge.len() - r.above as usize;
        Some(n.edge.char_at(host, off))
    }

    /// Descends from the root matching `q` (a fragment of `qhost`) edge by
    /// edge. Returns the reached position and the matched length.
    pub fn walk(
        &self,
        host: &[u8],
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> (NodeRef, usize) {
        let mut cur: NodeId = 0;
        let mut l = 0usize;
        loop {
            if l == q.len() {
                return (NodeRef::explicit(cur), l);
            }
            let c = q.char_at(qhost, l);
            let Some(child) = self.nodes[cur as usize].children.get(c) else {
                return (NodeRef::explicit(cur), l);
            };
            let edge = &self.nodes[child as usize].edge;
            let rest = q.tail(l);
            let el = frag_lcp(edge, host, &rest, qhost, oracle);
            l += el;
            if el < edge.len() {
                return (
                    NodeRef {
                        node: child,
                        above: (edge.len() - el) as u32,
                    },
                    l,
                );
            }
            cur = child;
        }
    }

    /// Longest common prefix of `q` with the fragments below position
    /// `start`, both taken relative to the string depth of `start`. Returns
    /// the end position, the matched length, and the index of a witness
    /// terminal realising it.
    ///
    /// Implemented as a binary search over the terminal interval below
    /// `start` (terminals are sorted, so the best match is adjacent to the
    /// insertion point of `q`), followed by a weighted-ancestor lookup.
    pub fn longest_prefix_from(
        &self,
        host: &[u8],
        start: NodeRef,
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> (NodeRef, usize, usize) {
        let (out, _) = self.longest_prefix_from_counted(host, start, q, qhost, oracle);
        out
    }

    /// As [`CompactTrie::longest_prefix_from`], also reporting the number of
    /// terminal comparisons made by the binary search.
    pub fn longest_prefix_from_counted(
        &self,
        host: &[u8],
        start: NodeRef,
        q: &Frag,
        qhost: &[u8],
        oracle: &impl PlainLcp,
    ) -> ((NodeRef, usize, usize), u32) {
        let d = self.ref_depth(start);
        let range = self.term_range(start);
        debug_assert!(!range.is_empty(), "every trie position has terminals below");
        let mut probes = 0u32;
        let ins = self.terms[range.clone()].partition_point(|t| {
            probes += 1;
            let tail = t.frag.tail(d);
            frag_cmp(&tail, host, q, qhost, oracle).1 == Ordering::Less
        }) + range.start;
        let mut best = (0usize, range.start);
        for cand in [ins.wrapping_sub(1), ins] {
            if cand < range.start || cand >= range.end {
                continue;
            }
            let tail = self.terms[cand].frag.tail(d);
            let l = frag_lcp(&tail, host, q, qhost, oracle);
            if l >= best.0 {
                best = (l, cand);
            }
        }
        let (l, wit) = best;
        let pos = self.weighted_ancestor(self.terms[wit].node, d + l);
        ((pos, l, wit), probes)
    }
}

/// Builds the suffix trie (compact, so: suffix tree without terminator
/// symbols) of `text`; terminal labels are suffix start positions.
pub fn suffix_trie(text: &[u8], oracle: &impl PlainLcp) -> CompactTrie {
    let n = text.len();
    let terms = (0..n).map(|i| (Frag::suffix_of(i, n), i as u32)).collect();
    CompactTrie::build(text, terms, oracle)
}

/// Lifts matching statistics — `(depth, witness text position)` per pattern
/// suffix, as produced by [`crate::lce::matching_statistics`] — onto the
/// suffix trie: each entry becomes the trie position where the pattern suffix
/// diverges, found by a weighted-ancestor lookup on the witness's terminal.
pub fn locate_matching_statistics(
    trie: &CompactTrie,
    stats: &[(usize, usize)],
) -> Vec<(usize, NodeRef)> {
    let mut node_of_label = vec![NIL; trie.num_terms()];
    for t in &trie.terms {
        node_of_label[t.label as usize] = t.node;
    }
    stats
        .iter()
        .map(|&(depth, witness)| {
            if depth == 0 {
                (0, NodeRef::explicit(0))
            } else {
                (depth, trie.weighted_ancestor(node_of_label[witness], depth))
            }
        })
        .collect()
}
