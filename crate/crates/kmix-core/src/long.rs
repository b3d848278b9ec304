//! Mismatch index for long patterns (length at least (k+1)·γ).
//!
//! A sparse set of text positions is designated as anchors: A1 is a
//! τ-synchronizing set (τ = ⌊γ/3⌋), A2 collects misperiods around τ-runs. A
//! query derives matching anchor candidates B1/B2 inside the pattern; every
//! k-mismatch occurrence either aligns a pattern anchor with a text anchor,
//! or is nearly periodic and found by a run-based interval-stabbing index.
//!
//! Anchored occurrences are assembled from two budgeted errata trees — one
//! over anchor suffixes, one over reversed anchor prefixes — joined by 2D
//! range reporting on pairs that meet at the same anchor.

use crate::errata::ErrataTree;
use crate::kangaroo::{PlainLcp, SelfLcp};
use crate::lce::LceIndex;
use crate::strings::{compute_runs, lyndon_root, misper, smallest_period, tau_runs, Run};
use crate::succinct::{RangeReport2D, StabStruct};
use crate::text::Frag;
use crate::trie::{suffix_trie, CompactTrie};
use std::cmp::Ordering;
use std::collections::HashMap;

/// A τ-synchronizing set: anchor positions chosen consistently from local
/// 2τ-windows, dense outside stretches of period at most τ/3.
pub struct SyncSet {
    pub tau: usize,
    /// Sorted anchor positions, a subset of [0..n−2τ].
    pub anchors: Vec<usize>,
    /// Smallest anchor at or after each position; `n` when none exists.
    pub next_anchor: Vec<usize>,
}

/// Minimizer construction: rank every length-τ window (windows over a
/// stretch of period ≤ τ/3 get rank +∞) and keep `i` iff the minimum rank
/// over [i..i+τ] is finite and attained at `i` or `i+τ`. Both defining
/// conditions are re-verified directly on the result.
pub fn build_sync_set(text: &[u8], tau: usize) -> SyncSet {
    let n = text.len();
    assert!(tau >= 1 && 2 * tau <= n, "τ must satisfy 1 ≤ τ ≤ n/2");
    let lce = LceIndex::new(text);
    let windows = n - tau + 1;
    let mut order: Vec<usize> = (0..windows).collect();
    order.sort_by(|&a, &b| {
        let l = lce.lce(a, b).min(tau);
        if l == tau {
            Ordering::Equal
        } else {
            text[a + l].cmp(&text[b + l])
        }
    });
    let mut phi = vec![u64::MAX; windows];
    let mut rank = 0u64;
    for (idx, &i) in order.iter().enumerate() {
        if idx > 0 && lce.lce(order[idx - 1], i) < tau {
            rank = idx as u64;
        }
        phi[i] = rank;
    }
    for (i, f) in phi.iter_mut().enumerate() {
        if 3 * smallest_period(&text[i..i + tau]) <= tau {
            *f = u64::MAX;
        }
    }
    let mut anchors = Vec::new();
    for i in 0..=n - 2 * tau {
        let mn = *phi[i..=i + tau].iter().min().unwrap();
        if mn < u64::MAX && (phi[i] == mn || phi[i + tau] == mn) {
            anchors.push(i);
        }
    }

    // Self-check: consistency (membership is a function of the 2τ-window)
    // and density (anchor-free stretches are exactly the periodic ones).
    let member: Vec<bool> = {
        let mut m = vec![false; n];
        for &a in &anchors {
            m[a] = true;
        }
        m
    };
    let mut by_window: HashMap<&[u8], bool> = HashMap::new();
    for i in 0..=n - 2 * tau {
        let w = &text[i..i + 2 * tau];
        let e = by_window.entry(w).or_insert(member[i]);
        assert_eq!(*e, member[i], "synchronizing-set consistency violated");
    }
    if n + 1 >= 3 * tau {
        for i in 0..=n + 1 - 3 * tau {
            let free = !member[i..(i + tau).min(n)].iter().any(|&b| b);
            let periodic = 3 * smallest_period(&text[i..i + 3 * tau - 1]) <= tau;
            assert_eq!(free, periodic, "synchronizing-set density violated at {i}");
        }
    }

    let mut next_anchor = vec![n; n + 1];
    for &a in anchors.iter().rev() {
        next_anchor[a] = a;
    }
    for i in (0..n).rev() {
        next_anchor[i] = next_anchor[i].min(next_anchor[i + 1]);
    }
    SyncSet { tau, anchors, next_anchor }
}

/// Text-side anchors: A1 from the synchronizing set, A2 from misperiods of
/// τ-runs (up to k+1 per side and run).
pub struct AnchorSets {
    pub gamma: usize,
    pub tau: usize,
    pub a1: SyncSet,
    pub a2: Vec<usize>,
    pub runs: Vec<Run>,
}

pub fn build_anchors(text: &[u8], gamma: usize, k: usize) -> AnchorSets {
    let n = text.len();
    assert!(
        gamma >= 2 && gamma <= n / (k + 1),
        "γ must lie in [2..⌊n/(k+1)⌋]"
    );
    let tau = gamma / 3;
    assert!(3 * tau <= gamma + 2);
    if tau == 0 {
        // γ = 2 leaves no room for synchronizing windows; both anchor sets
        // degenerate and only the short/compact indexes serve such scales.
        return AnchorSets {
            gamma,
            tau,
            a1: SyncSet { tau, anchors: Vec::new(), next_anchor: vec![n; n + 1] },
            a2: Vec::new(),
            runs: Vec::new(),
        };
    }
    let a1 = build_sync_set(text, tau);
    let rev: Vec<u8> = text.iter().rev().copied().collect();
    let lce = LceIndex::new(text);
    let rev_lce = LceIndex::new(&rev);
    let runs = tau_runs(&compute_runs(text, &lce, &rev_lce), tau);
    let mut a2 = Vec::new();
    for r in &runs {
        let (left, right) = misper(text, r.start, r.start + r.period, k + 1);
        a2.extend(left);
        a2.extend(right);
    }
    a2.sort_unstable();
    a2.dedup();
    AnchorSets { gamma, tau, a1, a2, runs }
}

/// Forward/reverse errata trees over one anchor set, with the per-budget
/// terminal-label concatenations and the 2D join structures.
struct DirErrata {
    forward: ErrataTree,
    reverse: ErrataTree,
    /// Per k1 ∈ [0..k]: offset of each trie's terminal block inside the
    /// concatenated label sequence over tries at levels ≤ k1.
    off_fwd: Vec<Vec<Option<usize>>>,
    off_rev: Vec<Vec<Option<usize>>>,
    /// Per k1: points (x, y) with s_fwd[k1][x] = n − s_rev[k−k1][y], carrying
    /// the anchor value as payload.
    join: Vec<RangeReport2D<u32>>,
}

fn label_concat(tree: &ErrataTree, max_level: usize) -> (Vec<u32>, Vec<Option<usize>>) {
    let mut s = Vec::new();
    let mut off = vec![None; tree.tries.len()];
    for (tid, et) in tree.tries.iter().enumerate() {
        if et.level <= max_level {
            off[tid] = Some(s.len());
            s.extend(et.trie.terms.iter().map(|t| t.label));
        }
    }
    (s, off)
}

impl DirErrata {
    fn build(
        text: &[u8],
        rev_text: &[u8],
        positions: &[usize],
        k: usize,
        oracle: &impl PlainLcp,
        rev_oracle: &impl PlainLcp,
    ) -> Self {
        let n = text.len();
        let forward = ErrataTree::build(text, positions, k, oracle);
        let rev_positions: Vec<usize> = positions.iter().map(|&a| n - a).collect();
        let reverse = ErrataTree::build(rev_text, &rev_positions, k, rev_oracle);
        let mut s_fwd = Vec::new();
        let mut off_fwd = Vec::new();
        let mut s_rev = Vec::new();
        let mut off_rev = Vec::new();
        for k1 in 0..=k {
            let (s, o) = label_concat(&forward, k1);
            s_fwd.push(s);
            off_fwd.push(o);
            let (s, o) = label_concat(&reverse, k1);
            s_rev.push(s);
            off_rev.push(o);
        }
        let mut join = Vec::new();
        for k1 in 0..=k {
            let k2 = k - k1;
            let mut ys: HashMap<u32, Vec<u64>> = HashMap::new();
            for (y, &label) in s_rev[k2].iter().enumerate() {
                ys.entry(n as u32 - label).or_default().push(y as u64);
            }
            let mut points = Vec::new();
            for (x, &a) in s_fwd[k1].iter().enumerate() {
                if let Some(list) = ys.get(&a) {
                    for &y in list {
                        points.push((x as u64, y, a));
                    }
                }
            }
            join.push(RangeReport2D::new(points));
        }
        DirErrata { forward, reverse, off_fwd, off_rev, join }
    }
}

/// Payload of a near-periodic interval: the j-range [alpha..beta] (stride =
/// root length) and the closed range [a2..b2] constraining j+m−1.
#[derive(Clone, Copy, Debug)]
pub struct NearInterval {
    pub alpha: i64,
    pub beta: i64,
    pub a2: i64,
    pub b2: i64,
}

/// Run-based index for nearly periodic occurrences: a trie of Lyndon roots
/// of τ-runs, with interval-stabbing structures keyed by (misperiod count,
/// phase remainder).
pub struct NearPeriodicIndex {
    pub tau: usize,
    pub gamma: usize,
    pub k: usize,
    roots: Option<CompactTrie>,
    stabs: HashMap<(u32, usize, usize), StabStruct<NearInterval>>,
}

impl NearPeriodicIndex {
    pub fn build(text: &[u8], runs: &[Run], gamma: usize, tau: usize, k: usize) -> Self {
        let n = text.len() as i64;
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let mut root_ids: HashMap<&[u8], u32> = HashMap::new();
        let mut root_terms: Vec<(Frag, u32)> = Vec::new();
        let mut pending: HashMap<(u32, usize, usize), Vec<(u64, u64, NearInterval)>> =
            HashMap::new();
        for run in runs {
            let p = run.period;
            let d = run.start + run.root_off;
            let rid = *root_ids.entry(&text[d..d + p]).or_insert_with(|| {
                let id = root_terms.len() as u32;
                root_terms.push((Frag::plain(d, p), id));
                id
            });
            let (left, right) = misper(text, run.start, run.start + p, k + 1);
            let mut l: Vec<i64> = left.iter().map(|&x| x as i64).collect();
            if l.len() <= k {
                l.push(-1);
            }
            let mut r: Vec<i64> = right.iter().map(|&x| x as i64).collect();
            if r.len() <= k {
                r.push(n);
            }
            let step = p as i64;
            for t in 0..p {
                let res = ((d as i64 - t as i64) % step + step) % step;
                // First j above `lo_excl` and last j at most `hi_incl` that
                // are congruent to `res` modulo the period.
                let bracket = |lo_excl: i64, hi_incl: i64| -> Option<(i64, i64)> {
                    let lo = lo_excl + 1;
                    let alpha = lo + ((res - lo) % step + step) % step;
                    let beta = hi_incl - (((hi_incl - res) % step + step) % step);
                    (alpha <= beta).then_some((alpha, beta))
                };
                // Occurrences confined to the clean periodic zone.
                if let Some((alpha, beta)) = bracket(l[0], r[0] - 1) {
                    pending.entry((rid, 0, t)).or_default().push((
                        0,
                        (r[0] - alpha).max(0) as u64,
                        NearInterval { alpha, beta, a2: l[0], b2: r[0] - 1 },
                    ));
                }
                // Occurrences covering the leftmost `a` and rightmost-known
                // `b` misperiods of the run, with a+b ≤ k. The a = 0 family
                // (start inside the clean zone, defects only to the right)
                // uses the first right misperiod as the start bracket.
                for a in 0..l.len() {
                    for b in 0..r.len() {
                        if a + b > k || (a == 0 && b == 0) {
                            continue;
                        }
                        let (jlo, jhi) = if a == 0 { (l[0], r[0]) } else { (l[a], l[a - 1]) };
                        let Some((alpha, beta)) = bracket(jlo, jhi) else {
                            continue;
                        };
                        let rb = if b == 0 { l[0] } else { r[b - 1] };
                        let rb1 = r[b];
                        let (ilo, ihi) = (rb - beta + 1, rb1 - alpha);
                        if ihi < 1 {
                            continue;
                        }
                        pending.entry((rid, a + b, t)).or_default().push((
                            ilo.max(0) as u64,
                            ihi as u64,
                            NearInterval { alpha, beta, a2: rb, b2: rb1 - 1 },
                        ));
                    }
                }
            }
        }
        let roots = (!root_terms.is_empty()).then(|| CompactTrie::build(text, root_terms, &oracle));
        let stabs = pending
            .into_iter()
            .map(|(key, ivs)| (key, StabStruct::new(ivs)))
            .collect();
        NearPeriodicIndex { tau, gamma, k, roots, stabs }
    }

    /// Nearly periodic phase of a query. The pattern occupies
    /// `host[n..n+m)`; `suffix` is the suffix trie of the text, used for the
    /// block-substring check. Results may repeat and are not sorted.
    pub fn query(
        &self,
        text: &[u8],
        suffix: &CompactTrie,
        host: &[u8],
        m: usize,
        oracle: &impl PlainLcp,
    ) -> Vec<u32> {
        let n = text.len();
        let (gamma, tau, k) = (self.gamma, self.tau, self.k);
        assert!(m >= (k + 1) * gamma, "pattern too short for the long index");
        let Some(roots) = &self.roots else {
            return Vec::new();
        };
        let pattern = &host[n..n + m];
        let mut out = Vec::new();
        for i in 0..=k {
            let bs = i * gamma;
            let block = &pattern[bs..bs + gamma];
            let p = smallest_period(block);
            if 3 * p > tau {
                continue;
            }
            let q = Frag::plain(n + bs, gamma);
            let (_, l) = suffix.walk(host, &q, host, oracle);
            if l < gamma {
                continue; // block does not occur in the text
            }
            let (xl, xr) = misper(pattern, bs, bs + p, k + 1);
            let x_count = xl.len() + xr.len();
            if x_count > k {
                continue;
            }
            let d = bs + lyndon_root(&block[..p]);
            let rq = Frag::plain(n + d, p);
            let (pos, rl) = roots.walk(host, &rq, host, oracle);
            if rl < p {
                continue;
            }
            let Some(rid) = roots
                .term_range(pos)
                .map(|ti| &roots.terms[ti])
                .find(|term| roots.node(term.node).depth as usize == p)
                .map(|term| term.label)
            else {
                continue;
            };
            for h in 0..=(k - x_count) {
                let Some(st) = self.stabs.get(&(rid, h, d % p)) else {
                    continue;
                };
                for iv in st.stab(m as u64) {
                    let lo = iv.alpha.max(iv.a2 + 1 - m as i64);
                    let hi = iv.beta.min(iv.b2 + 1 - m as i64);
                    let step = p as i64;
                    let mut j = iv.alpha + ((lo - iv.alpha + step - 1).div_euclid(step)) * step;
                    while j <= hi {
                        if j >= 0 && j as usize + m <= n {
                            debug_assert!(
                                crate::strings::hamming(
                                    &text[j as usize..j as usize + m],
                                    pattern
                                ) <= k,
                                "near-periodic phase reported a spurious position"
                            );
                            out.push(j as u32);
                        }
                        j += step;
                    }
                }
            }
        }
        out
    }
}

pub struct LongIndex {
    pub n: usize,
    pub gamma: usize,
    pub tau: usize,
    pub k: usize,
    pub rev_text: Vec<u8>,
    pub anchors: AnchorSets,
    pub t_suffix: CompactTrie,
    dir: [Option<DirErrata>; 2],
    pub near: NearPeriodicIndex,
}

/// Pattern-side anchors B1 (synchronizing fragments inside exact blocks)
/// and B2 (misperiods of highly periodic blocks).
pub struct PatternAnchors {
    pub b1: Vec<usize>,
    pub b2: Vec<usize>,
}

impl LongIndex {
    pub fn build(text: &[u8], gamma: usize, k: usize) -> Self {
        let n = text.len();
        let anchors = build_anchors(text, gamma, k);
        let tau = anchors.tau;
        let rev_text: Vec<u8> = text.iter().rev().copied().collect();
        let lce = LceIndex::new(text);
        let oracle = SelfLcp::new(&lce);
        let rev_lce = LceIndex::new(&rev_text);
        let rev_oracle = SelfLcp::new(&rev_lce);
        let t_suffix = suffix_trie(text, &oracle);
        let mk = |positions: &[usize]| {
            (!positions.is_empty())
                .then(|| DirErrata::build(text, &rev_text, positions, k, &oracle, &rev_oracle))
        };
        let dir = [mk(&anchors.a1.anchors), mk(&anchors.a2)];
        let near = NearPeriodicIndex::build(text, &anchors.runs, gamma, tau, k);
        LongIndex { n, gamma, tau, k, rev_text, anchors, t_suffix, dir, near }
    }

    /// Computes B1 and B2 for the pattern at `host[n..n+m)`.
    pub fn pattern_anchors(
        &self,
        host: &[u8],
        m: usize,
        oracle: &impl PlainLcp,
    ) -> PatternAnchors {
        let (n, gamma, tau, k) = (self.n, self.gamma, self.tau, self.k);
        assert!(m >= (k + 1) * gamma, "pattern too short for the long index");
        let pattern = &host[n..n + m];
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        for i in 0..=k {
            let bs = i * gamma;
            let q = Frag::plain(n + bs, gamma);
            let (pos, l) = self.t_suffix.walk(host, &q, host, oracle);
            if l < gamma {
                continue; // block absent from the text
            }
            if gamma >= 2 * tau && tau >= 1 {
                let range = self.t_suffix.term_range(pos);
                let ell = self.t_suffix.terms[range.start].label as usize;
                let a = self.anchors.a1.next_anchor[ell];
                if a < n && a - ell < gamma - 2 * tau {
                    b1.push(a - ell + bs);
                }
            }
            let p = smallest_period(&pattern[bs..bs + gamma]);
            if tau >= 1 && 3 * p <= tau {
                let (left, right) = misper(pattern, bs, bs + p, k + 1);
                b2.extend(left);
                b2.extend(right);
            }
        }
        b2.sort_unstable();
        b2.dedup();
        assert!(b1.len() <= k + 1);
        assert!(b2.len() <= 2 * (k + 1) * (k + 1));
        PatternAnchors { b1, b2 }
    }

    /// All k-mismatch occurrence starts of `pattern`, sorted and unique.
    pub fn query(&self, text: &[u8], pattern: &[u8]) -> Vec<u32> {
        self.query_counted(text, pattern).0
    }

    /// As [`Self::query`], additionally returning the largest pre-dedup
    /// multiplicity of any single occurrence.
    pub fn query_counted(&self, text: &[u8], pattern: &[u8]) -> (Vec<u32>, usize) {
        let (n, m, k) = (self.n, pattern.len(), self.k);
        assert!(m >= (k + 1) * self.gamma, "pattern too short for the long index");
        let mut host = text.to_vec();
        host.extend_from_slice(pattern);
        let lce = LceIndex::new(&host);
        let oracle = SelfLcp::new(&lce);
        let mut rev_host = self.rev_text.clone();
        rev_host.extend(pattern.iter().rev());
        let rev_lce = LceIndex::new(&rev_host);
        let rev_oracle = SelfLcp::new(&rev_lce);

        let pa = self.pattern_anchors(&host, m, &oracle);
        let mut raw: Vec<u32> = Vec::new();
        for (t, bs) in [(0, &pa.b1), (1, &pa.b2)] {
            let Some(de) = &self.dir[t] else {
                continue;
            };
            for &b in bs {
                let qf = Frag::plain(n + b, m - b);
                let qr = Frag::plain(n + m - b, b);
                for k1 in 0..=k {
                    let k2 = k - k1;
                    let fhits = de.forward.query(&host, &qf, &host, k1, &oracle);
                    let rhits = de.reverse.query(&rev_host, &qr, &rev_host, k2, &rev_oracle);
                    for hf in &fhits {
                        let ft = &de.forward.tries[hf.trie as usize].trie;
                        let fr = ft.term_range(hf.pos);
                        if fr.is_empty() {
                            continue;
                        }
                        let fo = de.off_fwd[k1][hf.trie as usize].unwrap();
                        let (x1, x2) = ((fo + fr.start) as u64, (fo + fr.end - 1) as u64);
                        for hr in &rhits {
                            let rt = &de.reverse.tries[hr.trie as usize].trie;
                            let rr = rt.term_range(hr.pos);
                            if rr.is_empty() {
                                continue;
                            }
                            let ro = de.off_rev[k2][hr.trie as usize].unwrap();
                            let (y1, y2) = ((ro + rr.start) as u64, (ro + rr.end - 1) as u64);
                            de.join[k1].query_with(x1, x2, y1, y2, |&a| {
                                raw.push(a - b as u32);
                            });
                        }
                    }
                }
            }
        }
        raw.extend(self.near.query(text, &self.t_suffix, &host, m, &oracle));
        raw.sort_unstable();
        let mut max_mult = 0;
        let mut i = 0;
        while i < raw.len() {
            let j = raw[i..].iter().take_while(|&&v| v == raw[i]).count();
            max_mult = max_mult.max(j);
            i += j;
        }
        raw.dedup();
        (raw, max_mult)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(text: &[u8], q: &[u8], k: usize) -> Vec<u32> {
        if q.len() > text.len() {
            return Vec::new();
        }
        (0..=text.len() - q.len())
            .filter(|&p| crate::strings::hamming(&text[p..p + q.len()], q) <= k)
            .map(|p| p as u32)
            .collect()
    }

    /// Definitional check: is T[j..j+m) a k-nearly periodic occurrence?
    fn is_nearly_periodic(
        text: &[u8],
        pattern: &[u8],
        j: usize,
        gamma: usize,
        tau: usize,
        k: usize,
    ) -> bool {
        let m = pattern.len();
        let w = &text[j..j + m];
        if crate::strings::hamming(w, pattern) > k {
            return false;
        }
        for i in 0..=k {
            let bs = i * gamma;
            let p = smallest_period(&pattern[bs..bs + gamma]);
            if 3 * p > tau {
                continue;
            }
            if pattern[bs..bs + gamma] != w[bs..bs + gamma] {
                continue;
            }
            let (pl, pr) = misper(pattern, bs, bs + p, m);
            let (wl, wr) = misper(w, bs, bs + p, m);
            if crate::strings::hamming(w, pattern) == pl.len() + pr.len() + wl.len() + wr.len() {
                return true;
            }
        }
        false
    }

    #[test]
    fn unary_text_has_no_synchronizing_positions() {
        let text = vec![b'a'; 20];
        let s = build_sync_set(&text, 3);
        assert!(s.anchors.is_empty());
    }

    #[test]
    fn distinct_bytes_synchronize_everywhere() {
        let text: Vec<u8> = (0..26).map(|i| b'a' + i).collect();
        let tau = 2;
        let s = build_sync_set(&text, tau);
        let n = text.len();
        for i in 0..=n + 1 - 3 * tau {
            assert!(
                s.anchors.iter().any(|&a| a >= i && a < i + tau),
                "window at {i} lacks an anchor"
            );
        }
    }

    #[test]
    fn sync_conditions_hold_on_random_texts() {
        // The build itself asserts consistency and density; exercise it.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..1000 {
            let tau = rng.gen_range(1..=6usize);
            let n = rng.gen_range(2 * tau..500.max(2 * tau + 1));
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
            build_sync_set(&text, tau);
        }
    }

    #[test]
    fn unary_text_has_empty_anchor_sets() {
        let text = vec![b'a'; 64];
        let a = build_anchors(&text, 9, 1);
        assert!(a.a1.anchors.is_empty());
        assert!(a.a2.is_empty());
    }

    #[test]
    fn anchor_densities_are_bounded_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let n = 4096;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..4u8)).collect();
        let (gamma, k) = (32usize, 2usize);
        let a = build_anchors(&text, gamma, k);
        let c1 = a.a1.anchors.len() as f64 / (n as f64 / gamma as f64);
        let c2 = a.a2.len() as f64 / (n as f64 * k as f64 / gamma as f64);
        println!("|A1|/(n/γ) = {c1:.2}, |A2|/(nk/γ) = {c2:.2}");
        assert!(c1 > 0.0 && c1 < 64.0);
        assert!(c2 < 64.0);
    }

    #[test]
    fn misperiod_between_two_runs_is_an_anchor() {
        let m = 12;
        let mut text = b"ab".repeat(m);
        text.push(b'c');
        text.extend(b"ab".repeat(m));
        let a = build_anchors(&text, 18, 1);
        assert!(a.a2.contains(&(2 * m)), "A2 = {:?}", a.a2);
    }

    fn query_host(text: &[u8], pattern: &[u8]) -> (Vec<u8>, LceIndex) {
        let mut host = text.to_vec();
        host.extend_from_slice(pattern);
        let lce = LceIndex::new(&host);
        (host, lce)
    }

    #[test]
    fn verbatim_pattern_in_aperiodic_text_yields_b1() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let n = 400;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..10u8)).collect();
        let (gamma, k) = (9usize, 1usize);
        let idx = LongIndex::build(&text, gamma, k);
        let m = (k + 1) * gamma;
        let pattern = text[100..100 + m].to_vec();
        let (host, lce) = query_host(&text, &pattern);
        let oracle = SelfLcp::new(&lce);
        let pa = idx.pattern_anchors(&host, m, &oracle);
        assert!(!pa.b1.is_empty());
    }

    #[test]
    fn disjoint_alphabet_pattern_has_no_anchors() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let n = 300;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..4u8)).collect();
        let (gamma, k) = (8usize, 1usize);
        let idx = LongIndex::build(&text, gamma, k);
        let m = (k + 1) * gamma + 4;
        let pattern = vec![b'z'; m];
        let (host, lce) = query_host(&text, &pattern);
        let oracle = SelfLcp::new(&lce);
        let pa = idx.pattern_anchors(&host, m, &oracle);
        assert!(pa.b1.is_empty());
        assert!(pa.b2.is_empty());
        assert!(idx.query(&text, &pattern).is_empty());
    }

    #[test]
    fn long_query_matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for &(sigma, k) in &[(2u8, 1usize), (4, 1), (2, 2), (4, 2)] {
            let n = 2000;
            let gamma = 8usize;
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let idx = LongIndex::build(&text, gamma, k);
            let mut worst_mult = 0usize;
            let rounds = 75;
            for round in 0..rounds + 25 {
                let m = rng.gen_range((k + 1) * gamma..(k + 1) * gamma + 30);
                let pattern: Vec<u8> = if round < rounds {
                    let s = rng.gen_range(0..n - m + 1);
                    let mut p = text[s..s + m].to_vec();
                    for _ in 0..rng.gen_range(0..=k) {
                        let at = rng.gen_range(0..m);
                        p[at] = b'a' + rng.gen_range(0..sigma);
                    }
                    p
                } else {
                    (0..m).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
                };
                let want = naive(&text, &pattern, k);
                let (got, mult) = idx.query_counted(&text, &pattern);
                assert_eq!(got, want, "σ={sigma} k={k} round={round}");
                worst_mult = worst_mult.max(mult);

                // Anchored coverage: occurrences that are not nearly
                // periodic start at a difference of matching anchors.
                let (host, lce) = query_host(&text, &pattern);
                let oracle = SelfLcp::new(&lce);
                let pa = idx.pattern_anchors(&host, m, &oracle);
                for &j in &want {
                    let j = j as usize;
                    if is_nearly_periodic(&text, &pattern, j, gamma, idx.tau, k) {
                        continue;
                    }
                    let covered = pa
                        .b1
                        .iter()
                        .any(|&b| idx.anchors.a1.anchors.binary_search(&(j + b)).is_ok())
                        || pa.b2.iter().any(|&b| idx.anchors.a2.binary_search(&(j + b)).is_ok());
                    assert!(covered, "occurrence {j} escapes the anchor cover");
                }
            }
            let bound = (k + 1) * (k + 1) * (k + 1);
            println!("k={k} σ={sigma}: worst multiplicity {worst_mult}, (k+1)³ = {bound}");
            assert!(worst_mult <= 8 * bound);
        }
    }

    #[test]
    fn periodic_text_is_served_by_the_near_periodic_phase() {
        let text = b"ab".repeat(512);
        let (gamma, k) = (18usize, 2usize);
        let idx = LongIndex::build(&text, gamma, k);
        // Both anchor sets are empty: the text is one clean run.
        assert!(idx.anchors.a1.anchors.is_empty());
        assert!(idx.anchors.a2.is_empty());
        let mut pattern = b"ab".repeat(40);
        pattern[37] = b'a';
        let want = naive(&text, &pattern, k);
        assert!(!want.is_empty());
        assert_eq!(idx.query(&text, &pattern), want);
    }

    #[test]
    fn defective_periodic_texts_match_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for round in 0..8 {
            // A long period-2 backbone with sprinkled defects: runs with
            // real misperiods on both sides.
            let n = 700;
            let mut text: Vec<u8> = (0..n).map(|i| b"ab"[i % 2]).collect();
            for _ in 0..rng.gen_range(3..10) {
                let at = rng.gen_range(0..n);
                text[at] = b'a' + rng.gen_range(0..2u8);
            }
            let (gamma, k) = (18usize, 2usize);
            let idx = LongIndex::build(&text, gamma, k);
            for _ in 0..40 {
                let m = rng.gen_range((k + 1) * gamma..(k + 1) * gamma + 20);
                let s = rng.gen_range(0..n - m + 1);
                let mut pattern = text[s..s + m].to_vec();
                for _ in 0..rng.gen_range(0..=k) {
                    let at = rng.gen_range(0..m);
                    pattern[at] = b'a' + rng.gen_range(0..2u8);
                }
                let want = naive(&text, &pattern, k);
                assert_eq!(idx.query(&text, &pattern), want, "round {round}");

                // Near-periodic completeness: definitionally nearly periodic
                // occurrences are found by that phase alone.
                let (host, lce) = query_host(&text, &pattern);
                let oracle = SelfLcp::new(&lce);
                let mut near = idx.near.query(&text, &idx.t_suffix, &host, m, &oracle);
                near.sort_unstable();
                near.dedup();
                for &j in &want {
                    if is_nearly_periodic(&text, &pattern, j as usize, gamma, idx.tau, k) {
                        assert!(near.binary_search(&j).is_ok(), "near phase missed {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn aperiodic_blocks_leave_the_near_phase_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let n = 600;
        let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..6u8)).collect();
        let (gamma, k) = (18usize, 1usize);
        let idx = LongIndex::build(&text, gamma, k);
        let m = (k + 1) * gamma;
        let pattern: Vec<u8> = (0..m).map(|_| b'a' + rng.gen_range(0..6u8)).collect();
        let (host, lce) = query_host(&text, &pattern);
        let oracle = SelfLcp::new(&lce);
        assert!(idx.near.query(&text, &idx.t_suffix, &host, m, &oracle).is_empty());
    }

    #[test]
    #[should_panic(expected = "γ must lie in")]
    fn gamma_out_of_range_is_rejected() {
        let text = vec![b'a'; 40];
        build_anchors(&text, 30, 1);
    }

    #[test]
    #[should_panic(expected = "pattern too short")]
    fn short_pattern_is_rejected() {
        let text: Vec<u8> = (0..200).map(|i| b'a' + (i % 7) as u8).collect();
        let idx = LongIndex::build(&text, 9, 1);
        idx.query(&text, b"abcabc");
    }
}
