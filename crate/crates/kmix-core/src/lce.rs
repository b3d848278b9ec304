//! Suffix arrays and constant-time longest common extensions.
//!
//! [`LceIndex`] bundles a suffix array, its inverse, the LCP array and a
//! sparse-table range minimum structure, giving O(1) longest common extension
//! queries between any two suffixes of a fixed text. Every kangaroo-style
//! fragment comparison in the library bottoms out here.

/// Suffix array of `text` by prefix doubling, O(n log^2 n).
pub fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = text.iter().map(|&c| c as u32).collect();
    let mut tmp = vec![0u32; n];
    let mut len = 1usize;
    while len < n {
        let key = |i: u32| -> (u32, u32) {
            let j = i as usize + len;
            (rank[i as usize], if j < n { rank[j] + 1 } else { 0 })
        };
        sa.sort_unstable_by_key(|&i| key(i));
        let mut r = 0u32;
        for w in 0..n {
            if w > 0 && key(sa[w - 1]) != key(sa[w]) {
                r += 1;
            }
            tmp[sa[w] as usize] = r;
        }
        rank.copy_from_slice(&tmp);
        if r as usize == n - 1 {
            break;
        }
        len *= 2;
    }
    sa
}

/// LCP array by Kasai's algorithm: `lcp[i]` = LCP of `sa[i]` and `sa[i+1]`.
fn lcp_array(text: &[u8], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    let mut lcp = vec![0u32; n.saturating_sub(1)];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r + 1 == n {
            h = 0;
            continue;
        }
        let j = sa[r + 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Sparse table for range minimum queries over a fixed array.
#[derive(Clone, Debug)]
pub struct SparseRmq {
    rows: Vec<Vec<u32>>,
}

impl SparseRmq {
    pub fn new(values: &[u32]) -> Self {
        let n = values.len();
        let mut rows = vec![values.to_vec()];
        let mut len = 1usize;
        while 2 * len <= n {
            let prev = rows.last().unwrap();
            let row: Vec<u32> =
                (0..=n - 2 * len).map(|i| prev[i].min(prev[i + len])).collect();
            rows.push(row);
            len *= 2;
        }
        SparseRmq { rows }
    }

    /// Minimum over `values[lo..hi)`; `lo < hi` required.
    pub fn min(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo < hi);
        let level = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let len = 1usize << level;
        self.rows[level][lo].min(self.rows[level][hi - len])
    }
}

/// Suffix array with O(1) longest common extension queries.
#[derive(Clone, Debug)]
pub struct LceIndex {
    pub sa: Vec<u32>,
    pub rank: Vec<u32>,
    pub lcp: Vec<u32>,
    rmq: Option<SparseRmq>,
    n: usize,
}

impl LceIndex {
    pub fn new(text: &[u8]) -> Self {
        let n = text.len();
        let sa = suffix_array(text);
        let mut rank = vec![0u32; n];
        for (r, &i) in sa.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        let lcp = lcp_array(text, &sa, &rank);
        let rmq = if lcp.is_empty() { None } else { Some(SparseRmq::new(&lcp)) };
        LceIndex { sa, rank, lcp, rmq, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Length of the longest common prefix of `text[i..]` and `text[j..]`.
    pub fn lce(&self, i: usize, j: usize) -> usize {
        if i == j {
            return self.n - i;
        }
        if i >= self.n || j >= self.n {
            return 0;
        }
        let (a, b) = {
            let (ra, rb) = (self.rank[i] as usize, self.rank[j] as usize);
            if ra < rb { (ra, rb) } else { (rb, ra) }
        };
        self.rmq.as_ref().expect("n >= 2").min(a, b) as usize
    }
}

/// Suffix automaton of a text, used to stream matching statistics for a
/// pattern in time linear in the pattern length via suffix-link walking.
#[derive(Clone, Debug)]
pub struct SuffixAutomaton {
    link: Vec<i32>,
    len: Vec<u32>,
    /// End position (index of last character) of the first occurrence of the
    /// longest string of each state.
    first_end: Vec<u32>,
    trans: Vec<Vec<(u8, u32)>>,
    last: usize,
}

impl SuffixAutomaton {
    pub fn new(text: &[u8]) -> Self {
        let mut sam = SuffixAutomaton {
            link: vec![-1],
            len: vec![0],
            first_end: vec![0],
            trans: vec![Vec::new()],
            last: 0,
        };
        for (i, &c) in text.iter().enumerate() {
            sam.extend(c, i);
        }
        sam
    }

    fn get(&self, v: usize, c: u8) -> Option<u32> {
        self.trans[v]
            .binary_search_by_key(&c, |&(b, _)| b)
            .ok()
            .map(|i| self.trans[v][i].1)
    }

    fn set(&mut self, v: usize, c: u8, to: u32) {
        match self.trans[v].binary_search_by_key(&c, |&(b, _)| b) {
            Ok(i) => self.trans[v][i].1 = to,
            Err(i) => self.trans[v].insert(i, (c, to)),
        }
    }

    fn add_state(&mut self, link: i32, len: u32, first_end: u32, trans: Vec<(u8, u32)>) -> usize {
        self.link.push(link);
        self.len.push(len);
        self.first_end.push(first_end);
        self.trans.push(trans);
        self.link.len() - 1
    }

    fn extend(&mut self, c: u8, pos: usize) {
        let cur = self.add_state(0, self.len[self.last] + 1, pos as u32, Vec::new());
        let mut p = self.last as i32;
        while p >= 0 && self.get(p as usize, c).is_none() {
            self.set(p as usize, c, cur as u32);
            p = self.link[p as usize];
        }
        if p >= 0 {
            let q = self.get(p as usize, c).unwrap() as usize;
            if self.len[p as usize] + 1 == self.len[q] {
                self.link[cur] = q as i32;
            } else {
                let clone = self.add_state(
                    self.link[q],
                    self.len[p as usize] + 1,
                    self.first_end[q],
                    self.trans[q].clone(),
                );
                let mut pp = p;
                while pp >= 0 && self.get(pp as usize, c) == Some(q as u32) {
                    self.set(pp as usize, c, clone as u32);
                    pp = self.link[pp as usize];
                }
                self.link[q] = clone as i32;
                self.link[cur] = clone as i32;
            }
        }
        self.last = cur;
    }

    /// Longest match ending at every pattern position (inclusive), with the
    /// automaton state reached there. One suffix-link walk over the pattern.
    fn end_matches(&self, pattern: &[u8]) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(pattern.len());
        let mut state = 0usize;
        let mut l = 0usize;
        for &c in pattern {
            loop {
                if let Some(next) = self.get(state, c) {
                    state = next as usize;
                    l += 1;
                    break;
                }
                if self.link[state] < 0 {
                    l = 0;
                    break;
                }
                state = self.link[state] as usize;
                l = self.len[state] as usize;
            }
            out.push((l, state));
        }
        out
    }
}

/// Matching statistics of `pattern` against a text of length `n`, given the
/// suffix automaton of the *reversed* text.
///
/// Returns, for each start `i`, the length of the longest prefix of
/// `pattern[i..]` occurring in the text and the start of one such occurrence
/// (0 for empty matches). A prefix match of `pattern[i..]` is a suffix match
/// of the reversed pattern ending at mirrored position, which the automaton
/// reports directly.
pub fn matching_statistics(
    rev_sam: &SuffixAutomaton,
    n: usize,
    pattern: &[u8],
) -> Vec<(usize, usize)> {
    let m = pattern.len();
    let rev_pattern: Vec<u8> = pattern.iter().rev().copied().collect();
    let ends = rev_sam.end_matches(&rev_pattern);
    let mut out = vec![(0usize, 0usize); m];
    for i in 0..m {
        let (l, state) = ends[m - 1 - i];
        if l == 0 {
            continue;
        }
        // The reversed occurrence ends at some position e in the reversed
        // text; shift from the state's first end to the match of length l.
        let e_rev = rev_sam.first_end[state] as usize;
        let witness = n - 1 - e_rev;
        debug_assert!(witness + l <= n);
        out[i] = (l, witness);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_lce(text: &[u8], i: usize, j: usize) -> usize {
        text[i..].iter().zip(text[j..].iter()).take_while(|(a, b)| a == b).count()
    }

    #[test]
    fn suffix_array_small() {
        let t = b"banana";
        assert_eq!(suffix_array(t), vec![5, 3, 1, 0, 4, 2]);
    }

    #[test]
    fn lce_matches_naive() {
        let t = b"abracadabraabracadabra";
        let idx = LceIndex::new(t);
        for i in 0..t.len() {
            for j in 0..t.len() {
                assert_eq!(idx.lce(i, j), naive_lce(t, i, j), "lce({i},{j})");
            }
        }
    }

    fn naive_ms(text: &[u8], pattern: &[u8]) -> Vec<usize> {
        (0..pattern.len())
            .map(|i| {
                (0..=text.len())
                    .map(|s| naive_lce2(text, s, pattern, i))
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    fn naive_lce2(a: &[u8], i: usize, b: &[u8], j: usize) -> usize {
        a[i..].iter().zip(b[j..].iter()).take_while(|(x, y)| x == y).count()
    }

    #[test]
    fn matching_statistics_match_naive() {
        let texts: [&[u8]; 3] = [b"abracadabra", b"aaaaabaaaab", b"abcabcabcx"];
        let pats: [&[u8]; 4] = [b"cadab", b"aaab", b"xyz", b"abcabx"];
        for t in texts {
            let rev: Vec<u8> = t.iter().rev().copied().collect();
            let sam = SuffixAutomaton::new(&rev);
            for p in pats {
                let ms = matching_statistics(&sam, t.len(), p);
                let expect = naive_ms(t, p);
                for i in 0..p.len() {
                    assert_eq!(ms[i].0, expect[i], "text {t:?} pat {p:?} i={i}");
                    if ms[i].0 > 0 {
                        let w = ms[i].1;
                        assert_eq!(
                            &t[w..w + ms[i].0],
                            &p[i..i + ms[i].0],
                            "witness mismatch text {t:?} pat {p:?} i={i}"
                        );
                    }
                }
            }
        }
    }
}
