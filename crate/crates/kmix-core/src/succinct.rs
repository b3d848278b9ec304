//! Rank/select dictionaries, orthogonal range reporting, interval stabbing.
//!
//! These are the query-side workhorses behind the compact index variants:
//! increasing sequences with membership rank, plain bit vectors with
//! rank/select directories, a static merge tree for 2D range reporting, and
//! interval stabbing by reduction to a two-sided range query.

use std::collections::HashMap;

/// A strictly increasing sequence over `[1..r]` with O(1) membership rank and
/// select. Rank is *restricted*: it answers only for values present in the
/// sequence (the callers never need general predecessor rank).
#[derive(Clone, Debug, Default)]
pub struct IncreasingSeq {
    values: Vec<u64>,
    rank_of: HashMap<u64, u32>,
    r: u64,
}

impl IncreasingSeq {
    /// `values` must be strictly increasing and within `[1..=r]`.
    pub fn new(values: Vec<u64>, r: u64) -> Self {
        assert!(
            values.windows(2).all(|w| w[0] < w[1]),
            "sequence must be strictly increasing"
        );
        if let (Some(&first), Some(&last)) = (values.first(), values.last()) {
            assert!(first >= 1 && last <= r, "values must lie in [1..=r]");
        }
        let rank_of = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32 + 1))
            .collect();
        IncreasingSeq { values, rank_of, r }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn universe(&self) -> u64 {
        self.r
    }

    /// Index `i` (1-based) with `a_i = x`, or `None` when `x` is absent.
    pub fn rank(&self, x: u64) -> Option<u32> {
        self.rank_of.get(&x).copied()
    }

    /// `a_i` for 1-based `i`; `i` must be within `[1..=len]`.
    pub fn select(&self, i: u32) -> u64 {
        assert!(i >= 1 && i as usize <= self.values.len(), "select out of range");
        self.values[i as usize - 1]
    }

    /// Approximate heap footprint in bits (reported, not asserted — the
    /// HashMap dominates and has no tight closed form).
    pub fn space_bits(&self) -> usize {
        self.values.len() * 64 + self.rank_of.capacity() * (64 + 32) + 64
    }
}

/// A collection of increasing sequences over a shared universe, each
/// individually queryable; the aggregate space is reported for observability.
#[derive(Clone, Debug, Default)]
pub struct IncreasingSeqStore {
    seqs: Vec<IncreasingSeq>,
}

impl IncreasingSeqStore {
    pub fn new(seqs: Vec<IncreasingSeq>) -> Self {
        IncreasingSeqStore { seqs }
    }

    pub fn seq(&self, i: usize) -> &IncreasingSeq {
        &self.seqs[i]
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn space_bits(&self) -> usize {
        self.seqs.iter().map(|s| s.space_bits()).sum()
    }
}

/// Bit vector with O(1) rank and O(log) select via a block directory.
#[derive(Clone, Debug)]
pub struct BitVecRS {
    words: Vec<u64>,
    len: usize,
    /// Ones before each word.
    word_ranks: Vec<u32>,
}

impl BitVecRS {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words, bits.len())
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut word_ranks = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u32;
        for &w in &words {
            word_ranks.push(acc);
            acc += w.count_ones();
        }
        word_ranks.push(acc);
        BitVecRS { words, len, word_ranks }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        *self.word_ranks.last().unwrap() as usize
    }

    /// Ones among the first `x` bits (prefix `[0..x)`).
    pub fn rank1(&self, x: usize) -> usize {
        debug_assert!(x <= self.len);
        let w = x / 64;
        let head = self.word_ranks[w] as usize;
        let tail = if x % 64 == 0 {
            0
        } else {
            (self.words[w] & ((1u64 << (x % 64)) - 1)).count_ones() as usize
        };
        head + tail
    }

    /// Zeros among the first `x` bits.
    pub fn rank0(&self, x: usize) -> usize {
        x - self.rank1(x)
    }

    /// Position (0-based) of the `i`-th one, 1-based `i`.
    pub fn select1(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.count_ones(), "select1 out of range");
        let w = self.word_ranks.partition_point(|&r| (r as usize) < i) - 1;
        let mut need = i - self.word_ranks[w] as usize;
        let mut word = self.words[w];
        let mut bit = 0;
        loop {
            if word & 1 == 1 {
                need -= 1;
                if need == 0 {
                    return w * 64 + bit;
                }
            }
            word >>= 1;
            bit += 1;
        }
    }

    /// Position (0-based) of the `i`-th zero, 1-based `i`.
    pub fn select0(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.len - self.count_ones(), "select0 out of range");
        // Binary search on rank0, which is monotone.
        let mut lo = 0usize;
        let mut hi = self.len;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.rank0(mid + 1) < i {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Static orthogonal range reporting over integer points with payloads:
/// points sorted by x, with a merge tree over y for the second dimension.
#[derive(Clone, Debug)]
pub struct RangeReport2D<P> {
    /// Points sorted by (x, y), payload carried alongside.
    points: Vec<(u64, u64, P)>,
    /// Merge tree: level 0 holds singleton y-values in x-order; each higher
    /// level merges pairs. Stored flat per level, with node boundaries
    /// implicit from the level's block size.
    levels: Vec<Vec<u64>>,
}

impl<P: Clone> RangeReport2D<P> {
    pub fn new(mut points: Vec<(u64, u64, P)>) -> Self {
        points.sort_by_key(|&(x, y, _)| (x, y));
        let n = points.len();
        let mut levels: Vec<Vec<u64>> = Vec::new();
        if n > 0 {
            levels.push(points.iter().map(|&(_, y, _)| y).collect());
            let mut block = 1usize;
            while block < n {
                let prev = levels.last().unwrap();
                let mut next = Vec::with_capacity(n);
                let mut i = 0;
                while i < n {
                    let mid = (i + block).min(n);
                    let end = (i + 2 * block).min(n);
                    let (a, b) = (&prev[i..mid], &prev[mid..end]);
                    let mut merged = Vec::with_capacity(end - i);
                    let (mut p, mut q) = (0, 0);
                    while p < a.len() && q < b.len() {
                        if a[p] <= b[q] {
                            merged.push(a[p]);
                            p += 1;
                        } else {
                            merged.push(b[q]);
                            q += 1;
                        }
                    }
                    merged.extend_from_slice(&a[p..]);
                    merged.extend_from_slice(&b[q..]);
                    next.extend(merged);
                    i = end;
                }
                levels.push(next);
                block *= 2;
            }
        }
        RangeReport2D { points, levels }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Payloads of all points with `x1 <= x <= x2` and `y1 <= y <= y2`.
    /// Inverted rectangles report nothing.
    pub fn query(&self, x1: u64, x2: u64, y1: u64, y2: u64) -> Vec<P> {
        let mut out = Vec::new();
        self.query_with(x1, x2, y1, y2, |p| out.push(p.clone()));
        out
    }

    /// Visitor-style query; avoids allocation when the caller aggregates.
    pub fn query_with(&self, x1: u64, x2: u64, y1: u64, y2: u64, mut visit: impl FnMut(&P)) {
        if x1 > x2 || y1 > y2 || self.points.is_empty() {
            return;
        }
        let lo = self.points.partition_point(|&(x, _, _)| x < x1);
        let hi = self.points.partition_point(|&(x, _, _)| x <= x2);
        // The x-range [lo..hi) decomposes into O(log n) aligned blocks; the
        // count of y-hits per block comes from the sorted level arrays, and
        // reporting scans only the matching points. The scan cost is charged
        // to output, so the whole query is O(log^2 n + t).
        self.report_blocks(lo, hi, y1, y2, &mut visit);
    }

    fn report_blocks(&self, lo: usize, hi: usize, y1: u64, y2: u64, visit: &mut impl FnMut(&P)) {
        let mut i = lo;
        while i < hi {
            // Largest aligned block starting at i that fits in [lo..hi).
            let max_level = i.trailing_zeros().min(usize::BITS - 1) as usize;
            let mut level = max_level.min(self.levels.len() - 1);
            while (1usize << level) > hi - i {
                level -= 1;
            }
            let block = 1usize << level;
            let seg = &self.levels[level][i..(i + block).min(self.levels[level].len())];
            let a = seg.partition_point(|&y| y < y1);
            let b = seg.partition_point(|&y| y <= y2);
            if b > a {
                // Report by scanning the block's points (cost charged to
                // output only when hits exist; blocks without hits cost the
                // two binary searches above).
                for (_, y, p) in &self.points[i..i + seg.len()] {
                    if (y1..=y2).contains(y) {
                        visit(p);
                    }
                }
            }
            i += block;
        }
    }

    /// Number of points in the rectangle without materializing payloads.
    pub fn count(&self, x1: u64, x2: u64, y1: u64, y2: u64) -> usize {
        if x1 > x2 || y1 > y2 || self.points.is_empty() {
            return 0;
        }
        let lo = self.points.partition_point(|&(x, _, _)| x < x1);
        let hi = self.points.partition_point(|&(x, _, _)| x <= x2);
        let mut total = 0usize;
        let mut i = lo;
        while i < hi {
            let max_level = i.trailing_zeros().min(usize::BITS - 1) as usize;
            let mut level = max_level.min(self.levels.len() - 1);
            while (1usize << level) > hi - i {
                level -= 1;
            }
            let block = 1usize << level;
            let seg = &self.levels[level][i..(i + block).min(self.levels[level].len())];
            let a = seg.partition_point(|&y| y < y1);
            let b = seg.partition_point(|&y| y <= y2);
            total += b - a;
            i += block;
        }
        total
    }
}

/// Interval stabbing: an interval `[l..=r]` is stored as the point `(l, r)`,
/// and a stab at `a` is the two-sided query `l <= a` and `r >= a`.
#[derive(Clone, Debug)]
pub struct StabStruct<P> {
    inner: RangeReport2D<P>,
}

impl<P: Clone> StabStruct<P> {
    pub fn new(intervals: Vec<(u64, u64, P)>) -> Self {
        for &(l, r, _) in &intervals {
            assert!(l <= r, "interval bounds must satisfy l <= r");
        }
        StabStruct {
            inner: RangeReport2D::new(intervals),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    /// Payloads of all intervals containing `a`.
    pub fn stab(&self, a: u64) -> Vec<P> {
        self.inner.query(0, a, a, u64::MAX)
    }

    pub fn stab_with(&self, a: u64, visit: impl FnMut(&P)) {
        self.inner.query_with(0, a, a, u64::MAX, visit)
    }
}
