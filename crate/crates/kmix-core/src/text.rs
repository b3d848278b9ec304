//! Byte texts and modified fragments.
//!
//! The whole library works over byte strings. Internally, characters live in a
//! slightly widened domain [`Sym`] so that the out-of-band wildcard marker
//! [`PSI`] can appear on trie edges without colliding with any real byte.
//!
//! A [`Frag`] is a substring of a host text together with a small set of
//! single-character substitutions. Fragments are the universal currency of the
//! index structures: suffixes, modified suffixes and trie edge labels are all
//! fragments, and they can be sliced and compared without materializing the
//! underlying characters.

use smallvec::SmallVec;

/// Widened character domain: every byte 0..=255 plus the wildcard marker.
pub type Sym = u16;

/// Out-of-band wildcard character used on the first edge of merged
/// substitution subtrees. It is larger than every real byte, so it sorts
/// after them.
pub const PSI: Sym = 256;

/// A single-character substitution inside a fragment, at a given offset from
/// the fragment start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sub {
    /// Offset from the start of the fragment.
    pub off: u32,
    /// Replacement character (possibly [`PSI`]).
    pub ch: Sym,
}

/// Inline storage for substitutions. Most fragments carry zero or one
/// substitution; indexes with mismatch budget `k` never place more than `k`.
pub type SubList = SmallVec<[Sub; 1]>;

/// A substring `host[start .. start + len)` with a sorted list of
/// substitutions applied on top of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frag {
    pub start: u32,
    pub len: u32,
    /// Substitutions sorted by offset, each offset `< len`, all distinct.
    pub subs: SubList,
}

impl Frag {
    /// Plain fragment without substitutions.
    pub fn plain(start: usize, len: usize) -> Self {
        Frag { start: start as u32, len: len as u32, subs: SubList::new() }
    }

    /// Full suffix `host[start..)` of a host of length `n`.
    pub fn suffix_of(start: usize, n: usize) -> Self {
        debug_assert!(start <= n);
        Frag::plain(start, n - start)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds a substitution, keeping offsets sorted. Replaces any existing
    /// substitution at the same offset.
    pub fn substitute(&mut self, off: usize, ch: Sym) {
        debug_assert!(off < self.len());
        let off = off as u32;
        match self.subs.binary_search_by_key(&off, |s| s.off) {
            Ok(i) => self.subs[i].ch = ch,
            Err(i) => self.subs.insert(i, Sub { off, ch }),
        }
    }

    /// Returns a copy with one extra substitution.
    pub fn with_sub(&self, off: usize, ch: Sym) -> Self {
        let mut f = self.clone();
        f.substitute(off, ch);
        f
    }

    /// Character at offset `i`, honouring substitutions.
    pub fn char_at(&self, host: &[u8], i: usize) -> Sym {
        debug_assert!(i < self.len());
        match self.subs.binary_search_by_key(&(i as u32), |s| s.off) {
            Ok(j) => self.subs[j].ch,
            Err(_) => host[self.start as usize + i] as Sym,
        }
    }

    /// Sub-fragment `self[from .. from + len)`.
    pub fn slice(&self, from: usize, len: usize) -> Self {
        debug_assert!(from + len <= self.len());
        let subs = self
            .subs
            .iter()
            .filter(|s| (s.off as usize) >= from && (s.off as usize) < from + len)
            .map(|s| Sub { off: s.off - from as u32, ch: s.ch })
            .collect();
        Frag { start: self.start + from as u32, len: len as u32, subs }
    }

    /// Suffix of the fragment starting at offset `from`.
    pub fn tail(&self, from: usize) -> Self {
        self.slice(from, self.len() - from)
    }

    /// Prefix of the fragment of length `len`.
    pub fn head(&self, len: usize) -> Self {
        self.slice(0, len)
    }

    /// Offset of the first substitution at offset `>= from`, if any.
    pub fn next_sub(&self, from: usize) -> Option<usize> {
        let i = match self.subs.binary_search_by_key(&(from as u32), |s| s.off) {
            Ok(i) => i,
            Err(i) => i,
        };
        self.subs.get(i).map(|s| s.off as usize)
    }

    /// Materializes the fragment into the widened character domain.
    pub fn syms(&self, host: &[u8]) -> Vec<Sym> {
        (0..self.len()).map(|i| self.char_at(host, i)).collect()
    }

    /// Materializes the fragment as bytes. Panics if it contains [`PSI`].
    pub fn bytes(&self, host: &[u8]) -> Vec<u8> {
        self.syms(host)
            .into_iter()
            .map(|c| u8::try_from(c).expect("wildcard marker in materialized fragment"))
            .collect()
    }
}
