//! Text indexing for approximate pattern matching.
//!
//! `kmix-core` builds indexes over a byte text `T` that report all positions
//! where a query pattern `P` occurs with at most `k` mismatches (Hamming
//! distance), or where a pattern containing up to `k` wildcard characters
//! occurs exactly. Three complementary index families cover different pattern
//! length regimes:
//!
//! * [`short`] — indexes of modified suffixes for patterns of length at most
//!   a build-time threshold `mu`;
//! * [`long`] — anchor-based indexes for long patterns, combining string
//!   synchronizing sets, misperiod anchors and a near-periodic phase;
//! * [`compact`] — a space-reduced mismatch/wildcard index that keeps an
//!   explicit `(k-1)`-level structure plus succinct per-node stores.
//!
//! The shared machinery lives in [`trie`] (compact tries with heavy-path
//! decomposition and tree LCP queries), [`errata`] (substitution trees and
//! group trees), [`kangaroo`] (fragment comparisons), [`succinct`] (rank /
//! select / range reporting) and [`strings`] (runs, periods, misperiods).
//! Brute-force reference implementations used by the differential test
//! suites are in [`oracle`].

pub mod canonical;
pub mod compact;
pub mod kangaroo;
pub mod lce;
pub mod long;
pub mod modlcp;
pub mod short;
pub mod errata;
pub mod strings;
pub mod succinct;
pub mod text;
pub mod trie;
