//! Building a queryable index from a container, and the per-query dispatch
//! used by `--index auto`.

use crate::container::{ContainerError, IndexContainer, IndexKind, Params};
use crate::params::{auto_params, AutoParams};
use kmix_core::compact::{
    build_compact_mismatch, build_wildcard_index_with, CompactIndex, WildcardIndex,
};
use kmix_core::errata::ErrataTree;
use kmix_core::kangaroo::SelfLcp;
use kmix_core::lce::LceIndex;
use kmix_core::long::LongIndex;
use kmix_core::short::ShortIndex;
use kmix_core::text::Frag;

pub enum AnyIndex {
    Errata { tree: ErrataTree, k: usize },
    Compact(CompactIndex),
    Short(ShortIndex),
    Long(LongIndex),
    Wild(WildcardIndex),
    Auto {
        compact: CompactIndex,
        short: Option<ShortIndex>,
        long: Option<LongIndex>,
        mu: usize,
        gamma: usize,
        k: usize,
    },
}

fn distinct_bytes(text: &[u8]) -> usize {
    let mut seen = [false; 256];
    for &b in text {
        seen[b as usize] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

/// Fills in the parameter block for a build request: derives μ/h/γ when not
/// given, records τ and σ.
pub fn resolve_params(
    kind: IndexKind,
    text: &[u8],
    k: usize,
    mu: Option<usize>,
    h: Option<usize>,
    gamma: Option<usize>,
    wildcard: u8,
) -> Result<Params, String> {
    let n = text.len();
    let sigma = distinct_bytes(text);
    let auto = auto_params(n, k, sigma);
    let (amu, ah, agamma) = match auto {
        AutoParams::Split { mu, h, gamma } => (mu, h, gamma),
        AutoParams::CompactOnly => (0, 0, 0),
    };
    let mut p = Params {
        k: k as u32,
        sigma: sigma as u32,
        wildcard,
        ..Default::default()
    };
    match kind {
        IndexKind::Errata | IndexKind::Compact | IndexKind::Wild => {}
        IndexKind::Short => {
            let mu = mu.unwrap_or(if amu > 0 { amu.min(n) } else { n.min(64) });
            let h = h.unwrap_or(if ah > 0 { ah } else { 1.min(k.saturating_sub(1)) });
            if h >= k && k > 0 {
                return Err(format!("h must be below k (got h={h}, k={k})"));
            }
            p.mu = mu as u32;
            p.h = h as u32;
        }
        IndexKind::Long => {
            let gamma = gamma.unwrap_or(if agamma > 0 { agamma } else { 2 });
            let max = n / (k + 1);
            if gamma < 2 || gamma > max {
                return Err(format!("gamma must lie in [2..{max}] (got {gamma})"));
            }
            p.gamma = gamma as u32;
            p.tau = (gamma / 3) as u32;
        }
        IndexKind::Auto => {
            if let AutoParams::Split { mu, h, gamma } = auto {
                let max = n / (k + 1);
                if mu <= n && gamma >= 2 && gamma <= max {
                    p.mu = mu as u32;
                    p.h = h as u32;
                    p.gamma = gamma as u32;
                    p.tau = (gamma / 3) as u32;
                }
                // Otherwise the text is too small for a split; the compact
                // index alone serves every query (μ, γ stay zero).
            }
        }
    }
    Ok(p)
}

impl AnyIndex {
    pub fn build(c: &IndexContainer) -> Result<AnyIndex, ContainerError> {
        let text = c.text()?;
        let k = c.params.k as usize;
        Ok(match c.kind {
            IndexKind::Errata => {
                let lce = LceIndex::new(text);
                let oracle = SelfLcp::new(&lce);
                let positions: Vec<usize> = (0..text.len()).collect();
                AnyIndex::Errata {
                    tree: ErrataTree::build(text, &positions, k, &oracle),
                    k,
                }
            }
            IndexKind::Compact => AnyIndex::Compact(build_compact_mismatch(text, k)),
            IndexKind::Short => AnyIndex::Short({
                let lce = LceIndex::new(text);
                let oracle = SelfLcp::new(&lce);
                ShortIndex::build(
                    text,
                    c.params.mu as usize,
                    c.params.h as usize,
                    k,
                    false,
                    &oracle,
                )
            }),
            IndexKind::Long => {
                AnyIndex::Long(LongIndex::build(text, c.params.gamma as usize, k))
            }
            IndexKind::Wild => {
                AnyIndex::Wild(build_wildcard_index_with(text, k, c.params.wildcard))
            }
            IndexKind::Auto => {
                let compact = build_compact_mismatch(text, k);
                let (mu, h, gamma) =
                    (c.params.mu as usize, c.params.h as usize, c.params.gamma as usize);
                let (short, long) = if mu > 0 && gamma >= 2 {
                    let lce = LceIndex::new(text);
                    let oracle = SelfLcp::new(&lce);
                    (
                        Some(ShortIndex::build(text, mu, h, k, false, &oracle)),
                        Some(LongIndex::build(text, gamma, k)),
                    )
                } else {
                    (None, None)
                };
                AnyIndex::Auto { compact, short, long, mu, gamma, k }
            }
        })
    }

    /// All occurrence starts for `pattern`, ascending. Errors on patterns
    /// outside the kind's supported length range.
    pub fn query(&self, text: &[u8], pattern: &[u8]) -> Result<Vec<u32>, String> {
        let (n, m) = (text.len(), pattern.len());
        if m == 0 {
            // The empty pattern occurs before every position and at the end.
            return Ok((0..=n as u32).collect());
        }
        if m > n {
            return Ok(Vec::new());
        }
        match self {
            AnyIndex::Errata { tree, k } => Ok(full_errata_query(tree, text, pattern, *k)),
            AnyIndex::Compact(idx) => Ok(idx.query(text, pattern)),
            AnyIndex::Wild(idx) => Ok(idx.query(text, pattern)),
            AnyIndex::Short(idx) => {
                if m > idx.mu {
                    return Err(format!(
                        "pattern length {m} exceeds the short index threshold μ={}",
                        idx.mu
                    ));
                }
                Ok(short_query(idx, text, pattern))
            }
            AnyIndex::Long(idx) => {
                let min = (idx.k + 1) * idx.gamma;
                if m < min {
                    return Err(format!(
                        "pattern length {m} is below the long index minimum (k+1)γ={min}"
                    ));
                }
                Ok(idx.query(text, pattern))
            }
            AnyIndex::Auto { compact, short, long, mu, gamma, k } => {
                if let Some(s) = short {
                    if m <= *mu {
                        return Ok(short_query(s, text, pattern));
                    }
                }
                if let Some(l) = long {
                    if m >= (*k + 1) * *gamma {
                        return Ok(l.query(text, pattern));
                    }
                }
                Ok(compact.query(text, pattern))
            }
        }
    }

    /// Structure statistics as a JSON value.
    pub fn stats(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            AnyIndex::Errata { tree, k } => json!({
                "kind": "errata",
                "k": k,
                "tries": tree.tries.len(),
                "level_sizes": tree.level_sizes(),
                "terminals": tree.tries.iter().map(|t| t.trie.terms.len()).sum::<usize>(),
            }),
            AnyIndex::Compact(idx) => json!({
                "kind": "compact",
                "k": idx.k,
                "tries": idx.tree.tries.len(),
                "level_sizes": idx.tree.level_sizes(),
                "terminals": idx.tree.tries.iter().map(|t| t.trie.terms.len()).sum::<usize>(),
                "deep_store_tries": idx.stores.len(),
                "st_rank_bits": idx.st_rank_bits,
                "iseq_bits": idx.stores.values().map(|d| {
                    d.node.nodes.values()
                        .flat_map(|e| e.modified_rank.iter().map(|s| s.space_bits()))
                        .sum::<usize>()
                }).sum::<usize>(),
            }),
            AnyIndex::Short(idx) => json!({
                "kind": "short",
                "k": idx.k,
                "mu": idx.mu,
                "h": idx.h,
                "suffix_terminals": idx.t00.terms.len(),
                "grouped_tries": idx.grouped.len(),
            }),
            AnyIndex::Long(idx) => json!({
                "kind": "long",
                "k": idx.k,
                "gamma": idx.gamma,
                "tau": idx.tau,
                "a1_size": idx.anchors.a1.anchors.len(),
                "a2_size": idx.anchors.a2.len(),
                "tau_runs": idx.anchors.runs.len(),
            }),
            AnyIndex::Wild(idx) => json!({
                "kind": "wild",
                "k": idx.k,
                "tries": idx.tries.len(),
                "terminals": idx.tries.iter().map(|t| t.trie.terms.len()).sum::<usize>(),
                "st_rank_bits": idx.st_rank_bits,
            }),
            AnyIndex::Auto { compact, short, long, mu, gamma, k } => json!({
                "kind": "auto",
                "k": k,
                "mu": mu,
                "gamma": gamma,
                "compact": AnyIndex::stats_of_compact(compact),
                "has_short": short.is_some(),
                "has_long": long.is_some(),
            }),
        }
    }

    fn stats_of_compact(idx: &CompactIndex) -> serde_json::Value {
        serde_json::json!({
            "tries": idx.tree.tries.len(),
            "st_rank_bits": idx.st_rank_bits,
        })
    }
}

/// Full k-errata query against a standalone pattern.
pub fn full_errata_query(tree: &ErrataTree, text: &[u8], pattern: &[u8], k: usize) -> Vec<u32> {
    let (n, m) = (text.len(), pattern.len());
    let mut host = text.to_vec();
    host.extend_from_slice(pattern);
    let lce = LceIndex::new(&host);
    let oracle = SelfLcp::new(&lce);
    let q = Frag::plain(n, m);
    let hits = tree.query(&host, &q, &host, k, &oracle);
    let mut out = tree.labels(&hits);
    out.sort_unstable();
    out.dedup();
    out.retain(|&p| p as usize + m <= n);
    out
}

/// Short-index query against a standalone pattern.
pub fn short_query(idx: &ShortIndex, text: &[u8], pattern: &[u8]) -> Vec<u32> {
    let (n, m) = (text.len(), pattern.len());
    let mut host = text.to_vec();
    host.extend_from_slice(pattern);
    let lce = LceIndex::new(&host);
    let oracle = SelfLcp::new(&lce);
    let q = Frag::plain(n, m);
    let mut out = idx.query(&host[..n], &q, &host, idx.k, &oracle);
    out.sort_unstable();
    out.dedup();
    out.retain(|&p| p as usize + m <= n);
    out
}
