//! Acceptance suite: every index kind against brute-force oracles on a
//! randomized corpus matrix, plus structural predicates (synchronizing sets,
//! anchor coverage, tiling, space scaling) and the container round-trip.
//! Each criterion prints exactly one pass/fail line.

use std::collections::{HashMap, HashSet};

use kmix_harness::container::{IndexContainer, IndexKind};
use kmix_harness::index::{full_errata_query, resolve_params, AnyIndex};
use kmix_harness::oracle::{brute_kmismatch, brute_wildcard, classify_nearly_periodic};
use kmix_core::compact::{build_compact_mismatch, build_wildcard_index, WILDCARD};
use kmix_core::errata::ErrataTree;
use kmix_core::kangaroo::{frag_lcp, SelfLcp};
use kmix_core::lce::LceIndex;
use kmix_core::long::{build_sync_set, LongIndex};
use kmix_core::short::{f_pow2, f_sequence, query_short_basic, ShortIndex};
use kmix_core::strings::smallest_period;
use kmix_core::succinct::{BitVecRS, IncreasingSeq, RangeReport2D, StabStruct};
use kmix_core::text::{Frag, Sym, PSI};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(num: usize, desc: &str, violations: usize) {
    let status = if violations == 0 { "pass" } else { "fail" };
    println!("criterion {num} ({desc}): {status}");
    assert_eq!(violations, 0, "criterion {num} had {violations} violations");
}

fn rand_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Vec<u8> {
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// A pattern of length ≤ `max_m`: usually a text window with up to k+1
/// planted substitutions, sometimes uniform noise.
fn sample_pattern(rng: &mut ChaCha8Rng, text: &[u8], sigma: u8, k: usize, max_m: usize) -> Vec<u8> {
    let n = text.len();
    let m = rng.gen_range(1..=max_m.min(n));
    let mut pat = if rng.gen_bool(0.75) {
        let s = rng.gen_range(0..=n - m);
        text[s..s + m].to_vec()
    } else {
        rand_text(rng, m, sigma)
    };
    for _ in 0..rng.gen_range(0..=k + 1) {
        let p = rng.gen_range(0..m);
        pat[p] = b'a' + rng.gen_range(0..sigma);
    }
    pat
}

#[test]
fn criterion_01_errata_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut bad = 0;
    for &n in &[100usize, 500, 2000] {
        for &sigma in &[2u8, 4, 16] {
            let text = rand_text(&mut rng, n, sigma);
            let lce = LceIndex::new(&text);
            let oracle = SelfLcp::new(&lce);
            let positions: Vec<usize> = (0..n).collect();
            for k in 1..=3 {
                let tree = ErrataTree::build(&text, &positions, k, &oracle);
                for _ in 0..200 {
                    let pat = sample_pattern(&mut rng, &text, sigma, k, 48);
                    if full_errata_query(&tree, &text, &pat, k) != brute_kmismatch(&text, &pat, k)
                    {
                        bad += 1;
                    }
                }
            }
        }
    }
    verdict(1, "errata tree equals the brute-force k-mismatch scan", bad);
}

#[test]
fn criterion_02_compact_oracle_and_errata_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut bad = 0;
    for &n in &[100usize, 500, 2000] {
        for &sigma in &[2u8, 4, 16, 64] {
            let text = rand_text(&mut rng, n, sigma);
            let lce = LceIndex::new(&text);
            let oracle = SelfLcp::new(&lce);
            let positions: Vec<usize> = (0..n).collect();
            for k in 1..=3 {
                let compact = build_compact_mismatch(&text, k);
                let tree = ErrataTree::build(&text, &positions, k, &oracle);
                for _ in 0..200 {
                    let pat = sample_pattern(&mut rng, &text, sigma, k, 48);
                    let got = compact.query(&text, &pat);
                    if got != brute_kmismatch(&text, &pat, k)
                        || got != full_errata_query(&tree, &text, &pat, k)
                    {
                        bad += 1;
                    }
                }
            }
        }
    }
    verdict(2, "compact index equals brute force and the errata tree", bad);
}

#[test]
fn criterion_03_wildcard_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut bad = 0;
    for &n in &[100usize, 500, 2000] {
        for &sigma in &[2u8, 4, 16] {
            let text = rand_text(&mut rng, n, sigma);
            for k in 1..=3 {
                let idx = build_wildcard_index(&text, k);
                for _ in 0..200 {
                    let mut pat = sample_pattern(&mut rng, &text, sigma, 0, 48);
                    let m = pat.len();
                    for _ in 0..rng.gen_range(0..=k) {
                        pat[rng.gen_range(0..m)] = WILDCARD;
                    }
                    if idx.query(&text, &pat) != brute_wildcard(&text, &pat, WILDCARD) {
                        bad += 1;
                    }
                }
            }
        }
    }
    verdict(3, "wildcard index equals the brute-force wildcard scan", bad);
}

#[test]
fn criterion_04_short_index_equivalence_and_multiplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut bad = 0;
    for &(mu, h, k, n, sigma) in &[
        (16usize, 1usize, 2usize, 300usize, 4u8),
        (64, 1, 2, 200, 3),
        (16, 2, 3, 260, 2),
        (64, 2, 3, 120, 2),
    ] {
        let text = rand_text(&mut rng, n, sigma);
        let lce = LceIndex::new(&text);
        let oracle = SelfLcp::new(&lce);
        let idx = ShortIndex::build(&text, mu, h, k, true, &oracle);
        for m in 1..=mu {
            for _ in 0..2 {
                let mut pat = {
                    let s = rng.gen_range(0..=n - m);
                    text[s..s + m].to_vec()
                };
                for _ in 0..rng.gen_range(0..=k) {
                    pat[rng.gen_range(0..m)] = b'a' + rng.gen_range(0..sigma);
                }
                let mut host = text.clone();
                host.extend_from_slice(&pat);
                let hlce = LceIndex::new(&host);
                let horacle = SelfLcp::new(&hlce);
                let q = Frag::plain(n, m);
                let mut raw = idx.query(&text, &q, &host, k, &horacle);
                raw.sort_unstable();
                // Exactly-once: the raw report stream never repeats a start.
                if raw.windows(2).any(|w| w[0] == w[1]) {
                    bad += 1;
                }
                let mut basic = query_short_basic(&idx, &text, &q, &host, k, &horacle);
                basic.sort_unstable();
                basic.dedup();
                let want = brute_kmismatch(&text, &pat, k);
                if raw != want || basic != want {
                    bad += 1;
                }
            }
        }
    }
    verdict(4, "short index equals its basic form and brute force, exactly once", bad);
}

fn long_corpus(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<u8>> {
    let mut texts = vec![rand_text(rng, n, 2), rand_text(rng, n, 4)];
    // A nearly periodic text: long period-2 stretches with sparse mutations.
    let mut periodic: Vec<u8> = (0..n).map(|i| b'a' + (i % 2) as u8).collect();
    for _ in 0..n / 60 {
        let p = rng.gen_range(0..n);
        periodic[p] = b'a' + rng.gen_range(0..3);
    }
    texts.push(periodic);
    texts
}

fn long_pattern(rng: &mut ChaCha8Rng, text: &[u8], k: usize, min_m: usize) -> Vec<u8> {
    let n = text.len();
    let m = rng.gen_range(min_m..=(min_m * 2).min(n));
    if rng.gen_bool(0.85) {
        let s = rng.gen_range(0..=n - m);
        let mut pat = text[s..s + m].to_vec();
        for _ in 0..rng.gen_range(0..=k) {
            pat[rng.gen_range(0..m)] = b'a' + rng.gen_range(0..4);
        }
        pat
    } else {
        rand_text(rng, m, 4)
    }
}

#[test]
fn criterion_05_long_index_equivalence_and_multiplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut bad = 0;
    let mut max_mult = 0usize;
    for &gamma in &[8usize, 16] {
        for k in 1..=2 {
            for text in long_corpus(&mut rng, 600) {
                let idx = LongIndex::build(&text, gamma, k);
                let min_m = (k + 1) * gamma;
                for _ in 0..50 {
                    let pat = long_pattern(&mut rng, &text, k, min_m);
                    let (got, mult) = idx.query_counted(&text, &pat);
                    max_mult = max_mult.max(mult);
                    if got != brute_kmismatch(&text, &pat, k) {
                        bad += 1;
                    }
                    if mult > 64 * (k + 1) * (k + 1) * (k + 1) {
                        bad += 1;
                    }
                }
            }
        }
    }
    println!("long index: measured max pre-dedup multiplicity {max_mult}");
    verdict(5, "long index equals brute force within the multiplicity bound", bad);
}

#[test]
fn criterion_06_synchronizing_set_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut bad = 0;
    let mut density_sum = 0.0;
    let mut density_cnt = 0usize;
    for case in 0..1000 {
        let n = rng.gen_range(30..=500);
        let mut text = rand_text(&mut rng, n, 2);
        if case % 5 == 0 {
            // Force a highly periodic stretch (period 1).
            let len = rng.gen_range(20..=n.min(120));
            let s = rng.gen_range(0..=n - len);
            for b in &mut text[s..s + len] {
                *b = b'a';
            }
        }
        for &tau in &[2usize, 3, 5] {
            if n < 3 * tau {
                continue;
            }
            let set = build_sync_set(&text, tau);
            let member: HashSet<usize> = set.anchors.iter().copied().collect();
            // Consistency: equal 2τ-windows agree on membership.
            let mut groups: HashMap<&[u8], Vec<usize>> = HashMap::new();
            for i in 0..=n - 2 * tau {
                groups.entry(&text[i..i + 2 * tau]).or_default().push(i);
            }
            for g in groups.values() {
                let first = member.contains(&g[0]);
                if g.iter().any(|i| member.contains(i) != first) {
                    bad += 1;
                }
            }
            // Density: aperiodic windows contain an anchor.
            for i in 0..=n.saturating_sub(3 * tau - 1) {
                if 3 * smallest_period(&text[i..i + 3 * tau - 1]) > tau
                    && !(i..i + tau).any(|j| member.contains(&j))
                {
                    bad += 1;
                }
            }
            density_sum += set.anchors.len() as f64 * tau as f64 / n as f64;
            density_cnt += 1;
        }
    }
    println!(
        "synchronizing sets: mean |A|·τ/n = {:.3} over {density_cnt} cases",
        density_sum / density_cnt as f64
    );
    verdict(6, "synchronizing-set consistency and density conditions", bad);
}

#[test]
fn criterion_07_anchor_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut bad = 0;
    let gamma = 8;
    for k in 1..=2 {
        for text in long_corpus(&mut rng, 500) {
            let idx = LongIndex::build(&text, gamma, k);
            let min_m = (k + 1) * gamma;
            for _ in 0..40 {
                let pat = long_pattern(&mut rng, &text, k, min_m);
                let m = pat.len();
                let mut host = text.clone();
                host.extend_from_slice(&pat);
                let hlce = LceIndex::new(&host);
                let horacle = SelfLcp::new(&hlce);
                let near: HashSet<u32> = idx
                    .near
                    .query(&text, &idx.t_suffix, &host, m, &horacle)
                    .into_iter()
                    .collect();
                let pa = idx.pattern_anchors(&host, m, &horacle);
                let in_diff = |anchors: &[usize], bs: &[usize], j: usize| {
                    anchors
                        .iter()
                        .any(|&a| bs.iter().any(|&b| a >= b && a - b == j))
                };
                for j in brute_kmismatch(&text, &pat, k) {
                    let j = j as usize;
                    if classify_nearly_periodic(&text, &pat, j, k, gamma) {
                        if !near.contains(&(j as u32)) {
                            bad += 1;
                        }
                    } else if !in_diff(&idx.anchors.a1.anchors, &pa.b1, j)
                        && !in_diff(&idx.anchors.a2, &pa.b2, j)
                    {
                        bad += 1;
                    }
                }
            }
        }
    }
    verdict(7, "every occurrence is anchored or nearly periodic", bad);
}

#[test]
fn criterion_08_space_scaling_report() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let k = 2;
    let mut bad = 0;
    let mut rows: Vec<(usize, usize, u64)> = Vec::new();
    for e in 10..=16 {
        let n = 1usize << e;
        let text = rand_text(&mut rng, n, 4);
        let idx = build_compact_mismatch(&text, k);
        let terms: usize = idx.tree.tries.iter().map(|t| t.trie.terms.len()).sum();
        rows.push((n, terms, idx.st_rank_bits));
        println!(
            "space: n=2^{e} level-≤{} terminals={terms} st_rank_bits={}",
            k - 1,
            idx.st_rank_bits
        );
    }
    let logp = |n: usize, p: i32| (n as f64) * (n as f64).log2().powi(p);
    for w in rows.windows(2) {
        let ((n1, t1, b1), (n2, t2, b2)) = (w[0], w[1]);
        // Terminal counts follow n·log^{k−1} n; the bit budget follows
        // n·log^k n. Per-doubling ratios must stay within a factor 2 of the
        // model's prediction.
        let tm = logp(n2, (k - 1) as i32) / logp(n1, (k - 1) as i32);
        let tr = t2 as f64 / t1 as f64;
        if tr > 2.0 * tm || tr < tm / 2.0 {
            bad += 1;
        }
        let bm = logp(n2, k as i32) / logp(n1, k as i32);
        let br = b2 as f64 / b1 as f64;
        if br > 2.0 * bm || br < bm / 2.0 {
            bad += 1;
        }
        println!(
            "space: {n1}→{n2} terminal ratio {tr:.2} (model {tm:.2}), bit ratio {br:.2} (model {bm:.2})"
        );
    }
    verdict(8, "compact-index space follows the n·polylog model", bad);
}

#[test]
fn criterion_09_succinct_substrate() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut bad = 0;
    // Increasing sequences: exhaustive rank/select against the plain vector.
    for _ in 0..50 {
        let r = rng.gen_range(1..=4096u64);
        let len = rng.gen_range(1..=1000.min(r as usize));
        let mut vals: Vec<u64> = Vec::new();
        let mut pool: Vec<u64> = (1..=r).collect();
        for _ in 0..len {
            let i = rng.gen_range(0..pool.len());
            vals.push(pool.swap_remove(i));
        }
        vals.sort_unstable();
        let seq = IncreasingSeq::new(vals.clone(), r);
        for x in 1..=r {
            let want = vals.iter().position(|&v| v == x).map(|i| i as u32 + 1);
            if seq.rank(x) != want {
                bad += 1;
            }
        }
        for (i, &v) in vals.iter().enumerate() {
            if seq.select(i as u32 + 1) != v {
                bad += 1;
            }
        }
    }
    // Bit vectors: exhaustive rank and select against naive counting.
    for _ in 0..50 {
        let len = rng.gen_range(1..=4096);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.4)).collect();
        let bv = BitVecRS::from_bits(&bits);
        let mut ones = 0;
        for x in 0..=len {
            if bv.rank1(x) != ones || bv.rank0(x) != x - ones {
                bad += 1;
            }
            if x < len && bits[x] {
                ones += 1;
            }
        }
        let one_pos: Vec<usize> = (0..len).filter(|&i| bits[i]).collect();
        for (i, &p) in one_pos.iter().enumerate() {
            if bv.select1(i + 1) != p {
                bad += 1;
            }
        }
    }
    // Range reporting and interval stabbing against naive filters.
    let points: Vec<(u64, u64, u32)> = (0..2000u32)
        .map(|i| (rng.gen_range(0..3000), rng.gen_range(0..3000), i))
        .collect();
    let rr = RangeReport2D::new(points.clone());
    for _ in 0..5000 {
        let (x1, x2) = (rng.gen_range(0..3000), rng.gen_range(0..3000));
        let (y1, y2) = (rng.gen_range(0..3000), rng.gen_range(0..3000));
        let mut got = rr.query(x1, x2, y1, y2);
        got.sort_unstable();
        let mut want: Vec<u32> = points
            .iter()
            .filter(|&&(x, y, _)| x1 <= x && x <= x2 && y1 <= y && y <= y2)
            .map(|&(_, _, p)| p)
            .collect();
        want.sort_unstable();
        if got != want {
            bad += 1;
        }
    }
    let ivals: Vec<(u64, u64, u32)> = (0..2000u32)
        .map(|i| {
            let a = rng.gen_range(0..3000);
            (a, a + rng.gen_range(0..200), i)
        })
        .collect();
    let st = StabStruct::new(ivals.clone());
    for _ in 0..5000 {
        let a = rng.gen_range(0..3300);
        let mut got = st.stab(a);
        got.sort_unstable();
        let mut want: Vec<u32> = ivals
            .iter()
            .filter(|&&(lo, hi, _)| lo <= a && a <= hi)
            .map(|&(_, _, p)| p)
            .collect();
        want.sort_unstable();
        if got != want {
            bad += 1;
        }
    }
    verdict(9, "succinct rank/select/range/stab equal naive filters", bad);
}

#[test]
fn criterion_10_kangaroo_lcp() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let n = 2000;
    let text = rand_text(&mut rng, n, 3);
    let lce = LceIndex::new(&text);
    let oracle = SelfLcp::new(&lce);
    let rand_frag = |rng: &mut ChaCha8Rng| {
        let start = rng.gen_range(0..n);
        let len = rng.gen_range(0..=n - start);
        let mut f = Frag::plain(start, len);
        for _ in 0..rng.gen_range(0..=3usize) {
            if len == 0 {
                break;
            }
            let off = rng.gen_range(0..len);
            let c: Sym = if rng.gen_bool(0.1) { PSI } else { b'a' as Sym + rng.gen_range(0..4) };
            f = f.with_sub(off, c);
        }
        f
    };
    let mut bad = 0;
    for _ in 0..100_000 {
        let a = rand_frag(&mut rng);
        let b = rand_frag(&mut rng);
        let got = frag_lcp(&a, &text, &b, &text, &oracle);
        let (sa, sb) = (a.syms(&text), b.syms(&text));
        let want = sa.iter().zip(&sb).take_while(|(x, y)| x == y).count();
        if got != want {
            bad += 1;
        }
    }
    verdict(10, "kangaroo LCP equals direct comparison", bad);
}

#[test]
fn criterion_11_f_sequence_tiling() {
    let mut bad = 0;
    for j in 0..=1usize << 16 {
        let seq = f_sequence(j);
        if j > 0 && seq.len() > (usize::BITS - 1 - j.leading_zeros()) as usize + 1 {
            bad += 1;
        }
        // Base intervals [t−f(t)..t) must tile [0..j) exactly when walked
        // from the top.
        let mut expect_hi = j;
        for &t in &seq {
            if t != expect_hi {
                bad += 1;
                break;
            }
            expect_hi = t - f_pow2(t);
        }
        if expect_hi != 0 {
            bad += 1;
        }
    }
    verdict(11, "f-sequence base intervals tile the prefix", bad);
}

#[test]
fn criterion_12_serialization_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut bad = 0;
    let kinds = [
        IndexKind::Errata,
        IndexKind::Compact,
        IndexKind::Short,
        IndexKind::Long,
        IndexKind::Wild,
        IndexKind::Auto,
    ];
    for kind in kinds {
        for _ in 0..50 {
            let n = rng.gen_range(40..=160);
            let sigma = rng.gen_range(2..=4u8);
            let k = rng.gen_range(1..=2usize);
            let text = rand_text(&mut rng, n, sigma);
            let (mu, h, gamma) = match kind {
                IndexKind::Short => (Some(rng.gen_range(8..=16)), Some(k - 1), None),
                IndexKind::Long => (None, None, Some(rng.gen_range(2..=4))),
                _ => (None, None, None),
            };
            let params = resolve_params(kind, &text, k, mu, h, gamma, b'?')
                .unwrap();
            let container = IndexContainer::new(kind, params, &text);
            let bytes = container.serialize();
            let back = IndexContainer::deserialize(&bytes).unwrap();
            if back != container || back.serialize() != bytes {
                bad += 1;
                continue;
            }
            let pre = AnyIndex::build(&container).unwrap();
            let post = AnyIndex::build(&back).unwrap();
            for _ in 0..100 {
                let pat = match kind {
                    IndexKind::Short => {
                        let mu = params.mu as usize;
                        sample_pattern(&mut rng, &text, sigma, k, mu)
                    }
                    IndexKind::Long => {
                        let min_m = (k + 1) * params.gamma as usize;
                        long_pattern(&mut rng, &text, k, min_m)
                    }
                    IndexKind::Wild => {
                        let mut p = sample_pattern(&mut rng, &text, sigma, 0, 24);
                        let m = p.len();
                        for _ in 0..rng.gen_range(0..=k) {
                            p[rng.gen_range(0..m)] = b'?';
                        }
                        p
                    }
                    _ => sample_pattern(&mut rng, &text, sigma, k, 24),
                };
                if pre.query(&text, &pat).unwrap() != post.query(&text, &pat).unwrap() {
                    bad += 1;
                }
            }
        }
    }
    verdict(12, "containers round-trip byte-identically and answer alike", bad);
}
