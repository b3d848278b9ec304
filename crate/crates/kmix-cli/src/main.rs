//! `kmix` — build and query k-mismatch / k-wildcard text indexes.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 malformed input or index.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kmix_harness::container::{IndexContainer, IndexKind, Params};
use kmix_harness::index::{resolve_params, AnyIndex};
use kmix_harness::oracle::{brute_kmismatch, brute_wildcard};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "kmix", about = "k-mismatch and wildcard text indexing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Errata,
    Compact,
    Short,
    Long,
    Wild,
    Auto,
}

impl From<KindArg> for IndexKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Errata => IndexKind::Errata,
            KindArg::Compact => IndexKind::Compact,
            KindArg::Short => IndexKind::Short,
            KindArg::Long => IndexKind::Long,
            KindArg::Wild => IndexKind::Wild,
            KindArg::Auto => IndexKind::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Oracle,
    Space,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from a text file.
    Build {
        #[arg(short = 't', long)]
        text: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[arg(long = "index", value_enum, default_value = "auto")]
        index: KindArg,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        gamma: Option<usize>,
        /// Wildcard byte for the wildcard index.
        #[arg(long = "wildcard-char", default_value = "?")]
        wildcard_char: char,
        /// Largest accepted text length.
        #[arg(long = "max-n", default_value_t = 1 << 24)]
        max_n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Query an index file; prints occurrence starts ascending, one per line.
    Query {
        #[arg(short, long)]
        index: PathBuf,
        #[arg(short, long)]
        pattern: String,
        /// Interpret the pattern as hex-encoded bytes.
        #[arg(long)]
        hex: bool,
        /// Emit a JSON object instead of one position per line.
        #[arg(long)]
        json: bool,
    },
    /// Print structure statistics for an index file.
    Stats {
        #[arg(short, long)]
        index: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the oracle-equivalence suite on a random corpus.
    Selftest {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        sigma: u8,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "oracle")]
        suite: SuiteArg,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("kmix: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Build { text, k, index, mu, h, gamma, wildcard_char, max_n, output } => {
            let data = std::fs::read(&text)
                .map_err(|e| format!("cannot read {}: {e}", text.display()))?;
            if data.len() > max_n {
                return Err(format!(
                    "text length {} exceeds the maximum {max_n}",
                    data.len()
                ));
            }
            if k == 0 {
                return Err("k must be at least 1".to_string());
            }
            let kind: IndexKind = index.into();
            let wc = u8::try_from(wildcard_char as u32)
                .map_err(|_| "wildcard char must be a single byte".to_string())?;
            if kind == IndexKind::Wild && data.contains(&wc) {
                return Err("text contains the wildcard byte".to_string());
            }
            let params: Params = resolve_params(kind, &data, k, mu, h, gamma, wc)?;
            let container = IndexContainer::new(kind, params, &data);
            // Building validates the parameters before anything is written.
            AnyIndex::build(&container).map_err(|e| e.to_string())?;
            std::fs::write(&output, container.serialize())
                .map_err(|e| format!("cannot write {}: {e}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Query { index, pattern, hex, json } => {
            let (container, idx) = load(&index)?;
            let text = container.text().map_err(|e| e.to_string())?;
            let pat = if hex {
                decode_hex(&pattern)?
            } else {
                pattern.into_bytes()
            };
            if container.kind == IndexKind::Wild {
                let wc = container.params.wildcard;
                let wilds = pat.iter().filter(|&&b| b == wc).count();
                if wilds > container.params.k as usize {
                    return Err(format!(
                        "pattern has {wilds} wildcards but the index supports at most {}",
                        container.params.k
                    ));
                }
            }
            let occ = idx.query(text, &pat)?;
            let mut out = String::new();
            if json {
                let v = serde_json::json!({
                    "pattern_len": pat.len(),
                    "k": container.params.k,
                    "occurrences": occ,
                });
                out.push_str(&v.to_string());
                out.push('\n');
            } else {
                for p in occ {
                    out.push_str(&p.to_string());
                    out.push('\n');
                }
            }
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Stats { index, json } => {
            let (_, idx) = load(&index)?;
            let stats = idx.stats();
            if json {
                println!("{stats}");
            } else {
                let obj = stats.as_object().unwrap();
                for (key, val) in obj {
                    println!("{key}: {val}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Selftest { n, sigma, k, seed, suite } => {
            let ok = match suite {
                SuiteArg::Oracle => selftest_oracle(n, sigma, k, seed),
                SuiteArg::Space => selftest_space(n.max(1024), k, seed),
                SuiteArg::All => {
                    selftest_oracle(n, sigma, k, seed) && selftest_space(n.max(1024), k, seed)
                }
            };
            if ok {
                println!("selftest: all cases passed");
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn load(path: &PathBuf) -> Result<(IndexContainer, AnyIndex), String> {
    let bytes =
        std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let container = IndexContainer::deserialize(&bytes).map_err(|e| e.to_string())?;
    let idx = AnyIndex::build(&container).map_err(|e| e.to_string())?;
    Ok((container, idx))
}

fn decode_hex(s: &str) -> Result<Vec<u8>, String> {
    if s.len() % 2 != 0 {
        return Err("hex pattern must have even length".to_string());
    }
    (0..s.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&s[i..i + 2], 16).map_err(|_| "invalid hex pattern".to_string())
        })
        .collect()
}

fn rand_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Vec<u8> {
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// Differential suite: every index kind against the brute-force scans.
/// Prints a minimized counterexample and returns false on the first mismatch.
fn selftest_oracle(n: usize, sigma: u8, k: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = rand_text(&mut rng, n, sigma);
    let mut indexes: Vec<(IndexKind, AnyIndex)> = Vec::new();
    for kind in [IndexKind::Errata, IndexKind::Compact, IndexKind::Wild, IndexKind::Auto] {
        let params = resolve_params(kind, &text, k, None, None, None, b'?').unwrap();
        let c = IndexContainer::new(kind, params, &text);
        indexes.push((kind, AnyIndex::build(&c).unwrap()));
    }
    let cases = 60;
    for case in 0..cases {
        let m = rng.gen_range(1..=32.min(n));
        let mut pat = if rng.gen_bool(0.8) {
            let s = rng.gen_range(0..=n - m);
            text[s..s + m].to_vec()
        } else {
            rand_text(&mut rng, m, sigma)
        };
        for _ in 0..rng.gen_range(0..=k + 1) {
            let p = rng.gen_range(0..m);
            pat[p] = b'a' + rng.gen_range(0..sigma);
        }
        for (kind, idx) in &indexes {
            let (got, want) = match kind {
                IndexKind::Wild => {
                    let mut wpat = pat.clone();
                    for _ in 0..rng.gen_range(0..=k) {
                        let p = rng.gen_range(0..m);
                        wpat[p] = b'?';
                    }
                    (idx.query(&text, &wpat).unwrap(), brute_wildcard(&text, &wpat, b'?'))
                }
                _ => (idx.query(&text, &pat).unwrap(), brute_kmismatch(&text, &pat, k)),
            };
            if got != want {
                report_mismatch(idx, &text, &pat, k, kind.name(), case);
                return false;
            }
        }
    }
    true
}

/// Shrinks the failing pattern from both ends while the discrepancy
/// persists, then prints the minimal case.
fn report_mismatch(idx: &AnyIndex, text: &[u8], pat: &[u8], k: usize, kind: &str, case: usize) {
    let differs = |p: &[u8]| idx.query(text, p).ok().as_deref() != Some(&brute_kmismatch(text, p, k));
    let mut min = pat.to_vec();
    loop {
        if min.len() > 1 && differs(&min[1..]) {
            min.remove(0);
        } else if min.len() > 1 && differs(&min[..min.len() - 1]) {
            min.pop();
        } else {
            break;
        }
    }
    eprintln!("selftest: mismatch for index kind {kind} (case {case})");
    eprintln!("  pattern (minimized): {:?}", String::from_utf8_lossy(&min));
    eprintln!("  expected: {:?}", brute_kmismatch(text, &min, k));
    eprintln!("  got:      {:?}", idx.query(text, &min).ok());
}

/// Quick space-scaling check: compact-index terminal counts across doubling
/// text lengths stay within a generous multiple of n·log^{k−1} n.
fn selftest_space(n_max: usize, k: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 256;
    let mut ok = true;
    while n <= n_max {
        let text = rand_text(&mut rng, n, 4);
        let idx = kmix_core::compact::build_compact_mismatch(&text, k);
        let terms: usize = idx.tree.tries.iter().map(|t| t.trie.terms.len()).sum();
        let log = (n as f64).log2();
        let bound = 8.0 * n as f64 * log.powi(k as i32 - 1);
        println!("space: n={n} terminals={terms} bound={bound:.0}");
        if (terms as f64) > bound {
            eprintln!("selftest: terminal count {terms} exceeds the model bound {bound:.0}");
            ok = false;
        }
        n *= 2;
    }
    ok
}
