use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{derive_seed, hash_with_seed};

pub const KS_TARGET: f64 = 0.1;
pub const MAX_SWAP_ATTEMPTS: usize = 1000;
/// Allowed drift of a split's sample fraction from its target while swapping.
pub const FRACTION_TOLERANCE: f64 = 0.01;
const CANDIDATES_PER_ROUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Valid,
    Test,
    Excluded,
}

impl Split {
    pub const ASSIGNABLE: [Split; 3] = [Split::Train, Split::Valid, Split::Test];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSample {
    pub key: String,
    pub repo: String,
    pub code_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub split: Split,
    pub subsets: Vec<String>,
    pub repo: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    pub counts: [usize; 3],
    pub fractions: [f64; 3],
    /// KS distance of code-token lengths, split vs all assigned samples.
    pub ks: [f64; 3],
    pub swaps: usize,
    pub ks_target_met: bool,
    #[serde(default)]
    pub subset_fractions: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub ratios: [f64; 3],
    pub assignments: BTreeMap<String, Assignment>,
    pub diagnostics: SplitDiagnostics,
}

impl SplitManifest {
    pub fn exclude(&mut self, key: impl Into<String>, repo: impl Into<String>) {
        self.assignments.insert(
            key.into(),
            Assignment { split: Split::Excluded, subsets: Vec::new(), repo: repo.into() },
        );
    }

    pub fn keys_in(&self, split: Split) -> impl Iterator<Item = &String> {
        self.assignments.iter().filter(move |(_, a)| a.split == split).map(|(k, _)| k)
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_distance(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { 1.0 };
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

struct Repo {
    name: String,
    size: usize,
    /// (length index, count)
    hist: Vec<(usize, usize)>,
}

/// Per-split length histograms over the distinct lengths of the full set.
struct Hists {
    full_cdf: Vec<f64>,
    counts: [Vec<i64>; 3],
    n: [i64; 3],
}

impl Hists {
    fn ks(&self, s: usize) -> f64 {
        if self.n[s] <= 0 {
            return 0.0;
        }
        let mut cum = 0i64;
        let mut d = 0f64;
        for (u, f) in self.full_cdf.iter().enumerate() {
            cum += self.counts[s][u];
            d = d.max((cum as f64 / self.n[s] as f64 - f).abs());
        }
        d
    }

    fn shift(&mut self, repo: &Repo, from: usize, to: usize) {
        for (u, c) in &repo.hist {
            self.counts[from][*u] -= *c as i64;
            self.counts[to][*u] += *c as i64;
        }
        self.n[from] -= repo.size as i64;
        self.n[to] += repo.size as i64;
    }
}

fn validate_ratios(ratios: [f64; 3]) -> Result<()> {
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios {ratios:?} must be in [0,1] and sum to 1")));
    }
    Ok(())
}

/// Assign whole repositories to train/valid/test.
///
/// Repositories go largest first (seeded tie-break) to the split furthest
/// below its target count; then repository swaps reduce the KS distance of
/// each split's code-length distribution to the full one.
pub fn split_by_repo(samples: &[SplitSample], ratios: [f64; 3], seed: u64) -> Result<SplitManifest> {
    validate_ratios(ratios)?;
    let mut by_repo: BTreeMap<&str, Vec<&SplitSample>> = BTreeMap::new();
    for s in samples {
        by_repo.entry(&s.repo).or_default().push(s);
    }
    let active: Vec<usize> = (0..3).filter(|i| ratios[*i] > 0.0).collect();
    if by_repo.len() < active.len() {
        return Err(Error::Config(format!(
            "{} repositories cannot fill {} non-empty splits",
            by_repo.len(),
            active.len()
        )));
    }

    let lengths: BTreeSet<usize> = samples.iter().map(|s| s.code_len).collect();
    let lengths: Vec<usize> = lengths.into_iter().collect();
    let total = samples.len();
    let tie = derive_seed(seed, "split-order");
    let mut repos: Vec<Repo> = by_repo
        .iter()
        .map(|(name, items)| {
            let mut h: BTreeMap<usize, usize> = BTreeMap::new();
            for s in items {
                *h.entry(lengths.binary_search(&s.code_len).unwrap()).or_default() += 1;
            }
            Repo { name: name.to_string(), size: items.len(), hist: h.into_iter().collect() }
        })
        .collect();
    repos.sort_by_cached_key(|r| (std::cmp::Reverse(r.size), hash_with_seed(r.name.as_bytes(), tie), r.name.clone()));

    let target: Vec<f64> = ratios.iter().map(|r| r * total as f64).collect();
    let mut place = vec![0usize; repos.len()];
    let mut counts = [0usize; 3];
    for (i, r) in repos.iter().enumerate() {
        let best = *active
            .iter()
            .max_by(|a, b| {
                let da = target[**a] - counts[**a] as f64;
                let db = target[**b] - counts[**b] as f64;
                da.total_cmp(&db).then(b.cmp(a))
            })
            .unwrap();
        place[i] = best;
        counts[best] += r.size;
    }

    let mut full = vec![0usize; lengths.len()];
    for r in &repos {
        for (u, c) in &r.hist {
            full[*u] += c;
        }
    }
    let mut cum = 0usize;
    let full_cdf: Vec<f64> = full
        .iter()
        .map(|c| {
            cum += c;
            cum as f64 / total.max(1) as f64
        })
        .collect();
    let mut hists = Hists {
        full_cdf,
        counts: std::array::from_fn(|_| vec![0; lengths.len()]),
        n: [0; 3],
    };
    for (i, r) in repos.iter().enumerate() {
        for (u, c) in &r.hist {
            hists.counts[place[i]][*u] += *c as i64;
        }
        hists.n[place[i]] += r.size as i64;
    }

    let tol = FRACTION_TOLERANCE * total as f64;
    let within = |n: i64, s: usize| (n as f64 - target[s]).abs() <= tol;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "split-swap"));
    let mut swaps = 0;
    let mut attempts = 0;
    loop {
        let ks: Vec<f64> = (0..3).map(|s| hists.ks(s)).collect();
        let worst = *active.iter().max_by(|a, b| ks[**a].total_cmp(&ks[**b])).unwrap();
        let current = ks[worst];
        if current <= KS_TARGET || attempts >= MAX_SWAP_ATTEMPTS || active.len() < 2 {
            break;
        }
        attempts += 1;
        let inside: Vec<usize> = (0..repos.len()).filter(|i| place[*i] == worst).collect();
        let outside: Vec<usize> = (0..repos.len()).filter(|i| place[*i] != worst && ratios[place[*i]] > 0.0).collect();
        if inside.is_empty() || outside.is_empty() {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for _ in 0..CANDIDATES_PER_ROUND {
            let r = inside[rng.gen_range(0..inside.len())];
            let q = outside[rng.gen_range(0..outside.len())];
            let other = place[q];
            let n_w = hists.n[worst] - repos[r].size as i64 + repos[q].size as i64;
            let n_o = hists.n[other] + repos[r].size as i64 - repos[q].size as i64;
            let ok_w = within(n_w, worst) || (n_w as f64 - target[worst]).abs() <= (hists.n[worst] as f64 - target[worst]).abs();
            let ok_o = within(n_o, other) || (n_o as f64 - target[other]).abs() <= (hists.n[other] as f64 - target[other]).abs();
            if !(ok_w && ok_o) {
                continue;
            }
            hists.shift(&repos[r], worst, other);
            hists.shift(&repos[q], other, worst);
            let after = active.iter().map(|s| hists.ks(*s)).fold(0.0, f64::max);
            hists.shift(&repos[q], worst, other);
            hists.shift(&repos[r], other, worst);
            if after < current && best.is_none_or(|(b, _, _)| after < b) {
                best = Some((after, r, q));
            }
        }
        if let Some((_, r, q)) = best {
            let other = place[q];
            hists.shift(&repos[r], worst, other);
            hists.shift(&repos[q], other, worst);
            place[r] = other;
            place[q] = worst;
            swaps += 1;
        }
    }

    let ks: [f64; 3] = std::array::from_fn(|s| hists.ks(s));
    let counts: [usize; 3] = std::array::from_fn(|s| hists.n[s] as usize);
    let met = active.iter().all(|s| ks[*s] <= KS_TARGET);
    if !met {
        log::warn!("split KS target {KS_TARGET} not met after {attempts} swap attempts: {ks:?}");
    }
    let split_of: BTreeMap<&str, Split> =
        repos.iter().enumerate().map(|(i, r)| (r.name.as_str(), Split::ASSIGNABLE[place[i]])).collect();
    let assignments = samples
        .iter()
        .map(|s| {
            let a = Assignment { split: split_of[s.repo.as_str()], subsets: Vec::new(), repo: s.repo.clone() };
            (s.key.clone(), a)
        })
        .collect();
    Ok(SplitManifest {
        seed,
        ratios,
        assignments,
        diagnostics: SplitDiagnostics {
            counts,
            fractions: std::array::from_fn(|s| counts[s] as f64 / total.max(1) as f64),
            ks,
            swaps,
            ks_target_met: met,
            subset_fractions: BTreeMap::new(),
        },
    })
}
