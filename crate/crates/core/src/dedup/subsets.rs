use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hashing::{derive_seed, hash_with_seed};

pub const DEFAULT_SUBSETS: [(&str, f64); 2] = [("small", 0.05), ("medium", 0.20)];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubsetFlags {
    /// Sample key to the names of the subsets containing it.
    pub flags: BTreeMap<String, Vec<String>>,
    /// Achieved sample fraction per subset.
    pub achieved: BTreeMap<String, f64>,
}

/// Nested, repository-granular subsets of the training samples.
///
/// Repositories are visited in a seeded order; each subset starts from the
/// previous one and adds repositories that fit under its target count.
/// `samples` are `(key, repo)` pairs; `fractions` must ascend.
pub fn sample_subsets(samples: &[(String, String)], fractions: &[(String, f64)], seed: u64) -> Result<SubsetFlags> {
    let mut prev = 0.0;
    for (name, f) in fractions {
        if !(*f > 0.0 && *f <= 1.0) || *f < prev {
            return Err(Error::Config(format!("subset `{name}` fraction {f} must ascend within (0, 1]")));
        }
        prev = *f;
    }
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, repo) in samples {
        *sizes.entry(repo).or_default() += 1;
    }
    let salt = derive_seed(seed, "subsets");
    let mut order: Vec<(&str, usize)> = sizes.into_iter().collect();
    order.sort_by_cached_key(|(r, _)| (hash_with_seed(r.as_bytes(), salt), r.to_string()));

    let total = samples.len();
    let mut chosen: BTreeSet<&str> = BTreeSet::new();
    let mut count = 0usize;
    let mut members: Vec<(String, BTreeSet<&str>)> = Vec::new();
    let mut achieved = BTreeMap::new();
    for (name, f) in fractions {
        let target = (f * total as f64).round() as usize;
        for (repo, size) in &order {
            if count >= target {
                break;
            }
            if !chosen.contains(repo) && count + size <= target {
                chosen.insert(repo);
                count += size;
            }
        }
        let frac = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        if (frac - f).abs() > 0.01 {
            log::warn!("subset `{name}`: repository granularity gives fraction {frac:.4}, target {f}");
        }
        achieved.insert(name.clone(), frac);
        members.push((name.clone(), chosen.clone()));
    }
    let flags = samples
        .iter()
        .map(|(key, repo)| {
            let names = members.iter().filter(|(_, set)| set.contains(repo.as_str())).map(|(n, _)| n.clone()).collect();
            (key.clone(), names)
        })
        .collect();
    Ok(SubsetFlags { flags, achieved })
}
