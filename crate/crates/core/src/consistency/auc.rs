use crate::error::{Error, Result};

/// Rank-based ROC AUC: the probability that a random positive outscores a
/// random negative, ties counting one half.
pub fn evaluate_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    assert_eq!(scores.len(), labels.len(), "scores and labels differ in length");
    let pos = labels.iter().filter(|l| **l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|a, b| scores[*a].total_cmp(&scores[*b]));
    // Sum of (1-based, tie-averaged) ranks of the positives, kept doubled so
    // that averages of two integer ranks stay integral.
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg2 = (i + 1 + j + 1) as u128;
        let positives = idx[i..=j].iter().filter(|k| labels[**k] == 1).count() as u128;
        rank_sum2 += avg2 * positives;
        i = j + 1;
    }
    let (pos, neg) = (pos as u128, neg as u128);
    let u2 = rank_sum2 - pos * (pos + 1);
    Ok(u2 as f64 / (2 * pos * neg) as f64)
}
