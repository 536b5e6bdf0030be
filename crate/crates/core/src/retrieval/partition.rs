use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::RetrievalResult;
use crate::{Error, Result};

/// `m` disjoint shards of `k` document ids each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterPartition {
    pub subsets: Vec<Vec<String>>,
}

/// Shuffles the retrieved list with Fisher–Yates and cuts it into
/// consecutive blocks of `k`.
pub fn partition<R: RngCore + ?Sized>(
    result: &RetrievalResult,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<VoterPartition> {
    if m == 0 || k == 0 {
        return Err(Error::invalid("m and k must be positive"));
    }
    if result.len() != m * k {
        return Err(Error::InvalidArgument(alloc::format!(
            "partition needs exactly m*k = {} documents, got {}",
            m * k,
            result.len()
        )));
    }
    let mut ids = result.ranked.clone();
    ids.shuffle(rng);
    Ok(VoterPartition {
        subsets: ids.chunks(k).map(<[String]>::to_vec).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use alloc::format;
    use alloc::vec;

    fn result(n: usize) -> RetrievalResult {
        RetrievalResult {
            ranked: (1..=n).map(|i| format!("d{i}")).collect(),
            scores: vec![1.0; n],
        }
    }

    #[test]
    fn single_voter_gets_everything() {
        let p = partition(&result(3), 1, 3, &mut stream(0, Purpose::Partition)).unwrap();
        let mut s = p.subsets[0].clone();
        s.sort();
        assert_eq!(s, vec!["d1", "d2", "d3"]);
    }

    #[test]
    fn disjoint_and_covering() {
        for seed in 0..50 {
            let p = partition(&result(12), 4, 3, &mut stream(seed, Purpose::Partition)).unwrap();
            assert_eq!(p.subsets.len(), 4);
            assert!(p.subsets.iter().all(|s| s.len() == 3));
            let mut all: Vec<String> = p.subsets.concat();
            all.sort();
            let mut want = result(12).ranked;
            want.sort();
            assert_eq!(all, want);
        }
    }

    #[test]
    fn first_document_lands_in_first_subset_half_the_time() {
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|&s| {
                let p = partition(&result(2), 2, 1, &mut stream(s, Purpose::Partition)).unwrap();
                p.subsets[0][0] == "d1"
            })
            .count();
        let f = hits as f64 / trials as f64;
        assert!((f - 0.5).abs() < 0.005, "{f}");
    }

    #[test]
    fn pairs_in_first_subset_are_uniform() {
        // C(6, 2) = 15 unordered pairs, each with probability 1/15.
        let trials = 100_000u64;
        let mut pairs: Vec<(String, String)> = Vec::new();
        let ids = result(6).ranked;
        for i in 0..6 {
            for j in i + 1..6 {
                pairs.push((ids[i].clone(), ids[j].clone()));
            }
        }
        assert_eq!(pairs.len(), 15);
        let mut counts = vec![0usize; 15];
        for s in 0..trials {
            let p = partition(&result(6), 3, 2, &mut stream(s, Purpose::Partition)).unwrap();
            let mut first = p.subsets[0].clone();
            first.sort();
            let idx = pairs.iter().position(|(a, b)| *a == first[0] && *b == first[1]).unwrap();
            counts[idx] += 1;
        }
        for c in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 15.0).abs() < 0.004);
        }
    }

    #[test]
    fn length_mismatch() {
        let mut rng = stream(0, Purpose::Partition);
        assert!(matches!(partition(&result(5), 2, 2, &mut rng), Err(Error::InvalidArgument(_))));
        assert!(matches!(partition(&result(0), 0, 1, &mut rng), Err(Error::InvalidArgument(_))));
    }
}
