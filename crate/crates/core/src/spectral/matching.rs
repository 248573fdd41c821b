//! Optimal pairing of two eigenvalue multisets.
//!
//! The pairing minimizes the largest paired distance (bottleneck assignment):
//! candidate thresholds are the sorted pairwise distances, and a binary search
//! finds the smallest one admitting a perfect matching.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub matched: bool,
    /// Largest distance in the optimal pairing.
    pub max_distance: f64,
    /// `pairing[i]` is the index in `b` paired with `a[i]`.
    pub pairing: Vec<usize>,
}

pub fn multiset_match(a: &[Complex64], b: &[Complex64], tol: f64) -> Result<MatchOutcome> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n == 0 {
        return Ok(MatchOutcome { matched: true, max_distance: 0.0, pairing: Vec::new() });
    }
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut thresholds: Vec<f64> = dist.iter().flatten().copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut best = perfect_matching(&dist, thresholds[hi]).expect("complete graph has a perfect matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(&dist, thresholds[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let max_distance = thresholds[lo];
    if best.iter().enumerate().any(|(i, &j)| dist[i][j] > max_distance) {
        best = perfect_matching(&dist, max_distance).expect("threshold admits a matching");
    }
    Ok(MatchOutcome { matched: max_distance <= tol, max_distance, pairing: best })
}

/// Kuhn's augmenting paths on the graph `dist <= limit`.
fn perfect_matching(dist: &[Vec<f64>], limit: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, limit, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut pairing = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        pairing[o.expect("perfect matching covers every column")] = j;
    }
    Some(pairing)
}

fn augment(i: usize, dist: &[Vec<f64>], limit: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for j in 0..dist.len() {
        if dist[i][j] <= limit && !seen[j] {
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, dist, limit, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutation_matches_exactly() {
        let out = multiset_match(&[c(2.0, 0.0), c(0.5, 0.0)], &[c(0.5, 0.0), c(2.0, 0.0)], 1e-9).unwrap();
        assert!(out.matched);
        assert_eq!(out.max_distance, 0.0);
        assert_eq!(out.pairing, vec![1, 0]);
    }

    #[test]
    fn tiny_perturbation_matches() {
        assert!(multiset_match(&[c(2.0, 0.0)], &[c(2.0 + 1e-12, 0.0)], 1e-9).unwrap().matched);
    }

    #[test]
    fn conjugate_mismatch() {
        let out = multiset_match(&[c(1.0, 0.0), c(0.0, 1.0)], &[c(1.0, 0.0), c(0.0, -1.0)], 1e-3).unwrap();
        assert!(!out.matched);
        assert!((out.max_distance - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(matches!(multiset_match(&[c(1.0, 0.0)], &[], 1.0), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn bottleneck_beats_greedy() {
        // Greedy nearest pairing would match 0 with 0.1 and leave 1.0 with 5.0.
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(0.1, 0.0), c(-0.9, 0.0)];
        let out = multiset_match(&a, &b, 10.0).unwrap();
        assert!((out.max_distance - 0.9).abs() < 1e-15);
    }

    fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..8)
    }

    proptest! {
        #[test]
        fn reflexive(a in points()) {
            let a: Vec<Complex64> = a.into_iter().map(|(x, y)| c(x, y)).collect();
            let out = multiset_match(&a, &a, 0.0).unwrap();
            prop_assert!(out.matched);
        }

        #[test]
        fn symmetric_and_permutation_invariant(pairs in prop::collection::vec(((-3.0..3.0f64, -3.0..3.0f64), (-3.0..3.0f64, -3.0..3.0f64)), 1..8), rot in 0usize..8) {
            let a: Vec<Complex64> = pairs.iter().map(|((x, y), _)| c(*x, *y)).collect();
            let b: Vec<Complex64> = pairs.iter().map(|(_, (x, y))| c(*x, *y)).collect();
            let ab = multiset_match(&a, &b, 1.0).unwrap();
            let ba = multiset_match(&b, &a, 1.0).unwrap();
            prop_assert_eq!(ab.max_distance, ba.max_distance);
            let k = rot % a.len();
            let mut ar = a.clone();
            let mut br = b.clone();
            ar.rotate_left(k);
            br.rotate_left(k);
            prop_assert_eq!(multiset_match(&ar, &br, 1.0).unwrap().max_distance, ab.max_distance);
        }
    }
}
