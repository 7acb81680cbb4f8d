//! Independent reference computations used only by tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Minimum by sorting a copy.
pub fn sorted_min(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[0]
}

pub fn plain_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum();
    num / weights.iter().sum::<f64>()
}

/// `prod / mean^(N-1)` as written.
pub fn naive_nam(values: &[f64]) -> f64 {
    let m = plain_mean(values);
    if m == 0.0 {
        return 0.0;
    }
    values.iter().product::<f64>() / m.powf(values.len() as f64 - 1.0)
}

/// Betweenness by enumerating every simple path between every ordered pair
/// and keeping the shortest ones.
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        // all simple paths from s, grouped by endpoint
        let mut by_target: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        let mut stack = vec![vec![s]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            for &next in &adj[last] {
                if path.contains(&next) {
                    continue;
                }
                let mut p = path.clone();
                p.push(next);
                by_target.entry(next).or_default().push(p.clone());
                stack.push(p);
            }
        }
        for (_, paths) in by_target {
            let shortest = paths.iter().map(Vec::len).min().unwrap();
            let best: Vec<_> = paths.iter().filter(|p| p.len() == shortest).collect();
            let total = best.len() as f64;
            for p in &best {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / total;
                }
            }
        }
    }
    score
}
