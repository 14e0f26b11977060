#![allow(dead_code)]

use std::path::PathBuf;

use deptree::{load_dataset, Dataset};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn load(name: &str) -> Dataset {
    let file = std::fs::File::open(data_path(name)).expect("dataset file");
    load_dataset(file).expect("valid dataset")
}

pub fn random_permutation(t: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=t).collect();
    p.shuffle(rng);
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Naive double sum of Ĉ(t1/T, t2/T) - t1·t2/T² with Ĉ counted directly.
pub fn naive_spearman(rx: &[usize], ry: &[usize]) -> f64 {
    let t = rx.len();
    let tf = t as f64;
    let mut sum = 0.0;
    for t1 in 1..=t {
        for t2 in 1..=t {
            let hits = rx
                .iter()
                .zip(ry)
                .filter(|(&a, &b)| a <= t1 && b <= t2)
                .count();
            sum += hits as f64 / tf - (t1 * t2) as f64 / (tf * tf);
        }
    }
    12.0 / (tf * tf - 1.0) * sum
}

/// All labelled trees on `n` vertices via Prüfer sequences.
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut trees = Vec::with_capacity(total);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(s), leaf.max(s)));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        trees.push(edges);
    }
    trees
}

/// Counts the edges of `edges` with both ends in `group`, and those with
/// exactly one end in it.
pub fn edges_within_and_across(edges: &[(usize, usize)], group: &[usize]) -> (usize, usize) {
    let inside = |v: usize| group.contains(&v);
    let within = edges
        .iter()
        .filter(|&&(a, b)| inside(a) && inside(b))
        .count();
    let across = edges
        .iter()
        .filter(|&&(a, b)| inside(a) != inside(b))
        .count();
    (within, across)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
