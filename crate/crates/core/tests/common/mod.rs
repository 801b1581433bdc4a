//! Independent brute-force references shared by the oracle and acceptance tests.
#![allow(dead_code)]

use dalharness::classifier::{grad_embedding, predict_proba, HeadParams, ProbMatrix};
use dalharness::matrix::Matrix;
use dalharness::rng::{substream, Purpose};
use dalharness::strategies::{
    kmeanspp_select, query_cal, query_coreset, query_entropy, StrategyInput,
};
use rand::Rng;

pub const TRIALS: u64 = 500;

// ---------------------------------------------------------------------------
// instance generation

fn random_probs<R: Rng>(rng: &mut R, n: usize, c: usize, grid: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..c)
                .map(|_| {
                    if grid {
                        rng.random_range(1..=3u32) as f64
                    } else {
                        rng.random::<f64>() + 1e-3
                    }
                })
                .collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

fn random_points<R: Rng>(rng: &mut R, n: usize, d: usize, grid: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if grid {
                        rng.random_range(-2..=2i32) as f64
                    } else {
                        rng.random::<f64>() * 2.0 - 1.0
                    }
                })
                .collect()
        })
        .collect()
}

pub struct Instance {
    pub cand_probs: Vec<Vec<f64>>,
    pub cand_emb: Vec<Vec<f64>>,
    pub lab_probs: Vec<Vec<f64>>,
    pub lab_emb: Vec<Vec<f64>>,
    pub b: usize,
}

impl Instance {
    pub fn draw(trial: u64) -> Instance {
        let mut rng = substream(trial, 0, Purpose::Synth);
        // every fourth trial uses small integer grids so exact ties occur
        let grid = trial.is_multiple_of(4);
        let n = rng.random_range(1..=12usize);
        let m = rng.random_range(1..=6usize);
        let c = rng.random_range(2..=4usize);
        let d = rng.random_range(1..=3usize);
        Instance {
            cand_probs: random_probs(&mut rng, n, c, grid),
            cand_emb: random_points(&mut rng, n, d, grid),
            lab_probs: random_probs(&mut rng, m, c, grid),
            lab_emb: random_points(&mut rng, m, d, grid),
            b: rng.random_range(1..=3usize.min(n)),
        }
    }

    pub fn input(&self) -> StrategyInput {
        StrategyInput {
            cycle: 1,
            // non-trivial train indices, still ascending
            candidate_indices: (0..self.cand_probs.len()).map(|i| 3 * i + 1).collect(),
            candidate_probs: ProbMatrix::from_rows(&self.cand_probs).unwrap(),
            candidate_embeddings: Matrix::from_rows(&self.cand_emb),
            labeled_embeddings: Matrix::from_rows(&self.lab_emb),
            labeled_probs: ProbMatrix::from_rows(&self.lab_probs).unwrap(),
            grad_embeddings: None,
        }
    }

    pub fn to_indices(&self, positions: &[usize]) -> Vec<usize> {
        positions.iter().map(|&p| 3 * p + 1).collect()
    }
}

/// All subsets of size `b` of `0..n`, in lexicographic order.
pub fn subsets(n: usize, b: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == b {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, b, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// brute-force references

pub fn ref_entropy(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        h -= v * v.max(1e-12).ln();
    }
    h
}

/// The subset maximizing total entropy; among equal totals the one whose
/// sorted positions are lexicographically smallest. Ordered by descending
/// score with ties by position.
pub fn brute_entropy(inst: &Instance) -> Vec<usize> {
    let scores: Vec<f64> = inst.cand_probs.iter().map(|p| ref_entropy(p)).collect();
    // A top-b set must contain every item whose score beats some excluded
    // item; enumerate sets and keep the best by (multiset of scores, positions).
    let mut best: Option<(Vec<f64>, Vec<usize>)> = None;
    for set in subsets(scores.len(), inst.b) {
        let mut key: Vec<f64> = set.iter().map(|&i| scores[i]).collect();
        key.sort_by(|a, b| b.total_cmp(a));
        let better = match &best {
            None => true,
            Some((bk, bs)) => {
                let ord = key
                    .iter()
                    .zip(bk)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal);
                ord.is_gt() || (ord.is_eq() && set < *bs)
            }
        };
        if better {
            best = Some((key, set));
        }
    }
    let mut set = best.unwrap().1;
    set.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    set
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Greedy k-center, written with Euclidean distances and an explicit
/// recomputation of every candidate's nearest center each round.
pub fn brute_coreset(inst: &Instance) -> Vec<usize> {
    let mut centers: Vec<Vec<f64>> = inst.lab_emb.clone();
    let mut picked: Vec<usize> = Vec::new();
    for _ in 0..inst.b {
        let mut best: Option<(f64, usize)> = None;
        for (i, x) in inst.cand_emb.iter().enumerate() {
            if picked.contains(&i) {
                continue;
            }
            let near = centers
                .iter()
                .map(|c| dist(x, c))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(bd, _)| near > bd) {
                best = Some((near, i));
            }
        }
        let (_, i) = best.unwrap();
        picked.push(i);
        centers.push(inst.cand_emb[i].clone());
    }
    picked
}

fn ref_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        s += a * (a.max(1e-12) / b.max(1e-12)).ln();
    }
    s
}

/// CAL with neighbours found by sorting (distance, position) pairs.
pub fn brute_cal(inst: &Instance, k: usize) -> Vec<usize> {
    let k = k.min(inst.lab_emb.len());
    let scores: Vec<f64> = inst
        .cand_emb
        .iter()
        .zip(&inst.cand_probs)
        .map(|(x, q)| {
            let mut pairs: Vec<(f64, usize)> = inst
                .lab_emb
                .iter()
                .enumerate()
                .map(|(j, l)| (dist(x, l), j))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let s: f64 = pairs[..k].iter().map(|&(_, j)| ref_kl(&inst.lab_probs[j], q)).sum();
            (s / k as f64).max(0.0)
        })
        .collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order.truncate(inst.b);
    order
}

// ---------------------------------------------------------------------------

// ---------------------------------------------------------------------------
// gradient embedding

fn loss_at(w: &[f64], bias: &[f64], c: usize, d: usize, x: &[f64], y: usize) -> f64 {
    let z: Vec<f64> = (0..c)
        .map(|k| bias[k] + (0..d).map(|j| w[k * d + j] * x[j]).sum::<f64>())
        .collect();
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    lse - z[y]
}

/// Worst relative error of `grad_embedding` against central differences over
/// `instances` random heads.
pub fn gradient_check(instances: u64) -> f64 {
    const H: f64 = 1e-4;
    let mut worst: f64 = 0.0;
    for trial in 0..instances {
        let mut rng = substream(trial, 1, Purpose::Synth);
        let d = rng.random_range(1..=8usize);
        let c = rng.random_range(2..=5usize);
        let w: Vec<f64> = (0..c * d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let bias: Vec<f64> = (0..c).map(|_| rng.random::<f64>() - 0.5).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let params = HeadParams::new(c, d, w.clone(), bias.clone()).unwrap();
        let feats = Matrix::from_rows(std::slice::from_ref(&x));
        let g = grad_embedding(&params, &feats).unwrap();
        let y = predict_proba(&params, &feats).unwrap().argmax()[0] as usize;

        let mut fd = Vec::with_capacity(c * (d + 1));
        for k in 0..c {
            for j in 0..=d {
                let (mut wp, mut wm, mut bp, mut bm) = (w.clone(), w.clone(), bias.clone(), bias.clone());
                if j < d {
                    wp[k * d + j] += H;
                    wm[k * d + j] -= H;
                } else {
                    bp[k] += H;
                    bm[k] -= H;
                }
                let lp = loss_at(&wp, &bp, c, d, &x, y);
                let lm = loss_at(&wm, &bm, c, d, &x, y);
                fd.push((lp - lm) / (2.0 * H));
            }
        }
        let num: f64 = g.row(0).iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = fd.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-8);
        worst = worst.max(num / den);
    }
    worst
}

// ---------------------------------------------------------------------------
// k-means++ seeding distribution

/// Exact probability of each ordered pair for b = 2 under squared-distance
/// weighting with the first draw proportional to the squared norm.
pub fn exact_pair_distribution(points: &[[f64; 2]]) -> Vec<((usize, usize), f64)> {
    let sq = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let norms: Vec<f64> = points.iter().map(|p| sq(p, &[0.0, 0.0])).collect();
    let total: f64 = norms.iter().sum();
    let mut out = Vec::new();
    for i in 0..points.len() {
        let rest: f64 = (0..points.len())
            .filter(|&j| j != i)
            .map(|j| norms[j].min(sq(&points[j], &points[i])))
            .sum();
        for j in 0..points.len() {
            if j == i {
                continue;
            }
            let wj = norms[j].min(sq(&points[j], &points[i]));
            out.push(((i, j), norms[i] / total * wj / rest));
        }
    }
    out
}

pub const KMPP_POINTS: [[f64; 2]; 3] = [[1.0, 0.0], [0.0, 2.0], [-1.0, -1.0]];

/// Largest absolute deviation between observed and exact ordered-pair
/// frequencies over `trials` seeded draws.
pub fn kmeanspp_deviation(trials: u64) -> f64 {
    let exact = exact_pair_distribution(&KMPP_POINTS);
    let pts = Matrix::from_rows(&KMPP_POINTS);
    let mut counts = vec![0usize; exact.len()];
    for t in 0..trials {
        let got = kmeanspp_select(&pts, 2, &mut substream(t, 1, Purpose::Strategy)).unwrap();
        let slot = exact.iter().position(|(pair, _)| *pair == (got[0], got[1])).unwrap();
        counts[slot] += 1;
    }
    exact
        .iter()
        .zip(&counts)
        .map(|((_, p), &n)| (n as f64 / trials as f64 - p).abs())
        .fold(0.0, f64::max)
}

/// Trials (out of `trials`) where a strategy disagrees with its reference.
pub fn strategy_mismatches(trials: u64) -> [(&'static str, usize); 3] {
    let mut miss = [("entropy", 0), ("coreset", 0), ("cal", 0)];
    for trial in 0..trials {
        let inst = Instance::draw(trial);
        let input = inst.input();
        if query_entropy(&input, inst.b).unwrap().indices != inst.to_indices(&brute_entropy(&inst)) {
            miss[0].1 += 1;
        }
        if query_coreset(&input, inst.b).unwrap().indices != inst.to_indices(&brute_coreset(&inst)) {
            miss[1].1 += 1;
        }
        if [1, 3, 10]
            .iter()
            .any(|&k| query_cal(&input, inst.b, k).unwrap().indices != inst.to_indices(&brute_cal(&inst, k)))
        {
            miss[2].1 += 1;
        }
    }
    miss
}
