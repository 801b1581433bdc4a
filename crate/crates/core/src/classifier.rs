//! Linear softmax classification head over fixed embeddings.
//!
//! The head is trained with mean cross-entropy and AdamW (bias-corrected
//! moments, decoupled weight decay on the weight matrix) under a linear
//! warmup / linear decay learning-rate schedule.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureio::write_atomic;
use crate::matrix::Matrix;
use crate::rng::shuffle;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"AGLH";
const CHECKPOINT_VERSION: u16 = 1;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;

/// Weights (`c` x `d`, row-major) and bias of the head.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    c: usize,
    d: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl HeadParams {
    pub fn new(c: usize, d: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if c == 0 || d == 0 {
            return Err(Error::InvalidConfig("head needs c >= 1 and d >= 1".into()));
        }
        if weights.len() != c * d {
            return Err(Error::DimensionMismatch {
                expected: c * d,
                found: weights.len(),
            });
        }
        if bias.len() != c {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bias.len(),
            });
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite head parameter".into()));
        }
        Ok(HeadParams { c, d, weights, bias })
    }

    pub fn zeros(c: usize, d: usize) -> Self {
        HeadParams {
            c,
            d,
            weights: vec![0.0; c * d],
            bias: vec![0.0; c],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn logits_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let w = &self.weights[k * self.d..(k + 1) * self.d];
            *o = self.bias[k] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    fn check_dim(&self, features: &Matrix) -> Result<()> {
        if features.cols() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: features.cols(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub warmup_fraction: f64,
    pub weight_decay: f64,
    pub minibatch_size: usize,
    /// Denominator guard of the adaptive-moment update.
    pub numeric_epsilon: f64,
}

impl TrainConfig {
    /// Short training: 5 epochs.
    pub fn short() -> Self {
        TrainConfig {
            epochs: 5,
            ..Self::long()
        }
    }

    /// Long training: 15 epochs.
    pub fn long() -> Self {
        TrainConfig {
            epochs: 15,
            learning_rate: 1e-2,
            warmup_fraction: 0.05,
            weight_decay: 0.01,
            minibatch_size: 20,
            numeric_epsilon: 1e-8,
        }
    }

    /// Long training with more epochs, longer warmup and a lower rate.
    pub fn long_plus() -> Self {
        TrainConfig {
            epochs: 20,
            learning_rate: 4e-3,
            warmup_fraction: 0.1,
            ..Self::long()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "st" => Some(Self::short()),
            "lt" => Some(Self::long()),
            "lt+" | "lt_plus" => Some(Self::long_plus()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("train: {m}")));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..=1.0).contains(&self.warmup_fraction) {
            return bad("warmup_fraction must lie in [0, 1]");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if self.minibatch_size == 0 {
            return bad("minibatch_size must be at least 1");
        }
        if !(self.numeric_epsilon > 0.0) {
            return bad("numeric_epsilon must be positive");
        }
        Ok(())
    }

    pub fn total_steps(&self, n: usize) -> usize {
        self.epochs * n.div_ceil(self.minibatch_size)
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::long()
    }
}

/// Learning-rate multiplier for 1-based `step` of `total`: linear ramp to 1
/// over the warmup steps, then linear decay reaching 0 at the last step.
pub fn schedule_factor(step: usize, total: usize, warmup_fraction: f64) -> f64 {
    let warmup = ((warmup_fraction * total as f64).ceil() as usize).min(total);
    if step <= warmup {
        step as f64 / warmup as f64
    } else {
        (total - step) as f64 / (total - warmup) as f64
    }
}

/// Row-stochastic class-probability matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix(Matrix);

impl ProbMatrix {
    /// Validates rows sum to 1 within 1e-9 and entries lie in [0, 1].
    pub fn new(m: Matrix) -> Result<Self> {
        for (i, row) in m.iter_rows().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidInput(format!(
                    "row {i} is not a probability distribution"
                )));
            }
        }
        Ok(ProbMatrix(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows))
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn num_classes(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.0.iter_rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn select_rows(&self, indices: &[usize]) -> ProbMatrix {
        ProbMatrix(self.0.select_rows(indices))
    }

    /// Argmax per row, ties to the lowest class id.
    pub fn argmax(&self) -> Vec<u32> {
        self.iter_rows().map(argmax).collect()
    }
}

pub(crate) fn argmax(row: &[f64]) -> u32 {
    let mut best = 0;
    for (k, &p) in row.iter().enumerate().skip(1) {
        if p > row[best] {
            best = k;
        }
    }
    best as u32
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// `log sum exp(z)` computed with max subtraction.
fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Fresh parameters: weights uniform in `[-1/sqrt(d), 1/sqrt(d)]`, zero bias.
pub fn init_params<R: Rng + ?Sized>(d: usize, c: usize, rng: &mut R) -> Result<HeadParams> {
    if c == 0 || d == 0 {
        return Err(Error::InvalidConfig("head needs c >= 1 and d >= 1".into()));
    }
    let bound = 1.0 / (d as f64).sqrt();
    let weights = (0..c * d)
        .map(|_| (2.0 * rng.random::<f64>() - 1.0) * bound)
        .collect();
    Ok(HeadParams {
        c,
        d,
        weights,
        bias: vec![0.0; c],
    })
}

pub fn predict_proba(params: &HeadParams, features: &Matrix) -> Result<ProbMatrix> {
    params.check_dim(features)?;
    let mut out = Matrix::zeros(features.rows(), params.c);
    for (i, x) in features.iter_rows().enumerate() {
        let row = out.row_mut(i);
        params.logits_into(x, row);
        softmax_in_place(row);
    }
    Ok(ProbMatrix(out))
}

fn check_labels(labels: &[u32], c: usize) -> Result<()> {
    if let Some((position, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= c) {
        return Err(Error::LabelRange {
            position,
            label,
            classes: c as u32,
        });
    }
    Ok(())
}

/// Mean cross-entropy of `params` on the given rows.
pub fn mean_cross_entropy(params: &HeadParams, features: &Matrix, labels: &[u32]) -> Result<f64> {
    params.check_dim(features)?;
    if features.rows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.rows(),
            found: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::CannotTrain);
    }
    check_labels(labels, params.c)?;
    let mut z = vec![0.0; params.c];
    let mut total = 0.0;
    for (x, &y) in features.iter_rows().zip(labels) {
        params.logits_into(x, &mut z);
        total += log_sum_exp(&z) - z[y as usize];
    }
    Ok(total / labels.len() as f64)
}

struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

/// Trains the head. Starts from `start` (model warm-start) when given,
/// otherwise from `init_params` drawn from `rng` (model cold-start).
/// Optimizer moments always start at zero.
pub fn train<R: Rng + ?Sized>(
    start: Option<&HeadParams>,
    features: &Matrix,
    labels: &[u32],
    num_classes: usize,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<HeadParams> {
    cfg.validate()?;
    let n = features.rows();
    if n == 0 {
        return Err(Error::CannotTrain);
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let mut params = match start {
        Some(p) => {
            if p.c != num_classes {
                return Err(Error::DimensionMismatch {
                    expected: num_classes,
                    found: p.c,
                });
            }
            p.clone()
        }
        None => init_params(features.cols(), num_classes, rng)?,
    };
    params.check_dim(features)?;
    check_labels(labels, num_classes)?;

    let (c, d) = (params.c, params.d);
    let n_params = c * (d + 1);
    let total = cfg.total_steps(n);
    let mut adam = AdamState {
        m: vec![0.0; n_params],
        v: vec![0.0; n_params],
        t: 0,
    };
    // gradient layout: weights (c*d) then bias (c)
    let mut grad = vec![0.0; n_params];
    let mut z = vec![0.0; c];
    let mut order: Vec<usize> = (0..n).collect();
    let mut step = 0;

    for _ in 0..cfg.epochs {
        shuffle(rng, &mut order);
        for batch in order.chunks(cfg.minibatch_size) {
            step += 1;
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut loss = 0.0;
            for &i in batch {
                let x = features.row(i);
                let y = labels[i] as usize;
                params.logits_into(x, &mut z);
                loss += log_sum_exp(&z) - z[y];
                softmax_in_place(&mut z);
                for k in 0..c {
                    let r = z[k] - if k == y { 1.0 } else { 0.0 };
                    let gw = &mut grad[k * d..(k + 1) * d];
                    for (g, &xv) in gw.iter_mut().zip(x) {
                        *g += r * xv;
                    }
                    grad[c * d + k] += r;
                }
            }
            if !loss.is_finite() {
                return Err(Error::Divergence { step });
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);

            let lr = cfg.learning_rate * schedule_factor(step, total, cfg.warmup_fraction);
            adam.t += 1;
            let bc1 = 1.0 - ADAM_BETA1.powi(adam.t);
            let bc2 = 1.0 - ADAM_BETA2.powi(adam.t);
            for j in 0..n_params {
                let g = grad[j];
                adam.m[j] = ADAM_BETA1 * adam.m[j] + (1.0 - ADAM_BETA1) * g;
                adam.v[j] = ADAM_BETA2 * adam.v[j] + (1.0 - ADAM_BETA2) * g * g;
                let m_hat = adam.m[j] / bc1;
                let v_hat = adam.v[j] / bc2;
                let update = m_hat / (v_hat.sqrt() + cfg.numeric_epsilon);
                if j < c * d {
                    let w = &mut params.weights[j];
                    *w -= lr * (update + cfg.weight_decay * *w);
                } else {
                    params.bias[j - c * d] -= lr * update;
                }
            }
            if params.weights.iter().chain(&params.bias).any(|v| !v.is_finite()) {
                return Err(Error::Divergence { step });
            }
        }
    }
    Ok(params)
}

/// Last-layer loss gradient at the pseudo-label, one row per instance.
///
/// Row layout is class-major: for each class `k` the `d` weight entries
/// `(p_k - [k == y]) * x` followed by the bias entry `p_k - [k == y]`.
pub fn grad_embedding(params: &HeadParams, features: &Matrix) -> Result<Matrix> {
    let probs = predict_proba(params, features)?;
    let (c, d) = (params.c, params.d);
    let mut out = Matrix::zeros(features.rows(), c * (d + 1));
    for (i, (x, p)) in features.iter_rows().zip(probs.iter_rows()).enumerate() {
        let y = argmax(p) as usize;
        let row = out.row_mut(i);
        for k in 0..c {
            let r = p[k] - if k == y { 1.0 } else { 0.0 };
            let block = &mut row[k * (d + 1)..(k + 1) * (d + 1)];
            for (g, &xv) in block[..d].iter_mut().zip(x) {
                *g = r * xv;
            }
            block[d] = r;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// checkpoint: "AGLH" | version u16 | c u32 | d u32 | c*d f64 weights | c f64 bias

pub fn write_checkpoint<W: Write>(params: &HeadParams, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(14 + 8 * (params.weights.len() + params.c));
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(params.c as u32).to_le_bytes());
    buf.extend_from_slice(&(params.d as u32).to_le_bytes());
    for v in params.weights.iter().chain(&params.bias) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<HeadParams> {
    if bytes.len() < 14 {
        return Err(Error::format(bytes.len() as u64, "truncated checkpoint header"));
    }
    if &bytes[..4] != CHECKPOINT_MAGIC {
        return Err(Error::format(0, "bad checkpoint magic"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != CHECKPOINT_VERSION {
        return Err(Error::format(4, format!("unsupported checkpoint version {version}")));
    }
    let c = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let count = c * d + c;
    let payload = &bytes[14..];
    if payload.len() != 8 * count {
        return Err(Error::format(
            14,
            format!("checkpoint payload has {} bytes, expected {}", payload.len(), 8 * count),
        ));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|ch| f64::from_le_bytes(ch.try_into().unwrap()))
        .collect();
    let (w, b) = values.split_at(c * d);
    HeadParams::new(c, d, w.to_vec(), b.to_vec())
}

pub fn save_checkpoint(params: &HeadParams, path: &Path) -> Result<()> {
    write_atomic(path, |w| write_checkpoint(params, w))
}

pub fn load_checkpoint(path: &Path) -> Result<HeadParams> {
    read_checkpoint(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};
    use proptest::prelude::*;

    #[test]
    fn uniform_softmax_for_zero_head() {
        let p = HeadParams::zeros(4, 3);
        let x = Matrix::from_rows(&[[0.3, -1.0, 2.0]]);
        let probs = predict_proba(&p, &x).unwrap();
        for &v in probs.row(0) {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn bias_only_softmax_matches_closed_form() {
        let p = HeadParams::new(2, 1, vec![0.0, 0.0], vec![10.0, 0.0]).unwrap();
        let probs = predict_proba(&p, &Matrix::from_rows(&[[1.0]])).unwrap();
        let expected0 = 1.0 / (1.0 + (-10.0f64).exp());
        assert!((probs.row(0)[0] - expected0).abs() < 1e-12);
        assert!((probs.row(0)[0] - (1.0 - 4.54e-5)).abs() < 1e-6);
        assert!((probs.row(0)[1] - 4.54e-5).abs() < 1e-6);
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let p = HeadParams::new(2, 1, vec![0.0, 0.0], vec![1000.0, -1000.0]).unwrap();
        let probs = predict_proba(&p, &Matrix::from_rows(&[[0.0]])).unwrap();
        assert_eq!(probs.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let p = HeadParams::zeros(2, 3);
        let x = Matrix::from_rows(&[[1.0, 2.0]]);
        assert!(matches!(predict_proba(&p, &x), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(grad_embedding(&p, &x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn init_bounds_and_determinism() {
        let a = init_params(4, 3, &mut substream(1, 0, Purpose::ModelInit)).unwrap();
        let b = init_params(4, 3, &mut substream(1, 0, Purpose::ModelInit)).unwrap();
        let other = init_params(4, 3, &mut substream(1, 1, Purpose::ModelInit)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_eq!(a.weights().len(), 12);
        assert_eq!(a.bias(), &[0.0; 3]);
        assert!(a.weights().iter().all(|w| w.abs() <= 0.5));
    }

    #[test]
    fn grad_embedding_hand_expansion() {
        // W=0, b chosen so p = [0.7, 0.3]; pseudo-label 0
        let b0 = (0.7f64 / 0.3).ln();
        let p = HeadParams::new(2, 1, vec![0.0, 0.0], vec![b0, 0.0]).unwrap();
        let g = grad_embedding(&p, &Matrix::from_rows(&[[1.0]])).unwrap();
        let expected = [-0.3, -0.3, 0.3, 0.3];
        for (a, e) in g.row(0).iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{:?}", g.row(0));
        }
    }

    #[test]
    fn grad_embedding_zero_when_one_hot() {
        let p = HeadParams::new(2, 2, vec![0.0; 4], vec![1000.0, -1000.0]).unwrap();
        let g = grad_embedding(&p, &Matrix::from_rows(&[[0.5, -0.5]])).unwrap();
        assert!(g.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn schedule_shape() {
        // 20 steps, 10% warmup: ramp over 2 steps, then decay to 0
        assert_eq!(schedule_factor(1, 20, 0.1), 0.5);
        assert_eq!(schedule_factor(2, 20, 0.1), 1.0);
        assert!((schedule_factor(3, 20, 0.1) - 17.0 / 18.0).abs() < 1e-15);
        assert_eq!(schedule_factor(20, 20, 0.1), 0.0);
        assert_eq!(schedule_factor(1, 1, 1.0), 1.0);
        // 5% of 20 rounds up to a single warmup step
        assert_eq!(schedule_factor(1, 20, 0.05), 1.0);
    }

    #[test]
    fn single_step_changes_params() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let start = HeadParams::zeros(2, 2);
        let cfg = TrainConfig {
            epochs: 1,
            minibatch_size: 20,
            warmup_fraction: 1.0,
            ..TrainConfig::long()
        };
        assert_eq!(cfg.total_steps(2), 1);
        let out = train(Some(&start), &x, &[0, 1], 2, &cfg, &mut substream(0, 0, Purpose::Shuffle)).unwrap();
        assert_ne!(out, start);
        // first Adam step moves each parameter by at most lr (|m_hat / sqrt(v_hat)| <= 1)
        for (a, b) in out.weights().iter().zip(start.weights()) {
            assert!((a - b).abs() <= cfg.learning_rate * (1.0 + 1e-9));
        }
        assert!(mean_cross_entropy(&out, &x, &[0, 1]).unwrap().is_finite());
    }

    #[test]
    fn train_errors() {
        let cfg = TrainConfig::long();
        let mut rng = substream(0, 0, Purpose::Shuffle);
        let empty = Matrix::zeros(0, 2);
        assert!(matches!(train(None, &empty, &[], 2, &cfg, &mut rng), Err(Error::CannotTrain)));
        let x = Matrix::from_rows(&[[1.0, 0.0]]);
        assert!(matches!(
            train(None, &x, &[3], 2, &cfg, &mut rng),
            Err(Error::LabelRange { .. })
        ));
        let bad = TrainConfig { epochs: 0, ..cfg };
        assert!(matches!(train(None, &x, &[0], 2, &bad, &mut rng), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn divergence_is_reported() {
        let x = Matrix::from_rows(&[[1e200, 1e200]]);
        let cfg = TrainConfig::long();
        let start = HeadParams::new(2, 2, vec![1e200; 4], vec![0.0; 2]).unwrap();
        let err = train(Some(&start), &x, &[0], 2, &cfg, &mut substream(0, 0, Purpose::Shuffle));
        assert!(matches!(err, Err(Error::Divergence { step: 1 })), "{err:?}");
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = init_params(3, 2, &mut substream(2, 0, Purpose::ModelInit)).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&p, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"AGLH");
        assert_eq!(read_checkpoint(&buf).unwrap(), p);
        assert!(read_checkpoint(&buf[..buf.len() - 1]).is_err());
    }

    proptest! {
        #[test]
        fn softmax_rows_normalized_and_shift_invariant(
            w in proptest::collection::vec(-5.0f64..5.0, 6),
            b in proptest::collection::vec(-5.0f64..5.0, 3),
            x in proptest::collection::vec(-3.0f64..3.0, 2),
            shift in -50.0f64..50.0,
        ) {
            let p = HeadParams::new(3, 2, w.clone(), b.clone()).unwrap();
            let shifted = HeadParams::new(3, 2, w, b.iter().map(|v| v + shift).collect()).unwrap();
            let xm = Matrix::from_rows(&[x]);
            let a = predict_proba(&p, &xm).unwrap();
            let s = predict_proba(&shifted, &xm).unwrap();
            prop_assert!((a.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for (u, v) in a.row(0).iter().zip(s.row(0)) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }

        #[test]
        fn gradient_vanishes_only_at_one_hot(
            w in proptest::collection::vec(-3.0f64..3.0, 4),
            x in proptest::collection::vec(-2.0f64..2.0, 2),
        ) {
            let p = HeadParams::new(2, 2, w, vec![0.0, 0.0]).unwrap();
            let xm = Matrix::from_rows(&[x]);
            let probs = predict_proba(&p, &xm).unwrap();
            let g = grad_embedding(&p, &xm).unwrap();
            let norm: f64 = g.row(0).iter().map(|v| v * v).sum();
            let one_hot = probs.row(0).iter().any(|&v| v == 1.0);
            prop_assert_eq!(norm == 0.0, one_hot);
        }
    }
}
