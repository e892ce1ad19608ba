//! Skip-gram with negative sampling over a walk corpus.
//!
//! Maximises `log σ(u_c · v_o) + Σ_n log σ(-u_c · v_n)` for every
//! `(centre, context)` pair inside the window, with `n` drawn from the
//! corpus unigram distribution raised to the 3/4 power. The learning rate
//! decays linearly over all epochs down to `min_learning_rate`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alias::AliasTable;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{NodeId, TxGraph};
use crate::scalar::Real;
use crate::seed;
use crate::walk::{generate_walks, WalkParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    /// Single-threaded; bit-reproducible for a fixed seed.
    #[default]
    Deterministic,
    /// Workers update shared parameters without synchronisation.
    /// Results vary between runs.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub dimension: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
    pub mode: TrainMode,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            dimension: 32,
            window: 10,
            negative_samples: 5,
            epochs: 1,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            seed: 0,
            mode: TrainMode::Deterministic,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.window == 0 || self.epochs == 0 {
            return Err(Error::InvalidParam(
                "dimension, window and epochs must be at least 1".into(),
            ));
        }
        if !(self.learning_rate >= 0.0 && self.min_learning_rate >= 0.0) {
            return Err(Error::InvalidParam("learning rates must be non-negative".into()));
        }
        Ok(())
    }

    fn learning_rate_at(&self, progress: f64) -> f64 {
        let floor = self.min_learning_rate.min(self.learning_rate);
        (self.learning_rate * (1.0 - progress)).max(floor)
    }
}

/// Sampled objective before training and after each epoch.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub initial_objective: f64,
    pub epoch_objectives: Vec<f64>,
}

/// Parameter storage the update step reads and writes, one row at a time.
trait Store<T> {
    fn load(&self, at: usize, out: &mut [T]);
    fn dot(&self, at: usize, x: &[T]) -> T;
    /// `grad += g · row; row += g · x`
    fn step(&mut self, at: usize, g: T, x: &[T], grad: &mut [T]);
    fn add(&mut self, at: usize, d: &[T]);
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    let mut f = acc.iter().fold(T::zero(), |s, &v| s + v);
    for (&x, &y) in ra.iter().zip(rb) {
        f = f + x * y;
    }
    f
}

impl<T: Real> Store<T> for Vec<T> {
    fn load(&self, at: usize, out: &mut [T]) {
        out.copy_from_slice(&self[at..at + out.len()]);
    }
    fn dot(&self, at: usize, x: &[T]) -> T {
        dot(&self[at..at + x.len()], x)
    }
    fn step(&mut self, at: usize, g: T, x: &[T], grad: &mut [T]) {
        let row = &mut self[at..at + x.len()];
        for ((r, &xi), gr) in row.iter_mut().zip(x).zip(grad.iter_mut()) {
            *gr = *gr + g * *r;
            *r = *r + g * xi;
        }
    }
    fn add(&mut self, at: usize, d: &[T]) {
        for (r, &di) in self[at..at + d.len()].iter_mut().zip(d) {
            *r = *r + di;
        }
    }
}

struct Shared<'a, T: Real>(&'a [T::Cell]);

impl<T: Real> Store<T> for Shared<'_, T> {
    fn load(&self, at: usize, out: &mut [T]) {
        for (o, c) in out.iter_mut().zip(&self.0[at..]) {
            *o = T::load(c);
        }
    }
    fn dot(&self, at: usize, x: &[T]) -> T {
        x.iter()
            .zip(&self.0[at..])
            .fold(T::zero(), |s, (&xi, c)| s + xi * T::load(c))
    }
    fn step(&mut self, at: usize, g: T, x: &[T], grad: &mut [T]) {
        for ((c, &xi), gr) in self.0[at..].iter().zip(x).zip(grad.iter_mut()) {
            let r = T::load(c);
            *gr = *gr + g * r;
            T::store(c, r + g * xi);
        }
    }
    fn add(&mut self, at: usize, d: &[T]) {
        for (c, &di) in self.0[at..].iter().zip(d) {
            T::store(c, T::load(c) + di);
        }
    }
}

fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

fn log_sigmoid(x: f64) -> f64 {
    // log σ(x) = -log(1 + e^{-x}), stable for both signs
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// One gradient step for input row `input` against `targets`
/// (`true` = observed context, `false` = negative).
#[allow(clippy::too_many_arguments)]
fn update<T: Real, S: Store<T>>(
    syn0: &mut S,
    syn1: &mut S,
    dim: usize,
    input: NodeId,
    targets: &[(NodeId, bool)],
    lr: T,
    row: &mut [T],
    grad: &mut [T],
) {
    grad.fill(T::zero());
    let i0 = input * dim;
    syn0.load(i0, row);
    for &(t, label) in targets {
        let t0 = t * dim;
        let f = syn1.dot(t0, row);
        let y = if label { T::one() } else { T::zero() };
        let g = (y - sigmoid(f)) * lr;
        syn1.step(t0, g, row, grad);
    }
    syn0.add(i0, grad);
}

struct Corpus<'a> {
    walks: &'a [Vec<NodeId>],
    tokens: usize,
    noise: AliasTable,
}

impl<'a> Corpus<'a> {
    fn new(walks: &'a [Vec<NodeId>], node_count: usize) -> Result<Self> {
        let mut counts = vec![0u64; node_count];
        for w in walks {
            for &v in w {
                *counts.get_mut(v).ok_or(Error::UnknownNode(v))? += 1;
            }
        }
        let tokens = walks.iter().map(Vec::len).sum();
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let noise = AliasTable::new(&weights).ok_or(Error::EmptyCorpus)?;
        Ok(Corpus { walks, tokens, noise })
    }
}

/// Trains over `walks` and tracks how many tokens have been consumed.
#[allow(clippy::too_many_arguments)]
fn train_walks<T: Real, S: Store<T>, R: Rng>(
    syn0: &mut S,
    syn1: &mut S,
    corpus: &Corpus<'_>,
    walks: &[Vec<NodeId>],
    params: &TrainParams,
    rng: &mut R,
    done: &mut usize,
    total: usize,
) {
    let dim = params.dimension;
    let mut grad = vec![T::zero(); dim];
    let mut row = vec![T::zero(); dim];
    let mut targets = Vec::with_capacity(params.negative_samples + 1);
    for walk in walks {
        let lr = T::from_f64_lossy(params.learning_rate_at(*done as f64 / total as f64));
        for (i, &centre) in walk.iter().enumerate() {
            let lo = i.saturating_sub(params.window);
            let hi = (i + params.window + 1).min(walk.len());
            for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                if j == i {
                    continue;
                }
                targets.clear();
                targets.push((centre, true));
                for _ in 0..params.negative_samples {
                    let n = corpus.noise.sample(rng);
                    if n != centre {
                        targets.push((n, false));
                    }
                }
                update(syn0, syn1, dim, context, &targets, lr, &mut row, &mut grad);
            }
        }
        *done += walk.len();
    }
}

/// Estimate of the training objective per pair on a fixed random sample of
/// pairs and negatives.
fn sampled_objective<T: Real>(syn0: &[T], syn1: &[T], corpus: &Corpus<'_>, params: &TrainParams) -> f64 {
    let dim = params.dimension;
    let mut rng = seed::stream_rng(params.seed, 2);
    let walks: Vec<&Vec<NodeId>> = corpus.walks.iter().filter(|w| w.len() > 1).collect();
    if walks.is_empty() {
        return 0.0;
    }
    let dot = |a: NodeId, b: NodeId| -> f64 {
        (0..dim)
            .map(|k| (syn0[a * dim + k] * syn1[b * dim + k]).to_f64_lossy())
            .sum()
    };
    let samples = 2000;
    let mut total = 0.0;
    for _ in 0..samples {
        let w = walks[rng.random_range(0..walks.len())];
        let i = rng.random_range(0..w.len());
        let lo = i.saturating_sub(params.window);
        let hi = (i + params.window).min(w.len() - 1);
        let mut j = rng.random_range(lo..hi);
        if j >= i {
            j += 1;
        }
        total += log_sigmoid(dot(w[j], w[i]));
        for _ in 0..params.negative_samples {
            total += log_sigmoid(-dot(w[j], corpus.noise.sample(&mut rng)));
        }
    }
    total / samples as f64
}

/// Input vectors before any update: uniform in `[-0.5/d, 0.5/d]`.
pub fn initial_embedding<T: Real>(node_count: usize, params: &TrainParams) -> EmbeddingMatrix<T> {
    let dim = params.dimension;
    let mut rng = seed::stream_rng(params.seed, 0);
    let half = 0.5 / dim as f64;
    let data = (0..node_count * dim)
        .map(|_| T::from_f64_lossy(rng.random_range(-half..=half)))
        .collect();
    EmbeddingMatrix::from_rows(node_count, dim, data).expect("shape")
}

pub fn train_embedding<T: Real>(
    walks: &[Vec<NodeId>],
    params: &TrainParams,
    node_count: usize,
) -> Result<EmbeddingMatrix<T>> {
    train_embedding_with_report(walks, params, node_count).map(|r| r.0)
}

pub fn train_embedding_with_report<T: Real>(
    walks: &[Vec<NodeId>],
    params: &TrainParams,
    node_count: usize,
) -> Result<(EmbeddingMatrix<T>, TrainReport)> {
    params.validate()?;
    if walks.iter().all(Vec::is_empty) {
        return Err(Error::EmptyCorpus);
    }
    let corpus = Corpus::new(walks, node_count)?;
    let dim = params.dimension;
    let mut syn0 = initial_embedding::<T>(node_count, params).into_vec();
    let mut syn1 = vec![T::zero(); node_count * dim];
    let mut report = TrainReport {
        initial_objective: sampled_objective(&syn0, &syn1, &corpus, params),
        epoch_objectives: Vec::with_capacity(params.epochs),
    };
    let total = corpus.tokens * params.epochs;

    match params.mode {
        TrainMode::Deterministic => {
            let mut rng = seed::stream_rng(params.seed, 1);
            let mut done = 0;
            for _ in 0..params.epochs {
                train_walks(&mut syn0, &mut syn1, &corpus, walks, params, &mut rng, &mut done, total);
                report
                    .epoch_objectives
                    .push(sampled_objective(&syn0, &syn1, &corpus, params));
            }
        }
        TrainMode::Parallel => {
            let cells0: Vec<T::Cell> = syn0.iter().map(|&x| T::new_cell(x)).collect();
            let cells1: Vec<T::Cell> = syn1.iter().map(|&x| T::new_cell(x)).collect();
            let workers = rayon::current_num_threads().max(1);
            let chunk = walks.len().div_ceil(workers).max(1);
            for epoch in 0..params.epochs {
                walks.par_chunks(chunk).enumerate().for_each(|(w, part)| {
                    let mut rng = seed::stream_rng(params.seed, 16 + (epoch * workers + w) as u64);
                    // each worker sees its share of the schedule
                    let share = part.iter().map(Vec::len).sum::<usize>() * params.epochs;
                    let mut done = epoch * share / params.epochs;
                    let (mut s0, mut s1) = (Shared::<T>(&cells0), Shared::<T>(&cells1));
                    train_walks(&mut s0, &mut s1, &corpus, part, params, &mut rng, &mut done, share.max(1));
                });
                syn0 = cells0.iter().map(T::load).collect();
                syn1 = cells1.iter().map(T::load).collect();
                report
                    .epoch_objectives
                    .push(sampled_objective(&syn0, &syn1, &corpus, params));
            }
        }
    }
    let m = EmbeddingMatrix::from_rows(node_count, dim, syn0)?;
    Ok((m, report))
}

/// Walks then trains: the full embedding of `g` for one `(p, q)` setting.
pub fn embed<T: Real>(g: &TxGraph, walk: &WalkParams, train: &TrainParams) -> Result<EmbeddingMatrix<T>> {
    let walks = generate_walks(g, walk)?;
    train_embedding(&walks, train, g.node_count())
}
