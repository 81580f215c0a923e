//! Level parameters and randomized center sampling.
//!
//! A hierarchy has `k` levels with center densities `c_1 >= ... >= c_k` and
//! depths `h_1 <= ... <= h_k`. Level-`i` centers are sampled with
//! probability `min(1, a c_i ln n / n)` and nested so that
//! `C_1 ⊇ C_2 ⊇ ... ⊇ C_k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Node, NodeSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("derived parameters need n >= 4, got n = {0}")]
    TooFewNodes(usize),
    #[error("b = {b} exceeds c = {c}")]
    BAboveC { b: f64, c: f64 },
    #[error("b = {0} must be at least 1")]
    BBelowOne(f64),
    #[error("c = {c} exceeds n = {n}")]
    CAboveN { c: f64, n: usize },
    #[error("explicit c-sequence is empty")]
    EmptySequence,
    #[error("explicit c-sequence must be non-increasing and >= 1, got {0:?}")]
    BadSequence(Vec<f64>),
    #[error("sampling constant a = {0} must be positive")]
    BadConstant(f64),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: Node, n: usize },
}

/// The two parameter settings that balance the update-time terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `b = n^{5/3} / m^{2/3}`, `c = n^{4/3} / m^{1/3}`.
    Sparse,
    /// `b = n^{9/7} / m^{3/7}`, `c = m^{1/7} n^{4/7}`.
    Dense,
    /// Whichever of the two has the smaller bound: `Sparse` iff `m <= n^{1.6}`.
    Auto,
}

impl Preset {
    /// `(b, c)` for the given graph size, clamped to `1 <= b <= c <= n`.
    pub fn values(self, n: usize, m: usize) -> (f64, f64) {
        let (nf, mf) = (n as f64, (m.max(1)) as f64);
        let which = match self {
            Preset::Auto if mf <= nf.powf(1.6) => Preset::Sparse,
            Preset::Auto => Preset::Dense,
            p => p,
        };
        let (b, c) = match which {
            Preset::Sparse => (nf.powf(5.0 / 3.0) / mf.powf(2.0 / 3.0), nf.powf(4.0 / 3.0) / mf.powf(1.0 / 3.0)),
            _ => (nf.powf(9.0 / 7.0) / mf.powf(3.0 / 7.0), mf.powf(1.0 / 7.0) * nf.powf(4.0 / 7.0)),
        };
        let c = c.clamp(1.0, nf);
        (b.clamp(1.0, c), c)
    }
}

/// Where the level densities come from.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSource {
    Preset(Preset),
    Tuned {
        b: f64,
        c: f64,
    },
    /// Explicit `c_1, ..., c_k`; `k` is the length.
    Explicit(Vec<f64>),
}

impl Default for ParamSource {
    fn default() -> Self {
        ParamSource::Preset(Preset::Auto)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub b: f64,
    pub c_target: f64,
    /// `2^{sqrt(log n log log n)}`; ratio between consecutive raw densities.
    pub step: f64,
    /// `c_i` before capping at `n`.
    pub c_raw: Vec<f64>,
    /// `c_i` capped at `n`.
    pub c: Vec<f64>,
    /// `(3 + log2 m)^{i-1} n / c_1`, with the capped `c_1`.
    pub h_raw: Vec<f64>,
    /// `ceil(h_raw)` clamped to `[1, n]`.
    pub h: Vec<u32>,
    pub a: f64,
    pub seed: u64,
}

impl HierarchyParams {
    /// Depth for level `i` (1-based).
    pub fn depth(&self, i: usize) -> u32 {
        self.h[i - 1]
    }

    /// Density for level `i` (1-based), capped at `n`.
    pub fn density(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    /// Sampling probability for level `i` (1-based).
    pub fn probability(&self, i: usize) -> f64 {
        sampling_probability(self.n, self.c[i - 1], self.a)
    }

    /// `n / c_{l+1}`: expected size bound for a level-`l` path union.
    pub fn q_size_bound(&self, l: usize) -> f64 {
        self.n as f64 / self.c[l]
    }
}

/// `min(1, a c ln n / n)`.
pub fn sampling_probability(n: usize, c: f64, a: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (a * c * (n as f64).ln() / n as f64).min(1.0)
}

/// `2^{sqrt(log n log log n)}` for `n >= 4`.
pub fn level_step(n: usize) -> f64 {
    let lg = (n as f64).log2();
    2f64.powf((lg * lg.log2()).sqrt())
}

/// Derives `k`, the density sequence and the depth sequence from `(b, c)`.
pub fn derive_parameters(
    n: usize,
    m: usize,
    b: f64,
    c_target: f64,
    a: f64,
    seed: u64,
) -> Result<HierarchyParams, ParamError> {
    if n < 4 {
        return Err(ParamError::TooFewNodes(n));
    }
    if a.is_nan() || a <= 0.0 {
        return Err(ParamError::BadConstant(a));
    }
    if b < 1.0 {
        return Err(ParamError::BBelowOne(b));
    }
    if b > c_target {
        return Err(ParamError::BAboveC { b, c: c_target });
    }
    if c_target > n as f64 {
        return Err(ParamError::CAboveN { c: c_target, n });
    }
    let step = level_step(n);
    let k_max = ((n as f64).log2().floor() as usize).max(1);
    let k = (((c_target / b).log2() / step.log2()).ceil() as usize + 1).min(k_max);
    let mut c_raw = vec![b; k];
    for i in (0..k - 1).rev() {
        c_raw[i] = c_raw[i + 1] * step;
    }
    Ok(finish(n, m, k, b, c_target, step, c_raw, a, seed))
}

/// Builds parameters from an explicit density sequence `c_1 >= ... >= c_k`.
pub fn explicit_parameters(
    n: usize,
    m: usize,
    c_seq: &[f64],
    a: f64,
    seed: u64,
) -> Result<HierarchyParams, ParamError> {
    if c_seq.is_empty() {
        return Err(ParamError::EmptySequence);
    }
    if a.is_nan() || a <= 0.0 {
        return Err(ParamError::BadConstant(a));
    }
    if c_seq.iter().any(|&c| c.is_nan() || c < 1.0) || c_seq.windows(2).any(|w| w[0] < w[1]) {
        return Err(ParamError::BadSequence(c_seq.to_vec()));
    }
    let k = c_seq.len();
    let step = if k > 1 { c_seq[0] / c_seq[1] } else { 1.0 };
    Ok(finish(n, m, k, c_seq[k - 1], c_seq[0], step, c_seq.to_vec(), a, seed))
}

/// Resolves a [`ParamSource`] for a graph with `n` nodes and `m` edges.
pub fn resolve(src: &ParamSource, n: usize, m: usize, a: f64, seed: u64) -> Result<HierarchyParams, ParamError> {
    match src {
        ParamSource::Preset(p) => {
            if n < 4 {
                return Err(ParamError::TooFewNodes(n));
            }
            let (b, c) = p.values(n, m);
            derive_parameters(n, m, b, c, a, seed)
        }
        ParamSource::Tuned { b, c } => derive_parameters(n, m, *b, *c, a, seed),
        ParamSource::Explicit(seq) => explicit_parameters(n, m, seq, a, seed),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: usize,
    m: usize,
    k: usize,
    b: f64,
    c_target: f64,
    step: f64,
    c_raw: Vec<f64>,
    a: f64,
    seed: u64,
) -> HierarchyParams {
    let c: Vec<f64> = c_raw.iter().map(|&x| x.min(n as f64)).collect();
    let ratio = 3.0 + (m.max(1) as f64).log2();
    let h_raw: Vec<f64> = (0..k).map(|i| ratio.powi(i as i32) * n as f64 / c[0]).collect();
    let h = h_raw.iter().map(|&x| (x.ceil().min(n as f64) as u32).max(1)).collect();
    HierarchyParams { n, m, k, b, c_target, step, c_raw, c, h_raw, h, a, seed }
}

/// The nested center sets.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterSets {
    /// `levels[i - 1] = C_i`.
    pub levels: Vec<NodeSet>,
    pub forced: NodeSet,
    level_of: Vec<u8>,
}

impl CenterSets {
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    /// Largest `i` with `v ∈ C_i`, or 0 if `v` is not a center.
    pub fn level(&self, v: Node) -> usize {
        self.level_of[v as usize] as usize
    }

    /// `C_i` (1-based).
    pub fn set(&self, i: usize) -> &NodeSet {
        &self.levels[i - 1]
    }
}

/// Samples `C_1 ⊇ ... ⊇ C_k` with the RNG seeded by `p.seed`; `forced` is
/// added to `C_1`.
pub fn sample_centers(n: usize, p: &HierarchyParams, forced: &NodeSet) -> Result<CenterSets, ParamError> {
    if let Some(v) = forced.iter().find(|&v| v as usize >= n) {
        return Err(ParamError::NodeOutOfRange { node: v, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut levels: Vec<NodeSet> = (1..=p.k)
        .map(|i| {
            let prob = sampling_probability(n, p.c[i - 1], p.a);
            NodeSet::from_nodes(n, (0..n as Node).filter(|_| rng.gen_bool(prob)))
        })
        .collect();
    for i in (0..p.k - 1).rev() {
        let upper: Vec<Node> = levels[i + 1].iter().collect();
        for v in upper {
            levels[i].insert(v);
        }
    }
    for v in forced.iter() {
        levels[0].insert(v);
    }
    let mut level_of = vec![0u8; n];
    for (i, set) in levels.iter().enumerate() {
        for v in set.iter() {
            level_of[v as usize] = (i + 1) as u8;
        }
    }
    Ok(CenterSets { levels, forced: forced.clone(), level_of })
}

/// Samples each of `0..t` with probability `p` and reports whether every set
/// in `sets` contains a sampled element.
pub fn hitting_set_check<R: Rng>(t: usize, sets: &[Vec<usize>], p: f64, rng: &mut R) -> bool {
    let p = p.clamp(0.0, 1.0);
    let sampled: Vec<bool> = (0..t).map(|_| rng.gen_bool(p)).collect();
    sets.iter().all(|s| s.iter().any(|&e| sampled[e]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_parameters() {
        let (n, m) = (1024usize, 32768usize);
        let (b, c) = Preset::Sparse.values(n, m);
        assert!((b - 101.59).abs() < 0.01, "{b}");
        assert!((c - 322.54).abs() < 0.01, "{c}");
        let p = derive_parameters(n, m, b, c, 2.0, 0).unwrap();
        assert_eq!(p.k, 2);
        assert!(p.c_raw[0] >= c);
        assert!(p.c_raw[0] <= p.step * c * (1.0 + 1e-12));
    }

    #[test]
    fn equal_b_and_c_gives_one_level() {
        let p = derive_parameters(100, 500, 10.0, 10.0, 2.0, 0).unwrap();
        assert_eq!(p.k, 1);
        assert_eq!(p.c, vec![10.0]);
        assert_eq!(p.h, vec![10]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(derive_parameters(3, 3, 1.0, 2.0, 2.0, 0), Err(ParamError::TooFewNodes(3)));
        assert!(matches!(derive_parameters(100, 100, 20.0, 10.0, 2.0, 0), Err(ParamError::BAboveC { .. })));
        assert!(matches!(explicit_parameters(10, 10, &[2.0, 3.0], 2.0, 0), Err(ParamError::BadSequence(_))));
        assert_eq!(explicit_parameters(10, 10, &[], 2.0, 0), Err(ParamError::EmptySequence));
    }

    #[test]
    fn explicit_sequence_depths() {
        // m = 32: log2 m = 5, ratio 8; c_1 = 10 capped to n = 10 gives h_1 = 1
        let p = explicit_parameters(10, 32, &[10.0, 3.0, 1.0], 2.0, 0).unwrap();
        assert_eq!(p.k, 3);
        assert_eq!(p.h, vec![1, 8, 10]);
        assert_eq!(p.h_raw, vec![1.0, 8.0, 64.0]);
    }

    #[test]
    fn saturated_probability_takes_everything() {
        let p = explicit_parameters(50, 100, &[50.0], 2.0, 7).unwrap();
        let cs = sample_centers(50, &p, &NodeSet::empty(50)).unwrap();
        assert_eq!(cs.set(1).len(), 50);
    }

    #[test]
    fn forced_nodes_always_in_first_level() {
        let p = explicit_parameters(200, 400, &[1.0], 0.01, 3).unwrap();
        let forced = NodeSet::from_nodes(200, [0, 199]);
        let cs = sample_centers(200, &p, &forced).unwrap();
        assert!(cs.set(1).contains(0) && cs.set(1).contains(199));
        assert!(sample_centers(10, &p, &NodeSet::from_nodes(200, [150])).is_err());
    }

    #[test]
    fn mean_center_count_matches_expectation() {
        let n = 400;
        let p0 = explicit_parameters(n, 1000, &[20.0, 5.0], 2.0, 0).unwrap();
        let pr = [p0.probability(1), p0.probability(2)];
        // |C_2| ~ Bin(n, p2); |C_1| = |S_1 ∪ S_2| ~ Bin(n, 1 - (1-p1)(1-p2))
        let q1 = 1.0 - (1.0 - pr[0]) * (1.0 - pr[1]);
        let expect = [n as f64 * q1, n as f64 * pr[1]];
        let var = [n as f64 * q1 * (1.0 - q1), n as f64 * pr[1] * (1.0 - pr[1])];
        let trials = 100;
        let mut sums = [0f64; 2];
        for seed in 0..trials {
            let p = HierarchyParams { seed, ..p0.clone() };
            let cs = sample_centers(n, &p, &NodeSet::empty(n)).unwrap();
            sums[0] += cs.set(1).len() as f64;
            sums[1] += cs.set(2).len() as f64;
        }
        for i in 0..2 {
            let mean = sums[i] / trials as f64;
            let se = (var[i] / trials as f64).sqrt();
            assert!((mean - expect[i]).abs() <= 3.0 * se, "level {}: {mean} vs {}", i + 1, expect[i]);
        }
    }

    #[test]
    fn hitting_set_misses_unsampled_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(!hitting_set_check(8, &[vec![0, 1]], 0.0, &mut rng));
        assert!(hitting_set_check(8, &[vec![0, 1], vec![7]], 1.0, &mut rng));
    }

    #[test]
    fn hitting_whole_universe() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = 64;
        let p = 2.0 * (t as f64).ln() / t as f64;
        let all: Vec<usize> = (0..t).collect();
        let misses = (0..100).filter(|_| !hitting_set_check(t, std::slice::from_ref(&all), p, &mut rng)).count();
        assert_eq!(misses, 0);
    }

    proptest! {
        #[test]
        fn derived_invariants(n in 4usize..5000, dens in 1.0f64..2.0, bf in 0.0f64..1.0, cf in 0.0f64..1.0) {
            let m = ((n as f64).powf(dens) as usize).max(1);
            let c = 1.0 + cf * (n as f64 - 1.0);
            let b = 1.0 + bf * (c - 1.0);
            let p = derive_parameters(n, m, b, c, 2.0, 0).unwrap();
            prop_assert!(p.k >= 1 && p.k as f64 <= (n as f64).log2().max(1.0));
            prop_assert_eq!(p.c_raw[p.k - 1], b);
            for i in 0..p.k - 1 {
                prop_assert!((p.c_raw[i] / p.c_raw[i + 1] - p.step).abs() < 1e-9 * p.step);
                let r = p.h_raw[i + 1] / p.h_raw[i];
                prop_assert!((r - (3.0 + (m as f64).log2())).abs() < 1e-9 * r);
                prop_assert!(p.h[i] <= p.h[i + 1]);
            }
            prop_assert!(p.h.iter().all(|&h| h >= 1 && h as usize <= n));
            prop_assert!(p.c.iter().all(|&c| c <= n as f64));
        }

        #[test]
        fn sampling_nests(seed in 0u64..1000, n in 4usize..300) {
            let p = explicit_parameters(n, n * 2, &[n as f64 / 4.0 + 1.0, 2.0, 1.0], 1.0, seed).unwrap();
            let cs = sample_centers(n, &p, &NodeSet::from_nodes(n, [0])).unwrap();
            for i in 1..p.k {
                prop_assert!(cs.set(i + 1).is_subset(cs.set(i)));
            }
            for v in 0..n as Node {
                let l = cs.level(v);
                prop_assert!(l == 0 || cs.set(l).contains(v));
                prop_assert!(l == p.k || !cs.set(l + 1).contains(v));
            }
            prop_assert_eq!(cs, sample_centers(n, &p, &NodeSet::from_nodes(n, [0])).unwrap());
        }
    }
}
