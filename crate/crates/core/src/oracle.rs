//! Ground truth by enumeration and simulation, working from raw key sets
//! only (never from the association tables).

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::design::DualDesign;
use crate::error::{Error, Result};
use crate::kps::{Kps, NodeId};
use crate::scheme::{SchemeMismatch, SchemeReport};

/// Default node-count limit for full enumeration.
pub const DEFAULT_CAP: u64 = 5000;

/// Reported with every estimate.
pub const ALGORITHM: &str = "chacha8/splitmix64-shards";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub shards: u32,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig { trials, seed, shards: 8 }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.shards == 0 {
            return Err(Error::param("shards", "need at least one shard"));
        }
        Ok(())
    }

    pub fn shard_seed(&self, shard: u32) -> u64 {
        splitmix64(self.seed ^ splitmix64(shard as u64 + 1))
    }

    pub fn shard_trials(&self, shard: u32) -> u64 {
        let shards = self.shards as u64;
        self.trials / shards + u64::from((shard as u64) < self.trials % shards)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
    pub shards: u32,
    pub algorithm: &'static str,
}

impl McEstimate {
    fn new(hits: u64, cfg: &McConfig) -> Self {
        let p = hits as f64 / cfg.trials as f64;
        McEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / cfg.trials as f64).sqrt(),
            hits,
            trials: cfg.trials,
            seed: cfg.seed,
            shards: cfg.shards,
            algorithm: ALGORITHM,
        }
    }

    /// Whether `target` lies within `k` standard errors. A zero standard
    /// error (all hits or none) requires the estimate to match exactly.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.stderr + 1e-12
    }
}

/// Sorted global key indices of a node.
fn keys(kps: &Kps, node: &NodeId) -> Vec<usize> {
    let mut ks: Vec<usize> = kps.node_keys(node).expect("valid node").into_iter().map(|k| kps.key_index(k)).collect();
    ks.sort_unstable();
    ks
}

fn shared(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn shared_count(a: &[usize], b: &[usize]) -> usize {
    shared(a, b).len()
}

fn check_cap(kps: &Kps, cap: u64) -> Result<()> {
    if kps.n() > cap {
        return Err(Error::OracleCap { n: kps.n(), cap });
    }
    Ok(())
}

fn all_keys(kps: &Kps) -> Vec<Vec<usize>> {
    (0..kps.n()).map(|i| keys(kps, &kps.node_at(i))).collect()
}

/// Fraction of node pairs sharing at least `q` keys, by enumeration.
pub fn exact_pr1(kps: &Kps, cap: u64) -> Result<BigRational> {
    check_cap(kps, cap)?;
    let ks = all_keys(kps);
    let q = kps.q();
    let linked: u64 = (0..ks.len())
        .into_par_iter()
        .map(|a| (a + 1..ks.len()).filter(|&b| shared_count(&ks[a], &ks[b]) >= q).count() as u64)
        .sum();
    let n = kps.n();
    Ok(BigRational::new(BigInt::from(linked), BigInt::from(n * (n - 1) / 2)))
}

/// Number of third nodes sharing at least `q` keys with both `a` and `b`.
pub fn exact_mu(kps: &Kps, a: &NodeId, b: &NodeId, cap: u64) -> Result<u64> {
    check_cap(kps, cap)?;
    let (ka, kb) = (keys(kps, a), keys(kps, b));
    let q = kps.q();
    Ok((0..kps.n())
        .map(|i| kps.node_at(i))
        .filter(|c| c != a && c != b)
        .filter(|c| {
            let kc = keys(kps, c);
            shared_count(&ka, &kc) >= q && shared_count(&kb, &kc) >= q
        })
        .count() as u64)
}

/// Indices of `count` distinct nodes other than `a` and `b`.
fn sample_others(rng: &mut ChaCha8Rng, n: u64, a: u64, b: u64, count: usize) -> Vec<u64> {
    let (lo, hi) = (a.min(b), a.max(b));
    sample(rng, (n - 2) as usize, count)
        .into_iter()
        .map(|i| {
            let mut i = i as u64;
            if i >= lo {
                i += 1;
            }
            if i >= hi {
                i += 1;
            }
            i
        })
        .collect()
}

fn sample_pair(rng: &mut ChaCha8Rng, n: u64) -> (u64, u64) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// One shard of [`mc_two_hop`]: returns the number of successes.
pub fn two_hop_shard(kps: &Kps, eta: usize, seed: u64, trials: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kps.n();
    let q = kps.q();
    let mut hits = 0;
    for _ in 0..trials {
        let (a, b) = sample_pair(&mut rng, n);
        let (ka, kb) = (keys(kps, &kps.node_at(a)), keys(kps, &kps.node_at(b)));
        let ok = shared_count(&ka, &kb) >= q
            || sample_others(&mut rng, n, a, b, eta).into_iter().any(|c| {
                let kc = keys(kps, &kps.node_at(c));
                shared_count(&ka, &kc) >= q && shared_count(&kb, &kc) >= q
            });
        hits += u64::from(ok);
    }
    hits
}

/// Estimate of `Pr_1 + Pr_2` with an exact (hypergeometric) neighbourhood:
/// a uniform pair, plus `eta` distinct uniform other nodes as its common
/// neighbourhood.
pub fn mc_two_hop(kps: &Kps, eta: u32, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    if eta as u64 > kps.n() - 2 {
        return Err(Error::param("eta", format!("at most n - 2 = {}", kps.n() - 2)));
    }
    let hits = (0..cfg.shards)
        .into_par_iter()
        .map(|s| two_hop_shard(kps, eta as usize, cfg.shard_seed(s), cfg.shard_trials(s)))
        .sum();
    Ok(McEstimate::new(hits, cfg))
}

/// One shard of [`mc_fail`]: returns the number of broken links.
pub fn fail_shard(kps: &Kps, s: usize, seed: u64, trials: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kps.n();
    let q = kps.q();
    let mut broken = 0;
    let mut exposed = vec![false; kps.v()];
    for _ in 0..trials {
        let (a, b, common) = loop {
            let (a, b) = sample_pair(&mut rng, n);
            let common = shared(&keys(kps, &kps.node_at(a)), &keys(kps, &kps.node_at(b)));
            if common.len() >= q {
                break (a, b, common);
            }
        };
        exposed.iter_mut().for_each(|e| *e = false);
        for c in sample_others(&mut rng, n, a, b, s) {
            for k in keys(kps, &kps.node_at(c)) {
                exposed[k] = true;
            }
        }
        broken += u64::from(common.iter().all(|&k| exposed[k]));
    }
    broken
}

/// Estimate of `fail(s)`: a uniform linked pair (by rejection), `s` uniform
/// other nodes compromised; the link is broken when every shared key is
/// held by some compromised node.
pub fn mc_fail(kps: &Kps, s: u32, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    if s as u64 > kps.n() - 2 {
        return Err(Error::param("s", format!("at most n - 2 = {}", kps.n() - 2)));
    }
    if kps.delta().is_empty() {
        return Err(Error::param("kps", "no pair shares q keys"));
    }
    let hits = (0..cfg.shards)
        .into_par_iter()
        .map(|sh| fail_shard(kps, s as usize, cfg.shard_seed(sh), cfg.shard_trials(sh)))
        .sum();
    Ok(McEstimate::new(hits, cfg))
}

/// Number of `s`-subsets of `others[from..]` whose key union, together
/// with `held`, covers `target`.
fn covering_subsets(others: &[u128], from: usize, s: usize, held: u128, target: u128) -> u128 {
    if held & target == target {
        return binomial((others.len() - from) as u128, s as u128);
    }
    if s == 0 || others.len() - from < s {
        return 0;
    }
    (from..=others.len() - s)
        .map(|i| covering_subsets(others, i + 1, s - 1, held | others[i], target))
        .sum()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `fail(s)` by enumerating every linked pair and every `s`-set of
/// compromised nodes. Needs `v <= 128` and at most `budget` pair/subset
/// combinations.
pub fn exact_fail(kps: &Kps, s: u32, budget: u128) -> Result<BigRational> {
    if kps.v() > 128 {
        return Err(Error::param("kps", "exhaustive fail(s) needs at most 128 keys"));
    }
    let n = kps.n();
    if s as u64 > n - 2 {
        return Err(Error::param("s", format!("at most n - 2 = {}", n - 2)));
    }
    let masks: Vec<u128> = (0..n)
        .map(|i| keys(kps, &kps.node_at(i)).into_iter().fold(0u128, |m, k| m | 1 << k))
        .collect();
    let q = kps.q() as u32;
    let pairs: Vec<(usize, usize)> = (0..n as usize)
        .flat_map(|a| (a + 1..n as usize).map(move |b| (a, b)))
        .filter(|&(a, b)| (masks[a] & masks[b]).count_ones() >= q)
        .collect();
    let per_pair = binomial(n as u128 - 2, s as u128);
    let work = per_pair.saturating_mul(pairs.len() as u128);
    if work > budget {
        return Err(Error::OracleCap { n, cap: (budget / per_pair.max(1)) as u64 });
    }
    let broken: u128 = pairs
        .par_iter()
        .map(|&(a, b)| {
            let others: Vec<u128> =
                (0..n as usize).filter(|&c| c != a && c != b).map(|c| masks[c]).collect();
            covering_subsets(&others, 0, s as usize, 0, masks[a] & masks[b])
        })
        .sum();
    Ok(BigRational::new(BigInt::from(broken), BigInt::from(per_pair * pairs.len() as u128)))
}

/// Recounts the block association of a dual from its raw blocks with a
/// direct triple loop and compares against the stored tables.
pub fn exhaustive_scheme_check(dd: &DualDesign) -> SchemeReport {
    let fail = |m| SchemeReport { mismatch: Some(m) };
    let b = dd.b();
    let mut class = vec![0u8; b * b];
    for x in 0..b {
        for y in 0..b {
            if x == y {
                continue;
            }
            let common = dd.block(x).iter().filter(|s| dd.block(y).contains(s)).count();
            if common > 1 {
                return fail(SchemeMismatch::ClassOutOfRange { x, y, class: common as u8 + 1 });
            }
            class[x * b + y] = common as u8 + 1;
        }
    }
    let mut theta = [0u64; 3];
    for y in 0..b {
        theta[class[y] as usize] += 1;
    }
    for j in 0..3 {
        if theta[j] != dd.theta()[j] {
            return fail(SchemeMismatch::Theta { j, stored: dd.theta()[j], counted: theta[j] });
        }
    }
    for x in 0..b {
        for y in 0..b {
            let j = class[x * b + y] as usize;
            let mut counted = [[0u64; 3]; 3];
            for z in 0..b {
                counted[class[x * b + z] as usize][class[y * b + z] as usize] += 1;
            }
            for (u, row) in counted.iter().enumerate() {
                for (w, &c) in row.iter().enumerate() {
                    let stored = dd.phi().get(j, u, w);
                    if c != stored {
                        return fail(SchemeMismatch::Phi { j, u, w, stored, counted: c });
                    }
                }
            }
        }
    }
    SchemeReport { mismatch: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_kps;
    use crate::metrics::pr1;

    #[test]
    fn toy_exact_pr1_matches_formula() {
        let kps = toy_kps();
        assert_eq!(exact_pr1(&kps, DEFAULT_CAP).unwrap(), pr1::<BigRational>(&kps));
        assert!(matches!(exact_pr1(&kps, 10), Err(Error::OracleCap { n: 54, cap: 10 })));
    }

    #[test]
    fn toy_exact_mu() {
        let kps = toy_kps();
        let (a, b) = (kps.node(&[0, 0]).unwrap(), kps.node(&[2, 3]).unwrap());
        assert_eq!(exact_mu(&kps, &a, &b, DEFAULT_CAP).unwrap(), 29);
    }

    #[test]
    fn shard_merge_is_deterministic() {
        let kps = toy_kps();
        let cfg = McConfig { trials: 2000, seed: 7, shards: 3 };
        let merged = mc_fail(&kps, 2, &cfg).unwrap();
        let manual: u64 = (0..3).map(|s| fail_shard(&kps, 2, cfg.shard_seed(s), cfg.shard_trials(s))).sum();
        assert_eq!(merged.hits, manual);
        assert_eq!(merged, mc_fail(&kps, 2, &cfg).unwrap());
        assert_eq!((0..3).map(|s| cfg.shard_trials(s)).sum::<u64>(), 2000);
    }

    #[test]
    fn degenerate_parameters() {
        let kps = toy_kps();
        let cfg = McConfig::new(500, 1);
        assert_eq!(mc_fail(&kps, 0, &cfg).unwrap().hits, 0);
        let direct = mc_two_hop(&kps, 0, &cfg).unwrap();
        assert!(direct.within(37.0 / 53.0, 4.0));
        assert!(mc_two_hop(&kps, 53, &cfg).is_err());
        assert!(mc_fail(&kps, 1, &McConfig { trials: 0, seed: 1, shards: 1 }).is_err());
    }

    #[test]
    fn exhaustive_fail_matches_binomial_form_below_min_k() {
        use crate::metrics::{fail_s, FailMode};
        let kps = toy_kps();
        for s in [0, 1, 2] {
            let exact = exact_fail(&kps, s, 1 << 32).unwrap();
            assert_eq!(exact, fail_s::<BigRational>(&kps, s, FailMode::Exact).unwrap().value, "s = {s}");
        }
        assert!(exact_fail(&kps, 3, 1000).is_err());
    }

    #[test]
    fn scheme_check_catches_tampering() {
        let kps = toy_kps();
        for dd in kps.duals() {
            assert!(exhaustive_scheme_check(dd).is_pass());
        }
        let bad = kps.duals()[1].clone().with_phi_cell(2, 2, 2, 6);
        assert!(matches!(
            exhaustive_scheme_check(&bad).mismatch,
            Some(SchemeMismatch::Phi { j: 2, u: 2, w: 2, stored: 6, counted: 7 })
        ));
    }
}
