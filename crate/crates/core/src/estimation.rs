//! Bayes-optimal symbol-wise state estimators and their distortion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::DistortionTable;
use crate::error::{Error, Result};
use crate::prob::{product, JointPmf, Var};

/// Posterior costs within this distance of the minimum count as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Samples per independently seeded shard in [`simulate_distortion`].
pub const SHARD_SIZE: u64 = 1 << 16;

/// A deterministic map from observation tuples to reconstruction symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorTable {
    pub obs_vars: Vec<Var>,
    pub target: Var,
    pub recon_card: usize,
    /// Reconstruction symbol per observation tuple (row-major over `obs_vars`).
    pub map: Vec<usize>,
}

impl EstimatorTable {
    pub fn obs_names(&self) -> Vec<&str> {
        self.obs_vars.iter().map(|v| v.name.as_str()).collect()
    }
}

/// Exact and, optionally, simulated expected distortion.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub exact: f64,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: u64,
}

fn obs_state_marginal(joint: &JointPmf, obs: &[&str], state: &str) -> Result<JointPmf> {
    if obs.contains(&state) {
        return Err(Error::OverlappingSets(state.to_string()));
    }
    let mut order = obs.to_vec();
    order.push(state);
    joint.reorder(&order)
}

fn best_symbol(weights: &[f64], d: &DistortionTable) -> usize {
    let total: f64 = weights.iter().sum();
    let costs: Vec<f64> = (0..d.recon_card())
        .map(|r| {
            weights
                .iter()
                .enumerate()
                .map(|(s, w)| w / total * d.get(s, r))
                .sum()
        })
        .collect();
    let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    costs
        .iter()
        .position(|&c| c <= min + TIE_TOL)
        .expect("nonempty reconstruction alphabet")
}

/// Builds argmin_ŝ Σ_s P(s | obs) d(s, ŝ) for every observation tuple.
///
/// Ties go to the smallest reconstruction index. Observation tuples of
/// probability zero get the unconditional Bayes-optimal symbol.
pub fn optimal_estimator(
    joint: &JointPmf,
    obs: &[&str],
    state: &str,
    d: &DistortionTable,
) -> Result<EstimatorTable> {
    let m = obs_state_marginal(joint, obs, state)?;
    let ns = m.vars().last().expect("state present").card;
    if ns != d.state_card() {
        return Err(Error::CardinalityMismatch(format!(
            "`{state}` has {ns} symbols but the distortion table expects {}",
            d.state_card()
        )));
    }
    let prior: Vec<f64> = (0..ns)
        .map(|s| m.table().iter().skip(s).step_by(ns).sum())
        .collect();
    let fallback = best_symbol(&prior, d);
    let map = m
        .table()
        .chunks(ns)
        .map(|w| {
            if w.iter().sum::<f64>() > 0.0 {
                best_symbol(w, d)
            } else {
                fallback
            }
        })
        .collect();
    Ok(EstimatorTable {
        obs_vars: m.vars()[..obs.len()].to_vec(),
        target: m.vars()[obs.len()].clone(),
        recon_card: d.recon_card(),
        map,
    })
}

/// Σ P(s, obs) d(s, est(obs)).
pub fn expected_distortion(joint: &JointPmf, est: &EstimatorTable, d: &DistortionTable) -> Result<f64> {
    let obs = est.obs_names();
    let m = obs_state_marginal(joint, &obs, &est.target.name)?;
    check_shapes(&m, est)?;
    let ns = est.target.card;
    Ok(m.table()
        .chunks(ns)
        .zip(&est.map)
        .map(|(w, &r)| w.iter().enumerate().map(|(s, p)| p * d.get(s, r)).sum::<f64>())
        .sum())
}

fn check_shapes(m: &JointPmf, est: &EstimatorTable) -> Result<()> {
    let n = est.obs_vars.len();
    if m.vars()[..n] != est.obs_vars[..] || m.vars()[n] != est.target {
        return Err(Error::CardinalityMismatch(
            "estimator alphabets differ from the joint law".into(),
        ));
    }
    if est.map.len() != product(&est.obs_vars.iter().map(|v| v.card).collect::<Vec<_>>()) {
        return Err(Error::CardinalityMismatch("estimator table is not total".into()));
    }
    Ok(())
}

/// Optimal estimator and its exact distortion in one call.
pub fn optimal_distortion(
    joint: &JointPmf,
    obs: &[&str],
    state: &str,
    d: &DistortionTable,
) -> Result<(EstimatorTable, f64)> {
    let est = optimal_estimator(joint, obs, state, d)?;
    let e = expected_distortion(joint, &est, d)?;
    Ok((est, e))
}

/// Draws `n` i.i.d. samples of (obs, state) from `joint` and averages the
/// distortion of `est`.
///
/// Sampling inverts the cumulative distribution of the flattened
/// (obs, state) table. Samples are split into shards of [`SHARD_SIZE`];
/// shard `i` uses ChaCha8 seeded with `seed` on stream `i`, so the result
/// does not depend on the number of worker threads.
pub fn simulate_distortion(
    joint: &JointPmf,
    est: &EstimatorTable,
    d: &DistortionTable,
    n: u64,
    seed: u64,
) -> Result<DistortionReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let obs = est.obs_names();
    let m = obs_state_marginal(joint, &obs, &est.target.name)?;
    check_shapes(&m, est)?;
    let exact = expected_distortion(joint, est, d)?;
    let ns = est.target.card;
    let cost: Vec<f64> = (0..m.table().len())
        .map(|i| d.get(i % ns, est.map[i / ns]))
        .collect();
    let mut cdf: Vec<f64> = m
        .table()
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    // Guard against the last cumulative value landing just below 1.
    if let Some(top) = m.table().iter().rposition(|&p| p > 0.0) {
        cdf[top..].fill(f64::INFINITY);
    }

    let shards = n.div_ceil(SHARD_SIZE);
    let partial: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let count = SHARD_SIZE.min(n - i * SHARD_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let u: f64 = rng.gen();
                let k = cdf.partition_point(|&c| c <= u);
                let c = cost[k];
                s += c;
                s2 += c * c;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum2) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, s2)| (a + s, b + s2));
    let nf = n as f64;
    let mean = sum / nf;
    let stderr = if n > 1 {
        let var = ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Ok(DistortionReport {
        exact,
        empirical: Some(mean),
        stderr: Some(stderr),
        samples: n,
    })
}
