#![allow(dead_code)]

use isac_core::channel::{names::*, DistortionTable, MacChannelSpec, TwoWayChannelSpec};
use isac_core::mac::AuxMacScheme;
use isac_core::prob::{compose, CondKernel, JointPmf, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bit(n: &str) -> Var {
    Var::new(n, 2)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Kernel with rows drawn uniformly from the simplex interior.
pub fn random_kernel(rng: &mut ChaCha8Rng, outputs: Vec<Var>, inputs: Vec<Var>) -> CondKernel {
    let out: usize = outputs.iter().map(|v| v.card).product();
    let inp: usize = inputs.iter().map(|v| v.card).product();
    let mut t = Vec::with_capacity(out * inp);
    for _ in 0..inp {
        let row: Vec<f64> = (0..out).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = row.iter().sum();
        t.extend(row.iter().map(|p| p / s));
    }
    CondKernel::new(outputs, inputs, t).unwrap()
}

pub fn random_pmf(rng: &mut ChaCha8Rng, vars: Vec<Var>) -> JointPmf {
    compose(&[&random_kernel(rng, vars, vec![])]).unwrap()
}

/// Pmf from raw nonnegative weights, normalized.
pub fn pmf_from_weights(vars: Vec<Var>, w: &[f64]) -> JointPmf {
    let s: f64 = w.iter().sum();
    JointPmf::new(vars, w.iter().map(|x| x / s).collect()).unwrap()
}

pub fn random_binary_mac(rng: &mut ChaCha8Rng) -> MacChannelSpec {
    let states = random_pmf(rng, vec![bit(S1), bit(S2)]);
    let kernel = random_kernel(rng, vec![bit(Y), bit(Z1), bit(Z2)], vec![bit(X1), bit(X2), bit(S1), bit(S2)]);
    MacChannelSpec::new(states, kernel, DistortionTable::hamming(2), DistortionTable::hamming(2)).unwrap()
}

pub fn random_binary_two_way(rng: &mut ChaCha8Rng) -> TwoWayChannelSpec {
    let states = random_pmf(rng, vec![bit(S1), bit(S2)]);
    let kernel = random_kernel(rng, vec![bit(Z1), bit(Z2)], vec![bit(X1), bit(X2), bit(S1), bit(S2)]);
    TwoWayChannelSpec::new(states, kernel, DistortionTable::hamming(2), DistortionTable::hamming(2)).unwrap()
}

/// Binary auxiliaries; without compression the V's are constants.
pub fn random_binary_aux(rng: &mut ChaCha8Rng, compress: bool) -> AuxMacScheme {
    let mut v = |out: &str, ins: [&str; 4]| {
        if compress {
            random_kernel(rng, vec![bit(out)], ins.map(bit).to_vec())
        } else {
            CondKernel::from_fn(vec![Var::new(out, 1)], ins.map(bit).to_vec(), |_, _| 1.0).unwrap()
        }
    };
    let v1 = v(V1, [U0, U2, X1, Z1]);
    let v2 = v(V2, [U0, U1, X2, Z2]);
    AuxMacScheme::new(
        random_kernel(rng, vec![bit(U0)], vec![]),
        random_kernel(rng, vec![bit(U1)], vec![bit(U0)]),
        random_kernel(rng, vec![bit(U2)], vec![bit(U0)]),
        random_kernel(rng, vec![bit(X1)], vec![bit(U0), bit(U1)]),
        random_kernel(rng, vec![bit(X2)], vec![bit(U0), bit(U2)]),
        Some(v1),
        Some(v2),
    )
    .unwrap()
}
