//! Built-in channels and schemes of the three worked examples.

use crate::channel::{embed_rx_state_info, names::*, DistortionTable, MacChannelSpec, TwoWayChannelSpec};
use crate::d2d::HanScheme;
use crate::error::{Error, Result};
use crate::mac::AuxMacScheme;
use crate::prob::{CondKernel, JointPmf, Var};

fn bit(name: &str) -> Var {
    Var::new(name, 2)
}

fn unit(name: &str) -> Var {
    Var::new(name, 1)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {p} outside [0, 1]")))
    }
}

/// Binary flip: P(out | in) = 1 - q if out = in, q otherwise.
fn flip(out: Var, inputs: Vec<Var>, pos: usize, q: f64) -> Result<CondKernel> {
    CondKernel::from_fn(vec![out], inputs, |i, o| if o[0] == i[pos] { 1.0 - q } else { q })
}

/// MAC with S1 = 0, S2 ~ Ber(p_s), Y = S2·X2, Z1 = S2, Z2 = X1.
pub fn example1_channel(p_s: f64) -> Result<MacChannelSpec> {
    check_prob("p_s", p_s)?;
    let states = JointPmf::new(vec![unit(S1), bit(S2)], vec![1.0 - p_s, p_s])?;
    let kernel = CondKernel::deterministic(
        vec![bit(Y), bit(Z1), bit(Z2)],
        vec![bit(X1), bit(X2), unit(S1), bit(S2)],
        |i| vec![i[3] * i[1], i[3], i[0]],
    )?;
    MacChannelSpec::new(states, kernel, DistortionTable::new(1, 1, vec![0.0])?, DistortionTable::hamming(2))
}

/// Terminal 1 sends a uniform bit, terminal 2 sends the constant 1, and
/// terminal 1 forwards its feedback V1 = Z1 = S2.
pub fn example1_collab_scheme() -> Result<AuxMacScheme> {
    let u0 = CondKernel::constant(unit(U0), 0)?;
    let u1 = CondKernel::from_fn(vec![bit(U1)], vec![unit(U0)], |_, _| 0.5)?;
    let u2 = CondKernel::from_fn(vec![unit(U2)], vec![unit(U0)], |_, _| 1.0)?;
    let x1 = CondKernel::deterministic(vec![bit(X1)], vec![unit(U0), bit(U1)], |i| vec![i[1]])?;
    let x2 = CondKernel::deterministic(vec![bit(X2)], vec![unit(U0), unit(U2)], |_| vec![1])?;
    let v1 = CondKernel::deterministic(vec![bit(V1)], vec![unit(U0), unit(U2), bit(X1), bit(Z1)], |i| vec![i[3]])?;
    let v2 = CondKernel::from_fn(vec![unit(V2)], vec![unit(U0), bit(U1), bit(X2), bit(Z2)], |_, _| 1.0)?;
    AuxMacScheme::new(u0, u1, u2, x1, x2, Some(v1), Some(v2))
}

/// Noisy-feedback MAC with receiver state information:
/// Y' = S1X1 + S2X2 + B0, Z_k = S1X1 + S2X2 + B_k (real sums),
/// Y = (S1, S2, Y') with index (2·s1 + s2)·4 + y'.
pub fn example2_channel(p_s: f64, t0: f64, t1: f64, t2: f64) -> Result<MacChannelSpec> {
    for (n, p) in [("p_s", p_s), ("t0", t0), ("t1", t1), ("t2", t2)] {
        check_prob(n, p)?;
    }
    let b = |t: f64, n: usize| match n {
        0 => 1.0 - t,
        1 => t,
        _ => 0.0,
    };
    let states = JointPmf::new(
        vec![bit(S1), bit(S2)],
        vec![(1.0 - p_s) * (1.0 - p_s), (1.0 - p_s) * p_s, p_s * (1.0 - p_s), p_s * p_s],
    )?;
    let kernel = CondKernel::from_fn(
        vec![Var::new(Y, 4), Var::new(Z1, 4), Var::new(Z2, 4)],
        vec![bit(X1), bit(X2), bit(S1), bit(S2)],
        |i, o| {
            let base = i[2] * i[0] + i[3] * i[1];
            let noise = |v: usize, t: f64| if v >= base { b(t, v - base) } else { 0.0 };
            noise(o[0], t0) * noise(o[1], t1) * noise(o[2], t2)
        },
    )?;
    let base = MacChannelSpec::new(states, kernel, DistortionTable::hamming(2), DistortionTable::hamming(2))?;
    let t = CondKernel::deterministic(vec![Var::new("T", 4)], vec![bit(S1), bit(S2)], |i| vec![2 * i[0] + i[1]])?;
    embed_rx_state_info(&base, &t)
}

/// Parameter names of the noisy-feedback family.
pub const EXAMPLE2_PARAMS: [&str; 7] = ["p", "q1", "q2", "r1", "r2", "e1", "e2"];

/// Erasure symbol of the compression variables in the noisy-feedback family.
pub const ERASURE: usize = 3;

/// U0 ~ Ber(p), U_k = U0 ⊕ Σ_k with Σ_k ~ Ber(q_k), X_k = U_k ⊕ θ_k with
/// θ_k ~ Ber(r_k). With `compress`, V_k = 1{Z_k = 1} + 2·1{Z_k = 2} unless
/// an independent Ber(e_k) erasure replaces it by [`ERASURE`].
pub fn example2_scheme(params: &[f64], compress: bool) -> Result<AuxMacScheme> {
    let [p, q1, q2, r1, r2, e1, e2] = <[f64; 7]>::try_from(params)
        .map_err(|_| Error::InvalidArgument(format!("expected 7 parameters, got {}", params.len())))?;
    for (n, v) in EXAMPLE2_PARAMS.iter().zip(params) {
        check_prob(n, *v)?;
    }
    let u0 = CondKernel::new(vec![bit(U0)], vec![], vec![1.0 - p, p])?;
    let u1 = flip(bit(U1), vec![bit(U0)], 0, q1)?;
    let u2 = flip(bit(U2), vec![bit(U0)], 0, q2)?;
    let x1 = flip(bit(X1), vec![bit(U0), bit(U1)], 1, r1)?;
    let x2 = flip(bit(X2), vec![bit(U0), bit(U2)], 1, r2)?;
    let (v1, v2) = if compress {
        let v = |out: &str, inputs: Vec<Var>, e: f64| {
            CondKernel::from_fn(vec![Var::new(out, 4)], inputs, |i, o| {
                let z = i[3];
                let clean = match z {
                    1 => 1,
                    2 => 2,
                    _ => 0,
                };
                if o[0] == ERASURE {
                    e
                } else if o[0] == clean {
                    1.0 - e
                } else {
                    0.0
                }
            })
        };
        (
            Some(v(V1, vec![bit(U0), bit(U2), bit(X1), Var::new(Z1, 4)], e1)?),
            Some(v(V2, vec![bit(U0), bit(U1), bit(X2), Var::new(Z2, 4)], e2)?),
        )
    } else {
        (None, None)
    };
    AuxMacScheme::new(u0, u1, u2, x1, x2, v1, v2)
}

/// Two-way channel Z1 = X1 ⊕ X2 ⊕ S2, Z2 = X1 ⊕ X2 ⊕ S1 with independent
/// S_k ~ Ber(p_k) and Hamming distortion.
pub fn example3_channel(p1: f64, p2: f64) -> Result<TwoWayChannelSpec> {
    check_prob("p1", p1)?;
    check_prob("p2", p2)?;
    let states = JointPmf::new(
        vec![bit(S1), bit(S2)],
        vec![(1.0 - p1) * (1.0 - p2), (1.0 - p1) * p2, p1 * (1.0 - p2), p1 * p2],
    )?;
    let kernel = CondKernel::deterministic(
        vec![bit(Z1), bit(Z2)],
        vec![bit(X1), bit(X2), bit(S1), bit(S2)],
        |i| vec![i[0] ^ i[1] ^ i[3], i[0] ^ i[1] ^ i[2]],
    )?;
    TwoWayChannelSpec::new(states, kernel, DistortionTable::hamming(2), DistortionTable::hamming(2))
}

/// Uniform input law of `name`.
pub fn uniform_bit(name: &str) -> JointPmf {
    JointPmf::uniform(vec![bit(name)]).expect("two symbols")
}

/// Compression of terminal k's feedback for the other terminal's state:
/// V_k = Z_k ⊕ X_k ⊕ B_k with B_k ~ Ber(target) when target < p_other,
/// otherwise a constant.
pub fn example3_compression(k: usize, p_other: f64, target: f64) -> Result<CondKernel> {
    let (v, x, z) = match k {
        1 => (V1, X1, Z1),
        2 => (V2, X2, Z2),
        _ => return Err(Error::InvalidArgument(format!("terminal {k} does not exist"))),
    };
    check_prob("target distortion", target)?;
    if target < p_other {
        CondKernel::from_fn(vec![bit(v)], vec![bit(x), bit(z)], |i, o| {
            if o[0] == i[0] ^ i[1] {
                1.0 - target
            } else {
                target
            }
        })
    } else {
        CondKernel::from_fn(vec![unit(v)], vec![bit(x), bit(z)], |_, _| 1.0)
    }
}

/// Non-adaptive scheme for target distortions (d1, d2): uniform inputs,
/// V1 aimed at D2 and V2 aimed at D1.
pub fn example3_scheme(p1: f64, p2: f64, d1: f64, d2: f64) -> Result<(JointPmf, JointPmf, CondKernel, CondKernel)> {
    Ok((
        uniform_bit(X1),
        uniform_bit(X2),
        example3_compression(1, p2, d2)?,
        example3_compression(2, p1, d1)?,
    ))
}

/// The same scheme as a block-adaptive scheme with identity adaptation.
pub fn example3_han_scheme(spec: &TwoWayChannelSpec) -> Result<HanScheme> {
    HanScheme::nonadaptive(&uniform_bit(X1), &uniform_bit(X2), spec)
}
