//! Problem instances: state laws, channel kernels and distortion measures.

use crate::error::{Error, Result};
use crate::prob::{CondKernel, JointPmf, Var};

/// Conventional variable names shared by every module.
pub mod names {
    pub const U0: &str = "U0";
    pub const U1: &str = "U1";
    pub const U2: &str = "U2";
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const S1: &str = "S1";
    pub const S2: &str = "S2";
    pub const Y: &str = "Y";
    pub const Z1: &str = "Z1";
    pub const Z2: &str = "Z2";
    pub const V1: &str = "V1";
    pub const V2: &str = "V2";
    /// Internal state before lifting.
    pub const S: &str = "S";
}

use names::*;

/// Per-symbol distortion d(s, ŝ) between a state and its reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionTable {
    state_card: usize,
    recon_card: usize,
    d: Vec<f64>,
}

impl DistortionTable {
    /// `d` is row-major over (s, ŝ).
    pub fn new(state_card: usize, recon_card: usize, d: Vec<f64>) -> Result<Self> {
        if state_card == 0 || recon_card == 0 {
            return Err(Error::CardinalityMismatch(
                "distortion table with an empty alphabet".into(),
            ));
        }
        if d.len() != state_card * recon_card {
            return Err(Error::CardinalityMismatch(format!(
                "distortion table has {} entries, expected {}x{}",
                d.len(),
                state_card,
                recon_card
            )));
        }
        if let Some(x) = d.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distortion entry {x} is not a finite nonnegative number"
            )));
        }
        Ok(DistortionTable {
            state_card,
            recon_card,
            d,
        })
    }

    /// Hamming distortion on an n-ary alphabet.
    pub fn hamming(n: usize) -> Self {
        let d = (0..n * n)
            .map(|i| if i / n == i % n { 0.0 } else { 1.0 })
            .collect();
        DistortionTable {
            state_card: n,
            recon_card: n,
            d,
        }
    }

    pub fn state_card(&self) -> usize {
        self.state_card
    }

    pub fn recon_card(&self) -> usize {
        self.recon_card
    }

    #[inline]
    pub fn get(&self, s: usize, s_hat: usize) -> f64 {
        self.d[s * self.recon_card + s_hat]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.d.chunks(self.recon_card)
    }
}

fn expect_names(vars: &[Var], want: &[&str], what: &str) -> Result<()> {
    let got: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    if got != want {
        return Err(Error::Schema(format!(
            "{what} must be over {want:?}, got {got:?}"
        )));
    }
    Ok(())
}

fn check_state_law(state_law: &JointPmf) -> Result<JointPmf> {
    if state_law.vars().len() != 2 {
        return Err(Error::Schema("state law must be over (S1, S2)".into()));
    }
    state_law.reorder(&[S1, S2])
}

fn check_common(
    state_law: &JointPmf,
    kernel: &CondKernel,
    outputs: &[&str],
    d1: &DistortionTable,
    d2: &DistortionTable,
) -> Result<()> {
    expect_names(kernel.inputs(), &[X1, X2, S1, S2], "channel kernel inputs")?;
    expect_names(kernel.outputs(), outputs, "channel kernel outputs")?;
    for (i, s) in [S1, S2].iter().enumerate() {
        let law_card = state_law.var(s)?.card;
        if kernel.inputs()[2 + i].card != law_card {
            return Err(Error::CardinalityMismatch(format!(
                "`{s}` has {law_card} symbols in the state law but {} in the kernel",
                kernel.inputs()[2 + i].card
            )));
        }
    }
    if d1.state_card() != state_law.var(S1)?.card {
        return Err(Error::CardinalityMismatch(
            "distortion d1 does not match |S1|".into(),
        ));
    }
    if d2.state_card() != state_law.var(S2)?.card {
        return Err(Error::CardinalityMismatch(
            "distortion d2 does not match |S2|".into(),
        ));
    }
    Ok(())
}

/// Two-transmitter multiple-access channel with generalized feedback.
#[derive(Clone, Debug)]
pub struct MacChannelSpec {
    state_law: JointPmf,
    kernel: CondKernel,
    d1: DistortionTable,
    d2: DistortionTable,
}

impl MacChannelSpec {
    /// `kernel` maps (X1, X2, S1, S2) to (Y, Z1, Z2).
    pub fn new(
        state_law: JointPmf,
        kernel: CondKernel,
        d1: DistortionTable,
        d2: DistortionTable,
    ) -> Result<Self> {
        let state_law = check_state_law(&state_law)?;
        check_common(&state_law, &kernel, &[Y, Z1, Z2], &d1, &d2)?;
        Ok(MacChannelSpec {
            state_law,
            kernel,
            d1,
            d2,
        })
    }

    pub fn state_law(&self) -> &JointPmf {
        &self.state_law
    }

    pub fn kernel(&self) -> &CondKernel {
        &self.kernel
    }

    pub fn d1(&self) -> &DistortionTable {
        &self.d1
    }

    pub fn d2(&self) -> &DistortionTable {
        &self.d2
    }

    /// Alphabet size of a channel variable by name.
    pub fn card(&self, name: &str) -> Result<usize> {
        self.kernel
            .inputs()
            .iter()
            .chain(self.kernel.outputs())
            .find(|v| v.name == name)
            .map(|v| v.card)
            .ok_or_else(|| Error::UnknownVar(name.to_string()))
    }
}

/// Two-way (device-to-device) channel.
#[derive(Clone, Debug)]
pub struct TwoWayChannelSpec {
    state_law: JointPmf,
    kernel: CondKernel,
    d1: DistortionTable,
    d2: DistortionTable,
}

impl TwoWayChannelSpec {
    /// `kernel` maps (X1, X2, S1, S2) to (Z1, Z2).
    pub fn new(
        state_law: JointPmf,
        kernel: CondKernel,
        d1: DistortionTable,
        d2: DistortionTable,
    ) -> Result<Self> {
        let state_law = check_state_law(&state_law)?;
        check_common(&state_law, &kernel, &[Z1, Z2], &d1, &d2)?;
        Ok(TwoWayChannelSpec {
            state_law,
            kernel,
            d1,
            d2,
        })
    }

    pub fn state_law(&self) -> &JointPmf {
        &self.state_law
    }

    pub fn kernel(&self) -> &CondKernel {
        &self.kernel
    }

    pub fn d1(&self) -> &DistortionTable {
        &self.d1
    }

    pub fn d2(&self) -> &DistortionTable {
        &self.d2
    }

    pub fn card(&self, name: &str) -> Result<usize> {
        self.kernel
            .inputs()
            .iter()
            .chain(self.kernel.outputs())
            .find(|v| v.name == name)
            .map(|v| v.card)
            .ok_or_else(|| Error::UnknownVar(name.to_string()))
    }

    /// P(Z1, Z2 | X1, X2) with the states averaged out.
    pub fn averaged_kernel(&self) -> CondKernel {
        let s1 = self.state_law.vars()[0].card;
        let s2 = self.state_law.vars()[1].card;
        let x1 = self.kernel.inputs()[0].clone();
        let x2 = self.kernel.inputs()[1].clone();
        let out = self.kernel.out_size();
        let mut table = vec![0.0; x1.card * x2.card * out];
        for a in 0..x1.card {
            for b in 0..x2.card {
                let dst = ((a * x2.card) + b) * out;
                for s in 0..s1 * s2 {
                    let ps = self.state_law.table()[s];
                    if ps == 0.0 {
                        continue;
                    }
                    let row = self.kernel.row((a * x2.card + b) * s1 * s2 + s);
                    for (o, &r) in row.iter().enumerate() {
                        table[dst + o] += ps * r;
                    }
                }
            }
        }
        CondKernel::new(self.kernel.outputs().to_vec(), vec![x1, x2], table)
            .expect("average of normalized rows is normalized")
    }
}

/// Either kind of problem instance.
#[derive(Clone, Debug)]
pub enum ChannelSpec {
    Mac(MacChannelSpec),
    TwoWay(TwoWayChannelSpec),
}

impl ChannelSpec {
    pub fn as_mac(&self) -> Result<&MacChannelSpec> {
        match self {
            ChannelSpec::Mac(m) => Ok(m),
            ChannelSpec::TwoWay(_) => Err(Error::InvalidArgument(
                "expected a multiple-access channel, got a two-way channel".into(),
            )),
        }
    }

    pub fn as_two_way(&self) -> Result<&TwoWayChannelSpec> {
        match self {
            ChannelSpec::TwoWay(t) => Ok(t),
            ChannelSpec::Mac(_) => Err(Error::InvalidArgument(
                "expected a two-way channel, got a multiple-access channel".into(),
            )),
        }
    }
}

/// Result of reducing an internal-state channel to terminal state pairs.
#[derive(Clone, Debug)]
pub struct LiftedChannel {
    pub spec: ChannelSpec,
    /// State pairs (s1, s2) with zero probability. Their kernel rows never
    /// carry mass; they are filled with the state-averaged channel.
    pub pruned: Vec<(usize, usize)>,
}

/// Reduces a channel driven by an internal state S, of which the terminals
/// see noisy versions (S1, S2), to a channel over (S1, S2):
/// P(out | x, s1, s2) = Σ_s P(s) P(s1 s2 | s) P(out | x, s) / P(s1 s2).
///
/// `chan` maps (X1, X2, S) to (Y, Z1, Z2) or (Z1, Z2); the output block
/// decides which kind of spec is returned.
pub fn lift_internal_state(
    p_s: &JointPmf,
    obs: &CondKernel,
    chan: &CondKernel,
    d1: DistortionTable,
    d2: DistortionTable,
) -> Result<LiftedChannel> {
    expect_names(p_s.vars(), &[S], "internal state law")?;
    expect_names(obs.inputs(), &[S], "state observation inputs")?;
    expect_names(obs.outputs(), &[S1, S2], "state observation outputs")?;
    expect_names(chan.inputs(), &[X1, X2, S], "internal channel inputs")?;
    let ns = p_s.vars()[0].card;
    if obs.inputs()[0].card != ns || chan.inputs()[2].card != ns {
        return Err(Error::CardinalityMismatch(
            "internal state alphabet differs between law, observation and channel".into(),
        ));
    }
    let mac = chan.outputs().iter().any(|v| v.name == Y);
    let (n1, n2) = (obs.outputs()[0].card, obs.outputs()[1].card);
    let (nx1, nx2) = (chan.inputs()[0].card, chan.inputs()[1].card);
    let out = chan.out_size();

    let mut p12 = vec![0.0; n1 * n2];
    for s in 0..ns {
        for (j, &o) in obs.row(s).iter().enumerate() {
            p12[j] += p_s.table()[s] * o;
        }
    }
    let mut pruned = Vec::new();
    for (j, &p) in p12.iter().enumerate() {
        if p == 0.0 {
            pruned.push((j / n2, j % n2));
        }
    }
    if !pruned.is_empty() {
        log::info!("pruned zero-probability state pairs {pruned:?}");
    }

    let mut table = vec![0.0; nx1 * nx2 * n1 * n2 * out];
    for x in 0..nx1 * nx2 {
        for j in 0..n1 * n2 {
            let dst = (x * n1 * n2 + j) * out;
            for s in 0..ns {
                let w = if p12[j] > 0.0 {
                    p_s.table()[s] * obs.row(s)[j] / p12[j]
                } else {
                    p_s.table()[s]
                };
                if w == 0.0 {
                    continue;
                }
                for (o, &r) in chan.row(x * ns + s).iter().enumerate() {
                    table[dst + o] += w * r;
                }
            }
        }
    }
    let inputs = vec![
        chan.inputs()[0].clone(),
        chan.inputs()[1].clone(),
        Var::new(S1, n1),
        Var::new(S2, n2),
    ];
    let kernel = CondKernel::new(chan.outputs().to_vec(), inputs, table)?;
    let state_law = JointPmf::new(vec![Var::new(S1, n1), Var::new(S2, n2)], p12)?;
    let spec = if mac {
        ChannelSpec::Mac(MacChannelSpec::new(state_law, kernel, d1, d2)?)
    } else {
        ChannelSpec::TwoWay(TwoWayChannelSpec::new(state_law, kernel, d1, d2)?)
    };
    Ok(LiftedChannel { spec, pruned })
}

/// Gives the receiver side information T about the states: the new output
/// is Y = (T, Y') with index t·|Y'| + y', and
/// P(y, z1, z2 | x, s) = P(t | s1 s2) P(y', z1, z2 | x, s).
///
/// `t_kernel` maps (S1, S2) to any tuple of variables, flattened into T.
pub fn embed_rx_state_info(spec: &MacChannelSpec, t_kernel: &CondKernel) -> Result<MacChannelSpec> {
    let s_vars = &spec.kernel.inputs()[2..];
    if t_kernel.inputs().len() != 2
        || t_kernel.inputs()[0].name != S1
        || t_kernel.inputs()[1].name != S2
    {
        return Err(Error::CardinalityMismatch(
            "state-information kernel must condition on (S1, S2)".into(),
        ));
    }
    if t_kernel.inputs()[0].card != s_vars[0].card || t_kernel.inputs()[1].card != s_vars[1].card {
        return Err(Error::CardinalityMismatch(
            "state-information kernel alphabet differs from the channel states".into(),
        ));
    }
    let nt = t_kernel.out_size();
    let y = spec.kernel.outputs()[0].card;
    let nz1 = spec.kernel.outputs()[1].card;
    let nz2 = spec.kernel.outputs()[2].card;
    let old_out = y * nz1 * nz2;
    let new_out = nt * old_out;
    let ns = s_vars[0].card * s_vars[1].card;
    let in_size = spec.kernel.in_size();
    let mut table = vec![0.0; in_size * new_out];
    for i in 0..in_size {
        let s = i % ns;
        let row = spec.kernel.row(i);
        let trow = t_kernel.row(s);
        for (t, &pt) in trow.iter().enumerate() {
            if pt == 0.0 {
                continue;
            }
            for (o, &r) in row.iter().enumerate() {
                // o = (y', z1, z2); new index is ((t, y'), z1, z2).
                let yp = o / (nz1 * nz2);
                let zz = o % (nz1 * nz2);
                let ny = t * y + yp;
                table[i * new_out + ny * nz1 * nz2 + zz] += pt * r;
            }
        }
    }
    let outputs = vec![
        Var::new(Y, nt * y),
        spec.kernel.outputs()[1].clone(),
        spec.kernel.outputs()[2].clone(),
    ];
    let kernel = CondKernel::new(outputs, spec.kernel.inputs().to_vec(), table)?;
    MacChannelSpec::new(spec.state_law.clone(), kernel, spec.d1.clone(), spec.d2.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str, c: usize) -> Var {
        Var::new(n, c)
    }

    #[test]
    fn hamming_table() {
        let d = DistortionTable::hamming(3);
        assert_eq!(d.get(1, 1), 0.0);
        assert_eq!(d.get(2, 0), 1.0);
    }

    #[test]
    fn negative_distortion_is_rejected() {
        assert!(DistortionTable::new(2, 2, vec![0.0, -1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn identity_observation_keeps_channel() {
        let p_s = JointPmf::new(vec![v(S, 2)], vec![0.3, 0.7]).unwrap();
        let obs = CondKernel::deterministic(vec![v(S1, 2), v(S2, 2)], vec![v(S, 2)], |i| {
            vec![i[0], i[0]]
        })
        .unwrap();
        let chan = CondKernel::from_fn(
            vec![v(Z1, 2), v(Z2, 2)],
            vec![v(X1, 2), v(X2, 2), v(S, 2)],
            |i, o| {
                let z = i[0] ^ i[1] ^ i[2];
                let p1 = if o[0] == z { 0.9 } else { 0.1 };
                let p2 = if o[1] == i[0] { 1.0 } else { 0.0 };
                p1 * p2
            },
        )
        .unwrap();
        let lifted = lift_internal_state(
            &p_s,
            &obs,
            &chan,
            DistortionTable::hamming(2),
            DistortionTable::hamming(2),
        )
        .unwrap();
        assert_eq!(lifted.pruned, vec![(0, 1), (1, 0)]);
        let spec = lifted.spec.as_two_way().unwrap();
        for x in 0..4 {
            for s in 0..2 {
                let lifted_row = spec.kernel().row(x * 4 + s * 2 + s);
                assert_eq!(lifted_row, chan.row(x * 2 + s));
            }
        }
    }

    #[test]
    fn embedding_constant_side_information_is_identity() {
        let state = JointPmf::uniform(vec![v(S1, 2), v(S2, 2)]).unwrap();
        let kernel = CondKernel::from_fn(
            vec![v(Y, 2), v(Z1, 2), v(Z2, 2)],
            vec![v(X1, 2), v(X2, 2), v(S1, 2), v(S2, 2)],
            |i, o| {
                let y = (i[0] & i[2]) ^ (i[1] & i[3]);
                if o[0] == y && o[1] == i[1] && o[2] == i[0] {
                    1.0
                } else {
                    0.0
                }
            },
        )
        .unwrap();
        let spec = MacChannelSpec::new(
            state,
            kernel.clone(),
            DistortionTable::hamming(2),
            DistortionTable::hamming(2),
        )
        .unwrap();
        let t = CondKernel::deterministic(vec![v("T", 1)], vec![v(S1, 2), v(S2, 2)], |_| vec![0])
            .unwrap();
        let e = embed_rx_state_info(&spec, &t).unwrap();
        assert_eq!(e.kernel().table(), kernel.table());
    }

    #[test]
    fn embedding_requires_state_inputs() {
        let state = JointPmf::uniform(vec![v(S1, 2), v(S2, 2)]).unwrap();
        let kernel = CondKernel::from_fn(
            vec![v(Y, 2), v(Z1, 2), v(Z2, 2)],
            vec![v(X1, 2), v(X2, 2), v(S1, 2), v(S2, 2)],
            |_, _| 0.125,
        )
        .unwrap();
        let spec = MacChannelSpec::new(
            state,
            kernel,
            DistortionTable::hamming(2),
            DistortionTable::hamming(2),
        )
        .unwrap();
        let t = CondKernel::deterministic(vec![v("T", 3)], vec![v(S1, 3), v(S2, 2)], |i| vec![i[0]])
            .unwrap();
        assert!(matches!(
            embed_rx_state_info(&spec, &t),
            Err(Error::CardinalityMismatch(_))
        ));
    }
}
