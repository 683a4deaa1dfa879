//! Two-way channels: block-adaptive coding with stationary input laws,
//! separate and joint source-channel collaborative sensing.
//!
//! Variables of the previous block carry a `~` suffix (`U1~`, `X1~`, ...);
//! variables of the next codeword or next block carry a `'` suffix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{names::*, TwoWayChannelSpec};
use crate::error::{Error, Result};
use crate::estimation::optimal_distortion;
use crate::prob::{binary_entropy, compose, compose_marginal, decode, encode, product, CondKernel, InfoMeasures, JointPmf, Var};

/// Default total-variation tolerance of the fixed-point solver.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap of the fixed-point solver.
pub const DEFAULT_MAX_ITERS: usize = 100_000;
/// Seed of the random initialization used to probe uniqueness.
pub const PROBE_SEED: u64 = 0x5eed_0f_f1c5;

pub fn tilde(name: &str) -> String {
    format!("{name}~")
}

pub fn prime(name: &str) -> String {
    format!("{name}'")
}

/// Deterministic adaptation x = f(u, ũ, x̃, z̃).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptFn {
    u_card: usize,
    x_card: usize,
    z_card: usize,
    /// Indexed by ((u·|U| + ũ)·|X| + x̃)·|Z| + z̃.
    table: Vec<usize>,
}

impl AdaptFn {
    pub fn new(u_card: usize, x_card: usize, z_card: usize, table: Vec<usize>) -> Result<Self> {
        if u_card == 0 || x_card == 0 || z_card == 0 {
            return Err(Error::CardinalityMismatch("empty alphabet in adaptation function".into()));
        }
        if table.len() != u_card * u_card * x_card * z_card {
            return Err(Error::CardinalityMismatch(format!(
                "adaptation table has {} entries, expected {}",
                table.len(),
                u_card * u_card * x_card * z_card
            )));
        }
        if let Some(x) = table.iter().find(|&&x| x >= x_card) {
            return Err(Error::CardinalityMismatch(format!("adaptation output {x} outside the input alphabet")));
        }
        Ok(AdaptFn {
            u_card,
            x_card,
            z_card,
            table,
        })
    }

    pub fn from_fn(
        u_card: usize,
        x_card: usize,
        z_card: usize,
        f: impl Fn(usize, usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let mut table = Vec::with_capacity(u_card * u_card * x_card * z_card);
        for u in 0..u_card {
            for ut in 0..u_card {
                for xt in 0..x_card {
                    for zt in 0..z_card {
                        table.push(f(u, ut, xt, zt));
                    }
                }
            }
        }
        Self::new(u_card, x_card, z_card, table)
    }

    /// x = u, ignoring the previous block.
    pub fn identity(card: usize, z_card: usize) -> Result<Self> {
        Self::from_fn(card, card, z_card, |u, _, _, _| u)
    }

    pub fn u_card(&self) -> usize {
        self.u_card
    }

    pub fn x_card(&self) -> usize {
        self.x_card
    }

    pub fn z_card(&self) -> usize {
        self.z_card
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, u: usize, ut: usize, xt: usize, zt: usize) -> usize {
        self.table[((u * self.u_card + ut) * self.x_card + xt) * self.z_card + zt]
    }

    /// True if the output depends on `u` only.
    pub fn is_nonadaptive(&self) -> bool {
        let block = self.u_card * self.x_card * self.z_card;
        self.table.chunks(block).all(|c| c.iter().all(|&x| x == c[0]))
    }

    /// The function as a 0/1 kernel `out | (u, ut, xt, zt)`.
    pub fn kernel(&self, out: &str, u: &str, ut: &str, xt: &str, zt: &str) -> Result<CondKernel> {
        CondKernel::deterministic(
            vec![Var::new(out, self.x_card)],
            vec![
                Var::new(u, self.u_card),
                Var::new(ut, self.u_card),
                Var::new(xt, self.x_card),
                Var::new(zt, self.z_card),
            ],
            |d| vec![self.apply(d[0], d[1], d[2], d[3])],
        )
    }
}

/// Codeword laws and adaptation functions of the block-adaptive scheme.
#[derive(Clone, Debug)]
pub struct HanScheme {
    pub p_u1: JointPmf,
    pub p_u2: JointPmf,
    pub f1: AdaptFn,
    pub f2: AdaptFn,
}

fn single_var(p: &JointPmf, name: &str) -> Result<usize> {
    match p.vars() {
        [v] if v.name == name => Ok(v.card),
        _ => Err(Error::Schema(format!("expected a law of `{name}` alone, got {:?}", p.names()))),
    }
}

fn check_adapt(f: &AdaptFn, u_card: usize, spec: &TwoWayChannelSpec, x: &str, z: &str) -> Result<()> {
    if f.u_card != u_card || f.x_card != spec.card(x)? || f.z_card != spec.card(z)? {
        return Err(Error::CardinalityMismatch(format!(
            "adaptation function for `{x}` has alphabets (|U|={}, |X|={}, |Z|={}), channel and codebook need ({u_card}, {}, {})",
            f.u_card,
            f.x_card,
            f.z_card,
            spec.card(x)?,
            spec.card(z)?
        )));
    }
    Ok(())
}

impl HanScheme {
    pub fn new(p_u1: JointPmf, p_u2: JointPmf, f1: AdaptFn, f2: AdaptFn) -> Result<Self> {
        let c1 = single_var(&p_u1, U1)?;
        let c2 = single_var(&p_u2, U2)?;
        if f1.u_card != c1 || f2.u_card != c2 {
            return Err(Error::CardinalityMismatch(
                "codeword alphabet differs from the adaptation function domain".into(),
            ));
        }
        Ok(HanScheme { p_u1, p_u2, f1, f2 })
    }

    /// Inputs equal fresh codewords drawn from `p_x1`, `p_x2`.
    pub fn nonadaptive(p_x1: &JointPmf, p_x2: &JointPmf, spec: &TwoWayChannelSpec) -> Result<Self> {
        let c1 = single_var(p_x1, X1)?;
        let c2 = single_var(p_x2, X2)?;
        Self::new(
            p_x1.clone().rename(&[(X1, U1)])?,
            p_x2.clone().rename(&[(X2, U2)])?,
            AdaptFn::identity(c1, spec.card(Z1)?)?,
            AdaptFn::identity(c2, spec.card(Z2)?)?,
        )
    }

    fn check(&self, spec: &TwoWayChannelSpec) -> Result<()> {
        check_adapt(&self.f1, self.p_u1.vars()[0].card, spec, X1, Z1)?;
        check_adapt(&self.f2, self.p_u2.vars()[0].card, spec, X2, Z2)
    }
}

/// Fixed point of a block-update operator.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryLaw {
    pub law: JointPmf,
    /// Total variation between the law and its image under one more update.
    pub residual: f64,
    pub iterations: usize,
}

/// Tolerance and iteration cap of the fixed-point solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn iterate(op: &dyn Fn(&[f64]) -> Vec<f64>, mut cur: Vec<f64>, opts: SolverOptions) -> Result<(Vec<f64>, f64, usize)> {
    let mut trace = Vec::new();
    for i in 0..opts.max_iters {
        let next = op(&cur);
        let r = tv(&next, &cur);
        trace.push(r);
        if r < opts.tol {
            return Ok((cur, r, i));
        }
        cur = next;
    }
    Err(Error::NonConvergence {
        residual: trace.last().copied().unwrap_or(f64::NAN),
        trace,
    })
}

/// Iterates from the uniform law, then probes uniqueness from one seeded
/// random initialization.
fn solve(vars: Vec<Var>, op: &dyn Fn(&[f64]) -> Vec<f64>, opts: SolverOptions) -> Result<StationaryLaw> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let n = product(&vars.iter().map(|v| v.card).collect::<Vec<_>>());
    let (law, residual, iterations) = iterate(op, vec![1.0 / n as f64; n], opts)?;
    let stat = StationaryLaw {
        law: JointPmf::from_parts_unchecked(vars, law),
        residual,
        iterations,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut init: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = init.iter().sum();
    init.iter_mut().for_each(|p| *p /= s);
    match iterate(op, init, opts) {
        Ok((other, _, _)) => {
            let distance = tv(&other, stat.law.table());
            if distance > 100.0 * opts.tol {
                return Err(Error::AmbiguousFixedPoint {
                    law: Box::new(stat),
                    distance,
                });
            }
        }
        Err(e) => log::warn!("uniqueness probe did not converge: {e}"),
    }
    Ok(stat)
}

/// Stationary law of (U1, U2, X1, X2, Z1, Z2) under fresh codewords,
/// adaptation, and the state-averaged channel.
pub fn stationary_law(scheme: &HanScheme, spec: &TwoWayChannelSpec, opts: SolverOptions) -> Result<StationaryLaw> {
    scheme.check(spec)?;
    let w = spec.averaged_kernel();
    let cu1 = scheme.f1.u_card;
    let cu2 = scheme.f2.u_card;
    let cards = [cu1, cu2, scheme.f1.x_card, scheme.f2.x_card, scheme.f1.z_card, scheme.f2.z_card];
    let vars: Vec<Var> = [U1, U2, X1, X2, Z1, Z2]
        .iter()
        .zip(cards)
        .map(|(n, c)| Var::new(*n, c))
        .collect();
    let pu1 = scheme.p_u1.table().to_vec();
    let pu2 = scheme.p_u2.table().to_vec();
    let (f1, f2) = (&scheme.f1, &scheme.f2);
    let zsize = cards[4] * cards[5];
    let xsize = cards[2] * cards[3];
    let op = move |p: &[f64]| -> Vec<f64> {
        let mut q = vec![0.0; cu1 * cu2 * xsize];
        let mut d = [0usize; 6];
        for (i, &m) in p.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            decode(i, &cards, &mut d);
            for (u1, &a) in pu1.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let x1 = f1.apply(u1, d[0], d[2], d[4]);
                for (u2, &b) in pu2.iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    let x2 = f2.apply(u2, d[1], d[3], d[5]);
                    q[((u1 * cu2 + u2) * cards[2] + x1) * cards[3] + x2] += m * a * b;
                }
            }
        }
        let mut out = vec![0.0; p.len()];
        for (j, &m) in q.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let row = w.row(j % xsize);
            for (z, &pz) in row.iter().enumerate() {
                out[j * zsize + z] += m * pz;
            }
        }
        out
    };
    solve(vars, &op, opts)
}

/// Joint law of the previous block (tilde variables, distributed as the
/// stationary law) and the current block, with the state-averaged channel.
pub fn extend_one_block(stat: &StationaryLaw, scheme: &HanScheme, spec: &TwoWayChannelSpec) -> Result<JointPmf> {
    let factors = block_factors(stat, scheme, spec, false)?;
    let refs: Vec<&CondKernel> = factors.iter().collect();
    compose(&refs)
}

fn block_factors(
    stat: &StationaryLaw,
    scheme: &HanScheme,
    spec: &TwoWayChannelSpec,
    with_states: bool,
) -> Result<Vec<CondKernel>> {
    scheme.check(spec)?;
    let map: Vec<(String, String)> = [U1, U2, X1, X2, Z1, Z2]
        .iter()
        .map(|n| (n.to_string(), tilde(n)))
        .collect();
    let map_ref: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let mut f = vec![stat.law.clone().rename(&map_ref)?.into_kernel()];
    f.push(scheme.p_u1.clone().into_kernel());
    f.push(scheme.p_u2.clone().into_kernel());
    f.push(scheme.f1.kernel(X1, U1, &tilde(U1), &tilde(X1), &tilde(Z1))?);
    f.push(scheme.f2.kernel(X2, U2, &tilde(U2), &tilde(X2), &tilde(Z2))?);
    if with_states {
        f.push(spec.state_law().clone().into_kernel());
        f.push(spec.kernel().clone());
    } else {
        f.push(spec.averaged_kernel());
    }
    Ok(f)
}

fn tilde_names(k: usize) -> [String; 3] {
    let (u, x, z) = if k == 1 { (U1, X1, Z1) } else { (U2, X2, Z2) };
    [tilde(u), tilde(x), tilde(z)]
}

/// Information each terminal's fresh codeword carries to the other
/// terminal's current and previous observations.
pub fn han_rates(ext: &JointPmf) -> Result<(f64, f64)> {
    let mut im = InfoMeasures::new(ext);
    han_rates_with(&mut im)
}

fn han_rates_with(im: &mut InfoMeasures) -> Result<(f64, f64)> {
    let [u1t, x1t, z1t] = tilde_names(1);
    let [u2t, x2t, z2t] = tilde_names(2);
    let r1 = im.mi(&[U1], &[X2, Z2, &u2t, &x2t, &z2t], &[])?;
    let r2 = im.mi(&[U2], &[X1, Z1, &u1t, &x1t, &z1t], &[])?;
    Ok((r1, r2))
}

/// Rates of memoryless independent inputs: I(X1; Z2 | X2), I(X2; Z1 | X1).
pub fn shannon_rates(p_x1: &JointPmf, p_x2: &JointPmf, spec: &TwoWayChannelSpec) -> Result<(f64, f64)> {
    single_var(p_x1, X1)?;
    single_var(p_x2, X2)?;
    let joint = compose(&[
        &p_x1.clone().into_kernel(),
        &p_x2.clone().into_kernel(),
        &spec.averaged_kernel(),
    ])?;
    Ok((
        joint.mutual_information(&[X1], &[Z2], &[X2])?,
        joint.mutual_information(&[X2], &[Z1], &[X1])?,
    ))
}

/// Rates, distortions and diagnostics of one operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct D2dPoint {
    pub r1: f64,
    pub r2: f64,
    pub d1: f64,
    pub d2: f64,
    /// Rates before clamping at zero.
    pub raw: [f64; 2],
    pub clamped: [bool; 2],
    /// Distortions of the estimators on (X_k, Z_k, U_k̄) alone, where defined.
    pub reduced: Option<(f64, f64)>,
}

impl D2dPoint {
    fn new(raw: [f64; 2], d1: f64, d2: f64, reduced: Option<(f64, f64)>) -> Self {
        let clamped = [raw[0] < 0.0, raw[1] < 0.0];
        for (k, c) in clamped.iter().enumerate() {
            if *c {
                log::info!("rate of terminal {} clamped at zero (raw value {:.3e})", k + 1, raw[k]);
            }
        }
        D2dPoint {
            r1: raw[0].max(0.0),
            r2: raw[1].max(0.0),
            d1,
            d2,
            raw,
            clamped,
            reduced,
        }
    }
}

fn check_inputs(k: &CondKernel, out: &str, allowed: &[String]) -> Result<()> {
    let outs: Vec<&str> = k.outputs().iter().map(|v| v.name.as_str()).collect();
    if outs != [out] {
        return Err(Error::Schema(format!("kernel for `{out}` produces {outs:?}")));
    }
    match k.inputs().iter().find(|v| !allowed.contains(&v.name)) {
        Some(v) => Err(Error::MarkovViolation(v.name.clone())),
        None => Ok(()),
    }
}

/// Allowed conditioning variables of V_k in the separation scheme.
pub fn separation_allowed(k: usize) -> Vec<String> {
    let (x, z) = if k == 1 { (X1, Z1) } else { (X2, Z2) };
    let mut v = vec![x.to_string(), z.to_string()];
    v.extend(tilde_names(k));
    v
}

/// Separate source-channel coding: block-adaptive rates minus the
/// Wyner-Ziv rates of V1, V2, with estimators that see the other
/// terminal's compression.
pub fn separation_point(
    scheme: &HanScheme,
    spec: &TwoWayChannelSpec,
    v1: &CondKernel,
    v2: &CondKernel,
    opts: SolverOptions,
) -> Result<D2dPoint> {
    check_inputs(v1, V1, &separation_allowed(1))?;
    check_inputs(v2, V2, &separation_allowed(2))?;
    let stat = stationary_law(scheme, spec, opts)?;
    let mut factors = block_factors(&stat, scheme, spec, true)?;
    factors.push(v1.clone());
    factors.push(v2.clone());
    let refs: Vec<&CondKernel> = factors.iter().collect();
    let joint = compose(&refs)?;
    let mut im = InfoMeasures::new(&joint);
    let (h1, h2) = han_rates_with(&mut im)?;
    let [u1t, x1t, z1t] = tilde_names(1);
    let [u2t, x2t, z2t] = tilde_names(2);
    let side1: [&str; 5] = [X1, Z1, &u1t, &x1t, &z1t];
    let side2: [&str; 5] = [X2, Z2, &u2t, &x2t, &z2t];
    let wz1 = im.mi(&[V1], &side1, &side2)?;
    let wz2 = im.mi(&[V2], &side2, &side1)?;
    // The second estimator's argument list repeats Ũ2; the other
    // terminal's previous codeword Ũ1 is used in its place.
    let (_, d1) = optimal_distortion(&joint, &[V2, X1, Z1, U2, &u1t, &x1t, &z1t, &u2t], S1, spec.d1())?;
    let (_, d2) = optimal_distortion(&joint, &[V1, X2, Z2, U1, &u2t, &x2t, &z2t, &u1t], S2, spec.d2())?;
    let (_, e1) = optimal_distortion(&joint, &[X1, Z1, U2], S1, spec.d1())?;
    let (_, e2) = optimal_distortion(&joint, &[X2, Z2, U1], S2, spec.d2())?;
    Ok(D2dPoint::new([h1 - wz1, h2 - wz2], d1, d2, Some((e1, e2))))
}

/// Memoryless inputs with compression kernels V_k | (X_k, Z_k).
pub fn nonadaptive_point(
    p_x1: &JointPmf,
    p_x2: &JointPmf,
    spec: &TwoWayChannelSpec,
    v1: &CondKernel,
    v2: &CondKernel,
) -> Result<D2dPoint> {
    single_var(p_x1, X1)?;
    single_var(p_x2, X2)?;
    check_inputs(v1, V1, &[X1.to_string(), Z1.to_string()])?;
    check_inputs(v2, V2, &[X2.to_string(), Z2.to_string()])?;
    let joint = compose(&[
        &spec.state_law().clone().into_kernel(),
        &p_x1.clone().into_kernel(),
        &p_x2.clone().into_kernel(),
        spec.kernel(),
        v1,
        v2,
    ])?;
    let mut im = InfoMeasures::new(&joint);
    let r1 = im.mi(&[X1], &[X2, Z2], &[])? - im.mi(&[V1], &[X1, Z1], &[X2, Z2])?;
    let r2 = im.mi(&[X2], &[X1, Z1], &[])? - im.mi(&[V2], &[X2, Z2], &[X1, Z1])?;
    let (_, d1) = optimal_distortion(&joint, &[V2, X1, X2, Z1], S1, spec.d1())?;
    let (_, d2) = optimal_distortion(&joint, &[V1, X1, X2, Z2], S2, spec.d2())?;
    Ok(D2dPoint::new([r1, r2], d1, d2, None))
}

/// Hybrid-coding scheme: adaptation functions on the codeword alphabet
/// and the next-codeword kernels U_k' | (U_k, X_k, Z_k, Ũ_k, X̃_k, Z̃_k).
#[derive(Clone, Debug)]
pub struct JsccScheme {
    pub f1: AdaptFn,
    pub f2: AdaptFn,
    pub u1_next: CondKernel,
    pub u2_next: CondKernel,
}

/// Allowed conditioning variables of U_k' in the hybrid scheme.
pub fn jscc_allowed(k: usize) -> Vec<String> {
    let (u, x, z) = if k == 1 { (U1, X1, Z1) } else { (U2, X2, Z2) };
    let mut v = vec![u.to_string(), x.to_string(), z.to_string()];
    v.extend(tilde_names(k));
    v
}

/// Expands `k` to a dense table over the frame tuple (row-major) times
/// its outputs.
fn expand_kernel(k: &CondKernel, frame: &[Var]) -> Result<Vec<f64>> {
    let mut pos = Vec::new();
    for v in k.inputs() {
        let p = frame
            .iter()
            .position(|f| f.name == v.name)
            .ok_or_else(|| Error::MarkovViolation(v.name.clone()))?;
        if frame[p].card != v.card {
            return Err(Error::CardinalityMismatch(format!(
                "`{}` has {} symbols in the kernel and {} in the scheme",
                v.name, v.card, frame[p].card
            )));
        }
        pos.push(p);
    }
    let fc: Vec<usize> = frame.iter().map(|v| v.card).collect();
    let ic: Vec<usize> = k.inputs().iter().map(|v| v.card).collect();
    let mut d = vec![0; fc.len()];
    let mut sub = vec![0; ic.len()];
    let mut out = Vec::with_capacity(product(&fc) * k.out_size());
    for i in 0..product(&fc) {
        decode(i, &fc, &mut d);
        for (s, &p) in sub.iter_mut().zip(&pos) {
            *s = d[p];
        }
        out.extend_from_slice(k.row(encode(&sub, &ic)));
    }
    Ok(out)
}

impl JsccScheme {
    pub fn new(f1: AdaptFn, f2: AdaptFn, u1_next: CondKernel, u2_next: CondKernel) -> Result<Self> {
        for (k, f, kern) in [(1, &f1, &u1_next), (2, &f2, &u2_next)] {
            let name = prime(if k == 1 { U1 } else { U2 });
            check_inputs(kern, &name, &jscc_allowed(k))?;
            if kern.outputs()[0].card != f.u_card {
                return Err(Error::CardinalityMismatch(format!(
                    "`{name}` has {} symbols, the adaptation function expects {}",
                    kern.outputs()[0].card,
                    f.u_card
                )));
            }
        }
        Ok(JsccScheme {
            f1,
            f2,
            u1_next,
            u2_next,
        })
    }

    fn frame(&self, k: usize) -> Vec<Var> {
        let (f, u, x, z) = if k == 1 {
            (&self.f1, U1, X1, Z1)
        } else {
            (&self.f2, U2, X2, Z2)
        };
        vec![
            Var::new(u, f.u_card),
            Var::new(x, f.x_card),
            Var::new(z, f.z_card),
            Var::new(tilde(u), f.u_card),
            Var::new(tilde(x), f.x_card),
            Var::new(tilde(z), f.z_card),
        ]
    }

    /// The hybrid scheme whose codeword is the pair (fresh codeword,
    /// compression), U_k' = (U_k'', V_k) with index u''·|V_k| + v.
    pub fn from_separation(han: &HanScheme, v1: &CondKernel, v2: &CondKernel) -> Result<Self> {
        check_inputs(v1, V1, &separation_allowed(1))?;
        check_inputs(v2, V2, &separation_allowed(2))?;
        let mut parts = Vec::new();
        for (k, f, pu, v) in [(1, &han.f1, &han.p_u1, v1), (2, &han.f2, &han.p_u2, v2)] {
            let cv = v.outputs()[0].card;
            let cu = f.u_card;
            let g = AdaptFn::from_fn(cu * cv, f.x_card, f.z_card, |u, ut, xt, zt| f.apply(u / cv, ut / cv, xt, zt))?;
            let (uname, xname, zname) = if k == 1 { (U1, X1, Z1) } else { (U2, X2, Z2) };
            let frame = vec![
                Var::new(uname, cu * cv),
                Var::new(xname, f.x_card),
                Var::new(zname, f.z_card),
                Var::new(tilde(uname), cu * cv),
                Var::new(tilde(xname), f.x_card),
                Var::new(tilde(zname), f.z_card),
            ];
            // V sees the previous codeword's fresh component only.
            let vframe = vec![
                Var::new(uname, cu),
                Var::new(xname, f.x_card),
                Var::new(zname, f.z_card),
                Var::new(tilde(uname), cu),
                Var::new(tilde(xname), f.x_card),
                Var::new(tilde(zname), f.z_card),
            ];
            let vtab = expand_kernel(v, &vframe)?;
            let fc: Vec<usize> = vframe.iter().map(|v| v.card).collect();
            let pu = pu.table().to_vec();
            let next = CondKernel::from_fn(vec![Var::new(prime(uname), cu * cv)], frame, |i, o| {
                let (upp, vv) = (o[0] / cv, o[0] % cv);
                let row = encode(&[i[0] / cv, i[1], i[2], i[3] / cv, i[4], i[5]], &fc);
                pu[upp] * vtab[row * cv + vv]
            })?;
            parts.push((g, next));
        }
        let (f2, n2) = parts.pop().expect("two terminals");
        let (f1, n1) = parts.pop().expect("two terminals");
        Self::new(f1, f2, n1, n2)
    }
}

/// Stationary law of (U1', U2', U1, U2, X1, X2, Z1, Z2) under the
/// hybrid-coding update.
pub fn jscc_stationary_law(scheme: &JsccScheme, spec: &TwoWayChannelSpec, opts: SolverOptions) -> Result<StationaryLaw> {
    check_adapt(&scheme.f1, scheme.f1.u_card, spec, X1, Z1)?;
    check_adapt(&scheme.f2, scheme.f2.u_card, spec, X2, Z2)?;
    let w = spec.averaged_kernel();
    let k1 = expand_kernel(&scheme.u1_next, &scheme.frame(1))?;
    let k2 = expand_kernel(&scheme.u2_next, &scheme.frame(2))?;
    let (f1, f2) = (&scheme.f1, &scheme.f2);
    let (cu1, cu2) = (f1.u_card, f2.u_card);
    let (cx1, cx2, cz1, cz2) = (f1.x_card, f2.x_card, f1.z_card, f2.z_card);
    let cards = [cu1, cu2, cu1, cu2, cx1, cx2, cz1, cz2];
    let names = [prime(U1), prime(U2), U1.into(), U2.into(), X1.into(), X2.into(), Z1.into(), Z2.into()];
    let vars: Vec<Var> = names.iter().zip(cards).map(|(n, c)| Var::new(n.as_str(), c)).collect();
    let f1_frame = [cu1, cx1, cz1, cu1, cx1, cz1];
    let f2_frame = [cu2, cx2, cz2, cu2, cx2, cz2];
    let op = move |p: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        let mut d = [0usize; 8];
        for (i, &m) in p.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            decode(i, &cards, &mut d);
            let (u1, u2) = (d[0], d[1]);
            let x1 = f1.apply(u1, d[2], d[4], d[6]);
            let x2 = f2.apply(u2, d[3], d[5], d[7]);
            let row = w.row(x1 * cx2 + x2);
            for z1 in 0..cz1 {
                for z2 in 0..cz2 {
                    let pz = row[z1 * cz2 + z2];
                    if pz == 0.0 {
                        continue;
                    }
                    let r1 = encode(&[u1, x1, z1, d[2], d[4], d[6]], &f1_frame) * cu1;
                    let r2 = encode(&[u2, x2, z2, d[3], d[5], d[7]], &f2_frame) * cu2;
                    let base = ((((u1 * cu2 + u2) * cx1 + x1) * cx2 + x2) * cz1 + z1) * cz2 + z2;
                    let block = cu1 * cu2 * cx1 * cx2 * cz1 * cz2;
                    for n1 in 0..cu1 {
                        let a = k1[r1 + n1];
                        if a == 0.0 {
                            continue;
                        }
                        for n2 in 0..cu2 {
                            let b = k2[r2 + n2];
                            if b == 0.0 {
                                continue;
                            }
                            out[(n1 * cu2 + n2) * block + base] += m * pz * a * b;
                        }
                    }
                }
            }
        }
        out
    };
    solve(vars, &op, opts)
}

/// Coupling of the next block's states to the current block's.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PrimedState {
    /// Fresh states drawn from the state law.
    #[default]
    Fresh,
    /// The current block's states reused.
    Reuse,
}

impl std::str::FromStr for PrimedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" => Ok(PrimedState::Fresh),
            "reuse" => Ok(PrimedState::Reuse),
            _ => Err(Error::InvalidArgument(format!("primed state must be `fresh` or `reuse`, got `{s}`"))),
        }
    }
}

/// Renames the stationary law so that its next codewords become the
/// current ones and its block becomes the previous one.
fn shift_block(stat: &StationaryLaw) -> Result<CondKernel> {
    let map: Vec<(String, String)> = [U1, U2, X1, X2, Z1, Z2]
        .iter()
        .map(|n| (n.to_string(), tilde(n)))
        .chain([(prime(U1), U1.to_string()), (prime(U2), U2.to_string())])
        .collect();
    let map_ref: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(stat.law.clone().rename(&map_ref)?.into_kernel())
}

/// Joint source-channel coding point.
pub fn jscc_point(
    scheme: &JsccScheme,
    spec: &TwoWayChannelSpec,
    primed: PrimedState,
    opts: SolverOptions,
) -> Result<D2dPoint> {
    let stat = jscc_stationary_law(scheme, spec, opts)?;
    let prev = shift_block(&stat)?;
    let f1 = scheme.f1.kernel(X1, U1, &tilde(U1), &tilde(X1), &tilde(Z1))?;
    let f2 = scheme.f2.kernel(X2, U2, &tilde(U2), &tilde(X2), &tilde(Z2))?;
    let [u1t, x1t, z1t] = tilde_names(1);
    let [u2t, x2t, z2t] = tilde_names(2);
    let (u1p, u2p) = (prime(U1), prime(U2));

    let rate_joint = compose_marginal(
        &[&prev, &f1, &f2, &spec.averaged_kernel(), &scheme.u1_next, &scheme.u2_next],
        &[&u1t, &u2t, &x1t, &x2t, &z1t, &z2t, X1, X2, Z1, Z2, &u1p, &u2p],
    )?;
    let mut im = InfoMeasures::new(&rate_joint);
    let side1: [&str; 5] = [X1, Z1, &u1t, &x1t, &z1t];
    let side2: [&str; 5] = [X2, Z2, &u2t, &x2t, &z2t];
    let r1 = im.mi(&[&u1t], &side2, &[])? - im.mi(&[&u1p], &side1, &side2)?;
    let r2 = im.mi(&[&u2t], &side1, &[])? - im.mi(&[&u2p], &side2, &side1)?;

    let (x1p, x2p, z1p, z2p) = (prime(X1), prime(X2), prime(Z1), prime(Z2));
    let states = spec.state_law().clone().into_kernel();
    let f1p = scheme.f1.kernel(&x1p, &u1p, U1, X1, Z1)?;
    let f2p = scheme.f2.kernel(&x2p, &u2p, U2, X2, Z2)?;
    let (primed_states, primed_chan) = match primed {
        PrimedState::Fresh => {
            let (s1p, s2p) = (prime(S1), prime(S2));
            let map = [(S1, s1p.as_str()), (S2, s2p.as_str())];
            let mut m = map.to_vec();
            m.extend([(X1, x1p.as_str()), (X2, x2p.as_str()), (Z1, z1p.as_str()), (Z2, z2p.as_str())]);
            (Some(states.clone().rename(&map)?), spec.kernel().clone().rename(&m)?)
        }
        PrimedState::Reuse => {
            let m = [(X1, x1p.as_str()), (X2, x2p.as_str()), (Z1, z1p.as_str()), (Z2, z2p.as_str())];
            (None, spec.kernel().clone().rename(&m)?)
        }
    };
    let mut factors: Vec<&CondKernel> = vec![
        &prev,
        &states,
        &f1,
        &f2,
        spec.kernel(),
        &scheme.u1_next,
        &scheme.u2_next,
        &f1p,
        &f2p,
    ];
    if let Some(s) = &primed_states {
        factors.push(s);
    }
    factors.push(&primed_chan);
    let obs1: [&str; 10] = [&u2p, &x1p, &z1p, U2, X1, Z1, &u1t, &x1t, &z1t, &u2t];
    let obs2: [&str; 10] = [&u1p, &x2p, &z2p, U1, X2, Z2, &u2t, &x2t, &z2t, &u1t];
    let mut keep1 = obs1.to_vec();
    keep1.push(S1);
    let mut keep2 = obs2.to_vec();
    keep2.push(S2);
    let j1 = compose_marginal(&factors, &keep1)?;
    let j2 = compose_marginal(&factors, &keep2)?;
    let (_, d1) = optimal_distortion(&j1, &obs1, S1, spec.d1())?;
    let (_, d2) = optimal_distortion(&j2, &obs2, S2, spec.d2())?;
    Ok(D2dPoint::new([r1, r2], d1, d2, None))
}

/// Achievable rates and converse bounds of the binary two-way channel
/// with additive state noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Example3Bounds {
    pub r1: f64,
    pub r2: f64,
    pub converse_r1: f64,
    pub converse_r2: f64,
}

/// Binary rate-distortion function of a Bernoulli(p) source under
/// Hamming distortion, for p ≤ 1/2.
pub fn bernoulli_rd(p: f64, d: f64) -> f64 {
    if d < p {
        binary_entropy(p) - binary_entropy(d)
    } else {
        0.0
    }
}

/// Closed-form region of the XOR two-way channel Z_k = X1 ⊕ X2 ⊕ S_k̄.
pub fn example3_closed_form(p1: f64, p2: f64, d1: f64, d2: f64) -> Result<Example3Bounds> {
    for (n, p) in [("p1", p1), ("p2", p2)] {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain(format!("{n} = {p} outside [0, 1/2]")));
        }
    }
    for (n, d) in [("d1", d1), ("d2", d2)] {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::Domain(format!("{n} = {d} outside [0, 1]")));
        }
    }
    // Achievable: the compression is sent only when D_k̄ < p_k̄.
    let penalty = |p: f64, d: f64| if d < p { (binary_entropy(p) - binary_entropy(d)).max(0.0) } else { 0.0 };
    let cap = |p: f64| 1.0 - binary_entropy(p);
    Ok(Example3Bounds {
        r1: cap(p1) - penalty(p2, d2),
        r2: cap(p2) - penalty(p1, d1),
        converse_r1: cap(p1) - bernoulli_rd(p2, d2),
        converse_r2: cap(p2) - bernoulli_rd(p1, d1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DistortionTable;

    fn bit(n: &str) -> Var {
        Var::new(n, 2)
    }

    /// Z1 = X2, Z2 = X1, one trivial state.
    fn noiseless() -> TwoWayChannelSpec {
        let states = JointPmf::uniform(vec![Var::new(S1, 1), Var::new(S2, 1)]).unwrap();
        let k = CondKernel::deterministic(
            vec![bit(Z1), bit(Z2)],
            vec![bit(X1), bit(X2), Var::new(S1, 1), Var::new(S2, 1)],
            |i| vec![i[1], i[0]],
        )
        .unwrap();
        TwoWayChannelSpec::new(states, k, DistortionTable::new(1, 1, vec![0.0]).unwrap(), DistortionTable::new(1, 1, vec![0.0]).unwrap()).unwrap()
    }

    fn point_u(name: &str) -> JointPmf {
        JointPmf::uniform(vec![Var::new(name, 1)]).unwrap()
    }

    #[test]
    fn adapt_fn_indexing() {
        let f = AdaptFn::from_fn(2, 2, 2, |u, ut, xt, zt| (u + ut + xt + zt) % 2).unwrap();
        assert_eq!(f.apply(1, 0, 1, 1), 1);
        assert_eq!(f.table()[((1 * 2 + 0) * 2 + 1) * 2 + 1], 1);
        assert!(!f.is_nonadaptive());
        assert!(AdaptFn::identity(2, 2).unwrap().is_nonadaptive());
        assert!(AdaptFn::new(2, 2, 2, vec![0; 15]).is_err());
        assert!(AdaptFn::new(1, 2, 1, vec![2]).is_err());
    }

    #[test]
    fn nor_feedback_cycles() {
        // x_k = NOR(x̃_k, z̃_k). From uniform, each input is 1 w.p. 1/4
        // independently, then (1,1) has mass 9/16 and the chain alternates
        // between weights 9/16 and 7/16 on {(0,0), (1,1)}.
        let f = AdaptFn::from_fn(1, 2, 2, |_, _, xt, zt| usize::from(xt == 0 && zt == 0)).unwrap();
        let s = HanScheme::new(point_u(U1), point_u(U2), f.clone(), f).unwrap();
        let r = stationary_law(&s, &noiseless(), SolverOptions { tol: 1e-12, max_iters: 50 });
        match r {
            Err(Error::NonConvergence { residual, trace }) => {
                assert_eq!(trace.len(), 50);
                assert!((residual - 0.125).abs() < 1e-12);
                assert!((trace[0] - 0.75).abs() < 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn copying_previous_input_is_ambiguous() {
        let f = AdaptFn::from_fn(1, 2, 2, |_, _, xt, _| xt).unwrap();
        let s = HanScheme::new(point_u(U1), point_u(U2), f.clone(), f).unwrap();
        match stationary_law(&s, &noiseless(), SolverOptions::default()) {
            Err(Error::AmbiguousFixedPoint { law, distance }) => {
                assert!(distance > 1e-10);
                assert!(law.residual < 1e-12);
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn zero_tolerance_is_rejected() {
        let p = JointPmf::uniform(vec![bit(X1)]).unwrap();
        let q = JointPmf::uniform(vec![bit(X2)]).unwrap();
        let s = HanScheme::nonadaptive(&p, &q, &noiseless()).unwrap();
        let r = stationary_law(&s, &noiseless(), SolverOptions { tol: 0.0, max_iters: 10 });
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn noiseless_identity_carries_one_bit() {
        let spec = noiseless();
        let p = JointPmf::uniform(vec![bit(X1)]).unwrap();
        let q = JointPmf::uniform(vec![bit(X2)]).unwrap();
        let s = HanScheme::nonadaptive(&p, &q, &spec).unwrap();
        let stat = stationary_law(&s, &spec, SolverOptions::default()).unwrap();
        let ext = extend_one_block(&stat, &s, &spec).unwrap();
        let (r1, r2) = han_rates(&ext).unwrap();
        assert!((r1 - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert_eq!(shannon_rates(&p, &q, &spec).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn constant_codeword_carries_nothing() {
        let spec = noiseless();
        let f = AdaptFn::from_fn(1, 2, 2, |_, _, _, _| 0).unwrap();
        let s = HanScheme::new(point_u(U1), point_u(U2), f.clone(), f).unwrap();
        let stat = stationary_law(&s, &spec, SolverOptions::default()).unwrap();
        let ext = extend_one_block(&stat, &s, &spec).unwrap();
        assert_eq!(han_rates(&ext).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn compression_outside_markov_set_is_rejected() {
        let spec = noiseless();
        let p = JointPmf::uniform(vec![bit(X1)]).unwrap();
        let q = JointPmf::uniform(vec![bit(X2)]).unwrap();
        let s = HanScheme::nonadaptive(&p, &q, &spec).unwrap();
        let bad = CondKernel::deterministic(vec![Var::new(V1, 1)], vec![Var::new(S1, 1)], |_| vec![0]).unwrap();
        let ok = CondKernel::constant(Var::new(V2, 1), 0).unwrap();
        let r = separation_point(&s, &spec, &bad, &ok, SolverOptions::default());
        assert!(matches!(r, Err(Error::MarkovViolation(ref v)) if v == S1));
        let r = nonadaptive_point(&p, &q, &spec, &bad, &ok);
        assert!(matches!(r, Err(Error::MarkovViolation(_))));
    }

    #[test]
    fn closed_form_edges() {
        let b = example3_closed_form(0.0, 0.0, 0.3, 0.0).unwrap();
        assert_eq!((b.r1, b.r2), (1.0, 1.0));
        let b = example3_closed_form(0.1, 0.2, 0.3, 0.25).unwrap();
        assert!((b.r1 - (1.0 - binary_entropy(0.1))).abs() < 1e-15);
        assert!((b.r2 - (1.0 - binary_entropy(0.2))).abs() < 1e-15);
        assert!(matches!(example3_closed_form(0.6, 0.1, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(example3_closed_form(0.1, 0.1, 1.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_matches_entropy_arithmetic() {
        let b = example3_closed_form(0.1, 0.1, 0.05, 0.05).unwrap();
        let hb = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let want = 1.0 - hb(0.1) - (hb(0.1) - hb(0.05));
        assert!((b.r1 - want).abs() < 1e-12);
        assert!((b.r1 - 0.3488).abs() < 1e-3);
        assert_eq!(b.r1, b.converse_r1);
    }

    #[test]
    fn primed_state_parses() {
        assert_eq!("fresh".parse::<PrimedState>().unwrap(), PrimedState::Fresh);
        assert_eq!("reuse".parse::<PrimedState>().unwrap(), PrimedState::Reuse);
        assert!("other".parse::<PrimedState>().is_err());
    }
}
