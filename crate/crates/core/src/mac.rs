//! Rate-distortion regions of the two-transmitter MAC with generalized
//! feedback: cooperative (no sensing), cooperative with per-transmitter
//! estimators, and collaborative sensing with compressed feedback.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::channel::{names::*, MacChannelSpec};
use crate::error::{Error, Result};
use crate::estimation::optimal_distortion;
use crate::lp::{feasible_point, to_f64, to_rational};
use crate::prob::{compose, CondKernel, InfoMeasures, JointPmf, Var};

/// Slack below which a constraint counts as violated.
pub const MEMBER_TOL: f64 = 1e-9;

/// Total-variation tolerance of the factorization check.
pub const FACTOR_TOL: f64 = 1e-6;

/// Auxiliary law of the block-Markov scheme.
#[derive(Clone, Debug)]
pub struct AuxMacScheme {
    pub p_u0: CondKernel,
    pub p_u1: CondKernel,
    pub p_u2: CondKernel,
    pub p_x1: CondKernel,
    pub p_x2: CondKernel,
    pub p_v1: Option<CondKernel>,
    pub p_v2: Option<CondKernel>,
}

fn check_shape(k: &CondKernel, out: &str, inputs: &[&str]) -> Result<()> {
    let outs: Vec<&str> = k.outputs().iter().map(|v| v.name.as_str()).collect();
    if outs != [out] {
        return Err(Error::Schema(format!("kernel for `{out}` produces {outs:?}")));
    }
    let mut got: Vec<&str> = k.inputs().iter().map(|v| v.name.as_str()).collect();
    let mut want = inputs.to_vec();
    got.sort_unstable();
    want.sort_unstable();
    if got != want {
        return Err(Error::Schema(format!(
            "kernel for `{out}` conditions on {got:?}, expected {want:?}"
        )));
    }
    Ok(())
}

fn card_table<'a>(kernels: impl IntoIterator<Item = &'a CondKernel>) -> Result<BTreeMap<String, usize>> {
    let mut cards = BTreeMap::new();
    for k in kernels {
        for v in k.outputs().iter().chain(k.inputs()) {
            match cards.insert(v.name.clone(), v.card) {
                Some(c) if c != v.card => {
                    return Err(Error::CardinalityMismatch(format!(
                        "`{}` has {} symbols in one kernel and {c} in another",
                        v.name, v.card
                    )))
                }
                _ => {}
            }
        }
    }
    Ok(cards)
}

impl AuxMacScheme {
    pub fn new(
        p_u0: CondKernel,
        p_u1: CondKernel,
        p_u2: CondKernel,
        p_x1: CondKernel,
        p_x2: CondKernel,
        p_v1: Option<CondKernel>,
        p_v2: Option<CondKernel>,
    ) -> Result<Self> {
        check_shape(&p_u0, U0, &[])?;
        check_shape(&p_u1, U1, &[U0])?;
        check_shape(&p_u2, U2, &[U0])?;
        check_shape(&p_x1, X1, &[U0, U1])?;
        check_shape(&p_x2, X2, &[U0, U2])?;
        if let Some(v) = &p_v1 {
            check_shape(v, V1, &[U0, U2, X1, Z1])?;
        }
        if let Some(v) = &p_v2 {
            check_shape(v, V2, &[U0, U1, X2, Z2])?;
        }
        let s = AuxMacScheme {
            p_u0,
            p_u1,
            p_u2,
            p_x1,
            p_x2,
            p_v1,
            p_v2,
        };
        card_table(s.kernels())?;
        Ok(s)
    }

    /// The scheme with both compression kernels removed.
    pub fn without_compression(&self) -> AuxMacScheme {
        AuxMacScheme {
            p_v1: None,
            p_v2: None,
            ..self.clone()
        }
    }

    pub fn has_compression(&self) -> bool {
        self.p_v1.is_some() || self.p_v2.is_some()
    }

    fn kernels(&self) -> Vec<&CondKernel> {
        let mut v = vec![&self.p_u0, &self.p_u1, &self.p_u2, &self.p_x1, &self.p_x2];
        v.extend(self.p_v1.iter());
        v.extend(self.p_v2.iter());
        v
    }
}

/// Joint law of states, auxiliaries, inputs, outputs and (if present)
/// compression variables. Missing compression kernels are replaced by
/// constant variables.
pub fn mac_joint(spec: &MacChannelSpec, aux: &AuxMacScheme) -> Result<JointPmf> {
    let states = spec.state_law().clone().into_kernel();
    let mut factors = vec![&states];
    factors.extend([&aux.p_u0, &aux.p_u1, &aux.p_u2, &aux.p_x1, &aux.p_x2]);
    factors.push(spec.kernel());
    let (c1, c2);
    if aux.has_compression() {
        c1 = CondKernel::constant(Var::new(V1, 1), 0)?;
        c2 = CondKernel::constant(Var::new(V2, 1), 0)?;
        factors.push(aux.p_v1.as_ref().unwrap_or(&c1));
        factors.push(aux.p_v2.as_ref().unwrap_or(&c2));
    }
    compose(&factors)
}

/// One linear constraint `c1·R1 + c2·R2 ≤ bound`. Feasibility conditions
/// have `c1 = c2 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub c1: f64,
    pub c2: f64,
    pub bound: f64,
}

impl Constraint {
    fn new(label: impl Into<String>, c1: f64, c2: f64, bound: f64) -> Self {
        Constraint {
            label: label.into(),
            c1,
            c2,
            bound,
        }
    }

    pub fn slack(&self, r1: f64, r2: f64) -> f64 {
        self.bound - self.c1 * r1 - self.c2 * r2
    }
}

/// Outcome of a membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionVerdict {
    pub member: bool,
    pub slacks: BTreeMap<String, f64>,
    pub mi_terms: BTreeMap<String, f64>,
    /// Label of the constraint with the smallest slack.
    pub binding: String,
}

/// Which rate combination to maximize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    SumRate,
    R1,
    R2,
}

impl Objective {
    pub fn value(self, r1: f64, r2: f64) -> f64 {
        match self {
            Objective::SumRate => r1 + r2,
            Objective::R1 => r1,
            Objective::R2 => r2,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum_rate" | "sum" => Ok(Objective::SumRate),
            "r1" => Ok(Objective::R1),
            "r2" => Ok(Objective::R2),
            _ => Err(Error::InvalidArgument(format!(
                "unknown objective `{s}` (expected sum_rate, r1 or r2)"
            ))),
        }
    }
}

/// A polytope in the (R1, R2) plane given by constraints with
/// coefficients in {0, 1}, together with the information terms used to
/// build it.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub constraints: Vec<Constraint>,
    pub mi_terms: BTreeMap<String, f64>,
}

impl Region {
    pub fn verdict(&self, r1: f64, r2: f64) -> Result<RegionVerdict> {
        if !(r1 >= 0.0 && r2 >= 0.0) || !r1.is_finite() || !r2.is_finite() {
            return Err(Error::Domain(format!("rates must be finite and nonnegative, got ({r1}, {r2})")));
        }
        let mut slacks = BTreeMap::new();
        let mut binding = (f64::INFINITY, String::new());
        for c in &self.constraints {
            let s = c.slack(r1, r2);
            if s < binding.0 {
                binding = (s, c.label.clone());
            }
            slacks.insert(c.label.clone(), s);
        }
        Ok(RegionVerdict {
            member: binding.0 >= -MEMBER_TOL,
            slacks,
            mi_terms: self.mi_terms.clone(),
            binding: binding.1,
        })
    }

    fn tightest(&self, c1: f64, c2: f64) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.c1 == c1 && c.c2 == c2)
            .map(|c| c.bound)
            .fold(f64::INFINITY, f64::min)
    }

    /// A point of the region maximizing `obj`, or `None` if the region is
    /// empty.
    pub fn best_point(&self, obj: Objective) -> Option<(f64, f64)> {
        let a = self.tightest(1.0, 0.0);
        let b = self.tightest(0.0, 1.0);
        let c = self.tightest(1.0, 1.0);
        let f = self.tightest(0.0, 0.0);
        if a.min(b).min(c).min(f) < -MEMBER_TOL {
            return None;
        }
        let (a, b, c) = (a.max(0.0), b.max(0.0), c.max(0.0));
        let (r1, r2) = match obj {
            Objective::SumRate | Objective::R1 => {
                let r1 = a.min(c);
                (r1, b.min(c - r1).max(0.0))
            }
            Objective::R2 => {
                let r2 = b.min(c);
                (a.min(c - r2).max(0.0), r2)
            }
        };
        Some((r1, r2))
    }
}

fn require(p: &JointPmf, vars: &[&str]) -> Result<()> {
    vars.iter()
        .find(|v| !p.contains(v))
        .map_or(Ok(()), |v| Err(Error::MissingVar(v.to_string())))
}

/// Cooperative region without compression.
pub fn willems_region(joint: &JointPmf) -> Result<Region> {
    require(joint, &[U0, U1, U2, X1, X2, Y, Z1, Z2])?;
    let mut im = InfoMeasures::new(joint);
    let mut t = BTreeMap::new();
    let mut term = |label: &str, a: &[&str], b: &[&str], c: &[&str]| -> Result<f64> {
        let v = im.mi(a, b, c)?;
        t.insert(label.to_string(), v);
        Ok(v)
    };
    let d1 = term("I(X1;Y|X2U1U0)", &[X1], &[Y], &[X2, U1, U0])?;
    let c1 = term("I(U1;Z2|X2U0)", &[U1], &[Z2], &[X2, U0])?;
    let d2 = term("I(X2;Y|X1U2U0)", &[X2], &[Y], &[X1, U2, U0])?;
    let c2 = term("I(U2;Z1|X1U0)", &[U2], &[Z1], &[X1, U0])?;
    let full = term("I(X1X2;Y)", &[X1, X2], &[Y], &[])?;
    let inner = term("I(X1X2;Y|U0U1U2)", &[X1, X2], &[Y], &[U0, U1, U2])?;
    Ok(Region {
        constraints: vec![
            Constraint::new("R1", 1.0, 0.0, d1 + c1),
            Constraint::new("R2", 0.0, 1.0, d2 + c2),
            Constraint::new("SUM:I(X1X2;Y)", 1.0, 1.0, full),
            Constraint::new("SUM:coop", 1.0, 1.0, inner + c1 + c2),
        ],
        mi_terms: t,
    })
}

pub fn willems_verdict(joint: &JointPmf, r1: f64, r2: f64) -> Result<RegionVerdict> {
    willems_region(joint)?.verdict(r1, r2)
}

/// The information terms I0..I15 of the collaborative region.
pub fn collaborative_terms(joint: &JointPmf) -> Result<[f64; 16]> {
    require(joint, &[U0, U1, U2, X1, X2, Y, Z1, Z2, V1, V2])?;
    let mut im = InfoMeasures::new(joint);
    let u = [U0, U1, U2];
    let ux2 = [U0, U1, U2, X2];
    let ux1 = [U0, U1, U2, X1];
    let i0 = im.mi(&[V1], &[X1, X2, Y], &u)? + im.mi(&[V2], &[X1, X2, Y, V1], &u)?;
    Ok([
        i0,
        im.mi(&[V1], &[X1, Z1], &u)?,
        im.mi(&[V2], &[X2, Z2], &u)?,
        im.mi(&[U1], &[X2, Z2], &[U0, U2])?,
        im.mi(&[U2], &[X1, Z1], &[U0, U1])?,
        im.mi(&[V1], &[X2, Z2], &u)?,
        im.mi(&[V2], &[X1, Z1], &u)?,
        im.mi(&[X1, X2], &[Y, V1, V2], &u)?,
        im.mi(&[X1], &[Y, V1, V2], &ux2)?,
        im.mi(&[X2], &[Y, V1, V2], &ux1)?,
        im.mi(&[X1], &[Y], &[U0, X2])?,
        im.mi(&[X2], &[Y], &[U0, X1])?,
        im.mi(&[X1, X2], &[Y], &[U0, U2])?,
        im.mi(&[X1, X2], &[Y], &[U0, U1])?,
        im.mi(&[X1, X2], &[Y], &[U0])?,
        im.mi(&[X1, X2], &[Y], &[])?,
    ])
}

/// Collaborative region from precomputed terms.
pub fn collaborative_region_from_terms(i: &[f64; 16]) -> Region {
    let mut cs = Vec::new();
    let k1 = i[3] + i[5] - i[1];
    let k2 = i[4] + i[6] - i[2];
    let both = i[14] + i[0] - i[1] - i[2];
    for (label, v) in [
        ("I8", i[8]),
        ("I10+I0-I1", i[10] + i[0] - i[1]),
        ("I13+I0-I2", i[13] + i[0] - i[2]),
        ("I14+I0-I1-I2", both),
    ] {
        cs.push(Constraint::new(format!("R1:{label}"), 1.0, 0.0, k1 + v));
    }
    for (label, v) in [
        ("I9", i[9]),
        ("I11+I0-I2", i[11] + i[0] - i[2]),
        ("I12+I0-I1", i[12] + i[0] - i[1]),
        ("I14+I0-I1-I2", both),
    ] {
        cs.push(Constraint::new(format!("R2:{label}"), 0.0, 1.0, k2 + v));
    }
    for (label, v) in [
        ("I7", i[7]),
        ("I12+I0-I1", i[12] + i[0] - i[1]),
        ("I13+I0-I2", i[13] + i[0] - i[2]),
        ("I14+I0-I1-I2", both),
    ] {
        cs.push(Constraint::new(format!("SUM:{label}"), 1.0, 1.0, k1 + k2 + v));
    }
    cs.push(Constraint::new("SUM:I15+I0-I1-I2", 1.0, 1.0, i[15] + i[0] - i[1] - i[2]));
    cs.push(Constraint::new("F:I3+I5>=I1", 0.0, 0.0, k1));
    cs.push(Constraint::new("F:I4+I6>=I2", 0.0, 0.0, k2));
    cs.push(Constraint::new("F:I14+I0>=I1+I2", 0.0, 0.0, both));
    cs.push(Constraint::new("F:I10+I0>=I1", 0.0, 0.0, i[10] + i[0] - i[1]));
    cs.push(Constraint::new("F:I11+I0>=I2", 0.0, 0.0, i[11] + i[0] - i[2]));
    let mi_terms = i
        .iter()
        .enumerate()
        .map(|(k, v)| (format!("I{k}"), *v))
        .collect();
    Region {
        constraints: cs,
        mi_terms,
    }
}

/// Collaborative region of a joint law assumed to have the required
/// factorization.
pub fn collaborative_region(joint: &JointPmf) -> Result<Region> {
    Ok(collaborative_region_from_terms(&collaborative_terms(joint)?))
}

/// Recomposes `joint` from its own conditionals in the factor order of
/// the scheme and returns the total-variation distance.
pub fn factorization_distance(joint: &JointPmf) -> Result<f64> {
    require(joint, &[U0, U1, U2, X1, X2, Y, Z1, Z2, V1, V2])?;
    let with_states = joint.contains(S1) && joint.contains(S2);
    let mut factors = Vec::new();
    let mut ins: Vec<&str> = vec![X1, X2];
    if with_states {
        factors.push(joint.marginalize(&[S1, S2])?.into_kernel());
        ins.extend([S1, S2]);
    }
    factors.push(joint.marginalize(&[U0])?.into_kernel());
    factors.push(joint.conditional(&[U1], &[U0])?);
    factors.push(joint.conditional(&[U2], &[U0])?);
    factors.push(joint.conditional(&[X1], &[U0, U1])?);
    factors.push(joint.conditional(&[X2], &[U0, U2])?);
    factors.push(joint.conditional(&[Y, Z1, Z2], &ins)?);
    factors.push(joint.conditional(&[V1], &[U0, U2, X1, Z1])?);
    factors.push(joint.conditional(&[V2], &[U0, U1, X2, Z2])?);
    let refs: Vec<&CondKernel> = factors.iter().collect();
    let rebuilt = compose(&refs)?;
    let names = rebuilt.names();
    joint.reorder(&names)?.total_variation(&rebuilt)
}

/// Membership in the collaborative region, after checking that `joint`
/// factorizes as the scheme requires.
pub fn collaborative_verdict(joint: &JointPmf, r1: f64, r2: f64) -> Result<RegionVerdict> {
    let tv = factorization_distance(joint)?;
    if tv > FACTOR_TOL {
        return Err(Error::FactorizationViolation(tv));
    }
    collaborative_region(joint)?.verdict(r1, r2)
}

/// Right-hand sides of the system before elimination, computed from the
/// information expressions directly rather than from I0..I15.
#[derive(Clone, Debug, PartialEq)]
pub struct PreFmeTerms {
    /// I(V_k; X_k Z_k | U0 U1 U2)
    pub v_own: [f64; 2],
    /// I(U_k V_k̄; X_k̄ Z_k̄ | U0 U_k̄)
    pub common: [f64; 2],
    /// I(V_k; X_k̄ Z_k̄ | U0 U1 U2)
    pub v_cross: [f64; 2],
    /// I(X_k; Y V1 V2 | U0 U1 U2 X_k̄)
    pub private: [f64; 2],
    /// I(X_k; Y | U0 X_k̄)
    pub single: [f64; 2],
    /// I(X1 X2; Y | U0 U_k̄)
    pub pair: [f64; 2],
    pub i0: f64,
    /// I(X1 X2; Y V1 V2 | U0 U1 U2)
    pub both_private: f64,
    /// I(X1 X2; Y | U0)
    pub given_u0: f64,
    /// I(X1 X2; Y)
    pub total: f64,
}

impl PreFmeTerms {
    pub fn new(joint: &JointPmf) -> Result<Self> {
        require(joint, &[U0, U1, U2, X1, X2, Y, Z1, Z2, V1, V2])?;
        let mut im = InfoMeasures::new(joint);
        let u = [U0, U1, U2];
        Ok(PreFmeTerms {
            v_own: [im.mi(&[V1], &[X1, Z1], &u)?, im.mi(&[V2], &[X2, Z2], &u)?],
            common: [
                im.mi(&[U1, V2], &[X2, Z2], &[U0, U2])?,
                im.mi(&[U2, V1], &[X1, Z1], &[U0, U1])?,
            ],
            v_cross: [im.mi(&[V1], &[X2, Z2], &u)?, im.mi(&[V2], &[X1, Z1], &u)?],
            private: [
                im.mi(&[X1], &[Y, V1, V2], &[U0, U1, U2, X2])?,
                im.mi(&[X2], &[Y, V1, V2], &[U0, U1, U2, X1])?,
            ],
            single: [im.mi(&[X1], &[Y], &[U0, X2])?, im.mi(&[X2], &[Y], &[U0, X1])?],
            pair: [im.mi(&[X1, X2], &[Y], &[U0, U2])?, im.mi(&[X1, X2], &[Y], &[U0, U1])?],
            i0: im.mi(&[V1], &[X1, X2, Y], &u)? + im.mi(&[V2], &[X1, X2, Y, V1], &u)?,
            both_private: im.mi(&[X1, X2], &[Y, V1, V2], &u)?,
            given_u0: im.mi(&[X1, X2], &[Y], &[U0])?,
            total: im.mi(&[X1, X2], &[Y], &[])?,
        })
    }
}

/// Witness rate split (R1p, R2p, R1v, R2v).
#[derive(Clone, Debug, PartialEq)]
pub struct RateSplit {
    pub r1p: f64,
    pub r2p: f64,
    pub r1v: f64,
    pub r2v: f64,
}

/// Exact feasibility of the system before elimination, over private rates
/// R_kp ∈ [0, R_k] and compression rates R_kv ≥ 0. Each inequality is
/// relaxed by [`MEMBER_TOL`].
pub fn prefme_feasible_from_terms(t: &PreFmeTerms, r1: f64, r2: f64) -> Option<RateSplit> {
    // Columns: R1p, R2p, R1v, R2v.
    let rows: Vec<([i64; 4], f64)> = vec![
        ([0, 0, -1, 0], -t.v_own[0]),
        ([0, 0, 0, -1], -t.v_own[1]),
        ([1, 0, 0, 0], r1),
        ([0, 1, 0, 0], r2),
        ([-1, 0, 0, 1], t.common[0] - r1),
        ([0, -1, 1, 0], t.common[1] - r2),
        ([-1, 0, 1, 1], t.common[0] + t.v_cross[0] - r1),
        ([0, -1, 1, 1], t.common[1] + t.v_cross[1] - r2),
        ([1, 0, 0, 0], t.private[0]),
        ([0, 1, 0, 0], t.private[1]),
        ([1, 0, 1, 0], t.single[0] + t.i0),
        ([0, 1, 0, 1], t.single[1] + t.i0),
        ([1, 1, 1, 0], t.pair[0] + t.i0),
        ([1, 1, 0, 1], t.pair[1] + t.i0),
        ([1, 1, 0, 0], t.both_private),
        ([1, 1, 1, 1], t.given_u0 + t.i0),
        ([0, 0, 1, 1], t.total + t.i0 - r1 - r2),
    ];
    let tol = to_rational(MEMBER_TOL);
    let a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|(c, _)| c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let b: Vec<BigRational> = rows.iter().map(|(_, v)| to_rational(*v) + &tol).collect();
    feasible_point(&a, &b).map(|x| RateSplit {
        r1p: to_f64(&x[0]),
        r2p: to_f64(&x[1]),
        r1v: to_f64(&x[2]),
        r2v: to_f64(&x[3]),
    })
}

/// Feasibility of the rate pair in the system before elimination, after
/// the same factorization check as [`collaborative_verdict`].
pub fn prefme_feasible(joint: &JointPmf, r1: f64, r2: f64) -> Result<Option<RateSplit>> {
    if !(r1 >= 0.0 && r2 >= 0.0) {
        return Err(Error::Domain(format!("rates must be nonnegative, got ({r1}, {r2})")));
    }
    let tv = factorization_distance(joint)?;
    if tv > FACTOR_TOL {
        return Err(Error::FactorizationViolation(tv));
    }
    Ok(prefme_feasible_from_terms(&PreFmeTerms::new(joint)?, r1, r2))
}

/// A region together with the distortions achieved by its estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct MacPoint {
    pub region: Region,
    pub d1: f64,
    pub d2: f64,
}

fn distortions(spec: &MacChannelSpec, joint: &JointPmf, extra: [&[&str]; 2]) -> Result<(f64, f64)> {
    let mut o1 = vec![X1, Z1, U2];
    o1.extend_from_slice(extra[0]);
    let mut o2 = vec![X2, Z2, U1];
    o2.extend_from_slice(extra[1]);
    let (_, d1) = optimal_distortion(joint, &o1, S1, spec.d1())?;
    let (_, d2) = optimal_distortion(joint, &o2, S2, spec.d2())?;
    Ok((d1, d2))
}

/// Cooperative region with estimators on (X_k, Z_k, U_k̄).
pub fn kobayashi_point(spec: &MacChannelSpec, aux: &AuxMacScheme) -> Result<MacPoint> {
    if aux.has_compression() {
        return Err(Error::InvalidArgument(
            "the estimator-only region takes a scheme without compression kernels".into(),
        ));
    }
    let joint = mac_joint(spec, aux)?;
    let (d1, d2) = distortions(spec, &joint, [&[], &[]])?;
    Ok(MacPoint {
        region: willems_region(&joint)?,
        d1,
        d2,
    })
}

/// Distortions of the collaborative estimators on (X_k, Z_k, U_k̄, V_k̄).
pub fn collaborative_distortions(spec: &MacChannelSpec, aux: &AuxMacScheme) -> Result<(f64, f64)> {
    if !aux.has_compression() {
        return Err(Error::InvalidArgument(
            "collaborative distortions need at least one compression kernel".into(),
        ));
    }
    let joint = mac_joint(spec, aux)?;
    distortions(spec, &joint, [&[V2], &[V1]])
}

/// Collaborative region and distortions of a scheme. A scheme without
/// compression kernels is evaluated with constant compression variables.
pub fn collaborative_point(spec: &MacChannelSpec, aux: &AuxMacScheme) -> Result<MacPoint> {
    let aux = if aux.has_compression() {
        aux.clone()
    } else {
        AuxMacScheme {
            p_v1: Some(CondKernel::constant(Var::new(V1, 1), 0)?),
            ..aux.clone()
        }
    };
    let joint = mac_joint(spec, &aux)?;
    let (d1, d2) = distortions(spec, &joint, [&[V2], &[V1]])?;
    Ok(MacPoint {
        region: collaborative_region(&joint)?,
        d1,
        d2,
    })
}
