//! Parametrized scheme families, tradeoff-curve sweeps and concavity checks.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{names::*, ChannelSpec};
use crate::d2d::{jscc_point, nonadaptive_point, separation_point, D2dPoint, PrimedState, SolverOptions};
use crate::error::{Error, Result};
use crate::files::D2dScheme;
use crate::mac::{collaborative_point, kobayashi_point, AuxMacScheme, MacPoint, Objective};
use crate::presets;
use crate::prob::{CondKernel, Var};

/// Distortions within this margin of a bound count as meeting it.
pub const DIST_TOL: f64 = 1e-12;

/// Concavity violations below this size are attributed to search noise.
pub const CONCAVITY_TOL: f64 = 1e-6;

/// Number of starts refined by coordinate descent per grid point.
pub const TOP_STARTS: usize = 5;

/// Points per axis of the final local grid.
pub const LOCAL_GRID: usize = 11;

/// Half-width of the final local grid, as a fraction of each range.
pub const LOCAL_WIDTH: f64 = 0.05;

/// Score offset of points that miss a constraint.
const INFEASIBLE: f64 = -1e3;

/// Which inner bound a scheme is evaluated under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Cooperative MAC region with estimators on (X_k, Z_k, U_k̄).
    Kobayashi,
    /// MAC region with compressed feedback forwarding.
    Collab,
    /// Two-way channel, memoryless inputs.
    Nonadaptive,
    /// Two-way channel, block-adaptive coding plus Wyner-Ziv compression.
    Separation,
    /// Two-way channel, hybrid coding.
    Jscc,
}

impl Theorem {
    pub fn is_mac(self) -> bool {
        matches!(self, Theorem::Kobayashi | Theorem::Collab)
    }

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Kobayashi => "kobayashi",
            Theorem::Collab => "collab",
            Theorem::Nonadaptive => "nonadaptive",
            Theorem::Separation => "separation",
            Theorem::Jscc => "jscc",
        }
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kobayashi" | "willems" => Ok(Theorem::Kobayashi),
            "collab" | "collaborative" => Ok(Theorem::Collab),
            "nonadaptive" => Ok(Theorem::Nonadaptive),
            "separation" => Ok(Theorem::Separation),
            "jscc" => Ok(Theorem::Jscc),
            _ => Err(Error::InvalidArgument(format!(
                "unknown theorem `{s}` (expected kobayashi, collab, nonadaptive, separation or jscc)"
            ))),
        }
    }
}

/// A scheme of either channel model.
#[derive(Clone, Debug)]
pub enum Scheme {
    Mac(AuxMacScheme),
    D2d(D2dScheme),
}

/// Everything besides the scheme that an evaluation depends on.
#[derive(Clone, Debug)]
pub struct EvalContext {
    pub spec: ChannelSpec,
    pub theorem: Theorem,
    pub objective: Objective,
    pub primed: PrimedState,
    pub solver: SolverOptions,
}

impl EvalContext {
    pub fn new(spec: ChannelSpec, theorem: Theorem, objective: Objective) -> Self {
        EvalContext {
            spec,
            theorem,
            objective,
            primed: PrimedState::default(),
            solver: SolverOptions::default(),
        }
    }
}

/// Best operating point of one scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Objective at the best rate pair, −∞ if the rate region is empty.
    pub objective: f64,
    pub r1: f64,
    pub r2: f64,
    pub d1: f64,
    pub d2: f64,
    pub member: bool,
    /// Tightest constraint at the reported rate pair.
    pub binding: String,
}

fn mac_evaluation(p: MacPoint, obj: Objective) -> Result<Evaluation> {
    match p.region.best_point(obj) {
        Some((r1, r2)) => {
            let v = p.region.verdict(r1, r2)?;
            Ok(Evaluation {
                objective: obj.value(r1, r2),
                r1,
                r2,
                d1: p.d1,
                d2: p.d2,
                member: v.member,
                binding: v.binding,
            })
        }
        None => Ok(Evaluation {
            objective: f64::NEG_INFINITY,
            r1: 0.0,
            r2: 0.0,
            d1: p.d1,
            d2: p.d2,
            member: false,
            binding: p.region.verdict(0.0, 0.0)?.binding,
        }),
    }
}

fn d2d_evaluation(p: D2dPoint, obj: Objective) -> Evaluation {
    let binding = match p.clamped {
        [true, true] => "clamped:R1+R2",
        [true, false] => "clamped:R1",
        [false, true] => "clamped:R2",
        [false, false] => "rates",
    };
    Evaluation {
        objective: obj.value(p.r1, p.r2),
        r1: p.r1,
        r2: p.r2,
        d1: p.d1,
        d2: p.d2,
        member: true,
        binding: binding.into(),
    }
}

fn constant_v(name: &str) -> Result<CondKernel> {
    CondKernel::constant(Var::new(name, 1), 0)
}

/// Evaluates `scheme` under the theorem of `ctx`.
pub fn evaluate(scheme: &Scheme, ctx: &EvalContext) -> Result<Evaluation> {
    let mismatch = || {
        Err(Error::InvalidArgument(format!(
            "theorem `{}` cannot evaluate this kind of scheme",
            ctx.theorem.name()
        )))
    };
    match (scheme, ctx.theorem) {
        (Scheme::Mac(aux), Theorem::Kobayashi) => {
            let spec = ctx.spec.as_mac()?;
            mac_evaluation(kobayashi_point(spec, &aux.without_compression())?, ctx.objective)
        }
        (Scheme::Mac(aux), Theorem::Collab) => {
            mac_evaluation(collaborative_point(ctx.spec.as_mac()?, aux)?, ctx.objective)
        }
        (Scheme::D2d(D2dScheme::Nonadaptive { p_x1, p_x2, v1, v2 }), Theorem::Nonadaptive) => {
            let p = nonadaptive_point(p_x1, p_x2, ctx.spec.as_two_way()?, v1, v2)?;
            Ok(d2d_evaluation(p, ctx.objective))
        }
        (Scheme::D2d(D2dScheme::Han { scheme, v1, v2 }), Theorem::Separation) => {
            let (c1, c2) = (constant_v(V1)?, constant_v(V2)?);
            let p = separation_point(
                scheme,
                ctx.spec.as_two_way()?,
                v1.as_ref().unwrap_or(&c1),
                v2.as_ref().unwrap_or(&c2),
                ctx.solver,
            )?;
            Ok(d2d_evaluation(p, ctx.objective))
        }
        (Scheme::D2d(D2dScheme::Jscc(j)), Theorem::Jscc) => {
            let p = jscc_point(j, ctx.spec.as_two_way()?, ctx.primed, ctx.solver)?;
            Ok(d2d_evaluation(p, ctx.objective))
        }
        _ => mismatch(),
    }
}

/// One coordinate of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        ParamSpec {
            name: name.into(),
            lower,
            upper,
        }
    }

    fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

pub type Builder = Arc<dyn Fn(&[f64]) -> Result<Scheme> + Send + Sync>;

/// A box of parameters and a map from parameter vectors to schemes.
#[derive(Clone)]
pub struct ParamFamily {
    pub name: String,
    pub params: Vec<ParamSpec>,
    builder: Builder,
}

impl std::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamFamily")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl ParamFamily {
    pub fn new(name: impl Into<String>, params: Vec<ParamSpec>, builder: Builder) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidArgument("a family needs at least one parameter".into()));
        }
        for p in &params {
            if !p.lower.is_finite() || !p.upper.is_finite() || p.lower > p.upper {
                return Err(Error::Domain(format!(
                    "parameter `{}` has bounds [{}, {}]",
                    p.name, p.lower, p.upper
                )));
            }
        }
        Ok(ParamFamily {
            name: name.into(),
            params,
            builder,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn build(&self, x: &[f64]) -> Result<Scheme> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "family `{}` takes {} parameters, got {}",
                self.name,
                self.dim(),
                x.len()
            )));
        }
        (self.builder)(x)
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, p) in x.iter_mut().zip(&self.params) {
            *v = v.clamp(p.lower, p.upper);
        }
    }

    fn center(&self) -> Vec<f64> {
        self.params.iter().map(|p| 0.5 * (p.lower + p.upper)).collect()
    }
}

/// The noisy-feedback MAC family with parameters (p, q1, q2, r1, r2, e1, e2),
/// each in [0, 1]. Erasure parameters are ignored by the estimator-only
/// theorem.
pub fn example2_family() -> ParamFamily {
    let params = presets::EXAMPLE2_PARAMS.iter().map(|n| ParamSpec::new(*n, 0.0, 1.0)).collect();
    ParamFamily::new("example2", params, Arc::new(|x| Ok(Scheme::Mac(presets::example2_scheme(x, true)?))))
        .expect("unit box")
}

/// The XOR two-way channel family with target distortions (D1, D2) in
/// [0, 1/2], for state parameters p1, p2.
pub fn example3_family(p1: f64, p2: f64) -> ParamFamily {
    let params = vec![ParamSpec::new("D1", 0.0, 0.5), ParamSpec::new("D2", 0.0, 0.5)];
    ParamFamily::new(
        "example3",
        params,
        Arc::new(move |x| {
            let (p_x1, p_x2, v1, v2) = presets::example3_scheme(p1, p2, x[0], x[1])?;
            Ok(Scheme::D2d(D2dScheme::Nonadaptive { p_x1, p_x2, v1, v2 }))
        }),
    )
    .expect("finite box")
}

/// Built-in family by name. State parameters of `example3` are read from
/// the channel's state marginals.
pub fn builtin_family(name: &str, spec: &ChannelSpec) -> Result<ParamFamily> {
    match name {
        "example2" => {
            spec.as_mac()?;
            Ok(example2_family())
        }
        "example3" => {
            let t = spec.as_two_way()?;
            let law = t.state_law();
            if law.var(S1)?.card != 2 || law.var(S2)?.card != 2 {
                return Err(Error::CardinalityMismatch("the example3 family needs binary states".into()));
            }
            let p1 = law.marginalize(&[S1])?.table()[1];
            let p2 = law.marginalize(&[S2])?.table()[1];
            Ok(example3_family(p1, p2))
        }
        _ => Err(Error::InvalidArgument(format!(
            "unknown family `{name}` (expected example2 or example3)"
        ))),
    }
}

/// Sweep settings.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub d2_grid: Vec<f64>,
    /// Optional bound on D1 applied at every grid point.
    pub d1_max: Option<f64>,
    /// Total number of scheme evaluations.
    pub budget: usize,
    pub seed: u64,
}

/// One row of a tradeoff curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub d2_bound: f64,
    /// Best objective meeting the bound, −∞ if no evaluated point does.
    pub objective: f64,
    pub member: bool,
    pub binding: String,
    /// Parameters of the best point (of the best-scoring point if none is
    /// feasible).
    pub params: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Best objective as a function of the D2 bound.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffCurve {
    pub param_names: Vec<String>,
    pub rows: Vec<CurveRow>,
    /// Number of scheme evaluations spent.
    pub evaluations: usize,
}

/// Formats `x` with at most 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

impl TradeoffCurve {
    pub fn csv_header(&self) -> String {
        let mut h = String::from("d2,objective_bits,member,binding_constraint");
        for n in &self.param_names {
            h.push(',');
            h.push_str(n);
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{}", fmt_sig(r.d2_bound), fmt_sig(r.objective), r.member, r.binding);
            for p in &r.params {
                let _ = write!(out, ",{}", fmt_sig(*p));
            }
            out.push('\n');
        }
        out
    }

    /// Rows with a finite objective.
    pub fn feasible_rows(&self) -> impl Iterator<Item = &CurveRow> {
        self.rows.iter().filter(|r| r.objective.is_finite())
    }

    /// Smallest achieved D2 among feasible rows.
    pub fn min_distortion(&self) -> Option<f64> {
        self.feasible_rows().map(|r| r.d2).reduce(f64::min)
    }
}

#[derive(Clone, Debug)]
struct Sample {
    x: Vec<f64>,
    eval: Option<Evaluation>,
}

impl Sample {
    fn feasible(&self, bound: f64, d1_max: Option<f64>) -> bool {
        self.eval.as_ref().is_some_and(|e| {
            e.objective.is_finite() && e.d2 <= bound + DIST_TOL && d1_max.is_none_or(|m| e.d1 <= m + DIST_TOL)
        })
    }

    fn score(&self, bound: f64, d1_max: Option<f64>) -> f64 {
        let Some(e) = &self.eval else {
            return f64::NEG_INFINITY;
        };
        if self.feasible(bound, d1_max) {
            return e.objective;
        }
        let mut violation = (e.d2 - bound).max(0.0);
        if let Some(m) = d1_max {
            violation += (e.d1 - m).max(0.0);
        }
        if !e.objective.is_finite() {
            violation += 1.0;
        }
        INFEASIBLE - violation
    }
}

fn sample(family: &ParamFamily, ctx: &EvalContext, x: Vec<f64>) -> Sample {
    let eval = family.build(&x).and_then(|s| evaluate(&s, ctx));
    match eval {
        Ok(e) => Sample { x, eval: Some(e) },
        Err(err) => {
            log::debug!("evaluation at {x:?} failed: {err}");
            Sample { x, eval: None }
        }
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let (mut inv, mut f) = (0.0, 1.0 / b);
    while i > 0 {
        inv += (i % base as u64) as f64 * f;
        i /= base as u64;
        f /= b;
    }
    inv
}

/// Center, box vertices (up to 2^10 of them) and a randomly shifted
/// Halton sequence, truncated to `n` points.
fn scan_points(family: &ParamFamily, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = family.dim();
    let mut pts = vec![family.center()];
    if d <= 10 {
        for mask in 0..1usize << d {
            pts.push(
                family
                    .params
                    .iter()
                    .enumerate()
                    .map(|(j, p)| if mask >> j & 1 == 1 { p.upper } else { p.lower })
                    .collect(),
            );
        }
    }
    let shift: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
    let mut i = 1u64;
    while pts.len() < n {
        pts.push(
            family
                .params
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let u = (radical_inverse(i, PRIMES[j % PRIMES.len()]) + shift[j]).fract();
                    p.lower + u * p.range()
                })
                .collect(),
        );
        i += 1;
    }
    pts.truncate(n);
    pts
}

struct Local<'a> {
    family: &'a ParamFamily,
    ctx: &'a EvalContext,
    bound: f64,
    d1_max: Option<f64>,
    budget: usize,
    samples: Vec<Sample>,
}

impl Local<'_> {
    fn eval(&mut self, x: Vec<f64>) -> Option<f64> {
        if self.samples.len() >= self.budget {
            return None;
        }
        let s = sample(self.family, self.ctx, x);
        let score = s.score(self.bound, self.d1_max);
        self.samples.push(s);
        Some(score)
    }

    /// Coordinate search with step halving, in a seeded axis order.
    fn descend(&mut self, start: &Sample, evals: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
        let stop = (self.samples.len() + evals).min(self.budget);
        let mut x = start.x.clone();
        let mut fx = start.score(self.bound, self.d1_max);
        let mut step: Vec<f64> = self.family.params.iter().map(|p| 0.25 * p.range()).collect();
        let mut axes: Vec<usize> = (0..x.len()).filter(|&j| self.family.params[j].range() > 0.0).collect();
        'outer: while self.samples.len() < stop {
            axes.shuffle(rng);
            let mut improved = false;
            for &j in &axes {
                for dir in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[j] += dir * step[j];
                    self.family.clamp(&mut y);
                    if y[j] == x[j] {
                        continue;
                    }
                    if self.samples.len() >= stop {
                        break 'outer;
                    }
                    let Some(fy) = self.eval(y.clone()) else { break 'outer };
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step.iter_mut().for_each(|s| *s *= 0.5);
                if axes.iter().all(|&j| step[j] < 1e-9 * self.family.params[j].range()) {
                    break;
                }
            }
        }
        (x, fx)
    }

    /// One-axis-at-a-time grid of [`LOCAL_GRID`] points around `x`.
    fn polish(&mut self, x: &[f64]) {
        for (j, p) in self.family.params.iter().enumerate() {
            if p.range() == 0.0 {
                continue;
            }
            let w = LOCAL_WIDTH * p.range();
            for k in 0..LOCAL_GRID {
                if k == LOCAL_GRID / 2 {
                    continue;
                }
                let mut y = x.to_vec();
                y[j] = x[j] - w + 2.0 * w * k as f64 / (LOCAL_GRID - 1) as f64;
                self.family.clamp(&mut y);
                if self.eval(y).is_none() {
                    return;
                }
            }
        }
    }
}

fn best_index(samples: &[Sample], bound: f64, d1_max: Option<f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in samples.iter().enumerate() {
        let v = s.score(bound, d1_max);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Maximizes the objective over `family` for each D2 bound in the grid.
///
/// Half the budget goes to a global scan shared by all grid points. The
/// rest is split evenly across grid points, which run concurrently: each
/// refines its five best scan points by coordinate search and finishes
/// with a local grid around the best point found. Every evaluated point
/// is kept, so each row reports the best point meeting its bound among
/// all evaluations and the curve is nondecreasing in the bound.
pub fn sweep(family: &ParamFamily, ctx: &EvalContext, opts: &SweepOptions) -> Result<TradeoffCurve> {
    if opts.d2_grid.is_empty() {
        return Err(Error::InvalidArgument("distortion grid is empty".into()));
    }
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("search budget must be at least 1".into()));
    }
    if let Some(b) = opts.d2_grid.iter().chain(opts.d1_max.iter()).find(|b| !b.is_finite() || **b < 0.0) {
        return Err(Error::Domain(format!("distortion bound {b} is not a nonnegative number")));
    }
    let mut grid = opts.d2_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n_scan = (opts.budget / 2).max(1);
    let scan: Vec<Sample> = scan_points(family, n_scan, &mut rng)
        .into_par_iter()
        .map(|x| sample(family, ctx, x))
        .collect();

    let per_point = (opts.budget - n_scan) / grid.len();
    let polish_evals = ((LOCAL_GRID - 1) * family.dim()).min(per_point / 2);
    let descend_evals = per_point - polish_evals;
    let locals: Vec<Vec<Sample>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, &bound)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (g as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut local = Local {
                family,
                ctx,
                bound,
                d1_max: opts.d1_max,
                budget: per_point,
                samples: Vec::new(),
            };
            let mut order: Vec<usize> = (0..scan.len()).collect();
            order.sort_by(|&a, &b| scan[b].score(bound, opts.d1_max).total_cmp(&scan[a].score(bound, opts.d1_max)));
            let starts: Vec<&Sample> = order.iter().take(TOP_STARTS).map(|&i| &scan[i]).collect();
            let mut best: Option<(Vec<f64>, f64)> = None;
            for (k, s) in starts.iter().enumerate() {
                let share = descend_evals / starts.len() + usize::from(k < descend_evals % starts.len());
                let (x, fx) = local.descend(s, share, &mut rng);
                if best.as_ref().is_none_or(|(_, b)| fx > *b) {
                    best = Some((x, fx));
                }
            }
            if let Some((x, _)) = best {
                local.polish(&x);
            }
            local.samples
        })
        .collect();

    let archive: Vec<Sample> = scan.into_iter().chain(locals.into_iter().flatten()).collect();
    let rows = grid
        .iter()
        .map(|&bound| {
            let feasible: Vec<usize> = (0..archive.len()).filter(|&i| archive[i].feasible(bound, opts.d1_max)).collect();
            let pick = feasible
                .iter()
                .copied()
                .reduce(|a, b| {
                    let (ea, eb) = (archive[a].eval.as_ref().unwrap(), archive[b].eval.as_ref().unwrap());
                    if eb.objective > ea.objective {
                        b
                    } else {
                        a
                    }
                })
                .or_else(|| best_index(&archive, bound, opts.d1_max));
            let s = pick.map(|i| &archive[i]);
            let is_feasible = pick.is_some() && !feasible.is_empty();
            match s.and_then(|s| s.eval.as_ref().map(|e| (s, e))) {
                Some((s, e)) => CurveRow {
                    d2_bound: bound,
                    objective: if is_feasible { e.objective } else { f64::NEG_INFINITY },
                    member: is_feasible && e.member,
                    binding: if is_feasible { e.binding.clone() } else { "infeasible".into() },
                    params: s.x.clone(),
                    r1: e.r1,
                    r2: e.r2,
                    d1: e.d1,
                    d2: e.d2,
                },
                None => CurveRow {
                    d2_bound: bound,
                    objective: f64::NEG_INFINITY,
                    member: false,
                    binding: "infeasible".into(),
                    params: s.map(|s| s.x.clone()).unwrap_or_default(),
                    r1: f64::NAN,
                    r2: f64::NAN,
                    d1: f64::NAN,
                    d2: f64::NAN,
                },
            }
        })
        .collect();
    Ok(TradeoffCurve {
        param_names: family.params.iter().map(|p| p.name.clone()).collect(),
        rows,
        evaluations: archive.len(),
    })
}

/// A point of a curve lying below the chord of its neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcavityViolation {
    /// Index of the middle point among the checked points.
    pub index: usize,
    pub x: f64,
    /// Chord value minus the point's value.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcavityReport {
    pub checked: usize,
    pub violations: Vec<ConcavityViolation>,
}

impl ConcavityReport {
    pub fn is_concave(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every consecutive triple of `(x, y)` points, sorted by x, against
/// its chord: y_mid must not fall below the chord by more than
/// [`CONCAVITY_TOL`].
pub fn concavity_of_points(points: &[(f64, f64)]) -> Result<ConcavityReport> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let violations = pts
        .windows(3)
        .enumerate()
        .filter_map(|(i, w)| {
            let [(x0, y0), (x1, y1), (x2, y2)] = [w[0], w[1], w[2]];
            let chord = if x2 > x0 { y0 + (y2 - y0) * (x1 - x0) / (x2 - x0) } else { y0.max(y2) };
            let excess = chord - y1;
            (excess > CONCAVITY_TOL).then_some(ConcavityViolation { index: i + 1, x: x1, excess })
        })
        .collect();
    Ok(ConcavityReport {
        checked: pts.len(),
        violations,
    })
}

/// Concavity of the objective against the D2 bound over the rows with a
/// finite objective.
pub fn concavity_report(curve: &TradeoffCurve) -> Result<ConcavityReport> {
    let pts: Vec<(f64, f64)> = curve.feasible_rows().map(|r| (r.d2_bound, r.objective)).collect();
    concavity_of_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_curve_is_concave() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!(concavity_of_points(&pts).unwrap().is_concave());
    }

    #[test]
    fn convex_bump_is_reported() {
        let pts = [(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)];
        let r = concavity_of_points(&pts).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].index, 1);
        assert!((r.violations[0].excess - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_points_are_too_few() {
        assert!(matches!(
            concavity_of_points(&[(0.0, 0.0), (1.0, 1.0)]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_sig(0.0), "0");
    }

    #[test]
    fn bad_bounds_are_rejected() {
        let b: Builder = Arc::new(|_| unreachable!());
        assert!(ParamFamily::new("x", vec![ParamSpec::new("a", 1.0, 0.0)], b.clone()).is_err());
        assert!(ParamFamily::new("x", vec![ParamSpec::new("a", 0.0, f64::INFINITY)], b).is_err());
    }

    #[test]
    fn halton_scan_stays_in_the_box() {
        let f = example3_family(0.1, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = scan_points(&f, 50, &mut rng);
        assert_eq!(pts.len(), 50);
        assert_eq!(pts[0], vec![0.25, 0.25]);
        assert!(pts.iter().flatten().all(|v| (0.0..=0.5).contains(v)));
    }

    #[test]
    fn example3_sweep_is_monotone_and_deterministic() {
        let f = example3_family(0.1, 0.1);
        let spec = ChannelSpec::TwoWay(presets::example3_channel(0.1, 0.1).unwrap());
        let ctx = EvalContext::new(spec, Theorem::Nonadaptive, Objective::SumRate);
        let opts = SweepOptions {
            d2_grid: vec![0.02, 0.05, 0.08, 0.12],
            d1_max: None,
            budget: 120,
            seed: 7,
        };
        let a = sweep(&f, &ctx, &opts).unwrap();
        let b = sweep(&f, &ctx, &opts).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.evaluations <= 120);
        let obj: Vec<f64> = a.rows.iter().map(|r| r.objective).collect();
        assert!(obj.windows(2).all(|w| w[0] <= w[1]));
        for r in &a.rows {
            assert!(r.d2 <= r.d2_bound + DIST_TOL);
        }
    }

    #[test]
    fn theorem_must_match_scheme() {
        let spec = ChannelSpec::TwoWay(presets::example3_channel(0.1, 0.1).unwrap());
        let ctx = EvalContext::new(spec, Theorem::Jscc, Objective::SumRate);
        let s = example3_family(0.1, 0.1).build(&[0.1, 0.1]).unwrap();
        assert!(matches!(evaluate(&s, &ctx), Err(Error::InvalidArgument(_))));
    }
}
