use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use isac_core::channel::{names::*, ChannelSpec};
use isac_core::d2d::{
    example3_closed_form, jscc_stationary_law, stationary_law, HanScheme, PrimedState, SolverOptions, StationaryLaw,
};
use isac_core::estimation::{optimal_estimator, simulate_distortion};
use isac_core::files::{
    channel_to_doc, d2d_scheme_to_doc, mac_scheme_to_doc, parse_d2d_scheme, parse_mac_scheme, read_channel, D2dScheme,
};
use isac_core::mac::{
    collaborative_distortions, collaborative_verdict, kobayashi_point, mac_joint, AuxMacScheme, Objective,
    MEMBER_TOL,
};
use isac_core::prob::{compose, CondKernel, JointPmf, Var};
use isac_core::presets;
use isac_core::search::{builtin_family, evaluate, sweep as run_sweep, EvalContext, Evaluation, Scheme, SweepOptions, Theorem};
use serde_json::{json, Value};

use crate::grid::{parse_grid, parse_list};
use crate::{ClosedFormArgs, Common, EvalArgs, PresetArgs, SimArgs, StationaryArgs, SweepArgs};

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn channel(path: &Path) -> Result<ChannelSpec> {
    read_channel(path).with_context(|| format!("reading channel {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn context(c: &Common, spec: ChannelSpec, mac: bool) -> Result<EvalContext> {
    let theorem: Theorem = c.theorem.parse()?;
    if theorem.is_mac() != mac {
        bail!(
            "theorem `{}` belongs to the {} commands",
            theorem.name(),
            if theorem.is_mac() { "mac" } else { "d2d" }
        );
    }
    let mut ctx = EvalContext::new(spec, theorem, c.objective.parse::<Objective>()?);
    ctx.primed = c.primed_state.parse::<PrimedState>()?;
    if !(c.tol > 0.0) {
        bail!("--tol must be positive");
    }
    ctx.solver = SolverOptions { tol: c.tol, ..SolverOptions::default() };
    Ok(ctx)
}

fn evaluation_json(theorem: Theorem, e: &Evaluation) -> Value {
    json!({
        "theorem": theorem.name(),
        "objective": finite_or_null(e.objective),
        "r1": e.r1,
        "r2": e.r2,
        "d1": e.d1,
        "d2": e.d2,
        "member": e.member,
        "binding_constraint": e.binding,
    })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn with_compression(aux: &AuxMacScheme) -> Result<AuxMacScheme> {
    if aux.has_compression() {
        return Ok(aux.clone());
    }
    Ok(AuxMacScheme { p_v1: Some(CondKernel::constant(Var::new(V1, 1), 0)?), ..aux.clone() })
}

pub fn mac_eval(a: &EvalArgs) -> Result<()> {
    let spec = channel(&a.common.channel)?;
    let mac = spec.as_mac()?.clone();
    let aux = parse_mac_scheme(&read(&a.scheme)?, &mac).context("parsing scheme")?;
    let ctx = context(&a.common, spec, true)?;
    let out = match (a.r1, a.r2) {
        (Some(r1), Some(r2)) => {
            let (verdict, d1, d2) = if ctx.theorem == Theorem::Kobayashi {
                let p = kobayashi_point(&mac, &aux.without_compression())?;
                (p.region.verdict(r1, r2)?, p.d1, p.d2)
            } else {
                let aux = with_compression(&aux)?;
                let v = collaborative_verdict(&mac_joint(&mac, &aux)?, r1, r2)?;
                let (d1, d2) = collaborative_distortions(&mac, &aux)?;
                (v, d1, d2)
            };
            json!({
                "theorem": ctx.theorem.name(),
                "r1": r1,
                "r2": r2,
                "member": verdict.member,
                "binding_constraint": verdict.binding,
                "d1": d1,
                "d2": d2,
                "slacks": verdict.slacks,
                "mi_terms": verdict.mi_terms,
            })
        }
        _ => evaluation_json(ctx.theorem, &evaluate(&Scheme::Mac(aux), &ctx)?),
    };
    emit_json(a.common.out.as_deref(), &out)
}

pub fn d2d_eval(a: &EvalArgs) -> Result<()> {
    let spec = channel(&a.common.channel)?;
    let scheme = parse_d2d_scheme(&read(&a.scheme)?, spec.as_two_way()?).context("parsing scheme")?;
    let ctx = context(&a.common, spec, false)?;
    let e = evaluate(&Scheme::D2d(scheme), &ctx)?;
    let mut out = evaluation_json(ctx.theorem, &e);
    if let (Some(r1), Some(r2)) = (a.r1, a.r2) {
        let slacks = json!({ "R1": e.r1 - r1, "R2": e.r2 - r2 });
        out["r1_requested"] = json!(r1);
        out["r2_requested"] = json!(r2);
        out["member"] = json!(r1 <= e.r1 + MEMBER_TOL && r2 <= e.r2 + MEMBER_TOL);
        out["slacks"] = slacks;
    }
    emit_json(a.common.out.as_deref(), &out)
}

pub fn sweep(a: &SweepArgs, mac: bool) -> Result<()> {
    let spec = channel(&a.common.channel)?;
    let family_name = a.family.clone().unwrap_or_else(|| if mac { "example2" } else { "example3" }.to_string());
    let family = builtin_family(&family_name, &spec)?;
    let ctx = context(&a.common, spec, mac)?;
    if a.budget == 0 {
        bail!("--budget must be at least 1");
    }
    let opts = SweepOptions { d2_grid: parse_grid(&a.grid)?, d1_max: a.d1, budget: a.budget, seed: a.seed };
    let curve = run_sweep(&family, &ctx, &opts)?;
    log::info!("{} evaluations over {} grid points", curve.evaluations, curve.rows.len());
    emit(a.common.out.as_deref(), &curve.to_csv())
}

/// Maps p > 1/2 to 1 − p; the binary entropy and the BSC capacity are
/// symmetric under the swap.
fn reflect(name: &str, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        bail!("--{name} = {p} is not a probability");
    }
    if p > 0.5 {
        log::info!("--{name} = {p} reflected to {}", 1.0 - p);
        return Ok(1.0 - p);
    }
    Ok(p)
}

pub fn closed_form(a: &ClosedFormArgs) -> Result<()> {
    let (p1, p2) = (reflect("p1", a.p1)?, reflect("p2", a.p2)?);
    let b = example3_closed_form(p1, p2, a.d1, a.d2)?;
    emit_json(
        a.out.as_deref(),
        &json!({
            "p1": p1, "p2": p2, "d1": a.d1, "d2": a.d2,
            "r1": b.r1, "r2": b.r2,
            "converse_r1": b.converse_r1, "converse_r2": b.converse_r2,
        }),
    )
}

fn law_json(stat: &StationaryLaw) -> Value {
    let vars: Vec<Value> = stat.law.vars().iter().map(|v| json!({ "name": v.name, "card": v.card })).collect();
    json!({
        "vars": vars,
        "table": stat.law.table(),
        "residual": stat.residual,
        "iterations": stat.iterations,
    })
}

pub fn stationary(a: &StationaryArgs) -> Result<()> {
    let spec = channel(&a.channel)?;
    let two_way = spec.as_two_way()?;
    let scheme = parse_d2d_scheme(&read(&a.scheme)?, two_way).context("parsing scheme")?;
    if !(a.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let opts = SolverOptions { tol: a.tol, ..SolverOptions::default() };
    let stat = match &scheme {
        D2dScheme::Han { scheme, .. } => stationary_law(scheme, two_way, opts)?,
        D2dScheme::Nonadaptive { p_x1, p_x2, .. } => {
            stationary_law(&HanScheme::nonadaptive(p_x1, p_x2, two_way)?, two_way, opts)?
        }
        D2dScheme::Jscc(j) => jscc_stationary_law(j, two_way, opts)?,
    };
    emit_json(a.out.as_deref(), &law_json(&stat))
}

/// Joint law and estimator arguments for each terminal.
fn estimation_problem(spec: &ChannelSpec, scheme_text: &str, theorem: Theorem) -> Result<(JointPmf, [Vec<&'static str>; 2])> {
    match theorem {
        Theorem::Kobayashi | Theorem::Collab => {
            let mac = spec.as_mac()?;
            let aux = parse_mac_scheme(scheme_text, mac).context("parsing scheme")?;
            if theorem == Theorem::Kobayashi {
                let joint = mac_joint(mac, &aux.without_compression())?;
                Ok((joint, [vec![X1, Z1, U2], vec![X2, Z2, U1]]))
            } else {
                let joint = mac_joint(mac, &with_compression(&aux)?)?;
                Ok((joint, [vec![X1, Z1, U2, V2], vec![X2, Z2, U1, V1]]))
            }
        }
        Theorem::Nonadaptive => {
            let tw = spec.as_two_way()?;
            let D2dScheme::Nonadaptive { p_x1, p_x2, v1, v2 } = parse_d2d_scheme(scheme_text, tw)? else {
                bail!("the nonadaptive theorem takes a scheme of kind `nonadaptive`");
            };
            let joint = compose(&[
                &tw.state_law().clone().into_kernel(),
                &p_x1.into_kernel(),
                &p_x2.into_kernel(),
                tw.kernel(),
                &v1,
                &v2,
            ])?;
            Ok((joint, [vec![V2, X1, X2, Z1], vec![V1, X1, X2, Z2]]))
        }
        t => bail!("sim distortion supports kobayashi, collab and nonadaptive, not `{}`", t.name()),
    }
}

pub fn sim_distortion(a: &SimArgs) -> Result<()> {
    let spec = channel(&a.common.channel)?;
    let theorem: Theorem = a.common.theorem.parse()?;
    let (joint, obs) = estimation_problem(&spec, &read(&a.scheme)?, theorem)?;
    let (d1, d2) = match &spec {
        ChannelSpec::Mac(m) => (m.d1().clone(), m.d2().clone()),
        ChannelSpec::TwoWay(t) => (t.d1().clone(), t.d2().clone()),
    };
    let mut terminals = Vec::new();
    for (k, (state, d)) in [(S1, &d1), (S2, &d2)].into_iter().enumerate() {
        let est = optimal_estimator(&joint, &obs[k], state, d)?;
        let rep = simulate_distortion(&joint, &est, d, a.samples, a.seed.wrapping_add(k as u64))?;
        let z = match (rep.empirical, rep.stderr) {
            (Some(e), Some(s)) if s > 0.0 => Some((e - rep.exact) / s),
            _ => None,
        };
        terminals.push(json!({
            "terminal": k + 1,
            "observations": obs[k],
            "exact": rep.exact,
            "empirical": rep.empirical,
            "stderr": rep.stderr,
            "z_score": z,
            "samples": rep.samples,
        }));
    }
    emit_json(a.common.out.as_deref(), &json!({ "theorem": theorem.name(), "seed": a.seed, "terminals": terminals }))
}

fn values(a: &PresetArgs, default: &[f64]) -> Result<Vec<f64>> {
    let v = match &a.values {
        Some(s) => parse_list(s)?,
        None => default.to_vec(),
    };
    if v.len() != default.len() {
        bail!("preset `{}` takes {} values, got {}", a.name, default.len(), v.len());
    }
    Ok(v)
}

pub fn preset(a: &PresetArgs) -> Result<()> {
    let doc = match a.name.as_str() {
        "example1-channel" => {
            let v = values(a, &[0.5])?;
            serde_json::to_value(channel_to_doc(&ChannelSpec::Mac(presets::example1_channel(v[0])?)))?
        }
        "example1-scheme" => {
            values(a, &[])?;
            serde_json::to_value(mac_scheme_to_doc(&presets::example1_collab_scheme()?)?)?
        }
        "example2-channel" => {
            let v = values(a, &[0.9, 0.3, 0.1, 0.1])?;
            serde_json::to_value(channel_to_doc(&ChannelSpec::Mac(presets::example2_channel(v[0], v[1], v[2], v[3])?)))?
        }
        "example2-scheme" => {
            let v = values(a, &[0.5; 7])?;
            serde_json::to_value(mac_scheme_to_doc(&presets::example2_scheme(&v, true)?)?)?
        }
        "example3-channel" => {
            let v = values(a, &[0.1, 0.1])?;
            serde_json::to_value(channel_to_doc(&ChannelSpec::TwoWay(presets::example3_channel(v[0], v[1])?)))?
        }
        "example3-scheme" => {
            let v = values(a, &[0.1, 0.1, 0.05, 0.05])?;
            let (p_x1, p_x2, v1, v2) = presets::example3_scheme(v[0], v[1], v[2], v[3])?;
            serde_json::to_value(d2d_scheme_to_doc(&D2dScheme::Nonadaptive { p_x1, p_x2, v1, v2 }))?
        }
        "example3-han" => {
            let v = values(a, &[0.1, 0.1])?;
            let spec = presets::example3_channel(v[0], v[1])?;
            let scheme = presets::example3_han_scheme(&spec)?;
            serde_json::to_value(d2d_scheme_to_doc(&D2dScheme::Han { scheme, v1: None, v2: None }))?
        }
        other => bail!(
            "unknown preset `{other}` (expected example1-channel, example1-scheme, example2-channel, \
             example2-scheme, example3-channel, example3-scheme or example3-han)"
        ),
    };
    emit_json(a.out.as_deref(), &doc)
}
