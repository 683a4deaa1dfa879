//! JSON documents for channels and schemes.
//!
//! All tables are row-major with the last variable varying fastest. A
//! conditional table has one row per input tuple, and each row is a pmf
//! over output tuples. For a kernel P(Z1 Z2 | X1 X2) on bits, row 1 is the
//! input (x1, x2) = (0, 1) and entry 2 of that row is (z1, z2) = (1, 0).
//!
//! A table may be written as
//! - a list of rows: `[[0.9, 0.1], [0.2, 0.8]]`,
//! - a flat list: `[0.9, 0.1, 0.2, 0.8]`,
//! - a deterministic map: `{"deterministic": [0, 1]}`, one entry per input
//!   tuple giving either the flat output index or its digits (`[1, 0]`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channel::{names::*, ChannelSpec, DistortionTable, MacChannelSpec, TwoWayChannelSpec};
use crate::d2d::{prime, tilde, AdaptFn, HanScheme, JsccScheme};
use crate::error::{Error, Result};
use crate::mac::AuxMacScheme;
use crate::prob::{encode, CondKernel, JointPmf, Var, FILE_NORM_TOL};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DetEntry {
    Index(usize),
    Digits(Vec<usize>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum TableDoc {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
    Deterministic { deterministic: Vec<DetEntry> },
}

impl TableDoc {
    fn kernel(&self, outputs: Vec<Var>, inputs: Vec<Var>, what: &str) -> Result<CondKernel> {
        let oc: Vec<usize> = outputs.iter().map(|v| v.card).collect();
        let out_size: usize = oc.iter().product();
        let in_size: usize = inputs.iter().map(|v| v.card).product();
        let table = match self {
            TableDoc::Rows(rows) => {
                if rows.len() != in_size || rows.iter().any(|r| r.len() != out_size) {
                    return Err(Error::Schema(format!(
                        "{what}: expected {in_size} rows of {out_size} entries"
                    )));
                }
                rows.concat()
            }
            TableDoc::Flat(t) => t.clone(),
            TableDoc::Deterministic { deterministic } => {
                if deterministic.len() != in_size {
                    return Err(Error::Schema(format!(
                        "{what}: deterministic map needs {in_size} entries, got {}",
                        deterministic.len()
                    )));
                }
                let mut t = vec![0.0; in_size * out_size];
                for (i, e) in deterministic.iter().enumerate() {
                    let o = match e {
                        DetEntry::Index(o) => *o,
                        DetEntry::Digits(d) => {
                            if d.len() != oc.len() || d.iter().zip(&oc).any(|(x, c)| x >= c) {
                                return Err(Error::Schema(format!("{what}: output {d:?} outside the alphabet")));
                            }
                            encode(d, &oc)
                        }
                    };
                    if o >= out_size {
                        return Err(Error::Schema(format!("{what}: output index {o} outside the alphabet")));
                    }
                    t[i * out_size + o] = 1.0;
                }
                t
            }
        };
        CondKernel::with_tolerance(outputs, inputs, table, FILE_NORM_TOL)
            .map_err(|e| annotate(e, what))
    }

    fn rows_of(k: &CondKernel) -> TableDoc {
        TableDoc::Rows(k.table().chunks(k.out_size()).map(<[f64]>::to_vec).collect())
    }

    fn from_kernel(k: &CondKernel) -> TableDoc {
        let n = k.out_size();
        let det: Option<Vec<DetEntry>> = k
            .table()
            .chunks(n)
            .map(|r| r.iter().position(|&p| p == 1.0).map(DetEntry::Index))
            .collect();
        match det {
            Some(d) if n > 1 => TableDoc::Deterministic { deterministic: d },
            _ => Self::rows_of(k),
        }
    }
}

fn annotate(e: Error, what: &str) -> Error {
    match e {
        Error::Normalization(m) => Error::Normalization(format!("{what}: {m}")),
        Error::CardinalityMismatch(m) => Error::CardinalityMismatch(format!("{what}: {m}")),
        other => other,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub alphabets: BTreeMap<String, usize>,
    pub state_law: Vec<f64>,
    pub kernel: TableDoc,
    pub distortion: [Vec<Vec<f64>>; 2],
}

fn card(alphabets: &BTreeMap<String, usize>, name: &str) -> Result<usize> {
    match alphabets.get(name) {
        Some(0) => Err(Error::Schema(format!("alphabet `{name}` is empty"))),
        Some(&c) => Ok(c),
        None => Err(Error::Schema(format!("missing alphabet size for `{name}`"))),
    }
}

fn distortion(rows: &[Vec<f64>], what: &str) -> Result<DistortionTable> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema(format!("{what}: ragged distortion matrix")));
    }
    DistortionTable::new(rows.len(), n, rows.concat())
}

/// Parses a channel document.
pub fn parse_channel(text: &str) -> Result<ChannelSpec> {
    let doc: ChannelDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let mac = match doc.model.as_str() {
        "mac" => true,
        "d2d" => false,
        m => return Err(Error::Schema(format!("model must be `mac` or `d2d`, got `{m}`"))),
    };
    let mut known = vec![X1, X2, S1, S2, Z1, Z2];
    if mac {
        known.push(Y);
    }
    if let Some(extra) = doc.alphabets.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Schema(format!("unexpected alphabet `{extra}`")));
    }
    let v = |n: &str| -> Result<Var> { Ok(Var::new(n, card(&doc.alphabets, n)?)) };
    let state_law = JointPmf::with_tolerance(vec![v(S1)?, v(S2)?], doc.state_law.clone(), FILE_NORM_TOL)
        .map_err(|e| annotate(e, "state_law"))?;
    let inputs = vec![v(X1)?, v(X2)?, v(S1)?, v(S2)?];
    let outputs = if mac { vec![v(Y)?, v(Z1)?, v(Z2)?] } else { vec![v(Z1)?, v(Z2)?] };
    let kernel = doc.kernel.kernel(outputs, inputs, "kernel")?;
    let d1 = distortion(&doc.distortion[0], "distortion[0]")?;
    let d2 = distortion(&doc.distortion[1], "distortion[1]")?;
    Ok(if mac {
        ChannelSpec::Mac(MacChannelSpec::new(state_law, kernel, d1, d2)?)
    } else {
        ChannelSpec::TwoWay(TwoWayChannelSpec::new(state_law, kernel, d1, d2)?)
    })
}

fn dist_rows(d: &DistortionTable) -> Vec<Vec<f64>> {
    d.rows().map(<[f64]>::to_vec).collect()
}

fn channel_doc(model: &str, state_law: &JointPmf, kernel: &CondKernel, d1: &DistortionTable, d2: &DistortionTable) -> ChannelDoc {
    let alphabets = kernel
        .inputs()
        .iter()
        .chain(kernel.outputs())
        .map(|v| (v.name.clone(), v.card))
        .collect();
    ChannelDoc {
        model: model.into(),
        description: None,
        alphabets,
        state_law: state_law.table().to_vec(),
        kernel: TableDoc::from_kernel(kernel),
        distortion: [dist_rows(d1), dist_rows(d2)],
    }
}

/// Serializes a channel to the document format.
pub fn channel_to_doc(spec: &ChannelSpec) -> ChannelDoc {
    match spec {
        ChannelSpec::Mac(m) => channel_doc("mac", m.state_law(), m.kernel(), m.d1(), m.d2()),
        ChannelSpec::TwoWay(t) => channel_doc("d2d", t.state_law(), t.kernel(), t.d1(), t.d2()),
    }
}

/// Auxiliary-law document of the MAC scheme. Input orders are fixed:
/// `p_u1` over U0, `p_x1` over (U0, U1), `p_v1` over (U0, U2, X1, Z1),
/// and symmetrically for terminal 2.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MacSchemeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub alphabets: BTreeMap<String, usize>,
    pub p_u0: TableDoc,
    pub p_u1: TableDoc,
    pub p_u2: TableDoc,
    pub p_x1: TableDoc,
    pub p_x2: TableDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v1: Option<TableDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v2: Option<TableDoc>,
}

/// Parses a MAC scheme; input and feedback alphabets come from `spec`.
pub fn parse_mac_scheme(text: &str, spec: &MacChannelSpec) -> Result<AuxMacScheme> {
    let doc: MacSchemeDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let a = &doc.alphabets;
    let v = |n: &str| -> Result<Var> {
        match n {
            X1 | X2 | Z1 | Z2 => Ok(Var::new(n, spec.card(n)?)),
            _ => Ok(Var::new(n, card(a, n)?)),
        }
    };
    let k = |t: &TableDoc, out: &str, ins: &[&str], what: &str| -> Result<CondKernel> {
        t.kernel(vec![v(out)?], ins.iter().map(|n| v(n)).collect::<Result<_>>()?, what)
    };
    let p_v1 = doc.p_v1.as_ref().map(|t| k(t, V1, &[U0, U2, X1, Z1], "p_v1")).transpose()?;
    let p_v2 = doc.p_v2.as_ref().map(|t| k(t, V2, &[U0, U1, X2, Z2], "p_v2")).transpose()?;
    AuxMacScheme::new(
        k(&doc.p_u0, U0, &[], "p_u0")?,
        k(&doc.p_u1, U1, &[U0], "p_u1")?,
        k(&doc.p_u2, U2, &[U0], "p_u2")?,
        k(&doc.p_x1, X1, &[U0, U1], "p_x1")?,
        k(&doc.p_x2, X2, &[U0, U2], "p_x2")?,
        p_v1,
        p_v2,
    )
}

fn reorder_kernel(k: &CondKernel, order: &[&str]) -> Result<CondKernel> {
    let names: Vec<&str> = k.inputs().iter().map(|v| v.name.as_str()).collect();
    if names == order {
        return Ok(k.clone());
    }
    let inputs: Vec<Var> = order
        .iter()
        .map(|n| k.inputs().iter().find(|v| v.name == *n).cloned().ok_or_else(|| Error::UnknownVar(n.to_string())))
        .collect::<Result<_>>()?;
    let pos: Vec<usize> = order.iter().map(|n| names.iter().position(|m| m == n).expect("checked")).collect();
    let out = k.outputs()[0].clone();
    CondKernel::from_fn(vec![out], inputs, |i, o| {
        let mut orig = vec![0; i.len()];
        for (j, &p) in pos.iter().enumerate() {
            orig[p] = i[j];
        }
        k.prob(&orig, o)
    })
}

/// Serializes a MAC scheme.
pub fn mac_scheme_to_doc(aux: &AuxMacScheme) -> Result<MacSchemeDoc> {
    let mut alphabets = BTreeMap::new();
    for k in [&aux.p_u0, &aux.p_u1, &aux.p_u2]
        .into_iter()
        .chain(aux.p_v1.iter())
        .chain(aux.p_v2.iter())
    {
        let o = &k.outputs()[0];
        alphabets.insert(o.name.clone(), o.card);
    }
    let t = |k: &CondKernel, order: &[&str]| -> Result<TableDoc> { Ok(TableDoc::from_kernel(&reorder_kernel(k, order)?)) };
    Ok(MacSchemeDoc {
        description: None,
        alphabets,
        p_u0: t(&aux.p_u0, &[])?,
        p_u1: t(&aux.p_u1, &[U0])?,
        p_u2: t(&aux.p_u2, &[U0])?,
        p_x1: t(&aux.p_x1, &[U0, U1])?,
        p_x2: t(&aux.p_x2, &[U0, U2])?,
        p_v1: aux.p_v1.as_ref().map(|k| t(k, &[U0, U2, X1, Z1])).transpose()?,
        p_v2: aux.p_v2.as_ref().map(|k| t(k, &[U0, U1, X2, Z2])).transpose()?,
    })
}

/// A conditional table with named inputs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    pub inputs: Vec<String>,
    pub table: TableDoc,
}

/// Two-way scheme documents, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum D2dSchemeDoc {
    /// Block-adaptive codewords with optional compression kernels.
    Han {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
        alphabets: BTreeMap<String, usize>,
        p_u1: Vec<f64>,
        p_u2: Vec<f64>,
        f1: Vec<usize>,
        f2: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v1: Option<KernelDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v2: Option<KernelDoc>,
    },
    /// Memoryless inputs with compression kernels on (X_k, Z_k).
    Nonadaptive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
        alphabets: BTreeMap<String, usize>,
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        v1: KernelDoc,
        v2: KernelDoc,
    },
    /// Hybrid coding: adaptation over the codeword alphabet and
    /// next-codeword kernels.
    Jscc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        description: Option<String>,
        alphabets: BTreeMap<String, usize>,
        f1: Vec<usize>,
        f2: Vec<usize>,
        u1_next: KernelDoc,
        u2_next: KernelDoc,
    },
}

/// A parsed two-way scheme.
#[derive(Clone, Debug)]
pub enum D2dScheme {
    Han {
        scheme: HanScheme,
        v1: Option<CondKernel>,
        v2: Option<CondKernel>,
    },
    Nonadaptive {
        p_x1: JointPmf,
        p_x2: JointPmf,
        v1: CondKernel,
        v2: CondKernel,
    },
    Jscc(JsccScheme),
}

fn base_name(n: &str) -> &str {
    n.trim_end_matches(['~', '\''])
}

/// Parses a two-way scheme; input and output alphabets come from `spec`.
pub fn parse_d2d_scheme(text: &str, spec: &TwoWayChannelSpec) -> Result<D2dScheme> {
    let doc: D2dSchemeDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let lookup = |a: &BTreeMap<String, usize>, n: &str| -> Result<usize> {
        match base_name(n) {
            b @ (X1 | X2 | Z1 | Z2) => spec.card(b),
            _ => a.get(n).or_else(|| a.get(base_name(n))).copied().filter(|&c| c > 0).ok_or_else(|| Error::Schema(format!("missing alphabet size for `{n}`"))),
        }
    };
    let kernel = |a: &BTreeMap<String, usize>, k: &KernelDoc, out: &str, what: &str| -> Result<CondKernel> {
        let inputs = k.inputs.iter().map(|n| Ok(Var::new(n.as_str(), lookup(a, n)?))).collect::<Result<_>>()?;
        k.table.kernel(vec![Var::new(out, lookup(a, out)?)], inputs, what)
    };
    let pmf = |name: &str, t: &[f64], c: usize| -> Result<JointPmf> {
        JointPmf::with_tolerance(vec![Var::new(name, c)], t.to_vec(), FILE_NORM_TOL).map_err(|e| annotate(e, name))
    };
    let adapt = |t: &[usize], u: usize, x: &str, z: &str| -> Result<AdaptFn> {
        AdaptFn::new(u, spec.card(x)?, spec.card(z)?, t.to_vec())
    };
    match doc {
        D2dSchemeDoc::Han { alphabets: a, p_u1, p_u2, f1, f2, v1, v2, .. } => {
            let (c1, c2) = (lookup(&a, U1)?, lookup(&a, U2)?);
            let scheme = HanScheme::new(
                pmf(U1, &p_u1, c1)?,
                pmf(U2, &p_u2, c2)?,
                adapt(&f1, c1, X1, Z1).map_err(|e| annotate(e, "f1"))?,
                adapt(&f2, c2, X2, Z2).map_err(|e| annotate(e, "f2"))?,
            )?;
            Ok(D2dScheme::Han {
                scheme,
                v1: v1.map(|k| kernel(&a, &k, V1, "v1")).transpose()?,
                v2: v2.map(|k| kernel(&a, &k, V2, "v2")).transpose()?,
            })
        }
        D2dSchemeDoc::Nonadaptive { alphabets: a, p_x1, p_x2, v1, v2, .. } => Ok(D2dScheme::Nonadaptive {
            p_x1: pmf(X1, &p_x1, spec.card(X1)?)?,
            p_x2: pmf(X2, &p_x2, spec.card(X2)?)?,
            v1: kernel(&a, &v1, V1, "v1")?,
            v2: kernel(&a, &v2, V2, "v2")?,
        }),
        D2dSchemeDoc::Jscc { alphabets: a, f1, f2, u1_next, u2_next, .. } => {
            // The codeword alphabet is declared under the primed name.
            let mut a = a;
            for u in [U1, U2] {
                if let Some(&c) = a.get(&prime(u)) {
                    a.entry(u.to_string()).or_insert(c);
                }
            }
            let (c1, c2) = (lookup(&a, U1)?, lookup(&a, U2)?);
            JsccScheme::new(
                adapt(&f1, c1, X1, Z1).map_err(|e| annotate(e, "f1"))?,
                adapt(&f2, c2, X2, Z2).map_err(|e| annotate(e, "f2"))?,
                kernel(&a, &u1_next, &prime(U1), "u1_next")?,
                kernel(&a, &u2_next, &prime(U2), "u2_next")?,
            )
        }
        .map(D2dScheme::Jscc),
    }
}

fn kernel_doc(k: &CondKernel) -> KernelDoc {
    KernelDoc {
        inputs: k.inputs().iter().map(|v| v.name.clone()).collect(),
        table: TableDoc::from_kernel(k),
    }
}

/// Serializes a two-way scheme.
pub fn d2d_scheme_to_doc(s: &D2dScheme) -> D2dSchemeDoc {
    let out_card = |k: &CondKernel| (k.outputs()[0].name.clone(), k.outputs()[0].card);
    match s {
        D2dScheme::Han { scheme, v1, v2 } => {
            let mut a: BTreeMap<String, usize> = [(U1.to_string(), scheme.f1.u_card()), (U2.to_string(), scheme.f2.u_card())].into();
            a.extend(v1.iter().chain(v2.iter()).map(out_card));
            D2dSchemeDoc::Han {
                description: None,
                alphabets: a,
                p_u1: scheme.p_u1.table().to_vec(),
                p_u2: scheme.p_u2.table().to_vec(),
                f1: scheme.f1.table().to_vec(),
                f2: scheme.f2.table().to_vec(),
                v1: v1.as_ref().map(kernel_doc),
                v2: v2.as_ref().map(kernel_doc),
            }
        }
        D2dScheme::Nonadaptive { p_x1, p_x2, v1, v2 } => D2dSchemeDoc::Nonadaptive {
            description: None,
            alphabets: [out_card(v1), out_card(v2)].into(),
            p_x1: p_x1.table().to_vec(),
            p_x2: p_x2.table().to_vec(),
            v1: kernel_doc(v1),
            v2: kernel_doc(v2),
        },
        D2dScheme::Jscc(j) => D2dSchemeDoc::Jscc {
            description: None,
            alphabets: [out_card(&j.u1_next), out_card(&j.u2_next)].into(),
            f1: j.f1.table().to_vec(),
            f2: j.f2.table().to_vec(),
            u1_next: kernel_doc(&j.u1_next),
            u2_next: kernel_doc(&j.u2_next),
        },
    }
}

/// Reads and parses a channel file.
pub fn read_channel(path: &std::path::Path) -> Result<ChannelSpec> {
    parse_channel(&std::fs::read_to_string(path)?)
}

/// Tilde name of a variable, re-exported for scheme authors.
pub fn previous(name: &str) -> String {
    tilde(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = r#"{
        "model": "d2d",
        "alphabets": {"X1": 2, "X2": 2, "S1": 2, "S2": 2, "Z1": 2, "Z2": 2},
        "state_law": [0.81, 0.09, 0.09, 0.01],
        "kernel": {"deterministic": [
            [0,0],[1,0],[0,1],[1,1], [1,1],[0,1],[1,0],[0,0],
            [1,1],[0,1],[1,0],[0,0], [0,0],[1,0],[0,1],[1,1]]},
        "distortion": [[[0,1],[1,0]], [[0,1],[1,0]]]
    }"#;

    #[test]
    fn xor_channel_expands_to_zero_one_rows() {
        let spec = parse_channel(XOR).unwrap();
        let t = spec.as_two_way().unwrap();
        // Input (x1, x2, s1, s2) = (0, 1, 0, 1): Z1 = 0⊕1⊕1 = 0, Z2 = 0⊕1⊕0 = 1.
        assert_eq!(t.kernel().prob(&[0, 1, 0, 1], &[0, 1]), 1.0);
        assert!(t.kernel().table().iter().all(|&p| p == 0.0 || p == 1.0));
    }

    #[test]
    fn short_row_is_a_normalization_error() {
        let doc = XOR.replace(
            r#"{"deterministic": [
            [0,0],[1,0],[0,1],[1,1], [1,1],[0,1],[1,0],[0,0],
            [1,1],[0,1],[1,0],[0,0], [0,0],[1,0],[0,1],[1,1]]}"#,
            &format!("[[0.8, 0, 0, 0]{}]", ", [1, 0, 0, 0]".repeat(15)),
        );
        assert!(matches!(parse_channel(&doc), Err(Error::Normalization(_))));
    }

    #[test]
    fn missing_field_is_a_schema_error() {
        let doc = XOR.replace(r#""state_law": [0.81, 0.09, 0.09, 0.01],"#, "");
        assert!(matches!(parse_channel(&doc), Err(Error::Schema(_))));
    }

    #[test]
    fn wrong_model_is_a_schema_error() {
        let doc = XOR.replace(r#""model": "d2d""#, r#""model": "relay""#);
        assert!(matches!(parse_channel(&doc), Err(Error::Schema(_))));
    }

    #[test]
    fn round_trip_channel() {
        let spec = parse_channel(XOR).unwrap();
        let text = serde_json::to_string(&channel_to_doc(&spec)).unwrap();
        let again = parse_channel(&text).unwrap();
        assert_eq!(again.as_two_way().unwrap().kernel(), spec.as_two_way().unwrap().kernel());
    }

    #[test]
    fn small_rounding_is_renormalized() {
        let doc = XOR.replace("[0.81, 0.09, 0.09, 0.01]", "[0.8100004, 0.09, 0.09, 0.01]");
        let spec = parse_channel(&doc).unwrap();
        let s: f64 = spec.as_two_way().unwrap().state_law().table().iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn han_scheme_round_trip() {
        let spec = parse_channel(XOR).unwrap();
        let t = spec.as_two_way().unwrap();
        let text = r#"{
            "kind": "han",
            "alphabets": {"U1": 2, "U2": 2, "V1": 2},
            "p_u1": [0.5, 0.5], "p_u2": [0.5, 0.5],
            "f1": [0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,1],
            "f2": [0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,1],
            "v1": {"inputs": ["X1", "Z1"], "table": [[0.9,0.1],[0.1,0.9],[0.1,0.9],[0.9,0.1]]}
        }"#;
        let s = parse_d2d_scheme(text, t).unwrap();
        let doc = d2d_scheme_to_doc(&s);
        let again = parse_d2d_scheme(&serde_json::to_string(&doc).unwrap(), t).unwrap();
        match (s, again) {
            (D2dScheme::Han { scheme: a, v1: va, .. }, D2dScheme::Han { scheme: b, v1: vb, .. }) => {
                assert_eq!(a.f1, b.f1);
                assert_eq!(va, vb);
            }
            _ => panic!("kind changed"),
        }
    }
}
