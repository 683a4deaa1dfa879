//! Finite-alphabet probability tables and information measures.
//!
//! Tables are dense and row-major over their variable tuple, with the last
//! variable varying fastest. All logarithms are base 2.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a table built in code.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on the total mass of a table read from a file.
pub const FILE_NORM_TOL: f64 = 1e-6;
/// Negative information values above this magnitude are reported as-is
/// before clamping; smaller ones are rounding noise.
pub const CLAMP_TOL: f64 = 1e-12;

/// A named finite random variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub card: usize,
}

impl Var {
    pub fn new(name: impl Into<String>, card: usize) -> Self {
        Var {
            name: name.into(),
            card,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.card)
    }
}

pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

pub(crate) fn product(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// Writes the mixed-radix digits of `idx` into `digits`.
pub(crate) fn decode(mut idx: usize, cards: &[usize], digits: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        digits[i] = idx % cards[i];
        idx /= cards[i];
    }
}

pub(crate) fn encode(digits: &[usize], cards: &[usize]) -> usize {
    digits
        .iter()
        .zip(cards)
        .fold(0, |acc, (&d, &c)| acc * c + d)
}

/// Advances a mixed-radix odometer; returns false after the last tuple.
#[inline]
pub(crate) fn advance(digits: &mut [usize], cards: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < cards[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

fn check_vars<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for v in vars {
        if v.card == 0 {
            return Err(Error::CardinalityMismatch(format!(
                "variable `{}` has an empty alphabet",
                v.name
            )));
        }
        if seen.contains(&v.name.as_str()) {
            return Err(Error::DuplicateVar(v.name.clone()));
        }
        seen.push(&v.name);
    }
    Ok(())
}

fn check_entries(table: &[f64], what: &str) -> Result<()> {
    if let Some(x) = table.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Normalization(format!(
            "{what} has invalid entry {x}"
        )));
    }
    Ok(())
}

fn normalize(row: &mut [f64], tol: f64, what: &str) -> Result<()> {
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(Error::Normalization(format!(
            "{what} sums to {s}, off by more than {tol:e}"
        )));
    }
    if s != 1.0 {
        row.iter_mut().for_each(|x| *x /= s);
    }
    Ok(())
}

/// Sums `table` (over variables with `cards`) down to the variables at
/// positions `keep`, in that order.
pub(crate) fn project(cards: &[usize], table: &[f64], keep: &[usize]) -> Vec<f64> {
    let n = cards.len();
    if keep.len() == n && keep.iter().enumerate().all(|(i, &k)| i == k) {
        return table.to_vec();
    }
    let out_cards: Vec<usize> = keep.iter().map(|&k| cards[k]).collect();
    let out_strides = strides(&out_cards);
    let mut map = vec![0usize; n];
    for (j, &k) in keep.iter().enumerate() {
        map[k] = out_strides[j];
    }
    let mut out = vec![0.0; product(&out_cards)];
    let mut digits = vec![0usize; n];
    let mut oi = 0usize;
    for &p in table {
        if p != 0.0 {
            out[oi] += p;
        }
        let mut d = n;
        while d > 0 {
            d -= 1;
            digits[d] += 1;
            oi += map[d];
            if digits[d] < cards[d] {
                break;
            }
            oi -= map[d] * cards[d];
            digits[d] = 0;
        }
    }
    out
}

pub(crate) fn entropy_of_table(table: &[f64]) -> f64 {
    let total: f64 = table.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -table
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let q = p / total;
            q * q.log2()
        })
        .sum::<f64>()
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// A joint probability table over an ordered tuple of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    vars: Vec<Var>,
    table: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<Var>, table: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(vars, table, NORM_TOL)
    }

    /// Like [`JointPmf::new`] with a caller-chosen mass tolerance.
    pub fn with_tolerance(vars: Vec<Var>, mut table: Vec<f64>, tol: f64) -> Result<Self> {
        check_vars(&vars)?;
        let cards: Vec<usize> = vars.iter().map(|v| v.card).collect();
        if table.len() != product(&cards) {
            return Err(Error::CardinalityMismatch(format!(
                "table has {} entries, alphabet product is {}",
                table.len(),
                product(&cards)
            )));
        }
        check_entries(&table, "joint table")?;
        normalize(&mut table, tol, "joint table")?;
        Ok(JointPmf { vars, table })
    }

    pub(crate) fn from_parts_unchecked(vars: Vec<Var>, table: Vec<f64>) -> Self {
        JointPmf { vars, table }
    }

    /// Point mass on `digits`.
    pub fn point(vars: Vec<Var>, digits: &[usize]) -> Result<Self> {
        let cards: Vec<usize> = vars.iter().map(|v| v.card).collect();
        if digits.len() != vars.len() || digits.iter().zip(&cards).any(|(d, c)| d >= c) {
            return Err(Error::InvalidArgument("point outside the alphabet".into()));
        }
        let mut table = vec![0.0; product(&cards)];
        table[encode(digits, &cards)] = 1.0;
        Self::new(vars, table)
    }

    pub fn uniform(vars: Vec<Var>) -> Result<Self> {
        let n = product(&vars.iter().map(|v| v.card).collect::<Vec<_>>());
        Self::new(vars, vec![1.0 / n as f64; n])
    }

    /// Bernoulli(p) law of a binary variable.
    pub fn bernoulli(name: &str, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Bernoulli parameter {p}")));
        }
        Self::new(vec![Var::new(name, 2)], vec![1.0 - p, p])
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn cards(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.card).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVar(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Result<&Var> {
        Ok(&self.vars[self.position(name)?])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    /// Probability of the tuple `digits` (in this table's variable order).
    pub fn prob(&self, digits: &[usize]) -> f64 {
        self.table[encode(digits, &self.cards())]
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.position(n)).collect()
    }

    /// Marginal over `keep`, in this table's variable order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let mut pos = self.positions(keep)?;
        check_distinct(keep)?;
        pos.sort_unstable();
        self.project_positions(&pos)
    }

    /// Marginal over `order`, with variables arranged in exactly that order.
    pub fn reorder(&self, order: &[&str]) -> Result<JointPmf> {
        check_distinct(order)?;
        let pos = self.positions(order)?;
        self.project_positions(&pos)
    }

    fn project_positions(&self, pos: &[usize]) -> Result<JointPmf> {
        let mut table = project(&self.cards(), &self.table, pos);
        let s: f64 = table.iter().sum();
        if s > 0.0 && s != 1.0 {
            table.iter_mut().for_each(|x| *x /= s);
        }
        let vars = pos.iter().map(|&p| self.vars[p].clone()).collect();
        Ok(JointPmf { vars, table })
    }

    /// Same law with variables sorted by name.
    pub fn canonical(&self) -> JointPmf {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|&a, &b| self.vars[a].name.cmp(&self.vars[b].name));
        let table = project(&self.cards(), &self.table, &order);
        JointPmf {
            vars: order.iter().map(|&p| self.vars[p].clone()).collect(),
            table,
        }
    }

    /// Conditional law of `outputs` given `inputs`. Rows whose conditioning
    /// event has zero probability are set to uniform.
    pub fn conditional(&self, outputs: &[&str], inputs: &[&str]) -> Result<CondKernel> {
        disjoint(outputs, inputs)?;
        let mut order: Vec<&str> = inputs.to_vec();
        order.extend_from_slice(outputs);
        let m = self.reorder(&order)?;
        let in_vars: Vec<Var> = m.vars[..inputs.len()].to_vec();
        let out_vars: Vec<Var> = m.vars[inputs.len()..].to_vec();
        let out_size = product(&out_vars.iter().map(|v| v.card).collect::<Vec<_>>());
        let mut table = m.table;
        for row in table.chunks_mut(out_size) {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|x| *x /= s);
            } else {
                row.iter_mut().for_each(|x| *x = 1.0 / out_size as f64);
            }
        }
        Ok(CondKernel {
            outputs: out_vars,
            inputs: in_vars,
            table,
        })
    }

    /// Conditional entropy H(A | C) in bits.
    pub fn entropy(&self, a: &[&str], given: &[&str]) -> Result<f64> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("entropy of an empty set".into()));
        }
        disjoint(a, given)?;
        let mut ac = self.positions(a)?;
        let c = self.positions(given)?;
        ac.extend_from_slice(&c);
        let cards = self.cards();
        let h_ac = entropy_of_table(&project(&cards, &self.table, &ac));
        let h_c = entropy_of_table(&project(&cards, &self.table, &c));
        Ok((h_ac - h_c).max(0.0))
    }

    /// Conditional mutual information I(A; B | C) in bits, clamped at zero.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        disjoint(a, b)?;
        disjoint(a, given)?;
        disjoint(b, given)?;
        let pa = self.positions(a)?;
        let pb = self.positions(b)?;
        let pc = self.positions(given)?;
        if pa.is_empty() || pb.is_empty() {
            return Ok(0.0);
        }
        let cards = self.cards();
        let h = |pos: &[usize]| entropy_of_table(&project(&cards, &self.table, pos));
        let cat = |x: &[usize], y: &[usize]| [x, y].concat();
        let v = h(&cat(&pa, &pc)) + h(&cat(&pb, &pc)) - h(&[pa.as_slice(), &pb, &pc].concat()) - h(&pc);
        Ok(v.max(0.0))
    }

    /// Total-variation distance to a law over the same variable set.
    pub fn total_variation(&self, other: &JointPmf) -> Result<f64> {
        if self.vars.len() != other.vars.len() {
            return Err(Error::CardinalityMismatch(
                "laws are over different variable sets".into(),
            ));
        }
        let names = self.names();
        let aligned = other.reorder(&names)?;
        if aligned.cards() != self.cards() {
            return Err(Error::CardinalityMismatch(
                "laws disagree on alphabet sizes".into(),
            ));
        }
        Ok(0.5
            * self
                .table
                .iter()
                .zip(&aligned.table)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Renames variables according to `map` (old name, new name).
    pub fn rename(mut self, map: &[(&str, &str)]) -> Result<JointPmf> {
        for v in &mut self.vars {
            if let Some((_, new)) = map.iter().find(|(old, _)| *old == v.name) {
                v.name = (*new).to_string();
            }
        }
        check_vars(&self.vars)?;
        Ok(self)
    }

    /// View as a kernel with no inputs.
    pub fn into_kernel(self) -> CondKernel {
        CondKernel {
            outputs: self.vars,
            inputs: Vec::new(),
            table: self.table,
        }
    }
}

impl From<JointPmf> for CondKernel {
    fn from(p: JointPmf) -> Self {
        p.into_kernel()
    }
}

fn check_distinct(names: &[&str]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::DuplicateVar(n.to_string()));
        }
    }
    Ok(())
}

fn disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    check_distinct(a)?;
    check_distinct(b)?;
    match a.iter().find(|x| b.contains(x)) {
        Some(x) => Err(Error::OverlappingSets(x.to_string())),
        None => Ok(()),
    }
}

/// Conditional law of an output tuple given an input tuple.
///
/// Row `i` (the input tuple with flat index `i`) is a pmf over output tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct CondKernel {
    outputs: Vec<Var>,
    inputs: Vec<Var>,
    table: Vec<f64>,
}

impl CondKernel {
    pub fn new(outputs: Vec<Var>, inputs: Vec<Var>, table: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(outputs, inputs, table, NORM_TOL)
    }

    pub fn with_tolerance(
        outputs: Vec<Var>,
        inputs: Vec<Var>,
        mut table: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        check_vars(outputs.iter().chain(&inputs))?;
        if outputs.is_empty() {
            return Err(Error::InvalidArgument("kernel without outputs".into()));
        }
        let out_size = product(&outputs.iter().map(|v| v.card).collect::<Vec<_>>());
        let in_size = product(&inputs.iter().map(|v| v.card).collect::<Vec<_>>());
        if table.len() != out_size * in_size {
            return Err(Error::CardinalityMismatch(format!(
                "kernel table has {} entries, expected {} rows of {}",
                table.len(),
                in_size,
                out_size
            )));
        }
        check_entries(&table, "kernel")?;
        for (i, row) in table.chunks_mut(out_size).enumerate() {
            normalize(row, tol, &format!("kernel row {i}"))?;
        }
        Ok(CondKernel {
            outputs,
            inputs,
            table,
        })
    }

    /// Builds a kernel from `f(input_digits, output_digits) -> probability`.
    pub fn from_fn(
        outputs: Vec<Var>,
        inputs: Vec<Var>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let oc: Vec<usize> = outputs.iter().map(|v| v.card).collect();
        let ic: Vec<usize> = inputs.iter().map(|v| v.card).collect();
        let mut table = Vec::with_capacity(product(&oc) * product(&ic));
        let mut id = vec![0; ic.len()];
        let mut od = vec![0; oc.len()];
        for i in 0..product(&ic) {
            decode(i, &ic, &mut id);
            for o in 0..product(&oc) {
                decode(o, &oc, &mut od);
                table.push(f(&id, &od));
            }
        }
        Self::new(outputs, inputs, table)
    }

    /// Builds a 0/1 kernel from `f(input_digits) -> output_digits`.
    pub fn deterministic(
        outputs: Vec<Var>,
        inputs: Vec<Var>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let oc: Vec<usize> = outputs.iter().map(|v| v.card).collect();
        let ic: Vec<usize> = inputs.iter().map(|v| v.card).collect();
        let out_size = product(&oc);
        let mut table = vec![0.0; out_size * product(&ic)];
        let mut id = vec![0; ic.len()];
        for i in 0..product(&ic) {
            decode(i, &ic, &mut id);
            let o = f(&id);
            if o.len() != oc.len() || o.iter().zip(&oc).any(|(d, c)| d >= c) {
                return Err(Error::CardinalityMismatch(format!(
                    "deterministic map yields {o:?} outside the output alphabet"
                )));
            }
            table[i * out_size + encode(&o, &oc)] = 1.0;
        }
        Self::new(outputs, inputs, table)
    }

    /// Degenerate kernel: `output` is always `value`, with no inputs.
    pub fn constant(output: Var, value: usize) -> Result<Self> {
        Self::deterministic(vec![output], Vec::new(), |_| vec![value])
    }

    pub fn outputs(&self) -> &[Var] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn out_size(&self) -> usize {
        product(&self.outputs.iter().map(|v| v.card).collect::<Vec<_>>())
    }

    pub fn in_size(&self) -> usize {
        product(&self.inputs.iter().map(|v| v.card).collect::<Vec<_>>())
    }

    pub fn row(&self, in_idx: usize) -> &[f64] {
        let n = self.out_size();
        &self.table[in_idx * n..(in_idx + 1) * n]
    }

    /// P(outputs = out_digits | inputs = in_digits).
    pub fn prob(&self, in_digits: &[usize], out_digits: &[usize]) -> f64 {
        let ic: Vec<usize> = self.inputs.iter().map(|v| v.card).collect();
        let oc: Vec<usize> = self.outputs.iter().map(|v| v.card).collect();
        self.row(encode(in_digits, &ic))[encode(out_digits, &oc)]
    }

    /// Renames variables (both outputs and inputs).
    pub fn rename(mut self, map: &[(&str, &str)]) -> Result<CondKernel> {
        for v in self.outputs.iter_mut().chain(self.inputs.iter_mut()) {
            if let Some((_, new)) = map.iter().find(|(old, _)| *old == v.name) {
                v.name = (*new).to_string();
            }
        }
        check_vars(self.outputs.iter().chain(&self.inputs))?;
        Ok(self)
    }

    /// Largest absolute difference between corresponding rows of two
    /// kernels over the same variables, restricted to rows where
    /// `weight(in_idx)` is positive.
    pub fn max_row_difference(&self, other: &CondKernel, weight: impl Fn(usize) -> f64) -> f64 {
        let n = self.out_size();
        (0..self.in_size())
            .filter(|&i| weight(i) > 0.0)
            .flat_map(|i| (0..n).map(move |o| (i, o)))
            .map(|(i, o)| (self.table[i * n + o] - other.table[i * n + o]).abs())
            .fold(0.0, f64::max)
    }
}

/// Chain-rule product of `factors`, with variables sorted by name.
///
/// Each factor's inputs must be produced by an earlier factor.
pub fn compose(factors: &[&CondKernel]) -> Result<JointPmf> {
    let p = run_compose(factors, None)?;
    Ok(p.canonical())
}

/// Marginal over `keep` of the chain-rule product of `factors`, with
/// variables sorted by name. Variables are summed out as soon as no later
/// factor needs them, so the full product is never materialized.
pub fn compose_marginal(factors: &[&CondKernel], keep: &[&str]) -> Result<JointPmf> {
    check_distinct(keep)?;
    let p = run_compose(factors, Some(keep))?;
    Ok(p.canonical())
}

fn run_compose(factors: &[&CondKernel], keep: Option<&[&str]>) -> Result<JointPmf> {
    // Validate the production order first so errors do not depend on sizes.
    let mut produced: Vec<&Var> = Vec::new();
    for f in factors {
        for v in &f.inputs {
            match produced.iter().find(|p| p.name == v.name) {
                None => return Err(Error::DanglingInput(v.name.clone())),
                Some(p) if p.card != v.card => {
                    return Err(Error::CardinalityMismatch(format!(
                        "`{}` has {} symbols where produced but {} where consumed",
                        v.name, p.card, v.card
                    )))
                }
                _ => {}
            }
        }
        for v in &f.outputs {
            if produced.iter().any(|p| p.name == v.name) {
                return Err(Error::DuplicateVar(v.name.clone()));
            }
            produced.push(v);
        }
    }
    if let Some(keep) = keep {
        for k in keep {
            if !produced.iter().any(|p| p.name == *k) {
                return Err(Error::UnknownVar(k.to_string()));
            }
        }
    }

    let mut vars: Vec<Var> = Vec::new();
    let mut table = vec![1.0];
    for (fi, f) in factors.iter().enumerate() {
        let cards: Vec<usize> = vars.iter().map(|v| v.card).collect();
        let in_cards: Vec<usize> = f.inputs.iter().map(|v| v.card).collect();
        let in_strides = strides(&in_cards);
        // Per current position, its stride in the factor's input index.
        let mut map = vec![0usize; vars.len()];
        for (j, v) in f.inputs.iter().enumerate() {
            let p = vars.iter().position(|w| w.name == v.name).expect("validated");
            map[p] = in_strides[j];
        }
        let out = f.out_size();
        let mut next = vec![0.0; table.len() * out];
        let mut digits = vec![0usize; vars.len()];
        let mut ii = 0usize;
        for (idx, &p) in table.iter().enumerate() {
            if p != 0.0 {
                let row = f.row(ii);
                let dst = &mut next[idx * out..(idx + 1) * out];
                for (d, &r) in dst.iter_mut().zip(row) {
                    *d = p * r;
                }
            }
            let mut d = vars.len();
            while d > 0 {
                d -= 1;
                digits[d] += 1;
                ii += map[d];
                if digits[d] < cards[d] {
                    break;
                }
                ii -= map[d] * cards[d];
                digits[d] = 0;
            }
        }
        vars.extend(f.outputs.iter().cloned());
        table = next;

        if let Some(keep) = keep {
            let needed = |name: &str| {
                keep.contains(&name)
                    || factors[fi + 1..]
                        .iter()
                        .any(|g| g.inputs.iter().any(|v| v.name == name))
            };
            let pos: Vec<usize> = (0..vars.len()).filter(|&i| needed(&vars[i].name)).collect();
            if pos.len() < vars.len() {
                let cards: Vec<usize> = vars.iter().map(|v| v.card).collect();
                table = project(&cards, &table, &pos);
                vars = pos.iter().map(|&i| vars[i].clone()).collect();
            }
        }
    }
    let s: f64 = table.iter().sum();
    if s > 0.0 && s != 1.0 {
        table.iter_mut().for_each(|x| *x /= s);
    }
    Ok(JointPmf::from_parts_unchecked(vars, table))
}

/// Marginal of `p` over `keep`.
pub fn marginalize(p: &JointPmf, keep: &[&str]) -> Result<JointPmf> {
    p.marginalize(keep)
}

/// I(A; B | C) in bits.
pub fn mutual_information(p: &JointPmf, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    p.mutual_information(a, b, given)
}

/// H(A | C) in bits.
pub fn entropy(p: &JointPmf, a: &[&str], given: &[&str]) -> Result<f64> {
    p.entropy(a, given)
}

/// Repeated information queries against one joint law.
///
/// Keeps only the support of the law and caches marginal entropies by
/// variable subset, so evaluating many overlapping terms stays cheap.
pub struct InfoMeasures {
    names: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
    digits: Vec<u16>,
    cache: HashMap<u64, f64>,
}

impl InfoMeasures {
    pub fn new(p: &JointPmf) -> Self {
        let cards = p.cards();
        let n = cards.len();
        assert!(n <= 64, "at most 64 variables");
        let mut probs = Vec::new();
        let mut digits = Vec::new();
        let mut d = vec![0usize; n];
        for &x in p.table() {
            if x > 0.0 {
                probs.push(x);
                digits.extend(d.iter().map(|&v| v as u16));
            }
            advance(&mut d, &cards);
        }
        InfoMeasures {
            names: p.vars().iter().map(|v| v.name.clone()).collect(),
            cards,
            probs,
            digits,
            cache: HashMap::new(),
        }
    }

    fn mask(&self, names: &[&str]) -> Result<u64> {
        let mut m = 0u64;
        for n in names {
            let i = self
                .names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::UnknownVar(n.to_string()))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    fn h_mask(&mut self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&h) = self.cache.get(&mask) {
            return h;
        }
        let n = self.cards.len();
        let pos: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<usize> = pos.iter().map(|&i| self.cards[i]).collect();
        let st = strides(&sub);
        let size = product(&sub);
        let h = if size <= 1 << 22 {
            let mut t = vec![0.0; size];
            for (k, &p) in self.probs.iter().enumerate() {
                let row = &self.digits[k * n..(k + 1) * n];
                let idx: usize = pos.iter().zip(&st).map(|(&i, &s)| row[i] as usize * s).sum();
                t[idx] += p;
            }
            entropy_of_table(&t)
        } else {
            let mut t: HashMap<usize, f64> = HashMap::new();
            for (k, &p) in self.probs.iter().enumerate() {
                let row = &self.digits[k * n..(k + 1) * n];
                let idx: usize = pos.iter().zip(&st).map(|(&i, &s)| row[i] as usize * s).sum();
                *t.entry(idx).or_insert(0.0) += p;
            }
            entropy_of_table(&t.into_values().collect::<Vec<_>>())
        };
        self.cache.insert(mask, h);
        h
    }

    /// Joint entropy H(A) in bits.
    pub fn joint_entropy(&mut self, a: &[&str]) -> Result<f64> {
        check_distinct(a)?;
        let m = self.mask(a)?;
        Ok(self.h_mask(m))
    }

    /// I(A; B | C) in bits, clamped at zero.
    pub fn mi(&mut self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        disjoint(a, b)?;
        disjoint(a, given)?;
        disjoint(b, given)?;
        let (ma, mb, mc) = (self.mask(a)?, self.mask(b)?, self.mask(given)?);
        if ma == 0 || mb == 0 {
            return Ok(0.0);
        }
        let v = self.h_mask(ma | mc) + self.h_mask(mb | mc) - self.h_mask(ma | mb | mc) - self.h_mask(mc);
        if v < -CLAMP_TOL {
            log::debug!("negative information {v:e} clamped to zero");
        }
        Ok(v.max(0.0))
    }
}
