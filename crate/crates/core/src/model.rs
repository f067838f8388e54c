//! Complete and partial discrete functions, and the joint input/output
//! distribution they induce under the uniform input measure.
//!
//! Rows are addressed by a mixed-radix index over the input alphabets in
//! declared order, with the first input as the most significant digit.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FidError, Result};

/// Largest joint input domain accepted (rows).
pub const MAX_DOMAIN_ROWS: usize = 1 << 24;

/// Row-sum tolerance on ingestion.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// A named discrete variable with an ordered alphabet of distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VariableDecl", into = "VariableDecl")]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    /// At least one state is required here; input variables additionally need
    /// two, which is checked where a spec is assembled.
    pub fn new<S: Into<String>>(name: impl Into<String>, states: Vec<S>) -> Result<Self> {
        let decl = VariableDecl {
            name: name.into(),
            states: states.into_iter().map(Into::into).collect(),
        };
        Variable::try_from(decl)
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            states: vec!["0".into(), "1".into()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// `X0[0,1]` style label used in reports.
    pub fn label(&self) -> String {
        format!("{}[{}]", self.name, self.states.join(","))
    }
}

/// Unchecked variable declaration as it appears in a spec document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: String,
    pub states: Vec<String>,
}

impl VariableDecl {
    fn problems(&self, min_states: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.name.is_empty() {
            out.push("empty variable name".to_string());
        }
        if self.states.len() < min_states {
            out.push(format!(
                "variable {} has {} state(s), needs at least {min_states}",
                self.name,
                self.states.len()
            ));
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s.as_str()) {
                out.push(format!("variable {} repeats state {s:?}", self.name));
            }
        }
        out
    }
}

impl TryFrom<VariableDecl> for Variable {
    type Error = FidError;

    fn try_from(decl: VariableDecl) -> Result<Self> {
        let problems = decl.problems(1);
        if !problems.is_empty() {
            return Err(FidError::InvalidSpec(
                problems
                    .into_iter()
                    .map(|m| Violation::new(Locus::Variable(decl.name.clone()), m))
                    .collect(),
            ));
        }
        Ok(Variable {
            name: decl.name,
            states: decl.states,
        })
    }
}

impl From<Variable> for VariableDecl {
    fn from(v: Variable) -> Self {
        VariableDecl {
            name: v.name,
            states: v.states,
        }
    }
}

/// Where a validation problem was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locus {
    Spec,
    Variable(String),
    Row(Vec<String>),
    RowIndex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub locus: Locus,
    pub message: String,
}

impl Violation {
    pub fn new(locus: Locus, message: impl Into<String>) -> Self {
        Violation {
            locus,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.locus {
            Locus::Spec => write!(f, "{}", self.message),
            Locus::Variable(name) => write!(f, "variable {name}: {}", self.message),
            Locus::Row(a) => write!(f, "row ({}): {}", a.join(","), self.message),
            Locus::RowIndex(i) => write!(f, "row #{i}: {}", self.message),
        }
    }
}

/// Returns a description of what is wrong with a probability vector, if anything.
fn probability_problem(p: &[f64]) -> Option<String> {
    if let Some(x) = p.iter().find(|x| !x.is_finite()) {
        return Some(format!("non-finite probability {x}"));
    }
    if let Some(x) = p.iter().find(|x| **x < 0.0) {
        return Some(format!("negative probability {x}"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Some(format!("row sum {sum} ≠ 1"));
    }
    None
}

/// Probabilities over an output alphabet, aligned with its declared order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputDistribution(Vec<f64>);

impl OutputDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(FidError::InvalidSpec(vec![Violation::new(
                Locus::Spec,
                "empty output distribution",
            )]));
        }
        match probability_problem(&probabilities) {
            Some(m) => Err(FidError::InvalidSpec(vec![Violation::new(Locus::Spec, m)])),
            None => Ok(OutputDistribution(probabilities)),
        }
    }

    pub fn point(size: usize, state: usize) -> Self {
        assert!(
            state < size,
            "point mass state {state} outside alphabet of {size}"
        );
        let mut p = vec![0.0; size];
        p[state] = 1.0;
        OutputDistribution(p)
    }

    pub fn uniform(size: usize) -> Self {
        OutputDistribution(vec![1.0 / size as f64; size])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        self.0.iter().filter(|p| **p == 1.0).count() == 1
    }

    /// Indices of outputs with probability above `threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, p)| **p > threshold)
            .map(|(i, _)| i)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Mixed-radix addressing of the joint input domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Domain {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        let mut rows: u128 = 1;
        for &r in &radices {
            rows = rows.saturating_mul(r as u128);
        }
        if rows > MAX_DOMAIN_ROWS as u128 {
            return Err(FidError::DomainTooLarge {
                rows,
                cap: MAX_DOMAIN_ROWS,
            });
        }
        let mut strides = vec![1; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        Ok(Domain {
            radices,
            strides,
            size: rows as usize,
        })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.radices.len()
    }

    /// Row-index step between consecutive states of one input.
    pub fn stride(&self, input: usize) -> usize {
        self.strides[input]
    }

    pub fn digit(&self, row: usize, input: usize) -> usize {
        (row / self.strides[input]) % self.radices[input]
    }

    pub fn decode(&self, row: usize) -> Vec<usize> {
        (0..self.arity()).map(|i| self.digit(row, i)).collect()
    }

    pub fn encode(&self, assignment: &[usize]) -> usize {
        assignment
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }
}

fn check_inputs(inputs: &[Variable], output: &Variable) -> Result<Domain> {
    let mut violations = Vec::new();
    let mut names = HashSet::new();
    for v in inputs.iter().chain(std::iter::once(output)) {
        if !names.insert(v.name()) {
            violations.push(Violation::new(
                Locus::Variable(v.name().into()),
                "duplicate variable name",
            ));
        }
    }
    for v in inputs {
        if v.len() < 2 {
            violations.push(Violation::new(
                Locus::Variable(v.name().into()),
                format!("input has {} state(s), needs at least 2", v.len()),
            ));
        }
    }
    if inputs.is_empty() {
        violations.push(Violation::new(Locus::Spec, "no input variables"));
    }
    if !violations.is_empty() {
        return Err(FidError::InvalidSpec(violations));
    }
    Domain::new(inputs.iter().map(Variable::len).collect())
}

fn check_row_len(rows: usize, domain: &Domain, dists: &[(usize, usize)]) -> Result<()> {
    let mut violations = Vec::new();
    if rows != domain.size() {
        violations.push(Violation::new(
            Locus::Spec,
            format!("{rows} rows for a domain of {}", domain.size()),
        ));
    }
    for &(row, len) in dists {
        violations.push(Violation::new(
            Locus::RowIndex(row),
            format!("distribution has {len} entries"),
        ));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(FidError::InvalidSpec(violations))
    }
}

/// A function defined on every joint input assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSpec {
    inputs: Vec<Variable>,
    output: Variable,
    domain: Domain,
    rows: Vec<OutputDistribution>,
}

impl FunctionSpec {
    /// `rows` are in mixed-radix order of the input alphabets.
    pub fn from_rows(
        inputs: Vec<Variable>,
        output: Variable,
        rows: Vec<OutputDistribution>,
    ) -> Result<Self> {
        let domain = check_inputs(&inputs, &output)?;
        let bad: Vec<_> = rows
            .iter()
            .enumerate()
            .filter(|(_, d)| d.len() != output.len())
            .map(|(i, d)| (i, d.len()))
            .collect();
        check_row_len(rows.len(), &domain, &bad)?;
        Ok(FunctionSpec {
            inputs,
            output,
            domain,
            rows,
        })
    }

    /// Builds a spec by evaluating `f` on every assignment (state indices).
    pub fn from_fn(
        inputs: Vec<Variable>,
        output: Variable,
        mut f: impl FnMut(&[usize]) -> OutputDistribution,
    ) -> Result<Self> {
        let domain = check_inputs(&inputs, &output)?;
        let rows = (0..domain.size()).map(|r| f(&domain.decode(r))).collect();
        FunctionSpec::from_rows(inputs, output, rows)
    }

    /// Deterministic spec from output state indices per row.
    pub fn deterministic(
        inputs: Vec<Variable>,
        output: Variable,
        outputs: &[usize],
    ) -> Result<Self> {
        let k = output.len();
        if let Some(&bad) = outputs.iter().find(|&&o| o >= k) {
            return Err(FidError::InvalidSpec(vec![Violation::new(
                Locus::Spec,
                format!("output index {bad} outside alphabet of {k}"),
            )]));
        }
        let rows = outputs
            .iter()
            .map(|&o| OutputDistribution::point(k, o))
            .collect();
        FunctionSpec::from_rows(inputs, output, rows)
    }

    pub fn inputs(&self) -> &[Variable] {
        &self.inputs
    }

    pub fn output(&self) -> &Variable {
        &self.output
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn rows(&self) -> &[OutputDistribution] {
        &self.rows
    }

    pub fn row(&self, assignment: &[usize]) -> &OutputDistribution {
        &self.rows[self.domain.encode(assignment)]
    }

    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(OutputDistribution::is_deterministic)
    }

    pub fn labels(&self, row: usize) -> Vec<String> {
        self.domain
            .decode(row)
            .iter()
            .zip(&self.inputs)
            .map(|(&d, v)| v.states()[d].clone())
            .collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.inputs.len() {
            return Err(FidError::IndexOutOfRange {
                index: i,
                len: self.inputs.len(),
            });
        }
        Ok(())
    }
}

/// A function with some rows unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFunctionSpec {
    inputs: Vec<Variable>,
    output: Variable,
    domain: Domain,
    rows: Vec<Option<OutputDistribution>>,
}

impl PartialFunctionSpec {
    pub fn from_rows(
        inputs: Vec<Variable>,
        output: Variable,
        rows: Vec<Option<OutputDistribution>>,
    ) -> Result<Self> {
        let domain = check_inputs(&inputs, &output)?;
        let bad: Vec<_> = rows
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.as_ref().map(|d| (i, d.len())))
            .filter(|(_, len)| *len != output.len())
            .collect();
        check_row_len(rows.len(), &domain, &bad)?;
        if rows.iter().all(Option::is_some) {
            return Err(FidError::SpecIsComplete);
        }
        Ok(PartialFunctionSpec {
            inputs,
            output,
            domain,
            rows,
        })
    }

    pub fn inputs(&self) -> &[Variable] {
        &self.inputs
    }

    pub fn output(&self) -> &Variable {
        &self.output
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn rows(&self) -> &[Option<OutputDistribution>] {
        &self.rows
    }

    pub fn unknown_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(i, _)| i)
            .collect()
    }

    /// Fills every unknown row with `fill(row_index)`; known rows are copied.
    pub fn complete_with(&self, mut fill: impl FnMut(usize) -> OutputDistribution) -> FunctionSpec {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| match r {
                Some(d) => d.clone(),
                None => {
                    let d = fill(i);
                    debug_assert_eq!(d.len(), self.output.len());
                    d
                }
            })
            .collect();
        FunctionSpec {
            inputs: self.inputs.clone(),
            output: self.output.clone(),
            domain: self.domain.clone(),
            rows,
        }
    }

    /// The same partial function with one more row made known. Returns a
    /// complete spec if no unknown rows remain.
    pub fn with_known_row(&self, row: usize, dist: OutputDistribution) -> Result<AnySpec> {
        let mut rows = self.rows.clone();
        if row >= rows.len() {
            return Err(FidError::IndexOutOfRange {
                index: row,
                len: rows.len(),
            });
        }
        rows[row] = Some(dist);
        if rows.iter().all(Option::is_some) {
            let rows = rows.into_iter().map(Option::unwrap).collect();
            FunctionSpec::from_rows(self.inputs.clone(), self.output.clone(), rows)
                .map(AnySpec::Complete)
        } else {
            PartialFunctionSpec::from_rows(self.inputs.clone(), self.output.clone(), rows)
                .map(AnySpec::Partial)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnySpec {
    Complete(FunctionSpec),
    Partial(PartialFunctionSpec),
}

/// One row of an unchecked spec document.
#[derive(Clone, Debug, PartialEq)]
pub struct DraftRow {
    pub assignment: Vec<String>,
    pub probabilities: Option<Vec<f64>>,
}

/// A spec as read from a document, before any invariant is checked.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecDraft {
    pub inputs: Vec<VariableDecl>,
    pub output: VariableDecl,
    pub rows: Vec<DraftRow>,
    pub partial: bool,
}

const MAX_LISTED_MISSING: usize = 20;

/// Checks every invariant of a spec document and lists what is violated.
pub fn validate(draft: &SpecDraft) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for d in draft.inputs.iter().chain(std::iter::once(&draft.output)) {
        if !names.insert(d.name.as_str()) {
            out.push(Violation::new(
                Locus::Variable(d.name.clone()),
                "duplicate variable name",
            ));
        }
    }
    for d in &draft.inputs {
        out.extend(
            d.problems(2)
                .into_iter()
                .map(|m| Violation::new(Locus::Variable(d.name.clone()), m)),
        );
    }
    out.extend(
        draft
            .output
            .problems(1)
            .into_iter()
            .map(|m| Violation::new(Locus::Variable(draft.output.name.clone()), m)),
    );
    if draft.inputs.is_empty() {
        out.push(Violation::new(Locus::Spec, "no input variables"));
    }
    if !out.is_empty() {
        return out;
    }

    let domain = match Domain::new(draft.inputs.iter().map(|d| d.states.len()).collect()) {
        Ok(d) => d,
        Err(e) => return vec![Violation::new(Locus::Spec, e.to_string())],
    };
    let mut seen = vec![false; domain.size()];
    for row in &draft.rows {
        let locus = || Locus::Row(row.assignment.clone());
        if row.assignment.len() != draft.inputs.len() {
            out.push(Violation::new(
                locus(),
                format!(
                    "assignment has {} values for {} inputs",
                    row.assignment.len(),
                    draft.inputs.len()
                ),
            ));
            continue;
        }
        let mut digits = Vec::with_capacity(draft.inputs.len());
        for (label, decl) in row.assignment.iter().zip(&draft.inputs) {
            match decl.states.iter().position(|s| s == label) {
                Some(d) => digits.push(d),
                None => out.push(Violation::new(
                    locus(),
                    format!("unknown state {label:?} for {}", decl.name),
                )),
            }
        }
        if digits.len() == draft.inputs.len() {
            let idx = domain.encode(&digits);
            if seen[idx] {
                out.push(Violation::new(locus(), "duplicate assignment"));
            }
            seen[idx] = true;
        }
        match &row.probabilities {
            None if !draft.partial => out.push(Violation::new(
                locus(),
                "unknown row in a spec not declared partial",
            )),
            None => {}
            Some(p) if p.len() != draft.output.states.len() => out.push(Violation::new(
                locus(),
                format!(
                    "{} probabilities for {} output states",
                    p.len(),
                    draft.output.states.len()
                ),
            )),
            Some(p) => {
                if let Some(m) = probability_problem(p) {
                    out.push(Violation::new(locus(), m));
                }
            }
        }
    }
    let missing: Vec<usize> = (0..domain.size()).filter(|&i| !seen[i]).collect();
    for &i in missing.iter().take(MAX_LISTED_MISSING) {
        let labels: Vec<&str> = domain
            .decode(i)
            .iter()
            .zip(&draft.inputs)
            .map(|(&d, v)| v.states[d].as_str())
            .collect();
        out.push(Violation::new(
            Locus::Spec,
            format!("missing assignment ({})", labels.join(",")),
        ));
    }
    if missing.len() > MAX_LISTED_MISSING {
        out.push(Violation::new(
            Locus::Spec,
            format!(
                "... and {} more missing assignments",
                missing.len() - MAX_LISTED_MISSING
            ),
        ));
    }
    out
}

impl SpecDraft {
    /// Validates and converts. A document with unknown rows becomes a partial
    /// spec; otherwise a complete one.
    pub fn into_spec(self) -> Result<AnySpec> {
        let violations = validate(&self);
        if !violations.is_empty() {
            return Err(FidError::InvalidSpec(violations));
        }
        let inputs: Vec<Variable> = self
            .inputs
            .into_iter()
            .map(Variable::try_from)
            .collect::<Result<_>>()?;
        let output = Variable::try_from(self.output)?;
        let domain = Domain::new(inputs.iter().map(Variable::len).collect())?;
        let mut rows: Vec<Option<OutputDistribution>> = vec![None; domain.size()];
        for row in self.rows {
            let digits: Vec<usize> = row
                .assignment
                .iter()
                .zip(&inputs)
                .map(|(l, v)| v.state_index(l).expect("validated"))
                .collect();
            rows[domain.encode(&digits)] = row.probabilities.map(OutputDistribution);
        }
        if rows.iter().all(Option::is_some) {
            let rows = rows.into_iter().map(Option::unwrap).collect();
            Ok(AnySpec::Complete(FunctionSpec::from_rows(
                inputs, output, rows,
            )?))
        } else {
            Ok(AnySpec::Partial(PartialFunctionSpec::from_rows(
                inputs, output, rows,
            )?))
        }
    }
}

impl From<&FunctionSpec> for SpecDraft {
    fn from(spec: &FunctionSpec) -> Self {
        SpecDraft {
            inputs: spec.inputs.iter().cloned().map(Into::into).collect(),
            output: spec.output.clone().into(),
            rows: spec
                .rows
                .iter()
                .enumerate()
                .map(|(i, d)| DraftRow {
                    assignment: spec.labels(i),
                    probabilities: Some(d.0.clone()),
                })
                .collect(),
            partial: false,
        }
    }
}

impl From<&PartialFunctionSpec> for SpecDraft {
    fn from(spec: &PartialFunctionSpec) -> Self {
        SpecDraft {
            inputs: spec.inputs.iter().cloned().map(Into::into).collect(),
            output: spec.output.clone().into(),
            rows: spec
                .rows
                .iter()
                .enumerate()
                .map(|(i, d)| DraftRow {
                    assignment: spec
                        .domain
                        .decode(i)
                        .iter()
                        .zip(&spec.inputs)
                        .map(|(&s, v)| v.states()[s].clone())
                        .collect(),
                    probabilities: d.as_ref().map(|d| d.0.clone()),
                })
                .collect(),
            partial: true,
        }
    }
}

/// A coordinate of the joint distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Input(usize),
    Output,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointEntry {
    pub row: usize,
    pub output: usize,
    pub mass: f64,
}

/// Sparse joint distribution over (input row, output state), zero-mass
/// outcomes omitted, stored in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    domain: Domain,
    output_size: usize,
    entries: Vec<JointEntry>,
}

/// Dense accumulation is used below this many marginal cells.
const DENSE_LIMIT: usize = 1 << 20;

impl JointDistribution {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn entries(&self) -> &[JointEntry] {
        &self.entries
    }

    pub fn mass(&self, row: usize, output: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.row, e.output).cmp(&(row, output)))
            .map(|i| self.entries[i].mass)
            .unwrap_or(0.0)
    }

    fn radix(&self, c: Coord) -> usize {
        match c {
            Coord::Input(i) => self.domain.radices()[i],
            Coord::Output => self.output_size,
        }
    }

    pub(crate) fn check_coords(&self, coords: &[Coord]) -> Result<()> {
        if coords.is_empty() {
            return Err(FidError::EmptyCoordinates);
        }
        let mut seen = HashSet::new();
        for &c in coords {
            if let Coord::Input(i) = c {
                if i >= self.domain.arity() {
                    return Err(FidError::IndexOutOfRange {
                        index: i,
                        len: self.domain.arity(),
                    });
                }
            }
            if !seen.insert(c) {
                return Err(FidError::OverlappingCoordinates);
            }
        }
        Ok(())
    }

    fn key(&self, e: &JointEntry, coords: &[Coord]) -> u64 {
        let mut k = 0u64;
        for &c in coords {
            let d = match c {
                Coord::Input(i) => self.domain.digit(e.row, i),
                Coord::Output => e.output,
            };
            k = k * self.radix(c) as u64 + d as u64;
        }
        k
    }

    /// Non-zero marginal masses keyed by the mixed-radix code of the selected
    /// coordinates, ascending by key. Coordinates must already be checked.
    pub(crate) fn masses(&self, coords: &[Coord]) -> Vec<(u64, f64)> {
        let cells = coords
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(self.radix(c)));
        match cells {
            Some(n) if n <= DENSE_LIMIT => {
                let mut dense = vec![0.0; n];
                for e in &self.entries {
                    dense[self.key(e, coords) as usize] += e.mass;
                }
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, m)| *m > 0.0)
                    .map(|(k, m)| (k as u64, m))
                    .collect()
            }
            _ => {
                let mut sparse = BTreeMap::new();
                for e in &self.entries {
                    *sparse.entry(self.key(e, coords)).or_insert(0.0) += e.mass;
                }
                sparse.into_iter().filter(|(_, m)| *m > 0.0).collect()
            }
        }
    }

    fn decode_key(&self, mut key: u64, coords: &[Coord]) -> Vec<usize> {
        let mut out = vec![0; coords.len()];
        for (slot, &c) in out.iter_mut().zip(coords).rev() {
            let r = self.radix(c) as u64;
            *slot = (key % r) as usize;
            key /= r;
        }
        out
    }
}

/// Distribution over a selection of joint coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    pub coords: Vec<Coord>,
    /// (state index per selected coordinate, probability), zero-mass omitted.
    pub outcomes: Vec<(Vec<usize>, f64)>,
}

impl Marginal {
    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|(_, p)| *p).collect()
    }

    pub fn probability(&self, states: &[usize]) -> f64 {
        self.outcomes
            .iter()
            .find(|(s, _)| s == states)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

/// Joint distribution of a complete spec under the uniform input measure.
pub fn build_joint(spec: &FunctionSpec) -> JointDistribution {
    let weight = 1.0 / spec.domain.size() as f64;
    let entries = spec
        .rows
        .iter()
        .enumerate()
        .flat_map(|(row, d)| {
            d.0.iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(move |(output, p)| JointEntry {
                    row,
                    output,
                    mass: p * weight,
                })
        })
        .collect();
    JointDistribution {
        domain: spec.domain.clone(),
        output_size: spec.output.len(),
        entries,
    }
}

pub fn marginal(joint: &JointDistribution, which: &[Coord]) -> Result<Marginal> {
    joint.check_coords(which)?;
    let outcomes = joint
        .masses(which)
        .into_iter()
        .map(|(k, m)| (joint.decode_key(k, which), m))
        .collect();
    Ok(Marginal {
        coords: which.to_vec(),
        outcomes,
    })
}
