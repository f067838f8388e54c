//! Injectivity structure of a function.
//!
//! Each value `a` of an input reaches an output set: every output with
//! positive probability on some row where that input equals `a`. Values whose
//! sets overlap another value's set are overjective; otherwise a singleton set
//! is injective and a larger one pseudo-injective. A variable is overjective
//! as soon as two of its values overlap.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::decomposition::COMPOSITE_SEP;
use crate::error::{FidError, Result};
use crate::model::FunctionSpec;
use crate::observation::ObservationTable;

/// Outputs at or below this probability are outside a row's support.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Per-entry tolerance when comparing rows for degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectivityClass {
    Injective,
    PseudoInjective,
    Overjective,
}

impl fmt::Display for InjectivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InjectivityClass::Injective => "injective",
            InjectivityClass::PseudoInjective => "pseudo_injective",
            InjectivityClass::Overjective => "overjective",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueClassification {
    pub variable: usize,
    pub value: String,
    /// Reachable output labels, in output alphabet order.
    pub output_set: Vec<String>,
    pub local_class: InjectivityClass,
}

type OutputSet = BTreeSet<usize>;

fn output_sets(spec: &FunctionSpec, i: usize) -> Vec<OutputSet> {
    let domain = spec.domain();
    let mut sets = vec![OutputSet::new(); spec.inputs()[i].len()];
    for (row, dist) in spec.rows().iter().enumerate() {
        sets[domain.digit(row, i)].extend(dist.support(SUPPORT_THRESHOLD));
    }
    sets
}

fn local_classes(sets: &[OutputSet]) -> Vec<InjectivityClass> {
    sets.iter()
        .enumerate()
        .map(|(a, s)| {
            let overlaps = sets
                .iter()
                .enumerate()
                .any(|(b, t)| a != b && !s.is_disjoint(t));
            if overlaps {
                InjectivityClass::Overjective
            } else if s.len() == 1 {
                InjectivityClass::Injective
            } else {
                InjectivityClass::PseudoInjective
            }
        })
        .collect()
}

fn global_class(locals: &[InjectivityClass]) -> InjectivityClass {
    if locals.contains(&InjectivityClass::Overjective) {
        InjectivityClass::Overjective
    } else if locals.iter().all(|c| *c == InjectivityClass::Injective) {
        InjectivityClass::Injective
    } else {
        InjectivityClass::PseudoInjective
    }
}

pub fn classify_values(spec: &FunctionSpec, i: usize) -> Result<Vec<ValueClassification>> {
    spec.check_index(i)?;
    let sets = output_sets(spec, i);
    let locals = local_classes(&sets);
    let out_states = spec.output().states();
    Ok(spec.inputs()[i]
        .states()
        .iter()
        .zip(sets.iter().zip(locals))
        .map(|(value, (set, local_class))| ValueClassification {
            variable: i,
            value: value.clone(),
            output_set: set.iter().map(|&y| out_states[y].clone()).collect(),
            local_class,
        })
        .collect())
}

pub fn classify_variable(spec: &FunctionSpec, i: usize) -> Result<InjectivityClass> {
    spec.check_index(i)?;
    Ok(global_class(&local_classes(&output_sets(spec, i))))
}

/// Whether states `a` and `b` of input `i` have equal rows for every
/// assignment of the other inputs.
fn states_degenerate(spec: &FunctionSpec, i: usize, a: usize, b: usize) -> bool {
    let domain = spec.domain();
    let stride = domain.stride(i);
    let rows = spec.rows();
    (0..domain.size())
        .filter(|&r| domain.digit(r, i) == a)
        .all(|r| {
            let other = r - a * stride + b * stride;
            rows[r].approx_eq(&rows[other], DEGENERACY_TOL)
        })
}

/// State groups (indices) of one input; each group lists indices in declared
/// order and groups are ordered by their first member.
fn degeneracy_groups(spec: &FunctionSpec, i: usize) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..spec.inputs()[i].len() {
        match groups
            .iter_mut()
            .find(|g| states_degenerate(spec, i, g[0], s))
        {
            Some(g) => g.push(s),
            None => groups.push(vec![s]),
        }
    }
    groups
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableDegeneracy {
    pub variable: String,
    /// Partition of the variable's states; singletons mean no degeneracy.
    pub groups: Vec<Vec<String>>,
}

impl VariableDegeneracy {
    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }
}

pub fn find_state_degeneracy(spec: &FunctionSpec) -> Vec<VariableDegeneracy> {
    spec.inputs()
        .iter()
        .enumerate()
        .map(|(i, v)| VariableDegeneracy {
            variable: v.name().to_string(),
            groups: degeneracy_groups(spec, i)
                .into_iter()
                .map(|g| g.into_iter().map(|s| v.states()[s].clone()).collect())
                .collect(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateMapping {
    pub variable: String,
    /// (original label, surviving label) for every original state.
    pub map: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyMerge {
    pub mappings: Vec<StateMapping>,
}

impl DegeneracyMerge {
    pub fn is_identity(&self) -> bool {
        self.mappings
            .iter()
            .all(|m| m.map.iter().all(|(a, b)| a == b))
    }
}

/// Collapses every degeneracy group to its first-declared state.
pub fn merge_degenerate(spec: &FunctionSpec) -> Result<(FunctionSpec, DegeneracyMerge)> {
    let mut kept: Vec<Vec<usize>> = Vec::new();
    let mut inputs = Vec::new();
    let mut mappings = Vec::new();
    for (i, v) in spec.inputs().iter().enumerate() {
        let groups = degeneracy_groups(spec, i);
        if groups.len() < 2 {
            return Err(FidError::VariableBecameConstant {
                variable: v.name().to_string(),
            });
        }
        let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
        let mut map: Vec<(String, String)> = v
            .states()
            .iter()
            .map(|s| (s.clone(), String::new()))
            .collect();
        for g in &groups {
            for &s in g {
                map[s].1 = v.states()[g[0]].clone();
            }
        }
        inputs.push(crate::model::Variable::new(
            v.name(),
            reps.iter().map(|&s| v.states()[s].clone()).collect(),
        )?);
        mappings.push(StateMapping {
            variable: v.name().to_string(),
            map,
        });
        kept.push(reps);
    }
    let mut original = vec![0; spec.n_inputs()];
    let merged = FunctionSpec::from_fn(inputs, spec.output().clone(), |a| {
        for (slot, (&d, reps)) in original.iter_mut().zip(a.iter().zip(&kept)) {
            *slot = reps[d];
        }
        spec.row(&original).clone()
    })?;
    Ok((merged, DegeneracyMerge { mappings }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableStructure {
    pub name: String,
    pub values: Vec<ValueClassification>,
    pub global_class: InjectivityClass,
    pub degeneracy_groups: Vec<Vec<String>>,
    /// Class once degenerate states are merged.
    pub functional_class: InjectivityClass,
    /// True when merging degenerate states changes the class, i.e. the
    /// functional status differs from the practical one.
    pub functional_differs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub variables: Vec<VariableStructure>,
}

pub fn analyze_structure(spec: &FunctionSpec) -> Result<StructureReport> {
    let degeneracy = find_state_degeneracy(spec);
    let mut variables = Vec::with_capacity(spec.n_inputs());
    for (i, deg) in degeneracy.into_iter().enumerate() {
        let sets = output_sets(spec, i);
        let global = global_class(&local_classes(&sets));
        // degenerate states have identical rows and therefore identical
        // sets, so merging them amounts to keeping one set per group
        let reps: Vec<OutputSet> = degeneracy_groups(spec, i)
            .iter()
            .map(|g| sets[g[0]].clone())
            .collect();
        let functional = global_class(&local_classes(&reps));
        variables.push(VariableStructure {
            name: spec.inputs()[i].name().to_string(),
            values: classify_values(spec, i)?,
            global_class: global,
            degeneracy_groups: deg.groups,
            functional_class: functional,
            functional_differs: functional != global,
        });
    }
    Ok(StructureReport { variables })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependentMerge {
    pub table: ObservationTable,
    /// Name of the composite column.
    pub composite: String,
    /// Observed (left, right) pairs, which are the composite's states.
    pub states: Vec<String>,
    /// Combinations that never occur together.
    pub infeasible: Vec<String>,
}

/// Replaces two dependent input columns by one column over the value pairs
/// that were actually observed. The composite takes the position of the
/// earlier column.
pub fn merge_dependent_inputs(
    table: &ObservationTable,
    pair: (usize, usize),
) -> Result<DependentMerge> {
    let (i, j) = pair;
    let n = table.n_inputs();
    for k in [i, j] {
        if k >= n {
            return Err(FidError::IndexOutOfRange { index: k, len: n });
        }
    }
    if i == j {
        return Err(FidError::InvalidJoin(
            "cannot merge an input with itself".into(),
        ));
    }
    let left = table.infer_alphabet(i);
    let right = table.infer_alphabet(j);
    let observed: BTreeSet<(usize, usize)> = table
        .rows
        .iter()
        .map(|r| {
            (
                left.iter().position(|s| *s == r[i]).unwrap(),
                right.iter().position(|s| *s == r[j]).unwrap(),
            )
        })
        .collect();
    if observed.len() == left.len() * right.len() {
        return Err(FidError::MergeUnwarranted {
            left: table.columns[i].clone(),
            right: table.columns[j].clone(),
        });
    }
    let label = |a: &str, b: &str| format!("{a}{COMPOSITE_SEP}{b}");
    let states = observed
        .iter()
        .map(|&(a, b)| label(&left[a], &right[b]))
        .collect();
    let mut infeasible = Vec::new();
    for (a, la) in left.iter().enumerate() {
        for (b, lb) in right.iter().enumerate() {
            if !observed.contains(&(a, b)) {
                infeasible.push(label(la, lb));
            }
        }
    }

    let composite = label(&table.columns[i], &table.columns[j]);
    let (first, second) = (i.min(j), i.max(j));
    let rewrite = |cells: &[String], merged: String| -> Vec<String> {
        let mut out = Vec::with_capacity(cells.len() - 1);
        for (k, c) in cells.iter().enumerate() {
            if k == first {
                out.push(merged.clone());
            } else if k != second {
                out.push(c.clone());
            }
        }
        out
    };
    let columns = rewrite(&table.columns, composite.clone());
    let rows = table
        .rows
        .iter()
        .map(|r| rewrite(r, label(&r[i], &r[j])))
        .collect();
    Ok(DependentMerge {
        table: ObservationTable::new(columns, rows)?,
        composite,
        states,
        infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{gen_builtin, Builtin};
    use crate::model::{OutputDistribution, Variable};
    use InjectivityClass::*;

    fn sets(v: &[ValueClassification]) -> Vec<Vec<&str>> {
        v.iter()
            .map(|c| c.output_set.iter().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn led_switches() {
        let led = gen_builtin(Builtin::LedSquare).unwrap();
        let s1 = classify_values(&led, 0).unwrap();
        assert_eq!(sets(&s1), vec![vec!["A", "B"], vec!["C", "D"]]);
        assert!(s1.iter().all(|c| c.local_class == PseudoInjective));
        assert_eq!(
            sets(&classify_values(&led, 1).unwrap()),
            vec![vec!["A", "C"], vec!["B", "D"]]
        );
        assert_eq!(classify_variable(&led, 0).unwrap(), PseudoInjective);
        assert_eq!(classify_variable(&led, 1).unwrap(), PseudoInjective);
    }

    #[test]
    fn xor_and_gates() {
        let xor = gen_builtin(Builtin::Xor).unwrap();
        let v = classify_values(&xor, 0).unwrap();
        assert_eq!(sets(&v), vec![vec!["0", "1"], vec!["0", "1"]]);
        assert!(v.iter().all(|c| c.local_class == Overjective));
        assert_eq!(classify_variable(&xor, 1).unwrap(), Overjective);

        let and = gen_builtin(Builtin::And).unwrap();
        let v = classify_values(&and, 0).unwrap();
        assert_eq!(sets(&v), vec![vec!["0"], vec!["0", "1"]]);
        assert!(v.iter().all(|c| c.local_class == Overjective));
    }

    #[test]
    fn four_valued_mixture() {
        // X=0 -> {A}, X=1 -> {B}, X=2 -> {B,C}, X=3 -> {E,F}
        let x = Variable::new("X", vec!["0", "1", "2", "3"]).unwrap();
        let z = Variable::binary("Z");
        let out = Variable::new("Y", vec!["A", "B", "C", "E", "F"]).unwrap();
        let table = [[0, 0], [1, 1], [1, 2], [3, 4]];
        let spec = FunctionSpec::from_fn(vec![x, z], out, |a| {
            OutputDistribution::point(5, table[a[0]][a[1]])
        })
        .unwrap();
        let classes: Vec<_> = classify_values(&spec, 0)
            .unwrap()
            .iter()
            .map(|c| c.local_class)
            .collect();
        assert_eq!(
            classes,
            vec![Injective, Overjective, Overjective, PseudoInjective]
        );
        assert_eq!(classify_variable(&spec, 0).unwrap(), Overjective);
    }

    #[test]
    fn probabilistic_support_threshold() {
        let t = gen_builtin(Builtin::Table1).unwrap();
        // row (0,0,1) has P(Y=2) = 0 exactly, excluded from the set
        let v = classify_values(&t, 2).unwrap();
        assert_eq!(v[1].output_set.len(), 4);
    }

    fn traffic_light() -> FunctionSpec {
        let light = Variable::new("light", vec!["red", "vermilion", "crimson", "green"]).unwrap();
        let car = Variable::new("car", vec!["near", "far"]).unwrap();
        let out = Variable::new("action", vec!["stop", "go"]).unwrap();
        FunctionSpec::from_fn(vec![light, car], out, |a| {
            OutputDistribution::point(2, (a[0] == 3) as usize)
        })
        .unwrap()
    }

    #[test]
    fn traffic_light_degeneracy() {
        let spec = traffic_light();
        let deg = find_state_degeneracy(&spec);
        assert_eq!(
            deg[0].groups,
            vec![vec!["red", "vermilion", "crimson"], vec!["green"]]
        );
        // "car" never matters: both states degenerate, merging would leave it constant
        assert!(matches!(
            merge_degenerate(&spec),
            Err(FidError::VariableBecameConstant { .. })
        ));
        let report = analyze_structure(&spec).unwrap();
        assert_eq!(report.variables[0].global_class, Overjective);
        assert_eq!(report.variables[0].functional_class, Injective);
        assert!(report.variables[0].functional_differs);
    }

    fn duplicated_xor() -> FunctionSpec {
        let x1 = Variable::new("X1", vec!["0", "1", "0'"]).unwrap();
        FunctionSpec::from_fn(
            vec![x1, Variable::binary("X2")],
            Variable::binary("Y"),
            |a| {
                let x1 = if a[0] == 2 { 0 } else { a[0] };
                OutputDistribution::point(2, x1 ^ a[1])
            },
        )
        .unwrap()
    }

    #[test]
    fn duplicated_xor_merges_back() {
        let spec = duplicated_xor();
        let deg = find_state_degeneracy(&spec);
        assert_eq!(deg[0].groups, vec![vec!["0", "0'"], vec!["1"]]);
        assert!(!deg[1].is_degenerate());
        let (merged, mapping) = merge_degenerate(&spec).unwrap();
        assert_eq!(merged, gen_builtin(Builtin::Xor).unwrap());
        assert!(!mapping.is_identity());
        assert_eq!(
            mapping.mappings[0].map[2],
            ("0'".to_string(), "0".to_string())
        );
        let (again, m2) = merge_degenerate(&merged).unwrap();
        assert_eq!(again, merged);
        assert!(m2.is_identity());
    }

    #[test]
    fn xor_has_no_degeneracy() {
        let xor = gen_builtin(Builtin::Xor).unwrap();
        assert!(find_state_degeneracy(&xor)
            .iter()
            .all(|d| !d.is_degenerate()));
        let (m, map) = merge_degenerate(&xor).unwrap();
        assert_eq!(m, xor);
        assert!(map.is_identity());
    }

    fn obs(cols: &[&str], rows: &[&[&str]]) -> ObservationTable {
        ObservationTable::new(
            cols.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn weather() -> ObservationTable {
        obs(
            &["Weather", "Precipitation", "Umbrella"],
            &[
                &["Dry", "None", "no"],
                &["Rain", "Light", "yes"],
                &["Rain", "Heavy", "yes"],
                &["Dry", "None", "no"],
                &["Rain", "Light", "no"],
            ],
        )
    }

    #[test]
    fn weather_merge() {
        let m = merge_dependent_inputs(&weather(), (0, 1)).unwrap();
        let mut states = m.states.clone();
        states.sort();
        assert_eq!(states, vec!["Dry·None", "Rain·Heavy", "Rain·Light"]);
        let mut inf = m.infeasible.clone();
        inf.sort();
        assert_eq!(inf, vec!["Dry·Heavy", "Dry·Light", "Rain·None"]);
        assert_eq!(m.table.columns, vec!["Weather·Precipitation", "Umbrella"]);
        assert_eq!(m.table.rows[1], vec!["Rain·Light", "yes"]);
    }

    #[test]
    fn independent_pair_rejected() {
        let t = obs(
            &["A", "B", "Y"],
            &[
                &["0", "0", "0"],
                &["0", "1", "1"],
                &["1", "0", "1"],
                &["1", "1", "0"],
            ],
        );
        assert!(matches!(
            merge_dependent_inputs(&t, (0, 1)),
            Err(FidError::MergeUnwarranted { .. })
        ));
    }

    #[test]
    fn chained_merge() {
        let t = obs(
            &["A", "B", "C", "Y"],
            &[
                &["0", "0", "x", "0"],
                &["1", "1", "x", "1"],
                &["1", "1", "z", "1"],
                &["0", "0", "z", "0"],
                &["0", "0", "x", "1"],
            ],
        );
        let first = merge_dependent_inputs(&t, (0, 1)).unwrap();
        assert_eq!(first.states, vec!["0·0", "1·1"]);
        let second = merge_dependent_inputs(&first.table, (0, 1)).unwrap_err();
        assert!(matches!(second, FidError::MergeUnwarranted { .. }));

        let t = obs(
            &["A", "B", "C", "Y"],
            &[
                &["0", "0", "x", "0"],
                &["1", "1", "z", "1"],
                &["0", "0", "z", "1"],
            ],
        );
        let first = merge_dependent_inputs(&t, (0, 1)).unwrap();
        let second = merge_dependent_inputs(&first.table, (0, 1)).unwrap();
        assert_eq!(second.states, vec!["0·0·x", "0·0·z", "1·1·z"]);
        assert_eq!(second.table.columns[0], "A·B·C");
    }
}
