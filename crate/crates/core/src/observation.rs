//! Observation tables: one column per input, output last, one observation
//! per row. Turning them into spec documents is a matter of counting.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{FidError, Result};
use crate::model::{Domain, DraftRow, SpecDraft, VariableDecl};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationTable {
    /// Variable names; the last one is the output.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ObservationTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        if columns.len() < 2 {
            return Err(FidError::parse(
                Some(1),
                "need at least one input column and the output column",
            ));
        }
        let mut seen = BTreeSet::new();
        for c in &columns {
            if !seen.insert(c) {
                return Err(FidError::parse(Some(1), format!("duplicate column {c:?}")));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(FidError::parse(
                    Some(i + 2),
                    format!("expected {} fields, got {}", columns.len(), r.len()),
                ));
            }
        }
        Ok(ObservationTable { columns, rows })
    }

    pub fn n_inputs(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column_index(&self, name_or_index: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c == name_or_index)
            .or_else(|| {
                name_or_index
                    .parse()
                    .ok()
                    .filter(|&i| i < self.columns.len())
            })
    }

    pub fn values(&self, column: usize) -> impl Iterator<Item = &str> {
        self.rows.iter().map(move |r| r[column].as_str())
    }

    /// Observed labels of a column, ordered numerically when every label is
    /// an integer and lexicographically otherwise.
    pub fn infer_alphabet(&self, column: usize) -> Vec<String> {
        infer_alphabet(self.values(column))
    }
}

pub fn infer_alphabet<'a>(values: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = values.into_iter().collect();
    let mut labels: Vec<String> = set.into_iter().map(String::from).collect();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap());
    }
    labels
}

/// Two inputs some of whose value combinations never occur together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoOccurrenceGap {
    pub left: String,
    pub right: String,
    pub unobserved: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingestion {
    pub draft: SpecDraft,
    pub observations: usize,
    pub observed_patterns: usize,
    pub unobserved_patterns: usize,
    pub gaps: Vec<CoOccurrenceGap>,
}

/// Builds a spec document whose rows are the empirical output frequencies
/// of each observed input pattern. Unobserved patterns become unknown rows.
/// `alphabets` may declare the state order (and unobserved states) of any
/// variable by name; other alphabets are inferred.
pub fn ingest(
    table: &ObservationTable,
    alphabets: &BTreeMap<String, Vec<String>>,
) -> Result<Ingestion> {
    if table.rows.is_empty() {
        return Err(FidError::parse(None, "no observations"));
    }
    let decls: Vec<VariableDecl> = table
        .columns
        .iter()
        .enumerate()
        .map(|(c, name)| VariableDecl {
            name: name.clone(),
            states: alphabets
                .get(name)
                .cloned()
                .unwrap_or_else(|| table.infer_alphabet(c)),
        })
        .collect();
    for name in alphabets.keys() {
        if !table.columns.contains(name) {
            return Err(FidError::parse(
                None,
                format!("alphabet given for unknown column {name:?}"),
            ));
        }
    }
    let n = table.n_inputs();
    let (inputs, output) = (decls[..n].to_vec(), decls[n].clone());
    let domain = Domain::new(inputs.iter().map(|d| d.states.len()).collect())?;

    let mut counts: Vec<Option<Vec<u64>>> = vec![None; domain.size()];
    for (line, row) in table.rows.iter().enumerate() {
        let mut digits = Vec::with_capacity(n + 1);
        for (value, decl) in row.iter().zip(&decls) {
            let d = decl.states.iter().position(|s| s == value).ok_or_else(|| {
                FidError::parse(
                    Some(line + 2),
                    format!("value {value:?} not in the alphabet of {}", decl.name),
                )
            })?;
            digits.push(d);
        }
        let y = digits.pop().expect("output column");
        let slot =
            counts[domain.encode(&digits)].get_or_insert_with(|| vec![0; output.states.len()]);
        slot[y] += 1;
    }

    let rows: Vec<DraftRow> = counts
        .iter()
        .enumerate()
        .map(|(r, c)| DraftRow {
            assignment: domain
                .decode(r)
                .iter()
                .zip(&inputs)
                .map(|(&d, v)| v.states[d].clone())
                .collect(),
            probabilities: c.as_ref().map(|c| {
                let total: u64 = c.iter().sum();
                c.iter().map(|&k| k as f64 / total as f64).collect()
            }),
        })
        .collect();
    let observed = counts.iter().filter(|c| c.is_some()).count();

    let mut gaps = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let seen: BTreeSet<(usize, usize)> = table
                .rows
                .iter()
                .map(|r| {
                    (
                        inputs[i].states.iter().position(|s| *s == r[i]).unwrap(),
                        inputs[j].states.iter().position(|s| *s == r[j]).unwrap(),
                    )
                })
                .collect();
            let mut unobserved = Vec::new();
            for (a, la) in inputs[i].states.iter().enumerate() {
                for (b, lb) in inputs[j].states.iter().enumerate() {
                    if !seen.contains(&(a, b)) {
                        unobserved.push((la.clone(), lb.clone()));
                    }
                }
            }
            if !unobserved.is_empty() {
                gaps.push(CoOccurrenceGap {
                    left: inputs[i].name.clone(),
                    right: inputs[j].name.clone(),
                    unobserved,
                });
            }
        }
    }

    Ok(Ingestion {
        draft: SpecDraft {
            inputs,
            output,
            rows,
            partial: observed < domain.size(),
        },
        observations: table.rows.len(),
        observed_patterns: observed,
        unobserved_patterns: domain.size() - observed,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnySpec;

    fn table(cols: &[&str], rows: &[&[&str]]) -> ObservationTable {
        ObservationTable::new(
            cols.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn numeric_alphabet_order() {
        assert_eq!(infer_alphabet(["10", "2", "1"]), vec!["1", "2", "10"]);
        assert_eq!(infer_alphabet(["b", "a", "b"]), vec!["a", "b"]);
    }

    #[test]
    fn or_xor_observations() {
        let t = table(
            &["X1", "X2", "Y"],
            &[&["0", "0", "0"], &["0", "1", "1"], &["1", "0", "1"]],
        );
        let ing = ingest(&t, &BTreeMap::new()).unwrap();
        assert_eq!(ing.unobserved_patterns, 1);
        assert_eq!(ing.observed_patterns, 3);
        assert!(ing.draft.partial);
        assert_eq!(ing.gaps.len(), 1);
        match ing.draft.into_spec().unwrap() {
            AnySpec::Partial(p) => assert_eq!(p.unknown_rows(), vec![3]),
            AnySpec::Complete(_) => panic!("expected partial"),
        }
    }

    #[test]
    fn empirical_frequencies() {
        let t = table(
            &["A", "Y"],
            &[&["0", "x"], &["0", "x"], &["0", "y"], &["1", "y"]],
        );
        let ing = ingest(&t, &BTreeMap::new()).unwrap();
        assert!(!ing.draft.partial);
        let p0 = ing.draft.rows[0].probabilities.as_ref().unwrap();
        assert!((p0[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn declared_alphabet_adds_unknown_rows() {
        let t = table(&["A", "Y"], &[&["0", "0"], &["1", "1"]]);
        let mut a = BTreeMap::new();
        a.insert("A".to_string(), vec!["0".into(), "1".into(), "2".into()]);
        let ing = ingest(&t, &a).unwrap();
        assert_eq!(ing.unobserved_patterns, 1);
        a.insert("A".to_string(), vec!["0".into()]);
        assert!(ingest(&t, &a).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = ObservationTable::new(vec!["A".into(), "Y".into()], vec![vec!["0".into()]])
            .unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
