//! Functional information decomposition of a complete function.
//!
//! Total information I(Y;X) splits into one independent term I(Y;X_i) per
//! input plus a single synergy term. Solo-synergy attributes the part of the
//! synergy that is lost when one input is dropped.

use serde::Serialize;

use crate::error::{FidError, Result};
use crate::info::{entropy_of, mutual_information};
use crate::model::{build_joint, Coord, FunctionSpec, JointDistribution, Variable};

/// Tolerance on the additive identities of a report.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Largest output alphabet for which coarse-grainings are enumerated.
pub const COARSE_GRAINING_CAP: usize = 6;

/// Conditional entropies below this count as zero.
pub const DETERMINISM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariableTerms {
    pub name: String,
    pub label: String,
    pub independent: f64,
    pub solo_synergy: f64,
    pub loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidReport {
    pub variables: Vec<VariableTerms>,
    pub total_information: f64,
    pub synergy: f64,
    pub output_entropy: f64,
    pub residual_entropy: f64,
}

/// A report invariant that failed, with the two sides that were compared.
#[derive(Clone, Debug, PartialEq)]
pub enum InvariantViolation {
    Identity {
        residual: f64,
    },
    LossSum {
        variable: String,
        residual: f64,
    },
    NegativeResidualEntropy(f64),
    SoloBelowTwiceSynergy {
        solo_sum: f64,
        synergy: f64,
    },
    SoloAboveNSynergy {
        solo_sum: f64,
        synergy: f64,
        n: usize,
    },
}

impl FidReport {
    pub fn independent_sum(&self) -> f64 {
        self.variables.iter().map(|v| v.independent).sum()
    }

    pub fn solo_synergy_sum(&self) -> f64 {
        self.variables.iter().map(|v| v.solo_synergy).sum()
    }

    /// Checks the additive identities and the solo-synergy bounds.
    pub fn check_invariants(&self) -> Vec<InvariantViolation> {
        let mut out = Vec::new();
        let residual = self.total_information - self.independent_sum() - self.synergy;
        if residual.abs() > IDENTITY_TOL {
            out.push(InvariantViolation::Identity { residual });
        }
        for v in &self.variables {
            let r = v.loss - v.independent - v.solo_synergy;
            if r.abs() > 1e-12 {
                out.push(InvariantViolation::LossSum {
                    variable: v.name.clone(),
                    residual: r,
                });
            }
        }
        if self.residual_entropy < -1e-10 {
            out.push(InvariantViolation::NegativeResidualEntropy(
                self.residual_entropy,
            ));
        }
        let n = self.variables.len();
        if n >= 2 {
            let solo_sum = self.solo_synergy_sum();
            if solo_sum < 2.0 * self.synergy - IDENTITY_TOL {
                out.push(InvariantViolation::SoloBelowTwiceSynergy {
                    solo_sum,
                    synergy: self.synergy,
                });
            }
            if solo_sum > n as f64 * self.synergy + IDENTITY_TOL {
                out.push(InvariantViolation::SoloAboveNSynergy {
                    solo_sum,
                    synergy: self.synergy,
                    n,
                });
            }
        }
        out
    }
}

/// Evaluates FID quantities of one spec, sharing its joint distribution.
pub struct Decomposer<'a> {
    spec: &'a FunctionSpec,
    joint: JointDistribution,
}

impl<'a> Decomposer<'a> {
    pub fn new(spec: &'a FunctionSpec) -> Self {
        Decomposer {
            spec,
            joint: build_joint(spec),
        }
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    /// I(Y; X_S) for the given input indices; 0 for the empty set.
    pub fn information(&self, inputs: &[usize]) -> Result<f64> {
        if inputs.is_empty() {
            return Ok(0.0);
        }
        let coords: Vec<Coord> = inputs.iter().map(|&i| Coord::Input(i)).collect();
        mutual_information(&self.joint, &coords, &[Coord::Output])
    }

    pub fn total_information(&self) -> Result<f64> {
        let all: Vec<usize> = (0..self.spec.n_inputs()).collect();
        self.information(&all)
    }

    pub fn independent(&self, i: usize) -> Result<f64> {
        self.spec.check_index(i)?;
        self.information(&[i])
    }

    pub fn output_entropy(&self) -> f64 {
        entropy_of(
            self.joint
                .masses(&[Coord::Output])
                .into_iter()
                .map(|(_, m)| m),
        )
    }

    pub fn synergy(&self) -> Result<f64> {
        let mut s = self.total_information()?;
        for i in 0..self.spec.n_inputs() {
            s -= self.independent(i)?;
        }
        if s < -IDENTITY_TOL {
            return Err(FidError::NegativeSynergy(s));
        }
        Ok(s)
    }

    /// I(Y;X) - I(Y;X without X_i).
    pub fn loss(&self, i: usize) -> Result<f64> {
        self.spec.check_index(i)?;
        let n = self.spec.n_inputs();
        if n < 2 {
            return Err(FidError::SoloSynergyUndefined { inputs: n });
        }
        let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        Ok(self.total_information()? - self.information(&rest)?)
    }

    pub fn solo_synergy(&self, i: usize) -> Result<f64> {
        Ok(self.loss(i)? - self.independent(i)?)
    }

    pub fn report(&self) -> Result<FidReport> {
        let n = self.spec.n_inputs();
        if n < 2 {
            return Err(FidError::SoloSynergyUndefined { inputs: n });
        }
        let total = self.total_information()?;
        let mut variables = Vec::with_capacity(n);
        for (i, v) in self.spec.inputs().iter().enumerate() {
            let independent = self.information(&[i])?;
            let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let solo_synergy = total - self.information(&rest)? - independent;
            variables.push(VariableTerms {
                name: v.name().to_string(),
                label: v.label(),
                independent,
                solo_synergy,
                loss: independent + solo_synergy,
            });
        }
        let synergy = total - variables.iter().map(|v| v.independent).sum::<f64>();
        if synergy < -IDENTITY_TOL {
            return Err(FidError::NegativeSynergy(synergy));
        }
        let output_entropy = self.output_entropy();
        Ok(FidReport {
            variables,
            total_information: total,
            synergy,
            output_entropy,
            residual_entropy: output_entropy - total,
        })
    }
}

pub fn total_information(spec: &FunctionSpec) -> Result<f64> {
    Decomposer::new(spec).total_information()
}

pub fn independent_information(spec: &FunctionSpec, i: usize) -> Result<f64> {
    Decomposer::new(spec).independent(i)
}

pub fn synergy(spec: &FunctionSpec) -> Result<f64> {
    Decomposer::new(spec).synergy()
}

pub fn solo_synergy(spec: &FunctionSpec, i: usize) -> Result<f64> {
    Decomposer::new(spec).solo_synergy(i)
}

pub fn information_loss(spec: &FunctionSpec, i: usize) -> Result<f64> {
    let d = Decomposer::new(spec);
    Ok(d.independent(i)? + d.solo_synergy(i)?)
}

pub fn decompose(spec: &FunctionSpec) -> Result<FidReport> {
    Decomposer::new(spec).report()
}

/// Separator used in composite variable names and state labels.
pub const COMPOSITE_SEP: &str = "·";

/// Replaces the inputs in `subset` by one composite input over the Cartesian
/// product of their alphabets, placed where the lowest member index was.
pub fn join_inputs(spec: &FunctionSpec, subset: &[usize]) -> Result<FunctionSpec> {
    let n = spec.n_inputs();
    let mut members = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.len() != subset.len() {
        return Err(FidError::InvalidJoin("repeated input index".into()));
    }
    for &i in &members {
        spec.check_index(i)?;
    }
    if members.len() < 2 {
        return Err(FidError::InvalidJoin(
            "need at least 2 inputs to join".into(),
        ));
    }
    if members.len() >= n {
        return Err(FidError::InvalidJoin(
            "subset covers all inputs; at least one must remain".into(),
        ));
    }

    let member_vars: Vec<&Variable> = members.iter().map(|&i| &spec.inputs()[i]).collect();
    let product = crate::model::Domain::new(member_vars.iter().map(|v| v.len()).collect())?;
    let states: Vec<String> = (0..product.size())
        .map(|k| {
            product
                .decode(k)
                .iter()
                .zip(&member_vars)
                .map(|(&d, v)| v.states()[d].as_str())
                .collect::<Vec<_>>()
                .join(COMPOSITE_SEP)
        })
        .collect();
    let name = member_vars
        .iter()
        .map(|v| v.name())
        .collect::<Vec<_>>()
        .join(COMPOSITE_SEP);
    let composite = Variable::new(name, states)?;

    // layout[k] = Some(original index) or None for the composite slot
    let first = members[0];
    let mut layout: Vec<Option<usize>> = Vec::new();
    let mut inputs = Vec::new();
    for i in 0..n {
        if i == first {
            layout.push(None);
            inputs.push(composite.clone());
        } else if !members.contains(&i) {
            layout.push(Some(i));
            inputs.push(spec.inputs()[i].clone());
        }
    }
    let mut original = vec![0usize; n];
    FunctionSpec::from_fn(inputs, spec.output().clone(), |a| {
        for (slot, &d) in layout.iter().zip(a) {
            match slot {
                Some(i) => original[*i] = d,
                None => {
                    for (&m, md) in members.iter().zip(product.decode(d)) {
                        original[m] = md;
                    }
                }
            }
        }
        spec.row(&original).clone()
    })
}

/// A coarse-graining of the output determined by two inputs at once.
#[derive(Clone, Debug, PartialEq)]
pub struct RedundancyWitness {
    pub pair: (usize, usize),
    /// Output labels grouped by the value of the coarse-grained variable.
    pub blocks: Vec<Vec<String>>,
}

/// All set partitions of `0..k` as restricted growth strings.
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if pos == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            rec(pos + 1, max.max(b), cur, k, out);
            cur.pop();
        }
    }
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    rec(1, 0, &mut cur, k, &mut out);
    out
}

/// Conditional entropy H(U | X) from a table of P(X=a, Y=y), with U given by
/// the block assignment of each output.
fn conditional_block_entropy(table: &[Vec<f64>], blocks: &[usize], n_blocks: usize) -> f64 {
    let mut h = 0.0;
    for row in table {
        let pa: f64 = row.iter().sum();
        if pa <= 0.0 {
            continue;
        }
        let mut pu = vec![0.0; n_blocks];
        for (y, &p) in row.iter().enumerate() {
            pu[blocks[y]] += p;
        }
        h += pu
            .iter()
            .filter(|p| **p > 0.0)
            .map(|&p| -p * (p / pa).log2())
            .sum::<f64>();
    }
    h
}

fn input_output_table(joint: &JointDistribution, i: usize) -> Vec<Vec<f64>> {
    let k = joint.output_size();
    let mut t = vec![vec![0.0; k]; joint.domain().radices()[i]];
    for (key, m) in joint.masses(&[Coord::Input(i), Coord::Output]) {
        let key = key as usize;
        t[key / k][key % k] += m;
    }
    t
}

/// Searches every non-constant coarse-graining U = φ(Y) for one that is
/// determined by X_i alone and by X_j alone. For a complete spec no such U
/// exists; a returned witness signals a broken joint construction.
pub fn verify_no_redundancy(
    spec: &FunctionSpec,
    pair: (usize, usize),
) -> Result<Option<RedundancyWitness>> {
    let (i, j) = pair;
    spec.check_index(i)?;
    spec.check_index(j)?;
    if i == j {
        return Err(FidError::OverlappingCoordinates);
    }
    let k = spec.output().len();
    if k > COARSE_GRAINING_CAP {
        return Err(FidError::OutputAlphabetTooLarge {
            size: k,
            cap: COARSE_GRAINING_CAP,
        });
    }
    let joint = build_joint(spec);
    let py: Vec<f64> = {
        let mut p = vec![0.0; k];
        for (y, m) in joint.masses(&[Coord::Output]) {
            p[y as usize] = m;
        }
        p
    };
    let ti = input_output_table(&joint, i);
    let tj = input_output_table(&joint, j);

    for blocks in set_partitions(k) {
        let n_blocks = blocks.iter().max().map_or(0, |m| m + 1);
        if n_blocks < 2 {
            continue;
        }
        let mut pu = vec![0.0; n_blocks];
        for (y, &p) in py.iter().enumerate() {
            pu[blocks[y]] += p;
        }
        // constant on the support of Y counts as constant
        if entropy_of(pu) <= DETERMINISM_TOL {
            continue;
        }
        if conditional_block_entropy(&ti, &blocks, n_blocks) <= DETERMINISM_TOL
            && conditional_block_entropy(&tj, &blocks, n_blocks) <= DETERMINISM_TOL
        {
            let mut groups = vec![Vec::new(); n_blocks];
            for (y, &b) in blocks.iter().enumerate() {
                groups[b].push(spec.output().states()[y].clone());
            }
            return Ok(Some(RedundancyWitness {
                pair,
                blocks: groups,
            }));
        }
    }
    Ok(None)
}

/// Whether X_i alone determines the coarse-graining given by `blocks`
/// (block index per output state).
pub fn determines_coarse_graining(spec: &FunctionSpec, i: usize, blocks: &[usize]) -> Result<bool> {
    spec.check_index(i)?;
    let joint = build_joint(spec);
    let n_blocks = blocks.iter().max().map_or(0, |m| m + 1);
    let t = input_output_table(&joint, i);
    Ok(conditional_block_entropy(&t, blocks, n_blocks) <= DETERMINISM_TOL)
}
