#![allow(dead_code)]

use fid_core::{FunctionSpec, OutputDistribution, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub enum RowMix {
    Deterministic,
    Probabilistic,
    Mixed,
}

pub fn variable(name: &str, k: usize) -> Variable {
    Variable::new(name, (0..k).map(|s| s.to_string()).collect()).unwrap()
}

fn random_row(rng: &mut ChaCha8Rng, k: usize, deterministic: bool) -> OutputDistribution {
    if deterministic {
        return OutputDistribution::point(k, rng.random_range(0..k));
    }
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(1..=20) as f64
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..k)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    OutputDistribution::new(w.into_iter().map(|x| x / total).collect()).unwrap()
}

/// A complete spec with `n_inputs` inputs of 2..=max_states states each and an
/// output of 2..=max_states states.
pub fn random_spec_with(
    rng: &mut ChaCha8Rng,
    n_inputs: usize,
    max_states: usize,
    mix: RowMix,
) -> FunctionSpec {
    let inputs: Vec<Variable> = (0..n_inputs)
        .map(|i| variable(&format!("X{i}"), rng.random_range(2..=max_states)))
        .collect();
    let k = rng.random_range(2..=max_states);
    let output = variable("Y", k);
    let rows: usize = inputs.iter().map(Variable::len).product();
    let dists = (0..rows)
        .map(|_| {
            let det = match mix {
                RowMix::Deterministic => true,
                RowMix::Probabilistic => false,
                RowMix::Mixed => rng.random_bool(0.5),
            };
            random_row(rng, k, det)
        })
        .collect();
    FunctionSpec::from_rows(inputs, output, dists).unwrap()
}

/// 2 to 4 inputs, alphabets of at most 4, row mix chosen per spec.
pub fn random_spec(seed: u64) -> FunctionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=4);
    let mix = match rng.random_range(0..3) {
        0 => RowMix::Deterministic,
        1 => RowMix::Probabilistic,
        _ => RowMix::Mixed,
    };
    random_spec_with(&mut rng, n, 4, mix)
}
