//! Shannon entropy and mutual information, in bits.

use crate::error::{FidError, Result};
use crate::model::{Coord, JointDistribution, Locus, Violation, PROB_TOLERANCE};

/// Negative mutual information down to this magnitude is treated as zero.
pub const MI_CLAMP: f64 = 1e-10;

pub(crate) fn entropy_of(masses: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = masses
        .into_iter()
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // -0.0 -> 0.0
    h + 0.0
}

/// Entropy of a probability vector. Zero entries contribute nothing.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    let sum: f64 = dist.iter().sum();
    if dist.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(FidError::InvalidSpec(vec![Violation::new(
            Locus::Spec,
            format!("malformed distribution (sum {sum})"),
        )]));
    }
    Ok(entropy_of(dist.iter().copied()))
}

/// Joint entropy of the selected coordinates.
pub fn joint_entropy(joint: &JointDistribution, coords: &[Coord]) -> Result<f64> {
    joint.check_coords(coords)?;
    Ok(entropy_of(joint.masses(coords).into_iter().map(|(_, m)| m)))
}

fn check_disjoint(joint: &JointDistribution, a: &[Coord], b: &[Coord]) -> Result<Vec<Coord>> {
    joint.check_coords(a)?;
    joint.check_coords(b)?;
    let both: Vec<Coord> = a.iter().chain(b).copied().collect();
    joint.check_coords(&both)?;
    Ok(both)
}

fn clamp(mi: f64) -> f64 {
    if (-MI_CLAMP..0.0).contains(&mi) {
        0.0
    } else {
        mi
    }
}

/// I(A;B) = H(A) + H(B) - H(A,B).
pub fn mutual_information(joint: &JointDistribution, a: &[Coord], b: &[Coord]) -> Result<f64> {
    let both = check_disjoint(joint, a, b)?;
    let h = |c: &[Coord]| entropy_of(joint.masses(c).into_iter().map(|(_, m)| m));
    Ok(clamp(h(a) + h(b) - h(&both)))
}

/// I(A;B) as the direct sum of p(a,b) log2[p(a,b) / (p(a) p(b))].
///
/// Independent of the entropy identity; used to cross-check it.
pub fn mutual_information_direct(
    joint: &JointDistribution,
    a: &[Coord],
    b: &[Coord],
) -> Result<f64> {
    let both = check_disjoint(joint, a, b)?;
    let pa = joint.masses(a);
    let pb = joint.masses(b);
    let b_cells: u64 = b
        .iter()
        .map(|&c| match c {
            Coord::Input(i) => joint.domain().radices()[i] as u64,
            Coord::Output => joint.output_size() as u64,
        })
        .product();
    let lookup = |m: &[(u64, f64)], k: u64| {
        m.binary_search_by_key(&k, |(key, _)| *key)
            .map(|i| m[i].1)
            .expect("marginal of a non-zero joint cell is non-zero")
    };
    let mi: f64 = joint
        .masses(&both)
        .into_iter()
        .map(|(k, p)| {
            let marg = lookup(&pa, k / b_cells) * lookup(&pb, k % b_cells);
            p * (p / marg).log2()
        })
        .sum();
    Ok(clamp(mi))
}
