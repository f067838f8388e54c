//! Built-in example functions.

use std::fmt;
use std::str::FromStr;

use crate::error::{FidError, Result};
use crate::model::{FunctionSpec, OutputDistribution, PartialFunctionSpec, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    And,
    Or,
    Xor,
    LedSquare,
    /// 3x3 Game of Life neighbourhood: 8 neighbours then the focal cell.
    GolNeighborhood,
    /// Strict majority of `k` binary inputs.
    Majority(usize),
    /// Three-input probabilistic transition table.
    Table1,
}

impl FromStr for Builtin {
    type Err = FidError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let b = match lower.as_str() {
            "and" => Builtin::And,
            "or" => Builtin::Or,
            "xor" => Builtin::Xor,
            "led_square" | "led" => Builtin::LedSquare,
            "gol_neighborhood" | "gol" => Builtin::GolNeighborhood,
            "table1" => Builtin::Table1,
            other => {
                let k = other
                    .strip_prefix("majority")
                    .map(|r| r.trim_start_matches([':', '(']).trim_end_matches(')'))
                    .and_then(|r| r.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| FidError::UnknownBuiltin(s.to_string()))?;
                Builtin::Majority(k)
            }
        };
        Ok(b)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::And => f.write_str("and"),
            Builtin::Or => f.write_str("or"),
            Builtin::Xor => f.write_str("xor"),
            Builtin::LedSquare => f.write_str("led_square"),
            Builtin::GolNeighborhood => f.write_str("gol_neighborhood"),
            Builtin::Majority(k) => write!(f, "majority{k}"),
            Builtin::Table1 => f.write_str("table1"),
        }
    }
}

pub const GOL_NEIGHBORS: [&str; 8] = ["NW", "N", "NE", "W", "E", "SW", "S", "SE"];

fn gate(out: [usize; 4]) -> Result<FunctionSpec> {
    FunctionSpec::deterministic(
        vec![Variable::binary("X1"), Variable::binary("X2")],
        Variable::binary("Y"),
        &out,
    )
}

pub fn gen_builtin(builtin: Builtin) -> Result<FunctionSpec> {
    match builtin {
        Builtin::And => gate([0, 0, 0, 1]),
        Builtin::Or => gate([0, 1, 1, 1]),
        Builtin::Xor => gate([0, 1, 1, 0]),
        Builtin::LedSquare => {
            let switch = |n: &str| Variable::new(n, vec!["U", "D"]);
            FunctionSpec::deterministic(
                vec![switch("s1")?, switch("s2")?],
                Variable::new("LED", vec!["A", "B", "C", "D"])?,
                &[0, 1, 2, 3],
            )
        }
        Builtin::GolNeighborhood => {
            let cell = |n: &str| Variable::new(n, vec!["dead", "alive"]);
            let mut inputs = GOL_NEIGHBORS
                .iter()
                .map(|n| cell(n))
                .collect::<Result<Vec<_>>>()?;
            inputs.push(cell("C")?);
            FunctionSpec::from_fn(inputs, cell("next")?, |a| {
                let live = a[..8].iter().sum::<usize>();
                let alive = match a[8] {
                    0 => live == 3,
                    _ => live == 2 || live == 3,
                };
                OutputDistribution::point(2, alive as usize)
            })
        }
        Builtin::Majority(k) => {
            let inputs = (1..=k).map(|i| Variable::binary(format!("X{i}"))).collect();
            FunctionSpec::from_fn(inputs, Variable::binary("Y"), |a| {
                let ones = a.iter().sum::<usize>();
                OutputDistribution::point(2, (2 * ones > k) as usize)
            })
        }
        Builtin::Table1 => {
            let rows = [
                [0.25, 0.25, 0.25, 0.25],
                [0.05, 0.45, 0.0, 0.5],
                [0.3, 0.2, 0.0, 0.5],
                [0.0, 0.0, 1.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ];
            FunctionSpec::from_rows(
                (0..3).map(|i| Variable::binary(format!("X{i}"))).collect(),
                Variable::new("Y", vec!["0", "1", "2", "3"])?,
                rows.iter()
                    .map(|r| OutputDistribution::new(r.to_vec()))
                    .collect::<Result<_>>()?,
            )
        }
    }
}

/// Two-input boolean function known everywhere except at (1,1), which is
/// consistent with both OR and XOR.
pub fn or_xor_partial() -> PartialFunctionSpec {
    PartialFunctionSpec::from_rows(
        vec![Variable::binary("X1"), Variable::binary("X2")],
        Variable::binary("Y"),
        vec![
            Some(OutputDistribution::point(2, 0)),
            Some(OutputDistribution::point(2, 1)),
            Some(OutputDistribution::point(2, 1)),
            None,
        ],
    )
    .expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("gol".parse::<Builtin>().unwrap(), Builtin::GolNeighborhood);
        assert_eq!(
            "majority3".parse::<Builtin>().unwrap(),
            Builtin::Majority(3)
        );
        assert_eq!(
            "majority(5)".parse::<Builtin>().unwrap(),
            Builtin::Majority(5)
        );
        assert!("nand".parse::<Builtin>().is_err());
        assert!("majority0".parse::<Builtin>().is_err());
        for b in [Builtin::Table1, Builtin::Majority(7), Builtin::LedSquare] {
            assert_eq!(b.to_string().parse::<Builtin>().unwrap(), b);
        }
    }

    #[test]
    fn led_listing() {
        let led = gen_builtin(Builtin::LedSquare).unwrap();
        let got: Vec<(Vec<String>, usize)> = (0..4)
            .map(|r| (led.labels(r), led.rows()[r].support(0.5).next().unwrap()))
            .collect();
        assert_eq!(got[0], (vec!["U".to_string(), "U".to_string()], 0));
        assert_eq!(got[3], (vec!["D".to_string(), "D".to_string()], 3));
    }

    #[test]
    fn gol_all_dead_stays_dead() {
        let gol = gen_builtin(Builtin::GolNeighborhood).unwrap();
        assert_eq!(gol.domain().size(), 512);
        assert_eq!(gol.n_inputs(), 9);
        assert_eq!(gol.row(&[0; 9]).probabilities(), &[1.0, 0.0]);
    }

    #[test]
    fn table1_last_row() {
        let t = gen_builtin(Builtin::Table1).unwrap();
        assert_eq!(t.row(&[1, 1, 1]).probabilities(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn majority3_truth_table() {
        let m = gen_builtin(Builtin::Majority(3)).unwrap();
        let ones: Vec<usize> = m
            .rows()
            .iter()
            .map(|d| d.support(0.5).next().unwrap())
            .collect();
        assert_eq!(ones, vec![0, 0, 0, 1, 0, 1, 1, 1]);
    }
}
