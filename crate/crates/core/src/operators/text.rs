//! Compact text form of operator specs, as used on the command line:
//! `pucci+:1:2`, `pucci-:1:2`, `sigma:2`, `quotient:3:1`, `mc`, `ma`, `slag`,
//! `linear:1,0;0,3[:b1,b2[:c]]`.

use std::fmt;
use std::str::FromStr;

use super::{Family, OperatorSpec};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

fn num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn int(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}")))
}

fn list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(num).collect()
}

impl FromStr for OperatorSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let arity = |k: usize| -> Result<()> {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{:?} expects {k} parameter(s) in {text:?}",
                    parts[0]
                )))
            }
        };
        let family = match parts[0] {
            "pucci+" | "pucci-" => {
                arity(2)?;
                let (lambda, big_lambda) = (num(parts[1])?, num(parts[2])?);
                if parts[0] == "pucci+" {
                    Family::PucciPlus { lambda, big_lambda }
                } else {
                    Family::PucciMinus { lambda, big_lambda }
                }
            }
            "sigma" => {
                arity(1)?;
                Family::SigmaK { k: int(parts[1])? }
            }
            "quotient" => {
                arity(2)?;
                Family::HessianQuotient {
                    k: int(parts[1])?,
                    l: int(parts[2])?,
                }
            }
            "mc" => {
                arity(0)?;
                Family::MeanCurvature
            }
            "ma" => {
                arity(0)?;
                Family::MongeAmpere
            }
            "slag" => {
                arity(0)?;
                Family::Lagrangian
            }
            "linear" => {
                if !(2..=4).contains(&parts.len()) {
                    return Err(Error::Parse(format!(
                        "linear expects linear:<rows>[:<b>[:<c>]], got {text:?}"
                    )));
                }
                let rows: Vec<Vec<f64>> = parts[1].split(';').map(list).collect::<Result<_>>()?;
                let a = SymMatrix::from_rows(&rows)?;
                let b = match parts.get(2) {
                    Some(s) => list(s)?,
                    None => vec![0.0; a.dim()],
                };
                let c = match parts.get(3) {
                    Some(s) => num(s)?,
                    None => 0.0,
                };
                Family::LinearConstant { a, b, c }
            }
            other => {
                return Err(Error::Parse(format!("unknown operator family {other:?}")));
            }
        };
        OperatorSpec::new(family)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::PucciPlus { lambda, big_lambda } => write!(f, "pucci+:{lambda}:{big_lambda}"),
            Family::PucciMinus { lambda, big_lambda } => write!(f, "pucci-:{lambda}:{big_lambda}"),
            Family::SigmaK { k } => write!(f, "sigma:{k}"),
            Family::HessianQuotient { k, l } => write!(f, "quotient:{k}:{l}"),
            Family::MeanCurvature => write!(f, "mc"),
            Family::MongeAmpere => write!(f, "ma"),
            Family::Lagrangian => write!(f, "slag"),
            Family::LinearConstant { a, b, c } => {
                let n = a.dim();
                let rows: Vec<String> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| a.get(i, j).to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                let drift: Vec<String> = b.iter().map(|v| v.to_string()).collect();
                write!(f, "linear:{}:{}:{c}", rows.join(";"), drift.join(","))
            }
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.shift.is_some() {
            write!(f, " (shifted, offset {})", self.offset)?;
        }
        Ok(())
    }
}
