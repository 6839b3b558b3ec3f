use serde::{Deserialize, Serialize};

use super::maps::{fast_step, slow_step};
use super::point::SimplexPoint;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fast digits `(b_0, b_1, ...)`. `terminated` marks an orbit that stopped
/// on a point with `x_n = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DigitSequence {
    pub digits: Vec<u64>,
    pub terminated: bool,
}

impl DigitSequence {
    pub fn new(digits: Vec<u64>) -> Self {
        Self {
            digits,
            terminated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Slow digits, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("bit {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl TryFrom<Vec<u8>> for BitSequence {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BitSequence> for Vec<u8> {
    fn from(b: BitSequence) -> Self {
        b.bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Fast,
    Slow,
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Flavor::Fast),
            "slow" => Ok(Flavor::Slow),
            other => Err(Error::Parse(format!("unknown flavor {other:?}"))),
        }
    }
}

/// A finite orbit. `points[0]` is the starting point and `points[k + 1]` is
/// the image after the `k`-th symbol, so `points.len() == symbols.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit<T> {
    pub flavor: Flavor,
    pub symbols: Vec<u64>,
    pub points: Vec<SimplexPoint<T>>,
    pub terminated: bool,
}

impl<T> Orbit<T> {
    pub fn digits(&self) -> DigitSequence {
        DigitSequence {
            digits: self.symbols.clone(),
            terminated: self.terminated,
        }
    }

    pub fn bits(&self) -> BitSequence {
        BitSequence {
            bits: self.symbols.iter().map(|&s| s as u8).collect(),
        }
    }
}

/// Iterates up to `steps` times. A step error (`x_n = 0`, `x_1 = 0`, or a
/// digit beyond 64 bits) ends the orbit with `terminated = true`.
pub fn orbit<T: Scalar>(x: &SimplexPoint<T>, steps: usize, flavor: Flavor) -> Orbit<T> {
    let mut symbols = Vec::with_capacity(steps);
    let mut points = Vec::with_capacity(steps + 1);
    points.push(x.clone());
    let mut terminated = false;
    let mut cur = x.clone();
    for _ in 0..steps {
        let step = match flavor {
            Flavor::Fast => fast_step(&cur),
            Flavor::Slow => slow_step(&cur).map(|(p, i)| (p, u64::from(i))),
        };
        match step {
            Ok((next, s)) => {
                symbols.push(s);
                points.push(next.clone());
                cur = next;
            }
            Err(_) => {
                terminated = true;
                break;
            }
        }
    }
    Orbit {
        flavor,
        symbols,
        points,
        terminated,
    }
}

/// Fast digits only, without keeping the iterates.
pub fn fast_digits<T: Scalar>(x: &SimplexPoint<T>, steps: usize) -> DigitSequence {
    let mut digits = Vec::with_capacity(steps);
    let mut cur = x.clone();
    for _ in 0..steps {
        match fast_step(&cur) {
            Ok((next, b)) => {
                digits.push(b);
                cur = next;
            }
            Err(_) => {
                return DigitSequence {
                    digits,
                    terminated: true,
                }
            }
        }
    }
    DigitSequence::new(digits)
}

/// Each maximal run of `r` ones followed by a zero becomes the fast digit
/// `r` (since `T = t_0 o t_1^b`).
pub fn slow_to_fast(bits: &BitSequence) -> Result<DigitSequence> {
    let mut digits = Vec::new();
    let mut run = 0u64;
    for &b in bits.bits() {
        if b == 1 {
            run += 1;
        } else {
            digits.push(run);
            run = 0;
        }
    }
    if run > 0 {
        return Err(Error::IncompleteBlock);
    }
    Ok(DigitSequence::new(digits))
}

/// Inverse of [`slow_to_fast`]: digit `b` becomes `1^b 0`.
pub fn fast_to_slow(digits: &DigitSequence) -> BitSequence {
    let mut bits = Vec::new();
    for &b in &digits.digits {
        bits.extend(std::iter::repeat_n(1u8, b as usize));
        bits.push(0);
    }
    BitSequence { bits }
}
