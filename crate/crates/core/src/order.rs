//! Order parameters `(l, e, q, k)` and the parity case driving all case dispatch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, prime_power};
use crate::field::{FieldSpec, DEFAULT_Q_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("l = {0} is not prime")]
    NotPrime(u32),
    #[error("l = {0} is too small, need an odd prime >= 3")]
    LTooSmall(u32),
    #[error("e = {e} does not divide q - 1 = {}", .q - 1)]
    DoesNotDivide { e: u32, q: u32 },
    #[error("bound {0} exceeds the global q bound {1}")]
    BoundExceeded(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "2l2")]
    TwoL2,
}

impl Variant {
    pub fn order(self, l: u32) -> u32 {
        match self {
            Variant::L2 => l * l,
            Variant::TwoL2 => 2 * l * l,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::L2 => "l2",
            Variant::TwoL2 => "2l2",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Variant::L2),
            "2l2" => Ok(Variant::TwoL2),
            other => Err(format!("unknown variant `{other}`, expected l2 or 2l2")),
        }
    }
}

/// `EvenOrChar2` when `2 | k` or `q = 2^r`, `Odd` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityCase {
    #[serde(rename = "even_or_char2")]
    EvenOrChar2,
    #[serde(rename = "odd")]
    Odd,
}

impl fmt::Display for ParityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityCase::EvenOrChar2 => "even_or_char2",
            ParityCase::Odd => "odd",
        })
    }
}

impl FromStr for ParityCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "even" | "even_or_char2" => Ok(ParityCase::EvenOrChar2),
            "odd" => Ok(ParityCase::Odd),
            other => Err(format!("unknown parity `{other}`, expected even or odd")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderSpec {
    pub l: u32,
    pub variant: Variant,
    pub e: u32,
    pub p: u32,
    pub q: u32,
    pub k: u32,
    pub parity_case: ParityCase,
}

fn parity_for(p: u64, k: u64) -> ParityCase {
    if k.is_multiple_of(2) || p == 2 {
        ParityCase::EvenOrChar2
    } else {
        ParityCase::Odd
    }
}

fn check_l(l: u32) -> Result<(), OrderError> {
    if !is_prime(l as u64) {
        return Err(OrderError::NotPrime(l));
    }
    if l < 3 {
        return Err(OrderError::LTooSmall(l));
    }
    Ok(())
}

pub fn make_order_spec(l: u32, variant: Variant, f: &FieldSpec) -> Result<OrderSpec, OrderError> {
    check_l(l)?;
    let e = variant.order(l);
    if !(f.q - 1).is_multiple_of(e) {
        return Err(OrderError::DoesNotDivide { e, q: f.q });
    }
    let k = (f.q - 1) / e;
    Ok(OrderSpec {
        l,
        variant,
        e,
        p: f.p,
        q: f.q,
        k,
        parity_case: parity_for(f.p as u64, k as u64),
    })
}

impl OrderSpec {
    /// `e / 2` (that is `l²`) for the `2l²` variant.
    pub fn half(&self) -> Option<u32> {
        match self.variant {
            Variant::L2 => None,
            Variant::TwoL2 => Some(self.e / 2),
        }
    }

    /// The row `a` with `n_a = 1`: `ind(-1) mod e`.
    pub fn deficient_row(&self) -> u32 {
        match self.parity_case {
            ParityCase::EvenOrChar2 => 0,
            ParityCase::Odd => self.e / 2,
        }
    }

    /// `n_a` in the row-sum identity `Σ_b (a,b) = k - n_a`.
    pub fn n_a(&self, a: u32) -> u32 {
        u32::from(a == self.deficient_row())
    }

    /// The same order with the parity case overridden. Class structure depends on `q`
    /// only through the parity case, so this is how field-free partitions are built.
    pub fn with_parity(&self, parity_case: ParityCase) -> OrderSpec {
        OrderSpec { parity_case, ..*self }
    }

    /// A field-free spec for partition and transversal work.
    pub fn abstract_spec(l: u32, variant: Variant, parity_case: ParityCase) -> Result<OrderSpec, OrderError> {
        check_l(l)?;
        let parity_case = match variant {
            Variant::L2 => ParityCase::EvenOrChar2,
            Variant::TwoL2 => parity_case,
        };
        Ok(OrderSpec {
            l,
            variant,
            e: variant.order(l),
            p: 0,
            q: 0,
            k: 0,
            parity_case,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidField {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub k: u32,
    pub parity_case: ParityCase,
}

/// All prime powers `q <= bound` with `e | q - 1`, ascending.
pub fn enumerate_valid_q(l: u32, variant: Variant, bound: u64) -> Result<Vec<ValidField>, OrderError> {
    enumerate_valid_q_with_limit(l, variant, bound, DEFAULT_Q_BOUND)
}

pub fn enumerate_valid_q_with_limit(
    l: u32,
    variant: Variant,
    bound: u64,
    global_bound: u64,
) -> Result<Vec<ValidField>, OrderError> {
    check_l(l)?;
    if bound > global_bound {
        return Err(OrderError::BoundExceeded(bound, global_bound));
    }
    let e = variant.order(l) as u64;
    let mut out = Vec::new();
    let mut q = e + 1;
    while q <= bound {
        if let Some((p, r)) = prime_power(q) {
            let k = (q - 1) / e;
            out.push(ValidField {
                p: p as u32,
                r,
                q: q as u32,
                k: k as u32,
                parity_case: parity_for(p, k),
            });
        }
        q += e;
    }
    Ok(out)
}
