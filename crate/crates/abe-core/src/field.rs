//! Arithmetic in GF(p) with p = 2^61 - 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

pub const P: u64 = (1 << 61) - 1;

/// Field element, always reduced into `[0, P)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn new(v: u64) -> Fe {
        Fe(reduce64(v))
    }

    /// Parses a canonical value; rejects anything `>= P`.
    pub fn from_canonical(v: u64) -> Option<Fe> {
        (v < P).then_some(Fe(v))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn to_be_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }

    pub fn pow(self, mut e: u64) -> Fe {
        let mut base = self;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Fe> {
        (!self.is_zero()).then(|| self.pow(P - 2))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..P))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..P))
    }
}

fn reduce64(v: u64) -> u64 {
    let r = (v & P) + (v >> 61);
    if r >= P {
        r - P
    } else {
        r
    }
}

fn reduce128(v: u128) -> u64 {
    // v < 2^122, so two folds bring it below 2^62.
    let lo = (v as u64) & P;
    let hi = (v >> 61) as u64;
    reduce64(lo + (hi & P) + (hi >> 61))
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        reduce_once(self.0 + rhs.0)
    }
}

fn reduce_once(v: u64) -> Fe {
    Fe(if v >= P { v - P } else { v })
}

impl Sub for Fe {
    type Output = Fe;
    fn sub(self, rhs: Fe) -> Fe {
        reduce_once(self.0 + P - rhs.0)
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        Fe::ZERO - self
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, rhs: Fe) -> Fe {
        Fe(reduce128(u128::from(self.0) * u128::from(rhs.0)))
    }
}

impl From<u64> for Fe {
    fn from(v: u64) -> Fe {
        Fe::new(v)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
