//! Two-atom operator basis used by the equations of motion.
//!
//! The nine canonical operators are the ones whose equations are written out
//! explicitly. The six adjoints of the non-Hermitian ones complete a basis of
//! the traceless two-qubit operators, which keeps every equation complex-linear.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Lower1,
    Z1,
    Lower2,
    Z2,
    Z1Lower2,
    Lower1Z2,
    Raise1Lower2,
    Lower1Lower2,
    Z1Z2,
    Raise1,
    Raise2,
    Z1Raise2,
    Raise1Z2,
    Lower1Raise2,
    Raise1Raise2,
}

/// Number of operators in the extended basis.
pub const BASIS_SIZE: usize = 15;
/// Number of canonical operators.
pub const CANONICAL_SIZE: usize = 9;

impl Op {
    pub const CANONICAL: [Op; CANONICAL_SIZE] = [
        Op::Lower1,
        Op::Z1,
        Op::Lower2,
        Op::Z2,
        Op::Z1Lower2,
        Op::Lower1Z2,
        Op::Raise1Lower2,
        Op::Lower1Lower2,
        Op::Z1Z2,
    ];

    pub const ALL: [Op; BASIS_SIZE] = [
        Op::Lower1,
        Op::Z1,
        Op::Lower2,
        Op::Z2,
        Op::Z1Lower2,
        Op::Lower1Z2,
        Op::Raise1Lower2,
        Op::Lower1Lower2,
        Op::Z1Z2,
        Op::Raise1,
        Op::Raise2,
        Op::Z1Raise2,
        Op::Raise1Z2,
        Op::Lower1Raise2,
        Op::Raise1Raise2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Op> {
        Op::ALL.get(i).copied()
    }

    pub fn is_canonical(self) -> bool {
        self.index() < CANONICAL_SIZE
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, Op::Z1 | Op::Z2 | Op::Z1Z2)
    }

    pub fn adjoint(self) -> Op {
        match self {
            Op::Lower1 => Op::Raise1,
            Op::Raise1 => Op::Lower1,
            Op::Lower2 => Op::Raise2,
            Op::Raise2 => Op::Lower2,
            Op::Z1Lower2 => Op::Z1Raise2,
            Op::Z1Raise2 => Op::Z1Lower2,
            Op::Lower1Z2 => Op::Raise1Z2,
            Op::Raise1Z2 => Op::Lower1Z2,
            Op::Raise1Lower2 => Op::Lower1Raise2,
            Op::Lower1Raise2 => Op::Raise1Lower2,
            Op::Lower1Lower2 => Op::Raise1Raise2,
            Op::Raise1Raise2 => Op::Lower1Lower2,
            Op::Z1 | Op::Z2 | Op::Z1Z2 => self,
        }
    }

    /// Single-site factors, each one of '1', '-', '+', 'z'.
    pub fn factors(self) -> (char, char) {
        match self {
            Op::Lower1 => ('-', '1'),
            Op::Raise1 => ('+', '1'),
            Op::Z1 => ('z', '1'),
            Op::Lower2 => ('1', '-'),
            Op::Raise2 => ('1', '+'),
            Op::Z2 => ('1', 'z'),
            Op::Z1Lower2 => ('z', '-'),
            Op::Z1Raise2 => ('z', '+'),
            Op::Lower1Z2 => ('-', 'z'),
            Op::Raise1Z2 => ('+', 'z'),
            Op::Raise1Lower2 => ('+', '-'),
            Op::Lower1Raise2 => ('-', '+'),
            Op::Lower1Lower2 => ('-', '-'),
            Op::Raise1Raise2 => ('+', '+'),
            Op::Z1Z2 => ('z', 'z'),
        }
    }

    /// Net number of excitations the operator adds to the atoms.
    pub fn excitation_change(self) -> i32 {
        let site = |c: char| match c {
            '+' => 1,
            '-' => -1,
            _ => 0,
        };
        let (a, b) = self.factors();
        site(a) + site(b)
    }

    /// Excitations the operator adds to atom 1 alone. Sets how the operator
    /// picks up the phase e^{iΔt} between the interaction picture and the
    /// carrier frame.
    pub fn detuned_weight(self) -> i32 {
        match self.factors().0 {
            '+' => 1,
            '-' => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.factors();
        let mut parts = Vec::new();
        if a != '1' {
            parts.push(format!("σ{a}⁽¹⁾"));
        }
        if b != '1' {
            parts.push(format!("σ{b}⁽²⁾"));
        }
        write!(f, "{}", parts.join(""))
    }
}
