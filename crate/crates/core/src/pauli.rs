//! Pauli errors in binary symplectic form.
//!
//! Text form lists one non-identity qubit per token, e.g. `Z4 X7 Y10`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Which component of an error a decoding pass corrects.
///
/// Z errors are detected by X-type generators and X errors by Z-type ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ErrorType {
    X,
    Z,
}

/// An n-qubit Pauli operator up to phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliError {
    pub x_part: Vec<bool>,
    pub z_part: Vec<bool>,
}

impl PauliError {
    pub fn identity(n: usize) -> Self {
        Self {
            x_part: vec![false; n],
            z_part: vec![false; n],
        }
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        Self {
            x_part: paulis.iter().map(|p| p.has_x()).collect(),
            z_part: paulis.iter().map(|p| p.has_z()).collect(),
        }
    }

    /// Builds an error acting as `pauli` on each listed qubit.
    pub fn single_type(n: usize, pauli: Pauli, qubits: &[usize]) -> Self {
        let mut e = Self::identity(n);
        for &q in qubits {
            e.set(q, pauli);
        }
        e
    }

    pub fn len(&self) -> usize {
        self.x_part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_part.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_part[q], self.z_part[q])
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        self.x_part[q] = p.has_x();
        self.z_part[q] = p.has_z();
    }

    pub fn weight(&self) -> usize {
        self.x_part
            .iter()
            .zip(&self.z_part)
            .filter(|(x, z)| **x || **z)
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn part(&self, kind: ErrorType) -> &[bool] {
        match kind {
            ErrorType::X => &self.x_part,
            ErrorType::Z => &self.z_part,
        }
    }

    pub fn part_mut(&mut self, kind: ErrorType) -> &mut [bool] {
        match kind {
            ErrorType::X => &mut self.x_part,
            ErrorType::Z => &mut self.z_part,
        }
    }

    /// Product of two Paulis, ignoring phase.
    pub fn compose(&self, other: &PauliError) -> PauliError {
        assert_eq!(self.len(), other.len());
        PauliError {
            x_part: self
                .x_part
                .iter()
                .zip(&other.x_part)
                .map(|(a, b)| a ^ b)
                .collect(),
            z_part: self
                .z_part
                .iter()
                .zip(&other.z_part)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Symplectic inner product: true when the operators anticommute.
    pub fn anticommutes_with(&self, other: &PauliError) -> bool {
        let mut parity = false;
        for q in 0..self.len() {
            parity ^= (self.x_part[q] & other.z_part[q]) ^ (self.z_part[q] & other.x_part[q]);
        }
        parity
    }

    /// Parses the token format, checking every index against `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut e = Self::identity(n);
        for token in text.split_whitespace() {
            let mut chars = token.chars();
            let pauli = match chars.next() {
                Some('X') | Some('x') => Pauli::X,
                Some('Y') | Some('y') => Pauli::Y,
                Some('Z') | Some('z') => Pauli::Z,
                Some('I') | Some('i') => Pauli::I,
                _ => return Err(Error::Parse(format!("bad pauli token `{token}`"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in `{token}`")))?;
            if q >= n {
                return Err(Error::Parse(format!("qubit {q} out of range (n = {n})")));
            }
            if e.get(q) != Pauli::I {
                return Err(Error::Parse(format!("qubit {q} listed twice")));
            }
            e.set(q, pauli);
        }
        Ok(e)
    }
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in 0..self.len() {
            let p = self.get(q);
            if p == Pauli::I {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}
