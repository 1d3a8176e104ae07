//! Single-qubit Pauli matrices and N-qubit Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    /// Draw order of the sampler and base-4 digit order of enumerations.
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Entries `σ[row][col]` in the computational basis.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A word over {I, X, Y, Z}; letter `j` acts on site `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self(letters)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// String with `p` on `site` and identity elsewhere.
    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.0[site] = p;
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        self.0.iter().copied()
    }

    /// Base-4 ordinal with site 0 as the most significant digit.
    pub fn ordinal(&self) -> usize {
        self.0.iter().fold(0, |acc, p| acc * 4 + p.index())
    }

    pub fn from_ordinal(n: usize, mut ordinal: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for slot in letters.iter_mut().rev() {
            *slot = Pauli::ALL[ordinal % 4];
            ordinal /= 4;
        }
        Self(letters)
    }

    /// Counts of (I, X, Y, Z) letters.
    pub fn letter_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for p in &self.0 {
            counts[p.index()] += 1;
        }
        counts
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }
}

impl From<Vec<Pauli>> for PauliString {
    fn from(v: Vec<Pauli>) -> Self {
        Self(v)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Format(format!("invalid Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_mul(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn paulis_are_hermitian_involutions() {
        for p in Pauli::ALL {
            let m = p.matrix();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m[i][j], m[j][i].conj());
                }
            }
            assert_eq!(mat_mul(m, m), Pauli::I.matrix());
            let trace = m[0][0] + m[1][1];
            let expected = if p == Pauli::I { 2.0 } else { 0.0 };
            assert_eq!(trace, C64::new(expected, 0.0));
        }
    }

    #[test]
    fn y_equals_i_x_z() {
        let xz = mat_mul(Pauli::X.matrix(), Pauli::Z.matrix());
        let y = Pauli::Y.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(y[i][j], C64::new(0.0, 1.0) * xz[i][j]);
            }
        }
    }

    #[test]
    fn ordinal_places_site_zero_most_significant() {
        let s: PauliString = "XI".parse().unwrap();
        assert_eq!(s.ordinal(), 4);
        let s: PauliString = "IZ".parse().unwrap();
        assert_eq!(s.ordinal(), 3);
    }

    #[test]
    fn rejects_bad_letters() {
        assert!("IXQ".parse::<PauliString>().is_err());
    }

    proptest! {
        #[test]
        fn ordinal_round_trip(n in 1usize..12, raw in any::<u64>()) {
            let ordinal = (raw as usize) % 4usize.pow(n as u32);
            let s = PauliString::from_ordinal(n, ordinal);
            prop_assert_eq!(s.ordinal(), ordinal);
            prop_assert_eq!(s.to_string().parse::<PauliString>().unwrap(), s);
        }
    }
}
