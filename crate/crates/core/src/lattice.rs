//! Braid-group and parity actions on exceptional sequences in the K-lattice, and
//! Picard–Lefschetz reflections on the vanishing lattice.
//!
//! Vectors are integer coordinates in the standard exceptional basis `E_1, …, E_μ̃`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chain::ChainDescriptor;
use crate::error::{Error, Result};
use crate::forms::{euler_matrix_int, intersection_matrix_int, picard_lefschetz_sign};
use crate::matrix::IntMatrix;

pub type Vector = Vec<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

/// A generator `b_i`, `b_i^{-1}` or `p_i` (1-based position).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Braid { i: usize, inverse: bool },
    Parity(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Braid { i, inverse: false } => write!(f, "b{i}"),
            Generator::Braid { i, inverse: true } => write!(f, "b{i}^-1"),
            Generator::Parity(i) => write!(f, "p{i}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedWord(s.to_string());
        let (kind, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let (digits, inverse) = match rest.strip_suffix("^-1") {
            Some(d) => (d, true),
            None => (rest, false),
        };
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let i: usize = digits.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match (kind, inverse) {
            ("b", _) => Ok(Generator::Braid { i, inverse }),
            // parity is an involution, so p_i^{-1} = p_i
            ("p", _) => Ok(Generator::Parity(i)),
            _ => Err(bad()),
        }
    }
}

/// A word in the generators, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BraidWord(pub Vec<Generator>);

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(Generator::from_str)
            .collect::<Result<Vec<_>>>()
            .map(BraidWord)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn checked_axpy(y: &[i128], a: i128, x: &[i128]) -> Result<Vector> {
    y.iter()
        .zip(x)
        .map(|(&yi, &xi)| {
            a.checked_mul(xi)
                .and_then(|p| yi.checked_sub(p))
                .ok_or(Error::Overflow("lattice update"))
        })
        .collect()
}

/// Ordered list of K-classes paired by a fixed Euler matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExceptionalSequence {
    vectors: Vec<Vector>,
    form: IntMatrix,
}

impl ExceptionalSequence {
    /// The standard basis `(e_1, …, e_μ̃)` with `χ^{(n)}`.
    pub fn standard(c: &ChainDescriptor) -> Result<Self> {
        Ok(Self::standard_with_form(euler_matrix_int(c)?))
    }

    pub fn standard_with_form(form: IntMatrix) -> Self {
        let mu = form.size();
        let vectors = (0..mu)
            .map(|i| (0..mu).map(|j| i128::from(i == j)).collect())
            .collect();
        ExceptionalSequence { vectors, form }
    }

    pub fn from_vectors(vectors: Vec<Vector>, form: IntMatrix) -> Result<Self> {
        let mu = form.size();
        if vectors.len() != mu || vectors.iter().any(|v| v.len() != mu) {
            return Err(Error::InvalidArgument(format!(
                "expected {mu} vectors of length {mu}"
            )));
        }
        Ok(ExceptionalSequence { vectors, form })
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `χ(u, v) = uᵀ χ v`.
    pub fn pairing(&self, u: &[i128], v: &[i128]) -> Result<i128> {
        self.form.pair(u, v)
    }

    /// `G_{ij} = χ(v_i, v_j)`.
    pub fn gram(&self) -> Result<IntMatrix> {
        let mu = self.len();
        let mut g = IntMatrix::zeros(mu);
        for i in 0..mu {
            for j in 0..mu {
                g.set(i, j, self.pairing(&self.vectors[i], &self.vectors[j])?);
            }
        }
        Ok(g)
    }

    /// Numerically exceptional: the Gram matrix is upper unitriangular.
    pub fn is_exceptional(&self) -> Result<bool> {
        Ok(self.gram()?.is_upper_unitriangular())
    }

    /// Matrix whose rows are the vectors of the sequence.
    pub fn coordinate_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.vectors)
    }

    /// Mutation at positions `(i, i+1)`, 1-based.
    pub fn mutate(&self, i: usize, direction: Direction) -> Result<Self> {
        let mu = self.len();
        if i == 0 || i >= mu {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: mu.saturating_sub(1),
            });
        }
        let (x, y) = (&self.vectors[i - 1], &self.vectors[i]);
        let chi = self.pairing(x, y)?;
        let (first, second) = match direction {
            Direction::Right => (y.clone(), checked_axpy(x, chi, y)?),
            Direction::Left => (checked_axpy(y, chi, x)?, x.clone()),
        };
        let mut out = self.clone();
        out.vectors[i - 1] = first;
        out.vectors[i] = second;
        Ok(out)
    }

    /// Negates the `i`-th vector, 1-based.
    pub fn parity(&self, i: usize) -> Result<Self> {
        let mu = self.len();
        if i == 0 || i > mu {
            return Err(Error::IndexOutOfRange { index: i, len: mu });
        }
        let mut out = self.clone();
        for x in &mut out.vectors[i - 1] {
            *x = -*x;
        }
        Ok(out)
    }

    pub fn apply_generator(&self, g: Generator) -> Result<Self> {
        match g {
            Generator::Braid { i, inverse: false } => self.mutate(i, Direction::Right),
            Generator::Braid { i, inverse: true } => self.mutate(i, Direction::Left),
            Generator::Parity(i) => self.parity(i),
        }
    }
}

/// Applies `word` to `seq`, leftmost generator first.
pub fn braid_word_apply(seq: &ExceptionalSequence, word: &BraidWord) -> Result<ExceptionalSequence> {
    word.0
        .iter()
        .try_fold(seq.clone(), |s, &g| s.apply_generator(g))
}

/// `Mᵀ χ M = χ`, i.e. `χ(Mu, Mv) = χ(u, v)` for all `u, v`.
pub fn is_isometry(form: &IntMatrix, m: &IntMatrix) -> Result<bool> {
    Ok(m.transpose().mul(form)?.mul(m)? == *form)
}

/// Bounded breadth-first search for a word of braid generators (and parities)
/// turning `start` into a sequence with Gram matrix `target`. Exploration only:
/// `None` says nothing about existence beyond the bound.
pub fn find_word_to_gram(
    start: &ExceptionalSequence,
    target: &IntMatrix,
    max_len: usize,
    max_nodes: usize,
    with_parity: bool,
) -> Result<Option<BraidWord>> {
    let mu = start.len();
    let mut gens = Vec::new();
    for i in 1..mu {
        gens.push(Generator::Braid { i, inverse: false });
        gens.push(Generator::Braid { i, inverse: true });
    }
    if with_parity {
        gens.extend((1..=mu).map(Generator::Parity));
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.vectors.clone());
    queue.push_back((start.clone(), Vec::new()));
    while let Some((seq, word)) = queue.pop_front() {
        if seq.gram()? == *target {
            return Ok(Some(BraidWord(word)));
        }
        if word.len() >= max_len {
            continue;
        }
        for &g in &gens {
            let next = seq.apply_generator(g)?;
            if seen.len() >= max_nodes {
                return Ok(None);
            }
            if seen.insert(next.vectors.clone()) {
                let mut w = word.clone();
                w.push(g);
                queue.push_back((next, w));
            }
        }
    }
    Ok(None)
}

/// Vanishing-cycle lattice with its intersection form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingLattice {
    basis: Vec<Vector>,
    iform: IntMatrix,
    n: usize,
}

impl VanishingLattice {
    pub fn new(c: &ChainDescriptor) -> Result<Self> {
        let iform = intersection_matrix_int(c)?;
        let mu = iform.size();
        let basis = (0..mu)
            .map(|i| (0..mu).map(|j| i128::from(i == j)).collect())
            .collect();
        Ok(VanishingLattice {
            basis,
            iform,
            n: c.n(),
        })
    }

    pub fn with_basis(&self, basis: Vec<Vector>) -> Self {
        VanishingLattice {
            basis,
            iform: self.iform.clone(),
            n: self.n,
        }
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn iform(&self) -> &IntMatrix {
        &self.iform
    }

    /// `(-1)^{(n-1)(n-2)/2}`.
    pub fn sign(&self) -> i128 {
        picard_lefschetz_sign(self.n)
    }

    pub fn intersection(&self, u: &[i128], v: &[i128]) -> Result<i128> {
        self.iform.pair(u, v)
    }

    /// `h_c(L) = L - s·I(L, c)·c`; with `inverse`, `h_c^{-1}(L) = L - s·I(c, L)·c`.
    pub fn picard_lefschetz(&self, center: &[i128], target: &[i128], inverse: bool) -> Result<Vector> {
        let i = if inverse {
            self.intersection(center, target)?
        } else {
            self.intersection(target, center)?
        };
        let coeff = self
            .sign()
            .checked_mul(i)
            .ok_or(Error::Overflow("Picard-Lefschetz coefficient"))?;
        checked_axpy(target, coeff, center)
    }

    /// Hurwitz move on the basis: right is `(L_{i+1}, h_{L_{i+1}}(L_i))`, left is
    /// `(h^{-1}_{L_i}(L_{i+1}), L_i)`.
    pub fn braid(&self, i: usize, direction: Direction) -> Result<Self> {
        let mu = self.basis.len();
        if i == 0 || i >= mu {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: mu.saturating_sub(1),
            });
        }
        let (x, y) = (&self.basis[i - 1], &self.basis[i]);
        let (first, second) = match direction {
            Direction::Right => (y.clone(), self.picard_lefschetz(y, x, false)?),
            Direction::Left => (self.picard_lefschetz(x, y, true)?, x.clone()),
        };
        let mut basis = self.basis.clone();
        basis[i - 1] = first;
        basis[i] = second;
        Ok(self.with_basis(basis))
    }
}
