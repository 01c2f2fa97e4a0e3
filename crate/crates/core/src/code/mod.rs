//! Linear codes given by a parity-check matrix.

mod locality;
mod repair;

pub use locality::{
    verify_locality, LocalityCertificate, LocalityOutcome, LocalityPart, LocalityProfile, LocalityViolation, Witness,
};
pub use repair::{repair, ErasurePattern, RepairMethod, RepairOutcome, RepairedSymbol, Repairer};

use itertools::Itertools;
use thiserror::Error;

use crate::field::FieldSpec;
use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("parity-check matrix has full column rank; the code is trivial")]
    TrivialCode,
    #[error("the code has no nonzero codeword on the selected coordinates")]
    ZeroCode,
    #[error("expected a vector of length {expected}, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("coordinate set is empty")]
    EmptySet,
    #[error("invalid locality profile: {0}")]
    InvalidProfile(String),
    #[error("invalid erasure pattern: {0}")]
    InvalidPattern(String),
    #[error("erasures at {0:?} cannot be resolved from the surviving symbols")]
    Underdetermined(Vec<usize>),
    #[error("surviving symbols are not consistent with any codeword")]
    Inconsistent,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An `[n, k]` linear code over GF(q). `H` is kept exactly as supplied; `G`
/// is a basis of its null space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    h: Matrix,
    g: Matrix,
}

impl LinearCode {
    pub fn from_parity_check(h: Matrix) -> Result<Self, CodeError> {
        let n = h.cols();
        if n == 0 {
            return Err(CodeError::EmptySet);
        }
        let g = h.null_space();
        if g.rows() == 0 {
            return Err(CodeError::TrivialCode);
        }
        Ok(LinearCode { n, k: g.rows(), h, g })
    }

    /// The code spanned by the rows of `g`.
    pub fn from_generator(g: &Matrix) -> Result<Self, CodeError> {
        if g.cols() == 0 {
            return Err(CodeError::EmptySet);
        }
        if g.rank() == 0 {
            return Err(CodeError::ZeroCode);
        }
        LinearCode::from_parity_check(g.null_space())
    }

    pub fn field(&self) -> FieldSpec {
        self.h.field()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.h
    }

    pub fn generator(&self) -> &Matrix {
        &self.g
    }

    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>, CodeError> {
        if message.len() != self.k {
            return Err(CodeError::WrongLength { expected: self.k, actual: message.len() });
        }
        Ok(self.g.vec_mul(message)?)
    }

    pub fn syndrome(&self, word: &[u32]) -> Result<Vec<u32>, CodeError> {
        if word.len() != self.n {
            return Err(CodeError::WrongLength { expected: self.n, actual: word.len() });
        }
        Ok(self.h.mul_vec(word)?)
    }

    pub fn is_codeword(&self, word: &[u32]) -> bool {
        self.syndrome(word).is_ok_and(|s| s.iter().all(|&v| v == 0))
    }

    /// Exact minimum distance: the smallest `w` such that some `w` columns
    /// of `H` are dependent.
    pub fn min_distance(&self) -> usize {
        self.min_distance_witness().len()
    }

    /// The lexicographically first smallest dependent column set of `H`.
    /// Erasing exactly these coordinates is unrecoverable.
    pub fn min_distance_witness(&self) -> Vec<usize> {
        for w in 1..=self.n {
            if let Some(set) = self.first_dependent(w) {
                return set;
            }
        }
        unreachable!("k >= 1 makes the full column set dependent")
    }

    /// True iff no `t - 1` or fewer columns of `H` are dependent.
    pub fn has_min_distance_at_least(&self, t: usize) -> bool {
        (1..t.min(self.n + 1)).all(|w| self.first_dependent(w).is_none()) && t <= self.n - self.k + 1
    }

    fn first_dependent(&self, w: usize) -> Option<Vec<usize>> {
        (0..self.n).combinations(w).find(|c| self.h.rank_of_columns(c) < w)
    }

    /// The restriction `{x|_S : x ∈ C}`, coordinates renumbered in the order
    /// of `s`.
    pub fn puncture_to(&self, s: &[usize]) -> Result<LinearCode, CodeError> {
        if s.is_empty() {
            return Err(CodeError::EmptySet);
        }
        let gs = self.g.select_columns(s)?;
        LinearCode::from_generator(&gs)
    }
}
