//! Linear block codes with exact, enumeration-based analysis.
//!
//! Codes are stored as a canonical RREF basis, so two codes are equal as
//! codeword sets iff their `LinearCode` values are equal. All distance
//! queries enumerate codewords exhaustively under an explicit budget;
//! exceeding the budget is an error, never an approximation.

use crate::gf::{Fe, Field};
use crate::matlin::{self, MatGF, VecGF};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("the zero code has no spanning set with nonzero vectors")]
    ZeroCode,
    #[error("enumeration needs {needed} steps, budget allows {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("field has {available} usable evaluation points, {needed} required")]
    NotEnoughFieldElements { needed: usize, available: usize },
    #[error("evaluation points must be pairwise distinct")]
    RepeatedAlpha,
    #[error("evaluation points must be nonzero")]
    ZeroAlpha,
    #[error("generator needs rows <= cols, got {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
}

/// A linear [n, k] code, k >= 1, held as a canonical RREF generator basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    n: usize,
    basis: MatGF,
    pivots: Vec<usize>,
}

impl LinearCode {
    /// The span of the given vectors. Rejects an empty span (zero code).
    pub fn from_spanning(field: Field, vectors: &[VecGF]) -> Result<LinearCode, CodeError> {
        let n = vectors.first().map_or(0, |v| v.len());
        let mut m = MatGF::from_rows(field, vectors);
        let pivots = m.rref();
        let k = pivots.len();
        if k == 0 {
            return Err(CodeError::ZeroCode);
        }
        let keep: Vec<usize> = (0..k).collect();
        Ok(LinearCode { field, n, basis: m.rows_by(&keep), pivots })
    }

    /// The row space of a generator matrix (rows need not be independent).
    pub fn from_generator(g: &MatGF) -> Result<LinearCode, CodeError> {
        LinearCode::from_spanning(g.field(), &g.rows_vec())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical RREF generator, k x n.
    pub fn generator(&self) -> &MatGF {
        &self.basis
    }

    /// Membership by reduction against the RREF basis.
    pub fn contains(&self, v: &VecGF) -> bool {
        if v.len() != self.n || v.field() != self.field {
            return false;
        }
        let mut r = v.clone();
        for (row, &pc) in self.pivots.iter().enumerate() {
            let c = r.get(pc);
            if c.is_zero() {
                continue;
            }
            r = r.sub(&self.basis.row(row).scale(c));
        }
        r.is_zero()
    }

    /// Number of codewords as u128 (q^k).
    pub fn size(&self) -> u128 {
        matlin::space_size(self.field.q(), self.dim()).expect("code too large")
    }

    fn check_budget(&self, budget: u64) -> Result<(), CodeError> {
        let needed = self.size();
        if needed > budget as u128 {
            return Err(CodeError::BudgetExceeded { needed, budget });
        }
        Ok(())
    }

    /// All q^k codewords, message vectors enumerated lexicographically.
    /// The zero codeword comes first.
    pub fn codewords(&self, budget: u64) -> Result<impl Iterator<Item = VecGF> + '_, CodeError> {
        self.check_budget(budget)?;
        let iter = matlin::enumerate_vectors(self.field, self.dim())
            .map(move |msg| self.basis.vec_mul(&msg));
        Ok(iter)
    }

    /// Minimum Hamming weight over nonzero codewords.
    pub fn min_distance(&self, budget: u64) -> Result<usize, CodeError> {
        let mut d = self.n + 1;
        for c in self.codewords(budget)? {
            let w = c.weight();
            if w > 0 && w < d {
                d = w;
            }
        }
        debug_assert!(d <= self.n, "a nonzero code has a nonzero codeword");
        Ok(d)
    }

    /// Count of codewords at each weight 0..=n.
    pub fn weight_distribution(&self, budget: u64) -> Result<Vec<u64>, CodeError> {
        let mut dist = vec![0u64; self.n + 1];
        for c in self.codewords(budget)? {
            dist[c.weight()] += 1;
        }
        Ok(dist)
    }

    /// The dual code {u : u . c = 0 for all c}. Errors with ZeroCode when
    /// this code is the full space (the dual would be trivial).
    pub fn dual(&self) -> Result<LinearCode, CodeError> {
        if self.dim() == self.n {
            return Err(CodeError::ZeroCode);
        }
        let basis = matlin::nullspace_left(&self.basis.transpose());
        LinearCode::from_spanning(self.field, &basis)
    }

    /// Minimum distance of the dual. The full space has a trivial dual; its
    /// dual distance is defined as n+1 (no nontrivial parity check exists).
    pub fn dual_distance(&self, budget: u64) -> Result<usize, CodeError> {
        if self.dim() == self.n {
            return Ok(self.n + 1);
        }
        self.dual()?.min_distance(budget)
    }

    /// A codeword with value one at `target`, zero outside `allowed` and
    /// `target`, free coordinates inside `allowed`; None if no such codeword.
    pub fn codeword_with_pattern(&self, target: usize, allowed: &[usize]) -> Option<VecGF> {
        matlin::rowspace_pattern_solve(&self.basis, target, allowed)
    }
}

/// Vandermonde generator matrix: row i holds alpha_j^i for the given nonzero
/// pairwise-distinct evaluation points (defaults to 1, 2, ..., cols in
/// canonical order). Its row space is an MDS code with distance cols-rows+1,
/// and so is the row space of every bottom slice.
pub fn vandermonde_mds(
    field: Field,
    rows: usize,
    cols: usize,
    alphas: Option<&[Fe]>,
) -> Result<MatGF, CodeError> {
    if rows > cols {
        return Err(CodeError::InvalidShape { rows, cols });
    }
    let available = (field.q() - 1) as usize;
    if cols > available {
        return Err(CodeError::NotEnoughFieldElements { needed: cols, available });
    }
    let default: Vec<Fe>;
    let alphas = match alphas {
        Some(a) => a,
        None => {
            default = field.nonzero_elements().take(cols).collect();
            &default
        }
    };
    if alphas.len() != cols {
        return Err(CodeError::NotEnoughFieldElements { needed: cols, available: alphas.len() });
    }
    if alphas.iter().any(|a| a.is_zero()) {
        return Err(CodeError::ZeroAlpha);
    }
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            if alphas[i] == alphas[j] {
                return Err(CodeError::RepeatedAlpha);
            }
        }
    }
    let mut m = MatGF::zeros(field, rows, cols);
    for (j, &a) in alphas.iter().enumerate() {
        let mut p = Fe::ONE;
        for i in 0..rows {
            m.set(i, j, p);
            p = field.mul(p, a);
        }
    }
    Ok(m)
}

/// Nearest-codeword decoding restricted to radius `delta`. When delta is at
/// most (d-1)/2 the Hamming balls are disjoint, so the first codeword found
/// within the radius is the unique one; None means no codeword is that close.
pub fn bounded_distance_decode(
    code: &LinearCode,
    received: &VecGF,
    delta: usize,
    budget: u64,
) -> Result<Option<VecGF>, CodeError> {
    assert_eq!(received.len(), code.len(), "length mismatch");
    for c in code.codewords(budget)? {
        let dist = c
            .iter()
            .zip(received.iter())
            .filter(|(a, b)| a != b)
            .count();
        if dist <= delta {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Orthogonal-array property: for every r below the dual distance, every
/// r-tuple of values appears exactly q^(k-r) times in every r-subset of
/// coordinates, over all codewords. Returns false with no further detail if
/// any (r, subset, tuple) violates the count.
pub fn orthogonal_array_check(code: &LinearCode, budget: u64) -> Result<bool, CodeError> {
    use itertools::Itertools;
    let q = code.field().q() as u128;
    let dd = code.dual_distance(budget)?;
    let k = code.dim() as u32;
    let words: Vec<VecGF> = code.codewords(budget)?.collect();
    for r in 1..dd.min(code.len() + 1) {
        let expected = q.pow(k.saturating_sub(r as u32));
        // r < dd <= n+1 and r <= n here; r <= k follows since q^k counts all words.
        for subset in (0..code.len()).combinations(r) {
            let tuples = matlin::space_size(code.field().q(), r).unwrap();
            let mut counts = vec![0u128; tuples as usize];
            for w in &words {
                let idx = subset
                    .iter()
                    .fold(0u128, |acc, &i| acc * q + w.get(i).val() as u128);
                counts[idx as usize] += 1;
            }
            if counts.iter().any(|&c| c != expected) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
