//! Deterministic linear index codes: an n x N encoder matrix L over the
//! instance's field. The sender broadcasts x*L; receiver i must recover
//! x_{f(i)} from the broadcast and its side information.
//!
//! Receiver i can decode iff the column span C(L) contains a vector c with
//! c_{f(i)} = 1 and support inside X_i plus f(i); then u = c - e_{f(i)} and
//! any beta with beta * L^T = c give the decode rule
//! x_{f(i)} = (x*L) . beta - x . u.

use crate::gf::{Fe, Field};
use crate::icsi::IcsiInstance;
use crate::lincode::{CodeError, LinearCode};
use crate::matlin::{self, MatGF, VecGF};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IcError {
    #[error("encoder must have {expected} rows (one per message), got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("encoder field does not match instance field")]
    FieldMismatch,
    #[error("enumeration needs {needed} steps, budget allows {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("more than one message value is consistent with the received word")]
    Ambiguous,
    #[error("no message value is consistent with the received word")]
    DecodeFailure,
    #[error("side information value for message {0} missing")]
    MissingSideInfo(usize),
    #[error("fitting-matrix minimum rank needs m = n and f = identity")]
    FittingShape,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("cannot read code file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse code file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] crate::gf::FieldError),
    #[error("bad code file: {0}")]
    BadFile(String),
}

/// Per-receiver linear decode rule: x_{f(i)} = s . beta - x . u, where s is
/// the broadcast and u is supported inside the receiver's side information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeRecipe {
    pub receiver: usize,
    pub u: VecGF,
    pub beta: VecGF,
}

impl DecodeRecipe {
    /// Apply the rule given the broadcast and the receiver's side values.
    pub fn eval(&self, s: &VecGF, side: &BTreeMap<usize, Fe>) -> Result<Fe, IcError> {
        let f = s.field();
        let mut acc = s.dot(&self.beta);
        for j in self.u.support() {
            let xv = side.get(&j).ok_or(IcError::MissingSideInfo(j))?;
            acc = f.sub(acc, f.mul(self.u.get(j), *xv));
        }
        Ok(acc)
    }

    /// Apply the rule with the full message vector available (testing aid).
    pub fn eval_full(&self, s: &VecGF, x: &VecGF) -> Fe {
        let f = s.field();
        f.sub(s.dot(&self.beta), x.dot(&self.u))
    }
}

/// Validity diagnostics: one recipe per receiver, or None where none exists.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub per_receiver: Vec<Option<DecodeRecipe>>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.per_receiver.iter().all(Option::is_some)
    }

    /// 0-based indices of receivers that cannot decode.
    pub fn failing(&self) -> Vec<usize> {
        self.per_receiver
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.is_none().then_some(i))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct IndexCode {
    inst: IcsiInstance,
    l: MatGF,
    /// Column span of L; None when every column is zero.
    code: Option<LinearCode>,
}

impl IndexCode {
    pub fn new(inst: IcsiInstance, l: MatGF) -> Result<IndexCode, IcError> {
        if l.field() != inst.field() {
            return Err(IcError::FieldMismatch);
        }
        if l.rows() != inst.n() {
            return Err(IcError::DimensionMismatch { expected: inst.n(), got: l.rows() });
        }
        let cols: Vec<VecGF> = (0..l.cols()).map(|j| l.col(j)).collect();
        let code = LinearCode::from_spanning(l.field(), &cols).ok();
        Ok(IndexCode { inst, l, code })
    }

    pub fn instance(&self) -> &IcsiInstance {
        &self.inst
    }

    pub fn matrix(&self) -> &MatGF {
        &self.l
    }

    /// Broadcast length N.
    pub fn length(&self) -> usize {
        self.l.cols()
    }

    /// The column span C(L), if nonzero.
    pub fn code(&self) -> Option<&LinearCode> {
        self.code.as_ref()
    }

    pub fn encode(&self, x: &VecGF) -> Result<VecGF, IcError> {
        if x.field() != self.l.field() {
            return Err(IcError::FieldMismatch);
        }
        if x.len() != self.inst.n() {
            return Err(IcError::DimensionMismatch { expected: self.inst.n(), got: x.len() });
        }
        Ok(self.l.vec_mul(x))
    }

    /// The decode rule for receiver i, if one exists. Deterministic: the
    /// underlying solves set free variables to zero.
    pub fn decode_recipe(&self, i: usize) -> Option<DecodeRecipe> {
        let code = self.code.as_ref()?;
        let fi = self.inst.demand(i);
        let allowed: Vec<usize> = self.inst.side_info(i).iter().copied().collect();
        let c = code.codeword_with_pattern(fi, &allowed)?;
        let e = VecGF::unit(self.l.field(), self.inst.n(), fi);
        let u = c.sub(&e);
        let beta = matlin::solve_left(&self.l.transpose(), &c)
            .expect("pattern codeword lies in the row space of L^T");
        Some(DecodeRecipe { receiver: i, u, beta })
    }

    pub fn validity(&self) -> ValidityReport {
        ValidityReport {
            per_receiver: (0..self.inst.m()).map(|i| self.decode_recipe(i)).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validity().is_valid()
    }

    /// Independent validity route: the encoder must not collapse any vector
    /// that some receiver needs distinguished, i.e. z*L != 0 for every
    /// interference vector z. Enumerates q^{|free|+1} words per receiver.
    pub fn is_valid_weight_criterion(&self, budget: u64) -> Result<bool, IcError> {
        Ok(self.min_interference_weight(budget)? >= 1)
    }

    /// Minimum broadcast-weight over all interference vectors; a code
    /// corrects delta symbol errors iff this is at least 2*delta+1.
    /// Returns N+1 when the instance has no receivers.
    pub fn min_interference_weight(&self, budget: u64) -> Result<usize, IcError> {
        let q = self.inst.field().q();
        let mut min_w = self.length() + 1;
        for i in 0..self.inst.m() {
            let needed = matlin::space_size(q, self.inst.free_coords(i).len() + 1)
                .ok_or(IcError::BudgetExceeded { needed: u128::MAX, budget })?;
            if needed > budget as u128 {
                return Err(IcError::BudgetExceeded { needed, budget });
            }
            for z in self.inst.interference_vectors(i) {
                min_w = min_w.min(self.l.vec_mul(&z).weight());
                if min_w == 0 {
                    return Ok(0);
                }
            }
        }
        Ok(min_w)
    }

    /// True iff every receiver decodes correctly under any error pattern of
    /// weight at most delta added to the broadcast.
    pub fn is_delta_error_correcting(&self, delta: usize, budget: u64) -> Result<bool, IcError> {
        Ok(self.min_interference_weight(budget)? >= 2 * delta + 1)
    }

    /// Decode for receiver i from a corrupted broadcast y (at most delta
    /// symbol errors) by exhausting all messages consistent with the side
    /// values: the demanded value is the unique one within distance delta.
    pub fn decode_with_errors(
        &self,
        i: usize,
        y: &VecGF,
        side: &BTreeMap<usize, Fe>,
        delta: usize,
        budget: u64,
    ) -> Result<Fe, IcError> {
        let field = self.inst.field();
        let n = self.inst.n();
        let unknown: Vec<usize> = (0..n).filter(|j| !side.contains_key(j)).collect();
        for &j in self.inst.side_info(i) {
            if !side.contains_key(&j) {
                return Err(IcError::MissingSideInfo(j));
            }
        }
        let needed = matlin::space_size(field.q(), unknown.len())
            .ok_or(IcError::BudgetExceeded { needed: u128::MAX, budget })?;
        if needed > budget as u128 {
            return Err(IcError::BudgetExceeded { needed, budget });
        }
        let mut x = VecGF::zeros(field, n);
        for (&j, &v) in side {
            assert!(j < n, "side info index out of range");
            x.set(j, v);
        }
        let fi = self.inst.demand(i);
        let mut found: Option<Fe> = None;
        for assign in matlin::enumerate_vectors(field, unknown.len()) {
            for (slot, &j) in unknown.iter().enumerate() {
                x.set(j, assign.get(slot));
            }
            let s = self.l.vec_mul(&x);
            let dist = s.iter().zip(y.iter()).filter(|(a, b)| a != b).count();
            if dist <= delta {
                match found {
                    None => found = Some(x.get(fi)),
                    Some(v) if v == x.get(fi) => {}
                    Some(_) => return Err(IcError::Ambiguous),
                }
            }
        }
        found.ok_or(IcError::DecodeFailure)
    }
}

/// Minimum-rank result: the rank and an n x kappa witness encoder whose
/// columns are a basis of the minimizing span, plus the chosen rows.
#[derive(Debug, Clone)]
pub struct MinRankWitness {
    pub kappa: usize,
    pub l: MatGF,
    pub rows: Vec<VecGF>,
}

/// Reduce v against an echelon list of rows (each with a recorded pivot);
/// returns the reduced vector.
fn reduce_against(basis: &[(usize, VecGF)], v: &VecGF) -> VecGF {
    let mut r = v.clone();
    for (pivot, row) in basis {
        let c = r.get(*pivot);
        if !c.is_zero() {
            // row has a one at its pivot.
            r = r.sub(&row.scale(c));
        }
    }
    r
}

fn first_nonzero(v: &VecGF) -> Option<usize> {
    (0..v.len()).find(|&i| !v.get(i).is_zero())
}

/// Depth-first search over all side-information-conforming row choices, in
/// lexicographic order, keeping the first leaf of each new best rank. The
/// rank-based prune is exact: ranks never decrease along a branch, so a
/// branch whose partial rank already matches the best cannot improve on it
/// and cannot hold an earlier witness. `admissible` must be monotone: once a
/// span fails it, every superspace fails it (used for restricted searches).
pub(crate) fn min_rank_dfs(
    inst: &IcsiInstance,
    budget: u64,
    admissible: &mut dyn FnMut(&[(usize, VecGF)]) -> bool,
) -> Result<Option<MinRankWitness>, IcError> {
    let needed = inst.choice_space().ok_or(IcError::BudgetExceeded {
        needed: u128::MAX,
        budget,
    })?;
    if needed > budget as u128 {
        return Err(IcError::BudgetExceeded { needed, budget });
    }
    let field = inst.field();
    let n = inst.n();
    struct Ctx<'a> {
        inst: &'a IcsiInstance,
        field: Field,
        n: usize,
        best: usize,
        best_rows: Option<Vec<VecGF>>,
        admissible: &'a mut dyn FnMut(&[(usize, VecGF)]) -> bool,
    }
    fn rec(ctx: &mut Ctx, i: usize, basis: &mut Vec<(usize, VecGF)>, chosen: &mut Vec<VecGF>) {
        if basis.len() >= ctx.best || !(ctx.admissible)(basis) {
            return;
        }
        if i == ctx.inst.m() {
            ctx.best = basis.len();
            ctx.best_rows = Some(chosen.clone());
            return;
        }
        let field = ctx.field;
        let fi = ctx.inst.demand(i);
        let positions: Vec<usize> = ctx.inst.side_info(i).iter().copied().collect();
        let total = matlin::space_size(field.q(), positions.len()).expect("budget-checked");
        for idx in 0..total {
            let uvec = matlin::index_to_vector(field, positions.len(), idx);
            let mut row = VecGF::zeros(field, ctx.n);
            row.set(fi, Fe::ONE);
            for (slot, &pos) in positions.iter().enumerate() {
                row.set(pos, uvec.get(slot));
            }
            let reduced = reduce_against(basis, &row);
            chosen.push(row);
            if reduced.is_zero() {
                rec(ctx, i + 1, basis, chosen);
            } else {
                let pivot = first_nonzero(&reduced).expect("nonzero");
                let inv = field.inv(reduced.get(pivot)).expect("nonzero pivot");
                basis.push((pivot, reduced.scale(inv)));
                rec(ctx, i + 1, basis, chosen);
                basis.pop();
            }
            chosen.pop();
        }
    }
    let mut ctx = Ctx {
        inst,
        field,
        n,
        best: n + 1,
        best_rows: None,
        admissible,
    };
    rec(&mut ctx, 0, &mut Vec::new(), &mut Vec::new());
    let Some(rows) = ctx.best_rows else {
        return Ok(None);
    };
    // Witness columns: canonical RREF basis of the chosen rows.
    let mut m = MatGF::from_rows(field, &rows);
    let pivots = m.rref();
    let keep: Vec<usize> = (0..pivots.len()).collect();
    let l = m.rows_by(&keep).transpose();
    debug_assert_eq!(l.cols(), ctx.best);
    Ok(Some(MinRankWitness { kappa: ctx.best, l, rows }))
}

/// Shortest valid broadcast length: the minimum, over all conforming row
/// choices u^(i) (support inside X_i), of rank{u^(i) + e_{f(i)}}. The budget
/// bounds the a-priori size of the joint choice space, product of q^{|X_i|}.
pub fn kappa_q(inst: &IcsiInstance, budget: u64) -> Result<MinRankWitness, IcError> {
    let mut all = |_: &[(usize, VecGF)]| true;
    Ok(min_rank_dfs(inst, budget, &mut all)?
        .expect("an unrestricted search always reaches a leaf"))
}

/// Independent minimum-rank oracle for the square identity-demand case:
/// exhaustively enumerates every matrix that fits the side-information
/// structure (nonzero diagonal, support of row i inside X_i plus i) and
/// takes the minimum rank. No pruning; this is deliberately the naive route.
pub fn minrank_fitting(inst: &IcsiInstance, budget: u64) -> Result<usize, IcError> {
    let n = inst.n();
    if inst.m() != n || (0..n).any(|i| inst.demand(i) != i) {
        return Err(IcError::FittingShape);
    }
    let field = inst.field();
    let q = field.q() as u128;
    let mut needed = 1u128;
    for i in 0..n {
        needed = needed
            .checked_mul((q - 1) * q.pow(inst.side_info(i).len() as u32))
            .ok_or(IcError::BudgetExceeded { needed: u128::MAX, budget })?;
    }
    if needed > budget as u128 {
        return Err(IcError::BudgetExceeded { needed, budget });
    }
    // Odometer over per-row choices: diagonal in 1..q, then X_i entries in 0..q.
    let positions: Vec<Vec<usize>> = (0..n)
        .map(|i| inst.side_info(i).iter().copied().collect())
        .collect();
    let mut digits: Vec<(u32, u32)> = Vec::new(); // (current, radix) per slot
    for i in 0..n {
        digits.push((1, field.q())); // diagonal, values 1..q
        for _ in 0..positions[i].len() {
            digits.push((0, field.q())); // off-diagonal, values 0..q
        }
    }
    let diag_slots: Vec<usize> = {
        let mut v = Vec::new();
        let mut s = 0;
        for i in 0..n {
            v.push(s);
            s += 1 + positions[i].len();
        }
        v
    };
    let mut best = n + 1;
    loop {
        let mut m = MatGF::zeros(field, n, n);
        for i in 0..n {
            let base = diag_slots[i];
            m.set(i, i, field.elem(digits[base].0 as u64).unwrap());
            for (k, &j) in positions[i].iter().enumerate() {
                m.set(i, j, field.elem(digits[base + 1 + k].0 as u64).unwrap());
            }
        }
        best = best.min(m.rank());
        // Advance the odometer; diagonal slots wrap to 1, others to 0.
        let mut carried = true;
        for (slot, d) in digits.iter_mut().enumerate().rev() {
            d.0 += 1;
            if d.0 < d.1 {
                carried = false;
                break;
            }
            d.0 = if diag_slots.contains(&slot) { 1 } else { 0 };
        }
        if carried {
            break;
        }
    }
    Ok(best)
}

/// On-disk encoder format: field spec, message count n, broadcast length N,
/// row-major entries in canonical integer encoding. Randomized encoders add
/// eta extra rows of randomness below the message rows.
#[derive(Debug, Clone)]
pub struct CodeFileData {
    pub field: Field,
    pub n: usize,
    pub eta: usize,
    pub l: MatGF,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    field: String,
    n: u32,
    #[serde(rename = "N")]
    cols: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<u32>,
    entries: Vec<u64>,
}

pub fn code_file_json(field: Field, n: usize, eta: usize, l: &MatGF) -> String {
    assert_eq!(l.rows(), n + eta, "entry rows must be n + eta");
    let file = CodeFile {
        field: field.spec_string(),
        n: n as u32,
        cols: l.cols() as u32,
        eta: if eta == 0 { None } else { Some(eta as u32) },
        entries: l.entries().iter().map(|e| e.val() as u64).collect(),
    };
    serde_json::to_string_pretty(&file).expect("code serialization cannot fail")
}

pub fn parse_code_file(text: &str) -> Result<CodeFileData, IcError> {
    let file: CodeFile = serde_json::from_str(text)?;
    let field = Field::parse_spec(&file.field)?;
    let n = file.n as usize;
    let eta = file.eta.unwrap_or(0) as usize;
    let cols = file.cols as usize;
    let rows = n + eta;
    if file.entries.len() != rows * cols {
        return Err(IcError::BadFile(format!(
            "expected {} entries ({rows}x{cols}), got {}",
            rows * cols,
            file.entries.len()
        )));
    }
    let l = MatGF::from_vals(field, rows, cols, &file.entries)?;
    Ok(CodeFileData { field, n, eta, l })
}

pub fn load_code_file(path: &std::path::Path) -> Result<CodeFileData, IcError> {
    parse_code_file(&std::fs::read_to_string(path)?)
}

pub fn save_code_file(
    path: &std::path::Path,
    field: Field,
    n: usize,
    eta: usize,
    l: &MatGF,
) -> Result<(), IcError> {
    std::fs::write(path, code_file_json(field, n, eta, l) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icsi::Receiver;
    use crate::DEFAULT_BUDGET as B;
    use std::collections::BTreeSet;

    fn gf2() -> Field {
        Field::new(2, 1).unwrap()
    }

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    fn v(field: Field, vals: &[u64]) -> VecGF {
        VecGF::from_vals(field, vals).unwrap()
    }

    /// 4 messages, each receiver holds all but its demand.
    fn complete4(field: Field) -> IcsiInstance {
        let receivers = (0..4)
            .map(|i| Receiver {
                demand: i,
                side_info: (0..4).filter(|&j| j != i).collect(),
                restricted: BTreeSet::new(),
            })
            .collect();
        IcsiInstance::new(field, 4, receivers).unwrap()
    }

    fn sum_code(field: Field) -> IndexCode {
        let l = MatGF::from_vals(field, 4, 1, &[1, 1, 1, 1]).unwrap();
        IndexCode::new(complete4(field), l).unwrap()
    }

    /// 7-message instance whose natural encoder columns span a [7,4] Hamming
    /// code; receivers demand their own index.
    fn hamming7() -> IcsiInstance {
        let side: [&[usize]; 7] = [
            &[5, 6],
            &[4, 6],
            &[4, 5],
            &[4, 5, 6],
            &[0, 1, 5],
            &[0, 2, 3],
            &[1, 2, 5],
        ];
        let receivers = (0..7)
            .map(|i| Receiver {
                demand: i,
                side_info: side[i].iter().copied().collect(),
                restricted: BTreeSet::new(),
            })
            .collect();
        IcsiInstance::new(gf2(), 7, receivers).unwrap()
    }

    fn hamming7_l() -> MatGF {
        let rows: &[[u64; 4]] = &[
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [0, 1, 1, 1],
            [1, 0, 1, 1],
            [1, 1, 0, 1],
        ];
        let flat: Vec<u64> = rows.iter().flatten().copied().collect();
        MatGF::from_vals(gf2(), 7, 4, &flat).unwrap()
    }

    fn hamming7_code() -> IndexCode {
        IndexCode::new(hamming7(), hamming7_l()).unwrap()
    }

    #[test]
    fn sum_code_encodes_to_message_sum() {
        let f = gf2();
        let code = sum_code(f);
        let s = code.encode(&v(f, &[1, 0, 1, 1])).unwrap();
        assert_eq!(s.vals(), vec![1]);
    }

    #[test]
    fn hamming_encoder_parameters_and_sample() {
        let code = hamming7_code();
        let c = code.code().unwrap();
        assert_eq!((c.len(), c.dim()), (7, 4));
        assert_eq!(c.min_distance(B).unwrap(), 3);
        assert_eq!(c.dual_distance(B).unwrap(), 4);
        let s = code.encode(&v(gf2(), &[0, 0, 0, 0, 1, 0, 0])).unwrap();
        assert_eq!(s.vals(), vec![0, 1, 1, 1]);
    }

    #[test]
    fn identity_encoder_recipe_is_trivial() {
        // With L = I the recipe reads the demanded coordinate directly.
        let inst = hamming7();
        let code = IndexCode::new(inst, MatGF::identity(gf2(), 7)).unwrap();
        for i in 0..7 {
            let r = code.decode_recipe(i).unwrap();
            assert!(r.u.is_zero());
            assert_eq!(r.beta, VecGF::unit(gf2(), 7, i));
        }
    }

    #[test]
    fn sum_code_recipe_subtracts_known_messages() {
        let f = gf2();
        let code = sum_code(f);
        let r = code.decode_recipe(0).unwrap();
        assert_eq!(r.u, v(f, &[0, 1, 1, 1]));
        assert_eq!(r.beta.vals(), vec![1]);
    }

    #[test]
    fn fifth_receiver_recipe_matches_hand_derivation() {
        // Receiver at index 4 combines broadcasts 1 and 2 and subtracts
        // x_0 + x_1 + x_5 (0-based).
        let code = hamming7_code();
        let r = code.decode_recipe(4).unwrap();
        assert_eq!(r.beta, v(gf2(), &[1, 1, 0, 0]));
        assert_eq!(r.u, v(gf2(), &[1, 1, 0, 0, 0, 1, 0]));
    }

    #[test]
    fn all_receivers_decode_every_message_vector() {
        let code = hamming7_code();
        for x in matlin::enumerate_vectors(gf2(), 7) {
            let s = code.encode(&x).unwrap();
            for i in 0..7 {
                let r = code.decode_recipe(i).unwrap();
                assert_eq!(r.eval_full(&s, &x), x.get(i));
                // Recipe never touches coordinates outside the side info.
                let side: BTreeMap<usize, Fe> = code
                    .instance()
                    .side_info(i)
                    .iter()
                    .map(|&j| (j, x.get(j)))
                    .collect();
                assert_eq!(r.eval(&s, &side).unwrap(), x.get(i));
            }
        }
    }

    #[test]
    fn validity_routes_agree() {
        let good = hamming7_code();
        assert!(good.is_valid());
        assert!(good.is_valid_weight_criterion(B).unwrap());
        // Dropping a broadcast column breaks some receiver.
        let short = IndexCode::new(hamming7(), hamming7_l().cols_by(&[0, 1, 2])).unwrap();
        assert!(!short.is_valid());
        assert!(!short.is_valid_weight_criterion(B).unwrap());
        let report = short.validity();
        assert!(!report.failing().is_empty());
    }

    #[test]
    fn zero_column_encoder_is_invalid() {
        let f = gf2();
        let code = IndexCode::new(complete4(f), MatGF::zeros(f, 4, 1)).unwrap();
        assert!(code.code().is_none());
        assert!(!code.is_valid());
        assert!(!code.is_valid_weight_criterion(B).unwrap());
    }

    #[test]
    fn dimension_and_field_mismatches_are_rejected() {
        let f = gf2();
        let bad_rows = MatGF::zeros(f, 3, 1);
        assert!(matches!(
            IndexCode::new(complete4(f), bad_rows),
            Err(IcError::DimensionMismatch { expected: 4, got: 3 })
        ));
        let f3 = Field::new(3, 1).unwrap();
        assert!(matches!(
            IndexCode::new(complete4(f), MatGF::zeros(f3, 4, 1)),
            Err(IcError::FieldMismatch)
        ));
        let code = sum_code(f);
        assert!(matches!(
            code.encode(&VecGF::zeros(f, 3)),
            Err(IcError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn minimum_rank_of_complete_instance_is_one() {
        let w = kappa_q(&complete4(gf2()), B).unwrap();
        assert_eq!(w.kappa, 1);
        assert_eq!(w.l.cols(), 1);
        // The witness span must let every receiver decode.
        let code = IndexCode::new(complete4(gf2()), w.l).unwrap();
        assert!(code.is_valid());
    }

    #[test]
    fn minimum_rank_with_no_side_info_is_n() {
        let receivers = (0..3)
            .map(|i| Receiver { demand: i, side_info: set(&[]), restricted: set(&[]) })
            .collect();
        let inst = IcsiInstance::new(gf2(), 3, receivers).unwrap();
        assert_eq!(kappa_q(&inst, B).unwrap().kappa, 3);
    }

    #[test]
    fn minimum_rank_witness_is_always_valid_encoder() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..30 {
            let q = if trial % 2 == 0 { 2 } else { 3 };
            let field = Field::new(q, 1).unwrap();
            let inst = crate::icsi::random_instance(&mut rng, field, 4, 3);
            let w = kappa_q(&inst, B).unwrap();
            let code = IndexCode::new(inst, w.l).unwrap();
            assert!(code.is_valid(), "trial {trial}");
            assert_eq!(code.code().unwrap().dim(), w.kappa);
        }
    }

    #[test]
    fn budget_rejects_oversized_searches() {
        let f = gf2();
        let inst = complete4(f); // choice space 2^12
        assert!(matches!(
            kappa_q(&inst, 1 << 10),
            Err(IcError::BudgetExceeded { needed, budget: 1024 }) if needed == 1 << 12
        ));
    }

    #[test]
    fn fitting_matrix_minimum_matches_search_on_square_instances() {
        let inst = complete4(gf2());
        assert_eq!(minrank_fitting(&inst, B).unwrap(), 1);
        assert_eq!(kappa_q(&inst, B).unwrap().kappa, 1);
        // Empty side info: only diagonal matrices fit, rank n.
        let receivers = (0..3)
            .map(|i| Receiver { demand: i, side_info: set(&[]), restricted: set(&[]) })
            .collect();
        let inst = IcsiInstance::new(gf2(), 3, receivers).unwrap();
        assert_eq!(minrank_fitting(&inst, B).unwrap(), 3);
    }

    #[test]
    fn fitting_matrix_requires_identity_demands() {
        let r = vec![Receiver { demand: 1, side_info: set(&[]), restricted: set(&[]) }];
        let inst = IcsiInstance::new(gf2(), 2, r).unwrap();
        assert!(matches!(minrank_fitting(&inst, B), Err(IcError::FittingShape)));
    }

    #[test]
    fn delta_error_correction_thresholds() {
        // The sum code distinguishes interference vectors but with weight-1
        // broadcasts only: valid (delta 0), not 1-error-correcting.
        let code = sum_code(gf2());
        assert_eq!(code.min_interference_weight(B).unwrap(), 1);
        assert!(code.is_delta_error_correcting(0, B).unwrap());
        assert!(!code.is_delta_error_correcting(1, B).unwrap());
        let h = hamming7_code();
        assert!(h.is_delta_error_correcting(0, B).unwrap());
        assert!(!h.is_delta_error_correcting(1, B).unwrap());
    }

    #[test]
    fn decode_with_errors_at_delta_zero_matches_recipes() {
        let code = hamming7_code();
        for x in matlin::enumerate_vectors(gf2(), 7).take(40) {
            let s = code.encode(&x).unwrap();
            for i in 0..7 {
                let side: BTreeMap<usize, Fe> = code
                    .instance()
                    .side_info(i)
                    .iter()
                    .map(|&j| (j, x.get(j)))
                    .collect();
                assert_eq!(code.decode_with_errors(i, &s, &side, 0, B).unwrap(), x.get(i));
            }
        }
    }

    #[test]
    fn decode_with_errors_flags_ambiguity_beyond_capability() {
        // The sum code cannot absorb even one symbol error.
        let f = gf2();
        let code = sum_code(f);
        let x = v(f, &[1, 0, 1, 0]);
        let s = code.encode(&x).unwrap();
        let mut y = s.clone();
        y.set(0, f.add(y.get(0), Fe::ONE));
        let side: BTreeMap<usize, Fe> = [1, 2, 3].iter().map(|&j| (j, x.get(j))).collect();
        assert!(matches!(
            code.decode_with_errors(0, &y, &side, 1, B),
            Err(IcError::Ambiguous)
        ));
    }

    #[test]
    fn code_file_round_trip() {
        let dir = std::env::temp_dir().join("icsec-codefile-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("code.json");
        let l = hamming7_l();
        save_code_file(&path, gf2(), 7, 0, &l).unwrap();
        let data = load_code_file(&path).unwrap();
        assert_eq!(data.n, 7);
        assert_eq!(data.eta, 0);
        assert_eq!(data.l, l);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn code_file_rejects_bad_entry_counts_and_values() {
        let short = r#"{"field":"gf(2)","n":2,"N":1,"entries":[1]}"#;
        assert!(matches!(parse_code_file(short), Err(IcError::BadFile(_))));
        let oob = r#"{"field":"gf(2)","n":2,"N":1,"entries":[1,2]}"#;
        assert!(matches!(parse_code_file(oob), Err(IcError::Field(_))));
        let unknown = r#"{"field":"gf(2)","n":2,"N":1,"entries":[1,1],"x":0}"#;
        assert!(matches!(parse_code_file(unknown), Err(IcError::Json(_))));
    }
}
