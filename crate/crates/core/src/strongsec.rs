//! Randomized linear index codes and strong security.
//!
//! A mu-limited eavesdropper sees any mu of the N broadcast symbols. A
//! deterministic encoder generally leaks through them; mixing the messages
//! with eta uniform random symbols through a nested MDS structure makes the
//! eavesdropped symbols exactly independent of the unknown messages while
//! every legitimate receiver still decodes for every realization of the
//! randomness. The coset construction here achieves the optimal broadcast
//! length kappa + mu + 2*delta with eta = mu random symbols.

use crate::gf::Fe;
use crate::icsi::IcsiInstance;
use crate::indexcode::{self, DecodeRecipe, IcError, IndexCode};
use crate::lincode::{self, CodeError, LinearCode};
use crate::matlin::{self, MatGF, VecGF};
use itertools::Itertools;
use rand::SeedableRng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StrongError {
    #[error("construction needs at least {required} field elements, field has {q}")]
    FieldTooSmall { required: u64, q: u32 },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch between instance, encoder and arguments")]
    FieldMismatch,
    #[error("enumeration needs {needed} steps, budget allows {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("base encoder does not satisfy the instance")]
    InvalidBase,
    #[error("constructed matrix failed its own check: {0}")]
    ConstructionCheck(&'static str),
    #[error("receiver has no decode recipe")]
    NoRecipe,
    #[error("received word is not within the error budget of any codeword")]
    DecodeFailure,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Ic(#[from] IcError),
}

/// Encoder with eta rows of uniform randomness below the n message rows:
/// the broadcast is (x|g) L for g drawn fresh per transmission.
#[derive(Debug, Clone)]
pub struct RandomizedIndexCode {
    inst: IcsiInstance,
    eta: usize,
    l: MatGF,
}

impl RandomizedIndexCode {
    pub fn new(inst: IcsiInstance, eta: usize, l: MatGF) -> Result<RandomizedIndexCode, StrongError> {
        if l.field() != inst.field() {
            return Err(StrongError::FieldMismatch);
        }
        if l.rows() != inst.n() + eta {
            return Err(StrongError::DimensionMismatch {
                expected: inst.n() + eta,
                got: l.rows(),
            });
        }
        Ok(RandomizedIndexCode { inst, eta, l })
    }

    pub fn instance(&self) -> &IcsiInstance {
        &self.inst
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn matrix(&self) -> &MatGF {
        &self.l
    }

    pub fn length(&self) -> usize {
        self.l.cols()
    }

    fn joint(&self, x: &VecGF, g: &VecGF) -> Result<VecGF, StrongError> {
        let field = self.inst.field();
        if x.field() != field || g.field() != field {
            return Err(StrongError::FieldMismatch);
        }
        if x.len() != self.inst.n() {
            return Err(StrongError::DimensionMismatch { expected: self.inst.n(), got: x.len() });
        }
        if g.len() != self.eta {
            return Err(StrongError::DimensionMismatch { expected: self.eta, got: g.len() });
        }
        Ok(VecGF::new(field, x.iter().chain(g.iter()).collect()))
    }

    pub fn encode(&self, x: &VecGF, g: &VecGF) -> Result<VecGF, StrongError> {
        Ok(self.l.vec_mul(&self.joint(x, g)?))
    }

    /// Encode with randomness drawn from a seeded generator; returns the
    /// broadcast and the g that was used.
    pub fn encode_seeded(&self, x: &VecGF, seed: u64) -> Result<(VecGF, VecGF), StrongError> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = crate::icsi::random_vector(&mut rng, self.inst.field(), self.eta);
        Ok((self.encode(x, &g)?, g))
    }

    /// Decode rule for receiver i, independent of the randomness: a span
    /// element with 1 at the demand, support inside the side information,
    /// and zero on all g rows. u is reported on the n message coordinates.
    pub fn decode_recipe(&self, i: usize) -> Option<DecodeRecipe> {
        let field = self.inst.field();
        let cols: Vec<VecGF> = (0..self.l.cols()).map(|j| self.l.col(j)).collect();
        let code = LinearCode::from_spanning(field, &cols).ok()?;
        let fi = self.inst.demand(i);
        let allowed: Vec<usize> = self.inst.side_info(i).iter().copied().collect();
        let c = code.codeword_with_pattern(fi, &allowed)?;
        let beta = matlin::solve_left(&self.l.transpose(), &c)
            .expect("pattern codeword lies in the row space of L^T");
        let mut u = VecGF::zeros(field, self.inst.n());
        for j in 0..self.inst.n() {
            u.set(j, c.get(j));
        }
        u.set(fi, field.sub(u.get(fi), Fe::ONE));
        Some(DecodeRecipe { receiver: i, u, beta })
    }

    pub fn is_valid(&self) -> bool {
        (0..self.inst.m()).all(|i| self.decode_recipe(i).is_some())
    }

    /// Independent validity route: over all (x, g), each receiver's view
    /// (broadcast, side values) must determine its demanded value.
    pub fn is_valid_exhaustive(&self, budget: u64) -> Result<bool, StrongError> {
        let field = self.inst.field();
        let n = self.inst.n();
        let needed = matlin::space_size(field.q(), n + self.eta)
            .ok_or(StrongError::BudgetExceeded { needed: u128::MAX, budget })?;
        if needed > budget as u128 {
            return Err(StrongError::BudgetExceeded { needed, budget });
        }
        for i in 0..self.inst.m() {
            let side: Vec<usize> = self.inst.side_info(i).iter().copied().collect();
            let fi = self.inst.demand(i);
            let mut seen: BTreeMap<(u128, u128), Fe> = BTreeMap::new();
            for xg in matlin::enumerate_vectors(field, n + self.eta) {
                let key = (
                    matlin::vector_to_index(&self.l.vec_mul(&xg)),
                    matlin::vector_to_index(&xg.restrict(&side)),
                );
                let demand = xg.get(fi);
                if *seen.entry(key).or_insert(demand) != demand {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A strongly secure code lets each receiver strip the randomness: every
    /// g row must be computable from the messages and the broadcast.
    pub fn randomness_recovery_check(&self) -> bool {
        let field = self.inst.field();
        let cols: Vec<VecGF> = (0..self.l.cols()).map(|j| self.l.col(j)).collect();
        let Ok(code) = LinearCode::from_spanning(field, &cols) else {
            return self.eta == 0;
        };
        let messages: Vec<usize> = (0..self.inst.n()).collect();
        (0..self.eta).all(|i| code.codeword_with_pattern(self.inst.n() + i, &messages).is_some())
    }

    pub fn save(&self, path: &Path) -> Result<(), StrongError> {
        indexcode::save_code_file(path, self.inst.field(), self.inst.n(), self.eta, &self.l)?;
        Ok(())
    }

    pub fn load(inst: IcsiInstance, path: &Path) -> Result<RandomizedIndexCode, StrongError> {
        let data = indexcode::load_code_file(path)?;
        if data.field != inst.field() {
            return Err(StrongError::FieldMismatch);
        }
        if data.n != inst.n() {
            return Err(StrongError::DimensionMismatch { expected: inst.n(), got: data.n });
        }
        RandomizedIndexCode::new(inst, data.eta, data.l)
    }
}

/// Exact strong-security verification: for every eavesdropped column set W
/// with |W| <= mu, every prior set X_A with |X_A| = t, and every view, the
/// conditional distribution of the unknown messages is uniform. Decided by
/// integer counting over the whole (x, g) space.
pub fn verify_strong_security(
    code: &RandomizedIndexCode,
    mu: usize,
    t: usize,
    budget: u64,
) -> Result<bool, StrongError> {
    let inst = code.instance();
    let field = inst.field();
    let n = inst.n();
    let cols_n = code.length();
    assert!(mu <= cols_n, "cannot eavesdrop more symbols than exist");
    assert!(t <= n, "prior strength cannot exceed the message count");
    let pairs = (0..=mu).try_fold(0u128, |acc, w| acc.checked_add(binom(cols_n, w)?))
        .and_then(|ws| ws.checked_mul(binom(n, t)?))
        .and_then(|p| p.checked_mul(matlin::space_size(field.q(), n + code.eta())?));
    let needed = pairs.ok_or(StrongError::BudgetExceeded { needed: u128::MAX, budget })?;
    if needed > budget as u128 {
        return Err(StrongError::BudgetExceeded { needed, budget });
    }
    let full = (field.q() as u128).pow((n - t) as u32);
    for w in (0..=mu).flat_map(|size| (0..cols_n).combinations(size)) {
        let lw = code.matrix().cols_by(&w);
        for xa in (0..n).combinations(t) {
            let unknown: Vec<usize> = (0..n).filter(|j| !xa.contains(j)).collect();
            let mut groups: BTreeMap<(u128, u128), BTreeMap<u128, u64>> = BTreeMap::new();
            for xg in matlin::enumerate_vectors(field, n + code.eta()) {
                let view = (
                    matlin::vector_to_index(&lw.vec_mul(&xg)),
                    matlin::vector_to_index(&xg.restrict(&xa)),
                );
                let hidden = matlin::vector_to_index(&xg.restrict(&unknown));
                *groups.entry(view).or_default().entry(hidden).or_insert(0) += 1;
            }
            for block in groups.values() {
                if block.len() as u128 != full {
                    return Ok(false);
                }
                let mut vals = block.values();
                let first = vals.next().copied();
                if !vals.all(|&c| Some(c) == first) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn binom(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// The coset construction: given an optimal deterministic encoder L0 of
/// width kappa, stack x*L0 with mu random symbols and spread the result over
/// N = kappa + mu + 2*delta columns through a Vandermonde MDS matrix M.
/// The top kappa rows of M carry the messages, the bottom mu rows the
/// randomness; nestedness of the two MDS codes gives both error correction
/// and exact secrecy.
#[derive(Debug)]
pub struct ConstructionA {
    pub code: RandomizedIndexCode,
    /// Deterministic base encoder, n x kappa, valid for the instance.
    pub base: IndexCode,
    pub kappa: usize,
    pub mu: usize,
    pub delta: usize,
    /// The (kappa+mu) x N MDS spreading matrix.
    pub m: MatGF,
}

impl ConstructionA {
    /// Rows of M that carry the message part.
    pub fn p(&self) -> MatGF {
        self.m.rows_by(&(0..self.kappa).collect::<Vec<_>>())
    }

    /// Rows of M that carry the randomness.
    pub fn q_rows(&self) -> MatGF {
        self.m.rows_by(&(self.kappa..self.kappa + self.mu).collect::<Vec<_>>())
    }

    /// Decode under at most delta symbol errors: bounded-distance decode the
    /// received word against M's code, peel off (x L0 | g), then apply the
    /// base recipe to x L0.
    pub fn decode(
        &self,
        i: usize,
        y: &VecGF,
        side: &BTreeMap<usize, Fe>,
        budget: u64,
    ) -> Result<Fe, StrongError> {
        let mcode = LinearCode::from_generator(&self.m)?;
        let word = lincode::bounded_distance_decode(&mcode, y, self.delta, budget)?
            .ok_or(StrongError::DecodeFailure)?;
        let w = matlin::solve_left(&self.m, &word).expect("decoded word lies in M's row space");
        let s0 = w.restrict(&(0..self.kappa).collect::<Vec<_>>());
        let recipe = self.base.decode_recipe(i).ok_or(StrongError::NoRecipe)?;
        Ok(recipe.eval(&s0, side)?)
    }
}

/// Build the construction from the instance's own optimal encoder (found by
/// the minimum-rank search). Needs q >= kappa + mu + 2*delta + 1.
pub fn construct_a(
    inst: &IcsiInstance,
    mu: usize,
    delta: usize,
    alphas: Option<&[Fe]>,
    budget: u64,
) -> Result<ConstructionA, StrongError> {
    let witness = indexcode::kappa_q(inst, budget)?;
    construct_a_with_l0(inst, witness.l, mu, delta, alphas, budget)
}

/// Same construction around a caller-supplied deterministic encoder L0. The
/// result is optimal exactly when L0's width is the instance's minimum rank.
pub fn construct_a_with_l0(
    inst: &IcsiInstance,
    l0: MatGF,
    mu: usize,
    delta: usize,
    alphas: Option<&[Fe]>,
    budget: u64,
) -> Result<ConstructionA, StrongError> {
    let field = inst.field();
    let kappa = l0.cols();
    let base = IndexCode::new(inst.clone(), l0)?;
    if !base.is_valid() {
        return Err(StrongError::InvalidBase);
    }
    let n_cols = kappa + mu + 2 * delta;
    let required = (n_cols + 1) as u64;
    if (field.q() as u64) < required {
        return Err(StrongError::FieldTooSmall { required, q: field.q() });
    }
    let m = lincode::vandermonde_mds(field, kappa + mu, n_cols, alphas)?;
    // The construction's two announced MDS properties, checked, not trusted.
    let mcode = LinearCode::from_generator(&m)?;
    if mcode.dim() != kappa + mu || mcode.min_distance(budget)? != 2 * delta + 1 {
        return Err(StrongError::ConstructionCheck("spreading code is not [N, kappa+mu, 2delta+1]"));
    }
    if mu > 0 {
        let q_rows = m.rows_by(&(kappa..kappa + mu).collect::<Vec<_>>());
        let qcode = LinearCode::from_generator(&q_rows)?;
        if qcode.dim() != mu || qcode.min_distance(budget)? != n_cols - mu + 1 {
            return Err(StrongError::ConstructionCheck("randomness rows are not MDS"));
        }
    }
    let p = m.rows_by(&(0..kappa).collect::<Vec<_>>());
    let top = base.matrix().mul(&p);
    let l = if mu == 0 {
        top
    } else {
        top.vstack(&m.rows_by(&(kappa..kappa + mu).collect::<Vec<_>>()))
    };
    let code = RandomizedIndexCode::new(inst.clone(), mu, l)?;
    Ok(ConstructionA { code, base, kappa, mu, delta, m })
}

/// Broadcast-length and randomness-budget report against the proven lower
/// bounds N >= kappa + mu + 2*delta and eta >= mu.
#[derive(Debug, Clone, Serialize)]
pub struct LengthBoundReport {
    pub length: usize,
    pub kappa: usize,
    pub mu: usize,
    pub delta: usize,
    pub length_bound: usize,
    pub meets_length_bound: bool,
    pub optimal_length: bool,
    pub eta: usize,
    pub eta_bound: usize,
    pub meets_eta_bound: bool,
}

pub fn check_length_bounds(
    code: &RandomizedIndexCode,
    mu: usize,
    delta: usize,
    budget: u64,
) -> Result<LengthBoundReport, StrongError> {
    let kappa = indexcode::kappa_q(code.instance(), budget)?.kappa;
    let bound = kappa + mu + 2 * delta;
    Ok(LengthBoundReport {
        length: code.length(),
        kappa,
        mu,
        delta,
        length_bound: bound,
        meets_length_bound: code.length() >= bound,
        optimal_length: code.length() == bound,
        eta: code.eta(),
        eta_bound: mu,
        meets_eta_bound: code.eta() >= mu,
    })
}
