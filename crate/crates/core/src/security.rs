//! Security analysis of deterministic encoders against eavesdroppers that
//! know a subset X_A of the messages and see the whole broadcast.
//!
//! Everything here rests on one equivalence: the adversary learns nothing
//! about a block B of unknown messages iff C(L) has no codeword supported
//! inside X_A plus B with a nonzero B part. The algebraic check and the
//! exact counting oracle are independent implementations of that statement,
//! and the distances d and d_dual of C(L) turn it into thresholds: block
//! security of size d-1-t up to strength t = d-2, complete insecurity from
//! strength n - d_dual + 1 on.

use crate::gf::Fe;
use crate::icsi::IcsiInstance;
use crate::indexcode::{IcError, IndexCode, MinRankWitness};
use crate::lincode::{CodeError, LinearCode};
use crate::matlin::{self, MatGF, VecGF};
use itertools::Itertools;
use rand::SeedableRng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SecError {
    #[error("enumeration needs {needed} steps, budget allows {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("eavesdropping width must be between 1 and the broadcast length, got {0}")]
    BadMu(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Ic(#[from] IcError),
}

/// Number of (adversary set, target) pairs sampled per strength when the
/// exhaustive pair space exceeds the budget.
const SAMPLED_PAIRS: u64 = 512;

fn check_coords(n: usize, adversary: &[usize], targets: &[usize]) {
    assert!(!targets.is_empty(), "target block must be nonempty");
    for w in [adversary, targets] {
        assert!(w.windows(2).all(|p| p[0] < p[1]), "coordinate sets must be strictly increasing");
        assert!(w.iter().all(|&i| i < n), "coordinate out of range");
    }
    assert!(
        adversary.iter().all(|i| !targets.contains(i)),
        "adversary and target sets must be disjoint"
    );
}

/// Algebraic leakage criterion. True iff an adversary knowing the messages
/// in `adversary` and the whole broadcast learns nothing about the joint
/// value of the `targets` block: C(L) has no codeword supported inside the
/// union with a nonzero target part. Panics on malformed coordinate sets.
pub fn has_no_information(l: &MatGF, adversary: &[usize], targets: &[usize]) -> bool {
    let n = l.rows();
    check_coords(n, adversary, targets);
    let cols: Vec<VecGF> = (0..l.cols()).map(|j| l.col(j)).collect();
    let Ok(code) = LinearCode::from_spanning(l.field(), &cols) else {
        return true; // zero code carries nothing
    };
    let outside: Vec<usize> = (0..n)
        .filter(|i| !adversary.contains(i) && !targets.contains(i))
        .collect();
    let g = code.generator();
    let constrained = g.cols_by(&outside);
    for y in matlin::nullspace_left(&constrained) {
        let c = g.vec_mul(&y);
        if targets.iter().any(|&j| !c.get(j).is_zero()) {
            return false;
        }
    }
    true
}

/// Exact conditional distribution of the target block given an adversary's
/// view (broadcast plus known messages), for one true message vector x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalCounts {
    /// Count per joint value of the target block, in canonical encoding.
    pub counts: BTreeMap<Vec<u32>, u64>,
    /// Number of message vectors consistent with the view.
    pub total: u64,
    pub q: u32,
    pub block_size: usize,
}

impl ConditionalCounts {
    /// Uniform iff every possible block value occurs, all equally often.
    pub fn is_uniform(&self) -> bool {
        let full = (self.q as u128).pow(self.block_size as u32);
        if self.counts.len() as u128 != full {
            return false;
        }
        let mut vals = self.counts.values();
        let first = vals.next().copied();
        vals.all(|&c| Some(c) == first)
    }
}

/// Brute-force leakage oracle: enumerates every z in F_q^n agreeing with x
/// on the broadcast and on the adversary coordinates, and tallies the target
/// block values. Budget bounds the q^n enumeration.
pub fn entropy_oracle(
    l: &MatGF,
    x: &VecGF,
    adversary: &[usize],
    targets: &[usize],
    budget: u64,
) -> Result<ConditionalCounts, SecError> {
    let n = l.rows();
    check_coords(n, adversary, targets);
    assert_eq!(x.len(), n, "message length must match the encoder");
    let field = l.field();
    check_budget(field.q(), n, budget)?;
    let s = l.vec_mul(x);
    let known: Vec<Fe> = adversary.iter().map(|&i| x.get(i)).collect();
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut total = 0u64;
    for z in matlin::enumerate_vectors(field, n) {
        if adversary.iter().zip(&known).any(|(&i, &v)| z.get(i) != v) {
            continue;
        }
        if l.vec_mul(&z) != s {
            continue;
        }
        let key: Vec<u32> = targets.iter().map(|&j| z.get(j).val()).collect();
        *counts.entry(key).or_insert(0) += 1;
        total += 1;
    }
    Ok(ConditionalCounts { counts, total, q: field.q(), block_size: targets.len() })
}

fn check_budget(q: u32, len: usize, budget: u64) -> Result<u128, SecError> {
    let needed = matlin::space_size(q, len)
        .ok_or(SecError::BudgetExceeded { needed: u128::MAX, budget })?;
    if needed > budget as u128 {
        return Err(SecError::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// Single-pass form of the oracle quantified over every message vector:
/// groups all z by view (broadcast value, adversary values) and checks each
/// group is uniform over the target block. Equivalent to running
/// entropy_oracle for every x, in one q^n sweep.
pub fn entropy_uniform_for_all(
    l: &MatGF,
    adversary: &[usize],
    targets: &[usize],
    budget: u64,
) -> Result<bool, SecError> {
    let n = l.rows();
    check_coords(n, adversary, targets);
    let field = l.field();
    check_budget(field.q(), n, budget)?;
    let mut groups: BTreeMap<(u128, u128), BTreeMap<u128, u64>> = BTreeMap::new();
    for z in matlin::enumerate_vectors(field, n) {
        let view = (
            matlin::vector_to_index(&l.vec_mul(&z)),
            matlin::vector_to_index(&z.restrict(adversary)),
        );
        let block = matlin::vector_to_index(&z.restrict(targets));
        *groups.entry(view).or_default().entry(block).or_insert(0) += 1;
    }
    let full = (field.q() as u128).pow(targets.len() as u32);
    for block_counts in groups.values() {
        if block_counts.len() as u128 != full {
            return Ok(false);
        }
        let mut vals = block_counts.values();
        let first = vals.next().copied();
        if !vals.all(|&c| Some(c) == first) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One concrete attack: a codeword of weight w hands the strength-(w-1)
/// adversary holding all but one support coordinate the last one.
/// Indices are 1-based for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct AttackWitness {
    pub weight: usize,
    pub strength: usize,
    pub adversary: Vec<usize>,
    pub target: usize,
    pub codeword: Vec<u32>,
}

/// Per-strength aggregation of the pairwise leakage checks.
#[derive(Debug, Clone, Serialize)]
pub struct StrengthSummary {
    pub t: usize,
    /// Block size guaranteed secure at this strength: d-1-t up to t = d-2.
    pub guaranteed_block: usize,
    /// No (adversary, single target) pair leaks at this strength.
    pub weakly_secure: bool,
    /// Whether the pair sweep was exhaustive or seeded-sampled.
    pub exhaustive: bool,
    pub pairs_checked: u64,
    /// First leaking pair found, 1-based, if any.
    pub leaky_pair: Option<(Vec<usize>, usize)>,
}

/// Full security report for one encoder. All indices 1-based, matching the
/// instance file convention.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    pub n: usize,
    pub length: usize,
    pub dim: usize,
    pub d: usize,
    pub d_dual: usize,
    /// Adversaries of strength at least this learn every unknown message.
    pub insecurity_threshold: usize,
    pub strengths: Vec<StrengthSummary>,
    /// One attack per codeword weight occurring in C(L).
    pub attacks: Vec<AttackWitness>,
    /// (t, e) pairs: a strength-t adversary can list all q^e candidate
    /// message vectors; present only when L has full column rank and t < d.
    pub list_exponents: Vec<(usize, usize)>,
    pub budget: u64,
    pub seed: u64,
}

/// Analyze an encoder: distances, security thresholds, per-strength weak
/// security, attack witnesses, and list sizes. The seed only matters when a
/// pair space exceeds the budget and gets sampled.
pub fn block_security_profile(l: &MatGF, budget: u64, seed: u64) -> Result<SecurityReport, SecError> {
    let n = l.rows();
    let field = l.field();
    let cols: Vec<VecGF> = (0..l.cols()).map(|j| l.col(j)).collect();
    let code = LinearCode::from_spanning(field, &cols)?;
    let d = code.min_distance(budget)?;
    let d_dual = code.dual_distance(budget)?;
    let insecurity_threshold = (n + 1).saturating_sub(d_dual);

    let mut attacks = Vec::new();
    let mut seen_weights = std::collections::BTreeSet::new();
    for c in code.codewords(budget)? {
        let w = c.weight();
        if w == 0 || !seen_weights.insert(w) {
            continue;
        }
        let supp = c.support();
        attacks.push(AttackWitness {
            weight: w,
            strength: w - 1,
            adversary: supp[..w - 1].iter().map(|i| i + 1).collect(),
            target: supp[w - 1] + 1,
            codeword: c.vals(),
        });
    }
    attacks.sort_by_key(|a| a.weight);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut strengths = Vec::new();
    for t in 0..n {
        let pair_space = binom(n, t).and_then(|c| c.checked_mul((n - t) as u128));
        let exhaustive = pair_space.is_some_and(|p| p <= budget as u128);
        let mut weakly_secure = true;
        let mut leaky_pair = None;
        let mut pairs_checked = 0u64;
        let mut check = |xa: &[usize], j: usize, pairs_checked: &mut u64| {
            *pairs_checked += 1;
            if has_no_information(l, xa, &[j]) {
                true
            } else {
                leaky_pair.get_or_insert((xa.iter().map(|i| i + 1).collect(), j + 1));
                false
            }
        };
        if exhaustive {
            'outer: for xa in (0..n).combinations(t) {
                for j in 0..n {
                    if !xa.contains(&j) && !check(&xa, j, &mut pairs_checked) {
                        weakly_secure = false;
                        break 'outer;
                    }
                }
            }
        } else {
            for _ in 0..SAMPLED_PAIRS {
                let mut xa = rand::seq::index::sample(&mut rng, n, t).into_vec();
                xa.sort_unstable();
                let rest: Vec<usize> = (0..n).filter(|i| !xa.contains(i)).collect();
                let j = rest[rand::Rng::gen_range(&mut rng, 0..rest.len())];
                if !check(&xa, j, &mut pairs_checked) {
                    weakly_secure = false;
                    break;
                }
            }
        }
        let guaranteed_block = if d >= 2 && t <= d - 2 { d - 1 - t } else { 0 };
        strengths.push(StrengthSummary {
            t,
            guaranteed_block,
            weakly_secure,
            exhaustive,
            pairs_checked,
            leaky_pair,
        });
    }

    let mut list_exponents = Vec::new();
    if code.dim() == l.cols() {
        for t in 0..d.min(n + 1 - l.cols()) {
            list_exponents.push((t, n - t - l.cols()));
        }
    }

    Ok(SecurityReport {
        n,
        length: l.cols(),
        dim: code.dim(),
        d,
        d_dual,
        insecurity_threshold,
        strengths,
        attacks,
        list_exponents,
        budget,
        seed,
    })
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

/// How an adversary knowing `adversary` reconstructs one further
/// coordinate: x_j = s . beta - x . u, with u supported inside `adversary`.
#[derive(Debug, Clone)]
pub struct CoordinateRecovery {
    pub coordinate: usize,
    pub u: VecGF,
    pub beta: VecGF,
}

impl CoordinateRecovery {
    pub fn eval_full(&self, s: &VecGF, x: &VecGF) -> Fe {
        let f = s.field();
        f.sub(s.dot(&self.beta), x.dot(&self.u))
    }
}

/// Complete-insecurity test: can the adversary determine every message it
/// does not hold? Returns the verdict and one recovery recipe per unknown
/// coordinate (in ascending order) where one exists.
pub fn completely_insecure_check(
    l: &MatGF,
    adversary: &[usize],
) -> (bool, Vec<Option<CoordinateRecovery>>) {
    let n = l.rows();
    assert!(adversary.windows(2).all(|p| p[0] < p[1]), "adversary must be strictly increasing");
    assert!(adversary.iter().all(|&i| i < n), "coordinate out of range");
    let field = l.field();
    let cols: Vec<VecGF> = (0..l.cols()).map(|j| l.col(j)).collect();
    let code = LinearCode::from_spanning(field, &cols).ok();
    let unknown: Vec<usize> = (0..n).filter(|i| !adversary.contains(i)).collect();
    let lt = l.transpose();
    let recoveries: Vec<Option<CoordinateRecovery>> = unknown
        .iter()
        .map(|&j| {
            let c = code.as_ref()?.codeword_with_pattern(j, adversary)?;
            let e = VecGF::unit(field, n, j);
            let beta = matlin::solve_left(&lt, &c).expect("codeword lies in the row space");
            Some(CoordinateRecovery { coordinate: j, u: c.sub(&e), beta })
        })
        .collect();
    (recoveries.iter().all(Option::is_some), recoveries)
}

/// Distances available to an eavesdropper limited to mu of the N broadcast
/// symbols: minima of d and d_dual of C(L[W]) over all column subsets W of
/// size mu. The security thresholds hold with these in place of d, d_dual.
/// A subset spanning only zero contributes the conventional pair (n+1, 1).
pub fn restricted_distances(l: &MatGF, mu: usize, budget: u64) -> Result<(usize, usize), SecError> {
    let cols_n = l.cols();
    if mu == 0 || mu > cols_n {
        return Err(SecError::BadMu(mu));
    }
    let subsets = binom(cols_n, mu).expect("subset count fits u128");
    if subsets > budget as u128 {
        return Err(SecError::BudgetExceeded { needed: subsets, budget });
    }
    let field = l.field();
    let n = l.rows();
    let mut d_mu = usize::MAX;
    let mut d_dual_mu = usize::MAX;
    for w in (0..cols_n).combinations(mu) {
        let sub = l.cols_by(&w);
        let cols: Vec<VecGF> = (0..sub.cols()).map(|j| sub.col(j)).collect();
        let (d, dd) = match LinearCode::from_spanning(field, &cols) {
            Ok(code) => (code.min_distance(budget)?, code.dual_distance(budget)?),
            Err(CodeError::ZeroCode) => (n + 1, 1),
            Err(e) => return Err(e.into()),
        };
        d_mu = d_mu.min(d);
        d_dual_mu = d_dual_mu.min(dd);
    }
    Ok((d_mu, d_dual_mu))
}

/// Restricted-information validity: the code must serve every receiver while
/// giving no receiver a decode path to any of its forbidden messages.
pub fn icsri_valid(code: &IndexCode) -> bool {
    if !code.is_valid() {
        return false;
    }
    let Some(lin) = code.code() else {
        return code.instance().m() == 0;
    };
    let inst = code.instance();
    for i in 0..inst.m() {
        let xi: Vec<usize> = inst.side_info(i).iter().copied().collect();
        for &j in inst.restricted(i) {
            if lin.codeword_with_pattern(j, &xi).is_some() {
                return false;
            }
        }
    }
    true
}

/// Shortest valid broadcast length under the restrictions: minimum rank over
/// conforming row choices whose span leaks none of the forbidden messages.
/// None means no linear code of any length can satisfy the instance.
pub fn kappa_star(inst: &IcsiInstance, budget: u64) -> Result<Option<MinRankWitness>, SecError> {
    let forbidden: Vec<(Vec<usize>, usize)> = (0..inst.m())
        .flat_map(|i| {
            let xi: Vec<usize> = inst.side_info(i).iter().copied().collect();
            inst.restricted(i).iter().map(move |&j| (xi.clone(), j)).collect::<Vec<_>>()
        })
        .collect();
    let field = inst.field();
    let mut admissible = |basis: &[(usize, VecGF)]| {
        if basis.is_empty() || forbidden.is_empty() {
            return true;
        }
        let rows: Vec<VecGF> = basis.iter().map(|(_, r)| r.clone()).collect();
        let m = MatGF::from_rows(field, &rows);
        forbidden
            .iter()
            .all(|(xi, j)| matlin::rowspace_pattern_solve(&m, *j, xi).is_none())
    };
    Ok(crate::indexcode::min_rank_dfs(inst, budget, &mut admissible)?)
}
