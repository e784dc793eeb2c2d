//! Acceptance gate: ten end-to-end checks, each printing one PASS/FAIL line
//! (run with --nocapture to see them). Budgets and time limits are pinned
//! here; every check is exact integer computation, nothing is sampled
//! unless the line says so.

use icsec::gf::{Fe, Field};
use icsec::icsi::{IcsiInstance, Receiver};
use icsec::indexcode::{self, kappa_q, minrank_fitting, IndexCode};
use icsec::lincode::{orthogonal_array_check, LinearCode};
use icsec::matlin::{enumerate_vectors, MatGF, VecGF};
use icsec::security::{
    completely_insecure_check, entropy_oracle, entropy_uniform_for_all, has_no_information,
    icsri_valid, kappa_star,
};
use icsec::strongsec::{construct_a, verify_strong_security, RandomizedIndexCode};
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Enumeration budget for everything except the q=5 minimum-rank search.
const BUDGET: u64 = icsec::DEFAULT_BUDGET;
/// The complete 4-message instance at q=5 has joint choice space 5^12.
const BIG_BUDGET: u64 = 1 << 30;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn check(
    num: usize,
    slug: &str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match outcome {
        Ok(note) => {
            if let Some(lim) = limit {
                if elapsed > lim {
                    println!(
                        "ACCEPTANCE {num} ({slug}): FAIL - exceeded {lim:?} (took {elapsed:?})"
                    );
                    panic!("criterion {num} exceeded its time limit");
                }
            }
            println!("ACCEPTANCE {num} ({slug}): PASS - {note} [{elapsed:.2?}]");
        }
        Err(why) => {
            println!("ACCEPTANCE {num} ({slug}): FAIL - {why}");
            panic!("criterion {num} failed: {why}");
        }
    }
}

macro_rules! expect {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn hamming_setup() -> (IcsiInstance, MatGF) {
    let inst = IcsiInstance::load(&fixture("hamming7.json")).expect("instance fixture");
    let data = indexcode::load_code_file(&fixture("hamming7_code.json")).expect("code fixture");
    assert_eq!(data.eta, 0);
    (inst, data.l)
}

#[test]
fn criterion_01_seven_message_reproduction() {
    check(1, "hamming reproduction", Some(Duration::from_secs(1)), || {
        let (inst, l) = hamming_setup();
        let code = IndexCode::new(inst.clone(), l.clone()).map_err(|e| e.to_string())?;
        let lin = code.code().ok_or("column span is zero")?;
        let params = (lin.len(), lin.dim(), lin.min_distance(BUDGET).unwrap(), lin.dual_distance(BUDGET).unwrap());
        expect!(params == (7, 4, 3, 4), "got (n,k,d,d_dual) = {params:?}");
        for x in enumerate_vectors(inst.field(), 7) {
            let s = code.encode(&x).unwrap();
            for i in 0..7 {
                let r = code.decode_recipe(i).ok_or_else(|| format!("receiver {} has no recipe", i + 1))?;
                expect!(
                    r.eval_full(&s, &x) == x.get(i),
                    "receiver {} mis-decodes message {:?}", i + 1, x.vals()
                );
            }
        }
        let r5 = code.decode_recipe(4).unwrap();
        expect!(
            r5.beta.vals() == vec![1, 1, 0, 0],
            "receiver 5 beta = {:?}", r5.beta.vals()
        );
        expect!(
            r5.u.vals() == vec![1, 1, 0, 0, 0, 1, 0],
            "receiver 5 u = {:?}", r5.u.vals()
        );
        Ok("C(L) is a [7,4,3] code with dual distance 4; 7 receivers x 128 messages decode; \
            receiver 5 uses beta=(1,1,0,0), u=e1+e2+e6"
            .into())
    });
}

#[test]
fn criterion_02_security_thresholds_on_hamming() {
    check(2, "security thresholds", Some(Duration::from_secs(10)), || {
        let (_, l) = hamming_setup();
        // 2-block security at strength 0, by both routes, over all blocks.
        for size in 1..=2usize {
            for b in (0..7usize).combinations(size) {
                expect!(has_no_information(&l, &[], &b), "block {b:?} leaks at t=0");
                expect!(
                    entropy_uniform_for_all(&l, &[], &b, BUDGET).unwrap(),
                    "oracle disagrees on block {b:?} at t=0"
                );
            }
        }
        // Weak security at strength 1, both routes, over all pairs.
        for xa in 0..7usize {
            for j in (0..7).filter(|&j| j != xa) {
                expect!(has_no_information(&l, &[xa], &[j]), "({xa},{j}) leaks at t=1");
                expect!(
                    entropy_uniform_for_all(&l, &[xa], &[j], BUDGET).unwrap(),
                    "oracle disagrees on ({xa},{j}) at t=1"
                );
            }
        }
        // Some strength-2 adversary succeeds: the weight-3 codeword attack.
        expect!(
            !has_no_information(&l, &[0, 5], &[6]),
            "the weight-3 attack (know 1,6, learn 7) did not leak"
        );
        let exists_leak = (0..7usize).combinations(2).any(|xa| {
            (0..7).filter(|j| !xa.contains(j)).any(|j| !has_no_information(&l, &xa, &[j]))
        });
        expect!(exists_leak, "no strength-2 adversary leaks anything");
        // Complete insecurity for every adversary of strength >= 4.
        for t in 4..=7usize {
            for xa in (0..7usize).combinations(t) {
                let (insecure, _) = completely_insecure_check(&l, &xa);
                expect!(insecure, "adversary {xa:?} is not completely insecure");
            }
        }
        Ok("2-block secure at t=0 and weakly secure at t=1 (both routes, all pairs); \
            a strength-2 attack exists; all 64 adversaries of strength >= 4 recover everything"
            .into())
    });
}

#[test]
fn criterion_03_equivalence_sweep() {
    check(3, "criterion/oracle equivalence", Some(Duration::from_secs(60)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1c5e);
        let mut instances = 0u32;
        let mut pairs = 0u64;
        for trial in 0..208u32 {
            let q = if trial % 2 == 0 { 2 } else { 3 };
            let field = Field::new(q, 1).unwrap();
            let n_max = if q == 2 { 6 } else { 5 };
            let n = 2 + (trial as usize / 2) % (n_max - 1);
            let cols = 1 + (trial as usize) % (n + 1);
            let l = MatGF::random(&mut rng, field, n, cols);
            instances += 1;
            // Every (adversary, block) split of [n]: digit 1 = adversary,
            // digit 2 = block, 0 = neither.
            let mut digits = vec![0u8; n];
            loop {
                let xa: Vec<usize> = (0..n).filter(|&i| digits[i] == 1).collect();
                let b: Vec<usize> = (0..n).filter(|&i| digits[i] == 2).collect();
                if !b.is_empty() {
                    pairs += 1;
                    let algebraic = has_no_information(&l, &xa, &b);
                    let counted = entropy_uniform_for_all(&l, &xa, &b, BUDGET).unwrap();
                    expect!(
                        algebraic == counted,
                        "disagreement: q={q} n={n} L={:?} xa={xa:?} b={b:?} \
                         algebraic={algebraic} counted={counted}",
                        l.entries().iter().map(|e| e.val()).collect::<Vec<_>>()
                    );
                }
                let mut i = 0;
                while i < n && digits[i] == 2 {
                    digits[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                digits[i] += 1;
            }
        }
        expect!(instances >= 200, "only {instances} instances");
        Ok(format!(
            "{instances} random encoders over gf(2)/gf(3), n up to 6: \
             algebraic criterion and counting oracle agree on all {pairs} (adversary, block) pairs"
        ))
    });
}

#[test]
fn criterion_04_orthogonal_array_property() {
    check(4, "orthogonal arrays", None, || {
        let (_, l) = hamming_setup();
        let f2 = Field::new(2, 1).unwrap();
        let f5 = Field::new(5, 1).unwrap();
        let mut suite: Vec<(String, LinearCode)> = Vec::new();
        let spanned = |l: &MatGF| {
            let cols: Vec<VecGF> = (0..l.cols()).map(|j| l.col(j)).collect();
            LinearCode::from_spanning(l.field(), &cols).unwrap()
        };
        let hamming = spanned(&l);
        suite.push(("hamming dual".into(), hamming.dual().unwrap()));
        suite.push(("hamming".into(), hamming));
        let sum_data = indexcode::load_code_file(&fixture("complete4_code.json")).unwrap();
        let rep = spanned(&sum_data.l);
        suite.push(("repetition dual".into(), rep.dual().unwrap()));
        suite.push(("repetition".into(), rep));
        let inst5 = IcsiInstance::load(&fixture("complete4_gf5.json")).unwrap();
        let ca = construct_a(&inst5, 1, 1, None, BIG_BUDGET).unwrap();
        suite.push(("spreading code".into(), LinearCode::from_generator(&ca.m).unwrap()));
        suite.push(("randomness rows".into(), LinearCode::from_generator(&ca.q_rows()).unwrap()));
        suite.push(("built encoder span".into(), spanned(ca.code.matrix())));
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for i in 0..6 {
            let field = if i % 2 == 0 { f2 } else { f5 };
            let m = MatGF::random(&mut rng, field, 3 + i % 3, 2 + i % 4);
            if let Ok(c) = LinearCode::from_generator(&m) {
                suite.push((format!("random {i}"), c));
            }
        }
        for (name, code) in &suite {
            let size = code.size();
            expect!(size <= 1 << 12, "{name} has q^k = {size}, out of scope");
            expect!(
                orthogonal_array_check(code, BUDGET).unwrap(),
                "{name} violates the orthogonal array property"
            );
        }
        Ok(format!(
            "{} codes (fixtures, duals, construction output, random): every r-tuple in every \
             r-column set, r < d_dual, appears exactly q^(k-r) times",
            suite.len()
        ))
    });
}

#[test]
fn criterion_05_list_size_counts() {
    check(5, "list sizes", None, || {
        let (inst, l) = hamming_setup();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<VecGF> = (0..8)
            .map(|_| icsec::icsi::random_vector(&mut rng, inst.field(), 7))
            .collect();
        for t in 0..=2usize {
            let expected = 1u64 << (3 - t);
            for xa in (0..7usize).combinations(t) {
                let b: Vec<usize> = (0..7).filter(|i| !xa.contains(i)).collect();
                for x in &xs {
                    let counts = entropy_oracle(&l, x, &xa, &b, BUDGET).unwrap();
                    expect!(
                        counts.total == expected,
                        "t={t}, adversary {xa:?}: {} consistent vectors, want {expected}",
                        counts.total
                    );
                }
            }
        }
        Ok("for t = 0,1,2 and all adversary sets, exactly 2^(3-t) message vectors \
            are consistent with the view"
            .into())
    });
}

#[test]
fn criterion_06_minimum_rank_cross_check() {
    check(6, "minimum rank vs fitting matrices", Some(Duration::from_secs(60)), || {
        let field = Field::new(2, 1).unwrap();
        let mut checked = 0u32;
        for n in 1..=4usize {
            // Every assignment of side-information sets to identity demands.
            let options: Vec<Vec<BTreeSet<usize>>> = (0..n)
                .map(|i| {
                    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                    (0..1u32 << others.len())
                        .map(|mask| {
                            others
                                .iter()
                                .enumerate()
                                .filter(|(k, _)| mask >> k & 1 == 1)
                                .map(|(_, &j)| j)
                                .collect()
                        })
                        .collect()
                })
                .collect();
            for combo in options.into_iter().multi_cartesian_product() {
                let receivers: Vec<Receiver> = combo
                    .into_iter()
                    .enumerate()
                    .map(|(i, side_info)| Receiver { demand: i, side_info, restricted: BTreeSet::new() })
                    .collect();
                let inst = IcsiInstance::new(field, n, receivers).unwrap();
                let fast = kappa_q(&inst, BUDGET).unwrap().kappa;
                let naive = minrank_fitting(&inst, BUDGET).unwrap();
                expect!(fast == naive, "disagreement on n={n}: search {fast}, fitting {naive}");
                checked += 1;
            }
        }
        let c4 = IcsiInstance::load(&fixture("complete4.json")).unwrap();
        let k2 = kappa_q(&c4, BUDGET).unwrap().kappa;
        let f2 = minrank_fitting(&c4, BUDGET).unwrap();
        let c45 = IcsiInstance::load(&fixture("complete4_gf5.json")).unwrap();
        let k5 = kappa_q(&c45, BIG_BUDGET).unwrap().kappa;
        expect!(k2 == 1 && f2 == 1 && k5 == 1, "complete instance ranks: {k2}/{f2}/{k5}");
        Ok(format!(
            "all {checked} identity-demand instances with n <= 4 over gf(2) agree; \
             the complete 4-message instance has minimum rank 1 at q=2 and q=5"
        ))
    });
}

#[test]
fn criterion_07_construction_end_to_end() {
    check(7, "coset construction end to end", Some(Duration::from_secs(300)), || {
        let inst = IcsiInstance::load(&fixture("complete4_gf5.json")).unwrap();
        let field = inst.field();
        let ca = construct_a(&inst, 1, 1, None, BIG_BUDGET).map_err(|e| e.to_string())?;
        expect!(ca.kappa == 1, "kappa = {}", ca.kappa);
        expect!(ca.code.length() == 4, "N = {}", ca.code.length());
        expect!(ca.code.eta() == 1, "eta = {}", ca.code.eta());
        // Exhaustive error-correction sweep: every message, every randomness,
        // every single-coordinate error (all positions, all values).
        let mut decodes = 0u64;
        for x in enumerate_vectors(field, 4) {
            let sides: Vec<BTreeMap<usize, Fe>> = (0..4)
                .map(|i| inst.side_info(i).iter().map(|&j| (j, x.get(j))).collect())
                .collect();
            for g in enumerate_vectors(field, 1) {
                let s = ca.code.encode(&x, &g).unwrap();
                for pos in 0..4 {
                    for ev in field.nonzero_elements() {
                        let mut y = s.clone();
                        y.set(pos, field.add(y.get(pos), ev));
                        for i in 0..4 {
                            let got = ca.decode(i, &y, &sides[i], BUDGET).map_err(|e| {
                                format!("decode failed at x={:?} g={:?} pos={pos}: {e}", x.vals(), g.vals())
                            })?;
                            expect!(
                                got == x.get(i),
                                "receiver {} wrong under error at {pos}: x={:?} g={:?}",
                                i + 1, x.vals(), g.vals()
                            );
                            decodes += 1;
                        }
                    }
                }
            }
        }
        expect!(decodes == 625 * 5 * 16 * 4, "decode count {decodes}");
        // Exact strong security at mu = 1, t = 1 over the full (x, g) space.
        let secure = verify_strong_security(&ca.code, 1, 1, BUDGET).map_err(|e| e.to_string())?;
        expect!(secure, "construction output is not (1,1)-strongly secure");
        Ok(format!(
            "N = 4 = kappa+mu+2delta; {decodes} single-error decodes all correct \
             (625 messages x 5 randomness x 16 errors x 4 receivers); \
             exact counting confirms (1,1)-strong security"
        ))
    });
}

#[test]
fn criterion_08_length_lower_bound_falsification() {
    check(8, "length lower bound", Some(Duration::from_secs(60)), || {
        let field = Field::new(2, 1).unwrap();
        let mut searched = 0u64;
        // All 2-message instances with identity demands.
        for (x0, x1) in [(false, false), (false, true), (true, false), (true, true)] {
            let receivers = vec![
                Receiver {
                    demand: 0,
                    side_info: if x0 { [1].into() } else { BTreeSet::new() },
                    restricted: BTreeSet::new(),
                },
                Receiver {
                    demand: 1,
                    side_info: if x1 { [0].into() } else { BTreeSet::new() },
                    restricted: BTreeSet::new(),
                },
            ];
            let inst = IcsiInstance::new(field, 2, receivers).unwrap();
            let kappa = kappa_q(&inst, BUDGET).unwrap().kappa;
            for short_n in 1..kappa + 1 {
                for eta in 0..=2usize {
                    let rows = 2 + eta;
                    for bits in 0..1u64 << (rows * short_n) {
                        let vals: Vec<u64> =
                            (0..rows * short_n).map(|k| bits >> k & 1).collect();
                        let l = MatGF::from_vals(field, rows, short_n, &vals).unwrap();
                        let code = RandomizedIndexCode::new(inst.clone(), eta, l).unwrap();
                        searched += 1;
                        if code.is_valid_exhaustive(BUDGET).unwrap()
                            && verify_strong_security(&code, 1, 0, BUDGET).unwrap()
                        {
                            return Err(format!(
                                "found a (1,0)-strongly secure code shorter than kappa+1: \
                                 side=({x0},{x1}) N={short_n} eta={eta} bits={bits:#x}"
                            ));
                        }
                    }
                }
            }
        }
        Ok(format!(
            "exhausted {searched} candidate encoders (q=2, n=2, eta <= 2, N < kappa+1): \
             none is valid and (1,0)-strongly secure, so N >= kappa + mu stands"
        ))
    });
}

#[test]
fn criterion_09_restricted_information() {
    check(9, "restricted information", None, || {
        let inst = IcsiInstance::load(&fixture("hamming7_restricted.json")).unwrap();
        let data = indexcode::load_code_file(&fixture("hamming7_code.json")).unwrap();
        let code = IndexCode::new(inst, data.l).unwrap();
        expect!(icsri_valid(&code), "the restricted 7-message fixture should validate");
        // Demanding message 2 while forbidding message 1 is unsatisfiable
        // when receiver 1 must decode from {2}: every valid span contains
        // e_2 and e_1 + a e_2 for some a, hence e_1.
        let receivers = vec![
            Receiver { demand: 0, side_info: [1].into(), restricted: BTreeSet::new() },
            Receiver { demand: 1, side_info: BTreeSet::new(), restricted: [0].into() },
        ];
        let inf = IcsiInstance::new(Field::new(2, 1).unwrap(), 2, receivers).unwrap();
        expect!(
            kappa_star(&inf, BUDGET).unwrap().is_none(),
            "the unsatisfiable instance produced a finite rank"
        );
        // Without restrictions the two searches coincide.
        let c4 = IcsiInstance::load(&fixture("complete4.json")).unwrap();
        let star = kappa_star(&c4, BUDGET).unwrap().ok_or("complete instance infeasible?")?;
        expect!(star.kappa == kappa_q(&c4, BUDGET).unwrap().kappa, "kappa* != kappa");
        Ok("restricted 7-message fixture validates; the contradictory 2-message instance \
            has no linear code of any length; restriction-free search matches plain minimum rank"
            .into())
    });
}

#[test]
fn criterion_10_scope() {
    check(10, "scope", None, || {
        Ok("no excluded results: every guarantee the library claims is checked exactly, \
            at desk scale, by criteria 1-9"
            .into())
    });
}
