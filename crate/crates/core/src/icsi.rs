//! Broadcast-with-side-information problem instances.
//!
//! An instance has n messages over a field and m receivers; receiver i
//! demands message f(i) and already holds the messages in its side
//! information set X_i, with f(i) not in X_i. Optionally each receiver
//! carries a restriction set Z_i of messages it must NOT be able to learn;
//! Z_i must avoid X_i and f(i).
//!
//! The JSON file format uses 1-based message indices; the API is 0-based
//! throughout, with the conversion confined to load/save.

use crate::gf::{Fe, Field, FieldError};
use crate::matlin::VecGF;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("declared m={declared} but {actual} receivers listed")]
    ReceiverCountMismatch { declared: usize, actual: usize },
    #[error("receiver {receiver}: message index {index} out of range 1..={n}")]
    IndexOutOfRange { receiver: usize, index: u64, n: usize },
    #[error("receiver {receiver}: demand lies in its own side information")]
    InvalidDemand { receiver: usize },
    #[error("receiver {receiver}: duplicate index in {which}")]
    DuplicateIndex { receiver: usize, which: &'static str },
    #[error("receiver {receiver}: restricted set meets side information or demand")]
    RestrictionOverlap { receiver: usize },
}

/// One receiver: demanded message, held messages, forbidden messages.
/// All indices 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub demand: usize,
    pub side_info: BTreeSet<usize>,
    pub restricted: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcsiInstance {
    field: Field,
    n: usize,
    receivers: Vec<Receiver>,
}

fn validate_receiver(r: &Receiver, idx: usize, n: usize) -> Result<(), InstanceError> {
    let rcv = idx + 1; // error messages use the 1-based position
    let check = |i: usize| -> Result<(), InstanceError> {
        if i >= n {
            Err(InstanceError::IndexOutOfRange { receiver: rcv, index: i as u64 + 1, n })
        } else {
            Ok(())
        }
    };
    check(r.demand)?;
    for &i in r.side_info.iter().chain(r.restricted.iter()) {
        check(i)?;
    }
    if r.side_info.contains(&r.demand) {
        return Err(InstanceError::InvalidDemand { receiver: rcv });
    }
    if r.restricted.contains(&r.demand) || !r.restricted.is_disjoint(&r.side_info) {
        return Err(InstanceError::RestrictionOverlap { receiver: rcv });
    }
    Ok(())
}

impl IcsiInstance {
    pub fn new(field: Field, n: usize, receivers: Vec<Receiver>) -> Result<IcsiInstance, InstanceError> {
        for (i, r) in receivers.iter().enumerate() {
            validate_receiver(r, i, n)?;
        }
        Ok(IcsiInstance { field, n, receivers })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Message count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Receiver count.
    pub fn m(&self) -> usize {
        self.receivers.len()
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn receiver(&self, i: usize) -> &Receiver {
        &self.receivers[i]
    }

    pub fn demand(&self, i: usize) -> usize {
        self.receivers[i].demand
    }

    pub fn side_info(&self, i: usize) -> &BTreeSet<usize> {
        &self.receivers[i].side_info
    }

    pub fn restricted(&self, i: usize) -> &BTreeSet<usize> {
        &self.receivers[i].restricted
    }

    pub fn has_restrictions(&self) -> bool {
        self.receivers.iter().any(|r| !r.restricted.is_empty())
    }

    /// Coordinates unknown to receiver i other than its demand:
    /// the complement of X_i and f(i).
    pub fn free_coords(&self, i: usize) -> BTreeSet<usize> {
        let r = &self.receivers[i];
        (0..self.n)
            .filter(|j| *j != r.demand && !r.side_info.contains(j))
            .collect()
    }

    /// True iff z is invisible to some receiver's side information while
    /// touching its demand: z zero on X_i and nonzero at f(i) for some i.
    /// Exactly these vectors must stay distinguishable under the encoder.
    pub fn interferes(&self, z: &VecGF) -> bool {
        debug_assert_eq!(z.len(), self.n);
        self.receivers.iter().any(|r| {
            !z.get(r.demand).is_zero() && r.side_info.iter().all(|&j| z.get(j).is_zero())
        })
    }

    /// All vectors z with z zero on X_i and z nonzero at f(i), for one
    /// receiver: q^{|free|} * (q-1) of them. Enumerated deterministically.
    pub fn interference_vectors(&self, i: usize) -> impl Iterator<Item = VecGF> + '_ {
        let free: Vec<usize> = self.free_coords(i).into_iter().collect();
        let demand = self.demand(i);
        let field = self.field;
        let n = self.n;
        let free_sz = crate::matlin::space_size(field.q(), free.len())
            .expect("interference space too large");
        (1..field.q() as u128 * free_sz).filter_map(move |raw| {
            // raw = a * free_sz + idx, a in 1..q (values at the demand), idx over free coords.
            let a = (raw / free_sz) as u32;
            let idx = raw % free_sz;
            if a == 0 {
                return None;
            }
            let fv = crate::matlin::index_to_vector(field, free.len(), idx);
            let mut z = VecGF::zeros(field, n);
            z.set(demand, field.elem(a as u64).unwrap());
            for (slot, &pos) in free.iter().enumerate() {
                z.set(pos, fv.get(slot));
            }
            Some(z)
        })
    }

    /// Size of the joint side-information choice space, the brute-force unit
    /// for minimum-rank style searches: product of q^{|X_i|}.
    pub fn choice_space(&self) -> Option<u128> {
        let q = self.field.q() as u128;
        let mut total = 1u128;
        for r in &self.receivers {
            total = total.checked_mul(q.checked_pow(r.side_info.len() as u32)?)?;
        }
        Some(total)
    }

    pub fn load(path: &std::path::Path) -> Result<IcsiInstance, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        IcsiInstance::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<IcsiInstance, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let field = Field::parse_spec(&file.field)?;
        let n = file.n as usize;
        if file.m as usize != file.receivers.len() {
            return Err(InstanceError::ReceiverCountMismatch {
                declared: file.m as usize,
                actual: file.receivers.len(),
            });
        }
        let mut receivers = Vec::with_capacity(file.receivers.len());
        for (idx, r) in file.receivers.iter().enumerate() {
            let rcv = idx + 1;
            let conv = |list: &[u64], which: &'static str| -> Result<BTreeSet<usize>, InstanceError> {
                let mut out = BTreeSet::new();
                for &v in list {
                    if v < 1 || v > n as u64 {
                        return Err(InstanceError::IndexOutOfRange { receiver: rcv, index: v, n });
                    }
                    if !out.insert((v - 1) as usize) {
                        return Err(InstanceError::DuplicateIndex { receiver: rcv, which });
                    }
                }
                Ok(out)
            };
            if r.demand < 1 || r.demand > n as u64 {
                return Err(InstanceError::IndexOutOfRange { receiver: rcv, index: r.demand, n });
            }
            receivers.push(Receiver {
                demand: (r.demand - 1) as usize,
                side_info: conv(&r.side_info, "side_info")?,
                restricted: conv(r.restricted.as_deref().unwrap_or(&[]), "restricted")?,
            });
        }
        IcsiInstance::new(field, n, receivers)
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            field: self.field.spec_string(),
            n: self.n as u32,
            m: self.m() as u32,
            receivers: self
                .receivers
                .iter()
                .map(|r| ReceiverFile {
                    demand: r.demand as u64 + 1,
                    side_info: r.side_info.iter().map(|&i| i as u64 + 1).collect(),
                    restricted: if r.restricted.is_empty() {
                        None
                    } else {
                        Some(r.restricted.iter().map(|&i| i as u64 + 1).collect())
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), InstanceError> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    field: String,
    n: u32,
    m: u32,
    receivers: Vec<ReceiverFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReceiverFile {
    demand: u64,
    side_info: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restricted: Option<Vec<u64>>,
}

/// A receiver demanding a set of messages; used as input to
/// `split_multi_demand`. Indices 0-based.
#[derive(Debug, Clone)]
pub struct MultiDemandReceiver {
    pub demands: BTreeSet<usize>,
    pub side_info: BTreeSet<usize>,
}

/// Rewrite multi-demand receivers as one single-demand receiver per demanded
/// message, all sharing the original side information. Receivers demanding
/// nothing are dropped. Decoding ability is unchanged: a receiver learns a
/// set of messages iff it learns each one.
pub fn split_multi_demand(
    field: Field,
    n: usize,
    receivers: &[MultiDemandReceiver],
) -> Result<IcsiInstance, InstanceError> {
    let mut out = Vec::new();
    for r in receivers {
        for &d in &r.demands {
            out.push(Receiver {
                demand: d,
                side_info: r.side_info.clone(),
                restricted: BTreeSet::new(),
            });
        }
    }
    IcsiInstance::new(field, n, out)
}

/// Uniform random instance for randomized testing: each receiver demands a
/// uniform message and holds each other message independently with
/// probability 1/2. Restrictions are left empty.
pub fn random_instance<R: rand::Rng>(rng: &mut R, field: Field, n: usize, m: usize) -> IcsiInstance {
    let receivers = (0..m)
        .map(|_| {
            let demand = rng.gen_range(0..n);
            let side_info = (0..n)
                .filter(|&j| j != demand && rng.gen_bool(0.5))
                .collect();
            Receiver { demand, side_info, restricted: BTreeSet::new() }
        })
        .collect();
    IcsiInstance::new(field, n, receivers).expect("generated receivers are valid by construction")
}

/// Uniform random message vector.
pub fn random_vector<R: rand::Rng>(rng: &mut R, field: Field, len: usize) -> VecGF {
    let mut v = VecGF::zeros(field, len);
    for i in 0..len {
        v.set(i, field.elem(rng.gen_range(0..field.q()) as u64).unwrap());
    }
    v
}

/// Convenience: the unit-vector sum encoding of a set.
pub fn set_indicator(field: Field, n: usize, set: &BTreeSet<usize>) -> VecGF {
    let mut v = VecGF::zeros(field, n);
    for &i in set {
        v.set(i, Fe::ONE);
    }
    v
}
