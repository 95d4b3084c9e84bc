//! Seeded random automata and the bucket-balanced dataset builder.
//!
//! Random automata extend the Erdős–Rényi `G(n, p)` model per symbol: each of
//! the `n·n·s` candidate transitions is kept independently with probability
//! `p`, and each state is accepting with probability `p_acc`.
//!
//! Datasets are filled by rejection sampling into fixed per-bucket quotas.
//! Half the items satisfy the property. For `min1b`/`infb` the positive half
//! is split evenly by minimal accepting cycle length (1, 2, 3+); for
//! `emptiness` the empty half is split by emptiness sub-class and the
//! non-empty half by cycle length.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::{Nbw, Transition};
use crate::dataset::{Dataset, DatasetHeader, DatasetRecord};
use crate::encoding::InitMode;
use crate::error::{GeneratorError, OracleError};
use crate::oracle::{check_property, emptiness_subclass, EmptinessSubclass, Property, PropertyKind};
use crate::rng::{self, mix, rng_from_seed};

/// Draws are evaluated in parallel in blocks of this many counters and then
/// admitted in counter order.
const DRAW_BLOCK: u64 = 2048;

/// Salt separating the output shuffle stream from the item streams.
const SHUFFLE_SALT: u64 = 0x5348_5546_464c_4521;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n_min: usize,
    pub n_max: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub pacc_min: f64,
    pub pacc_max: f64,
    pub num_symbols: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    /// The fixed experimental settings: 3..9 states, `p ∈ [0.1, 0.3]`,
    /// `p_acc ∈ [0.1, 0.15]`, alphabet `{a, b}`.
    fn default() -> Self {
        Self {
            n_min: 3,
            n_max: 9,
            p_min: 0.1,
            p_max: 0.3,
            pacc_min: 0.1,
            pacc_max: 0.15,
            num_symbols: 2,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |msg: String| Err(GeneratorError::InvalidParams(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n_min < 1 || self.n_min > self.n_max {
            return bad(format!("need 1 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max));
        }
        if !(unit(self.p_min) && unit(self.p_max) && self.p_min <= self.p_max) {
            return bad(format!("need 0 <= p_min <= p_max <= 1, got {}..{}", self.p_min, self.p_max));
        }
        if !(unit(self.pacc_min) && unit(self.pacc_max) && self.pacc_min <= self.pacc_max) {
            return bad(format!(
                "need 0 <= pacc_min <= pacc_max <= 1, got {}..{}",
                self.pacc_min, self.pacc_max
            ));
        }
        if self.num_symbols == 0 {
            return bad("num_symbols must be positive".into());
        }
        Ok(())
    }
}

/// Draws one automaton. Deterministic in `(params, item_seed)`; `params.seed`
/// is not consulted here.
pub fn random_nbw(params: &GeneratorParams, item_seed: u64) -> Nbw {
    let mut r = rng_from_seed(item_seed);
    let n = rng::uniform_usize(&mut r, params.n_min, params.n_max);
    let p = rng::uniform_f64(&mut r, params.p_min, params.p_max);
    let p_acc = rng::uniform_f64(&mut r, params.pacc_min, params.pacc_max);
    let s = params.num_symbols;
    let mut transitions = Vec::new();
    for src in 0..n {
        for sym in 0..s {
            for dst in 0..n {
                if rng::unit_f64(&mut r) < p {
                    transitions.push(Transition::new(src, sym, dst));
                }
            }
        }
    }
    let accepting: Vec<_> = (0..n).filter(|_| rng::unit_f64(&mut r) < p_acc).collect();
    Nbw::new(n, s, transitions, accepting).expect("generated indices in range")
}

/// Balancing bucket of one automaton for one property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BucketId {
    Negative,
    PosLen1,
    PosLen2,
    PosLen3Plus,
    NoAcceptingStates,
    AcceptingUnreachable,
    AcceptingNotSelfReachable,
    NonEmptyLen1,
    NonEmptyLen2,
    NonEmptyLen3Plus,
}

impl BucketId {
    /// Buckets used by `kind`, in quota order.
    pub fn for_property(kind: PropertyKind) -> [BucketId; 6] {
        use BucketId::*;
        match kind {
            // Negative is listed three times so the layout matches the
            // six-way split; see `quotas`.
            PropertyKind::Min1B | PropertyKind::InfB => {
                [PosLen1, PosLen2, PosLen3Plus, Negative, Negative, Negative]
            }
            PropertyKind::IsEmpty => [
                NoAcceptingStates,
                AcceptingUnreachable,
                AcceptingNotSelfReachable,
                NonEmptyLen1,
                NonEmptyLen2,
                NonEmptyLen3Plus,
            ],
        }
    }
}

impl fmt::Display for BucketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn length_bucket(len: usize, buckets: [BucketId; 3]) -> BucketId {
    match len {
        1 => buckets[0],
        2 => buckets[1],
        _ => buckets[2],
    }
}

/// Bucket of `a` under property `p`.
pub fn bucket_of(a: &Nbw, p: Property) -> Result<BucketId, OracleError> {
    use BucketId::*;
    let holds = check_property(a, p)?;
    Ok(match p.kind {
        PropertyKind::Min1B | PropertyKind::InfB => {
            if !holds {
                Negative
            } else {
                let len = a.min_accepting_cycle_length().expect("non-empty language has a cycle");
                length_bucket(len, [PosLen1, PosLen2, PosLen3Plus])
            }
        }
        PropertyKind::IsEmpty => match emptiness_subclass(a) {
            EmptinessSubclass::NoAcceptingStates => NoAcceptingStates,
            EmptinessSubclass::AcceptingUnreachable => AcceptingUnreachable,
            EmptinessSubclass::AcceptingNotSelfReachable => AcceptingNotSelfReachable,
            EmptinessSubclass::NonEmpty => {
                let len = a.min_accepting_cycle_length().expect("non-empty language has a cycle");
                length_bucket(len, [NonEmptyLen1, NonEmptyLen2, NonEmptyLen3Plus])
            }
        },
    })
}

/// Per-bucket quotas for a dataset of `size` items (`size` even).
///
/// Each half is split three ways; when `size/2` is not a multiple of 3 the
/// remainder goes to the earlier buckets.
pub fn quotas(kind: PropertyKind, size: usize) -> BTreeMap<BucketId, usize> {
    let half = size / 2;
    let third = |i: usize| half / 3 + usize::from(i < half % 3);
    let mut q = BTreeMap::new();
    for (i, b) in BucketId::for_property(kind).into_iter().enumerate() {
        *q.entry(b).or_insert(0) += third(i % 3);
    }
    q
}

/// Everything needed to rebuild a dataset bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub property: Property,
    pub size: usize,
    pub gen: GeneratorParams,
    pub n_add: usize,
    pub init_mode: InitMode,
    pub max_attempts_per_slot: u64,
}

impl DatasetSpec {
    pub fn new(kind: PropertyKind, size: usize, gen: GeneratorParams) -> Self {
        Self {
            property: Property::new(kind),
            size,
            gen,
            n_add: 3,
            init_mode: InitMode::Half,
            max_attempts_per_slot: 20_000,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        self.gen.validate()?;
        if self.size == 0 || !self.size.is_multiple_of(2) {
            return Err(GeneratorError::InvalidParams(format!(
                "dataset size must be positive and even, got {}",
                self.size
            )));
        }
        if self.max_attempts_per_slot == 0 {
            return Err(GeneratorError::InvalidParams("max_attempts_per_slot must be positive".into()));
        }
        if self.property.kind != PropertyKind::IsEmpty && self.property.target_symbol >= self.gen.num_symbols {
            return Err(OracleError::TargetOutOfRange {
                target: self.property.target_symbol,
                num_symbols: self.gen.num_symbols,
            }
            .into());
        }
        Ok(())
    }

    /// `property_d_nmin_nmax`, e.g. `infb_1000_3_9`.
    pub fn name(&self) -> String {
        dataset_name(self.property.kind, self.size, self.gen.n_min, self.gen.n_max)
    }
}

pub fn dataset_name(kind: PropertyKind, size: usize, n_min: usize, n_max: usize) -> String {
    format!("{}_{}_{}_{}", kind.name(), size, n_min, n_max)
}

/// Rejection-samples a balanced dataset. The result depends on `spec` only,
/// never on the number of worker threads.
pub fn build_balanced_dataset(spec: &DatasetSpec) -> Result<Dataset, GeneratorError> {
    spec.validate()?;
    let target = quotas(spec.property.kind, spec.size);
    let mut filled: BTreeMap<BucketId, usize> = target.keys().map(|&b| (b, 0)).collect();
    let mut remaining = spec.size;
    let mut records = Vec::with_capacity(spec.size);
    let budget = spec.max_attempts_per_slot.saturating_mul(spec.size as u64);

    let mut counter = 0u64;
    while remaining > 0 && counter < budget {
        let end = (counter + DRAW_BLOCK).min(budget);
        let block: Vec<(u64, Nbw, BucketId)> = (counter..end)
            .into_par_iter()
            .map(|c| {
                let item_seed = mix(spec.gen.seed, c);
                let a = random_nbw(&spec.gen, item_seed);
                let b = bucket_of(&a, spec.property)?;
                Ok((item_seed, a, b))
            })
            .collect::<Result<_, OracleError>>()?;
        for (item_seed, nbw, bucket) in block {
            let slot = filled.get_mut(&bucket).expect("bucket belongs to property");
            if *slot < target[&bucket] {
                *slot += 1;
                remaining -= 1;
                let label = is_positive(spec.property.kind, bucket);
                records.push(DatasetRecord { nbw, label, bucket, item_seed });
                if remaining == 0 {
                    break;
                }
            }
        }
        counter = end;
    }

    if remaining > 0 {
        let (bucket, got) = filled
            .iter()
            .map(|(b, &f)| (*b, f))
            .find(|(b, f)| *f < target[b])
            .expect("some bucket unfilled");
        return Err(GeneratorError::Starved {
            bucket,
            filled: got,
            quota: target[&bucket],
            draws: counter,
        });
    }

    records.shuffle(&mut rng_from_seed(mix(spec.gen.seed ^ SHUFFLE_SALT, 0)));
    Ok(Dataset {
        header: DatasetHeader::new(*spec, target),
        records,
    })
}

/// Label implied by a bucket: 1 iff the property holds.
pub fn is_positive(kind: PropertyKind, bucket: BucketId) -> bool {
    use BucketId::*;
    match kind {
        PropertyKind::IsEmpty => matches!(
            bucket,
            NoAcceptingStates | AcceptingUnreachable | AcceptingNotSelfReachable
        ),
        _ => bucket != Negative,
    }
}
