//! Nearest-neighbor classification over compression distances.
//!
//! Evaluation is split so that the std side can compute distances in
//! parallel: [`plan_trials`] decides references and tests for each trial,
//! [`score_trials`] classifies given a distance lookup.
//!
//! The distance between a reference `r` and a test document `t` is
//! `NCD(J(r, t))`: the reference is always the first argument.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::CompressorSpec;
use crate::combiner::CombinerSpec;

pub const DEFAULT_TRIALS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub compressor: CompressorSpec,
    pub combiner: CombinerSpec,
    pub k: usize,
    pub references_per_class: usize,
    /// Only documents at most this large may be drawn as references.
    #[serde(default)]
    pub reference_max_size_bytes: Option<u64>,
    /// Only documents at most this large are classified.
    #[serde(default)]
    pub test_max_size_bytes: Option<u64>,
    pub seed: u64,
    pub trials: usize,
}

impl ExperimentConfig {
    /// 1-NN, one reference per class, no size filters, default trial count.
    pub fn new(compressor: CompressorSpec, combiner: CombinerSpec, seed: u64) -> Self {
        ExperimentConfig {
            compressor,
            combiner,
            k: 1,
            references_per_class: 1,
            reference_max_size_bytes: None,
            test_max_size_bytes: None,
            seed,
            trials: DEFAULT_TRIALS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("references_per_class must be at least 1")]
    ZeroReferences,
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("corpus has no labeled documents")]
    EmptyCorpus,
    #[error("document `{0}` has no label")]
    Unlabeled(String),
    #[error("k = {k} exceeds references_per_class x classes = {available}")]
    KTooLarge { k: usize, available: usize },
    #[error(
        "class `{class}` is too small after filters: {reference_eligible} reference-eligible, \
         {members} usable members, need {needed} references plus one test document"
    )]
    ClassTooSmall {
        class: String,
        reference_eligible: usize,
        members: usize,
        needed: usize,
    },
    #[error("trial {0} has no test documents after filters")]
    NoTests(usize),
}

/// What the protocol needs to know about a document.
#[derive(Clone, Copy, Debug)]
pub struct DocMeta<'a> {
    pub id: &'a str,
    pub label: Option<&'a str>,
    pub size_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trial: usize,
    /// Indices into the corpus, sorted by document id.
    pub references: Vec<usize>,
    /// Indices into the corpus, sorted by document id.
    pub tests: Vec<usize>,
}

fn within(limit: Option<u64>, size: u64) -> bool {
    limit.is_none_or(|l| size <= l)
}

/// Draws references for every trial. Depends only on the corpus, the
/// seed, the reference count and the size filters, so every compressor
/// and combiner evaluated with the same config sees the same draws.
pub fn plan_trials(docs: &[DocMeta<'_>], config: &ExperimentConfig) -> Result<Vec<TrialPlan>, ConfigError> {
    if config.k == 0 {
        return Err(ConfigError::ZeroK);
    }
    if config.references_per_class == 0 {
        return Err(ConfigError::ZeroReferences);
    }
    if config.trials == 0 {
        return Err(ConfigError::ZeroTrials);
    }
    if docs.is_empty() {
        return Err(ConfigError::EmptyCorpus);
    }
    let mut by_id: Vec<usize> = (0..docs.len()).collect();
    by_id.sort_by(|&a, &b| docs[a].id.cmp(docs[b].id));

    let mut classes: BTreeMap<&str, (Vec<usize>, usize)> = BTreeMap::new();
    for &i in &by_id {
        let d = &docs[i];
        let label = d.label.ok_or_else(|| ConfigError::Unlabeled(d.id.to_string()))?;
        let entry = classes.entry(label).or_default();
        let ref_ok = within(config.reference_max_size_bytes, d.size_bytes);
        let test_ok = within(config.test_max_size_bytes, d.size_bytes);
        if ref_ok {
            entry.0.push(i);
        }
        if ref_ok || test_ok {
            entry.1 += 1;
        }
    }
    let available = config.references_per_class * classes.len();
    if config.k > available {
        return Err(ConfigError::KTooLarge { k: config.k, available });
    }
    for (class, (pool, members)) in &classes {
        if pool.len() < config.references_per_class || *members < config.references_per_class + 1 {
            return Err(ConfigError::ClassTooSmall {
                class: class.to_string(),
                reference_eligible: pool.len(),
                members: *members,
                needed: config.references_per_class,
            });
        }
    }

    let mut plans = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let mut refs = BTreeSet::new();
        for (pool, _) in classes.values() {
            let mut pool = pool.clone();
            let (picked, _) = pool.partial_shuffle(&mut rng, config.references_per_class);
            refs.extend(picked.iter().copied());
        }
        let references: Vec<usize> = by_id.iter().copied().filter(|i| refs.contains(i)).collect();
        let tests: Vec<usize> = by_id
            .iter()
            .copied()
            .filter(|i| !refs.contains(i) && within(config.test_max_size_bytes, docs[*i].size_bytes))
            .collect();
        if tests.is_empty() {
            return Err(ConfigError::NoTests(trial));
        }
        plans.push(TrialPlan {
            trial,
            references,
            tests,
        });
    }
    Ok(plans)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor<'a> {
    pub reference_id: &'a str,
    pub label: &'a str,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vote<'a> {
    pub label: &'a str,
    pub nearest_reference_id: &'a str,
    pub distance: f64,
}

/// k-NN vote. Neighbors are ranked by (distance, reference id). The
/// majority label among the first `k` wins; equal counts go to the
/// smaller summed distance, then to the label holding the earliest
/// reference id. Returns `None` only for an empty neighbor list.
pub fn knn_vote<'a>(neighbors: &[Neighbor<'a>], k: usize) -> Option<Vote<'a>> {
    let mut ranked: Vec<Neighbor<'a>> = neighbors.to_vec();
    ranked.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.reference_id.cmp(b.reference_id))
    });
    ranked.truncate(k.max(1));
    // label -> (count, summed distance, smallest reference id)
    let mut tally: BTreeMap<&str, (usize, f64, &str)> = BTreeMap::new();
    for n in &ranked {
        let e = tally.entry(n.label).or_insert((0, 0.0, n.reference_id));
        e.0 += 1;
        e.1 += n.distance;
        if n.reference_id < e.2 {
            e.2 = n.reference_id;
        }
    }
    let (label, _) = tally.iter().min_by(|(_, a), (_, b)| {
        b.0.cmp(&a.0)
            .then_with(|| a.1.total_cmp(&b.1))
            .then_with(|| a.2.cmp(b.2))
    })?;
    let nearest = ranked.iter().find(|n| n.label == *label)?;
    Some(Vote {
        label,
        nearest_reference_id: nearest.reference_id,
        distance: nearest.distance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub trial: usize,
    pub test_id: String,
    pub true_label: String,
    pub predicted_label: String,
    pub nearest_reference_id: String,
    pub distance: f64,
}

impl Prediction {
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted_label
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub config: ExperimentConfig,
    /// Reference ids drawn in each trial.
    pub references: Vec<Vec<String>>,
    pub predictions: Vec<Prediction>,
    pub trial_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of the trial accuracies (0 for one trial).
    pub accuracy_std: f64,
    pub correct: u64,
    pub total: u64,
    /// Pooled `correct / total` over all trials.
    pub accuracy: f64,
    /// true label -> predicted label -> count, pooled over trials.
    pub confusion: BTreeMap<String, BTreeMap<String, u64>>,
}

#[derive(Debug, PartialEq)]
pub enum EvalError<E> {
    Config(ConfigError),
    Distance { reference: String, test: String, source: E },
}

impl<E: fmt::Display> fmt::Display for EvalError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Config(e) => write!(f, "{e}"),
            EvalError::Distance {
                reference,
                test,
                source,
            } => {
                write!(
                    f,
                    "distance between reference `{reference}` and `{test}` failed: {source}"
                )
            }
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for EvalError<E> {}

impl<E> From<ConfigError> for EvalError<E> {
    fn from(e: ConfigError) -> Self {
        EvalError::Config(e)
    }
}

/// Classifies every planned test document. `distance(reference, test)`
/// receives corpus indices.
pub fn score_trials<E>(
    docs: &[DocMeta<'_>],
    config: &ExperimentConfig,
    plans: &[TrialPlan],
    mut distance: impl FnMut(usize, usize) -> Result<f64, E>,
) -> Result<ClassificationResult, EvalError<E>> {
    let label_of = |i: usize| {
        docs[i]
            .label
            .ok_or_else(|| ConfigError::Unlabeled(docs[i].id.to_string()))
    };
    let mut predictions = Vec::new();
    let mut trial_accuracies = Vec::with_capacity(plans.len());
    let mut confusion: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut correct = 0u64;
    let mut references = Vec::with_capacity(plans.len());
    for plan in plans {
        references.push(plan.references.iter().map(|&r| docs[r].id.to_string()).collect());
        let mut trial_correct = 0usize;
        for &t in &plan.tests {
            let mut neighbors = Vec::with_capacity(plan.references.len());
            for &r in &plan.references {
                let d = distance(r, t).map_err(|source| EvalError::Distance {
                    reference: docs[r].id.to_string(),
                    test: docs[t].id.to_string(),
                    source,
                })?;
                neighbors.push(Neighbor {
                    reference_id: docs[r].id,
                    label: label_of(r)?,
                    distance: d,
                });
            }
            let vote = knn_vote(&neighbors, config.k).expect("plans always carry references");
            let truth = label_of(t)?;
            let p = Prediction {
                trial: plan.trial,
                test_id: docs[t].id.to_string(),
                true_label: truth.to_string(),
                predicted_label: vote.label.to_string(),
                nearest_reference_id: vote.nearest_reference_id.to_string(),
                distance: vote.distance,
            };
            if p.is_correct() {
                trial_correct += 1;
            }
            *confusion
                .entry(p.true_label.clone())
                .or_default()
                .entry(p.predicted_label.clone())
                .or_default() += 1;
            predictions.push(p);
        }
        correct += trial_correct as u64;
        trial_accuracies.push(trial_correct as f64 / plan.tests.len() as f64);
    }
    let total = predictions.len() as u64;
    let n = trial_accuracies.len() as f64;
    let mean = trial_accuracies.iter().sum::<f64>() / n;
    let std = if trial_accuracies.len() > 1 {
        let var = trial_accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0);
        libm::sqrt(var)
    } else {
        0.0
    };
    Ok(ClassificationResult {
        config: config.clone(),
        references,
        predictions,
        trial_accuracies,
        mean_accuracy: mean,
        accuracy_std: std,
        correct,
        total,
        accuracy: correct as f64 / total as f64,
        confusion,
    })
}
