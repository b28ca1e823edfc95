//! Exhaustive round-trip campaigns: every defective set of at most `d`
//! columns, every allowed error pattern, one decode per case.

use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{count_error_patterns, inject_random, support_signature, syndrome, DefectiveSet, ErrorPatterns, TestOutcome};
use crate::codebook::SqgtCode;
use crate::decoders::{decode, recover_support};
use crate::error::{Error, Result};

/// Default cap on decoded cases per campaign.
pub const DEFAULT_CASE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignErrors {
    /// Every pattern of at most `injected` changed coordinates.
    Exhaustive,
    /// `samples` patterns of exactly `injected` changes per defective set.
    Random { seed: u64, samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Errors injected per outcome; above the code's `e` is a stress run.
    pub injected: usize,
    pub errors: CampaignErrors,
    pub budget: u128,
    /// Record wall time. Off by default so reports are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
}

impl CampaignConfig {
    pub fn exhaustive(injected: usize) -> Self {
        Self {
            injected,
            errors: CampaignErrors::Exhaustive,
            budget: DEFAULT_CASE_BUDGET,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub cases: u64,
    pub successes: u64,
    pub failures: u64,
    /// Cases where the recovered supports differ from the true ones.
    pub support_failures: u64,
    pub truncated: bool,
    pub within_contract: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CampaignSummary {
    pub fn success_rate(&self) -> f64 {
        if self.cases == 0 {
            return 1.0;
        }
        self.successes as f64 / self.cases as f64
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    successes: u64,
    failures: u64,
    support_failures: u64,
    /// Case number and description of the earliest failure.
    first_failure: Option<(u128, String)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.successes += other.successes;
        self.failures += other.failures;
        self.support_failures += other.support_failures;
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn record(&mut self, case: u128, code: &SqgtCode, set: &DefectiveSet, outcome: &TestOutcome) -> Result<()> {
        self.cases += 1;
        let support = recover_support(outcome, code.base(), code.e())?;
        if support != support_signature(code, set) {
            self.support_failures += 1;
        }
        let verdict = match decode(outcome, code) {
            Ok(res) if res.defectives == set.indices() => Ok(()),
            Ok(res) => Err(format!("decoded {:?}", res.defectives)),
            Err(Error::DecodingFailure(msg)) => Err(msg),
            Err(other) => return Err(other),
        };
        match verdict {
            Ok(()) => self.successes += 1,
            Err(what) => {
                self.failures += 1;
                if self.first_failure.as_ref().is_none_or(|(c, _)| case < *c) {
                    self.first_failure = Some((
                        case,
                        format!("D={:?} errors={:?}: {what}", set.indices(), outcome.errors),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// All column sets of 1 to `d` columns, by size then lexicographically.
pub fn all_defective_sets(code: &SqgtCode) -> Result<Vec<DefectiveSet>> {
    (1..=code.d().min(code.n()))
        .flat_map(|s| (0..code.n()).combinations(s))
        .map(|cols| DefectiveSet::new(cols, code))
        .collect()
}

/// Decodes every (defective set, error pattern) case and counts exact recoveries.
///
/// When the case count exceeds the budget, the earliest cases in enumeration
/// order are run and the summary is flagged as truncated.
pub fn run_campaign(code: &SqgtCode, config: &CampaignConfig) -> Result<CampaignSummary> {
    let start = Instant::now();
    let sets = all_defective_sets(code)?;
    let bins = code.thresholds().bins();
    let per_set = match config.errors {
        CampaignErrors::Exhaustive => count_error_patterns(code.m(), config.injected, bins),
        CampaignErrors::Random { samples, .. } => samples as u128,
    };
    let total = per_set.saturating_mul(sets.len() as u128);
    let truncated = total > config.budget;
    let tally = sets
        .par_iter()
        .enumerate()
        .map(|(i, set)| -> Result<Tally> {
            let mut tally = Tally::default();
            let first_case = i as u128 * per_set;
            if first_case >= config.budget {
                return Ok(tally);
            }
            let limit = per_set.min(config.budget - first_case) as usize;
            let clean = syndrome(code, set)?;
            match config.errors {
                CampaignErrors::Exhaustive => {
                    for (k, outcome) in ErrorPatterns::new(&clean.y, config.injected, bins).take(limit).enumerate() {
                        tally.record(first_case + k as u128, code, set, &outcome)?;
                    }
                }
                CampaignErrors::Random { seed, .. } => {
                    for k in 0..limit {
                        let case = first_case + k as u128;
                        let outcome = inject_random(&clean, config.injected, bins, seed.wrapping_add(case as u64));
                        tally.record(case, code, set, &outcome)?;
                    }
                }
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(CampaignSummary {
        cases: tally.cases,
        successes: tally.successes,
        failures: tally.failures,
        support_failures: tally.support_failures,
        truncated,
        within_contract: config.injected <= code.e(),
        first_failure: tally.first_failure.map(|(_, s)| s),
        wall_time_ms: config.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}
