//! The quantized adder channel: syndromes of defective sets and adversarial
//! error injection.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codebook::SqgtCode;
use crate::error::{Error, Result};

/// Distinct column indices of a code, between 1 and `d` of them, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DefectiveSet {
    indices: Vec<usize>,
}

impl DefectiveSet {
    pub fn new(mut indices: Vec<usize>, code: &SqgtCode) -> Result<Self> {
        indices.sort_unstable();
        if indices.is_empty() || indices.len() > code.d() {
            return Err(Error::InvalidInput(format!(
                "a defective set holds 1 to {} columns, got {}",
                code.d(),
                indices.len()
            )));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("column {} listed twice", w[0])));
        }
        if let Some(&c) = indices.iter().find(|&&c| c >= code.n()) {
            return Err(Error::InvalidInput(format!("column {c} out of range for n={}", code.n())));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// A result vector over the bins and the coordinates that were altered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestOutcome {
    pub y: Vec<usize>,
    /// `(position, new value)` for every injected error.
    #[serde(default)]
    pub errors: Vec<(usize, usize)>,
}

impl TestOutcome {
    pub fn clean(y: Vec<usize>) -> Self {
        Self { y, errors: Vec::new() }
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }

    /// Parses a single line of space-separated bin indices.
    pub fn from_line(line: &str) -> Result<Self> {
        let y = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("`{t}` is not a bin index"))))
            .collect::<Result<Vec<usize>>>()?;
        if y.is_empty() {
            return Err(Error::Parse("empty result vector".into()));
        }
        Ok(Self::clean(y))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn to_line(&self) -> String {
        self.y.iter().map(usize::to_string).join(" ")
    }
}

/// Quantized coordinate-wise sum of the columns of `defectives`.
pub fn syndrome(code: &SqgtCode, defectives: &DefectiveSet) -> Result<TestOutcome> {
    syndrome_of_columns(code, defectives.indices())
}

/// Syndrome of an arbitrary list of distinct columns, with no limit on its size.
pub fn syndrome_of_columns(code: &SqgtCode, columns: &[usize]) -> Result<TestOutcome> {
    if let Some(&c) = columns.iter().find(|&&c| c >= code.n()) {
        return Err(Error::InvalidInput(format!("column {c} out of range for n={}", code.n())));
    }
    let matrix = code.matrix();
    let sums: Vec<u64> = (0..code.m())
        .map(|r| columns.iter().map(|&c| matrix.get(r, c)).sum())
        .collect();
    Ok(TestOutcome::clean(code.thresholds().quantize_vector(&sums)?))
}

/// Base columns underlying the defectives, ascending and without repeats.
pub fn support_signature(code: &SqgtCode, defectives: &DefectiveSet) -> Vec<usize> {
    let mut cols: Vec<usize> = defectives.indices().iter().map(|&c| code.split_column(c).1).collect();
    cols.sort_unstable();
    cols.dedup();
    cols
}

/// Distinct 0/1 support patterns of raw integer columns, sorted.
pub fn support_vectors(columns: &[Vec<u64>]) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = columns
        .iter()
        .map(|col| col.iter().map(|&v| u8::from(v != 0)).collect())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// How errors are placed on a clean outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorPolicy {
    /// Every pattern of at most `e` changed coordinates and every new value.
    Exhaustive,
    /// Exactly `min(e, m)` changed coordinates, positions and values drawn
    /// from a generator seeded with `seed`.
    SeededRandom { seed: u64 },
    /// The listed `(position, new value)` pairs.
    Explicit(Vec<(usize, usize)>),
}

/// Applies `policy` to `clean` over `bins` output symbols.
pub fn inject_errors(clean: &TestOutcome, e: usize, policy: &ErrorPolicy, bins: usize) -> Result<Vec<TestOutcome>> {
    match policy {
        ErrorPolicy::Exhaustive => Ok(ErrorPatterns::new(&clean.y, e, bins).collect()),
        ErrorPolicy::SeededRandom { seed } => Ok(vec![inject_random(clean, e, bins, *seed)]),
        ErrorPolicy::Explicit(changes) => {
            if changes.len() > e {
                log::warn!("{} explicit errors exceed the contract of e={e}", changes.len());
            }
            inject_explicit(clean, changes, bins).map(|o| vec![o])
        }
    }
}

pub fn inject_explicit(clean: &TestOutcome, changes: &[(usize, usize)], bins: usize) -> Result<TestOutcome> {
    let mut y = clean.y.clone();
    let mut errors = Vec::with_capacity(changes.len());
    for &(pos, val) in changes {
        if pos >= y.len() {
            return Err(Error::InvalidInput(format!("error position {pos} out of range for m={}", y.len())));
        }
        if val >= bins {
            return Err(Error::InvalidBin { bin: val, bins });
        }
        if errors.iter().any(|&(p, _)| p == pos) {
            return Err(Error::InvalidInput(format!("position {pos} changed twice")));
        }
        if clean.y[pos] == val {
            return Err(Error::InvalidInput(format!("position {pos} already holds {val}; an error must change it")));
        }
        y[pos] = val;
        errors.push((pos, val));
    }
    Ok(TestOutcome { y, errors })
}

pub fn inject_random(clean: &TestOutcome, e: usize, bins: usize, seed: u64) -> TestOutcome {
    if bins < 2 {
        return clean.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = clean.y.clone();
    let mut positions = sample(&mut rng, y.len(), e.min(y.len())).into_vec();
    positions.sort_unstable();
    let mut errors = Vec::with_capacity(positions.len());
    for pos in positions {
        // Uniform over the bins other than the current one.
        let mut val = rng.gen_range(0..bins - 1);
        if val >= y[pos] {
            val += 1;
        }
        y[pos] = val;
        errors.push((pos, val));
    }
    TestOutcome { y, errors }
}

/// Number of outcomes [`ErrorPatterns`] yields, the clean one included.
pub fn count_error_patterns(m: usize, e: usize, bins: usize) -> u128 {
    (0..=e.min(m))
        .map(|c| crate::disjunct::binomial(m as u128, c as u128).saturating_mul((bins as u128 - 1).saturating_pow(c as u32)))
        .fold(0u128, u128::saturating_add)
}

/// Streams every outcome within `e` changed coordinates of a clean vector,
/// starting with the clean vector itself.
pub struct ErrorPatterns {
    clean: Vec<usize>,
    bins: usize,
    max_errors: usize,
    positions: Vec<usize>,
    /// Offset in `1..bins` added (mod `bins`) at each position.
    shifts: Vec<usize>,
    done: bool,
}

impl ErrorPatterns {
    pub fn new(clean: &[usize], e: usize, bins: usize) -> Self {
        Self {
            clean: clean.to_vec(),
            bins,
            max_errors: if bins < 2 { 0 } else { e.min(clean.len()) },
            positions: Vec::new(),
            shifts: Vec::new(),
            done: false,
        }
    }

    fn outcome(&self) -> TestOutcome {
        let mut y = self.clean.clone();
        let mut errors = Vec::with_capacity(self.positions.len());
        for (&p, &s) in self.positions.iter().zip(&self.shifts) {
            y[p] = (self.clean[p] + s) % self.bins;
            errors.push((p, y[p]));
        }
        TestOutcome { y, errors }
    }

    /// Moves to the next pattern: values first, then positions, then size.
    fn advance(&mut self) {
        for s in self.shifts.iter_mut().rev() {
            if *s + 1 < self.bins {
                *s += 1;
                return;
            }
            *s = 1;
        }
        let (m, c) = (self.clean.len(), self.positions.len());
        // Next combination of c positions out of m, in lexicographic order.
        if let Some(i) = (0..c).rev().find(|&i| self.positions[i] < m - c + i) {
            self.positions[i] += 1;
            for j in i + 1..c {
                self.positions[j] = self.positions[j - 1] + 1;
            }
            return;
        }
        if c < self.max_errors {
            self.positions = (0..c + 1).collect();
            self.shifts = vec![1; c + 1];
        } else {
            self.done = true;
        }
    }
}

impl Iterator for ErrorPatterns {
    type Item = TestOutcome;

    fn next(&mut self) -> Option<TestOutcome> {
        if self.done {
            return None;
        }
        let out = self.outcome();
        self.advance();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build, HeadroomMode};
    use crate::disjunct::{identity_code, kautz_singleton};
    use crate::quantization::Thresholds;
    use crate::sequences::{MultiplierSequence, SequenceKind};
    use std::collections::HashSet;

    fn example_code() -> SqgtCode {
        let th = Thresholds::uniform(3, 15).unwrap();
        let seq = MultiplierSequence::new(vec![3, 6, 12], SequenceKind::SqloS, 3, th.clone()).unwrap();
        build(&identity_code(2, 0).unwrap(), &seq, &th, 2, HeadroomMode::Strict).unwrap()
    }

    #[test]
    fn syndrome_examples() {
        let code = example_code();
        let d = DefectiveSet::new(vec![0, 2], &code).unwrap();
        assert_eq!(syndrome(&code, &d).unwrap().y, vec![3, 0]);
        for c in 0..2 {
            let single = DefectiveSet::new(vec![c], &code).unwrap();
            let expected = code.thresholds().quantize_vector(&code.base().column(c).iter().map(|b| b * 3).collect::<Vec<_>>()).unwrap();
            assert_eq!(syndrome(&code, &single).unwrap().y, expected);
        }
        let th = Thresholds::uniform(3, 8).unwrap();
        assert_eq!(th.quantize_vector(&[21, 18, 3]).unwrap(), vec![7, 6, 1]);
    }

    #[test]
    fn overflowing_sums_name_the_coordinate() {
        let th = Thresholds::uniform(3, 8).unwrap();
        let seq = MultiplierSequence::new(vec![3, 6, 12], SequenceKind::SqloS, 3, th.clone()).unwrap();
        let code = build(&kautz_singleton(3, 2, None).unwrap(), &seq, &th, 2, HeadroomMode::Permissive).unwrap();
        // Base columns 0 and 3 share row 0; scaled by 12 each they reach t_Q = 24.
        let err = syndrome_of_columns(&code, &[18, 21]).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { value: 24, coordinate: Some(0), .. }), "{err}");
    }

    #[test]
    fn defective_set_validation() {
        let code = example_code();
        assert!(DefectiveSet::new(vec![], &code).is_err());
        assert!(DefectiveSet::new(vec![0, 1, 2], &code).is_err());
        assert!(DefectiveSet::new(vec![1, 1], &code).is_err());
        assert!(DefectiveSet::new(vec![6], &code).is_err());
        assert_eq!(DefectiveSet::new(vec![4, 1], &code).unwrap().indices(), &[1, 4]);
    }

    #[test]
    fn support_examples() {
        let cols = vec![vec![2, 0, 2, 2], vec![6, 0, 6, 6], vec![2, 0, 2, 0]];
        assert_eq!(support_vectors(&cols), vec![vec![1, 0, 1, 0], vec![1, 0, 1, 1]]);
        let code = example_code();
        let d = DefectiveSet::new(vec![1, 3], &code).unwrap();
        assert_eq!(support_signature(&code, &d), vec![1]);
        let d = DefectiveSet::new(vec![4], &code).unwrap();
        assert_eq!(support_signature(&code, &d), vec![0]);
    }

    #[test]
    fn exhaustive_counts() {
        let clean = TestOutcome::clean(vec![3, 0]);
        let all: Vec<_> = ErrorPatterns::new(&clean.y, 1, 8).collect();
        assert_eq!(all.len(), 15);
        assert_eq!(all[0], clean);
        assert_eq!(all.iter().filter(|o| o.errors.len() == 1).count(), 14);
        assert_eq!(count_error_patterns(2, 1, 8), 15);
        let zero: Vec<_> = ErrorPatterns::new(&clean.y, 0, 8).collect();
        assert_eq!(zero, vec![clean.clone()]);
    }

    #[test]
    fn exhaustive_matches_counting_oracle() {
        for m in 1..5 {
            for e in 0..4 {
                for bins in 2..5 {
                    let clean: Vec<usize> = (0..m).map(|i| i % bins).collect();
                    let all: Vec<_> = ErrorPatterns::new(&clean, e, bins).collect();
                    assert_eq!(all.len() as u128, count_error_patterns(m, e, bins));
                    let distinct: HashSet<_> = all.iter().map(|o| o.y.clone()).collect();
                    assert_eq!(distinct.len(), all.len());
                    for o in &all {
                        let changed = o.y.iter().zip(&clean).filter(|(a, b)| a != b).count();
                        assert_eq!(changed, o.errors.len());
                        assert!(changed <= e);
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_and_random() {
        let clean = TestOutcome::clean(vec![3, 0, 1, 1]);
        let out = inject_explicit(&clean, &[(0, 5)], 8).unwrap();
        assert_eq!(out.y, vec![5, 0, 1, 1]);
        assert_eq!(out.errors, vec![(0, 5)]);
        assert!(inject_explicit(&clean, &[(0, 3)], 8).is_err());
        assert!(inject_explicit(&clean, &[(0, 8)], 8).is_err());
        assert!(inject_explicit(&clean, &[(4, 1)], 8).is_err());
        let a = inject_random(&clean, 2, 8, 11);
        assert_eq!(a, inject_random(&clean, 2, 8, 11));
        assert_eq!(a.errors.len(), 2);
        assert_eq!(a.y.iter().zip(&clean.y).filter(|(x, y)| x != y).count(), 2);
        assert_eq!(inject_errors(&clean, 0, &ErrorPolicy::SeededRandom { seed: 1 }, 8).unwrap(), vec![clean.clone()]);
    }

    #[test]
    fn outcome_json() {
        let out = TestOutcome { y: vec![5, 0], errors: vec![(0, 5)] };
        assert_eq!(out.to_json(), r#"{"y":[5,0],"errors":[[0,5]]}"#);
        assert_eq!(TestOutcome::from_json(&out.to_json()).unwrap(), out);
        assert_eq!(TestOutcome::from_line("3 0").unwrap().y, vec![3, 0]);
        assert!(TestOutcome::from_line("3 x").is_err());
    }
}
