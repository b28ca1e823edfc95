//! Multiplier sequences: the three families, their checkers, constructions
//! and the linear-time subset-sum solvers used by the decoders.

mod check;
mod construct;
mod gamma;
mod knapsack;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantization::Thresholds;

pub use check::{
    check_base, check_quantized_bh_pairwise, check_sequence, check_sqlo_s_definition,
    check_sqlo_s_prefix_route, necessary_cardinality, CheckReport, MAX_CHECK_LEN,
};
pub use construct::{
    base_recursive_superincreasing, base_strong_lex, greedy_generate, scaled_construction,
    strong_lex_search,
};
pub use gamma::gamma_bound;
pub use knapsack::knapsack_solve;

/// Which family a multiplier sequence was verified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceKind {
    #[serde(rename = "quantized-bh")]
    QuantizedBh,
    #[serde(rename = "sqlo-s")]
    SqloS,
    #[serde(rename = "sqlo-l")]
    SqloL,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [Self::QuantizedBh, Self::SqloS, Self::SqloL];

    pub fn name(self) -> &'static str {
        match self {
            Self::QuantizedBh => "quantized-bh",
            Self::SqloS => "sqlo-s",
            Self::SqloL => "sqlo-l",
        }
    }

    /// The base family whose scaled copies land in this kind.
    pub fn base_family(self) -> BaseFamily {
        match self {
            Self::QuantizedBh => BaseFamily::SubsetSumDistinct,
            Self::SqloS => BaseFamily::HSuperincreasing,
            Self::SqloL => BaseFamily::StrongLex,
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "quantized-bh" | "qbh" | "bh" => Ok(Self::QuantizedBh),
            "sqlo-s" | "sqlos" => Ok(Self::SqloS),
            "sqlo-l" | "sqlol" => Ok(Self::SqloL),
            other => Err(Error::Parse(format!(
                "unknown sequence kind `{other}` (expected quantized-bh, sqlo-s or sqlo-l)"
            ))),
        }
    }
}

/// Integer families that scale into multiplier sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseFamily {
    /// All sums of at most `h` elements are distinct.
    #[serde(rename = "subset-sum-distinct")]
    SubsetSumDistinct,
    /// Every element exceeds the sum of its `h` predecessors.
    #[serde(rename = "h-superincreasing")]
    HSuperincreasing,
    /// Sums of at most `h` elements ordered by cardinality, then lexicographically.
    #[serde(rename = "strong-lex")]
    StrongLex,
}

impl fmt::Display for BaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SubsetSumDistinct => "subset-sum-distinct",
            Self::HSuperincreasing => "h-superincreasing",
            Self::StrongLex => "strong-lex",
        })
    }
}

/// A sequence of multipliers verified against a set of thresholds.
///
/// Construction always runs the family checker, so holding a value means the
/// sequence is a member of `kind` for subsets of up to `h` elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplierSequence {
    kind: SequenceKind,
    h: usize,
    values: Vec<u64>,
    thresholds: Thresholds,
}

impl MultiplierSequence {
    pub fn new(values: Vec<u64>, kind: SequenceKind, h: usize, thresholds: Thresholds) -> Result<Self> {
        let report = check_sequence(&values, &thresholds, h, kind)?;
        if let Some(violation) = report.first_violation {
            return Err(Error::InvalidInput(format!(
                "{values:?} is not a {kind} sequence for h={h}: {violation}"
            )));
        }
        Ok(Self {
            kind,
            h,
            values,
            thresholds,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            kind: SequenceKind,
            h: usize,
            values: Vec<u64>,
            thresholds: Thresholds,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.values, raw.kind, raw.h, raw.thresholds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn largest(&self) -> u64 {
        *self.values.last().expect("verified sequences are nonempty")
    }

    /// Whether the verified property covers subsets of up to `d` elements.
    ///
    /// Once `h >= K` every subset is already covered, so any `d` is fine.
    pub fn supports(&self, d: usize) -> bool {
        self.h >= d || self.h >= self.values.len()
    }

    /// Sum of the `d` largest multipliers.
    pub fn top_sum(&self, d: usize) -> u64 {
        self.values.iter().rev().take(d).sum()
    }

    /// Same values re-verified as a different kind.
    pub fn reinterpret(&self, kind: SequenceKind) -> Result<Self> {
        Self::new(self.values.clone(), kind, self.h, self.thresholds.clone())
    }

    /// Space separated values, as printed by the CLI.
    pub fn to_line(&self) -> String {
        self.values
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// An unscaled integer sequence from one of the base families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSequence {
    pub family: BaseFamily,
    pub h: usize,
    pub values: Vec<u64>,
}

impl BaseSequence {
    pub fn new(values: Vec<u64>, family: BaseFamily, h: usize) -> Result<Self> {
        if !check_base(&values, family, h)? {
            return Err(Error::InvalidInput(format!(
                "{values:?} is not a {family} sequence for h={h}"
            )));
        }
        Ok(Self { family, h, values })
    }

    /// `1, 2, 4, ..., 2^(k-1)`, a member of every base family for every `h`.
    pub fn powers_of_two(k: usize, family: BaseFamily, h: usize) -> Result<Self> {
        if k == 0 || k > 63 {
            return Err(Error::InvalidInput(format!("length {k} not in [1, 63]")));
        }
        Self::new((0..k as u32).map(|i| 1u64 << i).collect(), family, h)
    }
}

/// One entry of the ordered subset-sum table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetSum {
    pub sum: u64,
    /// Indices into the sequence, ascending.
    pub members: Vec<usize>,
}

/// All sums of 1..=min(d, K) elements, strictly increasing, each with the
/// unique subset producing it.
pub fn subset_sums(seq: &MultiplierSequence, d: usize) -> Result<Vec<SubsetSum>> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if !seq.supports(d) {
        return Err(Error::Parameter(format!(
            "sequence verified for h={} cannot separate subsets of {d} elements",
            seq.h()
        )));
    }
    let values = seq.values();
    let mut table: Vec<SubsetSum> = check::subsets_up_to(values.len(), d)
        .map(|mask| SubsetSum {
            sum: check::mask_sum(values, mask).expect("verified sums stay below the top threshold"),
            members: check::mask_indices(mask),
        })
        .collect();
    table.sort_by_key(|s| s.sum);
    if let Some(w) = table.windows(2).find(|w| w[0].sum == w[1].sum) {
        return Err(Error::CorruptSequence(format!(
            "subsets {:?} and {:?} share the sum {}",
            w[0].members, w[1].members, w[0].sum
        )));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn irregular() -> Thresholds {
        Thresholds::new(vec![0, 2, 5, 6, 10, 13, 15, 16, 18, 21]).unwrap()
    }

    /// Enumeration oracle: every subset of 1..=d elements, sorted by sum.
    fn enumerate(values: &[u64], d: usize) -> Vec<(u64, Vec<u64>)> {
        let k = values.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << k) {
            if mask.count_ones() as usize > d {
                continue;
            }
            let members: Vec<u64> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).collect();
            out.push((members.iter().sum(), members));
        }
        out.sort();
        out
    }

    fn as_values(seq: &MultiplierSequence, table: &[SubsetSum]) -> Vec<(u64, Vec<u64>)> {
        table
            .iter()
            .map(|s| (s.sum, s.members.iter().map(|&i| seq.values()[i]).collect()))
            .collect()
    }

    #[test]
    fn subset_sum_table_for_greedy_example() {
        let seq = MultiplierSequence::new(vec![2, 5, 11], SequenceKind::SqloS, 3, irregular()).unwrap();
        let table = subset_sums(&seq, 3).unwrap();
        let expected = vec![
            (2, vec![2]),
            (5, vec![5]),
            (7, vec![2, 5]),
            (11, vec![11]),
            (13, vec![2, 11]),
            (16, vec![5, 11]),
            (18, vec![2, 5, 11]),
        ];
        assert_eq!(enumerate(&[2, 5, 11], 3), expected);
        assert_eq!(as_values(&seq, &table), expected);
    }

    #[test]
    fn subset_sum_table_small_cases() {
        let th = Thresholds::uniform(3, 8).unwrap();
        let single = MultiplierSequence::new(vec![3], SequenceKind::QuantizedBh, 4, th.clone()).unwrap();
        assert_eq!(as_values(&single, &subset_sums(&single, 4).unwrap()), vec![(3, vec![3])]);

        let seq = MultiplierSequence::new(vec![3, 6, 12], SequenceKind::SqloS, 3, th).unwrap();
        let table = subset_sums(&seq, 2).unwrap();
        assert_eq!(table.len(), 6);
        assert_eq!(table.last().unwrap().sum, 18);
        assert_eq!(as_values(&seq, &table), enumerate(&[3, 6, 12], 2));
    }

    #[test]
    fn subset_sums_require_enough_h() {
        let th = Thresholds::uniform(1, 40).unwrap();
        let seq = MultiplierSequence::new(vec![1, 2, 4], SequenceKind::QuantizedBh, 1, th).unwrap();
        assert!(matches!(subset_sums(&seq, 2), Err(Error::Parameter(_))));
        assert_eq!(subset_sums(&seq, 1).unwrap().len(), 3);
    }

    #[test]
    fn kind_names_parse() {
        for kind in SequenceKind::ALL {
            assert_eq!(kind.name().parse::<SequenceKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<SequenceKind>().is_err());
    }

    #[test]
    fn sequence_json_round_trip() {
        let seq = MultiplierSequence::new(vec![2, 5, 11], SequenceKind::SqloS, 3, irregular()).unwrap();
        let text = seq.to_json();
        assert_eq!(
            text,
            r#"{"kind":"sqlo-s","h":3,"values":[2,5,11],"thresholds":[0,2,5,6,10,13,15,16,18,21]}"#
        );
        assert_eq!(MultiplierSequence::from_json(&text).unwrap(), seq);
        // Deserialization re-verifies.
        let bad = r#"{"kind":"sqlo-s","h":3,"values":[2,5,10],"thresholds":[0,2,5,6,10,13,15,16,18,21]}"#;
        assert!(MultiplierSequence::from_json(bad).is_err());
    }
}
