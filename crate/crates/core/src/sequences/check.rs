//! Exhaustive membership checks for the sequence families.
//!
//! Subsets are bitmasks over sequence indices. Every checker enumerates the
//! subsets of at most `h` elements; the pair scans are split across rayon
//! workers and report the first violating pair in enumeration order.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::{BaseFamily, SequenceKind};
use crate::error::{Error, Result};
use crate::quantization::Thresholds;

/// Longest sequence accepted by the family checkers.
pub const MAX_CHECK_LEN: usize = 20;

/// Upper bound on the number of subsets a base-family check will enumerate.
const MAX_BASE_SUBSETS: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub first_violation: Option<String>,
}

impl CheckReport {
    fn ok() -> Self {
        Self {
            pass: true,
            first_violation: None,
        }
    }

    fn fail(msg: String) -> Self {
        Self {
            pass: false,
            first_violation: Some(msg),
        }
    }
}

impl From<Option<String>> for CheckReport {
    fn from(violation: Option<String>) -> Self {
        violation.map_or_else(Self::ok, Self::fail)
    }
}

pub(crate) fn subsets_up_to(k: usize, h: usize) -> impl Iterator<Item = u64> {
    (1..=h.min(k)).flat_map(move |size| {
        (0..k)
            .combinations(size)
            .map(|idx| idx.into_iter().fold(0u64, |m, i| m | 1 << i))
    })
}

pub(crate) fn mask_sum(values: &[u64], mask: u64) -> Option<u64> {
    mask_iter(mask).try_fold(0u64, |acc, i| acc.checked_add(values[i]))
}

pub(crate) fn mask_indices(mask: u64) -> Vec<usize> {
    mask_iter(mask).collect()
}

fn mask_iter(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

fn highest(mask: u64) -> usize {
    63 - mask.leading_zeros() as usize
}

/// Number of subsets with at most `h` elements (the empty set included).
fn count_subsets(k: usize, h: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for i in 0..=h.min(k) {
        total = total.saturating_add(c);
        c = c.saturating_mul((k - i) as u128) / (i as u128 + 1);
    }
    total
}

/// The counting bound every quantized B_h sequence obeys: the subsets of at
/// most `h` elements, the empty one included, need pairwise distinct bins.
/// For `K <= h` this reads `2^K <= Q`.
pub fn necessary_cardinality(k: usize, h: usize, bins: usize) -> bool {
    count_subsets(k, h) <= bins as u128
}

fn validate(values: &[u64], h: usize) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if h == 0 {
        return Err(Error::InvalidInput("h must be at least 1".into()));
    }
    if values.len() > MAX_CHECK_LEN {
        return Err(Error::InvalidInput(format!(
            "exhaustive checks are limited to {MAX_CHECK_LEN} elements, got {}",
            values.len()
        )));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "sequence must be strictly increasing: {values:?}"
        )));
    }
    Ok(())
}

/// Subsets of at most `h` elements with their quantized sums.
struct Table<'a> {
    values: &'a [u64],
    masks: Vec<u64>,
    sums: Vec<u64>,
    bins: Vec<usize>,
    /// Bin of each single element.
    element_bins: Vec<usize>,
}

impl<'a> Table<'a> {
    /// Fails with a violation message when some sum reaches the top threshold.
    fn build(values: &'a [u64], th: &Thresholds, h: usize) -> std::result::Result<Self, String> {
        let masks: Vec<u64> = subsets_up_to(values.len(), h).collect();
        let mut sums = Vec::with_capacity(masks.len());
        let mut bins = Vec::with_capacity(masks.len());
        for &mask in &masks {
            let sum = mask_sum(values, mask).unwrap_or(u64::MAX);
            let bin = th.quantize(sum).map_err(|_| {
                format!(
                    "sum {} of {} reaches the top threshold {}",
                    sum,
                    fmt_subset(values, mask),
                    th.top()
                )
            })?;
            sums.push(sum);
            bins.push(bin);
        }
        let element_bins = values.iter().map(|&v| th.quantize(v).expect("checked above")).collect();
        Ok(Self {
            values,
            masks,
            sums,
            bins,
            element_bins,
        })
    }

    fn describe(&self, i: usize) -> String {
        format!(
            "{} (sum {}, bin {})",
            fmt_subset(self.values, self.masks[i]),
            self.sums[i],
            self.bins[i]
        )
    }

    fn max_element_bin(&self, mask: u64) -> usize {
        mask_iter(mask).map(|i| self.element_bins[i]).max().unwrap_or(0)
    }

    /// Every element in its own bin, ascending, none in bin 0.
    fn distinct_element_bins(&self) -> Option<String> {
        if self.element_bins[0] == 0 {
            return Some(format!(
                "smallest element {} lies in bin 0 with the empty sum",
                self.values[0]
            ));
        }
        self.element_bins.windows(2).enumerate().find_map(|(i, w)| {
            (w[1] <= w[0]).then(|| {
                format!(
                    "elements {} and {} are not in increasing bins ({} and {})",
                    self.values[i],
                    self.values[i + 1],
                    w[0],
                    w[1]
                )
            })
        })
    }

    /// Distinct subsets land in distinct bins, via sorting.
    fn distinct_subset_bins(&self) -> Option<String> {
        let mut order: Vec<usize> = (0..self.masks.len()).collect();
        order.sort_by_key(|&i| (self.bins[i], self.masks[i]));
        order.windows(2).find_map(|w| {
            (self.bins[w[0]] == self.bins[w[1]]).then(|| {
                format!(
                    "{} and {} share a bin",
                    self.describe(w[0].min(w[1])),
                    self.describe(w[0].max(w[1]))
                )
            })
        })
    }

    /// First ordered pair `(a, b)` for which `rule(a, b)` demands
    /// `bin(b) > bin(a)` but the bins do not comply.
    fn first_pair_violation<F>(&self, rule: F, what: &str) -> Option<String>
    where
        F: Fn(u64, u64) -> bool + Sync,
    {
        let n = self.masks.len();
        (0..n).into_par_iter().find_map_first(|a| {
            (0..n).find_map(|b| {
                if a == b || !rule(self.masks[a], self.masks[b]) || self.bins[b] > self.bins[a] {
                    return None;
                }
                Some(format!(
                    "{what}: {} is not above {}",
                    self.describe(b),
                    self.describe(a)
                ))
            })
        })
    }
}

fn fmt_subset(values: &[u64], mask: u64) -> String {
    format!("{{{}}}", mask_iter(mask).map(|i| values[i].to_string()).join(","))
}

fn prepare<'a>(values: &'a [u64], th: &Thresholds, h: usize) -> Result<std::result::Result<Table<'a>, String>> {
    validate(values, h)?;
    let table = match Table::build(values, th, h) {
        Ok(t) => t,
        Err(v) => return Ok(Err(v)),
    };
    if let Some(v) = table.distinct_element_bins() {
        return Ok(Err(v));
    }
    Ok(Ok(table))
}

/// Checks `values` against the definition of `kind` for subsets of at most
/// `h` elements.
///
/// Fails fast on the counting bound before enumerating pairs. For SQLO_s both
/// the direct definition and the prefix characterization are evaluated; a
/// disagreement between them is reported as an error.
pub fn check_sequence(values: &[u64], th: &Thresholds, h: usize, kind: SequenceKind) -> Result<CheckReport> {
    validate(values, h)?;
    let k = values.len();
    if !necessary_cardinality(k, h, th.bins()) {
        return Ok(CheckReport::fail(format!(
            "{} subsets of at most {h} of {k} elements cannot fit in {} bins",
            count_subsets(k, h),
            th.bins()
        )));
    }
    match kind {
        SequenceKind::QuantizedBh => quantized_bh(values, th, h),
        SequenceKind::SqloS => {
            let direct = check_sqlo_s_definition(values, th, h)?;
            let prefix = check_sqlo_s_prefix_route(values, th, h)?;
            if direct.pass != prefix.pass {
                return Err(Error::RouteDisagreement(format!(
                    "SQLO_s routes disagree on {values:?}: definition {:?}, prefix route {:?}",
                    direct.first_violation, prefix.first_violation
                )));
            }
            Ok(direct)
        }
        SequenceKind::SqloL => sqlo_l(values, th, h),
    }
}

fn quantized_bh(values: &[u64], th: &Thresholds, h: usize) -> Result<CheckReport> {
    Ok(match prepare(values, th, h)? {
        Err(v) => CheckReport::fail(v),
        Ok(table) => table.distinct_subset_bins().into(),
    })
}

/// Quantized B_h check by comparing every pair of subsets. Reference for the
/// sorting-based check used by [`check_sequence`].
pub fn check_quantized_bh_pairwise(values: &[u64], th: &Thresholds, h: usize) -> Result<CheckReport> {
    Ok(match prepare(values, th, h)? {
        Err(v) => CheckReport::fail(v),
        Ok(table) => {
            let n = table.masks.len();
            (0..n)
                .into_par_iter()
                .find_map_first(|a| {
                    (a + 1..n).find_map(|b| {
                        (table.bins[a] == table.bins[b])
                            .then(|| format!("{} and {} share a bin", table.describe(a), table.describe(b)))
                    })
                })
                .into()
        }
    })
}

/// SQLO_s straight from its definition: nested subsets are bin-ordered by
/// inclusion, non-nested ones by their largest non-shared element.
pub fn check_sqlo_s_definition(values: &[u64], th: &Thresholds, h: usize) -> Result<CheckReport> {
    let table = match prepare(values, th, h)? {
        Err(v) => return Ok(CheckReport::fail(v)),
        Ok(t) => t,
    };
    let nested = table.first_pair_violation(|a, b| a & b == a && a != b, "nested subsets");
    if nested.is_some() {
        return Ok(nested.into());
    }
    let by_largest = table.first_pair_violation(
        |a, b| {
            let (only_a, only_b) = (a & !b, b & !a);
            only_a != 0 && only_b != 0 && table.max_element_bin(only_b) > table.max_element_bin(only_a)
        },
        "non-nested subsets",
    );
    Ok(by_largest.into())
}

/// SQLO_s as "quantized B_h, and every element lies above any sum of at most
/// `h` smaller elements".
pub fn check_sqlo_s_prefix_route(values: &[u64], th: &Thresholds, h: usize) -> Result<CheckReport> {
    let table = match prepare(values, th, h)? {
        Err(v) => return Ok(CheckReport::fail(v)),
        Ok(t) => t,
    };
    if let Some(v) = table.distinct_subset_bins() {
        return Ok(CheckReport::fail(v));
    }
    for (idx, &mask) in table.masks.iter().enumerate() {
        for (&value, &bin) in values.iter().zip(&table.element_bins).skip(highest(mask) + 1) {
            if bin <= table.bins[idx] {
                return Ok(CheckReport::fail(format!(
                    "element {value} (bin {bin}) is not above the smaller subset {}",
                    table.describe(idx)
                )));
            }
        }
    }
    Ok(CheckReport::ok())
}

fn sqlo_l(values: &[u64], th: &Thresholds, h: usize) -> Result<CheckReport> {
    let table = match prepare(values, th, h)? {
        Err(v) => return Ok(CheckReport::fail(v)),
        Ok(t) => t,
    };
    let by_size = table.first_pair_violation(|a, b| a.count_ones() < b.count_ones(), "cardinality order");
    if by_size.is_some() {
        return Ok(by_size.into());
    }
    let lex = table.first_pair_violation(
        |a, b| {
            if a.count_ones() != b.count_ones() || a == b {
                return false;
            }
            // First position where the ascending listings differ.
            let (ia, ib) = (mask_indices(a), mask_indices(b));
            let r = ia.iter().zip(&ib).position(|(x, y)| x != y).expect("distinct equal-size subsets");
            table.element_bins[ib[r]] > table.element_bins[ia[r]]
        },
        "lexicographic order",
    );
    Ok(lex.into())
}

/// Membership test for the base families, over subsets of at most `h` elements.
pub fn check_base(values: &[u64], family: BaseFamily, h: usize) -> Result<bool> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty base sequence".into()));
    }
    if h == 0 {
        return Err(Error::InvalidInput("h must be at least 1".into()));
    }
    if values[0] == 0 || values.windows(2).any(|w| w[1] <= w[0]) {
        return Ok(false);
    }
    let k = values.len();
    if family != BaseFamily::HSuperincreasing {
        if k > 64 {
            return Err(Error::InvalidInput(format!("base sequences are limited to 64 elements, got {k}")));
        }
        let needed = count_subsets(k, h);
        if needed > MAX_BASE_SUBSETS {
            return Err(Error::BudgetExceeded {
                needed,
                budget: MAX_BASE_SUBSETS,
            });
        }
    }
    Ok(match family {
        BaseFamily::HSuperincreasing => (1..k).all(|j| {
            let window = values[j.saturating_sub(h)..j]
                .iter()
                .try_fold(0u64, |acc, &v| acc.checked_add(v));
            window.is_some_and(|w| values[j] > w)
        }),
        BaseFamily::SubsetSumDistinct => {
            let mut sums: Vec<Option<u64>> = subsets_up_to(k, h).map(|m| mask_sum(values, m)).collect();
            if sums.iter().any(Option::is_none) {
                return Ok(false);
            }
            sums.sort_unstable();
            sums.windows(2).all(|w| w[0] != w[1])
        }
        BaseFamily::StrongLex => strong_lex(values, h),
    })
}

fn strong_lex(values: &[u64], h: usize) -> bool {
    let k = values.len();
    let sum = |idx: &[usize]| idx.iter().try_fold(0u64, |acc, &i| acc.checked_add(values[i]));
    // lex(s) for every s <= h: sums strictly increase along lexicographic order.
    for s in 1..=h.min(k) {
        let mut prev: Option<u64> = None;
        for combo in (0..k).combinations(s) {
            let Some(cur) = sum(&combo) else { return false };
            if prev.is_some_and(|p| cur <= p) {
                return false;
            }
            prev = Some(cur);
        }
    }
    // Cardinality: the smallest (s+1)-sum exceeds the largest s-sum.
    for s in 0..h.min(k) {
        let smallest_next: u64 = values[..=s].iter().sum();
        let largest: u64 = values[k - s..].iter().sum();
        if smallest_next <= largest {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step3() -> Thresholds {
        Thresholds::uniform(3, 8).unwrap()
    }

    fn example_vi() -> Thresholds {
        Thresholds::new(vec![0, 2, 5, 6, 10, 11, 15, 18]).unwrap()
    }

    fn passes(values: &[u64], th: &Thresholds, h: usize, kind: SequenceKind) -> bool {
        check_sequence(values, th, h, kind).unwrap().pass
    }

    #[test]
    fn sqlo_s_examples() {
        assert!(passes(&[3, 6, 12], &step3(), 3, SequenceKind::SqloS));
        assert!(passes(&[2, 5, 10], &example_vi(), 2, SequenceKind::SqloS));
        let report = check_sequence(&[4, 5, 6], &example_vi(), 2, SequenceKind::SqloS).unwrap();
        assert!(!report.pass);
        // 6 and 4+5 share bin 3.
        let msg = report.first_violation.unwrap();
        assert!(msg.contains("{4,5}") || msg.contains("{6}"), "{msg}");
    }

    #[test]
    fn lex_example_from_irregular_thresholds_is_not_sqlo_l() {
        // {4,5,6}: f(4+5) = f(9) = 3 = f(6), so the cardinality order breaks.
        let report = check_sequence(&[4, 5, 6], &example_vi(), 2, SequenceKind::SqloL).unwrap();
        assert!(!report.pass);
        assert!(report.first_violation.unwrap().contains("cardinality"));
        assert!(!passes(&[4, 5, 6], &example_vi(), 2, SequenceKind::QuantizedBh));
    }

    #[test]
    fn single_first_threshold_is_in_every_family() {
        for th in [step3(), example_vi()] {
            for kind in SequenceKind::ALL {
                for h in 1..5 {
                    assert!(passes(&[th.first()], &th, h, kind));
                }
            }
        }
    }

    #[test]
    fn sqlo_l_three_four_five_on_unit_steps() {
        let th = Thresholds::uniform(1, 20).unwrap();
        assert!(passes(&[3, 4, 5], &th, 2, SequenceKind::SqloL));
        // Not superincreasing: 5 sits below 3+4.
        assert!(!passes(&[3, 4, 5], &th, 2, SequenceKind::SqloS));
    }

    #[test]
    fn converse_counterexamples_exist() {
        // Quantized B_2 but neither SQLO_s nor SQLO_l.
        let th = Thresholds::uniform(1, 30).unwrap();
        let values = [1, 2, 4, 8, 9];
        assert!(!passes(&values, &th, 2, SequenceKind::QuantizedBh));
        let values = [3, 5, 6];
        assert!(passes(&values, &th, 2, SequenceKind::QuantizedBh));
        assert!(!passes(&values, &th, 2, SequenceKind::SqloS));
        assert!(passes(&values, &th, 2, SequenceKind::SqloL));
        let values = [1, 4, 6, 8];
        assert!(passes(&values, &th, 2, SequenceKind::QuantizedBh));
        assert!(!passes(&values, &th, 2, SequenceKind::SqloS));
        assert!(!passes(&values, &th, 2, SequenceKind::SqloL));
    }

    #[test]
    fn cardinality_fast_fail() {
        // 2^3 = 8 subsets need 8 bins; 7 bins must be rejected before any scan.
        let th = Thresholds::uniform(1, 7).unwrap();
        let report = check_sequence(&[1, 2, 4], &th, 3, SequenceKind::QuantizedBh).unwrap();
        assert!(report.first_violation.unwrap().contains("cannot fit"));
        assert!(necessary_cardinality(3, 3, 8));
        assert!(!necessary_cardinality(3, 3, 7));
        // K > h: 1 + 4 + 6 = 11 subsets of at most 2 of 4.
        assert!(necessary_cardinality(4, 2, 11));
        assert!(!necessary_cardinality(4, 2, 10));
    }

    #[test]
    fn sums_at_top_are_violations_not_errors() {
        let report = check_sequence(&[3, 6, 12], &step3(), 4, SequenceKind::QuantizedBh).unwrap();
        assert!(report.pass);
        let th = Thresholds::new(vec![0, 3, 6, 9, 12, 15, 18, 19, 21]).unwrap();
        let report = check_sequence(&[3, 6, 12], &th, 3, SequenceKind::QuantizedBh).unwrap();
        assert!(report.first_violation.unwrap().contains("reaches the top threshold"));
    }

    #[test]
    fn input_errors() {
        let th = step3();
        assert!(matches!(check_sequence(&[], &th, 2, SequenceKind::SqloS), Err(Error::InvalidInput(_))));
        assert!(check_sequence(&[3, 3], &th, 2, SequenceKind::SqloS).is_err());
        assert!(check_sequence(&[3], &th, 0, SequenceKind::SqloS).is_err());
        let long: Vec<u64> = (1..=21).collect();
        assert!(check_sequence(&long, &Thresholds::uniform(1, 1 << 22).unwrap(), 1, SequenceKind::QuantizedBh).is_err());
    }

    #[test]
    fn sorted_and_pairwise_bh_agree() {
        let th = Thresholds::new(vec![0, 2, 5, 6, 10, 13, 15, 16, 18, 21]).unwrap();
        for a in 1..8u64 {
            for b in a + 1..12 {
                for c in b + 1..20 {
                    let v = [a, b, c];
                    for h in 1..=3 {
                        let sorted = quantized_bh(&v, &th, h).unwrap().pass;
                        let pairwise = check_quantized_bh_pairwise(&v, &th, h).unwrap().pass;
                        assert_eq!(sorted, pairwise, "{v:?} h={h}");
                    }
                }
            }
        }
    }

    #[test]
    fn base_family_examples() {
        assert!(check_base(&[1, 2, 4, 7, 12, 20], BaseFamily::HSuperincreasing, 2).unwrap());
        assert!(!check_base(&[1, 2, 4, 7, 12, 20], BaseFamily::HSuperincreasing, 3).unwrap());
        let pow: Vec<u64> = (0..12).map(|i| 1 << i).collect();
        for h in 1..14 {
            assert!(check_base(&pow, BaseFamily::HSuperincreasing, h).unwrap());
            assert!(check_base(&pow, BaseFamily::SubsetSumDistinct, h).unwrap());
        }
        assert!(check_base(&[3, 4, 5], BaseFamily::StrongLex, 2).unwrap());
        // 1+2 = 3 is not above the largest singleton.
        assert!(!check_base(&[1, 2, 3], BaseFamily::StrongLex, 2).unwrap());
        // lex(2) fails: {5,10} and {7,8} tie at 15.
        assert!(!check_base(&[5, 7, 8, 10], BaseFamily::StrongLex, 2).unwrap());
        assert!(check_base(&[1, 2, 3, 4], BaseFamily::HSuperincreasing, 1).unwrap());
        assert!(!check_base(&[1, 2, 3], BaseFamily::SubsetSumDistinct, 2).unwrap());
        assert!(check_base(&[1, 2, 3], BaseFamily::SubsetSumDistinct, 1).unwrap());
    }

    /// Literal evaluation of the strong-lex definition over all subset pairs.
    fn strong_lex_oracle(values: &[u64], h: usize) -> bool {
        let k = values.len();
        let subsets: Vec<Vec<usize>> = (0..=h.min(k)).flat_map(|s| (0..k).combinations(s)).collect();
        let sum = |s: &Vec<usize>| s.iter().map(|&i| values[i]).sum::<u64>();
        for a in &subsets {
            for b in &subsets {
                if a.len() < b.len() && sum(b) <= sum(a) {
                    return false;
                }
                if a.len() == b.len() && a != b {
                    let r = a.iter().zip(b).position(|(x, y)| x != y).unwrap();
                    if values[b[r]] > values[a[r]] && sum(b) <= sum(a) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn strong_lex_matches_literal_definition() {
        for a in 1..9u64 {
            for b in a + 1..12 {
                for c in b + 1..14 {
                    for d in c + 1..16 {
                        let v = [a, b, c, d];
                        for h in 1..=4 {
                            assert_eq!(
                                check_base(&v, BaseFamily::StrongLex, h).unwrap(),
                                strong_lex_oracle(&v, h),
                                "{v:?} h={h}"
                            );
                        }
                    }
                }
            }
        }
    }
}
