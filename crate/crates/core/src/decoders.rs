//! Zero-error decoders. All three share support recovery from the zero
//! pattern of `y`; they differ in how each support's multiplier subset is
//! read off the bins.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::TestOutcome;
use crate::codebook::SqgtCode;
use crate::disjunct::BinaryDisjunctCode;
use crate::error::{Error, Result};
use crate::sequences::{knapsack_solve, subset_sums, SequenceKind};

const EMPTY_WARNING: &str = "no support recovered: no defectives, or the error contract was violated";

/// Multipliers found on one recovered base column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportDecoding {
    pub base_column: usize,
    /// Sum of the recovered multipliers.
    pub strength: u64,
    pub multipliers: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodedResult {
    /// Recovered column indices, ascending.
    pub defectives: Vec<usize>,
    pub per_support: Vec<SupportDecoding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl DecodedResult {
    fn empty() -> Self {
        Self {
            defectives: Vec::new(),
            per_support: Vec::new(),
            warning: Some(EMPTY_WARNING.into()),
        }
    }
}

/// Base columns whose support meets a zero of `y` in at most `e` rows.
pub fn recover_support(y: &TestOutcome, base: &BinaryDisjunctCode, e: usize) -> Result<Vec<usize>> {
    if y.y.len() != base.m() {
        return Err(Error::InvalidInput(format!("result has {} entries, code has {} rows", y.y.len(), base.m())));
    }
    Ok((0..base.n())
        .filter(|&c| base.support(c).iter().filter(|&&r| y.y[r] == 0).count() <= e)
        .collect())
}

/// The `2e+1` support rows with the smallest results, ties broken by row
/// index, returned ascending.
pub fn select_witness_coords(y: &TestOutcome, support: &[usize], e: usize) -> Result<Vec<usize>> {
    let need = 2 * e + 1;
    if support.len() < need {
        return Err(Error::InvalidBase(format!(
            "column support of size {} cannot hold {need} witness rows",
            support.len()
        )));
    }
    let mut rows = support.to_vec();
    rows.sort_by_key(|&r| (y.y[r], r));
    rows.truncate(need);
    rows.sort_unstable();
    Ok(rows)
}

/// Runs the decoder matching the code's sequence kind.
pub fn decode(y: &TestOutcome, code: &SqgtCode) -> Result<DecodedResult> {
    match code.kind() {
        SequenceKind::QuantizedBh => dec_qbh(y, code),
        SequenceKind::SqloS => dec_sqlo_s(y, code),
        SequenceKind::SqloL => dec_sqlo_l(y, code),
    }
}

fn check_outcome(y: &TestOutcome, code: &SqgtCode) -> Result<()> {
    let bins = code.thresholds().bins();
    if let Some(&v) = y.y.iter().find(|&&v| v >= bins) {
        return Err(Error::InvalidBin { bin: v, bins });
    }
    Ok(())
}

fn assemble(code: &SqgtCode, mut per_support: Vec<SupportDecoding>, members: Vec<(usize, Vec<usize>)>) -> DecodedResult {
    let mut defectives: Vec<usize> = members
        .iter()
        .flat_map(|(col, blocks)| blocks.iter().map(|&j| code.join_column(j, *col)))
        .collect();
    defectives.sort_unstable();
    per_support.sort_by_key(|s| s.base_column);
    DecodedResult {
        defectives,
        per_support,
        warning: None,
    }
}

/// Subset-sum table decoder for any quantized B_d sequence.
///
/// For each recovered support, takes the largest tabulated sum that stays
/// below the upper threshold of the observed bin on all but at most `e`
/// support rows. Rows outside the support pass that test trivially.
pub fn dec_qbh(y: &TestOutcome, code: &SqgtCode) -> Result<DecodedResult> {
    check_outcome(y, code)?;
    let (base, e) = (code.base(), code.e());
    let supports = recover_support(y, base, e)?;
    if supports.is_empty() {
        return Ok(DecodedResult::empty());
    }
    let table = subset_sums(code.sequence(), code.d())?;
    let eta = code.thresholds().as_slice();
    let values = code.sequence().values();
    let mut per_support = Vec::with_capacity(supports.len());
    let mut members = Vec::with_capacity(supports.len());
    for col in supports {
        let upper: Vec<u64> = base.support(col).iter().map(|&r| eta[y.y[r] + 1]).collect();
        let entry = table
            .iter()
            .rev()
            .find(|s| upper.iter().filter(|&&u| s.sum >= u).count() <= e)
            .ok_or_else(|| Error::DecodingFailure(format!("no tabulated sum fits the bins on base column {col}")))?;
        per_support.push(SupportDecoding {
            base_column: col,
            strength: entry.sum,
            multipliers: entry.members.iter().map(|&j| values[j]).collect(),
        });
        members.push((col, entry.members.clone()));
    }
    Ok(assemble(code, per_support, members))
}

/// Decoder for SQLO_s codes using the greedy subset-sum solver.
pub fn dec_sqlo_s(y: &TestOutcome, code: &SqgtCode) -> Result<DecodedResult> {
    expect_kind(code, SequenceKind::SqloS)?;
    dec_by_witness(y, code)
}

/// Decoder for SQLO_l code using the cardinality-first subset-sum solver.
pub fn dec_sqlo_l(y: &TestOutcome, code: &SqgtCode) -> Result<DecodedResult> {
    expect_kind(code, SequenceKind::SqloL)?;
    dec_by_witness(y, code)
}

fn expect_kind(code: &SqgtCode, kind: SequenceKind) -> Result<()> {
    if code.kind() != kind {
        return Err(Error::Parameter(format!("decoder for {kind} codes called on a {} code", code.kind())));
    }
    Ok(())
}

/// Per witness row, the first integer in the observed bin that is a sum of
/// at most `d` multipliers; the sum seen on at least `e+1` rows wins.
fn dec_by_witness(y: &TestOutcome, code: &SqgtCode) -> Result<DecodedResult> {
    check_outcome(y, code)?;
    let (base, e, d) = (code.base(), code.e(), code.d());
    let supports = recover_support(y, base, e)?;
    if supports.is_empty() {
        return Ok(DecodedResult::empty());
    }
    let th = code.thresholds();
    let seq = code.sequence();
    let mut per_support = Vec::with_capacity(supports.len());
    let mut members = Vec::with_capacity(supports.len());
    for col in supports {
        let mut votes: BTreeMap<u64, (usize, Vec<usize>)> = BTreeMap::new();
        for row in select_witness_coords(y, base.support(col), e)? {
            let (lo, hi) = th.bin_bounds(y.y[row])?;
            for beta in lo.max(1)..hi {
                if let Some(subset) = knapsack_solve(seq, d, beta)? {
                    votes.entry(beta).or_insert((0, subset)).0 += 1;
                    break;
                }
            }
        }
        let mut winners = votes.into_iter().filter(|(_, (count, _))| *count > e);
        let (strength, (_, subset)) = winners
            .next()
            .ok_or_else(|| Error::DecodingFailure(format!("no sum repeats {} times on base column {col}", e + 1)))?;
        if winners.next().is_some() {
            return Err(Error::DecodingFailure(format!("two sums reach {} votes on base column {col}", e + 1)));
        }
        per_support.push(SupportDecoding {
            base_column: col,
            strength,
            multipliers: subset.iter().map(|&j| seq.values()[j]).collect(),
        });
        members.push((col, subset));
    }
    Ok(assemble(code, per_support, members))
}
