//! Generators: greedy search over thresholds, scaling of base sequences, and
//! explicit base-sequence constructions.

use super::check::{check_base, check_sequence, MAX_CHECK_LEN};
use super::{BaseFamily, BaseSequence, MultiplierSequence, SequenceKind};
use crate::error::{Error, Result};
use crate::quantization::Thresholds;

/// Greedy generator: start at the first threshold and repeatedly append the
/// smallest integer that keeps the sequence in `kind`.
///
/// Stops after `k_target` elements or once no candidate below the top
/// threshold extends the prefix, so the result may be shorter than asked.
pub fn greedy_generate(th: &Thresholds, h: usize, k_target: usize, kind: SequenceKind) -> Result<MultiplierSequence> {
    if k_target == 0 {
        return Err(Error::InvalidInput("target length must be at least 1".into()));
    }
    if h == 0 {
        return Err(Error::InvalidInput("h must be at least 1".into()));
    }
    if th.bins() < 2 {
        return Err(Error::InfeasibleThresholds(format!(
            "a single bin leaves no room above the first threshold {}",
            th.first()
        )));
    }
    let mut values = vec![th.first()];
    let target = k_target.min(MAX_CHECK_LEN);
    while values.len() < target {
        let start = values[values.len() - 1] + 1;
        let mut extended = false;
        for candidate in start..th.top() {
            values.push(candidate);
            if check_sequence(&values, th, h, kind)?.pass {
                extended = true;
                break;
            }
            values.pop();
        }
        if !extended {
            break;
        }
    }
    MultiplierSequence::new(values, kind, h, th.clone())
}

/// Scales a base sequence by the largest gap among the first `s` thresholds
/// and keeps the longest prefix whose sliding `h+1`-element window still fits
/// below threshold `s`.
pub fn scaled_construction(base: &BaseSequence, th: &Thresholds, h: usize, s: usize) -> Result<MultiplierSequence> {
    if h == 0 {
        return Err(Error::InvalidInput("h must be at least 1".into()));
    }
    if s < 2 || s > th.bins() {
        return Err(Error::InvalidInput(format!("s={s} not in [2, {}]", th.bins())));
    }
    if base.h < h && base.h < base.values.len() {
        return Err(Error::Parameter(format!(
            "base verified for h={} cannot back a sequence for h={h}",
            base.h
        )));
    }
    let kind = match base.family {
        BaseFamily::SubsetSumDistinct => SequenceKind::QuantizedBh,
        BaseFamily::HSuperincreasing => SequenceKind::SqloS,
        BaseFamily::StrongLex => SequenceKind::SqloL,
    };
    let gap = th.largest_gap(s)?;
    let limit = th.as_slice()[s];
    let fits = |k: usize| {
        base.values[k.saturating_sub(h + 1)..k]
            .iter()
            .try_fold(0u64, |acc, &b| acc.checked_add(b))
            .and_then(|w| w.checked_mul(gap))
            .is_some_and(|w| limit > w)
    };
    let len = (1..=base.values.len()).take_while(|&k| fits(k)).last().unwrap_or(0);
    if len == 0 {
        return Err(Error::InfeasibleThresholds(format!(
            "threshold {limit} does not exceed gap {gap} times the first base element {}",
            base.values[0]
        )));
    }
    let values = base.values[..len].iter().map(|&b| b * gap).collect();
    MultiplierSequence::new(values, kind, h, th.clone())
}

/// `1, 2, 4, ..., 2^(h-1)`, then each element is one more than the sum of
/// its `h` predecessors.
pub fn base_recursive_superincreasing(h: usize, k: usize) -> Result<BaseSequence> {
    if h == 0 || k == 0 {
        return Err(Error::InvalidInput(format!("need h >= 1 and K >= 1, got h={h}, K={k}")));
    }
    let mut values: Vec<u64> = Vec::with_capacity(k);
    for i in 0..k {
        let next = if i < h {
            1u64.checked_shl(i as u32).filter(|_| i < 64)
        } else {
            values[i - h..].iter().try_fold(1u64, |acc, &v| acc.checked_add(v))
        };
        let next = next.ok_or_else(|| Error::InvalidInput(format!("element {} overflows u64", i + 1)))?;
        values.push(next);
    }
    BaseSequence::new(values, BaseFamily::HSuperincreasing, h)
}

/// Explicit strong-lex sequence: spread offsets far enough apart that
/// equal-size sums follow lexicographic order, then lift them by a common
/// shift large enough that adding an element always wins.
pub fn base_strong_lex(h: usize, k: usize) -> Result<BaseSequence> {
    if h == 0 || k == 0 {
        return Err(Error::InvalidInput(format!("need h >= 1 and K >= 1, got h={h}, K={k}")));
    }
    if h == 1 {
        return BaseSequence::new((1..=k as u64).collect(), BaseFamily::StrongLex, h);
    }
    let overflow = || Error::InvalidInput(format!("strong-lex sequence for h={h}, K={k} overflows u64"));
    // gaps[t] separates offsets t and t+1; each exceeds h-1 times all later gaps.
    let mut gaps = vec![0u64; k.saturating_sub(1)];
    let mut tail = 0u64;
    for t in (0..gaps.len()).rev() {
        gaps[t] = (h as u64 - 1)
            .checked_mul(tail)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(overflow)?;
        tail = tail.checked_add(gaps[t]).ok_or_else(overflow)?;
    }
    let mut offsets = vec![0u64];
    for &g in &gaps {
        offsets.push(offsets[offsets.len() - 1].checked_add(g).ok_or_else(overflow)?);
    }
    // The shift must make any s+1 offsets beat any s offsets, s < h.
    let mut shift = 1u64;
    for s in 0..h.min(k) {
        let top: u64 = offsets[k - s..].iter().sum();
        let bottom: u64 = offsets[..=s].iter().sum();
        shift = shift.max(top.saturating_sub(bottom) + 1);
    }
    let values = offsets
        .iter()
        .map(|&c| c.checked_add(shift))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(overflow)?;
    BaseSequence::new(values, BaseFamily::StrongLex, h)
}

/// Exhaustive search for a strong-lex sequence of length `k` whose largest
/// element is as small as possible, trying bounds up to `max_value`.
///
/// Every prefix of a strong-lex sequence is strong-lex, so partial sequences
/// that already fail are pruned. Returns `None` if no sequence fits.
pub fn strong_lex_search(h: usize, k: usize, max_value: u64) -> Result<Option<BaseSequence>> {
    if h == 0 || k == 0 {
        return Err(Error::InvalidInput(format!("need h >= 1 and K >= 1, got h={h}, K={k}")));
    }
    if k > 12 {
        return Err(Error::InvalidInput(format!("exhaustive search is limited to 12 elements, got {k}")));
    }
    fn extend(prefix: &mut Vec<u64>, k: usize, h: usize, bound: u64) -> Result<bool> {
        if prefix.len() == k {
            return Ok(true);
        }
        let low = prefix.last().map_or(1, |&v| v + 1);
        let slots_after = (k - prefix.len() - 1) as u64;
        for v in low..=bound.saturating_sub(slots_after) {
            prefix.push(v);
            if check_base(prefix, BaseFamily::StrongLex, h)? && extend(prefix, k, h, bound)? {
                return Ok(true);
            }
            prefix.pop();
        }
        Ok(false)
    }
    for bound in k as u64..=max_value {
        let mut prefix = Vec::with_capacity(k);
        if extend(&mut prefix, k, h, bound)? {
            return BaseSequence::new(prefix, BaseFamily::StrongLex, h).map(Some);
        }
    }
    Ok(None)
}
