//! Linear-time subset-sum solvers for the ordered families.

use super::{MultiplierSequence, SequenceKind};
use crate::error::{Error, Result};

/// Finds the unique subset of at most `d` elements of `seq` summing to
/// `beta`, as ascending indices into the sequence.
///
/// SQLO_s sequences are solved greedily from the largest element. SQLO_l
/// sequences first fix the cardinality from the prefix sums and then scan
/// forward, taking an element whenever the remainder is smaller than the
/// next `s'` elements together. Quantized B_h sequences have no such solver.
pub fn knapsack_solve(seq: &MultiplierSequence, d: usize, beta: u64) -> Result<Option<Vec<usize>>> {
    if d == 0 || beta == 0 {
        return Err(Error::InvalidInput(format!("need d >= 1 and beta >= 1, got d={d}, beta={beta}")));
    }
    if !seq.supports(d) {
        return Err(Error::Parameter(format!(
            "sequence verified for h={} cannot resolve subsets of {d} elements",
            seq.h()
        )));
    }
    match seq.kind() {
        SequenceKind::QuantizedBh => Err(Error::UnsupportedKind("quantized-bh")),
        SequenceKind::SqloS => Ok(superincreasing(seq.values(), d, beta)),
        SequenceKind::SqloL => Ok(lexicographic(seq.values(), d, beta)),
    }
}

fn superincreasing(values: &[u64], d: usize, beta: u64) -> Option<Vec<usize>> {
    let mut rest = beta;
    let mut taken = Vec::new();
    for (i, &v) in values.iter().enumerate().rev() {
        if rest >= v {
            rest -= v;
            taken.push(i);
            if taken.len() > d {
                return None;
            }
        }
    }
    if rest != 0 {
        return None;
    }
    taken.reverse();
    Some(taken)
}

fn lexicographic(values: &[u64], d: usize, beta: u64) -> Option<Vec<usize>> {
    let k = values.len();
    // prefix[j] = sum of the first j elements.
    let mut prefix = Vec::with_capacity(k + 1);
    prefix.push(0u64);
    for &v in values {
        prefix.push(prefix.last().unwrap().saturating_add(v));
    }
    // Cardinality: the number of leading prefix sums not exceeding beta.
    let mut size = prefix[1..].iter().position(|&g| beta < g).unwrap_or(k);
    // Subsets of fewer than d elements all sum below the first d+1 elements.
    size = size.min(d);
    if size == 0 {
        return None;
    }

    let mut rest = beta;
    let mut remaining = size;
    let mut taken = Vec::with_capacity(size);
    for i in 0..k {
        if remaining == 0 {
            break;
        }
        let take = if i + remaining < k {
            rest < prefix[i + remaining + 1] - prefix[i + 1]
        } else {
            true
        };
        if take {
            rest = rest.checked_sub(values[i])?;
            remaining -= 1;
            taken.push(i);
        }
    }
    (remaining == 0 && rest == 0).then_some(taken)
}
