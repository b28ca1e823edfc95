#![allow(dead_code)]

use sqgt_core::codebook::build;
use sqgt_core::disjunct::{identity_code, kautz_singleton};
use sqgt_core::sequences::greedy_generate;
use sqgt_core::{BinaryDisjunctCode, HeadroomMode, MultiplierSequence, SequenceKind, SqgtCode, Thresholds};

/// Fifteen irregular bins; the first nine thresholds are the worked greedy example.
pub const IRREGULAR: [u64; 16] = [0, 2, 5, 6, 10, 13, 15, 16, 18, 21, 25, 28, 30, 34, 37, 40];

pub fn irregular() -> Thresholds {
    Thresholds::new(IRREGULAR.to_vec()).unwrap()
}

pub struct Entry {
    pub label: String,
    pub code: SqgtCode,
}

/// Length-`k` sequence for `kind`, verified for pairs.
///
/// Greedy stalls at two elements for the lexicographic kind on these
/// thresholds (any start at 2 is a dead end), so that kind uses a
/// searched sequence instead.
pub fn sequence(kind: SequenceKind, k: usize) -> MultiplierSequence {
    if kind == SequenceKind::SqloL {
        return MultiplierSequence::new([4, 9, 11][..k].to_vec(), kind, 2, irregular()).unwrap();
    }
    let seq = greedy_generate(&irregular(), 2, k, kind).unwrap();
    assert_eq!(seq.len(), k, "greedy {kind} stalled below {k}");
    seq
}

/// Desk-scale corpus over all three kinds: identity bases (strict, and
/// permissive for n = 5), Kautz-Singleton over GF(3), and GF(5) bases that
/// correct one error.
pub fn corpus() -> Vec<Entry> {
    let bases: Vec<(&str, BinaryDisjunctCode, usize, HeadroomMode, usize)> = vec![
        ("I2", identity_code(2, 0).unwrap(), 2, HeadroomMode::Strict, 3),
        ("I3", identity_code(3, 0).unwrap(), 2, HeadroomMode::Strict, 3),
        ("I5", identity_code(5, 0).unwrap(), 1, HeadroomMode::Permissive, 3),
        ("KS3", kautz_singleton(3, 2, Some(2)).unwrap(), 2, HeadroomMode::Strict, 3),
        ("KS5/d1", kautz_singleton(5, 2, Some(1)).unwrap(), 1, HeadroomMode::Strict, 3),
        ("KS5/d2", kautz_singleton(5, 2, Some(2)).unwrap(), 2, HeadroomMode::Strict, 2),
    ];
    let th = irregular();
    let mut out = Vec::new();
    for kind in SequenceKind::ALL {
        for (name, base, d, mode, max_k) in &bases {
            for k in 1..=*max_k {
                let seq = sequence(kind, k);
                let code = build(base, &seq, &th, *d, *mode).unwrap();
                out.push(Entry {
                    label: format!("{kind} {name} K={k} d={d} e={} {mode}", code.e()),
                    code,
                });
            }
        }
    }
    out
}
