//! Decoder timing over growing sequence lengths.
//!
//! Every fixture uses the 2x2 identity base with `d = 2`, `e = 0`, so only
//! the sequence length changes between rows. Thresholds are unit steps up to
//! the strict headroom bound.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::channel::{syndrome, DefectiveSet, TestOutcome};
use crate::codebook::{build, HeadroomMode, SqgtCode};
use crate::decoders::{dec_qbh, dec_sqlo_l, dec_sqlo_s};
use crate::disjunct::identity_code;
use crate::error::{Error, Result};
use crate::quantization::Thresholds;
use crate::sequences::{base_recursive_superincreasing, base_strong_lex, subset_sums, MultiplierSequence, SequenceKind};

const D: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub decoder: SequenceKind,
    pub k: usize,
    pub nanos_per_call: f64,
    /// Entries in the subset-sum table, for the table decoder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log time against log K, per decoder.
    pub slopes: Vec<(SequenceKind, f64)>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("decoder,k,nanos_per_call,table_size\n");
        for r in &self.rows {
            let table = r.table_size.map_or(String::new(), |t| t.to_string());
            out.push_str(&format!("{},{},{:.1},{}\n", r.decoder, r.k, r.nanos_per_call, table));
        }
        out
    }

    pub fn slope(&self, decoder: SequenceKind) -> Option<f64> {
        self.slopes.iter().find(|(k, _)| *k == decoder).map(|&(_, s)| s)
    }
}

/// Code over the 2x2 identity for `values`, with thresholds `0, 1, ..., 2 * max + 1`.
pub fn fixture(values: Vec<u64>, kind: SequenceKind) -> Result<SqgtCode> {
    let top = 2 * values.last().copied().ok_or_else(|| Error::InvalidInput("empty sequence".into()))? + 1;
    let th = Thresholds::uniform(1, top as usize)?;
    let seq = MultiplierSequence::new(values, kind, D, th.clone())?;
    build(&identity_code(2, 0)?, &seq, &th, D, HeadroomMode::Strict)
}

/// Four defective sets touching the first, middle and last blocks.
fn workload(code: &SqgtCode) -> Result<Vec<TestOutcome>> {
    let k = code.sequence().len();
    let picks = [
        vec![code.join_column(0, 0)],
        vec![code.join_column(k - 1, 1)],
        vec![code.join_column(k / 2, 0), code.join_column(k - 1, 0)],
        vec![code.join_column(0, 0), code.join_column(k.min(2) - 1, 1)],
    ];
    picks
        .into_iter()
        .map(|cols| syndrome(code, &DefectiveSet::new(cols, code)?))
        .collect()
}

fn time_per_call(calls: usize, outcomes: &[TestOutcome], mut run: impl FnMut(&TestOutcome)) -> f64 {
    for y in outcomes {
        run(y);
    }
    // Best of five batches damps scheduler noise.
    (0..5)
        .map(|_| {
            let start = Instant::now();
            for i in 0..calls {
                run(black_box(&outcomes[i % outcomes.len()]));
            }
            start.elapsed().as_nanos() as f64 / calls as f64
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Times the three decoders for each sequence length in `ks`.
///
/// The SQLO_s rows use the recursive 2-superincreasing base, the SQLO_l rows
/// the explicit strong-lex base, and the table decoder runs on the SQLO_s
/// sequence re-verified as quantized B_2.
pub fn bench_decoders(ks: &[usize], calls: usize) -> Result<BenchReport> {
    if ks.len() < 2 || calls == 0 {
        return Err(Error::InvalidInput("need at least two lengths and one call".into()));
    }
    let mut rows = Vec::new();
    for &k in ks {
        if k < 2 {
            return Err(Error::InvalidInput(format!("sequence length {k} below 2")));
        }
        let superinc = fixture(base_recursive_superincreasing(D, k)?.values, SequenceKind::SqloS)?;
        let lex = fixture(base_strong_lex(D, k)?.values, SequenceKind::SqloL)?;
        let table = fixture(superinc.sequence().values().to_vec(), SequenceKind::QuantizedBh)?;

        for (code, decoder) in [(&superinc, SequenceKind::SqloS), (&lex, SequenceKind::SqloL), (&table, SequenceKind::QuantizedBh)] {
            let outcomes = workload(code)?;
            let run = |y: &TestOutcome| {
                let res = match decoder {
                    SequenceKind::SqloS => dec_sqlo_s(y, code),
                    SequenceKind::SqloL => dec_sqlo_l(y, code),
                    SequenceKind::QuantizedBh => dec_qbh(y, code),
                };
                black_box(res.expect("fixture outcomes decode"));
            };
            let nanos_per_call = time_per_call(calls, &outcomes, run);
            let table_size = (decoder == SequenceKind::QuantizedBh)
                .then(|| subset_sums(code.sequence(), D).map(|t| t.len()))
                .transpose()?;
            rows.push(BenchRow {
                decoder,
                k,
                nanos_per_call,
                table_size,
            });
        }
    }
    let slopes = SequenceKind::ALL
        .iter()
        .map(|&kind| {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.decoder == kind)
                .map(|r| (r.k as f64, r.nanos_per_call))
                .collect();
            (kind, log_log_slope(&points))
        })
        .collect();
    Ok(BenchReport { rows, slopes })
}
