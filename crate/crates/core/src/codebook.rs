//! SQGT codes: horizontal concatenation of scaled copies of a binary base
//! code, the brute-force separability check, and feasibility reports.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disjunct::{binomial, BinaryDisjunctCode, Provenance};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quantization::Thresholds;
use crate::sequences::{necessary_cardinality, MultiplierSequence, SequenceKind};

/// Default cap on syndrome-coordinate comparisons for [`verify_sq_separable`].
pub const DEFAULT_SEPARABILITY_BUDGET: u128 = 100_000_000;

/// How much room above the largest test strength the top threshold must leave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadroomMode {
    /// `t_Q > d * (q - 1)`: no sum of `d` entries can leave the quantizer range.
    Strict,
    /// `t_Q >` the sum of the `d` largest multipliers. Defectives sharing a
    /// test row with equal multipliers can still overflow; syndromes catch it.
    Permissive,
}

impl fmt::Display for HeadroomMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Permissive => "permissive",
        })
    }
}

impl FromStr for HeadroomMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "permissive" => Ok(Self::Permissive),
            other => Err(Error::Parse(format!("unknown mode `{other}` (expected strict or permissive)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqgtCode {
    matrix: Matrix,
    sequence: MultiplierSequence,
    base: BinaryDisjunctCode,
    d: usize,
    mode: HeadroomMode,
}

/// `{t_1, max(t_2, t_3 - t_1)}`: a two-element sequence that works for any
/// thresholds with at least four bins and enough room at the top.
pub fn pair_sequence(th: &Thresholds) -> Result<MultiplierSequence> {
    if th.bins() < 4 {
        return Err(Error::InfeasibleThresholds(format!("need at least 4 bins, got {}", th.bins())));
    }
    let eta = th.as_slice();
    let first = eta[1];
    let second = eta[2].max(eta[3] - eta[1]);
    if th.top() <= first + second {
        return Err(Error::InfeasibleThresholds(format!(
            "top threshold {} does not exceed {first} + {second}",
            th.top()
        )));
    }
    MultiplierSequence::new(vec![first, second], SequenceKind::QuantizedBh, 2, th.clone())
}

/// Concatenates `alpha_j * base` for every multiplier, block by block.
pub fn build(
    base: &BinaryDisjunctCode,
    seq: &MultiplierSequence,
    th: &Thresholds,
    d: usize,
    mode: HeadroomMode,
) -> Result<SqgtCode> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if seq.thresholds() != th {
        return Err(Error::Parameter(format!(
            "sequence was verified against {}, not {th}",
            seq.thresholds()
        )));
    }
    let largest = seq.largest();
    match mode {
        HeadroomMode::Strict => {
            let need = (d as u64).checked_mul(largest);
            if need.is_none_or(|need| th.top() <= need) {
                return Err(Error::Headroom(format!(
                    "strict mode needs t_Q > d(q-1): {} <= {d}*{largest}",
                    th.top()
                )));
            }
        }
        HeadroomMode::Permissive => {
            let need = seq.top_sum(d);
            if th.top() <= need {
                return Err(Error::Headroom(format!(
                    "permissive mode needs t_Q > sum of the {d} largest multipliers: {} <= {need}",
                    th.top()
                )));
            }
        }
    }
    if !seq.supports(d) {
        return Err(Error::Parameter(format!("sequence verified for h={} < d={d}", seq.h())));
    }
    if !base.supports(d) {
        return Err(Error::Parameter(format!("base code is only {}-disjunct, need d={d}", base.d())));
    }
    let nb = base.n();
    let mut data = Vec::with_capacity(base.m() * nb * seq.len());
    for r in 0..base.m() {
        for &alpha in seq.values() {
            data.extend(base.matrix().row(r).iter().map(|&b| b * alpha));
        }
    }
    let matrix = Matrix::new(base.m(), nb * seq.len(), largest + 1, data)?;
    Ok(SqgtCode {
        matrix,
        sequence: seq.clone(),
        base: base.clone(),
        d,
        mode,
    })
}

#[derive(Serialize, Deserialize)]
struct BaseInfo {
    m: usize,
    n: usize,
    d: usize,
    e: usize,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    thresholds: Thresholds,
    sequence: serde_json::Value,
    d: usize,
    e: usize,
    base: BaseInfo,
    mode: HeadroomMode,
}

impl SqgtCode {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn thresholds(&self) -> &Thresholds {
        self.sequence.thresholds()
    }

    pub fn sequence(&self) -> &MultiplierSequence {
        &self.sequence
    }

    pub fn kind(&self) -> SequenceKind {
        self.sequence.kind()
    }

    pub fn base(&self) -> &BinaryDisjunctCode {
        &self.base
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.base.e()
    }

    /// Alphabet size, one more than the largest multiplier.
    pub fn q(&self) -> u64 {
        self.matrix.q()
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn mode(&self) -> HeadroomMode {
        self.mode
    }

    /// Permissive codes rely on the caller to keep overlapping supports small.
    pub fn warning(&self) -> Option<&'static str> {
        (self.mode == HeadroomMode::Permissive)
            .then_some("permissive headroom: overlapping defectives may exceed the top threshold")
    }

    /// `(block, base column)` of column `c`.
    pub fn split_column(&self, c: usize) -> (usize, usize) {
        (c / self.base.n(), c % self.base.n())
    }

    pub fn join_column(&self, block: usize, base_column: usize) -> usize {
        block * self.base.n() + base_column
    }

    pub fn multiplier(&self, c: usize) -> u64 {
        self.sequence.values()[c / self.base.n()]
    }

    /// JSON metadata stored next to the matrix file.
    pub fn sidecar_json(&self) -> String {
        let sidecar = Sidecar {
            thresholds: self.thresholds().clone(),
            sequence: serde_json::to_value(&self.sequence).expect("plain data serializes"),
            d: self.d,
            e: self.e(),
            base: BaseInfo {
                m: self.base.m(),
                n: self.base.n(),
                d: self.base.d(),
                e: self.base.e(),
                provenance: self.base.provenance().clone(),
            },
            mode: self.mode,
        };
        serde_json::to_string_pretty(&sidecar).expect("plain data serializes")
    }

    /// Reloads a code from its matrix text and sidecar, rebuilding it from
    /// the recorded parts and checking that it reproduces the matrix.
    pub fn from_parts(matrix_text: &str, sidecar_json: &str) -> Result<Self> {
        let matrix = Matrix::from_text(matrix_text)?;
        let sidecar: Sidecar = serde_json::from_str(sidecar_json).map_err(|e| Error::Parse(e.to_string()))?;
        let sequence = MultiplierSequence::from_json(&sidecar.sequence.to_string())?;
        let info = &sidecar.base;
        if matrix.rows() != info.m || matrix.cols() != info.n * sequence.len() {
            return Err(Error::Parse(format!(
                "matrix is {}x{}, sidecar describes {}x{}",
                matrix.rows(),
                matrix.cols(),
                info.m,
                info.n * sequence.len()
            )));
        }
        // The first block is alpha_1 times the base.
        let alpha = sequence.values()[0];
        let mut base_data = Vec::with_capacity(info.m * info.n);
        for r in 0..info.m {
            for c in 0..info.n {
                let v = matrix.get(r, c);
                if v % alpha != 0 || v / alpha > 1 {
                    return Err(Error::Parse(format!("entry {v} at ({r}, {c}) is not 0 or {alpha}")));
                }
                base_data.push(v / alpha);
            }
        }
        let base_matrix = Matrix::new(info.m, info.n, 2, base_data)?;
        let base = BinaryDisjunctCode::rebuild(&info.provenance, base_matrix, info.d, info.e)?;
        let code = build(&base, &sequence, &sidecar.thresholds, sidecar.d, sidecar.mode)?;
        if code.matrix != matrix {
            return Err(Error::Parse("matrix does not match the code described by the sidecar".into()));
        }
        if code.e() != sidecar.e {
            return Err(Error::Parse(format!("sidecar e={} but the base corrects e={}", sidecar.e, code.e())));
        }
        Ok(code)
    }
}

/// Brute-force separability: the syndromes of any two distinct column sets
/// with sizes in `[l, u]` differ in at least `2e+1` coordinates.
pub fn verify_sq_separable(code: &SqgtCode, l: usize, u: usize, e: usize) -> Result<bool> {
    verify_sq_separable_with_budget(code, l, u, e, DEFAULT_SEPARABILITY_BUDGET)
}

pub fn verify_sq_separable_with_budget(code: &SqgtCode, l: usize, u: usize, e: usize, budget: u128) -> Result<bool> {
    verify_matrix_separable(code.matrix(), code.thresholds(), l, u, e, budget)
}

/// Separability of an arbitrary nonnegative integer matrix under `th`.
///
/// Sums reaching the top threshold are an error, not a collision.
pub fn verify_matrix_separable(matrix: &Matrix, th: &Thresholds, l: usize, u: usize, e: usize, budget: u128) -> Result<bool> {
    if l == 0 || l > u {
        return Err(Error::InvalidInput(format!("need 1 <= l <= u, got l={l}, u={u}")));
    }
    let (m, n) = (matrix.rows(), matrix.cols());
    let u = u.min(n);
    if l > u {
        return Ok(true);
    }
    let sets: u128 = (l..=u).map(|s| binomial(n as u128, s as u128)).sum();
    let work = sets.saturating_mul(sets.saturating_sub(1)) / 2 * m as u128;
    if work > budget {
        return Err(Error::BudgetExceeded { needed: work, budget });
    }
    let columns: Vec<Vec<usize>> = (l..=u)
        .flat_map(|s| itertools::Itertools::combinations(0..n, s))
        .collect();
    let syndromes = columns
        .par_iter()
        .map(|cols| {
            let sums: Vec<u64> = (0..m).map(|r| cols.iter().map(|&c| matrix.get(r, c)).sum()).collect();
            th.quantize_vector(&sums)
        })
        .collect::<Result<Vec<_>>>()?;
    let need = 2 * e + 1;
    Ok((0..syndromes.len()).into_par_iter().all(|a| {
        (a + 1..syndromes.len()).all(|b| {
            let dist = syndromes[a].iter().zip(&syndromes[b]).filter(|(x, y)| x != y).count();
            dist >= need
        })
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// `d log_Q(n/d)`, lower-order terms dropped.
    pub counting_bound: f64,
    /// `d^2 / (2 log2 d) * log2 n` for `d >= 2`, lower-order terms dropped.
    pub disjunct_bound: Option<f64>,
    /// Subsets of at most `h` of the `K` multipliers fit in `Q` bins.
    pub cardinality_feasible: bool,
    pub cardinality_rule: String,
    /// The alphabet reaches the first nonzero bin: `q >= t_1 + 1`.
    pub alphabet_feasible: bool,
    pub notes: Vec<String>,
}

/// Informational lower bounds and necessary conditions for a code with `n`
/// columns, `d` defectives, `K` multipliers verified for `h`, and alphabet `q`.
pub fn feasibility_report(n: u64, d: usize, k: usize, h: usize, q: u64, th: &Thresholds) -> FeasibilityReport {
    let bins = th.bins();
    let (nf, df) = (n as f64, d as f64);
    let counting_bound = if bins >= 2 { df * (nf / df).ln() / (bins as f64).ln() } else { f64::INFINITY };
    let disjunct_bound = (d >= 2).then(|| df * df / (2.0 * df.log2()) * nf.log2());
    let cardinality_rule = if k <= h {
        format!("K <= log2 Q: {k} <= {:.3}", (bins as f64).log2())
    } else {
        format!("sum of C({k}, i) for i <= {h} must not exceed Q = {bins}")
    };
    let alphabet_feasible = q > th.first();
    let mut notes = vec!["lower bounds omit their (1 + o(1)) factors".to_string()];
    if !alphabet_feasible {
        let msg = if q == 2 {
            "no binary code exists for these thresholds".to_string()
        } else {
            format!("no code over alphabet {q} exists for these thresholds")
        };
        notes.push(format!("{msg}: q = {q} < t_1 + 1 = {}", th.first() + 1));
    }
    FeasibilityReport {
        counting_bound,
        disjunct_bound,
        cardinality_feasible: necessary_cardinality(k, h, bins),
        cardinality_rule,
        alphabet_feasible,
        notes,
    }
}
