//! Binary d-disjunct, e-error-correcting base matrices.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default cap on elementary (codeword, d-subset) checks before a warning.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// How many seeds a random draw tries by default.
pub const DEFAULT_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Provenance {
    Identity,
    KautzSingleton { q_field: u64, k: usize },
    /// `seed` is the seed of the accepted draw.
    Random { seed: u64, density: f64 },
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDisjunctCode {
    matrix: Matrix,
    d: usize,
    e: usize,
    provenance: Provenance,
    /// Rows holding a 1, per column.
    supports: Vec<Vec<usize>>,
}

impl BinaryDisjunctCode {
    fn assemble(matrix: Matrix, d: usize, e: usize, provenance: Provenance) -> Result<Self> {
        if !matrix.is_binary() {
            return Err(Error::InvalidInput("base matrix must be binary".into()));
        }
        let supports: Vec<Vec<usize>> = (0..matrix.cols())
            .map(|c| (0..matrix.rows()).filter(|&r| matrix.get(r, c) == 1).collect())
            .collect();
        if let Some(c) = supports.iter().position(Vec::is_empty) {
            return Err(Error::InvalidInput(format!("column {c} is all zero")));
        }
        if d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        Ok(Self {
            matrix,
            d,
            e,
            provenance,
            supports,
        })
    }

    /// A user-supplied matrix, accepted only if the brute-force verifier
    /// confirms the claimed `d` and `e`.
    pub fn from_matrix(matrix: Matrix, d: usize, e: usize) -> Result<Self> {
        let code = Self::assemble(matrix, d, e, Provenance::UserSupplied)?;
        if !verify_disjunct(&code.matrix, d, e) {
            return Err(Error::InvalidBase(format!("matrix is not {d}-disjunct with {} private rows", 2 * e + 1)));
        }
        Ok(code)
    }

    /// Rebuilds a code from its provenance and checks it reproduces `matrix`.
    pub fn rebuild(provenance: &Provenance, matrix: Matrix, d: usize, e: usize) -> Result<Self> {
        let code = match *provenance {
            Provenance::Identity => identity_code(matrix.cols(), e)?,
            Provenance::KautzSingleton { q_field, k } => kautz_singleton(q_field, k, Some(d))?,
            Provenance::Random { seed, density } => {
                random_code(matrix.rows(), matrix.cols(), d, e, Some(density), seed, 1)?
            }
            Provenance::UserSupplied => return Self::from_matrix(matrix, d, e),
        };
        if code.matrix != matrix || !code.supports(d) || code.e < e {
            return Err(Error::InvalidBase(format!(
                "matrix does not match its {provenance:?} provenance with d={d}, e={e}"
            )));
        }
        Ok(Self { d, e, ..code })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Whether the disjunctness claim covers `d` defectives. A code that is
    /// disjunct against all other columns at once covers every `d`.
    pub fn supports(&self, d: usize) -> bool {
        d <= self.d || self.d + 1 >= self.n()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Row indices where column `c` is 1, ascending.
    pub fn support(&self, c: usize) -> &[usize] {
        &self.supports[c]
    }

    /// Column `c` as a 0/1 vector.
    pub fn column(&self, c: usize) -> Vec<u64> {
        self.matrix.column(c)
    }
}

/// `n x n` identity: `d = n - 1` with a single private row, so no error
/// correction.
pub fn identity_code(n: usize, e: usize) -> Result<BinaryDisjunctCode> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("identity base needs n >= 2, got {n}")));
    }
    if e > 0 {
        return Err(Error::InvalidInput(format!(
            "identity columns have one private row and cannot correct e={e} errors"
        )));
    }
    BinaryDisjunctCode::assemble(Matrix::identity(n), n - 1, 0, Provenance::Identity)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| !p.is_multiple_of(i))
}

/// Reed-Solomon codewords over the prime field `GF(q_field)` of all
/// polynomials of degree below `k`, each symbol replaced by its indicator
/// vector of length `q_field`.
///
/// Two columns share at most `k - 1` rows, so with `d` others a column keeps
/// `q_field - d(k-1)` private rows. Without `d` the largest `d` leaving one
/// private row is declared; `e` is then the most that row count allows.
pub fn kautz_singleton(q_field: u64, k: usize, d: Option<usize>) -> Result<BinaryDisjunctCode> {
    if !is_prime(q_field) {
        return Err(Error::InvalidInput(format!(
            "field size {q_field} is not prime (only prime fields are supported)"
        )));
    }
    if k < 2 || k as u64 > q_field {
        return Err(Error::InvalidInput(format!("need 2 <= k <= {q_field}, got k={k}")));
    }
    let n = q_field
        .checked_pow(k as u32)
        .filter(|&n| n <= 1 << 20)
        .ok_or_else(|| Error::InvalidInput(format!("{q_field}^{k} columns is too many")))? as usize;
    let max_d = ((q_field - 1) / (k as u64 - 1)) as usize;
    let d = d.unwrap_or(max_d);
    if d == 0 || d > max_d {
        return Err(Error::InvalidInput(format!("d={d} not in [1, {max_d}] for q={q_field}, k={k}")));
    }
    let e = (q_field as usize - d * (k - 1) - 1) / 2;
    let q = q_field as usize;
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        // Base-q digits of j are the coefficients, lowest degree first.
        let coeffs: Vec<u64> = (0..k).map(|i| (j / q.pow(i as u32) % q) as u64).collect();
        let mut col = vec![0u64; q * q];
        for t in 0..q_field {
            let value = coeffs.iter().rev().fold(0, |acc, &c| (acc * t + c) % q_field);
            col[t as usize * q + value as usize] = 1;
        }
        columns.push(col);
    }
    let matrix = Matrix::from_columns(&columns, 2)?;
    BinaryDisjunctCode::assemble(matrix, d, e, Provenance::KautzSingleton { q_field, k })
}

/// I.i.d. Bernoulli entries, redrawn with `seed + 1, seed + 2, ...` until the
/// brute-force verifier accepts, at most `attempts` draws.
pub fn random_code(
    m: usize,
    n: usize,
    d: usize,
    e: usize,
    density: Option<f64>,
    seed: u64,
    attempts: u64,
) -> Result<BinaryDisjunctCode> {
    if m == 0 || n < 2 || d == 0 {
        return Err(Error::InvalidInput(format!("need m >= 1, n >= 2, d >= 1; got m={m}, n={n}, d={d}")));
    }
    let density = density.unwrap_or(1.0 / (d as f64 + 1.0));
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::InvalidInput(format!("density {density} not in (0, 1)")));
    }
    for offset in 0..attempts {
        let draw_seed = seed.wrapping_add(offset);
        let mut rng = ChaCha8Rng::seed_from_u64(draw_seed);
        let data = (0..m * n).map(|_| u64::from(rng.gen_bool(density))).collect();
        let matrix = Matrix::new(m, n, 2, data)?;
        let provenance = Provenance::Random {
            seed: draw_seed,
            density,
        };
        let Ok(code) = BinaryDisjunctCode::assemble(matrix, d, e, provenance) else {
            continue;
        };
        if verify_disjunct(&code.matrix, d, e) {
            return Ok(code);
        }
    }
    Err(Error::InvalidInput(format!(
        "no {m}x{n} draw in {attempts} attempts from seed {seed} is {d}-disjunct with e={e}"
    )))
}

/// Brute-force disjunctness: every column keeps at least `2e+1` rows outside
/// the union of any `d` other columns. `d` is clamped to `n - 1`.
pub fn verify_disjunct(matrix: &Matrix, d: usize, e: usize) -> bool {
    verify_disjunct_with_budget(matrix, d, e, DEFAULT_BUDGET)
}

pub fn verify_disjunct_with_budget(matrix: &Matrix, d: usize, e: usize, budget: u128) -> bool {
    let n = matrix.cols();
    let d = d.min(n.saturating_sub(1));
    let work = n as u128 * binomial(n as u128 - 1, d as u128);
    if work > budget {
        log::warn!("disjunctness check enumerates {work} cases, above the budget of {budget}");
    }
    let words = matrix.rows().div_ceil(64);
    let bits: Vec<Vec<u64>> = (0..n)
        .map(|c| {
            let mut w = vec![0u64; words];
            for r in 0..matrix.rows() {
                if matrix.get(r, c) != 0 {
                    w[r / 64] |= 1 << (r % 64);
                }
            }
            w
        })
        .collect();
    let need = 2 * e as u32 + 1;
    (0..n).into_par_iter().all(|z| {
        let others = (0..n).filter(|&x| x != z);
        others.combinations(d).all(|group| {
            let private: u32 = (0..words)
                .map(|w| {
                    let union = group.iter().fold(0u64, |acc, &x| acc | bits[x][w]);
                    (bits[z][w] & !union).count_ones()
                })
                .sum();
            private >= need
        })
    })
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
