//! Explicit optimal codes with multiple localities, obtained by splitting
//! rows of a Vandermonde (Reed–Solomon) parity-check matrix.
//!
//! Part `i` has `g_i = n_i/(r_i+δ−1)` local groups of `r_i+δ−1` consecutive
//! coordinates. Write `k′ = k + (Σ g_i − 1)(δ−1)` and let `H′` be the
//! `(n−k′) × n` Vandermonde matrix on the points `0, 1, …, n−1`. Its first
//! `δ−1` rows `Q` are cut column-wise into one `(δ−1) × (r_i+δ−1)` block per
//! group and placed block-diagonally; the remaining `n−k′−δ+1` rows are kept
//! whole underneath. The result has exactly `n − k` rows and dimension `k`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, ceil_div, BoundResult, Formula};
use crate::code::{CodeError, LinearCode, LocalityPart, LocalityProfile};
use crate::field::{FieldError, FieldSpec};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    /// `(n_i, r_i)` per part.
    pub parts: Vec<(usize, usize)>,
    pub k: usize,
    pub delta: usize,
    /// Field size; the smallest prime above `n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
}

/// One failed hypothesis. Parts are numbered from 1 in messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "condition")]
pub enum Violation {
    NoParts,
    DeltaTooSmall { delta: usize },
    EmptyPart { part: usize },
    RTooSmall { part: usize, r: usize },
    ROrder { part: usize },
    Divisibility { part: usize, n: usize, group_size: usize },
    ImpliedSum { sum: usize, k: usize },
    Balance { expected: i64, actual: usize },
    DimensionRange { k: usize, max: usize },
    FieldNotPrime { q: u32 },
    FieldTooSmall { q: u32, n: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoParts => write!(f, "no parts given"),
            Violation::DeltaTooSmall { delta } => write!(f, "delta violated: delta = {delta} < 2"),
            Violation::EmptyPart { part } => write!(f, "part {part} is empty"),
            Violation::RTooSmall { part, r } => write!(f, "locality violated: part {part} has r = {r} < 2"),
            Violation::ROrder { part } => {
                write!(f, "ordering violated: r of part {part} exceeds r of part {}", part + 1)
            }
            Violation::Divisibility { part, n, group_size } => {
                write!(f, "divisibility violated: r + delta - 1 = {group_size} does not divide n = {n} in part {part}")
            }
            Violation::ImpliedSum { sum, k } => {
                write!(
                    f,
                    "sum condition violated: sum over i<s of r_i*n_i/(r_i+delta-1) = {sum} exceeds k-1 = {}",
                    *k as i64 - 1
                )
            }
            Violation::Balance { expected, actual } => write!(
                f,
                "balance condition violated: last part has {actual} groups but ceil((k - sum)/r_s) = {expected}"
            ),
            Violation::DimensionRange { k, max } => {
                write!(f, "dimension violated: need 1 <= k <= {max}, got k = {k}")
            }
            Violation::FieldNotPrime { q } => write!(f, "field violated: q = {q} is not prime"),
            Violation::FieldTooSmall { q, n } => write!(f, "field violated: need q > n = {n}, got q = {q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("this construction requires delta = 2, got {0}")]
    DeltaNotTwo(usize),
    #[error("built code has dimension {actual}, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ConstructionParams {
    pub fn n(&self) -> usize {
        self.parts.iter().map(|p| p.0).sum()
    }

    /// The field actually used.
    pub fn field_size(&self) -> u32 {
        self.q.unwrap_or_else(|| FieldSpec::smallest_above(self.n()).map_or(0, |f| f.q()))
    }

    fn group_size(&self, i: usize) -> usize {
        self.parts[i].1 + self.delta - 1
    }

    /// Number of local groups per part (rounded up when divisibility fails).
    pub fn groups_per_part(&self) -> Vec<usize> {
        (0..self.parts.len()).map(|i| self.parts[i].0.div_ceil(self.group_size(i).max(1))).collect()
    }

    /// `k′ = k + (Σ g_i − 1)(δ − 1)`.
    pub fn k_prime(&self) -> usize {
        let g: usize = self.groups_per_part().iter().sum();
        self.k + (g.max(1) - 1) * (self.delta.max(1) - 1)
    }

    /// Every violated hypothesis, in a fixed order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.parts.is_empty() {
            v.push(Violation::NoParts);
            return v;
        }
        if self.delta < 2 {
            v.push(Violation::DeltaTooSmall { delta: self.delta });
            return v;
        }
        for (i, &(ni, ri)) in self.parts.iter().enumerate() {
            if ni == 0 {
                v.push(Violation::EmptyPart { part: i + 1 });
            }
            if ri < 2 {
                v.push(Violation::RTooSmall { part: i + 1, r: ri });
            }
        }
        for (i, w) in self.parts.windows(2).enumerate() {
            if w[0].1 > w[1].1 {
                v.push(Violation::ROrder { part: i + 1 });
            }
        }
        for (i, &(ni, _)) in self.parts.iter().enumerate() {
            let m = self.group_size(i);
            if ni % m != 0 {
                v.push(Violation::Divisibility { part: i + 1, n: ni, group_size: m });
            }
        }
        let s = self.parts.len();
        let g = self.groups_per_part();
        let sum: usize = (0..s - 1).map(|i| self.parts[i].1 * g[i]).sum();
        if sum + 1 > self.k {
            v.push(Violation::ImpliedSum { sum, k: self.k });
        }
        let r_s = self.parts[s - 1].1.max(1) as i64;
        let expected = ceil_div(self.k as i64 - sum as i64, r_s);
        if expected != g[s - 1] as i64 {
            v.push(Violation::Balance { expected, actual: g[s - 1] });
        }
        let n = self.n();
        let max = n.saturating_sub(g.iter().sum::<usize>() * (self.delta - 1));
        if self.k < 1 || self.k > max {
            v.push(Violation::DimensionRange { k: self.k, max });
        }
        let q = self.field_size();
        if FieldSpec::new(q).is_err() {
            v.push(Violation::FieldNotPrime { q });
        } else if (q as usize) <= n {
            v.push(Violation::FieldTooSmall { q, n });
        }
        v
    }
}

/// The `rows × n` Vandermonde matrix on the points `0, …, n−1`: entry
/// `(t, j) = j^t`.
pub fn rs_parity_check(n: usize, rows: usize, field: FieldSpec) -> Result<Matrix, ConstructionError> {
    if field.q() as usize <= n {
        return Err(ConstructionError::Invalid(vec![Violation::FieldTooSmall { q: field.q(), n }]));
    }
    if rows > n {
        return Err(ConstructionError::Invalid(vec![Violation::DimensionRange { k: rows, max: n }]));
    }
    let points: Vec<u32> = (0..n as u32).collect();
    Ok(Matrix::vandermonde(field, &points, rows))
}

/// Summary of a build, suitable for embedding in a code descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub k_prime: usize,
    /// `n − k′ + 1`, the distance of the ambient Reed–Solomon code.
    pub d_prime: usize,
    pub achieved_d: usize,
    pub bound_d: Option<i64>,
    pub bound_formula: Formula,
    pub optimal: bool,
    /// A single part: the multiple-locality setting needs at least two.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct ConstructionOutput {
    pub params: ConstructionParams,
    pub code: LinearCode,
    pub profile: LocalityProfile,
    /// Local groups in column order, with their part index.
    pub groups: Vec<(usize, Vec<usize>)>,
    pub h_prime: Matrix,
    pub certificate: ConstructionCertificate,
}

/// The bound the construction is measured against.
pub fn target_bound(params: &ConstructionParams) -> BoundResult {
    let n = params.n();
    let (k, delta) = (params.k, params.delta);
    let na = |f: Formula| {
        move |e: bounds::BoundsError| BoundResult {
            formula: f,
            value: None,
            applicable: false,
            reason: Some(e.to_string()),
        }
    };
    if params.parts.len() == 1 {
        let r = params.parts[0].1;
        return if delta == 2 {
            bounds::bound_r_local(n, k, r).unwrap_or_else(na(Formula::RLocal))
        } else {
            bounds::bound_r_delta(n, k, r, delta).unwrap_or_else(na(Formula::RDelta))
        };
    }
    let strictly = params.parts.windows(2).all(|w| w[0].1 < w[1].1);
    if delta == 2 && strictly {
        let ml = bounds::bound_ml(n, k, &params.parts).unwrap_or_else(na(Formula::MultiLocality));
        if ml.applicable {
            return ml;
        }
    }
    bounds::bound_equal_delta(n, k, &params.parts, delta).unwrap_or_else(na(Formula::UniformDelta))
}

fn build(params: &ConstructionParams) -> Result<ConstructionOutput, ConstructionError> {
    let violations = params.validate();
    if !violations.is_empty() {
        return Err(ConstructionError::Invalid(violations));
    }
    let n = params.n();
    let field = FieldSpec::new(params.field_size())?;
    let k_prime = params.k_prime();
    let h_prime = rs_parity_check(n, n - k_prime, field)?;
    let dm1 = params.delta - 1;

    let mut h = Matrix::zeros(field, n - params.k, n);
    let mut groups = Vec::new();
    let mut parts = Vec::new();
    let (mut row, mut col) = (0, 0);
    for (pi, &(ni, ri)) in params.parts.iter().enumerate() {
        let start = col;
        for _ in 0..ni / (ri + dm1) {
            let cols: Vec<usize> = (col..col + ri + dm1).collect();
            for t in 0..dm1 {
                for &c in &cols {
                    h.set(row + t, c, h_prime.get(t, c));
                }
            }
            row += dm1;
            col += ri + dm1;
            groups.push((pi, cols));
        }
        parts.push(LocalityPart { indices: (start..col).collect(), r: ri, delta: params.delta });
    }
    for t in dm1..h_prime.rows() {
        for c in 0..n {
            h.set(row, c, h_prime.get(t, c));
        }
        row += 1;
    }
    assert_eq!(row, n - params.k, "row count must equal n - k");

    let code = LinearCode::from_parity_check(h)?;
    if code.k() != params.k {
        return Err(ConstructionError::DimensionMismatch { expected: params.k, actual: code.k() });
    }
    let achieved_d = code.min_distance();
    let bound = target_bound(params);
    let certificate = ConstructionCertificate {
        n,
        k: params.k,
        q: field.q(),
        k_prime,
        d_prime: n - k_prime + 1,
        achieved_d,
        bound_d: bound.value,
        bound_formula: bound.formula,
        optimal: bound.value == Some(achieved_d as i64),
        degenerate: params.parts.len() == 1,
    };
    Ok(ConstructionOutput {
        params: ConstructionParams { q: Some(field.q()), ..params.clone() },
        code,
        profile: LocalityProfile::new(parts),
        groups,
        h_prime,
        certificate,
    })
}

/// Multiple-locality code with `δ = 2`: the first Vandermonde row (all ones)
/// is split into one single-parity check per group.
pub fn build_ml_lrc(params: &ConstructionParams) -> Result<ConstructionOutput, ConstructionError> {
    if params.delta != 2 {
        return Err(ConstructionError::DeltaNotTwo(params.delta));
    }
    build(params)
}

/// Multiple `(r_i, δ)`-locality code for any shared `δ ≥ 2`.
pub fn build_multi_delta_lrc(params: &ConstructionParams) -> Result<ConstructionOutput, ConstructionError> {
    build(params)
}
