//! Regenerating sets and the union-size function `Φ`.
//!
//! A (minimal) regenerating set is a circuit of the column matroid of the
//! generator matrix `G`: a dependent column set all of whose proper subsets
//! are independent. Equivalently it is the support of a minimal-support dual
//! codeword.
//!
//! `Φ(x)` is the smallest union of `x` regenerating sets in which every set
//! contributes a coordinate not covered by the earlier ones. Two exact
//! routes are provided:
//!
//! * [`phi`] searches coordinate sets `U` by size. Inside `U` one can chain
//!   exactly `|U| − rank(G_U)` circuits with a nontrivial union (take the
//!   fundamental circuits of the elements outside a basis of `U`, in any
//!   order), and no more, since such circuits give independent dual
//!   codewords supported in `U`. Hence `Φ(x) = min{|U| : |U| − rank(G_U) ≥ x}`.
//! * [`phi_by_chains`] follows the definition literally, extending unions
//!   circuit by circuit.
//!
//! Both are exact. Budgets bound the work; exceeding one is an error.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundsError, Part};
use crate::code::{CodeError, LinearCode, LocalityCertificate, LocalityProfile};

/// Default cap on the code length for exhaustive searches.
pub const DEFAULT_MAX_LENGTH: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegenError {
    #[error("code length {n} exceeds the search limit {limit}")]
    TooLong { n: usize, limit: usize },
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("x_max = {x_max} exceeds n - k = {bound}")]
    XMaxTooLarge { x_max: usize, bound: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Limits for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_length: usize,
    pub max_circuits: usize,
    /// Rank evaluations (subset search) or union states (chain search).
    pub max_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_length: DEFAULT_MAX_LENGTH, max_circuits: 1_000_000, max_nodes: 50_000_000 }
    }
}

impl Budget {
    fn check_length(&self, n: usize) -> Result<(), RegenError> {
        if n > self.max_length || n > 63 {
            return Err(RegenError::TooLong { n, limit: self.max_length.min(63) });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegeneratingSet {
    pub coordinates: Vec<usize>,
    /// A coordinate the set was requested for, if any. A minimal set
    /// regenerates each of its members.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor: Option<usize>,
}

impl RegeneratingSet {
    pub fn mask(&self) -> u64 {
        self.coordinates.iter().fold(0, |m, &c| m | 1 << c)
    }
}

/// True iff `cols` is a circuit of the column matroid of `g`: the columns
/// have a one-dimensional dependency whose coefficients are all nonzero.
fn is_circuit(g: &crate::linalg::Matrix, cols: &[usize]) -> bool {
    let sub = g.select_columns(cols).expect("indices in range");
    let ns = sub.null_space();
    ns.rows() == 1 && ns.row(0).iter().all(|&v| v != 0)
}

/// All circuits of `G` with at most `max_size` elements, by size then
/// lexicographically.
pub fn enumerate_regenerating_sets(
    code: &LinearCode,
    max_size: usize,
    budget: &Budget,
) -> Result<Vec<RegeneratingSet>, RegenError> {
    let n = code.n();
    budget.check_length(n)?;
    let g = code.generator();
    let mut out = Vec::new();
    for w in 1..=max_size.min(n) {
        for cols in (0..n).combinations(w) {
            if is_circuit(g, &cols) {
                if out.len() == budget.max_circuits {
                    return Err(RegenError::BudgetExceeded(format!("more than {} circuits", budget.max_circuits)));
                }
                out.push(RegeneratingSet { coordinates: cols, anchor: None });
            }
        }
    }
    Ok(out)
}

/// Minimal regenerating sets containing coordinate `i`.
pub fn regenerating_sets_of(
    code: &LinearCode,
    i: usize,
    max_size: usize,
    budget: &Budget,
) -> Result<Vec<RegeneratingSet>, RegenError> {
    Ok(enumerate_regenerating_sets(code, max_size, budget)?
        .into_iter()
        .filter(|r| r.coordinates.contains(&i))
        .map(|r| RegeneratingSet { anchor: Some(i), ..r })
        .collect())
}

/// `Φ(0..=x)` and, when the table reaches far enough to decide it,
/// `ρ = max{x : Φ(x) − x < k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiTable {
    pub k: usize,
    pub values: Vec<usize>,
    pub rho: Option<usize>,
}

impl PhiTable {
    fn from_values(n: usize, k: usize, values: Vec<usize>) -> Self {
        let x_top = values.len() - 1;
        let below: Vec<usize> = (0..=x_top).filter(|&x| values[x] - x < k).collect();
        let decided = x_top == n - k || values[x_top] - x_top >= k;
        let rho = if decided { below.last().copied() } else { None };
        PhiTable { k, values, rho }
    }

    pub fn x_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// Where the subset search stops.
enum Stop {
    At(usize),
    RhoKnown,
}

fn phi_search(code: &LinearCode, stop: Stop, budget: &Budget) -> Result<PhiTable, RegenError> {
    let (n, k) = (code.n(), code.k());
    budget.check_length(n)?;
    let g = code.generator();
    let mut values = vec![0usize];
    let mut nodes = 0u64;
    let limit = match stop {
        Stop::At(x) => x,
        Stop::RhoKnown => n - k,
    };
    for x in 1..=limit {
        if matches!(stop, Stop::RhoKnown) && values[x - 1] - (x - 1) >= k {
            break;
        }
        let start = values[x - 1] + 1;
        let mut found = None;
        'sizes: for m in start..=n {
            for u in (0..n).combinations(m) {
                nodes += 1;
                if nodes > budget.max_nodes {
                    return Err(RegenError::BudgetExceeded(format!("more than {} rank evaluations", budget.max_nodes)));
                }
                if m - g.rank_of_columns(&u) >= x {
                    found = Some(m);
                    break 'sizes;
                }
            }
        }
        values.push(found.expect("the full coordinate set has nullity n - k"));
    }
    Ok(PhiTable::from_values(n, k, values))
}

/// Exact `Φ(x)` for `x = 0..=x_max`, `x_max ≤ n − k`.
pub fn phi(code: &LinearCode, x_max: usize, budget: &Budget) -> Result<PhiTable, RegenError> {
    let bound = code.n() - code.k();
    if x_max > bound {
        return Err(RegenError::XMaxTooLarge { x_max, bound });
    }
    phi_search(code, Stop::At(x_max), budget)
}

/// `Φ` up to the first `x` with `Φ(x) − x ≥ k` (that is, up to `ρ + 1`), or
/// up to `n − k`; `ρ` is always decided.
pub fn phi_until_rho(code: &LinearCode, budget: &Budget) -> Result<PhiTable, RegenError> {
    phi_search(code, Stop::RhoKnown, budget)
}

/// `Φ` by literal search over circuit sequences with nontrivial unions.
///
/// Unions are processed in order of size; for each union the longest chain
/// reaching it is kept, which is all later extensions depend on.
pub fn phi_by_chains(
    code: &LinearCode,
    circuits: &[RegeneratingSet],
    x_max: usize,
    budget: &Budget,
) -> Result<PhiTable, RegenError> {
    let (n, k) = (code.n(), code.k());
    budget.check_length(n)?;
    if x_max > n - k {
        return Err(RegenError::XMaxTooLarge { x_max, bound: n - k });
    }
    let masks: Vec<u64> = circuits.iter().map(RegeneratingSet::mask).collect();
    let mut buckets: Vec<HashMap<u64, usize>> = vec![HashMap::new(); n + 1];
    buckets[0].insert(0, 0);
    let mut values = vec![usize::MAX; x_max + 1];
    values[0] = 0;
    let mut states = 1u64;
    for size in 0..=n {
        if values.iter().all(|&v| v != usize::MAX) {
            break;
        }
        let current = std::mem::take(&mut buckets[size]);
        for (&u, &len) in &current {
            for v in values.iter_mut().take(len.min(x_max) + 1).skip(1) {
                if *v == usize::MAX {
                    *v = size;
                }
            }
            if len >= x_max {
                continue;
            }
            for &r in &masks {
                if r & !u == 0 {
                    continue;
                }
                let next = u | r;
                let slot = buckets[next.count_ones() as usize].entry(next).or_insert_with(|| {
                    states += 1;
                    0
                });
                *slot = (*slot).max(len + 1);
            }
            if states > budget.max_nodes {
                return Err(RegenError::BudgetExceeded(format!("more than {} union states", budget.max_nodes)));
            }
        }
    }
    if values.contains(&usize::MAX) {
        return Err(RegenError::BudgetExceeded("circuit list too short to reach x_max".into()));
    }
    Ok(PhiTable::from_values(n, k, values))
}

/// `n − k + 1 − ρ`.
pub fn singleton_rho_bound(code: &LinearCode, budget: &Budget) -> Result<usize, RegenError> {
    let t = phi_until_rho(code, budget)?;
    let rho = t.rho.expect("phi_until_rho decides rho");
    Ok(code.n() - code.k() + 1 - rho)
}

/// `min_{0 ≤ x ≤ ρ} d_opt(n − Φ(x), k + x − Φ(x))` with `d_opt` replaced by
/// the Singleton bound `n′ − k′ + 1`.
pub fn refined_bound(code: &LinearCode, budget: &Budget) -> Result<usize, RegenError> {
    let t = phi_until_rho(code, budget)?;
    let rho = t.rho.expect("phi_until_rho decides rho");
    let (n, k) = (code.n() as i64, code.k() as i64);
    let best = (0..=rho)
        .map(|x| {
            let phi = t.values[x] as i64;
            let (n2, k2) = (n - phi, k + x as i64 - phi);
            debug_assert!(k2 > 0);
            n2 - k2 + 1
        })
        .min()
        .unwrap();
    Ok(best as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiBoundRow {
    pub x: usize,
    pub phi: usize,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiBoundReport {
    pub rows: Vec<PhiBoundRow>,
    pub rho: usize,
    /// Values of `x` where the exact `Φ(x)` exceeds the piecewise bound.
    pub violations: Vec<usize>,
}

impl PhiBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares exact `Φ(x)` against the piecewise locality bound for every
/// `x ≤ min(ρ + 1, n − k)`.
pub fn check_lemma_phi_bounds(
    code: &LinearCode,
    profile: &LocalityProfile,
    budget: &Budget,
) -> Result<PhiBoundReport, RegenError> {
    profile.validate(code.n())?;
    let parts: Vec<Part> = profile.params().into_iter().map(|(n, r, d)| Part::new(n, r, d)).collect();
    bounds::multi_conditions(code.k(), &parts).map_err(BoundsError::Conditions)?;
    let t = phi_until_rho(code, budget)?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (x, &phi) in t.values.iter().enumerate() {
        let upper = bounds::phi_upper_lemma(x, &parts, code.k())?;
        if phi as i64 > upper {
            violations.push(x);
        }
        rows.push(PhiBoundRow { x, phi, upper });
    }
    Ok(PhiBoundReport { rows, rho: t.rho.expect("decided"), violations })
}

/// A witness group failing the regeneration property: with `erased` removed
/// from `group`, `coordinate` is not regenerated by the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegenerationFailure {
    pub group: Vec<usize>,
    pub erased: Vec<usize>,
    pub coordinate: usize,
}

/// For every witness group `S` of part `i` and every `E ⊆ S` with
/// `|E| = δ_i − 1`, each `j ∈ E` must be regenerated by `S − E`: `g_j` lies
/// in the span of the columns of `S − E`.
pub fn check_group_regeneration(
    code: &LinearCode,
    profile: &LocalityProfile,
    cert: &LocalityCertificate,
) -> Vec<RegenerationFailure> {
    let g = code.generator();
    let mut failures = Vec::new();
    for (part, group) in cert.groups() {
        let delta = profile.parts[part].delta;
        for e in group.iter().copied().combinations(delta - 1) {
            let rest: Vec<usize> = group.iter().copied().filter(|c| !e.contains(c)).collect();
            let base = g.rank_of_columns(&rest);
            for &j in &e {
                let mut with = rest.clone();
                with.push(j);
                if g.rank_of_columns(&with) != base {
                    failures.push(RegenerationFailure { group: group.clone(), erased: e.clone(), coordinate: j });
                }
            }
        }
    }
    failures
}
