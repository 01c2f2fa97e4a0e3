//! Closed-form upper bounds on the minimum distance of locally repairable
//! codes.
//!
//! Every calculator returns a [`BoundResult`]. Parameter tuples that violate
//! a calculator's preconditions (orderings, sums, ranges) are errors; tuples
//! that are well formed but fall outside the hypotheses of the bound come
//! back with `applicable == false` and a reason, never with a value.
//!
//! All arithmetic is exact integer arithmetic; ceilings of possibly negative
//! numerators go through [`ceil_div`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("hypotheses not met: {0}")]
    Conditions(String),
}

/// Which bound a result came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// `n − k − ⌈k/r⌉ + 2` for codes with locality `r`.
    RLocal,
    /// `n − k + 1 − (⌈k/r⌉ − 1)(δ − 1)` for `(r, δ)` locality.
    RDelta,
    /// Information-locality-profile bound.
    InfoProfile,
    /// All-symbol multiple localities `(n_i, r_i)`.
    MultiLocality,
    /// Two `(r_i, δ_i)` localities.
    TwoLocality,
    /// The `(r_1, δ_1)` bound used when the first part already covers `k`.
    TwoLocalityFallback,
    /// Multiple `(r_i, δ_i)` localities.
    MultiRDelta,
    /// Multiple `(r_i, δ)` localities sharing one `δ`.
    UniformDelta,
}

impl Formula {
    pub fn id(&self) -> &'static str {
        match self {
            Formula::RLocal => "r-local",
            Formula::RDelta => "r-delta",
            Formula::InfoProfile => "info-profile",
            Formula::MultiLocality => "multi-locality",
            Formula::TwoLocality => "two-locality",
            Formula::TwoLocalityFallback => "two-locality-fallback",
            Formula::MultiRDelta => "multi-r-delta",
            Formula::UniformDelta => "uniform-delta",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub formula: Formula,
    /// The bound on `d`; `None` exactly when not applicable.
    pub value: Option<i64>,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

impl BoundResult {
    fn holds(formula: Formula, value: i64) -> Self {
        if value < 1 {
            return BoundResult::not_applicable(formula, format!("formula evaluates to {value} < 1"));
        }
        BoundResult { formula, value: Some(value), applicable: true, reason: None }
    }

    fn not_applicable(formula: Formula, reason: impl Into<String>) -> Self {
        BoundResult { formula, value: None, applicable: false, reason: Some(reason.into()) }
    }
}

/// Parameters `(n_i, r_i, δ_i)` of one part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Part {
    pub n: usize,
    pub r: usize,
    pub delta: usize,
}

impl Part {
    pub fn new(n: usize, r: usize, delta: usize) -> Self {
        Part { n, r, delta }
    }

    /// `⌈n_i / (r_i + δ_i − 1)⌉`, the number of local groups the part needs.
    fn groups(&self) -> i64 {
        ceil_div(self.n as i64, (self.r + self.delta - 1) as i64)
    }
}

/// `⌈a / b⌉` for `b > 0` and any sign of `a`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

fn check_nk(n: usize, k: usize) -> Result<(), BoundsError> {
    if k < 1 || k > n {
        return Err(BoundsError::Invalid(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

fn check_parts(n: usize, k: usize, parts: &[Part]) -> Result<(), BoundsError> {
    check_nk(n, k)?;
    if parts.is_empty() {
        return Err(BoundsError::Invalid("no parts".into()));
    }
    if parts.iter().map(|p| p.n).sum::<usize>() != n {
        return Err(BoundsError::Invalid(format!("part sizes do not sum to n = {n}")));
    }
    for (i, p) in parts.iter().enumerate() {
        if p.r < 1 {
            return Err(BoundsError::Invalid(format!("part {} has r = 0", i + 1)));
        }
        if p.delta < 2 {
            return Err(BoundsError::Invalid(format!("part {} has delta = {} < 2", i + 1, p.delta)));
        }
    }
    for w in parts.windows(2) {
        if w[0].r > w[1].r {
            return Err(BoundsError::Invalid("r must be non-decreasing across parts".into()));
        }
        if w[0].delta < w[1].delta {
            return Err(BoundsError::Invalid("delta must be non-increasing across parts".into()));
        }
    }
    Ok(())
}

/// Locality-`r` bound: `n − k − ⌈k/r⌉ + 2`.
pub fn bound_r_local(n: usize, k: usize, r: usize) -> Result<BoundResult, BoundsError> {
    check_nk(n, k)?;
    if r < 1 {
        return Err(BoundsError::Invalid("r must be at least 1".into()));
    }
    let (n, k, r) = (n as i64, k as i64, r as i64);
    Ok(BoundResult::holds(Formula::RLocal, n - k - ceil_div(k, r) + 2))
}

/// `(r, δ)` bound: `n − k + 1 − (⌈k/r⌉ − 1)(δ − 1)`.
pub fn bound_r_delta(n: usize, k: usize, r: usize, delta: usize) -> Result<BoundResult, BoundsError> {
    check_nk(n, k)?;
    if r < 1 || delta < 2 {
        return Err(BoundsError::Invalid(format!("need r >= 1 and delta >= 2, got r = {r}, delta = {delta}")));
    }
    let (n, k, r, d) = (n as i64, k as i64, r as i64, delta as i64);
    Ok(BoundResult::holds(Formula::RDelta, n - k + 1 - (ceil_div(k, r) - 1) * (d - 1)))
}

/// Information-locality-profile bound. `profile[j - 1]` is the number of
/// information symbols with locality `j`.
pub fn bound_info_profile(n: usize, k: usize, profile: &[usize]) -> Result<BoundResult, BoundsError> {
    check_nk(n, k)?;
    match profile.last() {
        None | Some(0) => return Err(BoundsError::Invalid("last profile entry must be at least 1".into())),
        _ => {}
    }
    if profile.iter().sum::<usize>() != k {
        return Err(BoundsError::Invalid(format!("profile sums to {}, not k = {k}", profile.iter().sum::<usize>())));
    }
    let penalty: i64 = profile.iter().enumerate().map(|(j, &kj)| ceil_div(kj as i64, j as i64 + 1)).sum();
    Ok(BoundResult::holds(Formula::InfoProfile, n as i64 - k as i64 - penalty + 2))
}

/// Multiple-localities bound for parts `(n_i, r_i)` with strictly increasing
/// `r_i`. Applies when `Σ_{i<s} r_i⌈n_i/(r_i+1)⌉ < k − 1`.
pub fn bound_ml(n: usize, k: usize, parts: &[(usize, usize)]) -> Result<BoundResult, BoundsError> {
    let as_parts: Vec<Part> = parts.iter().map(|&(ni, ri)| Part::new(ni, ri, 2)).collect();
    check_parts(n, k, &as_parts)?;
    if parts.windows(2).any(|w| w[0].1 >= w[1].1) {
        return Err(BoundsError::Invalid("r must be strictly increasing across parts".into()));
    }
    let (head, last) = parts.split_at(parts.len() - 1);
    let rs = last[0].1 as i64;
    let covered: i64 = head.iter().map(|&(ni, ri)| ri as i64 * ceil_div(ni as i64, ri as i64 + 1)).sum();
    let k = k as i64;
    if covered >= k - 1 {
        return Ok(BoundResult::not_applicable(
            Formula::MultiLocality,
            format!("sum r_i*ceil(n_i/(r_i+1)) = {covered} is not < k-1 = {}", k - 1),
        ));
    }
    let groups: i64 = head.iter().map(|&(ni, ri)| ceil_div(ni as i64, ri as i64 + 1)).sum();
    Ok(BoundResult::holds(Formula::MultiLocality, n as i64 - k + 2 - groups - ceil_div(k - covered, rs)))
}

/// Two `(r_i, δ_i)` localities. When `r_1⌈n_1/(r_1+δ_1−1)⌉ ≥ k` the result is
/// the `(r_1, δ_1)` fallback; when only the `Δ` condition fails the bound is
/// not applicable.
pub fn bound_two_locality(n: usize, k: usize, p1: Part, p2: Part) -> Result<BoundResult, BoundsError> {
    check_parts(n, k, &[p1, p2])?;
    let (ni, ki) = (n as i64, k as i64);
    let (n1, r1, d1) = (p1.n as i64, p1.r as i64, p1.delta as i64);
    let (r2, d2) = (p2.r as i64, p2.delta as i64);
    let g1 = p1.groups();
    let covered = r1 * g1;
    if covered >= ki {
        let v = ni - ki + 1 - (ceil_div(ki, r1) - 1) * (d1 - 1);
        return Ok(BoundResult::holds(Formula::TwoLocalityFallback, v));
    }
    let big_delta = g1 * (d1 - 1);
    if r1 * ceil_div(big_delta - 1, d1 - 1) + (big_delta - 1) >= n1 {
        return Ok(BoundResult::not_applicable(
            Formula::TwoLocality,
            format!(
                "Delta condition fails: r1*ceil((Delta-1)/(delta1-1)) + Delta - 1 >= n1 = {n1} (Delta = {big_delta})"
            ),
        ));
    }
    let v = ni - ki + 1 - big_delta - (ceil_div(ki - covered, r2) - 1) * (d2 - 1);
    Ok(BoundResult::holds(Formula::TwoLocality, v))
}

/// Prefix sums `Δ_0 = 0, Δ_j = Σ_{i≤j} ⌈n_i/(r_i+δ_i−1)⌉(δ_i − 1)` for
/// `j = 0..s`.
pub fn delta_prefix(parts: &[Part]) -> Vec<i64> {
    let mut out = vec![0i64];
    for p in parts {
        let last = *out.last().unwrap();
        out.push(last + p.groups() * (p.delta as i64 - 1));
    }
    out
}

/// Checks the hypotheses shared by the multiple-`(r_i, δ_i)` bound and the
/// piecewise `Φ` bound. Returns the first failing condition.
pub fn multi_conditions(k: usize, parts: &[Part]) -> Result<(), String> {
    let s = parts.len();
    let covered: i64 = parts[..s - 1].iter().map(|p| p.r as i64 * p.groups()).sum();
    if covered > k as i64 - 1 {
        return Err(format!("sum_(i<s) r_i*ceil(n_i/(r_i+delta_i-1)) = {covered} exceeds k-1 = {}", k as i64 - 1));
    }
    let deltas = delta_prefix(parts);
    for j in 1..s {
        let p = parts[j - 1];
        let span = deltas[j] - deltas[j - 1] - 1;
        let lhs = p.r as i64 * ceil_div(span, p.delta as i64 - 1) + span;
        if lhs >= p.n as i64 {
            return Err(format!(
                "part {j} condition fails: r_j*ceil((D_j-D_(j-1)-1)/(delta_j-1)) + D_j-D_(j-1)-1 = {lhs} >= n_j = {}",
                p.n
            ));
        }
    }
    Ok(())
}

/// Multiple `(r_i, δ_i)` localities bound.
pub fn bound_multi(n: usize, k: usize, parts: &[Part]) -> Result<BoundResult, BoundsError> {
    check_parts(n, k, parts)?;
    if let Err(reason) = multi_conditions(k, parts) {
        return Ok(BoundResult::not_applicable(Formula::MultiRDelta, reason));
    }
    let (head, last) = parts.split_at(parts.len() - 1);
    let last = last[0];
    let covered: i64 = head.iter().map(|p| p.r as i64 * p.groups()).sum();
    let spent: i64 = head.iter().map(|p| p.groups() * (p.delta as i64 - 1)).sum();
    let k = k as i64;
    let tail = (ceil_div(k - covered, last.r as i64) - 1) * (last.delta as i64 - 1);
    Ok(BoundResult::holds(Formula::MultiRDelta, n as i64 - k + 1 - spent - tail))
}

/// Shared-`δ` specialisation: `n − k + 1 − (Γ − 1)(δ − 1)`.
pub fn bound_equal_delta(
    n: usize,
    k: usize,
    parts: &[(usize, usize)],
    delta: usize,
) -> Result<BoundResult, BoundsError> {
    let full: Vec<Part> = parts.iter().map(|&(ni, ri)| Part::new(ni, ri, delta)).collect();
    check_parts(n, k, &full)?;
    if let Err(reason) = multi_conditions(k, &full) {
        return Ok(BoundResult::not_applicable(Formula::UniformDelta, reason));
    }
    let gamma = gamma(k, parts, delta);
    let v = n as i64 - k as i64 + 1 - (gamma - 1) * (delta as i64 - 1);
    Ok(BoundResult::holds(Formula::UniformDelta, v))
}

/// `Γ = Σ_{i<s} ⌈n_i/(r_i+δ−1)⌉ + ⌈(k − Σ_{i<s} r_i⌈n_i/(r_i+δ−1)⌉)/r_s⌉`.
pub fn gamma(k: usize, parts: &[(usize, usize)], delta: usize) -> i64 {
    let (head, last) = parts.split_at(parts.len() - 1);
    let g = |ni: usize, ri: usize| ceil_div(ni as i64, (ri + delta - 1) as i64);
    let groups: i64 = head.iter().map(|&(ni, ri)| g(ni, ri)).sum();
    let covered: i64 = head.iter().map(|&(ni, ri)| ri as i64 * g(ni, ri)).sum();
    groups + ceil_div(k as i64 - covered, last[0].1 as i64)
}

/// Piecewise upper bound on `Φ(x)` for a code with the given locality
/// parts. For `Δ_{j−1} ≤ x ≤ Δ_j` (`j < s`) the `j`-th piece applies; beyond
/// `Δ_{s−1}` the last piece does.
pub fn phi_upper_lemma(x: usize, parts: &[Part], k: usize) -> Result<i64, BoundsError> {
    if parts.is_empty() {
        return Err(BoundsError::Invalid("no parts".into()));
    }
    let n = parts.iter().map(|p| p.n).sum();
    check_parts(n, k, parts)?;
    multi_conditions(k, parts).map_err(BoundsError::Conditions)?;
    let x = x as i64;
    let s = parts.len();
    let deltas = delta_prefix(parts);
    let j = (1..s).find(|&j| x <= deltas[j]).unwrap_or(s);
    let before: i64 = parts[..j - 1].iter().map(|p| p.r as i64 * p.groups()).sum();
    let p = parts[j - 1];
    Ok(before + p.r as i64 * ceil_div(x - deltas[j - 1], p.delta as i64 - 1) + x)
}

/// Every bound that can be stated for a code of length `n`, dimension `k`
/// and the given locality parts, in a fixed order. Bounds whose
/// preconditions the parameters violate come back as not applicable.
pub fn all_bounds(n: usize, k: usize, parts: &[Part], info_profile: Option<&[usize]>) -> Vec<BoundResult> {
    let na = |f: Formula| move |e: BoundsError| BoundResult::not_applicable(f, e.to_string());
    let mut out = Vec::new();
    let last = parts.last().copied().unwrap_or(Part::new(n, 1, 2));
    // Every symbol has locality r_s (δ = 2) and (r_s, δ_s) locality.
    out.push(bound_r_local(n, k, last.r).unwrap_or_else(na(Formula::RLocal)));
    out.push(bound_r_delta(n, k, last.r, last.delta).unwrap_or_else(na(Formula::RDelta)));
    if let Some(p) = info_profile {
        out.push(bound_info_profile(n, k, p).unwrap_or_else(na(Formula::InfoProfile)));
    }
    let nr: Vec<(usize, usize)> = parts.iter().map(|p| (p.n, p.r)).collect();
    out.push(bound_ml(n, k, &nr).unwrap_or_else(na(Formula::MultiLocality)));
    if parts.len() == 2 {
        out.push(bound_two_locality(n, k, parts[0], parts[1]).unwrap_or_else(na(Formula::TwoLocality)));
    }
    out.push(bound_multi(n, k, parts).unwrap_or_else(na(Formula::MultiRDelta)));
    if parts.windows(2).all(|w| w[0].delta == w[1].delta) {
        out.push(bound_equal_delta(n, k, &nr, last.delta).unwrap_or_else(na(Formula::UniformDelta)));
    }
    out
}

/// The smallest applicable value in a table.
pub fn tightest(results: &[BoundResult]) -> Option<&BoundResult> {
    results.iter().filter(|b| b.applicable).min_by_key(|b| b.value)
}
