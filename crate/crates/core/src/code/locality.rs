use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{CodeError, LinearCode};

/// One part `T_i` of a locality profile with its `(r_i, δ_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityPart {
    pub indices: Vec<usize>,
    pub r: usize,
    pub delta: usize,
}

/// A partition of the coordinates into parts with non-decreasing `r` and
/// non-increasing `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalityProfile {
    pub parts: Vec<LocalityPart>,
}

impl LocalityProfile {
    pub fn new(parts: Vec<LocalityPart>) -> Self {
        LocalityProfile { parts }
    }

    /// Checks the partition and ordering invariants against length `n`.
    pub fn validate(&self, n: usize) -> Result<(), CodeError> {
        let bad = |m: String| Err(CodeError::InvalidProfile(m));
        if self.parts.is_empty() {
            return bad("no parts".into());
        }
        let mut owner = vec![None; n];
        for (i, p) in self.parts.iter().enumerate() {
            if p.indices.is_empty() {
                return bad(format!("part {i} is empty"));
            }
            if p.r < 1 {
                return bad(format!("part {i} has r = 0"));
            }
            if p.delta < 2 {
                return bad(format!("part {i} has delta = {} < 2", p.delta));
            }
            for &c in &p.indices {
                if c >= n {
                    return bad(format!("coordinate {c} out of range for length {n}"));
                }
                if let Some(prev) = owner[c] {
                    return bad(format!("coordinate {c} in parts {prev} and {i}"));
                }
                owner[c] = Some(i);
            }
        }
        if let Some(c) = owner.iter().position(Option::is_none) {
            return bad(format!("coordinate {c} is not covered"));
        }
        for (i, w) in self.parts.windows(2).enumerate() {
            if w[0].r > w[1].r {
                return bad(format!("r must be non-decreasing (part {} has {} > {})", i, w[0].r, w[1].r));
            }
            if w[0].delta < w[1].delta {
                return bad(format!("delta must be non-increasing (part {} has {} < {})", i, w[0].delta, w[1].delta));
            }
        }
        Ok(())
    }

    /// `(n_i, r_i, δ_i)` per part.
    pub fn params(&self) -> Vec<(usize, usize, usize)> {
        self.parts.iter().map(|p| (p.indices.len(), p.r, p.delta)).collect()
    }

    pub fn n(&self) -> usize {
        self.parts.iter().map(|p| p.indices.len()).sum()
    }

    pub fn part_of(&self, coordinate: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.indices.contains(&coordinate))
    }
}

/// The repair group found for one coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coordinate: usize,
    pub part: usize,
    pub group: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityCertificate {
    pub witnesses: Vec<Witness>,
}

impl LocalityCertificate {
    /// Distinct witness groups in first-seen order, with their part index.
    pub fn groups(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for w in &self.witnesses {
            if !out.iter().any(|(_, g)| *g == w.group) {
                out.push((w.part, w.group.clone()));
            }
        }
        out
    }

    pub fn group_of(&self, coordinate: usize) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.coordinate == coordinate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityViolation {
    pub part: usize,
    pub coordinate: usize,
    pub r: usize,
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityOutcome {
    Certified(LocalityCertificate),
    Violated(LocalityViolation),
}

impl LocalityOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, LocalityOutcome::Certified(_))
    }

    pub fn certificate(&self) -> Option<&LocalityCertificate> {
        match self {
            LocalityOutcome::Certified(c) => Some(c),
            LocalityOutcome::Violated(_) => None,
        }
    }
}

/// True iff `C|_S` has minimum distance at least `delta`. A restriction with
/// no nonzero codeword counts as satisfying any distance.
fn local_distance_ok(code: &LinearCode, s: &[usize], delta: usize) -> Result<bool, CodeError> {
    match code.puncture_to(s) {
        Ok(p) => Ok(p.has_min_distance_at_least(delta)),
        Err(CodeError::ZeroCode) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Finds, for every coordinate `ι` in part `T_i`, a group `S ⊆ T_i` with
/// `ι ∈ S`, `δ_i ≤ |S| ≤ r_i + δ_i − 1` and `d(C|_S) ≥ δ_i`.
///
/// `hints` are tried first (typically the groups recorded by a
/// construction); otherwise subsets of `T_i` are searched by increasing size.
pub fn verify_locality(
    code: &LinearCode,
    profile: &LocalityProfile,
    hints: &[Vec<usize>],
) -> Result<LocalityOutcome, CodeError> {
    profile.validate(code.n())?;
    let mut cache: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut check = |s: &[usize], delta: usize| -> Result<bool, CodeError> {
        if let Some(&v) = cache.get(s) {
            return Ok(v);
        }
        let v = local_distance_ok(code, s, delta)?;
        cache.insert(s.to_vec(), v);
        Ok(v)
    };

    let mut witnesses = Vec::with_capacity(code.n());
    for (pi, part) in profile.parts.iter().enumerate() {
        let (r, delta) = (part.r, part.delta);
        let max_size = (r + delta - 1).min(part.indices.len());
        let mut members = part.indices.clone();
        members.sort_unstable();
        let admissible =
            |s: &[usize]| s.len() >= delta && s.len() < r + delta && s.iter().all(|c| members.binary_search(c).is_ok());

        for &iota in &members {
            let mut found = None;
            for h in hints {
                let mut s = h.clone();
                s.sort_unstable();
                if s.contains(&iota) && admissible(&s) && check(&s, delta)? {
                    found = Some(s);
                    break;
                }
            }
            if found.is_none() {
                let others: Vec<usize> = members.iter().copied().filter(|&c| c != iota).collect();
                'sizes: for size in delta..=max_size {
                    for rest in others.iter().copied().combinations(size - 1) {
                        let mut s = rest;
                        s.push(iota);
                        s.sort_unstable();
                        if check(&s, delta)? {
                            found = Some(s);
                            break 'sizes;
                        }
                    }
                }
            }
            match found {
                Some(group) => witnesses.push(Witness { coordinate: iota, part: pi, group }),
                None => {
                    return Ok(LocalityOutcome::Violated(LocalityViolation { part: pi, coordinate: iota, r, delta }))
                }
            }
        }
    }
    witnesses.sort_by_key(|w| w.coordinate);
    Ok(LocalityOutcome::Certified(LocalityCertificate { witnesses }))
}
