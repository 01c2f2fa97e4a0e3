use serde::{Deserialize, Serialize};

use super::{verify_locality, CodeError, LinearCode, LocalityCertificate, LocalityOutcome, LocalityProfile};
use crate::linalg::Matrix;

/// A set of erased coordinates, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    erased: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, erased: &[usize]) -> Result<Self, CodeError> {
        let mut e = erased.to_vec();
        e.sort_unstable();
        if let Some(&c) = e.iter().find(|&&c| c >= n) {
            return Err(CodeError::InvalidPattern(format!("coordinate {c} out of range for length {n}")));
        }
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(CodeError::InvalidPattern("repeated coordinate".into()));
        }
        Ok(ErasurePattern { erased: e })
    }

    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RepairMethod {
    Local { part: usize, group: Vec<usize> },
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairedSymbol {
    pub position: usize,
    pub method: RepairMethod,
    /// Surviving symbols read to rebuild this one.
    pub helpers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub word: Vec<u32>,
    pub symbols: Vec<RepairedSymbol>,
}

impl RepairOutcome {
    pub fn all_local(&self) -> bool {
        self.symbols.iter().all(|s| matches!(s.method, RepairMethod::Local { .. }))
    }
}

struct LocalGroup {
    part: usize,
    delta: usize,
    coords: Vec<usize>,
    /// Generator of `C|_coords`; `None` when the restriction is the zero code.
    generator: Option<Matrix>,
}

/// Erasure repair with a fixed set of local groups, reusable across many
/// words.
pub struct Repairer<'a> {
    code: &'a LinearCode,
    groups: Vec<LocalGroup>,
}

/// Recovers the symbols at `erased` from `survivors` of a code with generator
/// `g`, reading a minimal information set among the survivors. Returns
/// `None` when the survivors do not determine the erased symbols.
fn rebuild(g: &Matrix, word: &[u32], survivors: &[usize], erased: &[usize]) -> Option<(Vec<u32>, usize)> {
    let gs = g.select_columns(survivors).ok()?;
    let (_, pivots) = gs.rref();
    if pivots.len() < g.rank() {
        return None;
    }
    let info: Vec<usize> = pivots.iter().map(|&p| survivors[p]).collect();
    let gi = g.select_columns(&info).ok()?;
    let y: Vec<u32> = info.iter().map(|&c| word[c]).collect();
    let u = gi.transpose().solve(&y).ok()?;
    let values = g.select_columns(erased).ok()?.vec_mul(&u.x).ok()?;
    Some((values, info.len()))
}

impl<'a> Repairer<'a> {
    /// Builds a repairer from the witness groups of a locality certificate.
    pub fn new(code: &'a LinearCode, profile: &LocalityProfile, cert: &LocalityCertificate) -> Result<Self, CodeError> {
        let mut groups = Vec::new();
        for (part, coords) in cert.groups() {
            let delta = profile
                .parts
                .get(part)
                .ok_or_else(|| CodeError::InvalidProfile(format!("certificate names unknown part {part}")))?
                .delta;
            let generator = match code.puncture_to(&coords) {
                Ok(p) => Some(p.generator().clone()),
                Err(CodeError::ZeroCode) => None,
                Err(e) => return Err(e),
            };
            groups.push(LocalGroup { part, delta, coords, generator });
        }
        Ok(Repairer { code, groups })
    }

    pub fn code(&self) -> &LinearCode {
        self.code
    }

    /// Local phase: any witness group holding at most `δ − 1` erasures is
    /// rebuilt from an information set of its own survivors. Global phase:
    /// whatever remains is solved against the whole code. Recovered words are
    /// always checked against the parity checks.
    pub fn repair(&self, word: &[u32], pattern: &ErasurePattern) -> Result<RepairOutcome, CodeError> {
        let n = self.code.n();
        let q = self.code.field().q();
        if word.len() != n {
            return Err(CodeError::WrongLength { expected: n, actual: word.len() });
        }
        let mut erased = vec![false; n];
        for &e in pattern.erased() {
            if e >= n {
                return Err(CodeError::InvalidPattern(format!("coordinate {e} out of range")));
            }
            erased[e] = true;
        }
        let mut out: Vec<u32> = word.iter().zip(&erased).map(|(&v, &e)| if e { 0 } else { v }).collect();
        if let Some(c) = (0..n).find(|&c| !erased[c] && out[c] >= q) {
            return Err(CodeError::InvalidPattern(format!("symbol at {c} is not a field element")));
        }
        let mut symbols = Vec::new();

        let mut progress = true;
        while progress {
            progress = false;
            for g in &self.groups {
                let lost: Vec<usize> = g.coords.iter().copied().filter(|&c| erased[c]).collect();
                if lost.is_empty() || lost.len() > g.delta - 1 {
                    continue;
                }
                let (values, helpers) = match &g.generator {
                    None => (vec![0; lost.len()], 0),
                    Some(gen) => {
                        let local = |c: &usize| g.coords.iter().position(|x| x == c).unwrap();
                        let surv: Vec<usize> = g.coords.iter().filter(|c| !erased[**c]).map(local).collect();
                        let lost_local: Vec<usize> = lost.iter().map(local).collect();
                        let local_word: Vec<u32> = g.coords.iter().map(|&c| out[c]).collect();
                        match rebuild(gen, &local_word, &surv, &lost_local) {
                            Some(r) => r,
                            None => continue,
                        }
                    }
                };
                for (&c, v) in lost.iter().zip(values) {
                    out[c] = v;
                    erased[c] = false;
                    symbols.push(RepairedSymbol {
                        position: c,
                        method: RepairMethod::Local { part: g.part, group: g.coords.clone() },
                        helpers,
                    });
                }
                progress = true;
            }
        }

        let remaining: Vec<usize> = (0..n).filter(|&c| erased[c]).collect();
        if !remaining.is_empty() {
            let survivors: Vec<usize> = (0..n).filter(|&c| !erased[c]).collect();
            let (values, helpers) = rebuild(self.code.generator(), &out, &survivors, &remaining)
                .ok_or_else(|| CodeError::Underdetermined(remaining.clone()))?;
            for (&c, v) in remaining.iter().zip(values) {
                out[c] = v;
                symbols.push(RepairedSymbol { position: c, method: RepairMethod::Global, helpers });
            }
        }

        if !self.code.is_codeword(&out) {
            return Err(CodeError::Inconsistent);
        }
        symbols.sort_by_key(|s| s.position);
        Ok(RepairOutcome { word: out, symbols })
    }
}

/// One-shot repair: verifies the profile (trying `hints` first) and repairs.
pub fn repair(
    code: &LinearCode,
    word: &[u32],
    profile: &LocalityProfile,
    pattern: &ErasurePattern,
    hints: &[Vec<usize>],
) -> Result<RepairOutcome, CodeError> {
    let cert = match verify_locality(code, profile, hints)? {
        LocalityOutcome::Certified(c) => c,
        LocalityOutcome::Violated(v) => {
            return Err(CodeError::InvalidProfile(format!(
                "coordinate {} has no ({}, {}) repair group",
                v.coordinate, v.r, v.delta
            )))
        }
    };
    Repairer::new(code, profile, &cert)?.repair(word, pattern)
}
