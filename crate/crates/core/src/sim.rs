//! Monte-Carlo erasure and repair simulation.
//!
//! Each trial encodes a random message, erases distinct coordinates chosen
//! uniformly, and runs the local-then-global repairer. Trial `t` draws from
//! its own SplitMix64 stream seeded with `mix(seed ^ mix(t))`, so reports
//! are identical however the trials are scheduled.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{
    verify_locality, CodeError, ErasurePattern, LinearCode, LocalityOutcome, LocalityProfile, RepairMethod, Repairer,
};

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then the output is the state
/// passed through [`mix`].
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

/// The SplitMix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// The generator for trial `trial` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        SplitMix64::new(mix(seed ^ mix(trial)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }

    /// Uniform in `0..m` by rejection, `m ≥ 1`.
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0);
        let limit = u64::MAX - u64::MAX % m;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % m;
            }
        }
    }

    /// `count` distinct items of `pool`, by a partial Fisher–Yates shuffle.
    pub fn choose(&mut self, pool: &[usize], count: usize) -> Vec<usize> {
        let mut v = pool.to_vec();
        for i in 0..count {
            let j = i + self.below((v.len() - i) as u64) as usize;
            v.swap(i, j);
        }
        v.truncate(count);
        v
    }
}

/// Erasures per trial: a fixed count or uniform over an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failures {
    Fixed(usize),
    Range { min: usize, max: usize },
}

impl Failures {
    pub fn max(&self) -> usize {
        match *self {
            Failures::Fixed(f) => f,
            Failures::Range { max, .. } => max,
        }
    }

    fn draw(&self, rng: &mut SplitMix64) -> usize {
        match *self {
            Failures::Fixed(f) => f,
            Failures::Range { min, max } => min + rng.below((max - min + 1) as u64) as usize,
        }
    }
}

impl fmt::Display for Failures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failures::Fixed(x) => write!(f, "{x}"),
            Failures::Range { min, max } => write!(f, "{min}-{max}"),
        }
    }
}

impl FromStr for Failures {
    type Err = String;

    /// `"3"` or `"1-4"`.
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid failure count {t:?}"));
        match s.split_once('-') {
            None => Ok(Failures::Fixed(num(s)?)),
            Some((a, b)) => {
                let (min, max) = (num(a)?, num(b)?);
                if min > max {
                    return Err(format!("empty failure range {s:?}"));
                }
                Ok(Failures::Range { min, max })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub failures: Failures,
    pub seed: u64,
    /// Confine each trial's erasures to one uniformly chosen local group.
    #[serde(default)]
    pub within_group: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("locality check failed: coordinate {coordinate} has no ({r}, {delta}) repair group")]
    Locality { coordinate: usize, r: usize, delta: usize },
    #[error("trial {trial} repaired to a word different from the one encoded")]
    Mismatch { trial: u64 },
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    all_local: u64,
    global: u64,
    unrecoverable: u64,
    /// Per part: erased, repaired locally, repaired globally, helpers read.
    parts: Vec<[u64; 4]>,
}

impl Tally {
    fn new(parts: usize) -> Self {
        Tally { parts: vec![[0; 4]; parts], ..Tally::default() }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.all_local += other.all_local;
        self.global += other.global;
        self.unrecoverable += other.unrecoverable;
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            for i in 0..4 {
                a[i] += b[i];
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartStats {
    /// 1-based part number.
    pub part: usize,
    pub r: usize,
    pub delta: usize,
    pub erased: u64,
    pub repaired_local: u64,
    pub repaired_global: u64,
    /// Locally repaired share of the erased symbols; `None` if none erased.
    pub local_success_rate: Option<f64>,
    /// Helpers read per repaired symbol (a global repair counts the full
    /// information set); `None` if nothing was repaired.
    pub mean_helpers: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub version: u32,
    pub trials: u64,
    pub seed: u64,
    pub failures: String,
    pub within_group: bool,
    pub all_local: u64,
    pub global_fallback: u64,
    pub unrecoverable: u64,
    pub all_local_rate: f64,
    pub global_fallback_rate: f64,
    pub unrecoverable_rate: f64,
    pub parts: Vec<PartStats>,
}

fn ratio(a: u64, b: u64) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

/// Runs the simulation. The profile must certify (hints are tried first).
pub fn run(
    code: &LinearCode,
    profile: &LocalityProfile,
    hints: &[Vec<usize>],
    config: &SimConfig,
) -> Result<SimReport, SimError> {
    let n = code.n();
    if config.trials == 0 {
        return Err(SimError::Config("trials must be at least 1".into()));
    }
    if let Failures::Range { min, max } = config.failures {
        if min > max {
            return Err(SimError::Config("empty failure range".into()));
        }
    }
    if config.failures.max() > n {
        return Err(SimError::Config(format!("cannot erase {} of {n} symbols", config.failures.max())));
    }
    let cert = match verify_locality(code, profile, hints)? {
        LocalityOutcome::Certified(c) => c,
        LocalityOutcome::Violated(v) => {
            return Err(SimError::Locality { coordinate: v.coordinate, r: v.r, delta: v.delta })
        }
    };
    let groups: Vec<Vec<usize>> = cert.groups().into_iter().map(|g| g.1).collect();
    if config.within_group {
        let smallest = groups.iter().map(Vec::len).min().unwrap_or(0);
        if config.failures.max() > smallest {
            return Err(SimError::Config(format!(
                "{} failures do not fit in the smallest local group ({smallest} symbols)",
                config.failures.max()
            )));
        }
    }
    let repairer = Repairer::new(code, profile, &cert)?;
    let owner: Vec<usize> = (0..n).map(|c| profile.part_of(c).expect("validated profile")).collect();
    let all: Vec<usize> = (0..n).collect();
    let q = code.field().q() as u64;
    let parts = profile.parts.len();

    let trial = |t: u64| -> Result<Tally, SimError> {
        let mut rng = SplitMix64::for_trial(config.seed, t);
        let message: Vec<u32> = (0..code.k()).map(|_| rng.below(q) as u32).collect();
        let word = code.encode(&message)?;
        let f = config.failures.draw(&mut rng);
        let erased = if config.within_group {
            let g = &groups[rng.below(groups.len() as u64) as usize];
            rng.choose(g, f)
        } else {
            rng.choose(&all, f)
        };
        let mut tally = Tally::new(parts);
        for &c in &erased {
            tally.parts[owner[c]][0] += 1;
        }
        let pattern = ErasurePattern::new(n, &erased)?;
        match repairer.repair(&word, &pattern) {
            Ok(out) => {
                if out.word != word {
                    return Err(SimError::Mismatch { trial: t });
                }
                if out.all_local() {
                    tally.all_local += 1;
                } else {
                    tally.global += 1;
                }
                for s in &out.symbols {
                    let p = &mut tally.parts[owner[s.position]];
                    match s.method {
                        RepairMethod::Local { .. } => p[1] += 1,
                        RepairMethod::Global => p[2] += 1,
                    }
                    p[3] += s.helpers as u64;
                }
            }
            Err(CodeError::Underdetermined(_)) => tally.unrecoverable += 1,
            Err(e) => return Err(e.into()),
        }
        Ok(tally)
    };

    let total =
        (0..config.trials).into_par_iter().map(trial).try_reduce(|| Tally::new(parts), |a, b| Ok(a.merge(b)))?;

    let trials = config.trials;
    Ok(SimReport {
        version: 1,
        trials,
        seed: config.seed,
        failures: config.failures.to_string(),
        within_group: config.within_group,
        all_local: total.all_local,
        global_fallback: total.global,
        unrecoverable: total.unrecoverable,
        all_local_rate: total.all_local as f64 / trials as f64,
        global_fallback_rate: total.global as f64 / trials as f64,
        unrecoverable_rate: total.unrecoverable as f64 / trials as f64,
        parts: profile
            .parts
            .iter()
            .zip(&total.parts)
            .enumerate()
            .map(|(i, (p, t))| PartStats {
                part: i + 1,
                r: p.r,
                delta: p.delta,
                erased: t[0],
                repaired_local: t[1],
                repaired_global: t[2],
                local_success_rate: ratio(t[1], t[0]),
                mean_helpers: ratio(t[3], t[1] + t[2]),
            })
            .collect(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

impl SimReport {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let scope = if self.within_group { "one group" } else { "any" };
        let _ = writeln!(s, "trials {}  seed {}  failures {}  scope {}", self.trials, self.seed, self.failures, scope);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<16} {:>10} {:>10}", "outcome", "count", "rate");
        for (name, c, r) in [
            ("all local", self.all_local, self.all_local_rate),
            ("global fallback", self.global_fallback, self.global_fallback_rate),
            ("unrecoverable", self.unrecoverable, self.unrecoverable_rate),
        ] {
            let _ = writeln!(s, "{name:<16} {c:>10} {r:>10.6}");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>4} {:>3} {:>5} {:>9} {:>9} {:>9} {:>10} {:>12}",
            "part", "r", "delta", "erased", "local", "global", "local rate", "mean helpers"
        );
        for p in &self.parts {
            let _ = writeln!(
                s,
                "{:>4} {:>3} {:>5} {:>9} {:>9} {:>9} {:>10} {:>12}",
                p.part,
                p.r,
                p.delta,
                p.erased,
                p.repaired_local,
                p.repaired_global,
                opt(p.local_success_rate),
                opt(p.mean_helpers)
            );
        }
        s
    }
}
