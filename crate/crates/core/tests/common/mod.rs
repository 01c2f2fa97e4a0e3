//! Reference computations for integration tests. Nothing here calls the
//! library's linear algebra.
#![allow(dead_code)]

use itertools::Itertools;
use mlrc::code::LinearCode;
use mlrc::field::FieldSpec;
use mlrc::linalg::Matrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn inv(a: u64, q: u64) -> u64 {
    let mut r = 1;
    let (mut b, mut e) = (a % q, q - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

/// Row-reduces in place and returns the nonzero rows.
pub fn row_basis(rows: &[Vec<u32>], q: u32) -> Vec<Vec<u32>> {
    let q = q as u64;
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&v| v as u64).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        let iv = inv(m[rank][c], q);
        for v in m[rank].iter_mut() {
            *v = *v * iv % q;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[rank].clone();
                for (a, b) in m[i].iter_mut().zip(pivot) {
                    *a = (*a + q * q - f * b) % q;
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m.into_iter().map(|r| r.into_iter().map(|v| v as u32).collect()).collect()
}

pub fn rank(rows: &[Vec<u32>], q: u32) -> usize {
    row_basis(rows, q).len()
}

pub fn columns(rows: &[Vec<u32>], cols: &[usize]) -> Vec<Vec<u32>> {
    rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect()
}

/// Smallest number of dependent columns of `h`.
pub fn min_distance_by_columns(h: &[Vec<u32>], q: u32, n: usize) -> usize {
    (1..=n)
        .find(|&w| (0..n).combinations(w).any(|c| rank(&columns(h, &c), q) < w))
        .expect("some column set is dependent")
}

/// All linear combinations of `basis` (including zero).
pub fn span(basis: &[Vec<u32>], q: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * q as usize);
        for w in &out {
            for a in 0..q {
                next.push(w.iter().zip(b).map(|(&x, &y)| (x + a * y) % q).collect());
            }
        }
        out = next;
    }
    out
}

/// Minimum weight over all nonzero codewords of the row space of `g`.
pub fn min_weight(g: &[Vec<u32>], q: u32, n: usize) -> usize {
    span(&row_basis(g, q), q, n)
        .iter()
        .map(|w| w.iter().filter(|&&v| v != 0).count())
        .filter(|&w| w > 0)
        .min()
        .expect("nonzero code")
}

/// Supports of dual codewords that contain no smaller nonempty dual support.
pub fn minimal_dual_supports(h: &[Vec<u32>], q: u32, n: usize) -> Vec<Vec<usize>> {
    let mut supports: Vec<u64> = span(&row_basis(h, q), q, n)
        .iter()
        .map(|w| w.iter().enumerate().filter(|p| *p.1 != 0).fold(0u64, |m, (i, _)| m | 1 << i))
        .filter(|&m| m != 0)
        .collect();
    supports.sort_unstable();
    supports.dedup();
    let minimal: Vec<u64> =
        supports.iter().copied().filter(|&s| !supports.iter().any(|&t| t != s && t & s == t)).collect();
    let mut out: Vec<Vec<usize>> = minimal.iter().map(|&m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn rs(q: u32, n: usize, k: usize) -> LinearCode {
    let points: Vec<u32> = (0..n as u32).collect();
    LinearCode::from_parity_check(Matrix::vandermonde(FieldSpec::new(q).unwrap(), &points, n - k)).unwrap()
}

/// A random code with `n ≤ 12` and `q^{rank H} ≤ 2^16`; the parity-check
/// matrix may be rank deficient.
pub fn random_code(rng: &mut ChaCha8Rng) -> LinearCode {
    loop {
        let q = [2u32, 3, 5, 7][rng.gen_range(0..4)];
        let n = rng.gen_range(3..=12usize);
        let max_rows = (16.0 / (q as f64).log2()).floor() as usize;
        let m = rng.gen_range(1..=max_rows.min(n - 1));
        let rows: Vec<Vec<u32>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
        if let Ok(c) = LinearCode::from_parity_check(Matrix::from_rows(FieldSpec::new(q).unwrap(), &rows).unwrap()) {
            return c;
        }
    }
}
