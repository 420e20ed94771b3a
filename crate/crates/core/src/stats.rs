//! Wilcoxon signed-rank test for paired samples.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest number of nonzero differences handled by exact enumeration.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Signed-rank sum `Σ sign(dᵢ) · rank(|dᵢ|)`.
    pub statistic: f64,
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Nonzero differences with their midranks, ranks doubled so they are integers.
struct Ranked {
    positive: Vec<bool>,
    doubled_ranks: Vec<u64>,
    tie_term: f64,
}

fn rank_differences(a: &[f64], b: &[f64]) -> Result<Ranked> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: vec![a.len()],
            actual: vec![b.len()],
        });
    }
    if a.is_empty() {
        return Err(Error::Empty("paired samples"));
    }
    let mut diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if let Some(i) = diffs.iter().position(|d| !d.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    diffs.sort_by(|x, y| libm::fabs(*x).total_cmp(&libm::fabs(*y)));
    let n = diffs.len();
    let mut doubled_ranks = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && libm::fabs(diffs[j + 1]) == libm::fabs(diffs[i]) {
            j += 1;
        }
        // positions i..=j share rank ((i+1) + (j+1)) / 2
        let doubled = (i + j + 2) as u64;
        doubled_ranks[i..=j].iter_mut().for_each(|r| *r = doubled);
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    Ok(Ranked {
        positive: diffs.iter().map(|d| *d > 0.0).collect(),
        doubled_ranks,
        tie_term,
    })
}

fn no_evidence() -> WilcoxonResult {
    WilcoxonResult {
        statistic: 0.0,
        w_plus: 0.0,
        n_effective: 0,
        p_value: 1.0,
        exact: true,
    }
}

fn summarize(r: &Ranked, p_value: f64, exact: bool) -> WilcoxonResult {
    let w_plus2: u64 = r
        .doubled_ranks
        .iter()
        .zip(&r.positive)
        .filter(|(_, &p)| p)
        .map(|(d, _)| d)
        .sum();
    let total2: u64 = r.doubled_ranks.iter().sum();
    WilcoxonResult {
        statistic: (2.0 * w_plus2 as f64 - total2 as f64) / 2.0,
        w_plus: w_plus2 as f64 / 2.0,
        n_effective: r.doubled_ranks.len(),
        p_value: p_value.clamp(0.0, 1.0),
        exact,
    }
}

/// Two-sided test of `a − b`; exact for up to [`EXACT_MAX_N`] nonzero
/// differences, normal approximation beyond.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    let ranked = rank_differences(a, b)?;
    if ranked.doubled_ranks.len() <= EXACT_MAX_N {
        Ok(exact_from_ranked(&ranked))
    } else {
        Ok(normal_from_ranked(&ranked))
    }
}

/// Exact p-value from the null distribution of `W⁺` over all `2^n` sign
/// assignments, counted by dynamic programming over doubled ranks.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    let ranked = rank_differences(a, b)?;
    if ranked.doubled_ranks.len() > 62 {
        return Err(Error::InvalidArgument(
            "exact enumeration supports at most 62 nonzero differences".into(),
        ));
    }
    Ok(exact_from_ranked(&ranked))
}

/// Normal approximation with tie and continuity corrections.
pub fn wilcoxon_normal(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    Ok(normal_from_ranked(&rank_differences(a, b)?))
}

fn exact_from_ranked(r: &Ranked) -> WilcoxonResult {
    let n = r.doubled_ranks.len();
    if n == 0 {
        return no_evidence();
    }
    let total: u64 = r.doubled_ranks.iter().sum();
    // counts[s] = number of sign assignments whose doubled W⁺ equals s
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &rank in &r.doubled_ranks {
        let rank = rank as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + rank] += counts[s];
            }
        }
        reach += rank;
    }
    let observed: u64 = r
        .doubled_ranks
        .iter()
        .zip(&r.positive)
        .filter(|(_, &p)| p)
        .map(|(d, _)| d)
        .sum();
    // |2W⁺ − total| compared in doubled units to stay in integers
    let deviation = (2 * observed).abs_diff(total);
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as u64).abs_diff(total) >= deviation)
        .map(|(_, c)| c)
        .sum();
    let p = extreme as f64 / libm::pow(2.0, n as f64);
    summarize(r, p, true)
}

fn normal_from_ranked(r: &Ranked) -> WilcoxonResult {
    let n = r.doubled_ranks.len();
    if n == 0 {
        return no_evidence();
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - r.tie_term / 48.0;
    let result = summarize(r, 1.0, false);
    if var <= 0.0 {
        return result;
    }
    let z = ((result.w_plus - mean).abs() - 0.5).max(0.0) / libm::sqrt(var);
    WilcoxonResult {
        p_value: libm::erfc(z / core::f64::consts::SQRT_2).min(1.0),
        ..result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_give_p_one() {
        let a = [1.0, 2.0, 3.0];
        let r = wilcoxon_signed_rank(&a, &a).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.n_effective, 0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
        assert!(wilcoxon_signed_rank(&[], &[]).is_err());
    }

    #[test]
    fn small_exact_case_by_hand() {
        // differences 1, 2, 3 all positive: W⁺ = 6, only 1 of 8 assignments
        // is as extreme on each side.
        let r = wilcoxon_signed_rank(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.exact);
        assert_eq!(r.w_plus, 6.0);
        assert_eq!(r.statistic, 6.0);
        assert_eq!(r.p_value, 0.25);
    }

    #[test]
    fn midranks_for_ties() {
        let r = rank_differences(&[1.0, -1.0, 2.0, 0.0], &[0.0; 4]).unwrap();
        assert_eq!(r.doubled_ranks, vec![3, 3, 6]);
        assert_eq!(r.tie_term, 6.0);
    }

    #[test]
    fn consistent_n32_shift_is_highly_significant() {
        let a: Vec<f64> = (0..32).map(|i| i as f64 * 0.1).collect();
        let b: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, x)| x + 1.0 + i as f64 * 0.01)
            .collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-5);
        assert!(r.p_value > 1e-7, "{}", r.p_value);
    }
}
