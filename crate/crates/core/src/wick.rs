//! Multi-qubit error amplitudes as Gaussian moments.
//!
//! The squared amplitude of an n-qubit error pattern is a 2n-point
//! expectation value of the bath displacement operators attached to the
//! pattern's qubits. For a Gaussian (thermal or vacuum) bath state it
//! reduces to a sum over all (2n-1)!! perfect matchings of the 2n
//! operator slots, each matching contributing the product of its pair
//! contractions. Deviation of A_n^2 from the product of single-qubit
//! amplitudes measures how far the register is from independent noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{Channel, ContractionMatrix};
use crate::error::{Error, Result};
use crate::quad::KahanSum;

/// Largest pattern size enumerated exhaustively: (2*8 - 1)!! = 2,027,025
/// matchings.
pub const MAX_PATTERN_QUBITS: usize = 8;

/// An ordered set of distinct qubits hit by the same error channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorPattern {
    pub qubits: Vec<usize>,
    pub channel: Channel,
}

impl ErrorPattern {
    pub fn new(qubits: Vec<usize>, channel: Channel) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::Domain("error pattern must be non-empty".into()));
        }
        let mut seen = qubits.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != qubits.len() {
            return Err(Error::Domain(format!(
                "error pattern has repeated qubits: {qubits:?}"
            )));
        }
        Ok(ErrorPattern { qubits, channel })
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

/// Number of perfect matchings of 2n slots: (2n-1)!! = (2n)!/(2^n n!).
pub fn matching_count(n: usize) -> u64 {
    (1..=n).map(|i| 2 * i as u64 - 1).product()
}

/// Stirling form of the matching count, sqrt(2) (2n/e)^n.
pub fn matching_count_asymptotic(n: usize) -> f64 {
    let n = n as f64;
    std::f64::consts::SQRT_2 * (2.0 * n / std::f64::consts::E).powf(n)
}

/// A_n^2 for `pattern` under the Gaussian bath state described by `c`.
///
/// The 2n slots alternate daggered and plain displacement operators per
/// qubit. Because the displacements are anti-Hermitian, each slot carries
/// a sign; a daggered-plain pair contributes `+C[j][m]` and a same-kind
/// pair `-(-C[j][m])` is folded into the slot signs. Every matching of a
/// full pattern ends up contributing the plain product of its contraction
/// values, which is what the enumeration accumulates.
///
/// The enumeration partitions on the partner of slot 0 and reduces the
/// partitions in slot order with compensated summation, so results are
/// reproducible to ~1e-13 relative regardless of thread count.
pub fn gaussian_moment(c: &ContractionMatrix, pattern: &ErrorPattern) -> Result<f64> {
    let n = pattern.len();
    if n > MAX_PATTERN_QUBITS {
        return Err(Error::Capacity(format!(
            "pattern of {n} qubits needs {} matchings; the exhaustive enumeration is capped at n = {MAX_PATTERN_QUBITS}",
            matching_count(n)
        )));
    }
    for &q in &pattern.qubits {
        if q >= c.dim() {
            return Err(Error::DimensionMismatch(format!(
                "pattern qubit {q} out of range for an {0}x{0} contraction matrix",
                c.dim()
            )));
        }
    }

    let slots = 2 * n;
    let slot_qubit: Vec<usize> = (0..slots).map(|s| pattern.qubits[s / 2]).collect();
    // slot sign: -1 for the daggered operator of each qubit (even slots)
    let slot_sign: Vec<f64> = (0..slots).map(|s| if s % 2 == 0 { -1.0 } else { 1.0 }).collect();

    let pair_value = |a: usize, b: usize| -> f64 {
        -slot_sign[a] * slot_sign[b] * c.get_re(slot_qubit[a], slot_qubit[b])
    };

    if n == 1 {
        return Ok(pair_value(0, 1));
    }

    // partition on slot 0's partner
    let partials: Vec<(f64, u64)> = (1..slots)
        .into_par_iter()
        .map(|b| {
            let mut used = 1u32 | (1 << b);
            let first = pair_value(0, b);
            let mut sum = KahanSum::default();
            let mut count = 0u64;
            sum_matchings(&mut used, slots, first, &pair_value, &mut sum, &mut count);
            (sum.value(), count)
        })
        .collect();

    let mut total = KahanSum::default();
    let mut count = 0u64;
    for (v, k) in partials {
        total.add(v);
        count += k;
    }
    assert_eq!(
        count,
        matching_count(n),
        "matching enumeration must visit exactly (2n-1)!! pairings"
    );
    Ok(total.value())
}

fn sum_matchings<F: Fn(usize, usize) -> f64>(
    used: &mut u32,
    slots: usize,
    partial: f64,
    pair_value: &F,
    sum: &mut KahanSum,
    count: &mut u64,
) {
    // lowest free slot pairs with each later free slot
    let a = (*used).trailing_ones() as usize;
    if a >= slots {
        sum.add(partial);
        *count += 1;
        return;
    }
    *used |= 1 << a;
    for b in (a + 1)..slots {
        if *used & (1 << b) != 0 {
            continue;
        }
        *used |= 1 << b;
        sum_matchings(used, slots, partial * pair_value(a, b), pair_value, sum, count);
        *used &= !(1 << b);
    }
    *used &= !(1 << a);
}

/// Per-pattern deviation from the independent-noise factorization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub qubits: Vec<usize>,
    pub channel: Channel,
    /// A_n^2 from the full matching sum.
    pub amplitude_sq: f64,
    /// Product of the single-qubit amplitudes, prod_i A_1(j_i)^2.
    pub independent_product: f64,
    /// amplitude_sq / independent_product.
    pub enhancement_ratio: f64,
    /// (2n-1)!! perfect matchings entered the sum.
    pub matching_count: u64,
    /// Ratio fell outside [1 - delta, 1 + delta].
    pub violates_independence: bool,
}

/// Evaluate every pattern against the factorized prediction, flagging
/// ratios outside [1 - delta, 1 + delta].
pub fn independence_deviation(
    c: &ContractionMatrix,
    patterns: &[ErrorPattern],
    delta: f64,
) -> Result<Vec<AmplitudeReport>> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    patterns
        .iter()
        .map(|p| {
            let amplitude_sq = gaussian_moment(c, p)?;
            let mut independent_product = 1.0;
            for &q in &p.qubits {
                let a1 = c.get_re(q, q);
                if a1 <= 0.0 {
                    return Err(Error::UndefinedRatio(format!(
                        "single-qubit amplitude vanishes on qubit {q}"
                    )));
                }
                independent_product *= a1;
            }
            let enhancement_ratio = amplitude_sq / independent_product;
            Ok(AmplitudeReport {
                qubits: p.qubits.clone(),
                channel: p.channel,
                amplitude_sq,
                independent_product,
                enhancement_ratio,
                matching_count: matching_count(p.len()),
                violates_independence: !(enhancement_ratio >= 1.0 - delta
                    && enhancement_ratio <= 1.0 + delta),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn pattern(qubits: &[usize]) -> ErrorPattern {
        ErrorPattern::new(qubits.to_vec(), Channel::DephasingZ).unwrap()
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> ContractionMatrix {
        // G G^T is PSD; normalize later via the ratio tests
        let g: Vec<f64> = (0..n * n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += g[i * n + k] * g[j * n + k];
                }
                entries[i * n + j] = Complex64::new(acc, 0.0);
            }
        }
        ContractionMatrix::from_entries(n, entries, 0.0, Channel::DephasingZ, 0.0, 0.0).unwrap()
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        assert_eq!(matching_count(1), 1);
        assert_eq!(matching_count(2), 3);
        assert_eq!(matching_count(3), 15);
        assert_eq!(matching_count(4), 105);
        assert_eq!(matching_count(8), 2_027_025);
    }

    #[test]
    fn stirling_form_within_five_percent_at_n8() {
        let exact = matching_count(8) as f64;
        let approx = matching_count_asymptotic(8);
        assert!((exact / approx - 1.0).abs() < 0.05);
    }

    #[test]
    fn diagonal_matrix_gives_the_independent_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        let diags: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
        for (j, &d) in diags.iter().enumerate() {
            entries[j * n + j] = Complex64::new(d, 0.0);
        }
        let c = ContractionMatrix::from_entries(n, entries, 0.0, Channel::DephasingZ, 0.0, 0.0)
            .unwrap();
        let m = gaussian_moment(&c, &pattern(&[0, 2, 4])).unwrap();
        assert_relative_eq!(m, diags[0] * diags[2] * diags[4], max_relative = 1e-14);
    }

    #[test]
    fn fully_correlated_matrix_gives_double_factorial_enhancement() {
        let c0 = 0.7;
        let c = ContractionMatrix::uniform(8, c0, c0, Channel::DephasingZ).unwrap();
        for n in [2usize, 3] {
            let qubits: Vec<usize> = (0..n).collect();
            let m = gaussian_moment(&c, &pattern(&qubits)).unwrap();
            assert_relative_eq!(
                m,
                matching_count(n) as f64 * c0.powi(n as i32),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn capacity_error_beyond_max_pattern() {
        let c = ContractionMatrix::uniform(9, 1.0, 0.0, Channel::DephasingZ).unwrap();
        let p = ErrorPattern::new((0..9).collect(), Channel::DephasingZ).unwrap();
        assert!(matches!(gaussian_moment(&c, &p), Err(Error::Capacity(_))));
    }

    #[test]
    fn monte_carlo_oracle_agrees_on_random_covariance() {
        // real Gaussian vector x ~ N(0, C): E[prod x_j^2] over the pattern
        // qubits equals the matching sum (Isserlis). Estimated with 10^6
        // samples here; the full acceptance criterion runs 10^7.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let c = random_psd(4, &mut rng);
        let p = pattern(&[0, 1, 2]);
        let exact = gaussian_moment(&c, &p).unwrap();
        let (mc, se) = crate::suite::monte_carlo_moment(&c, &p.qubits, 1_000_000, &mut rng).unwrap();
        assert!(
            (exact - mc).abs() <= 3.0 * se,
            "wick {exact} vs mc {mc} +- {se}"
        );
    }

    #[test]
    fn permutation_invariance_of_the_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = random_psd(5, &mut rng);
        let a = gaussian_moment(&c, &pattern(&[0, 1, 3])).unwrap();
        let b = gaussian_moment(&c, &pattern(&[3, 0, 1])).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn independence_deviation_reports() {
        let diag = ContractionMatrix::uniform(4, 1.3, 0.0, Channel::DephasingZ).unwrap();
        let pats = vec![pattern(&[0, 1]), pattern(&[0, 1, 2, 3])];
        let reps = independence_deviation(&diag, &pats, 0.1).unwrap();
        for r in &reps {
            assert_relative_eq!(r.enhancement_ratio, 1.0, max_relative = 1e-12);
            assert!(!r.violates_independence);
        }

        let full = ContractionMatrix::uniform(4, 0.9, 0.9, Channel::DephasingZ).unwrap();
        let reps = independence_deviation(&full, &[pattern(&[0, 1, 2, 3])], 0.1).unwrap();
        assert_relative_eq!(reps[0].enhancement_ratio, 105.0, max_relative = 1e-12);
        assert!(reps[0].violates_independence);
        assert_eq!(reps[0].matching_count, 105);
    }

    #[test]
    fn zero_single_amplitude_is_an_error() {
        let c = ContractionMatrix::uniform(3, 0.0, 0.0, Channel::DephasingZ).unwrap();
        let r = independence_deviation(&c, &[pattern(&[0, 1])], 0.1);
        assert!(matches!(r, Err(Error::UndefinedRatio(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// lambda * C multiplies A_n^2 by lambda^n exactly.
        #[test]
        fn scaling_law(seed in 0u64..1000, lambda in 0.1f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_psd(4, &mut rng);
            let scaled_entries: Vec<Complex64> =
                (0..16).map(|i| c.get(i / 4, i % 4) * lambda).collect();
            let cs = ContractionMatrix::from_entries(
                4, scaled_entries, 0.0, Channel::DephasingZ, 0.0, 0.0,
            ).unwrap();
            let p = pattern(&[0, 1, 2]);
            let base = gaussian_moment(&c, &p).unwrap();
            let scaled = gaussian_moment(&cs, &p).unwrap();
            prop_assert!((scaled - lambda.powi(3) * base).abs() <= 1e-12 * scaled.abs().max(base.abs()));
        }

        /// A_n^2 of a PSD covariance is non-negative.
        #[test]
        fn moments_nonnegative(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_psd(4, &mut rng);
            let m = gaussian_moment(&c, &pattern(&[0, 1, 2, 3])).unwrap();
            prop_assert!(m >= -1e-12);
        }
    }
}
