//! The validation suite behind `spinboson validate` and the acceptance
//! integration test: every check pins an analytic claim of the model to
//! a numerical tolerance, with independent oracles (Monte Carlo moments,
//! discrete mode sums, closed forms) where the claim is quantitative.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::bath::{self, BathSpec, KernelQuery};
use crate::correlation::{build_contraction_matrix, Channel, ContractionMatrix, QubitLayout};
use crate::dfs::RegisterState;
use crate::error::{Error, Result};
use crate::oracle::{
    self, BathInit, BathSector, FockSystem, ModeSpec,
};
use crate::quad::QuadOptions;
use crate::threshold::{self, Prefactor, ThresholdQuery};
use crate::wick::{self, ErrorPattern};

/// Tunable knobs of a suite run. `tolerance_scale` > 1 loosens every
/// pass window by that factor; 1.0 runs the tolerances as specified.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Samples per Monte Carlo moment estimate.
    pub mc_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0x5eed,
            tolerance_scale: 1.0,
            mc_samples: 10_000_000,
        }
    }
}

/// Outcome of one suite criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "exact dephasing factorization"),
    (2, "pairing-count enhancement"),
    (3, "gaussian-moment monte carlo oracle"),
    (4, "bit-flip sinc decay"),
    (5, "long-time constructive interference"),
    (6, "threshold formulas"),
    (7, "decoherence-free decoupling"),
    (8, "weak-coupling scaling exponent"),
    (9, "zz coupling small-splitting consistency"),
    (10, "independence regime end to end"),
];

/// Run every criterion in order.
pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionOutcome> {
    (1..=10).map(|id| run_one(id, opts)).collect()
}

/// Run a subset by id.
pub fn run_selected(ids: &[u32], opts: &SuiteOptions) -> Vec<CriterionOutcome> {
    ids.iter().map(|&id| run_one(id, opts)).collect()
}

pub fn run_one(id: u32, opts: &SuiteOptions) -> CriterionOutcome {
    let start = Instant::now();
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown criterion");
    let result = match id {
        1 => criterion_1(opts),
        2 => criterion_2(opts),
        3 => criterion_3(opts),
        4 => criterion_4(opts),
        5 => criterion_5(opts),
        6 => criterion_6(opts),
        7 => criterion_7(opts),
        8 => criterion_8(opts),
        9 => criterion_9(opts),
        10 => criterion_10(opts),
        _ => Err(Error::Domain(format!("unknown criterion id {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            name,
            passed,
            detail,
            seconds,
        },
        Err(e) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

type Check = Result<(bool, String)>;

/// Monte Carlo estimate of E[prod_i x_{q_i}^2] for a real Gaussian
/// vector with covariance `c`; returns (mean, standard error). This is
/// the independent oracle for the matching-sum moments: it never touches
/// the pairing enumeration.
pub fn monte_carlo_moment(
    c: &ContractionMatrix,
    qubits: &[usize],
    samples: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let n = c.dim();
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::DimensionMismatch(format!(
            "qubit {q} out of range for an {n}x{n} covariance"
        )));
    }
    let cov = DMatrix::<f64>::from_fn(n, n, |i, j| c.get_re(i, j));
    // tiny diagonal jitter so a PSD-but-singular covariance still factors
    let scale = (0..n).map(|i| cov[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
    let mut jitter = 0.0;
    let chol = loop {
        let mut m = cov.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        match nalgebra::linalg::Cholesky::new(m) {
            Some(c) => break c,
            None => {
                jitter = if jitter == 0.0 { 1e-12 * scale } else { jitter * 100.0 };
                if jitter > 1e-4 * scale {
                    return Err(Error::Domain(
                        "covariance is not positive semidefinite".into(),
                    ));
                }
            }
        }
    };
    let l = chol.l();

    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut z = vec![0.0f64; n];
    for _ in 0..samples {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let mut product = 1.0f64;
        for &q in qubits {
            let mut x = 0.0;
            for k in 0..=q {
                x += l[(q, k)] * z[k];
            }
            product *= x * x;
        }
        sum += product;
        sum_sq += product * product;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let se = (var / samples as f64).sqrt();
    Ok((mean, se))
}

fn criterion_1(opts: &SuiteOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xD0C1);
    let tol = 1e-8 * opts.tolerance_scale;
    let mut worst_norm = 0.0f64;
    let mut worst_comm = 0.0f64;
    for _ in 0..5 {
        let kmag: f64 = rng.random_range(0.8..1.5);
        let dir = random_unit(&mut rng);
        let g: f64 = rng.random_range(0.02..0.06);
        let t: f64 = rng.random_range(1.0..8.0);
        let pos = |rng: &mut ChaCha8Rng| {
            [
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            ]
        };
        let positions = vec![pos(&mut rng), pos(&mut rng)];
        let k = [kmag * dir[0], kmag * dir[1], kmag * dir[2]];
        let sys = FockSystem::new(
            positions,
            0.0,
            1.0,
            vec![
                ModeSpec {
                    wavevector: k,
                    coupling: g,
                },
                ModeSpec {
                    wavevector: [-k[0], -k[1], -k[2]],
                    coupling: g,
                },
            ],
            12,
            BathInit::Vacuum,
        )?;
        let rep = oracle::verify_dephasing_decomposition(&sys, t, BathSector::Vacuum)?;
        worst_norm = worst_norm.max(rep.norm_difference);
        worst_comm = worst_comm.max(rep.max_commutator_norm);
    }
    let passed = worst_norm < tol && worst_comm < 1e-10 * opts.tolerance_scale;
    Ok((
        passed,
        format!(
            "worst vacuum-sector norm {worst_norm:.3e} (limit {tol:.1e}), worst commutator {worst_comm:.3e}"
        ),
    ))
}

fn criterion_2(_opts: &SuiteOptions) -> Check {
    let c = ContractionMatrix::uniform(8, 1.0, 1.0, Channel::DephasingZ)?;
    let mut details = Vec::new();
    let mut passed = true;
    for n in 2..=8usize {
        let pattern = ErrorPattern::new((0..n).collect(), Channel::DephasingZ)?;
        let moment = wick::gaussian_moment(&c, &pattern)?;
        let expected = wick::matching_count(n) as f64;
        // the sum adds unit products, so the match must be bit exact
        if moment != expected {
            passed = false;
            details.push(format!("n={n}: {moment} != {expected}"));
        }
    }
    if passed {
        details.push("ratios 3..2027025 integer-exact for n=2..8".into());
    }
    Ok((passed, details.join("; ")))
}

fn criterion_3(opts: &SuiteOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3CA5E);
    let mut hits = 0usize;
    let total = 20usize;
    let mut worst_pull = 0.0f64;
    for _ in 0..total {
        let c = random_psd_matrix(4, &mut rng)?;
        let n_pattern = rng.random_range(2..=3usize);
        let mut qubits: Vec<usize> = (0..4).collect();
        qubits.shuffle(&mut rng);
        qubits.truncate(n_pattern);
        let pattern = ErrorPattern::new(qubits.clone(), Channel::DephasingZ)?;
        let exact = wick::gaussian_moment(&c, &pattern)?;
        let (mc, se) = monte_carlo_moment(&c, &qubits, opts.mc_samples, &mut rng)?;
        let pull = (exact - mc).abs() / se;
        worst_pull = worst_pull.max(pull);
        if pull <= 3.0 {
            hits += 1;
        }
    }
    Ok((
        hits >= 19,
        format!("{hits}/{total} within 3 standard errors (worst pull {worst_pull:.2})"),
    ))
}

fn criterion_4(opts: &SuiteOptions) -> Check {
    let bath = BathSpec::new(1.0, 1.0, 1.0, 1.0, 0.0)?;
    let quad = QuadOptions::default();
    let delta = 1.0;
    let tol = 0.05 * opts.tolerance_scale;
    let mut passed = true;
    let mut details = Vec::new();
    for mult in [
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI,
         2.0 * std::f64::consts::PI,
        4.0 * std::f64::consts::PI,
    ] {
        let ts = mult / delta;
        let r = ts * bath.sound_speed;
        let t = 120.0 * (1.0f64 / bath.cutoff).max(ts);
        let k0 = bath::bitflip_kernel(&bath, &KernelQuery::new(0.0, t, delta)?, &quad)?;
        let kr = bath::bitflip_kernel(&bath, &KernelQuery::new(r, t, delta)?, &quad)?;
        let ratio = kr.value / k0.value;
        let target = mult.sin() / mult;
        let err = (ratio - target).abs();
        if err >= tol {
            passed = false;
        }
        details.push(format!("dt_s={mult:.3}: |{ratio:.4} - {target:.4}| = {err:.4}"));
    }
    Ok((passed, details.join("; ")))
}

fn criterion_5(opts: &SuiteOptions) -> Check {
    let bath = BathSpec::new(1.0, 1.0, 1.0, 1.0, 0.5)?;
    let quad = QuadOptions::default();
    let floor = 1.0 - 0.1 * opts.tolerance_scale;
    let mut passed = true;
    let mut details = Vec::new();
    for r in [0.5, 2.0, 5.0] {
        let t = 50.0
            * (r / bath.sound_speed)
                .max(1.0 / bath.temperature)
                .max(1.0 / bath.cutoff);
        let k0 = bath::dephasing_kernel(&bath, &KernelQuery::new(0.0, t, 0.0)?, &quad)?;
        let kr = bath::dephasing_kernel(&bath, &KernelQuery::new(r, t, 0.0)?, &quad)?;
        let ratio = kr.value / k0.value;
        if ratio < floor {
            passed = false;
        }
        details.push(format!("R={r}: ratio {ratio:.4}"));
    }
    Ok((passed, format!("{} (floor {floor:.2})", details.join("; "))))
}

fn criterion_6(opts: &SuiteOptions) -> Check {
    let tol = 1e-12 * opts.tolerance_scale;
    let p_th = 1e-3;
    let mut passed = true;
    let mut worst = 0.0f64;
    for n in [2u64, 4, 8, 16] {
        let q = ThresholdQuery::new(threshold::breakdown_point(p_th, n), p_th, n)?;
        let v = threshold::correlated_pfail(&q, Prefactor::Asymptotic);
        let rel = (v / (std::f64::consts::SQRT_2 * p_th) - 1.0).abs();
        worst = worst.max(rel);
        if rel >= tol {
            passed = false;
        }

        let q2 = ThresholdQuery::new(p_th / 3.0, p_th, n)?;
        let ratio = threshold::correlated_pfail(&q2, Prefactor::Asymptotic)
            / threshold::independent_pfail(&q2);
        let rel = (ratio / threshold::enhancement_factor(n) - 1.0).abs();
        worst = worst.max(rel);
        if rel >= tol {
            passed = false;
        }
    }
    Ok((
        passed,
        format!("worst relative deviation {worst:.2e} (limit {tol:.1e})"),
    ))
}

fn criterion_7(opts: &SuiteOptions) -> Check {
    // one near-zero-k mode: phases must agree across the register within
    // 1e-6, so push |k| down and compensate with the wave speed
    let omega = 1.0;
    let k = 3.0e-6;
    let sound_speed = omega / k;
    let g = 0.5;
    let t = 3.0; // g t = 1.5 >= 1
    let fidelity_floor = 1.0 - 1e-6 * opts.tolerance_scale;
    let control_drop = 1e-3 / opts.tolerance_scale;

    let build = |bath: BathInit| {
        FockSystem::new(
            vec![[0.0; 3], [0.3, 0.0, 0.0]],
            0.0,
            sound_speed,
            vec![ModeSpec {
                wavevector: [k, 0.0, 0.0],
                coupling: g,
            }],
            16,
            bath,
        )
    };
    let dfs_state = RegisterState::superposition(2, 0b01, 0b10, -1.0)?;
    let control = RegisterState::basis_state(2, 0b00)?;

    let mut passed = true;
    let mut details = Vec::new();
    for (bath, label) in [
        (BathInit::Vacuum, "vacuum"),
        (BathInit::Thermal { temperature: omega / 2.0 }, "thermal"),
    ] {
        let sys = build(bath)?;
        let rep = oracle::verify_dfs_decoupling(&sys, &dfs_state, t)?;
        if rep.decoupling_fidelity < fidelity_floor || rep.spin_purity < fidelity_floor {
            passed = false;
        }
        let ctl = oracle::verify_dfs_decoupling(&sys, &control, t)?;
        // the control state is not protected: its joint state never
        // returns to the decoupled product (reduced purity alone cannot
        // flag this, a computational basis state stays a pointer state)
        let deviation = 1.0 - ctl.decoupling_fidelity;
        if deviation < control_drop {
            passed = false;
        }
        details.push(format!(
            "{label}: dfs fidelity {:.9}, purity {:.9}, control deviation {deviation:.3e}",
            rep.decoupling_fidelity, rep.spin_purity
        ));
    }
    Ok((passed, details.join("; ")))
}

fn criterion_8(opts: &SuiteOptions) -> Check {
    let sys = FockSystem::new(
        vec![[0.0; 3], [0.3, 0.0, 0.0]],
        1.0,
        1.0,
        vec![ModeSpec {
            wavevector: [1.5, 0.0, 0.0], // |w - Delta| = 0.5 Delta
            coupling: 0.04,
        }],
        20,
        BathInit::Vacuum,
    )?;
    let rep = oracle::verify_canonical_transformation(&sys, 4.0, &[1.0, 0.5, 0.25, 0.125])?;
    let half_width = 0.5 * opts.tolerance_scale;
    let passed = rep.exponent >= 4.0 - half_width && rep.exponent <= 4.0 + half_width;
    Ok((
        passed,
        format!(
            "exponent {:.3} (window 4.0 +- {half_width:.2}); infidelities {:?}",
            rep.exponent,
            rep.infidelities
                .iter()
                .map(|(_, e)| format!("{e:.2e}"))
                .collect::<Vec<_>>()
        ),
    ))
}

fn criterion_9(opts: &SuiteOptions) -> Check {
    let bath = BathSpec::new(1.0, 1.0, 1.0, 1.0, 0.0)?;
    let quad = QuadOptions::default();
    let tol = 0.01 * opts.tolerance_scale;
    let unit = bath.sound_speed / bath.cutoff;
    let mut passed = true;
    let mut details = Vec::new();
    for r in [0.0, unit, 5.0 * unit] {
        let zero = bath::effective_zz_coupling(&bath, r, 0.0, &quad)?;
        let small = bath::effective_zz_coupling(&bath, r, 1e-4 * bath.cutoff, &quad)?;
        let rel = (small.value - zero.value).abs() / zero.value.abs();
        if rel >= tol {
            passed = false;
        }
        details.push(format!("R={r}: rel diff {rel:.2e}"));
    }
    Ok((passed, format!("{} (limit {tol:.2e})", details.join("; "))))
}

fn criterion_10(opts: &SuiteOptions) -> Check {
    let bath = BathSpec::new(1.0, 1.0, 1.0, 1.0, 0.0)?;
    let quad = QuadOptions::default();
    let delta = 1.0;
    let scale = opts.tolerance_scale;
    let mut passed = true;
    let mut details = Vec::new();

    let collinear = |spacing: f64| -> Result<QubitLayout> {
        QubitLayout::new(
            (0..4).map(|i| [i as f64 * spacing, 0.0, 0.0]).collect(),
            delta,
        )
    };
    let patterns: Vec<ErrorPattern> = subsets_up_to_4()
        .into_iter()
        .map(|q| ErrorPattern::new(q, Channel::BitflipZ))
        .collect::<Result<_>>()?;

    // wide register: every pair beyond the first sinc zero
    {
        let spacing = 4.0 * std::f64::consts::PI * bath.sound_speed / delta;
        let layout = collinear(spacing)?;
        let t = 120.0 * (3.0 * spacing / bath.sound_speed).max(1.0 / bath.cutoff);
        let c = build_contraction_matrix(&bath, &layout, t, Channel::BitflipZ, &quad)?;
        let mut worst_ratio = 0.0f64;
        for j in 0..4 {
            for m in (j + 1)..4 {
                worst_ratio = worst_ratio.max(c.correlation_ratio(j, m)?.abs());
            }
        }
        let reports = wick::independence_deviation(&c, &patterns, 0.1 * scale)?;
        let worst_amp = reports
            .iter()
            .map(|r| (r.enhancement_ratio - 1.0).abs())
            .fold(0.0f64, f64::max);
        if worst_ratio >= 0.1 * scale || worst_amp >= 0.1 * scale {
            passed = false;
        }
        details.push(format!(
            "wide: worst |ratio| {worst_ratio:.3e}, worst amplitude deviation {worst_amp:.3e}"
        ));
    }

    // compressed register: deep inside the correlation length
    {
        let spacing = 0.1 * bath.sound_speed / delta;
        let layout = collinear(spacing)?;
        let t = 120.0 * (1.0f64 / bath.cutoff).max(3.0 * spacing / bath.sound_speed).max(1.0 / delta);
        let c = build_contraction_matrix(&bath, &layout, t, Channel::BitflipZ, &quad)?;
        let mut worst_ratio = 1.0f64;
        for j in 0..4 {
            for m in (j + 1)..4 {
                worst_ratio = worst_ratio.min(c.correlation_ratio(j, m)?);
            }
        }
        let reports = wick::independence_deviation(&c, &patterns, 0.1)?;
        let mut worst_rel = 0.0f64;
        for r in &reports {
            let rel = (r.enhancement_ratio / r.matching_count as f64 - 1.0).abs();
            worst_rel = worst_rel.max(rel);
        }
        if worst_ratio <= 1.0 - 0.1 * scale || worst_rel >= 0.10 * scale {
            passed = false;
        }
        details.push(format!(
            "compressed: min ratio {worst_ratio:.4}, worst enhancement deviation {worst_rel:.3}"
        ));
    }

    Ok((passed, details.join("; ")))
}

fn subsets_up_to_4() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..16 {
        if mask.count_ones() >= 2 {
            out.push((0..4).filter(|&q| mask & (1 << q) != 0).collect());
        }
    }
    out
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

fn random_psd_matrix(n: usize, rng: &mut ChaCha8Rng) -> Result<ContractionMatrix> {
    let g: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let mut max_diag = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += g[i * n + k] * g[j * n + k];
            }
            entries[i * n + j] = Complex64::new(acc, 0.0);
            if i == j {
                max_diag = max_diag.max(acc);
            }
        }
    }
    // keep the products O(1) so the MC variance stays tame
    for e in &mut entries {
        *e /= max_diag;
    }
    ContractionMatrix::from_entries(n, entries, 0.0, Channel::DephasingZ, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_table_is_complete() {
        assert_eq!(CRITERIA.len(), 10);
        for (i, (id, _)) in CRITERIA.iter().enumerate() {
            assert_eq!(*id as usize, i + 1);
        }
    }

    #[test]
    fn fast_criteria_pass_at_default_tolerances() {
        let opts = SuiteOptions::default();
        for id in [2u32, 6] {
            let out = run_one(id, &opts);
            assert!(out.passed, "criterion {id}: {}", out.detail);
        }
    }

    #[test]
    fn monte_carlo_moment_matches_a_known_covariance() {
        // identity covariance: E[x0^2 x1^2] = 1
        let c = ContractionMatrix::uniform(3, 1.0, 0.0, Channel::DephasingZ).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mean, se) = monte_carlo_moment(&c, &[0, 1], 200_000, &mut rng).unwrap();
        assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn unknown_criterion_reports_an_error_outcome() {
        let out = run_one(99, &SuiteOptions::default());
        assert!(!out.passed);
        assert!(out.detail.contains("unknown"));
    }
}
