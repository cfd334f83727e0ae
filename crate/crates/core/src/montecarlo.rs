//! Monte Carlo estimates of `⟨|Tr(P U)^k|²⟩` for `U` drawn from COE(N) or CUE(N).
//!
//! Samples are split into fixed blocks of `BLOCK` draws. Block `b` uses a ChaCha20
//! stream seeded by `seed` with stream id `b`, and block statistics are merged in block
//! order, so the result is bit-identical for any number of worker threads.

use std::fmt;

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::moments::{coe_moment, evaluate_moment, EnumOptions, MomentError, DEFAULT_MAX_K};
use crate::twist::{cycle_lengths, Twist, TwistError};
use crate::weingarten::{coe_table, Ensemble};

pub type C64 = Complex<f64>;

/// Draws per RNG stream.
pub const BLOCK: u64 = 1000;
/// Added to the seed for the single retry of a failed statistical check.
pub const RETRY_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;
/// Acceptance threshold in standard errors.
pub const Z_THRESHOLD: f64 = 4.0;
/// Tolerance on `max |(U*U − I)_ij|` and `max |U − Uᵀ|`.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("sampled matrix violates the {what} tolerance: deviation {deviation:e}")]
    Tolerance { what: &'static str, deviation: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub k: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub twist: Twist,
    pub ensemble: Ensemble,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigWarning {
    /// A cycle of a long-cycle twist has length `≤ 2k`; the exact moment does not apply.
    ShortTwistCycle { twist: Twist, length: usize, k: usize },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::ShortTwistCycle { twist, length, k } => write!(
                f,
                "warning: {twist} twist has a cycle of length {length} <= 2k = {}; \
                 the long-cycle hypothesis is violated, exact reference withheld",
                2 * k
            ),
        }
    }
}

impl SampleConfig {
    /// Rejects unusable configurations and reports hypothesis violations as warnings.
    pub fn validate(&self) -> Result<Vec<ConfigWarning>, McError> {
        if self.k == 0 {
            return Err(McError::InvalidConfig("k must be at least 1".into()));
        }
        if self.samples < 2 {
            return Err(McError::InvalidConfig("at least 2 samples are needed for a standard error".into()));
        }
        let p = self.twist.permutation(self.n)?;
        let mut warnings = Vec::new();
        if matches!(self.twist, Twist::Grand | Twist::TwoCycle | Twist::Stride) {
            let shortest = cycle_lengths(&p)[0];
            if shortest <= 2 * self.k {
                warnings.push(ConfigWarning::ShortTwistCycle { twist: self.twist, length: shortest, k: self.k });
            }
        }
        Ok(warnings)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub reference: Option<f64>,
    pub z_score: Option<f64>,
}

impl EstimateReport {
    pub fn passes(&self) -> bool {
        self.z_score.is_none_or(|z| z.abs() < Z_THRESHOLD)
    }

    pub const CSV_HEADER: &'static str = "ensemble,twist,k,n,samples,seed,mean,std_error,reference,z";

    pub fn csv_row(&self, cfg: &SampleConfig) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            cfg.ensemble,
            cfg.twist,
            cfg.k,
            cfg.n,
            self.samples,
            cfg.seed,
            self.mean,
            self.std_error,
            opt(self.reference),
            opt(self.z_score)
        )
    }
}

/// Haar unitary from the QR decomposition of a complex Gaussian matrix, with the
/// phases of `diag(R)` moved into `Q`.
pub fn sample_haar_unitary(n: usize, rng: &mut impl rand::Rng) -> DMatrix<C64> {
    assert!(n >= 1, "matrix size must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let z = DMatrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * scale, im * scale)
        });
        let qr = z.qr();
        let r = qr.r();
        if (0..n).any(|j| r[(j, j)].norm() == 0.0) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..n {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        return q;
    }
}

/// COE matrix `V Vᵀ` with `V` Haar.
pub fn sample_coe(n: usize, rng: &mut impl rand::Rng) -> DMatrix<C64> {
    let v = sample_haar_unitary(n, rng);
    &v * v.transpose()
}

pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let n = u.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (g[(i, j)] - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max)
}

pub fn symmetry_deviation(u: &DMatrix<C64>) -> f64 {
    (u - u.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Tr((P U)^k)` where `(P U)_{ij} = U_{p(i), j}`.
pub fn twisted_trace_power(u: &DMatrix<C64>, p: &[usize], k: usize) -> C64 {
    let n = u.nrows();
    let pu = DMatrix::from_fn(n, n, |i, j| u[(p[i], j)]);
    let mut acc = pu.clone();
    for _ in 1..k {
        acc = &acc * &pu;
    }
    acc.trace()
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Welford { count, mean, m2 }
    }

    fn std_error(&self) -> f64 {
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

fn block_stats(cfg: &SampleConfig, p: &[usize], block: u64) -> Result<Welford, McError> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block);
    let len = BLOCK.min(cfg.samples - block * BLOCK);
    let mut acc = Welford::default();
    for i in 0..len {
        let u = match cfg.ensemble {
            Ensemble::Coe => sample_coe(cfg.n, &mut rng),
            Ensemble::Cue => sample_haar_unitary(cfg.n, &mut rng),
        };
        if i == 0 {
            let dev = unitarity_deviation(&u);
            if dev > TOLERANCE {
                return Err(McError::Tolerance { what: "unitarity", deviation: dev });
            }
            if cfg.ensemble == Ensemble::Coe {
                let dev = symmetry_deviation(&u);
                if dev > TOLERANCE {
                    return Err(McError::Tolerance { what: "symmetry", deviation: dev });
                }
            }
        }
        acc.push(twisted_trace_power(&u, p, cfg.k).norm_sqr());
    }
    Ok(acc)
}

/// `⟨|Tr U^k|²⟩` over COE(N): `2k − k Σ_{m=1}^k 1/(m + (N−1)/2)`, valid for `k < N`.
pub fn coe_untwisted_reference(k: usize, n: usize) -> BigRational {
    let k_big = BigInt::from(k);
    let sum: BigRational = (1..=k).map(|m| BigRational::new(BigInt::from(2), BigInt::from(2 * m + n - 1))).sum();
    BigRational::from_integer(BigInt::from(2) * &k_big) - BigRational::from_integer(k_big) * sum
}

/// The exact value the estimator should converge to, when one is known.
pub fn exact_reference(cfg: &SampleConfig) -> Result<Option<BigRational>, McError> {
    let p = cfg.twist.permutation(cfg.n)?;
    let (k, n) = (cfg.k, cfg.n);
    match cfg.ensemble {
        Ensemble::Cue => Ok(Some(BigRational::from_integer(BigInt::from(k.min(n))))),
        Ensemble::Coe => match cfg.twist {
            Twist::Identity | Twist::Involution => Ok((k < n).then(|| coe_untwisted_reference(k, n))),
            Twist::Grand | Twist::TwoCycle | Twist::Stride => {
                if cycle_lengths(&p)[0] <= 2 * k || k > DEFAULT_MAX_K {
                    return Ok(None);
                }
                let table = coe_table(k).map_err(MomentError::from)?;
                let opts = EnumOptions { coset_speedup: true, ..Default::default() };
                let report = coe_moment(k, &table, 1, &opts)?;
                Ok(Some(evaluate_moment(&report, n as i64)?))
            }
        },
    }
}

/// Estimates without a reference; deterministic in `cfg`.
pub fn estimate(cfg: &SampleConfig) -> Result<EstimateReport, McError> {
    cfg.validate()?;
    let p = cfg.twist.permutation(cfg.n)?;
    let blocks = cfg.samples.div_ceil(BLOCK);
    let stats: Vec<Welford> =
        (0..blocks).into_par_iter().map(|b| block_stats(cfg, &p, b)).collect::<Result<_, _>>()?;
    let total = stats.into_iter().fold(Welford::default(), Welford::merge);
    Ok(EstimateReport { mean: total.mean, std_error: total.std_error(), samples: total.count, reference: None, z_score: None })
}

pub fn with_reference(mut report: EstimateReport, reference: Option<f64>) -> EstimateReport {
    report.reference = reference;
    report.z_score = reference.map(|r| (report.mean - r) / report.std_error);
    report
}

/// Empirical `⟨|Tr(P U)^k|²⟩` with the exact reference and z-score filled in when known.
pub fn empirical_moment(cfg: &SampleConfig) -> Result<EstimateReport, McError> {
    let report = estimate(cfg)?;
    let reference = exact_reference(cfg)?.and_then(|r| r.to_f64());
    Ok(with_reference(report, reference))
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub first: EstimateReport,
    /// Present when the first run missed the threshold; uses `seed + RETRY_SEED_OFFSET`.
    pub retry: Option<EstimateReport>,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn last(&self) -> &EstimateReport {
        self.retry.as_ref().unwrap_or(&self.first)
    }
}

/// `empirical_moment` with one retry on a fresh seed if the first run misses `4·SE`.
pub fn checked_moment(cfg: &SampleConfig) -> Result<CheckOutcome, McError> {
    let first = empirical_moment(cfg)?;
    if first.passes() {
        return Ok(CheckOutcome { first, retry: None, passed: true });
    }
    let retry_cfg = SampleConfig { seed: cfg.seed.wrapping_add(RETRY_SEED_OFFSET), ..cfg.clone() };
    let retry = empirical_moment(&retry_cfg)?;
    let passed = retry.passes();
    Ok(CheckOutcome { first, retry: Some(retry), passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    pub k: usize,
    pub n: usize,
    pub twisted: EstimateReport,
    pub untwisted: EstimateReport,
    pub difference: f64,
    pub combined_se: f64,
    pub passed: bool,
}

/// Compares the involution-twisted and untwisted COE moments, which agree because
/// `U ↦ P U P` preserves COE for an orthogonal involution `P`. The untwisted run uses
/// `seed + 1` so the two estimates are independent. One retry with
/// `seed + RETRY_SEED_OFFSET` is made on failure.
pub fn involution_check(k: usize, n: usize, samples: u64, seed: u64) -> Result<InvolutionReport, McError> {
    if n % 2 != 0 {
        return Err(McError::InvalidConfig(format!("involution check needs even N, got {n}")));
    }
    let run = |seed: u64| -> Result<InvolutionReport, McError> {
        let cfg = |twist, seed| SampleConfig { k, n, samples, seed, twist, ensemble: Ensemble::Coe };
        let twisted = empirical_moment(&cfg(Twist::Involution, seed))?;
        let untwisted = empirical_moment(&cfg(Twist::Identity, seed.wrapping_add(1)))?;
        let difference = twisted.mean - untwisted.mean;
        let combined_se = twisted.std_error.hypot(untwisted.std_error);
        let passed = difference.abs() < Z_THRESHOLD * combined_se && twisted.passes() && untwisted.passes();
        Ok(InvolutionReport { k, n, twisted, untwisted, difference, combined_se, passed })
    };
    let first = run(seed)?;
    if first.passed {
        return Ok(first);
    }
    run(seed.wrapping_add(RETRY_SEED_OFFSET))
}
