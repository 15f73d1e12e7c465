//! Random assignment of N objects to H equiprobable words: the classical
//! occupancy problem used as the baseline for converged lexicons.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::lexicon::{VerbalizationMatrix, WordId};
use crate::measures::accuracy_report;

/// Largest N and H accepted by [`exact_unused_distribution`].
pub const EXACT_BOUND: usize = 200;

/// Exact distribution of the number `m` of unused words, `m = 0..=H`.
///
/// Probabilities are kept as integer numerators over the common denominator
/// `H^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyDistribution {
    n_objects: usize,
    n_words: usize,
    numerators: Vec<BigUint>,
    denominator: BigUint,
    probabilities: Vec<f64>,
}

impl OccupancyDistribution {
    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    /// `P_m` for `m = 0..=H`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, m: usize) -> f64 {
        self.probabilities.get(m).copied().unwrap_or(0.0)
    }

    /// Number of the `H^N` assignments leaving exactly `m` words unused.
    pub fn numerator(&self, m: usize) -> &BigUint {
        &self.numerators[m]
    }

    /// `H^N`.
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn exact_probability(&self, m: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerators[m].clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn exact_mean(&self) -> BigRational {
        let weighted = self
            .numerators
            .iter()
            .enumerate()
            .fold(BigUint::zero(), |acc, (m, p)| acc + p * BigUint::from(m));
        BigRational::new(BigInt::from(weighted), BigInt::from(self.denominator.clone()))
    }

    /// Mean number of unused words.
    pub fn mean(&self) -> f64 {
        self.exact_mean().to_f64().unwrap_or(f64::NAN)
    }

    /// Expected communication error `1 - (H - <m>)/N` of a random assignment.
    pub fn expected_error(&self) -> f64 {
        1.0 - (self.n_words as f64 - self.mean()) / self.n_objects as f64
    }

    /// Total variation distance to a Poisson law over `m >= 0`.
    pub fn total_variation(&self, limit: &PoissonLimit) -> f64 {
        let mut diff = 0.0;
        let mut covered = 0.0;
        for (m, &p) in self.probabilities.iter().enumerate() {
            let q = limit.pmf(m);
            diff += (p - q).abs();
            covered += q;
        }
        0.5 * (diff + (1.0 - covered).max(0.0))
    }
}

/// Exact `P_m` through surjection counts: `C(H, m) * (H-m)! * S(N, H-m) / H^N`,
/// with Stirling numbers of the second kind from their recurrence.
pub fn exact_unused_distribution(n_objects: usize, n_words: usize) -> Result<OccupancyDistribution> {
    if n_objects == 0 || n_words == 0 {
        return Err(Error::config("N and H must be at least 1"));
    }
    if n_objects > EXACT_BOUND || n_words > EXACT_BOUND {
        return Err(Error::ExactBound {
            n_objects,
            n_words,
            bound: EXACT_BOUND,
        });
    }
    let h = n_words;

    // stirling[k] = S(n, k) for the current n; S(0, 0) = 1.
    let mut stirling = vec![BigUint::zero(); h + 1];
    stirling[0] = BigUint::one();
    for n in 1..=n_objects {
        for k in (1..=h.min(n)).rev() {
            let carried = std::mem::take(&mut stirling[k]) * BigUint::from(k);
            stirling[k] = carried + &stirling[k - 1];
        }
        stirling[0] = BigUint::zero();
    }

    // binom[m] = C(H, m); falling[k] = k!
    let mut binom = Vec::with_capacity(h + 1);
    let mut c = BigUint::one();
    for m in 0..=h {
        binom.push(c.clone());
        c = c * BigUint::from(h - m) / BigUint::from(m + 1);
    }
    let mut factorial = Vec::with_capacity(h + 1);
    let mut f = BigUint::one();
    for k in 0..=h {
        if k > 0 {
            f *= BigUint::from(k);
        }
        factorial.push(f.clone());
    }

    let numerators: Vec<BigUint> = (0..=h)
        .map(|m| {
            let used = h - m;
            &binom[m] * &factorial[used] * &stirling[used]
        })
        .collect();
    let denominator = BigUint::from(h).pow(n_objects as u32);
    debug_assert_eq!(numerators.iter().sum::<BigUint>(), denominator);

    let probabilities = numerators
        .iter()
        .map(|p| {
            BigRational::new(BigInt::from(p.clone()), BigInt::from(denominator.clone()))
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect();

    Ok(OccupancyDistribution {
        n_objects,
        n_words,
        numerators,
        denominator,
        probabilities,
    })
}

/// Poisson law with `lambda = H exp(-N/H)`, the large-size limit of the
/// unused-word distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonLimit {
    lambda: f64,
}

impl PoissonLimit {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        Ok(PoissonLimit { lambda })
    }

    pub fn from_sizes(n_objects: usize, n_words: usize) -> Result<Self> {
        if n_words == 0 {
            return Err(Error::config("H must be at least 1"));
        }
        let h = n_words as f64;
        Self::new(h * (-(n_objects as f64) / h).exp())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `e^-lambda lambda^m / m!`, evaluated in log space.
    pub fn pmf(&self, m: usize) -> f64 {
        (-self.lambda + m as f64 * self.lambda.ln() - ln_factorial(m as u64)).exp()
    }
}

/// Poisson-limit probability of `m` unused words.
pub fn poisson_limit(m: usize, n_objects: usize, n_words: usize) -> Result<f64> {
    Ok(PoissonLimit::from_sizes(n_objects, n_words)?.pmf(m))
}

/// Large-size error of a random assignment at ratio `alpha = H/N`:
/// `1 - alpha + alpha e^(-1/alpha)`.
pub fn asymptotic_error(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - alpha + alpha * (-1.0 / alpha).exp())
}

/// Exact finite-size error of a random assignment, from
/// `<m> = H (1 - 1/H)^N`.
pub fn exact_expected_error(n_objects: usize, n_words: usize) -> Result<f64> {
    if n_objects == 0 || n_words == 0 {
        return Err(Error::config("N and H must be at least 1"));
    }
    let (n, h) = (n_objects as f64, n_words as f64);
    let unused = h * (n * (-1.0 / h).ln_1p()).exp();
    Ok(1.0 - (h - unused) / n)
}

/// Error of one uniformly random object-to-word assignment.
pub fn random_assignment_sample<R: Rng + ?Sized>(
    n_objects: usize,
    n_words: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_objects == 0 || n_words == 0 {
        return Err(Error::config("N and H must be at least 1"));
    }
    let words: Vec<WordId> = (0..n_objects)
        .map(|_| WordId(rng.random_range(0..n_words)))
        .collect();
    let matrix = VerbalizationMatrix::from_assignment(&words, n_words, 1)?;
    Ok(accuracy_report(&matrix)?.error_f64())
}
