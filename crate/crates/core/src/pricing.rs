//! Reference pricers: Black–Scholes, implied volatility, Fourier inversion
//! against a Black–Scholes control, and Monte Carlo under the stable-limit
//! measure. Model prices are per unit spot at zero rates.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::mathkit::{gamma_real, norm_cdf, norm_pdf, simpson_integrate, QuadratureGrid, SimpsonWeights};
use crate::model::{char_function, measure_constants, CgmyParams};
use crate::stable::{rng_stream, sample_stable, StableParamsSsf};

/// Black–Scholes call at zero rates.
pub fn bs_call(s0: f64, k_strike: f64, sigma: f64, t: f64) -> f64 {
    let total_vol = sigma * t.sqrt();
    if total_vol <= 0.0 {
        return (s0 - k_strike).max(0.0);
    }
    if s0 == k_strike {
        // N(v/2) − N(−v/2) without cancellation
        return s0 * erf(total_vol / (2.0 * SQRT_2));
    }
    let d1 = (s0 / k_strike).ln() / total_vol + 0.5 * total_vol;
    s0 * norm_cdf(d1) - k_strike * norm_cdf(d1 - total_vol)
}

fn bs_vega(s0: f64, k_strike: f64, sigma: f64, t: f64) -> f64 {
    let total_vol = sigma * t.sqrt();
    let d1 = (s0 / k_strike).ln() / total_vol + 0.5 * total_vol;
    s0 * norm_pdf(d1) * t.sqrt()
}

const IV_MAX_ITER: usize = 200;

/// Black–Scholes implied volatility by Newton steps safeguarded with bisection.
pub fn implied_vol(price: f64, s0: f64, k_strike: f64, t: f64) -> Result<f64> {
    if !(s0 > 0.0 && k_strike > 0.0 && t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "implied vol needs positive spot, strike and maturity, got s0 = {s0}, k = {k_strike}, t = {t}"
        )));
    }
    let intrinsic = (s0 - k_strike).max(0.0);
    if !(price > intrinsic && price < s0) {
        return Err(Error::Domain(format!(
            "price {price} outside the no-arbitrage range ({intrinsic}, {s0})"
        )));
    }
    let tol = 1e-12 * price.clamp(1e-300, 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    while bs_call(s0, k_strike, hi, t) < price {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Accuracy {
                what: "implied vol bracket search",
                achieved: bs_call(s0, k_strike, hi, t),
                requested: price,
            });
        }
    }
    let mut sigma = if s0 == k_strike {
        // ATM: invert the leading term price ≈ s0 σ √(t/2π)
        (price / s0 * (2.0 * PI / t).sqrt()).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..IV_MAX_ITER {
        let diff = bs_call(s0, k_strike, sigma, t) - price;
        if diff.abs() <= tol {
            return Ok(sigma);
        }
        if diff > 0.0 {
            hi = sigma;
        } else {
            lo = sigma;
        }
        let vega = if sigma > 0.0 { bs_vega(s0, k_strike, sigma, t) } else { 0.0 };
        let newton = sigma - diff / vega;
        sigma = if vega > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(sigma);
        }
    }
    Err(Error::Accuracy {
        what: "implied vol iteration",
        achieved: (bs_call(s0, k_strike, sigma, t) - price).abs(),
        requested: tol,
    })
}

/// Settings of the Fourier pricer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IftConfig {
    /// Number of grid nodes `P` (even, ≥ 8 so the halved grid used for the error estimate is valid).
    pub p_points: usize,
    /// Width `Q` of the frequency window `[−Q/2, Q/2]`.
    pub q_range: f64,
    /// Volatility `Σ` of the Black–Scholes control.
    pub control_vol: f64,
    pub weights: SimpsonWeights,
}

impl Default for IftConfig {
    fn default() -> Self {
        Self {
            p_points: 1 << 14,
            q_range: 800.0,
            control_vol: 0.2,
            weights: SimpsonWeights::Verbatim,
        }
    }
}

impl IftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_points < 8 || !self.p_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "p_points must be even and at least 8, got {}",
                self.p_points
            )));
        }
        if !(self.q_range > 0.0 && self.q_range.is_finite()) {
            return Err(Error::InvalidParameter(format!("q_range must be positive, got {}", self.q_range)));
        }
        if !(self.control_vol > 0.0 && self.control_vol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "control_vol must be positive, got {}",
                self.control_vol
            )));
        }
        Ok(())
    }
}

/// Tail mass above which [`IftPrice::warning`] is raised.
pub const IFT_TAIL_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IftPrice {
    pub price: f64,
    /// Grid-halving difference plus the estimated truncated tail.
    pub error_estimate: f64,
    /// Estimated `(1/2π)∫_{|v|>Q/2}|ζ|`, from a power-law fit over the last decade of nodes.
    pub tail_mass: f64,
    /// Set when the tail mass exceeds [`IFT_TAIL_WARNING`].
    pub warning: bool,
}

fn zeta(p: &CgmyParams, t: f64, control_vol: f64, v: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let shifted = Complex64::new(v, -1.0);
    let model = char_function(p, t, shifted)?;
    let control = (-0.5 * control_vol * control_vol * t * Complex64::new(v * v, -v)).exp();
    Ok((model - control) / (i * v * (1.0 + i * v)))
}

fn ift_sum(p: &CgmyParams, t: f64, cfg: &IftConfig, n_points: usize) -> Result<f64> {
    let grid = QuadratureGrid::centered(cfg.q_range, n_points, cfg.weights)?;
    // Im(v − i) = −1 always lies in the strip, so a failure here can only be non-finite output
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let integral = simpson_integrate(|v| zeta(p, t, cfg.control_vol, v).unwrap_or(nan), &grid)?;
    Ok(integral.re / (2.0 * PI))
}

fn ift_tail_mass(p: &CgmyParams, t: f64, cfg: &IftConfig) -> Result<f64> {
    let b = 0.5 * cfg.q_range;
    let a = 0.1 * b;
    let (za, zb) = (zeta(p, t, cfg.control_vol, a)?.norm(), zeta(p, t, cfg.control_vol, b)?.norm());
    if zb == 0.0 {
        return Ok(0.0);
    }
    let decay = (za / zb).ln() / (b / a).ln();
    if decay <= 1.0 {
        return Ok(f64::INFINITY);
    }
    // two symmetric tails of A v^{−k}
    Ok(2.0 * zb * b / (decay - 1.0) / (2.0 * PI))
}

/// ATM call price (per unit spot) by Fourier inversion with a Black–Scholes control.
pub fn price_ift(p: &CgmyParams, t: f64, cfg: &IftConfig) -> Result<IftPrice> {
    cfg.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("maturity must be positive, got {t}")));
    }
    let control = bs_call(1.0, 1.0, cfg.control_vol, t);
    let fine = ift_sum(p, t, cfg, cfg.p_points)?;
    let coarse_points = (cfg.p_points / 2) & !1;
    let coarse = ift_sum(p, t, cfg, coarse_points)?;
    let tail_mass = ift_tail_mass(p, t, cfg)?;
    Ok(IftPrice {
        price: control + fine,
        error_estimate: (fine - coarse).abs() + tail_mass,
        tail_mass,
        warning: !(tail_mass <= IFT_TAIL_WARNING),
    })
}

/// Settings of the Monte Carlo pricer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: u64,
    pub seed: u64,
    /// Pair each normal draw with its negative (the stable draws are shared).
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            seed: 42,
            antithetic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPrice {
    pub price: f64,
    pub std_error: f64,
}

/// Paths per RNG sub-stream; fixed so results do not depend on the thread count.
const MC_CHUNK: u64 = 8192;

/// ATM call price (per unit spot) by Monte Carlo under the measure that makes
/// the jumps stable:
/// `Ẽ[e^{−M*U − G*V − ηT}(1 − e^{−(U − V) − Tγ̃ − σW_T})⁺]`
/// with `U`, `V` independent totally skewed Y-stable variates.
pub fn price_mc(p: &CgmyParams, t: f64, cfg: &McConfig) -> Result<McPrice> {
    if cfg.n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("maturity must be positive, got {t}")));
    }
    let k = measure_constants(p);
    let y = p.y();
    let scale = (t * p.c() * gamma_real(-y)? * (0.5 * PI * y).cos().abs()).powf(1.0 / y);
    let one_sided = StableParamsSsf::new(y, scale, 1.0, 0.0)?;
    let drift = t * k.gamma_tilde;
    let vol = p.sigma() * t.sqrt();
    let log_weight_shift = k.eta * t;

    let payoff = |u: f64, v: f64, z: f64| -> f64 {
        let weight = (-k.m_star * u - k.g_star * v - log_weight_shift).exp();
        let x = u - v + drift + vol * z;
        weight * (-(-x).exp_m1()).max(0.0)
    };

    let n_chunks = cfg.n_paths.div_ceil(MC_CHUNK);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng_stream(cfg.seed, chunk);
            let count = MC_CHUNK.min(cfg.n_paths - chunk * MC_CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let u = sample_stable(&one_sided, &mut rng);
                let v = sample_stable(&one_sided, &mut rng);
                let z: f64 = if vol > 0.0 { StandardNormal.sample(&mut rng) } else { 0.0 };
                let sample = if cfg.antithetic {
                    0.5 * (payoff(u, v, z) + payoff(u, v, -z))
                } else {
                    payoff(u, v, z)
                };
                sum += sample;
                sum_sq += sample * sample;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let n = cfg.n_paths as f64;
    let mean = sum / n;
    let var = if cfg.n_paths > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    if !mean.is_finite() {
        return Err(Error::NonFinite { at: t, value: mean });
    }
    Ok(McPrice {
        price: mean,
        std_error: (var / n).sqrt(),
    })
}
