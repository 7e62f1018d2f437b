//! The strictly Y-stable limit law of the small-time jump part, and
//! Chambers–Mallows–Stuck sampling.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01};

use crate::error::{Error, Result};
use crate::mathkit::gamma_real;

/// Strictly Y-stable law with Lévy density `|x|^{-Y-1}(C₊1_{x>0} + C₋1_{x<0})`
/// and zero mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableLaw {
    y: f64,
    c_plus: f64,
    c_minus: f64,
}

/// α-stable parameters in the `S_α(scale, skew, location)` convention with
/// characteristic exponent
/// `−scale^α |u|^α (1 − i·skew·sign(u) tan(πα/2)) + i·location·u` (α ≠ 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParamsSsf {
    alpha: f64,
    scale: f64,
    skew: f64,
    location: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl StableLaw {
    pub fn new(y: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        if !(y > 1.0 && y < 2.0) {
            return Err(Error::InvalidParameter(format!("stable index must lie in (1, 2), got {y}")));
        }
        if !(c_plus > 0.0 && c_minus > 0.0 && c_plus.is_finite() && c_minus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stable intensities must be positive, got C+ = {c_plus}, C- = {c_minus}"
            )));
        }
        Ok(Self { y, c_plus, c_minus })
    }

    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }
    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }

    /// `(C₊ − C₋)/(C₊ + C₋)`.
    pub fn skew(&self) -> f64 {
        (self.c_plus - self.c_minus) / (self.c_plus + self.c_minus)
    }

    /// Sampling parameters of `Z_t`: `scale^Y = t(C₊ + C₋)Γ(−Y)|cos(πY/2)|`.
    pub fn ssf_at(&self, t: f64) -> Result<StableParamsSsf> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        let y = self.y;
        let scale_pow = t * (self.c_plus + self.c_minus) * gamma_real(-y)? * (FRAC_PI_2 * y).cos().abs();
        StableParamsSsf::new(y, scale_pow.powf(1.0 / y), self.skew(), 0.0)
    }
}

impl StableParamsSsf {
    pub fn new(alpha: f64, scale: f64, skew: f64, location: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if !(skew.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("skew must lie in [-1, 1], got {skew}")));
        }
        if !location.is_finite() {
            return Err(Error::InvalidParameter(format!("location must be finite, got {location}")));
        }
        Ok(Self {
            alpha,
            scale,
            skew,
            location,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn skew(&self) -> f64 {
        self.skew
    }
    pub fn location(&self) -> f64 {
        self.location
    }
}

/// `Ẽ(Z₁⁺)` for the law, valid for any `C₊, C₋ > 0`.
pub fn positive_part_mean(law: &StableLaw) -> f64 {
    let y = law.y;
    let tan = (FRAC_PI_2 * y).tan();
    let theta = law.skew() * tan;
    let total = law.c_plus + law.c_minus;
    let gamma_neg = gamma_real(-y).expect("Y in (1,2)");
    let gamma_inv = gamma_real(1.0 - 1.0 / y).expect("1 - 1/Y in (0, 1/2)");
    (total * gamma_neg * (FRAC_PI_2 * y).cos().abs()).powf(1.0 / y) * gamma_inv / PI
        * (1.0 + theta * theta).powf(0.5 / y)
        * (theta.atan() / y).cos()
}

/// `P̃(Z₁ ≥ 0) = 1/2 + arctan(skew · tan(πY/2))/(πY)`.
pub fn positive_prob(law: &StableLaw) -> f64 {
    0.5 + (law.skew() * (FRAC_PI_2 * law.y).tan()).atan() / (PI * law.y)
}

/// Leading tail `(C±/Y) v^{−Y}` of `P(±Z₁ ≥ v)`.
pub fn tail_asymptote(law: &StableLaw, v: f64, side: Side) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("tail level must be positive, got {v}")));
    }
    let c = match side {
        Side::Positive => law.c_plus,
        Side::Negative => law.c_minus,
    };
    Ok(c / law.y * v.powf(-law.y))
}

/// Independent generator for sub-stream `stream` of a master `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One Chambers–Mallows–Stuck variate.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParamsSsf, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let w: f64 = Exp1.sample(rng);
    cms_transform(params, PI * (u - 0.5), w)
}

/// The CMS map from `V ~ U(−π/2, π/2)` and `W ~ Exp(1)`.
pub fn cms_transform(params: &StableParamsSsf, v: f64, w: f64) -> f64 {
    let StableParamsSsf {
        alpha,
        scale,
        skew,
        location,
    } = *params;
    if alpha == 1.0 {
        let shifted = FRAC_PI_2 + skew * v;
        let x = (shifted * v.tan() - skew * ((FRAC_PI_2 * w * v.cos()) / shifted).ln()) / FRAC_PI_2;
        return scale * x + skew * scale * scale.ln() / FRAC_PI_2 + location;
    }
    let tan = (FRAC_PI_2 * alpha).tan();
    let b = (skew * tan).atan() / alpha;
    let s = (1.0 + skew * skew * tan * tan).powf(0.5 / alpha);
    let x = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
    scale * x + location
}
