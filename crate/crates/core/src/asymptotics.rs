//! Second-order short-maturity expansions of ATM call prices and implied
//! volatilities.
//!
//! Pure-jump models (`σ = 0`): `C(t)/S₀ = d₁t^{1/Y} + d₂t + o(t)`.
//! Mixed models (`σ > 0`): `C(t)/S₀ = d₁t^{1/2} + d₂t^{(3−Y)/2} + o(t^{(3−Y)/2})`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::mathkit::{adaptive_quad, adaptive_quad_graded, exp_m1_m_x, gamma_real, DEFAULT_ABS_TOL};
use crate::model::{general_drift_b, tilted_excess, CgmyParams, TemperedStableSpec};
use crate::stable::{positive_part_mean, positive_prob, StableLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    PureJump,
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PureJump => "pure_jump",
            Regime::Mixed => "mixed",
        })
    }
}

/// `d₁t^{exp1} + d₂t^{exp2}` (price per unit spot).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceExpansion {
    pub d1: f64,
    pub exp1: f64,
    pub d2: f64,
    pub exp2: f64,
    pub regime: Regime,
}

impl PriceExpansion {
    /// `d₁t^{exp1}`.
    pub fn first_order(&self, t: f64) -> f64 {
        self.d1 * t.powf(self.exp1)
    }

    /// `d₁t^{exp1} + d₂t^{exp2}`.
    pub fn second_order(&self, t: f64) -> f64 {
        self.first_order(t) + self.d2 * t.powf(self.exp2)
    }
}

/// `σ̂(t) ≈ s₁t^{exp1} + s₂t^{exp2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvExpansion {
    pub s1: f64,
    pub exp1: f64,
    pub s2: f64,
    pub exp2: f64,
    pub regime: Regime,
}

impl IvExpansion {
    pub fn eval(&self, t: f64) -> f64 {
        self.s1 * t.powf(self.exp1) + self.s2 * t.powf(self.exp2)
    }
}

/// What the expansions need to know about a model.
pub trait ExpansionModel {
    fn y(&self) -> f64;
    fn sigma(&self) -> f64;
    fn c_plus(&self) -> f64;
    fn c_minus(&self) -> f64;
    /// `ϑ̃ + γ̃ P̃(Z₁ ≥ 0)`, the pure-jump second-order coefficient.
    fn pure_jump_d2(&self) -> Result<f64>;

    fn stable_law(&self) -> Result<StableLaw> {
        StableLaw::new(self.y(), self.c_plus(), self.c_minus())
    }
}

impl ExpansionModel for CgmyParams {
    fn y(&self) -> f64 {
        CgmyParams::y(self)
    }
    fn sigma(&self) -> f64 {
        CgmyParams::sigma(self)
    }
    fn c_plus(&self) -> f64 {
        self.c()
    }
    fn c_minus(&self) -> f64 {
        self.c()
    }
    fn pure_jump_d2(&self) -> Result<f64> {
        Ok(d2_closed_form(self))
    }
}

impl ExpansionModel for TemperedStableSpec {
    fn y(&self) -> f64 {
        TemperedStableSpec::y(self)
    }
    fn sigma(&self) -> f64 {
        TemperedStableSpec::sigma(self)
    }
    fn c_plus(&self) -> f64 {
        TemperedStableSpec::c_plus(self)
    }
    fn c_minus(&self) -> f64 {
        TemperedStableSpec::c_minus(self)
    }
    fn pure_jump_d2(&self) -> Result<f64> {
        d2_numeric(self)
    }
}

/// Below this distance from the origin the integrands are replaced by their
/// leading power law, since `1 − q̄(x)` is pure rounding noise there.
const NEAR_ORIGIN: f64 = 1e-8;

/// `∫₀¹ f`, where `f(x) ~ lead · x^{1−Y}` at the origin.
fn unit_integral<F: Fn(f64) -> f64>(f: F, lead: f64, y: f64, cutoff: f64, tol: f64) -> Result<f64> {
    let head = lead * cutoff.powf(2.0 - y) / (2.0 - y);
    Ok(head + adaptive_quad_graded(f, cutoff, 1.0, tol, 1.0 / (2.0 - y))?)
}

/// `∫₀^∞ (e^x q̄(x) − q̄(x) − x) x^{−Y−1} dx`.
fn integral_plus(spec: &TemperedStableSpec, cutoff: f64, tol: f64) -> Result<f64> {
    let y = spec.y;
    let q = &spec.qbar;
    // (e^x − 1)q̄ − x = (e^x − 1 − x)q̄ − x(1 − q̄) ~ (1/2 − M)x²
    let near = |x: f64| {
        let qx = q(x);
        (exp_m1_m_x(x) * qx - x * (1.0 - qx)) * x.powf(-y - 1.0)
    };
    let head = unit_integral(near, 0.5 - spec.big_m, y, cutoff, tol)?;
    // the −x part of the tail is ∫₁^∞ x^{−Y} = 1/(Y − 1)
    let tail = adaptive_quad(|x| tilted_excess(x, q(x)) * x.powf(-y - 1.0), 1.0, f64::INFINITY, tol, true)?;
    Ok(head + tail - 1.0 / (y - 1.0))
}

/// `∫_{−∞}^0 (e^x q̄(x) − q̄(x) − x) |x|^{−Y−1} dx`.
fn integral_minus(spec: &TemperedStableSpec, cutoff: f64, tol: f64) -> Result<f64> {
    let y = spec.y;
    let q = &spec.qbar;
    // with x = −v: (e^{−v} − 1 + v)q̄(−v) + v(1 − q̄(−v)) ~ (1/2 + G)v²
    let near = |v: f64| {
        let qv = q(-v);
        (exp_m1_m_x(-v) * qv + v * (1.0 - qv)) * v.powf(-y - 1.0)
    };
    let head = unit_integral(near, 0.5 + spec.big_g, y, cutoff, tol)?;
    let tail = adaptive_quad(|v| (-v).exp_m1() * q(-v) * v.powf(-y - 1.0), 1.0, f64::INFINITY, tol, true)?;
    Ok(head + tail + 1.0 / (y - 1.0))
}

/// The two integrals of the combined second-order formula:
/// `(∫₀^∞ …, ∫_{−∞}^0 …)` of `(e^x q̄ − q̄ − x)|x|^{−Y−1}`.
pub fn combined_integrals(spec: &TemperedStableSpec) -> Result<(f64, f64)> {
    Ok((
        integral_plus(spec, NEAR_ORIGIN, DEFAULT_ABS_TOL)?,
        integral_minus(spec, NEAR_ORIGIN, DEFAULT_ABS_TOL)?,
    ))
}

/// `ϑ̃ = C₊ ∫₀^∞ (e^x q̄(x) − q̄(x) − x) x^{−Y−1} dx`.
pub fn vartheta_tilde_numeric(spec: &TemperedStableSpec) -> Result<f64> {
    Ok(spec.c_plus * integral_plus(spec, NEAR_ORIGIN, DEFAULT_ABS_TOL)?)
}

fn gamma_tilde_with(spec: &TemperedStableSpec, cutoff: f64, tol: f64) -> Result<f64> {
    let y = spec.y;
    let q = &spec.qbar;
    let b = general_drift_b(spec)?;
    let right = unit_integral(|x| x.powf(-y) * (1.0 - q(x)), spec.big_m, y, cutoff, tol)?;
    let left = unit_integral(|v| v.powf(-y) * (1.0 - q(-v)), spec.big_g, y, cutoff, tol)?;
    // σ² turns b into the share-measure drift b*; it vanishes in the pure-jump case
    Ok(b + spec.sigma * spec.sigma + (spec.c_plus - spec.c_minus) / (y - 1.0) + spec.c_plus * right
        - spec.c_minus * left)
}

/// `γ̃ = Ẽ(X₁)` from the drift `b` and the tempering function.
pub fn gamma_tilde_numeric(spec: &TemperedStableSpec) -> Result<f64> {
    gamma_tilde_with(spec, NEAR_ORIGIN, DEFAULT_ABS_TOL)
}

/// CGMY pure-jump `d₂ = (CΓ(−Y)/2)((M−1)^Y − M^Y − (G+1)^Y + G^Y)`.
pub fn d2_closed_form(p: &CgmyParams) -> f64 {
    let y = p.y();
    0.5 * p.c_gamma() * ((p.m() - 1.0).powf(y) - p.m().powf(y) - (p.g() + 1.0).powf(y) + p.g().powf(y))
}

/// Pure-jump `d₂ = ϑ̃ + γ̃ P̃(Z₁ ≥ 0)` by quadrature.
pub fn d2_numeric(spec: &TemperedStableSpec) -> Result<f64> {
    let p = positive_prob(&spec.stable_law()?);
    Ok(vartheta_tilde_numeric(spec)? + gamma_tilde_numeric(spec)? * p)
}

/// Pure-jump `d₂ = C₊P̃(Z₁<0)·I₊ − C₋P̃(Z₁≥0)·I₋`, which bypasses `b` and `γ̃`.
pub fn d2_combined(spec: &TemperedStableSpec) -> Result<f64> {
    let p = positive_prob(&spec.stable_law()?);
    let (plus, minus) = combined_integrals(spec)?;
    Ok(spec.c_plus * (1.0 - p) * plus - spec.c_minus * p * minus)
}

/// First- and second-order coefficients for `σ = 0`.
pub fn pure_jump_coeffs<M: ExpansionModel>(model: &M) -> Result<PriceExpansion> {
    if model.sigma() != 0.0 {
        return Err(Error::Regime(format!(
            "pure-jump expansion needs sigma = 0, got {}",
            model.sigma()
        )));
    }
    let y = model.y();
    Ok(PriceExpansion {
        d1: positive_part_mean(&model.stable_law()?),
        exp1: 1.0 / y,
        d2: model.pure_jump_d2()?,
        exp2: 1.0,
        regime: Regime::PureJump,
    })
}

/// `(C₊ + C₋)2^{−Y/2}Γ(1 − Y/2)/(Y(Y − 1))`, so that the mixed implied-vol
/// correction is this times `σ^{1−Y} t^{1−Y/2}`.
pub fn mixed_iv_factor(c_total: f64, y: f64) -> f64 {
    c_total * 2f64.powf(-0.5 * y) * gamma_real(1.0 - 0.5 * y).expect("1 - Y/2 in (0, 1/2)") / (y * (y - 1.0))
}

/// First- and second-order coefficients for `σ > 0`.
pub fn mixed_coeffs<M: ExpansionModel>(model: &M) -> Result<PriceExpansion> {
    let sigma = model.sigma();
    if !(sigma > 0.0) {
        return Err(Error::Regime("mixed expansion needs sigma > 0".into()));
    }
    let y = model.y();
    let c_total = model.c_plus() + model.c_minus();
    let d2 = 2f64.powf(0.5 * (1.0 - y)) / PI.sqrt() * gamma_real(1.0 - 0.5 * y)? * c_total * sigma.powf(1.0 - y)
        / (2.0 * y * (y - 1.0));
    Ok(PriceExpansion {
        d1: sigma / (2.0 * PI).sqrt(),
        exp1: 0.5,
        d2,
        exp2: 0.5 * (3.0 - y),
        regime: Regime::Mixed,
    })
}

/// Pure-jump or mixed coefficients according to `σ`.
pub fn price_expansion<M: ExpansionModel>(model: &M) -> Result<PriceExpansion> {
    if model.sigma() == 0.0 {
        pure_jump_coeffs(model)
    } else {
        mixed_coeffs(model)
    }
}

/// `s₀(d₁t^{exp1} + d₂t^{exp2})`.
pub fn price_expansion_eval(exp: &PriceExpansion, t: f64, s0: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("maturity must be positive, got {t}")));
    }
    Ok(s0 * exp.second_order(t))
}

/// Implied-volatility expansion.
pub fn iv_expansion<M: ExpansionModel>(model: &M) -> Result<IvExpansion> {
    let root = (2.0 * PI).sqrt();
    let y = model.y();
    if model.sigma() == 0.0 {
        let e = pure_jump_coeffs(model)?;
        Ok(IvExpansion {
            s1: root * e.d1,
            exp1: 1.0 / y - 0.5,
            s2: root * e.d2,
            exp2: 0.5,
            regime: Regime::PureJump,
        })
    } else {
        let sigma = model.sigma();
        Ok(IvExpansion {
            s1: sigma,
            exp1: 0.0,
            s2: mixed_iv_factor(model.c_plus() + model.c_minus(), y) * sigma.powf(1.0 - y),
            exp2: 1.0 - 0.5 * y,
            regime: Regime::Mixed,
        })
    }
}
