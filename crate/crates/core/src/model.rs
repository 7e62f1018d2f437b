//! CGMY and general tempered-stable-like exponential Lévy models.
//!
//! Log-returns follow `X_t = b t + σW_t + L_t` with truncation function
//! `1_{|x|≤1}` and Lévy density
//! `s(x) = |x|^{-Y-1} (C₊ q̄(x) 1_{x>0} + C₋ q̄(x) 1_{x<0})`.
//! Interest rates and dividends are zero, so `E e^{X_1} = 1` pins down `b`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::mathkit::{adaptive_quad, adaptive_quad_graded, complex_pow, exp_m1_m_x, gamma_real, DEFAULT_ABS_TOL};

/// Parameters `(C, G, M, Y, σ)` of the CGMY model with an optional Brownian part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgmyParams {
    c: f64,
    g: f64,
    m: f64,
    y: f64,
    sigma: f64,
}

impl CgmyParams {
    pub fn new(c: f64, g: f64, m: f64, y: f64, sigma: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
        }
        Self::checked(c, g, m, y, sigma)
    }

    /// Like [`CgmyParams::new`] but accepts `C = 0`, the pure Black–Scholes limit.
    #[doc(hidden)]
    pub fn degenerate(c: f64, g: f64, m: f64, y: f64, sigma: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be non-negative, got {c}")));
        }
        Self::checked(c, g, m, y, sigma)
    }

    fn checked(c: f64, g: f64, m: f64, y: f64, sigma: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("G must be positive, got {g}")));
        }
        if !(m > 1.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("M must exceed 1 for E e^X to exist, got {m}")));
        }
        if !(y > 1.0 && y < 2.0) {
            return Err(Error::InvalidParameter(format!("Y must lie in (1, 2), got {y}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
        }
        Ok(Self { c, g, m, y, sigma })
    }

    /// Build from a key=value map with keys `C`, `G`, `M`, `Y`, `sigma` (`sigma` defaults to 0).
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| -> Result<f64> {
            let raw = map.get(k).ok_or_else(|| Error::Parse(format!("missing model key `{k}`")))?;
            parse_f64(k, raw)
        };
        let sigma = match map.get("sigma") {
            Some(raw) => parse_f64("sigma", raw)?,
            None => 0.0,
        };
        Self::new(get("C")?, get("G")?, get("M")?, get("Y")?, sigma)
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_pure_jump(&self) -> bool {
        self.sigma == 0.0
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::checked(self.c, self.g, self.m, self.y, sigma)
    }

    /// `CΓ(−Y)`, the common factor of every closed form.
    pub(crate) fn c_gamma(&self) -> f64 {
        self.c * gamma_real(-self.y).expect("Y in (1,2) is not a pole")
    }

    /// The same model as a [`TemperedStableSpec`] with `q̄(x) = e^{−Mx}` for
    /// `x > 0` and `e^{Gx}` for `x < 0`.
    pub fn to_spec(&self) -> TemperedStableSpec {
        let (m, g) = (self.m, self.g);
        TemperedStableSpec {
            c_plus: self.c,
            c_minus: self.c,
            big_m: m,
            big_g: g,
            y: self.y,
            sigma: self.sigma,
            qbar: Arc::new(move |x: f64| if x > 0.0 { (-m * x).exp() } else { (g * x).exp() }),
        }
    }
}

/// A general tempered-stable-like model described by its tempering function.
#[derive(Clone)]
pub struct TemperedStableSpec {
    pub(crate) c_plus: f64,
    pub(crate) c_minus: f64,
    pub(crate) big_m: f64,
    pub(crate) big_g: f64,
    pub(crate) y: f64,
    pub(crate) sigma: f64,
    pub(crate) qbar: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for TemperedStableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TemperedStableSpec")
            .field("c_plus", &self.c_plus)
            .field("c_minus", &self.c_minus)
            .field("big_m", &self.big_m)
            .field("big_g", &self.big_g)
            .field("y", &self.y)
            .field("sigma", &self.sigma)
            .finish_non_exhaustive()
    }
}

/// Step used to probe the slopes of `q̄` at the origin.
const SLOPE_PROBE: f64 = 1e-6;

impl TemperedStableSpec {
    /// Validate parameters and probe `q̄` on a grid.
    ///
    /// `q̄` must satisfy `q̄(x) ≤ 1` for `x < 0`, `q̄(x) ≤ e^{−x}` for `x > 0`,
    /// and `(1 − q̄(x))/x` must approach `M` from the right and `−G` from the
    /// left.
    pub fn new<Q>(c_plus: f64, c_minus: f64, big_m: f64, big_g: f64, y: f64, sigma: f64, qbar: Q) -> Result<Self>
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let spec = Self::new_unchecked(c_plus, c_minus, big_m, big_g, y, sigma, qbar)?;
        spec.check_qbar()?;
        Ok(spec)
    }

    /// Validate scalar parameters only; `q̄` is taken on trust.
    #[doc(hidden)]
    pub fn new_unchecked<Q>(c_plus: f64, c_minus: f64, big_m: f64, big_g: f64, y: f64, sigma: f64, qbar: Q) -> Result<Self>
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(c_plus > 0.0 && c_plus.is_finite() && c_minus > 0.0 && c_minus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "intensities must be positive, got C+ = {c_plus}, C- = {c_minus}"
            )));
        }
        if !(y > 1.0 && y < 2.0) {
            return Err(Error::InvalidParameter(format!("Y must lie in (1, 2), got {y}")));
        }
        if !(big_m > 1.0 && big_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("M must exceed 1, got {big_m}")));
        }
        if !(big_g > 0.0 && big_g.is_finite()) {
            return Err(Error::InvalidParameter(format!("G must be positive, got {big_g}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
        }
        Ok(Self {
            c_plus,
            c_minus,
            big_m,
            big_g,
            y,
            sigma,
            qbar: Arc::new(qbar),
        })
    }

    fn check_qbar(&self) -> Result<()> {
        let q = &self.qbar;
        for k in 0..=60 {
            let x = 10f64.powf(-4.0 + 6.0 * k as f64 / 60.0);
            let (right, left) = (q(x), q(-x));
            if !(right.is_finite() && left.is_finite()) {
                return Err(Error::InvalidParameter(format!("q̄ is not finite near ±{x}")));
            }
            if right > (-x).exp() * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!("q̄({x}) = {right} exceeds e^(-x)")));
            }
            if left > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter(format!("q̄({}) = {left} exceeds 1", -x)));
            }
        }
        let h = SLOPE_PROBE;
        let slope_right = (1.0 - q(h)) / h;
        let slope_left = (1.0 - q(-h)) / -h;
        if (slope_right - self.big_m).abs() > 1e-3 * (1.0 + self.big_m) {
            return Err(Error::InvalidParameter(format!(
                "(1 - q̄(x))/x -> {slope_right} at 0+, expected M = {}",
                self.big_m
            )));
        }
        if (slope_left + self.big_g).abs() > 1e-3 * (1.0 + self.big_g) {
            return Err(Error::InvalidParameter(format!(
                "(1 - q̄(x))/x -> {slope_left} at 0-, expected -G = {}",
                -self.big_g
            )));
        }
        Ok(())
    }

    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }
    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }
    pub fn big_m(&self) -> f64 {
        self.big_m
    }
    pub fn big_g(&self) -> f64 {
        self.big_g
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn qbar(&self, x: f64) -> f64 {
        (self.qbar)(x)
    }

    /// Same tempering, intensities multiplied by `factor`.
    pub fn scale_intensities(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.c_plus *= factor;
        out.c_minus *= factor;
        if !(out.c_plus > 0.0 && out.c_minus > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("intensity factor must be positive, got {factor}")));
        }
        Ok(out)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
        }
        let mut out = self.clone();
        out.sigma = sigma;
        Ok(out)
    }
}

/// Constants of the changes of measure to the share measure and to the
/// measure under which the jumps are stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureChangeConstants {
    pub m_star: f64,
    pub g_star: f64,
    pub eta: f64,
    pub gamma_tilde: f64,
    pub drift_c: f64,
    pub drift_b: f64,
}

/// `c = −CΓ(−Y)((M−1)^Y + (G+1)^Y − M^Y − G^Y) − σ²/2`.
pub fn martingale_drift(p: &CgmyParams) -> f64 {
    let y = p.y;
    -p.c_gamma() * ((p.m - 1.0).powf(y) + (p.g + 1.0).powf(y) - p.m.powf(y) - p.g.powf(y)) - 0.5 * p.sigma * p.sigma
}

/// `E e^{iuX_t}`, defined for `Im u ∈ (−M, G)`.
pub fn char_function(p: &CgmyParams, t: f64, u: Complex64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    if !(u.im > -p.m && u.im < p.g) {
        return Err(Error::Domain(format!(
            "Im(u) = {} outside the strip (-M, G) = ({}, {})",
            u.im, -p.m, p.g
        )));
    }
    let i = Complex64::i();
    let y = p.y;
    let jumps = complex_pow(p.m - i * u, y)? + complex_pow(p.g + i * u, y)? - p.m.powf(y) - p.g.powf(y);
    let exponent = i * martingale_drift(p) * u - 0.5 * p.sigma * p.sigma * u * u + p.c_gamma() * jumps;
    Ok((t * exponent).exp())
}

/// CGMY Lévy density at `x ≠ 0`.
pub fn levy_density(p: &CgmyParams, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("Lévy density undefined at {x}")));
    }
    let tilt = if x > 0.0 { (-p.m * x).exp() } else { (p.g * x).exp() };
    Ok(p.c * tilt * x.abs().powf(-1.0 - p.y))
}

/// Upper incomplete gamma `Γ(1−Y, x)` for `Y ∈ (1, 2)`, by one step of the
/// recurrence from `Γ(2−Y, x)`.
fn upper_gamma_one_minus_y(y: f64, x: f64) -> f64 {
    let a = 1.0 - y;
    let upper_next = gamma_ur(a + 1.0, x) * gamma_real(a + 1.0).expect("2 - Y in (0,1)");
    (upper_next - x.powf(a) * (-x).exp()) / a
}

/// Closed-form CGMY drift `b` under the truncation `1_{|x|≤1}`.
fn cgmy_drift_b(p: &CgmyParams) -> f64 {
    let y = p.y;
    // ∫_{|x|>1} x ν(dx)
    let big_jump_mean = p.c
        * (p.m.powf(y - 1.0) * upper_gamma_one_minus_y(y, p.m) - p.g.powf(y - 1.0) * upper_gamma_one_minus_y(y, p.g));
    martingale_drift(p) - big_jump_mean - y * p.c_gamma() * (p.m.powf(y - 1.0) - p.g.powf(y - 1.0))
}

/// `M*`, `G*`, `η`, `γ̃` and the drifts `c`, `b` of a CGMY model.
pub fn measure_constants(p: &CgmyParams) -> MeasureChangeConstants {
    let y = p.y;
    let cg = p.c_gamma();
    let m_star = p.m - 1.0;
    let g_star = p.g + 1.0;
    MeasureChangeConstants {
        m_star,
        g_star,
        eta: cg * (m_star.powf(y) + g_star.powf(y)),
        gamma_tilde: -cg * (m_star.powf(y) + g_star.powf(y) - p.m.powf(y) - p.g.powf(y)) + 0.5 * p.sigma * p.sigma,
        drift_c: martingale_drift(p),
        drift_b: cgmy_drift_b(p),
    }
}

/// `(e^x − 1)·q` for `x ≥ 0` without forming `∞ · 0` when `e^x` overflows.
pub(crate) fn tilted_excess(x: f64, q: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else if x < 700.0 {
        x.exp_m1() * q
    } else {
        let half = (0.5 * x).exp();
        (q * half) * half - q
    }
}

/// `b = −σ²/2 − ∫(e^x − 1 − x 1_{|x|≤1}) s(x) dx`, by quadrature.
pub fn general_drift_b(spec: &TemperedStableSpec) -> Result<f64> {
    let y = spec.y;
    let q = &spec.qbar;
    let power = 1.0 / (2.0 - y);
    let tol = DEFAULT_ABS_TOL;
    // small jumps behave like x^{1-Y}/2 at the origin
    let small_pos = adaptive_quad_graded(|x| exp_m1_m_x(x) * q(x) * x.powf(-y - 1.0), 0.0, 1.0, tol, power)?;
    let small_neg = adaptive_quad_graded(|x| exp_m1_m_x(-x) * q(-x) * x.powf(-y - 1.0), 0.0, 1.0, tol, power)?;
    let big_pos = adaptive_quad(|x| tilted_excess(x, q(x)) * x.powf(-y - 1.0), 1.0, f64::INFINITY, tol, true)?;
    let big_neg = adaptive_quad(|x| (-x).exp_m1() * q(-x) * x.powf(-y - 1.0), 1.0, f64::INFINITY, tol, true)?;
    let integral = spec.c_plus * (small_pos + big_pos) + spec.c_minus * (small_neg + big_neg);
    Ok(-0.5 * spec.sigma * spec.sigma - integral)
}

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got `{line}`", n + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", n + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub(crate) fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("`{key}`: cannot parse `{raw}` as a number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base() -> CgmyParams {
        CgmyParams::new(0.5, 2.0, 3.6, 1.5, 0.0).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(CgmyParams::new(0.0, 2.0, 3.6, 1.5, 0.0).is_err());
        assert!(CgmyParams::new(0.5, 2.0, 1.0, 1.5, 0.0).is_err());
        assert!(CgmyParams::new(0.5, 2.0, 3.6, 2.0, 0.0).is_err());
        assert!(CgmyParams::new(0.5, 2.0, 3.6, 1.5, -0.1).is_err());
        assert!(CgmyParams::degenerate(0.0, 2.0, 3.6, 1.5, 0.2).is_ok());
    }

    #[test]
    fn drift_degenerate_and_oracle() {
        let p = CgmyParams::degenerate(0.0, 2.0, 3.6, 1.5, 0.3).unwrap();
        assert!((martingale_drift(&p) + 0.045).abs() < 1e-15);
        // mpmath, 40 digits
        assert!((martingale_drift(&base()) - 0.319_538_475_214_359_451_5).abs() < 1e-12);
    }

    #[test]
    fn char_function_values() {
        let p = base();
        assert_eq!(char_function(&p, 0.1, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let mart = char_function(&p, 1.0, Complex64::new(0.0, -1.0)).unwrap();
        assert!((mart - 1.0).norm() < 1e-10);
        let v = char_function(&p, 0.1, Complex64::new(1.0, 0.0)).unwrap();
        let oracle = Complex64::new(0.946_026_120_710_613_641_79, -0.049_474_797_364_639_410_869);
        assert!((v - oracle).norm() < 1e-12);
        assert!(v.norm() <= 1.0);
    }

    #[test]
    fn char_function_rejects_strip_violation() {
        let p = base();
        assert!(matches!(char_function(&p, 1.0, Complex64::new(0.0, -3.6)), Err(Error::Domain(_))));
        assert!(matches!(char_function(&p, 1.0, Complex64::new(1.0, 2.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn levy_density_values() {
        let p = CgmyParams::new(1.0, 1.0, 1.0 + 1e-15, 1.5, 0.0).unwrap();
        assert!((levy_density(&p, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        let sym = CgmyParams::new(0.7, 2.5, 2.5, 1.3, 0.0).unwrap();
        for x in [0.01, 0.3, 2.0, 7.0] {
            assert_eq!(levy_density(&sym, x).unwrap(), levy_density(&sym, -x).unwrap());
        }
        assert!(levy_density(&sym, 0.0).is_err());
    }

    #[test]
    fn levy_mass_outside_window() {
        let p = base();
        let f = |x: f64| levy_density(&p, x).unwrap() + levy_density(&p, -x).unwrap();
        let mass = adaptive_quad(f, 0.1, f64::INFINITY, 1e-11, false).unwrap();
        assert!((mass - 12.196_245_271_252_547_613).abs() < 1e-9);
    }

    #[test]
    fn measure_constants_oracle() {
        let k = measure_constants(&base());
        assert_eq!(k.m_star, 2.6);
        assert_eq!(k.g_star, 3.0);
        assert!((k.eta - 11.093_819_909_239_991_879).abs() < 1e-11);
        assert!((k.gamma_tilde - 0.319_538_475_214_359_451_5).abs() < 1e-12);
        assert_eq!(k.gamma_tilde, k.drift_c);
        assert!((k.drift_b + 0.518_351_231_349_389_528_84).abs() < 1e-12);
    }

    #[test]
    fn gamma_tilde_and_drift_differ_by_variance() {
        let p = CgmyParams::new(0.8, 3.0, 3.0, 1.7, 0.25).unwrap();
        let k = measure_constants(&p);
        assert!((k.gamma_tilde - martingale_drift(&p) - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn general_b_matches_closed_form() {
        for p in [base(), CgmyParams::new(1.0, 5.0, 1.5, 1.8, 0.2).unwrap()] {
            let b = general_drift_b(&p.to_spec()).unwrap();
            assert!((b - measure_constants(&p).drift_b).abs() < 1e-8, "{b}");
        }
    }

    #[test]
    fn general_b_is_linear_in_intensity() {
        let spec = CgmyParams::new(0.5, 2.0, 3.6, 1.5, 0.3).unwrap().to_spec();
        let base = general_drift_b(&spec).unwrap() + 0.045;
        let doubled = general_drift_b(&spec.scale_intensities(2.0).unwrap()).unwrap() + 0.045;
        assert!((doubled - 2.0 * base).abs() < 1e-9);
        let tiny = general_drift_b(&spec.scale_intensities(1e-6).unwrap()).unwrap() + 0.045;
        assert!((tiny - 1e-6 * base).abs() < 1e-12);
    }

    #[test]
    fn spec_validation_probes_qbar() {
        let ok = TemperedStableSpec::new(1.0, 1.0, 2.0, 3.0, 1.5, 0.0, |x: f64| {
            if x > 0.0 { (-2.0 * x).exp() } else { (3.0 * x).exp() }
        });
        assert!(ok.is_ok());
        // slope at 0+ inconsistent with M
        let bad_slope = TemperedStableSpec::new(1.0, 1.0, 5.0, 3.0, 1.5, 0.0, |x: f64| {
            if x > 0.0 { (-2.0 * x).exp() } else { (3.0 * x).exp() }
        });
        assert!(bad_slope.is_err());
        // violates q̄ ≤ e^{-x}
        let bad_bound = TemperedStableSpec::new(1.0, 1.0, 2.0, 3.0, 1.5, 0.0, |x: f64| {
            if x > 0.0 { (-2.0 * x).exp() * (1.0 + 3.0 * x * x) } else { (3.0 * x).exp() }
        });
        assert!(bad_bound.is_err());
    }

    #[test]
    fn key_value_parsing() {
        let map = parse_key_values("# model\nC = 0.5\nG=2\n\nM=3.6 # right\nY=1.5\n").unwrap();
        let p = CgmyParams::from_key_values(&map).unwrap();
        assert_eq!(p, base());
        assert!(parse_key_values("C 0.5").is_err());
        let mut map = map;
        map.insert("Y".into(), "abc".into());
        assert!(matches!(CgmyParams::from_key_values(&map), Err(Error::Parse(_))));
    }

    fn params() -> impl Strategy<Value = CgmyParams> {
        (0.05f64..2.0, 0.2f64..8.0, 1.1f64..10.0, 1.05f64..1.95, 0.0f64..0.6)
            .prop_map(|(c, g, m, y, s)| CgmyParams::new(c, g, m, y, s).unwrap())
    }

    proptest! {
        #[test]
        fn char_function_bounded(p in params(), t in 0.001f64..2.0, u in -200.0f64..200.0) {
            let v = char_function(&p, t, Complex64::new(u, 0.0)).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn char_function_is_levy(p in params(), t in 0.01f64..1.0, s in 0.01f64..1.0, u in -20.0f64..20.0) {
            let u = Complex64::new(u, 0.0);
            let lhs = char_function(&p, t + s, u).unwrap();
            let rhs = char_function(&p, t, u).unwrap() * char_function(&p, s, u).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn char_function_conjugate(p in params(), t in 0.01f64..1.0, u in -50.0f64..50.0) {
            let a = char_function(&p, t, Complex64::new(-u, 0.0)).unwrap();
            let b = char_function(&p, t, Complex64::new(u, 0.0)).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-13);
        }

        #[test]
        fn martingale_identity(p in params()) {
            let v = char_function(&p, 1.0, Complex64::new(0.0, -1.0)).unwrap();
            prop_assert!((v - 1.0).norm() < 1e-10);
        }

        #[test]
        fn eta_positive_and_density_nonnegative(p in params(), x in -20.0f64..20.0) {
            prop_assert!(measure_constants(&p).eta > 0.0);
            prop_assume!(x != 0.0);
            prop_assert!(levy_density(&p, x).unwrap() >= 0.0);
        }
    }

    #[test]
    fn levy_measure_integrates_min_one_x2() {
        let p = base();
        let f = |x: f64| (x * x).min(1.0) * (levy_density(&p, x).unwrap() + levy_density(&p, -x).unwrap());
        let v = adaptive_quad(f, 0.0, f64::INFINITY, 1e-9, true).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
