//! Calibration of the jump parameters to near-the-money implied volatilities
//! across dates, with the unobserved spot volatility eliminated per date.
//!
//! For each date the quote closest to the money, `σ̂*` at maturity `t*`, fixes
//! the spot volatility `σ₀` through `σ̂* = σ₀ + K(t*)σ₀^{1−Y}` with
//! `K(t) = (C₊ + C₋)2^{−Y/2}Γ(1 − Y/2)t^{1−Y/2}/(Y(Y − 1))`. The remaining
//! near-the-money quotes of that date are then fitted by
//! `σ̂(t) = σ₀ + K(t)σ₀^{1−Y}`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::asymptotics::mixed_iv_factor;
use crate::error::{Error, Result};

/// Spot volatilities at or below this are rejected as implying a pure-jump market.
pub const MIN_SPOT_VOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketQuote {
    pub date: String,
    pub maturity: f64,
    pub log_moneyness: f64,
    pub implied_vol: f64,
    #[serde(default = "unit_weight", deserialize_with = "weight_or_default")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

fn weight_or_default<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let raw: Option<f64> = Option::deserialize(d)?;
    Ok(raw.unwrap_or(1.0))
}

impl MarketQuote {
    pub fn new(date: &str, maturity: f64, log_moneyness: f64, implied_vol: f64, weight: f64) -> Result<Self> {
        let q = Self {
            date: date.to_string(),
            maturity,
            log_moneyness,
            implied_vol,
            weight,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::InvalidParameter(format!("maturity must be positive, got {}", self.maturity)));
        }
        if !(self.implied_vol > 0.0 && self.implied_vol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "implied vol must be positive, got {}",
                self.implied_vol
            )));
        }
        if !(self.weight >= 0.0 && self.weight.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight must be non-negative, got {}", self.weight)));
        }
        if !self.log_moneyness.is_finite() {
            return Err(Error::InvalidParameter("log-moneyness must be finite".into()));
        }
        Ok(())
    }
}

/// Which root of the spot-volatility equation to take when there are two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpotVolRoot {
    /// The smaller root, below the minimiser of the right-hand side.
    #[default]
    Smallest,
    /// The larger root, which tends to `σ̂*` as `t → 0`.
    Largest,
}

/// `K(t)` such that the implied vol is `σ₀ + K(t)σ₀^{1−Y}`.
pub fn iv_correction_factor(c_plus: f64, c_minus: f64, y: f64, t: f64) -> f64 {
    if c_plus + c_minus == 0.0 {
        return 0.0;
    }
    mixed_iv_factor(c_plus + c_minus, y) * t.powf(1.0 - 0.5 * y)
}

/// `σ₀ + K(t)σ₀^{1−Y}`.
pub fn model_implied_vol(spot_vol: f64, t: f64, c_plus: f64, c_minus: f64, y: f64) -> f64 {
    spot_vol + iv_correction_factor(c_plus, c_minus, y, t) * spot_vol.powf(1.0 - y)
}

/// Smallest positive `σ₀` with `iv_star = σ₀ + K(t)σ₀^{1−Y}`.
pub fn solve_spot_vol(iv_star: f64, t: f64, c_plus: f64, c_minus: f64, y: f64) -> Result<f64> {
    solve_spot_vol_with(iv_star, t, c_plus, c_minus, y, SpotVolRoot::Smallest)
}

/// Like [`solve_spot_vol`] with an explicit choice of root.
pub fn solve_spot_vol_with(iv_star: f64, t: f64, c_plus: f64, c_minus: f64, y: f64, root: SpotVolRoot) -> Result<f64> {
    if !(iv_star > 0.0 && iv_star.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need positive implied vol and maturity, got {iv_star}, {t}")));
    }
    if !(c_plus >= 0.0 && c_minus >= 0.0 && y > 1.0 && y < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "invalid jump parameters C+ = {c_plus}, C- = {c_minus}, Y = {y}"
        )));
    }
    let k = iv_correction_factor(c_plus, c_minus, y, t);
    if k == 0.0 {
        return Ok(iv_star);
    }
    let f = |s: f64| s + k * s.powf(1.0 - y) - iv_star;
    let turning = ((y - 1.0) * k).powf(1.0 / y);
    if turning >= iv_star || f(turning) > 0.0 {
        return Err(Error::InfeasibleQuote(format!(
            "implied vol {iv_star} at t = {t} is below the minimum {} reachable with these jump parameters",
            turning + k * turning.powf(1.0 - y)
        )));
    }
    let (mut lo, mut hi) = match root {
        SpotVolRoot::Smallest => {
            let mut lo = 0.5 * turning;
            while f(lo) <= 0.0 {
                lo *= 0.5;
                if lo < f64::MIN_POSITIVE {
                    return Err(Error::InfeasibleQuote("no root above zero".into()));
                }
            }
            (lo, turning)
        }
        SpotVolRoot::Largest => (turning, iv_star),
    };
    // f changes sign between lo and hi; bisect geometrically then arithmetically
    for _ in 0..400 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let positive = f(mid) > 0.0;
        match (root, positive) {
            (SpotVolRoot::Smallest, true) | (SpotVolRoot::Largest, false) => lo = mid,
            _ => hi = mid,
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Calibration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    /// Bounds on each of `C₊`, `C₋`.
    pub c_bounds: (f64, f64),
    pub y_bounds: (f64, f64),
    /// A quote is near the money when `|κ| ≤ factor · σ̂* · √t`.
    pub moneyness_factor: f64,
    pub root: SpotVolRoot,
    pub max_iterations: usize,
    /// Stop once the simplex's objective spread falls below this.
    pub f_tol: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            c_bounds: (1e-4, 10.0),
            y_bounds: (1.05, 1.95),
            moneyness_factor: 0.5,
            root: SpotVolRoot::Smallest,
            max_iterations: 4000,
            f_tol: 1e-20,
        }
    }
}

/// Starting point `(C₊ + C₋, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub c_total: f64,
    pub y: f64,
}

impl Default for InitialGuess {
    fn default() -> Self {
        Self { c_total: 1.0, y: 1.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub c_plus: f64,
    pub c_minus: f64,
    pub y: f64,
    /// `(date, σ₀)` in date order.
    pub spot_vols: Vec<(String, f64)>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl fmt::Display for CalibrationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "C+ = {}, C- = {}, Y = {}", self.c_plus, self.c_minus, self.y)?;
        writeln!(
            f,
            "objective = {:e} after {} iterations ({})",
            self.objective,
            self.iterations,
            if self.converged { "converged" } else { "not converged" }
        )?;
        for (date, s) in &self.spot_vols {
            writeln!(f, "  {date}: spot vol {s}")?;
        }
        Ok(())
    }
}

struct DateGroup<'a> {
    date: &'a str,
    anchor: &'a MarketQuote,
    others: Vec<&'a MarketQuote>,
}

fn group_quotes<'a>(quotes: &'a [MarketQuote], cfg: &CalibrationConfig) -> Result<Vec<DateGroup<'a>>> {
    let mut by_date: BTreeMap<&str, Vec<&MarketQuote>> = BTreeMap::new();
    for q in quotes {
        q.validate()?;
        by_date.entry(q.date.as_str()).or_default().push(q);
    }
    if by_date.is_empty() {
        return Err(Error::InvalidParameter("no quotes to calibrate".into()));
    }
    let mut groups = Vec::with_capacity(by_date.len());
    for (date, qs) in by_date {
        let anchor = *qs
            .iter()
            .min_by(|a, b| {
                a.log_moneyness
                    .abs()
                    .total_cmp(&b.log_moneyness.abs())
                    .then(a.maturity.total_cmp(&b.maturity))
            })
            .expect("group is non-empty");
        let others: Vec<&MarketQuote> = qs
            .into_iter()
            .filter(|q| !std::ptr::eq(*q, anchor))
            .filter(|q| q.log_moneyness.abs() <= cfg.moneyness_factor * anchor.implied_vol * q.maturity.sqrt())
            .collect();
        if others.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "date {date} needs at least two near-the-money quotes"
            )));
        }
        groups.push(DateGroup { date, anchor, others });
    }
    Ok(groups)
}

fn objective_and_spots(groups: &[DateGroup<'_>], c_total: f64, y: f64, root: SpotVolRoot) -> Result<(f64, Vec<f64>)> {
    let (cp, cm) = (0.5 * c_total, 0.5 * c_total);
    let mut total = 0.0;
    let mut spots = Vec::with_capacity(groups.len());
    for g in groups {
        let spot = solve_spot_vol_with(g.anchor.implied_vol, g.anchor.maturity, cp, cm, y, root)?;
        if spot <= MIN_SPOT_VOL {
            return Err(Error::InfeasibleQuote(format!(
                "date {}: spot vol {spot} implies a pure-jump market",
                g.date
            )));
        }
        for q in &g.others {
            let r = model_implied_vol(spot, q.maturity, cp, cm, y) - q.implied_vol;
            total += q.weight * r * r;
        }
        spots.push(spot);
    }
    Ok((total, spots))
}

/// Weighted sum of squared implied-vol errors at `(C₊ + C₋, Y)`.
pub fn calibration_objective(quotes: &[MarketQuote], c_total: f64, y: f64, cfg: &CalibrationConfig) -> Result<f64> {
    let groups = group_quotes(quotes, cfg)?;
    objective_and_spots(&groups, c_total, y, cfg.root).map(|(v, _)| v)
}

/// Fit `(C₊ + C₋, Y)` shared by all dates. Only the sum of the intensities
/// enters the expansion, so it is split evenly between `C₊` and `C₋`.
pub fn calibrate(quotes: &[MarketQuote], cfg: &CalibrationConfig, guess: InitialGuess) -> Result<CalibrationResult> {
    let groups = group_quotes(quotes, cfg)?;
    let lower = [(2.0 * cfg.c_bounds.0).ln(), cfg.y_bounds.0];
    let upper = [(2.0 * cfg.c_bounds.1).ln(), cfg.y_bounds.1];
    if !(lower[0] < upper[0] && lower[1] < upper[1] && cfg.y_bounds.0 > 1.0 && cfg.y_bounds.1 < 2.0) {
        return Err(Error::InvalidParameter("calibration bounds are empty or leave (1, 2)".into()));
    }
    let project = |x: [f64; 2]| [x[0].clamp(lower[0], upper[0]), x[1].clamp(lower[1], upper[1])];
    let eval = |x: [f64; 2]| -> f64 {
        match objective_and_spots(&groups, x[0].exp(), x[1], cfg.root) {
            Ok((v, _)) => v,
            // infeasible anchors are a wall for the simplex, not a failure
            Err(_) => f64::INFINITY,
        }
    };
    let start = project([guess.c_total.max(f64::MIN_POSITIVE).ln(), guess.y]);
    let (best, iterations, converged) = nelder_mead(eval, project, start, [0.2, 0.05], cfg.max_iterations, cfg.f_tol);
    let (objective, spots) = objective_and_spots(&groups, best[0].exp(), best[1], cfg.root)?;
    let c_total = best[0].exp();
    Ok(CalibrationResult {
        c_plus: 0.5 * c_total,
        c_minus: 0.5 * c_total,
        y: best[1],
        spot_vols: groups.iter().map(|g| g.date.to_string()).zip(spots).collect(),
        objective,
        converged,
        iterations,
    })
}

/// Two-dimensional Nelder–Mead with every trial point projected into the box.
fn nelder_mead<F, P>(f: F, project: P, start: [f64; 2], step: [f64; 2], max_iter: usize, f_tol: f64) -> ([f64; 2], usize, bool)
where
    F: Fn([f64; 2]) -> f64,
    P: Fn([f64; 2]) -> [f64; 2],
{
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    simplex.push((start, f(start)));
    for d in 0..2 {
        let mut x = start;
        x[d] += step[d];
        let mut x = project(x);
        if x == start {
            x[d] = start[d] - step[d];
            x = project(x);
        }
        simplex.push((x, f(x)));
    }
    let lin = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for iter in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[2].1);
        let size = (0..2)
            .map(|d| (simplex[1].0[d] - simplex[0].0[d]).abs().max((simplex[2].0[d] - simplex[0].0[d]).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= f_tol || (best.is_finite() && size < 1e-12) {
            return (simplex[0].0, iter, best.is_finite());
        }
        let centroid = lin(simplex[0].0, simplex[1].0, 0.5);
        let worst_x = simplex[2].0;
        let reflected = project(lin(centroid, worst_x, -1.0));
        let fr = f(reflected);
        if fr < simplex[0].1 {
            let expanded = project(lin(centroid, worst_x, -2.0));
            let fe = f(expanded);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[2].1 {
                project(lin(centroid, reflected, 0.5))
            } else {
                project(lin(centroid, worst_x, 0.5))
            };
            let fc = f(contracted);
            if fc < simplex[2].1.min(fr) {
                simplex[2] = (contracted, fc);
            } else {
                let anchor = simplex[0].0;
                for vertex in simplex.iter_mut().skip(1) {
                    let x = project(lin(anchor, vertex.0, 0.5));
                    *vertex = (x, f(x));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, max_iter, false)
}

/// Read quotes from CSV with header `date,maturity,log_moneyness,implied_vol,weight`.
/// An empty weight means 1.
pub fn read_quotes<R: Read>(reader: R) -> Result<Vec<MarketQuote>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for required in ["date", "maturity", "log_moneyness", "implied_vol"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Parse(format!("quote file lacks column `{required}`")));
        }
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let q: MarketQuote = row?;
        q.validate()?;
        out.push(q);
    }
    Ok(out)
}

/// One CSV row per date: `date,spot_vol,c_plus,c_minus,y,objective,converged`.
pub fn write_result<W: Write>(result: &CalibrationResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "spot_vol", "c_plus", "c_minus", "y", "objective", "converged"])?;
    for (date, spot) in &result.spot_vols {
        w.write_record([
            date.clone(),
            spot.to_string(),
            result.c_plus.to_string(),
            result.c_minus.to_string(),
            result.y.to_string(),
            result.objective.to_string(),
            result.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
