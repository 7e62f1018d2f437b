//! Command-line front end. All tabular output is CSV.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::asymptotics::{iv_expansion, price_expansion, PriceExpansion};
use crate::calibration::{calibrate, read_quotes, write_result, CalibrationConfig, InitialGuess, SpotVolRoot};
use crate::error::{Error, Result};
use crate::model::{parse_key_values, CgmyParams};
use crate::pricing::{implied_vol, price_ift, price_mc, IftConfig, McConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LEVY_ATM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "levy-atm", version, about = "ATM option prices and implied vols under tempered-stable Lévy models")]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of key=value lines, one per flag; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expansion coefficients d1, d2 and s1, s2.
    Coeffs(ModelArgs),
    /// Price one ATM call.
    Price {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        pricer: PricerArgs,
    },
    /// Implied vols along a maturity grid, next to the expansion.
    Ivol {
        #[command(flatten)]
        model: ModelArgs,
        /// `start:stop:count`, log-spaced.
        #[arg(long, value_parser = parse_t_grid)]
        t_grid: TGrid,
        #[arg(long, default_value = "ift")]
        method: Method,
        #[command(flatten)]
        pricer: PricerArgs,
    },
    /// Compare pricers across maturities and one parameter axis.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        axis: Option<Axis>,
        /// Comma-separated values of the axis parameter.
        #[arg(long, value_delimiter = ',', requires = "axis")]
        values: Vec<f64>,
        /// `start:stop:count`, log-spaced.
        #[arg(long, value_parser = parse_t_grid)]
        t_grid: TGrid,
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<Method>,
        #[command(flatten)]
        pricer: PricerArgs,
    },
    /// Fit C and Y to near-the-money implied vols.
    Calibrate {
        /// CSV with header date,maturity,log_moneyness,implied_vol,weight.
        #[arg(long)]
        quotes: PathBuf,
        /// Initial C+ + C-.
        #[arg(long, default_value_t = 0.01)]
        initial_c: f64,
        #[arg(long, default_value_t = 1.5)]
        initial_y: f64,
        #[arg(long, default_value_t = 0.5)]
        moneyness_factor: f64,
        #[arg(long, value_enum, default_value = "smallest")]
        root: RootArg,
    },
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    #[arg(long = "C")]
    c: f64,
    #[arg(long = "G")]
    g: f64,
    #[arg(long = "M")]
    m: f64,
    #[arg(long = "Y")]
    y: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<CgmyParams> {
        CgmyParams::new(self.c, self.g, self.m, self.y, self.sigma)
    }
}

#[derive(Debug, Clone, Args)]
struct PricerArgs {
    /// Monte Carlo paths.
    #[arg(long, default_value_t = McConfig::default().n_paths)]
    n: u64,
    #[arg(long, default_value_t = McConfig::default().seed)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
    /// Fourier grid nodes.
    #[arg(long, default_value_t = IftConfig::default().p_points)]
    p_points: usize,
    /// Fourier frequency window width.
    #[arg(long, default_value_t = IftConfig::default().q_range)]
    q_range: f64,
    /// Volatility of the Black–Scholes control.
    #[arg(long, default_value_t = IftConfig::default().control_vol)]
    control_vol: f64,
}

impl PricerArgs {
    fn mc(&self) -> McConfig {
        McConfig {
            n_paths: self.n,
            seed: self.seed,
            antithetic: self.antithetic,
        }
    }

    fn ift(&self) -> IftConfig {
        IftConfig {
            p_points: self.p_points,
            q_range: self.q_range,
            control_vol: self.control_vol,
            ..IftConfig::default()
        }
    }
}

// declared in alphabetical order so the derived Ord sorts methods by name
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Method {
    Ift,
    Mc,
    Order1,
    Order2,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Ift => "ift",
            Method::Mc => "mc",
            Method::Order1 => "order1",
            Method::Order2 => "order2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "C")]
    C,
    #[value(name = "G")]
    G,
    #[value(name = "M")]
    M,
    #[value(name = "Y")]
    Y,
    #[value(name = "sigma")]
    Sigma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RootArg {
    Smallest,
    Largest,
}

/// Strictly increasing, log-spaced maturities.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid(pub Vec<f64>);

/// Parse `start:stop:count` into `count` log-spaced points (a bare number is one point).
pub fn parse_t_grid(raw: &str) -> std::result::Result<TGrid, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number `{s}` in t-grid"));
    let grid = match parts.as_slice() {
        [single] => vec![num(single)?],
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count.trim().parse().map_err(|_| format!("bad count `{count}` in t-grid"))?;
            match n {
                0 => return Err("t-grid count must be at least 1".into()),
                1 => vec![a],
                _ => (0..n)
                    .map(|i| {
                        if i == 0 {
                            a
                        } else if i == n - 1 {
                            b
                        } else {
                            (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()
                        }
                    })
                    .collect(),
            }
        }
        _ => return Err(format!("t-grid `{raw}` is not start:stop:count")),
    };
    if grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err("t-grid values must be positive".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("t-grid must be strictly increasing".into());
    }
    Ok(TGrid(grid))
}

/// One sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: Option<f64>,
    pub t: f64,
    pub method: Method,
    /// `Err` rows are written with the `error` marker.
    pub price: std::result::Result<f64, String>,
    pub std_error: Option<f64>,
}

/// What to sweep. Methods are de-duplicated and sorted by name.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub t_grid: Vec<f64>,
    pub axis: Option<(Axis, Vec<f64>)>,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn new(t_grid: Vec<f64>, axis: Option<(Axis, Vec<f64>)>, mut methods: Vec<Method>) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one method".into()));
        }
        methods.sort();
        methods.dedup();
        if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("t-grid must be positive and strictly increasing".into()));
        }
        let axis = match axis {
            Some((a, mut values)) => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter("axis needs at least one value".into()));
                }
                values.sort_by(f64::total_cmp);
                Some((a, values))
            }
            None => None,
        };
        Ok(Self { t_grid, axis, methods })
    }
}

fn with_axis(base: &CgmyParams, axis: Axis, v: f64) -> Result<CgmyParams> {
    let (mut c, mut g, mut m, mut y, mut s) = (base.c(), base.g(), base.m(), base.y(), base.sigma());
    match axis {
        Axis::C => c = v,
        Axis::G => g = v,
        Axis::M => m = v,
        Axis::Y => y = v,
        Axis::Sigma => s = v,
    }
    CgmyParams::new(c, g, m, y, s)
}

fn price_cell(p: &CgmyParams, exp: &PriceExpansion, t: f64, method: Method, mc: &McConfig, ift: &IftConfig) -> Result<(f64, Option<f64>)> {
    let (price, se) = match method {
        Method::Mc => {
            let r = price_mc(p, t, mc)?;
            (r.price, Some(r.std_error))
        }
        Method::Ift => (price_ift(p, t, ift)?.price, None),
        Method::Order1 => (exp.first_order(t), None),
        Method::Order2 => (exp.second_order(t), None),
    };
    if !price.is_finite() || se.is_some_and(|s| !s.is_finite()) {
        return Err(Error::NonFinite { at: t, value: price });
    }
    Ok((price, se))
}

/// Run every (axis value, t, method) cell, in parallel across cells, and
/// return the rows in (axis value, t, method) order.
pub fn run_sweep(base: &CgmyParams, spec: &SweepSpec, mc: &McConfig, ift: &IftConfig) -> Vec<SweepRow> {
    let axis_points: Vec<Option<f64>> = match &spec.axis {
        Some((_, values)) => values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let cells: Vec<(Option<f64>, f64)> = axis_points
        .iter()
        .flat_map(|a| spec.t_grid.iter().map(move |t| (*a, *t)))
        .collect();
    cells
        .par_iter()
        .map(|&(axis_value, t)| {
            let model = match (&spec.axis, axis_value) {
                (Some((axis, _)), Some(v)) => with_axis(base, *axis, v),
                _ => Ok(*base),
            };
            let exp = model.as_ref().map_err(Clone::clone).and_then(price_expansion);
            spec.methods
                .iter()
                .map(|&method| {
                    let cell = match (&model, &exp) {
                        (Ok(p), Ok(e)) => price_cell(p, e, t, method, mc, ift),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    let (price, std_error) = match cell {
                        Ok((price, se)) => (Ok(price), se),
                        Err(e) => (Err(e.to_string()), None),
                    };
                    SweepRow { axis_value, t, method, price, std_error }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Write sweep rows as CSV with header `axis_value,t,method,price,std_error`.
/// Returns the number of rows.
pub fn emit_sweep<W: Write>(rows: &[SweepRow], out: W) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis_value", "t", "method", "price", "std_error"])?;
    for r in rows {
        w.write_record([
            r.axis_value.map(|v| v.to_string()).unwrap_or_default(),
            r.t.to_string(),
            r.method.name().to_string(),
            match &r.price {
                Ok(p) => p.to_string(),
                Err(_) => "error".to_string(),
            },
            r.std_error.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(rows.len())
}

/// Append `--key value` for every config entry whose flag is not already on
/// the command line. A `true`/`false` value toggles a bare switch.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strings.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strings.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut merged = args;
    for (key, value) in parse_key_values(&text)? {
        let flag = format!("--{key}");
        let given = strings.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(flag.into()),
            "false" => {}
            _ => {
                merged.push(flag.into());
                merged.push(value.into());
            }
        }
    }
    Ok(merged)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // a pool built earlier in the same process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() || matches!(e, Error::InfeasibleQuote(_)) {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

/// Parse `argv` (including the program name), run the sub-command and return
/// the process exit code: 0 on success, 2 on usage errors, 3 on numeric failures.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    let mut buffer = Vec::new();
    let outcome = execute(cli.command, &mut buffer, stderr);
    let sink: io::Result<()> = match &cli.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(&buffer)?;
            w.flush()
        }),
        None => stdout.write_all(&buffer),
    };
    if let Err(e) = sink {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Coeffs(model) => {
            let p = model.params()?;
            let e = price_expansion(&p)?;
            let iv = iv_expansion(&p)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["regime", "d1", "d1_exponent", "d2", "d2_exponent", "s1", "s1_exponent", "s2", "s2_exponent"])?;
            w.write_record([
                e.regime.to_string(),
                e.d1.to_string(),
                e.exp1.to_string(),
                e.d2.to_string(),
                e.exp2.to_string(),
                iv.s1.to_string(),
                iv.exp1.to_string(),
                iv.s2.to_string(),
                iv.exp2.to_string(),
            ])?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Price { model, method, t, pricer } => {
            let p = model.params()?;
            let exp = price_expansion(&p)?;
            let mut error_estimate = None;
            let (price, se) = match method {
                Method::Ift => {
                    let r = price_ift(&p, t, &pricer.ift())?;
                    if r.warning {
                        let _ = writeln!(stderr, "warning: Fourier tail mass {:e} exceeds tolerance", r.tail_mass);
                    }
                    error_estimate = Some(r.error_estimate);
                    (r.price, None)
                }
                _ => price_cell(&p, &exp, t, method, &pricer.mc(), &pricer.ift())?,
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["t", "method", "price", "std_error", "error_estimate"])?;
            w.write_record([
                t.to_string(),
                method.name().to_string(),
                price.to_string(),
                se.map(|s| s.to_string()).unwrap_or_default(),
                error_estimate.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Ivol { model, t_grid, method, pricer } => {
            let p = model.params()?;
            let exp = price_expansion(&p)?;
            let iv_exp = iv_expansion(&p)?;
            let (mc, ift) = (pricer.mc(), pricer.ift());
            let rows: Vec<Result<(f64, f64, f64)>> = t_grid
                .0
                .par_iter()
                .map(|&t| {
                    let (price, _) = price_cell(&p, &exp, t, method, &mc, &ift)?;
                    Ok((t, price, implied_vol(price, 1.0, 1.0, t)?))
                })
                .collect();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["t", "method", "price", "implied_vol", "iv_expansion"])?;
            let mut code = EXIT_OK;
            for (&t, row) in t_grid.0.iter().zip(rows) {
                let (price, iv) = match row {
                    Ok((_, price, iv)) => (price.to_string(), iv.to_string()),
                    Err(e) => {
                        let _ = writeln!(stderr, "t = {t}: {e}");
                        code = EXIT_NUMERIC;
                        ("error".to_string(), "error".to_string())
                    }
                };
                w.write_record([t.to_string(), method.name().to_string(), price, iv, iv_exp.eval(t).to_string()])?;
            }
            w.flush()?;
            Ok(code)
        }
        Command::Sweep { model, axis, values, t_grid, methods, pricer } => {
            let base = model.params()?;
            let axis = axis.map(|a| (a, values));
            let spec = SweepSpec::new(t_grid.0, axis, methods)?;
            let rows = run_sweep(&base, &spec, &pricer.mc(), &pricer.ift());
            emit_sweep(&rows, out)?;
            let mut code = EXIT_OK;
            for r in &rows {
                if let Err(e) = &r.price {
                    let _ = writeln!(stderr, "{} at t = {}: {e}", r.method.name(), r.t);
                    code = EXIT_NUMERIC;
                }
            }
            Ok(code)
        }
        Command::Calibrate { quotes, initial_c, initial_y, moneyness_factor, root } => {
            let file = File::open(&quotes).map_err(|e| Error::Io(format!("{}: {e}", quotes.display())))?;
            let quotes = read_quotes(file)?;
            let cfg = CalibrationConfig {
                moneyness_factor,
                root: match root {
                    RootArg::Smallest => SpotVolRoot::Smallest,
                    RootArg::Largest => SpotVolRoot::Largest,
                },
                ..CalibrationConfig::default()
            };
            let guess = InitialGuess { c_total: initial_c, y: initial_y };
            let result = calibrate(&quotes, &cfg, guess)?;
            write_result(&result, out)?;
            let _ = write!(stderr, "{result}");
            Ok(if result.converged { EXIT_OK } else { EXIT_NUMERIC })
        }
    }
}
