//! Command-line front end. Every run is determined by its arguments; the
//! report repeats the effective configuration with defaults filled in.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{sample, Grid, GridFunction, TestFunction};
use crate::interpolation::{conjecture_31_experiment, verify_divided_inequality};
use crate::jets::{averaged_lemma_check, jet_from_function, mq_m_field, second_order_lemma_check, LemmaVariant};
use crate::luzin::luzin_ladder;
use crate::maximal::{centered_maximal_capped, one_sided_maximal_capped, uncentered_maximal, ScalarField, Side};
use crate::meanquotient::{
    holder_check, lens_chain_check, lens_constant, mq_field, poincare_check, poincare_integral,
    verify_grad_domination, verify_pointwise_with, ChainOptions, PointwiseOptions, DEFAULT_KAPPA,
};
use crate::mms::{
    doubling_constant, mq_field_mms, overlap_constant, parse_distance_csv, parse_space_json, verify_pointwise_mms,
    FiniteMetricMeasureSpace,
};
use crate::pairs::{PairSampling, DEFAULT_PAIR_BUDGET};
use crate::report::{emit_report, Format, Report, ReportItem};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MQSOBOLEV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mqsobolev", version, about = "Mean difference quotients and pointwise Sobolev inequalities on grids")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Corpus function, e.g. `poly:0,1`, `cusp:0.5`, `weierstrass`, `sin:6.283185307179586`.
    #[arg(long = "fn", global = true, default_value = "poly:0,1")]
    pub function: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = 0.01)]
    pub h: f64,
    /// Comma-separated, one value per axis (a single value is repeated).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub origin: Option<String>,
    #[arg(long, global = true)]
    pub extent: Option<String>,
    /// Radius cap `R`; unbounded when absent.
    #[arg(long, global = true)]
    pub cap: Option<f64>,
    /// Pair budget before stratified sampling takes over.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub budget: u64,
    /// Tolerance multiplier `κ` of `κ h / |x - y|`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a field on the grid.
    Field {
        #[arg(value_enum)]
        kind: FieldKind,
        /// Order of `mq-m`.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_enum, default_value_t = MaximalKind::Centered)]
        variant: MaximalKind,
    },
    /// Run a verifier.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Luzin-type Lipschitz approximation over a ladder of levels.
    Luzin {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0, 16.0, 32.0])]
        levels: Vec<f64>,
    },
    /// Finite metric measure spaces read from `--space`.
    Mms {
        #[command(subcommand)]
        op: MmsCommand,
    },
    /// Exploratory experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
    /// Closed-form constants.
    Constants {
        #[command(subcommand)]
        which: ConstantsCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Mq,
    Maximal,
    MqM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalKind {
    Centered,
    Uncentered,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaKind {
    Derived,
    Printed,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// `|f(x)-f(y)| <= c |x-y| (MQf(x) + MQf(y))`, plus the exact lens chain.
    Pointwise {
        /// Defaults to the lens constant of the dimension.
        #[arg(long)]
        constant: Option<f64>,
        /// Check every pair instead of those whose balls fit in the box.
        #[arg(long)]
        all_pairs: bool,
    },
    /// `MQf <= M(|∇f|) (1 + κ h)` at interior points.
    GradDom {
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// `|f(x) - f_B| <= r MQf(x)` and the empirical Poincaré constant.
    Poincare {
        /// Ball radius; defaults to `10 h`.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// `|f(y)-f(x)| <= |y-x|^(1-1/p) ‖f'‖_p`.
    Holder {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Divided-difference inequalities with `g = MQ^m f`.
    Divided {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
    /// Second-order lemma on lens triples and its averaged form.
    Lemma2 {
        #[arg(long, value_enum, default_value_t = LemmaKind::Derived)]
        variant: LemmaKind,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArg {
    /// JSON description `{kind, params, weights}` or a CSV distance matrix.
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ValuesArg {
    /// Function values, comma-separated, or `@file`.
    #[arg(long)]
    pub values: String,
}

#[derive(Debug, Subcommand)]
pub enum MmsCommand {
    /// `MQ f` on the space.
    Mq {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        values: ValuesArg,
    },
    Doubling {
        #[command(flatten)]
        space: SpaceArg,
    },
    Overlap {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Pointwise inequality with `g = MQ f`.
    Verify {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        values: ValuesArg,
        /// Defaults to the measured overlap constant.
        #[arg(long)]
        constant: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Scheme witnesses against the Taylor–Whitney witness.
    Conjecture31 {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstantsCommand {
    /// The lens constant `c(n)`.
    Lens,
}

/// The effective configuration, as written into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub function: String,
    pub dim: usize,
    pub origin: Vec<f64>,
    pub extent: Vec<f64>,
    pub h: f64,
    pub cap: Option<f64>,
    pub budget: u64,
    pub tol: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub params: BTreeMap<String, Value>,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad number `{t}` in {what}"))))
        .collect()
}

fn axis_values(text: Option<&str>, dim: usize, default: f64, what: &str) -> Result<Vec<f64>> {
    let Some(text) = text else { return Ok(vec![default; dim]) };
    let v = parse_list(text, what)?;
    match v.len() {
        1 => Ok(vec![v[0]; dim]),
        n if n == dim => Ok(v),
        n => Err(Error::InvalidParameter(format!("{what} has {n} values for dimension {dim}"))),
    }
}

struct Context {
    config: RunConfig,
    tf: TestFunction,
    grid: Grid,
}

impl Context {
    fn new(common: &Common, command: &str) -> Result<Self> {
        if !(common.dim == 1 || common.dim == 2) {
            return Err(Error::UnsupportedDimension(common.dim));
        }
        let tf: TestFunction = common.function.parse()?;
        let origin = axis_values(common.origin.as_deref(), common.dim, -1.0, "--origin")?;
        let extent = axis_values(common.extent.as_deref(), common.dim, 2.0, "--extent")?;
        let grid = Grid::new(common.dim, &origin, &extent, common.h)?;
        if let Some(c) = common.cap {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("--cap must be positive, got {c}")));
            }
        }
        if let Some(t) = common.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("--tol must be finite and nonnegative, got {t}")));
            }
        }
        let config = RunConfig {
            command: command.into(),
            function: tf.name(),
            dim: common.dim,
            origin,
            extent,
            h: common.h,
            cap: common.cap,
            budget: common.budget,
            tol: None,
            seed: common.seed,
            format: common.format,
            params: BTreeMap::new(),
        };
        Ok(Context { config, tf, grid })
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.config.params.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn kappa(&mut self, common: &Common) -> f64 {
        let k = common.tol.unwrap_or(DEFAULT_KAPPA);
        self.config.tol = Some(k);
        k
    }

    fn sampling(&self) -> PairSampling {
        PairSampling { budget: self.config.budget, seed: self.config.seed }
    }

    fn f(&self) -> Result<GridFunction> {
        sample(&self.tf, &self.grid)
    }

    fn report(self, pass: Option<bool>, results: Vec<ReportItem>) -> Result<Report> {
        Ok(Report {
            command: self.config.command.clone(),
            config: serde_json::to_value(&self.config).map_err(|e| Error::InvalidParameter(e.to_string()))?,
            pass,
            results,
        })
    }
}

fn field_item(field: &ScalarField, extra: Value) -> Result<ReportItem> {
    let data = json!({
        "label": field.label(),
        "grid": field.grid(),
        "values": field.values(),
        "extra": extra,
    });
    Ok(ReportItem::new("field", &data)?.with_csv(field.to_csv()))
}

fn read_space(path: &Path) -> Result<FiniteMetricMeasureSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_distance_csv(&text, None)
    } else {
        parse_space_json(&text)
    }
}

fn read_values(spec: &str) -> Result<Vec<f64>> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
            parse_list(&body, "--values")
        }
        None => parse_list(spec, "--values"),
    }
}

fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let mag = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Runs one parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let common = &cli.common;
    match &cli.command {
        Command::Field { kind, m, variant } => {
            let name = match kind {
                FieldKind::Mq => "field mq",
                FieldKind::Maximal => "field maximal",
                FieldKind::MqM => "field mq-m",
            };
            let mut ctx = Context::new(common, name)?;
            let f = ctx.f()?;
            let item = match kind {
                FieldKind::Mq => {
                    let mq = mq_field(&f, common.cap);
                    field_item(&mq.base, json!({ "empty_points": mq.empty_points }))?
                }
                FieldKind::MqM => {
                    ctx.param("m", m);
                    if *m == 0 {
                        return Err(Error::InvalidParameter("--m must be at least 1".into()));
                    }
                    let jet = jet_from_function(&ctx.tf, &ctx.grid, m - 1)?;
                    let mq = mq_m_field(&jet, &f, *m, common.cap)?;
                    field_item(&mq.base, json!({ "empty_points": mq.empty_points }))?
                }
                FieldKind::Maximal => {
                    ctx.param("variant", variant);
                    let field = match variant {
                        MaximalKind::Centered => centered_maximal_capped(&f, common.cap),
                        MaximalKind::Uncentered => {
                            if common.cap.is_some() {
                                return Err(Error::InvalidParameter(
                                    "the uncentered maximal function takes no radius cap".into(),
                                ));
                            }
                            uncentered_maximal(&f)?
                        }
                        MaximalKind::Left => one_sided_maximal_capped(&f, Side::Left, common.cap)?,
                        MaximalKind::Right => one_sided_maximal_capped(&f, Side::Right, common.cap)?,
                    };
                    field_item(&field, Value::Null)?
                }
            };
            ctx.report(None, vec![item])
        }
        Command::Verify { check } => verify(common, check),
        Command::Luzin { levels } => {
            let mut ctx = Context::new(common, "luzin")?;
            ctx.param("levels", levels);
            let rep = luzin_ladder(&ctx.f()?, levels)?;
            let pass = rep.pass;
            ctx.report(Some(pass), vec![ReportItem::new("luzin_ladder", &rep)?])
        }
        Command::Mms { op } => mms(common, op),
        Command::Experiment { which: ExperimentCommand::Conjecture31 { m, samples } } => {
            let mut ctx = Context::new(common, "experiment conjecture31")?;
            ctx.param("m", m);
            ctx.param("samples", samples);
            let rep = conjecture_31_experiment(&ctx.tf, &ctx.grid, *m, *samples, common.seed)?;
            ctx.report(None, vec![ReportItem::new("experiment", &rep)?])
        }
        Command::Constants { which: ConstantsCommand::Lens } => {
            let ctx = Context::new(common, "constants lens")?;
            let c = lens_constant(common.dim)?;
            let data = json!({ "dim": common.dim, "value": c, "display": significant(c, 12) });
            ctx.report(None, vec![ReportItem::new("constant", &data)?])
        }
    }
}

fn verify(common: &Common, check: &VerifyCommand) -> Result<Report> {
    match check {
        VerifyCommand::Pointwise { constant, all_pairs } => {
            let mut ctx = Context::new(common, "verify pointwise")?;
            let kappa = ctx.kappa(common);
            let c = match constant {
                Some(c) => *c,
                None => lens_constant(common.dim)?,
            };
            ctx.param("constant", c);
            ctx.param("all_pairs", all_pairs);
            let f = ctx.f()?;
            let g = mq_field(&f, common.cap).base;
            let opts = PointwiseOptions { constant: c, kappa, sampling: ctx.sampling(), interior: !all_pairs };
            let pointwise = verify_pointwise_with(&f, &g, &opts)?;
            let chain = lens_chain_check(&f, &ChainOptions { interior_only: !all_pairs, sampling: ctx.sampling() })?;
            let pass = pointwise.pass && chain.pass;
            let items = vec![ReportItem::new("inequality", &pointwise)?, ReportItem::new("inequality", &chain)?];
            ctx.report(Some(pass), items)
        }
        VerifyCommand::GradDom { margin } => {
            let mut ctx = Context::new(common, "verify grad-dom")?;
            let kappa = ctx.kappa(common);
            ctx.param("margin", margin);
            let rep = verify_grad_domination(&ctx.f()?, kappa, *margin)?;
            let pass = rep.pass;
            ctx.report(Some(pass), vec![ReportItem::new("inequality", &rep)?])
        }
        VerifyCommand::Poincare { radius, p } => {
            let mut ctx = Context::new(common, "verify poincare")?;
            let r = radius.unwrap_or(10.0 * common.h);
            ctx.param("radius", r);
            ctx.param("p", p);
            let f = ctx.f()?;
            let rep = poincare_check(&f, r)?;
            let integral = poincare_integral(&f, *p)?;
            let pass = rep.pass;
            let items = vec![
                ReportItem::new("inequality", &rep)?,
                ReportItem::new("poincare_integral", &json!({ "p": p, "empirical_constant": integral }))?,
            ];
            ctx.report(Some(pass), items)
        }
        VerifyCommand::Holder { p } => {
            let mut ctx = Context::new(common, "verify holder")?;
            let kappa = ctx.kappa(common);
            ctx.param("p", p);
            let mut opts = PointwiseOptions::new(1.0);
            opts.kappa = kappa;
            opts.sampling = ctx.sampling();
            let rep = holder_check(&ctx.f()?, *p, &opts)?;
            let pass = rep.pass;
            ctx.report(Some(pass), vec![ReportItem::new("inequality", &rep)?])
        }
        VerifyCommand::Divided { m, constant } => {
            let mut ctx = Context::new(common, "verify divided")?;
            let kappa = ctx.kappa(common);
            ctx.param("m", m);
            ctx.param("constant", constant);
            if *m == 0 {
                return Err(Error::InvalidParameter("--m must be at least 1".into()));
            }
            let f = ctx.f()?;
            let jet = jet_from_function(&ctx.tf, &ctx.grid, m - 1)?;
            let g = mq_m_field(&jet, &f, *m, common.cap)?.base;
            let opts = PointwiseOptions { constant: *constant, kappa, sampling: ctx.sampling(), interior: false };
            let rep = verify_divided_inequality(&f, *m, &g, &opts)?;
            let pass = rep.pass;
            ctx.report(Some(pass), vec![ReportItem::new("divided_inequality", &rep)?])
        }
        VerifyCommand::Lemma2 { variant } => {
            let mut ctx = Context::new(common, "verify lemma2")?;
            let v = match variant {
                LemmaKind::Derived => LemmaVariant::Derived,
                LemmaKind::Printed => LemmaVariant::Printed,
            };
            ctx.param("variant", v);
            let f = ctx.f()?;
            let jet = jet_from_function(&ctx.tf, &ctx.grid, 1)?;
            let pointwise = second_order_lemma_check(&jet, &f, v, ctx.sampling())?;
            let averaged = averaged_lemma_check(&jet, &f, &ChainOptions { interior_only: true, sampling: ctx.sampling() })?;
            let pass = pointwise.pass && averaged.pass;
            let items = vec![ReportItem::new("inequality", &pointwise)?, ReportItem::new("inequality", &averaged)?];
            ctx.report(Some(pass), items)
        }
    }
}

fn mms(common: &Common, op: &MmsCommand) -> Result<Report> {
    let (name, space_arg) = match op {
        MmsCommand::Mq { space, .. } => ("mms mq", space),
        MmsCommand::Doubling { space } => ("mms doubling", space),
        MmsCommand::Overlap { space } => ("mms overlap", space),
        MmsCommand::Verify { space, .. } => ("mms verify", space),
    };
    let mut ctx = Context::new(common, name)?;
    ctx.param("space", space_arg.space.display().to_string());
    let space = read_space(&space_arg.space)?;
    ctx.param("points", space.len());
    match op {
        MmsCommand::Mq { values, .. } => {
            let f = read_values(&values.values)?;
            ctx.param("values", &f);
            let mq = mq_field_mms(&f, &space, common.cap)?;
            ctx.report(None, vec![ReportItem::new("mms_field", &json!({ "label": "mq", "values": mq }))?])
        }
        MmsCommand::Doubling { .. } => {
            let c = doubling_constant(&space);
            ctx.report(None, vec![ReportItem::new("constant", &json!({ "doubling_constant": c }))?])
        }
        MmsCommand::Overlap { .. } => {
            let rep = overlap_constant(&space)?;
            ctx.report(None, vec![ReportItem::new("overlap", &rep)?])
        }
        MmsCommand::Verify { values, constant, .. } => {
            let f = read_values(&values.values)?;
            ctx.param("values", &f);
            ctx.param("constant", constant);
            let g = mq_field_mms(&f, &space, common.cap)?;
            let rep = verify_pointwise_mms(&f, &space, &g, *constant)?;
            let pass = rep.pass;
            ctx.report(Some(pass), vec![ReportItem::new("inequality", &rep)?])
        }
    }
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

/// Parses arguments, runs, writes the report and returns the exit code:
/// 0 when every check passes, 1 when one fails, 2 on a usage or
/// configuration error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = pool.install(|| execute(&cli)).and_then(|report| {
        emit_report(&report, cli.common.format, cli.common.out.as_deref())?;
        Ok(report.pass)
    });
    match outcome {
        Ok(Some(false)) => {
            eprintln!("verification failed");
            1
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("mqsobolev").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_are_resolved_into_the_config() {
        let rep = execute(&parse(&["verify", "pointwise", "--fn", "poly:0,1", "--h", "0.05"])).unwrap();
        assert_eq!(rep.pass, Some(true));
        assert_eq!(rep.config["origin"], json!([-1.0]));
        assert_eq!(rep.config["tol"], json!(DEFAULT_KAPPA));
        assert_eq!(rep.config["params"]["constant"], json!(2.0));
        assert_eq!(rep.results.len(), 2);
    }

    #[test]
    fn lens_constant_to_twelve_digits() {
        let rep = execute(&parse(&["constants", "lens", "--dim", "2"])).unwrap();
        let shown = rep.results[0].data["display"].as_str().unwrap().to_string();
        let pi = std::f64::consts::PI;
        let exact = pi / (2.0 * pi / 3.0 - 3f64.sqrt() / 2.0);
        assert_eq!(shown, format!("{exact:.11}"));
        assert_eq!(significant(2.0, 12), "2.00000000000");
    }

    #[test]
    fn config_errors() {
        assert!(execute(&parse(&["field", "mq", "--dim", "3"])).is_err());
        assert!(execute(&parse(&["field", "mq", "--fn", "bogus"])).is_err());
        assert!(execute(&parse(&["field", "mq", "--origin", "0,0,0", "--dim", "2"])).is_err());
        assert!(execute(&parse(&["field", "maximal", "--variant", "uncentered", "--cap", "0.1"])).is_err());
        assert!(execute(&parse(&["verify", "divided", "--fn", "cusp:0.5"])).is_err());
        assert_eq!(run(["mqsobolev", "verify", "nothing"]), 2);
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_list("1, 2 3\n4", "x").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(parse_list("1,a", "x").is_err());
        assert_eq!(axis_values(Some("0.5"), 2, 0.0, "o").unwrap(), vec![0.5, 0.5]);
    }
}
