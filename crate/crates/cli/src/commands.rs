use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use delay_esn::experiments::{
    run_ablation_with_jobs, AblationReport, AblationSpec, AblationSystem,
};
use delay_esn::metrics::{MetricReport, DEFAULT_NMAE_EPS};
use delay_esn::prediction::free_run;
use delay_esn::reservoir::{Activation, EsnConfig};
use delay_esn::systems::{
    integrate_lorenz, integrate_rossler, observe, perturbed_ic, synth_traffic, LorenzParams,
    Observable, RosslerParams, RosslerVariant, Trajectory,
};
use delay_esn::training::{train, ScalerKind};

use crate::error::{CliError, CliResult};
use crate::model::{load_model, save_model};
use crate::profiles::{resolve, Profile};
use crate::series_io::{ingest_csv, write_forecast, write_series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataSystem {
    Lorenz,
    Rossler,
    Traffic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObserveArg {
    X,
    Y,
    Z,
}

impl From<ObserveArg> for Observable {
    fn from(value: ObserveArg) -> Self {
        match value {
            ObserveArg::X => Observable::X,
            ObserveArg::Y => Observable::Y,
            ObserveArg::Z => Observable::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum VariantArg {
    StandardYz,
    PrintedYx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    None,
    Zscore,
    Minmax,
}

impl From<ScaleArg> for ScalerKind {
    fn from(value: ScaleArg) -> Self {
        match value {
            ScaleArg::None => ScalerKind::None,
            ScaleArg::Zscore => ScalerKind::Zscore,
            ScaleArg::Minmax => ScalerKind::Minmax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActivationArg {
    Tanh,
    Logistic,
}

impl From<ActivationArg> for Activation {
    fn from(value: ActivationArg) -> Self {
        match value {
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::Logistic => Activation::Logistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum AblateSystemArg {
    LorenzX,
    LorenzZ,
    RosslerX,
    SynthTraffic,
    CsvInput,
}

impl From<AblateSystemArg> for AblationSystem {
    fn from(value: AblateSystemArg) -> Self {
        match value {
            AblateSystemArg::LorenzX => AblationSystem::LorenzX,
            AblateSystemArg::LorenzZ => AblationSystem::LorenzZ,
            AblateSystemArg::RosslerX => AblationSystem::RosslerX,
            AblateSystemArg::SynthTraffic => AblationSystem::SynthTraffic,
            AblateSystemArg::CsvInput => AblationSystem::CsvInput,
        }
    }
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Source system.
    #[arg(long, value_enum)]
    pub system: DataSystem,

    /// Observed coordinate (chaotic systems).
    #[arg(long, value_enum, default_value = "x")]
    pub observe: ObserveArg,

    /// Number of samples to emit.
    #[arg(long, default_value_t = 1300, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,

    /// Sampling interval: time units for the chaotic systems (default 0.1),
    /// hours for traffic (default 1).
    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long, env = "DELAY_ESN_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Internal RK4 steps per sample.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub substeps: u64,

    /// On-attractor transient samples discarded before emitting.
    #[arg(long, default_value_t = 1000)]
    pub transient: u64,

    /// Gaussian noise level of the traffic surrogate.
    #[arg(long, default_value_t = 12.0)]
    pub noise_std: f64,

    /// First Rössler equation: textbook (-y - z) or the printed variant (-y - x).
    #[arg(long, value_enum, default_value = "standard_yz")]
    pub rossler_variant: VariantArg,

    /// Output series CSV.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Also write the full three-component state to this CSV.
    #[arg(long)]
    pub full_state: Option<PathBuf>,
}

pub fn cmd_gen_data(args: &GenDataArgs) -> CliResult<()> {
    let steps = args.steps as usize;
    match args.system {
        DataSystem::Traffic => {
            let dt = args.dt.unwrap_or(1.0);
            if args.full_state.is_some() {
                return Err(CliError::Arg("--full-state applies to lorenz/rossler only".into()));
            }
            let days = ((steps as f64 * dt) / 24.0).ceil().max(1.0) as usize;
            let full = synth_traffic(days, dt, args.noise_std, args.seed)?;
            let series = full.head(steps)?;
            let comments = vec![
                ("system".into(), "traffic".into()),
                ("dt_hours".into(), format!("{dt}")),
                ("noise_std".into(), format!("{}", args.noise_std)),
                ("seed".into(), format!("{}", args.seed)),
            ];
            write_series(&args.output, &series, &comments)
        }
        DataSystem::Lorenz | DataSystem::Rossler => {
            let dt = args.dt.unwrap_or(0.1);
            let ic = perturbed_ic(args.seed);
            let traj = match args.system {
                DataSystem::Lorenz => integrate_lorenz(
                    &LorenzParams::default(),
                    ic,
                    dt,
                    steps,
                    args.substeps as usize,
                    args.transient as usize,
                )?,
                _ => {
                    let params = RosslerParams {
                        variant: match args.rossler_variant {
                            VariantArg::StandardYz => RosslerVariant::StandardYz,
                            VariantArg::PrintedYx => RosslerVariant::PrintedYx,
                        },
                        ..RosslerParams::default()
                    };
                    integrate_rossler(&params, ic, dt, steps, args.substeps as usize, args.transient as usize)?
                }
            };
            let name = match args.system {
                DataSystem::Lorenz => "lorenz",
                _ => "rossler",
            };
            let observable: Observable = args.observe.into();
            let series = observe(&traj, observable, format!("{name}_{}", observable.name()));
            let comments = vec![
                ("system".into(), name.to_string()),
                ("observe".into(), observable.name().into()),
                ("dt".into(), format!("{dt}")),
                ("substeps".into(), format!("{}", args.substeps)),
                ("transient".into(), format!("{}", args.transient)),
                ("seed".into(), format!("{}", args.seed)),
            ];
            write_series(&args.output, &series, &comments)?;
            if let Some(path) = &args.full_state {
                write_full_state(path, &traj)?;
            }
            Ok(())
        }
    }
}

fn write_full_state(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let mut out = String::from("t,x,y,z\n");
    for (k, s) in traj.states().iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", k as f64 * traj.dt(), s[0], s[1], s[2]));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

/// Flag-level overrides shared by `train` and `ablate`.
#[derive(Debug, Args, Default)]
pub struct EsnOverrides {
    /// Embedding dimension m.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: Option<u64>,

    /// Reservoir size n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,

    /// Connection probability p.
    #[arg(long)]
    pub p: Option<f64>,

    /// Leaking rate.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Ridge regularization.
    #[arg(long)]
    pub beta: Option<f64>,

    /// Spectral-radius target of the recurrent weights.
    #[arg(long)]
    pub rho: Option<f64>,

    /// Training pairs discarded before the fit.
    #[arg(long)]
    pub washout: Option<u64>,

    /// Input scaling.
    #[arg(long, value_enum)]
    pub scale: Option<ScaleArg>,

    #[arg(long, value_enum)]
    pub activation: Option<ActivationArg>,

    /// Input weights are uniform on +- this value.
    #[arg(long)]
    pub halfwidth: Option<f64>,

    /// Append a constant bias column to the input coupling.
    #[arg(long)]
    pub bias: Option<bool>,

    /// Training state jitter (regularization).
    #[arg(long)]
    pub noise: Option<f64>,

    #[arg(long, env = "DELAY_ESN_SEED")]
    pub seed: Option<u64>,
}

impl EsnOverrides {
    fn apply(&self, config: &mut EsnConfig) {
        if let Some(m) = self.m {
            config.embedding_dimension = m as usize;
        }
        if let Some(n) = self.n {
            config.reservoir_size = n as usize;
        }
        if let Some(p) = self.p {
            config.connection_probability = p;
        }
        if let Some(alpha) = self.alpha {
            config.leaking_rate = alpha;
        }
        if let Some(beta) = self.beta {
            config.regularization = beta;
        }
        if let Some(rho) = self.rho {
            config.spectral_radius_target = rho;
        }
        if let Some(washout) = self.washout {
            config.washout = washout as usize;
        }
        if let Some(scale) = self.scale {
            config.scaler = scale.into();
        }
        if let Some(act) = self.activation {
            config.activation = act.into();
        }
        if let Some(hw) = self.halfwidth {
            config.input_weight_halfwidth = hw;
        }
        if let Some(bias) = self.bias {
            config.bias_input = bias;
        }
        if let Some(noise) = self.noise {
            config.state_noise_std = noise;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value = "custom")]
    pub profile: Profile,

    /// Input series CSV.
    #[arg(short, long)]
    pub input: PathBuf,

    /// Output model file.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Samples consumed by training (the rest of the file is ignored).
    #[arg(long)]
    pub train_len: Option<u64>,

    #[command(flatten)]
    pub esn: EsnOverrides,
}

pub fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    let resolved = resolve(args.profile);
    let mut config = resolved.config;
    args.esn.apply(&mut config);
    let train_len = args.train_len.map(|v| v as usize).unwrap_or(resolved.train_len);

    let series = ingest_csv(&args.input)?;
    if series.len() < train_len {
        return Err(CliError::Core(delay_esn::Error::InsufficientData(format!(
            "training needs {train_len} samples, {} has {}",
            args.input.display(),
            series.len()
        ))));
    }

    let trained = train(&series.head(train_len)?, &config)?;
    save_model(&args.output, &trained)?;
    println!(
        "{}",
        serde_json::to_string(trained.meta()).expect("meta serializes")
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(short, long)]
    pub model: PathBuf,

    /// Free-run horizon.
    #[arg(short = 'l', long, default_value_t = 300)]
    pub horizon: u64,

    /// Output forecast CSV.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Truth series; adds a truth column and prints metrics.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// NMAE division guard.
    #[arg(long, default_value_t = DEFAULT_NMAE_EPS)]
    pub eps: f64,
}

pub fn cmd_predict(args: &PredictArgs) -> CliResult<()> {
    let trained = load_model(&args.model)?;
    let horizon = args.horizon as usize;
    let forecast = free_run(&trained, horizon)?;

    match &args.truth {
        None => write_forecast(&args.output, &forecast, None),
        Some(truth_path) => {
            let truth = ingest_csv(truth_path)?;
            // The truth file carries the full timeline; score the stretch the
            // forecast covers.
            let start = forecast.start_index;
            if truth.len() < start + horizon {
                return Err(CliError::Core(delay_esn::Error::InsufficientData(format!(
                    "truth has {} samples but the forecast covers {}..{}",
                    truth.len(),
                    start,
                    start + horizon
                ))));
            }
            let tail = &truth.samples()[start..start + horizon];
            write_forecast(&args.output, &forecast, Some(tail))?;
            if horizon > 0 {
                let report = MetricReport::compute(tail, &forecast.predictions, args.eps)?;
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reference series CSV.
    #[arg(long)]
    pub truth: PathBuf,

    /// Predicted series CSV (same length).
    #[arg(long)]
    pub pred: PathBuf,

    #[arg(long, default_value_t = DEFAULT_NMAE_EPS)]
    pub eps: f64,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let truth = ingest_csv(&args.truth)?;
    let pred = ingest_csv(&args.pred)?;
    let report = MetricReport::compute(truth.samples(), pred.samples(), args.eps)?;
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(())
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Data source for the sweep.
    #[arg(long, value_enum)]
    pub system: Option<AblateSystemArg>,

    /// Embedding dimensions, comma separated (e.g. 1,2,5,8).
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,

    #[arg(long)]
    pub trials: Option<u64>,

    /// Free-run length scored per trial.
    #[arg(long)]
    pub horizon: Option<u64>,

    #[arg(long)]
    pub train_len: Option<u64>,

    /// Reuse one data realization across trials (vary only the network draw).
    #[arg(long)]
    pub fix_data: bool,

    /// Input series (system csv_input).
    #[arg(short, long)]
    pub input: Option<PathBuf>,

    /// Worker cap for the trial pool (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: u64,

    /// Report JSON path.
    #[arg(short, long, default_value = "ablation_report.json")]
    pub output: PathBuf,

    /// Flat per-trial CSV for external plotting.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,

    /// JSON file mirroring these flags; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub esn: EsnOverrides,
}

/// File-level mirror of the ablate flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AblateFileConfig {
    system: Option<AblationSystem>,
    m_grid: Option<Vec<usize>>,
    trials: Option<usize>,
    horizon: Option<usize>,
    train_len: Option<usize>,
    fix_data: Option<bool>,
    n: Option<usize>,
    p: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    rho: Option<f64>,
    washout: Option<usize>,
    scale: Option<ScalerKind>,
    activation: Option<Activation>,
    halfwidth: Option<f64>,
    bias: Option<bool>,
    noise: Option<f64>,
    seed: Option<u64>,
}

pub fn cmd_ablate(args: &AblateArgs) -> CliResult<()> {
    let file: AblateFileConfig = match &args.config {
        None => AblateFileConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::format(path, e.line(), format!("config JSON: {e}")))?
        }
    };

    let system: AblationSystem = match (args.system, file.system) {
        (Some(flag), _) => flag.into(),
        (None, Some(from_file)) => from_file,
        (None, None) => return Err(CliError::Arg("--system is required (flag or config file)".into())),
    };

    let profile = match system {
        AblationSystem::LorenzX | AblationSystem::LorenzZ => Profile::Lorenz,
        AblationSystem::RosslerX => Profile::Rossler,
        AblationSystem::SynthTraffic | AblationSystem::CsvInput => Profile::Traffic,
    };
    let resolved = resolve(profile);

    let mut config = resolved.config;
    // File values first, then flags on top.
    if let Some(n) = file.n {
        config.reservoir_size = n;
    }
    if let Some(p) = file.p {
        config.connection_probability = p;
    }
    if let Some(alpha) = file.alpha {
        config.leaking_rate = alpha;
    }
    if let Some(beta) = file.beta {
        config.regularization = beta;
    }
    if let Some(rho) = file.rho {
        config.spectral_radius_target = rho;
    }
    if let Some(washout) = file.washout {
        config.washout = washout;
    }
    if let Some(scale) = file.scale {
        config.scaler = scale;
    }
    if let Some(act) = file.activation {
        config.activation = act;
    }
    if let Some(hw) = file.halfwidth {
        config.input_weight_halfwidth = hw;
    }
    if let Some(bias) = file.bias {
        config.bias_input = bias;
    }
    if let Some(noise) = file.noise {
        config.state_noise_std = noise;
    }
    if let Some(seed) = file.seed {
        config.seed = seed;
    }
    args.esn.apply(&mut config);

    let spec = AblationSpec {
        system,
        m_grid: args
            .m_grid
            .clone()
            .or(file.m_grid)
            .ok_or_else(|| CliError::Arg("--m-grid is required (flag or config file)".into()))?,
        trials: args.trials.map(|v| v as usize).or(file.trials).unwrap_or(20),
        horizon: args
            .horizon
            .map(|v| v as usize)
            .or(file.horizon)
            .unwrap_or(resolved.horizon),
        train_len: args
            .train_len
            .map(|v| v as usize)
            .or(file.train_len)
            .unwrap_or(resolved.train_len),
        base_config: config,
        base_seed: args.esn.seed.or(file.seed).unwrap_or(0),
        fix_data: args.fix_data || file.fix_data.unwrap_or(false),
    };

    let external = match (&args.input, system) {
        (Some(path), AblationSystem::CsvInput) => Some(ingest_csv(path)?),
        (Some(_), _) => {
            return Err(CliError::Arg("-i/--input is only used with --system csv_input".into()))
        }
        (None, AblationSystem::CsvInput) => {
            return Err(CliError::Arg("--system csv_input needs -i/--input".into()))
        }
        (None, _) => None,
    };

    let report = run_ablation_with_jobs(&spec, external.as_ref(), args.jobs as usize)?;

    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&args.output, json).map_err(|e| CliError::io(&args.output, e))?;
    if let Some(csv_path) = &args.csv_out {
        write_report_csv(csv_path, &report)?;
    }

    println!("{:>5} {:>8} {:>10} {:>10} {:>10} {:>10}", "m", "trials", "nrmse_q1", "nrmse_med", "nrmse_q3", "pearson_med");
    for g in &report.aggregates {
        println!(
            "{:>5} {:>8} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            g.m, g.count, g.nrmse.q1, g.nrmse.median, g.nrmse.q3, g.pearson_r.median
        );
    }
    if !report.failures.is_empty() {
        eprintln!("warning: {} trial(s) failed and were excluded", report.failures.len());
    }
    Ok(())
}

fn write_report_csv(path: &Path, report: &AblationReport) -> CliResult<()> {
    let mut out = String::from("m,trial,seed,nrmse,pearson_r\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m, r.trial, r.seed, r.metrics.nrmse, r.metrics.pearson_r
        ));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}
