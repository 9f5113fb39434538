use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rigalign::alignment::{count_swap_events, feature_error};
use rigalign::theory::{
    degree_event_check, feat_failure_bound, gaussian_inner_tail_check, lazy_walk_tail_check,
    match_failure_bound, recovery_condition, uniqueness_check, ReportRow,
};
use rigalign::{io, Error, ModelParams, NoiseParams, PermMode, Result};
use rigalign_harness::output::{phase_string, report_csv, write_text, PlotMetric};
use rigalign_harness::sweep::parse_grid;
use rigalign_harness::trial::parse_methods;
use rigalign_harness::{
    emit_plot_data, phase_diagram, run_sweep, write_csv, Axis, Method, SwapCounting, SweepSpec, TrialSpec,
};

#[derive(Parser)]
#[command(name = "rigalign", about = "Correlated random intersection graph alignment experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a correlated pair and write it to a directory.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "uniform")]
        perm_mode: String,
    },
    /// Align two observed graphs from files.
    Align(AlignArgs),
    /// Sweep one parameter and write per-trial CSV plus plot data.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: String,
        /// `start:stop:step`, inclusive.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        /// Plot data path; defaults to the CSV path with `.dat`.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// align_error, feat_rel_dist or objective.
        #[arg(long, default_value = "align_error")]
        plot_metric: String,
        /// Count swap events; `0` enumerates all pairs, `k > 0` samples k pairs.
        #[arg(long)]
        swap_pairs: Option<u64>,
    },
    /// Empirical recovery-rate grid over m = n^alpha, d = n^beta.
    Phase {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha_grid: String,
        #[arg(long)]
        beta_grid: String,
        #[arg(long, default_value_t = 5)]
        replicates: usize,
        #[arg(long, default_value_t = 1.0)]
        margin_factor: f64,
    },
    /// Monte Carlo checks of the concentration inequalities.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 100_000)]
        mc_trials: usize,
    },
    /// Recovery condition and failure bounds for one parameter set.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        margin_factor: f64,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 4000)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    t: u32,
    #[arg(long, conflicts_with = "m")]
    s: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "gnn,linear")]
    methods: String,
    /// Sparsity given to the denoiser instead of the true s.
    #[arg(long)]
    misspecified_s: Option<f64>,
}

impl Common {
    fn params(&self) -> Result<ModelParams> {
        match (self.s, self.m) {
            (Some(s), None) => ModelParams::from_sparsity(self.n, self.d, s, self.t),
            (None, Some(m)) => ModelParams::from_density(self.n, self.d, m, self.t),
            _ => Err(Error::Format("exactly one of --s or --m is required".into())),
        }
    }

    fn noise(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.sigma, self.q)
    }

    fn spec(&self) -> Result<TrialSpec> {
        let mut spec = TrialSpec::new(self.params()?, self.noise()?, parse_methods(&self.methods)?, self.seed)?;
        spec.misspecified_s = self.misspecified_s;
        Ok(spec)
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

#[derive(Args)]
struct AlignArgs {
    /// First observed graph (binary observed-graph file).
    #[arg(long)]
    g: PathBuf,
    #[arg(long)]
    g_prime: PathBuf,
    #[arg(long, default_value = "gnn")]
    method: String,
    /// Sparsity used by the denoiser (gnn only).
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 3)]
    t: u32,
    /// Hidden permutation to score against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Truth feature graph, for the feature error of the first copy.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, default_value = "alignment.txt")]
    out: PathBuf,
}

fn generate(common: &Common, perm_mode: &str) -> Result<()> {
    let params = common.params()?;
    let mode: PermMode = perm_mode.parse()?;
    let inst = rigalign::sample_correlated_pair(&params, common.noise()?, common.seed, mode);
    let dir = common.out_or("instance");
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    io::save_rig(&dir.join("truth.rig"), &inst.truth, &inst.base_edges, params.t())?;
    io::save_observed(&dir.join("g.obs"), &inst.g)?;
    io::save_observed(&dir.join("g_prime.obs"), &inst.g_prime)?;
    io::save_permutation(&dir.join("hidden_perm.txt"), &inst.hidden_perm)?;
    write_text(&dir.join("g.edges"), &io::format_edge_list(inst.g.graph()))?;
    write_text(&dir.join("g_prime.edges"), &io::format_edge_list(inst.g_prime.graph()))?;
    println!(
        "wrote {}: n={} d={} s={} m={} t={} |E0|={} |E|={} |E'|={}",
        dir.display(),
        params.n(),
        params.d(),
        params.s(),
        params.m(),
        params.t(),
        inst.base_edges.edge_count(),
        inst.g.graph().edge_count(),
        inst.g_prime.graph().edge_count()
    );
    Ok(())
}

fn align(args: &AlignArgs) -> Result<()> {
    let g = io::load_observed(&args.g)?;
    let gp = io::load_observed(&args.g_prime)?;
    let method: Method = args.method.parse()?;
    let truth = args.truth.as_deref().map(io::load_permutation).transpose()?;
    let mut result = match method {
        Method::Gnn => {
            let s = args
                .s
                .ok_or_else(|| Error::Format("--s is required for the gnn method".into()))?;
            let z = rigalign::denoise(&g, s, args.t)?;
            let zp = rigalign::denoise(&gp, s, args.t)?;
            if let Some(path) = &args.features {
                let (x, _, _) = io::load_rig(path)?;
                let fe = feature_error(&z, &x)?;
                println!("feat_rel_dist={} feat_exact={}", fe.relative_distance, fe.exact);
            }
            if let Some(pi) = &truth {
                let aligned = zp.bits().gather_rows(pi.as_slice());
                let swaps = count_swap_events(z.bits(), &aligned, None, 0)?;
                println!("swap_events={}", swaps.count);
            }
            rigalign::align_features(&z, &zp)?
        }
        Method::Linear => rigalign::align_linear(g.features(), gp.features())?,
    };
    println!("objective={}", result.objective);
    if let Some(pi) = &truth {
        let err = result.score(pi)?;
        println!("align_error={err} perfect={}", result.is_perfect().unwrap_or(false));
    }
    io::save_permutation(&args.out, &result.perm)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn sweep(
    common: &Common,
    axis: &str,
    grid: &str,
    replicates: usize,
    plot: Option<&Path>,
    metric: &str,
    swap_pairs: Option<u64>,
) -> Result<()> {
    let axis: Axis = axis.parse()?;
    let metric = match metric {
        "align_error" => PlotMetric::AlignError,
        "feat_rel_dist" => PlotMetric::FeatRelDist,
        "objective" => PlotMetric::Objective,
        other => return Err(Error::Format(format!("unknown plot metric `{other}`"))),
    };
    let mut base = common.spec()?;
    base.swaps = match swap_pairs {
        None => SwapCounting::Off,
        Some(0) => SwapCounting::Exhaustive,
        Some(k) => SwapCounting::Sampled(k),
    };
    let sweep = SweepSpec {
        base,
        axis,
        grid: parse_grid(grid)?,
        replicates,
    };
    let records = run_sweep(&sweep)?;
    for r in records.iter().filter(|r| !r.degree_sane) {
        eprintln!("warning: seed {} mean degree {} far from expectation", r.seed, r.mean_degree);
    }
    let csv = common.out_or("sweep.csv");
    write_csv(&records, &csv)?;
    let plot = plot.map(Path::to_path_buf).unwrap_or_else(|| csv.with_extension("dat"));
    emit_plot_data(&records, axis, metric, &plot)?;
    println!("wrote {} records to {} and {}", records.len(), csv.display(), plot.display());
    Ok(())
}

fn phase(common: &Common, alpha: &str, beta: &str, replicates: usize, margin: f64) -> Result<()> {
    let base = match common.spec() {
        Ok(s) => s,
        // The grid sets m and d itself; only n, t and the noise are needed.
        Err(_) if common.s.is_none() && common.m.is_none() => {
            let params = ModelParams::from_density(common.n, common.d, 1.0, common.t)?;
            TrialSpec::new(params, common.noise()?, parse_methods(&common.methods)?, common.seed)?
        }
        Err(e) => return Err(e),
    };
    let cells = phase_diagram(&parse_grid(alpha)?, &parse_grid(beta)?, &base, replicates, margin);
    let out = common.out_or("phase.dat");
    write_text(&out, &phase_string(&cells))?;
    let skipped = cells.iter().filter(|c| c.skipped.is_some()).count();
    println!("wrote {} cells ({skipped} skipped) to {}", cells.len(), out.display());
    Ok(())
}

fn validate(common: &Common, trials: usize, mc_trials: usize) -> Result<()> {
    let params = common.params()?;
    let noise = common.noise()?;
    let mut rows: Vec<ReportRow> = Vec::new();
    match degree_event_check(&params, &noise, trials, common.seed) {
        Ok(r) => rows.push(r.row()),
        Err(Error::Precondition(msg)) => eprintln!("degree check skipped: {msg}"),
        Err(e) => return Err(e),
    }
    rows.push(uniqueness_check(&params, trials, common.seed)?.row());
    for (d, u) in [(1024, 0.25), (1024, 0.5), (256, 1.0)] {
        rows.push(gaussian_inner_tail_check(d, u, mc_trials, common.seed)?.row());
    }
    let grid = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
    rows.extend(lazy_walk_tail_check(200, 0.25, &grid, mc_trials, common.seed)?.rows());
    finish_report(common, &rows)
}

fn check(common: &Common, margin: f64) -> Result<()> {
    let params = common.params()?;
    let noise = common.noise()?;
    let rows = vec![
        recovery_condition(&params, &noise, margin).row(),
        feat_failure_bound(&params, &noise).row(),
        match_failure_bound(&params, &noise).row(),
    ];
    if !params.in_bound_regime() {
        eprintln!("warning: n < (12t)^t m; the failure bounds are outside their proved regime");
    }
    finish_report(common, &rows)
}

fn finish_report(common: &Common, rows: &[ReportRow]) -> Result<()> {
    let text = report_csv(rows);
    print!("{text}");
    if let Some(out) = &common.out {
        write_text(out, &text)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let threads = match &cli.command {
        Command::Generate { common, .. }
        | Command::Sweep { common, .. }
        | Command::Phase { common, .. }
        | Command::Validate { common, .. }
        | Command::Check { common, .. } => common.threads,
        Command::Align(_) => None,
    };
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate { common, perm_mode } => generate(&common, &perm_mode),
        Command::Align(args) => align(&args),
        Command::Sweep {
            common,
            axis,
            grid,
            replicates,
            plot,
            plot_metric,
            swap_pairs,
        } => sweep(&common, &axis, &grid, replicates, plot.as_deref(), &plot_metric, swap_pairs),
        Command::Phase {
            common,
            alpha_grid,
            beta_grid,
            replicates,
            margin_factor,
        } => phase(&common, &alpha_grid, &beta_grid, replicates, margin_factor),
        Command::Validate {
            common,
            trials,
            mc_trials,
        } => validate(&common, trials, mc_trials),
        Command::Check { common, margin_factor } => check(&common, margin_factor),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
