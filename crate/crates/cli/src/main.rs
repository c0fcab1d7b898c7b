use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ldpcc_core::channel::ChannelInstance;
use ldpcc_core::harness::{
    build_code, compute_ber, error_profile, instance_seed, mean_profile, run_decoder, run_experiment, write_csv,
    write_profile, DecoderChoice, ExperimentConfig, GapBaseline, WindowChoice, PROFILE_SECTION,
};
use ldpcc_core::{make_instance, SolveBudget};

#[derive(Parser, Debug)]
#[command(name = "ldpcc", version, about = "LDPC convolutional codes and sliding-window IP decoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the terminated parity-check matrix.
    Gen {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one BSC instance (all-zero codeword sent).
    Instance {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        p: f64,
        /// Instance number within the batch of `--seed`.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one instance with one decoder and print the report.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "ABFW")]
        decoder: String,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Read the received word from an instance file instead of drawing it.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Run a batch described by a config file and write the CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean bit errors per 100-bit section over a batch, as plot data.
    Profile {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "ABFW")]
        decoder: String,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long, default_value_t = 5)]
    s: usize,
    #[arg(long = "J", default_value_t = 5)]
    j: usize,
    #[arg(long = "K", default_value_t = 10)]
    k: usize,
    /// Repetitions of the block column.
    #[arg(long, conflicts_with = "n")]
    t: Option<usize>,
    /// Code length, a multiple of r·m.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    v_s: usize,
    /// Seeds the code and, through derived seeds, the instances.
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    p: f64,
    /// `small`, `large` or a row count.
    #[arg(long, default_value = "small")]
    w: String,
    #[arg(long)]
    window_time: Option<f64>,
    #[arg(long)]
    window_nodes: Option<u64>,
    #[arg(long)]
    emd_time: Option<f64>,
    #[arg(long)]
    emd_nodes: Option<u64>,
}

fn config_from(code: &CodeArgs, run: Option<&RunArgs>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig { s: code.s, j: code.j, k: code.k, v_s: code.v_s, seed: code.seed, ..Default::default() };
    if let Some(t) = code.t {
        cfg.t = t;
    }
    if let Some(n) = code.n {
        cfg.set_n(n)?;
    }
    if let Some(run) = run {
        cfg.p = run.p;
        cfg.w = run.w.parse::<WindowChoice>()?;
        cfg.window_budget = budget(run.window_time, run.window_nodes, cfg.window_budget)?;
        cfg.emd_budget = budget(run.emd_time, run.emd_nodes, cfg.emd_budget)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn budget(secs: Option<f64>, nodes: Option<u64>, mut b: SolveBudget) -> Result<SolveBudget> {
    if let Some(s) = secs {
        if !(s.is_finite() && s >= 0.0) {
            bail!("time limit must be a non-negative number of seconds");
        }
        b.time_limit = Duration::from_secs_f64(s);
    }
    if nodes.is_some() {
        b.node_limit = nodes;
    }
    Ok(b)
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { code, out } => {
            let cfg = config_from(&code, None)?;
            let tc = build_code(&cfg)?;
            let mut w = output(out.as_ref())?;
            tc.h.write_to(&mut w)?;
            w.flush()?;
        }
        Command::Instance { code, p, index, out } => {
            let mut cfg = config_from(&code, None)?;
            cfg.p = p;
            cfg.validate()?;
            let tc = build_code(&cfg)?;
            let inst = make_instance(&tc.h, p, instance_seed(&cfg, index))?;
            let mut w = output(out.as_ref())?;
            w.write_all(inst.to_text().as_bytes())?;
            w.flush()?;
        }
        Command::Decode { code, run, decoder, index, instance } => {
            let mut cfg = config_from(&code, Some(&run))?;
            let choice: DecoderChoice = decoder.parse()?;
            cfg.decoders = vec![choice];
            let tc = build_code(&cfg)?;
            let inst = match instance {
                Some(path) => {
                    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    ChannelInstance::read_from(BufReader::new(file))?
                }
                None => make_instance(&tc.h, cfg.p, instance_seed(&cfg, index))?,
            };
            let report = run_decoder(&cfg, &tc, choice, &inst.received)?;
            let ber = compute_ber(&inst.transmitted, &report.decoded)?;
            let errors: usize = error_profile(&inst.transmitted, &report.decoded, PROFILE_SECTION)?.iter().sum();
            println!("{} ber_pct={ber:.4} bit_errors={errors}", report.summary());
        }
        Command::Bench { config, seed, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            cfg.seed = seed;
            let out = out.or(cfg.output.take());
            let res = run_experiment(&cfg)?;
            let w = output(out.as_ref())?;
            write_csv(w, &res.rows, &res.aggregates, GapBaseline::of(&cfg))?;
            for a in &res.aggregates {
                eprintln!(
                    "{}: mean z {:.2}, cpu {:.2}s, opt {}, solved {}, feas {} of {}",
                    a.decoder, a.mean_z, a.mean_cpu_s, a.n_opt, a.n_solved, a.n_feas, a.instances
                );
            }
        }
        Command::Profile { code, run, decoder, instances, out } => {
            let mut cfg = config_from(&code, Some(&run))?;
            let choice: DecoderChoice = decoder.parse()?;
            cfg.decoders = vec![choice];
            cfg.instances = instances;
            let res = run_experiment(&cfg)?;
            let profiles: Vec<Vec<usize>> = res.rows.iter().map(|r| r.profile.clone()).collect();
            let w = output(out.as_ref())?;
            write_profile(w, &choice.label(), PROFILE_SECTION, &mean_profile(&profiles))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
