//! `nliso`: batch front-end for energies, kernels, stability tables and optimizers.

mod commands;
mod manifest;
mod params;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::RunDir;
use params::Params;

#[derive(Parser)]
#[command(name = "nliso", version, about = "Nonlocal isoperimetric energies and optimizers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` parameter file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "nliso-out")]
    out: PathBuf,
}

#[derive(Args, Clone, Default)]
struct KernelFlags {
    /// powerlaw, truncated or table.
    #[arg(long)]
    kernel: Option<String>,
    /// Table CSV written by `kernel build`.
    #[arg(long)]
    kernel_file: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    rho0: Option<String>,
}

#[derive(Args, Clone, Default)]
struct AnnealFlags {
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    t0: Option<String>,
    #[arg(long)]
    cooling: Option<String>,
    #[arg(long)]
    move_radius: Option<String>,
    #[arg(long)]
    record_every: Option<String>,
    #[arg(long)]
    refresh_every: Option<String>,
    #[arg(long)]
    near_field_radius: Option<String>,
    #[arg(long)]
    subsample: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy breakdown of a mask.
    Energy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel: KernelFlags,
        #[arg(long)]
        mask: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        /// Weight of the confinement term.
        #[arg(long)]
        confinement: Option<String>,
        #[arg(long)]
        near_field_radius: Option<String>,
        #[arg(long)]
        subsample: Option<String>,
    },
    /// Kernel tables.
    Kernel {
        #[command(subcommand)]
        action: KernelCmd,
    },
    /// Ball stability thresholds and mode table.
    Stability {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        kmax: Option<String>,
    },
    /// Volume-preserving annealing of a mask.
    Anneal {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel: KernelFlags,
        #[command(flatten)]
        anneal: AnnealFlags,
        #[arg(long)]
        mask: Option<String>,
        /// disk or speckle, when no mask is given.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        spacing: Option<String>,
        #[arg(long)]
        cells: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Optimal equal-mass splitting.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        kmax: Option<String>,
        /// ball or template.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        n: Option<String>,
        /// Template mask for the template family.
        #[arg(long)]
        mask: Option<String>,
    },
    /// Inscribed radius of annealed sets over a coupling sweep.
    Widthscan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        anneal: AnnealFlags,
        /// Comma-separated couplings.
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        spacing: Option<String>,
    },
    /// Search for large interpolation ratios.
    Gnsearch {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        anneal: AnnealFlags,
        #[arg(long)]
        s: Option<String>,
        /// Number of resolution epochs.
        #[arg(long)]
        budget: Option<String>,
    },
    /// CSV bundle from run directories.
    Report {
        /// Directory holding a run or runs.
        run_dir: PathBuf,
        /// Output directory, default `<run_dir>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Tabulate the Bessel-type kernel.
    Build {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        per_decade: Option<String>,
    },
}

type Flags = Vec<(&'static str, Option<String>)>;

fn kernel_flags(k: KernelFlags) -> Flags {
    vec![("kernel", k.kernel), ("kernel_file", k.kernel_file), ("s", k.s), ("rho0", k.rho0)]
}

fn anneal_flags(a: AnnealFlags) -> Flags {
    vec![
        ("steps", a.steps),
        ("seed", a.seed),
        ("t0", a.t0),
        ("cooling", a.cooling),
        ("move_radius", a.move_radius),
        ("record_every", a.record_every),
        ("refresh_every", a.refresh_every),
        ("near_field_radius", a.near_field_radius),
        ("subsample", a.subsample),
    ]
}

type Body = fn(&Params, &mut RunDir) -> nliso::Result<()>;

fn exit_code(e: &nliso::Error) -> u8 {
    match e {
        nliso::Error::Numerical { .. } => 3,
        _ => 2,
    }
}

fn execute(name: &str, common: Common, flags: Flags, body: Body) -> ExitCode {
    let params = match Params::load(common.config.as_deref(), flags) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut dir = match RunDir::create(&common.out) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = body(&params, &mut dir);
    let resolved = params.resolved();
    let err = result.as_ref().err().map(|e| e.to_string());
    if let Err(e) = dir.seal(name, &resolved, err.as_deref()) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Energy {
            common,
            kernel,
            mask,
            alpha,
            confinement,
            near_field_radius,
            subsample,
        } => {
            let mut flags = kernel_flags(kernel);
            flags.extend([
                ("mask", mask),
                ("alpha", alpha),
                ("confinement", confinement),
                ("near_field_radius", near_field_radius),
                ("subsample", subsample),
            ]);
            execute("energy", common, flags, commands::energy)
        }
        Cmd::Kernel {
            action: KernelCmd::Build { common, n, s, per_decade },
        } => execute(
            "kernel",
            common,
            vec![("n", n), ("s", s), ("per_decade", per_decade)],
            commands::kernel_build,
        ),
        Cmd::Stability { common, n, s, kmax } => execute(
            "stability",
            common,
            vec![("n", n), ("s", s), ("kmax", kmax)],
            commands::stability,
        ),
        Cmd::Anneal {
            common,
            kernel,
            anneal,
            mask,
            start,
            m,
            spacing,
            cells,
            alpha,
        } => {
            let mut flags = kernel_flags(kernel);
            flags.extend(anneal_flags(anneal));
            flags.extend([
                ("mask", mask),
                ("start", start),
                ("m", m),
                ("spacing", spacing),
                ("cells", cells),
                ("alpha", alpha),
            ]);
            execute("anneal", common, flags, commands::anneal_cmd)
        }
        Cmd::Split {
            common,
            m,
            alpha,
            s,
            kmax,
            family,
            n,
            mask,
        } => execute(
            "split",
            common,
            vec![
                ("m", m),
                ("alpha", alpha),
                ("s", s),
                ("kmax", kmax),
                ("family", family),
                ("n", n),
                ("mask", mask),
            ],
            commands::split,
        ),
        Cmd::Widthscan {
            common,
            anneal,
            alphas,
            m,
            s,
            spacing,
        } => {
            let mut flags = anneal_flags(anneal);
            flags.extend([("alphas", alphas), ("m", m), ("s", s), ("spacing", spacing)]);
            execute("widthscan", common, flags, commands::widthscan)
        }
        Cmd::Gnsearch { common, anneal, s, budget } => {
            let mut flags = anneal_flags(anneal);
            flags.extend([("s", s), ("budget", budget)]);
            execute("gnsearch", common, flags, commands::gnsearch)
        }
        Cmd::Report { run_dir, out } => {
            let out = out.unwrap_or_else(|| run_dir.join("report"));
            if !run_dir.is_dir() {
                eprintln!("error: {} is not a directory", run_dir.display());
                return ExitCode::from(2);
            }
            let found = match RunDir::create(&out).and_then(|mut dir| report::report(&run_dir, &mut dir)) {
                Ok(n) => n,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code(&e));
                }
            };
            println!("{found} run(s) reported into {}", out.display());
            ExitCode::SUCCESS
        }
    }
}
