use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use layerscat::cli::{
    convergence_sweep, exit_code, greens_table, parse_grid, preset, run, write_sweep_csv, IncidentSpec, RunConfig,
    PRESET_NAMES,
};
use layerscat::error::{Error, Result};
use layerscat::green::Point2;

#[derive(Parser)]
#[command(name = "layerscat", version, about = "Rough-surface scattering below a two-layer interface")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one configuration and print the report as JSON.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for several N and print a convergence table as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated ascending list, e.g. 8,16,32,64.
        #[arg(long = "N", alias = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the layered Green function on a grid.
    Greens {
        #[arg(long)]
        config: PathBuf,
        /// x1min:x1max:n1,x2min:x2max:n2
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Source point "y1,y2"; defaults to the config's point source or (0,-1).
        #[arg(long, allow_hyphen_values = true)]
        source: Option<String>,
    },
    /// Built-in example configurations.
    Presets {
        #[command(subcommand)]
        action: PresetCmd,
    },
}

#[derive(Subcommand)]
enum PresetCmd {
    List,
    Run {
        name: String,
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn solve_and_print(mut cfg: RunConfig, n: Option<usize>, out: Option<PathBuf>) -> Result<()> {
    if let Some(n) = n {
        cfg.n = n;
    }
    if out.is_some() {
        cfg.output.dir = out;
    }
    cfg.validate()?;
    let report = run(&cfg)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn parse_point(s: &str) -> Result<Point2> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Config(format!("source: expected y1,y2, got '{s}'")))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("source: bad number '{v}'")));
    Ok(Point2::new(p(a)?, p(b)?))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve { config, n, out } => solve_and_print(RunConfig::load(&config)?, n, out),
        Cmd::Sweep { config, n, out } => {
            let cfg = RunConfig::load(&config)?;
            let rows = convergence_sweep(&cfg, &n)?;
            let stdout = std::io::stdout();
            write_sweep_csv(&mut stdout.lock(), &cfg, &rows)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let mut f = std::fs::File::create(dir.join("sweep.csv"))?;
                write_sweep_csv(&mut f, &cfg, &rows)?;
                f.flush()?;
            }
            Ok(())
        }
        Cmd::Greens { config, grid, source } => {
            let cfg = RunConfig::load(&config)?;
            let pts = parse_grid(&grid)?;
            let src = match (source, &cfg.incident) {
                (Some(s), _) => parse_point(&s)?,
                (None, IncidentSpec::Point { y0 }) => Point2::new(y0[0], y0[1]),
                (None, _) => Point2::new(0.0, -1.0),
            };
            let stdout = std::io::stdout();
            greens_table(&cfg, src, &pts, &mut stdout.lock())
        }
        Cmd::Presets { action: PresetCmd::List } => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Cmd::Presets { action: PresetCmd::Run { name, n, out } } => solve_and_print(preset(&name)?, n, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
