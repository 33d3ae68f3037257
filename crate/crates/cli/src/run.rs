//! Subcommand wiring.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use pathsum::bell::{
    bell_report, AmplitudeBackend, BellReport, CorrelationBackend, CorrelationTable, EventBackend,
    SqmBackend, ToyBackend, CHSH_STANDARD_SETTINGS, THREE_SETTINGS,
};
use pathsum::checks::{check_all, render_report};
use pathsum::events::{fidelity_report, write_fidelity_csv, write_fidelity_json, GammaConfig};
use pathsum::mzi::{ifm_report, mzi_disturbed, mzi_probabilities, BlockedArm, IfmTally, MziSpec};
use pathsum::paths::{symmetric_mirror_family, write_cornu_csv, MIRROR_DEMO_WAVELENGTH};
use pathsum::rarity::{rt_sweep_with_geometry, write_rt_sweep_csv, RtGeometry};
use pathsum::toybell::{all_setting_pairs, toy_report, write_toy_csv, ToySetting};
use pathsum::SimError;

use crate::config::{resolve_out, resolve_seed, FileConfig, DEFAULT_THREADS};
use crate::output::Sink;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(SimError),
    CheckFailed,
    Io(std::io::Error),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BlockArg {
    None,
    Upper,
    Lower,
    Both,
}

impl From<BlockArg> for BlockedArm {
    fn from(b: BlockArg) -> Self {
        match b {
            BlockArg::None => BlockedArm::None,
            BlockArg::Upper => BlockedArm::Upper,
            BlockArg::Lower => BlockedArm::Lower,
            BlockArg::Both => BlockedArm::Both,
        }
    }
}

/// Deterministic path-phasor interference and correlation simulator.
///
/// Every run is reproducible: identical subcommand, flags, and seed give
/// byte-identical output.
#[derive(Parser, Debug)]
#[command(name = "pathsum", version, about)]
pub struct Cli {
    /// Master seed; all trial randomness derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker-thread cap for Monte Carlo runs (never affects results).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output destination; "-" or omitted writes to stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Output format where a structured form exists.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// JSON file supplying any flag; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Head-to-tail trace of the symmetric mirror fan
    /// (CSV: index,partial_re,partial_im,path_phase).
    Cornu {
        /// Number of reflection paths swept along the mirror.
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        wavelength: Option<f64>,
    },
    /// Square two-beamsplitter interferometer probabilities, with optional
    /// arm blocking or a which-path probe.
    Mzi {
        /// Side length of the square, meters.
        #[arg(long)]
        side: Option<f64>,
        #[arg(long)]
        wavelength: Option<f64>,
        /// Block an arm (a detonating object in that arm).
        #[arg(long, value_enum)]
        block: Option<BlockArg>,
        /// Observe which arm the photon takes (destroys interference).
        #[arg(long)]
        probe: bool,
    },
    /// Bomb-testing tallies: certify live detonators without triggering them.
    Ifm {
        /// Number of bombs to test.
        #[arg(long)]
        trials: Option<u64>,
        /// Fraction of bombs that are live.
        #[arg(long)]
        live_fraction: Option<f64>,
    },
    /// Classical twin clock-pointer correlations, analytic and Monte Carlo
    /// (CSV: alpha,beta,p_analytic,p_mc,n_trials,abs_err).
    Toy {
        /// Left setting in radians; must be one of 0, 2π/3, 4π/3.
        #[arg(long)]
        alpha: Option<f64>,
        /// Right setting in radians; must be one of 0, 2π/3, 4π/3.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Two-particle interferometer joint probability via path sums,
    /// cross-checked against the matrix oracle
    /// (CSV: alpha,beta,p_same_sp,p_same_sqm,abs_diff).
    Rt {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Source points per family.
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        wavelength: Option<f64>,
        /// Sweep an N×N settings grid instead of a single pair.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Event-level trials under the local decision rule, compared against
    /// the amplitude prediction
    /// (CSV: alpha,beta,p_event,p_eq7,abs_dev,n,degenerate_count).
    Events {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Trials per settings pair.
        #[arg(long)]
        trials: Option<u64>,
        /// Evaluate an N×N settings grid instead of a single pair.
        #[arg(long)]
        grid: Option<usize>,
        /// Left device rotation.
        #[arg(long)]
        gamma_left: Option<f64>,
        /// Right device rotation.
        #[arg(long)]
        gamma_right: Option<f64>,
        /// Redraw both device rotations uniformly each trial.
        #[arg(long)]
        redraw_gamma: bool,
    },
    /// Inequality summary per correlation backend (JSON), or the full
    /// correlation table (CSV: alpha,beta,backend,p_same,e).
    Bell {
        /// Comma-separated backends: amplitude, sqm, toy, event.
        #[arg(long)]
        backends: Option<String>,
        /// Trials for the event backend.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Run the full self-check suite; exit 3 on any failure.
    Check {
        /// Emit the machine-readable result list (same as --format json).
        #[arg(long)]
        json: bool,
        /// Corrupt the interferometer normalization to prove the suite can fail.
        #[arg(long, hide = true)]
        negative_control: bool,
    },
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = resolve_seed(cli.seed, &file)?;
    let threads = cli
        .threads
        .or(file.threads)
        .unwrap_or(DEFAULT_THREADS)
        .max(1);
    let sink = Sink::from(resolve_out(cli.out.as_deref(), &file));
    let format = cli.format.or_else(|| {
        file.format.as_deref().and_then(|f| match f {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        })
    });

    let bytes = match cli.command {
        Command::Cornu { paths, wavelength } => {
            let n = paths.or(file.paths).unwrap_or(10_000);
            let lambda = wavelength.or(file.wavelength).unwrap_or(MIRROR_DEMO_WAVELENGTH);
            let stream = symmetric_mirror_family(n, lambda)?;
            let mut buf = Vec::new();
            write_cornu_csv(&stream, &mut buf)?;
            buf
        }

        Command::Mzi {
            side,
            wavelength,
            block,
            probe,
        } => {
            let spec = MziSpec {
                side_length: side.or(file.side).unwrap_or(0.1),
                wavelength: wavelength.or(file.wavelength).unwrap_or(1e-6),
                blocked_arm: block.map(Into::into).unwrap_or(BlockedArm::None),
                which_path_probe: probe,
            };
            render_mzi(&spec, format)?
        }

        Command::Ifm {
            trials,
            live_fraction,
        } => {
            let n = trials.or(file.trials).unwrap_or(1_000_000);
            let live = live_fraction.or(file.live_fraction).unwrap_or(1.0);
            let tally = ifm_report(n, live, seed, threads)?;
            render_ifm(&tally, format)?
        }

        Command::Toy {
            alpha,
            beta,
            trials,
        } => {
            let n = trials.or(file.trials).unwrap_or(1_000_000);
            let pairs = match (alpha.or(file.alpha), beta.or(file.beta)) {
                (None, None) => all_setting_pairs(),
                (a, b) => {
                    let a = ToySetting::from_radians(a.unwrap_or(0.0), 1e-3)?;
                    let b = ToySetting::from_radians(b.unwrap_or(0.0), 1e-3)?;
                    vec![(a, b)]
                }
            };
            let rows = toy_report(&pairs, n, seed, threads)?;
            match format {
                Some(Format::Json) => json_bytes(&rows)?,
                _ => {
                    let mut buf = Vec::new();
                    write_toy_csv(&rows, &mut buf)?;
                    buf
                }
            }
        }

        Command::Rt {
            alpha,
            beta,
            paths,
            wavelength,
            grid,
        } => {
            let n = paths.or(file.paths).unwrap_or(512);
            let mut geometry = RtGeometry::standard();
            if let Some(lambda) = wavelength.or(file.wavelength) {
                geometry.wavelength = lambda;
            }
            let pairs = match grid.or(file.grid) {
                Some(points) if points > 0 => grid_pairs(points),
                _ => vec![(
                    alpha.or(file.alpha).unwrap_or(0.0),
                    beta.or(file.beta).unwrap_or(0.0),
                )],
            };
            let rows = rt_sweep_with_geometry(&pairs, n, geometry)?;
            match format {
                Some(Format::Json) => json_bytes(&rows)?,
                _ => {
                    let mut buf = Vec::new();
                    write_rt_sweep_csv(&rows, &mut buf)?;
                    buf
                }
            }
        }

        Command::Events {
            alpha,
            beta,
            trials,
            grid,
            gamma_left,
            gamma_right,
            redraw_gamma,
        } => {
            let n = trials.or(file.trials).unwrap_or(100_000);
            let gammas = GammaConfig {
                left: gamma_left.or(file.gamma_left).unwrap_or(0.0),
                right: gamma_right.or(file.gamma_right).unwrap_or(0.0),
                redraw_per_trial: redraw_gamma,
            };
            let pairs = match grid.or(file.grid) {
                Some(points) if points > 0 => grid_pairs(points),
                _ => vec![(
                    alpha.or(file.alpha).unwrap_or(0.0),
                    beta.or(file.beta).unwrap_or(0.0),
                )],
            };
            let report = fidelity_report(&pairs, n, seed, gammas, threads)?;
            let mut buf = Vec::new();
            match format {
                Some(Format::Json) => write_fidelity_json(&report, &mut buf)?,
                _ => write_fidelity_csv(&report, &mut buf)?,
            }
            buf
        }

        Command::Bell { backends, trials } => {
            let names = backends.unwrap_or_else(|| "amplitude,sqm,toy,event".into());
            let event_trials = trials.or(file.trials).unwrap_or(100_000);
            render_bell(&names, event_trials, seed, threads, format)?
        }

        Command::Check {
            json,
            negative_control,
        } => {
            let report = check_all(seed, threads, negative_control);
            let bytes = if json || format == Some(Format::Json) {
                json_bytes(&report)?
            } else {
                render_report(&report).into_bytes()
            };
            sink.write_all(&bytes)?;
            if !report.all_passed {
                return Err(CliError::CheckFailed);
            }
            return Ok(());
        }
    };

    sink.write_all(&bytes)
}

fn grid_pairs(points: usize) -> Vec<(f64, f64)> {
    let settings: Vec<f64> = (0..points)
        .map(|k| k as f64 * std::f64::consts::TAU / points as f64)
        .collect();
    settings
        .iter()
        .flat_map(|&a| settings.iter().map(move |&b| (a, b)))
        .collect()
}

fn render_mzi(spec: &MziSpec, format: Option<Format>) -> Result<Vec<u8>, CliError> {
    let (p_d1, p_d2, p_rest) = if spec.blocked_arm == BlockedArm::None && !spec.which_path_probe {
        let (p1, p2) = mzi_probabilities(spec)?;
        (p1, p2, 0.0)
    } else {
        mzi_disturbed(spec)?
    };
    Ok(match format {
        Some(Format::Json) => json_bytes(&serde_json::json!({
            "p_d1": p_d1,
            "p_d2": p_d2,
            "p_absorbed_or_flagged": p_rest,
        }))?,
        Some(Format::Csv) => {
            format!("p_d1,p_d2,p_absorbed_or_flagged\n{p_d1},{p_d2},{p_rest}\n").into_bytes()
        }
        None => {
            let mut text = String::new();
            let _ = writeln!(text, "P(D1) = {p_d1}");
            let _ = writeln!(text, "P(D2) = {p_d2}");
            let _ = writeln!(text, "P(absorbed or flagged) = {p_rest}");
            text.into_bytes()
        }
    })
}

fn render_ifm(tally: &IfmTally, format: Option<Format>) -> Result<Vec<u8>, CliError> {
    Ok(match format {
        Some(Format::Json) => json_bytes(tally)?,
        Some(Format::Csv) => format!(
            "n_bombs,exploded,certified_live_via_d1,d2_inconclusive,dud_d2\n{},{},{},{},{}\n",
            tally.n_bombs,
            tally.exploded,
            tally.certified_live_via_d1,
            tally.d2_inconclusive,
            tally.dud_d2
        )
        .into_bytes(),
        None => {
            let mut text = String::new();
            let _ = writeln!(text, "bombs tested            = {}", tally.n_bombs);
            let _ = writeln!(
                text,
                "exploded                = {} ({:.4})",
                tally.exploded,
                tally.exploded_fraction()
            );
            let _ = writeln!(
                text,
                "certified live via D1   = {} ({:.4})",
                tally.certified_live_via_d1,
                tally.certified_fraction()
            );
            let _ = writeln!(text, "D2 inconclusive         = {}", tally.d2_inconclusive);
            let _ = writeln!(text, "dud, D2 as always       = {}", tally.dud_d2);
            text.into_bytes()
        }
    })
}

fn render_bell(
    names: &str,
    event_trials: u64,
    seed: u64,
    threads: usize,
    format: Option<Format>,
) -> Result<Vec<u8>, CliError> {
    let mut backends: Vec<Box<dyn CorrelationBackend>> = Vec::new();
    for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "amplitude" => backends.push(Box::new(AmplitudeBackend::default())),
            "sqm" => backends.push(Box::new(SqmBackend)),
            "toy" => backends.push(Box::new(ToyBackend)),
            "event" => backends.push(Box::new(EventBackend {
                trials: event_trials,
                seed,
                gammas: GammaConfig::default(),
                threads,
            })),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown backend {other:?} (expected amplitude, sqm, toy, event)"
                )))
            }
        }
    }
    if backends.is_empty() {
        return Err(CliError::Usage("no backends selected".into()));
    }

    match format {
        Some(Format::Csv) => {
            // Full correlation table over the standard four settings pairs
            // plus the nine three-setting pairs.
            let [a, ap, b, bp] = CHSH_STANDARD_SETTINGS;
            let mut pairs = vec![(a, b), (a, bp), (ap, b), (ap, bp)];
            for &x in &THREE_SETTINGS {
                for &y in &THREE_SETTINGS {
                    pairs.push((x, y));
                }
            }
            let mut table = CorrelationTable::default();
            for backend in &backends {
                table.extend_from_backend(backend.as_ref(), &pairs)?;
            }
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            Ok(buf)
        }
        _ => {
            let mut reports: Vec<BellReport> = Vec::new();
            for backend in &backends {
                // Grid search over a Monte Carlo backend would resample
                // noise, so the maximum is only searched for analytic ones.
                let search_max = backend.label() != "event";
                reports.push(bell_report(backend.as_ref(), search_max)?);
            }
            json_bytes(&reports)
        }
    }
}
