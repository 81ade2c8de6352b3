use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prosotok::cluster::{FitConfig, KMeansConfig};
use prosotok::label::ControlSpec;
use prosotok::pipeline::{self, AdaptArgs, AugmentPaths, SelectArgs};
use prosotok::pitch::PitchConfig;
use prosotok::synth::{generate, write_corpus, ToyConfig};
use prosotok::{Error, DEFAULT_K};

/// Phoneme-level prosody tokens: F0 extraction, speaker normalisation,
/// augmentation, clustering, labelling and control.
#[derive(Debug, Parser)]
#[command(name = "prosotok", version)]
struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract framewise F0 for every utterance into a cache directory.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        f0_cache: PathBuf,
        #[command(flatten)]
        pitch: PitchArgs,
    },
    /// Compute per-phone mean F0 and duration.
    Features {
        #[arg(long)]
        manifest: PathBuf,
        /// Read tracks from this cache when present instead of re-extracting.
        #[arg(long)]
        f0_cache: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pitch: PitchArgs,
    },
    /// Add one pitch or rate transformed copy of every utterance.
    Augment {
        #[arg(long, env = "PROSOTOK_SEED")]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        features_in: PathBuf,
        #[arg(long)]
        features_out: PathBuf,
    },
    /// Fit F0 centroids and duration intervals.
    Fit {
        #[arg(long, default_value_t = DEFAULT_K)]
        k_f0: usize,
        #[arg(long, default_value_t = DEFAULT_K)]
        k_dur: usize,
        #[arg(long, env = "PROSOTOK_SEED")]
        seed: u64,
        #[arg(long)]
        features: PathBuf,
        /// Fit speaker statistics and clusters only over utterances listed in --manifest.
        #[arg(long, requires = "manifest")]
        stats_from_manifest: bool,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign F0 and duration tokens to every phone.
    Label {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Use this speaker's statistics instead of each utterance's own.
        #[arg(long)]
        speaker: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shift or pin token sequences.
    Control(ControlArgs),
    /// Add a speaker to a fitted model without refitting its clusters.
    Adapt {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        speaker: String,
        /// Feature table holding the new speaker's rows.
        #[arg(long)]
        features: PathBuf,
        /// Take rows of this speaker from --features (default: --speaker).
        #[arg(long)]
        source_speaker: Option<String>,
        /// Overwrite an existing speaker of the same name.
        #[arg(long)]
        replace: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Order utterances for maximal phone coverage.
    SelectCorpus {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
        /// Whitespace-separated target phones (default: all phones in the corpus).
        #[arg(long)]
        targets: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluation reports.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Write a synthetic multi-speaker corpus (audio, alignments, manifest).
    ToyCorpus {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, env = "PROSOTOK_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        utterances_per_speaker: usize,
    },
}

#[derive(Debug, Subcommand)]
enum ReportCommand {
    /// Mean decoded F0 and duration with every token fixed to each cluster id.
    Ascending {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        tokens: PathBuf,
        /// Decode with this speaker's statistics instead of each utterance's own.
        #[arg(long)]
        speaker: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ControlArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Model whose cluster counts bound the tokens (default: 15 per feature).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "fix_f0")]
    f0_offset: Option<i32>,
    #[arg(long)]
    fix_f0: Option<usize>,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "fix_dur")]
    dur_offset: Option<i32>,
    #[arg(long)]
    fix_dur: Option<usize>,
}

#[derive(Debug, Args)]
struct PitchArgs {
    #[arg(long, default_value_t = 50.0)]
    f_min: f64,
    #[arg(long, default_value_t = 600.0)]
    f_max: f64,
    #[arg(long, default_value_t = 0.040)]
    frame_s: f64,
    #[arg(long, default_value_t = 0.010)]
    hop_s: f64,
    #[arg(long, default_value_t = 0.15)]
    yin_threshold: f64,
}

impl From<&PitchArgs> for PitchConfig {
    fn from(a: &PitchArgs) -> Self {
        PitchConfig {
            f_min: a.f_min,
            f_max: a.f_max,
            frame_s: a.frame_s,
            hop_s: a.hop_s,
            yin_threshold: a.yin_threshold,
        }
    }
}

fn run(cli: Cli) -> prosotok::Result<String> {
    Ok(match cli.command {
        Command::Extract {
            manifest,
            f0_cache,
            pitch,
        } => {
            let n = pipeline::extract(&manifest, &f0_cache, &(&pitch).into())?;
            format!("extracted {n} tracks into {}", f0_cache.display())
        }
        Command::Features {
            manifest,
            f0_cache,
            out,
            pitch,
        } => {
            let n = pipeline::features(&manifest, f0_cache.as_deref(), &(&pitch).into(), &out)?;
            format!("wrote {n} phone records to {}", out.display())
        }
        Command::Augment {
            seed,
            input,
            out,
            features_in,
            features_out,
        } => {
            let n = pipeline::augment(
                &AugmentPaths {
                    manifest_in: &input,
                    manifest_out: &out,
                    features_in: &features_in,
                    features_out: &features_out,
                },
                seed,
            )?;
            format!("wrote {n} utterances to {}", out.display())
        }
        Command::Fit {
            k_f0,
            k_dur,
            seed,
            features,
            stats_from_manifest,
            manifest,
            restarts,
            max_iter,
            tol,
            out,
        } => {
            let cfg = FitConfig {
                k_f0,
                k_dur,
                kmeans: KMeansConfig {
                    restarts,
                    max_iter,
                    tol,
                    seed,
                },
            };
            let restrict = if stats_from_manifest {
                manifest.as_deref()
            } else {
                None
            };
            let m = pipeline::fit(&features, restrict, &cfg, &out)?;
            format!(
                "fitted {} F0 centroids, {} phone interval sets, {} speakers -> {}",
                m.f0_centroids.len(),
                m.dur_intervals.len(),
                m.speakers.len(),
                out.display()
            )
        }
        Command::Label {
            model,
            manifest,
            features,
            speaker,
            out,
        } => {
            let n = pipeline::label(&model, &manifest, &features, speaker.as_deref(), &out)?;
            format!("labelled {n} utterances -> {}", out.display())
        }
        Command::Control(a) => {
            let spec = ControlSpec::from_parts(a.f0_offset, a.fix_f0, a.dur_offset, a.fix_dur)?;
            let n = pipeline::control(&a.input, a.model.as_deref(), &spec, &a.out)?;
            format!("wrote {n} controlled sequences to {}", a.out.display())
        }
        Command::Adapt {
            model,
            speaker,
            features,
            source_speaker,
            replace,
            out,
        } => {
            let m = pipeline::adapt(&AdaptArgs {
                model_in: &model,
                features: &features,
                speaker: &speaker,
                source_speaker: source_speaker.as_deref(),
                replace,
                out: &out,
            })?;
            let s = m.speakers[&speaker];
            format!(
                "added speaker `{speaker}` (mu={} Hz, sigma={} Hz) -> {}",
                s.mu,
                s.sigma,
                out.display()
            )
        }
        Command::SelectCorpus {
            manifest,
            budget,
            targets,
            out,
            report,
        } => {
            let r = pipeline::select_corpus(&SelectArgs {
                manifest: &manifest,
                targets: targets.as_deref(),
                budget,
                out: &out,
                report: report.as_deref(),
            })?;
            match r.cover_prefix_len {
                Some(n) => format!(
                    "{} utterances selected; full coverage after {n}",
                    r.ordering.len()
                ),
                None => format!(
                    "{} utterances selected; uncovered: {}",
                    r.ordering.len(),
                    r.uncovered.iter().cloned().collect::<Vec<_>>().join(" ")
                ),
            }
        }
        Command::Report(ReportCommand::Ascending {
            model,
            manifest,
            tokens,
            speaker,
            out,
        }) => {
            let n =
                pipeline::report_ascending(&model, &manifest, &tokens, speaker.as_deref(), &out)?;
            format!("wrote {n} rows to {}", out.display())
        }
        Command::ToyCorpus {
            out_dir,
            seed,
            utterances_per_speaker,
        } => {
            let cfg = ToyConfig {
                seed,
                utterances_per_speaker,
                ..Default::default()
            };
            let manifest = write_corpus(&out_dir, &generate(&cfg), cfg.sample_rate)?;
            format!("wrote {}", manifest.display())
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        prosotok::par::set_jobs(jobs);
    }
    match run(cli) {
        Ok(msg) => {
            eprintln!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
