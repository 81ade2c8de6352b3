//! File-to-file pipeline stages. Each stage reads its inputs, writes only its
//! declared outputs, and is deterministic for fixed inputs and seed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::augment::augment_dataset;
use crate::cluster::{fit_model, FitConfig};
use crate::data::{
    load_features, load_manifest, load_model, load_tokens, read_track, save_features,
    save_manifest, save_model, save_tokens, write_track,
};
use crate::error::{Error, Result};
use crate::features::phone_features;
use crate::label::{
    adapt_speaker, apply_control_k, ascending_report, label_corpus, report_to_tsv, ControlSpec,
    TestUtterance,
};
use crate::norm::fit_all_speakers;
use crate::par;
use crate::pitch::{extract_f0, read_wav, F0Track, PitchConfig};
use crate::select::{coverage_to_tsv, select_cover, CoverageResult};
use crate::types::{Origin, PhoneFeature, ProsodyModel, Utterance, DEFAULT_K};

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Cache file name for an utterance id; bytes outside `[A-Za-z0-9._+-]` are
/// percent-encoded.
pub fn cache_file_name(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 3);
    for b in id.bytes() {
        if b.is_ascii_alphanumeric() || b"._+-".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out.push_str(".f0");
    out
}

fn originals_only(utts: &[Utterance]) -> Result<()> {
    match utts.iter().find(|u| u.origin != Origin::Original) {
        Some(u) => Err(Error::validation(
            &u.id,
            "augmented record in an audio stage; augmented copies only exist as features",
        )),
        None => Ok(()),
    }
}

fn track_for(u: &Utterance, cfg: &PitchConfig) -> Result<F0Track> {
    extract_f0(&read_wav(&u.audio_path)?, cfg)
}

/// Extracts F0 for every utterance into `cache_dir`. Returns the number of tracks.
pub fn extract(manifest: &Path, cache_dir: &Path, cfg: &PitchConfig) -> Result<usize> {
    let utts = load_manifest(manifest)?;
    originals_only(&utts)?;
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    par::try_map(&utts, |u| {
        let track = track_for(u, cfg)?;
        write_track(cache_dir.join(cache_file_name(&u.id)), &track)
    })?;
    Ok(utts.len())
}

/// Per-phone features for every utterance. Tracks come from `cache_dir` when
/// present there, otherwise they are extracted from the audio.
pub fn features(
    manifest: &Path,
    cache_dir: Option<&Path>,
    cfg: &PitchConfig,
    out: &Path,
) -> Result<usize> {
    let utts = load_manifest(manifest)?;
    originals_only(&utts)?;
    let rows = par::try_map(&utts, |u| {
        let cached = cache_dir
            .map(|d| d.join(cache_file_name(&u.id)))
            .filter(|p| p.is_file());
        let track = match cached {
            Some(p) => read_track(p)?,
            None => track_for(u, cfg)?,
        };
        phone_features(u, &track)
    })?;
    let rows: Vec<PhoneFeature> = rows.into_iter().flatten().collect();
    save_features(out, &rows)?;
    Ok(rows.len())
}

pub struct AugmentPaths<'a> {
    pub manifest_in: &'a Path,
    pub manifest_out: &'a Path,
    pub features_in: &'a Path,
    pub features_out: &'a Path,
}

pub fn augment(paths: &AugmentPaths, seed: u64) -> Result<usize> {
    let utts = load_manifest(paths.manifest_in)?;
    let feats = load_features(paths.features_in)?;
    let aug = augment_dataset(&utts, &feats, seed)?;
    save_manifest(paths.manifest_out, &aug.utterances)?;
    save_features(paths.features_out, &aug.features)?;
    Ok(aug.utterances.len())
}

/// Fits and saves a model. With `manifest`, only feature rows of utterances
/// listed there are used.
pub fn fit(
    features_path: &Path,
    manifest: Option<&Path>,
    cfg: &FitConfig,
    out: &Path,
) -> Result<ProsodyModel> {
    let mut feats = load_features(features_path)?;
    if let Some(m) = manifest {
        let ids: HashSet<String> = load_manifest(m)?.into_iter().map(|u| u.id).collect();
        feats.retain(|f| ids.contains(&f.utterance_id));
    }
    let stats = fit_all_speakers(&feats)?;
    let model = fit_model(&feats, &stats, cfg)?;
    save_model(&model, out)?;
    Ok(model)
}

pub fn label(
    model_path: &Path,
    manifest: &Path,
    features_path: &Path,
    speaker: Option<&str>,
    out: &Path,
) -> Result<usize> {
    let model = load_model(model_path)?;
    let utts = load_manifest(manifest)?;
    let feats = load_features(features_path)?;
    let tokens = label_corpus(&utts, &feats, &model, speaker)?;
    save_tokens(out, &tokens)?;
    Ok(tokens.len())
}

/// Applies `spec` to every sequence. Token ranges come from `model` when
/// given, otherwise the default 15 clusters.
pub fn control(
    tokens_in: &Path,
    model: Option<&Path>,
    spec: &ControlSpec,
    out: &Path,
) -> Result<usize> {
    let (k_f0, k_dur) = match model {
        Some(p) => {
            let m = load_model(p)?;
            (m.k_f0, m.k_dur)
        }
        None => (DEFAULT_K, DEFAULT_K),
    };
    let seqs = load_tokens(tokens_in)?;
    let controlled = seqs
        .iter()
        .map(|s| apply_control_k(s, spec, k_f0, k_dur))
        .collect::<Result<Vec<_>>>()?;
    save_tokens(out, &controlled)?;
    Ok(controlled.len())
}

pub struct AdaptArgs<'a> {
    pub model_in: &'a Path,
    pub features: &'a Path,
    pub speaker: &'a str,
    /// Speaker whose feature rows are used; defaults to `speaker`.
    pub source_speaker: Option<&'a str>,
    pub replace: bool,
    pub out: &'a Path,
}

pub fn adapt(args: &AdaptArgs) -> Result<ProsodyModel> {
    let model = load_model(args.model_in)?;
    let source = args.source_speaker.unwrap_or(args.speaker);
    let feats: Vec<PhoneFeature> = load_features(args.features)?
        .into_iter()
        .filter(|f| f.speaker == source)
        .collect();
    let adapted = adapt_speaker(&model, &feats, args.speaker, args.replace)?;
    save_model(&adapted, args.out)?;
    Ok(adapted)
}

pub struct SelectArgs<'a> {
    pub manifest: &'a Path,
    pub targets: Option<&'a Path>,
    pub budget: Option<usize>,
    pub out: &'a Path,
    pub report: Option<&'a Path>,
}

/// Writes the selected ids one per line, and optionally a coverage table.
pub fn select_corpus(args: &SelectArgs) -> Result<CoverageResult> {
    let utts = load_manifest(args.manifest)?;
    let targets: Option<BTreeSet<String>> = match args.targets {
        Some(p) => Some(
            fs::read_to_string(p)
                .map_err(|e| Error::io(p, e))?
                .split_whitespace()
                .map(str::to_string)
                .collect(),
        ),
        None => None,
    };
    let result = select_cover(&utts, targets.as_ref(), args.budget);
    let mut listing = result.ordering.join("\n");
    if !listing.is_empty() {
        listing.push('\n');
    }
    write_text(args.out, &listing)?;
    if let Some(r) = args.report {
        write_text(r, &coverage_to_tsv(&result))?;
    }
    Ok(result)
}

/// Ascending cluster report over the utterances of `manifest`, using the
/// ground-truth tokens in `tokens_path`.
pub fn report_ascending(
    model_path: &Path,
    manifest: &Path,
    tokens_path: &Path,
    speaker: Option<&str>,
    out: &Path,
) -> Result<usize> {
    let model = load_model(model_path)?;
    let utts = load_manifest(manifest)?;
    let by_id: HashMap<&str, &Utterance> = utts.iter().map(|u| (u.id.as_str(), u)).collect();
    let items = load_tokens(tokens_path)?
        .into_iter()
        .map(|tokens| {
            let u = by_id.get(tokens.utterance_id.as_str()).ok_or_else(|| {
                Error::validation(
                    &tokens.utterance_id,
                    "tokens for an utterance not in the manifest",
                )
            })?;
            Ok(TestUtterance {
                speaker: u.speaker.clone(),
                phones: u.phone_labels(),
                tokens,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = ascending_report(&items, &model, speaker)?;
    write_text(out, &report_to_tsv(&rows))?;
    Ok(rows.len())
}

/// Paths of a full run rooted at one directory.
#[derive(Debug, Clone)]
pub struct RunLayout {
    pub root: PathBuf,
}

impl RunLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }
    pub fn f0_cache(&self) -> PathBuf {
        self.root.join("f0")
    }
    pub fn features(&self) -> PathBuf {
        self.root.join("features.tsv")
    }
    pub fn manifest_aug(&self) -> PathBuf {
        self.root.join("manifest.aug.jsonl")
    }
    pub fn features_aug(&self) -> PathBuf {
        self.root.join("features.aug.tsv")
    }
    pub fn model(&self) -> PathBuf {
        self.root.join("model.json")
    }
    pub fn tokens(&self) -> PathBuf {
        self.root.join("tokens.jsonl")
    }
    pub fn report(&self) -> PathBuf {
        self.root.join("report.tsv")
    }
}

/// extract → features → augment → fit → label → report, all under `layout`.
pub fn run_all(
    manifest: &Path,
    layout: &RunLayout,
    pitch: &PitchConfig,
    fit_cfg: &FitConfig,
    seed: u64,
) -> Result<ProsodyModel> {
    fs::create_dir_all(&layout.root).map_err(|e| Error::io(&layout.root, e))?;
    extract(manifest, &layout.f0_cache(), pitch)?;
    features(
        manifest,
        Some(&layout.f0_cache()),
        pitch,
        &layout.features(),
    )?;
    augment(
        &AugmentPaths {
            manifest_in: manifest,
            manifest_out: &layout.manifest_aug(),
            features_in: &layout.features(),
            features_out: &layout.features_aug(),
        },
        seed,
    )?;
    let cfg = FitConfig {
        kmeans: crate::cluster::KMeansConfig {
            seed,
            ..fit_cfg.kmeans
        },
        ..*fit_cfg
    };
    let model = fit(&layout.features_aug(), None, &cfg, &layout.model())?;
    label(
        &layout.model(),
        manifest,
        &layout.features(),
        None,
        &layout.tokens(),
    )?;
    report_ascending(
        &layout.model(),
        manifest,
        &layout.tokens(),
        None,
        &layout.report(),
    )?;
    Ok(model)
}
