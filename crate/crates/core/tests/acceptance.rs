//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use prosotok::augment::{augment_dataset, semitone_factor, Transform, TRANSFORMS};
use prosotok::cluster::{balanced_intervals, kmeans_1d, nearest, FitConfig, KMeansConfig};
use prosotok::data::{load_features, load_manifest, load_model, load_tokens, model_to_json};
use prosotok::label::{
    apply_control, ascending_report, label_corpus, AscendingRow, ControlSpec, TestUtterance,
};
use prosotok::norm::{denormalize, fit_all_speakers, normalize};
use prosotok::pipeline::{run_all, RunLayout};
use prosotok::pitch::{extract_f0, PitchConfig, Waveform};
use prosotok::select::{prefix_cover_len, select_cover};
use prosotok::synth::{generate, toy_features, write_corpus, ToyConfig, ToyUtterance};
use prosotok::TokenSequence;

#[derive(Debug)]
struct Fail(String);

impl From<String> for Fail {
    fn from(s: String) -> Self {
        Fail(s)
    }
}

impl From<prosotok::Error> for Fail {
    fn from(e: prosotok::Error) -> Self {
        Fail(e.to_string())
    }
}

type Outcome = Result<String, Fail>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Fail(format!($($msg)+)));
        }
    };
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), Fail> {
    ensure!(
        elapsed.as_secs_f64() < limit_s,
        "took {:.2?}, limit {limit_s} s",
        elapsed
    );
    Ok(())
}

fn toy_config() -> ToyConfig {
    ToyConfig {
        utterances_per_speaker: 40,
        ..Default::default()
    }
}

fn toy_corpus() -> &'static [ToyUtterance] {
    static CORPUS: OnceLock<Vec<ToyUtterance>> = OnceLock::new();
    CORPUS.get_or_init(|| generate(&toy_config()))
}

/// The toy corpus on disk plus two independent full-pipeline runs over it.
struct Runs {
    _dir: tempfile::TempDir,
    manifest: PathBuf,
    a: RunLayout,
    b: RunLayout,
}

const SEED: u64 = 20240601;

fn runs() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = toy_config();
        let manifest =
            write_corpus(&dir.path().join("corpus"), toy_corpus(), cfg.sample_rate).unwrap();
        let a = RunLayout::new(dir.path().join("run_a"));
        let b = RunLayout::new(dir.path().join("run_b"));
        for layout in [&a, &b] {
            run_all(
                &manifest,
                layout,
                &PitchConfig::default(),
                &FitConfig::default(),
                SEED,
            )
            .unwrap();
        }
        Runs {
            _dir: dir,
            manifest,
            a,
            b,
        }
    })
}

fn normalization() -> Outcome {
    let feats = toy_features(toy_corpus());
    let t = Instant::now();
    let stats = fit_all_speakers(&feats)?;
    let mut worst_mean = 0.0f64;
    let mut worst_std = 0.0f64;
    let mut worst_roundtrip = 0.0f64;
    for (name, s) in &stats {
        let hz: Vec<f64> = feats
            .iter()
            .filter(|f| &f.speaker == name)
            .filter_map(|f| f.f0_hz)
            .collect();
        ensure!(
            hz.len() >= 100,
            "speaker {name} has only {} voiced phones",
            hz.len()
        );
        let z: Vec<f64> = hz.iter().map(|&v| normalize(v, s)).collect();
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        worst_mean = worst_mean.max(mean.abs());
        worst_std = worst_std.max((std - 1.0).abs());
        for (&v, &zz) in hz.iter().zip(&z) {
            worst_roundtrip = worst_roundtrip.max((denormalize(zz, s) - v).abs() / v.abs());
        }
    }
    let elapsed = t.elapsed();
    ensure!(worst_mean <= 1e-9, "normalised mean off by {worst_mean:e}");
    ensure!(worst_std <= 1e-9, "normalised std off by {worst_std:e}");
    ensure!(
        worst_roundtrip <= 1e-9,
        "round trip off by {worst_roundtrip:e}"
    );
    within(elapsed, 1.0)?;
    Ok(format!(
        "{} speakers; |mean|≤{worst_mean:.1e}, |std-1|≤{worst_std:.1e}, roundtrip≤{worst_roundtrip:.1e}; {elapsed:.2?}",
        stats.len()
    ))
}

fn exact_wcss(groups: &[Vec<i64>]) -> Ratio<i128> {
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let s: i128 = g.iter().map(|&v| i128::from(v)).sum();
            let sq: i128 = g.iter().map(|&v| i128::from(v) * i128::from(v)).sum();
            Ratio::from_integer(sq) - Ratio::new(s * s, g.len() as i128)
        })
        .sum()
}

/// Minimum WCSS over every split of `sorted` into `k` non-empty contiguous runs.
fn best_contiguous(sorted: &[i64], k: usize) -> Ratio<i128> {
    if k == 1 {
        return exact_wcss(&[sorted.to_vec()]);
    }
    (1..=sorted.len() - (k - 1))
        .map(|cut| exact_wcss(&[sorted[..cut].to_vec()]) + best_contiguous(&sorted[cut..], k - 1))
        .min()
        .unwrap()
}

fn kmeans_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = KMeansConfig {
        restarts: 50,
        seed: 11,
        ..Default::default()
    };
    let t = Instant::now();
    let mut instances = 0;
    while instances < 200 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=3);
        let values: Vec<i64> = (0..n).map(|_| rng.random_range(-20..=20)).collect();
        if values.iter().collect::<BTreeSet<_>>().len() < k {
            continue;
        }
        instances += 1;
        let floats: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let fit = kmeans_1d(&floats, k, &cfg).map_err(|e| e.to_string())?;
        let mut groups = vec![Vec::new(); k];
        for &v in &values {
            groups[nearest(&fit.centroids, v as f64)].push(v);
        }
        let mut sorted = values.clone();
        sorted.sort();
        let got = exact_wcss(&groups);
        let want = best_contiguous(&sorted, k);
        ensure!(
            got == want,
            "instance {values:?} k={k}: k-means WCSS {got} but optimum {want}"
        );
    }
    let elapsed = t.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!(
        "200/200 instances optimal (exact rational WCSS); {elapsed:.2?}"
    ))
}

fn balanced_clustering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = 15;
    let t = Instant::now();
    let mut total = 0usize;
    for case in 0..500 {
        let n = rng.random_range(k..=10_000);
        let sigma = rng.random_range(0.1..1.0);
        let dist = LogNormal::new(-2.5, sigma).unwrap();
        let values: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        total += n;
        let iv = balanced_intervals(&values, k).map_err(|e| e.to_string())?;
        ensure!(iv.k() == k, "case {case}: {} intervals", iv.k());

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut counts = vec![0usize; k];
        let mut group = vec![0usize; n];
        let sizes = prosotok::cluster::group_sizes(n, k);
        let mut pos = 0;
        for (g, &size) in sizes.iter().enumerate() {
            for &i in &order[pos..pos + size] {
                group[i] = g;
            }
            pos += size;
        }
        for (i, &v) in values.iter().enumerate() {
            let label = iv.index_of(v);
            ensure!(
                label == group[i],
                "case {case}: value {v} of group {} labelled {label}",
                group[i]
            );
            counts[label] += 1;
        }
        let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
        ensure!(spread <= 1, "case {case}: group sizes {counts:?}");
        ensure!(
            iv.representatives.windows(2).all(|w| w[0] < w[1]),
            "case {case}: representatives not ascending"
        );
    }
    let elapsed = t.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!("500 multisets, {total} values; {elapsed:.2?}"))
}

fn augmentation() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = generate(&ToyConfig {
        utterances_per_speaker: 10,
        ..Default::default()
    });
    let manifest = write_corpus(dir.path(), &corpus, 16_000).map_err(|e| e.to_string())?;
    let feats_in = dir.path().join("features.tsv");
    prosotok::data::save_features(&feats_in, &toy_features(&corpus))?;
    let manifest_out = dir.path().join("manifest.aug.jsonl");
    let feats_out = dir.path().join("features.aug.tsv");
    prosotok::pipeline::augment(
        &prosotok::pipeline::AugmentPaths {
            manifest_in: &manifest,
            manifest_out: &manifest_out,
            features_in: &feats_in,
            features_out: &feats_out,
        },
        SEED,
    )?;
    let before = load_manifest(&manifest)?;
    let after = load_manifest(&manifest_out)?;
    ensure!(
        after.len() == 2 * before.len(),
        "manifest {} -> {}",
        before.len(),
        after.len()
    );

    let range = |rows: &[prosotok::PhoneFeature],
                 f: &dyn Fn(&prosotok::PhoneFeature) -> Option<f64>| {
        rows.iter()
            .filter_map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let orig = load_features(&feats_in)?;
    let aug = load_features(&feats_out)?;
    let f0 = |r: &prosotok::PhoneFeature| r.f0_hz;
    let dur = |r: &prosotok::PhoneFeature| Some(r.duration_s);
    for (name, a, b) in [
        ("f0", range(&orig, &f0), range(&aug, &f0)),
        ("duration", range(&orig, &dur), range(&aug, &dur)),
    ] {
        ensure!(
            b.0 <= a.0 && b.1 >= a.1,
            "{name} range {a:?} contracted to {b:?}"
        );
    }

    // repeated in memory over many seeds: every transform shows up
    let utts: Vec<_> = corpus.iter().map(|t| t.utterance.clone()).collect();
    let feats = toy_features(&corpus);
    let mut seen = BTreeSet::new();
    for seed in 0..20 {
        let a = augment_dataset(&utts, &feats, seed)?;
        ensure!(
            a.utterances.len() == 2 * utts.len(),
            "seed {seed}: not doubled"
        );
        for u in &a.utterances[utts.len()..] {
            if let prosotok::Origin::Augmented(t) = &u.origin {
                seen.insert(t.clone());
            }
        }
    }
    ensure!(
        seen.len() == TRANSFORMS.len(),
        "only {} transforms used",
        seen.len()
    );

    let mut worst = 0.0f64;
    for k in [-6, -4, -2, 2, 4, 6] {
        let want = 2f64.powf(f64::from(k) / 12.0);
        worst = worst.max((semitone_factor(k) - want).abs());
        worst = worst.max((Transform::PitchShift(k).f0_factor() - want).abs());
    }
    ensure!(worst <= 1e-12, "pitch factor off by {worst:e}");
    let rate = Transform::Rate(0.80).apply_duration(1.0);
    ensure!(rate == 1.25, "Rate(0.80) duration factor {rate}");
    Ok(format!(
        "{} -> {} utterances; {} transforms seen; pitch factors ≤{worst:.1e}; Rate(0.80) factor {rate}",
        before.len(),
        after.len(),
        seen.len()
    ))
}

fn per_speaker_reports() -> Result<BTreeMap<String, Vec<AscendingRow>>, Fail> {
    let r = runs();
    let model = load_model(r.a.model())?;
    let utts = load_manifest(&r.manifest)?;
    let tokens = load_tokens(r.a.tokens())?;
    let mut items: BTreeMap<String, Vec<TestUtterance>> = BTreeMap::new();
    for (u, t) in utts.iter().zip(tokens) {
        ensure!(u.id == t.utterance_id, "tokens out of manifest order");
        items
            .entry(u.speaker.clone())
            .or_default()
            .push(TestUtterance {
                speaker: u.speaker.clone(),
                phones: u.phone_labels(),
                tokens: t,
            });
    }
    items
        .iter()
        .map(|(s, it)| Ok((s.clone(), ascending_report(it, &model, None)?)))
        .collect()
}

fn ascending_protocol() -> Outcome {
    for t in toy_corpus()
        .iter()
        .map(|t| &t.utterance.speaker)
        .collect::<BTreeSet<_>>()
    {
        let phones: usize = toy_corpus()
            .iter()
            .filter(|u| &u.utterance.speaker == t)
            .map(|u| u.utterance.num_phones())
            .sum();
        ensure!(phones >= 200, "speaker {t} has only {phones} phones");
    }
    let reports = per_speaker_reports()?;
    ensure!(reports.len() >= 3, "{} speakers", reports.len());
    let mut ranges = BTreeMap::new();
    for (speaker, rows) in &reports {
        ensure!(rows.len() == 15, "{speaker}: {} rows", rows.len());
        let f0: Vec<f64> = rows.iter().map(|r| r.mean_f0_hz.unwrap()).collect();
        let dur: Vec<f64> = rows.iter().map(|r| r.mean_dur_s.unwrap()).collect();
        ensure!(
            f0.windows(2).all(|w| w[0] < w[1]),
            "{speaker}: F0 not strictly increasing {f0:?}"
        );
        ensure!(
            dur.windows(2).all(|w| w[0] <= w[1]),
            "{speaker}: duration decreases {dur:?}"
        );
        ranges.insert(speaker.clone(), (f0[0], f0[14]));
    }
    let low = ranges["low"];
    let high = ranges["high"];
    ensure!(
        low.1 < high.0,
        "low {low:?} and high {high:?} decoded F0 ranges overlap"
    );
    let report = fs::read_to_string(runs().a.report()).map_err(|e| e.to_string())?;
    ensure!(
        report.lines().count() == 16,
        "report.tsv has {} lines",
        report.lines().count()
    );
    Ok(format!(
        "{} speakers monotone; low {:.0}–{:.0} Hz, high {:.0}–{:.0} Hz",
        reports.len(),
        low.0,
        low.1,
        high.0,
        high.1
    ))
}

fn offset_control() -> Outcome {
    let r = runs();
    let tokens = load_tokens(r.a.tokens())?;
    let utts = load_manifest(&r.manifest)?;
    let spec = |f0, dur| ControlSpec::from_parts(f0, None, dur, None);
    let mut with_boundaries = 0;
    for (u, t) in utts.iter().zip(&tokens) {
        ensure!(
            apply_control(t, &spec(Some(0), Some(0))?)? == *t,
            "{}: offset 0 changed tokens",
            u.id
        );
        for o in -11..=11 {
            let c = apply_control(t, &spec(Some(o), Some(o))?)?;
            ensure!(
                c.f0_tokens.iter().chain(&c.dur_tokens).all(|&x| x <= 14),
                "{}: offset {o} left the token range",
                u.id
            );
        }
        let up = apply_control(t, &spec(Some(11), Some(11))?)?;
        let down = apply_control(t, &spec(Some(-11), Some(-11))?)?;
        let expect = |f: &dyn Fn(usize) -> usize, src: &[usize]| {
            src.iter().map(|&x| f(x)).collect::<Vec<_>>()
        };
        ensure!(
            up.f0_tokens == expect(&|x| (x + 11).min(14), &t.f0_tokens)
                && down.f0_tokens == expect(&|x| x.saturating_sub(11), &t.f0_tokens),
            "{}: ±11 did not saturate",
            u.id
        );
        if t.f0_tokens.iter().any(|&x| x >= 3) {
            ensure!(up.f0_tokens.contains(&14), "{}: +11 did not reach 14", u.id);
        }
        ensure!(
            t.f0_tokens.len() == u.num_phones() && t.dur_tokens.len() == u.num_phones(),
            "{}: token count differs from phone count",
            u.id
        );
        if u.symbols.len() > u.num_phones() {
            with_boundaries += 1;
            ensure!(
                t.f0_tokens.len() < u.symbols.len(),
                "{}: M not below N",
                u.id
            );
        }
    }
    ensure!(
        with_boundaries > 0,
        "no utterance has boundaries or punctuation"
    );
    let all_max = TokenSequence {
        utterance_id: "x".into(),
        f0_tokens: vec![0, 7, 14],
        dur_tokens: vec![14, 7, 0],
    };
    let up = apply_control(&all_max, &spec(Some(11), Some(-11))?)?;
    ensure!(
        up.f0_tokens == vec![11, 14, 14] && up.dur_tokens == vec![3, 0, 0],
        "saturation example gave {up:?}"
    );
    Ok(format!(
        "{} sequences; {with_boundaries} with M < N",
        tokens.len()
    ))
}

fn adaptation() -> Outcome {
    let r = runs();
    let model = load_model(r.a.model())?;
    let feats = load_features(r.a.features_aug())?;
    let arrays = |m: &prosotok::ProsodyModel| -> Result<String, Fail> {
        let j = model_to_json(m).map_err(|e| e.to_string())?;
        let v: serde_json::Value = serde_json::from_str(&j).map_err(|e| e.to_string())?;
        Ok(format!(
            "{}{}{}",
            v["f0_centroids"], v["dur_intervals"], v["dur_global"]
        ))
    };

    let newcomer = generate(&ToyConfig {
        speakers: vec![prosotok::synth::SpeakerSpec::new("new", 200.0, 18.0)],
        utterances_per_speaker: 20,
        seed: 99,
        ..Default::default()
    });
    let new_feats = toy_features(&newcomer);
    let adapted = prosotok::label::adapt_speaker(&model, &new_feats, "new", false)?;
    ensure!(
        arrays(&adapted)? == arrays(&model)?,
        "centroids or intervals changed after adapt"
    );
    ensure!(
        adapted
            .f0_centroids
            .iter()
            .zip(&model.f0_centroids)
            .all(|(a, b)| a.to_bits() == b.to_bits()),
        "centroid bits changed"
    );

    let low_rows: Vec<_> = feats
        .iter()
        .filter(|f| f.speaker == "low")
        .cloned()
        .collect();
    let clone = prosotok::label::adapt_speaker(&model, &low_rows, "low_clone", false)?;
    let a = clone.speakers["low_clone"];
    let b = model.speakers["low"];
    let d = (a.mu - b.mu).abs().max((a.sigma - b.sigma).abs());
    ensure!(d <= 1e-12, "cloned stats differ by {d:e}");
    ensure!(
        arrays(&clone)? == arrays(&model)?,
        "clone changed the model arrays"
    );
    ensure!(
        prosotok::label::adapt_speaker(&model, &low_rows, "low", false).is_err(),
        "adapting an existing speaker without replace succeeded"
    );
    Ok(format!("arrays identical; clone stats differ by {d:.1e}"))
}

fn sine(hz: f64, amp: f64, sr: u32, seconds: f64) -> Waveform {
    let n = (seconds * f64::from(sr)) as usize;
    let w = 2.0 * std::f64::consts::PI * hz / f64::from(sr);
    Waveform {
        samples: (0..n)
            .map(|i| (amp * (w * i as f64).sin()) as f32)
            .collect(),
        sample_rate: sr,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn pitch_extractor() -> Outcome {
    let cfg = PitchConfig::default();
    let sr = 24_000;
    let mut details = Vec::new();
    for hz in [110.0, 220.0, 440.0] {
        let loud = extract_f0(&sine(hz, 0.5, sr, 1.0), &cfg)?;
        let quiet = extract_f0(&sine(hz, 0.05, sr, 1.0), &cfg)?;
        let voiced: Vec<f64> = loud
            .frames
            .iter()
            .flatten()
            .map(|&f| f64::from(f))
            .collect();
        ensure!(!voiced.is_empty(), "{hz} Hz: no voiced frames");
        let m = median(voiced);
        let err = (m - hz).abs() / hz;
        ensure!(err <= 0.01, "{hz} Hz: median {m} ({:.3}% off)", err * 100.0);
        ensure!(
            loud.frames.len() == quiet.frames.len(),
            "{hz} Hz: frame counts differ"
        );
        let mut worst = 0.0f64;
        for (i, (a, b)) in loud.frames.iter().zip(&quiet.frames).enumerate() {
            match (a, b) {
                (Some(a), Some(b)) => {
                    worst = worst.max(((f64::from(*a) - f64::from(*b)) / f64::from(*a)).abs())
                }
                (None, None) => {}
                _ => return Err(Fail(format!("{hz} Hz: voicing differs at frame {i}"))),
            }
        }
        ensure!(
            worst <= 1e-6,
            "{hz} Hz: amplitude scaling moved f0 by {worst:e}"
        );
        details.push(format!("{hz} Hz→{m:.2}"));
    }
    let silence = extract_f0(
        &Waveform {
            samples: vec![0.0; sr as usize],
            sample_rate: sr,
        },
        &cfg,
    )?;
    ensure!(
        !silence.frames.is_empty() && silence.frames.iter().all(Option::is_none),
        "silence has voiced frames"
    );
    Ok(format!("{}; silence unvoiced", details.join(", ")))
}

const INVENTORY: [&str; 12] = [
    "aa", "ae", "iy", "uw", "eh", "m", "n", "l", "s", "t", "k", "f",
];

fn corpus_selection() -> Outcome {
    let targets: BTreeSet<String> = INVENTORY.iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut corpora = 0;
    let mut greedy_total = 0;
    let mut identity_total = 0;
    let mut tried = 0;
    let mut worse = Vec::new();
    while corpora < 100 {
        tried += 1;
        ensure!(tried < 10_000, "could not find 100 coverable corpora");
        let cfg = ToyConfig {
            utterances_per_speaker: rng.random_range(2..=8),
            words_per_utterance: (1, 3),
            seed: rng.random(),
            ..Default::default()
        };
        let utts: Vec<_> = generate(&cfg).into_iter().map(|t| t.utterance).collect();
        let identity: Vec<&str> = utts.iter().map(|u| u.id.as_str()).collect();
        let Some(identity_len) = prefix_cover_len(&utts, &identity, &targets) else {
            continue;
        };
        corpora += 1;
        let r = select_cover(&utts, Some(&targets), None);
        ensure!(
            r == select_cover(&utts, Some(&targets), None),
            "corpus {corpora}: ordering not deterministic"
        );
        ensure!(
            r.ordering.len() == utts.len(),
            "corpus {corpora}: ordering drops utterances"
        );
        let greedy: Vec<&str> = r.ordering.iter().map(String::as_str).collect();
        let greedy_len = prefix_cover_len(&utts, &greedy, &targets);
        ensure!(
            greedy_len.is_some() && greedy_len == r.cover_prefix_len,
            "corpus {corpora}: greedy prefix {greedy_len:?} vs reported {:?}",
            r.cover_prefix_len
        );
        let g = greedy_len.unwrap();
        if g > identity_len {
            worse.push(format!("seed {} ({g} vs {identity_len})", cfg.seed));
        }
        greedy_total += g;
        identity_total += identity_len;
    }
    let summary = format!(
        "100 corpora ({tried} drawn); mean prefix greedy {:.2} vs identity {:.2}",
        greedy_total as f64 / 100.0,
        identity_total as f64 / 100.0
    );
    ensure!(
        worse.is_empty(),
        "{summary}; greedy longer than identity order on {} corpora: {}",
        worse.len(),
        worse.join(", ")
    );
    Ok(summary)
}

fn same_bytes(a: &Path, b: &Path) -> Result<usize, Fail> {
    let x = fs::read(a).map_err(|e| format!("{}: {e}", a.display()))?;
    let y = fs::read(b).map_err(|e| format!("{}: {e}", b.display()))?;
    ensure!(x == y, "{} and {} differ", a.display(), b.display());
    Ok(x.len())
}

fn determinism() -> Outcome {
    let r = runs();
    let mut sizes = Vec::new();
    for (a, b) in [
        (r.a.model(), r.b.model()),
        (r.a.tokens(), r.b.tokens()),
        (r.a.report(), r.b.report()),
    ] {
        sizes.push(same_bytes(&a, &b)?);
    }
    // labels from a fresh in-memory pass agree with the files
    let model = load_model(r.a.model())?;
    let utts = load_manifest(&r.manifest)?;
    let feats = load_features(r.a.features())?;
    ensure!(
        label_corpus(&utts, &feats, &model, None)? == load_tokens(r.a.tokens())?,
        "relabelling in memory disagrees with tokens.jsonl"
    );
    Ok(format!(
        "model.json {} B, tokens.jsonl {} B, report.tsv {} B identical",
        sizes[0], sizes[1], sizes[2]
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("normalization", normalization),
        ("k-means oracle equivalence", kmeans_oracle),
        ("balanced clustering", balanced_clustering),
        ("augmentation", augmentation),
        ("ascending-cluster protocol", ascending_protocol),
        ("offset control", offset_control),
        ("adaptation", adaptation),
        ("pitch extractor", pitch_extractor),
        ("corpus selection", corpus_selection),
        ("end-to-end determinism", determinism),
    ];
    // silence default panic output; failures are reported below
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(p) => Err(Fail(format!(
                "panicked: {}",
                p.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ))),
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(Fail(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
