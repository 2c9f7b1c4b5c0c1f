mod args;

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use rayon::prelude::*;

use args::*;
use tvsense::acoustic::{train_model, LabeledClip, TrainOptions};
use tvsense::dsp::features::{extract_features, write_feature_csv, FeatureConfig, FeatureSubset};
use tvsense::eval::{score_all, sweep_audio_rate, sweep_frame_count, write_metrics_csv, write_sweep_csv, LabeledShot, RateModel};
use tvsense::fusion::{acoustic_verdict, visual_verdict, ControllerConfig, DetectionRecord, FusionRule};
use tvsense::svm::{load_model, save_model, Kernel, SvmModel};
use tvsense::synth::{read_manifest, synth_corpus, AudioCounts, CorpusSpec, ManifestEntry, SceneClass, VisualCounts};
use tvsense::visual::detect::IntersectionMode;
use tvsense::visual::image::read_shot;
use tvsense::{read_wav, resample};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TVSENSE_LOG", "warn")).init();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a, cli.seed),
        Command::Features(a) => features(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::DetectVideo(a) => detect_video(a),
        Command::Fuse(a) => fuse(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn parse_counts(list: &str, audio: bool) -> Result<Vec<(SceneClass, usize)>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, n) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("expected class=count, got `{item}`"))?;
            let class: SceneClass = name.trim().parse()?;
            if class.is_audio() != audio {
                bail!("`{class}` is not a {} class", if audio { "audio" } else { "visual" });
            }
            let n: usize = n.trim().parse().with_context(|| format!("count in `{item}`"))?;
            if n == 0 {
                bail!("`{class}` needs at least one item");
            }
            Ok((class, n))
        })
        .collect()
}

fn synth(a: SynthArgs, seed: u64) -> Result<()> {
    let (audio, visual) = match (&a.audio, &a.visual) {
        (None, None) => (Some(AudioCounts::default()), Some(VisualCounts::default())),
        (au, vi) => (
            au.as_deref().map(|s| parse_counts(s, true)).transpose()?.map(|c| AudioCounts::split(&c)),
            vi.as_deref().map(|s| parse_counts(s, false)).transpose()?.map(VisualCounts),
        ),
    };
    let spec = CorpusSpec {
        audio,
        visual,
        seed,
        duration_seconds: a.duration,
        frames_per_shot: a.frames_per_shot,
        ..CorpusSpec::default()
    };
    let summary = synth_corpus(&spec, &a.out).with_context(|| format!("synth: writing corpus to {}", a.out.display()))?;
    println!("{} items, manifest sha256 {}", summary.items.len(), summary.digest);
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    let mut clip = read_wav(&a.input).with_context(|| format!("features: reading {}", a.input.display()))?;
    if let Some(rate) = a.rate {
        clip = resample(&clip, rate).with_context(|| format!("features: resampling {}", a.input.display()))?;
    }
    let config = FeatureConfig {
        window_seconds: a.window,
        ..FeatureConfig::default()
    };
    let windows = extract_features(&clip, &config).with_context(|| format!("features: {}", a.input.display()))?;
    let mut out = output(a.out.as_deref())?;
    write_feature_csv(&mut out, &windows)?;
    out.flush()?;
    Ok(())
}

fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let entries = read_manifest(path).with_context(|| format!("reading manifest {}", path.display()))?;
    if entries.is_empty() {
        bail!("manifest {} lists no items", path.display());
    }
    if let Some(missing) = entries.iter().find(|e| !e.path.exists()) {
        bail!("{}: {} does not exist", path.display(), missing.path.display());
    }
    Ok(entries)
}

fn load_clips(entries: &[ManifestEntry]) -> Result<Vec<LabeledClip>> {
    entries
        .par_iter()
        .map(|e| {
            Ok(LabeledClip {
                id: e.id(),
                clip: read_wav(&e.path).with_context(|| format!("reading {}", e.path.display()))?,
                is_tv: e.is_tv(),
            })
        })
        .collect()
}

fn train(a: TrainArgs) -> Result<()> {
    let entries = load_manifest(&a.manifest)?;
    let clips = load_clips(&entries)?;
    let subset = FeatureSubset::parse(&a.features)?;
    let kernel = match a.kernel {
        KernelArg::Linear => {
            if a.gamma.is_some() {
                log::warn!("--gamma is ignored by the linear kernel");
            }
            Kernel::Linear
        }
        KernelArg::Rbf => match a.gamma {
            Some(gamma) => Kernel::Rbf { gamma },
            None => Kernel::default_rbf(subset.len()),
        },
    };
    let options = TrainOptions {
        features: FeatureConfig {
            window_seconds: a.window,
            ..FeatureConfig::default()
        },
        subset,
        kernel: Some(kernel),
        c: a.c,
        sample_rate: a.rate,
        ..TrainOptions::default()
    };
    let model = train_model(&clips, &options).context("train")?;
    save_model(&model, &a.model).with_context(|| format!("train: writing {}", a.model.display()))?;
    eprintln!(
        "trained on {} clips: {} support vectors",
        clips.len(),
        model.support_vectors.len()
    );
    Ok(())
}

fn controller(c: &ControllerArgs) -> Result<ControllerConfig> {
    let mut config = ControllerConfig {
        audio_sample_rate: c.rate,
        audio_window_seconds: c.window,
        frames_per_shot: c.frames_per_shot,
        fusion_rule: fusion_rule(c.fusion),
        ..ControllerConfig::default()
    };
    config.visual.intersection = intersection(c.intersection_mode);
    config.validate()?;
    Ok(config)
}

fn fusion_rule(f: FusionArg) -> FusionRule {
    match f {
        FusionArg::Or => FusionRule::Or,
        FusionArg::And => FusionRule::And,
        FusionArg::Acoustic => FusionRule::AcousticOnly,
        FusionArg::Visual => FusionRule::VisualOnly,
    }
}

fn intersection(i: IntersectionArg) -> IntersectionMode {
    match i {
        IntersectionArg::Candidate => IntersectionMode::Candidate,
        IntersectionArg::Bbox => IntersectionMode::Bbox,
    }
}

fn load_model_file(path: &Path) -> Result<SvmModel> {
    load_model(path).with_context(|| format!("loading model {}", path.display()))
}

fn single_entry(path: &Path) -> Result<Vec<ManifestEntry>> {
    if !path.exists() {
        bail!("{} does not exist", path.display());
    }
    Ok(vec![ManifestEntry {
        path: path.to_path_buf(),
        class: String::new(),
        split: None,
    }])
}

/// One single-modality record per entry: WAV files go through the model,
/// directories through the visual detector.
fn detect_entries(entries: &[ManifestEntry], model: Option<&SvmModel>, config: &ControllerConfig) -> Result<Vec<DetectionRecord>> {
    entries
        .par_iter()
        .map(|e| {
            let id = e.id();
            let record = if e.path.is_dir() {
                let frames = read_shot(&e.path).with_context(|| format!("reading shot {}", e.path.display()))?;
                let v = visual_verdict(&frames, config).with_context(|| format!("visual detection on {}", e.path.display()))?;
                DetectionRecord::from_verdicts(id, None, Some(v), config)?
            } else {
                let model = model.ok_or_else(|| anyhow!("{} is audio but no model was given", e.path.display()))?;
                let clip = read_wav(&e.path).with_context(|| format!("reading {}", e.path.display()))?;
                let v = acoustic_verdict(model, &clip, config).with_context(|| format!("classifying {}", e.path.display()))?;
                DetectionRecord::from_verdicts(id, Some(v), None, config)?
            };
            Ok(if e.class.is_empty() {
                record
            } else {
                record.with_ground_truth(e.is_tv())
            })
        })
        .collect()
}

fn write_records(path: Option<&Path>, records: &[DetectionRecord]) -> Result<()> {
    let mut out = output(path)?;
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    out.flush()?;
    Ok(())
}

fn entries_from(manifest: Option<&Path>, input: Option<&Path>) -> Result<Vec<ManifestEntry>> {
    match (manifest, input) {
        (Some(m), _) => load_manifest(m),
        (None, Some(i)) => single_entry(i),
        (None, None) => bail!("either --manifest or --input is required"),
    }
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let config = controller(&a.controller)?;
    let model = load_model_file(&a.model)?;
    let entries = entries_from(a.manifest.as_deref(), a.input.as_deref())?;
    if let Some(dir) = entries.iter().find(|e| e.path.is_dir()) {
        bail!("{} is a shot directory; use detect-video", dir.path.display());
    }
    let records = detect_entries(&entries, Some(&model), &config)?;
    write_records(a.out.as_deref(), &records)
}

fn detect_video(a: DetectArgs) -> Result<()> {
    let config = controller(&a.controller)?;
    let entries = entries_from(a.manifest.as_deref(), a.input.as_deref())?;
    if let Some(file) = entries.iter().find(|e| !e.path.is_dir()) {
        bail!("{} is not a shot directory", file.path.display());
    }
    let records = detect_entries(&entries, None, &config)?;
    write_records(a.out.as_deref(), &records)
}

fn read_records(path: &Path) -> Result<Vec<DetectionRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(n, line)| {
            let line = line.with_context(|| format!("reading {}", path.display()))?;
            DetectionRecord::from_json_line(&line).with_context(|| format!("{}:{}", path.display(), n + 1))
        })
        .collect()
}

fn fuse(a: FuseArgs) -> Result<()> {
    let acoustic = read_records(&a.acoustic)?;
    let visual = read_records(&a.visual)?;
    let config = ControllerConfig {
        fusion_rule: fusion_rule(a.fusion),
        ..ControllerConfig::default()
    };
    let mut by_id: HashMap<&str, &DetectionRecord> = visual.iter().map(|r| (r.clip_id.as_str(), r)).collect();
    let mut fused = Vec::new();
    let mut combine = |a: Option<&DetectionRecord>, v: Option<&DetectionRecord>| -> Result<()> {
        let id = a.or(v).map(|r| r.clip_id.clone()).expect("one side present");
        let mut r = DetectionRecord::from_verdicts(
            id.clone(),
            a.and_then(|r| r.acoustic.clone()),
            v.and_then(|r| r.visual.clone()),
            &config,
        )
        .with_context(|| format!("fusing {id}"))?;
        r.ground_truth = a.and_then(|r| r.ground_truth).or(v.and_then(|r| r.ground_truth));
        r.errors = a.iter().chain(v.iter()).flat_map(|r| r.errors.clone()).collect();
        fused.push(r);
        Ok(())
    };
    for r in &acoustic {
        combine(Some(r), by_id.remove(r.clip_id.as_str()))?;
    }
    for r in visual.iter().filter(|r| by_id.contains_key(r.clip_id.as_str())) {
        combine(None, Some(r))?;
    }
    write_records(a.out.as_deref(), &fused)
}

fn eval(a: EvalArgs) -> Result<()> {
    let records = match (&a.records, &a.model, &a.manifest) {
        (Some(path), _, _) => read_records(path)?,
        (None, Some(model), Some(manifest)) => {
            let config = controller(&a.controller)?;
            let model = load_model_file(model)?;
            detect_entries(&load_manifest(manifest)?, Some(&model), &config)?
        }
        _ => bail!("eval needs --records, or --model with --manifest"),
    };
    let rows = score_all(&records).context("eval")?;
    if rows.is_empty() {
        bail!("eval: no verdicts to score");
    }
    for (m, c, x) in &rows {
        eprintln!("{:<8} {} of {} records: {x}", m.name(), c.total(), records.len());
    }
    let mut out = output(a.out.as_deref())?;
    write_metrics_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    match a.kind {
        SweepKind::AudioRate {
            model,
            manifest,
            rates,
            train_manifest,
            out,
            window,
        } => {
            let model = load_model_file(&model)?;
            let corpus = load_clips(&load_manifest(&manifest)?)?;
            let features = FeatureConfig {
                window_seconds: window,
                ..FeatureConfig::default()
            };
            let train_clips = train_manifest.as_deref().map(load_manifest).transpose()?.map(|e| load_clips(&e)).transpose()?;
            let options = TrainOptions {
                features: features.clone(),
                subset: model.feature_subset()?,
                kernel: Some(model.kernel),
                c: model.c,
                ..TrainOptions::default()
            };
            let mode = match &train_clips {
                Some(clips) => RateModel::Retrain(clips, &options),
                None => RateModel::Fixed(&model),
            };
            let rows = sweep_audio_rate(&corpus, mode, &rates, &features).context("audio-rate sweep")?;
            let mut w = output(out.as_deref())?;
            write_sweep_csv(&mut w, "rate", &rows)?;
            w.flush()?;
        }
        SweepKind::FrameCount {
            manifest,
            counts,
            out,
            intersection_mode,
        } => {
            let entries = load_manifest(&manifest)?;
            let shots = entries
                .par_iter()
                .map(|e| {
                    Ok(LabeledShot {
                        id: e.id(),
                        frames: read_shot(&e.path).with_context(|| format!("reading shot {}", e.path.display()))?,
                        is_tv: e.is_tv(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut config = ControllerConfig::default().visual;
            config.intersection = intersection(intersection_mode);
            let rows = sweep_frame_count(&shots, &counts, &config).context("frame-count sweep")?;
            let mut w = output(out.as_deref())?;
            write_sweep_csv(&mut w, "frames", &rows)?;
            w.flush()?;
        }
    }
    Ok(())
}
