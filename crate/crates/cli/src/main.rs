//! `svs`: command-line front end for the singing-voice alignment toolkit.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;

use output::{format_sig, read_text, CliResult, Failure, Located, Outputs};
use svs_core::align::{gaussian_loglik_matrix, mas_note_bounded, Durations};
use svs_core::config::PipelineConfig;
use svs_core::dsp::{median_smooth_f0, mel_spectrogram, F0Contour};
use svs_core::formats;
use svs_core::gaussian::DiagGaussian;
use svs_core::objectives::{
    duration_loss, feature_matching_loss, final_loss, kl_aperiodic, kl_diag_gaussian,
    lsgan_losses, mel_loss, pitch_loss, FeatureStack, LossComponents,
};
use svs_core::pipeline::{latents_for, recover_alignment, AlignmentReport};
use svs_core::regulator::rhythm_adjust;
use svs_core::score::{note_frame_boundaries, parse_scores, Score};
use svs_core::synth::generate_utterance;

#[derive(Parser)]
#[command(name = "svs", version, about = "Score parsing, features, note-bounded alignment and losses for singing voice synthesis")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Overrides `synth.seed` from the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Validate score files and print their note frame spans
    Parse { scores: Vec<PathBuf> },
    /// Log-mel spectrogram of mono 16-bit WAV files, written as `<stem>.mel`
    Mel { wavs: Vec<PathBuf> },
    /// Median-smooth F0 files, written as `<stem>.smooth.f0`
    Smooth {
        f0: Vec<PathBuf>,
        /// Odd window length; defaults to `f0.kernel`
        #[arg(long)]
        kernel: Option<usize>,
    },
    /// Note-bounded alignment of latents against per-phoneme priors
    Align {
        #[arg(long)]
        score: PathBuf,
        /// `MAT` file of frame latents
        #[arg(long)]
        latents: PathBuf,
        /// `GAUSS` file of per-phoneme priors
        #[arg(long)]
        priors: PathBuf,
        /// Utterance to use when the score file holds several
        #[arg(long)]
        utt: Option<String>,
    },
    /// Rescale predicted durations to the score's note lengths
    Regulate {
        #[arg(long)]
        score: PathBuf,
        /// `PRED` file of positive predicted durations
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        utt: Option<String>,
    },
    /// Evaluate loss components and the weighted total
    Losses(Box<LossArgs>),
    /// Render synthetic singing: `<utt>.wav`, `<utt>.f0`, `<utt>.dur`
    Gen { scores: Vec<PathBuf> },
    /// Render, extract features, align, regulate and report agreement with the
    /// rendering's true durations
    Pipeline {
        scores: Vec<PathBuf>,
        /// `GAUSS` priors to align against instead of ones fitted from the
        /// true segmentation (single-utterance scores only)
        #[arg(long)]
        priors: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LossArgs {
    /// Sub-discriminator outputs on real audio, one `MAT` per sub-discriminator
    #[arg(long, num_args = 1.., requires = "d_fake")]
    d_real: Vec<PathBuf>,
    #[arg(long, num_args = 1.., requires = "d_real")]
    d_fake: Vec<PathBuf>,
    /// Discriminator feature maps, one `MAT` per layer
    #[arg(long, num_args = 1.., requires = "fm_fake")]
    fm_real: Vec<PathBuf>,
    #[arg(long, num_args = 1.., requires = "fm_real")]
    fm_fake: Vec<PathBuf>,
    #[arg(long, requires = "mel_pred")]
    mel_true: Option<PathBuf>,
    #[arg(long, requires = "mel_true")]
    mel_pred: Option<PathBuf>,
    #[arg(long, requires_all = ["f0_pred", "f0_smooth_pred"])]
    f0_true: Option<PathBuf>,
    #[arg(long, requires = "f0_true")]
    f0_pred: Option<PathBuf>,
    #[arg(long, requires = "f0_true")]
    f0_smooth_pred: Option<PathBuf>,
    /// Aperiodic posterior and prior (`GAUSS`)
    #[arg(long, requires_all = ["p_l", "q_a", "p_a"])]
    q_l: Option<PathBuf>,
    #[arg(long, requires = "q_l")]
    p_l: Option<PathBuf>,
    #[arg(long, requires = "q_l")]
    q_a: Option<PathBuf>,
    #[arg(long, requires = "q_l")]
    p_a: Option<PathBuf>,
    /// Periodic posterior and prior (`GAUSS`)
    #[arg(long, requires = "p_p")]
    q_p: Option<PathBuf>,
    #[arg(long, requires = "q_p")]
    p_p: Option<PathBuf>,
    /// True and predicted durations (`PRED`)
    #[arg(long, requires = "dur_pred")]
    dur_true: Option<PathBuf>,
    #[arg(long, requires = "dur_true")]
    dur_pred: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("svs: {failure}");
            ExitCode::from(2)
        }
    }
}

fn load_config(common: &Common) -> CliResult<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::parse(&read_text(path)?).at(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.synth.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = load_config(&cli.common)?;
    let mut out = Outputs::default();
    let mut report = String::new();
    match cli.command {
        Command::Parse { scores } => {
            for path in &scores {
                for score in load_scores(path)? {
                    report.push_str(&describe(&score, &cfg).at(path)?);
                }
            }
        }
        Command::Mel { wavs } => {
            for path in &wavs {
                let (samples, sr) = formats::read_wav(path).at(path)?;
                if sr != cfg.mel.sample_rate {
                    return Err(Failure::new(format!(
                        "{}: sample rate {sr} Hz, config expects {}",
                        path.display(),
                        cfg.mel.sample_rate
                    )));
                }
                let mel = mel_spectrogram(&samples, &cfg.mel).at(path)?;
                let text = formats::format_mel(&mel.frames, sr, cfg.mel.hop);
                out.add(format!("{}.mel", stem(path)), text);
            }
        }
        Command::Smooth { f0, kernel } => {
            let kernel = kernel.unwrap_or(cfg.median_kernel);
            for path in &f0 {
                let contour = load_f0(path)?;
                let smooth = median_smooth_f0(&contour, kernel).at(path)?;
                out.add(format!("{}.smooth.f0", stem(path)), formats::format_f0(&smooth));
            }
        }
        Command::Align {
            score,
            latents,
            priors,
            utt,
        } => {
            let s = pick_score(&score, utt.as_deref())?;
            let x = formats::parse_matrix(&read_text(&latents)?).at(&latents)?;
            let p = formats::parse_gaussian(&read_text(&priors)?).at(&priors)?;
            let d = align(&s, &x, &p, &cfg).at(&score)?;
            out.add(format!("{}.dur", s.utt_id), formats::format_durations(&d));
        }
        Command::Regulate { score, pred, utt } => {
            let s = pick_score(&score, utt.as_deref())?;
            let predicted = formats::parse_predictions(&read_text(&pred)?).at(&pred)?;
            let spans = note_frame_boundaries(&s, cfg.mel.sample_rate, cfg.mel.hop).at(&score)?;
            let d = rhythm_adjust(&predicted, &s.phoneme_note_idx, &spans).at(&pred)?;
            out.add(format!("{}.dur", s.utt_id), formats::format_durations(&d));
        }
        Command::Losses(args) => report = losses(&args, &cfg)?,
        Command::Gen { scores } => {
            for path in &scores {
                for score in load_scores(path)? {
                    let render = generate_utterance(&score, &cfg.synth).at(path)?;
                    let wav = formats::encode_wav(&render.waveform, cfg.synth.sample_rate).at(path)?;
                    out.add(format!("{}.wav", score.utt_id), wav);
                    out.add(format!("{}.f0", score.utt_id), formats::format_f0(&render.f0));
                    out.add(format!("{}.dur", score.utt_id), formats::format_durations(&render.durations));
                }
            }
        }
        Command::Pipeline { scores, priors } => {
            report = pipeline(&scores, priors.as_deref(), &cfg, &mut out)?;
        }
    }
    out.commit(&cli.common.out_dir)?;
    print!("{report}");
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

fn load_scores(path: &Path) -> CliResult<Vec<Score>> {
    parse_scores(&read_text(path)?).at(path)
}

fn pick_score(path: &Path, utt: Option<&str>) -> CliResult<Score> {
    let mut scores = load_scores(path)?;
    match utt {
        Some(id) => scores
            .into_iter()
            .find(|s| s.utt_id == id)
            .ok_or_else(|| Failure::new(format!("{}: no utterance {id:?}", path.display()))),
        None if scores.len() == 1 => Ok(scores.remove(0)),
        None => Err(Failure::new(format!(
            "{}: {} utterances, choose one with --utt",
            path.display(),
            scores.len()
        ))),
    }
}

fn load_f0(path: &Path) -> CliResult<F0Contour> {
    let f0 = formats::parse_f0(&read_text(path)?).at(path)?;
    f0.validate_range().at(path)?;
    Ok(f0)
}

fn describe(score: &Score, cfg: &PipelineConfig) -> svs_core::Result<String> {
    let spans = note_frame_boundaries(score, cfg.mel.sample_rate, cfg.mel.hop)?;
    let join = |v: Vec<String>| v.join(" ");
    Ok(format!(
        "{}: {} phonemes, {} notes, map [{}], spans {}\n",
        score.utt_id,
        score.phonemes.len(),
        score.notes.len(),
        join(score.phoneme_note_idx.iter().map(|i| i.to_string()).collect()),
        join(spans.spans().iter().map(|s| format!("[{},{})", s.start, s.end)).collect()),
    ))
}

fn align(
    score: &Score,
    latents: &Array2<f64>,
    priors: &DiagGaussian,
    cfg: &PipelineConfig,
) -> svs_core::Result<Durations> {
    let spans = note_frame_boundaries(score, cfg.mel.sample_rate, cfg.mel.hop)?;
    let loglik = gaussian_loglik_matrix(latents, priors)?;
    mas_note_bounded(&loglik, &score.phoneme_note_idx, &spans)
}

fn load<T>(path: &Path, parse: fn(&str) -> svs_core::Result<T>) -> CliResult<T> {
    parse(&read_text(path)?).at(path)
}

fn load_all(paths: &[PathBuf]) -> CliResult<Vec<ndarray::ArrayD<f64>>> {
    paths
        .iter()
        .map(|p| Ok(load(p, formats::parse_matrix)?.into_dyn()))
        .collect()
}

fn losses(a: &LossArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let w = &cfg.weights;
    let mut c = LossComponents::default();
    let input = |e: svs_core::Error| Failure::new(format!("losses: {e}"));

    if !a.d_fake.is_empty() {
        let out = lsgan_losses(&load_all(&a.d_real)?, &load_all(&a.d_fake)?).map_err(input)?;
        c.adv = out.adv;
    }
    if !a.fm_fake.is_empty() {
        let real = FeatureStack::new(load_all(&a.fm_real)?);
        let fake = FeatureStack::new(load_all(&a.fm_fake)?);
        c.fm = feature_matching_loss(&real, &fake).map_err(input)?.value;
    }
    if let (Some(t), Some(p)) = (&a.mel_true, &a.mel_pred) {
        c.mel = mel_loss(&load(t, formats::parse_matrix)?, &load(p, formats::parse_matrix)?)
            .map_err(input)?
            .value;
    }
    if let (Some(t), Some(p), Some(s)) = (&a.f0_true, &a.f0_pred, &a.f0_smooth_pred) {
        let (truth, pred, smooth) = (load_f0(t)?, load_f0(p)?, load_f0(s)?);
        c.pitch = pitch_loss(&truth, pred.values(), smooth.values(), w.lambda_s, cfg.median_kernel)
            .map_err(input)?
            .value;
    }
    if let (Some(ql), Some(pl), Some(qa), Some(pa)) = (&a.q_l, &a.p_l, &a.q_a, &a.p_a) {
        let g = |p: &PathBuf| load(p, formats::parse_gaussian);
        c.kl_a = kl_aperiodic(&g(ql)?, &g(pl)?, &g(qa)?, &g(pa)?, w.lambda_l)
            .map_err(input)?
            .value;
    }
    if let (Some(q), Some(p)) = (&a.q_p, &a.p_p) {
        let g = |p: &PathBuf| load(p, formats::parse_gaussian);
        c.kl_p = kl_diag_gaussian(&g(q)?, &g(p)?).map_err(input)?.value;
    }
    if let (Some(t), Some(p)) = (&a.dur_true, &a.dur_pred) {
        c.dur = duration_loss(&load(t, formats::parse_predictions)?, &load(p, formats::parse_predictions)?)
            .map_err(input)?
            .value;
    }

    let total = final_loss(&c, w).map_err(input)?;
    let mut text = String::new();
    for (name, v) in c.named() {
        text.push_str(&format!("{name} {}\n", format_sig(v, 9)));
    }
    text.push_str(&format!("final {}\n", format_sig(total, 9)));
    Ok(text)
}

fn pipeline(
    paths: &[PathBuf],
    priors: Option<&Path>,
    cfg: &PipelineConfig,
    out: &mut Outputs,
) -> CliResult<String> {
    let priors = priors
        .map(|p| Ok::<_, Failure>((p, load(p, formats::parse_gaussian)?)))
        .transpose()?;
    let mut text = String::new();
    let (mut total, mut within) = (0, 0);
    for path in paths {
        let scores = load_scores(path)?;
        if priors.is_some() && scores.len() != 1 {
            return Err(Failure::new(format!(
                "{}: --priors needs a single-utterance score, found {}",
                path.display(),
                scores.len()
            )));
        }
        for score in scores {
            let report = match &priors {
                Some((ppath, p)) => {
                    let render = generate_utterance(&score, &cfg.synth).at(path)?;
                    let latents = latents_for(&render, cfg).at(path)?;
                    let recovered = align(&score, &latents, p, cfg).at(ppath)?;
                    AlignmentReport {
                        truth: render.durations,
                        recovered,
                    }
                }
                None => recover_alignment(&score, cfg).at(path)?.1,
            };
            let spans = note_frame_boundaries(&score, cfg.mel.sample_rate, cfg.mel.hop).at(path)?;
            let as_pred: Vec<f64> = report.recovered.as_slice().iter().map(|&d| d as f64).collect();
            let regulated = rhythm_adjust(&as_pred, &score.phoneme_note_idx, &spans).at(path)?;

            let n = report.n_phonemes();
            let ok = report.within(2);
            total += n;
            within += ok;
            text.push_str(&format!(
                "{} phonemes {n} within_2 {ok} exact {}\n",
                score.utt_id,
                report.within(0)
            ));
            out.add(format!("{}.dur", score.utt_id), formats::format_durations(&regulated));
        }
    }
    let rate = if total == 0 { 1.0 } else { within as f64 / total as f64 };
    text.push_str(&format!(
        "total phonemes {total} within_2 {within} rate {}\n",
        format_sig(rate, 4)
    ));
    Ok(text)
}
