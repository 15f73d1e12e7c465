use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::Parser;
use chrono::Utc;
use lexiboot_core::occupancy::EXACT_BOUND;
use lexiboot_core::{
    asymptotic_error, derive_seed, exact_expected_error, exact_unused_distribution,
    extrapolate_to_infinite_n, game_report, mean_and_standard_error, random_assignment_sample,
    run_ensemble, run_game, sweep_alpha, words_for_alpha, GameConfig, LearningMode, PoissonLimit,
    SizePoint,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::manifest::{manifest_path, timestamp, RunManifest};
use crate::output::{self, num};

pub enum Outcome {
    Done,
    /// A single game hit the episode cap.
    NotFrozen,
}

pub fn dispatch(command: Command, argv: &[String]) -> Result<Outcome> {
    match command {
        Command::Game(a) => game(a),
        Command::Sweep(a) => sweep(a, argv),
        Command::Extrapolate(a) => extrapolate(a, argv),
        Command::Occupancy(a) => occupancy(a),
        Command::Replay(a) => replay(a),
    }
}

fn resolve_words(objects: usize, words: Option<usize>, alpha: Option<f64>) -> Result<usize> {
    match (words, alpha) {
        (Some(h), _) => Ok(h),
        (None, Some(a)) => Ok(words_for_alpha(a, objects)?),
        (None, None) => bail!("one of --words or --alpha is required"),
    }
}

fn base_config(objects: usize, words: usize, mode: LearningMode, d: &DynamicsArgs) -> GameConfig {
    GameConfig::new(objects, words, d.context, d.resolution, mode)
        .with_max_episodes(d.max_episodes)
        .with_seed(d.seed)
}

fn game(a: GameArgs) -> Result<Outcome> {
    let words = resolve_words(a.objects, a.words, a.alpha)?;
    let config = base_config(a.objects, words, a.mode, &a.dynamics);
    let result = run_game(&config)?;
    println!(
        "N={} H={} C={} M={} mode={} seed={}",
        config.n_objects, config.n_words, config.context_size, config.resolution, config.mode, config.seed
    );
    println!("episodes: {}", result.episodes);
    println!("frozen: {}", result.frozen);
    if !result.frozen {
        eprintln!(
            "game did not freeze within {} episodes (H close to C can stall the dynamics)",
            config.max_episodes
        );
        return Ok(Outcome::NotFrozen);
    }
    let report = game_report(&result)?;
    println!("eps_I: {}", num(report.agent_i.error_f64()));
    println!("eps_J: {}", num(report.agent_j.error_f64()));
    println!("H_u_I: {}", num(report.agent_i.used_words_f64()));
    println!("H_u_J: {}", num(report.agent_j.used_words_f64()));
    println!("consensus: {}", result.consensus);
    Ok(Outcome::Done)
}

/// Writes `data` to `out` (or stdout) and the manifest next to it.
struct Emitter<'a> {
    argv: &'a [String],
    config: GameConfig,
    ensemble: &'a EnsembleArgs,
    master_seed: u64,
    started: String,
}

impl Emitter<'_> {
    fn emit(&self, data: &str, extra: &[(PathBuf, String)]) -> Result<()> {
        let Some(out) = &self.ensemble.out else {
            std::io::stdout().write_all(data.as_bytes())?;
            return Ok(());
        };
        fs::write(out, data).with_context(|| format!("cannot write {}", out.display()))?;
        let mut outputs = vec![out.clone()];
        for (path, text) in extra {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            outputs.push(path.clone());
        }
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            argv: self.argv.to_vec(),
            config: self.config.clone(),
            n_samples: self.ensemble.samples,
            master_seed: self.master_seed,
            workers: self.ensemble.workers,
            started: self.started.clone(),
            finished: timestamp(Utc::now()),
            outputs,
        }
        .write(&manifest_path(out))
    }
}

fn gnuplot_paths(e: &EnsembleArgs) -> Result<Option<(PathBuf, PathBuf)>> {
    if !e.gnuplot {
        return Ok(None);
    }
    let Some(out) = &e.out else {
        bail!("--gnuplot needs --out");
    };
    Ok(Some((out.with_extension("gp"), out.with_extension("png"))))
}

fn sweep(a: SweepArgs, argv: &[String]) -> Result<Outcome> {
    let started = timestamp(Utc::now());
    ensure!(!a.alphas.is_empty() && !a.objects.is_empty(), "empty --alphas or --objects");
    let gp = gnuplot_paths(&a.ensemble)?;
    let d = &a.dynamics;
    let mut csv = String::from(output::SWEEP_HEADER);
    csv.push('\n');
    let mut first = None;
    for &mode in &a.mode {
        for &n in &a.objects {
            let base = base_config(n, 1, mode, d);
            let rows = sweep_alpha(&base, &a.alphas, a.ensemble.samples, d.seed, a.ensemble.workers)?;
            for row in &rows {
                first.get_or_insert_with(|| row.stats.config.clone());
                eprintln!(
                    "{mode} N={n} alpha={}: eps = {} +- {} (freeze rate {})",
                    num(row.alpha),
                    num(row.stats.mean_error),
                    num(row.stats.std_error),
                    num(row.stats.freeze_rate)
                );
                csv.push_str(&output::sweep_line(row));
                csv.push('\n');
            }
        }
    }
    let mut extra = Vec::new();
    if let (Some((script, image)), Some(out)) = (gp, &a.ensemble.out) {
        let modes: Vec<String> = a.mode.iter().map(|m| m.to_string()).collect();
        let max_alpha = a.alphas.iter().copied().fold(0.0, f64::max);
        extra.push((script, output::sweep_gnuplot(out, &image, &modes, &a.objects, max_alpha)));
    }
    Emitter {
        argv,
        config: first.expect("at least one row"),
        ensemble: &a.ensemble,
        master_seed: d.seed,
        started,
    }
    .emit(&csv, &extra)?;
    Ok(Outcome::Done)
}

fn parse_point(s: &str) -> Result<SizePoint> {
    let parts: Vec<&str> = s.split(':').collect();
    ensure!(parts.len() == 3, "point `{s}` is not N:MEAN:SE");
    Ok(SizePoint::new(
        parts[0].trim().parse().with_context(|| format!("bad N in `{s}`"))?,
        parts[1].trim().parse().with_context(|| format!("bad mean in `{s}`"))?,
        parts[2].trim().parse().with_context(|| format!("bad SE in `{s}`"))?,
    ))
}

fn extrapolate(a: ExtrapolateArgs, argv: &[String]) -> Result<Outcome> {
    let started = timestamp(Utc::now());
    let gp = gnuplot_paths(&a.ensemble)?;
    let d = &a.dynamics;
    let eps_r = asymptotic_error(a.alpha)?;
    let mut csv = String::from(output::EXTRAPOLATE_HEADER);
    csv.push('\n');
    let mut points = Vec::new();
    let mut references = Vec::new();
    let mut first = None;

    let mut reference = |n: usize| -> Result<(usize, f64)> {
        let h = words_for_alpha(a.alpha, n)?;
        let exact = exact_expected_error(n, h)?;
        references.push(format!("# exact_expected_error N={n} H={h}: {}", num(exact)));
        Ok((h, exact))
    };

    if a.points.is_empty() {
        for &n in &a.objects {
            let (h, exact) = reference(n)?;
            let config = base_config(n, h, a.mode, d);
            let stats = run_ensemble(&config, a.ensemble.samples, d.seed, a.ensemble.workers)?;
            first.get_or_insert_with(|| config.clone());
            eprintln!(
                "{} N={n}: eps = {} +- {} (freeze rate {})",
                a.mode,
                num(stats.mean_error),
                num(stats.std_error),
                num(stats.freeze_rate)
            );
            let _ = writeln!(
                csv,
                "{n},{},{h},{},{},{},{},{},{}",
                num(1.0 / n as f64),
                stats.n_samples,
                num(stats.mean_error),
                num(stats.std_error),
                num(stats.freeze_rate),
                num(stats.consensus_rate),
                num(exact)
            );
            points.push(SizePoint::from_stats(&stats));
        }
    } else {
        for p in &a.points {
            let p = parse_point(p)?;
            ensure!(p.n_objects > 0, "N must be positive");
            let (h, exact) = reference(p.n_objects)?;
            first.get_or_insert_with(|| base_config(p.n_objects, h, a.mode, d));
            let _ = writeln!(
                csv,
                "{},{},{h},,{},{},,,{}",
                p.n_objects,
                num(1.0 / p.n_objects as f64),
                num(p.mean_error),
                num(p.std_error),
                num(exact)
            );
            points.push(p);
        }
    }

    let fit = extrapolate_to_infinite_n(&points)?;
    let _ = write!(csv, "\n\n{}\n{}\n", output::FIT_HEADER, output::fit_line(&fit));

    let mut extra = Vec::new();
    if let (Some((script, image)), Some(out)) = (gp, &a.ensemble.out) {
        extra.push((script, output::extrapolate_gnuplot(out, &image, &fit, eps_r)));
    }
    let config = match first {
        Some(c) => c,
        None => bail!("no sizes given"),
    };
    Emitter {
        argv,
        config,
        ensemble: &a.ensemble,
        master_seed: d.seed,
        started,
    }
    .emit(&csv, &extra)?;

    println!("# asymptotic_error alpha={}: {}", num(a.alpha), num(eps_r));
    for line in references {
        println!("{line}");
    }
    println!(
        "# fit: intercept = {} +- {}, slope = {} +- {}",
        num(fit.intercept),
        num(fit.intercept_err),
        num(fit.slope),
        num(fit.slope_err)
    );
    Ok(Outcome::Done)
}

fn occupancy(a: OccupancyArgs) -> Result<Outcome> {
    let (n, h) = (a.objects, resolve_words(a.objects, a.words, a.alpha)?);
    ensure!(n > 0 && h > 0, "N and H must be at least 1");
    let exact = if n.max(h) <= EXACT_BOUND {
        Some(exact_unused_distribution(n, h)?)
    } else if a.poisson {
        None
    } else {
        bail!(
            "N={n}, H={h} exceeds the exact bound of {EXACT_BOUND}; pass --poisson to use the Poisson limit"
        );
    };
    let limit = PoissonLimit::from_sizes(n, h)?;
    println!("# N={n} H={h} lambda={}", num(limit.lambda()));
    match &exact {
        Some(dist) => {
            println!("m,p_exact,p_poisson");
            for (m, p) in dist.probabilities().iter().enumerate() {
                println!("{m},{},{}", num(*p), num(limit.pmf(m)));
            }
        }
        None => {
            println!("m,p_poisson");
            for m in 0..=h {
                let p = limit.pmf(m);
                if m as f64 > limit.lambda() && p < 1e-15 {
                    break;
                }
                println!("{m},{}", num(p));
            }
        }
    }
    let mean = match &exact {
        Some(dist) => dist.mean(),
        None => h as f64 * (n as f64 * (-1.0 / h as f64).ln_1p()).exp(),
    };
    println!("# mean_unused: {}", num(mean));
    if let Some(dist) = &exact {
        println!("# total_variation_vs_poisson: {}", num(dist.total_variation(&limit)));
    }
    println!("# eps_exact: {}", num(exact_expected_error(n, h)?));
    println!("# eps_asymptotic: {}", num(asymptotic_error(h as f64 / n as f64)?));
    if a.mc_samples > 0 {
        let errors = (0..a.mc_samples)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(a.seed, i));
                random_assignment_sample(n, h, &mut rng)
            })
            .collect::<lexiboot_core::Result<Vec<f64>>>()?;
        let (m, se) = mean_and_standard_error(&errors).expect("non-empty");
        println!("# eps_monte_carlo: {} +- {} ({} samples)", num(m), num(se), a.mc_samples);
    }
    Ok(Outcome::Done)
}

fn replay(a: ReplayArgs) -> Result<Outcome> {
    let manifest = RunManifest::read(&a.manifest)?;
    let mut argv = vec!["lexiboot".to_string()];
    argv.extend(manifest.argv.iter().cloned());
    if let Some(out) = &a.out {
        argv.push("--out".into());
        argv.push(out.display().to_string());
    }
    let cli = crate::Cli::try_parse_from(&argv)
        .with_context(|| format!("manifest {} holds an invalid command", a.manifest.display()))?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("a manifest cannot replay another replay");
    }
    dispatch(cli.command, &argv[1..])
}
