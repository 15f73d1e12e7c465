//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run a subset with `cargo test -p lexiboot-cli --test acceptance -- 3 7`.
//! The Monte Carlo criteria take several minutes on one core.

use std::collections::HashSet;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use lexiboot_core::game::Game;
use lexiboot_core::measures::lexicon_words;
use lexiboot_core::{
    accuracy_report, asymptotic_error, derive_seed, exact_expected_error,
    exact_unused_distribution, extrapolate_to_infinite_n, mean_and_standard_error, optimal_error,
    random_assignment_sample, run_ensemble_outcomes, Agent, EnsembleStats, GameConfig,
    LearningMode, SampleOutcome, SizePoint, VerbalizationMatrix, WordId,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const M: u32 = 10_000;
const SEED: u64 = 20_240_601;

type Check = fn(&mut Cache) -> Verdict;

struct Verdict {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Ensembles are computed once and shared between criteria.
#[derive(Default)]
struct Cache {
    entries: Vec<(GameConfig, Vec<SampleOutcome>)>,
}

impl Cache {
    fn outcomes(&mut self, config: &GameConfig, n: u64) -> &[SampleOutcome] {
        let pos = self.entries.iter().position(|(c, _)| c == config);
        let pos = match pos {
            Some(p) if self.entries[p].1.len() as u64 >= n => p,
            _ => {
                let t = Instant::now();
                let out = run_ensemble_outcomes(config, n, SEED, workers()).expect("valid ensemble");
                eprintln!(
                    "  ran {n} x {} N={} H={} C={} in {:.1}s",
                    config.mode,
                    config.n_objects,
                    config.n_words,
                    config.context_size,
                    t.elapsed().as_secs_f64()
                );
                match pos {
                    Some(p) => {
                        self.entries[p].1 = out;
                        p
                    }
                    None => {
                        self.entries.push((config.clone(), out));
                        self.entries.len() - 1
                    }
                }
            }
        };
        &self.entries[pos].1[..n as usize]
    }

    fn stats(&mut self, config: &GameConfig, n: u64) -> EnsembleStats {
        let outcomes = self.outcomes(config, n).to_vec();
        EnsembleStats::from_outcomes(config, &outcomes)
    }
}

fn cfg(n: usize, alpha: f64, c: usize, mode: LearningMode) -> GameConfig {
    let h = (alpha * n as f64).round() as usize;
    GameConfig::new(n, h, c, M, mode)
}

fn combined_se(a: &EnsembleStats, b: &EnsembleStats) -> f64 {
    (a.std_error * a.std_error + b.std_error * b.std_error).sqrt()
}

fn c1() -> Verdict {
    let eps = asymptotic_error(0.5).unwrap();
    let mut pass = (eps - 0.5677).abs() <= 1e-4;
    for k in 1..=10 {
        let alpha = k as f64 / 10.0;
        pass &= optimal_error(alpha).unwrap() == 1.0 - alpha;
    }
    for alpha in [1.01, 1.5, 2.0, 10.0] {
        pass &= optimal_error(alpha).unwrap() == 0.0;
    }
    Verdict {
        id: 1,
        name: "analytic anchors",
        pass,
        detail: format!("asymptotic_error(0.5) = {eps:.6}; optimal_error = 1 - alpha on 0.1..1, 0 above 1"),
    }
}

fn c2() -> Verdict {
    let t = Instant::now();
    let mut pass = true;
    let mut checked = 0;
    for n in 1..=5usize {
        for h in 1..=5usize {
            let total = h.pow(n as u32);
            let mut counts = vec![0u64; h + 1];
            for code in 0..total {
                let mut used = vec![false; h];
                let mut c = code;
                for _ in 0..n {
                    used[c % h] = true;
                    c /= h;
                }
                counts[used.iter().filter(|u| !**u).count()] += 1;
            }
            let dist = exact_unused_distribution(n, h).unwrap();
            pass &= dist.denominator() == &BigUint::from(h).pow(n as u32);
            for (m, &count) in counts.iter().enumerate() {
                let exact = if m < dist.probabilities().len() {
                    dist.numerator(m).clone()
                } else {
                    BigUint::from(0u8)
                };
                pass &= exact == BigUint::from(count);
            }
            checked += 1;
        }
    }
    let mut worst = 0.0f64;
    for n in 1..=60usize {
        for h in 1..=60usize {
            let reference = h as f64 * (1.0 - 1.0 / h as f64).powi(n as i32);
            worst = worst.max((exact_unused_distribution(n, h).unwrap().mean() - reference).abs());
        }
    }
    pass &= worst <= 1e-12;
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    Verdict {
        id: 2,
        name: "occupancy oracle",
        pass,
        detail: format!(
            "{checked} (N,H) <= 5 match enumeration exactly; max |mean - H(1-1/H)^N| over N,H <= 60 = {worst:.2e}; {secs:.1}s"
        ),
    }
}

fn c3() -> Verdict {
    let t = Instant::now();
    let errors: Vec<f64> = (0..10_000u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(SEED, i));
            random_assignment_sample(96, 48, &mut rng).unwrap()
        })
        .collect();
    let (mean, se) = mean_and_standard_error(&errors).unwrap();
    let exact = exact_expected_error(96, 48).unwrap();
    let z = (mean - exact) / se;
    let secs = t.elapsed().as_secs_f64();
    Verdict {
        id: 3,
        name: "random-assignment Monte Carlo",
        pass: z.abs() <= 3.0 && secs < 5.0,
        detail: format!(
            "mean {mean:.6} +- {se:.6} vs exact_expected_error(96,48) = {exact:.6} ({z:+.2} SE); {secs:.2}s"
        ),
    }
}

fn c4(cache: &mut Cache) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.25, 0.5, 1.0] {
        let s = cache.stats(&cfg(96, alpha, 2, LearningMode::Unsupervised), 200);
        let eps_r = asymptotic_error(alpha).unwrap();
        let ok = s.freeze_rate == 1.0 && (s.mean_error - eps_r).abs() <= 0.02;
        pass &= ok;
        parts.push(format!(
            "alpha={alpha}: {:.4} +- {:.4} vs {eps_r:.4}{}",
            s.mean_error,
            s.std_error,
            if ok { "" } else { " (off)" }
        ));
    }
    Verdict {
        id: 4,
        name: "unsupervised N=96 near the random-assignment curve",
        pass,
        detail: parts.join("; "),
    }
}

fn c5(cache: &mut Cache) -> Verdict {
    let sup = cache.stats(&cfg(16, 0.5, 2, LearningMode::Supervised), 1000);
    let uns = cache.stats(&cfg(16, 0.5, 2, LearningMode::Unsupervised), 1000);
    let gap = uns.mean_error - sup.mean_error;
    let se = combined_se(&sup, &uns);
    Verdict {
        id: 5,
        name: "supervised beats unsupervised at N=16",
        pass: gap > 3.0 * se,
        detail: format!(
            "supervised {:.4} +- {:.4}, unsupervised {:.4} +- {:.4}, gap {:.1} SE",
            sup.mean_error,
            sup.std_error,
            uns.mean_error,
            uns.std_error,
            gap / se
        ),
    }
}

fn c6(cache: &mut Cache) -> Verdict {
    let s16 = cache.stats(&cfg(16, 0.5, 2, LearningMode::Supervised), 1000);
    let s96 = cache.stats(&cfg(96, 0.5, 2, LearningMode::Supervised), 1000);
    let u16 = cache.stats(&cfg(16, 0.5, 2, LearningMode::Unsupervised), 1000);
    let u96 = cache.stats(&cfg(96, 0.5, 2, LearningMode::Unsupervised), 1000);
    let sup_gap = (s96.mean_error - s16.mean_error) / combined_se(&s96, &s16);
    let uns_gap = (u16.mean_error - u96.mean_error) / combined_se(&u16, &u96);
    Verdict {
        id: 6,
        name: "size trends",
        pass: sup_gap > 3.0 && uns_gap > 3.0,
        detail: format!(
            "supervised N=16 {:.4} -> N=96 {:.4} (rise {sup_gap:.1} SE); unsupervised N=16 {:.4} -> N=96 {:.4} (drop {uns_gap:.1} SE)",
            s16.mean_error, s96.mean_error, u16.mean_error, u96.mean_error
        ),
    }
}

fn c7(cache: &mut Cache) -> Verdict {
    let points: Vec<SizePoint> = [16, 24, 32, 48, 96]
        .iter()
        .map(|&n| SizePoint::from_stats(&cache.stats(&cfg(n, 0.5, 2, LearningMode::Unsupervised), 1000)))
        .collect();
    let fit = extrapolate_to_infinite_n(&points).unwrap();
    let listing: Vec<String> = points
        .iter()
        .map(|p| format!("{}:{:.4}", p.n_objects, p.mean_error))
        .collect();
    Verdict {
        id: 7,
        name: "1/N extrapolation",
        pass: (fit.intercept - 0.5677).abs() <= 0.01,
        detail: format!(
            "intercept {:.4} +- {:.4}, slope {:.3} +- {:.3} (points {})",
            fit.intercept,
            fit.intercept_err,
            fit.slope,
            fit.slope_err,
            listing.join(" ")
        ),
    }
}

fn c8(cache: &mut Cache) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0] {
        let s = cache.stats(&cfg(96, alpha, 4, LearningMode::Unsupervised), 200);
        let eps_r = asymptotic_error(alpha).unwrap();
        let ok = s.freeze_rate == 1.0 && (s.mean_error - eps_r).abs() <= 0.03;
        pass &= ok;
        parts.push(format!(
            "alpha={alpha}: {:.4} +- {:.4} vs {eps_r:.4}{}",
            s.mean_error,
            s.std_error,
            if ok { "" } else { " (off)" }
        ));
    }
    Verdict {
        id: 8,
        name: "context size C=4",
        pass,
        detail: parts.join("; "),
    }
}

fn c9(cache: &mut Cache) -> Verdict {
    let outcomes = cache.outcomes(&cfg(16, 0.5, 2, LearningMode::Unsupervised), 1000);
    let frozen: Vec<&SampleOutcome> = outcomes.iter().filter(|o| o.frozen).collect();
    let violating: Vec<u64> = frozen.iter().filter(|o| !o.consensus).map(|o| o.seed).collect();
    let rate = 1.0 - violating.len() as f64 / frozen.len().max(1) as f64;
    Verdict {
        id: 9,
        name: "consensus",
        pass: frozen.len() == 1000 && rate >= 0.99,
        detail: format!(
            "{} frozen games, consensus rate {rate:.4}, violating seeds {violating:?}",
            frozen.len()
        ),
    }
}

fn check_step(before: &VerbalizationMatrix, after: &VerbalizationMatrix, m: u32) -> Result<(), String> {
    for (o, (rb, ra)) in before.rows().zip(after.rows()).enumerate() {
        if ra.iter().map(|&c| c as u64).sum::<u64>() != m as u64 {
            return Err(format!("row {o} no longer sums to M"));
        }
        for (w, (&b, &a)) in rb.iter().zip(ra).enumerate() {
            if (b == 0 || b == m) && a != b {
                return Err(format!("absorbed entry ({o},{w}) moved from {b} to {a}"));
            }
        }
    }
    Ok(())
}

fn dynamics_properties() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut games = 0;
    for _ in 0..300 {
        let n = rng.random_range(1..=7);
        let h = rng.random_range(1..=7);
        let c = rng.random_range(1..=n);
        let m = rng.random_range(1..=25);
        let mode = if rng.random_bool(0.5) {
            LearningMode::Supervised
        } else {
            LearningMode::Unsupervised
        };
        let config = GameConfig::new(n, h, c, m, mode)
            .with_seed(rng.random())
            .with_max_episodes(20_000);
        let mut game = Game::new(&config).map_err(|e| e.to_string())?;
        let mut frozen_i = game.agent(Agent::I).frozen_rows();
        let mut frozen_j = game.agent(Agent::J).frozen_rows();
        while !game.is_frozen() && game.episodes() < config.max_episodes {
            let (bi, bj) = (game.agent(Agent::I).clone(), game.agent(Agent::J).clone());
            game.step();
            let (ai, aj) = (game.agent(Agent::I), game.agent(Agent::J));
            check_step(&bi, ai, m)?;
            check_step(&bj, aj, m)?;
            if ai.frozen_rows() < frozen_i || aj.frozen_rows() < frozen_j {
                return Err(format!("frozen row count fell in {config:?}"));
            }
            frozen_i = ai.frozen_rows();
            frozen_j = aj.frozen_rows();
        }
        if game.is_frozen() {
            for agent in [Agent::I, Agent::J] {
                let matrix = game.agent(agent);
                for row in matrix.rows() {
                    if row.iter().filter(|&&c| c == m).count() != 1
                        || row.iter().any(|&c| c != 0 && c != m)
                    {
                        return Err(format!("frozen row {row:?} is not binary"));
                    }
                }
            }
        }
        games += 1;
    }
    Ok(games)
}

fn identities() -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=4usize {
        for h in 1..=4usize {
            for code in 0..h.pow(n as u32) {
                let mut c = code;
                let words: Vec<WordId> = (0..n)
                    .map(|_| {
                        let w = WordId(c % h);
                        c /= h;
                        w
                    })
                    .collect();
                let matrix = VerbalizationMatrix::from_assignment(&words, h, 3).unwrap();
                let report = accuracy_report(&matrix).unwrap();
                let used: HashSet<WordId> = lexicon_words(&matrix).unwrap().into_iter().collect();
                let sum = report
                    .per_object_accuracy
                    .iter()
                    .fold(num_rational::Ratio::from_integer(0u64), |a, b| a + b);
                if sum != report.used_words || sum != num_rational::Ratio::from_integer(used.len() as u64) {
                    return Err(format!("H_u identity fails for {words:?}"));
                }
                for w in &used {
                    let restricted = (0..n)
                        .filter(|&o| words[o] == *w)
                        .fold(num_rational::Ratio::from_integer(0u64), |a, o| {
                            a + report.per_object_accuracy[o]
                        });
                    if restricted != num_rational::Ratio::from_integer(1) {
                        return Err(format!("restricted sum for word {} in {words:?} is {restricted}", w.0));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn csv_determinism() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut csvs = Vec::new();
    for workers in [1, 4] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_lexiboot"))
            .args([
                "sweep", "--alphas", "0.25,0.5,1", "--objects", "8,12", "--mode",
                "unsupervised,supervised", "--samples", "24", "--resolution", "200",
                "--seed", "11", "--workers",
            ])
            .arg(workers.to_string())
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        csvs.push(fs::read(&out).map_err(|e| e.to_string())?);
    }
    if csvs[0] != csvs[1] {
        return Err("CSV differs between 1 and 4 workers".into());
    }
    Ok(())
}

fn c10() -> Verdict {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    match dynamics_properties() {
        Ok(g) => notes.push(format!("conservation/absorption/binary-at-freeze over {g} games")),
        Err(e) => failures.push(e),
    }
    match identities() {
        Ok(k) => notes.push(format!("H_u and restricted-sum identities over {k} lexicons")),
        Err(e) => failures.push(e),
    }
    match csv_determinism() {
        Ok(()) => notes.push("CSV identical for 1 and 4 workers".into()),
        Err(e) => failures.push(e),
    }
    Verdict {
        id: 10,
        name: "property suites",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            notes.join("; ")
        } else {
            failures.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.trim_start_matches(['C', 'c']).parse().ok())
        .collect();
    let run = |id: u32| wanted.is_empty() || wanted.contains(&id);

    let mut cache = Cache::default();
    let criteria: [(u32, Check); 10] = [
        (1, |_| c1()),
        (2, |_| c2()),
        (3, |_| c3()),
        (10, |_| c10()),
        (5, c5),
        (9, c9),
        (6, c6),
        (4, c4),
        (7, c7),
        (8, c8),
    ];
    let mut verdicts = Vec::new();
    for (id, f) in criteria {
        if !run(id) {
            continue;
        }
        let t = Instant::now();
        let v = f(&mut cache);
        eprintln!("  criterion {id} done in {:.1}s", t.elapsed().as_secs_f64());
        verdicts.push(v);
    }
    verdicts.sort_by_key(|v| v.id);
    println!();
    for v in &verdicts {
        println!(
            "criterion {:>2} {}: {} ({})",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!("\n{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
