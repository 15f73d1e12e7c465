//! CSV formatting and gnuplot scripts.

use std::fmt::Write as _;
use std::path::Path;

use lexiboot_core::{FitResult, SweepRow};

pub const SWEEP_HEADER: &str =
    "alpha,N,H,C,M,mode,samples,mean_eps,se_eps,freeze_rate,consensus_rate,eps_random,eps_optimal";

pub const EXTRAPOLATE_HEADER: &str =
    "N,inv_N,H,samples,mean_eps,se_eps,freeze_rate,consensus_rate,eps_exact_random";

pub const FIT_HEADER: &str = "intercept,intercept_err,slope,slope_err";

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

pub fn sweep_line(row: &SweepRow) -> String {
    let s = &row.stats;
    let c = &s.config;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        num(row.alpha),
        c.n_objects,
        c.n_words,
        c.context_size,
        c.resolution,
        c.mode,
        s.n_samples,
        num(s.mean_error),
        num(s.std_error),
        num(s.freeze_rate),
        num(s.consensus_rate),
        num(row.eps_random),
        num(row.eps_optimal),
    )
}

pub fn fit_line(fit: &FitResult) -> String {
    format!(
        "{},{},{},{}",
        num(fit.intercept),
        num(fit.intercept_err),
        num(fit.slope),
        num(fit.slope_err)
    )
}

fn quoted(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', "''"))
}

const REFERENCE_CURVES: &str = "\
eps_r(a) = 1 - a + a*exp(-1/a)
eps_m(a) = a < 1 ? 1 - a : 0
";

/// Points with error bars per (mode, N), the random-assignment curve (solid)
/// and the optimal error (dashed).
pub fn sweep_gnuplot(csv: &Path, image: &Path, modes: &[String], sizes: &[usize], max_alpha: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output {}", quoted(image));
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'alpha = H/N'");
    let _ = writeln!(s, "set ylabel 'communication error'");
    let _ = writeln!(s, "set xrange [0:{}]", num(max_alpha * 1.05));
    let _ = writeln!(s, "set yrange [0:1]");
    let _ = writeln!(s, "set samples 400");
    s.push_str(REFERENCE_CURVES);
    let _ = write!(
        s,
        "plot eps_r(x) with lines lt 1 lc rgb 'black' title 'random assignment', \\\n     eps_m(x) with lines dt 2 lc rgb 'black' title 'optimal'"
    );
    for mode in modes {
        for n in sizes {
            let _ = write!(
                s,
                ", \\\n     {} skip 1 using 1:(($2 == {n} && strcol(6) eq '{mode}') ? $8 : 1/0):9 with yerrorbars title '{mode} N={n}'",
                quoted(csv)
            );
        }
    }
    s.push('\n');
    s
}

/// Error against 1/N with the fitted line and the large-size reference.
pub fn extrapolate_gnuplot(csv: &Path, image: &Path, fit: &FitResult, eps_r: f64) -> String {
    let max_x = fit.points.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output {}", quoted(image));
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel '1/N'");
    let _ = writeln!(s, "set ylabel 'communication error'");
    let _ = writeln!(s, "set xrange [0:{}]", num(max_x * 1.1));
    let _ = writeln!(s, "fit_line(x) = {} + {}*x", num(fit.intercept), num(fit.slope));
    let _ = writeln!(s, "eps_r = {}", num(eps_r));
    let _ = writeln!(
        s,
        "plot {} index 0 skip 1 using 2:5:6 with yerrorbars title 'simulation', \\\n     fit_line(x) with lines lt 1 title 'weighted fit', \\\n     eps_r with lines dt 2 lc rgb 'black' title 'random assignment, N -> infinity'",
        quoted(csv)
    );
    s
}
