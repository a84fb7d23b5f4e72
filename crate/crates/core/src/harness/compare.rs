use std::fmt::Write as _;
use std::path::Path;

use crate::agent::Variant;

use super::config::RunConfig;
use super::metrics::{mean, metrics_csv, quantile, EpisodeMetrics};
use super::run::{evaluate_network, random_baseline, train, write_eval, EvalOutput, TrainOutput};
use super::{write_file, HarnessError};

pub const SUMMARY_HEADER: &str = "variant,episodes,norm_reward_mean,norm_reward_median,norm_reward_min,norm_reward_max,\
trailing30_norm_reward,mean_speed,distance_min,distance_q1,distance_median,distance_q3,distance_max,collision_rate,\
eval_norm_reward_mean,eval_collision_rate";

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub variant: Variant,
    pub train: TrainOutput,
    pub eval: EvalOutput,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub variants: Vec<VariantResult>,
    pub baseline: EvalOutput,
}

fn column(rows: &[EpisodeMetrics], f: impl Fn(&EpisodeMetrics) -> f64) -> Vec<f64> {
    rows.iter().map(f).collect()
}

pub fn collision_rate(rows: &[EpisodeMetrics]) -> f64 {
    mean(&column(rows, |m| m.collision as u8 as f64))
}

/// Mean normalized reward of the last `n` rows (or all, if fewer).
pub fn trailing_mean(rows: &[EpisodeMetrics], n: usize) -> f64 {
    mean(&column(&rows[rows.len().saturating_sub(n)..], |m| m.norm_reward))
}

pub fn leading_mean(rows: &[EpisodeMetrics], n: usize) -> f64 {
    mean(&column(&rows[..n.min(rows.len())], |m| m.norm_reward))
}

fn summary_row(name: &str, train: &[EpisodeMetrics], eval: &[EpisodeMetrics]) -> String {
    let norm = column(train, |m| m.norm_reward);
    let dist = column(train, |m| m.distance);
    let mut row = format!("{name},{}", train.len());
    for v in [
        mean(&norm),
        quantile(&norm, 0.5),
        quantile(&norm, 0.0),
        quantile(&norm, 1.0),
        trailing_mean(train, 30),
        mean(&column(train, |m| m.mean_speed)),
        quantile(&dist, 0.0),
        quantile(&dist, 0.25),
        quantile(&dist, 0.5),
        quantile(&dist, 0.75),
        quantile(&dist, 1.0),
        collision_rate(train),
        mean(&column(eval, |m| m.norm_reward)),
        collision_rate(eval),
    ] {
        write!(row, ",{v}").unwrap();
    }
    row
}

impl ComparisonReport {
    /// One row per variant plus a final `random` row, whose training columns
    /// describe the baseline episodes and whose eval columns repeat them.
    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for v in &self.variants {
            writeln!(out, "{}", summary_row(v.variant.name(), &v.train.metrics, &v.eval.metrics)).unwrap();
        }
        writeln!(out, "{}", summary_row("random", &self.baseline.metrics, &self.baseline.metrics)).unwrap();
        out
    }

    /// Discounted return per training episode, one column per variant.
    pub fn returns_csv(&self) -> String {
        let mut out = String::from("episode");
        for v in &self.variants {
            write!(out, ",{}", v.variant.name()).unwrap();
        }
        out.push('\n');
        let n = self.variants.iter().map(|v| v.train.metrics.len()).max().unwrap_or(0);
        for e in 0..n {
            write!(out, "{e}").unwrap();
            for v in &self.variants {
                match v.train.metrics.get(e) {
                    Some(m) => write!(out, ",{}", m.disc_return).unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Trains and evaluates every variant under `base` (same seed, hence the
/// same scenario schedule), runs the random baseline, and writes
/// `<out>/<variant>/...`, `baseline_metrics.csv`, `summary.csv` and
/// `returns.csv`. Variants run on separate threads.
pub fn compare(base: &RunConfig, out: &Path) -> Result<ComparisonReport, HarnessError> {
    base.validate()?;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    write_file(&out.join("config.toml"), &base.to_toml())?;

    let results: Vec<Result<VariantResult, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = Variant::ALL
            .into_iter()
            .map(|variant| {
                let mut config = base.clone();
                config.agent.variant = variant;
                let dir = out.join(variant.name());
                scope.spawn(move || -> Result<VariantResult, HarnessError> {
                    let tagged = |e| HarnessError::Variant { variant: variant.name(), source: Box::new(e) };
                    let train = train(&config, &dir).map_err(tagged)?;
                    let eval = evaluate_network(&config, &train.network).map_err(tagged)?;
                    write_eval(&eval, &dir).map_err(tagged)?;
                    Ok(VariantResult { variant, train, eval })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("variant thread panicked")).collect()
    });
    let variants = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let baseline = random_baseline(base)?;
    write_file(&out.join("baseline_metrics.csv"), &metrics_csv(&baseline.metrics))?;
    let report = ComparisonReport { variants, baseline };
    write_file(&out.join("summary.csv"), &report.summary_csv())?;
    write_file(&out.join("returns.csv"), &report.returns_csv())?;
    Ok(report)
}
