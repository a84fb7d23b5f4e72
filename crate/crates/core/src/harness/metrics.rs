use std::fmt::Write as _;

pub const METRICS_HEADER: &str =
    "episode,steps,cum_reward,norm_reward,disc_return,mean_speed,distance,mean_td_error,mean_loss,collision,epsilon";
pub const ACTIONS_HEADER: &str = "episode,step,action_index,reward,ego_speed,ego_lane";

/// One CSV row per episode. Means over an episode without training steps are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeMetrics {
    pub episode: u64,
    pub steps: u32,
    pub cum_reward: f64,
    pub norm_reward: f64,
    pub disc_return: f64,
    pub mean_speed: f64,
    pub distance: f64,
    pub mean_td_error: f64,
    pub mean_loss: f64,
    pub collision: bool,
    pub epsilon: f64,
}

impl EpisodeMetrics {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.episode,
            self.steps,
            self.cum_reward,
            self.norm_reward,
            self.disc_return,
            self.mean_speed,
            self.distance,
            self.mean_td_error,
            self.mean_loss,
            self.collision as u8,
            self.epsilon
        )
    }

    pub fn parse_row(line: &str) -> Option<Self> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return None;
        }
        let num = |i: usize| f[i].parse::<f64>().ok();
        Some(Self {
            episode: f[0].parse().ok()?,
            steps: f[1].parse().ok()?,
            cum_reward: num(2)?,
            norm_reward: num(3)?,
            disc_return: num(4)?,
            mean_speed: num(5)?,
            distance: num(6)?,
            mean_td_error: num(7)?,
            mean_loss: num(8)?,
            collision: match f[9] {
                "1" => true,
                "0" => false,
                _ => return None,
            },
            epsilon: num(10)?,
        })
    }
}

pub fn metrics_csv(rows: &[EpisodeMetrics]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Parses a metrics file written by [`metrics_csv`].
pub fn parse_metrics_csv(text: &str) -> Option<Vec<EpisodeMetrics>> {
    let mut lines = text.lines();
    if lines.next()? != METRICS_HEADER {
        return None;
    }
    lines.map(EpisodeMetrics::parse_row).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionRecord {
    pub episode: u64,
    pub step: u32,
    pub action: usize,
    pub reward: f64,
    pub ego_speed: f64,
    pub ego_lane: usize,
}

pub fn actions_csv(rows: &[ActionRecord]) -> String {
    let mut out = String::from(ACTIONS_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.episode, r.step, r.action, r.reward, r.ego_speed, r.ego_lane).unwrap();
    }
    out
}

/// Accumulates one episode's per-step values.
#[derive(Debug, Clone)]
pub struct EpisodeTally {
    gamma: f64,
    discount: f64,
    steps: u32,
    cum_reward: f64,
    disc_return: f64,
    speed_sum: f64,
    td_sum: f64,
    loss_sum: f64,
    updates: u32,
}

impl EpisodeTally {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            discount: 1.0,
            steps: 0,
            cum_reward: 0.0,
            disc_return: 0.0,
            speed_sum: 0.0,
            td_sum: 0.0,
            loss_sum: 0.0,
            updates: 0,
        }
    }

    pub fn record_step(&mut self, reward: f64, ego_speed: f64) {
        self.steps += 1;
        self.cum_reward += reward;
        self.disc_return += self.discount * reward;
        self.discount *= self.gamma;
        self.speed_sum += ego_speed;
    }

    pub fn record_update(&mut self, loss: f64, td_error: f64) {
        self.updates += 1;
        self.loss_sum += loss;
        self.td_sum += td_error;
    }

    /// `max_reward` is the best possible episode score (one per policy step).
    pub fn finish(&self, episode: u64, distance: f64, collision: bool, epsilon: f64, max_reward: f64) -> EpisodeMetrics {
        let per_update = |sum: f64| if self.updates == 0 { f64::NAN } else { sum / self.updates as f64 };
        EpisodeMetrics {
            episode,
            steps: self.steps,
            cum_reward: self.cum_reward,
            norm_reward: self.cum_reward / max_reward,
            disc_return: self.disc_return,
            mean_speed: if self.steps == 0 { 0.0 } else { self.speed_sum / self.steps as f64 },
            distance,
            mean_td_error: per_update(self.td_sum),
            mean_loss: per_update(self.loss_sum),
            collision,
            epsilon,
        }
    }
}

/// `sum_t gamma^t r_t`, evaluated in the same order as [`EpisodeTally`].
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut total = 0.0;
    let mut discount = 1.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    total
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolated quantile of a non-empty sample, `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
