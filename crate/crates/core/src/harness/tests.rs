use super::metrics::*;
use super::*;
use crate::agent::Variant;

#[test]
fn defaults_match_protocol() {
    let c = RunConfig::default();
    assert_eq!(c.run.episodes, 2000);
    assert_eq!(c.run.eval_episodes, 10);
    assert_eq!(c.scenario.surrounding_count, 15);
    assert_eq!(c.road.lane_count, 3);
    assert_eq!(c.agent.gamma, 0.8);
    assert_eq!(c.agent.lr, 0.2);
}

#[test]
fn config_round_trips_through_toml() {
    let mut c = RunConfig::default();
    c.agent.variant = Variant::Per;
    c.agent.per.psi = 0.5;
    c.scenario.ego_lane = Some(2);
    c.run.seed = 77;
    let back = RunConfig::parse(&c.to_toml(), "mem").unwrap();
    assert_eq!(back, c);
}

#[test]
fn partial_config_keeps_defaults() {
    let c = RunConfig::parse("[agent]\nlr = 0.01\nvariant = \"dueling\"\n", "mem").unwrap();
    assert_eq!(c.agent.lr, 0.01);
    assert_eq!(c.agent.variant, Variant::Dueling);
    assert_eq!(c.agent.batch_size, 32);
    assert_eq!(c.idm.a_max, 6.0);
}

#[test]
fn config_errors_name_the_line() {
    let err = RunConfig::parse("[run]\nepisodes = 3\n\n[agent]\nlearning_rate = 0.1\n", "cfg.toml").unwrap_err();
    let msg = err.to_string();
    assert!(msg.starts_with("cfg.toml:"), "{msg}");
    assert!(msg.contains("line 5"), "{msg}");
    assert!(msg.contains("learning_rate"), "{msg}");
    assert_eq!(err.kind(), "config");
}

#[test]
fn invalid_values_rejected() {
    assert!(RunConfig::parse("[agent]\ngamma = 1.0\n", "m").is_err());
    assert!(RunConfig::parse("[scenario]\nsim_hz = 7\npolicy_hz = 2\n", "m").is_err());
    assert!(RunConfig::parse("[agent]\nvariant = \"rainbow\"\n", "m").is_err());
}

fn row(episode: u64) -> EpisodeMetrics {
    EpisodeMetrics {
        episode,
        steps: 37,
        cum_reward: 12.345678901234567,
        norm_reward: 0.12345678901234566,
        disc_return: 1.1,
        mean_speed: 27.5,
        distance: 1017.25,
        mean_td_error: f64::NAN,
        mean_loss: 0.003,
        collision: true,
        epsilon: 0.05,
    }
}

#[test]
fn metrics_csv_round_trip() {
    let rows = vec![row(0), row(1)];
    let text = metrics_csv(&rows);
    assert!(text.starts_with("episode,steps,cum_reward,norm_reward,disc_return,mean_speed,distance,"));
    let back = parse_metrics_csv(&text).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[1].cum_reward.to_bits(), rows[1].cum_reward.to_bits());
    assert!(back[0].mean_td_error.is_nan());
    assert!(back[0].collision);
    assert_eq!(metrics_csv(&back), text);
}

#[test]
fn tally_matches_direct_sums() {
    let rewards = [0.5, 0.25, 1.0, 0.0, 0.75];
    let mut t = EpisodeTally::new(0.8);
    for r in rewards {
        t.record_step(r, 30.0);
    }
    t.record_update(2.0, 0.5);
    t.record_update(4.0, 1.5);
    let m = t.finish(3, 150.0, false, 0.1, 100.0);
    assert_eq!(m.steps, 5);
    assert_eq!(m.cum_reward, 2.5);
    assert_eq!(m.norm_reward, 0.025);
    assert_eq!(m.disc_return, discounted_return(&rewards, 0.8));
    assert!((m.disc_return - (0.5 + 0.8 * 0.25 + 0.64 * 1.0 + 0.8f64.powi(4) * 0.75)).abs() < 1e-12);
    assert_eq!(m.mean_loss, 3.0);
    assert_eq!(m.mean_td_error, 1.0);
    assert_eq!(m.mean_speed, 30.0);
}

#[test]
fn quantiles() {
    let v = [4.0, 1.0, 3.0, 2.0];
    assert_eq!(quantile(&v, 0.0), 1.0);
    assert_eq!(quantile(&v, 1.0), 4.0);
    assert_eq!(quantile(&v, 0.5), 2.5);
    assert_eq!(quantile(&v, 0.25), 1.75);
    assert!(quantile(&[], 0.5).is_nan());
    assert_eq!(mean(&v), 2.5);
}

#[test]
fn scenario_seeds_depend_on_stream_and_episode() {
    assert_eq!(train_scenario_seed(5, 3), train_scenario_seed(5, 3));
    assert_ne!(train_scenario_seed(5, 3), train_scenario_seed(5, 4));
    assert_ne!(train_scenario_seed(5, 3), eval_scenario_seed(5, 3));
    assert_ne!(train_scenario_seed(5, 3), train_scenario_seed(6, 3));
}

#[test]
fn summary_has_one_row_per_variant_and_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default();
    c.run.episodes = 3;
    c.run.eval_episodes = 2;
    c.run.baseline_episodes = 2;
    c.agent.lr = 0.01;
    let report = compare(&c, dir.path()).unwrap();
    let summary = report.summary_csv();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], SUMMARY_HEADER);
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["dql", "ddql", "dueling", "per", "random"]);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == SUMMARY_HEADER.split(',').count()));
    let returns = std::fs::read_to_string(dir.path().join("returns.csv")).unwrap();
    assert_eq!(returns.lines().next().unwrap(), "episode,dql,ddql,dueling,per");
    assert_eq!(returns.lines().count(), 4);
    for v in ["dql", "ddql", "dueling", "per"] {
        for f in ["metrics.csv", "params.txt", "config.toml", "eval_metrics.csv", "actions.csv"] {
            assert!(dir.path().join(v).join(f).exists(), "{v}/{f}");
        }
    }
}
