use std::fs;
use std::path::Path;

use freeway_dqn::agent::Variant;
use freeway_dqn::harness::metrics::{discounted_return, parse_metrics_csv, EpisodeMetrics};
use freeway_dqn::harness::{self, RunConfig};
use freeway_dqn::nn::{load_params, save_params, write_params, NetworkSpec, QNetwork};
use freeway_dqn::rng::CounterRng;
use freeway_dqn::sim::{Action, World, OBSERVATION_DIM};

fn small(episodes: u64, variant: Variant) -> RunConfig {
    let mut c = RunConfig::default();
    c.run.episodes = episodes;
    c.run.eval_episodes = 3;
    c.run.baseline_episodes = 5;
    c.run.seed = 11;
    c.agent.variant = variant;
    c.agent.lr = 0.003;
    c
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn zero_episodes_writes_header_and_initial_weights() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(0, Variant::Dql);
    harness::train(&c, dir.path()).unwrap();
    assert_eq!(read(&dir.path().join("metrics.csv")).lines().count(), 1);
    let spec = c.agent.network_spec(OBSERVATION_DIM, Action::COUNT);
    let initial = QNetwork::new(&spec, &mut CounterRng::new(c.run.seed).split(harness::STREAM_AGENT)).unwrap();
    assert_eq!(read(&dir.path().join("params.txt")), write_params(&initial));
}

#[test]
fn resolved_config_is_written_back() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(1, Variant::Per);
    harness::train(&c, dir.path()).unwrap();
    assert_eq!(RunConfig::load(&dir.path().join("config.toml")).unwrap(), c);
}

#[test]
fn params_file_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for variant in [Variant::Dql, Variant::Dueling] {
        let c = small(2, variant);
        let out = dir.path().join(variant.name());
        harness::train(&c, &out).unwrap();
        let spec = c.agent.network_spec(OBSERVATION_DIM, Action::COUNT);
        let net = load_params(&out.join("params.txt"), Some(&spec)).unwrap();
        save_params(&out.join("again.txt"), &net).unwrap();
        assert_eq!(read(&out.join("params.txt")), read(&out.join("again.txt")));
    }
}

#[test]
fn eval_rejects_mismatched_architecture() {
    let dir = tempfile::tempdir().unwrap();
    harness::train(&small(1, Variant::Dql), dir.path()).unwrap();
    let err = harness::evaluate(&small(1, Variant::Dueling), &dir.path().join("params.txt"), dir.path()).unwrap_err();
    assert_eq!(err.kind(), "params");
    let msg = err.to_string();
    assert!(msg.contains("plain") && msg.contains("dueling"), "{msg}");
}

fn check_coherence(rows: &[EpisodeMetrics]) {
    for m in rows {
        assert!(m.steps <= 100);
        assert!(m.distance <= 40.0 * m.steps as f64 + 1e-9, "{m:?}");
        assert!(m.steps == 100 || m.collision, "{m:?}");
        assert_eq!(m.norm_reward, m.cum_reward / 100.0);
        assert!((0.0..=1.0).contains(&m.norm_reward));
        assert!(m.disc_return <= m.cum_reward + 1e-12);
    }
}

#[test]
fn metric_rows_are_coherent() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(20, Variant::Ddql);
    harness::train(&c, dir.path()).unwrap();
    check_coherence(&parse_metrics_csv(&read(&dir.path().join("metrics.csv"))).unwrap());
}

#[test]
fn eval_logs_match_metric_rows() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(5, Variant::Dql);
    harness::train(&c, dir.path()).unwrap();
    let out = harness::evaluate(&c, &dir.path().join("params.txt"), dir.path()).unwrap();
    assert_eq!(out.metrics.len(), 3);
    check_coherence(&out.metrics);
    for m in &out.metrics {
        let rewards: Vec<f64> = out.actions.iter().filter(|a| a.episode == m.episode).map(|a| a.reward).collect();
        assert_eq!(rewards.len(), m.steps as usize);
        assert!((discounted_return(&rewards, c.agent.gamma) - m.disc_return).abs() < 1e-9);
        assert!(out.actions.iter().all(|a| a.action < Action::COUNT));
    }
    let log = read(&dir.path().join("actions.csv"));
    assert_eq!(log.lines().next().unwrap(), "episode,step,action_index,reward,ego_speed,ego_lane");
    assert_eq!(log.lines().count(), out.actions.len() + 1);

    let again = tempfile::tempdir().unwrap();
    harness::evaluate(&c, &dir.path().join("params.txt"), again.path()).unwrap();
    assert_eq!(log, read(&again.path().join("actions.csv")));
}

#[test]
fn always_faster_on_empty_road_scores_high() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(0, Variant::Dql);
    c.scenario.surrounding_count = 0;
    c.scenario.ego_lane = Some(2);
    let spec = c.agent.network_spec(OBSERVATION_DIM, Action::COUNT);
    let mut net = QNetwork::zeros(&spec);
    let bias = net.matrices_mut().pop().unwrap();
    bias.values_mut()[Action::Faster.index()] = 1.0;
    let params = dir.path().join("faster.txt");
    save_params(&params, &net).unwrap();
    let out = harness::evaluate(&c, &params, dir.path()).unwrap();
    for m in &out.metrics {
        assert_eq!(m.steps, 100);
        assert!(m.norm_reward >= 0.9, "{m:?}");
    }
    assert!(out.actions.iter().all(|a| a.action == Action::Faster.index()));
}

#[test]
fn training_is_reproducible_per_variant() {
    for variant in Variant::ALL {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let c = small(6, variant);
        harness::train(&c, a.path()).unwrap();
        harness::train(&c, b.path()).unwrap();
        for f in ["metrics.csv", "params.txt"] {
            assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{variant} {f}");
        }
    }
}

#[test]
fn variants_share_scenarios() {
    let base = small(4, Variant::Dql);
    for e in 0..4 {
        let spawn = |v: Variant| {
            let mut c = base.clone();
            c.agent.variant = v;
            format!("{:?}", World::spawn(&c.sim_config(harness::train_scenario_seed(c.run.seed, e))).unwrap())
        };
        let reference = spawn(Variant::Dql);
        for v in Variant::ALL {
            assert_eq!(spawn(v), reference);
        }
    }
}

#[test]
fn divergence_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(30, Variant::Dql);
    c.agent.lr = 1e6;
    c.agent.grad_clip = 0.0;
    let err = harness::train(&c, dir.path()).unwrap_err();
    assert_eq!(err.kind(), "diverged");
    assert!(dir.path().join("diverged.txt").exists());
    assert!(!dir.path().join("params.txt").exists());
    assert!(parse_metrics_csv(&read(&dir.path().join("metrics.csv"))).is_some());
}

#[test]
fn plain_and_dueling_files_are_not_interchangeable() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = CounterRng::new(1);
    let plain = QNetwork::new(&NetworkSpec::plain(4, &[3], 2), &mut rng).unwrap();
    let dueling = QNetwork::new(&NetworkSpec::dueling(4, &[3], &[3], 2), &mut rng).unwrap();
    save_params(&dir.path().join("p.txt"), &plain).unwrap();
    save_params(&dir.path().join("d.txt"), &dueling).unwrap();
    assert!(load_params(&dir.path().join("p.txt"), Some(&dueling.spec())).is_err());
    assert!(load_params(&dir.path().join("d.txt"), Some(&plain.spec())).is_err());
}
