use serde::{Deserialize, Serialize};

use super::matrix::{dot, Matrix};
use super::{argmax, NnError};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
    /// Smooth activation; not used by the default agents.
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Linear => "linear",
            Activation::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "linear" => Some(Activation::Linear),
            "tanh" => Some(Activation::Tanh),
            _ => None,
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Linear => z,
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output `y`.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self { in_dim, out_dim, activation }
    }
}

/// Architecture descriptor: layer shapes without weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetworkSpec {
    Plain(Vec<LayerSpec>),
    Dueling {
        trunk: Vec<LayerSpec>,
        value: Vec<LayerSpec>,
        advantage: Vec<LayerSpec>,
    },
}

fn stack(input: usize, hidden: &[usize], output: Option<usize>, hidden_act: Activation) -> Vec<LayerSpec> {
    let mut layers = Vec::new();
    let mut prev = input;
    for &h in hidden {
        layers.push(LayerSpec::new(prev, h, hidden_act));
        prev = h;
    }
    if let Some(out) = output {
        layers.push(LayerSpec::new(prev, out, Activation::Linear));
    }
    layers
}

fn check_chain(name: &str, layers: &[LayerSpec], input: usize, final_linear: bool) -> Result<usize, NnError> {
    if layers.is_empty() {
        return Err(NnError::Architecture(format!("{name}: no layers")));
    }
    let mut prev = input;
    for (i, l) in layers.iter().enumerate() {
        if l.in_dim == 0 || l.out_dim == 0 {
            return Err(NnError::Architecture(format!("{name}.{i}: zero dimension")));
        }
        if l.in_dim != prev {
            return Err(NnError::Architecture(format!(
                "{name}.{i}: input {} does not chain from {prev}",
                l.in_dim
            )));
        }
        prev = l.out_dim;
    }
    if final_linear && layers.last().map(|l| l.activation) != Some(Activation::Linear) {
        return Err(NnError::Architecture(format!("{name}: final layer must be linear")));
    }
    Ok(prev)
}

impl NetworkSpec {
    /// Fully connected stack with ReLU hidden layers and a linear head.
    pub fn plain(input: usize, hidden: &[usize], actions: usize) -> Self {
        NetworkSpec::Plain(stack(input, hidden, Some(actions), Activation::Relu))
    }

    /// ReLU trunk feeding a scalar value head and a per-action advantage head.
    pub fn dueling(input: usize, trunk: &[usize], head_hidden: &[usize], actions: usize) -> Self {
        let trunk_layers = stack(input, trunk, None, Activation::Relu);
        let feat = trunk.last().copied().unwrap_or(input);
        NetworkSpec::Dueling {
            trunk: trunk_layers,
            value: stack(feat, head_hidden, Some(1), Activation::Relu),
            advantage: stack(feat, head_hidden, Some(actions), Activation::Relu),
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        match self {
            NetworkSpec::Plain(layers) => {
                let first = layers.first().map(|l| l.in_dim).unwrap_or(0);
                check_chain("plain", layers, first, true).map(|_| ())
            }
            NetworkSpec::Dueling { trunk, value, advantage } => {
                let first = trunk.first().map(|l| l.in_dim).unwrap_or(0);
                let feat = check_chain("trunk", trunk, first, false)?;
                let v = check_chain("value", value, feat, true)?;
                if v != 1 {
                    return Err(NnError::Architecture(format!("value head outputs {v}, expected 1")));
                }
                check_chain("advantage", advantage, feat, true).map(|_| ())
            }
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            NetworkSpec::Plain(l) => l[0].in_dim,
            NetworkSpec::Dueling { trunk, .. } => trunk[0].in_dim,
        }
    }

    pub fn action_count(&self) -> usize {
        match self {
            NetworkSpec::Plain(l) => l[l.len() - 1].out_dim,
            NetworkSpec::Dueling { advantage, .. } => advantage[advantage.len() - 1].out_dim,
        }
    }

    pub fn is_dueling(&self) -> bool {
        matches!(self, NetworkSpec::Dueling { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub activation: Activation,
    /// `out_dim x in_dim`; row `i` feeds output `i`.
    pub weights: Matrix,
    /// `out_dim x 1`.
    pub bias: Matrix,
}

impl Dense {
    fn zeros(spec: LayerSpec) -> Self {
        Self {
            activation: spec.activation,
            weights: Matrix::zeros(spec.out_dim, spec.in_dim),
            bias: Matrix::zeros(spec.out_dim, 1),
        }
    }

    fn init(spec: LayerSpec, rng: &mut CounterRng) -> Self {
        let mut layer = Self::zeros(spec);
        let bound = 1.0 / (spec.in_dim as f64).sqrt();
        for w in layer.weights.values_mut() {
            *w = rng.uniform_range(-bound, bound);
        }
        layer
    }

    pub fn spec(&self) -> LayerSpec {
        LayerSpec::new(self.weights.cols(), self.weights.rows(), self.activation)
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.weights.rows())
            .map(|i| self.activation.apply(self.bias.values()[i] + dot(self.weights.row(i), x)))
            .collect()
    }
}

/// Plain feed-forward stack.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    fn zeros(specs: &[LayerSpec]) -> Self {
        Self { layers: specs.iter().map(|&s| Dense::zeros(s)).collect() }
    }

    fn init(specs: &[LayerSpec], rng: &mut CounterRng) -> Self {
        Self { layers: specs.iter().map(|&s| Dense::init(s, rng)).collect() }
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(Dense::spec).collect()
    }

    fn input_dim(&self) -> usize {
        self.layers[0].weights.cols()
    }

    /// Input followed by every layer's output.
    fn forward(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let next = layer.forward(acts.last().unwrap());
            acts.push(next);
        }
        acts
    }

    /// Accumulates parameter partials into `grads`; returns d/d(input).
    fn backward(&self, acts: &[Vec<f64>], grad_out: &[f64], grads: &mut Mlp) -> Vec<f64> {
        let mut upstream = grad_out.to_vec();
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let output = &acts[idx + 1];
            let input = &acts[idx];
            let delta: Vec<f64> = upstream
                .iter()
                .zip(output)
                .map(|(g, &y)| g * layer.activation.derivative_from_output(y))
                .collect();
            let g = &mut grads.layers[idx];
            let mut grad_in = vec![0.0; input.len()];
            for (i, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.bias.values_mut()[i] += d;
                for (gw, &x) in g.weights.row_mut(i).iter_mut().zip(input) {
                    *gw += d * x;
                }
                for (gi, &w) in grad_in.iter_mut().zip(layer.weights.row(i)) {
                    *gi += d * w;
                }
            }
            upstream = grad_in;
        }
        upstream
    }

    fn matrices(&self) -> impl Iterator<Item = &Matrix> {
        self.layers.iter().flat_map(|l| [&l.weights, &l.bias])
    }

    fn matrices_mut(&mut self) -> impl Iterator<Item = &mut Matrix> {
        self.layers.iter_mut().flat_map(|l| [&mut l.weights, &mut l.bias])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuelingNet {
    pub trunk: Mlp,
    pub value: Mlp,
    pub advantage: Mlp,
}

/// Q-network parameters in either architecture.
#[derive(Debug, Clone, PartialEq)]
pub enum QNetwork {
    Plain(Mlp),
    Dueling(DuelingNet),
}

/// Per-layer activations recorded by [`QNetwork::forward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuelingOutput {
    pub value: f64,
    pub advantages: Vec<f64>,
    pub q_values: Vec<f64>,
}

enum SampleCache {
    Plain(Vec<f64>, Vec<Vec<f64>>),
    Dueling(DuelingOutput, DuelingCache),
}

impl SampleCache {
    fn q(&self, action: usize) -> Result<f64, NnError> {
        let q = match self {
            SampleCache::Plain(q, _) => q,
            SampleCache::Dueling(o, _) => &o.q_values,
        };
        check_action(action, q.len())?;
        Ok(q[action])
    }
}

struct DuelingCache {
    trunk: Vec<Vec<f64>>,
    value: Vec<Vec<f64>>,
    advantage: Vec<Vec<f64>>,
    best_advantage: usize,
}

/// One minibatch for the weighted squared TD loss.
#[derive(Debug, Clone)]
pub struct Batch<'a> {
    pub states: Vec<&'a [f64]>,
    pub actions: Vec<usize>,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Batch<'_> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Partial derivatives laid out exactly like the network they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub QNetwork);

impl Gradients {
    pub fn zeros_like(net: &QNetwork) -> Self {
        Gradients(QNetwork::zeros(&net.spec()))
    }

    pub fn matrices(&self) -> Vec<&Matrix> {
        self.0.matrices()
    }

    pub fn global_norm(&self) -> f64 {
        self.matrices()
            .iter()
            .flat_map(|m| m.values())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for m in self.0.matrices_mut() {
            for v in m.values_mut() {
                *v *= factor;
            }
        }
    }

    /// Rescales so the global L2 norm is at most `max_norm`.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm && norm > 0.0 {
            self.scale(max_norm / norm);
        }
        norm
    }

    /// Largest entrywise `|a - b| / max(|a|, |b|, floor)`.
    pub fn max_relative_error(&self, other: &Gradients, floor: f64) -> f64 {
        self.matrices()
            .iter()
            .zip(other.matrices())
            .flat_map(|(a, b)| a.values().iter().zip(b.values()))
            .map(|(&a, &b)| (a - b).abs() / a.abs().max(b.abs()).max(floor))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_error(&self, other: &Gradients) -> f64 {
        self.matrices()
            .iter()
            .zip(other.matrices())
            .flat_map(|(a, b)| a.values().iter().zip(b.values()))
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl QNetwork {
    /// Random network: weights uniform in `±1/sqrt(fan_in)`, zero biases.
    pub fn new(spec: &NetworkSpec, rng: &mut CounterRng) -> Result<Self, NnError> {
        spec.validate()?;
        Ok(match spec {
            NetworkSpec::Plain(layers) => QNetwork::Plain(Mlp::init(layers, rng)),
            NetworkSpec::Dueling { trunk, value, advantage } => QNetwork::Dueling(DuelingNet {
                trunk: Mlp::init(trunk, rng),
                value: Mlp::init(value, rng),
                advantage: Mlp::init(advantage, rng),
            }),
        })
    }

    /// All-zero parameters with the given shape. Panics on an invalid spec.
    pub fn zeros(spec: &NetworkSpec) -> Self {
        spec.validate().expect("invalid network spec");
        match spec {
            NetworkSpec::Plain(layers) => QNetwork::Plain(Mlp::zeros(layers)),
            NetworkSpec::Dueling { trunk, value, advantage } => QNetwork::Dueling(DuelingNet {
                trunk: Mlp::zeros(trunk),
                value: Mlp::zeros(value),
                advantage: Mlp::zeros(advantage),
            }),
        }
    }

    pub fn spec(&self) -> NetworkSpec {
        match self {
            QNetwork::Plain(m) => NetworkSpec::Plain(m.specs()),
            QNetwork::Dueling(d) => NetworkSpec::Dueling {
                trunk: d.trunk.specs(),
                value: d.value.specs(),
                advantage: d.advantage.specs(),
            },
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            QNetwork::Plain(m) => m.input_dim(),
            QNetwork::Dueling(d) => d.trunk.input_dim(),
        }
    }

    pub fn action_count(&self) -> usize {
        self.spec().action_count()
    }

    /// Parameter matrices in a fixed order (layer by layer, weights then bias;
    /// trunk, value head, advantage head for the dueling form).
    pub fn matrices(&self) -> Vec<&Matrix> {
        match self {
            QNetwork::Plain(m) => m.matrices().collect(),
            QNetwork::Dueling(d) => d
                .trunk
                .matrices()
                .chain(d.value.matrices())
                .chain(d.advantage.matrices())
                .collect(),
        }
    }

    pub fn matrices_mut(&mut self) -> Vec<&mut Matrix> {
        match self {
            QNetwork::Plain(m) => m.matrices_mut().collect(),
            QNetwork::Dueling(d) => d
                .trunk
                .matrices_mut()
                .chain(d.value.matrices_mut())
                .chain(d.advantage.matrices_mut())
                .collect(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.matrices().iter().map(|m| m.values().len()).sum()
    }

    fn check_input(&self, state: &[f64]) -> Result<(), NnError> {
        if state.len() != self.input_dim() {
            return Err(NnError::Shape(format!(
                "state has {} entries, network expects {}",
                state.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Forward pass of a plain network, keeping activations for backprop.
    pub fn forward(&self, state: &[f64]) -> Result<(Vec<f64>, ForwardCache), NnError> {
        let QNetwork::Plain(mlp) = self else {
            return Err(NnError::WrongArchitecture { expected: "plain", found: "dueling" });
        };
        self.check_input(state)?;
        let activations = mlp.forward(state);
        let q = activations.last().unwrap().clone();
        Ok((q, ForwardCache { activations }))
    }

    /// Value/advantage forward pass, `Q(s,a) = V(s) + (A(s,a) - max_a' A(s,a'))`.
    pub fn dueling_forward(&self, state: &[f64]) -> Result<DuelingOutput, NnError> {
        self.dueling_forward_cached(state).map(|(out, _)| out)
    }

    fn dueling_forward_cached(&self, state: &[f64]) -> Result<(DuelingOutput, DuelingCache), NnError> {
        let QNetwork::Dueling(net) = self else {
            return Err(NnError::WrongArchitecture { expected: "dueling", found: "plain" });
        };
        self.check_input(state)?;
        let trunk = net.trunk.forward(state);
        let features = trunk.last().unwrap();
        let value = net.value.forward(features);
        let advantage = net.advantage.forward(features);
        let v = value.last().unwrap()[0];
        let adv = advantage.last().unwrap().clone();
        let best = argmax(&adv).expect("advantage head has outputs");
        let max_adv = adv[best];
        let q_values = adv.iter().map(|&a| v + (a - max_adv)).collect();
        Ok((
            DuelingOutput { value: v, advantages: adv, q_values },
            DuelingCache { trunk, value, advantage, best_advantage: best },
        ))
    }

    /// Q-values for either architecture.
    pub fn q_values(&self, state: &[f64]) -> Result<Vec<f64>, NnError> {
        match self {
            QNetwork::Plain(_) => self.forward(state).map(|(q, _)| q),
            QNetwork::Dueling(_) => self.dueling_forward(state).map(|o| o.q_values),
        }
    }

    fn sample_forward(&self, state: &[f64]) -> Result<SampleCache, NnError> {
        match self {
            QNetwork::Plain(_) => self.forward(state).map(|(q, c)| SampleCache::Plain(q, c.activations)),
            QNetwork::Dueling(_) => self.dueling_forward_cached(state).map(|(o, c)| SampleCache::Dueling(o, c)),
        }
    }

    /// Adds `scale * dQ(s, action)/dparams` into `grads`.
    fn backprop_q(&self, cache: &SampleCache, action: usize, scale: f64, grads: &mut QNetwork) {
        match (self, cache, grads) {
            (QNetwork::Plain(mlp), SampleCache::Plain(q, acts), QNetwork::Plain(g)) => {
                let mut grad_out = vec![0.0; q.len()];
                grad_out[action] = scale;
                mlp.backward(acts, &grad_out, g);
            }
            (QNetwork::Dueling(net), SampleCache::Dueling(out, c), QNetwork::Dueling(g)) => {
                let mut grad_adv = vec![0.0; out.advantages.len()];
                grad_adv[action] += scale;
                grad_adv[c.best_advantage] -= scale;
                let mut grad_feat = net.value.backward(&c.value, &[scale], &mut g.value);
                let from_adv = net.advantage.backward(&c.advantage, &grad_adv, &mut g.advantage);
                for (a, b) in grad_feat.iter_mut().zip(from_adv) {
                    *a += b;
                }
                net.trunk.backward(&c.trunk, &grad_feat, &mut g.trunk);
            }
            _ => unreachable!("gradient buffer built from the same network"),
        }
    }

    fn check_batch(&self, batch: &Batch) -> Result<(), NnError> {
        let n = batch.states.len();
        if batch.actions.len() != n || batch.targets.len() != n || batch.weights.len() != n {
            return Err(NnError::Shape(format!(
                "batch lengths differ: {} states, {} actions, {} targets, {} weights",
                n,
                batch.actions.len(),
                batch.targets.len(),
                batch.weights.len()
            )));
        }
        if n == 0 {
            return Err(NnError::Shape("empty batch".into()));
        }
        if let Some(t) = batch.targets.iter().find(|t| !t.is_finite()) {
            return Err(NnError::NonFinite(format!("target {t}")));
        }
        if let Some(w) = batch.weights.iter().find(|w| !w.is_finite()) {
            return Err(NnError::NonFinite(format!("sample weight {w}")));
        }
        Ok(())
    }

    /// `(1/B) * sum_j w_j (y_j - Q(s_j, a_j))^2`.
    pub fn loss(&self, batch: &Batch) -> Result<f64, NnError> {
        self.check_batch(batch)?;
        let mut total = 0.0;
        for j in 0..batch.len() {
            let q = self.sample_forward(batch.states[j])?.q(batch.actions[j])?;
            let r = batch.targets[j] - q;
            total += batch.weights[j] * r * r;
        }
        Ok(total / batch.len() as f64)
    }

    /// Loss and its exact gradient with respect to the parameters, targets held
    /// constant. Only the chosen action's output contributes per sample.
    pub fn loss_and_grad(&self, batch: &Batch) -> Result<(f64, Gradients), NnError> {
        self.loss_grad_predictions(batch).map(|(l, g, _)| (l, g))
    }

    /// As [`Self::loss_and_grad`], also returning each sample's `Q(s_j, a_j)`.
    pub fn loss_grad_predictions(&self, batch: &Batch) -> Result<(f64, Gradients, Vec<f64>), NnError> {
        self.check_batch(batch)?;
        let n = batch.len() as f64;
        let mut grads = Gradients::zeros_like(self);
        let mut predictions = Vec::with_capacity(batch.len());
        let mut total = 0.0;
        for j in 0..batch.len() {
            let cache = self.sample_forward(batch.states[j])?;
            let q = cache.q(batch.actions[j])?;
            let r = batch.targets[j] - q;
            total += batch.weights[j] * r * r;
            let upstream = -2.0 * batch.weights[j] * r / n;
            if upstream != 0.0 {
                self.backprop_q(&cache, batch.actions[j], upstream, &mut grads.0);
            }
            predictions.push(q);
        }
        let loss = total / n;
        if !loss.is_finite() {
            return Err(NnError::NonFinite(format!("loss {loss}")));
        }
        Ok((loss, grads, predictions))
    }

    /// Central-difference estimate of the loss gradient.
    pub fn finite_diff_grad(&self, batch: &Batch, step: f64) -> Result<Gradients, NnError> {
        if !(step > 0.0) {
            return Err(NnError::InvalidArgument(format!("finite-difference step {step}")));
        }
        self.check_batch(batch)?;
        let mut probe = self.clone();
        let mut grads = Gradients::zeros_like(self);
        let counts: Vec<usize> = self.matrices().iter().map(|m| m.values().len()).collect();
        for (mi, &count) in counts.iter().enumerate() {
            for k in 0..count {
                let original = probe.matrices()[mi].values()[k];
                probe.matrices_mut()[mi].values_mut()[k] = original + step;
                let plus = probe.loss(batch)?;
                probe.matrices_mut()[mi].values_mut()[k] = original - step;
                let minus = probe.loss(batch)?;
                probe.matrices_mut()[mi].values_mut()[k] = original;
                grads.0.matrices_mut()[mi].values_mut()[k] = (plus - minus) / (2.0 * step);
            }
        }
        Ok(grads)
    }

    /// Plain gradient descent, `p <- p - lr * g`.
    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64) -> Result<(), NnError> {
        if !(lr >= 0.0) || !lr.is_finite() {
            return Err(NnError::InvalidArgument(format!("learning rate {lr}")));
        }
        if grads.0.spec() != self.spec() {
            return Err(NnError::Shape("gradient shape does not match network".into()));
        }
        if grads.matrices().iter().any(|m| !m.is_finite()) {
            return Err(NnError::NonFinite("gradient entry".into()));
        }
        let mut updated = self.clone();
        for (p, g) in updated.matrices_mut().into_iter().zip(grads.matrices()) {
            for (pv, gv) in p.values_mut().iter_mut().zip(g.values()) {
                *pv -= lr * gv;
            }
        }
        if updated.matrices().iter().any(|m| !m.is_finite()) {
            return Err(NnError::NonFinite("parameters after update".into()));
        }
        *self = updated;
        Ok(())
    }

    /// Deep copy used to refresh a target network.
    pub fn copy_params(&self) -> QNetwork {
        self.clone()
    }
}

fn check_action(action: usize, n: usize) -> Result<(), NnError> {
    if action >= n {
        return Err(NnError::Shape(format!("action {action} out of range for {n} outputs")));
    }
    Ok(())
}
