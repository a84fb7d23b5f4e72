//! Deep Q-learning variants for freeway lane-change decisions.
//!
//! The crate bundles a deterministic multi-lane freeway simulator
//! ([`sim`]), dense Q-networks with analytic gradients ([`nn`]), the four
//! learners (plain, double, dueling and prioritized-replay DQN, in
//! [`agent`]) and the experiment harness behind the `freeway-dqn` binary
//! ([`harness`]).

pub mod agent;
pub mod harness;
pub mod nn;
pub mod sim;
pub mod rng;
