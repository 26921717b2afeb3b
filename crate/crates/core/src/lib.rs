//! Topology-aware multi-agent coordination simulator.
//!
//! Generates communication graphs, runs synchronous message-passing episodes
//! of five coordination tasks (coloring, matching, vertex cover, leader
//! election, consensus), scores them, and drives benchmark sweeps.

pub mod engine;
pub mod policies;
pub mod runner;
pub mod tasks;
pub mod topology;
