//! Sniffer placement planning for multi-hop, multi-channel wireless sensor
//! networks.
//!
//! A passive sniffer co-located with a network node hears every transmission
//! whose link PDR toward it is good enough. Given a per-channel connectivity
//! matrix, this crate selects a small set of sniffer locations that covers
//! every node on all 16 channels (dominating sets per channel, then a
//! redundancy-removal pass), and evaluates the selection with a slotted
//! channel-hopping simulation that reports which fraction of on-air frames
//! the sniffers detect.
//!
//! Modules follow the pipeline:
//!
//! * [`model`] — node/channel/link types and the connectivity matrix
//! * [`topology`] — trace ingestion and random topology generation
//! * [`domset`] — per-channel coverage relations and dominating-set solvers
//! * [`selection`] — candidate selection and redundancy removal
//! * [`sim`] — the slotted channel-hopping detection simulation
//! * [`experiment`] — parameter-sweep harness and aggregation

pub mod domset;
pub mod error;
pub mod experiment;
pub mod model;
pub mod seed;
pub mod selection;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};
pub use model::{ChannelId, ConnectivityMatrix, LinkStat, NodeId, SnifferSet, NUM_CHANNELS};
