//! Toolkit for studying how event-log sample quality relates to the quality
//! of process models discovered from those samples.

pub mod eventlog;
pub mod quality;
pub mod sampling;
pub mod conformance;
pub mod par;
pub mod processtree;
pub mod discovery;
pub mod stats;
pub mod harness;
