//! File formats, parallel drivers and corpus evaluation on top of
//! [`qomega_core`].

pub mod config;
pub mod io;
pub mod parallel;
pub mod report;

pub use io::{load_image, save_image, IoError};
pub use parallel::{par_compute_omega, par_compute_q, thread_pool};
pub use report::{batch_evaluate, evaluate_pair, MetricConfig, MetricReport, MetricSet, Pair};
