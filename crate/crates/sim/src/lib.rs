//! Monte-Carlo harness for [`semofdm`]: experiment specs, seeded BER and
//! estimator-RMSE runners, sweeps, CSV/gnuplot output and the figure
//! catalogue behind the `semofdm` CLI.
//!
//! Results are a pure function of the spec and its master seed. Parallelism
//! comes from rayon's ambient pool; run inside
//! [`rayon::ThreadPool::install`] to pin the worker count.

mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod seed;
pub mod spec;
pub mod sweep;

pub use error::{Result, SimError};
pub use figures::{FIGURE_IDS, Figure, Series, figure};
pub use output::{emit_plot_script, read_csv, write_csv};
pub use run::{BerPoint, RmsePoint, run_ber_point, run_rmse_point};
pub use spec::{ExperimentSpec, Stopping, Sweep, SweepKind};
pub use sweep::{Row, SweepResult, run_sweep, run_sweep_with};
