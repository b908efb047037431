//! Experiment definitions for each reproducible figure.
//!
//! Every series of a figure shares the master seed, so curves that differ
//! only in the receiver see the same data, SEM phases and noise.

use std::path::{Path, PathBuf};

use semofdm::mitigation::Mode;
use semofdm::ofdm::{DEFAULT_N, OfdmConfig};
use semofdm::sem::Waveform;

use crate::error::{Result, SimError};
use crate::output::{Curve, plot_script, write_csv, write_file};
use crate::spec::{ExperimentSpec, Stopping, SweepKind};
use crate::sweep::{Row, SweepResult, run_sweep_with};

pub const FIGURE_IDS: [&str; 21] = [
    "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig7a", "fig7b", "fig8a", "fig8b", "fig9a", "fig9b",
    "fig9c", "fig9d", "fig10a", "fig10b", "fig10c", "fig10d", "fig11a", "fig11b", "fig12",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: String,
    pub title: String,
    pub series: Vec<Series>,
}

fn db_range(from: i32, to: i32, step: i32) -> Vec<f64> {
    (from..=to).step_by(step as usize).map(f64::from).collect()
}

fn base(ofdm: OfdmConfig, eb: f64, kind: SweepKind, values: Vec<f64>) -> ExperimentSpec {
    let mut s = ExperimentSpec {
        ofdm,
        eb_opt_n0_db: eb,
        ..ExperimentSpec::default()
    };
    s.sweep.kind = kind;
    s.sweep.values = values;
    s
}

fn with_sem(mut s: ExperimentSpec, waveform: Waveform, variance: f64) -> ExperimentSpec {
    s.sem.waveform = waveform;
    s.sem.variance = variance;
    s
}

fn with_mode(mut s: ExperimentSpec, mode: Mode, known: bool) -> ExperimentSpec {
    s.mitigation.mode = mode;
    s.mitigation.frequency_known = known;
    s
}

fn series(label: impl Into<String>, spec: ExperimentSpec) -> Series {
    Series {
        label: label.into(),
        spec,
    }
}

fn aco() -> OfdmConfig {
    OfdmConfig::aco(DEFAULT_N, 16)
}

fn dco(bias: f64) -> OfdmConfig {
    OfdmConfig::dco(DEFAULT_N, 16, bias)
}

/// No-SEM reference plus one curve per waveform, without mitigation.
fn waveform_curves(b: ExperimentSpec, variance: f64, reference: bool) -> Vec<Series> {
    let mut out = Vec::new();
    if reference {
        out.push(series("no_sem", with_sem(b.clone(), Waveform::Sine, 0.0)));
    }
    out.extend(Waveform::ALL.iter().map(|&w| series(w.name(), with_sem(b.clone(), w, variance))));
    out
}

/// Sine SEM of amplitude `a` (variance `a^2 / 2`).
fn sine_amplitude(b: ExperimentSpec, a: f64) -> ExperimentSpec {
    with_sem(b, Waveform::Sine, a * a / 2.0)
}

fn rmse_l_values(mode: Mode) -> Vec<f64> {
    match mode {
        Mode::Pilot => vec![10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
        _ => SweepKind::RmseVsL.default_values(),
    }
}

fn rmse_figure(mode: Mode, by_level: bool) -> Vec<Series> {
    let b = with_mode(base(aco(), 20.0, SweepKind::RmseVsL, rmse_l_values(mode)), mode, true);
    if by_level {
        [0.5, 1.0, 1.5]
            .iter()
            .map(|&a| series(format!("a_{a}"), sine_amplitude(b.clone(), a)))
            .collect()
    } else {
        [0.0, 5.0, 20.0]
            .iter()
            .map(|&eb| {
                let mut s = sine_amplitude(b.clone(), 1.0);
                s.eb_opt_n0_db = eb;
                series(format!("ebn0_{eb}db"), s)
            })
            .collect()
    }
}

fn mitigation_ber(ofdm: OfdmConfig, values: Vec<f64>, waveform: Waveform) -> Vec<Series> {
    let b = base(ofdm, 10.0, SweepKind::EbN0, values);
    let sem = with_sem(b.clone(), waveform, 0.01);
    vec![
        series("no_sem", with_sem(b, waveform, 0.0)),
        series("unmitigated", sem.clone()),
        series("blind", with_mode(sem.clone(), Mode::Blind, true)),
        series("pilot", with_mode(sem, Mode::Pilot, true)),
    ]
}

fn pilot_vs_variance(ofdm: OfdmConfig, eb: f64) -> Vec<Series> {
    let b = base(ofdm, eb, SweepKind::SemVariance, SweepKind::SemVariance.default_values());
    Waveform::ALL
        .iter()
        .flat_map(|&w| {
            let s = with_sem(b.clone(), w, 0.0);
            [
                series(format!("{}_unmitigated", w.name()), s.clone()),
                series(format!("{}_pilot", w.name()), with_mode(s, Mode::Pilot, true)),
            ]
        })
        .collect()
}

fn letter_waveform(c: char) -> Option<Waveform> {
    match c {
        'a' => Some(Waveform::Sine),
        'b' => Some(Waveform::ClippedSine),
        'c' => Some(Waveform::Sawtooth),
        'd' => Some(Waveform::Square),
        _ => None,
    }
}

/// Looks up a figure and applies `stopping` and `master_seed` to every
/// series.
pub fn figure(id: &str, stopping: Stopping, master_seed: u64) -> Result<Figure> {
    let unknown = || SimError::UnknownFigure(id.to_string());
    let aco_eb = db_range(0, 16, 2);
    let dco7_eb = db_range(10, 26, 2);
    let (title, series): (String, Vec<Series>) = match id {
        "fig2" => (
            "ACO-OFDM 16-QAM, SEM variance 0.005, l = 2.56".into(),
            waveform_curves(base(aco(), 10.0, SweepKind::EbN0, aco_eb), 0.005, true),
        ),
        "fig3a" => (
            "DCO-OFDM 16-QAM 7 dB bias, SEM variance 0.005, l = 2.56".into(),
            waveform_curves(base(dco(7.0), 21.0, SweepKind::EbN0, dco7_eb), 0.005, true),
        ),
        "fig3b" => (
            "DCO-OFDM 16-QAM 13 dB bias, SEM variance 0.005, l = 2.56".into(),
            waveform_curves(base(dco(13.0), 27.0, SweepKind::EbN0, db_range(16, 32, 2)), 0.005, true),
        ),
        "fig4a" => (
            "ACO-OFDM 16-QAM at 10 dB, BER against SEM variance".into(),
            waveform_curves(base(aco(), 10.0, SweepKind::SemVariance, vec![]), 0.0, false),
        ),
        "fig4b" => (
            "DCO-OFDM 16-QAM 7 dB bias at 21 dB, BER against SEM variance".into(),
            waveform_curves(base(dco(7.0), 21.0, SweepKind::SemVariance, vec![]), 0.0, false),
        ),
        "fig5" => (
            "BER against SEM normalised frequency, sine SEM variance 0.005".into(),
            vec![
                series("aco_10db", with_sem(base(aco(), 10.0, SweepKind::SemFrequency, vec![]), Waveform::Sine, 0.005)),
                series(
                    "dco7_21db",
                    with_sem(base(dco(7.0), 21.0, SweepKind::SemFrequency, vec![]), Waveform::Sine, 0.005),
                ),
            ],
        ),
        "fig7a" => ("Blind amplitude RMSE, A = 1".into(), rmse_figure(Mode::Blind, false)),
        "fig7b" => ("Blind amplitude RMSE at 20 dB".into(), rmse_figure(Mode::Blind, true)),
        "fig8a" => ("Pilot amplitude RMSE, A = 1".into(), rmse_figure(Mode::Pilot, false)),
        "fig8b" => ("Pilot amplitude RMSE at 20 dB".into(), rmse_figure(Mode::Pilot, true)),
        "fig11a" => ("ACO-OFDM at 10 dB, pilot mitigation".into(), pilot_vs_variance(aco(), 10.0)),
        "fig11b" => ("DCO-OFDM 7 dB bias at 21 dB, pilot mitigation".into(), pilot_vs_variance(dco(7.0), 21.0)),
        "fig12" => {
            let b = with_sem(base(aco(), 10.0, SweepKind::EbN0, aco_eb), Waveform::Sine, 0.01);
            (
                "ACO-OFDM, sine SEM variance 0.01: known against estimated frequency".into(),
                vec![
                    series("blind_known", with_mode(b.clone(), Mode::Blind, true)),
                    series("blind_estimated", with_mode(b.clone(), Mode::Blind, false)),
                    series("pilot_known", with_mode(b.clone(), Mode::Pilot, true)),
                    series("pilot_estimated", with_mode(b, Mode::Pilot, false)),
                ],
            )
        }
        _ => {
            let (ofdm, eb, prefix, rest) = if let Some(r) = id.strip_prefix("fig10") {
                (dco(7.0), dco7_eb, "DCO-OFDM 16-QAM 7 dB bias", r)
            } else if let Some(r) = id.strip_prefix("fig9") {
                (aco(), aco_eb, "ACO-OFDM 16-QAM", r)
            } else {
                return Err(unknown());
            };
            let mut chars = rest.chars();
            let w = match (chars.next(), chars.next()) {
                (Some(c), None) => letter_waveform(c).ok_or_else(unknown)?,
                _ => return Err(unknown()),
            };
            (
                format!("{prefix}, {} SEM variance 0.01, L = 1000", w.name()),
                mitigation_ber(ofdm, eb, w),
            )
        }
    };
    let series = series
        .into_iter()
        .map(|mut s| {
            s.spec.stopping = stopping;
            s.spec.master_seed = master_seed;
            s
        })
        .collect();
    Ok(Figure {
        id: id.to_string(),
        title,
        series,
    })
}

impl Figure {
    /// Runs every series; `progress(label, index, row)` is called per point.
    pub fn run<F>(&self, progress: F) -> Result<Vec<SweepResult>>
    where
        F: Fn(&str, usize, &Row) + Sync,
    {
        self.series
            .iter()
            .map(|s| run_sweep_with(&s.spec, |i, row| progress(&s.label, i, row)))
            .collect()
    }

    pub fn csv_path(&self, dir: &Path, label: &str) -> PathBuf {
        dir.join(format!("{}_{label}.csv", self.id))
    }

    /// Writes one CSV per series into `dir` and, with `plot`, a gnuplot
    /// script `<id>.gp` drawing all of them. Returns the written paths.
    pub fn write(
        &self,
        results: &[SweepResult],
        dir: &Path,
        plot: bool,
        timestamp: Option<u64>,
    ) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (s, r) in self.series.iter().zip(results) {
            let path = self.csv_path(dir, &s.label);
            write_csv(r, &path, timestamp)?;
            written.push(path);
        }
        if plot && !self.series.is_empty() {
            let names: Vec<PathBuf> = self
                .series
                .iter()
                .map(|s| PathBuf::from(format!("{}_{}.csv", self.id, s.label)))
                .collect();
            let curves: Vec<Curve<'_>> = names
                .iter()
                .zip(&self.series)
                .map(|(p, s)| Curve {
                    csv: p,
                    label: &s.label,
                })
                .collect();
            let script = dir.join(format!("{}.gp", self.id));
            let png = PathBuf::from(format!("{}.png", self.id));
            write_file(&script, &plot_script(&self.title, &self.series[0].spec, &curves, &png))?;
            written.push(script);
        }
        Ok(written)
    }
}
