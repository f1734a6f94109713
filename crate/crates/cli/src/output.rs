//! CSV, JSON and SVG artifact writers. All float formatting uses the
//! shortest round-trip representation, so reruns with identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use excitable_core::{
    ClampResult, InhibitoryLandscape, Landscape, ModelSpec, ModelState, SupplyOutcome,
    ThresholdClass, ThresholdReport, Tolerances,
};

use crate::config::ExperimentConfig;
use crate::plot::{LinePlot, Series};

/// Sentinel written into censored cells (required supply unbounded below).
pub const UNBOUNDED: &str = "unbounded";

pub fn write_landscape_csv(path: &Path, landscape: &Landscape) -> Result<()> {
    let mut out = String::from("A,S_r,alpha_star\n");
    for p in &landscape.points {
        match p.outcome {
            SupplyOutcome::Evaluated { supply, alpha, .. } => {
                let _ = writeln!(out, "{},{},{}", p.amplitude, supply, alpha);
            }
            SupplyOutcome::Unbounded => {
                let _ = writeln!(out, "{},{UNBOUNDED},{UNBOUNDED}", p.amplitude);
            }
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn write_inhibitory_csv(path: &Path, landscape: &InhibitoryLandscape) -> Result<()> {
    let mut out = String::from("A,S_r,alpha_star,B,beta_star,v_terminal\n");
    for p in &landscape.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            landscape.base_amplitude,
            p.supply,
            landscape.base_alpha,
            p.b,
            p.beta,
            p.terminal_voltage
        );
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Per-run trajectory dump: t, v, i, internal state, cumulative supply.
pub fn write_trajectory_csv(path: &Path, spec: &ModelSpec, run: &ClampResult) -> Result<()> {
    let state_header = match spec {
        ModelSpec::Hh(_) => "m,h,n,",
        ModelSpec::Fhn(_) => "w,",
        _ => "",
    };
    let mut out = format!("t,v,i,{state_header}cumulative_supply\n");
    for s in &run.supply.samples {
        let state = match s.state {
            ModelState::Gating(g) => format!("{},{},{},", g.m, g.h, g.n),
            ModelState::Recovery(w) => format!("{w},"),
            ModelState::Empty => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{state}{}",
            s.t, s.v, s.current, s.cumulative_supply
        );
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn landscape_plot(landscape: &Landscape, report: &ThresholdReport, model_name: &str) -> String {
    let points: Vec<(f64, f64)> = landscape
        .points
        .iter()
        .filter_map(|p| p.supply().map(|s| (p.amplitude, s)))
        .collect();
    let marker = report.threshold.as_ref().map(|t| {
        (
            t.amplitude,
            t.supply,
            format!("A* = {:.3}, alpha* = {:.3}", t.amplitude, t.alpha),
        )
    });
    LinePlot {
        title: format!("Required supply landscape ({model_name})"),
        x_label: "target amplitude A".into(),
        y_label: "required supply S_r(A)".into(),
        series: vec![Series {
            label: "S_r".into(),
            points,
        }],
        marker,
    }
    .render()
}

pub fn inhibitory_plot(landscape: &InhibitoryLandscape, model_name: &str) -> String {
    let points: Vec<(f64, f64)> = landscape
        .points
        .iter()
        .rev()
        .map(|p| (p.terminal_voltage, p.supply))
        .collect();
    LinePlot {
        title: format!("Supply with hyperpolarizing prefix ({model_name})"),
        x_label: "terminal voltage A* - B".into(),
        y_label: "minimal supply over beta".into(),
        series: vec![Series {
            label: "S".into(),
            points,
        }],
        marker: None,
    }
    .render()
}

pub fn trajectory_plot(run: &ClampResult, what: Trace, model_name: &str) -> String {
    let (label, points): (&str, Vec<(f64, f64)>) = match what {
        Trace::Voltage => (
            "v(t)",
            run.supply.samples.iter().map(|s| (s.t, s.v)).collect(),
        ),
        Trace::CumulativeSupply => (
            "cumulative supply",
            run.supply
                .samples
                .iter()
                .map(|s| (s.t, s.cumulative_supply))
                .collect(),
        ),
    };
    LinePlot {
        title: format!("Clamp trajectory ({model_name})"),
        x_label: "t".into(),
        y_label: label.into(),
        series: vec![Series {
            label: label.into(),
            points,
        }],
        marker: None,
    }
    .render()
}

#[derive(Clone, Copy)]
pub enum Trace {
    Voltage,
    CumulativeSupply,
}

/// Reproducibility document written alongside the CSV/SVG artifacts.
#[derive(Serialize)]
pub struct ReportDocument<'a> {
    pub tool_version: &'a str,
    pub config_hash: String,
    pub config: &'a ExperimentConfig,
    pub model: &'a ModelSpec,
    pub tolerances: &'a Tolerances,
    pub a_grid: &'a [f64],
    pub alpha_grid: &'a [f64],
    pub excitatory: &'a ThresholdReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inhibitory: Option<&'a ThresholdReport>,
}

pub fn write_report_json(path: &Path, report: &ReportDocument) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).context("serializing report")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn summarize_threshold(report: &ThresholdReport) -> String {
    match (&report.classification, &report.threshold) {
        (ThresholdClass::NoneFound, _) | (_, None) => {
            "no local maximum of the required supply (no threshold)".to_string()
        }
        (class, Some(t)) => {
            let kind = match class {
                ThresholdClass::InteriorLocalMax => "interior local maximum",
                ThresholdClass::BoundarySaddle => "saddle at the censored boundary",
                ThresholdClass::NoneFound => unreachable!(),
            };
            match &t.inhibitory {
                Some(inh) => format!(
                    "{kind}: terminal voltage {:.4} (B* = {:.4}, beta* = {:.4}), S_r = {:.6}",
                    inh.terminal_voltage, inh.b, inh.beta, t.supply
                ),
                None => format!(
                    "{kind}: A* = {:.4}, alpha* = {:.4}, S_r = {:.6} (resolution {:.2e})",
                    t.amplitude, t.alpha, t.supply, t.resolution
                ),
            }
        }
    }
}
