//! Experiment orchestration: config in, result tables out.

use std::path::PathBuf;

use phased_mimo::beamforming::conventional_tx_weights;
use phased_mimo::beampattern::{self, AngleGrid};
use phased_mimo::sinr::{self, Beamformer, RadarMode, SweepSpec};

use crate::config::{Experiment, ExperimentConfig};
use crate::table::{to_db, write_tables, Metadata, ResultTable};
use crate::HarnessError;

/// Tables computed by one experiment plus human-readable report lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub tables: Vec<ResultTable>,
    pub report: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub report: Vec<String>,
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn modes(cfg: &ExperimentConfig) -> [RadarMode; 3] {
    RadarMode::standard_set(cfg.scenario.k_subarrays)
}

fn angle_grid(cfg: &ExperimentConfig) -> Result<AngleGrid, HarnessError> {
    Ok(AngleGrid::from_degrees(cfg.grid_step_deg(), cfg.scenario.target_deg.to_radians())?)
}

/// Compute every table of the configured experiment without touching disk.
pub fn compute(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Beampattern => beampattern_tables(cfg),
        Experiment::SinrCurve => sinr_tables(cfg),
        Experiment::MvdrPattern => mvdr_tables(cfg),
        Experiment::VerifyProp1 => prop1_tables(cfg),
        Experiment::VerifyProp2 => prop2_tables(cfg),
        Experiment::HkCurves => hk_tables(cfg),
    }
}

/// Run the experiment and write its tables under `cfg.output_path`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let out = compute(cfg)?;
    let files = write_tables(&cfg.output_path, &out.tables)?;
    Ok(RunSummary { files, report: out.report })
}

fn beampattern_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let array = cfg.array_config()?;
    let grid = angle_grid(cfg)?;
    let theta_s = cfg.scenario.target_deg.to_radians();
    let mut tables = Vec::new();
    let mut overall = Vec::new();
    let mut report = Vec::new();
    for mode in modes(cfg) {
        let part = mode.partition(array.m_tx())?;
        let tx = conventional_tx_weights(&array, &part, theta_s)?;
        let parts = beampattern::component_patterns(&array, &part, theta_s, &grid)?;
        let g = beampattern::overall_pattern(&array, &part, &tx, theta_s, &grid)?;
        let mut t = ResultTable::new(
            columns(&["theta_deg", "C_db", "D_db", "R_db", "G_db"]),
            Metadata::new(cfg, &format!("beampattern_{}", mode.label())),
        );
        for (i, theta) in grid.angles().iter().enumerate() {
            t.push(vec![
                theta.to_degrees(),
                to_db(parts.transmit.values[i]),
                to_db(parts.diversity.values[i]),
                to_db(parts.receive.values[i]),
                to_db(g.values[i]),
            ]);
        }
        let sl = g.sidelobes();
        report.push(format!(
            "{} (K = {}): peak sidelobe {:.3} dB at {:.2} deg",
            mode.label(),
            part.k(),
            to_db(sl.peak_sidelobe_level),
            sl.peak_sidelobe_angle.to_degrees()
        ));
        tables.push(t);
        overall.push(g);
    }
    let mut t = ResultTable::new(
        columns(&["theta_deg", "G_ph_db", "G_mimo_db", "G_phmimo_db"]),
        Metadata::new(cfg, "beampattern_overall"),
    );
    for (i, theta) in grid.angles().iter().enumerate() {
        t.push(vec![
            theta.to_degrees(),
            to_db(overall[0].values[i]),
            to_db(overall[1].values[i]),
            to_db(overall[2].values[i]),
        ]);
    }
    tables.push(t);
    Ok(ExperimentOutput { tables, report })
}

fn sinr_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let base = cfg.scenario()?;
    let beamformer: Beamformer = cfg.sweep.beamformer.into();
    let spec = SweepSpec {
        snr_db: cfg.sweep.snr_db.clone(),
        inr_db: cfg.sweep.inr_db,
        inr_tracks_snr: cfg.sweep.inr_tracks_snr,
        modes: modes(cfg).to_vec(),
        beamformer,
        analytic_only: false,
    };
    let curve = sinr::sinr_sweep(&base, &spec)?;
    let reference = match beamformer {
        Beamformer::ConventionalRx => "analytic",
        Beamformer::Mvdr => "optimal",
    };
    let mut names = vec!["snr_db".to_string()];
    for s in &curve.series {
        let m = s.mode.label();
        names.push(format!("{m}_{reference}_db"));
        names.push(format!("{m}_mc_db"));
        names.push(format!("{m}_mc_se_db"));
    }
    let mut t = ResultTable::new(names, Metadata::new(cfg, "sinr"));
    for (i, snr) in curve.snr_axis_db.iter().enumerate() {
        let mut row = vec![*snr];
        for s in &curve.series {
            let mc = s.monte_carlo[i].expect("sweep always runs Monte-Carlo here");
            row.push(to_db(s.reference[i]));
            row.push(to_db(mc.sinr));
            row.push(10.0 / std::f64::consts::LN_10 * mc.std_error / mc.sinr);
        }
        t.push(row);
    }
    let report = vec![format!(
        "{} points x {} modes, {} runs per point, beamformer {}",
        curve.snr_axis_db.len(),
        curve.series.len(),
        cfg.runs,
        beamformer.name()
    )];
    Ok(ExperimentOutput { tables: vec![t], report })
}

fn mvdr_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let base = cfg.scenario()?;
    let grid = angle_grid(cfg)?;
    let mut curves = Vec::new();
    let mut report = Vec::new();
    for mode in modes(cfg) {
        let part = mode.partition(base.cfg.m_tx())?;
        let sc = sinr::scenario_at(&base, part.clone(), cfg.pattern.snr_db, cfg.pattern.inr_db);
        let tx = conventional_tx_weights(&sc.cfg, &part, sc.target.angle)?;
        let w = sinr::trained_mvdr_weights(&sc, &tx, 0)?;
        let curve = beampattern::mvdr_pattern(&sc.cfg, &part, &tx, &w, sc.target.angle, &grid)?;
        for s in sc.interference.sources() {
            report.push(format!(
                "{}: response toward {:.2} deg is {:.2} dB",
                mode.label(),
                s.angle.to_degrees(),
                to_db(curve.value_at(s.angle))
            ));
        }
        curves.push(curve);
    }
    let mut t = ResultTable::new(columns(&["theta_deg", "ph_db", "mimo_db", "phmimo_db"]), Metadata::new(cfg, "mvdr_pattern"));
    for (i, theta) in grid.angles().iter().enumerate() {
        t.push(vec![theta.to_degrees(), to_db(curves[0].values[i]), to_db(curves[1].values[i]), to_db(curves[2].values[i])]);
    }
    Ok(ExperimentOutput { tables: vec![t], report })
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn prop1_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let array = cfg.array_config()?;
    let grid = angle_grid(cfg)?;
    let rep = beampattern::verify_proposition1(&array, cfg.scenario.target_deg.to_radians(), &grid)?;
    let mut t = ResultTable::new(
        columns(&["k", "complement", "max_abs_diff", "tolerance", "pass"]),
        Metadata::new(cfg, "prop1"),
    );
    let mut report = Vec::new();
    for r in &rep.rows {
        t.push(vec![r.k as f64, r.complement as f64, r.max_abs_diff, rep.tolerance, flag(r.pass)]);
        report.push(format!(
            "{} K={} vs K={}: max |dG| = {:.3e} (tol {:.0e})",
            pass(r.pass),
            r.k,
            r.complement,
            r.max_abs_diff,
            rep.tolerance
        ));
    }
    Ok(ExperimentOutput { tables: vec![t], report })
}

fn prop2_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let array = cfg.array_config()?;
    let grid = angle_grid(cfg)?;
    let rep = beampattern::verify_proposition2(&array, cfg.scenario.target_deg.to_radians(), &grid)?;
    let mut t = ResultTable::new(
        columns(&[
            "k",
            "peak_sidelobe_db",
            "baseline_db",
            "margin_db",
            "strictly_below",
            "zeta1",
            "zeta2",
            "zeta3",
            "gamma",
            "alpha1",
            "alpha2",
            "alpha3",
            "zeta_bound",
        ]),
        Metadata::new(cfg, "prop2"),
    );
    let base_db = to_db(rep.baseline_peak_sidelobe);
    let m = rep.rows.len();
    let mut report = Vec::new();
    for r in &rep.rows {
        let psl = to_db(r.peak_sidelobe);
        t.push(vec![
            r.k as f64,
            psl,
            base_db,
            base_db - psl,
            flag(r.strictly_below_baseline),
            r.zeta1,
            r.zeta2,
            r.zeta3,
            r.gamma,
            r.alpha1,
            r.alpha2.unwrap_or(f64::NAN),
            r.alpha3.unwrap_or(f64::NAN),
            r.zeta_bound.map(flag).unwrap_or(f64::NAN),
        ]);
        let ok = r.not_above_baseline
            && (r.k == 1 || r.k == m || r.strictly_below_baseline)
            && r.zeta_bound.unwrap_or(true)
            && r.alpha1 <= 1.0;
        report.push(format!(
            "{} K={}: peak sidelobe {:.3} dB, {:.3} dB below K=1, alpha1 = {:.4}",
            pass(ok),
            r.k,
            psl,
            base_db - psl,
            r.alpha1
        ));
    }
    Ok(ExperimentOutput { tables: vec![t], report })
}

fn hk_tables(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let m = cfg.scenario.m_tx;
    let omega = beampattern::omega_grid(cfg.hk_half_points);
    let curves = (1..=m)
        .map(|k| beampattern::hk_function(m, k, &omega))
        .collect::<Result<Vec<_>, _>>()?;
    let mut names = vec!["omega".to_string()];
    names.extend((1..=m).map(|k| format!("H{k}")));
    let mut t = ResultTable::new(names, Metadata::new(cfg, "hk"));
    for (i, w) in omega.iter().enumerate() {
        let mut row = vec![*w];
        row.extend(curves.iter().map(|c| c.values[i]));
        t.push(row);
    }
    let report = curves
        .iter()
        .enumerate()
        .map(|(i, c)| format!("H{}: peak sidelobe {:.4}", i + 1, c.sidelobes().peak_sidelobe_level))
        .collect();
    Ok(ExperimentOutput { tables: vec![t], report })
}
