//! The subcommands. Each writes its files under an output directory chosen by
//! the caller and returns a short report for the terminal.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use fracstab_core::ineq::suite::{self, SuiteSummary};
use fracstab_core::ineq::IneqReport;
use fracstab_core::presets;
use fracstab_core::solver::{convergence_study, solve, ConvergenceReport};
use fracstab_core::stability::evaluate_candidate;
use fracstab_core::TimeGrid;

use crate::config::RunConfig;
use crate::csv_io::{fmt_g17, read_table, write_table, write_text, write_trajectory};
use crate::{exit, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// Lines for stdout.
    pub report: Vec<String>,
}

impl Outcome {
    fn ok(report: Vec<String>) -> Self {
        Self {
            passed: true,
            report,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            exit::SUCCESS
        } else {
            exit::CHECKS_FAILED
        }
    }
}

fn prepare_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn config_grid(cfg: &RunConfig) -> Result<TimeGrid, CliError> {
    let (t_end, h) = cfg.require_grid()?;
    TimeGrid::spanning(cfg.t0, t_end, h).map_err(|e| CliError::config(None, e.to_string()))
}

fn opt_field(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

/// Solve the configured system and write `trajectory.csv`.
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let system = cfg.require_system()?;
    let grid = config_grid(cfg)?;
    let traj = solve(system, &grid)?;
    prepare_dir(out)?;
    let path = out.join("trajectory.csv");
    write_trajectory(&path, &traj)?;
    Ok(Outcome::ok(vec![format!(
        "{}: {} nodes written to {}",
        system.label(),
        traj.len(),
        path.display()
    )]))
}

fn run_suites(cfg: &RunConfig) -> Result<Vec<SuiteSummary>, CliError> {
    thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .checks
            .iter()
            .map(|c| scope.spawn(move || suite::run_suite(&c.name, cfg.seed, c.count)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked").map_err(CliError::from))
            .collect()
    })
}

/// Run the configured inequality suites; writes `check_summary.csv` and one
/// `check_<name>.csv` per suite.
pub fn check(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    if cfg.checks.is_empty() {
        return Err(CliError::config(None, "missing key 'checks'"));
    }
    if let Some(bad) = cfg.checks.iter().find(|c| !suite::is_suite(&c.name)) {
        return Err(CliError::UnknownCheck(bad.name.clone()));
    }
    let summaries = run_suites(cfg)?;
    prepare_dir(out)?;

    let header = ["name", "instances", "passes", "max_violation"].map(String::from);
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                s.name.clone(),
                s.instances.to_string(),
                s.passes.to_string(),
                fmt_g17(s.max_violation),
            ]
        })
        .collect();
    write_table(&out.join("check_summary.csv"), &header, rows.clone())?;

    let detail_header =
        ["seed", "verdict", "max_violation", "tol", "refinement_ratio", "instance"].map(String::from);
    for s in &summaries {
        let detail = s.outcomes.iter().map(|o| {
            vec![
                o.seed.to_string(),
                if o.passed { "pass" } else { "fail" }.to_string(),
                fmt_g17(o.max_violation),
                fmt_g17(o.tol),
                opt_field(o.refinement_ratio),
                o.description.clone(),
            ]
        });
        write_table(&out.join(format!("check_{}.csv", s.name)), &detail_header, detail)?;
    }

    let mut report = vec![header.join(",")];
    report.extend(rows.iter().map(|r| r.join(",")));
    Ok(Outcome {
        passed: summaries.iter().all(SuiteSummary::all_passed),
        report,
    })
}

fn write_ineq(path: &Path, r: &IneqReport) -> Result<(), CliError> {
    let grid = *r.lhs().grid();
    let rows = (0..grid.len()).map(|j| {
        [grid.node(j), r.lhs().values()[j], r.rhs().values()[j], r.slack().values()[j]]
            .map(fmt_g17)
            .to_vec()
    });
    write_table(path, &["t", "lhs", "rhs", "slack"].map(String::from), rows)
}

/// Solve a built-in example on its default grid, run its stability checks and
/// write the trajectory, the sampled candidate, each inequality report, a
/// `summary.csv` of verdicts and a plain-text `stability.txt`.
pub fn reproduce(id: u8, out: &Path) -> Result<Outcome, CliError> {
    let preset = presets::by_id(id)
        .ok_or_else(|| CliError::Usage(format!("no example {id}; choose 1, 2 or 3")))?;
    let (traj, report) = preset.reproduce()?;
    let v = evaluate_candidate(&preset.candidate, &traj).map_err(presets::PresetError::from)?;
    prepare_dir(out)?;

    write_trajectory(&out.join("trajectory.csv"), &traj)?;
    let grid = *traj.grid();
    write_table(
        &out.join("candidate.csv"),
        &["t", "V"].map(String::from),
        (0..grid.len()).map(|j| vec![fmt_g17(grid.node(j)), fmt_g17(v.values()[j])]),
    )?;

    let mut summary: Vec<Vec<String>> = Vec::new();
    let verdict = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    if let Some(s) = report.sandwich {
        summary.push(vec![
            "sandwich".into(),
            verdict(s.ok),
            fmt_g17((-s.worst_slack).max(0.0)),
            "0".into(),
            String::new(),
        ]);
    }
    for (name, r) in [("dissipation", &report.dissipation), ("ml_envelope", &report.envelope)] {
        if let Some(r) = r {
            write_ineq(&out.join(format!("{name}.csv")), r)?;
            summary.push(vec![
                name.into(),
                r.verdict().as_str().into(),
                fmt_g17(r.max_violation()),
                fmt_g17(r.tol()),
                opt_field(r.refinement_ratio()),
            ]);
        }
    }
    if let Some(b) = report.ball {
        summary.push(vec![
            "ball".into(),
            verdict(b.ok),
            fmt_g17((b.max_norm - b.radius).max(0.0)),
            "0".into(),
            String::new(),
        ]);
    }
    let header = ["check", "verdict", "max_violation", "tol", "refinement_ratio"].map(String::from);
    write_table(&out.join("summary.csv"), &header, summary)?;

    let passed = report.passed();
    let last = traj.len() - 1;
    let final_norm = traj.norms()[last];
    let text = format!(
        "example={}\nalpha={}\nx0={}\nh={}\nt_end={}\nfinal_norm={}\n{}verdict={}\n",
        preset.name,
        fmt_g17(preset.system.order().alpha()),
        preset.system.x0().iter().map(|&x| fmt_g17(x)).collect::<Vec<_>>().join(" "),
        fmt_g17(preset.h),
        fmt_g17(preset.t_end),
        fmt_g17(final_norm),
        report.summary(),
        verdict(passed),
    );
    write_text(&out.join("stability.txt"), &text)?;
    Ok(Outcome {
        passed,
        report: text.lines().map(String::from).collect(),
    })
}

/// Default ladder when the config gives `h` but no `h_list`.
pub fn default_h_list(h: f64) -> Vec<f64> {
    vec![h, h / 2.0, h / 4.0]
}

/// Self-convergence study; writes `convergence.csv` and `convergence_fit.csv`.
pub fn convergence(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let system = cfg.require_system()?;
    let t_end = cfg
        .t_end
        .ok_or_else(|| CliError::config(None, "missing key 't_end'"))?;
    let h_list = match (&cfg.h_list, cfg.h) {
        (Some(list), _) => list.clone(),
        (None, Some(h)) => default_h_list(h),
        (None, None) => return Err(CliError::config(None, "missing key 'h_list'")),
    };
    let study: ConvergenceReport = convergence_study(system, cfg.t0, t_end, &h_list)?;
    prepare_dir(out)?;
    write_table(
        &out.join("convergence.csv"),
        &["h", "max_error"].map(String::from),
        study.entries.iter().map(|&(h, e)| vec![fmt_g17(h), fmt_g17(e)]),
    )?;
    let expected = ConvergenceReport::expected_order(system.order());
    write_table(
        &out.join("convergence_fit.csv"),
        &["h_ref", "fitted_order", "expected_order"].map(String::from),
        [vec![fmt_g17(study.h_ref), opt_field(study.fitted_order), fmt_g17(expected)]],
    )?;
    let mut report: Vec<String> = study
        .entries
        .iter()
        .map(|&(h, e)| format!("h={} max_error={:e}", fmt_g17(h), e))
        .collect();
    report.push(match study.fitted_order {
        Some(p) => format!("fitted order {p:.3} (smooth-field order {expected})"),
        None => "fitted order undefined: some errors are exactly zero".into(),
    });
    Ok(Outcome::ok(report))
}

/// Gnuplot script plotting every column of `csv` against the first.
pub fn gnuplot_script(csv: &Path, header: &[String]) -> String {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{}'\n", header.first().map_or("t", String::as_str)));
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{stem}.png'\n"));
    s.push_str(&format!(
        "plot for [i=2:{}] '{}' using 1:i with lines\n",
        header.len(),
        csv.display()
    ));
    s
}

/// Write `<stem>.gp` next to the other outputs.
pub fn plot(csv: &Path, out: &Path) -> Result<Outcome, CliError> {
    let table = read_table(csv)?;
    if table.header.len() < 2 {
        return Err(CliError::Csv {
            path: csv.to_path_buf(),
            message: "need at least two columns to plot".into(),
        });
    }
    prepare_dir(out)?;
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let path: PathBuf = out.join(format!("{stem}.gp"));
    write_text(&path, &gnuplot_script(csv, &table.header))?;
    Ok(Outcome::ok(vec![format!("wrote {}", path.display())]))
}
