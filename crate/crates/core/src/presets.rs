//! The three worked examples: systems, default grids and Lyapunov data.

use thiserror::Error;

use crate::frac_ops::TimeGrid;
use crate::ineq::{EnvelopeKind, EnvelopeSpec, IneqError};
use crate::solver::{solve, SolveError, SystemDef, Trajectory};
use crate::stability::{
    check_dissipation, check_local_ball, check_ml_envelope, check_sandwich, LyapunovCandidate,
    StabilityError, StabilityReport,
};

/// Default envelope for the third example's candidate.
pub const EXAMPLE3_DEFAULT_PHI: &str = "exp(-t)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PresetError {
    #[error("unknown preset '{0}'")]
    Unknown(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Envelope(#[from] IneqError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    /// `lambda` in `E_alpha(-lambda t^alpha)`
    pub rate: f64,
    pub amplification: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: u8,
    pub name: &'static str,
    pub system: SystemDef,
    pub t_end: f64,
    pub h: f64,
    pub candidate: LyapunovCandidate,
    pub sandwich: bool,
    pub envelope: Option<EnvelopeParams>,
    pub ball_radius: Option<f64>,
}

pub const PRESET_NAMES: &[&str] = &["example1", "example2", "example3"];

fn system(label: &str, alpha: f64, x0: Vec<f64>, rhs: &[&str]) -> SystemDef {
    SystemDef::from_text(label, alpha, x0, rhs).expect("built-in system is valid")
}

fn candidate(v: &str, lower: &str, upper: &str, rate: &str) -> LyapunovCandidate {
    LyapunovCandidate::parse(v, Some(lower), Some(upper), Some(rate))
        .expect("built-in candidate is valid")
}

/// Linear system with `1/(1+t)` coupling, `alpha = 0.9`, `x0 = (-10, 10)`.
pub fn example1() -> Preset {
    Preset {
        id: 1,
        name: "example1",
        system: system("example1", 0.9, vec![-10.0, 10.0], &["-x1 - x2/(1+t)", "x1 - x2"]),
        t_end: 50.0,
        h: 0.01,
        candidate: candidate("x1^2 + x2^2 + x2^2/(1+t)", "r^2", "2*r^2", "r^2"),
        sandwich: true,
        envelope: Some(EnvelopeParams {
            rate: 0.5,
            amplification: 2.0,
        }),
        ball_radius: None,
    }
}

/// Scalar cubic damping with growing gain, `alpha = 0.8`, `x0 = 0.1`.
pub fn example2() -> Preset {
    Preset {
        id: 2,
        name: "example2",
        system: system("example2", 0.8, vec![0.1], &["-x1^3 - exp(t/2)*x1^3"]),
        t_end: 20.0,
        h: 0.01,
        candidate: candidate("x1^6 + exp(-t/2)*x1^6", "r^6", "2*r^6", "12*r^8"),
        sandwich: true,
        envelope: None,
        ball_radius: None,
    }
}

/// Rotating nonlinear system, `alpha = 0.85`, `x0 = (-0.2, 0.3)`, with the
/// default envelope in `V`.
pub fn example3() -> Preset {
    example3_with_phi(EXAMPLE3_DEFAULT_PHI).expect("default envelope is valid")
}

/// Third example with a caller-chosen non-negative decreasing `phi(t)` in
/// `V = (1 + phi) (x1^2 + x2^2) / 2`.
pub fn example3_with_phi(phi: &str) -> Result<Preset, PresetError> {
    let sys = system(
        "example3",
        0.85,
        vec![-0.2, 0.3],
        &["-x1 - x2 + sin(t)*(x1^2 + x2^2)", "x1 - x2 + cos(t)*(x1^2 + x2^2)"],
    );
    let (t_end, h, r) = (40.0, 0.01, 0.5);
    let env = EnvelopeSpec::parse(EnvelopeKind::NonnegDecreasing, phi)?;
    let grid = TimeGrid::spanning(0.0, t_end, h).map_err(IneqError::from)?;
    let samples = env.sample(&grid)?;
    let phi0 = samples.values()[0];
    let v = format!("(1 + ({}))*(x1^2 + x2^2)/2", env.expr());
    let upper = format!("{:?}*r^2", (1.0 + phi0) / 2.0);
    let rate = format!("{:?}*r^2", 1.0 - r);
    let cand = LyapunovCandidate::parse(&v, Some("0.5*r^2"), Some(&upper), Some(&rate))?;
    Ok(Preset {
        id: 3,
        name: "example3",
        system: sys,
        t_end,
        h,
        candidate: cand,
        sandwich: false,
        envelope: None,
        ball_radius: Some(r),
    })
}

pub fn by_id(id: u8) -> Option<Preset> {
    match id {
        1 => Some(example1()),
        2 => Some(example2()),
        3 => Some(example3()),
        _ => None,
    }
}

pub fn by_name(name: &str) -> Result<Preset, PresetError> {
    match name {
        "example1" => Ok(example1()),
        "example2" => Ok(example2()),
        "example3" => Ok(example3()),
        other => Err(PresetError::Unknown(other.to_string())),
    }
}

impl Preset {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid::spanning(0.0, self.t_end, self.h).expect("preset grid is valid")
    }

    /// Run this preset's checks on `traj`. A failing dissipation report is
    /// re-checked on a trajectory solved with half the step.
    pub fn run_checks(&self, traj: &Trajectory) -> Result<StabilityReport, PresetError> {
        let order = self.system.order();
        let sandwich = if self.sandwich {
            Some(check_sandwich(&self.candidate, traj)?)
        } else {
            None
        };
        let mut dissipation = check_dissipation(&self.candidate, traj, order)?;
        if !dissipation.passed() {
            let fine = solve(traj.system(), &traj.grid().refined())?;
            dissipation = dissipation.refine_with(&check_dissipation(&self.candidate, &fine, order)?);
        }
        let envelope = match self.envelope {
            Some(p) => Some(check_ml_envelope(traj, order, p.rate, p.amplification)?),
            None => None,
        };
        let ball = match self.ball_radius {
            Some(r) => Some(check_local_ball(traj, r)?),
            None => None,
        };
        Ok(StabilityReport {
            sandwich,
            dissipation: Some(dissipation),
            envelope,
            ball,
        })
    }

    /// Solve on the default grid and run the checks.
    pub fn reproduce(&self) -> Result<(Trajectory, StabilityReport), PresetError> {
        let traj = solve(&self.system, &self.grid())?;
        let report = self.run_checks(&traj)?;
        Ok((traj, report))
    }
}
