use crate::frac_ops::{FracOrder, SampleSeries, TimeGrid};

use super::IneqError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `lhs <= rhs`, slack `rhs - lhs`
    AtMost,
    /// `lhs >= rhs`, slack `lhs - rhs`
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Result of re-running a failing check on the halved grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub fine_max_violation: f64,
    pub fine_tol: f64,
    /// coarse violation / fine violation (infinite when the fine run is clean)
    pub ratio: f64,
}

/// `10 h^min(1, 2-alpha) * scale`.
pub fn default_tolerance(grid: &TimeGrid, order: FracOrder, scale: f64) -> f64 {
    let q = (2.0 - order.alpha()).min(1.0);
    10.0 * grid.h().powf(q) * scale
}

/// Pointwise comparison of two sampled sides of an inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct IneqReport {
    direction: Direction,
    lhs: SampleSeries,
    rhs: SampleSeries,
    slack: SampleSeries,
    max_violation: f64,
    tol: f64,
    refinement: Option<Refinement>,
    verdict: Verdict,
}

impl IneqReport {
    /// Report with the default tolerance, scaled by the largest `|rhs|`.
    pub fn new(
        lhs: SampleSeries,
        rhs: SampleSeries,
        direction: Direction,
        order: FracOrder,
    ) -> Result<Self, IneqError> {
        let tol = default_tolerance(rhs.grid(), order, rhs.max_abs());
        Self::with_tol(lhs, rhs, direction, tol)
    }

    pub fn with_tol(
        lhs: SampleSeries,
        rhs: SampleSeries,
        direction: Direction,
        tol: f64,
    ) -> Result<Self, IneqError> {
        let slack = match direction {
            Direction::AtMost => rhs.zip_with(&lhs, |r, l| r - l)?,
            Direction::AtLeast => lhs.zip_with(&rhs, |l, r| l - r)?,
        };
        let max_violation = slack.values().iter().fold(0.0_f64, |m, &s| if -s > m { -s } else { m });
        let verdict = if max_violation <= tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Ok(Self {
            direction,
            lhs,
            rhs,
            slack,
            max_violation,
            tol,
            refinement: None,
            verdict,
        })
    }

    /// Apply the refinement rule using the same check evaluated on the halved
    /// grid. A passing report is returned unchanged.
    pub fn refine_with(mut self, fine: &IneqReport) -> Self {
        if self.verdict == Verdict::Pass {
            return self;
        }
        let ratio = if fine.max_violation > 0.0 {
            self.max_violation / fine.max_violation
        } else {
            f64::INFINITY
        };
        self.refinement = Some(Refinement {
            fine_max_violation: fine.max_violation,
            fine_tol: fine.tol,
            ratio,
        });
        if ratio >= 1.5 && fine.max_violation <= fine.tol {
            self.verdict = Verdict::Pass;
        }
        self
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn lhs(&self) -> &SampleSeries {
        &self.lhs
    }

    pub fn rhs(&self) -> &SampleSeries {
        &self.rhs
    }

    pub fn slack(&self) -> &SampleSeries {
        &self.slack
    }

    pub fn max_violation(&self) -> f64 {
        self.max_violation
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn refinement(&self) -> Option<&Refinement> {
        self.refinement.as_ref()
    }

    pub fn refinement_ratio(&self) -> Option<f64> {
        self.refinement.map(|r| r.ratio)
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Node with the smallest slack.
    pub fn worst_node(&self) -> usize {
        let v = self.slack.values();
        (0..v.len())
            .min_by(|&a, &b| v[a].total_cmp(&v[b]))
            .unwrap_or(0)
    }
}
