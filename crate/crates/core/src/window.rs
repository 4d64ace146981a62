//! Integer bookkeeping for gradings of stabilized surfaces: the grading
//! bounds per suture stage, the isomorphism-window constants, the window
//! identities, and the five-block splitting sums.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error("chi at stage {0} is odd ({1}); grading bounds are not integers")]
    Parity(String, i64),
    #[error("middle block is negative ({0}); n is too small")]
    NegativeBlock(i64),
    #[error("tau values must be 0 or -1")]
    BadTau,
    #[error("q must be positive")]
    BadQ,
}

/// A suture stage index: the two boundary stages or a natural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Plus,
    Minus,
    Nat(u64),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Plus => write!(f, "+"),
            Stage::Minus => write!(f, "-"),
            Stage::Nat(n) => write!(f, "{n}"),
        }
    }
}

/// Stabilization choices: tau maps every stage to 0 or -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauAssignment {
    pub plus: i64,
    pub minus: i64,
    /// Explicit values for small natural stages; `nat_default` elsewhere.
    pub nat: Vec<i64>,
    pub nat_default: i64,
}

impl TauAssignment {
    pub fn constant(v: i64) -> Self {
        TauAssignment {
            plus: v,
            minus: v,
            nat: Vec::new(),
            nat_default: v,
        }
    }

    pub fn at(&self, stage: Stage) -> i64 {
        match stage {
            Stage::Plus => self.plus,
            Stage::Minus => self.minus,
            Stage::Nat(n) => *self.nat.get(n as usize).unwrap_or(&self.nat_default),
        }
    }

    fn validate(&self) -> Result<(), WindowError> {
        let ok = |v: i64| v == 0 || v == -1;
        if ok(self.plus)
            && ok(self.minus)
            && ok(self.nat_default)
            && self.nat.iter().all(|&v| ok(v))
        {
            Ok(())
        } else {
            Err(WindowError::BadTau)
        }
    }
}

/// The grading-window parameters: the order q of the tangle component, the
/// Euler characteristic of the capped positive-stage surface, the
/// stabilization choices, and the stage index n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowParams {
    pub q: u64,
    pub chi_bar_plus: i64,
    pub tau: TauAssignment,
    pub n: u64,
}

impl WindowParams {
    pub fn validate(&self) -> Result<(), WindowError> {
        if self.q == 0 {
            return Err(WindowError::BadQ);
        }
        self.tau.validate()
    }

    /// chi of the capped surface at the given stage:
    /// chi(S_-) = chi(S_+) - q + tau(-) and chi(S_n) = chi(S_+) - n q + tau(n).
    pub fn chi_bar(&self, stage: Stage) -> i64 {
        match stage {
            Stage::Plus => self.chi_bar_plus,
            Stage::Minus => self.chi_bar_plus - self.q as i64 + self.tau.at(Stage::Minus),
            Stage::Nat(n) => {
                self.chi_bar_plus - (n as i64) * self.q as i64 + self.tau.at(Stage::Nat(n))
            }
        }
    }
}

/// Grading bounds at one stage: i_max = -chi/2 and i_min = chi/2 - tau.
pub fn bounds(params: &WindowParams, stage: Stage) -> Result<(i64, i64), WindowError> {
    params.validate()?;
    let chi = params.chi_bar(stage);
    if chi.rem_euclid(2) != 0 {
        return Err(WindowError::Parity(stage.to_string(), chi));
    }
    let i_max = -chi / 2;
    let i_min = chi / 2 - params.tau.at(stage);
    Ok((i_max, i_min))
}

/// The window constants at stage n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowReport {
    pub i_max_n: i64,
    pub i_min_n: i64,
    pub p_n: i64,
    pub rho_n: i64,
    pub q_n: i64,
    pub valid: bool,
}

/// P_n = i_min^n + (n+1)q - tau(+), rho_n = i_max^n - nq,
/// Q_n = P_n - q + tau(+); the window is usable when Q_n - rho_n > q.
pub fn window_constants(params: &WindowParams) -> Result<WindowReport, WindowError> {
    let (i_max_n, i_min_n) = bounds(params, Stage::Nat(params.n))?;
    let q = params.q as i64;
    let n = params.n as i64;
    let tau_plus = params.tau.at(Stage::Plus);
    let p_n = i_min_n + (n + 1) * q - tau_plus;
    let rho_n = i_max_n - n * q;
    let q_n = p_n - q + tau_plus;
    Ok(WindowReport {
        i_max_n,
        i_min_n,
        p_n,
        rho_n,
        q_n,
        valid: q_n - rho_n > q,
    })
}

/// Evaluates the window identities exactly; every identity must hold for
/// every parameter choice with valid parities.
pub fn identity_suite(params: &WindowParams) -> Result<Vec<(String, bool)>, WindowError> {
    let q = params.q as i64;
    let n = params.n as i64;
    let tau_plus = params.tau.at(Stage::Plus);
    let chi_plus = params.chi_bar_plus;

    let report_n = window_constants(params)?;
    let mut next = params.clone();
    next.n = params.n + 1;
    let report_n1 = window_constants(&next)?;

    let mut out = Vec::new();
    // i_max^n - Q_n = -chi(S_+) = rho_n - i_min^n.
    out.push((
        "grading-difference-left".to_string(),
        report_n.i_max_n - report_n.q_n == -chi_plus,
    ));
    out.push((
        "grading-difference-right".to_string(),
        report_n.rho_n - report_n.i_min_n == -chi_plus,
    ));
    // P_n - rho_n = chi(S_+) - tau(+) + (n+1) q.
    out.push((
        "window-length".to_string(),
        report_n.p_n - report_n.rho_n == chi_plus - tau_plus + (n + 1) * q,
    ));
    // P_{n+1} - P_n = i_min^{n+1} - i_min^n + q = i_max^{n+1} - i_max^n.
    out.push((
        "shift-via-min".to_string(),
        report_n1.p_n - report_n.p_n == report_n1.i_min_n - report_n.i_min_n + q,
    ));
    out.push((
        "shift-via-max".to_string(),
        report_n1.p_n - report_n.p_n == report_n1.i_max_n - report_n.i_max_n,
    ));
    Ok(out)
}

/// The two five-block splittings of the bypass triangle at stage n, with
/// their common total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSums {
    pub first: [i64; 5],
    pub second: [i64; 5],
    pub total: i64,
}

pub fn block_sums(params: &WindowParams, n: u64) -> Result<BlockSums, WindowError> {
    params.validate()?;
    let q = params.q as i64;
    let chi = params.chi_bar_plus;
    let n = n as i64;
    let middle = chi + (n - 1) * q - 1;
    if middle < 0 {
        return Err(WindowError::NegativeBlock(middle));
    }
    let first = [q, -chi + 1, middle, q, -chi + 1];
    let second = [-chi + 1, q, middle, -chi + 1, q];
    let total: i64 = first.iter().sum();
    debug_assert_eq!(total, second.iter().sum::<i64>());
    debug_assert_eq!(total, (n + 1) * q - chi + 1);
    Ok(BlockSums {
        first,
        second,
        total,
    })
}
