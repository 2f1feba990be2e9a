//! Bifurcation strata of the corank-two unfoldings
//!
//! * sharksfin `(x^2 + y^3 + ay, y^2 + x^3 + bx)`,
//! * odd-shaped sharksfin `(x^2 + y^5 + cy^3 + ay, y^2 + x^3 + bx)`,
//! * `I2,3` `(x^2 + y^3 + ax + by + cy^2, xy)`.
//!
//! Closed-form strata are available both in floating point and exactly. In the exact
//! form the `a`-coordinate is a quadratic surd `r·√d` so that identities between
//! parametrizations and implicit equations can be checked without rounding.

mod locate;
mod params;
mod sections;
mod series;
pub mod systems;

pub use locate::{
    gulls_elimination, locate_and_classify, odd_sharksfin_origin_class, predicted_source, GullsElimination, Located,
    MultiGermWitness, Outcome,
};
pub use params::{
    a_squared_exact, implicit_residual, implicit_residual_exact, implicit_residual_poly, parametrize_exact,
    parametrize_stratum, parametrize_stratum_with, rational_sqrt, CuspFoldForm, ExactPoint, Surd,
};
pub use sections::{section_curves, CurveShape, LabeledCurve, SectionWindow};
pub use series::{
    odd_sharksfin_contacts, series_fit_swallowtail, sharksfin_swallowtail_samples, weighted_poly_fit, OddContacts,
    SeriesFit, SeriesResult, FIT_SAMPLES, FIT_WINDOW, REPORTED_COEFFS, SWALLOWTAIL_FIT_DEGREE,
};

use crate::numeric::NumericError;
use crate::recognition::SingularityClass;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnfoldingId {
    Sharksfin,
    OddSharksfin,
    I23,
}

impl UnfoldingId {
    /// Number of unfolding parameters: `(a, b)` or `(a, b, c)`.
    pub fn param_dim(&self) -> usize {
        match self {
            UnfoldingId::Sharksfin => 2,
            _ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UnfoldingId::Sharksfin => "sharksfin",
            UnfoldingId::OddSharksfin => "odd_sharksfin",
            UnfoldingId::I23 => "i23",
        }
    }

    /// Strata this family carries.
    pub fn strata(&self) -> &'static [StratumKind] {
        use StratumKind::*;
        match self {
            UnfoldingId::Sharksfin => &[BeaksLines, Swallowtail],
            UnfoldingId::OddSharksfin => &[BeaksLines, Swallowtail, Tacnode, Gulls],
            UnfoldingId::I23 => &[BeaksLips, Goose, Swallowtail, Butterfly, CuspFold, SharksfinAxis, DeltoidAxis],
        }
    }
}

impl fmt::Display for UnfoldingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnfoldingId {
    type Err = StrataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sharksfin" => Ok(Self::Sharksfin),
            "odd_sharksfin" | "oddsharksfin" => Ok(Self::OddSharksfin),
            "i23" | "i2,3" | "i_23" => Ok(Self::I23),
            _ => Err(StrataError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    BeaksLips,
    Goose,
    Swallowtail,
    Butterfly,
    CuspFold,
    SharksfinAxis,
    DeltoidAxis,
    Tacnode,
    Gulls,
    BeaksLines,
}

impl StratumKind {
    pub fn name(&self) -> &'static str {
        match self {
            StratumKind::BeaksLips => "beaks_lips",
            StratumKind::Goose => "goose",
            StratumKind::Swallowtail => "swallowtail",
            StratumKind::Butterfly => "butterfly",
            StratumKind::CuspFold => "cusp_fold",
            StratumKind::SharksfinAxis => "sharksfin_axis",
            StratumKind::DeltoidAxis => "deltoid_axis",
            StratumKind::Tacnode => "tacnode",
            StratumKind::Gulls => "gulls",
            StratumKind::BeaksLines => "beaks_lines",
        }
    }

    /// Whether the parametrization carries a `±` branch.
    pub fn is_signed(&self) -> bool {
        !matches!(
            self,
            StratumKind::SharksfinAxis | StratumKind::DeltoidAxis | StratumKind::Tacnode | StratumKind::Gulls
        )
    }
}

impl FromStr for StratumKind {
    type Err = StrataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k = s.to_ascii_lowercase().replace('-', "_");
        [
            StratumKind::BeaksLips,
            StratumKind::Goose,
            StratumKind::Swallowtail,
            StratumKind::Butterfly,
            StratumKind::CuspFold,
            StratumKind::SharksfinAxis,
            StratumKind::DeltoidAxis,
            StratumKind::Tacnode,
            StratumKind::Gulls,
            StratumKind::BeaksLines,
        ]
        .into_iter()
        .find(|s| s.name() == k || s.name().replace('_', "") == k)
        .ok_or(StrataError::UnknownName(s.to_string()))
    }
}

impl fmt::Display for StratumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(&self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl FromStr for Sign {
    type Err = StrataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            _ => Err(StrataError::UnknownName(s.to_string())),
        }
    }
}

/// A stratum together with its `±` branch.
///
/// For the line strata of the sharksfin families the sign picks the line:
/// `+` is `{a = 0}` (parametrized by `b`), `-` is `{b = 0}`. The same convention
/// selects the sharksfin swallowtail branch `a = a(b)` (`+`) or `b = b(a)` (`-`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumId {
    pub kind: StratumKind,
    pub sign: Sign,
}

impl StratumId {
    pub fn new(kind: StratumKind, sign: Sign) -> Self {
        Self { kind, sign }
    }

    pub fn plus(kind: StratumKind) -> Self {
        Self { kind, sign: Sign::Plus }
    }
}

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_signed() {
            write!(f, "{}{}", self.kind, self.sign.as_char())
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

/// A parameter-space point on a stratum with the coordinates that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratumPoint {
    pub unfolding: UnfoldingId,
    pub stratum: StratumId,
    pub internal: Vec<f64>,
    pub params: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("stratum {stratum} does not belong to the {unfolding} unfolding")]
    InvalidPair { unfolding: UnfoldingId, stratum: StratumKind },
    #[error("internal coordinates violate the domain of {stratum}: {reason}")]
    Domain { stratum: StratumKind, reason: String },
    #[error("expected {expected} internal coordinates, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("no implicit equation is available for {0}")]
    NoImplicitForm(StratumKind),
    #[error("no closed-form parametrization is available for {0}")]
    NoClosedForm(StratumKind),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("located point classifies as {found}, stratum expects {expected}")]
    Mismatch { expected: String, found: String },
    #[error("{0} points are not located by Newton refinement")]
    NotLocatable(StratumKind),
    #[error("resolution {0} is below the minimum of 16")]
    Resolution(usize),
    #[error("empty window")]
    EmptyWindow,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// The class that a point of stratum `id` must have, given its internal coordinates.
pub fn expected_class(u: UnfoldingId, sp: &StratumPoint) -> Option<SingularityClass> {
    use StratumKind::*;
    Some(match (u, sp.stratum.kind) {
        (UnfoldingId::I23, BeaksLips) => {
            let (y, c) = (sp.internal[0], sp.internal[1]);
            if y < -2.0 * c / 9.0 {
                SingularityClass::Lips
            } else {
                SingularityClass::Beaks
            }
        }
        (_, Goose) => SingularityClass::Goose,
        (_, Swallowtail) => SingularityClass::Swallowtail,
        (_, Butterfly) => SingularityClass::Butterfly,
        (_, SharksfinAxis) => SingularityClass::Sharksfin,
        (_, DeltoidAxis) => SingularityClass::DeltoidTwoJet,
        (_, Gulls) => SingularityClass::Gulls,
        (_, BeaksLines) => SingularityClass::Beaks,
        _ => return None,
    })
}
