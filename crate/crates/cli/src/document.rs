//! JSON channel documents.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays.

use quasinv::channels::{kraus_to_affine_unchecked, AffineChannel, KrausChannel};
use quasinv::numerics::{Complex2x2, Real3x3, Vec3, C64};
use quasinv::zoo::{self, FamilySpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type ComplexPair = [f64; 2];
pub type ComplexMatrix = [[ComplexPair; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Representation {
    Kraus { operators: Vec<ComplexMatrix> },
    Affine { m: [[f64; 3]; 3], c: Vec3 },
    Pauli { p: [f64; 4] },
    Gad { gamma: f64, p: f64 },
    MixedUnitary { p: f64, theta: f64 },
    Tetrahedron { p: f64, p_prime: f64 },
    Unitary {
        theta: f64,
        #[serde(default = "default_axis")]
        axis: Vec3,
    },
}

fn default_axis() -> Vec3 {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDocument {
    #[serde(flatten)]
    pub channel: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A parsed channel, kept in Kraus form when one is available so that the
/// CPTP report includes the trace-preservation residual.
pub enum Parsed {
    Kraus(KrausChannel),
    Affine(AffineChannel),
}

impl Parsed {
    pub fn affine(&self) -> AffineChannel {
        match self {
            Parsed::Kraus(k) => kraus_to_affine_unchecked(k),
            Parsed::Affine(a) => *a,
        }
    }
}

pub fn to_complex(m: &ComplexMatrix) -> Complex2x2 {
    let c = |z: &ComplexPair| C64::new(z[0], z[1]);
    Complex2x2::new(c(&m[0][0]), c(&m[0][1]), c(&m[1][0]), c(&m[1][1]))
}

pub fn from_complex(m: &Complex2x2) -> ComplexMatrix {
    m.0.map(|row| row.map(|z| [z.re, z.im]))
}

impl Representation {
    pub fn family(&self) -> Option<FamilySpec> {
        Some(match *self {
            Representation::Pauli { p } => FamilySpec::Pauli { p },
            Representation::Gad { gamma, p } => FamilySpec::Gad { gamma, p },
            Representation::MixedUnitary { p, theta } => FamilySpec::MixedUnitary { p, theta },
            Representation::Tetrahedron { p, p_prime } => FamilySpec::Tetrahedron { p, p_prime },
            Representation::Unitary { theta, axis } => FamilySpec::Rotation { theta, axis },
            _ => return None,
        })
    }
}

impl ChannelDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_kraus(k: &KrausChannel, label: Option<String>) -> Self {
        Self {
            channel: Representation::Kraus {
                operators: k.operators().iter().map(from_complex).collect(),
            },
            label,
        }
    }

    /// Short identifier for reports: the label, or the document type.
    pub fn id(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let v = serde_json::to_value(&self.channel).expect("documents serialize");
        v["type"].as_str().unwrap_or("channel").to_string()
    }

    pub fn build(&self) -> Result<Parsed, CliError> {
        let invalid = |e: quasinv::Error| CliError::Parse(e.to_string());
        if let Some(spec) = self.channel.family() {
            let (k, _) = zoo::make(&spec).map_err(invalid)?;
            return Ok(Parsed::Kraus(k));
        }
        match &self.channel {
            Representation::Kraus { operators } => {
                let ops = operators.iter().map(to_complex).collect();
                Ok(Parsed::Kraus(KrausChannel::new_unvalidated(ops).map_err(invalid)?))
            }
            Representation::Affine { m, c } => Ok(Parsed::Affine(AffineChannel::new(Real3x3(*m), *c).map_err(invalid)?)),
            _ => unreachable!("family documents handled above"),
        }
    }
}
