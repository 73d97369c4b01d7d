//! JSON form of boundary specs. Every scalar is a string (decimal or
//! `p/q`) so that exact values survive the round trip.
//!
//! ```json
//! {
//!   "n": 3,
//!   "word": [2, 0],
//!   "divergent": {"3": "1/2"},
//!   "recurrent": {"type": "schedule", "n": 2, "support": [0, 1, 2],
//!                 "excursions": [{"cusp": [0, 1], "power": "20"}]}
//! }
//! ```

use std::collections::BTreeMap;

use coxvol::boundary::{BoundaryPointSpec, RecurrentProgram};
use coxvol::cusp::{Certificate, CuspId, Excursion, ExcursionSchedule, LengthGenerator, ScheduleGenerator};
use coxvol::cusp::{DEFAULT_GLUING_THRESHOLD, DEFAULT_K_MIN};
use coxvol::lattice::LatticeVector;
use coxvol::scalar::{parse_rational, Rational, Scalar};
use coxvol::word::Word;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub n: usize,
    #[serde(default)]
    pub word: Vec<usize>,
    #[serde(default)]
    pub divergent: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrent: Option<RecurrentJson>,
    /// Written by `construct`; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RecurrentJson {
    Explicit {
        support: Vec<usize>,
        vector: Vec<String>,
    },
    Schedule {
        n: usize,
        support: Vec<usize>,
        excursions: Vec<ExcursionJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_min: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gluing_threshold: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<GeneratorJson>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcursionJson {
    pub cusp: [usize; 2],
    pub power: String,
}

/// Provenance of generated excursion powers. The explicit excursion list is
/// authoritative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    /// `geometric`, `polynomial` or `supergeometric`.
    pub lengths: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub ln_increments: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<String>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn parse_scalar<S: Scalar>(ctx: &S::Ctx, field: &str, s: &str) -> Result<S, CliError> {
    let q = parse_rational(s).map_err(|e| schema(format!("{field}: {e}")))?;
    Ok(S::from_rational(ctx, &q))
}

fn parse_u64(field: &str, s: &str) -> Result<u64, CliError> {
    s.trim().parse().map_err(|e| schema(format!("{field}: `{s}`: {e}")))
}

fn parse_f64(field: &str, s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|e| schema(format!("{field}: `{s}`: {e}")))
}

impl GeneratorJson {
    fn to_generator(&self) -> Result<ScheduleGenerator, CliError> {
        let lengths = match self.lengths.as_str() {
            "geometric" => {
                let l = self.l.as_deref().ok_or_else(|| schema("geometric generator needs `l`"))?;
                LengthGenerator::Geometric { l: parse_f64("generator.l", l)? }
            }
            "polynomial" => LengthGenerator::Polynomial {
                exponent: self.exponent.ok_or_else(|| schema("polynomial generator needs `exponent`"))?,
            },
            "supergeometric" => LengthGenerator::SuperGeometric,
            other => return Err(schema(format!("unknown length generator `{other}`"))),
        };
        Ok(ScheduleGenerator { lengths, count: self.count })
    }

    fn from_generator(g: &ScheduleGenerator) -> Self {
        let (lengths, l, exponent) = match &g.lengths {
            LengthGenerator::Geometric { l } => ("geometric", Some(format!("{l}")), None),
            LengthGenerator::Polynomial { exponent } => ("polynomial", None, Some(*exponent)),
            LengthGenerator::SuperGeometric => ("supergeometric", None, None),
        };
        Self { lengths: lengths.into(), l, exponent, count: g.count }
    }
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        Self {
            ln_increments: c.ln_increments.iter().map(|x| format!("{x}")).collect(),
            decay_rate: c.decay_rate.map(|r| format!("{r:e}")),
        }
    }
}

impl SpecJson {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| schema(format!("spec JSON: {e}")))
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec JSON serializes")
    }

    /// Builds and validates the library spec in the requested backend.
    pub fn to_spec<S: Scalar>(&self, ctx: &S::Ctx) -> Result<BoundaryPointSpec<S>, CliError> {
        let mut divergent = BTreeMap::new();
        for (k, v) in &self.divergent {
            let idx: usize = k.trim().parse().map_err(|e| schema(format!("divergent index `{k}`: {e}")))?;
            divergent.insert(idx, parse_scalar::<S>(ctx, &format!("divergent[{k}]"), v)?);
        }
        let recurrent = match &self.recurrent {
            None => None,
            Some(RecurrentJson::Explicit { support, vector }) => {
                let coords = vector
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_scalar::<S>(ctx, &format!("vector[{i}]"), s))
                    .collect::<Result<Vec<S>, _>>()?;
                let vector = LatticeVector::new(coords)?;
                Some(RecurrentProgram::ExplicitIsotropic { support: support.clone(), vector })
            }
            Some(RecurrentJson::Schedule { n, support, excursions, k_min, gluing_threshold, generator }) => {
                let mut ex = Vec::with_capacity(excursions.len());
                for (m, e) in excursions.iter().enumerate() {
                    let cusp = CuspId::new(e.cusp[0], e.cusp[1], *n)?;
                    ex.push(Excursion { cusp, power: parse_u64(&format!("excursions[{m}].power"), &e.power)? });
                }
                let sched = ExcursionSchedule {
                    n: *n,
                    support: support.clone(),
                    excursions: ex,
                    generator: generator.as_ref().map(GeneratorJson::to_generator).transpose()?,
                    k_min: k_min.as_deref().map(|s| parse_u64("k_min", s)).transpose()?.unwrap_or(DEFAULT_K_MIN),
                    gluing_threshold: gluing_threshold
                        .as_deref()
                        .map(|s| parse_f64("gluing_threshold", s))
                        .transpose()?
                        .unwrap_or(DEFAULT_GLUING_THRESHOLD),
                };
                sched.validate()?;
                Some(RecurrentProgram::Schedule(sched))
            }
        };
        let spec = BoundaryPointSpec { n: self.n, word: Word::from_letters(self.word.iter().copied()), divergent, recurrent };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &BoundaryPointSpec<Rational>) -> Result<Self, CliError> {
        let word = spec
            .word
            .to_vec(1 << 20)
            .ok_or_else(|| schema(format!("word of length {} is too long to serialize", spec.word.len())))?;
        let divergent = spec.divergent.iter().map(|(k, v)| (k.to_string(), v.to_decimal())).collect();
        let recurrent = spec.recurrent.as_ref().map(|p| match p {
            RecurrentProgram::ExplicitIsotropic { support, vector } => RecurrentJson::Explicit {
                support: support.clone(),
                vector: vector.coords().iter().map(Scalar::to_decimal).collect(),
            },
            RecurrentProgram::Schedule(s) => RecurrentJson::Schedule {
                n: s.n,
                support: s.support.clone(),
                excursions: s
                    .excursions
                    .iter()
                    .map(|e| ExcursionJson { cusp: [e.cusp.i(), e.cusp.j()], power: e.power.to_string() })
                    .collect(),
                k_min: Some(s.k_min.to_string()),
                gluing_threshold: Some(format!("{}", s.gluing_threshold)),
                generator: s.generator.as_ref().map(GeneratorJson::from_generator),
            },
        });
        Ok(Self { n: spec.n, word, divergent, recurrent, certificate: None, meta: BTreeMap::new() })
    }

    /// The schedule of a purely recurrent spec (empty word, no divergent
    /// part), for which designations along the ray are defined.
    pub fn pure_schedule(&self) -> Result<Option<ExcursionSchedule>, CliError> {
        if !self.word.is_empty() || !self.divergent.is_empty() {
            return Ok(None);
        }
        match self.to_spec::<Rational>(&coxvol::scalar::Exact)?.recurrent {
            Some(RecurrentProgram::Schedule(s)) => Ok(Some(s)),
            _ => Ok(None),
        }
    }
}
