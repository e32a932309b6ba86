//! JSON form documents.
//!
//! Coefficients are strings: `"p/q"` or integers in both modes, decimals only
//! in float mode.

use std::path::Path;

use effective_forms::mae::PolyForm;
use effective_forms::poly::Poly;
use effective_forms::scalar::parse_rational;
use effective_forms::{KForm, Rational, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub idx: Vec<usize>,
    pub coef: String,
}

/// One monomial of a polynomial coefficient: `coef * q^monomial` on `dx_idx`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetTerm {
    pub idx: Vec<usize>,
    pub monomial: Vec<u32>,
    pub coef: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDocument {
    pub dim: usize,
    pub degree: usize,
    pub scalar: ScalarMode,
    pub terms: Vec<Term>,
    /// Terms of degree 1 and 2 in coordinates centered at the base point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<Vec<JetTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
}

/// A document converted to scalars of type `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedForm<S> {
    pub form: KForm<S>,
    pub jet: Option<PolyForm<S>>,
    pub base_point: Option<Vec<S>>,
}

pub fn load(path: &Path) -> Result<FormDocument> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Document(msg.into())
}

pub fn parse_coef<S: Scalar>(s: &str) -> Result<S> {
    if let Some(r) = parse_rational(s) {
        return Ok(S::from_rational(&r));
    }
    if S::EXACT {
        return Err(bad(format!(
            "coefficient {s:?} is not an integer or p/q rational (decimals need scalar mode \"float\")"
        )));
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .and_then(Rational::from_float)
        .map(|r| S::from_rational(&r))
        .ok_or_else(|| bad(format!("coefficient {s:?} is not a number")))
}

fn check_idx(doc: &FormDocument, idx: &[usize]) -> Result<()> {
    if idx.len() != doc.degree {
        return Err(bad(format!("index tuple {idx:?} has length {}, degree is {}", idx.len(), doc.degree)));
    }
    if !idx.windows(2).all(|p| p[0] < p[1]) {
        return Err(bad(format!("index tuple {idx:?} is not strictly increasing")));
    }
    if idx.iter().any(|&i| i == 0 || i > doc.dim) {
        return Err(bad(format!("index tuple {idx:?} is out of range 1..={}", doc.dim)));
    }
    Ok(())
}

impl FormDocument {
    pub fn validate(&self) -> Result<()> {
        if self.dim != 4 && self.dim != 6 {
            return Err(bad(format!("dim must be 4 or 6, found {}", self.dim)));
        }
        if self.degree > self.dim {
            return Err(bad(format!("degree {} exceeds dim {}", self.degree, self.dim)));
        }
        for t in &self.terms {
            check_idx(self, &t.idx)?;
        }
        if let Some(jet) = &self.jet {
            if self.dim != 6 || self.degree != 3 {
                return Err(bad("a jet needs dim 6 and degree 3"));
            }
            for t in jet {
                check_idx(self, &t.idx)?;
                let total: u32 = t.monomial.iter().sum();
                if t.monomial.len() != 6 || !(1..=2).contains(&total) {
                    return Err(bad(format!(
                        "jet monomial {:?} must list 6 exponents with total degree 1 or 2",
                        t.monomial
                    )));
                }
            }
        }
        if let Some(p) = &self.base_point {
            if p.len() != self.dim {
                return Err(bad(format!("base_point has {} entries, dim is {}", p.len(), self.dim)));
            }
        }
        Ok(())
    }

    pub fn parse<S: Scalar>(&self) -> Result<ParsedForm<S>> {
        self.validate()?;
        let coefs = self
            .terms
            .iter()
            .map(|t| parse_coef::<S>(&t.coef))
            .collect::<Result<Vec<_>>>()?;
        let form = KForm::from_terms(
            self.dim,
            self.degree,
            self.terms.iter().zip(coefs).map(|(t, c)| (t.idx.as_slice(), c)),
        )?;
        let jet = match &self.jet {
            None => None,
            Some(terms) => {
                let mut polys = Vec::new();
                for t in terms {
                    let c = parse_coef::<S>(&t.coef)?;
                    polys.push((t.idx.clone(), Poly::monomial(6, t.monomial.clone(), c)));
                }
                Some(PolyForm::from_terms(3, polys)?)
            }
        };
        let base_point = self
            .base_point
            .as_ref()
            .map(|p| p.iter().map(|s| parse_coef::<S>(s)).collect::<Result<Vec<_>>>())
            .transpose()?;
        Ok(ParsedForm {
            form,
            jet,
            base_point,
        })
    }

    /// The document with merged, sorted terms and canonical coefficient strings.
    pub fn canonical<S: Scalar>(parsed: &ParsedForm<S>) -> FormDocument {
        let scalar = if S::EXACT {
            ScalarMode::Rational
        } else {
            ScalarMode::Float
        };
        let terms = parsed
            .form
            .terms()
            .map(|(b, c)| Term {
                idx: b.indices(),
                coef: c.to_string(),
            })
            .collect();
        let jet = parsed.jet.as_ref().map(|j| {
            let mut out = Vec::new();
            for (b, p) in j.terms() {
                for (m, c) in p.terms() {
                    out.push(JetTerm {
                        idx: b.indices(),
                        monomial: m.clone(),
                        coef: c.to_string(),
                    });
                }
            }
            out
        });
        FormDocument {
            dim: parsed.form.dim(),
            degree: parsed.form.degree(),
            scalar,
            terms,
            jet,
            base_point: parsed
                .base_point
                .as_ref()
                .map(|p| p.iter().map(|c| c.to_string()).collect()),
        }
    }
}
