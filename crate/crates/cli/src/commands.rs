use effective_forms::classify::{classify_full, reduce, Classification, OrbitLabel, Witness};
use effective_forms::invariants::{classify_2form_dim4, PfaffianType};
use effective_forms::mae::{check_jet_conditions, pde_from_form, JetForm, PolyForm};
use effective_forms::stabilizer::{killing_report, prolongation, stabilizer};
use effective_forms::symplectic::{bot, effective_decompose, half_dim, is_effective};
use effective_forms::witness::{solve_conjugacy, SolverOptions};
use effective_forms::{Error, KForm, Mat, Rational, Scalar};

use crate::document::{FormDocument, ParsedForm, ScalarMode, Term};
use crate::error::{CliError, Result};
use crate::report::{
    ComponentDoc, EffectiveDoc, JetDoc, KillingDoc, OrbitDoc, ParameterDoc, PfaffianDoc, QDoc, Report,
    StabilizerDoc, WitnessDoc,
};

const Q_NAMES: [&str; 6] = ["q1", "q2", "q3", "q4", "q5", "q6"];

/// Settings shared by all commands.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub restarts: usize,
    /// Residual accepted for a numerical witness, and the relative tolerance
    /// for comparing float orbit parameters.
    pub tolerance: Option<f64>,
    pub witness: bool,
}

impl Settings {
    fn solver(&self) -> SolverOptions {
        let mut o = SolverOptions {
            seed: self.seed,
            restarts: self.restarts,
            ..SolverOptions::default()
        };
        if let Some(t) = self.tolerance {
            o.accept_residual = t;
        }
        o
    }
}

/// A report plus the error that decides the exit status, if any.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Single {
    Classify,
    Stabilizer,
    Prolong,
    Pfaffian,
    Effective,
    Mae,
    Witness,
}

impl Single {
    fn name(self) -> &'static str {
        match self {
            Single::Classify => "classify",
            Single::Stabilizer => "stabilizer",
            Single::Prolong => "prolong",
            Single::Pfaffian => "pfaffian",
            Single::Effective => "effective",
            Single::Mae => "mae",
            Single::Witness => "witness",
        }
    }
}

pub fn run_single(cmd: Single, doc: &FormDocument, st: &Settings) -> Result<Outcome> {
    match doc.scalar {
        ScalarMode::Rational => single::<Rational>(cmd, doc, st),
        ScalarMode::Float => single::<f64>(cmd, doc, st),
    }
}

/// Compare two forms; with `st.witness` also search for a map between them.
pub fn run_pair(command: &str, a: &FormDocument, b: &FormDocument, st: &Settings) -> Result<Outcome> {
    if a.scalar == ScalarMode::Rational && b.scalar == ScalarMode::Rational {
        pair::<Rational>(command, a, b, st)
    } else {
        pair::<f64>(command, a, b, st)
    }
}

fn strings<S: Scalar>(m: &Mat<S>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn terms_of<S: Scalar>(w: &KForm<S>) -> Vec<Term> {
    w.terms()
        .map(|(b, c)| Term {
            idx: b.indices(),
            coef: c.to_string(),
        })
        .collect()
}

fn require_shape<S: Scalar>(w: &KForm<S>, dim: usize, degree: usize, what: &str) -> Result<()> {
    if w.dim() != dim || w.degree() != degree {
        return Err(CliError::Document(format!(
            "{what} needs dim {dim} and degree {degree}, found dim {} and degree {}",
            w.dim(),
            w.degree()
        )));
    }
    Ok(())
}

fn ensure_effective<S: Scalar>(w: &KForm<S>) -> Result<()> {
    if !is_effective(w)? {
        return Err(Error::NotEffective(bot(w)?.to_string()).into());
    }
    Ok(())
}

fn effective_3form<S: Scalar>(w: &KForm<S>, what: &str) -> Result<Classification<S>> {
    require_shape(w, 6, 3, what)?;
    ensure_effective(w)?;
    Ok(classify_full(w)?)
}

fn orbit_doc<S: Scalar>(label: &OrbitLabel<S>) -> OrbitDoc {
    OrbitDoc {
        family: label.family,
        parameter: label.parameter.as_ref().map(|p| ParameterDoc {
            name: if label.family == 1 { "gamma" } else { "nu" }.into(),
            sixth_power: p.sixth_power.to_string(),
            value: p.value.as_ref().map(|v| v.to_string()),
            approx: p.approx,
        }),
    }
}

fn q_doc<S: Scalar>(c: &Classification<S>) -> QDoc {
    let (p, m, z) = c.report.signature;
    QDoc {
        matrix: strings(&c.q.matrix),
        rank: c.report.rank,
        signature: [p, m, z],
        det: c.report.det.to_string(),
    }
}

fn stabilizer_docs<S: Scalar>(r: &mut Report, w: &KForm<S>, with_prolongation: bool) -> Result<()> {
    let j = stabilizer(w)?;
    let k = killing_report(&j);
    let (p, m, z) = k.signature;
    r.stabilizer = Some(StabilizerDoc {
        dim: j.dim(),
        basis: j.basis.iter().map(strings).collect(),
    });
    r.killing = Some(KillingDoc {
        signature: [p, m, z],
        radical_dim: k.radical_dim,
    });
    if with_prolongation {
        r.prolongation_dim = Some(prolongation(&j)?.dim);
    }
    Ok(())
}

fn label_witness<S: Scalar>(label: &OrbitLabel<S>, failure: Option<&String>) -> WitnessDoc {
    let mut doc = WitnessDoc {
        relation: "pullback(map, representative) = input".into(),
        kind: None,
        map: None,
        residual: None,
        defect: None,
        restarts_used: None,
        failure: failure.cloned(),
    };
    match &label.witness {
        Some(Witness::Constructive(m)) => {
            doc.kind = Some("constructive".into());
            doc.map = Some(strings(m));
        }
        Some(Witness::Numerical { map, residual, defect }) => {
            doc.kind = Some("numerical".into());
            doc.map = Some(strings(map));
            doc.residual = Some(*residual);
            doc.defect = Some(*defect);
        }
        None => {}
    }
    doc
}

/// Attach a reduction witness; returns the failure when none was found.
fn attach_witness<S: Scalar>(r: &mut Report, w: &KForm<S>, st: &Settings) -> Result<Option<CliError>> {
    let red = reduce(w, &st.solver())?;
    r.witness = Some(label_witness(&red.label, red.failure.as_ref()));
    Ok(red.failure.map(CliError::NoWitness))
}

fn single<S: Scalar>(cmd: Single, doc: &FormDocument, st: &Settings) -> Result<Outcome> {
    let parsed: ParsedForm<S> = doc.parse()?;
    let w = &parsed.form;
    let mut r = Report::new(cmd.name(), FormDocument::canonical(&parsed));
    let mut failure = None;
    match cmd {
        Single::Classify => {
            let c = effective_3form(w, "classify")?;
            r.orbit = Some(orbit_doc(&c.label));
            r.q = Some(q_doc(&c));
            stabilizer_docs(&mut r, w, true)?;
            r.pde = Some(pde_from_form(w)?.render());
            if st.witness {
                failure = attach_witness(&mut r, w, st)?;
            }
        }
        Single::Stabilizer => stabilizer_docs(&mut r, w, false)?,
        Single::Prolong => stabilizer_docs(&mut r, w, true)?,
        Single::Pfaffian => {
            require_shape(w, 4, 2, "pfaffian")?;
            let (pf, kind) = classify_2form_dim4(w)?;
            let value = if pf.is_positive() {
                format!("+{pf}")
            } else {
                pf.to_string()
            };
            let kind = match kind {
                PfaffianType::Elliptic => "elliptic",
                PfaffianType::Hyperbolic => "hyperbolic",
                PfaffianType::Parabolic => "parabolic",
            };
            r.pfaffian = Some(PfaffianDoc {
                value,
                kind: kind.into(),
            });
        }
        Single::Effective => {
            let n = half_dim(w.dim())?;
            let components = if w.degree() <= n {
                let d = effective_decompose(w)?;
                Some(
                    d.components
                        .iter()
                        .map(|c| ComponentDoc {
                            degree: c.degree(),
                            terms: terms_of(c),
                        })
                        .collect(),
                )
            } else {
                None
            };
            r.effective = Some(EffectiveDoc {
                effective: is_effective(w)?,
                bot: bot(w)?.to_string(),
                components,
            });
        }
        Single::Mae => {
            let c = effective_3form(w, "mae")?;
            r.orbit = Some(orbit_doc(&c.label));
            r.pde = Some(pde_from_form(w)?.render());
            if let Some(jet) = &parsed.jet {
                let full = PolyForm::from_kform(w).add(jet);
                let base = parsed.base_point.clone().unwrap_or_else(|| vec![S::zero(); 6]);
                let jf = JetForm::from_poly_form(&full, base)?;
                let f = check_jet_conditions(&jf)?;
                r.jet = Some(JetDoc {
                    orbit_gate: f.orbit_gate,
                    sigma1_kernel_dim: f.sigma1_kernel_dim,
                    sigma1: f.sigma1.as_ref().map(|h| h.render(&Q_NAMES)),
                    sigma2: f.sigma2.as_ref().map(|k| k.render(&Q_NAMES)),
                    sigma2_h_independent: f.sigma2_h_independent,
                    conclusion: f.conclusion,
                });
            }
        }
        Single::Witness => {
            let c = effective_3form(w, "witness")?;
            r.orbit = Some(orbit_doc(&c.label));
            failure = attach_witness(&mut r, w, st)?;
        }
    }
    Ok(Outcome { report: r, failure })
}

fn parameters_match<S: Scalar>(a: &OrbitLabel<S>, b: &OrbitLabel<S>, st: &Settings) -> bool {
    match (&a.parameter, &b.parameter) {
        (Some(pa), Some(pb)) => {
            if S::EXACT {
                pa.sixth_power == pb.sixth_power
            } else {
                let tol = st.tolerance.unwrap_or(1e-9);
                let (x, y) = (pa.sixth_power.to_f64(), pb.sixth_power.to_f64());
                (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
            }
        }
        (None, None) => true,
        _ => false,
    }
}

fn pair<S: Scalar>(command: &str, a: &FormDocument, b: &FormDocument, st: &Settings) -> Result<Outcome> {
    let pa: ParsedForm<S> = a.parse()?;
    let pb: ParsedForm<S> = b.parse()?;
    let ca = effective_3form(&pa.form, command)?;
    let cb = effective_3form(&pb.form, command)?;
    let mut r = Report::new(command, FormDocument::canonical(&pa));
    r.target = Some(FormDocument::canonical(&pb));
    r.orbit = Some(orbit_doc(&ca.label));
    r.target_orbit = Some(orbit_doc(&cb.label));
    let (fa, fb) = (ca.label.family, cb.label.family);
    let reason = if ca.report.signature != cb.report.signature {
        Some(format!("q_ω signature mismatch (family {fa} vs family {fb})"))
    } else if fa != fb {
        Some(format!("family mismatch (family {fa} vs family {fb})"))
    } else if !parameters_match(&ca.label, &cb.label, st) {
        Some(format!("orbit parameter mismatch within family {fa}"))
    } else {
        None
    };
    r.equivalent = Some(reason.is_none());
    if let Some(reason) = reason {
        r.reason = Some(reason.clone());
        return Ok(Outcome {
            report: r,
            failure: Some(CliError::NotEquivalent(reason)),
        });
    }
    let mut failure = None;
    if st.witness {
        let src = pa.form.map(|x| x.to_f64());
        let dst = pb.form.map(|x| x.to_f64());
        let res = solve_conjugacy(&src, &dst, &st.solver())?;
        let fail = (!res.converged).then(|| {
            format!("witness search did not converge (best residual {:.3e})", res.residual)
        });
        r.witness = Some(WitnessDoc {
            relation: "pullback(map, target) = input".into(),
            kind: Some("numerical".into()),
            map: Some(strings(&res.map)),
            residual: Some(res.residual),
            defect: Some(res.defect),
            restarts_used: Some(res.restarts_used),
            failure: fail.clone(),
        });
        failure = fail.map(CliError::NoWitness);
    }
    Ok(Outcome { report: r, failure })
}
