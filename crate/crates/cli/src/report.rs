//! Report types. Every optional field is present only when the command computed it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::document::{FormDocument, Term};

/// Basis convention for a document of dimension `dim`.
pub fn basis_header(dim: usize) -> String {
    let n = dim / 2;
    format!("e1..e{n} = 1..{n}, f1..f{n} = {}..{dim}; Omega = sum e_i* ^ f_i*", n + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterDoc {
    pub name: String,
    pub sixth_power: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub family: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<ParameterDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QDoc {
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
    pub signature: [usize; 3],
    pub det: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerDoc {
    pub dim: usize,
    pub basis: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KillingDoc {
    pub signature: [usize; 3],
    pub radical_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PfaffianDoc {
    pub value: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub degree: usize,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDoc {
    pub effective: bool,
    pub bot: String,
    /// Components `w_i` with `w = sum top^i(w_i)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetDoc {
    pub orbit_gate: bool,
    pub sigma1_kernel_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2_h_independent: Option<bool>,
    pub conclusion: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    /// How `map` relates the forms.
    pub relation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub basis: String,
    pub command: String,
    pub input: FormDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<FormDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_orbit: Option<OrbitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<QDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<StabilizerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing: Option<KillingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prolongation_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pfaffian: Option<PfaffianDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<JetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

impl Report {
    pub fn new(command: &str, input: FormDocument) -> Self {
        Report {
            basis: basis_header(input.dim),
            command: command.into(),
            input,
            target: None,
            orbit: None,
            target_orbit: None,
            q: None,
            stabilizer: None,
            killing: None,
            prolongation_dim: None,
            pde: None,
            pfaffian: None,
            effective: None,
            jet: None,
            equivalent: None,
            reason: None,
            witness: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "basis: {}", self.basis);
        let _ = writeln!(s, "input: {}", terms_text(&self.input.terms));
        if let Some(t) = &self.target {
            let _ = writeln!(s, "target: {}", terms_text(&t.terms));
        }
        if let Some(o) = &self.orbit {
            let _ = writeln!(s, "orbit: {}", orbit_text(o));
        }
        if let Some(o) = &self.target_orbit {
            let _ = writeln!(s, "target orbit: {}", orbit_text(o));
        }
        if let Some(q) = &self.q {
            let _ = writeln!(s, "q matrix:");
            write_matrix(&mut s, &q.matrix);
            let [p, m, z] = q.signature;
            let _ = writeln!(s, "q rank {}, signature ({p}, {m}, {z}), det {}", q.rank, q.det);
        }
        if let Some(st) = &self.stabilizer {
            let _ = writeln!(s, "stabilizer: dim {}", st.dim);
            for (i, b) in st.basis.iter().enumerate() {
                let _ = writeln!(s, "  X{}:", i + 1);
                write_matrix(&mut s, b);
            }
        }
        if let Some(k) = &self.killing {
            let [p, m, z] = k.signature;
            let _ = writeln!(s, "killing signature: ({p}, {m}, {z}), radical dim {}", k.radical_dim);
        }
        if let Some(d) = self.prolongation_dim {
            let _ = writeln!(s, "dim J^(1) = {d}");
        }
        if let Some(p) = &self.pde {
            let _ = writeln!(s, "pde: {p} = 0");
        }
        if let Some(p) = &self.pfaffian {
            let _ = writeln!(s, "pfaffian: {}, {}", p.value, p.kind);
        }
        if let Some(e) = &self.effective {
            let _ = writeln!(s, "effective: {}", e.effective);
            let _ = writeln!(s, "bot: {}", e.bot);
            if let Some(cs) = &e.components {
                for (i, c) in cs.iter().enumerate() {
                    let _ = writeln!(s, "component {i} (degree {}): {}", c.degree, terms_text(&c.terms));
                }
            }
        }
        if let Some(j) = &self.jet {
            let _ = writeln!(s, "jet: orbit gate {}", j.orbit_gate);
            let _ = writeln!(s, "  sigma1: {}", j.sigma1.as_deref().unwrap_or("no solution"));
            let _ = writeln!(s, "  sigma1 kernel dim: {}", j.sigma1_kernel_dim);
            if j.sigma1.is_some() {
                let _ = writeln!(s, "  sigma2: {}", j.sigma2.as_deref().unwrap_or("no solution"));
            }
            if let Some(ind) = j.sigma2_h_independent {
                let _ = writeln!(s, "  sigma2 independent of h: {ind}");
            }
            let _ = writeln!(s, "  conclusion: {}", j.conclusion);
        }
        if let Some(e) = self.equivalent {
            let _ = writeln!(s, "equivalent: {e}");
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(s, "reason: {r}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness ({}):", w.relation);
            if let Some(k) = &w.kind {
                let _ = writeln!(s, "  kind: {k}");
            }
            if let Some(m) = &w.map {
                write_matrix(&mut s, m);
            }
            if let Some(r) = w.residual {
                let _ = writeln!(s, "  residual {r:.3e}");
            }
            if let Some(d) = w.defect {
                let _ = writeln!(s, "  symplectic defect {d:.3e}");
            }
            if let Some(n) = w.restarts_used {
                let _ = writeln!(s, "  restarts used {n}");
            }
            if let Some(f) = &w.failure {
                let _ = writeln!(s, "  failure: {f}");
            }
        }
        s
    }
}

fn orbit_text(o: &OrbitDoc) -> String {
    match &o.parameter {
        None => format!("family {}", o.family),
        Some(p) => {
            let value = p.value.clone().unwrap_or_else(|| format!("~{}", p.approx));
            format!("family {}, {} = {} ({}^6 = {})", o.family, p.name, value, p.name, p.sixth_power)
        }
    }
}

fn terms_text(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|t| {
            let idx: Vec<String> = t.idx.iter().map(|i| i.to_string()).collect();
            format!("{}*[{}]", t.coef, idx.join(","))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn write_matrix(s: &mut String, m: &[Vec<String>]) {
    let width = m.iter().flatten().map(|x| x.len()).max().unwrap_or(1);
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(s, "    [{}]", cells.join(" "));
    }
}
