//! JSON round trip of [`SdpProblem`] for offline inspection with other solvers.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conic::sdp::{Coeff, Constraint, Relation, SdpProblem, Sense, Term};
use crate::error::{Error, Result};
use crate::model::C64;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CoeffDump {
    /// Row-major `[re, im]` pairs.
    Dense { n: usize, entries: Vec<[f64; 2]> },
    Diagonal { entries: Vec<(usize, f64)> },
}

#[derive(Serialize, Deserialize)]
struct TermDump {
    block: usize,
    coeff: CoeffDump,
}

#[derive(Serialize, Deserialize)]
struct ConstraintDump {
    terms: Vec<TermDump>,
    relation: Relation,
    rhs: f64,
}

#[derive(Serialize, Deserialize)]
struct ProblemDump {
    dims: Vec<usize>,
    sense: Sense,
    objective: Vec<TermDump>,
    objective_constant: f64,
    constraints: Vec<ConstraintDump>,
}

fn term_out(t: &Term) -> TermDump {
    let coeff = match &t.coeff {
        Coeff::Dense(m) => CoeffDump::Dense {
            n: m.nrows(),
            entries: (0..m.nrows())
                .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                .collect(),
        },
        Coeff::Diagonal(d) => CoeffDump::Diagonal { entries: d.clone() },
    };
    TermDump { block: t.block, coeff }
}

fn term_in(t: TermDump) -> Result<Term> {
    let coeff = match t.coeff {
        CoeffDump::Dense { n, entries } => {
            if entries.len() != n * n {
                return Err(Error::domain("dense coefficient has wrong entry count"));
            }
            Coeff::Dense(DMatrix::from_row_iterator(n, n, entries.into_iter().map(|[re, im]| C64::new(re, im))))
        }
        CoeffDump::Diagonal { entries } => Coeff::Diagonal(entries),
    };
    Ok(Term { block: t.block, coeff })
}

pub fn to_json(p: &SdpProblem) -> String {
    let d = ProblemDump {
        dims: p.dims.clone(),
        sense: p.sense,
        objective: p.objective.iter().map(term_out).collect(),
        objective_constant: p.objective_constant,
        constraints: p
            .constraints
            .iter()
            .map(|c| ConstraintDump { terms: c.terms.iter().map(term_out).collect(), relation: c.relation, rhs: c.rhs })
            .collect(),
    };
    serde_json::to_string_pretty(&d).expect("finite problem data serializes")
}

pub fn from_json(s: &str) -> Result<SdpProblem> {
    let d: ProblemDump = serde_json::from_str(s).map_err(|e| Error::domain(format!("bad problem dump: {e}")))?;
    let p = SdpProblem {
        dims: d.dims,
        sense: d.sense,
        objective: d.objective.into_iter().map(term_in).collect::<Result<_>>()?,
        objective_constant: d.objective_constant,
        constraints: d
            .constraints
            .into_iter()
            .map(|c| {
                Ok(Constraint { terms: c.terms.into_iter().map(term_in).collect::<Result<_>>()?, relation: c.relation, rhs: c.rhs })
            })
            .collect::<Result<_>>()?,
    };
    p.validate()?;
    Ok(p)
}
