//! JSON wire format: problem files, jets, polyvectors and diffeomorphisms.
//! Exact values travel as rational strings and every index is 1-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Jet, MultiIndex, Scalar};
use crate::error::{PnfError, Result};
use crate::pipeline::PoissonJet;
use crate::polyvector::{DiffeoJet, PolyVector};
use crate::spectrum::LinearFamily;

pub const DEFAULT_ORDER: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<u32>,
    pub re: String,
    pub im: String,
}

pub type JetJson = Vec<TermJson>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub indices: Vec<usize>,
    pub jet: JetJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyVectorJson {
    pub degree: usize,
    pub terms: Vec<PolyTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffeoJson {
    pub n: usize,
    pub p: usize,
    pub order: u32,
    pub components: Vec<JetJson>,
}

/// A Poisson jet on `n` phase and `p` parameter variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub p: usize,
    /// `p` rows of `n` complex rationals ("2", "-1/3", "1+2i").
    pub lambda: Vec<Vec<String>>,
    /// `"i,j"` → `{x_i, x_j}`.
    pub bracket: BTreeMap<String, JetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

pub fn jet_to_json(f: &Jet) -> JetJson {
    f.terms()
        .iter()
        .map(|(q, c)| TermJson { monomial: q.exps().to_vec(), re: c.re_string(), im: c.im_string() })
        .collect()
}

pub fn jet_from_json(terms: &[TermJson], n: usize, p: usize, order: u32) -> Result<Jet> {
    let mut f = Jet::zero(n, p, order);
    for t in terms {
        if t.monomial.len() != n + p {
            return Err(PnfError::Parse(format!(
                "monomial {:?} has {} exponents, expected {}",
                t.monomial,
                t.monomial.len(),
                n + p
            )));
        }
        f.add_term(MultiIndex::new(t.monomial.clone()), Scalar::from_parts(&t.re, &t.im)?);
    }
    Ok(f)
}

pub fn polyvector_to_json(t: &PolyVector) -> PolyVectorJson {
    PolyVectorJson {
        degree: t.degree(),
        terms: t
            .terms()
            .iter()
            .map(|(idx, f)| PolyTermJson { indices: idx.iter().map(|i| i + 1).collect(), jet: jet_to_json(f) })
            .collect(),
    }
}

pub fn polyvector_from_json(v: &PolyVectorJson, n: usize, p: usize, order: u32) -> Result<PolyVector> {
    let mut out = PolyVector::zero(v.degree, n, p, order);
    for t in &v.terms {
        if t.indices.len() != v.degree || t.indices.iter().any(|&i| i == 0 || i > n + p) {
            return Err(PnfError::Parse(format!("bad index list {:?}", t.indices)));
        }
        out.add_term(t.indices.iter().map(|i| i - 1).collect(), jet_from_json(&t.jet, n, p, order)?);
    }
    Ok(out)
}

pub fn diffeo_to_json(phi: &DiffeoJet) -> DiffeoJson {
    DiffeoJson {
        n: phi.n_phase(),
        p: phi.n_param(),
        order: phi.order(),
        components: phi.components().iter().map(jet_to_json).collect(),
    }
}

pub fn diffeo_from_json(d: &DiffeoJson) -> Result<DiffeoJet> {
    let comps = d.components.iter().map(|c| jet_from_json(c, d.n, d.p, d.order)).collect::<Result<Vec<_>>>()?;
    DiffeoJet::new(comps)
}

fn parse_error(e: serde_json::Error) -> PnfError {
    PnfError::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(parse_error)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Hex SHA-256 of the bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_key(key: &str, n: usize, p: usize) -> Result<(usize, usize)> {
    let bad = || PnfError::Parse(format!("bracket key {key:?} is not \"i,j\" with 1 <= i, j <= {}", n + p));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 || i > n + p || j > n + p || i == j {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: ProblemFile = parse_json(text)?;
        f.linear()?;
        for key in f.bracket.keys() {
            parse_key(key, f.n, f.p)?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// `--order`, then the file's order, then the default.
    pub fn effective_order(&self, order: Option<u32>) -> u32 {
        order.or(self.order).unwrap_or(DEFAULT_ORDER)
    }

    pub fn linear(&self) -> Result<LinearFamily> {
        if self.lambda.len() != self.p || self.lambda.iter().any(|r| r.len() != self.n) {
            return Err(PnfError::Parse(format!("lambda must be {} rows of {} entries", self.p, self.n)));
        }
        let rows = self
            .lambda
            .iter()
            .map(|r| r.iter().map(|v| v.parse::<Scalar>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        LinearFamily::new(rows).map_err(|e| PnfError::Parse(e.to_string()))
    }

    pub fn bivector(&self, order: u32) -> Result<PolyVector> {
        let (n, p) = (self.n, self.p);
        let mut out = PolyVector::zero(2, n, p, order);
        for (key, terms) in &self.bracket {
            let (i, j) = parse_key(key, n, p)?;
            let f = jet_from_json(terms, n, p, order + 1)?.truncate(order);
            out.add_term(vec![i, j], f);
        }
        Ok(out)
    }

    /// Builds the Poisson jet, running the constructor checks.
    pub fn to_poisson(&self, order: Option<u32>) -> Result<PoissonJet> {
        let d = self.effective_order(order);
        PoissonJet::new(self.bivector(d)?, self.linear()?)
    }

    pub fn from_poisson(pj: &PoissonJet, metadata: BTreeMap<String, serde_json::Value>) -> Self {
        let s = pj.linear();
        let mut bracket = BTreeMap::new();
        for (idx, f) in pj.bracket().terms() {
            bracket.insert(format!("{},{}", idx[0] + 1, idx[1] + 1), jet_to_json(f));
        }
        ProblemFile {
            n: pj.n(),
            p: pj.p(),
            lambda: s.rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            bracket,
            order: Some(pj.order()),
            metadata,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "n": 2,
  "p": 1,
  "lambda": [["2", "3"]],
  "bracket": {
    "1,3": [{"monomial": [1, 0, 0], "re": "2", "im": "0"}],
    "2,3": [{"monomial": [0, 1, 0], "re": "3", "im": "0"}]
  },
  "order": 4
}"#;

    #[test]
    fn sample_parses_to_linear_structure() {
        let f = ProblemFile::parse(SAMPLE).unwrap();
        let pj = f.to_poisson(None).unwrap();
        assert_eq!(pj.bracket(), &pj.linear().linear_poisson(4));
        assert_eq!(pj.order(), 4);
        assert_eq!(f.to_poisson(Some(3)).unwrap().order(), 3);
    }

    #[test]
    fn canonical_round_trip() {
        let f = ProblemFile::parse(SAMPLE).unwrap();
        let canon = ProblemFile::from_poisson(&f.to_poisson(None).unwrap(), BTreeMap::new()).to_json();
        let again = ProblemFile::from_poisson(&ProblemFile::parse(&canon).unwrap().to_poisson(None).unwrap(), BTreeMap::new());
        assert_eq!(again.to_json(), canon);
        assert_eq!(ProblemFile::parse(&canon).unwrap().to_json(), canon);
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = ProblemFile::parse("{\n  \"n\": 2,\n  oops }").unwrap_err();
        assert!(matches!(&e, PnfError::Parse(m) if m.starts_with("line 3")));
        let bad_key = SAMPLE.replace("\"1,3\"", "\"1,9\"");
        assert!(matches!(ProblemFile::parse(&bad_key), Err(PnfError::Parse(_))));
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn polyvector_and_diffeo_round_trip() {
        let x = |i| Jet::var(2, 1, 4, i);
        let t = PolyVector::bivector(2, 1, 4, vec![(0, 2, &x(0) * &x(2)), (0, 1, x(1).scale(&"1/2+i".parse().unwrap()))]);
        let j = polyvector_to_json(&t);
        assert_eq!(polyvector_from_json(&j, 2, 1, 4).unwrap(), t);
        let phi = DiffeoJet::new(vec![&x(0) + &x(1).pow(2), x(1), x(2)]).unwrap();
        assert_eq!(diffeo_from_json(&diffeo_to_json(&phi)).unwrap(), phi);
    }
}
