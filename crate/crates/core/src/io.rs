//! JSON input and output formats.
//!
//! Chains:
//!
//! ```json
//! {"type":"bd","birth":[1,2],"death":[2,1],"killing":[0,0,-1],"N":2}
//! {"type":"qpair","rates":[[0,1],[2,0]],"total":[1,2],"killing":[0,0]}
//! ```
//!
//! Birth, death and killing arrays may be replaced by
//! `{"formula":"poly","coeffs":[c0,c1,...]}` (evaluated at the state index)
//! or `{"formula":"geometric","scale":s,"ratio":r}`. `death[0]` is `a_1`.

use serde::{Deserialize, Serialize};

use crate::chain::{validate_qpair, BirthDeathSpec, QPairSpec, RateSeq, Truncation};
use crate::diffops::{coef, uniform_grid, Boundary, Operator1D, SmoothFunction};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum Formula {
    Poly { coeffs: Vec<f64> },
    Geometric { scale: f64, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateInput {
    Values(Vec<f64>),
    Formula(Formula),
}

impl From<RateInput> for RateSeq {
    fn from(r: RateInput) -> Self {
        match r {
            RateInput::Values(v) => RateSeq::Values(v),
            RateInput::Formula(Formula::Poly { coeffs }) => RateSeq::Poly(coeffs),
            RateInput::Formula(Formula::Geometric { scale, ratio }) => RateSeq::Geometric { scale, ratio },
        }
    }
}

impl TryFrom<&RateSeq> for RateInput {
    type Error = Error;
    fn try_from(r: &RateSeq) -> Result<Self> {
        Ok(match r {
            RateSeq::Values(v) => RateInput::Values(v.clone()),
            RateSeq::Poly(c) => RateInput::Formula(Formula::Poly { coeffs: c.clone() }),
            RateSeq::Geometric { scale, ratio } => {
                RateInput::Formula(Formula::Geometric { scale: *scale, ratio: *ratio })
            }
            RateSeq::Func(_) => {
                return Err(Error::InvalidArgument("closure-defined rates cannot be serialized".into()))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChainInput {
    Bd {
        birth: RateInput,
        death: RateInput,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        killing: Option<RateInput>,
        #[serde(rename = "N")]
        n: usize,
        #[serde(default, skip_serializing_if = "is_reflecting")]
        truncation: Truncation,
    },
    Qpair {
        rates: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        total: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        killing: Option<Vec<f64>>,
    },
}

fn is_reflecting(t: &Truncation) -> bool {
    *t == Truncation::Reflecting
}

/// A parsed chain.
#[derive(Debug, Clone)]
pub enum Chain {
    Bd(BirthDeathSpec),
    QPair(QPairSpec),
}

impl Chain {
    /// The finite q-pair (birth–death chains are truncated at their `N`).
    pub fn qpair(&self) -> Result<QPairSpec> {
        match self {
            Chain::Bd(spec) => crate::chain::bd_to_qpair(spec, spec.truncation),
            Chain::QPair(qp) => Ok(qp.clone()),
        }
    }
}

impl ChainInput {
    pub fn into_chain(self) -> Result<Chain> {
        match self {
            ChainInput::Bd { birth, death, killing, n, truncation } => {
                let mut spec = BirthDeathSpec::new(
                    birth.into(),
                    death.into(),
                    killing.map(RateSeq::from).unwrap_or(RateSeq::Values(vec![])),
                    n,
                );
                spec.policy = truncation;
                crate::chain::bd_to_qpair(&spec, n)?;
                Ok(Chain::Bd(spec))
            }
            ChainInput::Qpair { rates, total, killing } => {
                let n = rates.len();
                let total = total.unwrap_or_else(|| {
                    rates
                        .iter()
                        .enumerate()
                        .map(|(i, r)| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q).sum())
                        .collect()
                });
                let killing = killing.unwrap_or_else(|| vec![0.0; n]);
                Ok(Chain::QPair(validate_qpair(&rates, total, killing)?))
            }
        }
    }

    pub fn from_qpair(qp: &QPairSpec) -> Self {
        ChainInput::Qpair {
            rates: qp.dense_rates(),
            total: Some(qp.totals().to_vec()),
            killing: Some(qp.killing().to_vec()),
        }
    }

    pub fn from_bd(spec: &BirthDeathSpec) -> Result<Self> {
        Ok(ChainInput::Bd {
            birth: (&spec.birth).try_into()?,
            death: (&spec.death).try_into()?,
            killing: Some((&spec.killing).try_into()?),
            n: spec.truncation,
            truncation: spec.policy,
        })
    }
}

pub fn parse_chain(text: &str) -> Result<Chain> {
    let input: ChainInput = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    input.into_chain()
}

/// `{"h":[...], "harmonic_set":[...]}`; a bare array is accepted too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HInput {
    pub h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonic_set: Option<Vec<usize>>,
}

pub fn parse_h(text: &str) -> Result<HInput> {
    if let Ok(h) = serde_json::from_str::<Vec<f64>>(text) {
        return Ok(HInput { h, harmonic_set: None });
    }
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// `{"a":expr,"b":expr,"c":expr,"interval":[lo,hi],"M":int,"bc":["neumann","dirichlet"]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorInput {
    pub a: String,
    pub b: String,
    #[serde(default = "zero_expr")]
    pub c: String,
    pub interval: [f64; 2],
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default)]
    pub bc: [Boundary; 2],
}

fn zero_expr() -> String {
    "0".into()
}

fn expr_coef(s: &str) -> Result<crate::diffops::Coef> {
    let e = Expr::parse(s)?;
    Ok(coef(move |x| e.eval(x)))
}

impl OperatorInput {
    pub fn build(&self) -> Result<Operator1D> {
        if self.m < 2 {
            return Err(Error::InvalidArgument("M must be at least 2".into()));
        }
        let [lo, hi] = self.interval;
        Operator1D::new(
            expr_coef(&self.a)?,
            expr_coef(&self.b)?,
            expr_coef(&self.c)?,
            uniform_grid(lo, hi, self.m),
            self.bc,
        )
    }
}

pub fn parse_operator(text: &str) -> Result<OperatorInput> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A smooth `h` given either directly (`"h"`, optional `"dh"`, `"d2h"`) or
/// through `ψ = log h` (`"psi"`). Missing derivatives are obtained by
/// symbolic differentiation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SmoothInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
}

fn jet_exprs(f: &str, d1: Option<&str>, d2: Option<&str>) -> Result<[Expr; 3]> {
    let e = Expr::parse(f)?;
    let e1 = match d1 {
        Some(s) => Expr::parse(s)?,
        None => e.derivative(),
    };
    let e2 = match d2 {
        Some(s) => Expr::parse(s)?,
        None => e1.derivative(),
    };
    Ok([e, e1, e2])
}

impl SmoothInput {
    pub fn build(&self) -> Result<SmoothFunction> {
        match (&self.h, &self.psi) {
            (Some(h), None) => {
                let [e, e1, e2] = jet_exprs(h, self.dh.as_deref(), self.d2h.as_deref())?;
                Ok(SmoothFunction::new(move |x| (e.eval(x), e1.eval(x), e2.eval(x))))
            }
            (None, Some(psi)) => {
                let [e, e1, e2] = jet_exprs(psi, None, None)?;
                Ok(SmoothFunction::exp_of(move |x| (e.eval(x), e1.eval(x), e2.eval(x))))
            }
            _ => Err(Error::InvalidArgument("give exactly one of \"h\" or \"psi\"".into())),
        }
    }
}

pub fn parse_smooth(text: &str) -> Result<SmoothInput> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
