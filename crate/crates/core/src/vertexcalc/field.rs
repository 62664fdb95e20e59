use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::state::{Hw, Mono, State};
use super::Algebra;
use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};

/// One normally ordered word `c :d^{k1}g1 (d^{k2}g2 (... e^mu)):`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTerm {
    pub coeff: Scalar,
    pub word: Vec<(usize, u32)>,
    pub momentum: Option<Vec<Scalar>>,
}

/// Field as a sum of right-nested normally ordered words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldExpr {
    pub terms: Vec<FieldTerm>,
}

/// `[A_lambda B] = sum_n lambda^n / n! (A_(n) B)`, keyed by `n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LambdaPoly(pub BTreeMap<u32, State>);

impl LambdaPoly {
    pub fn get(&self, n: u32) -> State {
        self.0.get(&n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|s| s.is_zero())
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.iter().rev().find(|(_, s)| !s.is_zero()).map(|(n, _)| *n)
    }

    pub fn to_json(&self, alg: &Algebra) -> Result<Value> {
        let mut out = Vec::new();
        for (n, s) in &self.0 {
            if !s.is_zero() {
                out.push(json!({"n": n, "field": state_field(alg, s)?.to_json(alg)}));
            }
        }
        Ok(Value::Array(out))
    }
}

/// Field attached to a vacuum or lattice state.
pub fn state_field(alg: &Algebra, v: &State) -> Result<FieldExpr> {
    let mut terms = Vec::new();
    for (m, c) in v.iter() {
        let momentum = match &m.hw {
            Hw::Vac => None,
            Hw::Mom(mu) => Some(mu.clone()),
            Hw::X { .. } => return Err(Error::NonVacuumModule),
        };
        let mut coeff = c.clone();
        let mut word = Vec::new();
        for &(g, p) in &m.modes {
            let d = (-p - 1) as u32;
            coeff = &coeff / &Scalar::from_q(factorial(d));
            word.push((g as usize, d));
        }
        let _ = alg;
        terms.push(FieldTerm { coeff, word, momentum });
    }
    Ok(FieldExpr { terms })
}

/// State of a field: `:d^{k1}g1 (...): -> prod k_i! g1_(-1-k1) ... |mu>`.
pub fn field_state(alg: &Algebra, a: &FieldExpr) -> Result<State> {
    let e = alg.engine();
    let mut out = State::zero();
    for t in &a.terms {
        let hw = match &t.momentum {
            None => Hw::Vac,
            Some(mu) => Hw::mom(mu.clone()),
        };
        let mut s = State::hw(hw);
        let mut c = t.coeff.clone();
        for &(g, d) in t.word.iter().rev() {
            if g >= alg.n_gens() {
                return Err(Error::UnknownGenerator(format!("#{g}")));
            }
            s = e.apply_gen(g, -1 - d as i32, &s)?;
            c = &c * &Scalar::from_q(factorial(d));
        }
        out.add(&s, &c);
    }
    Ok(out)
}

/// All n-products `A_(n) B`, `n >= 0`.
pub fn bracket(alg: &Algebra, a: &State, b: &State) -> Result<LambdaPoly> {
    let e = alg.engine();
    bracket_with(&e, a, b)
}

pub(crate) fn bracket_with(e: &super::Engine<'_>, a: &State, b: &State) -> Result<LambdaPoly> {
    let mut top = -1i64;
    for (am, _) in a.iter() {
        for (bm, _) in b.iter() {
            top = top.max(e.top_mode(am, bm)?);
        }
    }
    let mut out = BTreeMap::new();
    for n in 0..=top {
        let s = e.apply_field(a, n as i32, b)?;
        if !s.is_zero() {
            out.insert(n as u32, s);
        }
    }
    Ok(LambdaPoly(out))
}

/// `:AB: = A_(-1) B`.
pub fn normal_order(alg: &Algebra, a: &State, b: &State) -> Result<State> {
    alg.engine().apply_field(a, -1, b)
}

/// `dA = T A`.
pub fn derive(alg: &Algebra, a: &State) -> Result<State> {
    alg.engine().translate(a)
}

impl FieldExpr {
    pub fn to_json(&self, alg: &Algebra) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let word: Vec<Value> = t
                    .word
                    .iter()
                    .map(|&(g, d)| json!([alg.gens[g].name, d]))
                    .collect();
                let mut o = json!({"coeff": t.coeff.to_string(), "word": word});
                if let Some(mu) = &t.momentum {
                    o["momentum"] = Value::Array(mu.iter().map(|x| Value::String(x.to_string())).collect());
                }
                o
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(alg: &Algebra, v: &Value) -> Result<FieldExpr> {
        let bad = |s: &str| Error::Parse(s.to_string());
        let arr = v["terms"].as_array().ok_or_else(|| bad("missing terms"))?;
        let mut terms = Vec::new();
        for t in arr {
            let coeff = Scalar::parse(t["coeff"].as_str().ok_or_else(|| bad("coeff"))?).map_err(Error::Parse)?;
            let mut word = Vec::new();
            for w in t["word"].as_array().ok_or_else(|| bad("word"))? {
                let name = w[0].as_str().ok_or_else(|| bad("generator name"))?;
                let d = w[1].as_u64().ok_or_else(|| bad("derivative order"))? as u32;
                word.push((alg.gen_index(name)?, d));
            }
            let momentum = match t.get("momentum") {
                None | Some(Value::Null) => None,
                Some(m) => Some(
                    m.as_array()
                        .ok_or_else(|| bad("momentum"))?
                        .iter()
                        .map(|x| Scalar::parse(x.as_str().unwrap_or("")).map_err(Error::Parse))
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            terms.push(FieldTerm { coeff, word, momentum });
        }
        Ok(FieldExpr { terms })
    }

    /// Human-readable rendering.
    pub fn render(&self, alg: &Algebra) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut w: Vec<String> = t
                    .word
                    .iter()
                    .map(|&(g, d)| match d {
                        0 => alg.gens[g].name.clone(),
                        1 => format!("d{}", alg.gens[g].name),
                        _ => format!("d^{d}{}", alg.gens[g].name),
                    })
                    .collect();
                if let Some(mu) = &t.momentum {
                    let m: Vec<String> = mu.iter().map(|x| x.to_string()).collect();
                    w.push(format!("e^[{}]", m.join(",")));
                }
                let body = if w.is_empty() { "1".to_string() } else { format!(":{}:", w.join(" ")) };
                format!("({})*{}", t.coeff, body)
            })
            .collect();
        parts.join(" + ")
    }
}

impl Mono {
    pub fn render(&self, alg: &Algebra) -> String {
        let mut s: Vec<String> = self
            .modes
            .iter()
            .map(|&(g, p)| format!("{}({})", alg.gens[g as usize].name, p))
            .collect();
        s.push(match &self.hw {
            Hw::Vac => "|0>".into(),
            Hw::X { rep, idx } => format!("|{}:{}>", alg.reps[*rep as usize].name, idx),
            Hw::Mom(mu) => {
                let m: Vec<String> = mu.iter().map(|x| x.to_string()).collect();
                format!("|{}>", m.join(","))
            }
        });
        s.join(" ")
    }
}

impl State {
    pub fn render(&self, alg: &Algebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.iter()
            .map(|(m, c)| format!("({c}) {}", m.render(alg)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
