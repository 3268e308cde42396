//! The frozen structured battery of two-point test triples and the small
//! expression language its data file is written in.

use std::any::{Any, TypeId};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Deserialize;
use thiserror::Error;

use crate::matlin::{parse_complex_literal, parse_rational_str, Functional, Matrix, Scalar};

const BATTERY_JSON: &str = include_str!("../../data/battery.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BatteryError {
    #[error("battery file: {0}")]
    Format(String),
    #[error("template {template}: {message}")]
    Template { template: String, message: String },
}

/// One test of the two-point condition.
#[derive(Clone, Debug)]
pub struct Triple<S: Scalar> {
    pub label: String,
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub phi: Functional<S>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Template {
    pub id: String,
    pub origin: String,
    #[serde(default)]
    pub forall: BTreeMap<String, String>,
    #[serde(default, rename = "where")]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub params: bool,
    pub a: String,
    pub b: String,
    pub phi: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Battery {
    pub version: u32,
    #[serde(default)]
    pub description: String,
    pub parameters: Vec<BTreeMap<String, String>>,
    pub templates: Vec<Template>,
}

/// The battery shipped in `data/battery.json`.
pub fn structured_battery() -> &'static Battery {
    static CELL: OnceLock<Battery> = OnceLock::new();
    CELL.get_or_init(|| Battery::from_json(BATTERY_JSON).expect("shipped battery parses"))
}

type TripleCache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

/// The shipped battery instantiated in `M_n`, built once per backend and `n`.
pub fn structured_triples<S: Scalar>(n: usize) -> Result<Arc<Vec<Triple<S>>>, BatteryError> {
    static CACHE: OnceLock<TripleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (TypeId::of::<S>(), n);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(hit).downcast::<Vec<Triple<S>>>().expect("cache keyed by scalar type"));
    }
    let triples = Arc::new(structured_battery().instantiate::<S>(n)?);
    cache.lock().unwrap().insert(key, triples.clone());
    Ok(triples)
}

impl Battery {
    pub fn from_json(text: &str) -> Result<Self, BatteryError> {
        serde_json::from_str(text).map_err(|e| BatteryError::Format(e.to_string()))
    }

    /// Every triple of the battery that makes sense in `M_n`.
    pub fn instantiate<S: Scalar>(&self, n: usize) -> Result<Vec<Triple<S>>, BatteryError> {
        let params: Vec<BTreeMap<String, S>> = self
            .parameters
            .iter()
            .map(|set| {
                let mut out = BTreeMap::new();
                for (k, v) in set {
                    let value = parse_complex_literal::<S>(v)
                        .map_err(|e| BatteryError::Format(format!("parameter {k} = {v:?}: {e}")))?;
                    out.insert(k.clone(), value);
                }
                if let (Some(t), Some(s)) = (out.get("t").cloned(), out.get("s").cloned()) {
                    out.insert("u".to_string(), t - s);
                }
                Ok(out)
            })
            .collect::<Result<_, BatteryError>>()?;

        let mut triples = Vec::new();
        for template in &self.templates {
            let fail = |message: String| BatteryError::Template { template: template.id.clone(), message };
            let Some(bindings) = enumerate_bindings(template, n).map_err(fail)? else {
                continue;
            };
            let empty = BTreeMap::new();
            let param_sets: Vec<(Option<usize>, &BTreeMap<String, S>)> = if template.params {
                params.iter().enumerate().map(|(k, p)| (Some(k), p)).collect()
            } else {
                vec![(None, &empty)]
            };
            for binding in &bindings {
                for (set, values) in &param_sets {
                    let env = Env { n, vars: binding, params: values };
                    let a = env.matrix(&template.a).map_err(fail)?;
                    let b = env.matrix(&template.b).map_err(fail)?;
                    for phi in &template.phi {
                        let density = env.functional(phi).map_err(fail)?;
                        let mut label = template.id.clone();
                        let mut tags: Vec<String> = binding.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        if let Some(k) = set {
                            tags.push(format!("params#{}", k + 1));
                        }
                        if !tags.is_empty() {
                            label.push_str(&format!("[{}]", tags.join(",")));
                        }
                        label.push_str(&format!(": a = {}, b = {}, phi = {}", template.a, template.b, phi));
                        triples.push(Triple { label, a: a.clone(), b: b.clone(), phi: Functional::new(density) });
                    }
                }
            }
        }
        Ok(triples)
    }
}

fn parse_bound(text: &str, n: usize) -> Result<i64, String> {
    let t = text.trim();
    let n = n as i64;
    match t {
        "n" => Ok(n),
        "n-1" => Ok(n - 1),
        _ => t.parse::<i64>().map_err(|_| format!("bad bound {t:?}")),
    }
}

/// All assignments of the template's index variables, or `None` when some
/// literal index exceeds `n` (the template does not fit in `M_n`).
fn enumerate_bindings(template: &Template, n: usize) -> Result<Option<Vec<BTreeMap<String, i64>>>, String> {
    let max_literal = [&template.a, &template.b]
        .into_iter()
        .chain(&template.phi)
        .flat_map(|e| literal_indices(e))
        .max()
        .unwrap_or(0);
    if max_literal > n as i64 {
        return Ok(None);
    }
    let mut bindings = vec![BTreeMap::new()];
    for (var, range) in &template.forall {
        let (lo, hi) = range.split_once("..").ok_or_else(|| format!("bad range {range:?}"))?;
        let (lo, hi) = (parse_bound(lo, n)?, parse_bound(hi, n)?);
        let mut next = Vec::new();
        for b in &bindings {
            for v in lo..=hi {
                let mut b2: BTreeMap<String, i64> = b.clone();
                b2.insert(var.clone(), v);
                next.push(b2);
            }
        }
        bindings = next;
    }
    let mut kept = Vec::new();
    for b in bindings {
        let mut ok = true;
        for c in &template.constraints {
            ok &= constraint_holds(c, &b, n)?;
        }
        if ok {
            kept.push(b);
        }
    }
    Ok(Some(kept))
}

fn literal_indices(expr: &str) -> Vec<i64> {
    expr.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| w.contains('_'))
        .flat_map(|w| w.split('_').skip(1).filter_map(|i| i.parse::<i64>().ok()).collect::<Vec<_>>())
        .collect()
}

fn constraint_holds(c: &str, vars: &BTreeMap<String, i64>, n: usize) -> Result<bool, String> {
    let value = |t: &str| -> Result<i64, String> {
        let t = t.trim();
        vars.get(t).copied().map_or_else(|| parse_bound(t, n), Ok)
    };
    for op in ["!=", "<=", "<"] {
        if let Some((l, r)) = c.split_once(op) {
            let (l, r) = (value(l)?, value(r)?);
            return Ok(match op {
                "!=" => l != r,
                "<=" => l <= r,
                _ => l < r,
            });
        }
    }
    Err(format!("bad constraint {c:?}"))
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Kind {
    Element,
    Functional,
}

struct Env<'a, S> {
    n: usize,
    vars: &'a BTreeMap<String, i64>,
    params: &'a BTreeMap<String, S>,
}

impl<S: Scalar> Env<'_, S> {
    fn matrix(&self, expr: &str) -> Result<Matrix<S>, String> {
        self.eval(expr, Kind::Element)
    }

    fn functional(&self, expr: &str) -> Result<Matrix<S>, String> {
        self.eval(expr, Kind::Functional)
    }

    /// Sum of signed terms, each a `*`-product of scalar factors and at most one atom.
    fn eval(&self, expr: &str, kind: Kind) -> Result<Matrix<S>, String> {
        let mut total = Matrix::zeros(self.n);
        let mut sign = S::one();
        let mut term = String::new();
        let flush = |term: &mut String, sign: &S, total: &mut Matrix<S>| -> Result<(), String> {
            if term.trim().is_empty() {
                return Ok(());
            }
            let value = self.term(term.trim(), kind)?;
            *total = &*total + &value.scale(sign);
            term.clear();
            Ok(())
        };
        for ch in expr.chars() {
            match ch {
                '+' | '-' => {
                    if term.trim().is_empty() {
                        if ch == '-' {
                            sign = -sign;
                        }
                        continue;
                    }
                    flush(&mut term, &sign, &mut total)?;
                    sign = if ch == '-' { -S::one() } else { S::one() };
                }
                _ => term.push(ch),
            }
        }
        if term.trim().is_empty() {
            return Err(format!("dangling sign in {expr:?}"));
        }
        flush(&mut term, &sign, &mut total)?;
        Ok(total)
    }

    fn term(&self, term: &str, kind: Kind) -> Result<Matrix<S>, String> {
        let mut coeff = S::one();
        let mut atom: Option<Matrix<S>> = None;
        for factor in term.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(format!("empty factor in {term:?}"));
            }
            if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                let q = parse_rational_str(factor).map_err(|e| e.to_string())?;
                coeff = coeff * S::from_rational(&q);
            } else if let Some(v) = self.params.get(factor) {
                coeff = coeff * v.clone();
            } else if let Some(&v) = self.vars.get(factor) {
                coeff = coeff * S::from_i64(v);
            } else {
                if atom.is_some() {
                    return Err(format!("two matrix factors in {term:?}"));
                }
                atom = Some(self.atom(factor, kind)?);
            }
        }
        let atom = atom.ok_or_else(|| format!("term {term:?} has no matrix factor"))?;
        Ok(atom.scale(&coeff))
    }

    fn index(&self, token: &str) -> Result<usize, String> {
        let v = match self.vars.get(token) {
            Some(&v) => v,
            None => parse_bound(token, self.n)?,
        };
        if v < 1 || v > self.n as i64 {
            return Err(format!("index {token} = {v} outside 1..{}", self.n));
        }
        Ok(v as usize - 1)
    }

    fn atom(&self, word: &str, kind: Kind) -> Result<Matrix<S>, String> {
        let n = self.n;
        let mut parts = word.split('_');
        let head = parts.next().unwrap_or_default();
        let idx: Vec<usize> = parts.map(|t| self.index(t)).collect::<Result<_, _>>()?;
        let (atom_kind, m) = match (head, idx.as_slice()) {
            ("one", []) => (Kind::Element, Matrix::identity(n)),
            ("d", []) => (Kind::Element, diag(n, |k| k as i64 + 1)),
            ("dq", []) => (Kind::Element, diag(n, |k| if k + 1 < n { k as i64 + 1 } else { 0 })),
            ("q", []) => (Kind::Element, diag(n, |k| i64::from(k + 1 < n))),
            ("en", []) => (
                Kind::Element,
                (0..n.saturating_sub(1)).fold(Matrix::zeros(n), |acc, k| &acc + &Matrix::unit(n, k, n - 1)),
            ),
            ("p", [j]) => (Kind::Element, Matrix::unit(n, *j, *j)),
            ("e", [i, j]) => (Kind::Element, Matrix::unit(n, *i, *j)),
            ("x", [i, j]) => (Kind::Functional, Functional::rank_one(n, *i, *j).density().clone()),
            ("phi", [i, j]) => (Kind::Functional, Functional::dual_unit(n, *i, *j).density().clone()),
            ("phirow", [i]) => (
                Kind::Functional,
                (0..n).fold(Matrix::zeros(n), |acc, j| &acc + Functional::dual_unit(n, *i, j).density()),
            ),
            _ => return Err(format!("unknown atom {word:?}")),
        };
        if atom_kind != kind {
            return Err(format!("{word:?} is not {}", if kind == Kind::Element { "an element" } else { "a functional" }));
        }
        Ok(m)
    }
}

fn diag<S: Scalar>(n: usize, f: impl Fn(usize) -> i64) -> Matrix<S> {
    Matrix::diagonal(&(0..n).map(|k| S::from_i64(f(k))).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;

    #[test]
    fn shipped_battery_is_versioned_and_parses() {
        let b = structured_battery();
        assert_eq!(b.version, 1);
        for n in 2..=5 {
            let t = b.instantiate::<CQ>(n).unwrap();
            assert!(!t.is_empty());
        }
    }

    #[test]
    fn contains_unit_triple() {
        let t = structured_battery().instantiate::<CQ>(2).unwrap();
        let one = Matrix::identity(2);
        assert!(t.iter().any(|tr| tr.a == one && tr.b == one && tr.phi == Functional::rank_one(2, 0, 0)));
    }

    #[test]
    fn triple_counts_are_pinned() {
        let b = structured_battery();
        let counts: Vec<usize> = (2..=4).map(|n| b.instantiate::<CQ>(n).unwrap().len()).collect();
        assert_eq!(counts, vec![122, 257, 498]);
    }

    #[test]
    fn expression_language() {
        let vars = BTreeMap::from([("k".to_string(), 2)]);
        let params = BTreeMap::from([("t".to_string(), CQ::from_i64(3))]);
        let env = Env { n: 3, vars: &vars, params: &params };
        let m = env.matrix("t*p_1 - e_k_n + 1/2*one").unwrap();
        let mut expect = Matrix::<CQ>::zeros(3);
        expect[(0, 0)] = CQ::from_ratio(7, 2);
        expect[(1, 1)] = CQ::from_ratio(1, 2);
        expect[(2, 2)] = CQ::from_ratio(1, 2);
        expect[(1, 2)] = -CQ::from_i64(1);
        assert_eq!(m, expect);
        assert!(env.matrix("x_1_1").is_err());
        assert!(env.functional("p_1").is_err());
        assert!(env.matrix("p_4").is_err());
        assert_eq!(env.functional("k*x_1_2").unwrap(), Matrix::unit(3, 0, 1).scale(&CQ::from_i64(2)));
    }

    #[test]
    fn m2_templates_are_skipped_below_their_size() {
        let t = structured_battery().instantiate::<CQ>(1).unwrap();
        assert!(t.iter().all(|tr| tr.a.n() == 1));
    }
}
