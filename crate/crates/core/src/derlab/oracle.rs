//! Black-box maps `Δ: M_n → M_n` under test.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};
use thiserror::Error;

use crate::matlin::{matrix_from_json, matrix_to_json, Backend, MatError, Matrix, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no recorded value for input {input}")]
    Missing { input: String },
    #[error("oracle acts on M_{expected}, got an input of size {found}")]
    Dimension { expected: usize, found: usize },
    #[error("input has a nonzero entry at ({row}, {col}) outside the block diagonal")]
    OffBlock { row: usize, col: usize },
    #[error("{0}")]
    Invalid(String),
}

impl From<MatError> for OracleError {
    fn from(e: MatError) -> Self {
        OracleError::Invalid(e.to_string())
    }
}

/// A map on `M_n` that can be queried pointwise.
pub trait Oracle<S: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError>;
    fn describe(&self) -> String;
}

impl<S: Scalar, O: Oracle<S> + ?Sized> Oracle<S> for Arc<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        (**self).eval(x)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<S: Scalar, O: Oracle<S> + ?Sized> Oracle<S> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        (**self).eval(x)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Nonlinear or non-derivation terms added to an inner derivation.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation<S: Scalar> {
    /// `x ↦ trace(x)·e_11`
    TraceLeak,
    /// `x ↦ trace(x²)·e_12`, quadratic
    TraceSquare,
    /// `c·1 ↦ c·e_12` on scalar matrices, zero elsewhere
    ScalarSpike,
    /// `x ↦ x_src · e_dst` (0-based positions)
    EntryLeak { src: (usize, usize), dst: (usize, usize) },
    /// `x ↦ c`
    Constant(Matrix<S>),
}

impl<S: Scalar> Perturbation<S> {
    pub fn apply(&self, x: &Matrix<S>) -> Matrix<S> {
        let n = x.n();
        let at = |i: usize, j: usize, v: S| {
            let mut m = Matrix::zeros(n);
            if i < n && j < n {
                m[(i, j)] = v;
            }
            m
        };
        match self {
            Perturbation::TraceLeak => at(0, 0, x.trace()),
            Perturbation::TraceSquare => at(0, 1, (x * x).trace()),
            Perturbation::ScalarSpike => {
                let c = if n == 0 { S::zero() } else { x[(0, 0)].clone() };
                if *x == Matrix::scalar(n, c.clone()) {
                    at(0, 1, c)
                } else {
                    Matrix::zeros(n)
                }
            }
            Perturbation::EntryLeak { src, dst } => {
                let v = x.get(src.0, src.1).cloned().unwrap_or_else(S::zero);
                at(dst.0, dst.1, v)
            }
            Perturbation::Constant(c) => c.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Perturbation::TraceLeak => "trace_leak".into(),
            Perturbation::TraceSquare => "trace_square".into(),
            Perturbation::ScalarSpike => "scalar_spike".into(),
            Perturbation::EntryLeak { src, dst } => format!(
                "entry_leak({},{} -> {},{})",
                src.0 + 1,
                src.1 + 1,
                dst.0 + 1,
                dst.1 + 1
            ),
            Perturbation::Constant(_) => "constant".into(),
        }
    }
}

/// A finite list of input/output pairs. Unlisted inputs are errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Table<S: Scalar> {
    n: usize,
    entries: Vec<(Matrix<S>, Matrix<S>)>,
    index: HashMap<String, usize>,
}

fn table_key<S: Scalar>(x: &Matrix<S>) -> String {
    matrix_to_json(x).to_string()
}

impl<S: Scalar> Table<S> {
    pub fn new(n: usize, entries: Vec<(Matrix<S>, Matrix<S>)>) -> Result<Self, OracleError> {
        let mut index = HashMap::with_capacity(entries.len());
        for (k, (x, y)) in entries.iter().enumerate() {
            for m in [x, y] {
                if m.n() != n {
                    return Err(OracleError::Dimension { expected: n, found: m.n() });
                }
            }
            let duplicate = index.insert(table_key(x), k).is_some()
                || (S::BACKEND == Backend::Float && entries[..k].iter().any(|(prev, _)| prev.approx_eq(x)));
            if duplicate {
                return Err(OracleError::Invalid(format!("input listed twice: {x}")));
            }
        }
        Ok(Table { n, entries, index })
    }

    pub fn entries(&self) -> &[(Matrix<S>, Matrix<S>)] {
        &self.entries
    }

    /// Exact match first; on the float backend, then the first input within ε.
    pub fn lookup(&self, x: &Matrix<S>) -> Option<&Matrix<S>> {
        if let Some(&k) = self.index.get(&table_key(x)) {
            return Some(&self.entries[k].1);
        }
        if S::BACKEND == Backend::Exact {
            return None;
        }
        self.entries.iter().find(|(input, _)| input.approx_eq(x)).map(|(_, y)| y)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "table",
            "n": self.n,
            "entries": self.entries.iter().map(|(x, y)| json!({
                "input": matrix_to_json(x),
                "output": matrix_to_json(y),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Which orthonormal frame of the range of `p` carries the corner algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum CornerFrame<S: Scalar> {
    /// `p` is diagonal and selects these coordinates.
    Coordinates(Vec<usize>),
    /// Orthonormal columns `v_1 … v_r` spanning the range of `p`.
    Columns(Vec<Vec<S>>),
}

impl<S: Scalar> CornerFrame<S> {
    pub fn rank(&self) -> usize {
        match self {
            CornerFrame::Coordinates(c) => c.len(),
            CornerFrame::Columns(c) => c.len(),
        }
    }

    fn column(&self, n: usize, k: usize) -> Vec<S> {
        match self {
            CornerFrame::Coordinates(c) => (0..n).map(|i| if i == c[k] { S::one() } else { S::zero() }).collect(),
            CornerFrame::Columns(c) => c[k].clone(),
        }
    }

    /// `V y V*`
    pub fn embed(&self, n: usize, y: &Matrix<S>) -> Matrix<S> {
        match self {
            CornerFrame::Coordinates(c) => {
                let mut out = Matrix::zeros(n);
                for (a, &i) in c.iter().enumerate() {
                    for (b, &j) in c.iter().enumerate() {
                        out[(i, j)] = y[(a, b)].clone();
                    }
                }
                out
            }
            CornerFrame::Columns(_) => {
                let cols: Vec<Vec<S>> = (0..self.rank()).map(|k| self.column(n, k)).collect();
                Matrix::from_fn(n, |i, j| {
                    let mut acc = S::zero();
                    for (a, va) in cols.iter().enumerate() {
                        for (b, vb) in cols.iter().enumerate() {
                            acc = acc + va[i].clone() * y[(a, b)].clone() * vb[j].conj();
                        }
                    }
                    acc
                })
            }
        }
    }

    /// `V* x V`
    pub fn compress(&self, x: &Matrix<S>) -> Matrix<S> {
        let n = x.n();
        match self {
            CornerFrame::Coordinates(c) => Matrix::from_fn(c.len(), |a, b| x[(c[a], c[b])].clone()),
            CornerFrame::Columns(_) => {
                let cols: Vec<Vec<S>> = (0..self.rank()).map(|k| self.column(n, k)).collect();
                Matrix::from_fn(self.rank(), |a, b| {
                    let mut acc = S::zero();
                    for i in 0..n {
                        for j in 0..n {
                            acc = acc + cols[a][i].conj() * x[(i, j)].clone() * cols[b][j].clone();
                        }
                    }
                    acc
                })
            }
        }
    }
}

type MapFn<S> = dyn Fn(&Matrix<S>) -> Matrix<S> + Send + Sync;

/// The built-in map families. All are stateless, so batteries may query them
/// from several threads.
#[derive(Clone)]
pub enum MapOracle<S: Scalar> {
    Zero { n: usize },
    /// `x ↦ [z, x]`
    Inner { z: Matrix<S> },
    /// `x ↦ [z, x]` with `z* = −z`
    InnerStar { z: Matrix<S> },
    /// `x ↦ [z, x] + ε·shape(x)`
    Perturbed { z: Matrix<S>, eps: S, shape: Perturbation<S> },
    Table(Table<S>),
    /// Block-diagonal sum acting on `M_{n_1} ⊕ … ⊕ M_{n_k}`.
    Composite { blocks: Vec<MapOracle<S>> },
    /// `x ↦ Δ(x) − [z, x]`
    Shifted { base: Arc<dyn Oracle<S>>, z: Matrix<S> },
    /// `y ↦ V*·Δ(V y V*)·V` on the corner `pM_np`.
    Corner { base: Arc<dyn Oracle<S>>, frame: CornerFrame<S> },
    Custom { n: usize, name: String, f: Arc<MapFn<S>> },
}

impl<S: Scalar> fmt::Debug for MapOracle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl<S: Scalar> MapOracle<S> {
    pub fn inner(z: Matrix<S>) -> Self {
        MapOracle::Inner { z }
    }

    pub fn inner_star(z: Matrix<S>) -> Result<Self, OracleError> {
        if !z.is_skew_hermitian() {
            return Err(OracleError::Invalid("inner_star needs z* = -z".into()));
        }
        Ok(MapOracle::InnerStar { z })
    }

    pub fn perturbed(z: Matrix<S>, eps: S, shape: Perturbation<S>) -> Self {
        MapOracle::Perturbed { z, eps, shape }
    }

    pub fn table(n: usize, entries: Vec<(Matrix<S>, Matrix<S>)>) -> Result<Self, OracleError> {
        Ok(MapOracle::Table(Table::new(n, entries)?))
    }

    pub fn composite(blocks: Vec<MapOracle<S>>) -> Self {
        MapOracle::Composite { blocks }
    }

    pub fn shifted(base: Arc<dyn Oracle<S>>, z: Matrix<S>) -> Self {
        MapOracle::Shifted { base, z }
    }

    pub fn custom(
        n: usize,
        name: impl Into<String>,
        f: impl Fn(&Matrix<S>) -> Matrix<S> + Send + Sync + 'static,
    ) -> Self {
        MapOracle::Custom { n, name: name.into(), f: Arc::new(f) }
    }

    /// Tabulate `base` on the given inputs.
    pub fn tabulate(base: &dyn Oracle<S>, inputs: &[Matrix<S>]) -> Result<Self, OracleError> {
        let mut entries: Vec<(Matrix<S>, Matrix<S>)> = Vec::new();
        for x in inputs {
            if entries.iter().any(|(prev, _)| prev.approx_eq(x)) {
                continue;
            }
            entries.push((x.clone(), base.eval(x)?));
        }
        MapOracle::table(base.dim(), entries)
    }

    pub fn block_dims(&self) -> Option<Vec<usize>> {
        match self {
            MapOracle::Composite { blocks } => Some(blocks.iter().map(|b| b.dim()).collect()),
            _ => None,
        }
    }

    /// Parse the JSON oracle format: `{"kind": "inner", "z": M}`,
    /// `{"kind": "inner_star", "z": M}`, `{"kind": "perturbed", "z": M, "eps": s, "shape": …}`,
    /// `{"kind": "table", "n": n, "entries": [{"input": M, "output": M}, …]}`,
    /// `{"kind": "composite", "blocks": [oracle, …]}` or `{"kind": "zero", "n": n}`.
    pub fn from_json(value: &Value) -> Result<Self, OracleError> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| OracleError::Invalid("oracle needs a string field \"kind\"".into()))?;
        let matrix = |key: &str| -> Result<Matrix<S>, OracleError> {
            let v = value
                .get(key)
                .ok_or_else(|| OracleError::Invalid(format!("{kind} oracle needs field \"{key}\"")))?;
            Ok(matrix_from_json(v)?)
        };
        match kind {
            "zero" => {
                let n = value
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| OracleError::Invalid("zero oracle needs \"n\"".into()))?;
                Ok(MapOracle::Zero { n: n as usize })
            }
            "inner" => Ok(MapOracle::inner(matrix("z")?)),
            "inner_star" => MapOracle::inner_star(matrix("z")?),
            "perturbed" => {
                let z = matrix("z")?;
                let eps = match value.get("eps") {
                    Some(v) => S::from_json(v)?,
                    None => S::one(),
                };
                let shape = parse_shape(value.get("shape"), z.n())?;
                Ok(MapOracle::perturbed(z, eps, shape))
            }
            "table" => {
                let n = value
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| OracleError::Invalid("table oracle needs \"n\"".into()))?
                    as usize;
                let entries = value
                    .get("entries")
                    .and_then(Value::as_array)
                    .ok_or_else(|| OracleError::Invalid("table oracle needs \"entries\"".into()))?
                    .iter()
                    .map(|e| {
                        let input = e.get("input").ok_or_else(|| OracleError::Invalid("entry without input".into()))?;
                        let output = e.get("output").ok_or_else(|| OracleError::Invalid("entry without output".into()))?;
                        Ok((matrix_from_json(input)?, matrix_from_json(output)?))
                    })
                    .collect::<Result<Vec<_>, OracleError>>()?;
                MapOracle::table(n, entries)
            }
            "composite" => {
                let blocks = value
                    .get("blocks")
                    .and_then(Value::as_array)
                    .ok_or_else(|| OracleError::Invalid("composite oracle needs \"blocks\"".into()))?
                    .iter()
                    .map(MapOracle::from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(MapOracle::composite(blocks))
            }
            other => Err(OracleError::Invalid(format!("unknown oracle kind {other:?}"))),
        }
    }

    /// Serializable form, when the oracle has one.
    pub fn to_json(&self) -> Option<Value> {
        match self {
            MapOracle::Zero { n } => Some(json!({"kind": "zero", "n": n})),
            MapOracle::Inner { z } => Some(json!({"kind": "inner", "z": matrix_to_json(z)})),
            MapOracle::InnerStar { z } => Some(json!({"kind": "inner_star", "z": matrix_to_json(z)})),
            MapOracle::Perturbed { z, eps, shape } => {
                let shape = match shape {
                    Perturbation::EntryLeak { src, dst } => {
                        json!({"entry_leak": {"src": [src.0 + 1, src.1 + 1], "dst": [dst.0 + 1, dst.1 + 1]}})
                    }
                    Perturbation::Constant(c) => json!({"constant": matrix_to_json(c)}),
                    other => json!(other.name()),
                };
                Some(json!({"kind": "perturbed", "z": matrix_to_json(z), "eps": eps.to_json(), "shape": shape}))
            }
            MapOracle::Table(t) => Some(t.to_json()),
            MapOracle::Composite { blocks } => {
                let blocks: Option<Vec<Value>> = blocks.iter().map(|b| b.to_json()).collect();
                blocks.map(|b| json!({"kind": "composite", "blocks": b}))
            }
            _ => None,
        }
    }
}

fn parse_shape<S: Scalar>(value: Option<&Value>, n: usize) -> Result<Perturbation<S>, OracleError> {
    let bad = || OracleError::Invalid("unknown perturbation shape".into());
    match value {
        None => Ok(Perturbation::TraceLeak),
        Some(Value::String(s)) => match s.as_str() {
            "trace_leak" => Ok(Perturbation::TraceLeak),
            "trace_square" => Ok(Perturbation::TraceSquare),
            "scalar_spike" => Ok(Perturbation::ScalarSpike),
            _ => Err(bad()),
        },
        Some(Value::Object(map)) => {
            if let Some(leak) = map.get("entry_leak") {
                let pos = |key: &str| -> Result<(usize, usize), OracleError> {
                    let arr = leak.get(key).and_then(Value::as_array).ok_or_else(bad)?;
                    let get = |k: usize| arr.get(k).and_then(Value::as_u64).filter(|&v| v >= 1 && v as usize <= n);
                    match (get(0), get(1)) {
                        (Some(i), Some(j)) => Ok((i as usize - 1, j as usize - 1)),
                        _ => Err(OracleError::Invalid(format!("entry_leak {key} must be a 1-based position in M_{n}"))),
                    }
                };
                Ok(Perturbation::EntryLeak { src: pos("src")?, dst: pos("dst")? })
            } else if let Some(c) = map.get("constant") {
                Ok(Perturbation::Constant(matrix_from_json(c)?))
            } else {
                Err(bad())
            }
        }
        Some(_) => Err(bad()),
    }
}

fn check_dim<S: Scalar>(n: usize, x: &Matrix<S>) -> Result<(), OracleError> {
    if x.n() == n {
        Ok(())
    } else {
        Err(OracleError::Dimension { expected: n, found: x.n() })
    }
}

impl<S: Scalar> Oracle<S> for MapOracle<S> {
    fn dim(&self) -> usize {
        match self {
            MapOracle::Zero { n } | MapOracle::Custom { n, .. } => *n,
            MapOracle::Inner { z } | MapOracle::InnerStar { z } | MapOracle::Perturbed { z, .. } => z.n(),
            MapOracle::Table(t) => t.n,
            MapOracle::Composite { blocks } => blocks.iter().map(|b| b.dim()).sum(),
            MapOracle::Shifted { base, .. } => base.dim(),
            MapOracle::Corner { frame, .. } => frame.rank(),
        }
    }

    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        check_dim(self.dim(), x)?;
        match self {
            MapOracle::Zero { n } => Ok(Matrix::zeros(*n)),
            MapOracle::Inner { z } | MapOracle::InnerStar { z } => Ok(z.commutator(x)?),
            MapOracle::Perturbed { z, eps, shape } => Ok(&z.commutator(x)? + &shape.apply(x).scale(eps)),
            MapOracle::Table(t) => t.lookup(x).cloned().ok_or_else(|| OracleError::Missing { input: x.to_string() }),
            MapOracle::Composite { blocks } => {
                let n = x.n();
                let mut owner = Vec::with_capacity(n);
                for (k, b) in blocks.iter().enumerate() {
                    owner.extend(std::iter::repeat_n(k, b.dim()));
                }
                for i in 0..n {
                    for j in 0..n {
                        if owner[i] != owner[j] && x[(i, j)] != S::zero() {
                            return Err(OracleError::OffBlock { row: i + 1, col: j + 1 });
                        }
                    }
                }
                let mut offset = 0;
                let mut images = Vec::with_capacity(blocks.len());
                for b in blocks {
                    images.push(b.eval(&x.principal_block(offset, b.dim()))?);
                    offset += b.dim();
                }
                Ok(Matrix::direct_sum(&images))
            }
            MapOracle::Shifted { base, z } => Ok(&base.eval(x)? - &z.commutator(x)?),
            MapOracle::Corner { base, frame } => {
                let n = base.dim();
                let image = base.eval(&frame.embed(n, x))?;
                Ok(frame.compress(&image))
            }
            MapOracle::Custom { f, .. } => Ok(f(x)),
        }
    }

    fn describe(&self) -> String {
        match self {
            MapOracle::Zero { n } => format!("zero map on M_{n}"),
            MapOracle::Inner { z } => format!("inner derivation [z,.] with z = {z}"),
            MapOracle::InnerStar { z } => format!("inner *-derivation [z,.] with z = {z}"),
            MapOracle::Perturbed { z, shape, .. } => {
                format!("inner derivation with z = {z} perturbed by {}", shape.name())
            }
            MapOracle::Table(t) => format!("table of {} values on M_{}", t.entries.len(), t.n),
            MapOracle::Composite { blocks } => {
                let dims: Vec<String> = blocks.iter().map(|b| b.dim().to_string()).collect();
                format!("block map on M_{{{}}}", dims.join(","))
            }
            MapOracle::Shifted { base, z } => format!("({}) - [z,.] with z = {z}", base.describe()),
            MapOracle::Corner { base, frame } => {
                format!("corner of rank {} of ({})", frame.rank(), base.describe())
            }
            MapOracle::Custom { name, .. } => name.clone(),
        }
    }
}

/// Wraps an oracle and keeps every input it was asked about, in order.
pub struct RecordingOracle<S, O> {
    inner: O,
    inputs: Mutex<Vec<Matrix<S>>>,
}

impl<S: Scalar, O: Oracle<S>> RecordingOracle<S, O> {
    pub fn new(inner: O) -> Self {
        RecordingOracle { inner, inputs: Mutex::new(Vec::new()) }
    }

    pub fn queries(&self) -> usize {
        self.inputs.lock().unwrap().len()
    }

    /// Distinct inputs seen so far, in first-seen order.
    pub fn inputs(&self) -> Vec<Matrix<S>> {
        let mut seen = std::collections::HashSet::new();
        let mut out: Vec<Matrix<S>> = Vec::new();
        for m in self.inputs.lock().unwrap().iter() {
            if seen.insert(table_key(m)) {
                out.push(m.clone());
            }
        }
        out
    }
}

impl<S: Scalar, O: Oracle<S>> Oracle<S> for RecordingOracle<S, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        self.inputs.lock().unwrap().push(x.clone());
        self.inner.eval(x)
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;

    fn q(re: i64, im: i64) -> CQ {
        CQ::new(CQ::from_i64(re).re, CQ::from_i64(im).re)
    }

    fn z2() -> Matrix<CQ> {
        Matrix::from_rows(vec![vec![q(0, 1), q(1, 0)], vec![q(-1, 0), q(0, 2)]]).unwrap()
    }

    #[test]
    fn inner_is_the_commutator() {
        let o = MapOracle::inner(z2());
        let x = Matrix::unit(2, 0, 1);
        assert_eq!(o.eval(&x).unwrap(), z2().commutator(&x).unwrap());
    }

    #[test]
    fn inner_star_validates_skewness() {
        let w = &z2() + &Matrix::identity(2);
        assert!(MapOracle::inner_star(w.clone()).is_err());
        let z = (&w - &w.adjoint()).scale(&CQ::from_ratio(1, 2));
        assert!(MapOracle::inner_star(z).is_ok());
    }

    #[test]
    fn table_never_extrapolates() {
        let x = Matrix::<CQ>::unit(2, 0, 0);
        let t = MapOracle::table(2, vec![(x.clone(), Matrix::unit(2, 0, 1))]).unwrap();
        assert_eq!(t.eval(&x).unwrap(), Matrix::unit(2, 0, 1));
        let err = t.eval(&Matrix::unit(2, 1, 1)).unwrap_err();
        assert!(matches!(err, OracleError::Missing { .. }));
        assert!(MapOracle::table(2, vec![(x.clone(), x.clone()), (x.clone(), x)]).is_err());
    }

    #[test]
    fn composite_rejects_off_block_inputs() {
        let o = MapOracle::composite(vec![MapOracle::Zero { n: 1 }, MapOracle::inner(z2())]);
        assert_eq!(o.dim(), 3);
        let err = o.eval(&Matrix::<CQ>::unit(3, 0, 2)).unwrap_err();
        assert_eq!(err, OracleError::OffBlock { row: 1, col: 3 });
        let y = o.eval(&Matrix::unit(3, 1, 2)).unwrap();
        assert_eq!(y.principal_block(1, 2), z2().commutator(&Matrix::unit(2, 0, 1)).unwrap());
    }

    #[test]
    fn perturbation_shapes() {
        let x = Matrix::<CQ>::identity(2);
        assert_eq!(Perturbation::TraceLeak.apply(&x), Matrix::unit(2, 0, 0).scale(&q(2, 0)));
        assert_eq!(Perturbation::ScalarSpike.apply(&x), Matrix::unit(2, 0, 1));
        assert!(Perturbation::<CQ>::ScalarSpike.apply(&Matrix::unit(2, 0, 0)).is_zero());
        assert_eq!(Perturbation::TraceSquare.apply(&x.scale(&q(3, 0))), Matrix::unit(2, 0, 1).scale(&q(18, 0)));
    }

    #[test]
    fn json_round_trip() {
        let o = MapOracle::perturbed(z2(), CQ::from_ratio(1, 2), Perturbation::EntryLeak { src: (0, 1), dst: (1, 0) });
        let back = MapOracle::<CQ>::from_json(&o.to_json().unwrap()).unwrap();
        let x = Matrix::from_fn(2, |i, j| q(i as i64 + 1, j as i64));
        assert_eq!(o.eval(&x).unwrap(), back.eval(&x).unwrap());
    }

    #[test]
    fn recording_keeps_inputs() {
        let rec = RecordingOracle::new(MapOracle::inner(z2()));
        let x = Matrix::<CQ>::unit(2, 1, 0);
        rec.eval(&x).unwrap();
        rec.eval(&x).unwrap();
        assert_eq!(rec.queries(), 2);
        assert_eq!(rec.inputs(), vec![x]);
    }
}
