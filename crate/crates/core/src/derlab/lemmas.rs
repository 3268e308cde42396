//! Necessary conditions every weak-2-local derivation satisfies, evaluated
//! pointwise on a sample set.

use rand::Rng;

use super::oracle::{Oracle, OracleError};
use crate::matlin::random::{
    random_hermitian, random_matrix, random_orthogonal_family, random_projection,
};
use crate::matlin::{format_scalar, projection_spanning_basis, spanning_basis_label, Matrix, Projection, Scalar};
use crate::report::{CertReport, CheckBuilder, CheckOutcome, Citation};

/// Mutually orthogonal projections with coefficients, for `Σ λ_j p_j`.
#[derive(Clone, Debug)]
pub struct Family<S: Scalar> {
    pub label: String,
    pub parts: Vec<Projection<S>>,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Family<S> {
    pub fn combination(&self, range: std::ops::Range<usize>) -> Matrix<S> {
        let n = self.parts[0].n();
        self.parts[range.clone()]
            .iter()
            .zip(&self.coeffs[range])
            .fold(Matrix::zeros(n), |acc, (p, l)| &acc + &p.scale(l))
    }
}

/// Orthogonal `p`, `q`, an element `a` with `pa = ap = qa = aq = 0`, any `b`, and scalars.
#[derive(Clone, Debug)]
pub struct AlmostOrthogonal<S: Scalar> {
    pub label: String,
    pub p: Projection<S>,
    pub q: Projection<S>,
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub lambda: S,
    pub mu: S,
}

/// Inputs at which the lemma identities are evaluated.
#[derive(Clone, Debug)]
pub struct SampleSet<S: Scalar> {
    pub points: Vec<(String, Matrix<S>)>,
    pub hermitians: Vec<(String, Matrix<S>)>,
    pub projections: Vec<(String, Projection<S>)>,
    pub scalars: Vec<S>,
    pub families: Vec<Family<S>>,
    pub almost_orthogonal: Vec<AlmostOrthogonal<S>>,
}

impl<S: Scalar> Default for SampleSet<S> {
    fn default() -> Self {
        SampleSet {
            points: Vec::new(),
            hermitians: Vec::new(),
            projections: Vec::new(),
            scalars: Vec::new(),
            families: Vec::new(),
            almost_orthogonal: Vec::new(),
        }
    }
}

fn q_int<S: Scalar>(re: i64, im: i64) -> S {
    S::from_parts(S::from_i64(re), S::from_i64(im))
}

impl<S: Scalar> SampleSet<S> {
    /// Projections `p_j`, matrix units, self-adjoint units, a diagonal `d`
    /// and a fixed generic matrix `g`, all with integer entries.
    pub fn structured(n: usize) -> Self {
        let mut s = SampleSet::default();
        if n == 0 {
            return s;
        }
        let one = Matrix::<S>::identity(n);
        let d = Matrix::diagonal(&(1..=n as i64).map(S::from_i64).collect::<Vec<_>>());
        let g = Matrix::from_fn(n, |i, j| q_int(i as i64 + 2 * j as i64 + 1, j as i64 - i as i64));
        let p = |j: usize| Projection::<S>::coordinate(n, &[j]);

        s.points.push(("1".into(), one.clone()));
        s.points.push(("d".into(), d.clone()));
        s.points.push(("g".into(), g.clone()));
        for j in 0..n {
            s.points.push((format!("p_{}", j + 1), p(j).matrix().clone()));
        }
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    s.points.push((format!("e_{}_{}", k + 1, l + 1), Matrix::unit(n, k, l)));
                }
            }
        }
        if n >= 2 {
            s.points.push(("d + e_1_n".into(), &d + &Matrix::unit(n, 0, n - 1)));
        }

        s.hermitians.push(("1".into(), one.clone()));
        s.hermitians.push(("d".into(), d.clone()));
        s.hermitians.push(("g + g*".into(), &g + &g.adjoint()));
        for k in 0..n {
            for l in (k + 1)..n {
                let sym = &Matrix::unit(n, k, l) + &Matrix::unit(n, l, k);
                let asym = (&Matrix::unit(n, k, l) - &Matrix::unit(n, l, k)).scale(&S::i());
                s.hermitians.push((format!("e_{0}_{1} + e_{1}_{0}", k + 1, l + 1), sym));
                s.hermitians.push((format!("i(e_{0}_{1} - e_{1}_{0})", k + 1, l + 1), asym));
            }
        }

        for (k, b) in projection_spanning_basis::<S>(n).into_iter().enumerate() {
            s.projections.push((spanning_basis_label(n, k), b));
        }
        for j in 0..n {
            s.projections.push((format!("1 - p_{}", j + 1), p(j).complement()));
        }
        if n >= 3 {
            s.projections.push(("p_1 + p_2".into(), Projection::coordinate(n, &[0, 1])));
        }

        s.scalars = vec![q_int(2, 0), S::i(), S::from_parts(S::from_ratio(1, 2), -S::one()), q_int(-3, 0)];

        s.families.push(Family {
            label: "p_1..p_n".into(),
            parts: (0..n).map(p).collect(),
            coeffs: (0..n).map(|j| q_int(j as i64 + 1, n as i64 - j as i64)).collect(),
        });
        for i in 0..n {
            for j in (i + 1)..n {
                s.families.push(Family {
                    label: format!("p_{}, p_{}", i + 1, j + 1),
                    parts: vec![p(i), p(j)],
                    coeffs: vec![S::one(), S::i()],
                });
            }
        }
        for (label, b) in s.projections.clone() {
            if b.is_zero() || b.complement().is_zero() {
                continue;
            }
            s.families.push(Family {
                label: format!("{label}, its complement"),
                coeffs: vec![q_int(2, 0), q_int(-1, 1)],
                parts: vec![b.clone(), b.complement()],
            });
        }

        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
                let a = match (rest.first(), rest.last()) {
                    (Some(&k), Some(&l)) => &Matrix::unit(n, k, l) + &Matrix::unit(n, l, l).scale(&S::i()),
                    _ => Matrix::zeros(n),
                };
                s.almost_orthogonal.push(AlmostOrthogonal {
                    label: format!("p = p_{}, q = p_{}", i + 1, j + 1),
                    p: p(i),
                    q: p(j),
                    a,
                    b: g.clone(),
                    lambda: q_int(2, -1),
                    mu: q_int(-1, 3),
                });
            }
        }
        s
    }

    /// `count` random instances of every kind.
    pub fn random<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Self {
        let mut s = SampleSet::default();
        if n == 0 {
            return s;
        }
        for _ in 0..count {
            let x = random_matrix::<S, _>(n, rng);
            s.points.push((format!("x = {x}"), x));
            let h = random_hermitian::<S, _>(n, rng);
            s.hermitians.push((format!("h = {h}"), h));
            let p = random_projection::<S, _>(n, rng);
            s.projections.push((format!("p = {}", p.matrix()), p));
            s.scalars.push(S::sample(rng));

            let parts = rng.random_range(1..=n);
            let fam = random_orthogonal_family::<S, _>(n, parts, rng);
            let coeffs: Vec<S> = (0..parts).map(|_| S::sample(rng)).collect();
            let label = fam.iter().map(|p| p.matrix().to_string()).collect::<Vec<_>>().join(", ");
            s.families.push(Family { label: format!("family {label}"), parts: fam, coeffs });

            if n >= 2 {
                let pq = random_orthogonal_family::<S, _>(n, 2, rng);
                let (p, q) = (pq[0].clone(), pq[1].clone());
                let r = &(&Matrix::identity(n) - p.matrix()) - q.matrix();
                let a = &(&r * &random_matrix::<S, _>(n, rng)) * &r;
                let b = random_matrix::<S, _>(n, rng);
                s.almost_orthogonal.push(AlmostOrthogonal {
                    label: format!("p = {}, q = {}, a = {a}, b = {b}", p.matrix(), q.matrix()),
                    p,
                    q,
                    a,
                    b,
                    lambda: S::sample(rng),
                    mu: S::sample(rng),
                });
            }
        }
        s
    }

    pub fn extend(&mut self, other: SampleSet<S>) {
        self.points.extend(other.points);
        self.hermitians.extend(other.hermitians);
        self.projections.extend(other.projections);
        self.scalars.extend(other.scalars);
        self.families.extend(other.families);
        self.almost_orthogonal.extend(other.almost_orthogonal);
    }
}

/// Residual matrices of one instance, with the magnitude of the terms they came from.
struct Residuals<S> {
    parts: Vec<Matrix<S>>,
    scale: f64,
}

impl<S: Scalar> Residuals<S> {
    fn new(parts: Vec<Matrix<S>>, terms: &[&Matrix<S>]) -> Self {
        let scale = terms.iter().map(|t| t.max_abs()).fold(0.0, f64::max);
        Residuals { parts, scale }
    }
}

struct Check<'o, S, O: ?Sized> {
    oracle: &'o O,
    builder: CheckBuilder,
    outside: usize,
    _s: std::marker::PhantomData<S>,
}

impl<'o, S: Scalar, O: Oracle<S> + ?Sized> Check<'o, S, O> {
    fn new(oracle: &'o O, name: &str, citation: Citation) -> Self {
        Check { oracle, builder: CheckBuilder::new(name, citation), outside: 0, _s: std::marker::PhantomData }
    }

    fn eval(&self, x: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        self.oracle.eval(x)
    }

    fn instance(&mut self, label: impl Fn() -> String, f: impl FnOnce(&Self) -> Result<Residuals<S>, OracleError>) {
        match f(self) {
            Ok(r) => {
                let passed = r.parts.iter().all(|m| m.is_negligible(r.scale));
                let residual = r.parts.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
                self.builder.record(passed, residual, &label);
            }
            Err(OracleError::OffBlock { .. }) => self.outside += 1,
            Err(e) => self.builder.inconclusive(|| format!("{}: {e}", label())),
        }
    }

    fn finish(mut self) -> CheckOutcome {
        if self.outside > 0 {
            self.builder
                .note(format!("{} instances lie outside the oracle's block domain and were not evaluated", self.outside));
        }
        self.builder.finish()
    }
}

fn scalar_matrix<S: Scalar>(x: S) -> Matrix<S> {
    Matrix::scalar(1, x)
}

/// Evaluate every lemma identity on `samples`.
///
/// With `star` the `*`-derivation identities (cartesian linearity, `Δ♯ = Δ`) are
/// required. Without it, the self-adjointness implication is only tested when the
/// map is `♯`-symmetric on the samples, and that outcome is reported as its own
/// verdict rather than as evidence of a weak-2-local `*`-derivation.
pub fn lemma_suite<S: Scalar, O: Oracle<S> + ?Sized>(oracle: &O, samples: &SampleSet<S>, star: bool) -> CertReport {
    let n = oracle.dim();
    let one = Matrix::<S>::identity(n);
    let mut checks = Vec::new();

    let mut c = Check::new(oracle, "unit", Citation::UnitVanishes);
    c.instance(|| "x = 1".into(), |c| {
        let y = c.eval(&one)?;
        Ok(Residuals::new(vec![y.clone()], &[&y]))
    });
    checks.push(c.finish());

    let mut c = Check::new(oracle, "complement", Citation::ComplementRule);
    for (label, x) in &samples.points {
        c.instance(|| label.clone(), |c| {
            let (u, v) = (c.eval(&(&one - x))?, c.eval(x)?);
            Ok(Residuals::new(vec![&u + &v], &[&u, &v]))
        });
    }
    checks.push(c.finish());

    let mut c = Check::new(oracle, "corners", Citation::CornerVanishing);
    for (label, p) in &samples.projections {
        c.instance(|| label.clone(), |c| {
            let y = c.eval(p.matrix())?;
            let r = p.complement();
            let inner = &(p.matrix() * &y) * p.matrix();
            let outer = &(r.matrix() * &y) * r.matrix();
            Ok(Residuals::new(vec![inner, outer], &[&y]))
        });
    }
    checks.push(c.finish());

    let mut c = Check::new(oracle, "trace", Citation::TraceVanishes);
    let trace_inputs = samples
        .points
        .iter()
        .chain(&samples.hermitians)
        .map(|(l, x)| (l.clone(), x.clone()))
        .chain(samples.projections.iter().map(|(l, p)| (l.clone(), p.matrix().clone())));
    for (label, x) in trace_inputs {
        c.instance(|| label.clone(), |c| {
            let y = c.eval(&x)?;
            Ok(Residuals::new(vec![scalar_matrix(y.trace())], &[&y]))
        });
    }
    checks.push(c.finish());

    let mut c = Check::new(oracle, "homogeneity", Citation::Homogeneity);
    for (label, x) in &samples.points {
        for lambda in &samples.scalars {
            c.instance(|| format!("{label}, λ = {}", format_scalar(lambda)), |c| {
                let lhs = c.eval(&x.scale(lambda))?;
                let rhs = c.eval(x)?.scale(lambda);
                Ok(Residuals::new(vec![&lhs - &rhs], &[&lhs, &rhs]))
            });
        }
    }
    checks.push(c.finish());

    checks.push(sharp_check(oracle, samples, star));

    if star {
        let mut c = Check::new(oracle, "cartesian", Citation::Cartesian);
        let self_adjoint: Vec<(String, Matrix<S>)> = samples
            .hermitians
            .iter()
            .cloned()
            .chain(samples.projections.iter().map(|(l, p)| (l.clone(), p.matrix().clone())))
            .collect();
        for pair in self_adjoint.windows(2) {
            let ((la, a), (lb, b)) = (&pair[0], &pair[1]);
            c.instance(|| format!("a = {la}, b = {lb}"), |c| {
                let ib = b.scale(&S::i());
                let whole = c.eval(&(a + &ib))?;
                let split = &c.eval(a)? + &c.eval(b)?.scale(&S::i());
                let mirrored = c.eval(&(a - &ib))?.adjoint();
                Ok(Residuals::new(vec![&whole - &split, &whole - &mirrored], &[&whole, &split, &mirrored]))
            });
        }
        checks.push(c.finish());
    } else {
        checks.push(CheckBuilder::skipped(
            "cartesian",
            Citation::Cartesian,
            "applies to weak-2-local *-derivations; run in star mode",
        ));
    }

    let mut c = Check::new(oracle, "orthogonal_additivity", Citation::OrthogonalAdditivity);
    for fam in &samples.families {
        c.instance(|| fam.label.clone(), |c| {
            let whole = c.eval(&fam.combination(0..fam.parts.len()))?;
            let mut sum = Matrix::zeros(n);
            for (p, l) in fam.parts.iter().zip(&fam.coeffs) {
                sum = &sum + &c.eval(p.matrix())?.scale(l);
            }
            Ok(Residuals::new(vec![&whole - &sum], &[&whole, &sum]))
        });
    }
    checks.push(c.finish());

    let mut c = Check::new(oracle, "orthogonal_sum_additivity", Citation::OrthogonalSumAdditivity);
    for fam in samples.families.iter().filter(|f| f.parts.len() >= 2) {
        let k = fam.parts.len() / 2;
        c.instance(|| format!("{} split after {k}", fam.label), |c| {
            let a = fam.combination(0..k);
            let b = fam.combination(k..fam.parts.len());
            let whole = c.eval(&(&a + &b))?;
            let (da, db) = (c.eval(&a)?, c.eval(&b)?);
            Ok(Residuals::new(vec![&(&whole - &da) - &db], &[&whole, &da, &db]))
        });
    }
    checks.push(c.finish());

    let mut c = Check::new(oracle, "almost_orthogonality", Citation::AlmostOrthogonality);
    for t in &samples.almost_orthogonal {
        c.instance(
            || format!("{}, λ = {}, μ = {}", t.label, format_scalar(&t.lambda), format_scalar(&t.mu)),
            |c| {
                let (p, q) = (t.p.matrix(), t.q.matrix());
                let lp = p.scale(&t.lambda);
                let lp_mq = &lp + &q.scale(&t.mu);
                let sandwich = |l: &Matrix<S>, y: &Matrix<S>, r: &Matrix<S>| &(l * y) * r;
                let d1 = c.eval(&(&t.a + &lp_mq))?;
                let d2 = c.eval(&lp_mq)?;
                let d3 = c.eval(&(&t.a + &lp))?;
                let d4 = c.eval(&(&t.b + &lp))?;
                let d5 = c.eval(&t.b)?;
                let qbq = sandwich(q, &t.b, q);
                let d6 = c.eval(&(&qbq + &q.scale(&t.lambda)))?;
                let d7 = c.eval(&qbq)?;
                let parts = vec![
                    &sandwich(p, &d1, q) - &sandwich(p, &d2, q),
                    sandwich(p, &d3, p),
                    &sandwich(q, &d4, q) - &sandwich(q, &d5, q),
                    &sandwich(q, &d6, q) - &sandwich(q, &d7, q),
                ];
                Ok(Residuals::new(parts, &[&d1, &d2, &d3, &d4, &d5, &d6, &d7]))
            },
        );
    }
    checks.push(c.finish());

    CertReport::new(checks)
}

fn sharp_check<S: Scalar, O: Oracle<S> + ?Sized>(oracle: &O, samples: &SampleSet<S>, star: bool) -> CheckOutcome {
    let symmetric = |c: &mut Check<'_, S, O>| {
        for (label, x) in &samples.points {
            c.instance(|| format!("Δ♯ = Δ at {label}"), |c| {
                let y = c.eval(x)?;
                let ys = c.eval(&x.adjoint())?.adjoint();
                Ok(Residuals::new(vec![&y - &ys], &[&y, &ys]))
            });
        }
    };
    let self_adjoint = |c: &mut Check<'_, S, O>| {
        let hermitian_inputs = samples
            .hermitians
            .iter()
            .cloned()
            .chain(samples.projections.iter().map(|(l, p)| (l.clone(), p.matrix().clone())));
        for (label, h) in hermitian_inputs {
            c.instance(|| format!("Δ(h) self-adjoint at {label}"), |c| {
                let y = c.eval(&h)?;
                Ok(Residuals::new(vec![&y - &y.adjoint()], &[&y]))
            });
        }
    };

    let mut c = Check::new(oracle, "sharp", Citation::SharpSelfAdjoint);
    if star {
        symmetric(&mut c);
        self_adjoint(&mut c);
        return c.finish();
    }

    let mut probe = Check::new(oracle, "sharp", Citation::SharpSelfAdjoint);
    symmetric(&mut probe);
    let probe = probe.finish();
    match probe.status {
        crate::report::Status::Pass => {
            self_adjoint(&mut c);
            c.builder.note(
                "Δ♯ = Δ on every sampled point; this does not assert that Δ is a weak-2-local *-derivation",
            );
            c.finish()
        }
        crate::report::Status::Fail => CheckBuilder::skipped(
            "sharp",
            Citation::SharpSelfAdjoint,
            format!(
                "Δ♯ ≠ Δ ({}), so the self-adjointness implication does not apply",
                probe.counterexample.unwrap_or_default()
            ),
        ),
        _ => probe,
    }
}
