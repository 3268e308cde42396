#![allow(dead_code)]

use derivation_lab::{Matrix, CQ};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn cq(re: i64, im: i64) -> CQ {
    Complex::new(q(re), q(im))
}

pub fn small<R: Rng>(rng: &mut R) -> CQ {
    cq(rng.random_range(-2..=2), rng.random_range(-2..=2))
}

pub fn small_matrix<R: Rng>(n: usize, rng: &mut R) -> Matrix<CQ> {
    Matrix::from_fn(n, |_, _| small(rng))
}

/// Entries of a 2×2 matrix as a plain array, multiplied by hand.
type M2 = [[CQ; 2]; 2];

fn to_m2(m: &Matrix<CQ>) -> M2 {
    [[m[(0, 0)].clone(), m[(0, 1)].clone()], [m[(1, 0)].clone(), m[(1, 1)].clone()]]
}

fn mul(a: &M2, b: &M2) -> M2 {
    let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn trace_of_commutator_times(z: &M2, a: &M2, f: &M2) -> CQ {
    let za = mul(z, a);
    let az = mul(a, z);
    let c = [
        [za[0][0].clone() - az[0][0].clone(), za[0][1].clone() - az[0][1].clone()],
        [za[1][0].clone() - az[1][0].clone(), za[1][1].clone() - az[1][1].clone()],
    ];
    let cf = mul(&c, f);
    cf[0][0].clone() + cf[1][1].clone()
}

/// Real coordinates of `z`: eight for `M_2`, four for its skew-Hermitian part.
fn real_directions(star: bool) -> Vec<M2> {
    let zero = || cq(0, 0);
    let unit = |i: usize, j: usize, v: CQ| {
        let mut m = [[zero(), zero()], [zero(), zero()]];
        m[i][j] = v;
        m
    };
    if star {
        vec![
            unit(0, 0, cq(0, 1)),
            unit(1, 1, cq(0, 1)),
            [[zero(), cq(1, 0)], [cq(-1, 0), zero()]],
            [[zero(), cq(0, 1)], [cq(0, 1), zero()]],
        ]
    } else {
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                out.push(unit(i, j, cq(1, 0)));
                out.push(unit(i, j, cq(0, 1)));
            }
        }
        out
    }
}

fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone() / pivot.clone();
                for (slot, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *slot -= p.clone() * factor.clone();
                }
            }
        }
        r += 1;
    }
    r
}

/// Is there a `z` in the real span of the directions with
/// `trace([z,a]F) = v_a` and `trace([z,b]F) = v_b`? Rouché–Capelli over ℚ.
pub fn brute_feasible(a: &Matrix<CQ>, b: &Matrix<CQ>, f: &Matrix<CQ>, va: &CQ, vb: &CQ, star: bool) -> bool {
    let (a, b, f) = (to_m2(a), to_m2(b), to_m2(f));
    let dirs = real_directions(star);
    let ca: Vec<CQ> = dirs.iter().map(|d| trace_of_commutator_times(d, &a, &f)).collect();
    let cb: Vec<CQ> = dirs.iter().map(|d| trace_of_commutator_times(d, &b, &f)).collect();
    let row = |c: &[CQ], re: bool| -> Vec<Q> { c.iter().map(|x| if re { x.re.clone() } else { x.im.clone() }).collect() };
    let coeff = vec![row(&ca, true), row(&ca, false), row(&cb, true), row(&cb, false)];
    let rhs = [va.re.clone(), va.im.clone(), vb.re.clone(), vb.im.clone()];
    let augmented: Vec<Vec<Q>> = coeff
        .iter()
        .zip(rhs)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v);
            r
        })
        .collect();
    rank(coeff) == rank(augmented)
}

/// `z - (trace z / n)·1`, computed entrywise.
pub fn centered(z: &Matrix<CQ>) -> Matrix<CQ> {
    let n = z.n();
    let mut t = cq(0, 0);
    for i in 0..n {
        t += z[(i, i)].clone();
    }
    let shift = t * Complex::new(Q::new(BigInt::one(), BigInt::from(n)), Q::zero());
    Matrix::from_fn(n, |i, j| if i == j { z[(i, j)].clone() - shift.clone() } else { z[(i, j)].clone() })
}

pub struct RawTriple {
    pub a: Matrix<CQ>,
    pub b: Matrix<CQ>,
    pub f: Matrix<CQ>,
    pub va: CQ,
    pub vb: CQ,
}

fn point<R: Rng>(rng: &mut R) -> Matrix<CQ> {
    let unit = |i, j| Matrix::<CQ>::unit(2, i, j);
    match rng.random_range(0..8) {
        0 => Matrix::identity(2),
        1 => unit(0, 0),
        2 => unit(1, 1),
        3 => unit(0, 1),
        4 => &unit(0, 1) + &unit(1, 0),
        _ => small_matrix(2, rng),
    }
}

/// Random points (often degenerate), a random density, and values that are
/// either those of a random derivation, a perturbation of them, or arbitrary.
pub fn random_triple<R: Rng>(rng: &mut R, star: bool) -> RawTriple {
    let a = point(rng);
    let b = match rng.random_range(0..4) {
        0 => a.clone(),
        1 => a.scale(&small(rng)),
        _ => point(rng),
    };
    let f = match rng.random_range(0..3) {
        0 => Matrix::unit(2, rng.random_range(0..2), rng.random_range(0..2)),
        _ => small_matrix(2, rng),
    };
    let z = small_matrix(2, rng);
    let z = if star { &z - &z.adjoint() } else { z };
    let value = |x: &Matrix<CQ>| trace_value(&(&z.commutator(x).unwrap() * &f));
    let (mut va, mut vb) = (value(&a), value(&b));
    match rng.random_range(0..4) {
        0 => va += small(rng),
        1 => vb += small(rng),
        2 => {
            va = small(rng);
            vb = small(rng);
        }
        _ => {}
    }
    RawTriple { a, b, f, va, vb }
}

pub fn trace_value(x: &Matrix<CQ>) -> CQ {
    let mut t = cq(0, 0);
    for i in 0..x.n() {
        t += x[(i, i)].clone();
    }
    t
}
