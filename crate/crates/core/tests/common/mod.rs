//! Oracles shared by the integration tests. None of them touches the
//! Cholesky or recurrence code of the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use orthomoments::{Scalar, Surd};

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn surd(p: i64, q: i64) -> Surd {
    Surd::rational(rat(p, q))
}

/// Rational moments of an exact sequence; panics on irrational entries.
pub fn rationals(m: &[Surd]) -> Vec<BigRational> {
    m.iter().map(|v| v.as_rational().expect("rational moment").clone()).collect()
}

fn functional(p: &[BigRational], q: &[BigRational], m: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            acc += a * b * &m[i + j];
        }
    }
    acc
}

/// Monic Gram–Schmidt on `1, x, …, x^n`; returns `(a_1²..a_n², b_0..b_{n−1})`
/// from `a_k² = h_k / h_{k−1}` and `b_k = ⟨x p̃_k, p̃_k⟩ / h_k`.
pub fn gram_schmidt(m: &[BigRational], n: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut polys: Vec<Vec<BigRational>> = Vec::new();
    let mut norms: Vec<BigRational> = Vec::new();
    for k in 0..=n {
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        let xk = p.clone();
        for (q, h) in polys.iter().zip(&norms) {
            let c = functional(&xk, q, m) / h;
            for (i, v) in q.iter().enumerate() {
                p[i] -= &c * v;
            }
        }
        norms.push(functional(&p, &p, m));
        polys.push(p);
    }
    let a_sq = (1..=n).map(|k| &norms[k] / &norms[k - 1]).collect();
    let b = (0..n)
        .map(|k| {
            let mut xp = vec![BigRational::zero()];
            xp.extend(polys[k].iter().cloned());
            functional(&xp, &polys[k], m) / &norms[k]
        })
        .collect();
    (a_sq, b)
}

/// Power coefficients of the Chebyshev polynomials `T_0..T_n` from
/// `T_{k+1} = 2x T_k − T_{k−1}`.
pub fn chebyshev_t(n: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::one()], vec![BigInt::zero(), BigInt::one()]];
    for k in 1..n {
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, c) in t[k].iter().enumerate() {
            next[i + 1] += c * 2;
        }
        for (i, c) in t[k - 1].iter().enumerate() {
            next[i] -= c;
        }
        t.push(next);
    }
    t.truncate(n + 1);
    t
}

/// Coefficients of `T̃_n T̃_m` in the monic Chebyshev basis, obtained by
/// multiplying power series and peeling off leading terms.
pub fn chebyshev_monic_product(n: usize, m: usize) -> Vec<BigRational> {
    let t = chebyshev_t(n + m);
    let monic: Vec<Vec<BigRational>> = t
        .iter()
        .map(|row| {
            let lead = BigRational::from_integer(row.last().unwrap().clone());
            row.iter().map(|c| BigRational::from_integer(c.clone()) / &lead).collect()
        })
        .collect();
    let mut prod = vec![BigRational::zero(); n + m + 1];
    for (i, a) in monic[n].iter().enumerate() {
        for (j, b) in monic[m].iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    let mut out = vec![BigRational::zero(); n + m + 1];
    for s in (0..=n + m).rev() {
        let c = prod[s].clone();
        if c.is_zero() {
            continue;
        }
        for (i, v) in monic[s].iter().enumerate() {
            prod[i] -= &c * v;
        }
        out[s] = c;
    }
    out
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// `max |a − b|` over two vectors of scalars, in `f64`.
pub fn max_gap<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).to_f64().abs())
        .fold(0.0, f64::max)
}

