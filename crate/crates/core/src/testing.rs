//! Independent oracles shared by unit tests.

use num_rational::BigRational;
use num_traits::{One, Zero};

fn functional(p: &[BigRational], q: &[BigRational], m: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            acc += a * b * &m[i + j];
        }
    }
    acc
}

/// Monic Gram–Schmidt on `1, x, …, x^n` under the moment functional.
/// Returns the monic polynomials' coefficient vectors.
pub fn monic_gram_schmidt(m: &[BigRational], n: usize) -> Vec<Vec<BigRational>> {
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
    polys
}

/// `(a_1²..a_n², b_0..b_{n−1})` from monic Gram–Schmidt:
/// `a_k² = h_k / h_{k−1}`, `b_k = ⟨x p̃_k, p̃_k⟩ / h_k`.
pub fn gram_schmidt_monic(m: &[BigRational], n: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let polys = monic_gram_schmidt(m, n);
    let h: Vec<BigRational> = polys.iter().map(|p| functional(p, p, m)).collect();
    let a_sq = (1..=n).map(|k| &h[k] / &h[k - 1]).collect();
    let b = (0..n)
        .map(|k| {
            let mut xp = vec![BigRational::zero()];
            xp.extend(polys[k].iter().cloned());
            functional(&xp, &polys[k], m) / &h[k]
        })
        .collect();
    (a_sq, b)
}
