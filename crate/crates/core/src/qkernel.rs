//! q-numbers, continuous q-Hermite polynomials and the Poisson–Mehler
//! product/series pair.
//!
//! Normalizations: `H_{n+1}(x|q) = x H_n(x|q) − [n]_q H_{n−1}(x|q)` with
//! `H_0 = 1`, orthogonal on `|x| ≤ 2/√(1−q)`; the Al-Salam–Chihara
//! polynomials with parameters `(y, ρ, q)` satisfy
//! `P_{n+1} = (x − ρ y q^n) P_n − (1 − ρ² q^{n−1}) [n]_q P_{n−1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polysys::RecurrenceCoefficients;
use crate::scalar::Scalar;

/// `[n]_q = 1 + q + … + q^{n−1}`; equals `n` at `q = 1`.
pub fn q_bracket<S: Scalar>(n: usize, q: &S) -> S {
    let mut acc = S::zero();
    let mut p = S::one();
    for _ in 0..n {
        acc = acc + p.clone();
        p = p * q.clone();
    }
    acc
}

/// `[n]_q! = Π_{j=1}^{n} [j]_q`, with `[0]_q! = 1`.
pub fn q_factorial<S: Scalar>(n: usize, q: &S) -> S {
    (1..=n).fold(S::one(), |acc, j| acc * q_bracket(j, q))
}

/// `(a; q)_n = Π_{i=0}^{n−1} (1 − a q^i)`.
pub fn q_pochhammer<S: Scalar>(a: &S, n: usize, q: &S) -> S {
    let mut acc = S::one();
    let mut p = S::one();
    for _ in 0..n {
        acc = acc * (S::one() - a.clone() * p.clone());
        p = p * q.clone();
    }
    acc
}

/// Precomputed `[k]_q` and `[k]_q!` for `k ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QBracketCache<S> {
    pub brackets: Vec<S>,
    pub factorials: Vec<S>,
}

impl<S: Scalar> QBracketCache<S> {
    pub fn new(q: &S, n: usize) -> Self {
        let brackets: Vec<S> = (0..=n).map(|k| q_bracket(k, q)).collect();
        let mut factorials = vec![S::one()];
        for k in 1..=n {
            factorials.push(factorials[k - 1].clone() * brackets[k].clone());
        }
        QBracketCache { brackets, factorials }
    }
}

/// Monic `H_n(x|q)`.
pub fn q_hermite<S: Scalar>(n: usize, x: &S, q: &S) -> S {
    let (mut prev, mut cur) = (S::zero(), S::one());
    for k in 0..n {
        let next = x.clone() * cur.clone() - q_bracket(k, q) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(x|q) / √([n]_q!)`.
pub fn q_hermite_orthonormal<S: Scalar>(n: usize, x: &S, q: &S) -> Result<S> {
    Ok(q_hermite(n, x, q) / q_factorial(n, q).sqrt()?)
}

/// `a_k² = [k]_q`, `b_k = 0` for `k ≤ n`.
pub fn q_hermite_rec<S: Scalar>(q: &S, n: usize) -> Result<RecurrenceCoefficients<S>> {
    RecurrenceCoefficients::from_a_sq((1..=n).map(|k| q_bracket(k, q)).collect(), vec![S::zero(); n])
}

/// Al-Salam–Chihara coefficients: `b_k = ρ y q^k`,
/// `a_k² = (1 − ρ² q^{k−1}) [k]_q`, for `k ≤ n`.
pub fn al_salam_chihara_rec<S: Scalar>(y: &S, rho: &S, q: &S, n: usize) -> Result<RecurrenceCoefficients<S>> {
    let rho2 = rho.square();
    let a_sq = (1..=n)
        .map(|k| (S::one() - rho2.clone() * q.powi(k as u32 - 1)) * q_bracket(k, q))
        .collect();
    let b = (0..n).map(|k| rho.clone() * y.clone() * q.powi(k as u32)).collect();
    RecurrenceCoefficients::from_a_sq(a_sq, b)
}

/// Parameters of the Poisson–Mehler kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParams {
    pub q: f64,
    pub rho: f64,
}

impl QParams {
    pub fn new(q: f64, rho: f64) -> Result<Self> {
        if q.is_nan() || q.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!("|q| must be < 1, got {q}")));
        }
        if rho.is_nan() || rho.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!("|rho| must be < 1, got {rho}")));
        }
        Ok(QParams { q, rho })
    }

    /// `2/√(1−q)`, the half-width of the support `S(q)`.
    pub fn support_bound(&self) -> f64 {
        2.0 / (1.0 - self.q).sqrt()
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.support_bound()
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::InvalidParameter(format!(
                "point {x} outside [-{b}, {b}]",
                b = self.support_bound()
            )));
        }
        Ok(())
    }
}

/// Hard cap on factors and terms.
pub const MAX_TERMS: usize = 10_000;
/// Default truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Largest accepted product/series disagreement.
pub const PM_THRESHOLD: f64 = 1e-8;

/// A truncated infinite product or series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated {
    pub value: f64,
    pub terms: usize,
}

/// `w_k = (1−ρ²q^{2k})² − (1−q)ρq^k(1+ρ²q^{2k})xy + (1−q)ρ²(x²+y²)q^{2k}`.
pub fn w_k(x: f64, y: f64, p: &QParams, k: usize) -> f64 {
    let (q, rho) = (p.q, p.rho);
    let qk = q.powi(k as i32);
    let q2k = qk * qk;
    let r2 = rho * rho;
    (1.0 - r2 * q2k).powi(2) - (1.0 - q) * rho * qk * (1.0 + r2 * q2k) * x * y + (1.0 - q) * r2 * (x * x + y * y) * q2k
}

/// `Π_{k≥0} (1 − ρ² q^k) / w_k`, stopped once two consecutive factors are
/// within `tol` of 1 and `|q|^k < tol`.
pub fn pm_product(x: f64, y: f64, p: &QParams, tol: f64) -> Result<Truncated> {
    p.check_point(x)?;
    p.check_point(y)?;
    let mut value = 1.0;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let w = w_k(x, y, p, k);
        if w <= 0.0 {
            return Err(Error::Numeric(format!("w_{k} = {w} is not positive at x = {x}, y = {y}")));
        }
        let f = (1.0 - p.rho * p.rho * p.q.powi(k as i32)) / w;
        value *= f;
        // a factor can touch 1 by coincidence; |q|^k bounds every later deviation
        quiet = if (f - 1.0).abs() < tol && p.q.abs().powi(k as i32) < tol { quiet + 1 } else { 0 };
        if quiet == 2 {
            return Ok(Truncated { value, terms: k + 1 });
        }
    }
    Err(Error::Numeric(format!("product did not settle within {MAX_TERMS} factors")))
}

/// `Σ_j ρ^j H_j(x|q) H_j(y|q) / [j]_q!`, summed through the orthonormal
/// recurrence `h_{j+1} = (x h_j − √[j]_q h_{j−1}) / √[j+1]_q` and stopped
/// once the envelope `ρ^j |(h_j, h_{j−1})(x)| |(h_j, h_{j−1})(y)|` falls below
/// `tol` at two consecutive `j`.
pub fn pm_series(x: f64, y: f64, p: &QParams, tol: f64) -> Result<Truncated> {
    p.check_point(x)?;
    p.check_point(y)?;
    let (mut hx_prev, mut hx) = (0.0f64, 1.0f64);
    let (mut hy_prev, mut hy) = (0.0f64, 1.0f64);
    let mut rho_j = 1.0;
    let mut value = 0.0;
    let mut quiet = 0;
    let mut last_big = 0usize;
    for j in 0..MAX_TERMS {
        let term = rho_j * hx * hy;
        value += term;
        // single terms vanish at parity zeros (e.g. x = 0); the envelope over
        // (h_j, h_{j−1}) cannot, since consecutive h's share no root
        let envelope = rho_j * hx.hypot(hx_prev) * hy.hypot(hy_prev);
        if envelope < tol {
            quiet += 1;
            if quiet == 2 {
                return Ok(Truncated { value, terms: j + 1 });
            }
        } else {
            quiet = 0;
            last_big = j;
        }
        let sj = q_bracket(j, &p.q).sqrt();
        let sj1 = q_bracket(j + 1, &p.q).sqrt();
        let nx = (x * hx - sj * hx_prev) / sj1;
        let ny = (y * hy - sj * hy_prev) / sj1;
        (hx_prev, hx) = (hx, nx);
        (hy_prev, hy) = (hy, ny);
        rho_j *= p.rho;
    }
    Err(Error::Numeric(format!(
        "series terms still above {tol:e} at index {last_big} after {MAX_TERMS} terms"
    )))
}

/// One grid point of the Poisson–Mehler check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmPoint {
    pub q: f64,
    pub rho: f64,
    pub x: f64,
    pub y: f64,
    pub product: f64,
    pub series: f64,
    pub abs_error: f64,
    pub product_factors: usize,
    pub series_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmReport {
    pub points: Vec<PmPoint>,
    pub max_error: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `{0, ±1, ±1.9/√(1−q)}`, all inside the support.
pub fn default_points(q: f64) -> Vec<f64> {
    let edge = 1.9 / (1.0 - q).sqrt();
    vec![0.0, 1.0, -1.0, edge, -edge]
}

pub const ACCEPTANCE_Q: [f64; 3] = [-0.5, 0.2, 0.5];
pub const ACCEPTANCE_RHO: [f64; 3] = [0.1, 0.5, 0.9];

/// Compares product and series at every `(x, y)` pair of `points(q)` for
/// every `(q, ρ)`.
pub fn verify_pm(qs: &[f64], rhos: &[f64], points: impl Fn(f64) -> Vec<f64>, tol: f64, threshold: f64) -> Result<PmReport> {
    let mut out = Vec::new();
    for &q in qs {
        let xs = points(q);
        for &rho in rhos {
            let p = QParams::new(q, rho)?;
            for &x in &xs {
                for &y in &xs {
                    let prod = pm_product(x, y, &p, tol)?;
                    let series = pm_series(x, y, &p, tol)?;
                    out.push(PmPoint {
                        q,
                        rho,
                        x,
                        y,
                        product: prod.value,
                        series: series.value,
                        abs_error: (prod.value - series.value).abs(),
                        product_factors: prod.terms,
                        series_terms: series.terms,
                    });
                }
            }
        }
    }
    let max_error = out.iter().map(|p| p.abs_error).fold(0.0, f64::max);
    Ok(PmReport {
        points: out,
        max_error,
        threshold,
        pass: max_error <= threshold,
    })
}
