//! Linearization coefficients `p_n p_m = Σ_s c_{n,m,s} p_s`.

use serde::Serialize;

use crate::cholesky::TriangularTable;
use crate::connect::Basis;
use crate::error::{Error, Result};
use crate::polysys::{poly_mul, PolynomialSystem, RecurrenceCoefficients};
use crate::recurrence::{complete, elementary, eta_table, tau_table, ClosedFormCheck};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizationTable<S> {
    pub n: usize,
    pub m: usize,
    pub basis: Basis,
    /// `c_{n,m,s}` for `s = 0..=n+m`.
    pub coeffs: Vec<S>,
}

impl<S: Scalar> LinearizationTable<S> {
    pub fn get(&self, s: usize) -> S {
        self.coeffs.get(s).cloned().unwrap_or_else(S::zero)
    }
}

fn triple_sum<S: Scalar>(forward: &TriangularTable<S>, back: &TriangularTable<S>, n: usize, m: usize) -> Vec<S> {
    (0..=n + m)
        .map(|s| {
            let mut acc = S::zero();
            for j in 0..=n {
                let pj = forward.get(n, j);
                if pj.is_zero() {
                    continue;
                }
                for k in s.saturating_sub(j)..=m {
                    let pk = forward.get(m, k);
                    let l = back.get(j + k, s);
                    if pk.is_zero() || l.is_zero() {
                        continue;
                    }
                    acc = acc + pj.clone() * pk * l;
                }
            }
            acc
        })
        .collect()
}

fn tables<S: Scalar>(sys: &PolynomialSystem<S>, n: usize, m: usize, basis: Basis) -> Result<(TriangularTable<S>, TriangularTable<S>)> {
    let need = n + m;
    if sys.order() < need {
        return Err(Error::OrderTooSmall {
            requested: need,
            available: sys.order(),
        });
    }
    Ok(match basis {
        Basis::Orthonormal => (sys.pi().truncated(need), sys.lambda().truncated(need)),
        Basis::Monic => (eta_table(sys.rec(), need)?, tau_table(sys.rec(), need)?),
    })
}

/// Triple sum over `j ≤ n`, `k ≤ m`, `j + k ≥ s` of `π_{n,j} π_{m,k} λ_{j+k,s}`;
/// the monic basis uses `η`, `τ` instead.
pub fn linearization_table<S: Scalar>(sys: &PolynomialSystem<S>, n: usize, m: usize, basis: Basis) -> Result<LinearizationTable<S>> {
    let (f, b) = tables(sys, n, m, basis)?;
    Ok(LinearizationTable {
        n,
        m,
        basis,
        coeffs: triple_sum(&f, &b, n, m),
    })
}

/// Monic coefficients computed from a recurrence alone.
pub fn monic_linearization<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize, m: usize) -> Result<LinearizationTable<S>> {
    let eta = eta_table(rec, n + m)?;
    let tau = tau_table(rec, n + m)?;
    Ok(LinearizationTable {
        n,
        m,
        basis: Basis::Monic,
        coeffs: triple_sum(&eta, &tau, n, m),
    })
}

/// Second path: multiply the coefficient rows as polynomials, then map each
/// monomial back with `Λ` (or `τ`).
pub fn linearization_by_expansion<S: Scalar>(sys: &PolynomialSystem<S>, n: usize, m: usize, basis: Basis) -> Result<LinearizationTable<S>> {
    let (f, b) = tables(sys, n, m, basis)?;
    let product = poly_mul(f.row(n), f.row(m));
    let mut coeffs = vec![S::zero(); n + m + 1];
    for (j, c) in product.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (s, l) in b.row(j).iter().enumerate() {
            if !l.is_zero() {
                coeffs[s] = coeffs[s].clone() + c.clone() * l.clone();
            }
        }
    }
    Ok(LinearizationTable { n, m, basis, coeffs })
}

/// Which rendering of the second closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The formula as stated.
    Statement,
    /// The expression reached in the argument before the final rearrangement.
    ProofExpansion,
    /// A rederivation from the triple sum, including every quadratic `b` term.
    Rederived,
}

fn sum<S: Scalar>(range: std::ops::Range<usize>, f: impl Fn(usize) -> S) -> S {
    range.fold(S::zero(), |acc, j| acc + f(j))
}

/// Monic `c̃_{n,m,s}` for `s = n+m−1` or `s = n+m−2`.
///
/// For `s = n+m−1` the value is `Σ_{j=max}^{n+m−1} (b_j − b_{j−max})` for every
/// variant. For `s = n+m−2` with `N = n+m`, `B_k = Σ_{j<k} b_j`:
/// the statement is
/// `Σ_{max}^{N−1} a² − Σ_1^{min−1} a² − ½(Σ_{max}^{N−2} b − B_min)² − ½(Σ_{max}^{N−2} b² − Σ_{j<min} b_j²)`,
/// the proof expansion is
/// `Σ_1^{N−1} a² − Σ_1^{n−1} a² − Σ_1^{m−1} a² − (B_n + B_m) B_{N−1} + B_n B_m`,
/// and the rederived form adds `h₂(b_0..b_{N−2}) + e₂(b_0..b_{n−1}) + e₂(b_0..b_{m−1})`
/// to the proof expansion.
pub fn closed_form_linearization<S: Scalar>(
    rec: &RecurrenceCoefficients<S>,
    n: usize,
    m: usize,
    s: usize,
    variant: Variant,
) -> Result<S> {
    let total = n + m;
    let (hi, lo) = (n.max(m), n.min(m));
    if s + 1 == total && hi >= 1 {
        rec.require_rows(total)?;
        return Ok(sum(hi..total, |j| rec.b(j) - rec.b(j - hi)));
    }
    if s + 2 != total || lo == 0 {
        return Err(Error::Unsupported(format!(
            "closed forms cover s = n+m-1 and s = n+m-2 with n, m >= 1, got ({n},{m},{s})"
        )));
    }
    rec.require_rows(total)?;
    let a_sum = |from: usize, to: usize| sum(from..to, |j| rec.a_sq(j));
    let b_pre = |k: usize| sum(0..k, |j| rec.b(j));
    let half = S::one() / S::from_i64(2);
    Ok(match variant {
        Variant::Statement => {
            let b_hi = sum(hi..total - 1, |j| rec.b(j));
            let b_sq_hi = sum(hi..total - 1, |j| rec.b(j).square());
            let b_sq_lo = sum(0..lo, |j| rec.b(j).square());
            a_sum(hi, total) - a_sum(1, lo) - half.clone() * (b_hi - b_pre(lo)).square() - half * (b_sq_hi - b_sq_lo)
        }
        Variant::ProofExpansion | Variant::Rederived => {
            let (bn, bm, bt) = (b_pre(n), b_pre(m), b_pre(total - 1));
            let base = a_sum(1, total) - a_sum(1, n) - a_sum(1, m) - (bn.clone() + bm.clone()) * bt + bn * bm;
            if variant == Variant::ProofExpansion {
                base
            } else {
                let b = rec.b_all();
                base + complete(&b[..total - 1], 2) + elementary(&b[..n], 2) + elementary(&b[..m], 2)
            }
        }
    })
}

/// Compares the closed forms with the monic triple sum for all
/// `1 ≤ n, m` with `n + m ≤ max_total`.
pub fn verify_linearization_closed_forms<S: Scalar>(rec: &RecurrenceCoefficients<S>, max_total: usize, tol: f64) -> Result<Vec<ClosedFormCheck>> {
    let mut top = Vec::new();
    let mut statement = Vec::new();
    let mut proof = Vec::new();
    let mut rederived = Vec::new();
    for total in 2..=max_total {
        for n in 1..total {
            let m = total - n;
            let t = monic_linearization(rec, n, m)?;
            top.push(((n, m), t.get(total - 1), closed_form_linearization(rec, n, m, total - 1, Variant::Statement)?));
            let actual = t.get(total - 2);
            let eval = |v| closed_form_linearization(rec, n, m, total - 2, v);
            statement.push(((n, m), actual.clone(), eval(Variant::Statement)?));
            proof.push(((n, m), actual.clone(), eval(Variant::ProofExpansion)?));
            rederived.push(((n, m), actual, eval(Variant::Rederived)?));
        }
    }
    Ok(vec![
        ClosedFormCheck::run("lin_top_minus_one", tol, top),
        ClosedFormCheck::run("lin_top_minus_two_statement", tol, statement),
        ClosedFormCheck::run("lin_top_minus_two_proof", tol, proof),
        ClosedFormCheck::run("lin_top_minus_two_rederived", tol, rederived),
    ])
}

/// Names of linearization checks whose failure is expected whenever `b ≢ 0`.
pub const SUSPECT_LINEARIZATION_CHECKS: [&str; 2] = ["lin_top_minus_two_statement", "lin_top_minus_two_proof"];
