//! From recurrence coefficients to monic coefficient tables, the closed-form
//! solutions of their recursions, and moments.
//!
//! The recursion tables are ground truth; every closed form is evaluated
//! as stated and compared against them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cholesky::{TableRole, TriangularTable};
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::polysys::RecurrenceCoefficients;
use crate::scalar::{ratio, Scalar};

fn zero_rows<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..=n).map(|i| vec![S::zero(); i + 1]).collect()
}

fn at<S: Scalar>(rows: &[Vec<S>], i: isize, j: isize) -> S {
    if i < 0 || j < 0 || j > i {
        S::zero()
    } else {
        rows[i as usize][j as usize].clone()
    }
}

/// Power coefficients of the monic polynomials, rows `0..=n`:
/// `η_{k+1,j} = η_{k,j−1} − b_k η_{k,j} − a_k² η_{k−1,j}`.
pub fn eta_table<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize) -> Result<TriangularTable<S>> {
    rec.require_rows(n)?;
    let mut t = zero_rows::<S>(n);
    t[0][0] = S::one();
    for k in 0..n {
        let (b, a2) = (rec.b(k), rec.a_sq(k));
        for j in 0..=k + 1 {
            let (ki, ji) = (k as isize, j as isize);
            t[k + 1][j] = at(&t, ki, ji - 1) - b.clone() * at(&t, ki, ji) - a2.clone() * at(&t, ki - 1, ji);
        }
    }
    Ok(TriangularTable::from_rows(TableRole::Eta, t))
}

/// Expansion of `x^k` in monic polynomials, rows `0..=n`:
/// `τ_{k+1,j} = τ_{k,j−1} + b_j τ_{k,j} + a_{j+1}² τ_{k,j+1}`.
pub fn tau_table<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize) -> Result<TriangularTable<S>> {
    rec.require_rows(n)?;
    let mut t = zero_rows::<S>(n);
    t[0][0] = S::one();
    for k in 0..n {
        for j in 0..=k + 1 {
            let (ki, ji) = (k as isize, j as isize);
            let mut v = at(&t, ki, ji - 1);
            if j <= k {
                v = v + rec.b(j) * t[k][j].clone();
            }
            if j < k {
                v = v + rec.a_sq(j + 1) * t[k][j + 1].clone();
            }
            t[k + 1][j] = v;
        }
    }
    Ok(TriangularTable::from_rows(TableRole::Tau, t))
}

/// The four auxiliary sequences `ξ⁽¹⁾, ξ⁽²⁾, ζ⁽¹⁾, ζ⁽²⁾`, rows `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxTables<S> {
    pub xi1: TriangularTable<S>,
    pub xi2: TriangularTable<S>,
    pub zeta1: TriangularTable<S>,
    pub zeta2: TriangularTable<S>,
}

/// Fills the auxiliary tables by their defining recursions, each started
/// from a unit diagonal:
/// `ξ⁽¹⁾_{k+1,j} = ξ⁽¹⁾_{k,j−1} − a_k² ξ⁽¹⁾_{k−1,j}`,
/// `ξ⁽²⁾_{k+1,j} = ξ⁽²⁾_{k,j−1} − b_k ξ⁽²⁾_{k,j}`,
/// `ζ⁽¹⁾_{k+1,j} = ζ⁽¹⁾_{k,j−1} + a_{j+1}² ζ⁽¹⁾_{k,j+1}`,
/// `ζ⁽²⁾_{k+1,j} = ζ⁽²⁾_{k,j−1} + b_j ζ⁽²⁾_{k,j}`.
pub fn aux_tables_recursive<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize) -> Result<AuxTables<S>> {
    rec.require_rows(n)?;
    let mut xi1 = zero_rows::<S>(n);
    let mut xi2 = zero_rows::<S>(n);
    let mut z1 = zero_rows::<S>(n);
    let mut z2 = zero_rows::<S>(n);
    for t in [&mut xi1, &mut xi2, &mut z1, &mut z2] {
        t[0][0] = S::one();
    }
    for k in 0..n {
        for j in 0..=k + 1 {
            let (ki, ji) = (k as isize, j as isize);
            xi1[k + 1][j] = at(&xi1, ki, ji - 1) - rec.a_sq(k) * at(&xi1, ki - 1, ji);
            xi2[k + 1][j] = at(&xi2, ki, ji - 1) - rec.b(k) * at(&xi2, ki, ji);
            let mut v1 = at(&z1, ki, ji - 1);
            if j < k {
                v1 = v1 + rec.a_sq(j + 1) * z1[k][j + 1].clone();
            }
            z1[k + 1][j] = v1;
            let mut v2 = at(&z2, ki, ji - 1);
            if j <= k {
                v2 = v2 + rec.b(j) * z2[k][j].clone();
            }
            z2[k + 1][j] = v2;
        }
    }
    Ok(AuxTables {
        xi1: TriangularTable::from_rows(TableRole::XiZeta, xi1),
        xi2: TriangularTable::from_rows(TableRole::XiZeta, xi2),
        zeta1: TriangularTable::from_rows(TableRole::XiZeta, z1),
        zeta2: TriangularTable::from_rows(TableRole::XiZeta, z2),
    })
}

/// `ξ⁽¹⁾_{r,c}`: zero for odd `r − c`; for `r − c = 2k` the signed sum of
/// `Π a_{j_m}²` over `1 ≤ j_1 < … < j_k ≤ r − 1` with gaps `≥ 2`, in the
/// nested form `Σ_{j_1=1}^{r−2k+1} a² Σ_{j_2=j_1+2}^{r−2k+3} a² … Σ_{j_k}^{r−1} a²`.
pub fn xi1_closed<S: Scalar>(rec: &RecurrenceCoefficients<S>, r: usize, c: usize) -> S {
    if c > r || (r - c) % 2 == 1 {
        return S::zero();
    }
    let k = (r - c) / 2;
    if k == 0 {
        return S::one();
    }
    // level m (1-based) ranges up to r − 2k + 2m − 1; inner[j] holds the
    // value of the nested sum from level m on with j_m = j
    let upper = |m: usize| r + 2 * m - 2 * k - 1;
    let mut inner: Vec<S> = (0..=upper(k)).map(|j| if j == 0 { S::zero() } else { rec.a_sq(j) }).collect();
    for m in (1..k).rev() {
        // suffix sums of level m+1
        let top = upper(m + 1);
        let mut suffix = vec![S::zero(); top + 2];
        for j in (1..=top).rev() {
            suffix[j] = suffix[j + 1].clone() + inner[j].clone();
        }
        inner = (0..=upper(m))
            .map(|j| {
                if j == 0 || j + 2 > top {
                    S::zero()
                } else {
                    rec.a_sq(j) * suffix[j + 2].clone()
                }
            })
            .collect();
    }
    let total = inner[1..=upper(1)].iter().fold(S::zero(), |acc, v| acc + v.clone());
    if k % 2 == 1 {
        -total
    } else {
        total
    }
}

/// `ξ⁽²⁾_{r,c} = (−1)^{r−c} e_{r−c}(b_0, …, b_{r−1})`.
pub fn xi2_closed<S: Scalar>(rec: &RecurrenceCoefficients<S>, r: usize, c: usize) -> S {
    if c > r {
        return S::zero();
    }
    let j = r - c;
    let e = elementary(&rec.b_all()[..r], j);
    if j % 2 == 1 {
        -e
    } else {
        e
    }
}

/// `ζ⁽¹⁾_{r,c}`: zero for odd `r − c`; for `r − c = 2k` the nested sum
/// `Σ_{j_1=1}^{c+1} a_{j_1}² Σ_{j_2=1}^{j_1+1} a_{j_2}² … Σ_{j_k=1}^{j_{k−1}+1} a_{j_k}²`.
pub fn zeta1_closed<S: Scalar>(rec: &RecurrenceCoefficients<S>, r: usize, c: usize) -> S {
    if c > r || (r - c) % 2 == 1 {
        return S::zero();
    }
    let k = (r - c) / 2;
    if k == 0 {
        return S::one();
    }
    // level m index is at most c + m
    let mut inner: Vec<S> = (0..=c + k).map(|j| if j == 0 { S::zero() } else { rec.a_sq(j) }).collect();
    for m in (1..k).rev() {
        let mut prefix = vec![S::zero(); inner.len()];
        for j in 1..inner.len() {
            prefix[j] = prefix[j - 1].clone() + inner[j].clone();
        }
        inner = (0..=c + m)
            .map(|j| if j == 0 { S::zero() } else { rec.a_sq(j) * prefix[j + 1].clone() })
            .collect();
    }
    inner[1..=c + 1].iter().fold(S::zero(), |acc, v| acc + v.clone())
}

/// `ζ⁽²⁾_{r,c} = h_{r−c}(b_0, …, b_c)`, the monotone nested sum
/// `Σ_{k_1=0}^{c} b_{k_1} Σ_{k_2=k_1}^{c} b_{k_2} …`.
pub fn zeta2_closed<S: Scalar>(rec: &RecurrenceCoefficients<S>, r: usize, c: usize) -> S {
    if c > r {
        return S::zero();
    }
    let j = r - c;
    if j == 0 {
        return S::one();
    }
    complete(&rec.b_all()[..=c], j)
}

/// Elementary symmetric polynomial `e_j`.
pub fn elementary<S: Scalar>(xs: &[S], j: usize) -> S {
    let mut e = vec![S::zero(); j + 1];
    e[0] = S::one();
    for x in xs {
        for i in (1..=j).rev() {
            e[i] = e[i].clone() + x.clone() * e[i - 1].clone();
        }
    }
    e[j].clone()
}

/// Complete homogeneous symmetric polynomial `h_j`.
pub fn complete<S: Scalar>(xs: &[S], j: usize) -> S {
    let mut h = vec![S::zero(); j + 1];
    h[0] = S::one();
    for x in xs {
        for i in 1..=j {
            h[i] = h[i].clone() + x.clone() * h[i - 1].clone();
        }
    }
    h[j].clone()
}

/// The auxiliary tables evaluated entry by entry from the closed forms.
pub fn aux_tables<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize) -> Result<AuxTables<S>> {
    rec.require_rows(n)?;
    let fill = |f: fn(&RecurrenceCoefficients<S>, usize, usize) -> S| {
        TriangularTable::from_rows(
            TableRole::XiZeta,
            (0..=n).map(|r| (0..=r).map(|c| f(rec, r, c)).collect()).collect(),
        )
    };
    Ok(AuxTables {
        xi1: fill(xi1_closed),
        xi2: fill(xi2_closed),
        zeta1: fill(zeta1_closed),
        zeta2: fill(zeta2_closed),
    })
}

/// Outcome of one closed-form check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Hypotheses not met (e.g. a symmetric-only identity on non-zero `b`).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    /// Table indices `(row, column)` of the first disagreement.
    pub index: (usize, usize),
    pub expected: String,
    pub actual: String,
}

/// One closed form compared against the recursion oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Number of entries compared.
    pub compared: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl ClosedFormCheck {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    fn skipped(name: &'static str) -> Self {
        ClosedFormCheck {
            name,
            status: CheckStatus::Skipped,
            compared: 0,
            first_mismatch: None,
        }
    }

    /// Compares `(index, expected, actual)` triples; `expected` is the oracle.
    pub(crate) fn run<S: Scalar>(name: &'static str, tol: f64, entries: impl IntoIterator<Item = ((usize, usize), S, S)>) -> Self {
        let mut compared = 0;
        for (index, expected, actual) in entries {
            compared += 1;
            if !actual.approx_eq(&expected, tol) {
                return ClosedFormCheck {
                    name,
                    status: CheckStatus::Fail,
                    compared,
                    first_mismatch: Some(Mismatch {
                        index,
                        expected: expected.to_string(),
                        actual: actual.to_string(),
                    }),
                };
            }
        }
        ClosedFormCheck {
            name,
            status: CheckStatus::Pass,
            compared,
            first_mismatch: None,
        }
    }
}

fn table_check<S: Scalar>(name: &'static str, oracle: &TriangularTable<S>, candidate: &TriangularTable<S>, tol: f64) -> ClosedFormCheck {
    let n = oracle.order();
    ClosedFormCheck::run(
        name,
        tol,
        (0..=n).flat_map(|r| (0..=r).map(move |c| ((r, c), oracle.get(r, c), candidate.get(r, c)))),
    )
}

/// Every closed-form identity for the monic tables, rows `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub order: usize,
    pub checks: Vec<ClosedFormCheck>,
}

impl ClosedFormReport {
    pub fn check(&self, name: &str) -> Option<&ClosedFormCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// True when nothing but the listed checks failed.
    pub fn all_pass_except(&self, allowed: &[&str]) -> bool {
        self.checks
            .iter()
            .all(|c| c.status != CheckStatus::Fail || allowed.contains(&c.name))
    }
}

/// Names of checks whose stated formulas carry suspected misprints; a
/// failure there is reported, not treated as a defect.
pub const SUSPECT_CHECKS: [&str; 3] = ["tau_sub3", "eta_sub3", "eta_sub4"];

/// Compares the auxiliary closed forms with their recursions, and the
/// partial solutions for `η_{k+l,k}`, `τ_{k+l,k}` (`l ≤ 4`) with the
/// monic tables.
pub fn verify_closed_forms<S: Scalar>(rec: &RecurrenceCoefficients<S>, n: usize, tol: f64) -> Result<ClosedFormReport> {
    let rec_aux = aux_tables_recursive(rec, n)?;
    let closed = aux_tables(rec, n)?;
    let mut checks = vec![
        table_check("xi1_closed_form", &rec_aux.xi1, &closed.xi1, tol),
        table_check("xi2_closed_form", &rec_aux.xi2, &closed.xi2, tol),
        table_check("zeta1_closed_form", &rec_aux.zeta1, &closed.zeta1, tol),
        table_check("zeta2_closed_form", &rec_aux.zeta2, &closed.zeta2, tol),
    ];
    let eta = eta_table(rec, n)?;
    let tau = tau_table(rec, n)?;
    let duality = eta.mul(&tau, TableRole::Eta);
    checks.push(table_check("eta_tau_inverse", &TriangularTable::identity(n, TableRole::Eta), &duality, tol));
    checks.extend(partial_solutions(rec, &eta, &tau, &rec_aux, tol));
    Ok(ClosedFormReport { order: n, checks })
}

/// Partial solutions as stated, each compared with the tables.
pub fn partial_solutions<S: Scalar>(
    rec: &RecurrenceCoefficients<S>,
    eta: &TriangularTable<S>,
    tau: &TriangularTable<S>,
    aux: &AuxTables<S>,
    tol: f64,
) -> Vec<ClosedFormCheck> {
    let n = eta.order();
    let (xi1, xi2, z1, z2) = (&aux.xi1, &aux.xi2, &aux.zeta1, &aux.zeta2);
    let a2 = |k: usize| rec.a_sq(k);
    let b = |k: usize| rec.b(k);
    let diag = |l: usize| (0..=n.saturating_sub(l)).filter(move |&k| k + l <= n);
    let mut out = Vec::new();

    out.push(ClosedFormCheck::run(
        "eta_sub1",
        tol,
        diag(1).map(|k| ((k + 1, k), eta.get(k + 1, k), xi2.get(k + 1, k))),
    ));
    out.push(ClosedFormCheck::run(
        "tau_sub1",
        tol,
        diag(1).map(|k| ((k + 1, k), tau.get(k + 1, k), -xi2.get(k + 1, k))),
    ));
    out.push(ClosedFormCheck::run(
        "eta_sub2",
        tol,
        diag(2).map(|k| ((k + 2, k), eta.get(k + 2, k), xi2.get(k + 2, k) + xi1.get(k + 2, k))),
    ));
    out.push(ClosedFormCheck::run(
        "tau_sub2",
        tol,
        diag(2).map(|k| ((k + 2, k), tau.get(k + 2, k), z1.get(k + 2, k) + z2.get(k + 2, k))),
    ));

    // τ_{k+3,k} = ζ⁽²⁾_{k+3,k} + ζ⁽¹⁾_{k+2,k} ζ⁽²⁾_{k+1,k} + Σ_{j=1}^{k+1} a_j² (b_{j−1} + b_j)
    out.push(ClosedFormCheck::run(
        "tau_sub3",
        tol,
        diag(3).map(|k| {
            let tail = (1..=k + 1).fold(S::zero(), |acc, j| acc + a2(j) * (b(j - 1) + b(j)));
            ((k + 3, k), tau.get(k + 3, k), z2.get(k + 3, k) + z1.get(k + 2, k) * z2.get(k + 1, k) + tail)
        }),
    ));
    // η_{k+3,k} = ξ⁽²⁾_{k+3,3} + Σ_{j=1}^{k+2} a_j² Σ_{i=0, i∉{j,j−1}}^{k+2} b_i, first index taken as stated
    out.push(ClosedFormCheck::run(
        "eta_sub3",
        tol,
        diag(3).map(|k| {
            let tail = (1..=k + 2).fold(S::zero(), |acc, j| {
                let inner = (0..=k + 2)
                    .filter(|&i| i != j && i + 1 != j)
                    .fold(S::zero(), |s, i| s + b(i));
                acc + a2(j) * inner
            });
            ((k + 3, k), eta.get(k + 3, k), xi2.get(k + 3, 3) + tail)
        }),
    ));
    // η_{k+4,k} = ξ⁽¹⁾ + ξ⁽²⁾ + Σ_{i'=1}^{k+3} Σ_{0≤i<j≤k+3, i,j∉{i',i'−1}} a_i² b_i b_j, weight index as stated
    out.push(ClosedFormCheck::run(
        "eta_sub4",
        tol,
        diag(4).map(|k| {
            let top = k + 3;
            let tail = (1..=top).fold(S::zero(), |acc, kk| {
                let excluded = |v: usize| v == kk || v + 1 == kk;
                let mut s = S::zero();
                for i in 0..=top {
                    for j in i + 1..=top {
                        if !excluded(i) && !excluded(j) {
                            s = s + a2(i) * b(i) * b(j);
                        }
                    }
                }
                acc + s
            });
            ((k + 4, k), eta.get(k + 4, k), xi1.get(k + 4, k) + xi2.get(k + 4, k) + tail)
        }),
    ));
    // τ_{k+4,k} = −η_{k+4,k} − η_{k+4,k+1}τ_{k+1,k} − η_{k+4,k+2}τ_{k+2,k} − η_{k+4,k+3}τ_{k+3,k}
    out.push(ClosedFormCheck::run(
        "tau_sub4",
        tol,
        diag(4).map(|k| {
            let v = -eta.get(k + 4, k)
                - eta.get(k + 4, k + 1) * tau.get(k + 1, k)
                - eta.get(k + 4, k + 2) * tau.get(k + 2, k)
                - eta.get(k + 4, k + 3) * tau.get(k + 3, k);
            ((k + 4, k), tau.get(k + 4, k), v)
        }),
    ));

    if rec.b_all()[..n.min(rec.b_len())].iter().all(Scalar::is_zero) {
        out.push(ClosedFormCheck::run(
            "symmetric_eta_column0",
            tol,
            (1..=n).map(|r| {
                let v = if r % 2 == 1 {
                    S::zero()
                } else {
                    let p = (1..=r / 2).fold(S::one(), |acc, j| acc * a2(2 * j - 1));
                    if (r / 2) % 2 == 1 {
                        -p
                    } else {
                        p
                    }
                };
                ((r, 0), eta.get(r, 0), v)
            }),
        ));
        out.push(table_check("symmetric_eta_is_xi1", eta, xi1, tol));
        out.push(table_check("symmetric_tau_is_zeta1", tau, z1, tol));
    } else {
        out.push(ClosedFormCheck::skipped("symmetric_eta_column0"));
        out.push(ClosedFormCheck::skipped("symmetric_eta_is_xi1"));
        out.push(ClosedFormCheck::skipped("symmetric_tau_is_zeta1"));
    }
    out
}

/// Moments `m_0..m_{count−1}` of the measure with the given recurrence.
///
/// `m_j` depends only on `a_1..a_{⌊j/2⌋}` and `b_0..b_{⌊(j−1)/2⌋}`, so only
/// those are required. The monic table used by the recursion
/// `m_j = −Σ_{k=1}^{j−1} η_{j−1,k−1} m_k` (valid for `j ≥ 3`) reaches
/// further; missing coefficients are padded with values that cannot affect
/// the result. When all `b` vanish the even moments come from the shortened
/// recursion and are checked against the general one.
pub fn moments_from_recurrence<S: Scalar>(rec: &RecurrenceCoefficients<S>, count: usize) -> Result<MomentSequence<S>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let top = count - 1;
    let need_a = top / 2;
    let need_b = if top == 0 { 0 } else { (top - 1) / 2 + 1 };
    if rec.max_a() < need_a || rec.b_len() < need_b {
        return Err(Error::OrderTooSmall {
            requested: top,
            available: (2 * rec.max_a()).min(2 * rec.b_len() + 1).min(top),
        });
    }
    let rows = top.saturating_sub(1);
    let padded = pad(&rec.a_sq_from_one()[..need_a], &rec.b_all()[..need_b], rows);
    let eta = eta_table(&padded, rows)?;

    let mut m = vec![S::one()];
    if top >= 1 {
        m.push(padded.b(0));
    }
    if top >= 2 {
        m.push(padded.b(0).square() + padded.a_sq(1));
    }
    for j in 3..=top {
        let v = (1..j).fold(S::zero(), |acc, k| {
            let c = eta.get(j - 1, k - 1);
            if c.is_zero() || m[k].is_zero() {
                acc
            } else {
                acc + c * m[k].clone()
            }
        });
        m.push(-v);
    }

    let symmetric = padded.b_all()[..need_b].iter().all(Scalar::is_zero);
    if symmetric && top >= 4 {
        let short = symmetric_moments(&padded, &eta, top);
        for (j, (g, s)) in m.iter().zip(&short).enumerate() {
            if !g.approx_eq(s, 1e-9) {
                return Err(Error::Numeric(format!("moment m{j}: general recursion {g} vs symmetric {s}")));
            }
        }
        m = short;
    }
    MomentSequence::new("from-recurrence", m)
}

fn pad<S: Scalar>(a_sq: &[S], b: &[S], rows: usize) -> RecurrenceCoefficients<S> {
    let mut a_sq = a_sq.to_vec();
    let mut b = b.to_vec();
    while a_sq.len() < rows {
        a_sq.push(S::one());
    }
    while b.len() < rows {
        b.push(S::zero());
    }
    RecurrenceCoefficients::from_a_sq(a_sq, b).expect("padding keeps a^2 positive")
}

/// Even moments of a symmetric measure:
/// `m_{2k} = (Σ_{j=1}^{2k−2} a_j²) m_{2k−2} − Σ_{j=2}^{k−1} η_{2k−1,2k−1−2j} m_{2k−2j}`, `k ≥ 2`.
fn symmetric_moments<S: Scalar>(rec: &RecurrenceCoefficients<S>, eta: &TriangularTable<S>, top: usize) -> Vec<S> {
    let mut m = vec![S::zero(); top + 1];
    m[0] = S::one();
    if top >= 2 {
        m[2] = rec.a_sq(1);
    }
    let mut prefix = rec.a_sq(1) + rec.a_sq(2);
    for k in 2..=top / 2 {
        if k > 2 {
            prefix = prefix + rec.a_sq(2 * k - 3) + rec.a_sq(2 * k - 2);
        }
        let tail = (2..k).fold(S::zero(), |acc, j| acc + eta.get(2 * k - 1, 2 * k - 1 - 2 * j) * m[2 * k - 2 * j].clone());
        m[2 * k] = prefix.clone() * m[2 * k - 2].clone() - tail;
    }
    m
}

/// Moments of a symmetric measure from the leading minors `Δ_0..Δ_n` of its
/// moment matrix: `a_k² = Δ_k Δ_{k−2} / Δ_{k−1}²`, `b ≡ 0`. Returns
/// `m_0..m_{2n}`.
pub fn moments_from_determinants<S: Scalar>(deltas: &[S]) -> Result<MomentSequence<S>> {
    let first = deltas.first().ok_or(Error::EmptyMoments)?;
    if *first != S::one() {
        return Err(Error::NotNormalized(first.to_string()));
    }
    let n = deltas.len() - 1;
    let d = |k: isize| if k < 0 { S::one() } else { deltas[k as usize].clone() };
    if let Some(k) = deltas.iter().position(|v| !v.is_positive()) {
        return Err(Error::NotPositiveDefinite { order: k });
    }
    let a_sq = (1..=n as isize).map(|k| d(k) * d(k - 2) / d(k - 1).square()).collect();
    let rec = RecurrenceCoefficients::from_a_sq(a_sq, vec![S::zero(); n])?;
    moments_from_recurrence(&rec, 2 * n + 1)
}

/// Reproducible random rational recurrence with `n` coefficients of each
/// kind: `a_k² = p/q` with `p ∈ 1..=20`, `q ∈ 1..=7`, and `b_k = p/q` with
/// `p ∈ −9..=9`, `q ∈ 1..=5` (or `b ≡ 0` when `symmetric`).
pub fn random_recurrence<S: Scalar>(seed: u64, n: usize, symmetric: bool) -> RecurrenceCoefficients<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: i64, hi: i64, den: i64| {
        let p = rng.gen_range(lo..=hi);
        let q = rng.gen_range(1..=den);
        S::from_rational(&ratio(p, q))
    };
    let a_sq = (0..n).map(|_| draw(1, 20, 7)).collect();
    let b = (0..n).map(|_| if symmetric { S::zero() } else { draw(-9, 9, 5) }).collect();
    RecurrenceCoefficients::from_a_sq(a_sq, b).expect("drawn a_k^2 are positive")
}
