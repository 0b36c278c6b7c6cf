//! The orthonormal polynomial system of a measure: coefficient tables,
//! recurrence coefficients, evaluation, associated polynomials, the
//! reproducing kernel and finite-order spectral identities.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::cholesky::{cholesky_decompose, invert_lower_triangular, TableRole, TriangularTable};
use crate::error::{Error, Result};
use crate::linalg::{dot, invert, mat_vec, Dense};
use crate::moments::{hankel_matrix, HankelMoments, MomentSequence};
use crate::scalar::Scalar;

/// Coefficients of `x·p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n−1}`.
///
/// Stores squares `a_n²` (rational whenever the moments are) with
/// `a_0² = 0`; `a_n` itself is a square root on demand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceCoefficients<S> {
    a_sq: Vec<S>,
    b: Vec<S>,
}

impl<S: Scalar> RecurrenceCoefficients<S> {
    /// From `a_1², a_2², …` and `b_0, b_1, …`; every `a_k²` must be positive.
    pub fn from_a_sq(a_sq: Vec<S>, b: Vec<S>) -> Result<Self> {
        if let Some(k) = a_sq.iter().position(|v| !v.is_positive()) {
            return Err(Error::InvalidParameter(format!("a_{}^2 = {} is not positive", k + 1, a_sq[k])));
        }
        let mut full = Vec::with_capacity(a_sq.len() + 1);
        full.push(S::zero());
        full.extend(a_sq);
        Ok(RecurrenceCoefficients { a_sq: full, b })
    }

    /// Largest `k` with `a_k` available.
    pub fn max_a(&self) -> usize {
        self.a_sq.len() - 1
    }

    /// Number of available `b_k` (indices `0..b_len`).
    pub fn b_len(&self) -> usize {
        self.b.len()
    }

    /// Largest order `n` for which `a_1..a_{n−1}` and `b_0..b_{n−1}` exist,
    /// i.e. enough to build monic rows `0..=n`.
    pub fn max_row(&self) -> usize {
        self.b.len().min(self.max_a() + 1)
    }

    /// `a_k²`, with `a_0² = 0`.
    pub fn a_sq(&self, k: usize) -> S {
        self.a_sq[k].clone()
    }

    pub fn a(&self, k: usize) -> S {
        self.a_sq[k].sqrt().expect("a_k^2 is nonnegative")
    }

    pub fn b(&self, k: usize) -> S {
        self.b[k].clone()
    }

    /// `a_1², a_2², …`.
    pub fn a_sq_from_one(&self) -> &[S] {
        &self.a_sq[1..]
    }

    pub fn b_all(&self) -> &[S] {
        &self.b
    }

    pub fn is_symmetric(&self) -> bool {
        self.b.iter().all(Scalar::is_zero)
    }

    /// First `rows` coefficients of each kind: `a_1..a_{rows}`, `b_0..b_{rows−1}`.
    pub fn truncated(&self, rows: usize) -> Result<Self> {
        if rows > self.max_a() || rows > self.b.len() {
            return Err(Error::OrderTooSmall {
                requested: rows,
                available: self.max_a().min(self.b.len()),
            });
        }
        Ok(RecurrenceCoefficients {
            a_sq: self.a_sq[..=rows].to_vec(),
            b: self.b[..rows].to_vec(),
        })
    }

    pub(crate) fn require_rows(&self, n: usize) -> Result<()> {
        // rows 0..=n need b_0..b_{n−1} and a_1..a_{n−1}
        if n > self.max_row() {
            return Err(Error::OrderTooSmall {
                requested: n,
                available: self.max_row(),
            });
        }
        Ok(())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RecurrenceCoefficients<T> {
        RecurrenceCoefficients {
            a_sq: self.a_sq.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
        }
    }
}

/// Orthonormal polynomials `p_0..p_n` of a moment sequence.
///
/// `Π = L⁻¹` holds the power coefficients (`p_i = Σ π_{i,j} x^j`) and
/// `Λ = L` expands monomials back (`x^i = Σ λ_{i,j} p_j`).
#[derive(Debug, Clone)]
pub struct PolynomialSystem<S> {
    moments: MomentSequence<S>,
    hankel: HankelMoments<S>,
    l: TriangularTable<S>,
    pi: TriangularTable<S>,
    lambda: TriangularTable<S>,
    rec: RecurrenceCoefficients<S>,
}

impl<S: Scalar> PolynomialSystem<S> {
    pub fn order(&self) -> usize {
        self.l.order()
    }
    pub fn moments(&self) -> &MomentSequence<S> {
        &self.moments
    }
    pub fn hankel(&self) -> &HankelMoments<S> {
        &self.hankel
    }
    pub fn l(&self) -> &TriangularTable<S> {
        &self.l
    }
    pub fn pi(&self) -> &TriangularTable<S> {
        &self.pi
    }
    pub fn lambda(&self) -> &TriangularTable<S> {
        &self.lambda
    }
    /// `a_1..a_n`, `b_0..b_{n−1}`.
    pub fn rec(&self) -> &RecurrenceCoefficients<S> {
        &self.rec
    }
    pub fn label(&self) -> &str {
        self.moments.label()
    }
}

/// Factorises `M_n`, inverts the factor and reads off the recurrence.
pub fn build_system<S: Scalar>(m: &MomentSequence<S>, n: usize) -> Result<PolynomialSystem<S>> {
    let hankel = hankel_matrix(m, n)?;
    let l = cholesky_decompose(&hankel)?;
    let pi = invert_lower_triangular(&l)?;
    let rec = recurrence_from_pi(&pi)?;
    Ok(PolynomialSystem {
        moments: m.clone(),
        hankel,
        lambda: l.clone().with_role(TableRole::Lambda),
        l,
        pi,
        rec,
    })
}

fn recurrence_from_pi<S: Scalar>(pi: &TriangularTable<S>) -> Result<RecurrenceCoefficients<S>> {
    let n = pi.order();
    // a_k = π_{k−1,k−1}/π_{k,k}
    let a_sq = (1..=n)
        .map(|k| (pi.get(k - 1, k - 1) / pi.get(k, k)).square())
        .collect();
    // b_k = π_{k,k−1}/π_{k,k} − π_{k+1,k}/π_{k+1,k+1}
    let ratio = |k: usize| {
        if k == 0 {
            S::zero()
        } else {
            pi.get(k, k - 1) / pi.get(k, k)
        }
    };
    let b = (0..n).map(|k| ratio(k) - ratio(k + 1)).collect();
    RecurrenceCoefficients::from_a_sq(a_sq, b)
}

/// Recurrence coefficients from the `Π` table (the system's own coefficients).
pub fn recurrence_from_tables<S: Scalar>(sys: &PolynomialSystem<S>) -> Result<RecurrenceCoefficients<S>> {
    recurrence_from_pi(&sys.pi)
}

/// The same coefficients from leading minors and the Cholesky factor:
/// `a_n² = Δ_n Δ_{n−2} / Δ_{n−1}²` (with `Δ_{−1} = 1`) and
/// `b_n = l_{n+1,n}/l_{n,n} − l_{n,n−1}/l_{n−1,n−1}`.
pub fn recurrence_from_deltas<S: Scalar>(sys: &PolynomialSystem<S>) -> Result<RecurrenceCoefficients<S>> {
    let n = sys.order();
    let d = sys.hankel.deltas();
    let delta = |k: isize| if k < 0 { S::one() } else { d[k as usize].clone() };
    let a_sq = (1..=n as isize)
        .map(|k| delta(k) * delta(k - 2) / delta(k - 1).square())
        .collect();
    let l = &sys.l;
    let ratio = |k: usize| {
        if k == 0 {
            S::zero()
        } else {
            l.get(k, k - 1) / l.get(k - 1, k - 1)
        }
    };
    let b = (0..n).map(|k| ratio(k + 1) - ratio(k)).collect();
    RecurrenceCoefficients::from_a_sq(a_sq, b)
}

fn check_index<S: Scalar>(sys: &PolynomialSystem<S>, k: usize) -> Result<()> {
    if k > sys.order() {
        return Err(Error::OrderTooSmall {
            requested: k,
            available: sys.order(),
        });
    }
    Ok(())
}

/// `p_0(x)..p_k(x)` by the forward recurrence.
pub fn eval_all<S: Scalar>(sys: &PolynomialSystem<S>, k: usize, x: &S) -> Result<Vec<S>> {
    check_index(sys, k)?;
    let rec = &sys.rec;
    let mut out = vec![S::one()];
    for j in 0..k {
        let prev = if j == 0 {
            S::zero()
        } else {
            rec.a(j) * out[j - 1].clone()
        };
        let next = ((x.clone() - rec.b(j)) * out[j].clone() - prev) / rec.a(j + 1);
        out.push(next);
    }
    Ok(out)
}

/// `p_k(x)` by the forward recurrence.
pub fn eval_poly<S: Scalar>(sys: &PolynomialSystem<S>, k: usize, x: &S) -> Result<S> {
    Ok(eval_all(sys, k, x)?.pop().expect("nonempty"))
}

/// Monic `p̃_k(x)`: `p̃_{j+1} = (x − b_j) p̃_j − a_j² p̃_{j−1}`.
pub fn eval_monic<S: Scalar>(sys: &PolynomialSystem<S>, k: usize, x: &S) -> Result<S> {
    check_index(sys, k)?;
    Ok(eval_monic_rec(&sys.rec, k, x))
}

pub(crate) fn eval_monic_rec<S: Scalar>(rec: &RecurrenceCoefficients<S>, k: usize, x: &S) -> S {
    let (mut prev, mut cur) = (S::zero(), S::one());
    for j in 0..k {
        let next = (x.clone() - rec.b(j)) * cur.clone() - rec.a_sq(j) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Σ_i t_{k,i} x^i` by Horner's rule.
pub fn eval_row<S: Scalar>(t: &TriangularTable<S>, k: usize, x: &S) -> S {
    t.row(k)
        .iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Power coefficients of the associated polynomials `q_0..q_n`:
/// `q_n(x) = Σ_{k<n} x^k Σ_{j>k} π_{n,j} m_{j−1−k}`.
pub fn associated_polys<S: Scalar>(sys: &PolynomialSystem<S>) -> TriangularTable<S> {
    let n = sys.order();
    let m = sys.moments.moments();
    let rows = (0..=n)
        .map(|r| {
            (0..=r)
                .map(|k| {
                    (k + 1..=r).fold(S::zero(), |acc, j| {
                        let c = sys.pi.get(r, j);
                        if c.is_zero() || m[j - 1 - k].is_zero() {
                            acc
                        } else {
                            acc + c * m[j - 1 - k].clone()
                        }
                    })
                })
                .collect()
        })
        .collect();
    TriangularTable::from_rows(TableRole::Associated, rows)
}

/// `q_0(x)..q_k(x)` by the recurrence started at `q_0 = 0`, `q_1 = 1/a_1`.
pub fn eval_associated<S: Scalar>(sys: &PolynomialSystem<S>, k: usize, x: &S) -> Result<Vec<S>> {
    check_index(sys, k)?;
    let rec = &sys.rec;
    let mut out = vec![S::zero()];
    if k >= 1 {
        out.push(S::one() / rec.a(1));
    }
    for j in 1..k {
        let next = ((x.clone() - rec.b(j)) * out[j].clone() - rec.a(j) * out[j - 1].clone()) / rec.a(j + 1);
        out.push(next);
    }
    Ok(out)
}

/// `K_n(x, y) = Σ_{i≤n} p_i(x) p_i(y)`.
pub fn kernel<S: Scalar>(sys: &PolynomialSystem<S>, x: &S, y: &S) -> Result<S> {
    let n = sys.order();
    let px = eval_all(sys, n, x)?;
    let py = eval_all(sys, n, y)?;
    Ok(dot(&px, &py))
}

/// `1 / K_n(x, x)`.
pub fn christoffel<S: Scalar>(sys: &PolynomialSystem<S>, x: &S) -> Result<S> {
    Ok(S::one() / kernel(sys, x, x)?)
}

fn powers<S: Scalar>(x: &S, n: usize) -> Vec<S> {
    let mut v = Vec::with_capacity(n + 1);
    let mut acc = S::one();
    for _ in 0..=n {
        v.push(acc.clone());
        acc = acc * x.clone();
    }
    v
}

/// `Xᵀ M_n⁻¹ Y` with `M_n⁻¹` from elimination on the moment matrix.
pub fn kernel_via_inverse<S: Scalar>(sys: &PolynomialSystem<S>, x: &S, y: &S) -> Result<S> {
    let inv = invert(sys.hankel.entries())?;
    let n = sys.order();
    Ok(dot(&powers(x, n), &mat_vec(&inv, &powers(y, n))))
}

/// One line of a finite-order identity report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl IdentityCheck {
    fn compare<S: Scalar>(name: &'static str, lhs: &S, rhs: &S, tol: f64) -> Self {
        IdentityCheck {
            name,
            lhs: lhs.to_f64(),
            rhs: rhs.to_f64(),
            holds: lhs.approx_eq(rhs, tol),
        }
    }

    fn compare_f64(name: &'static str, lhs: f64, rhs: f64, tol: f64) -> Self {
        IdentityCheck {
            name,
            lhs,
            rhs,
            holds: (lhs - rhs).abs() <= tol * 1f64.max(lhs.abs()).max(rhs.abs()),
        }
    }

    fn bound(name: &'static str, lower: f64, upper: f64) -> Self {
        IdentityCheck {
            name,
            lhs: lower,
            rhs: upper,
            holds: lower <= upper,
        }
    }
}

/// Eigenvalues of `M_n` and the finite-order identities relating them to
/// the polynomial system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDiagnostics<S> {
    pub order: usize,
    /// Ascending; float backend only.
    pub eigenvalues: Option<Vec<f64>>,
    /// `max_j ‖M v_j − ξ_j v_j‖ / ‖M‖`.
    pub eigen_residual: Option<f64>,
    /// `μ^{(n)}_{i,j}`, entries of `M_n⁻¹`.
    pub inverse: Dense<S>,
    pub checks: Vec<IdentityCheck>,
    /// `(Σ_{j=1}^{n−1} m_j²/ξ_max, Σ q_j(0)², Σ_{j=1}^{n−1} m_j²/ξ_min)`;
    /// informational, the bound is not asserted.
    pub associated_sandwich: Option<(f64, f64, f64)>,
}

impl<S> SpectralDiagnostics<S> {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Residual tolerance of the eigen-decomposition, relative to `‖M‖`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Ascending eigenvalues of a symmetric matrix with the decomposition's
/// relative residual.
pub fn symmetric_eigenvalues(m: &Dense<f64>) -> Result<(Vec<f64>, f64)> {
    let n = m.len();
    let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let norm = mat.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let eig = SymmetricEigen::new(mat.clone());
    let mut residual = 0.0f64;
    for (j, &xi) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(j);
        let r = (&mat * v - v * xi).amax();
        residual = residual.max(r / norm.max(f64::MIN_POSITIVE));
    }
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::Numeric(format!("eigen residual {residual:e} exceeds {EIGEN_RESIDUAL_TOL:e}")));
    }
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok((values, residual))
}

/// Checks the finite-order identities at the system's order.
///
/// Exact identities (inverse, `Σ p_j(0)² = μ_{0,0}`, the associated
/// polynomial sums) are compared with `tol` (exact equality for exact
/// backends). Eigenvalue identities need the float backend.
pub fn diagnostics<S: Scalar>(sys: &PolynomialSystem<S>, tol: f64) -> Result<SpectralDiagnostics<S>> {
    let n = sys.order();
    let m = sys.moments.moments();
    let inverse = invert(sys.hankel.entries())?;
    let mut checks = Vec::new();

    // Πᵀ Π = M⁻¹
    let ptp = sys.pi.gram_transposed();
    let inv_ok = (0..=n).all(|i| (0..=n).all(|j| ptp[i][j].approx_eq(&inverse[i][j], tol)));
    checks.push(IdentityCheck {
        name: "pi_t_pi_is_inverse",
        lhs: crate::linalg::max_abs(&ptp),
        rhs: crate::linalg::max_abs(&inverse),
        holds: inv_ok,
    });

    let trace_inv = (0..=n).fold(S::zero(), |acc, i| acc + inverse[i][i].clone());
    let trace_pp = sys.pi.rows().iter().flatten().fold(S::zero(), |acc, v| acc + v.square());
    checks.push(IdentityCheck::compare("trace_pi_pi_t_eq_trace_inverse", &trace_pp, &trace_inv, tol));

    let zero = S::zero();
    let p0 = eval_all(sys, n, &zero)?;
    let sum_p0 = dot(&p0, &p0);
    checks.push(IdentityCheck::compare("sum_p_sq_at_0_eq_mu00", &sum_p0, &inverse[0][0], tol));

    // Q(0) = Π v with v = (0, m_0, …, m_{n−1})
    let q0 = eval_associated(sys, n, &zero)?;
    let v: Vec<S> = (0..=n).map(|i| if i == 0 { S::zero() } else { m[i - 1].clone() }).collect();
    let sum_q0 = dot(&q0, &q0);
    let quad = dot(&v, &mat_vec(&inverse, &v));
    checks.push(IdentityCheck::compare("sum_q_sq_at_0_eq_quadratic_form", &sum_q0, &quad, tol));
    let sum_qp = dot(&q0, &p0);
    let cross = (1..=n).fold(S::zero(), |acc, j| acc + m[j - 1].clone() * inverse[0][j].clone());
    checks.push(IdentityCheck::compare("sum_qp_at_0_eq_cross_term", &sum_qp, &cross, tol));

    let (eigenvalues, eigen_residual, associated_sandwich) = if S::EXACT {
        (None, None, None)
    } else {
        let mf: Dense<f64> = sys
            .hankel
            .entries()
            .iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect();
        let (xi, residual) = symmetric_eigenvalues(&mf)?;
        let (lo, hi) = (xi[0], xi[n]);
        let trace_m: f64 = (0..=n).map(|i| m[2 * i].to_f64()).sum();
        checks.push(IdentityCheck::compare_f64("trace_moments_eq_sum_eigenvalues", trace_m, xi.iter().sum(), tol));
        let recip: f64 = xi.iter().map(|v| 1.0 / v).sum();
        checks.push(IdentityCheck::compare_f64("trace_inverse_eq_sum_reciprocal_eigenvalues", trace_inv.to_f64(), recip, tol));
        let mu00 = inverse[0][0].to_f64();
        let slack = tol * mu00.abs();
        checks.push(IdentityCheck::bound("mu00_lower_bound", 1.0 / hi - slack, mu00));
        checks.push(IdentityCheck::bound("mu00_upper_bound", mu00, 1.0 / lo + slack));
        let s: f64 = (1..n).map(|j| m[j].to_f64().powi(2)).sum();
        (Some(xi), Some(residual), Some((s / hi, sum_q0.to_f64(), s / lo)))
    };

    Ok(SpectralDiagnostics {
        order: n,
        eigenvalues,
        eigen_residual,
        inverse,
        checks,
        associated_sandwich,
    })
}

/// Eigenvalue bounds on the kernel at one pair of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelBounds {
    pub kernel: f64,
    /// `√((1+…+x^{2n})(1+…+y^{2n})) / ξ_min`.
    pub kernel_bound: f64,
    pub christoffel: f64,
    /// `ξ_min / (1+…+x^{2n})`.
    pub christoffel_lower: f64,
    /// `ξ_max / (1+…+x^{2n})`.
    pub christoffel_upper: f64,
    pub holds: bool,
}

/// Evaluates the eigenvalue sandwich for `K_n(x, y)` and `1/K_n(x, x)`.
pub fn kernel_bounds(sys: &PolynomialSystem<f64>, eigenvalues: &[f64], x: f64, y: f64, tol: f64) -> Result<KernelBounds> {
    let n = sys.order();
    let (lo, hi) = (eigenvalues[0], eigenvalues[n]);
    let sx: f64 = (0..=n).map(|i| x.powi(2 * i as i32)).sum();
    let sy: f64 = (0..=n).map(|i| y.powi(2 * i as i32)).sum();
    let k = kernel(sys, &x, &y)?;
    let c = christoffel(sys, &x)?;
    let kernel_bound = (sx * sy).sqrt() / lo;
    let (cl, cu) = (lo / sx, hi / sx);
    let slack = |v: f64| tol * v.abs().max(1.0);
    let holds = k.abs() <= kernel_bound + slack(kernel_bound) && cl - slack(cl) <= c && c <= cu + slack(cu);
    Ok(KernelBounds {
        kernel: k,
        kernel_bound,
        christoffel: c,
        christoffel_lower: cl,
        christoffel_upper: cu,
        holds,
    })
}

/// Product of two coefficient vectors.
pub fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

/// `Σ c_k m_k`, the moment functional applied to a polynomial.
pub fn moment_functional<S: Scalar>(coeffs: &[S], m: &[S]) -> Result<S> {
    if coeffs.len() > m.len() {
        return Err(Error::InsufficientMoments {
            needed: coeffs.len() - 1,
            available: m.len().saturating_sub(1),
        });
    }
    Ok(dot(coeffs, &m[..coeffs.len()]))
}
