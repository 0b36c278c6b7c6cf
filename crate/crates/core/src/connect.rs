//! Connection coefficients between two polynomial systems, the ribbon
//! structure of `L⁻¹(α) M(δ) L⁻ᵀ(α)`, and Fourier expansion of a
//! Radon–Nikodym derivative through moments.

use serde::Serialize;

use crate::cholesky::{TableRole, TriangularTable};
use crate::error::{Error, Result};
use crate::linalg::{mat_mul, transpose, Dense};
use crate::moments::{hankel_matrix, MomentSequence};
use crate::polysys::{PolynomialSystem, RecurrenceCoefficients};
use crate::recurrence::{eta_table, tau_table, ClosedFormCheck};
use crate::scalar::{ratio, Scalar};

/// `(index, table value, closed-form value)` triples.
type Samples<S> = Vec<((usize, usize), S, S)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Orthonormal,
    Monic,
}

/// `p_n(x, δ) = Σ_k γ_{n,k}(δ, α) p_k(x, α)` for all `n ≤ order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionTable<S> {
    pub target: String,
    pub source: String,
    pub basis: Basis,
    pub gamma: TriangularTable<S>,
}

fn require_order<S: Scalar>(sys: &PolynomialSystem<S>, n: usize) -> Result<()> {
    if sys.order() < n {
        return Err(Error::OrderTooSmall {
            requested: n,
            available: sys.order(),
        });
    }
    Ok(())
}

/// `Γ = Π(δ) Λ(α)` (orthonormal) or `η(δ) τ(α)` (monic), rows `0..=n`.
pub fn connection_table<S: Scalar>(
    target: &PolynomialSystem<S>,
    source: &PolynomialSystem<S>,
    n: usize,
    basis: Basis,
) -> Result<ConnectionTable<S>> {
    require_order(target, n)?;
    require_order(source, n)?;
    let gamma = match basis {
        Basis::Orthonormal => target.pi().truncated(n).mul(&source.lambda().truncated(n), TableRole::Connection),
        Basis::Monic => monic_connection(target.rec(), source.rec(), n)?,
    };
    Ok(ConnectionTable {
        target: target.label().to_string(),
        source: source.label().to_string(),
        basis,
        gamma,
    })
}

/// Monic connection coefficients straight from two recurrences.
pub fn monic_connection<S: Scalar>(
    target: &RecurrenceCoefficients<S>,
    source: &RecurrenceCoefficients<S>,
    n: usize,
) -> Result<TriangularTable<S>> {
    Ok(eta_table(target, n)?.mul(&tau_table(source, n)?, TableRole::Connection))
}

/// Closed forms for monic `γ_{n,k}(δ, α)`:
/// `k = n` gives 1,
/// `k = n−1` gives `Σ_{j<n} (b_j(α) − b_j(δ))`,
/// `k = n−2` gives `Σ_{j=1}^{n−1} (a_j²(α) − a_j²(δ)) + ½(Σ_{j≤n−2} Δb_j)² + ½ Σ_{j≤n−2} (b_j²(α) − b_j²(δ)) − b_{n−1}(δ) Σ_{j≤n−2} Δb_j`
/// with `Δb_j = b_j(α) − b_j(δ)`.
pub fn closed_form_gamma<S: Scalar>(
    delta: &RecurrenceCoefficients<S>,
    alpha: &RecurrenceCoefficients<S>,
    n: usize,
    k: usize,
) -> Result<S> {
    let need = |rows: usize| -> Result<()> {
        delta.require_rows(rows)?;
        alpha.require_rows(rows)
    };
    if k == n {
        return Ok(S::one());
    }
    if k + 1 == n {
        need(n)?;
        return Ok((0..n).fold(S::zero(), |acc, j| acc + alpha.b(j) - delta.b(j)));
    }
    if k + 2 == n {
        need(n)?;
        let a = (1..n).fold(S::zero(), |acc, j| acc + alpha.a_sq(j) - delta.a_sq(j));
        let db = (0..n - 1).fold(S::zero(), |acc, j| acc + alpha.b(j) - delta.b(j));
        let sq = (0..n - 1).fold(S::zero(), |acc, j| acc + alpha.b(j).square() - delta.b(j).square());
        let half = S::one() / S::from_i64(2);
        return Ok(a + half.clone() * db.square() + half * sq - delta.b(n - 1) * db);
    }
    Err(Error::Unsupported(format!("no closed form for gamma_({n},{k})")))
}

/// Special cases for two symmetric measures: `γ_{n,n} = 1` and
/// `γ_{n,n−2} = Σ_{k=1}^{n−1} (a_k²(α) − a_k²(δ))`.
pub fn symmetric_gamma<S: Scalar>(
    delta: &RecurrenceCoefficients<S>,
    alpha: &RecurrenceCoefficients<S>,
    n: usize,
    k: usize,
) -> Result<S> {
    if !delta.is_symmetric() || !alpha.is_symmetric() {
        return Err(Error::Unsupported("both measures must be symmetric".into()));
    }
    if k == n {
        return Ok(S::one());
    }
    if k + 2 == n {
        delta.require_rows(n)?;
        alpha.require_rows(n)?;
        return Ok((1..n).fold(S::zero(), |acc, j| acc + alpha.a_sq(j) - delta.a_sq(j)));
    }
    Err(Error::Unsupported(format!("only gamma_(n,n) and gamma_(n,n-2) are supported, got ({n},{k})")))
}

/// Compares the closed forms against the monic connection table, rows
/// `0..=n`.
pub fn verify_connection_closed_forms<S: Scalar>(
    delta: &RecurrenceCoefficients<S>,
    alpha: &RecurrenceCoefficients<S>,
    n: usize,
    tol: f64,
) -> Result<Vec<ClosedFormCheck>> {
    let g = monic_connection(delta, alpha, n)?;
    let sub = |d: usize| -> Result<Samples<S>> {
        (d..=n)
            .map(|r| Ok(((r, r - d), g.get(r, r - d), closed_form_gamma(delta, alpha, r, r - d)?)))
            .collect()
    };
    let mut out = vec![
        ClosedFormCheck::run("gamma_sub1", tol, sub(1)?),
        ClosedFormCheck::run("gamma_sub2", tol, sub(2)?),
    ];
    if delta.is_symmetric() && alpha.is_symmetric() {
        let diag: Result<Vec<_>> = (0..=n)
            .map(|r| Ok(((r, r), g.get(r, r), symmetric_gamma(delta, alpha, r, r)?)))
            .collect();
        out.push(ClosedFormCheck::run("symmetric_gamma_diagonal", tol, diag?));
        let two: Result<Vec<_>> = (2..=n)
            .map(|r| Ok(((r, r - 2), g.get(r, r - 2), symmetric_gamma(delta, alpha, r, r - 2)?)))
            .collect();
        out.push(ClosedFormCheck::run("symmetric_gamma_sub2", tol, two?));
        let odd = (1..=n).flat_map(|r| (0..r).filter(move |c| (r - c) % 2 == 1).map(move |c| (r, c)));
        out.push(ClosedFormCheck::run("symmetric_gamma_odd_gaps", tol, odd.map(|(r, c)| ((r, c), g.get(r, c), S::zero()))));
    }
    Ok(out)
}

/// Ribbon structure of `Π(α) M(δ) Π(α)ᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RibbonReport<S> {
    pub r: usize,
    pub order: usize,
    pub ribbon: bool,
    /// Largest `|entry|` with `|i − j| > r`.
    pub max_off_ribbon: f64,
    pub matrix: Dense<S>,
}

/// Forms `L⁻¹(α) M_n(δ) L⁻ᵀ(α)` and checks that entries with `|i − j| > r`
/// vanish. The hypothesis `dα/dδ = 1/Q_r` is the caller's to guarantee.
pub fn ribbon_check<S: Scalar>(alpha: &PolynomialSystem<S>, delta: &MomentSequence<S>, r: usize, n: usize) -> Result<RibbonReport<S>> {
    require_order(alpha, n)?;
    let pi = alpha.pi().truncated(n).to_dense();
    let m = hankel_matrix(delta, n)?;
    let matrix = mat_mul(&mat_mul(&pi, m.entries()), &transpose(&pi));
    let mut max_off = 0.0f64;
    let mut ribbon = true;
    for (i, row) in matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i.abs_diff(j) > r {
                max_off = max_off.max(v.to_f64().abs());
                ribbon &= v.is_zero();
            }
        }
    }
    Ok(RibbonReport {
        r,
        order: n,
        ribbon: if S::EXACT { ribbon } else { max_off <= 1e-9 },
        max_off_ribbon: max_off,
        matrix,
    })
}

/// Built-in pair: `α` uniform on `[−1, 1]`, `δ` with density `(3/8)(1 + x²)`,
/// so that `dα/dδ = (4/3)/(1 + x²)`. Returns `(α, δ)` moments `m_0..m_{2n}`.
pub fn builtin_ribbon_pair<S: Scalar>(n: usize) -> Result<(MomentSequence<S>, MomentSequence<S>)> {
    let count = 2 * n + 1;
    let even = |k: i64, f: &dyn Fn(i64) -> S| if k % 2 == 1 { S::zero() } else { f(k / 2) };
    let alpha = (0..count as i64)
        .map(|k| even(k, &|h| S::from_rational(&ratio(1, 2 * h + 1))))
        .collect();
    // (3/4)(1/(2h+1) + 1/(2h+3))
    let delta = (0..count as i64)
        .map(|k| {
            even(k, &|h| {
                S::from_rational(&(ratio(3, 4) * (ratio(1, 2 * h + 1) + ratio(1, 2 * h + 3))))
            })
        })
        .collect();
    Ok((
        MomentSequence::new("uniform", alpha)?,
        MomentSequence::new("uniform-times-1-plus-x2", delta)?,
    ))
}

/// Fourier coefficients of `dα/dδ` in the orthonormal basis of `δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RnExpansion<S> {
    /// `ω_j = E_α p_j(Z, δ) = Σ_k π_{j,k}(δ) m_k(α)`.
    pub omega: Vec<S>,
    /// `Σ_{i≤j} ω_i²`.
    pub parseval: Vec<S>,
    /// `∫ (dα/dδ)² dδ` when supplied.
    pub target: Option<f64>,
    /// `target − Σ_{j≤N} ω_j²`.
    pub bessel_residual: Option<f64>,
    /// `Σ ω_j² ln²(j+1)`, the Rademacher–Menshov weighted sum over the
    /// computed coefficients.
    pub log_weighted_sum: f64,
}

/// `ω_0..ω_n` from the moments of `α` and the system of `δ`.
pub fn rn_expansion<S: Scalar>(
    alpha: &MomentSequence<S>,
    delta: &PolynomialSystem<S>,
    n: usize,
    target: Option<f64>,
) -> Result<RnExpansion<S>> {
    require_order(delta, n)?;
    if alpha.max_index() < n {
        return Err(Error::InsufficientMoments {
            needed: n,
            available: alpha.max_index(),
        });
    }
    let m = alpha.moments();
    let omega: Vec<S> = (0..=n)
        .map(|j| {
            delta.pi().row(j).iter().zip(m).fold(S::zero(), |acc, (p, mk)| {
                if p.is_zero() || mk.is_zero() {
                    acc
                } else {
                    acc + p.clone() * mk.clone()
                }
            })
        })
        .collect();
    let mut acc = S::zero();
    let parseval: Vec<S> = omega
        .iter()
        .map(|w| {
            acc = acc.clone() + w.square();
            acc.clone()
        })
        .collect();
    let log_weighted_sum = omega
        .iter()
        .enumerate()
        .map(|(j, w)| w.to_f64().powi(2) * ((j + 1) as f64).ln().powi(2))
        .sum();
    let bessel_residual = target.map(|t| t - parseval[n].to_f64());
    Ok(RnExpansion {
        omega,
        parseval,
        target,
        bessel_residual,
        log_weighted_sum,
    })
}

/// `∫ (dα/dδ)² dδ = 32/(3π²)` for α the semicircle law and δ the uniform
/// law on `[−1, 1]`.
pub fn semicircle_over_uniform_target() -> f64 {
    32.0 / (3.0 * std::f64::consts::PI.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{make_moments, Family, FamilySpec};
    use crate::polysys::build_system;
    use crate::recurrence::moments_from_recurrence;
    use crate::scalar::Surd;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sys(f: Family, n: usize) -> PolynomialSystem<Surd> {
        build_system(&make_moments(&FamilySpec::new(f, 2 * n + 1)).unwrap(), n).unwrap()
    }

    fn q(p: i64, d: i64) -> Surd {
        Surd::rational(ratio(p, d))
    }

    fn random_rec(rng: &mut ChaCha8Rng, n: usize, symmetric: bool) -> RecurrenceCoefficients<Surd> {
        let a = (0..n).map(|_| q(rng.gen_range(1..=12), rng.gen_range(1..=5))).collect();
        let b = (0..n)
            .map(|_| if symmetric { Surd::zero() } else { q(rng.gen_range(-6..=6), rng.gen_range(1..=4)) })
            .collect();
        RecurrenceCoefficients::from_a_sq(a, b).unwrap()
    }

    #[test]
    fn identical_systems_give_identity() {
        let u = sys(Family::Uniform, 5);
        for basis in [Basis::Orthonormal, Basis::Monic] {
            let c = connection_table(&u, &u, 5, basis).unwrap();
            assert_eq!(c.gamma.rows(), TriangularTable::<Surd>::identity(5, TableRole::Connection).rows());
        }
    }

    #[test]
    fn chebyshev_to_uniform_monic() {
        let c = sys(Family::Chebyshev1, 4);
        let u = sys(Family::Uniform, 4);
        let g = connection_table(&c, &u, 4, Basis::Monic).unwrap().gamma;
        assert_eq!(g.get(2, 0), q(-1, 6));
        for n in 1..=4 {
            assert_eq!(g.get(n, n - 1), Surd::zero());
            assert_eq!(g.get(n, n), Surd::one());
        }
        assert!(matches!(connection_table(&c, &u, 5, Basis::Monic), Err(Error::OrderTooSmall { .. })));
    }

    #[test]
    fn gamma_first_column_is_expectation() {
        let s = sys(Family::Semicircle, 6);
        let u = sys(Family::Uniform, 6);
        let g = connection_table(&u, &s, 6, Basis::Orthonormal).unwrap().gamma;
        let rn = rn_expansion(s.moments(), &u, 6, None).unwrap();
        for j in 0..=6 {
            assert_eq!(rn.omega[j], g.get(j, 0));
        }
        assert_eq!(rn.omega[0], Surd::one());
        assert_eq!(rn.omega[1], Surd::zero());
    }

    #[test]
    fn closed_forms_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_rec(&mut rng, 6, false);
        assert_eq!(closed_form_gamma(&r, &r, 5, 4).unwrap(), Surd::zero());
        assert!(matches!(closed_form_gamma(&r, &r, 5, 1), Err(Error::Unsupported(_))));
        let d = random_rec(&mut rng, 8, true);
        let a = random_rec(&mut rng, 8, true);
        let g = monic_connection(&d, &a, 8).unwrap();
        for n in 2..=8 {
            assert_eq!(g.get(n, n - 2), symmetric_gamma(&d, &a, n, n - 2).unwrap());
        }
        for c in verify_connection_closed_forms(&d, &a, 8, 0.0).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn ribbon_examples() {
        let (a, d) = builtin_ribbon_pair::<Surd>(8).unwrap();
        assert_eq!(d.moments()[0], Surd::one());
        let alpha = build_system(&a, 8).unwrap();
        let yes = ribbon_check(&alpha, &d, 2, 8).unwrap();
        assert!(yes.ribbon);
        assert_eq!(yes.max_off_ribbon, 0.0);
        let no = ribbon_check(&alpha, &d, 1, 8).unwrap();
        assert!(!no.ribbon);
        assert!(no.matrix[2][0].to_f64().abs() > 0.0);
        let same = ribbon_check(&alpha, &a, 0, 8).unwrap();
        assert!(same.ribbon);
        assert_eq!(same.matrix[3][3], Surd::one());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn transitivity_and_inverse(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let systems: Vec<_> = (0..3)
                .map(|_| {
                    let r = random_rec(&mut rng, n, false);
                    build_system(&moments_from_recurrence(&r, 2 * n + 1).unwrap(), n).unwrap()
                })
                .collect();
            let g = |i: usize, j: usize| connection_table(&systems[i], &systems[j], n, Basis::Orthonormal).unwrap().gamma;
            prop_assert!(g(0, 1).mul(&g(1, 2), TableRole::Connection).rows() == g(0, 2).rows());
            prop_assert!(g(0, 1).mul(&g(1, 0), TableRole::Connection).rows() == TriangularTable::<Surd>::identity(n, TableRole::Connection).rows());
            let r0 = systems[0].rec();
            let r1 = systems[1].rec();
            for c in verify_connection_closed_forms(r0, r1, n, 0.0).unwrap() {
                prop_assert!(c.passed(), "{:?}", c);
            }
        }
    }
}
