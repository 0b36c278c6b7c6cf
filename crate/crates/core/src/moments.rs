//! Moment sequences, the catalog of test measures, and Hankel moment matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cholesky::cholesky_decompose;
use crate::error::{Error, Result};
use crate::linalg::{leading_minors, Dense};
use crate::polysys::RecurrenceCoefficients;
use crate::recurrence::moments_from_recurrence;
use crate::scalar::{format_rational, Scalar};

/// Finite moment sequence `m_0..m_N` of a normalized measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<S> {
    label: String,
    moments: Vec<S>,
}

impl<S: Scalar> MomentSequence<S> {
    /// Validates `m_0 = 1` and non-emptiness.
    pub fn new(label: impl Into<String>, moments: Vec<S>) -> Result<Self> {
        let first = moments.first().ok_or(Error::EmptyMoments)?;
        if *first != S::one() {
            // floats read from files are compared exactly too: m0 is a
            // normalization convention, not a measured quantity
            return Err(Error::NotNormalized(first.to_string()));
        }
        Ok(MomentSequence {
            label: label.into(),
            moments,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn moments(&self) -> &[S] {
        &self.moments
    }

    /// Highest available moment index `N`.
    pub fn max_index(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, k: usize) -> Result<&S> {
        self.moments.get(k).ok_or(Error::InsufficientMoments {
            needed: k,
            available: self.max_index(),
        })
    }

    /// Largest Hankel order `n` with `2n ≤ N`.
    pub fn max_order(&self) -> usize {
        self.max_index() / 2
    }

    pub fn is_symmetric(&self) -> bool {
        self.moments.iter().skip(1).step_by(2).all(Scalar::is_zero)
    }

    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.moments.len() {
            return Err(Error::InsufficientMoments {
                needed: count.saturating_sub(1),
                available: self.max_index(),
            });
        }
        Ok(MomentSequence {
            label: self.label.clone(),
            moments: self.moments[..count].to_vec(),
        })
    }

    /// Converts between backends through `f64`/rational conversion.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MomentSequence<T> {
        MomentSequence {
            label: self.label.clone(),
            moments: self.moments.iter().map(f).collect(),
        }
    }
}

/// Catalog of measures with known moments.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Caller-supplied moments.
    Explicit(Vec<BigRational>),
    /// Standard normal, `m_{2k} = (2k−1)!!`.
    Gaussian,
    /// Uniform on `[−1, 1]`, `m_{2k} = 1/(2k+1)`.
    Uniform,
    /// Wigner semicircle on `[−1, 1]`, `m_{2k} = C_k / 4^k`.
    Semicircle,
    /// Arcsine law on `[−1, 1]` (Chebyshev first kind), `m_{2k} = C(2k,k) / 4^k`.
    Chebyshev1,
    /// Moments of the measure with the given recurrence coefficients.
    /// `a_sq` lists `a_1², a_2², …`.
    FromRecurrence { a_sq: Vec<BigRational>, b: Vec<BigRational> },
    /// Continuous q-Hermite measure, `a_n² = [n]_q`, `b ≡ 0`.
    QHermite { q: BigRational },
}

impl Family {
    /// Parses a family name; parameters are attached separately.
    pub fn from_name(name: &str, q: Option<BigRational>) -> Result<Self> {
        match name {
            "gaussian" => Ok(Family::Gaussian),
            "uniform" => Ok(Family::Uniform),
            "semicircle" => Ok(Family::Semicircle),
            "chebyshev1" => Ok(Family::Chebyshev1),
            "q-hermite" => {
                let q = q.ok_or_else(|| Error::InvalidParameter("q-hermite needs q".into()))?;
                Ok(Family::QHermite { q })
            }
            "explicit" | "from-recurrence" => Err(Error::InvalidParameter(format!(
                "family `{name}` needs data, not just a name"
            ))),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Explicit(_) => "explicit",
            Family::Gaussian => "gaussian",
            Family::Uniform => "uniform",
            Family::Semicircle => "semicircle",
            Family::Chebyshev1 => "chebyshev1",
            Family::FromRecurrence { .. } => "from-recurrence",
            Family::QHermite { .. } => "q-hermite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub count: usize,
}

impl FamilySpec {
    pub fn new(family: Family, count: usize) -> Self {
        FamilySpec { family, count }
    }
}

/// Produces `m_0..m_{count−1}` for a catalog family.
pub fn make_moments<S: Scalar>(spec: &FamilySpec) -> Result<MomentSequence<S>> {
    if spec.count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let label = spec.family.name();
    let rational: Vec<BigRational> = match &spec.family {
        Family::Explicit(values) => {
            if values.len() < spec.count {
                return Err(Error::InsufficientMoments {
                    needed: spec.count - 1,
                    available: values.len().saturating_sub(1),
                });
            }
            values[..spec.count].to_vec()
        }
        Family::Gaussian => even_moments(spec.count, |k| {
            // (2k−1)!!
            (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(2 * j - 1)).into()
        }),
        Family::Uniform => even_moments(spec.count, |k| {
            BigRational::new(BigInt::one(), BigInt::from(2 * k + 1))
        }),
        Family::Semicircle => even_moments(spec.count, |k| {
            BigRational::new(catalan(k), BigInt::from(4).pow(k as u32))
        }),
        Family::Chebyshev1 => even_moments(spec.count, |k| {
            BigRational::new(binomial(2 * k, k), BigInt::from(4).pow(k as u32))
        }),
        Family::FromRecurrence { a_sq, b } => {
            let rec = RecurrenceCoefficients::<S>::from_a_sq(
                a_sq.iter().map(S::from_rational).collect(),
                b.iter().map(S::from_rational).collect(),
            )?;
            let m = moments_from_recurrence(&rec, spec.count)?;
            return MomentSequence::new(label, m.moments().to_vec());
        }
        Family::QHermite { q } => {
            if q.abs() >= BigRational::one() {
                return Err(Error::InvalidParameter(format!(
                    "q-hermite requires |q| < 1, got {}",
                    format_rational(q)
                )));
            }
            let n = spec.count;
            let q = S::from_rational(q);
            let a_sq = (1..=n).map(|k| crate::qkernel::q_bracket(k, &q)).collect();
            let rec = RecurrenceCoefficients::from_a_sq(a_sq, vec![S::zero(); n])?;
            let m = moments_from_recurrence(&rec, spec.count)?;
            return MomentSequence::new(label, m.moments().to_vec());
        }
    };
    MomentSequence::new(label, rational.iter().map(S::from_rational).collect())
}

fn even_moments(count: usize, even: impl Fn(usize) -> BigRational) -> Vec<BigRational> {
    (0..count)
        .map(|i| if i % 2 == 1 { BigRational::zero() } else { even(i / 2) })
        .collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn catalan(k: usize) -> BigInt {
    binomial(2 * k, k) / BigInt::from(k + 1)
}

/// The `(n+1)×(n+1)` moment matrix `[m_{i+j}]` with its leading minors.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMoments<S> {
    order: usize,
    entries: Dense<S>,
    deltas: Vec<S>,
}

impl<S: Scalar> HankelMoments<S> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &Dense<S> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.entries[i][j]
    }

    /// `Δ_0..Δ_n`.
    pub fn deltas(&self) -> &[S] {
        &self.deltas
    }

    /// `m_k`, read off the first row and last column.
    pub fn moment(&self, k: usize) -> &S {
        if k <= self.order {
            &self.entries[0][k]
        } else {
            &self.entries[k - self.order][self.order]
        }
    }
}

/// Builds `M_n` and `Δ_0..Δ_n`.
///
/// Exact backends get the determinants from a fraction-free elimination
/// sweep; floats use `Δ_k = Π l_{i,i}²` from the Cholesky factor and fall
/// back to elimination past the first failing pivot.
pub fn hankel_matrix<S: Scalar>(m: &MomentSequence<S>, n: usize) -> Result<HankelMoments<S>> {
    if 2 * n > m.max_index() {
        return Err(Error::InsufficientMoments {
            needed: 2 * n,
            available: m.max_index(),
        });
    }
    let entries: Dense<S> = (0..=n)
        .map(|i| (0..=n).map(|j| m.moments()[i + j].clone()).collect())
        .collect();
    let deltas = if S::EXACT {
        leading_minors(&entries)
    } else {
        float_deltas(&entries, n)
    };
    Ok(HankelMoments {
        order: n,
        entries,
        deltas,
    })
}

fn float_deltas<S: Scalar>(entries: &Dense<S>, n: usize) -> Vec<S> {
    let provisional = HankelMoments {
        order: n,
        entries: entries.clone(),
        deltas: Vec::new(),
    };
    match cholesky_decompose(&provisional) {
        Ok(l) => {
            let mut acc = S::one();
            (0..=n)
                .map(|i| {
                    acc = acc.clone() * l.get(i, i).square();
                    acc.clone()
                })
                .collect()
        }
        Err(_) => {
            let mut deltas = Vec::with_capacity(n + 1);
            let mut acc = S::one();
            let mut broken = false;
            for k in 0..=n {
                if !broken {
                    let sub = HankelMoments {
                        order: k,
                        entries: entries[..=k].iter().map(|r| r[..=k].to_vec()).collect(),
                        deltas: Vec::new(),
                    };
                    if let Ok(l) = cholesky_decompose(&sub) {
                        acc = acc.clone() * l.get(k, k).square();
                        deltas.push(acc.clone());
                        continue;
                    }
                    broken = true;
                }
                let sub: Dense<S> = entries[..=k].iter().map(|r| r[..=k].to_vec()).collect();
                deltas.push(crate::linalg::bareiss_determinant(&sub));
            }
            deltas
        }
    }
}

/// Partial sums of `m_{2n}^{−1/(2n)}` (Carleman's series).
#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanReport {
    /// `(n, Σ_{k=1}^{n} m_{2k}^{−1/(2k)})` for every available `n ≥ 1`.
    pub partial_sums: Vec<(usize, f64)>,
    pub caveat: &'static str,
}

pub const CARLEMAN_CAVEAT: &str = "divergence of the full series implies a determinate moment problem; \
     a finite truncation proves nothing either way";

pub fn carleman_diagnostic<S: Scalar>(m: &MomentSequence<S>) -> Result<CarlemanReport> {
    let mut total = 0.0;
    let mut partial_sums = Vec::new();
    for n in 1..=m.max_index() / 2 {
        let v = &m.moments()[2 * n];
        if !v.is_positive() {
            return Err(Error::NonPositiveMoment { index: 2 * n });
        }
        total += v.to_f64().powf(-1.0 / (2 * n) as f64);
        partial_sums.push((n, total));
    }
    Ok(CarlemanReport {
        partial_sums,
        caveat: CARLEMAN_CAVEAT,
    })
}
