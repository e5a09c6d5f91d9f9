//! Explicit valence-bond states and the closed-form oracles that go with them.
//!
//! Sites are numbered 0..n around a ring. A singlet on the ordered pair
//! (a, b) is (2s+1)^{-1/2} Σ_m (−1)^{s−m}|m⟩_a|−m⟩_b, unit normalized, so the
//! raw-trace MPS states of `mps_engine` differ from these vectors by powers of
//! √(2s+1).

use serde::Serialize;

use crate::angular_momentum::{irrep_generators, RepSpec, SiteSystem};
use crate::error::{Error, Result};
use crate::mps_engine::{expand_state, expectation_in_state, MpsChain, SiteTensor, Window};
use crate::spherical_tensors::{canonical_tensor, canonical_tensor_in};
use crate::spin_numerics::{c, kron, CMatrix, CVector, HalfInt, Settings, C64};

/// (−1)^{2s}: +1 for integer spin, −1 for half-integer spin.
pub fn epsilon_sign(s: HalfInt) -> i32 {
    if s.is_integer() {
        1
    } else {
        -1
    }
}

fn require_positive(s: HalfInt) -> Result<()> {
    if s.twice() < 1 {
        return Err(Error::InvalidSpin(format!("expected s ≥ 1/2, got {s}")));
    }
    Ok(())
}

/// A normalized two-site singlet; component index a·(2s+1)+b for projections
/// with indices a, b in the descending basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SingletPair {
    pub s: HalfInt,
    pub vector: CVector,
}

impl SingletPair {
    /// Norm of each total-spin generator applied to the pair.
    pub fn annihilation_residual(&self) -> f64 {
        let g = irrep_generators(self.s).expect("validated spin");
        let d = self.s.multiplicity();
        let id = CMatrix::identity(d, d);
        [&g.lz, &g.lplus, &g.lminus]
            .iter()
            .map(|op| ((kron(op, &id) + kron(&id, op)) * &self.vector).norm())
            .fold(0.0, f64::max)
    }
}

pub fn singlet(s: HalfInt) -> Result<SingletPair> {
    require_positive(s)?;
    let d = s.multiplicity();
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = CVector::zeros(d * d);
    for (a, m) in s.projections().enumerate() {
        let b = s.index_of(-m)?;
        v[a * d + b] = c((s - m).parity_sign()? * norm);
    }
    Ok(SingletPair { s, vector: v })
}

/// Places multi-site factors on the listed sites of a product space. Every
/// site must be covered exactly once; factor components are ordered
/// lexicographically in the listed site order.
pub fn product_state(
    factors: &[(Vec<usize>, CVector)],
    dims: &[usize],
    settings: &Settings,
) -> Result<CVector> {
    let total = settings.checked_product(dims)?;
    let mut covered = vec![false; dims.len()];
    for (sites, v) in factors {
        let local: usize = sites.iter().map(|&i| dims[i]).product();
        if v.len() != local {
            return Err(Error::DimensionMismatch(format!(
                "factor on sites {sites:?} has length {}, expected {local}",
                v.len()
            )));
        }
        for &i in sites {
            if i >= dims.len() || std::mem::replace(&mut covered[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "site {i} is out of range or covered twice"
                )));
            }
        }
    }
    if covered.iter().any(|x| !x) {
        return Err(Error::InvalidArgument("product state leaves a site uncovered".into()));
    }
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut out = CVector::zeros(total);
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut amp = c(1.0);
        for (sites, v) in factors {
            let local = sites
                .iter()
                .fold(0, |acc, &i| acc * dims[i] + (idx / strides[i]) % dims[i]);
            amp *= v[local];
            if amp == c(0.0) {
                break;
            }
        }
        *slot = amp;
    }
    Ok(out)
}

/// One of the two perfect matchings of a ring of `n_sites` spin-s sites.
/// Offset 0 pairs (0,1)(2,3)…; offset 1 pairs (1,2)…(n−1,0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimerCovering {
    pub s: HalfInt,
    pub n_sites: usize,
    pub offset: usize,
}

impl DimerCovering {
    pub fn new(s: HalfInt, n_sites: usize, offset: usize) -> Result<Self> {
        require_positive(s)?;
        if n_sites < 2 || !n_sites.is_multiple_of(2) || offset > 1 {
            return Err(Error::InvalidArgument(format!(
                "a dimer covering needs an even ring and offset 0 or 1 (got {n_sites}, {offset})"
            )));
        }
        Ok(DimerCovering { s, n_sites, offset })
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_sites / 2)
            .map(|p| {
                let a = 2 * p + self.offset;
                (a % self.n_sites, (a + 1) % self.n_sites)
            })
            .collect()
    }
}

pub fn dimer_state(cov: &DimerCovering, settings: &Settings) -> Result<CVector> {
    let pair = singlet(cov.s)?.vector;
    let factors: Vec<_> = cov
        .pairs()
        .into_iter()
        .map(|(a, b)| (vec![a, b], pair.clone()))
        .collect();
    product_state(&factors, &vec![cov.s.multiplicity(); cov.n_sites], settings)
}

/// |φ₁⟩ + sign·|φ₂⟩ on 2·n_dimers sites.
pub fn mg_state(s: HalfInt, n_dimers: usize, sign: i32, settings: &Settings) -> Result<CVector> {
    if sign.abs() != 1 {
        return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
    }
    let n = 2 * n_dimers;
    let phi1 = dimer_state(&DimerCovering::new(s, n, 0)?, settings)?;
    let phi2 = dimer_state(&DimerCovering::new(s, n, 1)?, settings)?;
    Ok(phi1 + phi2 * c(f64::from(sign)))
}

/// The uniform canonical-tensor chain; its expansion is
/// (2s+1)^{n_sites/2}(|φ₁⟩ + |φ₂⟩).
pub fn mg_chain(s: HalfInt, n_sites: usize) -> Result<MpsChain> {
    MpsChain::uniform(SiteTensor::from(&canonical_tensor(s)?), n_sites)
}

/// Chain with pattern A, A, B, B on the auxiliary space s ⊕ s2 ⊕ 0, where A
/// and B are the canonical rank-s and rank-s2 tensors.
pub fn alternating_chain(s: HalfInt, s2: HalfInt, n_periods: usize) -> Result<MpsChain> {
    require_positive(s)?;
    require_positive(s2)?;
    let aux = RepSpec::new(vec![s, s2, HalfInt::ZERO])?;
    let a = SiteTensor::from(&canonical_tensor_in(s, aux.clone(), 0, 2)?);
    let b = SiteTensor::from(&canonical_tensor_in(s2, aux, 1, 2)?);
    MpsChain::new(vec![a.clone(), a, b.clone(), b], 4 * n_periods)
}

/// |S⟩₀₁|S'⟩₂₃|S⟩₄₅… with spin-s and spin-s2 singlets alternating.
pub fn alternating_dimer_state(
    s: HalfInt,
    s2: HalfInt,
    n_periods: usize,
    settings: &Settings,
) -> Result<CVector> {
    if n_periods == 0 {
        return Err(Error::InvalidArgument("need at least one period".into()));
    }
    let (p, q) = (singlet(s)?.vector, singlet(s2)?.vector);
    let mut factors = Vec::new();
    let mut dims = Vec::new();
    for k in 0..n_periods {
        factors.push((vec![4 * k, 4 * k + 1], p.clone()));
        factors.push((vec![4 * k + 2, 4 * k + 3], q.clone()));
        dims.extend([s.multiplicity(), s.multiplicity(), s2.multiplicity(), s2.multiplicity()]);
    }
    product_state(&factors, &dims, settings)
}

/// Spin s and the single-site amplitudes α_m (m descending).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryBreakingSpec {
    pub s: HalfInt,
    pub alpha: Vec<C64>,
}

impl SymmetryBreakingSpec {
    pub fn new(s: HalfInt, alpha: Vec<C64>) -> Result<Self> {
        require_positive(s)?;
        if alpha.len() != s.multiplicity() {
            return Err(Error::DimensionMismatch(format!(
                "spin {s} needs {} amplitudes, got {}",
                s.multiplicity(),
                alpha.len()
            )));
        }
        if alpha.iter().all(|a| a.norm() == 0.0) {
            return Err(Error::ZeroAlpha);
        }
        Ok(SymmetryBreakingSpec { s, alpha })
    }

    pub fn alpha_vector(&self) -> CVector {
        CVector::from_vec(self.alpha.clone())
    }
}

/// Pattern A, A, C on s ⊕ 0 with C_m = α_m|0̃⟩⟨0̃|.
pub fn symmetry_breaking_chain(spec: &SymmetryBreakingSpec, n_periods: usize) -> Result<MpsChain> {
    let fam = canonical_tensor(spec.s)?;
    let d = fam.aux_dim();
    let zero = d - 1;
    let cs = spec
        .alpha
        .iter()
        .map(|&a| {
            let mut m = CMatrix::zeros(d, d);
            m[(zero, zero)] = a;
            m
        })
        .collect();
    let a = SiteTensor::from(&fam);
    let cm = SiteTensor::new(spec.s, cs)?;
    MpsChain::new(vec![a.clone(), a, cm], 3 * n_periods)
}

/// |S⟩₀₁|α⟩₂|S⟩₃₄|α⟩₅…
pub fn symmetry_breaking_state(
    spec: &SymmetryBreakingSpec,
    n_periods: usize,
    settings: &Settings,
) -> Result<CVector> {
    if n_periods == 0 {
        return Err(Error::InvalidArgument("need at least one period".into()));
    }
    let pair = singlet(spec.s)?.vector;
    let alpha = spec.alpha_vector();
    let mut factors = Vec::new();
    for k in 0..n_periods {
        factors.push((vec![3 * k, 3 * k + 1], pair.clone()));
        factors.push((vec![3 * k + 2], alpha.clone()));
    }
    product_state(&factors, &vec![spec.s.multiplicity(); 3 * n_periods], settings)
}

/// Outcome of contracting two singlets through a third.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub s: HalfInt,
    pub epsilon: i32,
    pub coefficient: f64,
    pub expected: f64,
    pub residual: f64,
    /// Same contraction with s₁·s₂ inserted; expected −s(s+1)ε/(2s+1).
    pub spin_dot_coefficient: f64,
    pub spin_dot_expected: f64,
    pub spin_dot_residual: f64,
    pub passed: bool,
}

/// Checks ⟨S|₁₂(|S⟩₀₁|S⟩₂₃) = ε/(2s+1)·|S⟩₀₃ on four explicit sites.
pub fn contraction_identity_check(s: HalfInt, tol: f64) -> Result<ContractionReport> {
    require_positive(s)?;
    if s.twice() > 5 {
        return Err(Error::InvalidArgument(format!("contraction check is limited to s ≤ 5/2, got {s}")));
    }
    let d = s.multiplicity();
    let pair = singlet(s)?.vector;
    let settings = Settings::default();
    let psi = product_state(
        &[(vec![0, 1], pair.clone()), (vec![2, 3], pair.clone())],
        &[d; 4],
        &settings,
    )?;
    // s₁·s₂ acts on the first pair only
    let dotted_pair = SiteSystem::uniform(s, 2)?.spin_dot(0, 1)? * &pair;
    let dotted = product_state(
        &[(vec![0, 1], dotted_pair), (vec![2, 3], pair.clone())],
        &[d; 4],
        &settings,
    )?;

    let contract = |v: &CVector| {
        let mut out = CVector::zeros(d * d);
        for a in 0..d {
            for e in 0..d {
                let mut acc = c(0.0);
                for b in 0..d {
                    for f in 0..d {
                        acc += pair[b * d + f].conj() * v[((a * d + b) * d + f) * d + e];
                    }
                }
                out[a * d + e] = acc;
            }
        }
        out
    };
    let fit = |r: &CVector| {
        let coef = pair.dotc(r);
        (coef.re, (r - &pair * coef).norm())
    };
    let (coefficient, residual) = fit(&contract(&psi));
    let (spin_dot_coefficient, spin_dot_residual) = fit(&contract(&dotted));

    let eps = epsilon_sign(s);
    let expected = f64::from(eps) / d as f64;
    let spin_dot_expected = -s.casimir() * expected;
    let passed = (coefficient - expected).abs() <= tol
        && residual <= tol
        && (spin_dot_coefficient - spin_dot_expected).abs() <= tol
        && spin_dot_residual <= tol;
    Ok(ContractionReport {
        s,
        epsilon: eps,
        coefficient,
        expected,
        residual,
        spin_dot_coefficient,
        spin_dot_expected,
        spin_dot_residual,
        passed,
    })
}

/// Closed-form overlap, norms and nearest-neighbour correlations of
/// |Ψ±⟩ = |φ₁⟩ ± |φ₂⟩ for N dimers with unit singlets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticPredictions {
    pub s: HalfInt,
    pub n_dimers: usize,
    pub epsilon: i32,
    pub overlap: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
    /// `None` when |Ψ±⟩ vanishes.
    pub corr_plus: Option<f64>,
    pub corr_minus: Option<f64>,
    /// ‖raw MPS expansion‖² / ‖|φ₁⟩+|φ₂⟩‖² = (2s+1)^N.
    pub raw_trace_factor: f64,
}

pub fn analytic_predictions(s: HalfInt, n_dimers: usize) -> Result<AnalyticPredictions> {
    require_positive(s)?;
    if n_dimers == 0 {
        return Err(Error::InvalidArgument("need at least one dimer".into()));
    }
    let eps = epsilon_sign(s);
    let d = s.multiplicity() as f64;
    let n = n_dimers as i32;
    let eps_n = f64::from(eps).powi(n);
    let big = d.powi(n - 1);
    let overlap = eps_n / big;
    let corr = |sign: f64| {
        let den = big + sign * eps_n;
        (den != 0.0).then(|| -s.casimir() / 2.0 * (big + 2.0 * sign * eps_n) / den)
    };
    Ok(AnalyticPredictions {
        s,
        n_dimers,
        epsilon: eps,
        overlap,
        norm_plus: 2.0 * (1.0 + overlap),
        norm_minus: 2.0 * (1.0 - overlap),
        corr_plus: corr(1.0),
        corr_minus: corr(-1.0),
        raw_trace_factor: d.powi(n),
    })
}

/// Brute-force counterparts of [`AnalyticPredictions`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceDimers {
    pub overlap: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub corr_plus: Option<f64>,
    pub corr_minus: Option<f64>,
    /// ‖expand_state(mg_chain)‖² / ‖|φ₁⟩+|φ₂⟩‖².
    pub raw_trace_factor: Option<f64>,
}

pub fn brute_force_dimers(s: HalfInt, n_dimers: usize, settings: &Settings) -> Result<BruteForceDimers> {
    let n = 2 * n_dimers;
    let phi1 = dimer_state(&DimerCovering::new(s, n, 0)?, settings)?;
    let phi2 = dimer_state(&DimerCovering::new(s, n, 1)?, settings)?;
    let plus = &phi1 + &phi2;
    let minus = &phi1 - &phi2;
    let dims = vec![s.multiplicity(); n];
    let dot = SiteSystem::uniform(s, 2)?.spin_dot(0, 1)?;
    let corr = |psi: &CVector| -> Result<Option<f64>> {
        if psi.norm() < 1e-12 {
            return Ok(None);
        }
        expectation_in_state(psi, &dims, &dot, Window::new(0, 2), settings).map(Some)
    };
    let raw = expand_state(&mg_chain(s, n)?, settings)?;
    Ok(BruteForceDimers {
        overlap: phi1.dotc(&phi2).re,
        norm_plus: plus.norm_squared(),
        norm_minus: minus.norm_squared(),
        corr_plus: corr(&plus)?,
        corr_minus: corr(&minus)?,
        raw_trace_factor: (plus.norm() > 1e-12).then(|| raw.norm_squared() / plus.norm_squared()),
    })
}
