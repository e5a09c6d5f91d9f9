//! Periodic matrix product states at desk scale.
//!
//! Amplitudes are raw traces tr(A_{m₁}⋯A_{m_N}) with no normalization; the
//! dense expansion is the primary path and transfer matrices serve as an
//! independent cross-check.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spherical_tensors::SphericalTensorFamily;
use crate::spin_numerics::{
    c, hermitian_deviation, kron, CMatrix, CVector, HalfInt, Settings, C64,
};

/// The matrices assigned to one site, indexed by its physical projection.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    spin: HalfInt,
    // m = spin, ..., -spin
    matrices: Vec<CMatrix>,
}

impl SiteTensor {
    pub fn new(spin: HalfInt, matrices: Vec<CMatrix>) -> Result<Self> {
        if spin.is_negative() || matrices.len() != spin.multiplicity() {
            return Err(Error::InvalidChain(format!(
                "spin {spin} needs {} matrices, got {}",
                spin.multiplicity(),
                matrices.len()
            )));
        }
        let d = matrices[0].nrows();
        if matrices.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::InvalidChain(
                "site matrices must be square with a common dimension".into(),
            ));
        }
        Ok(SiteTensor { spin, matrices })
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn phys_dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn aux_dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, m: HalfInt) -> Result<&CMatrix> {
        Ok(&self.matrices[self.spin.index_of(m)?])
    }

    /// E = Σ A* ⊗ A.
    pub fn transfer_matrix(&self) -> CMatrix {
        let d = self.aux_dim();
        let mut e = CMatrix::zeros(d * d, d * d);
        for a in &self.matrices {
            e += kron(&a.map(|z| z.conj()), a);
        }
        e
    }

    /// A ↦ μ U A U⁻¹.
    pub fn gauge(&self, u: &CMatrix, u_inv: &CMatrix, mu: C64) -> SiteTensor {
        SiteTensor {
            spin: self.spin,
            matrices: self.matrices.iter().map(|a| u * a * u_inv * mu).collect(),
        }
    }
}

impl From<&SphericalTensorFamily> for SiteTensor {
    fn from(fam: &SphericalTensorFamily) -> Self {
        SiteTensor {
            spin: fam.rank(),
            matrices: fam.matrices().to_vec(),
        }
    }
}

/// A ring of `n_sites` sites; site i carries `pattern[i mod period]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsChain {
    n_sites: usize,
    pattern: Vec<SiteTensor>,
}

impl MpsChain {
    pub fn new(pattern: Vec<SiteTensor>, n_sites: usize) -> Result<Self> {
        if pattern.is_empty() || n_sites == 0 {
            return Err(Error::InvalidChain("empty pattern or ring".into()));
        }
        if !n_sites.is_multiple_of(pattern.len()) {
            return Err(Error::InvalidChain(format!(
                "{n_sites} sites is not a multiple of the pattern period {}",
                pattern.len()
            )));
        }
        let d = pattern[0].aux_dim();
        if pattern.iter().any(|t| t.aux_dim() != d) {
            return Err(Error::InvalidChain(
                "auxiliary dimensions differ around the ring".into(),
            ));
        }
        Ok(MpsChain { n_sites, pattern })
    }

    pub fn uniform(site: SiteTensor, n_sites: usize) -> Result<Self> {
        MpsChain::new(vec![site], n_sites)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &[SiteTensor] {
        &self.pattern
    }

    pub fn site(&self, i: usize) -> &SiteTensor {
        &self.pattern[i % self.pattern.len()]
    }

    pub fn aux_dim(&self) -> usize {
        self.pattern[0].aux_dim()
    }

    pub fn site_spins(&self) -> Vec<HalfInt> {
        (0..self.n_sites).map(|i| self.site(i).spin()).collect()
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        (0..self.n_sites).map(|i| self.site(i).phys_dim()).collect()
    }

    /// Applies A ↦ μ U A U⁻¹ to every site.
    pub fn gauge_transform(&self, u: &CMatrix, mu: C64) -> Result<MpsChain> {
        let d = self.aux_dim();
        if u.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "gauge matrix is {}x{}, auxiliary dimension is {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        let u_inv = u
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("gauge matrix is singular".into()))?;
        Ok(MpsChain {
            n_sites: self.n_sites,
            pattern: self.pattern.iter().map(|t| t.gauge(u, &u_inv, mu)).collect(),
        })
    }
}

/// A run of `len` consecutive sites starting at `start` (0-based, wrapping).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn new(start: usize, len: usize) -> Self {
        Window { start, len }
    }

    pub fn sites(&self, n_sites: usize) -> Vec<usize> {
        (0..self.len).map(|t| (self.start + t) % n_sites).collect()
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        if self.len == 0 || self.len > n_sites || self.start >= n_sites {
            return Err(Error::InvalidArgument(format!(
                "window (start {}, length {}) does not fit a ring of {n_sites} sites",
                self.start, self.len
            )));
        }
        Ok(())
    }
}

/// tr(A_{m₁} ⋯ A_{m_N}), unnormalized.
pub fn amplitude(chain: &MpsChain, config: &[HalfInt]) -> Result<C64> {
    if config.len() != chain.n_sites() {
        return Err(Error::InvalidArgument(format!(
            "configuration has {} entries for {} sites",
            config.len(),
            chain.n_sites()
        )));
    }
    let d = chain.aux_dim();
    let mut prod = CMatrix::identity(d, d);
    for (i, &m) in config.iter().enumerate() {
        prod *= chain.site(i).matrix(m)?;
    }
    Ok(prod.trace())
}

/// All amplitudes in lexicographic order (site 0 most significant, m
/// descending within a site).
pub fn expand_state(chain: &MpsChain, settings: &Settings) -> Result<CVector> {
    let dims = chain.physical_dims();
    let total = settings.checked_product(&dims)?;
    let mut out = CVector::zeros(total);
    let d = chain.aux_dim();
    // depth-first over prefixes; prefix products are reused across leaves
    let mut stack: Vec<(usize, usize, CMatrix)> = vec![(0, 0, CMatrix::identity(d, d))];
    while let Some((site, index, prefix)) = stack.pop() {
        if site == chain.n_sites() {
            out[index] = prefix.trace();
            continue;
        }
        let tensor = chain.site(site);
        for (digit, a) in tensor.matrices().iter().enumerate().rev() {
            stack.push((site + 1, index * dims[site] + digit, &prefix * a));
        }
    }
    Ok(out)
}

/// Z = tr(E₁ E₂ ⋯ E_N), which equals ‖expand_state‖².
pub fn transfer_normalization(chain: &MpsChain) -> f64 {
    let d = chain.aux_dim();
    let mut prod = CMatrix::identity(d * d, d * d);
    for i in 0..chain.n_sites() {
        prod *= chain.site(i).transfer_matrix();
    }
    prod.trace().re
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Normalized reduced density matrix ρ[a,b] = Σ_rest ψ(a,rest) ψ*(b,rest) of a
/// pure state on sites with local dimensions `dims`. Window states are
/// ordered lexicographically in window order.
pub fn reduced_density_matrix_of_state(
    state: &CVector,
    dims: &[usize],
    window: Window,
) -> Result<CMatrix> {
    let n = dims.len();
    window.validate(n)?;
    let total: usize = dims.iter().product();
    if state.len() != total {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, sites span {total}",
            state.len()
        )));
    }
    let norm2 = state.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::InvalidChain("state vanishes identically".into()));
    }
    let sites = window.sites(n);
    let rest: Vec<usize> = (0..n).filter(|i| !sites.contains(i)).collect();
    let st = strides(dims);
    let dw: usize = sites.iter().map(|&i| dims[i]).product();
    let dr: usize = rest.iter().map(|&i| dims[i]).product();
    let mut psi = CMatrix::zeros(dw, dr);
    for (idx, amp) in state.iter().enumerate() {
        if *amp == C64::new(0.0, 0.0) {
            continue;
        }
        let digit = |site: usize| (idx / st[site]) % dims[site];
        let a = sites.iter().fold(0, |acc, &s| acc * dims[s] + digit(s));
        let r = rest.iter().fold(0, |acc, &s| acc * dims[s] + digit(s));
        psi[(a, r)] = *amp;
    }
    Ok(&psi * psi.adjoint() / c(norm2))
}

/// Unit-trace reduced density matrix of a window, by partial trace of the
/// expanded state.
pub fn reduced_density_matrix(
    chain: &MpsChain,
    window: Window,
    settings: &Settings,
) -> Result<CMatrix> {
    let state = expand_state(chain, settings)?;
    reduced_density_matrix_of_state(&state, &chain.physical_dims(), window)
}

/// The same reduced density matrix from transfer matrices:
/// ρ[a,b] = tr((W_b* ⊗ W_a) E_rest) / tr(E^N), with W the window products.
pub fn reduced_density_matrix_transfer(
    chain: &MpsChain,
    window: Window,
    settings: &Settings,
) -> Result<CMatrix> {
    let n = chain.n_sites();
    window.validate(n)?;
    let sites = window.sites(n);
    let dims: Vec<usize> = sites.iter().map(|&i| chain.site(i).phys_dim()).collect();
    let dw = settings.checked_product(&dims)?;
    let d = chain.aux_dim();
    let mut rest = CMatrix::identity(d * d, d * d);
    for t in window.len..n {
        rest *= chain.site(window.start + t).transfer_matrix();
    }
    let z = transfer_normalization(chain);
    if z == 0.0 {
        return Err(Error::InvalidChain("state vanishes identically".into()));
    }
    // window products in lexicographic order
    let mut words: Vec<CMatrix> = vec![CMatrix::identity(d, d)];
    for &site in &sites {
        let tensor = chain.site(site);
        words = words
            .iter()
            .flat_map(|w| tensor.matrices().iter().map(move |a| w * a))
            .collect();
    }
    debug_assert_eq!(words.len(), dw);
    let mut rho = CMatrix::zeros(dw, dw);
    for (a, wa) in words.iter().enumerate() {
        for (b, wb) in words.iter().enumerate() {
            rho[(a, b)] = (kron(&wb.map(|z| z.conj()), wa) * &rest).trace() / z;
        }
    }
    Ok(rho)
}

/// tr(ρ_window · op) for a Hermitian operator on the window.
pub fn window_expectation(
    chain: &MpsChain,
    op: &CMatrix,
    window: Window,
    settings: &Settings,
) -> Result<f64> {
    let state = expand_state(chain, settings)?;
    expectation_in_state(&state, &chain.physical_dims(), op, window, settings)
}

pub fn expectation_in_state(
    state: &CVector,
    dims: &[usize],
    op: &CMatrix,
    window: Window,
    settings: &Settings,
) -> Result<f64> {
    let dev = hermitian_deviation(op);
    if dev > settings.tol.assert_tol {
        return Err(Error::NonHermitian(dev));
    }
    let rho = reduced_density_matrix_of_state(state, dims, window)?;
    if rho.shape() != op.shape() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, window space has dimension {}",
            op.nrows(),
            op.ncols(),
            rho.nrows()
        )));
    }
    Ok((rho * op).trace().re)
}

/// A Haar-ish random unitary from the QR decomposition of a complex
/// Gaussian-like matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    g.qr().q()
}
