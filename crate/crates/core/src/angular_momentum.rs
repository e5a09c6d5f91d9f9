//! su(2) generators on irreducible, direct-sum and multi-site spaces,
//! Casimir operators, spin-j projectors and multiplet generation.
//!
//! Every basis in this module lists the states of a spin-s block as
//! |s,s⟩, |s,s−1⟩, …, |s,−s⟩. Multi-site spaces are ordered
//! lexicographically with site 0 as the most significant digit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_numerics::{
    c, commutator, eig_hermitian, kron, CMatrix, CVector, HalfInt, Settings, ToleranceConfig, C64,
};

/// An ordered direct sum of irreducible blocks. A spin-0 summand is a
/// singlet slot such as |0̃⟩.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSpec {
    summands: Vec<HalfInt>,
}

impl RepSpec {
    pub fn new(summands: Vec<HalfInt>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::InvalidArgument("empty representation".into()));
        }
        if let Some(s) = summands.iter().find(|s| s.is_negative()) {
            return Err(Error::InvalidSpin(s.to_string()));
        }
        Ok(RepSpec { summands })
    }

    pub fn summands(&self) -> &[HalfInt] {
        &self.summands
    }

    pub fn dim(&self) -> usize {
        self.summands.iter().map(|s| s.multiplicity()).sum()
    }

    /// Index of the first state of summand `k`.
    pub fn offset(&self, k: usize) -> usize {
        self.summands[..k].iter().map(|s| s.multiplicity()).sum()
    }

    /// Basis index of |sₖ, m⟩.
    pub fn index(&self, summand: usize, m: HalfInt) -> Result<usize> {
        let s = *self.summands.get(summand).ok_or_else(|| {
            Error::InvalidArgument(format!("summand {summand} out of range"))
        })?;
        Ok(self.offset(summand) + s.index_of(m)?)
    }

    /// Lz eigenvalue of each basis state.
    pub fn weights(&self) -> Vec<HalfInt> {
        self.summands.iter().flat_map(|s| s.projections()).collect()
    }
}

/// Lz, L+ and L− on a common space.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorTriple {
    pub lz: CMatrix,
    pub lplus: CMatrix,
    pub lminus: CMatrix,
}

impl GeneratorTriple {
    pub fn dim(&self) -> usize {
        self.lz.nrows()
    }

    /// Largest Frobenius deviation among [Lz,L±] = ±L±, [L+,L−] = 2Lz and
    /// L− = L+†.
    pub fn algebra_deviation(&self) -> f64 {
        let plus = (commutator(&self.lz, &self.lplus) - &self.lplus).norm();
        let minus = (commutator(&self.lz, &self.lminus) + &self.lminus).norm();
        let cross = (commutator(&self.lplus, &self.lminus) - &self.lz * c(2.0)).norm();
        let adj = (&self.lminus - self.lplus.adjoint()).norm();
        plus.max(minus).max(cross).max(adj)
    }

    /// L·L = Lz² + (L+L− + L−L+)/2.
    pub fn casimir(&self) -> CMatrix {
        &self.lz * &self.lz
            + (&self.lplus * &self.lminus + &self.lminus * &self.lplus) * c(0.5)
    }
}

/// The (2s+1)-dimensional irreducible representation.
pub fn irrep_generators(s: HalfInt) -> Result<GeneratorTriple> {
    if s.is_negative() {
        return Err(Error::InvalidSpin(s.to_string()));
    }
    let d = s.multiplicity();
    let mut lz = CMatrix::zeros(d, d);
    let mut lplus = CMatrix::zeros(d, d);
    for (i, m) in s.projections().enumerate() {
        lz[(i, i)] = c(m.value());
        if i > 0 {
            // L+|s,m⟩ = √(s(s+1) − m(m+1)) |s,m+1⟩
            let mv = m.value();
            lplus[(i - 1, i)] = c((s.casimir() - mv * (mv + 1.0)).sqrt());
        }
    }
    let lminus = lplus.adjoint();
    Ok(GeneratorTriple { lz, lplus, lminus })
}

fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Block-diagonal generators of a direct sum, blocks in `spec` order.
pub fn direct_sum_generators(spec: &RepSpec) -> GeneratorTriple {
    let parts: Vec<GeneratorTriple> = spec
        .summands()
        .iter()
        .map(|&s| irrep_generators(s).expect("RepSpec holds non-negative spins"))
        .collect();
    GeneratorTriple {
        lz: block_diag(&parts.iter().map(|g| g.lz.clone()).collect::<Vec<_>>()),
        lplus: block_diag(&parts.iter().map(|g| g.lplus.clone()).collect::<Vec<_>>()),
        lminus: block_diag(&parts.iter().map(|g| g.lminus.clone()).collect::<Vec<_>>()),
    }
}

/// Physical spins of k sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSystem {
    site_spins: Vec<HalfInt>,
}

impl SiteSystem {
    pub fn new(site_spins: Vec<HalfInt>) -> Result<Self> {
        if site_spins.is_empty() {
            return Err(Error::InvalidArgument("a site system needs k ≥ 1".into()));
        }
        if let Some(s) = site_spins.iter().find(|s| s.is_negative()) {
            return Err(Error::InvalidSpin(s.to_string()));
        }
        Ok(SiteSystem { site_spins })
    }

    pub fn uniform(s: HalfInt, k: usize) -> Result<Self> {
        SiteSystem::new(vec![s; k])
    }

    pub fn site_spins(&self) -> &[HalfInt] {
        &self.site_spins
    }

    pub fn k(&self) -> usize {
        self.site_spins.len()
    }

    pub fn site_dims(&self) -> Vec<usize> {
        self.site_spins.iter().map(|s| s.multiplicity()).collect()
    }

    /// Total dimension, or `None` on overflow.
    pub fn dim(&self) -> Option<usize> {
        self.site_dims()
            .into_iter()
            .try_fold(1usize, |a, d| a.checked_mul(d))
    }

    pub fn max_total_spin(&self) -> HalfInt {
        self.site_spins
            .iter()
            .fold(HalfInt::ZERO, |a, &s| a + s)
    }

    /// Total Lz eigenvalue of every product basis state.
    pub fn total_weights(&self) -> Vec<HalfInt> {
        let mut weights = vec![HalfInt::ZERO];
        for &s in &self.site_spins {
            weights = weights
                .iter()
                .flat_map(|&w| s.projections().map(move |m| w + m))
                .collect();
        }
        weights
    }

    /// I ⊗ … ⊗ op ⊗ … ⊗ I with `op` on `site`.
    pub fn embed(&self, op: &CMatrix, site: usize) -> CMatrix {
        let dims = self.site_dims();
        let left: usize = dims[..site].iter().product();
        let right: usize = dims[site + 1..].iter().product();
        kron(
            &kron(&CMatrix::identity(left, left), op),
            &CMatrix::identity(right, right),
        )
    }

    /// Sᵃ·Sᵇ = Sᶻ_aSᶻ_b + (S⁺_aS⁻_b + S⁻_aS⁺_b)/2.
    pub fn spin_dot(&self, a: usize, b: usize) -> Result<CMatrix> {
        let ga = irrep_generators(self.site_spins[a])?;
        let gb = irrep_generators(self.site_spins[b])?;
        let (za, pa, ma) = (self.embed(&ga.lz, a), self.embed(&ga.lplus, a), self.embed(&ga.lminus, a));
        let (zb, pb, mb) = (self.embed(&gb.lz, b), self.embed(&gb.lplus, b), self.embed(&gb.lminus, b));
        Ok(&za * &zb + (&pa * &mb + &ma * &pb) * c(0.5))
    }
}

/// Total-spin generators of a site system together with S·S.
#[derive(Clone, Debug)]
pub struct TotalSpin {
    pub triple: GeneratorTriple,
    pub casimir: CMatrix,
}

pub fn total_spin_operators(sys: &SiteSystem, settings: &Settings) -> Result<TotalSpin> {
    let dim = settings.checked_product(&sys.site_dims())?;
    let mut triple = GeneratorTriple {
        lz: CMatrix::zeros(dim, dim),
        lplus: CMatrix::zeros(dim, dim),
        lminus: CMatrix::zeros(dim, dim),
    };
    for (i, &s) in sys.site_spins().iter().enumerate() {
        let g = irrep_generators(s)?;
        triple.lz += sys.embed(&g.lz, i);
        triple.lplus += sys.embed(&g.lplus, i);
        triple.lminus += sys.embed(&g.lminus, i);
    }
    let casimir = triple.casimir();
    Ok(TotalSpin { triple, casimir })
}

/// Projectors onto the full spin-j eigenspaces of S·S (all multiplicity
/// copies). Every j allowed by the site spins has an entry; absent channels
/// map to the zero matrix.
#[derive(Clone, Debug)]
pub struct CasimirProjectors {
    dim: usize,
    projectors: BTreeMap<HalfInt, CMatrix>,
}

impl CasimirProjectors {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spins(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.projectors.keys().copied()
    }

    pub fn get(&self, j: HalfInt) -> CMatrix {
        self.projectors
            .get(&j)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &CMatrix)> {
        self.projectors.iter().map(|(j, p)| (*j, p))
    }
}

/// Spin-j projectors from the eigendecomposition of S·S, computed one total-m
/// sector at a time so that each projector is exactly block diagonal in m.
pub fn casimir_projectors(sys: &SiteSystem, settings: &Settings) -> Result<CasimirProjectors> {
    let total = total_spin_operators(sys, settings)?;
    let dim = total.casimir.nrows();
    let weights = sys.total_weights();
    let jmax = sys.max_total_spin();
    let mut projectors: BTreeMap<HalfInt, CMatrix> = BTreeMap::new();
    let lowest = jmax.twice() % 2;
    for twice in (lowest..=jmax.twice()).step_by(2) {
        projectors.insert(HalfInt::from_twice(twice), CMatrix::zeros(dim, dim));
    }
    let mut sectors: BTreeMap<HalfInt, Vec<usize>> = BTreeMap::new();
    for (i, w) in weights.iter().enumerate() {
        sectors.entry(*w).or_default().push(i);
    }
    for idx in sectors.values() {
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| total.casimir[(idx[a], idx[b])]);
        let eig = eig_hermitian(&block, &settings.tol)?;
        for (k, &lambda) in eig.values.iter().enumerate() {
            let j = HalfInt::from_casimir(lambda, 1e-6).ok_or_else(|| {
                Error::Numerical(format!("Casimir eigenvalue {lambda} is not j(j+1)"))
            })?;
            let p = projectors
                .get_mut(&j)
                .ok_or_else(|| Error::Numerical(format!("unexpected total spin {j}")))?;
            let v = eig.vectors.column(k);
            for (a, &ia) in idx.iter().enumerate() {
                for (b, &ib) in idx.iter().enumerate() {
                    p[(ia, ib)] += v[a] * v[b].conj();
                }
            }
        }
    }
    Ok(CasimirProjectors { dim, projectors })
}

/// Orthonormal states |j,j⟩, …, |j,−j⟩ of one irreducible multiplet.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplet {
    pub j: HalfInt,
    pub states: Vec<CVector>,
}

impl Multiplet {
    pub fn projector(&self) -> CMatrix {
        let n = self.states.first().map_or(0, |v| v.len());
        crate::spin_numerics::span_projector(&self.states, n)
    }
}

/// Generates a multiplet by repeated lowering from a highest-weight state.
///
/// Each step divides by the exact ladder coefficient √(j(j+1) − m(m−1)), so
/// the members inherit the phase of the normalized top state.
pub fn multiplet_from_top(
    top: &CVector,
    triple: &GeneratorTriple,
    tol: &ToleranceConfig,
) -> Result<Multiplet> {
    if top.len() != triple.dim() {
        return Err(Error::DimensionMismatch(format!(
            "top state has length {}, generators act on dimension {}",
            top.len(),
            triple.dim()
        )));
    }
    let norm = top.norm();
    if norm == 0.0 {
        return Err(Error::NotHighestWeight("zero vector".into()));
    }
    let v = top / C64::new(norm, 0.0);
    let jz = v.dotc(&(&triple.lz * &v)).re;
    let j = HalfInt::from_f64(jz, 1e-6)
        .filter(|j| !j.is_negative())
        .ok_or_else(|| Error::NotHighestWeight(format!("Lz expectation {jz} is not a spin")))?;
    let lz_dev = (&triple.lz * &v - &v * c(j.value())).norm();
    let raise = (&triple.lplus * &v).norm();
    if lz_dev > tol.assert_tol || raise > tol.assert_tol {
        return Err(Error::NotHighestWeight(format!(
            "‖(Lz − j)v‖ = {lz_dev:.2e}, ‖L+v‖ = {raise:.2e}"
        )));
    }
    let mut states = vec![v];
    for m in j.projections().take(j.multiplicity() - 1) {
        let mv = m.value();
        let coeff = (j.casimir() - mv * (mv - 1.0)).sqrt();
        let next = &triple.lminus * states.last().unwrap() / c(coeff);
        states.push(next);
    }
    let tail = (&triple.lminus * states.last().unwrap()).norm();
    if tail > tol.assert_tol {
        return Err(Error::Numerical(format!(
            "lowering did not terminate: ‖L−|j,−j⟩‖ = {tail:.2e}"
        )));
    }
    Ok(Multiplet { j, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_numerics::eigvals_hermitian;

    fn half(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn spin_half_irrep() {
        let g = irrep_generators(half(1)).unwrap();
        assert_eq!(g.lz[(0, 0)], c(0.5));
        assert_eq!(g.lz[(1, 1)], c(-0.5));
        assert_eq!(g.lplus[(0, 1)], c(1.0));
        assert_eq!(g.lplus[(1, 0)], c(0.0));
    }

    #[test]
    fn spin_one_ladder_entries() {
        let g = irrep_generators(HalfInt::ONE).unwrap();
        let r2 = 2f64.sqrt();
        assert!((g.lplus[(0, 1)] - c(r2)).norm() < 1e-15);
        assert!((g.lplus[(1, 2)] - c(r2)).norm() < 1e-15);
    }

    #[test]
    fn spin_zero_is_trivial() {
        let g = irrep_generators(HalfInt::ZERO).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.lz[(0, 0)], c(0.0));
        assert_eq!(g.lplus[(0, 0)], c(0.0));
    }

    #[test]
    fn half_plus_singlet_matches_three_dim_generators() {
        // basis {|+⟩, |−⟩, |0̃⟩}; reorder to {|+⟩, |0̃⟩, |−⟩} to compare
        let g = direct_sum_generators(&RepSpec::new(vec![half(1), HalfInt::ZERO]).unwrap());
        let perm = [0usize, 2, 1];
        let lz = CMatrix::from_fn(3, 3, |i, j| g.lz[(perm[i], perm[j])]);
        let lp = CMatrix::from_fn(3, 3, |i, j| g.lplus[(perm[i], perm[j])]);
        let lm = CMatrix::from_fn(3, 3, |i, j| g.lminus[(perm[i], perm[j])]);
        let expect_z = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(0.0), c(-0.5)]));
        let mut expect_p = CMatrix::zeros(3, 3);
        expect_p[(0, 2)] = c(1.0);
        assert_eq!(lz, expect_z);
        assert_eq!(lp, expect_p);
        assert_eq!(lm, expect_p.transpose());
    }

    #[test]
    fn direct_sum_lz_diagonal() {
        let spec = RepSpec::new(vec![HalfInt::ONE, half(1), HalfInt::ZERO]).unwrap();
        let g = direct_sum_generators(&spec);
        let diag: Vec<f64> = (0..6).map(|i| g.lz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0, 0.5, -0.5, 0.0]);
        assert_eq!(spec.index(1, half(-1)).unwrap(), 4);
        assert!(g.algebra_deviation() < 1e-12);
        let zero = direct_sum_generators(&RepSpec::new(vec![HalfInt::ZERO]).unwrap());
        assert_eq!(zero.lz, CMatrix::zeros(1, 1));
    }

    #[test]
    fn casimir_of_small_systems() {
        let settings = Settings::default();
        let one = total_spin_operators(&SiteSystem::uniform(half(1), 1).unwrap(), &settings).unwrap();
        assert!((one.casimir - CMatrix::identity(2, 2) * c(0.75)).norm() < 1e-14);

        let two = total_spin_operators(&SiteSystem::uniform(half(1), 2).unwrap(), &settings).unwrap();
        let ev = eigvals_hermitian(&two.casimir, &settings.tol).unwrap();
        let expect = [0.0, 2.0, 2.0, 2.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn three_spin_ones_decompose() {
        let settings = Settings::default();
        let sys = SiteSystem::uniform(HalfInt::ONE, 3).unwrap();
        let total = total_spin_operators(&sys, &settings).unwrap();
        let ev = eigvals_hermitian(&total.casimir, &settings.tol).unwrap();
        let count = |x: f64| ev.iter().filter(|&&e| (e - x).abs() < 1e-9).count();
        assert_eq!((count(0.0), count(2.0), count(6.0), count(12.0)), (1, 9, 10, 7));
    }

    #[test]
    fn projector_for_two_spin_halves() {
        let settings = Settings::default();
        let sys = SiteSystem::uniform(half(1), 2).unwrap();
        let total = total_spin_operators(&sys, &settings).unwrap();
        let p = casimir_projectors(&sys, &settings).unwrap();
        assert!((p.get(HalfInt::ONE) - &total.casimir * c(0.5)).norm() < 1e-12);
        assert_eq!(p.get(HalfInt::integer(2)), CMatrix::zeros(4, 4));
    }

    #[test]
    fn lowering_a_two_site_top() {
        let settings = Settings::default();
        let sys = SiteSystem::uniform(half(1), 2).unwrap();
        let total = total_spin_operators(&sys, &settings).unwrap();
        let mut top = CVector::zeros(4);
        top[0] = c(1.0);
        let m = multiplet_from_top(&top, &total.triple, &settings.tol).unwrap();
        assert_eq!(m.j, HalfInt::ONE);
        let r = 0.5f64.sqrt();
        let middle = CVector::from_vec(vec![c(0.0), c(r), c(r), c(0.0)]);
        assert!((&m.states[1] - middle).norm() < 1e-14);
        assert_eq!(m.states.len(), 3);
    }

    #[test]
    fn lowering_rejects_non_top_states() {
        let settings = Settings::default();
        let g = irrep_generators(half(1)).unwrap();
        let low = CVector::from_vec(vec![c(0.0), c(1.0)]);
        assert!(matches!(
            multiplet_from_top(&low, &g, &settings.tol),
            Err(Error::NotHighestWeight(_))
        ));
        let top = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let m = multiplet_from_top(&top, &g, &settings.tol).unwrap();
        assert_eq!(m.states[1], CVector::from_vec(vec![c(0.0), c(1.0)]));
    }

    #[test]
    fn cap_is_enforced() {
        let sys = SiteSystem::uniform(HalfInt::ONE, 10).unwrap();
        assert!(matches!(
            total_spin_operators(&sys, &Settings::default()),
            Err(Error::CapExceeded { .. })
        ));
    }
}
