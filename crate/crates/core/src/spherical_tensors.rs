//! Spherical tensor operators used as MPS matrices.
//!
//! The canonical rank-s family lives on the `s ⊕ 0` space:
//!
//! ```text
//! A_{s,m} = |s,m⟩⟨0̃| + (−1)^{s−m} |0̃⟩⟨s,−m|
//! ```
//!
//! Symmetrized products of two such families give the VBS tensors
//! V_{s+s'} on `s ⊕ s'`, whose top component is
//! `|s,s⟩⟨s',−s'| + |s',s'⟩⟨s,−s|`; the remaining components follow by
//! commutation with L−.

use serde::{Deserialize, Serialize};

use crate::angular_momentum::{direct_sum_generators, GeneratorTriple, RepSpec};
use crate::error::{Error, Result};
use crate::spin_numerics::{
    adjoint_action, c, commutator, kernel_basis, range_basis, vectorize, CMatrix, HalfInt,
    ToleranceConfig,
};

/// 2·rank+1 matrices on an auxiliary space, one per projection m.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalTensorFamily {
    rank: HalfInt,
    aux: RepSpec,
    // m = rank, rank-1, ..., -rank
    components: Vec<CMatrix>,
}

impl SphericalTensorFamily {
    pub fn new(rank: HalfInt, aux: RepSpec, components: Vec<CMatrix>) -> Result<Self> {
        if rank.is_negative() {
            return Err(Error::InvalidSpin(rank.to_string()));
        }
        if components.len() != rank.multiplicity() {
            return Err(Error::DimensionMismatch(format!(
                "rank {rank} needs {} components, got {}",
                rank.multiplicity(),
                components.len()
            )));
        }
        let d = aux.dim();
        if let Some(bad) = components.iter().find(|m| m.shape() != (d, d)) {
            return Err(Error::DimensionMismatch(format!(
                "component is {}x{}, auxiliary space has dimension {d}",
                bad.nrows(),
                bad.ncols()
            )));
        }
        Ok(SphericalTensorFamily {
            rank,
            aux,
            components,
        })
    }

    pub fn rank(&self) -> HalfInt {
        self.rank
    }

    pub fn aux(&self) -> &RepSpec {
        &self.aux
    }

    pub fn aux_dim(&self) -> usize {
        self.aux.dim()
    }

    pub fn component(&self, m: HalfInt) -> Result<&CMatrix> {
        Ok(&self.components[self.rank.index_of(m)?])
    }

    /// Components in basis order m = rank, …, −rank.
    pub fn matrices(&self) -> &[CMatrix] {
        &self.components
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &CMatrix)> {
        self.rank.projections().zip(self.components.iter())
    }

    /// Generators of the auxiliary direct sum.
    pub fn generators(&self) -> GeneratorTriple {
        direct_sum_generators(&self.aux)
    }
}

/// The rank-s family on `aux`, with the spin-s block at summand `spin_slot`
/// and the singlet |0̃⟩ at summand `singlet_slot`.
pub fn canonical_tensor_in(
    s: HalfInt,
    aux: RepSpec,
    spin_slot: usize,
    singlet_slot: usize,
) -> Result<SphericalTensorFamily> {
    if s.twice() < 1 {
        return Err(Error::InvalidSpin(format!("rank must be at least 1/2, got {s}")));
    }
    let summands = aux.summands();
    if summands.get(spin_slot) != Some(&s) || summands.get(singlet_slot) != Some(&HalfInt::ZERO)
    {
        return Err(Error::InvalidArgument(format!(
            "auxiliary space {:?} has no spin-{s} block at {spin_slot} and singlet at {singlet_slot}",
            summands.iter().map(|h| h.to_string()).collect::<Vec<_>>()
        )));
    }
    let d = aux.dim();
    let zero = aux.offset(singlet_slot);
    let mut components = Vec::with_capacity(s.multiplicity());
    for m in s.projections() {
        let mut a = CMatrix::zeros(d, d);
        a[(aux.index(spin_slot, m)?, zero)] = c(1.0);
        a[(zero, aux.index(spin_slot, -m)?)] = c((s - m).parity_sign()?);
        components.push(a);
    }
    SphericalTensorFamily::new(s, aux, components)
}

/// A_{s,m} = |s,m⟩⟨0̃| + (−1)^{s−m}|0̃⟩⟨s,−m| on `s ⊕ 0` (dimension 2s+2).
pub fn canonical_tensor(s: HalfInt) -> Result<SphericalTensorFamily> {
    canonical_tensor_in(s, RepSpec::new(vec![s, HalfInt::ZERO])?, 0, 1)
}

/// The two-dimensional rank-1 family A₁ = −√2σ₊, A₀ = σ_z, A₋₁ = √2σ₋.
pub fn aklt_rank1_tensor() -> SphericalTensorFamily {
    let r2 = 2f64.sqrt();
    let mut plus = CMatrix::zeros(2, 2);
    plus[(0, 1)] = c(-r2);
    let mut zero = CMatrix::zeros(2, 2);
    zero[(0, 0)] = c(1.0);
    zero[(1, 1)] = c(-1.0);
    let mut minus = CMatrix::zeros(2, 2);
    minus[(1, 0)] = c(r2);
    SphericalTensorFamily::new(
        HalfInt::ONE,
        RepSpec::new(vec![HalfInt::HALF]).expect("valid"),
        vec![plus, zero, minus],
    )
    .expect("consistent shapes")
}

/// Maximum deviations from the rank-s commutation relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalCheck {
    pub max_dev_z: f64,
    pub max_dev_plus: f64,
    pub max_dev_minus: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SphericalCheck {
    pub fn max_deviation(&self) -> f64 {
        self.max_dev_z.max(self.max_dev_plus).max(self.max_dev_minus)
    }
}

fn ladder(s: HalfInt, m: HalfInt, up: bool) -> f64 {
    let (sv, mv) = (s.value(), m.value());
    let shifted = if up { mv * (mv + 1.0) } else { mv * (mv - 1.0) };
    (sv * (sv + 1.0) - shifted).max(0.0).sqrt()
}

/// Checks [Lz, A_m] = m A_m and [L±, A_m] = √(s(s+1) − m(m±1)) A_{m±1}
/// (Frobenius norm, maximum over m). The same relations express covariance
/// of the generated state under global rotations.
pub fn verify_spherical(
    fam: &SphericalTensorFamily,
    triple: &GeneratorTriple,
    tol: f64,
) -> Result<SphericalCheck> {
    if triple.dim() != fam.aux_dim() {
        return Err(Error::DimensionMismatch(format!(
            "generators act on dimension {}, family on {}",
            triple.dim(),
            fam.aux_dim()
        )));
    }
    let s = fam.rank();
    let zero = CMatrix::zeros(fam.aux_dim(), fam.aux_dim());
    let comp = |m: HalfInt| -> &CMatrix { fam.component(m).unwrap_or(&zero) };
    let (mut dz, mut dp, mut dm) = (0.0f64, 0.0f64, 0.0f64);
    for (m, a) in fam.iter() {
        let one = HalfInt::ONE;
        dz = dz.max((commutator(&triple.lz, a) - a * c(m.value())).norm());
        dp = dp.max(
            (commutator(&triple.lplus, a) - comp(m + one) * c(ladder(s, m, true))).norm(),
        );
        dm = dm.max(
            (commutator(&triple.lminus, a) - comp(m - one) * c(ladder(s, m, false))).norm(),
        );
    }
    Ok(SphericalCheck {
        max_dev_z: dz,
        max_dev_plus: dp,
        max_dev_minus: dm,
        tolerance: tol,
        passed: dz.max(dp).max(dm) <= tol,
    })
}

/// Dimension of the space of rank-`rank` tensor operators on the space of
/// `triple`, i.e. of all solutions of the commutation relations.
pub fn tensor_operator_dimension(
    rank: HalfInt,
    triple: &GeneratorTriple,
    tol: &ToleranceConfig,
) -> usize {
    let d = triple.dim();
    let dd = d * d;
    let n = rank.multiplicity();
    let (adz, adp, adm) = (
        adjoint_action(&triple.lz),
        adjoint_action(&triple.lplus),
        adjoint_action(&triple.lminus),
    );
    let id = CMatrix::identity(dd, dd);
    let mut system = CMatrix::zeros(3 * n * dd, n * dd);
    for (i, m) in rank.projections().enumerate() {
        let row = 3 * i * dd;
        system
            .view_mut((row, i * dd), (dd, dd))
            .copy_from(&(&adz - &id * c(m.value())));
        system.view_mut((row + dd, i * dd), (dd, dd)).copy_from(&adp);
        system
            .view_mut((row + 2 * dd, i * dd), (dd, dd))
            .copy_from(&adm);
        // component m+1 sits at i-1, m-1 at i+1
        if i > 0 {
            system
                .view_mut((row + dd, (i - 1) * dd), (dd, dd))
                .copy_from(&(-&id * c(ladder(rank, m, true))));
        }
        if i + 1 < n {
            system
                .view_mut((row + 2 * dd, (i + 1) * dd), (dd, dd))
                .copy_from(&(-&id * c(ladder(rank, m, false))));
        }
    }
    kernel_basis(&system, tol).len()
}

/// Rank-(s+s') tensor on `s ⊕ s'` built from its top component by
/// V_{j,m−1} = [L−, V_{j,m}] / √(j(j+1) − m(m−1)).
pub fn vbs_tensor(s: HalfInt, s2: HalfInt) -> Result<SphericalTensorFamily> {
    if s.twice() < 1 || s2.twice() < 1 {
        return Err(Error::InvalidSpin(format!(
            "both spins must be at least 1/2, got {s} and {s2}"
        )));
    }
    let aux = RepSpec::new(vec![s, s2])?;
    let d = aux.dim();
    let rank = s + s2;
    let mut top = CMatrix::zeros(d, d);
    top[(aux.index(0, s)?, aux.index(1, -s2)?)] += c(1.0);
    top[(aux.index(1, s2)?, aux.index(0, -s)?)] += c(1.0);
    let lminus = direct_sum_generators(&aux).lminus;
    let mut components = vec![top];
    for m in rank.projections().take(rank.multiplicity() - 1) {
        let prev = components.last().unwrap();
        let next = commutator(&lminus, prev) / c(ladder(rank, m, false));
        components.push(next);
    }
    SphericalTensorFamily::new(rank, aux, components)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionChannel {
    pub j: HalfInt,
    pub present: bool,
    /// Dimension of the highest-weight solution space for this j.
    pub top_dim: usize,
}

/// Which spin-j channels appear in span{V_m V_m'} under the adjoint action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionSpectrum {
    pub rank: HalfInt,
    pub product_span_dim: usize,
    pub channels: Vec<FusionChannel>,
}

impl FusionSpectrum {
    pub fn absent(&self) -> Vec<HalfInt> {
        self.channels.iter().filter(|c| !c.present).map(|c| c.j).collect()
    }

    pub fn present(&self) -> Vec<HalfInt> {
        self.channels.iter().filter(|c| c.present).map(|c| c.j).collect()
    }
}

/// For each integer j ≤ 2·rank, solves for X in span{V_m V_m'} with
/// [Lz, X] = jX and [L+, X] = 0; the channel is absent iff only X = 0 solves.
pub fn fusion_spectrum(fam: &SphericalTensorFamily, tol: &ToleranceConfig) -> FusionSpectrum {
    let d = fam.aux_dim();
    let dd = d * d;
    let mats = fam.matrices();
    let products: Vec<_> = mats
        .iter()
        .flat_map(|a| mats.iter().map(move |b| vectorize(&(a * b))))
        .collect();
    let product_matrix = CMatrix::from_columns(&products);
    let span = range_basis(&product_matrix, tol);
    let triple = fam.generators();
    let (adz, adp) = (adjoint_action(&triple.lz), adjoint_action(&triple.lplus));
    let basis = if span.is_empty() {
        CMatrix::zeros(dd, 0)
    } else {
        CMatrix::from_columns(&span)
    };
    let zb = &adz * &basis;
    let pb = &adp * &basis;
    let channels = (0..=fam.rank().twice())
        .map(|jj| {
            let j = HalfInt::integer(jj);
            let top_dim = if span.is_empty() {
                0
            } else {
                let mut system = CMatrix::zeros(2 * dd, span.len());
                system
                    .view_mut((0, 0), (dd, span.len()))
                    .copy_from(&(&zb - &basis * c(j.value())));
                system.view_mut((dd, 0), (dd, span.len())).copy_from(&pb);
                kernel_basis(&system, tol).len()
            };
            FusionChannel {
                j,
                present: top_dim > 0,
                top_dim,
            }
        })
        .collect();
    FusionSpectrum {
        rank: fam.rank(),
        product_span_dim: span.len(),
        channels,
    }
}

/// Convenience: the top component squared, V_{r,r}².
pub fn top_component_square(fam: &SphericalTensorFamily) -> CMatrix {
    let top = &fam.matrices()[0];
    top * top
}
