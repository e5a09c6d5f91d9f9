//! Parent Hamiltonians from matrix-product null spaces.
//!
//! The k-site null space Δ_k of a tensor family is the kernel of the map
//! c ↦ Σ c_{j₁…j_k} A_{j₁}⋯A_{j_k}. It is su(2) invariant, so it splits into
//! multiplets; a positive combination of their projectors, summed around the
//! ring, annihilates the matrix product state.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::angular_momentum::{
    casimir_projectors, multiplet_from_top, total_spin_operators, SiteSystem, TotalSpin,
};
use crate::error::{Error, Result};
use crate::mps_engine::SiteTensor;
use crate::spherical_tensors::{canonical_tensor, vbs_tensor, SphericalTensorFamily};
use crate::spin_numerics::{
    anticommutator, c, commutator, eigvals_hermitian, fit_operator_expansion, fix_phase,
    hermitian_deviation, kernel_basis, span_projector, vectorize, CMatrix, CVector, HalfInt,
    OperatorExpansion, Settings, C64,
};

/// One su(2) multiplet of a null space.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifiedMultiplet {
    pub j: HalfInt,
    /// `j`, then `j'`, `j''`, … for further copies of the same spin.
    pub label: String,
    pub top: CVector,
    /// |j,j⟩ … |j,−j⟩.
    pub members: Vec<CVector>,
}

impl ClassifiedMultiplet {
    pub fn projector(&self) -> CMatrix {
        span_projector(&self.members, self.top.len())
    }
}

/// Δ_k for a window of sites, optionally split into multiplets.
#[derive(Clone, Debug)]
pub struct NullSpaceResult {
    pub k: usize,
    pub site_spins: Vec<HalfInt>,
    pub aux_dim: usize,
    pub basis: Vec<CVector>,
    pub multiplets: Vec<ClassifiedMultiplet>,
    products: CMatrix,
}

impl NullSpaceResult {
    pub fn null_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn physical_dim(&self) -> usize {
        self.products.ncols()
    }

    /// d^k − D², the guaranteed minimum of `null_dim` when positive.
    pub fn dimension_lower_bound(&self) -> usize {
        self.physical_dim().saturating_sub(self.aux_dim * self.aux_dim)
    }

    pub fn projector(&self) -> CMatrix {
        span_projector(&self.basis, self.physical_dim())
    }

    pub fn site_system(&self) -> SiteSystem {
        SiteSystem::new(self.site_spins.clone()).expect("validated spins")
    }

    /// ‖Σ_c v_c A_{c₁}⋯A_{c_k}‖ for a vector of the physical space.
    pub fn product_norm(&self, v: &CVector) -> f64 {
        (&self.products * v).norm()
    }

    /// Largest `product_norm` over the basis.
    pub fn annihilation_residual(&self) -> f64 {
        self.basis.iter().map(|v| self.product_norm(v)).fold(0.0, f64::max)
    }

    /// max over a ∈ {z,+,−} of ‖(I − P_Δ) Lᵃ P_Δ‖.
    pub fn invariance_deviation(&self, settings: &Settings) -> Result<f64> {
        let ts = total_spin_operators(&self.site_system(), settings)?;
        let p = self.projector();
        let q = CMatrix::identity(p.nrows(), p.ncols()) - &p;
        Ok([&ts.triple.lz, &ts.triple.lplus, &ts.triple.lminus]
            .iter()
            .map(|l| (&q * *l * &p).norm())
            .fold(0.0, f64::max))
    }

    /// Distance of a vector from the null span relative to its norm.
    pub fn outside_norm(&self, v: &CVector) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        let proj: CVector = self
            .basis
            .iter()
            .fold(CVector::zeros(v.len()), |acc, b| acc + b * b.dotc(v));
        (v - proj).norm() / n
    }

    /// Number of multiplets per spin.
    pub fn census(&self) -> BTreeMap<HalfInt, usize> {
        let mut out = BTreeMap::new();
        for m in &self.multiplets {
            *out.entry(m.j).or_insert(0) += 1;
        }
        out
    }

    pub fn multiplet(&self, label: &str) -> Option<&ClassifiedMultiplet> {
        self.multiplets.iter().find(|m| m.label == label)
    }
}

/// Δ_k for an arbitrary window of site tensors (sharing one auxiliary space).
pub fn null_space_of_sites(sites: &[SiteTensor], settings: &Settings) -> Result<NullSpaceResult> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument("window must contain a site".into()));
    }
    let d_aux = sites[0].aux_dim();
    if sites.iter().any(|t| t.aux_dim() != d_aux) {
        return Err(Error::InvalidChain("auxiliary dimensions differ in the window".into()));
    }
    let dims: Vec<usize> = sites.iter().map(|t| t.phys_dim()).collect();
    let total = settings.checked_product(&dims)?;
    let mut products = CMatrix::zeros(d_aux * d_aux, total);
    let mut words = vec![CMatrix::identity(d_aux, d_aux)];
    for t in sites {
        words = words
            .iter()
            .flat_map(|w| t.matrices().iter().map(move |a| w * a))
            .collect();
    }
    for (col, w) in words.iter().enumerate() {
        products.set_column(col, &vectorize(w));
    }
    let basis = kernel_basis(&products, &settings.tol);
    Ok(NullSpaceResult {
        k: sites.len(),
        site_spins: sites.iter().map(|t| t.spin()).collect(),
        aux_dim: d_aux,
        basis,
        multiplets: Vec::new(),
        products,
    })
}

/// Δ_k of a uniform chain built from `fam`.
pub fn null_space(fam: &SphericalTensorFamily, k: usize, settings: &Settings) -> Result<NullSpaceResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("window size must be positive".into()));
    }
    null_space_of_sites(&vec![SiteTensor::from(fam); k], settings)
}

fn copy_label(j: HalfInt, copy: usize) -> String {
    format!("{j}{}", "'".repeat(copy))
}

fn gram_schmidt_push(out: &mut Vec<CVector>, v: &CVector) -> bool {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in out.iter() {
            let o = b.dotc(&w);
            w -= b * o;
        }
    }
    let n = w.norm();
    if n <= 1e-6 * v.norm().max(1.0) {
        return false;
    }
    out.push(w / c(n));
    true
}

/// Splits the null space into multiplets.
///
/// Highest-weight vectors of weight j inside Δ are the kernel of
/// [(I − P_Δ); L₊] restricted to the Lz = j coordinates. Within a degenerate
/// spin, `preferred_tops` are used first (in the given order, after
/// Gram-Schmidt), then the canonical basis of the remaining top-weight space.
pub fn classify_multiplets(
    ns: &NullSpaceResult,
    sys: &SiteSystem,
    preferred_tops: Option<&[CVector]>,
    settings: &Settings,
) -> Result<NullSpaceResult> {
    if sys.site_spins() != ns.site_spins.as_slice() {
        return Err(Error::DimensionMismatch(
            "site system does not match the null-space window".into(),
        ));
    }
    let ts: TotalSpin = total_spin_operators(sys, settings)?;
    let dim = ns.physical_dim();
    let q = CMatrix::identity(dim, dim) - ns.projector();
    let tol = &settings.tol;

    let mut preferred: BTreeMap<HalfInt, Vec<CVector>> = BTreeMap::new();
    for top in preferred_tops.unwrap_or(&[]) {
        let m = multiplet_from_top(top, &ts.triple, tol)?;
        if (&q * &m.states[0]).norm() > tol.assert_tol {
            return Err(Error::NotInNullSpace(m.j));
        }
        let mut v = m.states[0].clone();
        fix_phase(&mut v);
        preferred.entry(m.j).or_default().push(v);
    }

    let weights = sys.total_weights();
    let jmax = sys.max_total_spin();
    let mut multiplets = Vec::new();
    for twice in (jmax.twice() % 2..=jmax.twice()).rev().step_by(2) {
        let j = HalfInt::from_twice(twice);
        let idx: Vec<usize> = (0..dim).filter(|&i| weights[i] == j).collect();
        if idx.is_empty() {
            continue;
        }
        let n = idx.len();
        let stacked = CMatrix::from_fn(2 * dim, n, |r, col| {
            if r < dim {
                q[(r, idx[col])]
            } else {
                ts.triple.lplus[(r - dim, idx[col])]
            }
        });
        let hw: Vec<CVector> = kernel_basis(&stacked, tol)
            .into_iter()
            .map(|u| {
                let mut v = CVector::zeros(dim);
                for (a, &i) in idx.iter().enumerate() {
                    v[i] = u[a];
                }
                v
            })
            .collect();
        let mut tops: Vec<CVector> = Vec::new();
        for v in preferred.remove(&j).unwrap_or_default() {
            if !gram_schmidt_push(&mut tops, &v) {
                return Err(Error::InvalidArgument(format!(
                    "preferred spin-{j} tops are linearly dependent"
                )));
            }
        }
        if tops.len() > hw.len() {
            return Err(Error::Numerical(format!(
                "{} preferred spin-{j} tops exceed the {}-dimensional top space",
                tops.len(),
                hw.len()
            )));
        }
        for v in &hw {
            if tops.len() == hw.len() {
                break;
            }
            if gram_schmidt_push(&mut tops, v) {
                fix_phase(tops.last_mut().expect("just pushed"));
            }
        }
        for (copy, top) in tops.into_iter().enumerate() {
            let m = multiplet_from_top(&top, &ts.triple, tol)?;
            multiplets.push(ClassifiedMultiplet {
                j,
                label: copy_label(j, copy),
                top,
                members: m.states,
            });
        }
    }
    let covered: usize = multiplets.iter().map(|m| m.j.multiplicity()).sum();
    if covered != ns.null_dim() {
        return Err(Error::Numerical(format!(
            "multiplets cover {covered} states of a {}-dimensional null space",
            ns.null_dim()
        )));
    }
    let mut out = ns.clone();
    out.multiplets = multiplets;
    Ok(out)
}

/// Positive couplings keyed by multiplet label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingSpec {
    lambda: BTreeMap<String, f64>,
}

impl CouplingSpec {
    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut lambda = BTreeMap::new();
        for (label, value) in pairs {
            let label = label.into();
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveCoupling(label, value));
            }
            lambda.insert(label, value);
        }
        Ok(CouplingSpec { lambda })
    }

    /// The same value for every label.
    pub fn uniform<S: Into<String>>(labels: impl IntoIterator<Item = S>, value: f64) -> Result<Self> {
        CouplingSpec::new(labels.into_iter().map(|l| (l, value)))
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.lambda.get(label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.lambda.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A k-site Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHamiltonian {
    pub k: usize,
    pub site_spins: Vec<HalfInt>,
    pub h: CMatrix,
}

impl LocalHamiltonian {
    pub fn new(site_spins: Vec<HalfInt>, h: CMatrix) -> Result<Self> {
        let dim: usize = site_spins.iter().map(|s| s.multiplicity()).product();
        if h.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, sites span {dim}",
                h.nrows(),
                h.ncols()
            )));
        }
        Ok(LocalHamiltonian { k: site_spins.len(), site_spins, h })
    }

    /// max over a of ‖[h, Lᵃ_total]‖.
    pub fn commutator_deviation(&self, settings: &Settings) -> Result<f64> {
        let ts = total_spin_operators(&SiteSystem::new(self.site_spins.clone())?, settings)?;
        Ok([&ts.triple.lz, &ts.triple.lplus, &ts.triple.lminus]
            .iter()
            .map(|l| commutator(&self.h, l).norm())
            .fold(0.0, f64::max))
    }

    pub fn min_eigenvalue(&self, settings: &Settings) -> Result<f64> {
        Ok(eigvals_hermitian(&self.h, &settings.tol)?[0])
    }
}

fn weighted_sum(ns: &NullSpaceResult, weights: &[(String, f64)]) -> Result<CMatrix> {
    let dim = ns.physical_dim();
    let mut h = CMatrix::zeros(dim, dim);
    for (label, w) in weights {
        let m = ns
            .multiplet(label)
            .ok_or_else(|| Error::InvalidArgument(format!("no multiplet labelled `{label}`")))?;
        h += m.projector() * c(*w);
    }
    Ok(h)
}

/// h = Σ_μ λ_μ P_μ over the classified multiplets.
pub fn local_hamiltonian(ns: &NullSpaceResult, coup: &CouplingSpec) -> Result<LocalHamiltonian> {
    if ns.multiplets.is_empty() && ns.null_dim() > 0 {
        return Err(Error::InvalidArgument("null space has not been classified".into()));
    }
    for (label, _) in coup.iter() {
        if ns.multiplet(label).is_none() {
            return Err(Error::InvalidArgument(format!("no multiplet labelled `{label}`")));
        }
    }
    let weights = ns
        .multiplets
        .iter()
        .map(|m| {
            coup.get(&m.label)
                .map(|v| (m.label.clone(), v))
                .ok_or_else(|| Error::MissingCoupling(m.label.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    LocalHamiltonian::new(ns.site_spins.clone(), weighted_sum(ns, &weights)?)
}

/// Embeds a k-site operator on the listed sites of a uniform chain.
fn add_embedded(
    target: &mut CMatrix,
    h: &CMatrix,
    sites: &[usize],
    d: usize,
    n_sites: usize,
) {
    let stride = |i: usize| d.pow((n_sites - 1 - i) as u32);
    let strides: Vec<usize> = sites.iter().map(|&i| stride(i)).collect();
    let dk = h.nrows();
    let offsets: Vec<usize> = (0..dk)
        .map(|b| {
            let mut rem = b;
            let mut off = 0;
            for st in strides.iter().rev() {
                off += (rem % d) * st;
                rem /= d;
            }
            off
        })
        .collect();
    for col in 0..target.ncols() {
        let a = strides.iter().fold(0, |acc, &st| acc * d + (col / st) % d);
        let base = col - offsets[a];
        for (b, &off) in offsets.iter().enumerate() {
            let v = h[(b, a)];
            if v != C64::new(0.0, 0.0) {
                target[(base + off, col)] += v;
            }
        }
    }
}

/// H = Σ_l h_{l,…,l+k−1}; a ring when `periodic`, an open chain otherwise.
/// A chain of exactly k sites returns h itself.
pub fn assemble_hamiltonian(
    h: &LocalHamiltonian,
    n_sites: usize,
    periodic: bool,
    settings: &Settings,
) -> Result<CMatrix> {
    let s = h.site_spins[0];
    if h.site_spins.iter().any(|&x| x != s) {
        return Err(Error::InvalidArgument(
            "chain assembly needs a uniform local Hamiltonian".into(),
        ));
    }
    if n_sites < h.k {
        return Err(Error::InvalidArgument(format!(
            "{n_sites} sites cannot hold a {}-site term",
            h.k
        )));
    }
    let d = s.multiplicity();
    let dim = settings.checked_product(&vec![d; n_sites])?;
    if n_sites == h.k {
        return Ok(h.h.clone());
    }
    let mut out = CMatrix::zeros(dim, dim);
    let starts = if periodic { n_sites } else { n_sites - h.k + 1 };
    for l in 0..starts {
        let sites: Vec<usize> = (0..h.k).map(|t| (l + t) % n_sites).collect();
        add_embedded(&mut out, &h.h, &sites, d, n_sites);
    }
    Ok(out)
}

/// Annihilation and spectrum summary for a chain Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundStateReport {
    pub dim: usize,
    /// ‖Hψ‖ for each normalized input state.
    pub residuals: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Eigenvalues ≤ psd_tol.
    pub ground_space_dim: usize,
    pub psd: bool,
    pub hermitian_deviation: f64,
}

impl GroundStateReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_ground_state(
    h: &CMatrix,
    states: &[CVector],
    settings: &Settings,
) -> Result<GroundStateReport> {
    let dim = h.nrows();
    let mut residuals = Vec::with_capacity(states.len());
    for psi in states {
        if psi.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for a {dim}-dimensional Hamiltonian",
                psi.len()
            )));
        }
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("zero state".into()));
        }
        residuals.push((h * psi).norm() / n);
    }
    let values = eigvals_hermitian(h, &settings.tol)?;
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    Ok(GroundStateReport {
        dim,
        residuals,
        min_eigenvalue,
        ground_space_dim: values.iter().filter(|&&v| v <= settings.tol.psd_tol).count(),
        psd: min_eigenvalue >= -settings.tol.psd_tol,
        hermitian_deviation: hermitian_deviation(h),
    })
}

/// Power-basis coefficients c₀…c_n of the spin-j projector as a polynomial in
/// the Casimir, 𝒫_j = Σ cₙ (S·S)ⁿ, given the spins present.
pub fn casimir_inversion_coefficients(j: HalfInt, channels: &[HalfInt]) -> Result<Vec<f64>> {
    if !channels.contains(&j) {
        return Err(Error::InvalidArgument(format!("spin {j} is not among the channels")));
    }
    let mut poly = vec![1.0];
    for &l in channels.iter().filter(|&&l| l != j) {
        let denom = j.casimir() - l.casimir();
        let root = l.casimir();
        let mut next = vec![0.0; poly.len() + 1];
        for (n, &p) in poly.iter().enumerate() {
            next[n + 1] += p / denom;
            next[n] -= p * root / denom;
        }
        poly = next;
    }
    Ok(poly)
}

/// Evaluates the Casimir polynomial for 𝒫_j.
pub fn casimir_polynomial_projector(
    casimir: &CMatrix,
    j: HalfInt,
    channels: &[HalfInt],
) -> Result<CMatrix> {
    let coeffs = casimir_inversion_coefficients(j, channels)?;
    let n = casimir.nrows();
    let mut power = CMatrix::identity(n, n);
    let mut out = CMatrix::zeros(n, n);
    for (i, a) in coeffs.iter().enumerate() {
        if i > 0 {
            power = &power * casimir;
        }
        out += &power * c(*a);
    }
    Ok(out)
}

/// Couplings of the five spin-1 null multiplets (zeros allowed).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spin1Couplings {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda2p: f64,
    pub lambda3: f64,
}

impl Spin1Couplings {
    pub fn new(lambda0: f64, lambda1: f64, lambda2: f64, lambda2p: f64, lambda3: f64) -> Result<Self> {
        let c = Spin1Couplings { lambda0, lambda1, lambda2, lambda2p, lambda3 };
        for (name, v) in c.named() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::NonPositiveCoupling(name.into(), v));
            }
        }
        Ok(c)
    }

    /// λ₀ = 1, λ₁ = 8 + 2λ₂/3, λ₂' = 12 + 2λ₂, λ₃ = 18 + 4λ₂.
    pub fn para_family(lambda2: f64) -> Result<Self> {
        Spin1Couplings::new(
            1.0,
            8.0 + 2.0 * lambda2 / 3.0,
            lambda2,
            12.0 + 2.0 * lambda2,
            18.0 + 4.0 * lambda2,
        )
    }

    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda2p", self.lambda2p),
            ("lambda3", self.lambda3),
        ]
    }
}

fn spin1_vec(terms: &[(f64, [i32; 3])]) -> CVector {
    let mut v = CVector::zeros(27);
    for (coef, ms) in terms {
        let idx = ms.iter().fold(0, |acc, &m| acc * 3 + (1 - m) as usize);
        v[idx] += c(*coef);
    }
    v
}

/// Unnormalized top states t₃, t₂, t₂', t₁, t₀ of the spin-1 null space.
pub fn spin1_top_states() -> Vec<CVector> {
    vec![
        spin1_vec(&[(1.0, [1, 1, 1])]),
        spin1_vec(&[(1.0, [1, 1, 0]), (-1.0, [0, 1, 1])]),
        spin1_vec(&[(1.0, [1, 1, 0]), (-2.0, [1, 0, 1]), (1.0, [0, 1, 1])]),
        spin1_vec(&[
            (1.0, [1, 0, 0]),
            (1.0, [0, 0, 1]),
            (3.0, [-1, 1, 1]),
            (3.0, [1, 1, -1]),
            (-2.0, [1, -1, 1]),
            (-4.0, [0, 1, 0]),
        ]),
        spin1_vec(&[
            (1.0, [1, -1, 0]),
            (-1.0, [-1, 1, 0]),
            (-1.0, [1, 0, -1]),
            (1.0, [-1, 0, 1]),
            (1.0, [0, 1, -1]),
            (-1.0, [0, -1, 1]),
        ]),
    ]
}

pub const SPIN1_BASIS_LABELS: [&str; 8] = [
    "I",
    "S12",
    "S13",
    "S12^2",
    "S13^2",
    "{S12,S23}",
    "{S13,{S12,S23}}",
    "S12*S13*S23+S23*S13*S12",
];

/// The eight three-site operators, with the nearest-neighbour terms averaged
/// over the two bonds: `S12` is (S12+S23)/2 and `S12^2` is (S12²+S23²)/2,
/// which is what survives in the translation-invariant ring sum.
pub fn spin1_operator_basis() -> Vec<(String, CMatrix)> {
    let sys = SiteSystem::uniform(HalfInt::ONE, 3).expect("valid");
    let s12 = sys.spin_dot(0, 1).expect("valid");
    let s13 = sys.spin_dot(0, 2).expect("valid");
    let s23 = sys.spin_dot(1, 2).expect("valid");
    let a = anticommutator(&s12, &s23);
    let ops = [
        CMatrix::identity(27, 27),
        (&s12 + &s23) * c(0.5),
        s13.clone(),
        (&s12 * &s12 + &s23 * &s23) * c(0.5),
        &s13 * &s13,
        a.clone(),
        anticommutator(&s13, &a),
        &s12 * &s13 * &s23 + &s23 * &s13 * &s12,
    ];
    SPIN1_BASIS_LABELS
        .iter()
        .map(|l| l.to_string())
        .zip(ops)
        .collect()
}

/// J₀…J₇ from the closed-form table.
pub fn closed_form_spin1_couplings(cp: &Spin1Couplings) -> [f64; 8] {
    let Spin1Couplings { lambda0: l0, lambda1: l1, lambda2: l2, lambda2p: l2p, lambda3: l3 } = *cp;
    [
        -2.0 * l0 + 3.0 / 5.0 * l1 + (l2 + l2p) / 3.0 + l3 / 15.0,
        2.0 * l0 - 2.0 / 5.0 * l1 - (l2 + l2p) / 3.0 + 11.0 / 15.0 * l3,
        -3.0 * l0 + l1 / 20.0 + (l2 + l2p) / 2.0 - 3.0 / 10.0 * l3,
        2.0 * l0 - 13.0 / 20.0 * l1 - (l2 - l2p) / 6.0 + l3 / 15.0,
        l0 + l1 / 20.0 + (l2 - l2p) / 6.0 + l3 / 30.0,
        l0 - (l2 + l2p) / 6.0 + l3 / 6.0,
        -l0 + l1 / 10.0 + l2p / 6.0 - l3 / 10.0,
        l0 - l1 / 40.0 - (l2 + 5.0 * l2p) / 12.0 + 7.0 / 30.0 * l3,
    ]
}

/// (Δ, K) = (J₂/J₁, J₅/J₁) of the nearest/next-nearest normal form.
pub fn reduced_couplings(j: &[f64]) -> Result<(f64, f64)> {
    if j.len() != 8 {
        return Err(Error::DimensionMismatch(format!("expected 8 couplings, got {}", j.len())));
    }
    if j[1] <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "nearest-neighbour coupling {} is not positive",
            j[1]
        )));
    }
    Ok((j[2] / j[1], j[5] / j[1]))
}

/// Fitted versus closed-form J for one set of spin-1 couplings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingTable {
    pub couplings: Spin1Couplings,
    pub labels: Vec<String>,
    pub fitted: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub residual: f64,
    pub max_deviation: f64,
}

/// The classified spin-1 null space and operator basis, reusable across
/// coupling choices.
#[derive(Clone, Debug)]
pub struct Spin1Model {
    pub null_space: NullSpaceResult,
    basis: Vec<(String, CMatrix)>,
    projectors: BTreeMap<String, CMatrix>,
}

impl Spin1Model {
    pub fn new(settings: &Settings) -> Result<Self> {
        let fam = canonical_tensor(HalfInt::ONE)?;
        let raw = null_space(&fam, 3, settings)?;
        let sys = SiteSystem::uniform(HalfInt::ONE, 3)?;
        let ns = classify_multiplets(&raw, &sys, Some(&spin1_top_states()), settings)?;
        let projectors = ns
            .multiplets
            .iter()
            .map(|m| (m.label.clone(), m.projector()))
            .collect();
        Ok(Spin1Model { null_space: ns, basis: spin1_operator_basis(), projectors })
    }

    /// h = 6λ₀P₀ + λ₁P₁ + λ₂P₂' + λ₂'P₂ + λ₃P₃ in terms of the normalized
    /// multiplet projectors labelled by top order (see `spin1_top_states`).
    pub fn hamiltonian(&self, cp: &Spin1Couplings) -> CMatrix {
        let weights = [
            ("0", 6.0 * cp.lambda0),
            ("1", cp.lambda1),
            ("2'", cp.lambda2),
            ("2", cp.lambda2p),
            ("3", cp.lambda3),
        ];
        let mut h = CMatrix::zeros(27, 27);
        for (label, w) in weights {
            h += &self.projectors[label] * c(w);
        }
        h
    }

    pub fn table(&self, cp: &Spin1Couplings, settings: &Settings) -> Result<CouplingTable> {
        let fit: OperatorExpansion = fit_operator_expansion(&self.hamiltonian(cp), &self.basis)?;
        let scale = cp.named().iter().map(|(_, v)| v.abs()).fold(1.0, f64::max);
        if fit.residual > settings.tol.assert_tol * scale {
            return Err(Error::FitResidual(fit.residual));
        }
        let closed_form = closed_form_spin1_couplings(cp).to_vec();
        let max_deviation = fit
            .coefficients
            .iter()
            .zip(&closed_form)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(CouplingTable {
            couplings: *cp,
            labels: fit.labels,
            fitted: fit.coefficients,
            closed_form,
            residual: fit.residual,
            max_deviation,
        })
    }
}

pub fn spin1_coupling_table(cp: &Spin1Couplings, settings: &Settings) -> Result<CouplingTable> {
    Spin1Model::new(settings)?.table(cp, settings)
}

/// Spins whose projectors may enter the two-site VBS parent Hamiltonian:
/// max(2s, 2s2) < j ≤ 2s + 2s2.
pub fn vbs_parent_channels(s: HalfInt, s2: HalfInt) -> Vec<HalfInt> {
    let top = (s + s2).twice() * 2;
    let low = (s.twice().max(s2.twice())) * 2;
    ((low + 2)..=top)
        .step_by(2)
        .map(HalfInt::from_twice)
        .collect()
}

/// Two-site VBS parent Hamiltonian and its consistency with the null space.
#[derive(Clone, Debug)]
pub struct VbsParent {
    pub s: HalfInt,
    pub s2: HalfInt,
    pub channels: Vec<HalfInt>,
    pub local: LocalHamiltonian,
    /// Spins of the classified k = 2 null space, descending.
    pub null_spins: Vec<HalfInt>,
    /// max_j ‖(I − P_Δ)𝒫_j‖.
    pub containment_residual: f64,
}

/// h = Σ λ_j 𝒫_j on two spin-(s+s2) sites, keyed by the spin label of j.
pub fn vbs_parent(
    s: HalfInt,
    s2: HalfInt,
    coup: &CouplingSpec,
    settings: &Settings,
) -> Result<VbsParent> {
    let fam = vbs_tensor(s, s2)?;
    let spin = fam.rank();
    let channels = vbs_parent_channels(s, s2);
    for (label, _) in coup.iter() {
        if !channels.iter().any(|j| j.to_string() == label) {
            return Err(Error::InvalidArgument(format!(
                "spin {label} is not an allowed parent channel"
            )));
        }
    }
    let sys = SiteSystem::uniform(spin, 2)?;
    let proj = casimir_projectors(&sys, settings)?;
    let raw = null_space(&fam, 2, settings)?;
    let ns = classify_multiplets(&raw, &sys, None, settings)?;
    let p_delta = ns.projector();
    let q = CMatrix::identity(p_delta.nrows(), p_delta.ncols()) - p_delta;
    let dim = proj.dim();
    let mut h = CMatrix::zeros(dim, dim);
    let mut containment_residual: f64 = 0.0;
    for j in &channels {
        let label = j.to_string();
        let lambda = coup.get(&label).ok_or(Error::MissingCoupling(label))?;
        let pj = proj.get(*j);
        containment_residual = containment_residual.max((&q * &pj).norm());
        h += pj * c(lambda);
    }
    Ok(VbsParent {
        s,
        s2,
        channels,
        local: LocalHamiltonian::new(vec![spin; 2], h)?,
        null_spins: ns.multiplets.iter().map(|m| m.j).collect(),
        containment_residual,
    })
}

/// 𝒫₂ of two spin-1 sites in the basis {I, S₁·S₂, (S₁·S₂)²}.
pub fn aklt_spin1_parent(settings: &Settings) -> Result<OperatorExpansion> {
    let sys = SiteSystem::uniform(HalfInt::ONE, 2)?;
    let p2 = casimir_projectors(&sys, settings)?.get(HalfInt::integer(2));
    let x = sys.spin_dot(0, 1)?;
    fit_operator_expansion(
        &p2,
        &[
            ("I".into(), CMatrix::identity(9, 9)),
            ("S1.S2".into(), x.clone()),
            ("(S1.S2)^2".into(), &x * &x),
        ],
    )
}

/// The spin-1/2 three-site parent h = 𝒫_{3/2} in the basis
/// {I, s₁·s₂, s₁·s₃, s₂·s₃}.
pub fn mg_local_expansion(h: &CMatrix) -> Result<OperatorExpansion> {
    let sys = SiteSystem::uniform(HalfInt::HALF, 3)?;
    fit_operator_expansion(
        h,
        &[
            ("I".into(), CMatrix::identity(8, 8)),
            ("s1.s2".into(), sys.spin_dot(0, 1)?),
            ("s1.s3".into(), sys.spin_dot(0, 2)?),
            ("s2.s3".into(), sys.spin_dot(1, 2)?),
        ],
    )
}
