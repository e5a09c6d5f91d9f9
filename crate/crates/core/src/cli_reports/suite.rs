//! The ten end-to-end verification criteria run by `verify-all`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::report::Check;
use crate::angular_momentum::{casimir_projectors, SiteSystem};
use crate::error::Result;
use crate::mps_engine::{expand_state, random_unitary, MpsChain, SiteTensor};
use crate::parent_hamiltonian::{
    aklt_spin1_parent, assemble_hamiltonian, classify_multiplets, local_hamiltonian,
    mg_local_expansion, null_space, reduced_couplings, spin1_top_states, vbs_parent,
    vbs_parent_channels, verify_ground_state, CouplingSpec, LocalHamiltonian, Spin1Couplings,
    Spin1Model,
};
use crate::spherical_tensors::{
    aklt_rank1_tensor, canonical_tensor, fusion_spectrum, vbs_tensor, verify_spherical,
};
use crate::spin_numerics::{c, distance_up_to_scalar, CVector, HalfInt, Settings, C64};
use crate::valence_bond::{
    alternating_chain, alternating_dimer_state, analytic_predictions, brute_force_dimers,
    dimer_state, mg_chain, mg_state, symmetry_breaking_chain, symmetry_breaking_state,
    DimerCovering, SymmetryBreakingSpec,
};

/// Outcome of one criterion.
#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub results: Value,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn half(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

pub const TITLES: [&str; 10] = [
    "tensor commutation laws",
    "spin-1/2 three-site null space",
    "Majumdar-Ghosh parent identity",
    "spin-1 multiplet census",
    "spin-1 coupling table",
    "dimer overlap and correlation oracle",
    "fusion rule",
    "VBS ground states",
    "MPS versus explicit valence bonds",
    "gauge invariance",
];

pub fn run_criterion(id: usize, settings: &Settings) -> Result<Criterion> {
    let (checks, results) = match id {
        1 => tensor_laws()?,
        2 => spin_half_null_space(settings)?,
        3 => majumdar_ghosh(settings)?,
        4 => spin1_census(settings)?,
        5 => coupling_table(settings)?,
        6 => dimer_oracle(settings)?,
        7 => fusion_rule(settings)?,
        8 => vbs_ground_states(settings)?,
        9 => equivalence(settings)?,
        10 => gauge(settings)?,
        _ => {
            return Err(crate::Error::InvalidArgument(format!(
                "criteria are numbered 1 to 10, got {id}"
            )))
        }
    };
    Ok(Criterion { id, title: TITLES[id - 1], checks, results })
}

type Outcome = Result<(Vec<Check>, Value)>;

fn tensor_laws() -> Outcome {
    let mut checks = Vec::new();
    let mut devs = serde_json::Map::new();
    for t in 1..=6 {
        let s = half(t);
        let fam = canonical_tensor(s)?;
        let chk = verify_spherical(&fam, &fam.generators(), 1e-10)?;
        devs.insert(s.to_string(), json!(chk.max_deviation()));
        checks.push(Check::at_most(format!("rank {s} commutation"), chk.max_deviation(), 1e-10));
    }
    Ok((checks, json!({ "max_deviation": devs })))
}

fn spin_half_null_space(settings: &Settings) -> Outcome {
    let s = half(1);
    let raw = null_space(&canonical_tensor(s)?, 3, settings)?;
    let sys = SiteSystem::uniform(s, 3)?;
    let ns = classify_multiplets(&raw, &sys, None, settings)?;
    let mut checks = vec![Check::flag("null dimension is 4", ns.null_dim() == 4)];
    let single = ns.multiplets.len() == 1 && ns.multiplets[0].j == half(3);
    checks.push(Check::flag("single spin-3/2 multiplet", single));
    if single {
        let r3 = 1.0 / 3f64.sqrt();
        // |+++⟩, symmetric one-down, symmetric two-down, |−−−⟩
        let mut reference = vec![CVector::zeros(8); 4];
        reference[0][0] = c(1.0);
        for i in [1, 2, 4] {
            reference[1][i] = c(r3);
        }
        for i in [3, 5, 6] {
            reference[2][i] = c(r3);
        }
        reference[3][7] = c(1.0);
        let members = &ns.multiplets[0].members;
        let mut worst: f64 = 0.0;
        let mut perm = true;
        for r in &reference {
            let row: Vec<f64> = members.iter().map(|m| r.dotc(m).norm()).collect();
            worst = worst.max(row.iter().map(|x| x.min((x - 1.0).abs())).fold(0.0, f64::max));
            perm &= row.iter().filter(|x| (*x - 1.0).abs() <= 1e-9).count() == 1;
        }
        checks.push(Check::at_most("overlap is permutation times phases", worst, 1e-9));
        checks.push(Check::flag("one unit overlap per reference state", perm));
    }
    Ok((checks, json!({ "null_dim": ns.null_dim(), "multiplets": ns.multiplets.len() })))
}

fn mg_local(settings: &Settings) -> Result<LocalHamiltonian> {
    let s = half(1);
    let raw = null_space(&canonical_tensor(s)?, 3, settings)?;
    let ns = classify_multiplets(&raw, &SiteSystem::uniform(s, 3)?, None, settings)?;
    local_hamiltonian(&ns, &CouplingSpec::uniform(["3/2"], 1.0)?)
}

fn majumdar_ghosh(settings: &Settings) -> Outcome {
    let s = half(1);
    let h = mg_local(settings)?;
    let p = casimir_projectors(&SiteSystem::uniform(s, 3)?, settings)?.get(half(3));
    let mut checks = vec![Check::at_most("h equals P_3/2", (&h.h - &p).norm(), 1e-10)];
    let fit = mg_local_expansion(&h.h)?;
    for (label, expect) in fit.labels.iter().zip([0.5, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]) {
        let got = fit.coefficient(label).unwrap_or(f64::NAN);
        checks.push(Check::close(format!("coefficient of {label}"), got, expect, 1e-10));
    }
    let big = assemble_hamiltonian(&h, 6, true, settings)?;
    let phis = (0..2)
        .map(|o| dimer_state(&DimerCovering::new(s, 6, o)?, settings))
        .collect::<Result<Vec<_>>>()?;
    let rep = verify_ground_state(&big, &phis, settings)?;
    checks.push(Check::at_most("both coverings annihilated", rep.max_residual(), 1e-8));
    checks.push(Check::at_most("minimum eigenvalue", -rep.min_eigenvalue, 1e-9));
    Ok((
        checks,
        json!({
            "fit": fit,
            "ground_space_dim": rep.ground_space_dim,
            "min_eigenvalue": rep.min_eigenvalue,
            "residuals": rep.residuals,
        }),
    ))
}

fn spin1_census(settings: &Settings) -> Outcome {
    let model = Spin1Model::new(settings)?;
    let ns = &model.null_space;
    let labels: Vec<String> = ns.multiplets.iter().map(|m| m.label.clone()).collect();
    let mut checks = vec![
        Check::flag("null dimension is 21", ns.null_dim() == 21),
        Check::flag("multiplets 3, 2, 2', 1, 0", labels == ["3", "2", "2'", "1", "0"]),
    ];
    let worst = spin1_top_states()
        .iter()
        .map(|t| ns.outside_norm(t))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("top states inside the null space", worst, 1e-9));
    Ok((checks, json!({ "null_dim": ns.null_dim(), "labels": labels })))
}

fn coupling_table(settings: &Settings) -> Outcome {
    let model = Spin1Model::new(settings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut draws: Vec<Spin1Couplings> = (0..5)
        .map(|i| {
            let mut v = [0.0; 5];
            v[i] = 1.0;
            Spin1Couplings::new(v[0], v[1], v[2], v[3], v[4])
        })
        .collect::<Result<_>>()?;
    for _ in 0..20 {
        let v: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..10.0)).collect();
        draws.push(Spin1Couplings::new(v[0], v[1], v[2], v[3], v[4])?);
    }
    let (mut dev, mut res): (f64, f64) = (0.0, 0.0);
    for d in &draws {
        let t = model.table(d, settings)?;
        dev = dev.max(t.max_deviation);
        res = res.max(t.residual);
    }
    let mut checks = vec![
        Check::at_most("fitted versus closed-form J", dev, 1e-9),
        Check::at_most("fit residual", res, 1e-9),
    ];
    let para = model.table(&Spin1Couplings::para_family(6.0)?, settings)?;
    for i in [3, 4, 6, 7] {
        checks.push(Check::at_most(format!("J{i} vanishes at lambda2 = 6"), para.fitted[i].abs(), 1e-9));
    }
    let (delta, k) = reduced_couplings(&para.fitted)?;
    checks.push(Check::close("Delta", delta, 0.0, 1e-9));
    checks.push(Check::close("K", k, 1.0 / 6.0, 1e-9));
    Ok((
        checks,
        json!({ "draws": draws.len(), "para": para, "delta": delta, "k": k }),
    ))
}

fn dimer_oracle(settings: &Settings) -> Outcome {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (t, n) in [(1, 2), (1, 3), (2, 2)] {
        let s = half(t);
        let an = analytic_predictions(s, n)?;
        let bf = brute_force_dimers(s, n, settings)?;
        let tag = format!("s={s} N={n}");
        checks.push(Check::close(format!("{tag} overlap"), bf.overlap, an.overlap, 1e-9));
        for (name, a, b) in [("corr+", an.corr_plus, bf.corr_plus), ("corr-", an.corr_minus, bf.corr_minus)] {
            match (a, b) {
                (Some(a), Some(b)) => checks.push(Check::close(format!("{tag} {name}"), b, a, 1e-9)),
                (a, b) => checks.push(Check::flag(format!("{tag} {name} both undefined"), a.is_none() && b.is_none())),
            }
        }
        rows.push(json!({ "s": s, "n_dimers": n, "analytic": an, "brute_force": bf }));
    }
    let an = analytic_predictions(half(1), 3)?;
    checks.push(Check::close("s=1/2 N=3 corr+ = -1/4", an.corr_plus.unwrap_or(f64::NAN), -0.25, 1e-9));
    checks.push(Check::close("s=1/2 N=3 corr- = -9/20", an.corr_minus.unwrap_or(f64::NAN), -0.45, 1e-9));
    Ok((checks, Value::Array(rows)))
}

fn fusion_rule(settings: &Settings) -> Outcome {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let named = [
        ((2, 1), vec![6]),
        ((3, 2), vec![8, 10]),
        ((4, 1), vec![10]),
    ];
    for ((a, b), expect) in named {
        let spec = fusion_spectrum(&vbs_tensor(half(a), half(b))?, &settings.tol);
        let absent: Vec<i32> = spec.absent().iter().map(|j| j.twice()).collect();
        checks.push(Check::flag(format!("({}, {}) absent channels", half(a), half(b)), absent == expect));
    }
    let mut all_ok = true;
    for a in 1..=5 {
        for b in 1..=(6 - a) {
            let (s, s2) = (half(a), half(b));
            let spec = fusion_spectrum(&vbs_tensor(s, s2)?, &settings.tol);
            let ok = spec.absent() == vbs_parent_channels(s, s2);
            all_ok &= ok;
            rows.push(json!({ "s": s, "sprime": s2, "absent": spec.absent(), "matches": ok }));
        }
    }
    checks.push(Check::flag("absence exactly on (max(2s,2s'), 2s+2s']", all_ok));
    Ok((checks, Value::Array(rows)))
}

fn vbs_ground_states(settings: &Settings) -> Outcome {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let parent = vbs_parent(HalfInt::ONE, half(1), &CouplingSpec::uniform(["3"], 1.0)?, settings)?;
    let site = SiteTensor::from(&vbs_tensor(HalfInt::ONE, half(1))?);
    for n in [4, 6] {
        let psi = expand_state(&MpsChain::uniform(site.clone(), n)?, settings)?;
        let big = assemble_hamiltonian(&parent.local, n, true, settings)?;
        let rep = verify_ground_state(&big, &[psi], settings)?;
        checks.push(Check::at_most(format!("V3/2 chain N={n} annihilated"), rep.max_residual(), 1e-8));
        checks.push(Check::at_most(format!("V3/2 chain N={n} PSD"), -rep.min_eigenvalue, settings.tol.psd_tol));
        rows.push(json!({ "chain": "V3/2", "n_sites": n, "report": rep }));
    }
    let one = HalfInt::ONE;
    let sys = SiteSystem::uniform(one, 2)?;
    let p2 = casimir_projectors(&sys, settings)?.get(HalfInt::integer(2));
    let h = LocalHamiltonian::new(vec![one; 2], p2)?;
    let psi = expand_state(&MpsChain::uniform(SiteTensor::from(&aklt_rank1_tensor()), 6)?, settings)?;
    let big = assemble_hamiltonian(&h, 6, true, settings)?;
    let rep = verify_ground_state(&big, &[psi], settings)?;
    checks.push(Check::at_most("AKLT chain N=6 annihilated", rep.max_residual(), 1e-8));
    checks.push(Check::at_most("AKLT chain N=6 PSD", -rep.min_eigenvalue, settings.tol.psd_tol));
    let fit = aklt_spin1_parent(settings)?;
    // 2P₂ = S·S + (1/3)(S·S)² + 2/3
    checks.push(Check::close("2 c1 = 1", 2.0 * fit.coefficients[1], 1.0, 1e-9));
    checks.push(Check::close("2 c2 = 1/3", 2.0 * fit.coefficients[2], 1.0 / 3.0, 1e-9));
    checks.push(Check::close("2 c0 = 2/3", 2.0 * fit.coefficients[0], 2.0 / 3.0, 1e-9));
    checks.push(Check::at_most("projector fit residual", fit.residual, 1e-9));
    rows.push(json!({ "chain": "AKLT", "n_sites": 6, "report": rep, "fit": fit }));
    Ok((checks, Value::Array(rows)))
}

fn equivalence(settings: &Settings) -> Outcome {
    let mut checks = Vec::new();
    for (t, n) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
        let s = half(t);
        let mps = expand_state(&mg_chain(s, 2 * n)?, settings)?;
        let direct = mg_state(s, n, 1, settings)?;
        checks.push(Check::at_most(format!("MG s={s} N={n}"), distance_up_to_scalar(&mps, &direct), 1e-9));
    }
    for p in [1, 2] {
        let mps = expand_state(&alternating_chain(HalfInt::ONE, half(1), p)?, settings)?;
        let direct = alternating_dimer_state(HalfInt::ONE, half(1), p, settings)?;
        checks.push(Check::at_most(format!("alternating (1, 1/2) periods={p}"), distance_up_to_scalar(&mps, &direct), 1e-9));
    }
    let r = 0.5f64.sqrt();
    for (name, alpha) in [("(r, r)", vec![c(r), c(r)]), ("(0.6, 0.8i)", vec![c(0.6), C64::new(0.0, 0.8)])] {
        let spec = SymmetryBreakingSpec::new(half(1), alpha)?;
        for p in [1, 2] {
            let mps = expand_state(&symmetry_breaking_chain(&spec, p)?, settings)?;
            let direct = symmetry_breaking_state(&spec, p, settings)?;
            checks.push(Check::at_most(
                format!("symmetry breaking s=1/2 alpha={name} periods={p}"),
                distance_up_to_scalar(&mps, &direct),
                1e-9,
            ));
        }
    }
    Ok((checks, json!({})))
}

fn gauge(settings: &Settings) -> Outcome {
    let r = 0.5f64.sqrt();
    let chains: Vec<(&str, MpsChain)> = vec![
        ("MG s=1/2 N=6", mg_chain(half(1), 6)?),
        ("MG s=1 N=4", mg_chain(HalfInt::ONE, 4)?),
        ("AKLT N=6", MpsChain::uniform(SiteTensor::from(&aklt_rank1_tensor()), 6)?),
        ("V3/2 N=4", MpsChain::uniform(SiteTensor::from(&vbs_tensor(HalfInt::ONE, half(1))?), 4)?),
        ("alternating (1, 1/2)", alternating_chain(HalfInt::ONE, half(1), 1)?),
        (
            "symmetry breaking s=1/2",
            symmetry_breaking_chain(&SymmetryBreakingSpec::new(half(1), vec![c(r), c(r)])?, 2)?,
        ),
    ];
    let originals = chains
        .iter()
        .map(|(_, ch)| expand_state(ch, settings))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = vec![0.0f64; chains.len()];
    for _ in 0..50 {
        let mu = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        for (i, (_, ch)) in chains.iter().enumerate() {
            let u = random_unitary(ch.aux_dim(), &mut rng);
            let moved = expand_state(&ch.gauge_transform(&u, mu)?, settings)?;
            worst[i] = worst[i].max(distance_up_to_scalar(&originals[i], &moved));
        }
    }
    let checks = chains
        .iter()
        .zip(&worst)
        .map(|((name, _), w)| Check::at_most(format!("{name} over 50 gauges"), *w, 1e-9))
        .collect();
    Ok((checks, json!({ "transformations": 50 })))
}
