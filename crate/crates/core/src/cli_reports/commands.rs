use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::report::{matrix_json, vector_json, Check, ReportDocument};
use super::suite::run_criterion;
use crate::angular_momentum::SiteSystem;
use crate::error::{Error, Result};
use crate::mps_engine::{expand_state, MpsChain, SiteTensor};
use crate::parent_hamiltonian::{
    assemble_hamiltonian, classify_multiplets, local_hamiltonian, null_space, reduced_couplings,
    spin1_coupling_table, vbs_parent_channels, verify_ground_state, CouplingSpec, Spin1Couplings,
};
use crate::spherical_tensors::{
    canonical_tensor, fusion_spectrum, vbs_tensor, verify_spherical, SphericalTensorFamily,
};
use crate::spin_numerics::{distance_up_to_scalar, eigvals_hermitian, HalfInt, Settings, C64};
use crate::valence_bond::{
    alternating_chain, alternating_dimer_state, analytic_predictions, brute_force_dimers,
    dimer_state, mg_chain, mg_state, symmetry_breaking_chain, symmetry_breaking_state,
    DimerCovering, SymmetryBreakingSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Matrix product valence-bond states, spherical tensors and parent Hamiltonians.
#[derive(Debug, Parser)]
#[command(name = "valence-mps", version)]
pub struct Cli {
    /// Output format on stdout.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical rank-R tensor on R ⊕ 0.
    Tensor {
        #[arg(long)]
        rank: HalfInt,
        /// Check the commutation relations.
        #[arg(long)]
        verify: bool,
    },
    /// Rank-(s+s') tensor on s ⊕ s'.
    Vbs {
        #[arg(long)]
        s: HalfInt,
        #[arg(long)]
        sprime: HalfInt,
        /// Report which spin channels appear in products of the tensor.
        #[arg(long)]
        fusion: bool,
    },
    /// Fully dimerized states on a ring of 2N sites.
    Dimer {
        #[arg(long)]
        spin: HalfInt,
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        correlations: bool,
        /// Build the three-site parent Hamiltonian and check both coverings.
        #[arg(long)]
        parent: bool,
    },
    /// Alternating spin-s and spin-s' singlets.
    Alternating {
        #[arg(long)]
        s: HalfInt,
        #[arg(long)]
        sprime: HalfInt,
        #[arg(long)]
        periods: usize,
    },
    /// Singlet pairs interleaved with a fixed single-site state.
    Symbreak {
        #[arg(long)]
        spin: HalfInt,
        /// Comma-separated amplitudes α_m for m = s, …, −s (e.g. `1,0.5+0.5i`).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<C64>,
        #[arg(long)]
        periods: usize,
    },
    /// Null space, multiplets and parent Hamiltonian of the canonical chain.
    Parent {
        #[arg(long)]
        spin: HalfInt,
        #[arg(long)]
        window: usize,
        /// One coupling for all multiplets, or one per multiplet in report order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
        lambda: Vec<f64>,
        /// Also assemble the ring Hamiltonian on this many sites.
        #[arg(long)]
        sites: Option<usize>,
    },
    /// Three-site spin-1 Hamiltonian in the eight-operator basis.
    #[command(name = "spin1-couplings")]
    Spin1Couplings {
        #[arg(long, default_value_t = 0.0)]
        lambda0: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda2: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda2p: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda3: f64,
        /// Use the one-parameter family that removes J3, J4, J6, J7, at this lambda2.
        #[arg(long, conflicts_with_all = ["lambda0", "lambda1", "lambda2", "lambda2p", "lambda3"])]
        para: Option<f64>,
    },
    /// Run the full verification suite.
    #[command(name = "verify-all")]
    VerifyAll {
        /// Run a single criterion (1 to 10).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

pub fn execute(cmd: &Command, settings: &Settings) -> Result<ReportDocument> {
    match cmd {
        Command::Tensor { rank, verify } => tensor(*rank, *verify),
        Command::Vbs { s, sprime, fusion } => vbs(*s, *sprime, *fusion, settings),
        Command::Dimer { spin, sites, correlations, parent } => {
            dimer(*spin, *sites, *correlations, *parent, settings)
        }
        Command::Alternating { s, sprime, periods } => alternating(*s, *sprime, *periods, settings),
        Command::Symbreak { spin, alpha, periods } => symbreak(*spin, alpha, *periods, settings),
        Command::Parent { spin, window, lambda, sites } => {
            parent(*spin, *window, lambda, *sites, settings)
        }
        Command::Spin1Couplings { lambda0, lambda1, lambda2, lambda2p, lambda3, para } => {
            let cp = match para {
                Some(l2) => Spin1Couplings::para_family(*l2)?,
                None => Spin1Couplings::new(*lambda0, *lambda1, *lambda2, *lambda2p, *lambda3)?,
            };
            spin1(&cp, para.is_some(), settings)
        }
        Command::VerifyAll { criterion } => verify_all(*criterion, settings),
    }
}

fn family_json(fam: &SphericalTensorFamily) -> Value {
    json!({
        "rank": fam.rank(),
        "aux_summands": fam.aux().summands(),
        "aux_dim": fam.aux_dim(),
        "components": fam
            .iter()
            .map(|(m, a)| json!({ "m": m, "matrix": matrix_json(a) }))
            .collect::<Vec<_>>(),
    })
}

fn tensor(rank: HalfInt, verify: bool) -> Result<ReportDocument> {
    let fam = canonical_tensor(rank)?;
    let mut doc = ReportDocument::new("tensor", json!({ "rank": rank, "verify": verify }));
    doc.set("tensor", family_json(&fam));
    if verify {
        let chk = verify_spherical(&fam, &fam.generators(), 1e-10)?;
        doc.set("commutation", json!(chk));
        doc.check(Check::at_most("commutation relations", chk.max_deviation(), chk.tolerance));
    }
    Ok(doc)
}

fn vbs(s: HalfInt, s2: HalfInt, fusion: bool, settings: &Settings) -> Result<ReportDocument> {
    let fam = vbs_tensor(s, s2)?;
    let mut doc = ReportDocument::new("vbs", json!({ "s": s, "sprime": s2, "fusion": fusion }));
    doc.set("tensor", family_json(&fam));
    let chk = verify_spherical(&fam, &fam.generators(), 1e-10)?;
    doc.set("commutation", json!(chk));
    doc.check(Check::at_most("commutation relations", chk.max_deviation(), chk.tolerance));
    if fusion {
        let spec = fusion_spectrum(&fam, &settings.tol);
        let expected = vbs_parent_channels(s, s2);
        doc.check(Check::flag("absent channels follow the fusion rule", spec.absent() == expected));
        doc.set("fusion", json!(spec));
        doc.set("absent", json!(spec.absent()));
        doc.set("expected_absent", json!(expected));
    }
    Ok(doc)
}

fn dimer(
    s: HalfInt,
    sites: usize,
    correlations: bool,
    parent: bool,
    settings: &Settings,
) -> Result<ReportDocument> {
    let inputs = json!({ "spin": s, "sites": sites, "correlations": correlations, "parent": parent });
    let mut doc = ReportDocument::new("dimer", inputs);
    if sites < 2 || !sites.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("--sites must be even and at least 2, got {sites}")));
    }
    let n = sites / 2;
    let tol = settings.tol.assert_tol;
    let an = analytic_predictions(s, n)?;
    let bf = brute_force_dimers(s, n, settings)?;
    doc.check(Check::close("overlap", bf.overlap, an.overlap, tol));
    doc.check(Check::close("norm plus", bf.norm_plus, an.norm_plus, tol));
    doc.check(Check::close("norm minus", bf.norm_minus, an.norm_minus, tol));
    if correlations {
        for (name, a, b) in [("corr plus", an.corr_plus, bf.corr_plus), ("corr minus", an.corr_minus, bf.corr_minus)] {
            match (a, b) {
                (Some(a), Some(b)) => doc.check(Check::close(name, b, a, tol)),
                (a, b) => doc.check(Check::flag(format!("{name} undefined on both sides"), a.is_none() && b.is_none())),
            }
        }
    }
    let mps = expand_state(&mg_chain(s, sites)?, settings)?;
    let direct = mg_state(s, n, 1, settings)?;
    if direct.norm() > 1e-12 {
        doc.check(Check::at_most("MPS equals dimer sum", distance_up_to_scalar(&mps, &direct), tol));
    } else {
        doc.check(Check::flag("MPS vanishes with the dimer sum", mps.norm() < 1e-12));
    }
    doc.set("analytic", json!(an));
    doc.set("brute_force", json!(bf));
    if parent {
        let raw = null_space(&canonical_tensor(s)?, 3, settings)?;
        let ns = classify_multiplets(&raw, &SiteSystem::uniform(s, 3)?, None, settings)?;
        let coup = CouplingSpec::uniform(ns.multiplets.iter().map(|m| m.label.clone()), 1.0)?;
        let h = local_hamiltonian(&ns, &coup)?;
        let big = assemble_hamiltonian(&h, sites, true, settings)?;
        let phis = (0..2)
            .map(|o| dimer_state(&DimerCovering::new(s, sites, o)?, settings))
            .collect::<Result<Vec<_>>>()?;
        let rep = verify_ground_state(&big, &phis, settings)?;
        doc.check(Check::at_most("both coverings annihilated", rep.max_residual(), 1e-8));
        doc.check(Check::at_most("Hamiltonian is PSD", -rep.min_eigenvalue, settings.tol.psd_tol));
        doc.set(
            "parent",
            json!({
                "multiplets": ns.multiplets.iter().map(|m| m.label.clone()).collect::<Vec<_>>(),
                "ground_state": rep,
            }),
        );
    }
    Ok(doc)
}

fn alternating(s: HalfInt, s2: HalfInt, periods: usize, settings: &Settings) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("alternating", json!({ "s": s, "sprime": s2, "periods": periods }));
    let direct = alternating_dimer_state(s, s2, periods, settings)?;
    let mps = expand_state(&alternating_chain(s, s2, periods)?, settings)?;
    doc.check(Check::at_most(
        "MPS equals explicit singlet product",
        distance_up_to_scalar(&mps, &direct),
        settings.tol.assert_tol,
    ));
    doc.set("dim", json!(direct.len()));
    doc.set("mps_norm_squared", json!(mps.norm_squared()));
    Ok(doc)
}

fn symbreak(s: HalfInt, alpha: &[C64], periods: usize, settings: &Settings) -> Result<ReportDocument> {
    let spec = SymmetryBreakingSpec::new(s, alpha.to_vec())?;
    let mut doc = ReportDocument::new("symbreak", json!({ "spin": s, "alpha": alpha, "periods": periods }));
    let direct = symmetry_breaking_state(&spec, periods, settings)?;
    let mps = expand_state(&symmetry_breaking_chain(&spec, periods)?, settings)?;
    doc.check(Check::at_most(
        "MPS equals explicit product",
        distance_up_to_scalar(&mps, &direct),
        settings.tol.assert_tol,
    ));
    doc.set("dim", json!(direct.len()));
    doc.set("mps_norm_squared", json!(mps.norm_squared()));
    Ok(doc)
}

fn parent(
    s: HalfInt,
    window: usize,
    lambda: &[f64],
    sites: Option<usize>,
    settings: &Settings,
) -> Result<ReportDocument> {
    let inputs = json!({ "spin": s, "window": window, "lambda": lambda, "sites": sites });
    let mut doc = ReportDocument::new("parent", inputs);
    let fam = canonical_tensor(s)?;
    let raw = null_space(&fam, window, settings)?;
    let sys = SiteSystem::uniform(s, window)?;
    let ns = classify_multiplets(&raw, &sys, None, settings)?;
    let labels: Vec<String> = ns.multiplets.iter().map(|m| m.label.clone()).collect();
    let values: Vec<f64> = match lambda.len() {
        1 => vec![lambda[0]; labels.len()],
        n if n == labels.len() => lambda.to_vec(),
        n => {
            return Err(Error::InvalidArgument(format!(
                "{n} couplings given for {} multiplets ({})",
                labels.len(),
                labels.join(", ")
            )))
        }
    };
    let coup = CouplingSpec::new(labels.iter().cloned().zip(values.iter().copied()))?;
    let h = local_hamiltonian(&ns, &coup)?;
    let tol = settings.tol.assert_tol;
    doc.check(Check::at_most("null vectors annihilate products", ns.annihilation_residual(), 10.0 * settings.tol.rank_tol));
    doc.check(Check::at_most("null space is su(2) invariant", ns.invariance_deviation(settings)?, tol));
    doc.check(Check::flag("null dimension meets d^k - D^2", ns.null_dim() >= ns.dimension_lower_bound()));
    doc.check(Check::at_most("h commutes with total spin", h.commutator_deviation(settings)?, tol));
    let spectrum = eigvals_hermitian(&h.h, &settings.tol)?;
    doc.check(Check::at_most("h is PSD", -spectrum[0], settings.tol.psd_tol));
    doc.set("null_dim", json!(ns.null_dim()));
    doc.set("dimension_lower_bound", json!(ns.dimension_lower_bound()));
    doc.set(
        "multiplets",
        json!(ns
            .multiplets
            .iter()
            .zip(&values)
            .map(|(m, l)| json!({ "label": m.label, "j": m.j, "lambda": l, "top": vector_json(&m.top) }))
            .collect::<Vec<_>>()),
    );
    doc.set("local_spectrum", json!(spectrum));
    if let Some(n) = sites {
        let big = assemble_hamiltonian(&h, n, true, settings)?;
        let psi = expand_state(&MpsChain::uniform(SiteTensor::from(&fam), n)?, settings)?;
        let states = if psi.norm() > 1e-12 { vec![psi] } else { Vec::new() };
        let rep = verify_ground_state(&big, &states, settings)?;
        if states.is_empty() {
            doc.check(Check::flag("MPS on this ring is nonzero", false));
        } else {
            doc.check(Check::at_most("MPS annihilated", rep.max_residual(), 1e-8));
        }
        doc.check(Check::at_most("chain Hamiltonian is PSD", -rep.min_eigenvalue, settings.tol.psd_tol));
        doc.set("chain", json!(rep));
    }
    Ok(doc)
}

fn spin1(cp: &Spin1Couplings, para: bool, settings: &Settings) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("spin1-couplings", json!({ "couplings": cp, "para": para }));
    let table = spin1_coupling_table(cp, settings)?;
    doc.check(Check::at_most("fitted equals closed-form J", table.max_deviation, settings.tol.assert_tol));
    doc.check(Check::at_most("fit residual", table.residual, settings.tol.assert_tol));
    if let Ok((delta, k)) = reduced_couplings(&table.fitted) {
        doc.set("reduced", json!({ "delta": delta, "k": k }));
    }
    doc.set("table", json!(table));
    Ok(doc)
}

fn verify_all(only: Option<usize>, settings: &Settings) -> Result<ReportDocument> {
    let mut doc = ReportDocument::new("verify-all", json!({ "criterion": only }));
    let ids: Vec<usize> = match only {
        Some(id) => vec![id],
        None => (1..=10).collect(),
    };
    for id in ids {
        let crit = run_criterion(id, settings)?;
        doc.set(
            &format!("criterion_{id:02}"),
            json!({ "title": crit.title, "passed": crit.passed(), "details": crit.results }),
        );
        for mut chk in crit.checks {
            chk.name = format!("criterion {id}: {}", chk.name);
            doc.check(chk);
        }
    }
    Ok(doc)
}
