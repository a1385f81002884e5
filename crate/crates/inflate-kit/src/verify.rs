//! Sphere counts over simplices, predicted Betti numbers from the wedge
//! decomposition, and the predicted-versus-actual comparison for inflations.
//!
//! The sphere count of a flabby inhabited diagram over a simplex is read off
//! the top Betti number of its inflation, certified as a wedge and
//! cross-checked against the Euler characteristic computed by face counting.
//! For a general base the per-simplex counts and link homologies assemble a
//! predicted Betti vector which must match the directly computed homology of
//! the inflated poset.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::homology::{
    cm_check, euler_characteristic, homology_of_poset, wedge_certificate, CmReport,
    HomologyReport, WedgeCertificate,
};
use crate::inflation::{complexity, inflate};
use crate::limits::Limits;
use crate::poset::Poset;
use crate::sheaf::Diagram;
use crate::simplicial::SimplicialPoset;

/// Result of counting spheres in the inflation of a simplex.
#[derive(Debug, Clone, Serialize)]
pub struct SphereCount {
    pub count: u64,
    pub dimension: i64,
    pub certificate: WedgeCertificate,
}

/// Checks that the dual of `base` is the face poset of a simplex and returns
/// the number of its vertices.
fn simplex_vertex_count(base: &Poset) -> Result<usize> {
    let p = base.dual();
    let sp = SimplicialPoset::try_new(p).map_err(|e| Error::HypothesisViolated {
        hypothesis: "base is the dual face poset of a simplex".into(),
        witness: e.to_string(),
    })?;
    let maxes = sp.poset().maximal_elements();
    let bad = || Error::HypothesisViolated {
        hypothesis: "base is the dual face poset of a simplex".into(),
        witness: "the poset is not a single Boolean cone".into(),
    };
    if maxes.len() != 1 {
        return Err(bad());
    }
    let n = sp.rank(maxes[0]) as usize;
    if sp.len() != (1usize << n) - 1 {
        return Err(bad());
    }
    Ok(n)
}

fn require_inhabited_and_flabby(d: &Diagram, limits: &Limits) -> Result<()> {
    if let Some(open) = d.uninhabited_witness(limits)? {
        return Err(Error::HypothesisViolated {
            hypothesis: "inhabited".into(),
            witness: format!("no section over {{{}}}", open.names(d.base()).join(",")),
        });
    }
    let verdict = d.is_flabby(limits)?;
    if let Some(w) = verdict.witness {
        return Err(Error::HypothesisViolated {
            hypothesis: "flabby".into(),
            witness: format!(
                "section {} over {{{}}} does not extend to {{{}}}",
                w.section.render_names(d),
                w.smaller.names(d.base()).join(","),
                w.larger.names(d.base()).join(",")
            ),
        });
    }
    Ok(())
}

/// n(D) for an inhabited flabby diagram over the dual face poset of a
/// simplex: the inflation must certify as a wedge of top-dimensional
/// spheres, and the rank is cross-checked against the Euler oracle. A failed
/// certificate under satisfied hypotheses is surfaced as an error: it would
/// refute the wedge theorem or expose a bug, never something to ignore.
pub fn sphere_count_over_simplex(d: &Diagram, limits: &Limits) -> Result<SphereCount> {
    let n = simplex_vertex_count(d.base())? as i64;
    require_inhabited_and_flabby(d, limits)?;
    let p = d.base().dual();
    let inflation = inflate(&p, d)?;
    let order = inflation.result().order_complex();
    let report = crate::homology::homology_of_complex(&order, limits)?;
    let cert = wedge_certificate(&report, n - 1);
    if !cert.passed {
        return Err(Error::CertificateFailed {
            degree: n - 1,
            detail: format!(
                "refutation candidate: {}",
                cert.failure_reason.unwrap_or_default()
            ),
        });
    }
    let chi = euler_characteristic(&order);
    let expected = if (n - 1) % 2 == 0 { chi } else { -chi };
    if expected < 0 || expected as u64 != cert.count {
        return Err(Error::CertificateFailed {
            degree: n - 1,
            detail: format!(
                "Euler oracle disagrees: face count gives {expected}, rank gives {}",
                cert.count
            ),
        });
    }
    Ok(SphereCount {
        count: cert.count,
        dimension: n - 1,
        certificate: cert,
    })
}

/// One wedge summand record: a simplex, its sphere count, and the Betti
/// vector of its link.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexTerm {
    pub simplex: String,
    pub dim: i64,
    pub sphere_count: u64,
    pub link_betti: BTreeMap<i64, u64>,
}

/// Per-simplex terms plus the assembled Betti prediction
/// base + Σ_I n(D_I) · β̃_{k - dim I - 1}(link I).
fn decomposition_terms(
    sp: &SimplicialPoset,
    d: &Diagram,
    limits: &Limits,
) -> Result<(Vec<SimplexTerm>, BTreeMap<i64, u64>)> {
    let base_betti = homology_of_poset(sp.poset(), limits)?;
    let names: Vec<String> = sp.poset().elements().to_vec();
    let computed: Vec<Result<SimplexTerm>> = exec::map_indexed(names.len(), |i| {
        let cone = d.base().up_set(i);
        let restricted = d.restrict_to_open(&cone)?;
        let count = sphere_count_over_simplex(&restricted, limits)?.count;
        let link = sp.link(&names[i])?;
        let link_report = homology_of_poset(link.poset(), limits)?;
        Ok(SimplexTerm {
            simplex: names[i].clone(),
            dim: sp.dim_of(i),
            sphere_count: count,
            link_betti: link_report.betti,
        })
    });
    let mut terms = Vec::with_capacity(computed.len());
    for t in computed {
        terms.push(t?);
    }

    let mut predicted: BTreeMap<i64, u64> = BTreeMap::new();
    for k in -1..=sp.dim() {
        predicted.insert(k, base_betti.betti(k));
    }
    for (&k, &b) in &base_betti.betti {
        if b > 0 {
            predicted.insert(k, b);
        }
    }
    for term in &terms {
        if term.sphere_count == 0 {
            continue;
        }
        for (&k_link, &b) in &term.link_betti {
            if b == 0 {
                continue;
            }
            let degree = k_link + term.dim + 1;
            *predicted.entry(degree).or_insert(0) += term.sphere_count * b;
        }
    }
    Ok((terms, predicted))
}

/// The wedge-decomposition prediction for a connected geometric simplicial
/// poset: suspension-shifted link homology weighted by per-simplex sphere
/// counts, over the base homology.
pub fn predicted_betti(
    sp: &SimplicialPoset,
    d: &Diagram,
    limits: &Limits,
) -> Result<(BTreeMap<i64, u64>, Vec<SimplexTerm>)> {
    if d.base() != &sp.poset().dual() {
        return Err(Error::BaseMismatch(
            "the diagram must live on the dual of the simplicial poset".into(),
        ));
    }
    if sp.is_empty() || !sp.poset().is_connected() {
        return Err(Error::NotConnected);
    }
    require_inhabited_and_flabby(d, limits)?;
    let (terms, predicted) = decomposition_terms(sp, d, limits)?;
    Ok((predicted, terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    pub inhabited: bool,
    pub flabby: bool,
    pub connected: bool,
    pub simplicial: bool,
}

/// Predicted-versus-actual verdict for one inflation.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub hypotheses: HypothesisFlags,
    /// True when inhabited, flabby and simplicial all hold; otherwise the
    /// theorem does not apply and `match` is null rather than failed.
    pub applicable: bool,
    pub components: usize,
    pub complexity: usize,
    pub base_betti: HomologyReport,
    pub actual: HomologyReport,
    pub per_simplex: Option<Vec<SimplexTerm>>,
    pub predicted_betti: Option<BTreeMap<i64, u64>>,
    #[serde(rename = "match")]
    pub match_: Option<bool>,
    pub cm_base: Option<bool>,
    pub cm_inflation: Option<CmReport>,
}

fn betti_maps_equal(a: &BTreeMap<i64, u64>, b: &BTreeMap<i64, u64>) -> bool {
    let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter().all(|k| {
        a.get(&k).copied().unwrap_or(0) == b.get(&k).copied().unwrap_or(0)
    })
}

/// Verifies the homotopy wedge decomposition at homology level. Hypothesis
/// failures are recorded in the report, not raised. A disconnected base is
/// handled by the same additive formula, which is exactly the
/// component-by-component decomposition reassembled: reduced β̃₀ of a
/// disjoint union gains one per extra component through the base term, and
/// every simplex term is local to its component.
pub fn verify_inflation(
    p: &Poset,
    d: &Diagram,
    limits: &Limits,
) -> Result<DecompositionReport> {
    if d.base() != &p.dual() {
        return Err(Error::BaseMismatch(
            "the diagram must live on the dual of the poset being inflated".into(),
        ));
    }
    let simplicial = SimplicialPoset::try_new(p.clone()).ok();
    let inhabited = d.is_inhabited(limits)?;
    let flabby = d.is_flabby(limits)?.flabby;
    let connected = p.is_connected();
    let hypotheses = HypothesisFlags {
        inhabited,
        flabby,
        connected,
        simplicial: simplicial.is_some(),
    };

    let inflation = inflate(p, d)?;
    let actual = homology_of_poset(inflation.result(), limits)?;
    let base_betti = homology_of_poset(p, limits)?;
    let applicable = inhabited && flabby && simplicial.is_some();

    let mut report = DecompositionReport {
        hypotheses,
        applicable,
        components: p.components().len(),
        complexity: complexity(d),
        base_betti,
        actual,
        per_simplex: None,
        predicted_betti: None,
        match_: None,
        cm_base: None,
        cm_inflation: None,
    };
    if !applicable {
        return Ok(report);
    }
    let sp = simplicial.unwrap();
    let (terms, predicted) = decomposition_terms(&sp, d, limits)?;
    report.match_ = Some(
        betti_maps_equal(&predicted, &report.actual.betti) && report.actual.torsion_free(),
    );
    report.per_simplex = Some(terms);
    report.predicted_betti = Some(predicted);

    let base_cm = cm_check(&sp, limits)?;
    report.cm_base = Some(base_cm.cm);
    if base_cm.cm {
        let inflated_sp = SimplicialPoset::try_new(inflation.result().clone())?;
        report.cm_inflation = Some(cm_check(&inflated_sp, limits)?);
    }
    Ok(report)
}
