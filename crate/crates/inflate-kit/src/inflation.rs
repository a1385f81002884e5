//! Completion of a poset along a diagram, generalized inflation, diagram
//! complexity, and the étale-space topology check.
//!
//! The completion glues all stalks into one poset: pairs (s, d) with
//! (s1, d1) <= (s2, d2) exactly when s1 <= s2 and the diagram pushes d1 to
//! d2. Inflation is the dual completion of the dual base, which turns
//! vertex-inflated complexes and multiclique complexes into special cases.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::poset::{Poset, PosetMap};
use crate::sheaf::Diagram;

/// A completion S^D or an inflation P_D, together with the projection back
/// onto the base.
#[derive(Debug, Clone)]
pub struct CompletedPoset {
    base: Poset,
    diagram: Diagram,
    result: Poset,
    projection: PosetMap,
    /// result index -> (base element, stalk member) indices
    pairs: Vec<(usize, usize)>,
}

impl CompletedPoset {
    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn result(&self) -> &Poset {
        &self.result
    }

    pub fn projection(&self) -> &PosetMap {
        &self.projection
    }

    pub fn pair(&self, result_ix: usize) -> (usize, usize) {
        self.pairs[result_ix]
    }

    /// Elements of the result sitting over `s`.
    pub fn fiber(&self, s: usize) -> Vec<usize> {
        (0..self.result.len())
            .filter(|&t| self.pairs[t].0 == s)
            .collect()
    }
}

pub fn pair_name(base: &Poset, d: &Diagram, s: usize, v: usize) -> String {
    format!("({},{})", base.name(s), d.stalk(s)[v])
}

/// The completion of `s` along `d`: one element per stalk member, ordered by
/// compatibility under the diagram maps.
pub fn completion(s: &Poset, d: &Diagram) -> Result<CompletedPoset> {
    if d.base() != s {
        return Err(Error::BaseMismatch(
            "completion requires the diagram to live on the given poset".into(),
        ));
    }
    let mut gen_pairs = Vec::new();
    let mut names = Vec::new();
    for e in 0..s.len() {
        for v in 0..d.stalk(e).len() {
            gen_pairs.push((e, v));
            names.push(pair_name(s, d, e, v));
        }
    }
    let result = Poset::from_leq(names.clone(), |a, b| {
        let ((s1, v1), (s2, v2)) = (gen_pairs[a], gen_pairs[b]);
        s.leq(s1, s2) && d.canonical_map(s1, s2).unwrap()[v1] == v2
    });
    let by_name: HashMap<&String, (usize, usize)> =
        names.iter().zip(gen_pairs.iter().copied()).collect();
    let pairs: Vec<(usize, usize)> = result
        .elements()
        .iter()
        .map(|n| by_name[n])
        .collect();
    let projection = PosetMap::from_indices(
        result.clone(),
        s.clone(),
        pairs.iter().map(|&(e, _)| e).collect(),
    )?;
    Ok(CompletedPoset {
        base: s.clone(),
        diagram: d.clone(),
        result,
        projection,
        pairs,
    })
}

/// Inflation of `p` along a diagram on its dual: the dual of the completion
/// of the dual, with the canonical projection q_D onto `p`.
pub fn inflate(p: &Poset, d: &Diagram) -> Result<CompletedPoset> {
    let dual = p.dual();
    if d.base() != &dual {
        return Err(Error::BaseMismatch(
            "inflation requires the diagram to live on the dual of the given poset".into(),
        ));
    }
    let comp = completion(&dual, d)?;
    let result = comp.result.dual();
    let projection = PosetMap::from_indices(
        result.clone(),
        p.clone(),
        comp.pairs.iter().map(|&(e, _)| e).collect(),
    )?;
    Ok(CompletedPoset {
        base: p.clone(),
        diagram: d.clone(),
        result,
        projection,
        pairs: comp.pairs,
    })
}

/// c(D): the total number of stalk members, which is also the size of the
/// completion.
pub fn complexity(d: &Diagram) -> usize {
    d.stalk_sizes().iter().sum()
}

/// Checks that the étale topology of the sheaf equals the Alexandrov
/// topology of the completion on the same element set.
///
/// The generated topology consists of unions of section graphs, so equality
/// holds exactly when (a) every section graph is an upper ideal and (b)
/// every minimal upper cone of the completion occurs among the graphs: any
/// open family generating the minimal cone of t must contain a graph that is
/// itself an upper ideal containing t and inside the cone, hence equal to
/// it. Both sides are compared as families of subsets, without any
/// homeomorphism search.
pub fn etale_check(s: &Poset, d: &Diagram, limits: &Limits) -> Result<bool> {
    let comp = completion(s, d)?;
    let pair_ix: HashMap<(usize, usize), usize> = comp
        .pairs
        .iter()
        .enumerate()
        .map(|(t, &p)| (p, t))
        .collect();

    let mut graphs: HashSet<BTreeSet<usize>> = HashSet::new();
    for u in s.enumerate_opens(limits)? {
        if u.is_empty() {
            continue;
        }
        for sec in d.sections(&u)? {
            let graph: BTreeSet<usize> = sec
                .choices()
                .map(|(e, v)| pair_ix[&(e, v)])
                .collect();
            for &t in &graph {
                let cone: BTreeSet<usize> = comp.result.up_set(t).members().collect();
                if !cone.is_subset(&graph) {
                    return Ok(false);
                }
            }
            graphs.insert(graph);
        }
    }
    for t in 0..comp.result.len() {
        let cone: BTreeSet<usize> = comp.result.up_set(t).members().collect();
        if !graphs.contains(&cone) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::simplicial::{vertex_inflation_diagram, SimplicialComplex, SimplicialPoset};

    fn edge_diagram() -> Diagram {
        let k = SimplicialComplex::full_simplex(2);
        let counts: BTreeMap<String, usize> =
            [("1".to_string(), 2), ("2".to_string(), 2)].into();
        vertex_inflation_diagram(&k, &counts).unwrap()
    }

    #[test]
    fn completion_of_trivial_projects_isomorphically() {
        let p = SimplicialComplex::path(3).face_poset().poset().clone();
        let d = Diagram::trivial(&p);
        let comp = completion(&p, &d).unwrap();
        assert!(comp.projection().is_isomorphism());
    }

    #[test]
    fn completion_of_a_fat_point_is_an_antichain() {
        let pt = Poset::new(vec!["v"], vec![]).unwrap();
        let d = Diagram::from_parts(
            pt.clone(),
            vec![vec!["x".into(), "y".into(), "z".into()]],
            BTreeMap::new(),
        )
        .unwrap();
        let comp = completion(&pt, &d).unwrap();
        assert_eq!(comp.result().len(), 3);
        assert!(comp.result().covers().is_empty());
    }

    #[test]
    fn completion_size_equals_complexity() {
        let d = edge_diagram();
        assert_eq!(complexity(&d), 8);
        let comp = completion(d.base(), &d).unwrap();
        assert_eq!(comp.result().len(), 8);
    }

    #[test]
    fn fibers_are_stalks_and_projection_is_monotonic() {
        let d = edge_diagram();
        let comp = completion(d.base(), &d).unwrap();
        for s in 0..d.base().len() {
            assert_eq!(comp.fiber(s).len(), d.stalk(s).len());
        }
    }

    #[test]
    fn inflating_an_edge_gives_the_four_cycle() {
        let k = SimplicialComplex::full_simplex(2);
        let p = k.face_poset().poset().clone();
        let d = edge_diagram();
        let inf = inflate(&p, &d).unwrap();
        let result = inf.result();
        assert_eq!(result.len(), 8);
        let sp = SimplicialPoset::try_new(result.clone()).unwrap();
        assert_eq!(sp.dim(), 1);
        let vertices = (0..result.len()).filter(|&i| sp.rank(i) == 1).count();
        let edges: Vec<usize> = (0..result.len()).filter(|&i| sp.rank(i) == 2).collect();
        assert_eq!(vertices, 4);
        assert_eq!(edges.len(), 4);
        for e in edges {
            let below = (0..result.len())
                .filter(|&j| result.lt(j, e))
                .count();
            assert_eq!(below, 2);
        }
    }

    #[test]
    fn inflation_along_trivial_is_isomorphic_to_base() {
        let p = SimplicialComplex::boundary_simplex(3).face_poset().poset().clone();
        let d = Diagram::trivial(&p.dual());
        let inf = inflate(&p, &d).unwrap();
        assert!(inf.projection().is_isomorphism());
    }

    #[test]
    fn inflation_of_simplicial_poset_is_simplicial() {
        let k = SimplicialComplex::boundary_simplex(3);
        let counts: BTreeMap<String, usize> = k
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), 1 + i % 2))
            .collect();
        let d = vertex_inflation_diagram(&k, &counts).unwrap();
        let inf = inflate(k.face_poset().poset(), &d).unwrap();
        SimplicialPoset::try_new(inf.result().clone()).unwrap();
    }

    #[test]
    fn base_mismatch_is_detected() {
        let d = edge_diagram();
        let other = Poset::new(vec!["q"], vec![]).unwrap();
        assert!(matches!(
            completion(&other, &d),
            Err(Error::BaseMismatch(_))
        ));
        assert!(matches!(
            inflate(&other, &d),
            Err(Error::BaseMismatch(_))
        ));
    }

    #[test]
    fn etale_check_trivial_and_inflation_diagrams() {
        let p = SimplicialComplex::path(3).face_poset().poset().clone();
        let t = Diagram::trivial(&p);
        assert!(etale_check(&p, &t, &Limits::default()).unwrap());

        let d = edge_diagram();
        assert!(etale_check(d.base(), &d, &Limits::default()).unwrap());
    }
}
