//! Simplicial complexes, simplicial posets, links, forbidden-face
//! subcomplexes, multigraphs, and the diagram constructions that feed the
//! inflation machinery.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::sheaf::Diagram;

/// An abstract simplicial complex: named vertices and nonempty faces closed
/// under taking nonempty subsets. Faces are stored as sorted vertex-index
/// vectors, listed by (dimension, lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexData", into = "ComplexData")]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    faces: Vec<Vec<usize>>,
    face_set: HashSet<Vec<usize>>,
}

/// Wire form: `{"vertices": [...], "facets": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexData {
    pub vertices: Vec<String>,
    pub facets: Vec<Vec<String>>,
}

impl TryFrom<ComplexData> for SimplicialComplex {
    type Error = Error;
    fn try_from(d: ComplexData) -> Result<Self> {
        SimplicialComplex::from_facets(d.vertices, d.facets)
    }
}

impl From<SimplicialComplex> for ComplexData {
    fn from(k: SimplicialComplex) -> Self {
        ComplexData {
            facets: k
                .facets()
                .iter()
                .map(|f| f.iter().map(|&v| k.vertices[v].clone()).collect())
                .collect(),
            vertices: k.vertices,
        }
    }
}

impl SimplicialComplex {
    /// Builds the downward closure of the given facets. Every listed vertex
    /// becomes a face even when no facet mentions it; repeated facets and
    /// repeated vertices inside a facet are collapsed.
    pub fn from_facets<S: Into<String>>(
        vertices: Vec<S>,
        facets: Vec<Vec<S>>,
    ) -> Result<SimplicialComplex> {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0].clone()));
            }
        }
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut face_set: HashSet<Vec<usize>> = HashSet::new();
        for v in 0..names.len() {
            face_set.insert(vec![v]);
        }
        for facet in facets {
            let mut f = BTreeSet::new();
            for v in facet {
                let v = v.into();
                let ix = *index
                    .get(v.as_str())
                    .ok_or_else(|| Error::UnknownElement(v.clone()))?;
                f.insert(ix);
            }
            if f.is_empty() {
                continue;
            }
            let f: Vec<usize> = f.into_iter().collect();
            for len in 1..=f.len() {
                for sub in f.iter().copied().combinations(len) {
                    face_set.insert(sub);
                }
            }
        }
        Ok(Self::from_face_set(names, face_set))
    }

    /// Assembles a complex from a set of faces already known to be closed
    /// downward (chains of a poset, cliques of a graph).
    pub(crate) fn from_chain_faces(vertices: Vec<String>, faces: Vec<Vec<usize>>) -> Self {
        let mut face_set: HashSet<Vec<usize>> = HashSet::new();
        for mut f in faces {
            f.sort_unstable();
            face_set.insert(f);
        }
        Self::from_face_set(vertices, face_set)
    }

    fn from_face_set(vertices: Vec<String>, face_set: HashSet<Vec<usize>>) -> Self {
        let mut faces: Vec<Vec<usize>> = face_set.iter().cloned().collect();
        faces.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        SimplicialComplex {
            vertices,
            faces,
            face_set,
        }
    }

    /// Full simplex on vertices "1".."n".
    pub fn full_simplex(n: usize) -> SimplicialComplex {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let facet: Vec<String> = vertices.clone();
        SimplicialComplex::from_facets(vertices, vec![facet]).unwrap()
    }

    /// Boundary of the (n-1)-simplex on vertices "1".."n".
    pub fn boundary_simplex(n: usize) -> SimplicialComplex {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let facets: Vec<Vec<String>> = (1..=n)
            .map(|skip| {
                (1..=n)
                    .filter(|&i| i != skip)
                    .map(|i| i.to_string())
                    .collect()
            })
            .collect();
        SimplicialComplex::from_facets(vertices, facets).unwrap()
    }

    /// Cycle graph with n vertices (n >= 3), as a 1-complex.
    pub fn cycle(n: usize) -> SimplicialComplex {
        assert!(n >= 3);
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let facets: Vec<Vec<String>> = (1..=n)
            .map(|i| vec![i.to_string(), (i % n + 1).to_string()])
            .collect();
        SimplicialComplex::from_facets(vertices, facets).unwrap()
    }

    /// Path with n vertices, as a 1-complex.
    pub fn path(n: usize) -> SimplicialComplex {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let facets: Vec<Vec<String>> = (1..n)
            .map(|i| vec![i.to_string(), (i + 1).to_string()])
            .collect();
        SimplicialComplex::from_facets(vertices, facets).unwrap()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        self.face_set.contains(face)
    }

    pub fn dim(&self) -> i64 {
        self.faces.iter().map(|f| f.len() as i64 - 1).max().unwrap_or(-1)
    }

    pub fn faces_of_dim(&self, d: i64) -> Vec<&Vec<usize>> {
        self.faces
            .iter()
            .filter(|f| f.len() as i64 == d + 1)
            .collect()
    }

    /// Number of faces in each dimension, index k counting k-faces.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; (self.dim() + 1).max(0) as usize];
        for face in &self.faces {
            f[face.len() - 1] += 1;
        }
        f
    }

    /// Maximal faces, in canonical order.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut covered: HashSet<&Vec<usize>> = HashSet::new();
        for face in &self.faces {
            if face.len() == 1 {
                continue;
            }
            for sub in face.iter().copied().combinations(face.len() - 1) {
                if let Some(hit) = self.face_set.get(&sub) {
                    covered.insert(hit);
                }
            }
        }
        self.faces
            .iter()
            .filter(|f| !covered.contains(f))
            .cloned()
            .collect()
    }

    pub fn face_name(&self, face: &[usize]) -> String {
        face.iter().map(|&v| self.vertices[v].as_str()).join(",")
    }

    /// Face poset ordered by inclusion, ranked by cardinality.
    pub fn face_poset(&self) -> SimplicialPoset {
        let names: Vec<String> = self.faces.iter().map(|f| self.face_name(f)).collect();
        let by_name: HashMap<&str, &Vec<usize>> = names
            .iter()
            .map(String::as_str)
            .zip(self.faces.iter())
            .collect();
        let poset = Poset::from_leq(names.clone(), |a, b| {
            let (fa, fb) = (by_name[names[a].as_str()], by_name[names[b].as_str()]);
            fa.iter().all(|v| fb.contains(v))
        });
        let rank: Vec<u32> = poset
            .elements()
            .iter()
            .map(|n| by_name[n.as_str()].len() as u32)
            .collect();
        SimplicialPoset { poset, rank }
    }
}

/// A geometric simplicial poset: graded, with every lower cone a Boolean
/// lattice (the empty simplex is never stored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialPoset {
    poset: Poset,
    rank: Vec<u32>,
}

impl SimplicialPoset {
    /// Validates that every lower cone of `poset` is a Boolean lattice and
    /// derives the rank function.
    pub fn try_new(poset: Poset) -> Result<SimplicialPoset> {
        let n = poset.len();
        let minimal: Vec<bool> = {
            let mins = poset.minimal_elements();
            let mut v = vec![false; n];
            for m in mins {
                v[m] = true;
            }
            v
        };
        let mut rank = vec![0u32; n];
        for i in 0..n {
            let down: Vec<usize> = (0..n).filter(|&j| poset.leq(j, i)).collect();
            let atoms: Vec<usize> = down.iter().copied().filter(|&j| minimal[j]).collect();
            let r = atoms.len();
            if r >= 60 || down.len() != (1usize << r) - 1 {
                return Err(Error::NotSimplicial(format!(
                    "the cone below `{}` has {} elements over {} vertices",
                    poset.name(i),
                    down.len(),
                    r
                )));
            }
            let atom_pos: HashMap<usize, usize> =
                atoms.iter().enumerate().map(|(k, &a)| (a, k)).collect();
            let mut masks: Vec<u64> = Vec::with_capacity(down.len());
            for &j in &down {
                let mut mask = 0u64;
                for &a in &atoms {
                    if poset.leq(a, j) {
                        mask |= 1 << atom_pos[&a];
                    }
                }
                masks.push(mask);
            }
            let distinct: HashSet<u64> = masks.iter().copied().collect();
            if distinct.len() != down.len() {
                return Err(Error::NotSimplicial(format!(
                    "two faces below `{}` span the same vertex set",
                    poset.name(i)
                )));
            }
            for (x, &jx) in down.iter().enumerate() {
                for (y, &jy) in down.iter().enumerate() {
                    let sub = masks[x] & masks[y] == masks[x];
                    if poset.leq(jx, jy) != sub {
                        return Err(Error::NotSimplicial(format!(
                            "inclusion of vertex sets disagrees with the order below `{}`",
                            poset.name(i)
                        )));
                    }
                }
            }
            rank[i] = r as u32;
        }
        for &(a, b) in poset.covers() {
            if rank[b] != rank[a] + 1 {
                return Err(Error::NotSimplicial(format!(
                    "cover {} < {} does not raise rank by one",
                    poset.name(a),
                    poset.name(b)
                )));
            }
        }
        Ok(SimplicialPoset { poset, rank })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn rank(&self, i: usize) -> u32 {
        self.rank[i]
    }

    /// Dimension of the simplex `i` (rank minus one).
    pub fn dim_of(&self, i: usize) -> i64 {
        self.rank[i] as i64 - 1
    }

    pub fn dim(&self) -> i64 {
        self.rank.iter().map(|&r| r as i64 - 1).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.poset
            .maximal_elements()
            .into_iter()
            .all(|m| self.dim_of(m) == d)
    }

    /// The geometric link: the open upper cone above `i`, reranked so covers
    /// of `i` become vertices. Upper cones of simplicial posets are again
    /// simplicial.
    pub fn link(&self, name: &str) -> Result<SimplicialPoset> {
        let i = self.poset.require(name)?;
        let members: BTreeSet<usize> =
            (0..self.poset.len()).filter(|&j| self.poset.lt(i, j)).collect();
        let sub = self.poset.induced(&members);
        let rank: Vec<u32> = sub
            .elements()
            .iter()
            .map(|n| {
                let old = self.poset.index_of(n).unwrap();
                self.rank[old] - self.rank[i]
            })
            .collect();
        Ok(SimplicialPoset { poset: sub, rank })
    }
}

/// K(I): the faces of the (n-1)-simplex that do not contain `i`; the unique
/// minimal non-face is `i` itself. Vertices are "1".."n", `i` is 1-based.
/// When `i` is a single vertex that vertex disappears entirely, leaving the
/// full simplex on the others.
pub fn forbidden_subcomplex(n: usize, i: &BTreeSet<usize>) -> Result<SimplicialComplex> {
    if i.is_empty() {
        return Err(Error::EmptySimplex);
    }
    if n > 16 {
        return Err(Error::TooLarge {
            what: "simplex for forbidden-face enumeration",
            size: n,
            bound: 16,
        });
    }
    if let Some(&bad) = i.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::UnknownElement(bad.to_string()));
    }
    let mut faces: Vec<Vec<String>> = Vec::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for mask in 1u32..1 << n {
        let members: Vec<usize> = (1..=n).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
        if !i.iter().all(|v| members.contains(v)) {
            used.extend(members.iter().copied());
            faces.push(members.into_iter().map(|v| v.to_string()).collect());
        }
    }
    let vertices: Vec<String> = used.into_iter().map(|v| v.to_string()).collect();
    SimplicialComplex::from_facets(vertices, faces)
}

/// A multigraph: parallel edges allowed, loops not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultigraphData", into = "MultigraphData")]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<MultiEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiEdge {
    /// Vertex indices, lower first.
    pub ends: (usize, usize),
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultigraphData {
    pub vertices: Vec<String>,
    pub edges: Vec<MultiEdgeData>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiEdgeData {
    pub ends: (String, String),
    pub multiplicity: usize,
}

impl TryFrom<MultigraphData> for Multigraph {
    type Error = Error;
    fn try_from(d: MultigraphData) -> Result<Self> {
        Multigraph::new(d.vertices, d.edges)
    }
}

impl From<Multigraph> for MultigraphData {
    fn from(g: Multigraph) -> Self {
        MultigraphData {
            edges: g
                .edges
                .iter()
                .map(|e| MultiEdgeData {
                    ends: (
                        g.vertices[e.ends.0].clone(),
                        g.vertices[e.ends.1].clone(),
                    ),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            vertices: g.vertices,
        }
    }
}

impl Multigraph {
    pub fn new(vertices: Vec<String>, edges: Vec<MultiEdgeData>) -> Result<Multigraph> {
        let mut names = vertices;
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0].clone()));
            }
        }
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for e in edges {
            let a = *index
                .get(e.ends.0.as_str())
                .ok_or_else(|| Error::UnknownElement(e.ends.0.clone()))?;
            let b = *index
                .get(e.ends.1.as_str())
                .ok_or_else(|| Error::UnknownElement(e.ends.1.clone()))?;
            if a == b {
                return Err(Error::Invalid(format!("loop at `{}`", e.ends.0)));
            }
            if e.multiplicity == 0 {
                return Err(Error::Invalid(format!(
                    "edge ({}, {}) has multiplicity 0",
                    e.ends.0, e.ends.1
                )));
            }
            let ends = (a.min(b), a.max(b));
            if !seen.insert(ends) {
                return Err(Error::Invalid(format!(
                    "edge ({}, {}) listed twice",
                    e.ends.0, e.ends.1
                )));
            }
            out.push(MultiEdge {
                ends,
                multiplicity: e.multiplicity,
            });
        }
        out.sort_by_key(|e| e.ends);
        Ok(Multigraph {
            vertices: names,
            edges: out,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[MultiEdge] {
        &self.edges
    }
}

/// Product-style diagram over the dual face poset of `k`: each face gets the
/// product of the factor sets attached to it, and maps between nested faces
/// drop coordinates. The factor list of a subface must be a sublist of the
/// factor list of every face containing it. Because every restriction is a
/// projection, diagrams built this way are inhabited and flabby whenever all
/// factors are nonempty.
pub fn product_diagram(
    k: &SimplicialComplex,
    factors_of: impl Fn(&[usize]) -> Vec<(String, Vec<String>)>,
) -> Result<Diagram> {
    let fp = k.face_poset();
    let base = fp.poset().dual();

    let face_of: Vec<&Vec<usize>> = base
        .elements()
        .iter()
        .map(|name| {
            k.faces()
                .iter()
                .find(|f| k.face_name(f) == **name)
                .expect("face poset names come from the complex")
        })
        .collect();

    let mut stalks: Vec<Vec<String>> = Vec::with_capacity(base.len());
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::with_capacity(base.len());
    let mut factor_lists: Vec<Vec<(String, Vec<String>)>> = Vec::with_capacity(base.len());
    for face in &face_of {
        let factors = factors_of(face);
        let mut names = Vec::new();
        let mut tups = Vec::new();
        let sizes: Vec<usize> = factors.iter().map(|(_, m)| m.len()).collect();
        for tuple in cartesian(&sizes) {
            let label: Vec<&str> = factors
                .iter()
                .zip(&tuple)
                .map(|((_, members), &c)| members[c].as_str())
                .collect();
            names.push(format!("({})", label.join(",")));
            tups.push(tuple);
        }
        stalks.push(names);
        tuples.push(tups);
        factor_lists.push(factors);
    }

    let mut cover_maps = BTreeMap::new();
    for &(a, b) in base.covers() {
        // a is the bigger face; project its tuples onto b's factors
        let positions: Vec<usize> = factor_lists[b]
            .iter()
            .map(|(lab, _)| {
                factor_lists[a]
                    .iter()
                    .position(|(l, _)| l == lab)
                    .expect("factors of a subface appear in the face")
            })
            .collect();
        let index_b: HashMap<&Vec<usize>, usize> =
            tuples[b].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let table: Vec<usize> = tuples[a]
            .iter()
            .map(|t| {
                let projected: Vec<usize> = positions.iter().map(|&p| t[p]).collect();
                index_b[&projected]
            })
            .collect();
        cover_maps.insert((a, b), table);
    }
    Diagram::from_parts(base, stalks, cover_maps)
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for t in &out {
            for c in 0..s {
                let mut t2 = t.clone();
                t2.push(c);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// The Wachs vertex-inflation diagram: a face gets the product of the copy
/// sets of its vertices, maps are projections. Inflating along it yields the
/// vertex-inflated complex.
pub fn vertex_inflation_diagram(
    k: &SimplicialComplex,
    counts: &BTreeMap<String, usize>,
) -> Result<Diagram> {
    for v in k.vertices() {
        match counts.get(v) {
            None => return Err(Error::MissingCount(v.clone())),
            Some(0) => return Err(Error::NonPositiveCount(v.clone())),
            Some(_) => {}
        }
    }
    product_diagram(k, |face| {
        face.iter()
            .map(|&v| {
                let name = &k.vertices()[v];
                let n = counts[name];
                (
                    name.clone(),
                    (1..=n).map(|j| format!("{name}:{j}")).collect(),
                )
            })
            .collect()
    })
}

/// Clique complex of the underlying simple graph together with the
/// edge-product diagram whose inflation is the multiclique complex.
pub fn multiclique_diagram(g: &Multigraph) -> Result<(SimplicialComplex, Diagram)> {
    let n = g.vertices().len();
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        adj[e.ends.0][e.ends.1] = true;
        adj[e.ends.1][e.ends.0] = true;
    }
    // enumerate all cliques by increasing greatest vertex
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn grow(
        v0: usize,
        n: usize,
        adj: &[Vec<bool>],
        stack: &mut Vec<usize>,
        cliques: &mut Vec<Vec<usize>>,
    ) {
        for v in v0..n {
            if stack.iter().all(|&u| adj[u][v]) {
                stack.push(v);
                cliques.push(stack.clone());
                grow(v + 1, n, adj, stack, cliques);
                stack.pop();
            }
        }
    }
    grow(0, n, &adj, &mut stack, &mut cliques);
    let complex = SimplicialComplex::from_chain_faces(g.vertices().to_vec(), cliques);

    let mult: HashMap<(usize, usize), usize> = g
        .edges()
        .iter()
        .map(|e| (e.ends, e.multiplicity))
        .collect();
    let verts = g.vertices().to_vec();
    let diagram = product_diagram(&complex, |face| {
        face.iter()
            .copied()
            .tuple_combinations()
            .map(|(a, b)| {
                let m = mult[&(a, b)];
                let label = format!("{}~{}", verts[a], verts[b]);
                (
                    label.clone(),
                    (1..=m).map(|j| format!("{label}:{j}")).collect(),
                )
            })
            .collect()
    })?;
    Ok((complex, diagram))
}

/// A simplicial map given on vertices; building it checks that every face
/// lands on a face.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SimplicialMapData", into = "SimplicialMapData")]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    vertex_map: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplicialMapData {
    pub source: ComplexData,
    pub target: ComplexData,
    pub vertex_map: BTreeMap<String, String>,
}

impl TryFrom<SimplicialMapData> for SimplicialMap {
    type Error = Error;
    fn try_from(d: SimplicialMapData) -> Result<Self> {
        SimplicialMap::new(
            d.source.try_into()?,
            d.target.try_into()?,
            &d.vertex_map,
        )
    }
}

impl From<SimplicialMap> for SimplicialMapData {
    fn from(f: SimplicialMap) -> Self {
        SimplicialMapData {
            vertex_map: f
                .source
                .vertices()
                .iter()
                .zip(&f.vertex_map)
                .map(|(v, &w)| (v.clone(), f.target.vertices()[w].clone()))
                .collect(),
            source: f.source.into(),
            target: f.target.into(),
        }
    }
}

impl SimplicialMap {
    pub fn new(
        source: SimplicialComplex,
        target: SimplicialComplex,
        assoc: &BTreeMap<String, String>,
    ) -> Result<SimplicialMap> {
        let mut vertex_map = Vec::with_capacity(source.vertices().len());
        for v in source.vertices() {
            let w = assoc
                .get(v)
                .ok_or_else(|| Error::UnknownElement(v.clone()))?;
            let wi = target
                .vertex_index(w)
                .ok_or_else(|| Error::UnknownElement(w.clone()))?;
            vertex_map.push(wi);
        }
        let f = SimplicialMap {
            source,
            target,
            vertex_map,
        };
        for face in f.source.faces() {
            let image = f.image_of(face);
            if !f.target.contains_face(&image) {
                return Err(Error::NotSimplicialMap(f.source.face_name(face)));
            }
        }
        Ok(f)
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn image_of(&self, face: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = face.iter().map(|&v| self.vertex_map[v]).collect();
        set.into_iter().collect()
    }

    /// A face whose image has fewer vertices, if any.
    pub fn degenerate_witness(&self) -> Option<&Vec<usize>> {
        self.source
            .faces()
            .iter()
            .find(|f| self.image_of(f).len() != f.len())
    }

    /// A target face missed by every source face, if any.
    pub fn non_surjective_witness(&self) -> Option<&Vec<usize>> {
        let hit: HashSet<Vec<usize>> = self
            .source
            .faces()
            .iter()
            .map(|f| self.image_of(f))
            .collect();
        self.target.faces().iter().find(|f| !hit.contains(*f))
    }
}

/// The diagram of preimages of a nondegenerate, face-surjective simplicial
/// map: a target face gets the set of source faces over it, nested faces are
/// linked by sending a preimage to its unique face over the subface.
/// Inflating the target along this diagram recovers the source.
pub fn diagram_from_map(f: &SimplicialMap) -> Result<Diagram> {
    if let Some(w) = f.degenerate_witness() {
        return Err(Error::DegenerateMap(f.source().face_name(w)));
    }
    if let Some(w) = f.non_surjective_witness() {
        return Err(Error::NotSurjective(f.target().face_name(w)));
    }
    let fp = f.target().face_poset();
    let base = fp.poset().dual();

    let target_faces: Vec<&Vec<usize>> = base
        .elements()
        .iter()
        .map(|name| {
            f.target()
                .faces()
                .iter()
                .find(|face| f.target().face_name(face) == **name)
                .unwrap()
        })
        .collect();

    let mut fibers: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); base.len()];
    for face in f.source().faces() {
        let image = f.image_of(face);
        let name = f.target().face_name(&image);
        let at = base.index_of(&name).expect("image is a target face");
        fibers[at].push(face);
    }
    let stalks: Vec<Vec<String>> = fibers
        .iter()
        .map(|fiber| fiber.iter().map(|face| f.source().face_name(face)).collect())
        .collect();

    let mut cover_maps = BTreeMap::new();
    for &(a, b) in base.covers() {
        // a lies over the bigger face; send each preimage to its unique face
        // over the smaller one
        let small: &Vec<usize> = target_faces[b];
        let index_b: HashMap<&str, usize> = stalks[b]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut table = Vec::with_capacity(fibers[a].len());
        for big in &fibers[a] {
            let sub: Vec<usize> = big
                .iter()
                .copied()
                .filter(|&v| small.contains(&f.vertex_map[v]))
                .collect();
            debug_assert_eq!(sub.len(), small.len(), "nondegeneracy gives a unique face");
            let name = f.source().face_name(&sub);
            table.push(index_b[name.as_str()]);
        }
        cover_maps.insert((a, b), table);
    }
    Diagram::from_parts(base, stalks, cover_maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;

    #[test]
    fn face_poset_of_triangle() {
        let k = SimplicialComplex::full_simplex(3);
        let fp = k.face_poset();
        assert_eq!(fp.len(), 7);
        assert_eq!(fp.dim(), 2);
        assert!(fp.is_pure());
    }

    #[test]
    fn face_poset_of_path_and_deduplication() {
        let k = SimplicialComplex::from_facets(
            vec!["1", "2", "3"],
            vec![vec!["1", "2"], vec!["2", "3"], vec!["2", "3"]],
        )
        .unwrap();
        assert_eq!(k.face_poset().len(), 5);
    }

    #[test]
    fn every_listed_vertex_is_a_face() {
        let k = SimplicialComplex::from_facets(vec!["a", "b", "z"], vec![vec!["a", "b"]]).unwrap();
        assert_eq!(k.face_count(), 4);
        assert_eq!(k.facets().len(), 2);
    }

    #[test]
    fn star_of_a_vertex_in_triangle() {
        let k = SimplicialComplex::full_simplex(3);
        let fp = k.face_poset();
        let v1 = fp.poset().require("1").unwrap();
        let names = fp.poset().up_set(v1).names(fp.poset());
        assert_eq!(names, vec!["1", "1,2", "1,2,3", "1,3"]);
    }

    #[test]
    fn simplicial_poset_validation_rejects_non_boolean_cones() {
        // three atoms directly under a top: the cone has 4 elements, not 7
        let p = Poset::new(
            vec!["a", "b", "c", "t"],
            vec![("a", "t"), ("b", "t"), ("c", "t")],
        )
        .unwrap();
        assert!(matches!(
            SimplicialPoset::try_new(p),
            Err(Error::NotSimplicial(_))
        ));
    }

    #[test]
    fn face_posets_validate_as_simplicial() {
        for k in [
            SimplicialComplex::full_simplex(3),
            SimplicialComplex::boundary_simplex(4),
            SimplicialComplex::cycle(4),
            SimplicialComplex::path(3),
        ] {
            let fp = k.face_poset();
            let revalidated = SimplicialPoset::try_new(fp.poset().clone()).unwrap();
            assert_eq!(revalidated.rank, fp.rank);
        }
    }

    #[test]
    fn link_of_vertex_in_triangle_is_an_edge() {
        let fp = SimplicialComplex::full_simplex(3).face_poset();
        let link = fp.link("1").unwrap();
        assert_eq!(link.len(), 3);
        assert_eq!(link.dim(), 1);
        // shifted ranks make the former edges vertices
        let edge_count = (0..link.len()).filter(|&i| link.rank(i) == 1).count();
        assert_eq!(edge_count, 2);
        SimplicialPoset::try_new(link.poset().clone()).unwrap();
    }

    #[test]
    fn link_of_facet_is_empty() {
        let fp = SimplicialComplex::full_simplex(3).face_poset();
        let link = fp.link("1,2,3").unwrap();
        assert!(link.is_empty());
        assert_eq!(link.dim(), -1);
    }

    #[test]
    fn link_of_vertex_in_four_cycle_is_two_points() {
        let fp = SimplicialComplex::cycle(4).face_poset();
        let link = fp.link("1").unwrap();
        assert_eq!(link.len(), 2);
        assert_eq!(link.poset().covers().len(), 0);
    }

    #[test]
    fn link_dimension_formula_when_pure() {
        let fp = SimplicialComplex::boundary_simplex(4).face_poset();
        let n_minus_1 = fp.dim();
        for name in fp.poset().elements().clone() {
            let i = fp.poset().require(&name).unwrap();
            let link = fp.link(&name).unwrap();
            if link.is_empty() {
                assert_eq!(n_minus_1 - 1 - fp.dim_of(i), -1);
            } else {
                assert!(link.is_pure());
                assert_eq!(link.dim(), n_minus_1 - 1 - fp.dim_of(i));
            }
        }
    }

    #[test]
    fn forbidden_subcomplex_examples() {
        let k = forbidden_subcomplex(3, &[1, 2].into()).unwrap();
        let names: Vec<String> = k.faces().iter().map(|f| k.face_name(f)).collect();
        assert_eq!(names, vec!["1", "2", "3", "1,3", "2,3"]);

        let b = forbidden_subcomplex(4, &[1, 2, 3, 4].into()).unwrap();
        assert_eq!(b, SimplicialComplex::boundary_simplex(4));

        let s = forbidden_subcomplex(4, &[2].into()).unwrap();
        assert_eq!(s, SimplicialComplex::from_facets(
            vec!["1", "3", "4"],
            vec![vec!["1", "3", "4"]],
        ).unwrap());

        assert!(matches!(
            forbidden_subcomplex(3, &BTreeSet::new()),
            Err(Error::EmptySimplex)
        ));
    }

    #[test]
    fn forbidden_subcomplex_is_union_of_hyperfaces() {
        for n in 2..=5usize {
            for mask in 1u32..1 << n {
                let i: BTreeSet<usize> =
                    (1..=n).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
                let k = forbidden_subcomplex(n, &i).unwrap();
                let hyperfaces: Vec<Vec<String>> = i
                    .iter()
                    .map(|&skip| {
                        (1..=n)
                            .filter(|&v| v != skip)
                            .map(|v| v.to_string())
                            .collect()
                    })
                    .collect();
                let vertices: Vec<String> = (1..=n)
                    .filter(|v| i.len() >= 2 || !i.contains(v))
                    .map(|v| v.to_string())
                    .collect();
                let union = SimplicialComplex::from_facets(vertices, hyperfaces).unwrap();
                assert_eq!(k, union, "n={n}, i={i:?}");
            }
        }
    }

    #[test]
    fn vertex_inflation_all_ones_is_trivial() {
        let k = SimplicialComplex::full_simplex(3);
        let counts = k.vertices().iter().map(|v| (v.clone(), 1)).collect();
        let d = vertex_inflation_diagram(&k, &counts).unwrap();
        assert!(d.is_trivial());
    }

    #[test]
    fn vertex_inflation_requires_counts() {
        let k = SimplicialComplex::full_simplex(2);
        let err = vertex_inflation_diagram(&k, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::MissingCount(_)));
        let zeros = k.vertices().iter().map(|v| (v.clone(), 0)).collect();
        let err = vertex_inflation_diagram(&k, &zeros).unwrap_err();
        assert!(matches!(err, Error::NonPositiveCount(_)));
    }

    #[test]
    fn multiclique_of_simple_graph_is_trivial() {
        let g = Multigraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                MultiEdgeData {
                    ends: ("a".into(), "b".into()),
                    multiplicity: 1,
                },
                MultiEdgeData {
                    ends: ("b".into(), "c".into()),
                    multiplicity: 1,
                },
            ],
        )
        .unwrap();
        let (complex, d) = multiclique_diagram(&g).unwrap();
        assert_eq!(complex.face_count(), 5);
        assert!(d.is_trivial());
    }

    #[test]
    fn multiclique_triangle_with_a_double_edge() {
        let g = Multigraph::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                MultiEdgeData {
                    ends: ("1".into(), "2".into()),
                    multiplicity: 2,
                },
                MultiEdgeData {
                    ends: ("1".into(), "3".into()),
                    multiplicity: 1,
                },
                MultiEdgeData {
                    ends: ("2".into(), "3".into()),
                    multiplicity: 1,
                },
            ],
        )
        .unwrap();
        let (complex, d) = multiclique_diagram(&g).unwrap();
        assert_eq!(complex.face_count(), 7); // full triangle
        let top = d.base().index_of("1,2,3").unwrap();
        assert_eq!(d.stalk(top).len(), 2);
        assert!(d.is_inhabited(&Limits::default()).unwrap());
        assert!(d.is_flabby(&Limits::default()).unwrap().flabby);
    }

    #[test]
    fn multigraph_rejects_loops_and_zero_multiplicity() {
        let loopy = Multigraph::new(
            vec!["a".into()],
            vec![MultiEdgeData {
                ends: ("a".into(), "a".into()),
                multiplicity: 1,
            }],
        );
        assert!(loopy.is_err());
    }

    fn four_cycle_double_cover() -> SimplicialMap {
        let source = SimplicialComplex::cycle(4);
        let target = SimplicialComplex::full_simplex(2);
        let assoc: BTreeMap<String, String> = [
            ("1".to_string(), "1".to_string()),
            ("2".to_string(), "2".to_string()),
            ("3".to_string(), "1".to_string()),
            ("4".to_string(), "2".to_string()),
        ]
        .into();
        SimplicialMap::new(source, target, &assoc).unwrap()
    }

    #[test]
    fn diagram_from_double_cover() {
        let f = four_cycle_double_cover();
        let d = diagram_from_map(&f).unwrap();
        let mut sizes = d.stalk_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 4]);
        assert!(d.is_inhabited(&Limits::default()).unwrap());
    }

    #[test]
    fn diagram_from_identity_is_trivial() {
        let k = SimplicialComplex::path(3);
        let assoc: BTreeMap<String, String> = k
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        let f = SimplicialMap::new(k.clone(), k, &assoc).unwrap();
        let d = diagram_from_map(&f).unwrap();
        assert!(d.is_trivial());
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let edge = SimplicialComplex::full_simplex(2);
        let point = SimplicialComplex::full_simplex(1);
        let assoc: BTreeMap<String, String> = [
            ("1".to_string(), "1".to_string()),
            ("2".to_string(), "1".to_string()),
        ]
        .into();
        let f = SimplicialMap::new(edge, point, &assoc).unwrap();
        assert!(matches!(
            diagram_from_map(&f),
            Err(Error::DegenerateMap(_))
        ));
    }

    #[test]
    fn non_surjective_map_is_rejected() {
        let point = SimplicialComplex::full_simplex(1);
        let edge = SimplicialComplex::full_simplex(2);
        let assoc: BTreeMap<String, String> = [("1".to_string(), "1".to_string())].into();
        let f = SimplicialMap::new(point, edge, &assoc).unwrap();
        assert!(matches!(
            diagram_from_map(&f),
            Err(Error::NotSurjective(_))
        ));
    }

    #[test]
    fn map_to_non_face_is_rejected() {
        let two_edges = SimplicialComplex::from_facets(
            vec!["1", "2", "3"],
            vec![vec!["1", "2"], vec!["2", "3"]],
        )
        .unwrap();
        let assoc: BTreeMap<String, String> = [
            ("1".to_string(), "1".to_string()),
            ("2".to_string(), "3".to_string()),
            ("3".to_string(), "2".to_string()),
        ]
        .into();
        // sends edge {1,2} to {1,3}, which is not a face
        assert!(matches!(
            SimplicialMap::new(two_edges.clone(), two_edges, &assoc),
            Err(Error::NotSimplicialMap(_))
        ));
    }

    #[test]
    fn complex_json_round_trip() {
        let k = SimplicialComplex::boundary_simplex(3);
        let text = serde_json::to_string(&k).unwrap();
        let back: SimplicialComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(k, back);
    }
}
