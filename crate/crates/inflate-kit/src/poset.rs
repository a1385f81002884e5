//! Finite posets and their Alexandrov topology.
//!
//! A poset is stored as a set of element names plus the transitively reduced
//! cover relation; the full order is the reflexive-transitive closure of the
//! covers, kept as a bit matrix. Open sets of the associated Alexandrov
//! topology are exactly the upper order ideals.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::simplicial::SimplicialComplex;

/// Row-major square bit matrix for the `leq` relation.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRel {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRel {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitRel {
            n,
            words,
            bits: vec![0; words * n],
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1u64 << (j % 64);
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// row(i) |= row(j)
    fn or_row(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        let hi = i.max(j);
        let (a, b) = self.bits.split_at_mut(hi * self.words);
        let (dst, src) = if i < j {
            (&mut a[i * self.words..(i + 1) * self.words], &b[..self.words])
        } else {
            (&mut b[..self.words], &a[j * self.words..(j + 1) * self.words])
        };
        for (d, s) in dst.iter_mut().zip(src) {
            *d |= *s;
        }
    }
}

/// A finite partially ordered set. Elements are opaque strings, stored sorted
/// so every derived listing is canonical.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PosetData", into = "PosetData")]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    leq: BitRel,
    reduced_on_build: bool,
}

/// Wire form: `{"elements": [...], "covers": [["a","b"], ...]}` where
/// `["a","b"]` records the cover a < b.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetData {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl From<Poset> for PosetData {
    fn from(p: Poset) -> Self {
        PosetData {
            covers: p.cover_names(),
            elements: p.elements,
        }
    }
}

impl TryFrom<PosetData> for Poset {
    type Error = Error;
    fn try_from(d: PosetData) -> Result<Self> {
        Poset::new(d.elements, d.covers)
    }
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.covers == other.covers
    }
}
impl Eq for Poset {}

impl Poset {
    /// Validates and builds a poset from element names and cover pairs
    /// `(a, b)` meaning a < b. Cover sets that are not transitively reduced
    /// are reduced with a warning flag (see [`Poset::was_reduced`]); cycles
    /// are rejected.
    pub fn new<S: Into<String>>(elements: Vec<S>, covers: Vec<(S, S)>) -> Result<Poset> {
        let mut names: Vec<String> = elements.into_iter().map(Into::into).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0].clone()));
            }
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let n = names.len();

        let mut edges = BTreeSet::new();
        for (a, b) in covers {
            let (a, b) = (a.into(), b.into());
            let ia = *index.get(&a).ok_or(Error::UnknownElement(a.clone()))?;
            let ib = *index.get(&b).ok_or(Error::UnknownElement(b.clone()))?;
            if ia == ib {
                return Err(Error::CycleDetected(vec![a.clone(), a]));
            }
            edges.insert((ia, ib));
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();

        let order = toposort(n, &edges).map_err(|cycle| {
            Error::CycleDetected(cycle.into_iter().map(|i| names[i].clone()).collect())
        })?;

        // Reflexive-transitive closure, filling rows from the top down.
        let mut up: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &edges {
            up[a].push(b);
        }
        let mut leq = BitRel::new(n.max(1));
        for &v in order.iter().rev() {
            leq.set(v, v);
            for i in 0..up[v].len() {
                leq.or_row(v, up[v][i]);
            }
        }

        // Drop covers implied by a two-step path.
        let redundant = |&(a, b): &(usize, usize)| {
            (0..n).any(|c| c != a && c != b && leq.get(a, c) && leq.get(c, b))
        };
        let reduced: Vec<(usize, usize)> = edges.iter().filter(|e| !redundant(e)).copied().collect();
        let reduced_on_build = reduced.len() != edges.len();

        Ok(Poset {
            elements: names,
            index,
            covers: reduced,
            leq,
            reduced_on_build,
        })
    }

    /// Builds directly from a full order relation given as a predicate on
    /// indices of `names`. The relation must already be a partial order.
    pub(crate) fn from_leq(names: Vec<String>, rel: impl Fn(usize, usize) -> bool) -> Poset {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let sorted: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        debug_assert!(sorted.windows(2).all(|w| w[0] != w[1]));
        let n = sorted.len();
        let index: HashMap<String, usize> =
            sorted.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

        let mut leq = BitRel::new(n.max(1));
        let mut geq = BitRel::new(n.max(1));
        for i in 0..n {
            for j in 0..n {
                if rel(order[i], order[j]) {
                    leq.set(i, j);
                    geq.set(j, i);
                }
            }
        }
        debug_assert!((0..n).all(|i| leq.get(i, i)));

        // b covers a exactly when the interval [a, b] is {a, b}
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq.get(a, b) {
                    let between = leq
                        .row(a)
                        .iter()
                        .zip(geq.row(b))
                        .map(|(x, y)| (x & y).count_ones())
                        .sum::<u32>();
                    if between == 2 {
                        covers.push((a, b));
                    }
                }
            }
        }
        covers.sort_unstable();

        Poset {
            elements: sorted,
            index,
            covers,
            leq,
            reduced_on_build: false,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the input cover set contained redundant pairs that were
    /// dropped during construction.
    pub fn was_reduced(&self) -> bool {
        self.reduced_on_build
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_names(&self) -> Vec<(String, String)> {
        self.covers
            .iter()
            .map(|&(a, b)| (self.elements[a].clone(), self.elements[b].clone()))
            .collect()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.get(a, b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq.get(a, b)
    }

    /// Same elements, reversed order.
    pub fn dual(&self) -> Poset {
        let mut leq = BitRel::new(self.len().max(1));
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.leq.get(j, i) {
                    leq.set(i, j);
                }
            }
        }
        let mut covers: Vec<(usize, usize)> = self.covers.iter().map(|&(a, b)| (b, a)).collect();
        covers.sort_unstable();
        Poset {
            elements: self.elements.clone(),
            index: self.index.clone(),
            covers,
            leq,
            reduced_on_build: false,
        }
    }

    /// The upper cone S_{>= s}: the minimal open neighborhood of `s`.
    pub fn up_set(&self, s: usize) -> OpenSet {
        OpenSet {
            members: (0..self.len()).filter(|&t| self.leq(s, t)).collect(),
        }
    }

    /// S_{<= s}, a closed set in the Alexandrov topology.
    pub fn down_set(&self, s: usize) -> BTreeSet<usize> {
        (0..self.len()).filter(|&t| self.leq(t, s)).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&s| !(0..self.len()).any(|t| self.lt(t, s)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&s| !(0..self.len()).any(|t| self.lt(s, t)))
            .collect()
    }

    /// Checks upward closure and wraps the members as an open set.
    pub fn open_set<I: IntoIterator<Item = usize>>(&self, members: I) -> Result<OpenSet> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        for &s in &members {
            for t in 0..self.len() {
                if self.lt(s, t) && !members.contains(&t) {
                    return Err(Error::NotOpen(self.elements[s].clone()));
                }
            }
        }
        Ok(OpenSet { members })
    }

    pub fn open_set_by_names<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<OpenSet> {
        let mut members = BTreeSet::new();
        for n in names {
            members.insert(self.require(n)?);
        }
        self.open_set(members)
    }

    pub fn is_open(&self, set: &OpenSet) -> bool {
        set.members.iter().all(|&s| {
            (0..self.len()).all(|t| !self.lt(s, t) || set.members.contains(&t))
        })
    }

    pub fn full_open(&self) -> OpenSet {
        OpenSet {
            members: (0..self.len()).collect(),
        }
    }

    /// All upper order ideals, including the empty set and the whole poset,
    /// sorted by size and then lexicographically.
    pub fn enumerate_opens(&self, limits: &Limits) -> Result<Vec<OpenSet>> {
        if self.len() > limits.max_open_elements {
            return Err(Error::TooLarge {
                what: "poset for open-set enumeration",
                size: self.len(),
                bound: limits.max_open_elements,
            });
        }
        // Decide membership top-down so each element's successors are fixed
        // before the element itself; an element may join only if all of its
        // upper covers already joined.
        let order = self.topo_order();
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(a, b) in &self.covers {
            succs[a].push(b);
        }
        let mut out = Vec::new();
        let mut current: Vec<bool> = vec![false; self.len()];
        fn rec(
            pos: usize,
            order: &[usize],
            succs: &[Vec<usize>],
            current: &mut Vec<bool>,
            out: &mut Vec<OpenSet>,
        ) {
            if pos == order.len() {
                out.push(OpenSet {
                    members: (0..current.len()).filter(|&i| current[i]).collect(),
                });
                return;
            }
            let v = order[pos];
            rec(pos + 1, order, succs, current, out);
            if succs[v].iter().all(|&t| current[t]) {
                current[v] = true;
                rec(pos + 1, order, succs, current, out);
                current[v] = false;
            }
        }
        let rev: Vec<usize> = order.into_iter().rev().collect();
        rec(0, &rev, &succs, &mut current, &mut out);
        out.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        Ok(out)
    }

    /// A linear extension (minimal elements first).
    pub fn topo_order(&self) -> Vec<usize> {
        toposort(self.len(), &self.covers).expect("stored covers are acyclic")
    }

    /// Induced subposet on an arbitrary subset of elements. The order is
    /// inherited; covers are recomputed.
    pub fn induced(&self, members: &BTreeSet<usize>) -> Poset {
        let names: Vec<String> = members.iter().map(|&i| self.elements[i].clone()).collect();
        let idx: Vec<usize> = members.iter().copied().collect();
        Poset::from_leq(names, |a, b| self.leq(idx[a], idx[b]))
    }

    /// All nonempty chains, as the simplicial complex on the element names.
    pub fn order_complex(&self) -> SimplicialComplex {
        let n = self.len();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn extend(
            p: &Poset,
            last: usize,
            stack: &mut Vec<usize>,
            faces: &mut Vec<Vec<usize>>,
        ) {
            for t in 0..p.len() {
                if p.lt(last, t) {
                    stack.push(t);
                    faces.push(stack.clone());
                    extend(p, t, stack, faces);
                    stack.pop();
                }
            }
        }
        for s in 0..n {
            stack.push(s);
            faces.push(stack.clone());
            extend(self, s, &mut stack, &mut faces);
            stack.pop();
        }
        SimplicialComplex::from_chain_faces(self.elements.clone(), faces)
    }

    /// Connected components of the comparability graph, each as a sorted
    /// index set.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for &(a, b) in &self.covers {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut comps: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().insert(i);
        }
        let mut out: Vec<BTreeSet<usize>> = comps.into_values().collect();
        out.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

fn toposort(n: usize, edges: &[(usize, usize)]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        indeg[b] += 1;
        succs[a].push(b);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    queue.sort_unstable();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        order.push(v);
        for &t in &succs[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Walk successors among the leftover vertices until one repeats.
    let stuck: Vec<usize> = (0..n).filter(|&i| indeg[i] > 0).collect();
    let mut path = vec![stuck[0]];
    let mut seen = HashMap::new();
    seen.insert(stuck[0], 0usize);
    loop {
        let v = *path.last().unwrap();
        let next = succs[v]
            .iter()
            .copied()
            .find(|t| stuck.contains(t))
            .expect("vertex on a cycle has a successor on the cycle");
        if let Some(&at) = seen.get(&next) {
            let mut cycle: Vec<usize> = path[at..].to_vec();
            cycle.push(next);
            return Err(cycle);
        }
        seen.insert(next, path.len());
        path.push(next);
    }
}

/// An upper order ideal of a fixed poset, stored as element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OpenSet {
    members: BTreeSet<usize>,
}

impl OpenSet {
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_set(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self, other: &OpenSet) -> OpenSet {
        OpenSet {
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &OpenSet) -> OpenSet {
        OpenSet {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &OpenSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn names<'a>(&self, p: &'a Poset) -> Vec<&'a str> {
        self.members.iter().map(|&i| p.name(i)).collect()
    }

    /// (size, sorted members): the ordering key used for all canonical
    /// listings of open sets.
    pub fn canonical_key(&self) -> (usize, Vec<usize>) {
        (self.members.len(), self.members.iter().copied().collect())
    }
}

impl FromIterator<usize> for OpenSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        OpenSet {
            members: iter.into_iter().collect(),
        }
    }
}

/// A monotonic map between two posets.
#[derive(Debug, Clone)]
pub struct PosetMap {
    source: Poset,
    target: Poset,
    map: Vec<usize>,
}

impl PosetMap {
    pub fn from_indices(source: Poset, target: Poset, map: Vec<usize>) -> Result<PosetMap> {
        if map.len() != source.len() {
            return Err(Error::Invalid(format!(
                "map covers {} of {} source elements",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= target.len()) {
            return Err(Error::Invalid(format!("map hits index {bad} outside the target")));
        }
        for &(a, b) in source.covers() {
            if !target.leq(map[a], map[b]) {
                return Err(Error::Invalid(format!(
                    "not monotonic: {} < {} but {} !<= {}",
                    source.name(a),
                    source.name(b),
                    target.name(map[a]),
                    target.name(map[b])
                )));
            }
        }
        Ok(PosetMap { source, target, map })
    }

    pub fn from_names(
        source: Poset,
        target: Poset,
        assoc: &HashMap<String, String>,
    ) -> Result<PosetMap> {
        let mut map = Vec::with_capacity(source.len());
        for s in source.elements() {
            let t = assoc
                .get(s)
                .ok_or_else(|| Error::UnknownElement(s.clone()))?;
            map.push(target.require(t)?);
        }
        PosetMap::from_indices(source, target, map)
    }

    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    #[inline]
    pub fn apply(&self, s: usize) -> usize {
        self.map[s]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    /// Preimage of an open set of the target; open because the map is
    /// monotonic.
    pub fn preimage(&self, u: &OpenSet) -> OpenSet {
        OpenSet {
            members: (0..self.source.len())
                .filter(|&s| u.contains(self.map[s]))
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.map.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    /// Injective, and f(s1) <= f(s2) forces s1 <= s2: the image carries the
    /// induced order.
    pub fn is_exact_embedding(&self) -> bool {
        if !self.is_injective() {
            return false;
        }
        let n = self.source.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.target.leq(self.map[a], self.map[b]) || self.source.leq(a, b))
        })
    }

    /// Bijective and order-preserving in both directions.
    pub fn is_isomorphism(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective() && {
            let n = self.source.len();
            (0..n).all(|a| {
                (0..n).all(|b| self.source.leq(a, b) == self.target.leq(self.map[a], self.map[b]))
            })
        }
    }
}
