//! Set-valued diagrams on posets and their sheaf semantics.
//!
//! A diagram assigns a finite stalk to every poset element and a map along
//! every cover, composing consistently along the order. Through the
//! Alexandrov topology this is the same thing as a sheaf of finite sets:
//! sections over an open set are the compatible families of stalk members,
//! and restriction just forgets part of the family.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::poset::{OpenSet, Poset, PosetMap};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DiagramData", into = "DiagramData")]
pub struct Diagram {
    base: Poset,
    stalks: Vec<Vec<String>>,
    stalk_index: Vec<HashMap<String, usize>>,
    cover_maps: BTreeMap<(usize, usize), Vec<usize>>,
    /// Memoized composites D(s <= t) for every comparable pair, identity on
    /// the diagonal. Filled during validation.
    canon: HashMap<(usize, usize), Vec<usize>>,
}

/// Wire form of a diagram. Each `maps` entry covers exactly one cover pair
/// of the base poset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramData {
    pub poset: crate::poset::PosetData,
    pub stalks: BTreeMap<String, Vec<String>>,
    pub maps: Vec<CoverMapData>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverMapData {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
}

impl TryFrom<DiagramData> for Diagram {
    type Error = Error;
    fn try_from(d: DiagramData) -> Result<Self> {
        let base = Poset::try_from(d.poset)?;
        Diagram::new(base, d.stalks, d.maps)
    }
}

impl From<Diagram> for DiagramData {
    fn from(d: Diagram) -> Self {
        let stalks = d
            .base
            .elements()
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), d.stalks[i].clone()))
            .collect();
        let maps = d
            .cover_maps
            .iter()
            .map(|(&(a, b), map)| CoverMapData {
                from: d.base.name(a).to_string(),
                to: d.base.name(b).to_string(),
                map: map
                    .iter()
                    .enumerate()
                    .map(|(v, &w)| (d.stalks[a][v].clone(), d.stalks[b][w].clone()))
                    .collect(),
            })
            .collect();
        DiagramData {
            poset: d.base.into(),
            stalks,
            maps,
        }
    }
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.stalks == other.stalks
            && self.cover_maps == other.cover_maps
    }
}
impl Eq for Diagram {}

impl Diagram {
    /// Validates stalks and cover maps against `base` and checks
    /// functoriality on every pair of cover paths.
    pub fn new(
        base: Poset,
        stalks: BTreeMap<String, Vec<String>>,
        maps: Vec<CoverMapData>,
    ) -> Result<Diagram> {
        let n = base.len();
        let mut stalk_vecs: Vec<Vec<String>> = Vec::with_capacity(n);
        for name in base.elements() {
            let members = stalks
                .get(name)
                .ok_or_else(|| Error::MissingStalk(name.clone()))?;
            stalk_vecs.push(members.clone());
        }
        for extra in stalks.keys() {
            if base.index_of(extra).is_none() {
                return Err(Error::UnknownElement(extra.clone()));
            }
        }

        let stalk_index = index_stalks(&base, &stalk_vecs)?;

        let cover_set: BTreeSet<(usize, usize)> = base.covers().iter().copied().collect();
        let mut cover_maps: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for m in &maps {
            let a = base.require(&m.from)?;
            let b = base.require(&m.to)?;
            if !cover_set.contains(&(a, b)) {
                return Err(Error::UnexpectedMap {
                    from: m.from.clone(),
                    to: m.to.clone(),
                });
            }
            let mut table = Vec::with_capacity(stalk_vecs[a].len());
            for member in &stalk_vecs[a] {
                let image = m.map.get(member).ok_or_else(|| Error::PartialMap {
                    from: m.from.clone(),
                    to: m.to.clone(),
                    detail: format!("no image for `{member}`"),
                })?;
                let w = *stalk_index[b].get(image).ok_or_else(|| Error::PartialMap {
                    from: m.from.clone(),
                    to: m.to.clone(),
                    detail: format!("image `{image}` is not in the stalk of `{}`", m.to),
                })?;
                table.push(w);
            }
            for unknown in m.map.keys() {
                if !stalk_index[a].contains_key(unknown) {
                    return Err(Error::PartialMap {
                        from: m.from.clone(),
                        to: m.to.clone(),
                        detail: format!("`{unknown}` is not in the stalk of `{}`", m.from),
                    });
                }
            }
            if cover_maps.insert((a, b), table).is_some() {
                return Err(Error::PartialMap {
                    from: m.from.clone(),
                    to: m.to.clone(),
                    detail: "cover map given twice".into(),
                });
            }
        }
        for &(a, b) in &cover_set {
            if !cover_maps.contains_key(&(a, b)) {
                return Err(Error::PartialMap {
                    from: base.name(a).to_string(),
                    to: base.name(b).to_string(),
                    detail: "no map given for this cover".into(),
                });
            }
        }

        Diagram::from_parts(base, stalk_vecs, cover_maps)
    }

    /// Internal constructor from already-indexed parts; still validates
    /// functoriality and map totality.
    pub(crate) fn from_parts(
        base: Poset,
        stalks: Vec<Vec<String>>,
        cover_maps: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Diagram> {
        let stalk_index = index_stalks(&base, &stalks)?;
        for (&(a, b), table) in &cover_maps {
            if table.len() != stalks[a].len() || table.iter().any(|&w| w >= stalks[b].len()) {
                return Err(Error::PartialMap {
                    from: base.name(a).to_string(),
                    to: base.name(b).to_string(),
                    detail: "map table does not match the stalks".into(),
                });
            }
        }
        let canon = compose_canonical(&base, &stalks, &cover_maps)?;
        Ok(Diagram {
            base,
            stalks,
            stalk_index,
            cover_maps,
            canon,
        })
    }

    /// The diagram with a singleton stalk everywhere.
    pub fn trivial(base: &Poset) -> Diagram {
        let stalks = vec![vec!["*".to_string()]; base.len()];
        let cover_maps = base.covers().iter().map(|&c| (c, vec![0])).collect();
        Diagram::from_parts(base.clone(), stalks, cover_maps)
            .expect("singleton stalks are always functorial")
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn stalk(&self, s: usize) -> &[String] {
        &self.stalks[s]
    }

    pub fn stalk_sizes(&self) -> Vec<usize> {
        self.stalks.iter().map(Vec::len).collect()
    }

    pub fn stalk_member(&self, s: usize, name: &str) -> Option<usize> {
        self.stalk_index[s].get(name).copied()
    }

    /// The composite map D(s <= t), identity when s = t.
    pub fn canonical_map(&self, s: usize, t: usize) -> Option<&[usize]> {
        self.canon.get(&(s, t)).map(Vec::as_slice)
    }

    pub fn cover_map(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.cover_maps.get(&(a, b)).map(Vec::as_slice)
    }

    /// True iff every stalk is a singleton. By the inverse-limit description
    /// this forces every section set to be a singleton too; that equivalence
    /// is asserted in tests rather than recomputed here.
    pub fn is_trivial(&self) -> bool {
        self.stalks.iter().all(|s| s.len() == 1)
    }

    /// All compatible families over the nonempty open `u`, in a fixed
    /// enumeration order: minimal elements of `u` ascending, stalk members
    /// ascending.
    pub fn sections(&self, u: &OpenSet) -> Result<Vec<Section>> {
        self.sections_capped(u, usize::MAX)
    }

    /// Whether at least one section exists over `u`, without enumerating
    /// them all.
    pub fn has_section(&self, u: &OpenSet) -> Result<bool> {
        Ok(!self.sections_capped(u, 1)?.is_empty())
    }

    fn sections_capped(&self, u: &OpenSet, cap: usize) -> Result<Vec<Section>> {
        if u.is_empty() {
            return Err(Error::EmptyOpenSet);
        }
        debug_assert!(self.base.is_open(u));
        let members: Vec<usize> = u.members().collect();
        let mins: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&s| !members.iter().any(|&t| self.base.lt(t, s)))
            .collect();
        // per minimal element, the members it forces and the forcing tables
        let reach: Vec<Vec<(usize, &[usize])>> = mins
            .iter()
            .map(|&m| {
                members
                    .iter()
                    .copied()
                    .filter(|&t| self.base.leq(m, t))
                    .map(|t| (t, self.canon[&(m, t)].as_slice()))
                    .collect()
            })
            .collect();

        fn search(
            k: usize,
            mins: &[usize],
            stalks: &[Vec<String>],
            reach: &[Vec<(usize, &[usize])>],
            members: &[usize],
            u: &OpenSet,
            assignment: &mut [Option<usize>],
            out: &mut Vec<Section>,
            cap: usize,
        ) -> bool {
            if k == mins.len() {
                out.push(Section {
                    domain: u.clone(),
                    choice: members
                        .iter()
                        .map(|&t| (t, assignment[t].expect("forced by a minimal element")))
                        .collect(),
                });
                return out.len() >= cap;
            }
            for v in 0..stalks[mins[k]].len() {
                let mut touched = Vec::new();
                let mut ok = true;
                for &(t, table) in &reach[k] {
                    let forced = table[v];
                    match assignment[t] {
                        Some(prev) if prev != forced => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            assignment[t] = Some(forced);
                            touched.push(t);
                        }
                    }
                }
                let full = ok
                    && search(k + 1, mins, stalks, reach, members, u, assignment, out, cap);
                for &t in &touched {
                    assignment[t] = None;
                }
                if full {
                    return true;
                }
            }
            false
        }

        let mut out = Vec::new();
        let mut assignment: Vec<Option<usize>> = vec![None; self.base.len()];
        search(
            0,
            &mins,
            &self.stalks,
            &reach,
            &members,
            u,
            &mut assignment,
            &mut out,
            cap,
        );
        Ok(out)
    }

    /// Forgets the part of `s` outside `v`.
    pub fn restrict_section(&self, s: &Section, v: &OpenSet) -> Result<Section> {
        if v.is_empty() {
            return Err(Error::EmptyOpenSet);
        }
        if !v.is_subset(&s.domain) {
            return Err(Error::NotSubset);
        }
        Ok(Section {
            domain: v.clone(),
            choice: s
                .choice
                .iter()
                .filter(|(e, _)| v.contains(**e))
                .map(|(&e, &val)| (e, val))
                .collect(),
        })
    }

    /// Every nonempty open set carries at least one section.
    pub fn is_inhabited(&self, limits: &Limits) -> Result<bool> {
        Ok(self.uninhabited_witness(limits)?.is_none())
    }

    /// The first nonempty open set with no section, in canonical order.
    pub fn uninhabited_witness(&self, limits: &Limits) -> Result<Option<OpenSet>> {
        let opens = self.base.enumerate_opens(limits)?;
        for u in opens.iter().filter(|u| !u.is_empty()) {
            if !self.has_section(u)? {
                return Ok(Some(u.clone()));
            }
        }
        Ok(None)
    }

    /// Flabbiness via the single-step criterion: for every nonempty open V
    /// and every element s outside it, restriction from V ∪ U_s onto V must
    /// be surjective. Walking a saturated chain of opens between any nested
    /// pair composes these steps, so this agrees with the all-pairs
    /// definition; the brute-force all-pairs checker lives in the test suite
    /// as the oracle for that equivalence.
    ///
    /// A section extends over V ∪ U_s exactly when some stalk member at s
    /// pushes forward consistently with it, so each step is decided
    /// pointwise instead of enumerating sections of the union.
    pub fn is_flabby(&self, limits: &Limits) -> Result<FlabbinessVerdict> {
        let n = self.base.len();
        let opens = self.base.enumerate_opens(limits)?;
        // up[s] = elements of U_s; below[t] = elements strictly under t
        let up: Vec<Vec<usize>> = (0..n)
            .map(|s| (0..n).filter(|&t| self.base.leq(s, t)).collect())
            .collect();
        let below: Vec<Vec<usize>> = (0..n)
            .map(|t| (0..n).filter(|&x| self.base.lt(x, t)).collect())
            .collect();

        for v in opens.iter().filter(|v| !v.is_empty()) {
            let sections_v = self.sections(v)?;
            for s in 0..n {
                if v.contains(s) {
                    continue;
                }
                let inside: Vec<usize> =
                    up[s].iter().copied().filter(|&t| v.contains(t)).collect();
                let fresh: Vec<(usize, Vec<usize>)> = up[s]
                    .iter()
                    .copied()
                    .filter(|&t| !v.contains(t))
                    .map(|t| {
                        let lower: Vec<usize> = below[t]
                            .iter()
                            .copied()
                            .filter(|&x| v.contains(x))
                            .collect();
                        (t, lower)
                    })
                    .collect();
                for sec in &sections_v {
                    let extends = (0..self.stalks[s].len()).any(|w| {
                        inside
                            .iter()
                            .all(|&t| self.canon[&(s, t)][w] == sec.value(t).unwrap())
                            && fresh.iter().all(|&(t, ref lower)| {
                                let forced = self.canon[&(s, t)][w];
                                lower.iter().all(|&x| {
                                    self.canon[&(x, t)][sec.value(x).unwrap()] == forced
                                })
                            })
                    });
                    if !extends {
                        return Ok(FlabbinessVerdict {
                            flabby: false,
                            witness: Some(FlabbyWitness {
                                larger: v.union(&self.base.up_set(s)),
                                smaller: v.clone(),
                                section: sec.clone(),
                            }),
                        });
                    }
                }
            }
        }
        Ok(FlabbinessVerdict {
            flabby: true,
            witness: None,
        })
    }

    /// Direct image along a monotonic map: the value over a target open U is
    /// the section set over f⁻¹(U). When the preimage is empty the value is
    /// the one-point limit, recorded as a single empty section.
    pub fn direct_image(&self, f: &PosetMap, limits: &Limits) -> Result<DirectImage> {
        if f.source() != &self.base {
            return Err(Error::BaseMismatch(
                "direct image requires a map out of the diagram's base".into(),
            ));
        }
        let opens = f.target().enumerate_opens(limits)?;
        let mut table = Vec::new();
        for u in opens.iter().filter(|u| !u.is_empty()) {
            let pre = f.preimage(u);
            let secs = if pre.is_empty() {
                vec![Section::empty()]
            } else {
                self.sections(&pre)?
            };
            table.push((u.clone(), secs));
        }

        // Collapse to a diagram on the target: stalks over minimal
        // neighborhoods, maps by restriction of sections.
        let target = f.target().clone();
        let mut stalks: Vec<Vec<String>> = Vec::with_capacity(target.len());
        let mut stalk_secs: Vec<Vec<Section>> = Vec::with_capacity(target.len());
        for t in 0..target.len() {
            let pre = f.preimage(&target.up_set(t));
            let secs = if pre.is_empty() {
                vec![Section::empty()]
            } else {
                self.sections(&pre)?
            };
            stalks.push(secs.iter().map(|s| s.render_names(self)).collect());
            stalk_secs.push(secs);
        }
        let mut cover_maps = BTreeMap::new();
        for &(a, b) in target.covers() {
            let pre_b = f.preimage(&target.up_set(b));
            let mut tab = Vec::with_capacity(stalk_secs[a].len());
            for sec in &stalk_secs[a] {
                let restricted = if pre_b.is_empty() {
                    Section::empty()
                } else {
                    self.restrict_section(sec, &pre_b)?
                };
                let pos = stalk_secs[b]
                    .iter()
                    .position(|c| c == &restricted)
                    .expect("restriction of a section is a section");
                tab.push(pos);
            }
            cover_maps.insert((a, b), tab);
        }
        let collapsed = Diagram::from_parts(target, stalks, cover_maps)?;
        Ok(DirectImage { table, collapsed })
    }

    /// Inverse image along `f`: stalks and maps are pulled back pointwise.
    pub fn inverse_image(f: &PosetMap, g: &Diagram) -> Result<Diagram> {
        if f.target() != g.base() {
            return Err(Error::BaseMismatch(
                "inverse image requires a map into the diagram's base".into(),
            ));
        }
        let source = f.source().clone();
        let stalks: Vec<Vec<String>> = (0..source.len())
            .map(|s| g.stalks[f.apply(s)].clone())
            .collect();
        let mut cover_maps = BTreeMap::new();
        for &(a, b) in source.covers() {
            let table = g.canon[&(f.apply(a), f.apply(b))].clone();
            cover_maps.insert((a, b), table);
        }
        Diagram::from_parts(source, stalks, cover_maps)
    }

    /// Restriction of the diagram to an open subset of its base, i.e. the
    /// inverse image along the exact embedding of that subset.
    pub fn restrict_to_open(&self, a: &OpenSet) -> Result<Diagram> {
        if a.is_empty() {
            return Err(Error::EmptyOpenSet);
        }
        if !self.base.is_open(a) {
            let bad = a
                .members()
                .find(|&s| {
                    (0..self.base.len()).any(|t| self.base.lt(s, t) && !a.contains(t))
                })
                .unwrap();
            return Err(Error::NotOpen(self.base.name(bad).to_string()));
        }
        let sub = self.base.induced(a.as_set());
        let back: Vec<usize> = sub
            .elements()
            .iter()
            .map(|name| self.base.index_of(name).unwrap())
            .collect();
        let stalks: Vec<Vec<String>> = back.iter().map(|&i| self.stalks[i].clone()).collect();
        let mut cover_maps = BTreeMap::new();
        for &(a2, b2) in sub.covers() {
            let table = self.canon[&(back[a2], back[b2])].clone();
            cover_maps.insert((a2, b2), table);
        }
        Diagram::from_parts(sub, stalks, cover_maps)
    }

    /// Splits the diagram at `i0` along a partition of its stalk. Requires
    /// every element strictly above `i0` in the base (a proper face, once the
    /// base is read as a dual face poset) to carry a singleton stalk. Returns
    /// the two sub-diagrams on the full base and the common restriction to
    /// the open complement of the cone below `i0`.
    pub fn split(
        &self,
        i0: &str,
        part1: &BTreeSet<String>,
        part2: &BTreeSet<String>,
    ) -> Result<(Diagram, Diagram, Diagram)> {
        let i0 = self.base.require(i0)?;
        let stalk: BTreeSet<String> = self.stalks[i0].iter().cloned().collect();
        if part1.is_empty() || part2.is_empty() {
            return Err(Error::BadPartition("both parts must be nonempty".into()));
        }
        if !part1.is_disjoint(part2) {
            return Err(Error::BadPartition("parts overlap".into()));
        }
        let union: BTreeSet<String> = part1.union(part2).cloned().collect();
        if union != stalk {
            return Err(Error::BadPartition(format!(
                "parts do not exhaust the stalk of `{}`",
                self.base.name(i0)
            )));
        }
        for j in 0..self.base.len() {
            if self.base.lt(i0, j) && self.stalks[j].len() != 1 {
                return Err(Error::MinimalityViolated {
                    element: self.base.name(i0).to_string(),
                    witness: self.base.name(j).to_string(),
                });
            }
        }

        let keep = |part: &BTreeSet<String>| -> Result<Diagram> {
            // Keep, below i0, only the stalk members whose image at i0 lies
            // in the chosen part; elsewhere keep everything.
            let mut kept: Vec<Vec<usize>> = Vec::with_capacity(self.base.len());
            for j in 0..self.base.len() {
                if self.base.leq(j, i0) {
                    let to_i0 = &self.canon[&(j, i0)];
                    kept.push(
                        (0..self.stalks[j].len())
                            .filter(|&v| part.contains(&self.stalks[i0][to_i0[v]]))
                            .collect(),
                    );
                } else {
                    kept.push((0..self.stalks[j].len()).collect());
                }
            }
            let stalks: Vec<Vec<String>> = kept
                .iter()
                .enumerate()
                .map(|(j, vs)| vs.iter().map(|&v| self.stalks[j][v].clone()).collect())
                .collect();
            let pos: Vec<HashMap<usize, usize>> = kept
                .iter()
                .map(|vs| vs.iter().enumerate().map(|(new, &old)| (old, new)).collect())
                .collect();
            let mut cover_maps = BTreeMap::new();
            for (&(a, b), table) in &self.cover_maps {
                let tab: Vec<usize> = kept[a]
                    .iter()
                    .map(|&v| pos[b][&table[v]])
                    .collect();
                cover_maps.insert((a, b), tab);
            }
            Diagram::from_parts(self.base.clone(), stalks, cover_maps)
        };

        let d1 = keep(part1)?;
        let d2 = keep(part2)?;
        let outside: OpenSet = (0..self.base.len())
            .filter(|&j| !self.base.leq(j, i0))
            .collect();
        let d12 = self.restrict_to_open(&outside)?;
        Ok((d1, d2, d12))
    }
}

fn index_stalks(base: &Poset, stalks: &[Vec<String>]) -> Result<Vec<HashMap<String, usize>>> {
    let mut out = Vec::with_capacity(stalks.len());
    for (i, members) in stalks.iter().enumerate() {
        let mut index = HashMap::with_capacity(members.len());
        for (v, m) in members.iter().enumerate() {
            if index.insert(m.clone(), v).is_some() {
                return Err(Error::DuplicateStalkMember {
                    element: base.name(i).to_string(),
                    member: m.clone(),
                });
            }
        }
        out.push(index);
    }
    Ok(out)
}

/// Composes cover maps into canonical maps for every comparable pair,
/// rejecting any pair of cover paths whose composites disagree.
fn compose_canonical(
    base: &Poset,
    stalks: &[Vec<String>],
    cover_maps: &BTreeMap<(usize, usize), Vec<usize>>,
) -> Result<HashMap<(usize, usize), Vec<usize>>> {
    let n = base.len();
    let mut canon: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for s in 0..n {
        canon.insert((s, s), (0..stalks[s].len()).collect());
    }
    let mut covers_into: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in cover_maps.keys() {
        covers_into[b].push(a);
    }
    for &t in &base.topo_order() {
        for &m in &covers_into[t] {
            let step = &cover_maps[&(m, t)];
            for s in 0..n {
                if !base.leq(s, m) {
                    continue;
                }
                let composite: Vec<usize> =
                    canon[&(s, m)].iter().map(|&v| step[v]).collect();
                match canon.get(&(s, t)) {
                    None => {
                        canon.insert((s, t), composite);
                    }
                    Some(existing) if *existing != composite => {
                        let at = (0..stalks[s].len())
                            .find(|&v| existing[v] != composite[v])
                            .unwrap();
                        return Err(Error::NotFunctorial {
                            low: base.name(s).to_string(),
                            high: base.name(t).to_string(),
                            left: render_map(&stalks[s], &stalks[t], existing),
                            right: render_map(&stalks[s], &stalks[t], &composite),
                            at: stalks[s][at].clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(canon)
}

fn render_map(from: &[String], to: &[String], table: &[usize]) -> String {
    let body: Vec<String> = from
        .iter()
        .zip(table)
        .map(|(v, &w)| format!("{v}→{}", to[w]))
        .collect();
    format!("[{}]", body.join(", "))
}

/// A compatible family of stalk members over an open set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    domain: OpenSet,
    choice: BTreeMap<usize, usize>,
}

impl Section {
    /// The unique section over the empty set, used only as the terminal
    /// value of a direct image.
    pub fn empty() -> Section {
        Section {
            domain: OpenSet::default(),
            choice: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> &OpenSet {
        &self.domain
    }

    pub fn value(&self, s: usize) -> Option<usize> {
        self.choice.get(&s).copied()
    }

    pub fn choices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice.iter().map(|(&s, &v)| (s, v))
    }

    /// Element name → stalk member name, for reports.
    pub fn render_names(&self, d: &Diagram) -> String {
        let body: Vec<String> = self
            .choice
            .iter()
            .map(|(&s, &v)| format!("{}={}", d.base().name(s), d.stalk(s)[v]))
            .collect();
        format!("{{{}}}", body.join(","))
    }

    pub fn to_named_map(&self, d: &Diagram) -> BTreeMap<String, String> {
        self.choice
            .iter()
            .map(|(&s, &v)| (d.base().name(s).to_string(), d.stalk(s)[v].clone()))
            .collect()
    }
}

/// Outcome of a flabbiness check; `witness` explains a `false`.
#[derive(Debug, Clone)]
pub struct FlabbinessVerdict {
    pub flabby: bool,
    pub witness: Option<FlabbyWitness>,
}

/// A section on `smaller` with no extension to `larger`.
#[derive(Debug, Clone)]
pub struct FlabbyWitness {
    pub larger: OpenSet,
    pub smaller: OpenSet,
    pub section: Section,
}

/// Direct image: the full value table over target opens plus the collapsed
/// diagram of minimal-neighborhood values.
#[derive(Debug, Clone)]
pub struct DirectImage {
    pub table: Vec<(OpenSet, Vec<Section>)>,
    pub collapsed: Diagram,
}

impl DirectImage {
    pub fn value(&self, u: &OpenSet) -> Option<&[Section]> {
        self.table
            .iter()
            .find(|(o, _)| o == u)
            .map(|(_, s)| s.as_slice())
    }
}
