//! Shared fixtures, randomized generators, and the independent oracles the
//! integration suites check the library against. Everything here goes
//! through the public API only, so the oracles stay decoupled from the
//! implementation paths they vouch for.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use inflate_kit::limits::Limits;
use inflate_kit::poset::{OpenSet, Poset, PosetMap};
use inflate_kit::sheaf::{CoverMapData, Diagram};
use inflate_kit::simplicial::{
    diagram_from_map, product_diagram, SimplicialComplex, SimplicialMap,
};
use inflate_kit::inflation::inflate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rp2() -> SimplicialComplex {
    let text = include_str!("../data/rp2.json");
    serde_json::from_str(text).expect("fixture parses")
}

// ---------------------------------------------------------------- posets --

/// Random poset on up to `max_n` elements: edges are sampled upward in index
/// order, so the result is always acyclic.
pub fn random_poset(rng: &mut ChaCha8Rng, max_n: usize) -> Poset {
    let n = rng.gen_range(1..=max_n);
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut covers = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) {
                covers.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    Poset::new(names, covers).expect("upward edges cannot form a cycle")
}

// -------------------------------------------------------------- diagrams --

/// Random functorial diagram built from partitions of a global set [m] that
/// coarsen upward, plus optional "junk" members that map along a fixed
/// anchor. Blocks make the diagram inhabited; junk members are never hit by
/// a map, so flabbiness genuinely varies.
pub fn random_diagram(rng: &mut ChaCha8Rng, base: &Poset, m: usize, junk: f64) -> Diagram {
    let n = base.len();
    assert!(m >= 1);

    // label[s][x] = block id of x at element s, coarsening upward
    let mut label: Vec<Vec<usize>> = vec![Vec::new(); n];
    let order = base.topo_order();
    for &s in &order {
        let below: Vec<usize> = (0..n).filter(|&t| t != s && base.leq(t, s)).collect();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for &t in &below {
            for x in 0..m {
                for y in x + 1..m {
                    if label[t][x] == label[t][y] {
                        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                        if rx != ry {
                            parent[rx] = ry;
                        }
                    }
                }
            }
        }
        // a few extra random merges
        for _ in 0..rng.gen_range(0..=m) {
            let (x, y) = (rng.gen_range(0..m), rng.gen_range(0..m));
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                parent[rx] = ry;
            }
        }
        label[s] = (0..m).map(|x| find(&mut parent, x)).collect();
    }

    // stalk members: one per block (named by smallest member), plus junk
    let mut stalks: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut junk_anchor: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let blocks: BTreeSet<usize> = label[s].iter().copied().collect();
        let mut members: Vec<String> = blocks.iter().map(|b| format!("b{b}")).collect();
        let mut anchors = Vec::new();
        while rng.gen_bool(junk) && anchors.len() < 2 {
            let a = rng.gen_range(0..m);
            members.push(format!("j{}_{}", anchors.len(), a));
            anchors.push(a);
        }
        junk_anchor[s] = anchors;
        stalks.insert(base.name(s).to_string(), members);
    }

    let block_of = |s: usize, x: usize| format!("b{}", label[s][x]);
    let mut maps = Vec::new();
    for (a, b) in base.cover_names() {
        let (ia, ib) = (base.index_of(&a).unwrap(), base.index_of(&b).unwrap());
        let mut table = BTreeMap::new();
        for member in &stalks[&a] {
            let image = if let Some(block) = member.strip_prefix('b') {
                let rep: usize = block.parse().unwrap();
                block_of(ib, label[ia].iter().position(|&l| l == rep).map_or(rep, |x| x))
            } else {
                let k: usize = member[1..member.find('_').unwrap()].parse().unwrap();
                block_of(ib, junk_anchor[ia][k])
            };
            table.insert(member.clone(), image);
        }
        maps.push(CoverMapData {
            from: a,
            to: b,
            map: table,
        });
    }
    Diagram::new(base.clone(), stalks, maps).expect("coarsening partitions compose")
}

/// Random inhabited flabby diagram over the dual face poset of `k`: a
/// product diagram whose factors are attached to randomly tagged faces.
/// `forbid_below`, when set, keeps every proper subface of that face
/// untagged so the diagram stays splittable there.
pub fn random_product_diagram(
    rng: &mut ChaCha8Rng,
    k: &SimplicialComplex,
    forbid_below: Option<&[usize]>,
) -> Diagram {
    let faces: Vec<Vec<usize>> = k.faces().to_vec();
    let mut sizes: HashMap<Vec<usize>, usize> = HashMap::new();
    for f in &faces {
        if let Some(i0) = forbid_below {
            let proper_subface = f.len() < i0.len() && f.iter().all(|v| i0.contains(v));
            if proper_subface {
                continue;
            }
            if f == i0 {
                sizes.insert(f.clone(), rng.gen_range(2..=4));
                continue;
            }
        }
        if rng.gen_bool(0.35) {
            sizes.insert(f.clone(), rng.gen_range(2..=3));
        }
    }
    let d = product_diagram(k, |face| {
        let mut factors = Vec::new();
        for (tagged, &size) in sizes.iter() {
            if tagged.iter().all(|v| face.contains(v)) {
                let label = format!("f{}", k.face_name(tagged));
                factors.push((
                    label.clone(),
                    (1..=size).map(|j| format!("{label}.{j}")).collect(),
                ));
            }
        }
        factors.sort();
        factors
    })
    .expect("projection diagrams are functorial");
    if inflate_kit::inflation::complexity(&d) > 220 {
        // too fat to run quickly; thin out and retry
        return random_product_diagram(rng, k, forbid_below);
    }
    d
}

/// Random connected simplicial complex with at most `max_faces` faces:
/// a random connected graph on 2..=4 vertices, with triangles filled in when
/// the budget allows.
pub fn random_connected_complex(rng: &mut ChaCha8Rng, max_faces: usize) -> SimplicialComplex {
    loop {
        let n = rng.gen_range(2..=4);
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        // random spanning tree
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.insert((u, v));
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.3) {
                    edges.insert((u, v));
                }
            }
        }
        let mut facets: Vec<Vec<String>> = edges
            .iter()
            .map(|&(u, v)| vec![names[u].clone(), names[v].clone()])
            .collect();
        // maybe fill one triangle
        let triangles: Vec<[usize; 3]> = (0..n)
            .flat_map(|a| {
                let edges = &edges;
                (a + 1..n).flat_map(move |b| {
                    (b + 1..n).filter_map(move |c| {
                        (edges.contains(&(a, b))
                            && edges.contains(&(a, c))
                            && edges.contains(&(b, c)))
                        .then_some([a, b, c])
                    })
                })
            })
            .collect();
        if !triangles.is_empty() && rng.gen_bool(0.5) {
            let t = triangles[rng.gen_range(0..triangles.len())];
            facets.push(t.iter().map(|&v| names[v].clone()).collect());
        }
        let k = SimplicialComplex::from_facets(names, facets).unwrap();
        if k.face_count() <= max_faces {
            return k;
        }
    }
}

// ---------------------------------------------------------------- oracles --

/// Brute-force flabbiness: every section on every nonempty open extends
/// along every nested pair. The library's single-step criterion is checked
/// against this on randomized diagrams.
pub fn flabby_all_pairs(d: &Diagram, limits: &Limits) -> bool {
    let opens = d.base().enumerate_opens(limits).unwrap();
    let nonempty: Vec<&OpenSet> = opens.iter().filter(|o| !o.is_empty()).collect();
    let sections: HashMap<&OpenSet, Vec<_>> = nonempty
        .iter()
        .map(|&o| (o, d.sections(o).unwrap()))
        .collect();
    for &u in &nonempty {
        for &v in &nonempty {
            if !v.is_subset(u) || v == u {
                continue;
            }
            let restricted: HashSet<_> = sections[u]
                .iter()
                .map(|s| d.restrict_section(s, v).unwrap())
                .collect();
            if sections[v].iter().any(|s| !restricted.contains(s)) {
                return false;
            }
        }
    }
    true
}

/// Enumerates both topologies on the completion as explicit families of
/// subsets (bit masks) and compares them: the Alexandrov opens are the upper
/// ideals, and a set is a union of section graphs iff every point lies in a
/// graph inside the set.
pub fn etale_topologies_equal_by_enumeration(
    s: &Poset,
    d: &Diagram,
    limits: &Limits,
) -> bool {
    let comp = inflate_kit::inflation::completion(s, d).unwrap();
    let n = comp.result().len();
    assert!(n <= 20, "mask enumeration oracle needs a small completion");
    let pair_ix: HashMap<(usize, usize), usize> = (0..n)
        .map(|t| (comp.pair(t), t))
        .collect();

    let mut graphs: Vec<u32> = Vec::new();
    for u in s.enumerate_opens(limits).unwrap() {
        if u.is_empty() {
            continue;
        }
        for sec in d.sections(&u).unwrap() {
            let mut mask = 0u32;
            for (e, v) in sec.choices() {
                mask |= 1 << pair_ix[&(e, v)];
            }
            graphs.push(mask);
        }
    }

    let up_masks: Vec<u32> = (0..n)
        .map(|t| {
            comp.result()
                .up_set(t)
                .members()
                .map(|x| 1u32 << x)
                .sum()
        })
        .collect();

    let mut alexandrov: HashSet<u32> = HashSet::new();
    let mut generated: HashSet<u32> = HashSet::new();
    for mask in 0u32..1 << n {
        let upper = (0..n).all(|t| mask >> t & 1 == 0 || up_masks[t] & !mask == 0);
        if upper {
            alexandrov.insert(mask);
        }
        let union_of_graphs = (0..n).all(|t| {
            mask >> t & 1 == 0
                || graphs
                    .iter()
                    .any(|&g| g >> t & 1 == 1 && g & !mask == 0)
        });
        if union_of_graphs {
            generated.insert(mask);
        }
    }
    alexandrov == generated
}

/// The inflation along the preimage diagram of `f`, compared with the face
/// poset of the source through the canonical identification (I, σ) ↦ σ.
pub fn inflation_recovers_source(f: &SimplicialMap) -> bool {
    let d = diagram_from_map(f).unwrap();
    let p = f.target().face_poset().poset().clone();
    let inf = inflate(&p, &d).unwrap();
    let source_fp = f.source().face_poset().poset().clone();
    if inf.result().len() != source_fp.len() {
        return false;
    }
    let mapping: Vec<usize> = (0..inf.result().len())
        .map(|t| {
            let (s, v) = inf.pair(t);
            let name = &d.stalk(s)[v];
            source_fp.require(name).unwrap()
        })
        .collect();
    let candidate = PosetMap::from_indices(inf.result().clone(), source_fp, mapping);
    let Ok(candidate) = candidate else {
        return false;
    };
    if !candidate.is_isomorphism() {
        return false;
    }
    // the projection must agree with f on faces
    (0..inf.result().len()).all(|t| {
        let (s, v) = inf.pair(t);
        let source_face_name = &d.stalk(s)[v];
        let face = f
            .source()
            .faces()
            .iter()
            .find(|face| f.source().face_name(face) == *source_face_name)
            .unwrap();
        let image_name = f.target().face_name(&f.image_of(face));
        inf.projection().target().name(inf.projection().apply(t)) == image_name
    })
}

// --------------------------------------------------- random simplicial maps --

/// Vertex-inflated complex together with the collapse-the-copies map onto
/// `k`; always nondegenerate and surjective on faces.
pub fn vertex_inflation_cover(
    k: &SimplicialComplex,
    counts: &BTreeMap<String, usize>,
) -> SimplicialMap {
    let mut vertices: Vec<String> = Vec::new();
    let mut assoc: BTreeMap<String, String> = BTreeMap::new();
    for v in k.vertices() {
        for j in 1..=counts[v] {
            let copy = format!("{v}#{j}");
            vertices.push(copy.clone());
            assoc.insert(copy, v.clone());
        }
    }
    let mut facets: Vec<Vec<String>> = Vec::new();
    for facet in k.facets() {
        let choices: Vec<Vec<String>> = facet
            .iter()
            .map(|&v| {
                let name = &k.vertices()[v];
                (1..=counts[name]).map(|j| format!("{name}#{j}")).collect()
            })
            .collect();
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for group in &choices {
            let mut next = Vec::new();
            for t in &tuples {
                for c in group {
                    let mut t2 = t.clone();
                    t2.push(c.clone());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        facets.extend(tuples);
    }
    let source = SimplicialComplex::from_facets(vertices, facets).unwrap();
    SimplicialMap::new(source, k.clone(), &assoc).unwrap()
}

/// Fold of two disjoint copies of `k` onto `k`.
pub fn fold_cover(k: &SimplicialComplex) -> SimplicialMap {
    let mut vertices = Vec::new();
    let mut assoc = BTreeMap::new();
    for tag in ["L", "R"] {
        for v in k.vertices() {
            let copy = format!("{v}@{tag}");
            vertices.push(copy.clone());
            assoc.insert(copy, v.clone());
        }
    }
    let mut facets = Vec::new();
    for tag in ["L", "R"] {
        for facet in k.facets() {
            facets.push(
                facet
                    .iter()
                    .map(|&v| format!("{}@{tag}", k.vertices()[v]))
                    .collect(),
            );
        }
    }
    let source = SimplicialComplex::from_facets(vertices, facets).unwrap();
    SimplicialMap::new(source, k.clone(), &assoc).unwrap()
}

/// The cyclic m-fold cover of the 3-cycle.
pub fn cyclic_cover_of_triangle(m: usize) -> SimplicialMap {
    let target = SimplicialComplex::cycle(3);
    let source = SimplicialComplex::cycle(3 * m);
    let assoc: BTreeMap<String, String> = (1..=3 * m)
        .map(|i| (i.to_string(), ((i - 1) % 3 + 1).to_string()))
        .collect();
    SimplicialMap::new(source, target, &assoc).unwrap()
}

pub fn random_cover(rng: &mut ChaCha8Rng) -> SimplicialMap {
    let targets: Vec<SimplicialComplex> = vec![
        SimplicialComplex::full_simplex(1),
        SimplicialComplex::full_simplex(2),
        SimplicialComplex::path(3),
        SimplicialComplex::cycle(3),
    ];
    let k = targets[rng.gen_range(0..targets.len())].clone();
    match rng.gen_range(0..3) {
        0 => {
            let counts: BTreeMap<String, usize> = k
                .vertices()
                .iter()
                .map(|v| (v.clone(), rng.gen_range(1..=3)))
                .collect();
            vertex_inflation_cover(&k, &counts)
        }
        1 => fold_cover(&k),
        _ => {
            if k.dim() == 1 && k.face_count() == 6 {
                cyclic_cover_of_triangle(rng.gen_range(2..=3))
            } else {
                fold_cover(&k)
            }
        }
    }
}
