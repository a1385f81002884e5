//! Reduced integer simplicial homology via Smith normal form, with the Euler
//! characteristic as a face-count oracle, wedge-of-spheres certification, and
//! the homological Cohen–Macaulay check.
//!
//! Boundary matrices are eliminated sparsely with smallest-magnitude pivots.
//! Entries run in i128 with a headroom cap and the whole computation falls
//! back to arbitrary precision if the cap is ever hit, so torsion is always
//! exact.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::limits::Limits;
use crate::simplicial::{SimplicialComplex, SimplicialPoset};

/// Simplicial chain complex with the augmentation row in degree 0, so the
/// homology it computes is reduced.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    faces_by_dim: Vec<Vec<Vec<usize>>>,
    /// boundaries[k]: C_k -> C_{k-1}; index 0 is the augmentation.
    boundaries: Vec<SparseMat>,
}

#[derive(Debug, Clone)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl ChainComplex {
    pub fn dim(&self) -> i64 {
        self.faces_by_dim.len() as i64 - 1
    }

    pub fn face_count(&self) -> usize {
        self.faces_by_dim.iter().map(Vec::len).sum()
    }

    pub fn faces_of_dim(&self, k: usize) -> &[Vec<usize>] {
        &self.faces_by_dim[k]
    }

    pub fn boundary(&self, k: usize) -> &SparseMat {
        &self.boundaries[k]
    }
}

/// Builds the chain complex of `k` with boundary signs from the canonical
/// vertex order of each face.
pub fn chain_complex(k: &SimplicialComplex) -> ChainComplex {
    let top = (k.dim() + 1).max(0) as usize;
    let mut faces_by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top];
    for face in k.faces() {
        faces_by_dim[face.len() - 1].push(face.clone());
    }
    let mut boundaries = Vec::with_capacity(top.max(1));
    let f0 = faces_by_dim.first().map_or(0, Vec::len);
    boundaries.push(SparseMat {
        rows: 1,
        cols: f0,
        entries: (0..f0).map(|j| (0, j, 1)).collect(),
    });
    for deg in 1..top {
        let index: HashMap<&[usize], usize> = faces_by_dim[deg - 1]
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_slice(), i))
            .collect();
        let mut entries = Vec::new();
        for (j, face) in faces_by_dim[deg].iter().enumerate() {
            for drop in 0..face.len() {
                let sub: Vec<usize> = face
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                entries.push((index[sub.as_slice()], j, sign));
            }
        }
        boundaries.push(SparseMat {
            rows: faces_by_dim[deg - 1].len(),
            cols: faces_by_dim[deg].len(),
            entries,
        });
    }
    let c = ChainComplex {
        faces_by_dim,
        boundaries,
    };
    debug_assert!(boundary_squares_to_zero(&c));
    c
}

fn boundary_squares_to_zero(c: &ChainComplex) -> bool {
    for k in 1..c.boundaries.len() {
        let lower = &c.boundaries[k - 1];
        let upper = &c.boundaries[k];
        let mut lower_rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); lower.cols];
        for &(r, cc, v) in &lower.entries {
            lower_rows[cc].push((r, v));
        }
        let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
        for &(mid, col, v) in &upper.entries {
            for &(r, w) in &lower_rows[mid] {
                *acc.entry((r, col)).or_insert(0) += v * w;
            }
        }
        if acc.values().any(|&v| v != 0) {
            return false;
        }
    }
    true
}

/// Reduced Betti numbers (degree -1 included) and torsion invariant factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub betti: BTreeMap<i64, u64>,
    pub torsion: BTreeMap<i64, Vec<u64>>,
}

impl HomologyReport {
    pub fn betti(&self, k: i64) -> u64 {
        self.betti.get(&k).copied().unwrap_or(0)
    }

    pub fn torsion_free(&self) -> bool {
        self.torsion.values().all(Vec::is_empty)
    }

    /// Alternating sum over all degrees including -1; for nonempty complexes
    /// this is the usual reduced Euler characteristic.
    pub fn euler(&self) -> i64 {
        self.betti
            .iter()
            .map(|(&k, &b)| if (k.rem_euclid(2)) == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn nonzero_degrees(&self) -> Vec<i64> {
        self.betti
            .iter()
            .filter(|(_, &b)| b > 0)
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Homology of a chain complex through one Smith normal form per boundary.
pub fn homology(c: &ChainComplex, limits: &Limits) -> Result<HomologyReport> {
    if c.face_count() > limits.max_faces {
        return Err(Error::TooLarge {
            what: "chain complex",
            size: c.face_count(),
            bound: limits.max_faces,
        });
    }
    let snfs: Vec<Result<SnfDiag>> =
        exec::map_indexed(c.boundaries.len(), |k| smith_diagonal(&c.boundaries[k]));
    let mut ranks = Vec::with_capacity(snfs.len() + 1);
    let mut factors = Vec::with_capacity(snfs.len());
    for s in snfs {
        let s = s?;
        ranks.push(s.rank);
        factors.push(s.factors);
    }
    ranks.push(0);

    let mut betti = BTreeMap::new();
    let mut torsion = BTreeMap::new();
    betti.insert(-1, 1 - ranks[0] as u64);
    let dims = c.faces_by_dim.len();
    for k in 0..dims {
        let f_k = c.faces_by_dim[k].len() as i64;
        let b = f_k - ranks[k] as i64 - ranks[k + 1] as i64;
        debug_assert!(b >= 0);
        betti.insert(k as i64, b as u64);
        if k + 1 < factors.len() {
            let t: Vec<u64> = factors[k + 1].iter().copied().filter(|&d| d > 1).collect();
            if !t.is_empty() {
                torsion.insert(k as i64, t);
            }
        }
    }
    Ok(HomologyReport { betti, torsion })
}

pub fn homology_of_complex(k: &SimplicialComplex, limits: &Limits) -> Result<HomologyReport> {
    homology(&chain_complex(k), limits)
}

/// Homology of a poset is the homology of its order complex.
pub fn homology_of_poset(p: &crate::poset::Poset, limits: &Limits) -> Result<HomologyReport> {
    homology_of_complex(&p.order_complex(), limits)
}

/// Reduced Euler characteristic by face counting; -1 for the empty complex.
/// This never touches the Smith normal form path, so it can vouch for it.
pub fn euler_characteristic(k: &SimplicialComplex) -> i64 {
    let signed: i64 = k
        .faces()
        .iter()
        .map(|f| if f.len() % 2 == 1 { 1 } else { -1 })
        .sum();
    signed - 1
}

/// Homological witness that a space is a wedge of `dimension`-spheres:
/// torsion-free homology concentrated in one degree. The count is the Betti
/// number there; contractible input passes with count 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeCertificate {
    pub dimension: i64,
    pub count: u64,
    pub passed: bool,
    pub failure_reason: Option<String>,
}

pub fn wedge_certificate(r: &HomologyReport, d: i64) -> WedgeCertificate {
    let mut reason = None;
    for (&k, t) in &r.torsion {
        if !t.is_empty() {
            reason = Some(format!("torsion {t:?} in degree {k}"));
            break;
        }
    }
    if reason.is_none() {
        for (&k, &b) in &r.betti {
            if k != d && b != 0 {
                reason = Some(format!("betti {b} in degree {k}, expected degree {d}"));
                break;
            }
        }
    }
    WedgeCertificate {
        dimension: d,
        count: r.betti(d),
        passed: reason.is_none(),
        failure_reason: reason,
    }
}

/// One link record inside a Cohen–Macaulay check.
#[derive(Debug, Clone, Serialize)]
pub struct LinkCheck {
    pub element: String,
    pub dim: i64,
    pub expected_degree: i64,
    pub certificate: WedgeCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct CmReport {
    pub cm: bool,
    pub dimension: i64,
    pub pure: bool,
    pub global: WedgeCertificate,
    pub links: Vec<LinkCheck>,
    pub first_failure: Option<String>,
}

/// Homological Cohen–Macaulay check: purity, a wedge certificate for the
/// whole realization in top degree, and one for every link in complementary
/// degree. Links are processed in parallel.
pub fn cm_check(p: &SimplicialPoset, limits: &Limits) -> Result<CmReport> {
    let dimension = p.dim();
    let pure = p.is_pure();
    let global = wedge_certificate(&homology_of_poset(p.poset(), limits)?, dimension);

    let names: Vec<String> = p.poset().elements().to_vec();
    let checks: Vec<Result<LinkCheck>> = exec::map_indexed(names.len(), |i| {
        let link = p.link(&names[i])?;
        let expected = dimension - 1 - p.dim_of(i);
        let report = homology_of_poset(link.poset(), limits)?;
        Ok(LinkCheck {
            element: names[i].clone(),
            dim: p.dim_of(i),
            expected_degree: expected,
            certificate: wedge_certificate(&report, expected),
        })
    });
    let mut links = Vec::with_capacity(checks.len());
    for c in checks {
        links.push(c?);
    }

    let mut first_failure = None;
    if !pure {
        first_failure = Some("not pure".to_string());
    } else if !global.passed {
        first_failure = Some(format!(
            "realization: {}",
            global.failure_reason.clone().unwrap_or_default()
        ));
    } else if let Some(bad) = links.iter().find(|l| !l.certificate.passed) {
        first_failure = Some(format!(
            "link of `{}`: {}",
            bad.element,
            bad.certificate.failure_reason.clone().unwrap_or_default()
        ));
    }
    Ok(CmReport {
        cm: first_failure.is_none(),
        dimension,
        pure,
        global,
        links,
        first_failure,
    })
}

#[derive(Debug, Clone)]
pub struct SnfDiag {
    pub rank: usize,
    /// Invariant factors, each dividing the next.
    pub factors: Vec<u64>,
}

/// Diagonal of the Smith normal form. Entries are eliminated with
/// smallest-magnitude pivots; i128 arithmetic with a headroom cap, retried in
/// BigInt on overflow.
pub fn smith_diagonal(m: &SparseMat) -> Result<SnfDiag> {
    match eliminate::<i128>(m) {
        Some(diag) => finish::<i128>(diag),
        None => finish::<BigInt>(eliminate::<BigInt>(m).expect("BigInt never overflows")),
    }
}

fn finish<T: PivotEntry>(diag: Vec<T>) -> Result<SnfDiag> {
    let mut ds = diag;
    // normalize to a divisibility chain: gcd/lcm sweeps preserve the
    // cokernel, and the invariant factors are exactly the stable result
    loop {
        let mut changed = false;
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                if !ds[j].rem_trunc(&ds[i]).is_zero() {
                    let g = ds[i].gcd_with(&ds[j]);
                    let l = ds[i]
                        .div_trunc(&g)
                        .checked_mul(&ds[j])
                        .ok_or(Error::TorsionOverflow)?;
                    ds[i] = g;
                    ds[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    ds.sort();
    let rank = ds.len();
    let factors = ds
        .into_iter()
        .map(|d| d.to_u64().ok_or(Error::TorsionOverflow))
        .collect::<Result<Vec<u64>>>()?;
    Ok(SnfDiag { rank, factors })
}

trait PivotEntry: Clone + Ord + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_abs_one(&self) -> bool;
    fn abs(&self) -> Self;
    fn checked_mul(&self, o: &Self) -> Option<Self>;
    fn checked_sub(&self, o: &Self) -> Option<Self>;
    fn div_trunc(&self, o: &Self) -> Self;
    fn rem_trunc(&self, o: &Self) -> Self;
    fn gcd_with(&self, o: &Self) -> Self;
    fn to_u64(&self) -> Option<u64>;
}

/// Keep well inside i128 so q*v and the following subtraction cannot wrap.
const I128_CAP: i128 = 1 << 62;

impl PivotEntry for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_abs_one(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs(&self) -> Self {
        i128::abs(*self)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        i128::checked_mul(*self, *o).filter(|v| i128::abs(*v) <= I128_CAP)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        i128::checked_sub(*self, *o).filter(|v| i128::abs(*v) <= I128_CAP)
    }
    fn div_trunc(&self, o: &Self) -> Self {
        self / o
    }
    fn rem_trunc(&self, o: &Self) -> Self {
        self % o
    }
    fn gcd_with(&self, o: &Self) -> Self {
        self.gcd(o)
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(*self).ok()
    }
}

impl PivotEntry for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_abs_one(&self) -> bool {
        Signed::abs(self).is_one()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn div_trunc(&self, o: &Self) -> Self {
        self / o
    }
    fn rem_trunc(&self, o: &Self) -> Self {
        self % o
    }
    fn gcd_with(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self).ok()
    }
}

struct Elim<T> {
    rows: Vec<HashMap<usize, T>>,
    col_rows: Vec<HashSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    unit_queue: VecDeque<(usize, usize)>,
}

/// Returns the diagonal (absolute values, unordered) or None on overflow.
fn eliminate<T: PivotEntry>(m: &SparseMat) -> Option<Vec<T>> {
    let mut e = Elim::<T> {
        rows: vec![HashMap::new(); m.rows],
        col_rows: vec![HashSet::new(); m.cols],
        row_alive: vec![true; m.rows],
        col_alive: vec![true; m.cols],
        unit_queue: VecDeque::new(),
    };
    for &(r, c, v) in &m.entries {
        if v != 0 {
            e.rows[r].insert(c, T::from_i64(v));
            e.col_rows[c].insert(r);
            if v == 1 || v == -1 {
                e.unit_queue.push_back((r, c));
            }
        }
    }
    let mut diag = Vec::new();
    while let Some((r, c)) = e.pick_pivot() {
        let (p, r, c) = e.clear_pivot(r, c)?;
        diag.push(p.abs());
        e.retire(r, c);
    }
    Some(diag)
}

impl<T: PivotEntry> Elim<T> {
    fn entry(&self, r: usize, c: usize) -> Option<&T> {
        self.rows[r].get(&c)
    }

    fn pick_pivot(&mut self) -> Option<(usize, usize)> {
        while let Some((r, c)) = self.unit_queue.pop_front() {
            if self.row_alive[r] && self.col_alive[c] {
                if let Some(v) = self.entry(r, c) {
                    if v.is_abs_one() {
                        return Some((r, c));
                    }
                }
            }
        }
        let mut best: Option<(T, usize, usize)> = None;
        for r in 0..self.rows.len() {
            if !self.row_alive[r] {
                continue;
            }
            for (&c, v) in &self.rows[r] {
                if !self.col_alive[c] {
                    continue;
                }
                let a = v.abs();
                if best.as_ref().is_none_or(|(b, _, _)| a < *b) {
                    best = Some((a, r, c));
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn set_entry(&mut self, r: usize, c: usize, v: T) {
        if v.is_zero() {
            self.rows[r].remove(&c);
            self.col_rows[c].remove(&r);
        } else {
            if v.is_abs_one() {
                self.unit_queue.push_back((r, c));
            }
            self.rows[r].insert(c, v);
            self.col_rows[c].insert(r);
        }
    }

    /// row r2 -= q * row r
    fn row_sub_mul(&mut self, r2: usize, r: usize, q: &T) -> Option<()> {
        let src: Vec<(usize, T)> = self.rows[r]
            .iter()
            .filter(|(c, _)| self.col_alive[**c])
            .map(|(&c, v)| (c, v.clone()))
            .collect();
        for (c, v) in src {
            let delta = q.checked_mul(&v)?;
            let old = self.entry(r2, c).cloned().unwrap_or_else(|| T::from_i64(0));
            let new = old.checked_sub(&delta)?;
            self.set_entry(r2, c, new);
        }
        Some(())
    }

    /// Reduce until the pivot's row and column are clear apart from the
    /// pivot itself, re-seating it whenever a smaller remainder shows up.
    /// Returns the pivot value and its final position.
    fn clear_pivot(&mut self, mut r: usize, mut c: usize) -> Option<(T, usize, usize)> {
        loop {
            // column pass
            loop {
                let p = self.entry(r, c)?.clone();
                let others: Vec<usize> = self.col_rows[c]
                    .iter()
                    .copied()
                    .filter(|&r2| r2 != r && self.row_alive[r2])
                    .collect();
                if others.is_empty() {
                    break;
                }
                for r2 in &others {
                    let v = self.entry(*r2, c)?.clone();
                    let q = v.div_trunc(&p);
                    if !q.is_zero() {
                        self.row_sub_mul(*r2, r, &q)?;
                    }
                }
                // any remainders are strictly smaller than |p|
                let leftover = self.col_rows[c]
                    .iter()
                    .copied()
                    .filter(|&r2| r2 != r && self.row_alive[r2])
                    .min_by_key(|&r2| self.entry(r2, c).unwrap().abs());
                match leftover {
                    Some(r2) => r = r2,
                    None => break,
                }
            }
            // row pass: the pivot column is clear, so a column operation
            // subtracting a multiple of it touches only row r
            let p = self.entry(r, c)?.clone();
            let row_cols: Vec<usize> = self.rows[r]
                .keys()
                .copied()
                .filter(|&c2| c2 != c && self.col_alive[c2])
                .collect();
            let mut smallest: Option<(T, usize)> = None;
            for c2 in row_cols {
                let v = self.entry(r, c2)?.clone();
                let rem = v.rem_trunc(&p);
                self.set_entry(r, c2, rem.clone());
                if !rem.is_zero() {
                    let a = rem.abs();
                    if smallest.as_ref().is_none_or(|(b, _)| a < *b) {
                        smallest = Some((a, c2));
                    }
                }
            }
            match smallest {
                Some((_, c2)) => c = c2,
                None => return Some((p, r, c)),
            }
        }
    }

    fn retire(&mut self, r: usize, c: usize) {
        self.row_alive[r] = false;
        self.col_alive[c] = false;
        for (&c2, _) in self.rows[r].clone().iter() {
            self.col_rows[c2].remove(&r);
        }
        self.rows[r].clear();
    }
}
