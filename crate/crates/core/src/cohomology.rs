//! Cohomology of line bundles on toric stacks, restriction to closed
//! strata, and Ext groups between line bundles and pushforwards from strata.
//!
//! For a weight `m`, set `Neg(m) = {i : r_i <m, v_i> + k_i < 0}`. The
//! `m`-part of `H^q` is the reduced cohomology `H~^{q-1}` of the full
//! subcomplex of the fan on `Neg(m)`; the Čech method instead builds the
//! Čech complex of the maximal-cone cover directly.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::divisors::{self, DivisorClass};
use crate::error::{Error, Result};
use crate::fan::{self, StackyFan, StarFan};
use crate::lattice::{self, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub dims: Vec<u64>,
}

impl CohomologyTable {
    pub fn zero(n: usize) -> Self {
        CohomologyTable { dims: vec![0; n + 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|d| *d == 0)
    }

    /// `C` in degree zero and nothing else.
    pub fn is_unit(&self) -> bool {
        self.dims.first() == Some(&1) && self.dims[1..].iter().all(|d| *d == 0)
    }

    pub fn concentrated_in_degree_zero(&self) -> bool {
        self.dims[1..].iter().all(|d| *d == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(q, d)| if q % 2 == 0 { *d as i64 } else { -(*d as i64) })
            .sum()
    }

    /// Pads or shifts into a table of length `n + 1`: entry `q` moves to `q + shift`.
    fn shifted(&self, shift: usize, n: usize) -> Result<Self> {
        let mut dims = vec![0; n + 1];
        for (q, d) in self.dims.iter().enumerate() {
            if *d == 0 {
                continue;
            }
            let slot = dims
                .get_mut(q + shift)
                .ok_or_else(|| Error::Precondition(format!("Ext degree {} exceeds dimension {n}", q + shift)))?;
            *slot = *d;
        }
        Ok(CohomologyTable { dims })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Weight,
    Cech,
}

/// Precomputed combinatorics of one fan, with per-`Neg` caching.
pub struct CohomologyEngine {
    fan: StackyFan,
    faces: Vec<u64>,
    cones: Vec<u64>,
    cache: RefCell<HashMap<(u64, Method), Vec<u64>>>,
}

fn mask(ix: &[usize]) -> u64 {
    ix.iter().fold(0u64, |m, i| m | 1 << i)
}

impl CohomologyEngine {
    pub fn new(fan: &StackyFan) -> Result<Self> {
        if fan.n_rays() > 64 {
            return Err(Error::Precondition("cohomology supports at most 64 rays".into()));
        }
        fan::walls(fan)?;
        let faces = fan.all_faces().iter().map(|f| mask(f)).collect();
        let cones = fan.max_cones.iter().map(|c| mask(c)).collect();
        Ok(CohomologyEngine {
            fan: fan.clone(),
            faces,
            cones,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn fan(&self) -> &StackyFan {
        &self.fan
    }

    pub fn dims(&self, k: &[i64], method: Method) -> Result<CohomologyTable> {
        self.dims_with_margin(k, method, 1)
    }

    pub fn dims_with_margin(&self, k: &[i64], method: Method, margin: i64) -> Result<CohomologyTable> {
        let fan = &self.fan;
        let n = fan.dim;
        if k.len() != fan.n_rays() {
            return Err(Error::Precondition(format!(
                "class has {} entries for {} rays",
                k.len(),
                fan.n_rays()
            )));
        }
        let (lo, hi) = self.weight_box(k, margin)?;
        let stacky: Vec<Vec<i64>> = (0..fan.n_rays()).map(|i| fan.stacky_ray(i)).collect();
        let mut total = vec![0u64; n + 1];
        let mut m = lo.clone();
        loop {
            let neg = stacky
                .iter()
                .zip(k)
                .enumerate()
                .filter(|(_, (v, ki))| v.iter().zip(&m).map(|(a, b)| a * b).sum::<i64>() + **ki < 0)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            let part = self.isotypic(neg, method);
            for (t, p) in total.iter_mut().zip(&part) {
                *t += p;
            }
            // Odometer over the box.
            let mut j = 0;
            loop {
                if j == n {
                    return Ok(CohomologyTable { dims: total });
                }
                m[j] += 1;
                if m[j] <= hi[j] {
                    break;
                }
                m[j] = lo[j];
                j += 1;
            }
        }
    }

    /// Bounding box of every vertex of the hyperplane arrangement
    /// `<m, r_i v_i> = -k_i`, enlarged by `margin`. This contains the
    /// per-cone vertices and every bounded chamber.
    fn weight_box(&self, k: &[i64], margin: i64) -> Result<(Vec<i64>, Vec<i64>)> {
        let fan = &self.fan;
        let n = fan.dim;
        if n == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        let mut lo: Vec<Option<BigRational>> = vec![None; n];
        let mut hi: Vec<Option<BigRational>> = vec![None; n];
        let mut subset: Vec<usize> = (0..n).collect();
        let r = fan.n_rays();
        loop {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| fan.stacky_ray(i)).collect();
            let a = IntMatrix::from_rows(n, &rows);
            let b: Vec<BigRational> = subset
                .iter()
                .map(|&i| BigRational::from_integer((-k[i]).into()))
                .collect();
            if let Some(u) = lattice::solve_rational(&a, &b) {
                for j in 0..n {
                    if lo[j].as_ref().is_none_or(|l| u[j] < *l) {
                        lo[j] = Some(u[j].clone());
                    }
                    if hi[j].as_ref().is_none_or(|h| u[j] > *h) {
                        hi[j] = Some(u[j].clone());
                    }
                }
            }
            // Next n-subset in lexicographic order.
            let mut i = n;
            loop {
                if i == 0 {
                    let lo = lo
                        .into_iter()
                        .map(|l| l.map(|l| l.floor().to_integer().to_i64().unwrap_or(i64::MIN) - margin))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| Error::Incomplete("rays do not span the lattice".into()))?;
                    let hi = hi
                        .into_iter()
                        .map(|h| h.map(|h| h.ceil().to_integer().to_i64().unwrap_or(i64::MAX) + margin))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| Error::Incomplete("rays do not span the lattice".into()))?;
                    return Ok((lo, hi));
                }
                i -= 1;
                if subset[i] < r - n + i {
                    subset[i] += 1;
                    for j in i + 1..n {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn isotypic(&self, neg: u64, method: Method) -> Vec<u64> {
        if let Some(v) = self.cache.borrow().get(&(neg, method)) {
            return v.clone();
        }
        let v = match method {
            Method::Weight => self.reduced_subcomplex(neg),
            Method::Cech => self.cech(neg),
        };
        self.cache.borrow_mut().insert((neg, method), v.clone());
        v
    }

    /// `H^q = H~^{q-1}` of the full subcomplex on `neg`, for `q = 0..=n`.
    fn reduced_subcomplex(&self, neg: u64) -> Vec<u64> {
        let n = self.fan.dim;
        // by_size[s] = faces with s rays inside neg; the empty face sits at s = 0.
        let mut by_size: Vec<Vec<u64>> = vec![Vec::new(); n + 2];
        for &f in &self.faces {
            if f & !neg == 0 {
                by_size[f.count_ones() as usize].push(f);
            }
        }
        // rank of the coboundary from size s to size s + 1
        let ranks: Vec<usize> = (0..=n).map(|s| coboundary_rank(&by_size[s], &by_size[s + 1])).collect();
        (0..=n)
            .map(|q| {
                let below = if q == 0 { 0 } else { ranks[q - 1] };
                (by_size[q].len() - ranks[q] - below) as u64
            })
            .collect()
    }

    fn cech(&self, neg: u64) -> Vec<u64> {
        let n = self.fan.dim;
        let m = self.cones.len();
        // terms[p] = index sets of p + 1 cones whose common face avoids neg.
        let mut terms: Vec<Vec<u64>> = vec![Vec::new(); n + 2];
        for (p, term) in terms.iter_mut().enumerate() {
            if p + 1 > m {
                break;
            }
            for_each_subset(m, p + 1, &mut |s| {
                let tau = (0..m)
                    .filter(|c| s >> c & 1 == 1)
                    .fold(u64::MAX, |acc, c| acc & self.cones[c]);
                if tau & neg == 0 {
                    term.push(s);
                }
            });
        }
        let ranks: Vec<usize> = (0..=n).map(|p| coboundary_rank(&terms[p], &terms[p + 1])).collect();
        (0..=n)
            .map(|q| {
                let below = if q == 0 { 0 } else { ranks[q - 1] };
                (terms[q].len() - ranks[q] - below) as u64
            })
            .collect()
    }
}

fn for_each_subset(m: usize, size: usize, f: &mut impl FnMut(u64)) {
    fn rec(start: usize, m: usize, left: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=m - left {
            rec(i + 1, m, left - 1, acc | 1 << i, f);
        }
    }
    if size <= m {
        rec(0, m, size, 0, f);
    }
}

/// Rank of the alternating-sign incidence matrix from sets in `src` to
/// sets in `dst` with one more element.
fn coboundary_rank(src: &[u64], dst: &[u64]) -> usize {
    if src.is_empty() || dst.is_empty() {
        return 0;
    }
    let index: HashMap<u64, usize> = src.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let rows: Vec<Vec<i64>> = dst
        .iter()
        .map(|&g| {
            let mut row = vec![0i64; src.len()];
            let mut t = 0;
            for b in 0..64 {
                if g >> b & 1 == 1 {
                    if let Some(&c) = index.get(&(g & !(1 << b))) {
                        row[c] = if t % 2 == 0 { 1 } else { -1 };
                    }
                    t += 1;
                }
            }
            row
        })
        .collect();
    lattice::rank_rational(&IntMatrix::from_rows(src.len(), &rows))
}

pub fn cohomology_dims(fan: &StackyFan, k: &[i64], method: Method) -> Result<CohomologyTable> {
    CohomologyEngine::new(fan)?.dims(k, method)
}

pub fn hom_line_bundles(fan: &StackyFan, a: &[i64], b: &[i64]) -> Result<CohomologyTable> {
    cohomology_dims(fan, &divisors::sub(b, a), Method::Weight)
}

/// Restriction of a line bundle to a closed stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// The stabilizer of the stratum acts by a nontrivial character, so
    /// every invariant cohomology group vanishes.
    ZeroSheaf,
    /// A class on the star fan.
    Class(DivisorClass),
}

pub fn restrict_class(fan: &StackyFan, stratum: &[usize], k: &[i64]) -> Result<Restriction> {
    let star = fan::star_fan(fan, stratum)?;
    Ok(restrict_to_star(fan, &star, k))
}

pub fn restrict_to_star(fan: &StackyFan, star: &StarFan, k: &[i64]) -> Restriction {
    // Move k into the form with zero coefficients on the stratum rays.
    let rows: Vec<Vec<i64>> = star.stratum.iter().map(|&i| fan.stacky_ray(i)).collect();
    let rhs: Vec<i64> = star.stratum.iter().map(|&i| k[i]).collect();
    let m = if rows.is_empty() {
        Some(vec![0; fan.dim])
    } else {
        lattice::solve_integral(&IntMatrix::from_rows(fan.dim, &rows), &lattice::to_big_vec(&rhs))
            .map(|m| lattice::to_i64_vec(&m).expect("small character"))
    };
    let Some(m) = m else {
        return Restriction::ZeroSheaf;
    };
    let shifted = divisors::sub(k, &divisors::principal_vector(fan, &m));
    Restriction::Class(star.adjacent.iter().map(|&j| shifted[j]).collect())
}

/// A pushforward `j_*(psi^* L ⊗ O(twist)|_D)` from the closed stratum `D`
/// of the cone `stratum`; `class` lives on the star fan of `stratum`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PushforwardDatum {
    pub stratum: Vec<usize>,
    pub class: DivisorClass,
    pub twist: DivisorClass,
}

type StarEngine = (StarFan, CohomologyEngine);

/// Shared star-fan data for repeated Ext computations on one fan.
pub struct ExtContext {
    fan: StackyFan,
    ambient: CohomologyEngine,
    stars: RefCell<HashMap<Vec<usize>, Rc<StarEngine>>>,
}

impl ExtContext {
    pub fn new(fan: &StackyFan) -> Result<Self> {
        Ok(ExtContext {
            fan: fan.clone(),
            ambient: CohomologyEngine::new(fan)?,
            stars: RefCell::new(HashMap::new()),
        })
    }

    pub fn fan(&self) -> &StackyFan {
        &self.fan
    }

    fn star(&self, stratum: &[usize]) -> Result<Rc<StarEngine>> {
        let mut key = stratum.to_vec();
        key.sort_unstable();
        if let Some(s) = self.stars.borrow().get(&key) {
            return Ok(s.clone());
        }
        let star = fan::star_fan(&self.fan, &key)?;
        let engine = CohomologyEngine::new(&star.fan)?;
        let rc = Rc::new((star, engine));
        self.stars.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    pub fn line_bundles(&self, a: &[i64], b: &[i64]) -> Result<CohomologyTable> {
        self.ambient.dims(&divisors::sub(b, a), Method::Weight)
    }

    /// `Ext^q(O(a), obj)`.
    pub fn to_pushforward(&self, a: &[i64], obj: &PushforwardDatum) -> Result<CohomologyTable> {
        let star = self.star(&obj.stratum)?;
        let n = self.fan.dim;
        match restrict_to_star(&self.fan, &star.0, &divisors::sub(&obj.twist, a)) {
            Restriction::ZeroSheaf => Ok(CohomologyTable::zero(n)),
            Restriction::Class(c) => star
                .1
                .dims(&divisors::add(&c, &obj.class), Method::Weight)?
                .shifted(0, n),
        }
    }

    /// `Ext^q(obj, O(a))`, by duality for the regular embedding of the
    /// stratum: `H^{q-c}(D, L^{-1} ⊗ O(a - twist + sum_{i in S} D_i)|_D)`.
    pub fn from_pushforward(&self, obj: &PushforwardDatum, a: &[i64]) -> Result<CohomologyTable> {
        let star = self.star(&obj.stratum)?;
        let n = self.fan.dim;
        let mut k = divisors::sub(a, &obj.twist);
        for &i in &obj.stratum {
            k[i] += 1;
        }
        match restrict_to_star(&self.fan, &star.0, &k) {
            Restriction::ZeroSheaf => Ok(CohomologyTable::zero(n)),
            Restriction::Class(c) => star
                .1
                .dims(&divisors::sub(&c, &obj.class), Method::Weight)?
                .shifted(obj.stratum.len(), n),
        }
    }

    /// Koszul `E1` page for `Ext(obj1, obj2)` on a common stratum.
    pub fn between_pushforwards(&self, obj1: &PushforwardDatum, obj2: &PushforwardDatum) -> Result<ExtVerdict> {
        let mut s1 = obj1.stratum.clone();
        let mut s2 = obj2.stratum.clone();
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return Err(Error::Precondition(format!(
                "pushforwards live on different strata {s1:?} and {s2:?}"
            )));
        }
        let star = self.star(&s1)?;
        let n = self.fan.dim;
        let c = s1.len();
        let base = divisors::sub(&obj2.twist, &obj1.twist);
        let line = divisors::sub(&obj2.class, &obj1.class);
        let mut entries = vec![vec![0u64; star.0.fan.dim + 1]; c + 1];
        for sub in 0u64..(1u64 << c) {
            let p = sub.count_ones() as usize;
            let mut k = base.clone();
            for (b, &i) in s1.iter().enumerate() {
                if sub >> b & 1 == 1 {
                    k[i] += 1;
                }
            }
            if let Restriction::Class(cls) = restrict_to_star(&self.fan, &star.0, &k) {
                let t = star.1.dims(&divisors::add(&cls, &line), Method::Weight)?;
                for (e, d) in entries[p].iter_mut().zip(&t.dims) {
                    *e += d;
                }
            }
        }
        Ok(ExtVerdict::from_page(E1Page { entries }, n))
    }
}

/// `E1` entries `entries[p][h]` contributing to total degree `p + h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Page {
    pub entries: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ExtVerdict {
    Vanishes,
    Determined { table: CohomologyTable },
    Indeterminate { page: E1Page },
}

impl ExtVerdict {
    fn from_page(page: E1Page, n: usize) -> Self {
        let mut per_degree: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
        let mut out_of_range = false;
        for (p, row) in page.entries.iter().enumerate() {
            for (h, d) in row.iter().enumerate() {
                if *d == 0 {
                    continue;
                }
                match per_degree.get_mut(p + h) {
                    Some(v) => v.push(*d),
                    None => out_of_range = true,
                }
            }
        }
        if out_of_range {
            return ExtVerdict::Indeterminate { page };
        }
        if per_degree.iter().all(Vec::is_empty) {
            return ExtVerdict::Vanishes;
        }
        if per_degree.iter().any(|v| v.len() > 1) {
            return ExtVerdict::Indeterminate { page };
        }
        ExtVerdict::Determined {
            table: CohomologyTable {
                dims: per_degree.iter().map(|v| v.first().copied().unwrap_or(0)).collect(),
            },
        }
    }

    /// The Ext table when it is known.
    pub fn table(&self, n: usize) -> Option<CohomologyTable> {
        match self {
            ExtVerdict::Vanishes => Some(CohomologyTable::zero(n)),
            ExtVerdict::Determined { table } => Some(table.clone()),
            ExtVerdict::Indeterminate { .. } => None,
        }
    }
}

pub fn hom_with_pushforward(fan: &StackyFan, a: &[i64], obj: &PushforwardDatum) -> Result<CohomologyTable> {
    ExtContext::new(fan)?.to_pushforward(a, obj)
}

pub fn hom_from_pushforward(fan: &StackyFan, obj: &PushforwardDatum, a: &[i64]) -> Result<CohomologyTable> {
    ExtContext::new(fan)?.from_pushforward(obj, a)
}

pub fn hom_pushforwards(fan: &StackyFan, obj1: &PushforwardDatum, obj2: &PushforwardDatum) -> Result<ExtVerdict> {
    ExtContext::new(fan)?.between_pushforwards(obj1, obj2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn dims(fan: &StackyFan, k: &[i64]) -> Vec<u64> {
        cohomology_dims(fan, k, Method::Weight).unwrap().dims
    }

    #[test]
    fn p2_tables() {
        let f = builtin::p2();
        assert_eq!(dims(&f, &[0, 0, 0]), vec![1, 0, 0]);
        assert_eq!(dims(&f, &[-1, -1, -1]), vec![0, 0, 1]);
        assert_eq!(dims(&f, &[1, 0, 0]), vec![3, 0, 0]);
        assert_eq!(dims(&f, &[0, 0, -1]), vec![0, 0, 0]);
        assert_eq!(dims(&f, &[0, 0, -4]), vec![0, 0, 3]);
    }

    #[test]
    fn p1_tables() {
        let f = builtin::p1();
        assert_eq!(dims(&f, &[-1, 0]), vec![0, 0]);
        assert_eq!(dims(&f, &[-2, 0]), vec![0, 1]);
        assert_eq!(dims(&f, &[2, 1]), vec![4, 0]);
    }

    #[test]
    fn point_fan() {
        assert_eq!(dims(&StackyFan::point(), &[]), vec![1]);
        assert_eq!(
            cohomology_dims(&StackyFan::point(), &[], Method::Cech).unwrap().dims,
            vec![1]
        );
    }

    #[test]
    fn hom_between_line_bundles() {
        let f = builtin::p2();
        assert!(hom_line_bundles(&f, &[0, 0, 0], &[0, 0, 0]).unwrap().is_unit());
        assert!(hom_line_bundles(&f, &[0, 0, 0], &[0, 0, -1]).unwrap().is_zero());
        assert_eq!(
            hom_line_bundles(&f, &[0, 0, -2], &[0, 0, 0]).unwrap().dims,
            vec![6, 0, 0]
        );
    }

    #[test]
    fn cech_matches_weight_on_f1() {
        let f = builtin::f1();
        for k in [[0, 0, 0, 0], [1, -2, 0, 1], [-3, 0, 0, 0], [0, -2, 0, 0], [2, 2, -5, 1]] {
            assert_eq!(
                cohomology_dims(&f, &k, Method::Weight).unwrap(),
                cohomology_dims(&f, &k, Method::Cech).unwrap(),
                "{k:?}"
            );
        }
    }

    #[test]
    fn restriction_on_stacky_p1() {
        let f = builtin::p1r2();
        assert_eq!(restrict_class(&f, &[0], &[1, 0]).unwrap(), Restriction::ZeroSheaf);
        assert_eq!(restrict_class(&f, &[0], &[2, 0]).unwrap(), Restriction::Class(vec![]));
    }

    #[test]
    fn restriction_on_f1() {
        // D_4 misses D_2, D_1 meets it once.
        let f = builtin::f1();
        let star = crate::fan::star_fan(&f, &[2]).unwrap();
        let Restriction::Class(c) = restrict_class(&f, &[2], &[1, 0, 0, 0]).unwrap() else {
            panic!("unexpected zero sheaf");
        };
        assert_eq!(dims(&star.fan, &c), vec![1, 0]);
        let Restriction::Class(c) = restrict_class(&f, &[2], &[0, 1, 0, 0]).unwrap() else {
            panic!("unexpected zero sheaf");
        };
        assert_eq!(dims(&star.fan, &c), vec![2, 0]);
        // D_2 restricted to itself is O(-1).
        let Restriction::Class(c) = restrict_class(&f, &[2], &[0, 0, 1, 0]).unwrap() else {
            panic!("unexpected zero sheaf");
        };
        assert_eq!(dims(&star.fan, &c), vec![0, 0]);
    }

    #[test]
    fn stabilizer_pattern_on_weighted_point() {
        let mut f = builtin::p1();
        f.mult = vec![3, 1];
        let pt = |k: i64| PushforwardDatum {
            stratum: vec![0],
            class: vec![],
            twist: vec![k, 0],
        };
        assert_eq!(
            hom_pushforwards(&f, &pt(0), &pt(0)).unwrap(),
            ExtVerdict::Determined {
                table: CohomologyTable { dims: vec![1, 0] }
            }
        );
        assert_eq!(
            hom_pushforwards(&f, &pt(1), &pt(0)).unwrap(),
            ExtVerdict::Determined {
                table: CohomologyTable { dims: vec![0, 1] }
            }
        );
        assert_eq!(hom_pushforwards(&f, &pt(2), &pt(0)).unwrap(), ExtVerdict::Vanishes);
        assert!(hom_with_pushforward(&f, &[0, 0], &pt(1)).unwrap().is_zero());
        assert!(hom_with_pushforward(&f, &[0, 0], &pt(0)).unwrap().is_unit());
    }

    #[test]
    fn pushforward_to_line_bundle_by_duality() {
        // Ext^q(O_p, O) on P^1 is C in degree 1.
        let f = builtin::p1();
        let pt = PushforwardDatum {
            stratum: vec![0],
            class: vec![],
            twist: vec![0, 0],
        };
        assert_eq!(hom_from_pushforward(&f, &pt, &[0, 0]).unwrap().dims, vec![0, 1]);
    }

    #[test]
    fn different_strata_are_rejected() {
        let f = builtin::p1();
        let a = PushforwardDatum {
            stratum: vec![0],
            class: vec![],
            twist: vec![0, 0],
        };
        let b = PushforwardDatum {
            stratum: vec![1],
            ..a.clone()
        };
        assert!(hom_pushforwards(&f, &a, &b).is_err());
    }
}
