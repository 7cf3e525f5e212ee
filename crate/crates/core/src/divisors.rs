//! Torus-invariant divisor classes on a stacky fan.
//!
//! A class is an integer vector `k` over the rays, standing for
//! `O(sum k_i D_i)`. Two vectors give the same class when they differ by a
//! principal vector `(<m, r_i v_i>)_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::StackyFan;
use crate::lattice::{self, FiniteAbelianGroup, HermiteReducer, IntMatrix};
use crate::mmp::WallRelation;

pub type DivisorClass = Vec<i64>;
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

/// Rows `(<e_j, r_i v_i>)_i` for `j = 1..n`; they span the principal classes.
pub fn principal_rows(fan: &StackyFan) -> Vec<Vec<i64>> {
    (0..fan.dim)
        .map(|j| (0..fan.n_rays()).map(|i| fan.rays[i][j] * fan.mult[i]).collect())
        .collect()
}

/// The principal vector of a character `m`.
pub fn principal_vector(fan: &StackyFan, m: &[i64]) -> Vec<i64> {
    (0..fan.n_rays())
        .map(|i| fan.mult[i] * fan.rays[i].iter().zip(m).map(|(a, b)| a * b).sum::<i64>())
        .collect()
}

pub fn is_linearly_trivial(fan: &StackyFan, k: &[i64]) -> bool {
    let cols: Vec<Vec<i64>> = (0..fan.n_rays()).map(|i| fan.stacky_ray(i)).collect();
    // Rows of the system are rays: <m, r_i v_i> = k_i.
    let a = IntMatrix::from_rows(fan.dim, &cols);
    lattice::solve_integral(&a, &lattice::to_big_vec(k)).is_some()
}

/// `N / <r_i v_i>`; its dual is the torsion part of the class group.
pub fn torsion_class_group(fan: &StackyFan) -> FiniteAbelianGroup {
    let gens: Vec<Vec<i64>> = (0..fan.n_rays()).map(|i| fan.stacky_ray(i)).collect();
    lattice::quotient_projection(fan.dim, &gens).torsion
}

/// `sum a_i k_i / r_i` over the rays involved in the relation.
pub fn degree(rel: &WallRelation, k: &[i64]) -> Rational {
    rel.involved
        .iter()
        .zip(rel.a.iter().zip(&rel.r))
        .fold(Rational::zero(), |acc, (&i, (&a, &r))| acc + rational(a * k[i], r))
}

/// Coarse Weil divisor of the pushforward: `floor(k_i / r_i)` per ray.
pub fn pushforward_to_coarse(fan: &StackyFan, k: &[i64]) -> Vec<i64> {
    k.iter().zip(&fan.mult).map(|(k, r)| k.div_floor(r)).collect()
}

pub fn canonical_class(fan: &StackyFan) -> DivisorClass {
    vec![-1; fan.n_rays()]
}

pub fn add(a: &[i64], b: &[i64]) -> DivisorClass {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> DivisorClass {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[i64]) -> DivisorClass {
    a.iter().map(|x| -x).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Open,
    Closed,
}

/// A quotient `Z^R / L` where `L` contains the principal lattice, with
/// canonical representatives and window enumeration.
#[derive(Clone, Debug)]
pub struct ClassLattice {
    rank: usize,
    gens: Vec<Vec<i64>>,
    reducer: HermiteReducer,
}

impl ClassLattice {
    pub fn principal(fan: &StackyFan) -> Self {
        Self::from_generators(fan.n_rays(), principal_rows(fan))
    }

    pub fn from_generators(rank: usize, gens: Vec<Vec<i64>>) -> Self {
        let reducer = HermiteReducer::new(rank, &gens);
        ClassLattice { rank, gens, reducer }
    }

    /// The same quotient further divided by `extra`.
    pub fn with_extra(&self, extra: &[Vec<i64>]) -> Self {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Self::from_generators(self.rank, gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.gens
    }

    pub fn canonical(&self, k: &[i64]) -> DivisorClass {
        self.reducer.reduce(k)
    }

    pub fn equivalent(&self, a: &[i64], b: &[i64]) -> bool {
        self.reducer.contains(&sub(a, b))
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.reducer.contains(k)
    }

    /// Every class `k` with `lo (<|<=) w.k (<|<=) hi`, as canonical
    /// representatives ordered by ascending `w.k`, ties lexicographic.
    ///
    /// The quotient must have free rank one and `w` must vanish on the
    /// lattice, so that `w` is a well-defined degree with finite fibers.
    pub fn window(&self, w: &[Rational], lo: (&Rational, Bound), hi: (&Rational, Bound)) -> Result<Vec<DivisorClass>> {
        for g in &self.gens {
            if !dot(w, g).is_zero() {
                return Err(Error::Precondition(format!(
                    "degree functional does not vanish on generator {g:?}"
                )));
            }
        }
        let free = self.reducer.free_columns();
        if free.len() != 1 {
            return Err(Error::Precondition(format!(
                "window quotient has free rank {}, expected 1",
                free.len()
            )));
        }
        let f = free[0];
        if w[f].is_zero() {
            return Err(Error::Precondition(
                "degree functional vanishes on the free part".into(),
            ));
        }
        let pivots = self.reducer.pivots();
        let mut out = Vec::new();
        let mut residues = vec![0i64; pivots.len()];
        loop {
            let mut x = vec![0i64; self.rank];
            for ((c, _), r) in pivots.iter().zip(&residues) {
                x[*c] = *r;
            }
            let base = dot(w, &x);
            // base + w_f * t within the window.
            let (t_lo, t_hi) = integer_range(&base, &w[f], lo, hi);
            let mut t = t_lo.clone();
            while t <= t_hi {
                let mut y = x.clone();
                y[f] = t
                    .clone()
                    .try_into()
                    .map_err(|_| Error::Overflow("window coordinate".into()))?;
                out.push(y);
                t += 1;
            }
            if !advance(&mut residues, &pivots) {
                break;
            }
        }
        out.sort_by(|a, b| dot(w, a).cmp(&dot(w, b)).then_with(|| a.cmp(b)));
        Ok(out)
    }
}

fn advance(residues: &mut [i64], pivots: &[(usize, i64)]) -> bool {
    for (r, (_, h)) in residues.iter_mut().zip(pivots) {
        *r += 1;
        if *r < *h {
            return true;
        }
        *r = 0;
    }
    false
}

/// Integers `t` with `lo (<|<=) base + w t (<|<=) hi`, as an inclusive range.
fn integer_range(base: &Rational, w: &Rational, lo: (&Rational, Bound), hi: (&Rational, Bound)) -> (BigInt, BigInt) {
    // Bounds on t: (lo - base)/w and (hi - base)/w, swapped when w < 0.
    let a = (lo.0 - base) / w;
    let b = (hi.0 - base) / w;
    let (low, low_b, high, high_b) = if w.is_positive() {
        (a, lo.1, b, hi.1)
    } else {
        (b, hi.1, a, lo.1)
    };
    let t_lo = match low_b {
        Bound::Closed => low.ceil().to_integer(),
        Bound::Open => low.floor().to_integer() + 1,
    };
    let t_hi = match high_b {
        Bound::Closed => high.floor().to_integer(),
        Bound::Open => high.ceil().to_integer() - 1,
    };
    (t_lo, t_hi)
}

pub fn dot(w: &[Rational], k: &[i64]) -> Rational {
    w.iter()
        .zip(k)
        .fold(Rational::zero(), |acc, (w, k)| acc + w * BigInt::from(*k))
}

/// Degree weights `a_i / r_i` of a relation, indexed by all rays.
pub fn degree_weights(rel: &WallRelation, n_rays: usize) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); n_rays];
    for ((&i, &a), &r) in rel.involved.iter().zip(&rel.a).zip(&rel.r) {
        w[i] = rational(a, r);
    }
    w
}

/// Summand classes of the pushforward of `O(-p D_last)` from the cyclic
/// cover attached to a Picard-rank-one fan, up to linear equivalence.
pub fn decompose_pushforward(fan: &StackyFan, rel: &WallRelation, p: usize) -> Result<Vec<DivisorClass>> {
    let n_rays = fan.n_rays();
    if fan.picard_rank() != 1 || rel.involved.len() != n_rays || rel.a.iter().any(|a| *a <= 0) {
        return Err(Error::Precondition(
            "decomposition needs a Picard-rank-one fan and its global relation".into(),
        ));
    }
    if p > fan.dim {
        return Err(Error::Precondition(format!("p = {p} exceeds dimension {}", fan.dim)));
    }
    // Smallest r with r_i | a_i r for all i.
    let r = rel
        .a
        .iter()
        .zip(&rel.r)
        .fold(1i64, |acc, (a, ri)| acc.lcm(&(ri / ri.gcd(a))));
    let last = rel.involved.len() - 1;
    let classes = ClassLattice::principal(fan);
    let mut seen = std::collections::BTreeSet::new();
    let periods: Vec<i64> = rel.a[..last].iter().map(|a| 2 * a * r).collect();
    let mut ks: Vec<i64> = rel.a[..last].iter().map(|a| -a * r).collect();
    loop {
        let k_last: i64 = -ks.iter().sum::<i64>();
        let mut c = vec![0i64; n_rays];
        for j in 0..=last {
            let (kj, shift) = if j == last { (k_last, p as i64) } else { (ks[j], 0) };
            c[rel.involved[j]] = num_integer::Integer::div_floor(&((kj - shift) * rel.r[j]), &(rel.a[j] * r));
        }
        seen.insert(classes.canonical(&c));
        // Odometer over one period per coordinate.
        let mut j = 0;
        loop {
            if j == last {
                let w = degree_weights(rel, n_rays);
                let mut out: Vec<DivisorClass> = seen.into_iter().collect();
                out.sort_by(|a, b| dot(&w, a).cmp(&dot(&w, b)).then_with(|| a.cmp(b)));
                return Ok(out);
            }
            ks[j] += 1;
            if ks[j] < -rel.a[j] * r + periods[j] {
                break;
            }
            ks[j] = -rel.a[j] * r;
            j += 1;
        }
    }
}

/// `true` when the rational number is an integer.
pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::mmp::fano_relation;

    #[test]
    fn linear_triviality_on_p2() {
        let f = builtin::p2();
        assert!(!is_linearly_trivial(&f, &[1, 1, 1]));
        assert!(is_linearly_trivial(&f, &[1, -1, 0]));
        assert!(is_linearly_trivial(&f, &[0, 0, 0]));
    }

    #[test]
    fn torsion_groups() {
        assert!(torsion_class_group(&builtin::p2()).is_trivial());
        let mut f = builtin::p2();
        f.mult = vec![2, 2, 2];
        let g = torsion_class_group(&f);
        assert_eq!(g.invariant_factors, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(torsion_class_group(&builtin::p112()).is_trivial());
    }

    #[test]
    fn degrees() {
        let f = builtin::p2();
        let rel = fano_relation(&f).unwrap();
        assert_eq!(degree(&rel, &[0, 0, -1]), rational(-1, 1));
        // P(1,1,2) with the weight-two ray listed last.
        let f = StackyFan::with_unit_mult(
            2,
            vec![vec![1, 0], vec![-1, -2], vec![0, 1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        );
        let rel = fano_relation(&f).unwrap();
        assert_eq!(rel.a, vec![1, 1, 2]);
        assert_eq!(degree(&rel, &[0, 0, -1]), rational(-2, 1));
        let f = builtin::p1r2();
        let rel = fano_relation(&f).unwrap();
        assert_eq!(degree(&rel, &[1, 0]), rational(1, 2));
    }

    #[test]
    fn coarse_pushforward() {
        let mut f = builtin::p1();
        f.mult = vec![2, 2];
        assert_eq!(pushforward_to_coarse(&f, &[1, -1]), vec![0, -1]);
        let mut f = builtin::p2();
        f.mult = vec![2, 2, 2];
        assert_eq!(pushforward_to_coarse(&f, &[1, 1, -3]), vec![0, 0, -2]);
        assert_eq!(pushforward_to_coarse(&builtin::f1(), &[3, -2, 0, 5]), vec![3, -2, 0, 5]);
    }

    #[test]
    fn window_on_p2() {
        let f = builtin::p2();
        let cl = ClassLattice::principal(&f);
        let w = vec![rational(1, 1); 3];
        let ks = cl
            .window(&w, (&rational(-3, 1), Bound::Open), (&rational(0, 1), Bound::Closed))
            .unwrap();
        let degs: Vec<Rational> = ks.iter().map(|k| dot(&w, k)).collect();
        assert_eq!(degs, vec![rational(-2, 1), rational(-1, 1), rational(0, 1)]);
    }

    #[test]
    fn decompose_on_p2() {
        let f = builtin::p2();
        let rel = fano_relation(&f).unwrap();
        let c0 = decompose_pushforward(&f, &rel, 0).unwrap();
        assert_eq!(c0.len(), 1);
        assert!(is_linearly_trivial(&f, &c0[0]));
        let c1 = decompose_pushforward(&f, &rel, 1).unwrap();
        assert_eq!(c1.len(), 1);
        assert_eq!(degree(&rel, &c1[0]), rational(-1, 1));
    }

    #[test]
    fn decompose_on_stacky_p1() {
        let f = builtin::p1r2();
        let rel = fano_relation(&f).unwrap();
        let c = decompose_pushforward(&f, &rel, 1).unwrap();
        for k in &c {
            let d = degree(&rel, k);
            assert!(d <= rational(0, 1) && d > rational(-3, 2), "{k:?} has degree {d}");
        }
    }
}
