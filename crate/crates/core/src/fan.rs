//! Stacky fans: complete simplicial fans with a positive multiplicity on
//! each ray. This is the combinatorial model of the toric Deligne-Mumford
//! stack attached to a pair `(X, B)` with `B = sum (r_i - 1)/r_i D_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, IntMatrix};
use crate::lp;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StackyFan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub mult: Vec<i64>,
    pub max_cones: Vec<Vec<usize>>,
}

/// An `(n-1)`-dimensional cone shared by exactly two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Wall {
    pub wall_rays: Vec<usize>,
    pub side_a: usize,
    pub side_b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    NonPrimitiveRay(usize),
    DuplicateRay(usize, usize),
    BadMultiplicity(usize),
    NonSimplicialCone(usize),
    UnusedRay(usize),
    Incomplete { face: Vec<usize>, cones: usize },
    Overlap(String),
    NonProjective,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "malformed: {s}"),
            Violation::NonPrimitiveRay(i) => write!(f, "non-primitive ray {i}"),
            Violation::DuplicateRay(i, j) => write!(f, "rays {i} and {j} coincide"),
            Violation::BadMultiplicity(i) => write!(f, "multiplicity of ray {i} is below 1"),
            Violation::NonSimplicialCone(c) => write!(f, "non-simplicial cone {c}"),
            Violation::UnusedRay(i) => write!(f, "ray {i} lies in no maximal cone"),
            Violation::Incomplete { face, cones } => {
                write!(f, "incomplete: face {face:?} on {cones} cone(s)")
            }
            Violation::Overlap(s) => write!(f, "cones do not tile space: {s}"),
            Violation::NonProjective => write!(f, "non-projective: no strictly convex support function"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidFan(msgs.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// Random directions used by the point-location sweep.
    pub samples: usize,
    pub seed: u64,
    pub check_projective: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            samples: 512,
            seed: 0x5eed_7e8c,
            check_projective: true,
        }
    }
}

impl StackyFan {
    /// Builds a fan, sorting the ray indices inside each cone. No geometric
    /// validation happens here; see [`validate`].
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, mult: Vec<i64>, max_cones: Vec<Vec<usize>>) -> Self {
        let max_cones = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        StackyFan {
            dim,
            rays,
            mult,
            max_cones,
        }
    }

    /// Same fan with every multiplicity set to 1.
    pub fn with_unit_mult(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        let mult = vec![1; rays.len()];
        Self::new(dim, rays, mult, max_cones)
    }

    /// The fan of a point.
    pub fn point() -> Self {
        StackyFan {
            dim: 0,
            rays: Vec::new(),
            mult: Vec::new(),
            max_cones: vec![Vec::new()],
        }
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn picard_rank(&self) -> usize {
        self.rays.len().saturating_sub(self.dim)
    }

    /// The stacky vector `r_i v_i`.
    pub fn stacky_ray(&self, i: usize) -> Vec<i64> {
        self.rays[i].iter().map(|x| x * self.mult[i]).collect()
    }

    pub fn is_face(&self, s: &[usize]) -> bool {
        self.max_cones.iter().any(|c| s.iter().all(|i| c.contains(i)))
    }

    pub fn cones_containing<'a>(&'a self, s: &'a [usize]) -> impl Iterator<Item = &'a Vec<usize>> + 'a {
        self.max_cones.iter().filter(move |c| s.iter().all(|i| c.contains(i)))
    }

    /// Rays outside `s` that share a maximal cone with `s`, ascending.
    pub fn adjacent_rays(&self, s: &[usize]) -> Vec<usize> {
        let mut adj = BTreeSet::new();
        for c in self.cones_containing(s) {
            adj.extend(c.iter().copied().filter(|i| !s.contains(i)));
        }
        adj.into_iter().collect()
    }

    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.dim, &self.rays)
    }

    /// Every face of every maximal cone (including the empty face), as
    /// sorted index lists.
    pub fn all_faces(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for c in &self.max_cones {
            let k = c.len();
            for mask in 0u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| c[b]).collect();
                out.insert(face);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        crate::io::fan_to_json(self)
    }
}

pub fn validate(fan: &StackyFan) -> Diagnostics {
    validate_with(fan, &ValidateOptions::default())
}

pub fn validate_with(fan: &StackyFan, opts: &ValidateOptions) -> Diagnostics {
    let mut v = Vec::new();
    let n = fan.dim;
    if fan.mult.len() != fan.rays.len() {
        v.push(Violation::Shape(format!(
            "{} rays but {} multiplicities",
            fan.rays.len(),
            fan.mult.len()
        )));
        return Diagnostics { violations: v };
    }
    if fan.max_cones.is_empty() {
        v.push(Violation::Shape("no maximal cones".into()));
        return Diagnostics { violations: v };
    }
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != n {
            v.push(Violation::Shape(format!(
                "ray {i} has length {} in dimension {n}",
                r.len()
            )));
            return Diagnostics { violations: v };
        }
    }
    for (c, cone) in fan.max_cones.iter().enumerate() {
        if cone.len() != n || cone.iter().any(|&i| i >= fan.rays.len()) {
            v.push(Violation::Shape(format!(
                "cone {c} = {cone:?} is not a set of {n} ray indices"
            )));
            return Diagnostics { violations: v };
        }
        if cone.windows(2).any(|w| w[0] == w[1]) {
            v.push(Violation::Shape(format!("cone {c} repeats a ray")));
            return Diagnostics { violations: v };
        }
    }

    for (i, r) in fan.rays.iter().enumerate() {
        if lattice::gcd_slice(r) != 1 {
            v.push(Violation::NonPrimitiveRay(i));
        }
        if fan.mult[i] < 1 {
            v.push(Violation::BadMultiplicity(i));
        }
        for j in 0..i {
            if fan.rays[j] == *r {
                v.push(Violation::DuplicateRay(j, i));
            }
        }
    }
    let mut simplicial = true;
    for (c, cone) in fan.max_cones.iter().enumerate() {
        let cols: Vec<Vec<i64>> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        if lattice::determinant(&IntMatrix::from_columns(n, &cols)).is_zero() {
            v.push(Violation::NonSimplicialCone(c));
            simplicial = false;
        }
    }
    let used: BTreeSet<usize> = fan.max_cones.iter().flatten().copied().collect();
    for i in 0..fan.rays.len() {
        if !used.contains(&i) {
            v.push(Violation::UnusedRay(i));
        }
    }

    let mut complete = true;
    for (face, count) in codim_one_faces(fan) {
        if count != 2 {
            v.push(Violation::Incomplete { face, cones: count });
            complete = false;
        }
    }
    if simplicial && n > 0 {
        if let Err(msg) = point_location_sweep(fan, opts.samples, opts.seed) {
            v.push(Violation::Overlap(msg));
            complete = false;
        }
    }
    if opts.check_projective && v.is_empty() && complete && ample_certificate(fan).is_none() {
        v.push(Violation::NonProjective);
    }
    Diagnostics { violations: v }
}

/// Each `(n-1)`-subset of a maximal cone with the number of maximal cones
/// containing it.
fn codim_one_faces(fan: &StackyFan) -> BTreeMap<Vec<usize>, usize> {
    let mut faces: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    if fan.dim == 0 {
        return faces;
    }
    for c in &fan.max_cones {
        for skip in 0..c.len() {
            let face: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &i)| i)
                .collect();
            *faces.entry(face).or_insert(0) += 1;
        }
    }
    faces
}

/// Inverse data of a simplicial cone: `adj * x / det` gives the coordinates
/// of `x` in the cone's ray basis.
struct ConeLocator {
    adj: Vec<Vec<i128>>,
    det_sign: i128,
}

impl ConeLocator {
    fn new(fan: &StackyFan, cone: &[usize]) -> Self {
        let n = fan.dim;
        let cols: Vec<Vec<i64>> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        let b = IntMatrix::from_columns(n, &cols);
        let det = lattice::determinant(&b);
        let mut adj = vec![vec![0i128; n]; n];
        for r in 0..n {
            for c in 0..n {
                // adj[r][c] = (-1)^(r+c) * minor(c, r)
                let minor_rows: Vec<Vec<i64>> = (0..n)
                    .filter(|&i| i != c)
                    .map(|i| {
                        (0..n)
                            .filter(|&j| j != r)
                            .map(|j| b[(i, j)].to_i64().expect("small ray entries"))
                            .collect()
                    })
                    .collect();
                let m = if n == 1 {
                    BigInt::one()
                } else {
                    lattice::determinant(&IntMatrix::from_rows(n - 1, &minor_rows))
                };
                let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
                adj[r][c] = sign * m.to_i128().expect("small minors");
            }
        }
        ConeLocator {
            adj,
            det_sign: if det.is_positive() { 1 } else { -1 },
        }
    }

    /// `Some(true)` strictly inside, `Some(false)` strictly outside,
    /// `None` on the boundary.
    fn locate(&self, x: &[i128]) -> Option<bool> {
        let mut on_boundary = false;
        for row in &self.adj {
            let s: i128 = row.iter().zip(x).map(|(a, b)| a * b).sum::<i128>() * self.det_sign;
            if s < 0 {
                return Some(false);
            }
            if s == 0 {
                on_boundary = true;
            }
        }
        if on_boundary {
            None
        } else {
            Some(true)
        }
    }
}

fn point_location_sweep(fan: &StackyFan, samples: usize, seed: u64) -> std::result::Result<(), String> {
    let locators: Vec<ConeLocator> = fan.max_cones.iter().map(|c| ConeLocator::new(fan, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < samples && attempts < samples * 20 {
        attempts += 1;
        let x: Vec<i128> = (0..fan.dim)
            .map(|_| rng.gen_range(-1_000_000i128..=1_000_000))
            .collect();
        if x.iter().all(|c| *c == 0) {
            continue;
        }
        let mut inside = 0;
        let mut boundary = false;
        for loc in &locators {
            match loc.locate(&x) {
                Some(true) => inside += 1,
                Some(false) => {}
                None => boundary = true,
            }
        }
        if boundary {
            continue;
        }
        if inside != 1 {
            return Err(format!("direction {x:?} lies in {inside} maximal cones"));
        }
        tested += 1;
    }
    Ok(())
}

/// Primitive integer relation among the `n + 1` rays around a wall, signed
/// so that the two side rays have positive coefficients. Entries are
/// aligned with `wall_rays` followed by `side_a`, `side_b`.
pub fn wall_kernel(fan: &StackyFan, wall: &Wall) -> Result<Vec<i64>> {
    let mut idx = wall.wall_rays.clone();
    idx.push(wall.side_a);
    idx.push(wall.side_b);
    let cols: Vec<Vec<i64>> = idx.iter().map(|&i| fan.rays[i].clone()).collect();
    let ker = lattice::kernel_basis(&IntMatrix::from_columns(fan.dim, &cols));
    if ker.len() != 1 {
        return Err(Error::DegenerateRelation(format!(
            "wall {:?} has a {}-dimensional relation space",
            wall.wall_rays,
            ker.len()
        )));
    }
    let mut a = lattice::to_i64_vec(&ker[0])?;
    let k = a.len();
    if a[k - 2] == 0 || a[k - 1] == 0 || (a[k - 2] > 0) != (a[k - 1] > 0) {
        return Err(Error::DegenerateRelation(format!(
            "side rays of wall {:?} do not share a sign",
            wall.wall_rays
        )));
    }
    if a[k - 2] < 0 {
        a.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(a)
}

/// Relation vector of a wall embedded in `Z^{#rays}`.
pub fn embedded_wall_relation(fan: &StackyFan, wall: &Wall) -> Result<Vec<i64>> {
    let a = wall_kernel(fan, wall)?;
    let mut out = vec![0; fan.n_rays()];
    let mut idx = wall.wall_rays.clone();
    idx.push(wall.side_a);
    idx.push(wall.side_b);
    for (&i, &x) in idx.iter().zip(&a) {
        out[i] = x;
    }
    Ok(out)
}

pub fn walls(fan: &StackyFan) -> Result<Vec<Wall>> {
    let mut sides: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    if fan.dim == 0 {
        return Ok(Vec::new());
    }
    for c in &fan.max_cones {
        for skip in 0..c.len() {
            let face: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &i)| i)
                .collect();
            sides.entry(face).or_default().push(c[skip]);
        }
    }
    let mut out = Vec::with_capacity(sides.len());
    for (face, s) in sides {
        if s.len() != 2 {
            return Err(Error::Incomplete(format!(
                "face {face:?} lies on {} maximal cone(s)",
                s.len()
            )));
        }
        let (a, b) = (s[0].min(s[1]), s[0].max(s[1]));
        out.push(Wall {
            wall_rays: face,
            side_a: a,
            side_b: b,
        });
    }
    Ok(out)
}

/// A rational support function value on each ray that is strictly convex
/// across every wall, i.e. an ample class. `None` if the fan is not
/// projective.
pub fn ample_certificate(fan: &StackyFan) -> Option<Vec<BigRational>> {
    let ws = walls(fan).ok()?;
    if ws.is_empty() {
        return Some(vec![BigRational::zero(); fan.n_rays()]);
    }
    let mut a = Vec::with_capacity(ws.len());
    for w in &ws {
        let rel = embedded_wall_relation(fan, w).ok()?;
        a.push(rel.iter().map(|x| BigRational::from_integer((*x).into())).collect());
    }
    let b = vec![BigRational::one(); ws.len()];
    lp::free_solution_geq(&a, &b)
}

/// The stacky fan of a closed torus-invariant stratum.
#[derive(Clone, Debug)]
pub struct StarFan {
    pub fan: StackyFan,
    pub stratum: Vec<usize>,
    /// Ambient indices of the star rays, in star order.
    pub adjacent: Vec<usize>,
    /// `image(v_j) = t_j * vbar_j` for each adjacent ray.
    pub t: Vec<i64>,
    /// Projection `N -> N / (span(S) ∩ N)`.
    pub proj: IntMatrix,
}

impl StarFan {
    /// Star index and `t_j` of an ambient ray, if it is adjacent.
    pub fn ray_map(&self, j: usize) -> Option<(usize, i64)> {
        self.adjacent.iter().position(|&a| a == j).map(|k| (k, self.t[k]))
    }
}

pub fn star_fan(fan: &StackyFan, stratum: &[usize]) -> Result<StarFan> {
    let mut s = stratum.to_vec();
    s.sort_unstable();
    s.dedup();
    if !fan.is_face(&s) {
        return Err(Error::NotAFace(s));
    }
    let gens: Vec<Vec<i64>> = s.iter().map(|&i| fan.rays[i].clone()).collect();
    let q = lattice::quotient_projection(fan.dim, &gens);
    let adjacent = fan.adjacent_rays(&s);
    let mut rays = Vec::with_capacity(adjacent.len());
    let mut t = Vec::with_capacity(adjacent.len());
    let mut mult = Vec::with_capacity(adjacent.len());
    for &j in &adjacent {
        let img = lattice::to_i64_vec(&q.proj.mul_vec_i64(&fan.rays[j]))?;
        let g = lattice::gcd_slice(&img);
        if g == 0 {
            return Err(Error::InvalidFan(format!(
                "adjacent ray {j} maps to zero in the star of {s:?}"
            )));
        }
        rays.push(img.iter().map(|x| x / g).collect::<Vec<_>>());
        t.push(g);
        mult.push(fan.mult[j] * g);
    }
    let mut cones = BTreeSet::new();
    for c in fan.cones_containing(&s) {
        let mut img: Vec<usize> = c
            .iter()
            .filter(|i| !s.contains(i))
            .map(|i| adjacent.iter().position(|a| a == i).expect("adjacent"))
            .collect();
        img.sort_unstable();
        cones.insert(img);
    }
    let dfan = StackyFan::new(fan.dim - s.len(), rays, mult, cones.into_iter().collect());
    Ok(StarFan {
        fan: dfan,
        stratum: s,
        adjacent,
        t,
        proj: q.proj,
    })
}

/// Rank of the Grothendieck group: the number of stacky points, i.e. the
/// sum over maximal cones of `[Z^n : <r_i v_i>]`.
pub fn k0_rank(fan: &StackyFan) -> u64 {
    fan.max_cones
        .iter()
        .map(|c| {
            if c.is_empty() {
                return 1;
            }
            let cols: Vec<Vec<i64>> = c.iter().map(|&i| fan.stacky_ray(i)).collect();
            lattice::determinant(&IntMatrix::from_columns(fan.dim, &cols))
                .abs()
                .to_u64()
                .expect("cone index fits in u64")
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn p2_is_valid() {
        assert!(validate(&builtin::p2()).is_ok());
    }

    #[test]
    fn non_primitive_ray_is_reported() {
        let mut f = builtin::p2();
        f.rays[0] = vec![2, 0];
        let d = validate(&f);
        assert!(d.violations.contains(&Violation::NonPrimitiveRay(0)));
        assert!(d.violations.iter().any(|v| v.to_string() == "non-primitive ray 0"));
    }

    #[test]
    fn missing_cone_is_incomplete() {
        let mut f = builtin::p2();
        f.max_cones.retain(|c| c != &vec![0, 1]);
        let d = validate(&f);
        assert!(d
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Incomplete { face, cones: 1 } if face == &vec![0])));
    }

    #[test]
    fn overlapping_cones_fail_the_sweep() {
        // Every codim-one face is on two cones, but the cones wind twice.
        let rays = vec![
            vec![1, 0],
            vec![0, 1],
            vec![-1, 0],
            vec![0, -1],
            vec![1, 1],
            vec![-1, -1],
        ];
        let f = StackyFan::with_unit_mult(
            2,
            rays,
            vec![vec![0, 4], vec![4, 1], vec![1, 2], vec![2, 5], vec![5, 3], vec![3, 0]],
        );
        assert!(validate(&f).is_ok());
        let wound = StackyFan::with_unit_mult(
            2,
            vec![
                vec![1, 0],
                vec![-1, 1],
                vec![-1, -2],
                vec![1, 1],
                vec![-1, 0],
                vec![1, -2],
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5], vec![5, 0]],
        );
        let d = validate(&wound);
        assert!(d.violations.iter().any(|v| matches!(v, Violation::Overlap(_))), "{d:?}");
    }

    #[test]
    fn bad_multiplicity() {
        let mut f = builtin::p1();
        f.mult[1] = 0;
        assert!(validate(&f).violations.contains(&Violation::BadMultiplicity(1)));
    }

    #[test]
    fn wall_counts() {
        assert_eq!(walls(&builtin::p2()).unwrap().len(), 3);
        assert_eq!(walls(&builtin::p1xp1()).unwrap().len(), 4);
        let w = walls(&builtin::p1()).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].wall_rays.is_empty());
    }

    #[test]
    fn star_of_f1_negative_curve() {
        let s = star_fan(&builtin::f1(), &[2]).unwrap();
        assert_eq!(s.fan.dim, 1);
        assert_eq!(s.adjacent, vec![1, 3]);
        assert_eq!(s.t, vec![1, 1]);
        assert_eq!(s.fan.mult, vec![1, 1]);
        let mut r: Vec<i64> = s.fan.rays.iter().map(|v| v[0]).collect();
        r.sort();
        assert_eq!(r, vec![-1, 1]);
        assert!(validate(&s.fan).is_ok());
    }

    #[test]
    fn star_of_p2() {
        let s = star_fan(&builtin::p2(), &[2]).unwrap();
        assert_eq!(s.t, vec![1, 1]);
        assert!(validate(&s.fan).is_ok());
    }

    #[test]
    fn star_of_p112_weighted_vertex() {
        let s = star_fan(&builtin::p112(), &[2]).unwrap();
        assert_eq!(s.adjacent, vec![0, 1]);
        assert_eq!(s.t, vec![2, 1]);
        assert_eq!(s.fan.mult, vec![2, 1]);
    }

    #[test]
    fn star_of_non_face_fails() {
        assert!(matches!(star_fan(&builtin::f1(), &[0, 2]), Err(Error::NotAFace(_))));
    }

    #[test]
    fn star_of_maximal_cone_is_point() {
        let s = star_fan(&builtin::p2(), &[0, 1]).unwrap();
        assert_eq!(s.fan, StackyFan::point());
    }

    #[test]
    fn k0_ranks() {
        assert_eq!(k0_rank(&builtin::p2()), 3);
        assert_eq!(k0_rank(&builtin::p112()), 4);
        assert_eq!(k0_rank(&builtin::p1r2()), 3);
        assert_eq!(k0_rank(&StackyFan::point()), 1);
    }

    #[test]
    fn builtins_are_projective() {
        for (name, fan) in builtin::all() {
            assert!(validate(&fan).is_ok(), "{name}: {:?}", validate(&fan));
        }
    }
}
