//! The toric minimal model program on stacky fans: wall relations,
//! extremal `K+B`-negative classes, contractions and flips.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::divisors::{rational, Rational};
use crate::error::{Error, Result};
use crate::fan::{self, StackyFan, StarFan, Wall};
use crate::lattice::{self, IntMatrix};
use crate::lp;

pub const DEFAULT_FLIP_GUARD: usize = 1000;

/// `sum a_i v_i = 0` over the rays of two adjacent maximal cones, ordered
/// positives, then zeros, then negatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    pub involved: Vec<usize>,
    pub a: Vec<i64>,
    /// Multiplicities of the involved rays.
    pub r: Vec<i64>,
    /// Number of positive coefficients.
    pub alpha: usize,
    /// Number of nonnegative coefficients.
    pub beta: usize,
    /// `sum a_i / r_i`; positive when the wall curve is `K+B`-negative.
    pub deg_kb: Rational,
}

impl WallRelation {
    fn from_pairs(mut pairs: Vec<(usize, i64)>, fan: &StackyFan) -> Self {
        pairs.sort_by_key(|&(i, a)| {
            let group = if a > 0 {
                0
            } else if a == 0 {
                1
            } else {
                2
            };
            (group, i)
        });
        let involved: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let a: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        let r: Vec<i64> = involved.iter().map(|&i| fan.mult[i]).collect();
        let alpha = a.iter().filter(|x| **x > 0).count();
        let beta = a.iter().filter(|x| **x >= 0).count();
        let deg_kb = a
            .iter()
            .zip(&r)
            .fold(Rational::zero(), |acc, (a, r)| acc + rational(*a, *r));
        WallRelation {
            involved,
            a,
            r,
            alpha,
            beta,
            deg_kb,
        }
    }

    pub fn embedded(&self, n_rays: usize) -> Vec<i64> {
        let mut v = vec![0; n_rays];
        for (&i, &a) in self.involved.iter().zip(&self.a) {
            v[i] = a;
        }
        v
    }

    pub fn positives(&self) -> &[usize] {
        &self.involved[..self.alpha]
    }

    pub fn zeros(&self) -> &[usize] {
        &self.involved[self.alpha..self.beta]
    }

    pub fn negatives(&self) -> &[usize] {
        &self.involved[self.beta..]
    }

    pub fn coefficient(&self, ray: usize) -> i64 {
        self.involved.iter().position(|&i| i == ray).map_or(0, |p| self.a[p])
    }

    /// Dropping any single nonzero coefficient leaves coprime integers.
    pub fn is_well_prepared(&self) -> bool {
        let nz: Vec<i64> = self.a.iter().copied().filter(|x| *x != 0).collect();
        (0..nz.len()).all(|skip| {
            nz.iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .fold(0i64, |g, (_, x)| g.gcd(x))
                == 1
        })
    }

    /// `sum a_i v_i = 0` and the coefficients are coprime.
    pub fn is_exact_relation(&self, fan: &StackyFan) -> bool {
        let sum_zero = (0..fan.dim).all(|j| {
            self.involved
                .iter()
                .zip(&self.a)
                .map(|(&i, &a)| a * fan.rays[i][j])
                .sum::<i64>()
                == 0
        });
        sum_zero && self.a.iter().fold(0i64, |g, x| g.gcd(x)) == 1
    }
}

pub fn wall_relation(fan: &StackyFan, wall: &Wall) -> Result<WallRelation> {
    let a = fan::wall_kernel(fan, wall)?;
    let mut idx = wall.wall_rays.clone();
    idx.push(wall.side_a);
    idx.push(wall.side_b);
    let rel = WallRelation::from_pairs(idx.into_iter().zip(a).collect(), fan);
    debug_assert!(rel.is_exact_relation(fan));
    if !rel.is_well_prepared() {
        return Err(Error::DegenerateRelation(format!(
            "relation {:?} on rays {:?} is not well prepared",
            rel.a, rel.involved
        )));
    }
    Ok(rel)
}

/// The unique relation among all rays of a Picard-rank-one fan, in ray
/// index order.
pub fn fano_relation(fan: &StackyFan) -> Result<WallRelation> {
    if fan.picard_rank() != 1 {
        return Err(Error::Precondition(format!(
            "Picard rank is {}, expected 1",
            fan.picard_rank()
        )));
    }
    let ker = lattice::kernel_basis(&fan.ray_matrix());
    if ker.len() != 1 {
        return Err(Error::DegenerateRelation(
            "ray matrix kernel is not one-dimensional".into(),
        ));
    }
    let mut a = lattice::to_i64_vec(&ker[0])?;
    if a[0] < 0 {
        a.iter_mut().for_each(|x| *x = -*x);
    }
    if a.iter().any(|x| *x <= 0) {
        return Err(Error::InvalidFan("Picard-rank-one fan relation is not positive".into()));
    }
    let pairs: Vec<(usize, i64)> = a.into_iter().enumerate().collect();
    let mut rel = WallRelation::from_pairs(pairs, fan);
    rel.alpha = rel.involved.len();
    rel.beta = rel.involved.len();
    Ok(rel)
}

/// A curve class spanned by walls, with the walls realizing it.
#[derive(Clone, Debug)]
pub struct ExtremalClass {
    pub class: Vec<i64>,
    pub walls: Vec<(Wall, WallRelation)>,
}

impl ExtremalClass {
    pub fn relation(&self) -> &WallRelation {
        &self.walls[0].1
    }
}

/// All wall classes grouped by proportionality.
pub fn wall_classes(fan: &StackyFan) -> Result<Vec<ExtremalClass>> {
    let mut classes: Vec<ExtremalClass> = Vec::new();
    for w in fan::walls(fan)? {
        let rel = wall_relation(fan, &w)?;
        let v = rel.embedded(fan.n_rays());
        match classes.iter_mut().find(|c| c.class == v) {
            Some(c) => c.walls.push((w, rel)),
            None => classes.push(ExtremalClass {
                class: v,
                walls: vec![(w, rel)],
            }),
        }
    }
    classes.sort_by(|a, b| a.class.cmp(&b.class));
    Ok(classes)
}

/// Extremal `K+B`-negative classes, lexicographically ordered.
pub fn extremal_negative_walls(fan: &StackyFan) -> Result<Vec<ExtremalClass>> {
    let classes = wall_classes(fan)?;
    let mut out = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        if !c.relation().deg_kb.is_positive() {
            continue;
        }
        let others: Vec<&Vec<i64>> = classes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != ci)
            .map(|(_, o)| &o.class)
            .collect();
        if !is_nonnegative_combination(&c.class, &others) {
            out.push(c.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::MinimalModelReached);
    }
    Ok(out)
}

fn is_nonnegative_combination(target: &[i64], gens: &[&Vec<i64>]) -> bool {
    if gens.is_empty() {
        return target.iter().all(|x| *x == 0);
    }
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let a: Vec<Vec<BigRational>> = (0..target.len())
        .map(|row| gens.iter().map(|g| q(g[row])).collect())
        .collect();
    let b: Vec<BigRational> = target.iter().map(|x| q(*x)).collect();
    lp::nonnegative_solution(&a, &b).is_some()
}

/// The base of a fibration whose fiber rays are given.
#[derive(Clone, Debug)]
pub struct FiberData {
    pub fiber_rays: Vec<usize>,
    pub base: StackyFan,
    pub proj: IntMatrix,
    /// `h(v_j) = s_j * vbar_j` for every non-fiber ray, `0` on fiber rays.
    pub s: Vec<i64>,
    /// Base ray of each non-fiber ray.
    pub ray_map: Vec<Option<usize>>,
}

impl FiberData {
    /// Reduced pullback: each base coefficient lands on every ray over it.
    pub fn pullback(&self, c: &[i64]) -> Vec<i64> {
        self.ray_map.iter().map(|b| b.map_or(0, |b| c[b])).collect()
    }

    /// `sum_{j over b} e_j` for every base ray `b`.
    pub fn pulled_back_rays(&self) -> Vec<Vec<i64>> {
        (0..self.base.n_rays())
            .map(|b| {
                let mut e = vec![0; self.base.n_rays()];
                e[b] = 1;
                self.pullback(&e)
            })
            .collect()
    }
}

pub fn mori_fiber_base(fan: &StackyFan, fiber_rays: &[usize]) -> Result<FiberData> {
    let gens: Vec<Vec<i64>> = fiber_rays.iter().map(|&i| fan.rays[i].clone()).collect();
    let q = lattice::quotient_projection(fan.dim, &gens);
    let base_dim = q.proj.rows();
    let mut base_rays: Vec<Vec<i64>> = Vec::new();
    let mut base_mult: Vec<i64> = Vec::new();
    let mut s = vec![0; fan.n_rays()];
    let mut ray_map = vec![None; fan.n_rays()];
    for j in 0..fan.n_rays() {
        if fiber_rays.contains(&j) {
            continue;
        }
        let img = lattice::to_i64_vec(&q.proj.mul_vec_i64(&fan.rays[j]))?;
        let g = lattice::gcd_slice(&img);
        if g == 0 {
            return Err(Error::Precondition(format!(
                "ray {j} lies in the span of the fiber rays"
            )));
        }
        let prim: Vec<i64> = img.iter().map(|x| x / g).collect();
        let m = fan.mult[j] * g;
        let b = match base_rays.iter().position(|r| *r == prim) {
            Some(b) => {
                if base_mult[b] != m {
                    return Err(Error::BoundaryConflict {
                        base_ray: b,
                        detail: format!("preimages give multiplicities {} and {m}", base_mult[b]),
                    });
                }
                b
            }
            None => {
                base_rays.push(prim);
                base_mult.push(m);
                base_rays.len() - 1
            }
        };
        s[j] = g;
        ray_map[j] = Some(b);
    }
    let mut cones = BTreeSet::new();
    for c in &fan.max_cones {
        let img: BTreeSet<usize> = c.iter().filter_map(|&j| ray_map[j]).collect();
        let non_fiber = c.iter().filter(|j| ray_map[**j].is_some()).count();
        if img.len() != base_dim || non_fiber != base_dim {
            return Err(Error::Precondition(format!(
                "cone {c:?} does not map onto a maximal cone of the base"
            )));
        }
        cones.insert(img.into_iter().collect::<Vec<_>>());
    }
    let base = StackyFan::new(base_dim, base_rays, base_mult, cones.into_iter().collect());
    Ok(FiberData {
        fiber_rays: fiber_rays.to_vec(),
        base,
        proj: q.proj,
        s,
        ray_map,
    })
}

/// The stratum `D = V(negatives)` with its induced fibration.
#[derive(Clone, Debug)]
pub struct StratumData {
    pub star: StarFan,
    /// The induced relation on the star rays.
    pub abar: Vec<i64>,
    /// `gcd(a_i t_i)` over the positive rays.
    pub t: i64,
    pub fiber: FiberData,
}

#[derive(Clone, Debug)]
pub enum StepKind {
    Fano {
        rel: WallRelation,
    },
    MoriFiber {
        rel: WallRelation,
        fiber: FiberData,
    },
    Divisorial {
        rel: WallRelation,
        target: StackyFan,
        contracted_ray: usize,
        /// Ray of the target for each source ray.
        ray_map: Vec<Option<usize>>,
        stratum: StratumData,
    },
    Flip {
        rel: WallRelation,
        target: StackyFan,
        stratum: StratumData,
    },
}

#[derive(Clone, Debug)]
pub struct MmpStep {
    pub source: StackyFan,
    pub class: Vec<i64>,
    pub walls: Vec<Wall>,
    pub kind: StepKind,
}

impl MmpStep {
    pub fn relation(&self) -> &WallRelation {
        match &self.kind {
            StepKind::Fano { rel }
            | StepKind::MoriFiber { rel, .. }
            | StepKind::Divisorial { rel, .. }
            | StepKind::Flip { rel, .. } => rel,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StepKind::Fano { .. } => "fano",
            StepKind::MoriFiber { .. } => "mori-fiber",
            StepKind::Divisorial { .. } => "divisorial",
            StepKind::Flip { .. } => "flip",
        }
    }

    /// The fan the program continues on, if any.
    pub fn next_fan(&self) -> Option<&StackyFan> {
        match &self.kind {
            StepKind::Fano { .. } => None,
            StepKind::MoriFiber { fiber, .. } => Some(&fiber.base),
            StepKind::Divisorial { target, .. } | StepKind::Flip { target, .. } => Some(target),
        }
    }
}

pub fn fano_step(fan: &StackyFan) -> Result<MmpStep> {
    let rel = fano_relation(fan)?;
    Ok(MmpStep {
        source: fan.clone(),
        class: rel.embedded(fan.n_rays()),
        walls: fan::walls(fan)?,
        kind: StepKind::Fano { rel },
    })
}

pub fn perform_step(fan: &StackyFan, class: &ExtremalClass) -> Result<MmpStep> {
    let rel = class.relation().clone();
    let walls: Vec<Wall> = class.walls.iter().map(|(w, _)| w.clone()).collect();
    let n = fan.dim;
    let kind = if rel.beta == n + 1 {
        let fiber = mori_fiber_base(fan, rel.positives())?;
        fan::validate(&fiber.base)
            .into_result()
            .map_err(|e| Error::Surgery(format!("Mori fiber base: {e}")))?;
        StepKind::MoriFiber { rel, fiber }
    } else {
        let cones = surgery(fan, class)?;
        let stratum = stratum_data(fan, &rel)?;
        if rel.beta == n {
            let e = rel.negatives()[0];
            let ray_map: Vec<Option<usize>> = (0..fan.n_rays())
                .map(|i| match i.cmp(&e) {
                    std::cmp::Ordering::Less => Some(i),
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Greater => Some(i - 1),
                })
                .collect();
            let mut new_cones = Vec::with_capacity(cones.len());
            for c in cones {
                if c.contains(&e) {
                    return Err(Error::Surgery(format!(
                        "cone {c:?} still contains the contracted ray {e}"
                    )));
                }
                new_cones.push(c.iter().map(|&i| ray_map[i].expect("surviving ray")).collect());
            }
            let rays = (0..fan.n_rays())
                .filter(|&i| i != e)
                .map(|i| fan.rays[i].clone())
                .collect();
            let mult = (0..fan.n_rays()).filter(|&i| i != e).map(|i| fan.mult[i]).collect();
            let target = StackyFan::new(n, rays, mult, new_cones);
            check_surgered(&target)?;
            StepKind::Divisorial {
                rel,
                target,
                contracted_ray: e,
                ray_map,
                stratum,
            }
        } else {
            let target = StackyFan::new(n, fan.rays.clone(), fan.mult.clone(), cones);
            check_surgered(&target)?;
            StepKind::Flip { rel, target, stratum }
        }
    };
    Ok(MmpStep {
        source: fan.clone(),
        class: class.class.clone(),
        walls,
        kind,
    })
}

fn check_surgered(fan: &StackyFan) -> Result<()> {
    fan::validate(fan)
        .into_result()
        .map_err(|e| Error::Surgery(e.to_string()))
}

/// Replaces, around every wall of the class, the cones omitting one
/// positive ray by the cones omitting one negative ray.
fn surgery(fan: &StackyFan, class: &ExtremalClass) -> Result<Vec<Vec<usize>>> {
    let mut cones: BTreeSet<Vec<usize>> = fan.max_cones.iter().cloned().collect();
    let mut added = BTreeSet::new();
    for (_, rel) in &class.walls {
        let omit = |i: usize| {
            let mut c: Vec<usize> = rel.involved.iter().copied().filter(|&j| j != i).collect();
            c.sort_unstable();
            c
        };
        for &i in rel.positives() {
            let c = omit(i);
            if !cones.remove(&c) && !fan.max_cones.contains(&c) {
                return Err(Error::Surgery(format!("expected maximal cone {c:?} is missing")));
            }
        }
        for &j in rel.negatives() {
            added.insert(omit(j));
        }
    }
    cones.extend(added);
    Ok(cones.into_iter().collect())
}

fn stratum_data(fan: &StackyFan, rel: &WallRelation) -> Result<StratumData> {
    let star = fan::star_fan(fan, rel.negatives())?;
    let mut abar = vec![0i64; star.adjacent.len()];
    let mut t = 0i64;
    for (&i, &a) in rel.involved.iter().zip(&rel.a).take(rel.beta) {
        let (k, ti) = star
            .ray_map(i)
            .ok_or_else(|| Error::Surgery(format!("ray {i} is not adjacent to the flipped stratum")))?;
        abar[k] = a * ti;
        t = t.gcd(&(a * ti));
    }
    abar.iter_mut().for_each(|x| *x /= t);
    let fiber_rays: Vec<usize> = rel
        .positives()
        .iter()
        .map(|&i| star.ray_map(i).expect("adjacent").0)
        .collect();
    let fiber = mori_fiber_base(&star.fan, &fiber_rays)?;
    Ok(StratumData { star, abar, t, fiber })
}

#[derive(Clone, Copy, Debug)]
pub struct MmpOptions {
    pub flip_guard: usize,
}

impl Default for MmpOptions {
    fn default() -> Self {
        MmpOptions {
            flip_guard: DEFAULT_FLIP_GUARD,
        }
    }
}

pub fn run_mmp(fan: &StackyFan) -> Result<Vec<MmpStep>> {
    run_mmp_with(fan, &MmpOptions::default())
}

/// Runs the program to a Fano fan of Picard rank one. A fan of dimension
/// zero needs no steps.
pub fn run_mmp_with(fan: &StackyFan, opts: &MmpOptions) -> Result<Vec<MmpStep>> {
    let mut steps = Vec::new();
    let mut current = fan.clone();
    let mut flips = 0;
    loop {
        if current.dim == 0 {
            return Ok(steps);
        }
        let at = steps.len();
        if current.picard_rank() == 1 {
            steps.push(fano_step(&current).map_err(|e| e.at(format!("step {at}")))?);
            return Ok(steps);
        }
        let classes = extremal_negative_walls(&current).map_err(|e| e.at(format!("step {at}")))?;
        let step = perform_step(&current, &classes[0]).map_err(|e| e.at(format!("step {at}")))?;
        if matches!(step.kind, StepKind::Flip { .. }) {
            flips += 1;
            if flips > opts.flip_guard {
                return Err(Error::FlipGuard(opts.flip_guard));
            }
        }
        current = step.next_fan().expect("non-terminal step").clone();
        steps.push(step);
    }
}
