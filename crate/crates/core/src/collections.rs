//! Exceptional collections assembled along a run of the minimal model
//! program.
//!
//! Each step contributes window blocks: a Fano fan gives single line
//! bundles, a Mori fiber space gives twisted pullbacks of the base
//! collection, and a divisorial contraction or flip gives pushforwards from
//! the exceptional stratum followed by the transported collection of the
//! target.

use crate::cohomology::PushforwardDatum;
use crate::divisors::{self, degree_weights, dot, Bound, ClassLattice, DivisorClass, Rational};
use crate::error::{Error, Result};
use crate::fan::{self, StackyFan};
use crate::mmp::{self, FiberData, MmpOptions, MmpStep, StepKind, StratumData, WallRelation};
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    LineBundle { class: DivisorClass },
    Pushforward(PushforwardDatum),
}

impl Shape {
    fn twisted(&self, v: &[i64]) -> Shape {
        match self {
            Shape::LineBundle { class } => Shape::LineBundle {
                class: divisors::add(class, v),
            },
            Shape::Pushforward(p) => Shape::Pushforward(PushforwardDatum {
                stratum: p.stratum.clone(),
                class: p.class.clone(),
                twist: divisors::add(&p.twist, v),
            }),
        }
    }

    pub fn as_line_bundle(&self) -> Option<&DivisorClass> {
        match self {
            Shape::LineBundle { class } => Some(class),
            Shape::Pushforward(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Step labels from the outermost step inwards.
    pub path: Vec<String>,
    /// Window degree of the block the object was created in.
    pub degree: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectionObject {
    pub shape: Shape,
    pub provenance: Provenance,
}

/// A contiguous run of objects from one window class. Twisting the whole
/// run by an element of `retwist` yields another generating set of the
/// same subcategory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub len: usize,
    pub degree: Option<Rational>,
    pub retwist: Vec<DivisorClass>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExceptionalCollection {
    pub objects: Vec<CollectionObject>,
    pub blocks: Vec<Block>,
}

impl ExceptionalCollection {
    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    fn push_block(&mut self, objects: Vec<CollectionObject>, degree: Option<Rational>, retwist: Vec<DivisorClass>) {
        self.blocks.push(Block {
            start: self.objects.len(),
            len: objects.len(),
            degree,
            retwist,
        });
        self.objects.extend(objects);
    }

    fn block_objects(&self, b: &Block) -> &[CollectionObject] {
        &self.objects[b.start..b.start + b.len]
    }

    pub fn pushforward_count(&self) -> usize {
        self.objects
            .iter()
            .filter(|o| matches!(o.shape, Shape::Pushforward(_)))
            .count()
    }
}

fn labelled(path: &[String], label: String) -> Vec<String> {
    let mut p = vec![label];
    p.extend(path.iter().cloned());
    p
}

fn check_cardinality(fan: &StackyFan, coll: &ExceptionalCollection) -> Result<()> {
    let expected = fan::k0_rank(fan) as usize;
    if coll.len() != expected {
        return Err(Error::Cardinality {
            found: coll.len(),
            expected,
        });
    }
    Ok(())
}

pub fn point_collection() -> ExceptionalCollection {
    let mut c = ExceptionalCollection::default();
    c.push_block(
        vec![CollectionObject {
            shape: Shape::LineBundle { class: Vec::new() },
            provenance: Provenance {
                path: vec!["point".into()],
                degree: None,
            },
        }],
        None,
        Vec::new(),
    );
    c
}

/// Line bundles with `0 >= deg > -sum a_i/r_i`, ascending by degree.
pub fn fano_collection(fan: &StackyFan, rel: &WallRelation) -> Result<ExceptionalCollection> {
    let w = degree_weights(rel, fan.n_rays());
    let lo = -rel.deg_kb.clone();
    let classes = ClassLattice::principal(fan).window(&w, (&lo, Bound::Open), (&Rational::zero(), Bound::Closed))?;
    let mut coll = ExceptionalCollection::default();
    for k in classes {
        let d = dot(&w, &k);
        coll.push_block(
            vec![CollectionObject {
                shape: Shape::LineBundle { class: k },
                provenance: Provenance {
                    path: vec![format!("fano window {d}")],
                    degree: Some(d.clone()),
                },
            }],
            Some(d),
            Vec::new(),
        );
    }
    check_cardinality(fan, &coll)?;
    Ok(coll)
}

/// Pullbacks of the base collection twisted by the fiber window classes.
pub fn fiber_collection(
    fan: &StackyFan,
    rel: &WallRelation,
    fiber: &FiberData,
    base: &ExceptionalCollection,
) -> Result<ExceptionalCollection> {
    let base_classes: Vec<&DivisorClass> = base
        .objects
        .iter()
        .map(|o| {
            o.shape
                .as_line_bundle()
                .ok_or_else(|| Error::UnsupportedTransport("Mori fiber base collection contains a pushforward".into()))
        })
        .collect::<Result<_>>()?;
    let lifts = fiber.pulled_back_rays();
    let w = degree_weights(rel, fan.n_rays());
    let lo = -rel.deg_kb.clone();
    let twists = ClassLattice::principal(fan).with_extra(&lifts).window(
        &w,
        (&lo, Bound::Open),
        (&Rational::zero(), Bound::Closed),
    )?;
    let mut coll = ExceptionalCollection::default();
    for k in twists {
        let d = dot(&w, &k);
        let objects = base_classes
            .iter()
            .zip(&base.objects)
            .map(|(c, o)| CollectionObject {
                shape: Shape::LineBundle {
                    class: divisors::add(&fiber.pullback(c), &k),
                },
                provenance: Provenance {
                    path: labelled(&o.provenance.path, format!("fiber window {d}")),
                    degree: Some(d.clone()),
                },
            })
            .collect();
        coll.push_block(objects, Some(d), lifts.clone());
    }
    check_cardinality(fan, &coll)?;
    Ok(coll)
}

/// Pushforward blocks from the stratum `D` with `0 > deg >= -sum a_i/r_i`.
fn stratum_blocks(
    fan: &StackyFan,
    rel: &WallRelation,
    sd: &StratumData,
    f_coll: &ExceptionalCollection,
    label: &str,
) -> Result<ExceptionalCollection> {
    let n_rays = fan.n_rays();
    let star = &sd.star;
    let lift = |star_class: &[i64]| {
        let mut v = vec![0; n_rays];
        for (&j, c) in star.adjacent.iter().zip(star_class) {
            v[j] = *c;
        }
        v
    };
    let mut extra: Vec<Vec<i64>> = (0..n_rays)
        .filter(|j| !star.stratum.contains(j) && !star.adjacent.contains(j))
        .map(|j| {
            let mut e = vec![0; n_rays];
            e[j] = 1;
            e
        })
        .collect();
    extra.extend(sd.fiber.pulled_back_rays().iter().map(|c| lift(c)));
    let w = degree_weights(rel, n_rays);
    let lo = -rel.deg_kb.clone();
    let twists = ClassLattice::principal(fan).with_extra(&extra).window(
        &w,
        (&lo, Bound::Closed),
        (&Rational::zero(), Bound::Open),
    )?;
    let f_classes: Vec<&DivisorClass> = f_coll
        .objects
        .iter()
        .map(|o| {
            o.shape
                .as_line_bundle()
                .ok_or_else(|| Error::UnsupportedTransport("stratum base collection contains a pushforward".into()))
        })
        .collect::<Result<_>>()?;
    let mut coll = ExceptionalCollection::default();
    for k in twists {
        let d = dot(&w, &k);
        let objects = f_classes
            .iter()
            .zip(&f_coll.objects)
            .map(|(c, o)| CollectionObject {
                shape: Shape::Pushforward(PushforwardDatum {
                    stratum: star.stratum.clone(),
                    class: sd.fiber.pullback(c),
                    twist: k.clone(),
                }),
                provenance: Provenance {
                    path: labelled(&o.provenance.path, format!("{label} stratum window {d}")),
                    degree: Some(d.clone()),
                },
            })
            .collect();
        coll.push_block(objects, Some(d), extra.clone());
    }
    Ok(coll)
}

/// The cones containing `stratum` in each fan, after renaming rays of
/// `target` by `to_source`; equal when the surgery left the star alone.
fn star_unchanged(source: &StackyFan, target: &StackyFan, stratum: &[usize], to_source: &[usize]) -> bool {
    let mut a: Vec<Vec<usize>> = source.cones_containing(stratum).cloned().collect();
    let t_stratum: Option<Vec<usize>> = stratum.iter().map(|i| to_source.iter().position(|s| s == i)).collect();
    let Some(t_stratum) = t_stratum else {
        return false;
    };
    let mut b: Vec<Vec<usize>> = target
        .cones_containing(&t_stratum)
        .map(|c| {
            let mut c: Vec<usize> = c.iter().map(|&i| to_source[i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    a.sort();
    b.sort();
    !a.is_empty() && a == b
}

/// Transports a pushforward from the target of a step to its source; only
/// possible when the stratum's star is untouched by the surgery.
fn transport_pushforward(
    source: &StackyFan,
    target: &StackyFan,
    to_source: &[usize],
    p: &PushforwardDatum,
    twist: DivisorClass,
) -> Result<PushforwardDatum> {
    let stratum: Vec<usize> = p.stratum.iter().map(|&i| to_source[i]).collect();
    if !star_unchanged(source, target, &stratum, to_source) {
        return Err(Error::UnsupportedTransport(format!(
            "pushforward from stratum {:?} meets the modified locus",
            p.stratum
        )));
    }
    let mut stratum = stratum;
    stratum.sort_unstable();
    Ok(PushforwardDatum {
        stratum,
        class: p.class.clone(),
        twist,
    })
}

/// `Phi` on line bundle classes of the target of a divisorial contraction.
pub fn divisorial_phi(
    fan: &StackyFan,
    rel: &WallRelation,
    contracted: usize,
    ray_map: &[Option<usize>],
    c: &[i64],
) -> DivisorClass {
    let mut k: Vec<i64> = ray_map.iter().map(|m| m.map_or(0, |y| c[y])).collect();
    let b = -rel.coefficient(contracted);
    let r_e = fan.mult[contracted];
    let s = rel
        .involved
        .iter()
        .zip(&rel.a)
        .zip(&rel.r)
        .filter(|((i, _), _)| **i != contracted)
        .fold(Rational::zero(), |acc, ((&i, &a), &r)| {
            acc + divisors::rational(a * k[i], r)
        });
    let v = s * divisors::rational(r_e, b);
    k[contracted] = v.floor().to_integer().try_into().expect("small coefficient");
    k
}

pub fn divisorial_collection(
    fan: &StackyFan,
    step: &MmpStep,
    y_coll: &ExceptionalCollection,
    f_coll: &ExceptionalCollection,
) -> Result<ExceptionalCollection> {
    let StepKind::Divisorial {
        rel,
        target,
        contracted_ray,
        ray_map,
        stratum,
    } = &step.kind
    else {
        return Err(Error::Precondition("not a divisorial step".into()));
    };
    let mut coll = stratum_blocks(fan, rel, stratum, f_coll, "divisorial")?;
    let to_source: Vec<usize> = (0..fan.n_rays()).filter(|i| i != contracted_ray).collect();
    for b in &y_coll.blocks {
        let objects = y_coll
            .block_objects(b)
            .iter()
            .map(|o| {
                let shape = match &o.shape {
                    Shape::LineBundle { class } => Shape::LineBundle {
                        class: divisorial_phi(fan, rel, *contracted_ray, ray_map, class),
                    },
                    Shape::Pushforward(p) => {
                        let twist = divisorial_phi(fan, rel, *contracted_ray, ray_map, &p.twist);
                        Shape::Pushforward(transport_pushforward(fan, target, &to_source, p, twist)?)
                    }
                };
                Ok(CollectionObject {
                    shape,
                    provenance: Provenance {
                        path: labelled(&o.provenance.path, "divisorial transport".into()),
                        degree: o.provenance.degree.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        coll.push_block(objects, b.degree.clone(), Vec::new());
    }
    check_cardinality(fan, &coll)?;
    Ok(coll)
}

/// Smallest-magnitude integer `s` with `lo <= d + s * delta < hi` for all `d`.
fn fitting_shift(degs: &[Rational], delta: &Rational, lo: &Rational, hi: &Rational) -> Option<i64> {
    if degs.is_empty() {
        return Some(0);
    }
    if delta.is_zero() {
        return degs.iter().all(|d| d >= lo && d < hi).then_some(0);
    }
    let mut s_lo: Option<i64> = None;
    let mut s_hi: Option<i64> = None;
    for d in degs {
        // lo <= d + s delta < hi with delta > 0
        let a = ((lo - d) / delta).ceil().to_integer();
        let b = ((hi - d) / delta).ceil().to_integer() - num_bigint::BigInt::from(1);
        let a: i64 = a.try_into().ok()?;
        let b: i64 = b.try_into().ok()?;
        s_lo = Some(s_lo.map_or(a, |x| x.max(a)));
        s_hi = Some(s_hi.map_or(b, |x| x.min(b)));
    }
    let (a, b) = (s_lo?, s_hi?);
    if a > b {
        return None;
    }
    Some(if a > 0 {
        a
    } else if b < 0 {
        b
    } else {
        0
    })
}

/// A class of the lattice spanned by `gens` whose degree generates the
/// degree image, with that (nonnegative) degree.
fn degree_generator(w: &[Rational], gens: &[Vec<i64>]) -> (Vec<i64>, Rational) {
    let n = w.len();
    let mut best: (Vec<i64>, Rational) = (vec![0; n], Rational::zero());
    for g in gens {
        let dg = dot(w, g);
        if dg.is_zero() {
            continue;
        }
        if best.1.is_zero() {
            best = (g.clone(), dg);
            continue;
        }
        // Extended Euclid on the pair of degrees, scaled to integers.
        let den = best.1.denom() * dg.denom() / num_integer::Integer::gcd(best.1.denom(), dg.denom());
        let x: i64 = (&best.1 * Rational::from_integer(den.clone()))
            .to_integer()
            .try_into()
            .expect("small degree");
        let y: i64 = (&dg * Rational::from_integer(den.clone()))
            .to_integer()
            .try_into()
            .expect("small degree");
        let e = num_integer::Integer::extended_gcd(&x, &y);
        let v: Vec<i64> = best.0.iter().zip(g).map(|(p, q)| e.x * p + e.y * q).collect();
        best = (v, Rational::new(e.gcd.into(), den));
    }
    if best.1.is_negative() {
        best = (divisors::neg(&best.0), -best.1);
    }
    best
}

/// Re-represents the target collection so that every line bundle has flip
/// degree in `[0, sum_{i > beta} b_i / r_i)`, using per-block retwists and
/// a global twist.
fn fit_flip_window(fan: &StackyFan, rel: &WallRelation, coll: &ExceptionalCollection) -> Result<ExceptionalCollection> {
    let w = degree_weights(rel, fan.n_rays());
    let lo = Rational::zero();
    let hi = rel.a[rel.beta..]
        .iter()
        .zip(&rel.r[rel.beta..])
        .fold(Rational::zero(), |acc, (a, r)| acc + divisors::rational(-a, *r));
    let unit: Vec<Vec<i64>> = (0..fan.n_rays())
        .map(|i| {
            let mut e = vec![0; fan.n_rays()];
            e[i] = 1;
            e
        })
        .collect();
    let (g0, gamma) = degree_generator(&w, &unit);
    let block_gens: Vec<(Vec<i64>, Rational)> = coll.blocks.iter().map(|b| degree_generator(&w, &b.retwist)).collect();
    let block_degs: Vec<Vec<Rational>> = coll
        .blocks
        .iter()
        .map(|b| {
            coll.block_objects(b)
                .iter()
                .filter_map(|o| o.shape.as_line_bundle().map(|k| dot(&w, k)))
                .collect()
        })
        .collect();
    const SEARCH: i64 = 256;
    for t in (0..=SEARCH).flat_map(|t| if t == 0 { vec![0] } else { vec![t, -t] }) {
        let g = &gamma * Rational::from_integer(t.into());
        let shifts: Option<Vec<i64>> = block_degs
            .iter()
            .zip(&block_gens)
            .map(|(degs, (_, delta))| {
                let shifted: Vec<Rational> = degs.iter().map(|d| d + &g).collect();
                fitting_shift(&shifted, delta, &lo, &hi)
            })
            .collect();
        let Some(shifts) = shifts else { continue };
        let mut out = ExceptionalCollection::default();
        for ((b, s), (u, _)) in coll.blocks.iter().zip(&shifts).zip(&block_gens) {
            let v: Vec<i64> = g0.iter().zip(u).map(|(a, b)| t * a + s * b).collect();
            let objects = coll
                .block_objects(b)
                .iter()
                .map(|o| CollectionObject {
                    shape: o.shape.twisted(&v),
                    provenance: o.provenance.clone(),
                })
                .collect();
            out.push_block(objects, b.degree.clone(), b.retwist.clone());
        }
        return Ok(out);
    }
    Err(Error::Window(format!(
        "no retwist puts every line bundle in the flip window [0, {hi})"
    )))
}

pub fn flip_collection(
    fan: &StackyFan,
    step: &MmpStep,
    xplus_coll: &ExceptionalCollection,
    f_coll: &ExceptionalCollection,
) -> Result<ExceptionalCollection> {
    let StepKind::Flip { rel, target, stratum } = &step.kind else {
        return Err(Error::Precondition("not a flip step".into()));
    };
    let mut coll = stratum_blocks(fan, rel, stratum, f_coll, "flip")?;
    let fitted = fit_flip_window(fan, rel, xplus_coll)?;
    let identity: Vec<usize> = (0..fan.n_rays()).collect();
    for b in &fitted.blocks {
        let objects = fitted
            .block_objects(b)
            .iter()
            .map(|o| {
                let shape = match &o.shape {
                    Shape::LineBundle { .. } => o.shape.clone(),
                    Shape::Pushforward(p) => {
                        Shape::Pushforward(transport_pushforward(fan, target, &identity, p, p.twist.clone())?)
                    }
                };
                Ok(CollectionObject {
                    shape,
                    provenance: Provenance {
                        path: labelled(&o.provenance.path, "flip transport".into()),
                        degree: o.provenance.degree.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        coll.push_block(objects, b.degree.clone(), b.retwist.clone());
    }
    check_cardinality(fan, &coll)?;
    Ok(coll)
}

pub fn build(fan: &StackyFan) -> Result<ExceptionalCollection> {
    build_with(fan, &MmpOptions::default())
}

pub fn build_with(fan: &StackyFan, opts: &MmpOptions) -> Result<ExceptionalCollection> {
    let steps = mmp::run_mmp_with(fan, opts)?;
    build_from_steps(fan, &steps, opts)
}

/// Folds the collections of a finished run from the last step back to the
/// first.
pub fn build_from_steps(fan: &StackyFan, steps: &[MmpStep], opts: &MmpOptions) -> Result<ExceptionalCollection> {
    if fan.dim == 0 {
        return Ok(point_collection());
    }
    let Some(last) = steps.last() else {
        return Err(Error::Precondition("empty MMP run".into()));
    };
    let at = |i: usize, s: &MmpStep| format!("step {i} ({})", s.name());
    let StepKind::Fano { rel } = &last.kind else {
        return Err(Error::Precondition("MMP run does not end in a Fano step".into()));
    };
    let mut coll = fano_collection(&last.source, rel).map_err(|e| e.at(at(steps.len() - 1, last)))?;
    for (i, step) in steps.iter().enumerate().rev().skip(1) {
        let src = &step.source;
        coll = match &step.kind {
            StepKind::Fano { .. } => unreachable!("Fano steps only end a run"),
            StepKind::MoriFiber { rel, fiber } => fiber_collection(src, rel, fiber, &coll),
            StepKind::Divisorial { stratum, .. } => build_with(&stratum.fiber.base, opts)
                .map_err(|e| e.at("stratum base"))
                .and_then(|f| divisorial_collection(src, step, &coll, &f)),
            StepKind::Flip { stratum, .. } => build_with(&stratum.fiber.base, opts)
                .map_err(|e| e.at("stratum base"))
                .and_then(|f| flip_collection(src, step, &coll, &f)),
        }
        .map_err(|e| e.at(at(i, step)))?;
    }
    Ok(coll)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::divisors::rational;
    use crate::mmp::{fano_relation, run_mmp};

    fn degrees(fan: &StackyFan, coll: &ExceptionalCollection) -> Vec<Rational> {
        let rel = fano_relation(fan).unwrap();
        coll.objects
            .iter()
            .map(|o| divisors::degree(&rel, o.shape.as_line_bundle().unwrap()))
            .collect()
    }

    #[test]
    fn fano_windows() {
        let f = builtin::p2();
        let c = fano_collection(&f, &fano_relation(&f).unwrap()).unwrap();
        assert_eq!(degrees(&f, &c), vec![rational(-2, 1), rational(-1, 1), rational(0, 1)]);
        let f = builtin::p112();
        let c = fano_collection(&f, &fano_relation(&f).unwrap()).unwrap();
        assert_eq!(
            degrees(&f, &c),
            (0..4).rev().map(|d| rational(-d, 1)).collect::<Vec<_>>()
        );
        let f = builtin::p1r2();
        let c = fano_collection(&f, &fano_relation(&f).unwrap()).unwrap();
        assert_eq!(degrees(&f, &c), vec![rational(-1, 1), rational(-1, 2), rational(0, 1)]);
    }

    #[test]
    fn build_sizes() {
        for (name, size) in [("P2", 3), ("F1", 4), ("P1xP1", 4), ("P112", 4), ("P3", 4)] {
            let f = builtin::by_name(name).unwrap();
            assert_eq!(build(&f).unwrap().len(), size, "{name}");
        }
    }

    #[test]
    fn stacky_fiber_example() {
        let mut f = builtin::p1xp1();
        f.mult = vec![1, 2, 1, 1];
        let coll = build(&f).unwrap();
        assert_eq!(coll.len(), 6);
    }

    #[test]
    fn f1_layout() {
        let f = builtin::f1();
        let steps = run_mmp(&f).unwrap();
        assert_eq!(steps[0].name(), "divisorial");
        let coll = build(&f).unwrap();
        assert_eq!(coll.pushforward_count(), 1);
        assert!(matches!(coll.objects[0].shape, Shape::Pushforward(_)));
        assert!(coll.objects[1..].iter().all(|o| o.shape.as_line_bundle().is_some()));
    }

    #[test]
    fn stacky_f1_keeps_every_stratum_twist() {
        let mut f = builtin::f1();
        f.mult[2] = 2;
        let coll = build(&f).unwrap();
        assert_eq!(coll.len(), 6);
        assert_eq!(coll.pushforward_count(), 3);
    }

    #[test]
    fn fitting_shift_prefers_small_moves() {
        let q = |n| rational(n, 1);
        assert_eq!(fitting_shift(&[q(0), q(-1)], &q(1), &q(0), &q(2)), Some(1));
        assert_eq!(fitting_shift(&[q(0), q(1)], &q(1), &q(0), &q(2)), Some(0));
        assert_eq!(fitting_shift(&[q(0), q(2)], &q(1), &q(0), &q(2)), None);
    }
}
