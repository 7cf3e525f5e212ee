//! Pairwise Ext checks certifying that a collection is exceptional.

use serde::Serialize;

use crate::cohomology::{CohomologyTable, ExtContext, ExtVerdict};
use crate::collections::{ExceptionalCollection, Shape};
use crate::error::Result;
use crate::fan::{self, StackyFan};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum PairStatus {
    /// Diagonal pair with `Ext = C` in degree zero.
    Exceptional,
    /// Backward pair with vanishing Ext.
    SemiorthogonalOk,
    /// Forward pair concentrated in degree zero.
    StrongOk,
    /// Forward pair with higher Ext; allowed, but the collection is not strong.
    ForwardOk,
    Violation(String),
    Unchecked(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub status: PairStatus,
    /// `dim Ext^q(E_i, E_j)` when known.
    pub table: Option<CohomologyTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cardinality {
    pub found: usize,
    pub expected: usize,
    /// Only a count: the collection has as many objects as the rank of K_0.
    pub matches_k0_rank: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pairs: usize,
    pub exceptional: usize,
    pub semiorthogonal_ok: usize,
    pub strong_ok: usize,
    pub forward_ok: usize,
    pub violations: usize,
    pub unchecked: usize,
    pub strong: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<PairEntry>,
    pub cardinality: Cardinality,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.summary.violations == 0 && self.summary.unchecked == 0 && self.cardinality.matches_k0_rank
    }

    pub fn has_violations(&self) -> bool {
        self.summary.violations > 0 || !self.cardinality.matches_k0_rank
    }

    pub fn entry(&self, i: usize, j: usize) -> &PairEntry {
        let m = self.cardinality.found;
        &self.entries[i * m + j]
    }

    pub fn human_summary(&self) -> String {
        let s = &self.summary;
        format!(
            "{} objects (K0 rank {}), {} pairs: {} exceptional, {} semiorthogonal, {} strong, {} forward, {} violations, {} unchecked; {}",
            self.cardinality.found,
            self.cardinality.expected,
            s.pairs,
            s.exceptional,
            s.semiorthogonal_ok,
            s.strong_ok,
            s.forward_ok,
            s.violations,
            s.unchecked,
            if s.strong { "strong" } else { "not certified strong" }
        )
    }
}

/// `Ext^*(E_i, E_j)`, or the reason it could not be determined.
fn ext(ctx: &ExtContext, a: &Shape, b: &Shape) -> std::result::Result<CohomologyTable, String> {
    let n = ctx.fan().dim;
    let r: Result<Option<CohomologyTable>> = match (a, b) {
        (Shape::LineBundle { class: x }, Shape::LineBundle { class: y }) => ctx.line_bundles(x, y).map(Some),
        (Shape::LineBundle { class: x }, Shape::Pushforward(p)) => ctx.to_pushforward(x, p).map(Some),
        (Shape::Pushforward(p), Shape::LineBundle { class: y }) => ctx.from_pushforward(p, y).map(Some),
        (Shape::Pushforward(p), Shape::Pushforward(q)) => {
            let mut s1 = p.stratum.clone();
            let mut s2 = q.stratum.clone();
            s1.sort_unstable();
            s2.sort_unstable();
            if s1 != s2 {
                return Err(format!("pushforwards on different strata {s1:?} and {s2:?}"));
            }
            ctx.between_pushforwards(p, q).map(|v| match v {
                ExtVerdict::Indeterminate { .. } => None,
                v => v.table(n),
            })
        }
    };
    match r {
        Ok(Some(t)) => Ok(t),
        Ok(None) => Err("Koszul E1 page has several terms in one total degree".into()),
        Err(e) => Err(format!("computation failed: {e}")),
    }
}

pub fn verify_collection(fan: &StackyFan, coll: &ExceptionalCollection) -> VerificationReport {
    let m = coll.len();
    let expected = fan::k0_rank(fan) as usize;
    let ctx = ExtContext::new(fan);
    let mut entries = Vec::with_capacity(m * m);
    let mut summary = Summary {
        pairs: m * m,
        ..Summary::default()
    };
    for i in 0..m {
        for j in 0..m {
            let result = match &ctx {
                Ok(ctx) => ext(ctx, &coll.objects[i].shape, &coll.objects[j].shape),
                Err(e) => Err(format!("fan rejected: {e}")),
            };
            let (status, table) = match result {
                Err(reason) => (PairStatus::Unchecked(reason), None),
                Ok(t) => {
                    let status = if i == j {
                        if t.is_unit() {
                            PairStatus::Exceptional
                        } else {
                            PairStatus::Violation("endomorphisms are not C in degree 0".into())
                        }
                    } else if i > j {
                        if t.is_zero() {
                            PairStatus::SemiorthogonalOk
                        } else {
                            PairStatus::Violation("nonzero Ext from a later to an earlier object".into())
                        }
                    } else if t.concentrated_in_degree_zero() {
                        PairStatus::StrongOk
                    } else {
                        PairStatus::ForwardOk
                    };
                    (status, Some(t))
                }
            };
            match &status {
                PairStatus::Exceptional => summary.exceptional += 1,
                PairStatus::SemiorthogonalOk => summary.semiorthogonal_ok += 1,
                PairStatus::StrongOk => summary.strong_ok += 1,
                PairStatus::ForwardOk => summary.forward_ok += 1,
                PairStatus::Violation(_) => summary.violations += 1,
                PairStatus::Unchecked(_) => summary.unchecked += 1,
            }
            entries.push(PairEntry { i, j, status, table });
        }
    }
    summary.strong = summary.violations == 0 && summary.unchecked == 0 && summary.forward_ok == 0;
    VerificationReport {
        entries,
        cardinality: Cardinality {
            found: m,
            expected,
            matches_k0_rank: m == expected,
        },
        summary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::collections::build;

    #[test]
    fn p2_is_strong() {
        let f = builtin::p2();
        let r = verify_collection(&f, &build(&f).unwrap());
        assert_eq!(r.summary.pairs, 9);
        assert!(r.is_clean());
        assert!(r.summary.strong);
    }

    #[test]
    fn reordered_p2_is_caught() {
        let f = builtin::p2();
        let mut c = build(&f).unwrap();
        c.objects.swap(1, 2);
        let r = verify_collection(&f, &c);
        assert!(r.summary.violations > 0);
        let bad = r.entry(2, 1);
        assert!(matches!(bad.status, PairStatus::Violation(_)));
        assert_eq!(bad.table.as_ref().unwrap().dims, vec![3, 0, 0]);
    }

    #[test]
    fn f1_has_no_unchecked_pairs() {
        let f = builtin::f1();
        let r = verify_collection(&f, &build(&f).unwrap());
        assert_eq!(r.summary.pairs, 16);
        assert_eq!(r.summary.unchecked, 0);
        assert_eq!(r.summary.violations, 0);
    }
}
