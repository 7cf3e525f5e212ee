use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use texc_core::cohomology::{self, CohomologyEngine};
use texc_core::divisors::{self, ClassLattice};
use texc_core::lattice::{self, HermiteReducer, IntMatrix};
use texc_core::{builtin, io, pipeline, Method, PipelineConfig, StackyFan};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| (Just(c), prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)))
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|x| BigInt::from(*x)).collect()
}

fn two_dim_builtin() -> impl Strategy<Value = StackyFan> {
    prop::sample::select(vec![builtin::p2(), builtin::p1xp1(), builtin::f1(), builtin::p112()])
}

fn any_builtin() -> impl Strategy<Value = StackyFan> {
    prop::sample::select(builtin::all().into_iter().map(|(_, f)| f).collect::<Vec<_>>())
}

fn with_mult(f: StackyFan) -> impl Strategy<Value = StackyFan> {
    let n = f.n_rays();
    prop::collection::vec(1i64..=3, n).prop_map(move |m| StackyFan::new(f.dim, f.rays.clone(), m, f.max_cones.clone()))
}

fn fan_and_class() -> impl Strategy<Value = (StackyFan, Vec<i64>)> {
    any_builtin().prop_flat_map(|f| {
        let n = f.n_rays();
        (Just(f), prop::collection::vec(-4i64..=4, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_factorization((cols, rows) in matrix(4, 4)) {
        let a = IntMatrix::from_rows(cols, &rows);
        let s = lattice::smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        let d = s.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero(), "{:?}", d);
            }
        }
        prop_assert!(lattice::determinant(&s.u).abs() == BigInt::from(1));
        prop_assert!(lattice::determinant(&s.v).abs() == BigInt::from(1));
        prop_assert_eq!(s.rank(), lattice::rank_rational(&a));
    }

    #[test]
    fn square_determinant_is_the_invariant_factor_product((n, rows) in (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)))) {
        let a = IntMatrix::from_rows(n, &rows);
        let prod = lattice::smith_normal_form(&a).diagonal().into_iter().fold(BigInt::from(1), |acc, d| acc * d);
        prop_assert_eq!(lattice::determinant(&a).abs(), prod.abs());
    }

    #[test]
    fn kernel_basis_spans_the_kernel((cols, rows) in matrix(3, 5)) {
        let a = IntMatrix::from_rows(cols, &rows);
        let ker = lattice::kernel_basis(&a);
        prop_assert_eq!(ker.len(), cols - lattice::rank_rational(&a));
        for k in &ker {
            prop_assert!(a.mul_vec(k).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rational_solutions_solve((n, rows, b) in (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(-5i64..=5, n), n), prop::collection::vec(-9i64..=9, n)))) {
        let a = IntMatrix::from_rows(n, &rows);
        let rhs: Vec<BigRational> = b.iter().map(|x| BigRational::from_integer((*x).into())).collect();
        match lattice::solve_rational(&a, &rhs) {
            None => prop_assert!(lattice::determinant(&a).is_zero()),
            Some(x) => {
                for (r, row) in rows.iter().enumerate() {
                    let lhs = row.iter().zip(&x).fold(BigRational::zero(), |acc, (c, xi)| acc + xi * BigRational::from_integer((*c).into()));
                    prop_assert_eq!(&lhs, &rhs[r]);
                }
            }
        }
    }

    #[test]
    fn integral_solutions_solve((cols, rows) in matrix(3, 4), x in prop::collection::vec(-4i64..=4, 4)) {
        let a = IntMatrix::from_rows(cols, &rows);
        let b = a.mul_vec(&big(&x[..cols]));
        let y = lattice::solve_integral(&a, &b).expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y), b);
    }

    #[test]
    fn hermite_reduction_is_canonical((cols, gens) in matrix(3, 4), x in prop::collection::vec(-9i64..=9, 4), c in prop::collection::vec(-3i64..=3, 3)) {
        let h = HermiteReducer::new(cols, &gens);
        let x = &x[..cols];
        let r = h.reduce(x);
        prop_assert_eq!(h.reduce(&r), r.clone());
        prop_assert!(h.contains(&divisors::sub(x, &r)));
        let mut y = x.to_vec();
        for (g, ci) in gens.iter().zip(&c) {
            for (yj, gj) in y.iter_mut().zip(g) {
                *yj += ci * gj;
            }
        }
        prop_assert_eq!(h.reduce(&y), r);
    }

    #[test]
    fn quotient_kills_the_generators((cols, gens) in matrix(3, 4)) {
        let q = lattice::quotient_projection(cols, &gens);
        for g in &gens {
            prop_assert!(q.proj.mul_vec_i64(g).iter().all(|x| x.is_zero()));
            prop_assert!(q.torsion.project(g).iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(q.proj.rows(), cols - lattice::rank_rational(&IntMatrix::from_rows(cols, &gens)));
    }

    #[test]
    fn cohomology_is_invariant_under_linear_equivalence((f, k) in fan_and_class(), m in prop::collection::vec(-2i64..=2, 3)) {
        let eng = CohomologyEngine::new(&f).unwrap();
        let shifted = divisors::add(&k, &divisors::principal_vector(&f, &m[..f.dim]));
        prop_assert_eq!(eng.dims(&k, Method::Weight).unwrap(), eng.dims(&shifted, Method::Weight).unwrap());
        prop_assert!(ClassLattice::principal(&f).equivalent(&k, &shifted));
    }

    #[test]
    fn weight_and_cech_agree_on_stacky_surfaces(f in two_dim_builtin().prop_flat_map(with_mult), seed in prop::collection::vec(-5i64..=5, 4)) {
        let k = &seed[..f.n_rays()];
        let eng = CohomologyEngine::new(&f).unwrap();
        let w = eng.dims(k, Method::Weight).unwrap();
        prop_assert_eq!(&w, &eng.dims(k, Method::Cech).unwrap());
        let mut dual = eng.dims(&divisors::sub(&divisors::canonical_class(&f), k), Method::Weight).unwrap().dims;
        dual.reverse();
        prop_assert_eq!(w.dims, dual);
    }

    #[test]
    fn hom_is_cohomology_of_the_difference((f, a) in fan_and_class(), b in prop::collection::vec(-3i64..=3, 5)) {
        let b = &b[..f.n_rays()];
        let hom = cohomology::hom_line_bundles(&f, &a, b).unwrap();
        prop_assert_eq!(hom, cohomology::cohomology_dims(&f, &divisors::sub(b, &a), Method::Cech).unwrap());
    }

    #[test]
    fn fan_json_round_trips(f in any_builtin().prop_flat_map(with_mult)) {
        let s = io::fan_to_json(&f);
        let back = io::fan_from_json(&s).unwrap();
        prop_assert_eq!(io::fan_to_json(&back), s);
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stacky_surfaces_give_complete_exceptional_collections(f in two_dim_builtin().prop_flat_map(with_mult)) {
        let out = pipeline(&f, &PipelineConfig::default()).unwrap();
        let r = &out.report;
        prop_assert!(r.is_clean(), "{:?}: {}", f.mult, r.human_summary());
        let json = io::collection_to_value(&out.collection);
        prop_assert_eq!(io::collection_from_value(&json).unwrap(), out.collection);
    }
}
