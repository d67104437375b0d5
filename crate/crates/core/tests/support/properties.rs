//! Seeded randomized suites over the library invariants. Shared between the
//! core property tests and the acceptance target.

#![allow(dead_code, clippy::eq_op)]

use std::collections::BTreeMap;

use jetnoether_core::expr::{normalize, Atom, Expr, Field, FuncAtom, MultiIndex, Space, Term};
use jetnoether_core::jet::{
    divergence, euler_operator, is_total_divergence, prolong_apply, reconstruct_fluxes, FluxTuple,
    Generator,
};
use jetnoether_core::lagrangian::{
    adjoint_system, balance_equivalent, check_self_adjointness, formal_lagrangian,
    generic_modified_lagrangian, with_balance, SelfAdjointMode, Verdict,
};
use jetnoether_core::noether::{
    check_variational_symmetry, extend_balanced, extend_generic, noether_law, substitute_dummy,
};
use jetnoether_core::system::{extract_k, reduce_on_solutions, DiffSystem, KOptions, Parameter};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestCaseError, TestRunner};

pub const CASES: u32 = 256;
pub const SEED: u64 = 0x6a65_746e_6f65;

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        rng_algorithm: RngAlgorithm::ChaCha,
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    })
}

fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn jet(f: Field, j: &[u32]) -> Atom {
    Atom::jet(f, MultiIndex::from_slice(j))
}

fn u(j: &[u32]) -> Atom {
    jet(Field::original(0), j)
}

fn g_of_t() -> Atom {
    Atom::Func(FuncAtom::new("g", &[0]))
}

/// Random polynomial over `pool`: up to `terms` monomials of degree ≤ `deg`.
fn poly(pool: Vec<Atom>, terms: usize, deg: usize) -> impl Strategy<Value = Expr> {
    let n = pool.len();
    prop::collection::vec((-4i64..=4, prop::collection::vec(0..n, 0..=deg)), 0..=terms).prop_map(
        move |ts| {
            ts.into_iter()
                .map(|(c, idx)| {
                    idx.into_iter()
                        .fold(Expr::int(c), |acc, i| acc * Expr::atom(pool[i].clone()))
                })
                .sum()
        },
    )
}

fn small_pool() -> Vec<Atom> {
    vec![
        u(&[0, 0]),
        u(&[0, 1]),
        u(&[1, 0]),
        Atom::Indep(1),
        Atom::param("a"),
    ]
}

fn jet_pool() -> Vec<Atom> {
    vec![
        u(&[0, 0]),
        u(&[0, 1]),
        u(&[1, 0]),
        u(&[0, 2]),
        jet(Field::dummy(0), &[0, 0]),
        jet(Field::dummy(0), &[0, 1]),
        Atom::Indep(0),
        Atom::Indep(1),
        g_of_t(),
        Atom::param("a"),
    ]
}

fn space() -> Space {
    Space::with_default_dummies(vec!["t".into(), "x".into()], vec!["u".into()])
}

pub fn expr_ring_laws() -> Result<(), String> {
    let p = || poly(small_pool(), 4, 3);
    run((p(), p(), p()), |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        let t: Term = a.to_term();
        prop_assert_eq!(normalize(&t).unwrap(), a.clone());
        prop_assert_eq!(a.normalize(), a.normalize().normalize());
        Ok(())
    })
}

pub fn partial_is_derivation() -> Result<(), String> {
    let pool = small_pool();
    let n = pool.len();
    let p = || poly(small_pool(), 4, 3);
    run((p(), p(), 0..n), move |(a, b, k)| {
        let at = &pool[k];
        let lhs = (&a * &b).partial(at);
        let rhs = a.partial(at) * &b + &a * &b.partial(at);
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn substitute_is_additive() -> Result<(), String> {
    let pool = vec![
        jet(Field::dummy(0), &[0, 0]),
        jet(Field::dummy(0), &[0, 1]),
        jet(Field::dummy(0), &[1, 1]),
        u(&[0, 0]),
        Atom::Indep(1),
    ];
    let h_pool = vec![u(&[0, 0]), u(&[0, 1]), Atom::Indep(0)];
    run(
        (
            poly(pool.clone(), 4, 3),
            poly(pool, 4, 3),
            poly(h_pool, 3, 2),
        ),
        |(a, b, h)| {
            let rules: BTreeMap<Atom, Expr> = [(Atom::base(Field::dummy(0), 2), h)].into();
            let lhs = (&a + &b).substitute(&rules).unwrap();
            let rhs = a.substitute(&rules).unwrap() + b.substitute(&rules).unwrap();
            prop_assert_eq!(lhs, rhs);
            let prod = (&a * &b).substitute(&rules).unwrap();
            prop_assert_eq!(
                prod,
                a.substitute(&rules).unwrap() * b.substitute(&rules).unwrap()
            );
            Ok(())
        },
    )
}

pub fn total_derivatives_commute() -> Result<(), String> {
    run(poly(jet_pool(), 4, 3), |e| {
        let tx = e.total_derivative(0).total_derivative(1);
        let xt = e.total_derivative(1).total_derivative(0);
        prop_assert_eq!(tx, xt);
        Ok(())
    })
}

fn flux_pair() -> impl Strategy<Value = FluxTuple> {
    (poly(jet_pool(), 4, 3), poly(jet_pool(), 4, 3)).prop_map(|(a, b)| FluxTuple::new(vec![a, b]))
}

pub fn euler_annihilates_divergences() -> Result<(), String> {
    run(flux_pair(), |p| {
        let d = divergence(&p);
        prop_assert!(euler_operator(&d, Field::original(0)).is_zero());
        prop_assert!(euler_operator(&d, Field::dummy(0)).is_zero());
        prop_assert!(is_total_divergence(&d));
        Ok(())
    })
}

pub fn homotopy_round_trip() -> Result<(), String> {
    run(flux_pair(), |p| {
        let d = divergence(&p);
        let r = reconstruct_fluxes(&d, 2).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(divergence(&r), d);
        Ok(())
    })
}

fn point_pool() -> Vec<Atom> {
    vec![Atom::Indep(0), Atom::Indep(1), u(&[0, 0]), Atom::param("a")]
}

pub fn evolutionary_commutation() -> Result<(), String> {
    let q_pool = vec![u(&[0, 0]), u(&[0, 1]), u(&[0, 2]), Atom::Indep(1)];
    run(
        (poly(q_pool, 3, 2), poly(jet_pool(), 4, 3), 0usize..2),
        |(q, e, i)| {
            let g = Generator::new(vec![Expr::zero(), Expr::zero()], vec![q]);
            let lhs = prolong_apply(&g, &e.total_derivative(i));
            let rhs = prolong_apply(&g, &e).total_derivative(i);
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn characteristic_consistency() -> Result<(), String> {
    let pp = || poly(point_pool(), 3, 2);
    run(
        (pp(), pp(), pp(), poly(jet_pool(), 4, 3)),
        |(x0, x1, phi, e)| {
            let g = Generator::new(vec![x0, x1], vec![phi]);
            let evo = g.evolutionary_form();
            let transport: Expr =
                g.xi.iter()
                    .enumerate()
                    .map(|(i, xi)| xi * &e.total_derivative(i))
                    .sum();
            prop_assert_eq!(prolong_apply(&g, &e), transport + prolong_apply(&evo, &e));
            Ok(())
        },
    )
}

fn kdv() -> DiffSystem {
    let f = Expr::atom(u(&[1, 0]))
        + Expr::atom(u(&[0, 0])) * Expr::atom(u(&[0, 1]))
        + Expr::atom(u(&[0, 3]));
    DiffSystem::with_default_leading(space(), vec![], vec![f]).unwrap()
}

pub fn reduction_laws() -> Result<(), String> {
    let pool = vec![
        u(&[0, 0]),
        u(&[1, 0]),
        u(&[1, 1]),
        u(&[0, 3]),
        u(&[2, 0]),
        Atom::Indep(0),
    ];
    let sys = kdv();
    let p = || poly(pool.clone(), 3, 2);
    run((p(), p()), move |(a, b)| {
        let r = |e: &Expr| reduce_on_solutions(e, &sys).unwrap();
        let ra = r(&a);
        prop_assert_eq!(r(&ra), ra.clone());
        let rb = r(&b);
        prop_assert_eq!(r(&(&a + &b)), r(&(&ra + &rb)));
        prop_assert_eq!(r(&(&a * &b)), r(&(&ra * &rb)));
        prop_assert!(ra
            .jet_atoms()
            .iter()
            .all(|x| x.as_jet().unwrap().1.get(0) == 0));
        Ok(())
    })
}

/// Random polynomial systems with p ≤ 2, q ≤ 2, order ≤ 3, degree ≤ 2, each
/// equation solved for a designated derivative of its own field.
fn random_system() -> impl Strategy<Value = DiffSystem> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(p, q)| {
        let lead: Vec<u32> = if p == 1 { vec![3] } else { vec![2, 0] };
        let mut pool = Vec::new();
        for a in 0..q {
            let f = Field::original(a);
            let indices: Vec<Vec<u32>> = if p == 1 {
                (0..3u32).map(|k| vec![k]).collect()
            } else {
                vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 3], vec![1, 1]]
            };
            for j in indices {
                pool.push(Atom::jet(f, MultiIndex::from_slice(&j)));
            }
        }
        pool.push(Atom::Indep(p - 1));
        pool.push(Atom::param("a"));
        prop::collection::vec(poly(pool, 4, 2), q).prop_map(move |rests| {
            let leads: Vec<Atom> = (0..q)
                .map(|a| Atom::jet(Field::original(a), MultiIndex::from_slice(&lead)))
                .collect();
            let eqs = rests
                .into_iter()
                .zip(&leads)
                .map(|(rest, l)| Expr::atom(l.clone()) + rest)
                .collect();
            let names: Vec<String> = ["t", "x"][2 - p..].iter().map(|s| s.to_string()).collect();
            let fields = (0..q).map(|a| format!("u{}", a + 1)).collect();
            let space = Space::with_default_dummies(names, fields);
            let leading = leads.into_iter().map(Some).collect();
            DiffSystem::new(space, vec![Parameter::new("a", false)], eqs, leading).unwrap()
        })
    })
}

pub fn generic_self_adjointness() -> Result<(), String> {
    run(random_system(), |sys| {
        let ml = generic_modified_lagrangian(&sys);
        let report = check_self_adjointness(&ml, SelfAdjointMode::Strict).unwrap();
        prop_assert_eq!(&report.verdict, &Verdict::SelfAdjoint);
        for (r, f) in report.substituted.iter().zip(sys.equations()) {
            prop_assert!((r + f).is_zero());
        }
        Ok(())
    })
}

pub fn modified_lagrangian_identities() -> Result<(), String> {
    let balance_pool = vec![u(&[0, 0]), u(&[0, 1]), u(&[0, 2]), Atom::Indep(1)];
    run(
        (random_system(), poly(balance_pool, 3, 3), flux_pair()),
        |(sys, l0, div)| {
            if sys.p() != 2 || sys.q() != 1 {
                return Ok(());
            }
            // drop dummy-dependent terms so the shift is a legal balance
            let div_part = divergence(&div.map(|c| {
                c.filter_terms(|m| {
                    m.factors()
                        .iter()
                        .all(|(a, _)| !a.as_jet().is_some_and(|(f, _)| f.is_dummy()))
                })
            }));
            let ml = with_balance(&sys, l0.clone()).unwrap();
            for (a, f) in sys.equations().iter().enumerate() {
                prop_assert_eq!(&euler_operator(ml.lagrangian(), Field::dummy(a)), f);
            }
            let formal = formal_lagrangian(&sys);
            let lhs = adjoint_system(&ml);
            let base = adjoint_system(&formal);
            for a in 0..sys.q() {
                prop_assert!(
                    (&lhs[a] - &base[a] - euler_operator(&l0, Field::original(a))).is_zero()
                );
            }
            let shifted = &l0 + &div_part;
            prop_assert!(balance_equivalent(&l0, &shifted));
            let other = with_balance(&sys, shifted).unwrap();
            prop_assert_eq!(adjoint_system(&other), lhs);
            Ok(())
        },
    )
}

/// Autonomous weighted-homogeneous evolution equations `u_t = f(u, u_x, u_xx, u_xxx)`
/// with their translations and scaling.
fn homogeneous_system() -> impl Strategy<Value = (DiffSystem, Vec<Generator>)> {
    let wu_choices = vec![-2i64, -1, 1, 2];
    (
        prop::sample::select(wu_choices),
        any::<u64>(),
        prop::collection::vec(-3i64..=3, 12),
    )
        .prop_map(|(wu, pick, coefs)| {
            let jets: Vec<(Atom, i64)> = (0..4u32).map(|k| (u(&[0, k]), k as i64)).collect();
            let mut monos: Vec<(Expr, i64)> = Vec::new();
            for (a, oa) in &jets {
                monos.push((Expr::atom(a.clone()), wu - oa));
                for (b, ob) in &jets {
                    if a <= b {
                        monos.push((
                            Expr::atom(a.clone()) * Expr::atom(b.clone()),
                            2 * wu - oa - ob,
                        ));
                    }
                }
            }
            let weights: Vec<i64> = {
                let mut w: Vec<i64> = monos.iter().map(|(_, w)| *w).collect();
                w.sort();
                w.dedup();
                w
            };
            let target = weights[(pick as usize) % weights.len()];
            let mut rhs = Expr::zero();
            let mut k = 0;
            for (m, w) in &monos {
                if *w == target {
                    let c = coefs[k % coefs.len()];
                    k += 1;
                    rhs += m * &Expr::int(if c == 0 { 1 } else { c });
                }
            }
            let f = Expr::atom(u(&[1, 0])) - rhs;
            let sys = DiffSystem::with_default_leading(space(), vec![], vec![f]).unwrap();
            let wt = wu - target;
            let scaling = Generator::new(
                vec![
                    Expr::atom(Atom::Indep(0)) * Expr::int(wt),
                    Expr::atom(Atom::Indep(1)),
                ],
                vec![Expr::atom(u(&[0, 0])) * Expr::int(wu)],
            );
            let gens = vec![
                Generator::translation(2, 1, 0),
                Generator::translation(2, 1, 1),
                scaling,
            ];
            (sys, gens)
        })
}

pub fn k_extraction_soundness() -> Result<(), String> {
    run(homogeneous_system(), |(sys, gens)| {
        for g in &gens {
            let k = extract_k(g, &sys, KOptions::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let residual = prolong_apply(g, &sys.equations()[0]) - k.apply(0, &sys);
            prop_assert!(residual.is_zero());
        }
        Ok(())
    })
}

pub fn extension_soundness() -> Result<(), String> {
    run(homogeneous_system(), |(sys, gens)| {
        let generic = generic_modified_lagrangian(&sys);
        let formal = formal_lagrangian(&sys);
        for g in &gens {
            let y = extend_generic(g, &sys, KOptions::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(check_variational_symmetry(&y, generic.lagrangian())
                .unwrap()
                .is_some());
            let y = extend_balanced(g, &formal, KOptions::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(check_variational_symmetry(&y, formal.lagrangian())
                .unwrap()
                .is_some());
        }
        Ok(())
    })
}

pub fn noether_residuals_vanish() -> Result<(), String> {
    run(homogeneous_system(), |(sys, gens)| {
        let generic = generic_modified_lagrangian(&sys);
        for g in &gens {
            let y = extend_generic(g, &sys, KOptions::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let law = noether_law(&y, &generic).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(law.residual.is_zero());
            prop_assert!(law.recompute_residual().is_zero());
            let reduced = substitute_dummy(&law, &generic, SelfAdjointMode::Strict)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(reduced.recompute_residual().is_zero());
            // extensions through the generic Lagrangian only give trivial laws
            prop_assert!(reduced.triviality.is_trivial());
        }
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("expression ring laws", expr_ring_laws),
    ("partial derivative is a derivation", partial_is_derivation),
    ("substitution is a ring morphism", substitute_is_additive),
    ("total derivatives commute", total_derivatives_commute),
    (
        "Euler operators annihilate divergences",
        euler_annihilates_divergences,
    ),
    ("homotopy round trip", homotopy_round_trip),
    (
        "evolutionary prolongation commutes with D",
        evolutionary_commutation,
    ),
    ("characteristic consistency", characteristic_consistency),
    ("reduction on solutions", reduction_laws),
    ("generic self-adjointness", generic_self_adjointness),
    (
        "modified Lagrangian identities",
        modified_lagrangian_identities,
    ),
    ("K extraction soundness", k_extraction_soundness),
    ("extension soundness", extension_soundness),
    ("Noether residuals vanish", noether_residuals_vanish),
];
