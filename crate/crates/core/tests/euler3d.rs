//! Incompressible Euler equations in three dimensions.

use jetnoether_core::expr::{Atom, Expr, Field, FuncAtom, MultiIndex, Space};
use jetnoether_core::jet::{divergence, FluxTuple, Generator};
use jetnoether_core::lagrangian::{
    balance_equivalent, check_self_adjointness, generic_modified_lagrangian, with_balance,
    ModifiedLagrangian, SelfAdjointMode, Verdict,
};
use jetnoether_core::noether::{
    check_variational_symmetry, extend_balanced, noether_law, substitute_dummy, Triviality,
};
use jetnoether_core::system::{DiffSystem, KOptions};

const P: usize = 4;

fn space() -> Space {
    Space::new(
        vec!["t".into(), "x1".into(), "x2".into(), "x3".into()],
        vec!["u1".into(), "u2".into(), "u3".into(), "p".into()],
        vec!["v1".into(), "v2".into(), "v3".into(), "q".into()],
    )
}

fn jet(f: Field, d: &[usize]) -> Expr {
    let mut j = MultiIndex::zero(P);
    for &i in d {
        j = j.incremented(i);
    }
    Expr::atom(Atom::jet(f, j))
}

/// Velocity component `i` (1-based), pressure is field 3.
fn u(i: usize, d: &[usize]) -> Expr {
    jet(Field::original(i - 1), d)
}
fn v(i: usize, d: &[usize]) -> Expr {
    jet(Field::dummy(i - 1), d)
}
fn p(d: &[usize]) -> Expr {
    jet(Field::original(3), d)
}
fn x(i: usize) -> Expr {
    Expr::atom(Atom::Indep(i))
}

fn system() -> DiffSystem {
    let mut eqs = Vec::new();
    for i in 1..=3 {
        let mut f = u(i, &[0]) + p(&[i]);
        for j in 1..=3 {
            f += u(j, &[]) * u(i, &[j]);
        }
        eqs.push(f);
    }
    eqs.push((1..=3).map(|j| u(j, &[j])).sum());
    DiffSystem::with_default_leading(space(), vec![], eqs).unwrap()
}

fn balance() -> Expr {
    let mut l0 = Expr::zero();
    for i in 1..=3 {
        for j in 1..=3 {
            l0 -= u(i, &[]) * u(j, &[]) * u(j, &[i]);
        }
    }
    l0
}

fn ml() -> ModifiedLagrangian {
    with_balance(&system(), balance()).unwrap()
}

fn generator(xi: [Expr; 4], phi: [Expr; 4]) -> Generator {
    Generator::new(xi.to_vec(), phi.to_vec())
}

fn zero4() -> [Expr; 4] {
    [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()]
}

fn rotation(i: usize, j: usize) -> Generator {
    let mut xi = zero4();
    let mut phi = zero4();
    xi[j] = x(i);
    xi[i] = -x(j);
    phi[j - 1] = u(i, &[]);
    phi[i - 1] = -u(j, &[]);
    generator(xi, phi)
}

fn pressure_change() -> Generator {
    let g = Expr::atom(Atom::Func(FuncAtom::new("g", &[0])));
    let mut phi = zero4();
    phi[3] = g;
    generator(zero4(), phi)
}

fn flux_difference_is_divergence_free(a: &FluxTuple, b: &FluxTuple) -> bool {
    let diff = FluxTuple::new(
        a.components
            .iter()
            .zip(&b.components)
            .map(|(x, y)| x - y)
            .collect(),
    );
    divergence(&diff).is_zero()
}

#[test]
fn balance_is_equivalent_to_generic_and_self_adjoint() {
    let sys = system();
    let generic = generic_modified_lagrangian(&sys);
    assert!(balance_equivalent(&balance(), generic.balance()));
    let report = check_self_adjointness(&ml(), SelfAdjointMode::Strict).unwrap();
    assert_eq!(report.verdict, Verdict::SelfAdjoint);
}

#[test]
fn balance_invariance_selects_symmetries() {
    let l0 = balance();
    for i in 0..P {
        assert!(
            check_variational_symmetry(&Generator::translation(P, 4, i), &l0)
                .unwrap()
                .is_some()
        );
    }
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        assert!(check_variational_symmetry(&rotation(i, j), &l0)
            .unwrap()
            .is_some());
    }
    assert!(check_variational_symmetry(&pressure_change(), &l0)
        .unwrap()
        .is_some());

    let space_time = generator([x(0), x(1), x(2), x(3)], zero4());
    assert!(check_variational_symmetry(&space_time, &l0)
        .unwrap()
        .is_none());
    let mut phi = zero4();
    for i in 1..=3 {
        phi[i - 1] = -u(i, &[]);
    }
    phi[3] = p(&[]) * Expr::int(-2);
    let velocity_scaling = generator([x(0), Expr::zero(), Expr::zero(), Expr::zero()], phi);
    assert!(check_variational_symmetry(&velocity_scaling, &l0)
        .unwrap()
        .is_none());
}

#[test]
fn rotation_extension_rotates_dummies() {
    let y = extend_balanced(&rotation(1, 2), &ml(), KOptions::default()).unwrap();
    let ps = y.phi_star.unwrap();
    assert_eq!(ps[0], -v(2, &[]));
    assert_eq!(ps[1], v(1, &[]));
    assert!(ps[2].is_zero() && ps[3].is_zero());
}

#[test]
fn extended_symmetries_give_trivial_laws_except_mass() {
    let ml = ml();
    let mut gens: Vec<Generator> = (0..P).map(|i| Generator::translation(P, 4, i)).collect();
    gens.extend([(1, 2), (1, 3), (2, 3)].map(|(i, j)| rotation(i, j)));
    for g in &gens {
        let y = extend_balanced(g, &ml, KOptions::default()).unwrap();
        let law = noether_law(&y, &ml).unwrap();
        let reduced = substitute_dummy(&law, &ml, SelfAdjointMode::Strict).unwrap();
        assert!(reduced.triviality.is_trivial(), "{g:?}");
    }

    let y = extend_balanced(&pressure_change(), &ml, KOptions::default()).unwrap();
    let law = noether_law(&y, &ml).unwrap();
    let reduced = substitute_dummy(&law, &ml, SelfAdjointMode::Strict).unwrap();
    assert_eq!(reduced.triviality, Triviality::Nontrivial);
    let g = Expr::atom(Atom::Func(FuncAtom::new("g", &[0])));
    assert_eq!(reduced.characteristic_of(Field::original(3)), -g.clone());
    let mass = FluxTuple::new(vec![
        Expr::zero(),
        -(&g * &u(1, &[])),
        -(&g * &u(2, &[])),
        -(&g * &u(3, &[])),
    ]);
    assert!(flux_difference_is_divergence_free(&reduced.fluxes, &mass));
}

#[test]
fn momentum_from_dummy_shifts() {
    let ml = ml();
    for i in 1..=3 {
        let mut ps = zero4();
        ps[i - 1] = Expr::one();
        ps[3] = u(i, &[]);
        let y = Generator::new(zero4().to_vec(), zero4().to_vec()).with_phi_star(ps.to_vec());
        let law = noether_law(&y, &ml).unwrap();
        let reduced = substitute_dummy(&law, &ml, SelfAdjointMode::Strict).unwrap();
        assert_eq!(reduced.triviality, Triviality::Nontrivial);
        let mut comps = vec![u(i, &[])];
        for j in 1..=3 {
            let mut c = u(i, &[]) * u(j, &[]);
            if i == j {
                c += p(&[]);
            }
            comps.push(c);
        }
        assert!(flux_difference_is_divergence_free(
            &reduced.fluxes,
            &FluxTuple::new(comps)
        ));
    }
}

#[test]
fn energy_from_dummy_shift() {
    let ml = ml();
    let half_sq: Expr = (1..=3).map(|i| u(i, &[]).pow(2)).sum::<Expr>() * Expr::ratio(1, 2);
    let mut ps = zero4();
    for i in 1..=3 {
        ps[i - 1] = u(i, &[]);
    }
    ps[3] = &half_sq + &p(&[]);
    let y = Generator::new(zero4().to_vec(), zero4().to_vec()).with_phi_star(ps.to_vec());
    let law = noether_law(&y, &ml).unwrap();
    let reduced = substitute_dummy(&law, &ml, SelfAdjointMode::Strict).unwrap();
    assert_eq!(reduced.triviality, Triviality::Nontrivial);
    let mut comps = vec![half_sq.clone()];
    for i in 1..=3 {
        comps.push((&half_sq + &p(&[])) * u(i, &[]));
    }
    assert!(flux_difference_is_divergence_free(
        &reduced.fluxes,
        &FluxTuple::new(comps)
    ));
}
