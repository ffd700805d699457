use std::sync::Arc;

use proptest::prelude::*;
use repgeo::field::{FieldAutomorphism, FieldDescriptor, Scalar};
use repgeo::freealg::{NCPoly, Word};
use repgeo::freelie::{LieElement, LyndonBasis};
use repgeo::linalg::Echelon;
use repgeo::poly::MPoly;
use repgeo::representation::{ModKey, ModuleElement, Representation, VarietyDescriptor};
use repgeo::term::{parse_module, parse_poly, parse_scalar, TermContext};
use repgeo::verbal::WordSystem;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| {
        &Scalar::ratio(a, b) + &(&Scalar::ratio(c, d) * &Scalar::sqrt(2))
    })
}

fn word(alphabet: u8, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..alphabet, 0..=max_len).prop_map(|l| {
        l.into_iter().fold(Word::unit(), |w, i| w.concat(&Word::letter(i as usize)))
    })
}

fn ncpoly(max_len: usize) -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((word(2, max_len), -3i64..=3), 0..5).prop_map(|ts| {
        let mut p = NCPoly::zero();
        for (w, c) in ts {
            p.add_term(w, Scalar::from_int(c));
        }
        p
    })
}

fn lie(basis: &'static LyndonBasis, max_deg: usize) -> impl Strategy<Value = LieElement> {
    prop::collection::vec((1..=max_deg, 0usize..16, -3i64..=3), 0..4).prop_map(move |ts| {
        let mut pbw = NCPoly::zero();
        for (n, i, c) in ts {
            let e = basis.element(n, i % basis.count(n));
            pbw.add_scaled(&e.pbw, &Scalar::from_int(c));
        }
        LieElement::from_pbw(pbw)
    })
}

fn basis() -> &'static LyndonBasis {
    use std::sync::OnceLock;
    static B: OnceLock<LyndonBasis> = OnceLock::new();
    B.get_or_init(|| LyndonBasis::new(2, 6))
}

fn free() -> Arc<Representation> {
    use std::sync::OnceLock;
    static F: OnceLock<Arc<Representation>> = OnceLock::new();
    F.get_or_init(|| {
        let v = VarietyDescriptor::degree_six(FieldDescriptor::quadratic(2).unwrap());
        Arc::new(Representation::free(&v, 2, 1).unwrap())
    })
    .clone()
}

fn module() -> impl Strategy<Value = ModuleElement> {
    let keys: Vec<ModKey> = free().module_basis();
    prop::collection::vec((0..keys.len(), -3i64..=3), 0..5).prop_map(move |ts| {
        let mut u = ModuleElement::zero();
        for (i, c) in ts {
            u.add_term(keys[i].clone(), Scalar::from_int(c));
        }
        u
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv()).is_one());
        }
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(a in scalar(), b in scalar()) {
        let phi = FieldAutomorphism::Conjugation;
        prop_assert_eq!(phi.apply(&(&a * &b)), &phi.apply(&a) * &phi.apply(&b));
        prop_assert_eq!(phi.apply(&(&a + &b)), &phi.apply(&a) + &phi.apply(&b));
        prop_assert_eq!(phi.apply(&phi.apply(&a)), a);
    }

    #[test]
    fn scalars_round_trip_through_text(a in scalar()) {
        prop_assert_eq!(parse_scalar(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn free_algebra_is_associative(p in ncpoly(3), q in ncpoly(3), r in ncpoly(3)) {
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.commutator(&q), -q.commutator(&p));
    }

    #[test]
    fn commutators_satisfy_jacobi(p in ncpoly(2), q in ncpoly(2), r in ncpoly(2)) {
        let j = &(&p.commutator(&q.commutator(&r)) + &q.commutator(&r.commutator(&p))) + &r.commutator(&p.commutator(&q));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn polys_round_trip_through_text(p in ncpoly(4)) {
        prop_assert_eq!(parse_poly(&p.to_string(), TermContext::new(2, 1)).unwrap(), p);
    }

    #[test]
    fn lie_brackets_stay_lie(u in lie(basis(), 3), v in lie(basis(), 3)) {
        let w = basis().bracket(&u, &v).unwrap();
        prop_assert!(basis().is_lie_element(&w.pbw).unwrap());
        prop_assert_eq!(basis().bracket(&v, &u).unwrap().pbw, -w.pbw);
    }

    #[test]
    fn module_action_respects_brackets(l1 in lie(basis(), 2), l2 in lie(basis(), 2), u in module()) {
        let f = free();
        let lhs = f.act(&f.bracket(&l1, &l2), &u);
        let rhs = &f.act(&l1, &f.act(&l2, &u)) - &f.act(&l2, &f.act(&l1, &u));
        prop_assert!(f.module_eq(&lhs, &rhs));
    }

    #[test]
    fn modules_round_trip_through_text(u in module()) {
        prop_assert_eq!(parse_module(&u.to_string(), TermContext::new(2, 1)).unwrap(), u);
    }

    #[test]
    fn word_systems_invert(a in scalar(), conj in any::<bool>()) {
        prop_assume!(!a.is_zero());
        let phi = if conj { FieldAutomorphism::Conjugation } else { FieldAutomorphism::Identity };
        let w = WordSystem::new(a, phi).unwrap();
        prop_assert!(WordSystem::stack(&w, &w.inverse()).is_identity());
        prop_assert!(WordSystem::stack(&w.inverse(), &w).is_identity());
    }

    #[test]
    fn echelon_spans(vs in prop::collection::vec(module(), 1..5), extra in module()) {
        let e = Echelon::from_vectors(&vs);
        prop_assert!(vs.iter().all(|v| e.contains(v)));
        prop_assert!(e.rank() <= vs.len());
        let mut more = vs.clone();
        more.push(extra);
        let bigger = Echelon::from_vectors(&more);
        prop_assert!(e.is_subspace_of(&bigger));
        prop_assert!(bigger.intersect(&e).same_span(&e));
    }

    #[test]
    fn commutative_polys_form_a_ring(cs in prop::collection::vec(-3i64..=3, 6), x in -3i64..=3, y in -3i64..=3) {
        let (a, b) = (MPoly::var(0), MPoly::var(1));
        let p = &a.scale(&Scalar::from_int(cs[0])) + &b.scale(&Scalar::from_int(cs[1]));
        let q = &a.mul(&b).scale(&Scalar::from_int(cs[2])) + &MPoly::constant(Scalar::from_int(cs[3]));
        let r = &a.pow(2).scale(&Scalar::from_int(cs[4])) + &MPoly::constant(Scalar::from_int(cs[5]));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&(&q + &r)), &p.mul(&q) + &p.mul(&r));
        let pt = [Scalar::from_int(x), Scalar::from_int(y)];
        prop_assert_eq!(p.mul(&q).eval(&pt), &p.eval(&pt) * &q.eval(&pt));
    }
}
