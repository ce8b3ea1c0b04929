use std::collections::BTreeSet;
use std::sync::Arc;

use eisencong_core::arith::matrix::{det_int, hnf};
use eisencong_core::arith::poly::Poly;
use eisencong_core::arith::{rat, Int, Rat};
use eisencong_core::nf::enumerate::enumerate_totally_positive;
use eisencong_core::nf::FieldOrder;
use eisencong_core::presets::PresetData;
use proptest::prelude::*;

fn fields() -> Vec<FieldOrder> {
    vec![
        FieldOrder::monogenic("Q(sqrt5)", &[-1, -1, 1]).unwrap(),
        FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap(),
        FieldOrder::monogenic("Q(zeta7)+", &[-1, -2, 1, 1]).unwrap(),
    ]
}

fn coords(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-30i64..=30, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_multiplicative_trace_additive(x in coords(3), y in coords(3)) {
        for k in fields() {
            let n = k.degree();
            let a = k.element_i64(&x[..n]);
            let b = k.element_i64(&y[..n]);
            let ab = k.element_mul(&a, &b).unwrap();
            prop_assert_eq!(k.norm_of(&ab.coords), k.norm_of(&a.coords) * k.norm_of(&b.coords));
            let s = k.element_add(&a, &b).unwrap();
            prop_assert_eq!(k.trace_of(&s.coords), k.trace_of(&a.coords) + k.trace_of(&b.coords));
        }
    }

    #[test]
    fn hnf_is_idempotent(rows in prop::collection::vec(prop::collection::vec(-50i64..=50, 3), 1..6)) {
        let m: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        let h = hnf(&m);
        prop_assert_eq!(hnf(&h), h);
    }

    #[test]
    fn ideal_norms_multiply(x in coords(3), y in coords(3)) {
        let k = FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap();
        let a = k.element_i64(&x);
        let b = k.element_i64(&y);
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ia = k.ideal_generated(&[a, k.element_i64(&[3, 0, 0])]).unwrap();
        let ib = k.ideal_generated(&[b, k.element_i64(&[2, 1, 0])]).unwrap();
        let prod = k.ideal_mul(&ia, &ib).unwrap();
        prop_assert_eq!(k.ideal_norm(&prod), k.ideal_norm(&ia) * k.ideal_norm(&ib));
    }

    #[test]
    fn tower_trace_of_embedding_and_galois(x in coords(3), c in -40i64..=40) {
        for d in [PresetData::zeta9(), PresetData::zeta7()] {
            let t = eisencong_core::tower::TowerData::new(
                &d.name,
                Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap()),
                Arc::new(FieldOrder::monogenic(&d.top_label, &d.top_poly).unwrap()),
                3,
                &Poly::from_i64(&[0]),
                &Poly::from_i64(&d.gamma_image),
            ).unwrap();
            let b = t.base.element_i64(&[c]);
            prop_assert_eq!(t.rel_trace(&t.embed(&b)).unwrap(), t.base.element_i64(&[3 * c]));
            let y = t.top.element_i64(&x);
            prop_assert_eq!(t.rel_trace(&t.galois(1, &y)).unwrap(), t.rel_trace(&y).unwrap());
        }
    }
}

#[test]
fn basis_products_are_associative_and_commutative() {
    for k in fields() {
        let n = k.degree();
        for i in 0..n {
            for j in 0..n {
                let (ei, ej) = (k.basis_element(i), k.basis_element(j));
                assert_eq!(k.element_mul(&ei, &ej).unwrap(), k.element_mul(&ej, &ei).unwrap());
                for l in 0..n {
                    let el = k.basis_element(l);
                    let left = k.element_mul(&k.element_mul(&ei, &ej).unwrap(), &el).unwrap();
                    let right = k.element_mul(&ei, &k.element_mul(&ej, &el).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }
}

#[test]
fn trace_form_determinant_is_discriminant() {
    for k in fields() {
        assert_eq!(&det_int(&k.trace_gram()), k.discriminant());
    }
}

#[test]
fn monogenic_different_is_derivative() {
    for k in fields() {
        let f = Poly::from_ints(k.min_poly());
        let fp = k.from_poly(&f.derivative());
        assert_eq!(k.different().unwrap(), k.principal_ideal(&fp).unwrap());
    }
}

#[test]
fn totally_positive_enumeration_is_monotone() {
    for k in fields() {
        let l = k.unit_ideal();
        let mut prev: BTreeSet<_> = BTreeSet::new();
        for b in [2, 4, 7, 10] {
            let cur: BTreeSet<_> = enumerate_totally_positive(&k, &l, &rat(b, 1)).unwrap().into_iter().collect();
            assert!(prev.is_subset(&cur));
            for x in &cur {
                assert!(k.is_totally_positive(x));
                assert!(k.trace_of(&x.coords) <= rat(b, 1));
            }
            prev = cur;
        }
    }
}

#[test]
fn relative_different_norms() {
    for (d, n) in [(PresetData::zeta9(), 81), (PresetData::zeta7(), 49)] {
        let pr = d.build().unwrap();
        let t = &pr.tower;
        assert_eq!(t.top.ideal_norm(&t.rel_different), Rat::from_integer(Int::from(n)));
        let xi = t.rel_different_with_xi(&pr.top_units, 6).unwrap().xi.unwrap();
        assert!(t.top.is_totally_positive(&xi));
        assert_eq!(t.top.principal_ideal(&xi).unwrap(), t.rel_different);
        let q = t.top.element_div(&t.galois(1, &xi), &xi).unwrap();
        assert!(q.is_integral() && t.top.is_unit(&q));
    }
}
