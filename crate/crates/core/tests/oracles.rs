use std::sync::Arc;

use eisencong_core::arith::cyclotomic::CycloField;
use eisencong_core::arith::{gcd_u64, Int, Rat};
use eisencong_core::classgroups::{class_group, form_class_number, Ambient, DEFAULT_CAP};
use eisencong_core::eisenstein::factorization_orbits;
use eisencong_core::local::chars::{frac, rationals, DirichletChar};
use eisencong_core::local::epsilon::{gauss_sum, SignMode};
use eisencong_core::local::ramified::galois_characters;
use eisencong_core::nf::cm::{is_fundamental_discriminant, CMQuadExt};
use eisencong_core::nf::units::search_units;
use eisencong_core::presets::PresetData;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn sign_at_minus_one(chi: &DirichletChar) -> i64 {
    let e = chi.eval_int(&Int::from(-1)).unwrap();
    if e.is_zero() {
        1
    } else {
        -1
    }
}

fn primitive_chars(m: u64) -> Vec<DirichletChar> {
    DirichletChar::all_mod(m).unwrap().into_iter().filter(|c| c.is_primitive() && !c.is_trivial()).collect()
}

#[test]
fn gauss_sum_absolute_values_and_conjugates() {
    for m in 3..=50 {
        for chi in primitive_chars(m) {
            let g = gauss_sum(&chi, SignMode::Minus).unwrap();
            assert_eq!(g.abs_squared_integer(), Some(Int::from(m)), "modulus {m}");
            let gbar = gauss_sum(&chi.inverse(), SignMode::Minus).unwrap();
            assert_eq!(gbar, g.conj().scale(&Int::from(sign_at_minus_one(&chi))), "modulus {m}");
        }
    }
}

/// Direct value of `chi(n)` as a root of unity in `Q(zeta_l)`.
fn value(chi: &DirichletChar, n: i64, f: &Arc<CycloField>) -> eisencong_core::arith::cyclotomic::CyclotomicInt {
    let e = chi.eval_int(&Int::from(n)).unwrap();
    eisencong_core::local::chars::root_of_unity(&e, f)
}

#[test]
fn gauss_sums_factor_over_coprime_moduli() {
    for (m1, m2) in [(3u64, 4u64), (3, 5), (4, 5), (5, 7), (8, 3)] {
        for c1 in primitive_chars(m1) {
            for c2 in primitive_chars(m2) {
                let prod = c1.mul_lifted(&c2).unwrap();
                let g = gauss_sum(&prod, SignMode::Minus).unwrap();
                let (g1, g2) = (gauss_sum(&c1, SignMode::Minus).unwrap(), gauss_sum(&c2, SignMode::Minus).unwrap());
                let f = CycloField::new(g.modulus());
                let rhs = value(&c1, m2 as i64, &f)
                    .mul(&value(&c2, m1 as i64, &f))
                    .mul(&g1.coerce(&f))
                    .mul(&g2.coerce(&f));
                assert_eq!(g.coerce(&f), rhs, "{m1} x {m2}");
            }
        }
    }
}

#[test]
fn conductor_exponents_of_products() {
    for (m, q) in [(8u64, 2u64), (9, 3), (25, 5), (27, 3), (16, 2)] {
        let all = DirichletChar::all_mod(m).unwrap();
        for a in &all {
            for b in &all {
                let na = a.conductor_exponent_at(q);
                let nb = b.conductor_exponent_at(q);
                let nab = a.mul(b).unwrap().conductor_exponent_at(q);
                assert!(nab <= na.max(nb));
                if na != nb {
                    assert_eq!(nab, na.max(nb));
                }
            }
        }
    }
}

#[test]
fn characters_of_odd_prime_order_multiply_to_one() {
    for d in [PresetData::zeta9(), PresetData::zeta7()] {
        let pr = d.build().unwrap();
        let chars = galois_characters(&pr.tower).unwrap();
        assert_eq!(chars.len(), 3);
        let m = chars[0].modulus_norm();
        for x in 1..=m as i64 {
            if gcd_u64(x as u64, m) != 1 {
                continue;
            }
            let s: Rat = chars.iter().map(|c| c.eval_int(&Int::from(x)).unwrap()).sum();
            assert!(frac(&s).is_zero());
        }
    }
}

#[test]
fn imaginary_quadratic_class_numbers_match_forms() {
    let q = rationals();
    let u = search_units(&q, 1).unwrap();
    for d in (-40i64..=-3).rev() {
        if !is_fundamental_discriminant(d) {
            continue;
        }
        let (t, n) = if d.rem_euclid(4) == 0 { (0, -d / 4) } else { (1, (1 - d) / 4) };
        let k = CMQuadExt::new("K", q.clone(), t, n).unwrap();
        let g = class_group(&Ambient::Cm { k: &k, base_units: &u }, DEFAULT_CAP).unwrap();
        assert!(g.is_exact());
        assert_eq!(g.order(), form_class_number(d), "discriminant {d}");
        // a smaller cap never yields a different definite answer
        let h = class_group(&Ambient::Cm { k: &k, base_units: &u }, 3).unwrap();
        assert!(!h.is_exact() || h.divisors == g.divisors);
    }
}

#[test]
fn forms_oracle_small_values() {
    let known = [(-3, 1), (-4, 1), (-15, 2), (-20, 2), (-23, 3), (-39, 4), (-47, 5), (-84, 4)];
    for (d, h) in known {
        assert_eq!(form_class_number(d), h, "discriminant {d}");
    }
}

fn divisor_count(n: u64) -> usize {
    (1..=n).filter(|d| n.is_multiple_of(*d)).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn rational_orbits_count_divisors(xi in 1u64..=200) {
        let q = rationals();
        let u = search_units(&q, 1).unwrap();
        let z = q.unit_ideal();
        let orbits = factorization_orbits(q.clone(), &q.element_i64(&[xi as i64]), &z, &z, &u).unwrap();
        // ordered pairs (a, b) with a b = xi over both signs, modulo -1
        prop_assert_eq!(orbits.len(), 2 * divisor_count(xi) / 2);
    }

    #[test]
    fn fermat_in_the_coefficient_ring(u in -10_000i64..10_000, p in prop::sample::select(vec![2i64, 3, 5, 7])) {
        let up = num_traits::pow(Int::from(u), p as usize);
        let d: Int = up - Int::from(u);
        prop_assert!((d % Int::from(p)).is_zero());
    }
}

#[test]
fn quadratic_gauss_sum_mod_five_squares_to_five() {
    let chi = primitive_chars(5).into_iter().find(|c| c.char_order() == 2).unwrap();
    let g = gauss_sum(&chi, SignMode::Minus).unwrap();
    assert_eq!(g.mul(&g).as_integer(), Some(Int::from(5)));
    assert!(g.abs_squared_integer().unwrap().to_u64() == Some(5));
}
