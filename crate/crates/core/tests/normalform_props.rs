mod common;

use common::forward::{forward_family, normal_form_sound, resonant_field};
use common::*;
use pnf_core::normalform::{normalize_family, FieldFamily};
use pnf_core::{LinearFamily, PolyVector};
use proptest::prelude::*;

const D: u32 = 5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forward_construction_is_recovered(seed in any::<u64>(), which in 0usize..2) {
        let mut r = rng(seed);
        let (s, xs) = forward_family(&mut r, which, D);
        let fam = FieldFamily::new(xs.clone(), s.clone()).unwrap();
        let res = normalize_family(&fam).unwrap();
        if let Err(e) = normal_form_sound(&s, &xs, &res.diffeo, &res.normal_forms, D) {
            return Err(TestCaseError::fail(e));
        }
        for a in 0..xs.len() {
            for b in a + 1..xs.len() {
                let br = res.normal_forms[a].schouten(&res.normal_forms[b]);
                prop_assert!(br.truncate(D).is_zero());
            }
        }
        let again = normalize_family(&fam).unwrap();
        prop_assert_eq!(again.diffeo, res.diffeo);
    }

    #[test]
    fn parameters_can_be_frozen_first(seed in any::<u64>(), which in 0usize..2) {
        let mut r = rng(seed);
        let (s, xs) = forward_family(&mut r, which, D);
        let params: Vec<usize> = (s.n()..s.n() + 1).collect();
        let frozen: Vec<PolyVector> = xs.iter().map(|x| x.map(|c| c.set_zero(&params))).collect();
        let full = normalize_family(&FieldFamily::new(xs, s.clone()).unwrap()).unwrap();
        let cold = normalize_family(&FieldFamily::new(frozen, s.clone()).unwrap()).unwrap();
        for (a, b) in full.diffeo.components().iter().zip(cold.diffeo.components()).take(s.n()) {
            prop_assert_eq!(a.set_zero(&params), b.clone());
        }
        for (a, b) in full.normal_forms.iter().zip(&cold.normal_forms) {
            prop_assert_eq!(a.map(|c| c.set_zero(&params)), b.clone());
        }
    }
}

#[test]
fn resonant_field_oracle_agrees_with_schouten() {
    let s = LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap();
    let mut r = rng(7);
    let f = resonant_field(&mut r, &s, 1, D, 6);
    assert!(!f.is_zero());
    assert!(s.s_field(0, 1, D).schouten(&f).is_zero());
}
