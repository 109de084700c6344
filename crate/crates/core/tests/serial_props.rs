mod common;

use std::collections::BTreeMap;

use common::*;
use pnf_core::pipeline::PoissonJet;
use pnf_core::report::{analyze, check, normalize, AnalyzeOptions, CheckOptions, NormalizeOptions};
use pnf_core::serial::{jet_from_json, jet_to_json, ProblemFile, TermJson};
use pnf_core::LinearFamily;
use proptest::prelude::*;

fn forward_file(seed: u64, d: u32) -> String {
    let mut r = rng(seed);
    let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
    let psi = diffeo(&mut r, 3, 1, d, 3);
    let pj = PoissonJet::new(psi.pushforward(&s.linear_poisson(d)).unwrap(), s).unwrap();
    ProblemFile::from_poisson(&pj, BTreeMap::new()).to_json()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jets_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = jet(&mut r, 2, 2, 5, 6, 0, 5);
        prop_assert_eq!(jet_from_json(&jet_to_json(&f), 2, 2, 5).unwrap(), f);
    }

    #[test]
    fn canonical_files_are_byte_stable(seed in any::<u64>()) {
        let text = forward_file(seed, 4);
        let again = ProblemFile::from_poisson(&ProblemFile::parse(&text).unwrap().to_poisson(None).unwrap(), BTreeMap::new());
        prop_assert_eq!(again.to_json(), text.clone());
        prop_assert_eq!(ProblemFile::parse(&text).unwrap().to_json(), text);
    }

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let text = forward_file(seed, 4);
        let a = analyze(&text, &AnalyzeOptions::default()).to_json();
        prop_assert_eq!(&a, &analyze(&text, &AnalyzeOptions::default()).to_json());
        let n1 = normalize(&text, &NormalizeOptions::default());
        prop_assert!(n1.success(), "{}", n1.summary());
        let n1 = n1.to_json();
        prop_assert_eq!(&n1, &normalize(&text, &NormalizeOptions::default()).to_json());
        let c = check(&text, &n1, Some(&n1), &CheckOptions::default());
        prop_assert!(c.success(), "{}", c.summary());
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let good = forward_file(1, 4);
    assert_eq!(analyze("[1, 2", &AnalyzeOptions::default()).exit_code(), 2);
    // {x1, x2} = x2 x4 on top of a linear structure fails the Jacobi identity
    let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
    let mut bad = ProblemFile::from_poisson(&PoissonJet::new(s.linear_poisson(4), s).unwrap(), BTreeMap::new());
    bad.bracket.insert("1,2".into(), vec![TermJson { monomial: vec![0, 1, 0, 1], re: "1".into(), im: "0".into() }]);
    assert_eq!(normalize(&bad.to_json(), &NormalizeOptions::default()).exit_code(), 3);
    let resonant = ProblemFile::from_poisson(
        &PoissonJet::new(LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap().linear_poisson(4), LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap()).unwrap(),
        BTreeMap::new(),
    )
    .to_json();
    assert_eq!(normalize(&resonant, &NormalizeOptions::default()).exit_code(), 4);
    assert_eq!(normalize(&resonant, &NormalizeOptions { force: true, ..Default::default() }).exit_code(), 0);
    assert_eq!(normalize(&good, &NormalizeOptions::default()).exit_code(), 0);
}
