use fockqha::fock::{weyl_matrix, FockTruncation};
use fockqha::gelfand::{lattice_grid_symbol, LatticeData, TorusPoint};
use fockqha::fock::quadrature::QuadratureSpec;
use fockqha::io::{lattice_csv, GroupFile, OperatorDump, SymbolFile};
use fockqha::subgroup::{annihilator, classify, equal};
use fockqha::{sampling, ClosedSubgroup32, Error, PhasePoint, PhasePoint32};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn group_files_round_trip(seed in any::<u64>()) {
        let g = sampling::random_group(&mut sampling::rng(seed), 2);
        let text = serde_json::to_string(&GroupFile::from_group(&g)).unwrap();
        let back = GroupFile::parse(&text).unwrap().to_group().unwrap();
        prop_assert!(equal(&g, &back, 1e-12).unwrap());
        let once = GroupFile::normalize(&text).unwrap();
        prop_assert_eq!(GroupFile::normalize(&once).unwrap(), once);
    }
}

#[test]
fn operator_dump_is_exact() {
    let t = FockTruncation::new(2, 5).unwrap();
    let a = weyl_matrix(&PhasePoint::new(vec![0.3, -0.1, 0.7, 0.2]).unwrap(), &t).unwrap();
    let text = serde_json::to_string(&OperatorDump::from_operator(&a)).unwrap();
    let back = OperatorDump::parse(&text).unwrap().to_operator().unwrap();
    assert_eq!(back.mat, a.mat);
}

#[test]
fn operator_dump_rejects_wrong_order_and_size() {
    let t = FockTruncation::new(1, 3).unwrap();
    let mut dump = OperatorDump::from_operator(&weyl_matrix(&PhasePoint::zero(1), &t).unwrap());
    dump.order = "lex".into();
    assert!(matches!(dump.to_operator(), Err(Error::InvalidInput(_))));
    dump.order = "grlex".into();
    dump.data.pop();
    assert!(matches!(dump.to_operator(), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn malformed_inputs_are_invalid() {
    for s in ["{", r#"{"d": 1, "vector_basis": [[1.0]]}"#, r#"{"d": 1, "extra": 0}"#] {
        let e = GroupFile::parse(s).and_then(|f| f.to_group()).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{s}: {e}");
    }
    let e = SymbolFile::parse(r#"{"type": "horizontal", "profile": "cos", "d": 1, "coord": 1}"#)
        .and_then(|f| f.to_symbol())
        .unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn lattice_csv_is_deterministic() {
    let f = SymbolFile::parse(r#"{"type": "weyl_symbol", "w": [1.7724538509055159, 0.0]}"#).unwrap().to_symbol().unwrap();
    let grid = TorusPoint::grid(3);
    let q = QuadratureSpec::default().uncertified();
    let run = || {
        let vals = lattice_grid_symbol(&f, &grid, &q, &LatticeData::default());
        lattice_csv(&grid.iter().cloned().zip(vals).collect::<Vec<_>>())
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.lines().count(), 1 + grid.len());
}

#[test]
fn single_precision_geometry() {
    let s = std::f32::consts::PI.sqrt();
    let g = ClosedSubgroup32::lattice(
        1,
        vec![PhasePoint32::new(vec![s, 0.0]).unwrap(), PhasePoint32::new(vec![0.0, s]).unwrap()],
    )
    .unwrap();
    let r = classify(&g).unwrap();
    assert!(r.algebra_commutative && r.is_lagrangian);
    let ann = annihilator(&g).unwrap();
    assert!(equal(&ann.cast::<f64>(), &g.cast::<f64>(), 1e-5).unwrap());
}
