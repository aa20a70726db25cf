//! Wire formats are part of the contract: exact JSON shapes for the core
//! types, round-trips, and validation on the way back in.

use koenigslab_core::disc::TaylorSeries;
use koenigslab_core::series::DirichletSeries;
use koenigslab_core::shifts::WeightFamily;
use koenigslab_core::symbols::Symbol;
use koenigslab_core::verdict::{Status, Verdict};
use koenigslab_core::Cplx;

#[test]
fn symbol_json_shape() {
    let phi = Symbol::affine(2, Cplx::new(1.0, -0.5), 4);
    let json = serde_json::to_string(&phi).unwrap();
    assert_eq!(json, r#"{"c0":2,"psi":{"trunc":4,"coeffs":[[1,1.0,-0.5]]}}"#);
    let back: Symbol = serde_json::from_str(&json).unwrap();
    assert_eq!(back, phi);
}

#[test]
fn dirichlet_series_is_sparse_on_the_wire() {
    let mut f = DirichletSeries::zero(8);
    f.set_coeff(3, Cplx::new(0.0, 2.0)).unwrap();
    let json = serde_json::to_string(&f).unwrap();
    assert_eq!(json, r#"{"trunc":8,"coeffs":[[3,0.0,2.0]]}"#);
    let back: DirichletSeries = serde_json::from_str(&json).unwrap();
    assert_eq!(back, f);
    // an index beyond the truncation is refused with its position named
    let err = serde_json::from_str::<DirichletSeries>(
        r#"{"trunc":8,"coeffs":[[9,1.0,0.0]]}"#,
    )
    .unwrap_err()
    .to_string();
    assert!(err.contains('9'), "diagnostic should name the index: {err}");
}

#[test]
fn taylor_series_round_trips() {
    let mut f = TaylorSeries::zero(6);
    f.set_coeff(0, Cplx::new(1.5, 0.0)).unwrap();
    f.set_coeff(6, Cplx::new(0.0, -1.0)).unwrap();
    let json = serde_json::to_string(&f).unwrap();
    assert_eq!(json, r#"{"trunc":6,"coeffs":[[0,1.5,0.0],[6,0.0,-1.0]]}"#);
    let back: TaylorSeries = serde_json::from_str(&json).unwrap();
    assert_eq!(back, f);
}

#[test]
fn weight_family_round_trips_with_validation() {
    let fam: WeightFamily =
        serde_json::from_str(r#"{"K":1,"blocks":{"2":[[0.5,0.0],[0.25,0.0]]}}"#).unwrap();
    assert_eq!(fam.k(), 1);
    assert_eq!(fam.labels(), vec![2]);
    assert_eq!(
        serde_json::to_string(&fam).unwrap(),
        r#"{"K":1,"blocks":{"2":[[0.5,0.0],[0.25,0.0]]}}"#
    );
    // zero weights never deserialize
    assert!(
        serde_json::from_str::<WeightFamily>(r#"{"K":1,"blocks":{"2":[[0.5,0.0],[0.0,0.0]]}}"#)
            .is_err()
    );
}

#[test]
fn verdict_statuses_serialize_screaming() {
    for (status, text) in [
        (Status::Pass, "\"PASS\""),
        (Status::Fail, "\"FAIL\""),
        (Status::NotApplicable, "\"NOT_APPLICABLE\""),
        (Status::Undetermined, "\"UNDETERMINED\""),
    ] {
        assert_eq!(serde_json::to_string(&status).unwrap(), text);
    }
    let v = Verdict::pass("roundtrip").with_q("margin", 0.25);
    let json = serde_json::to_string(&v).unwrap();
    assert!(json.contains("\"status\":\"PASS\""));
    assert!(json.contains("\"margin\":0.25"));
}
