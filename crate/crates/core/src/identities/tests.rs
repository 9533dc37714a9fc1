use super::*;
use crate::scalar::c;

fn q(v: f64) -> Base {
    Base::new(v).unwrap()
}

fn twelve_point() -> ParameterPoint {
    ParameterPoint::new(q(0.5))
        .with_real(Slot::A, 0.3)
        .with_real(Slot::B, 0.2)
        .with_real(Slot::C, 0.25)
        .with_real(Slot::D, 0.35)
        .with_real(Slot::R, 0.15)
        .with_real(Slot::S, 0.2)
        .with_real(Slot::T, 0.3)
        .with_real(Slot::H, 0.1)
        .with_real(Slot::Beta, 0.25)
        .with_real(Slot::Delta, 0.4)
        .with_real(Slot::Z, 0.45)
}

#[test]
fn registry_is_complete() {
    let reg = registry();
    assert!(reg.specs().len() >= 22);
    for id in [
        "rogers-6w5",
        "ext-rogers",
        "ext-rogers-sub",
        "aw-integral",
        "aw-orthogonality(2,3)",
        "genfunc-d",
        "genfunc-a",
        "nassrallah-rahman",
        "rahman",
        "isv",
        "thm18",
        "thm19",
        "prop41",
        "prop42",
        "thm61",
        "thm68",
        "qgauss",
        "andrews-watson",
    ] {
        assert!(reg.get(id).is_ok(), "{id} missing");
    }
    let mut ids: Vec<&str> = reg.ids().collect();
    let n = ids.len();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), n, "duplicate ids");
    assert_eq!(reg.reductions().len(), 4);
    assert!(matches!(reg.get("nope"), Err(QError::UnknownIdentity(_))));
}

#[test]
fn thm18_and_thm19_at_a_fixed_point() {
    let p = twelve_point();
    let r18 = check("thm18", &p, None).unwrap();
    assert!(r18.pass && r18.relative_error.unwrap() < 1e-10, "{r18:?}");
    let r19 = check("thm19", &p, None).unwrap();
    assert!(r19.pass && r19.relative_error.unwrap() < 1e-11, "{r19:?}");
    let shared = check("thm18-vs-thm19", &p, None).unwrap();
    assert!(shared.pass, "{shared:?}");
}

#[test]
fn derived_alpha_is_rejected() {
    let p = twelve_point().with_real(Slot::Alpha, 0.1);
    match check("thm18", &p, None) {
        Err(QError::Domain(m)) => assert!(m.contains("alpha"), "{m}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn out_of_domain_and_missing_slots() {
    let p = twelve_point().with_real(Slot::A, 1.2);
    match check("thm18", &p, None) {
        Err(QError::Domain(m)) => assert!(m.contains("Thm 1.8 requires max modulus < 1"), "{m}"),
        other => panic!("{other:?}"),
    }
    let mut p = twelve_point();
    p.z = None;
    assert!(check("thm18", &p, None).is_err());
}

#[test]
fn small_closed_forms() {
    let p = ParameterPoint::new(q(0.5))
        .with_real(Slot::A, 0.3)
        .with_real(Slot::B, 0.4)
        .with_real(Slot::C, 0.05);
    assert!(check("qgauss", &p, None).unwrap().pass);
    let p = ParameterPoint::new(q(0.3)).with_real(Slot::Alpha, 0.4).with_n(5);
    let r = check("verma-jain", &p, None).unwrap();
    assert_eq!(r.rhs_value, Some(c(0.0)));
    assert!(r.pass);
}

#[test]
fn transformation_with_degenerate_sequences() {
    // A_n = 0^n = delta_{n,0}: both sides collapse to the prefactor terms
    let p = ParameterPoint::new(q(0.5))
        .with_real(Slot::Alpha, 0.3)
        .with_real(Slot::U, 0.6)
        .with_real(Slot::V, 0.7)
        .with_real(Slot::Z, 0.0);
    let r = check("prop41", &p, None).unwrap();
    assert!(r.pass, "{r:?}");
    let zero = |_k: usize| c(0.0);
    let l = formulas::prop41_lhs(c(0.3), c(0.6), c(0.7), q(0.5), &zero).unwrap();
    let rr = formulas::prop41_rhs(c(0.3), c(0.6), c(0.7), q(0.5), &zero).unwrap();
    assert_eq!(l.value, c(0.0));
    assert!(rr.value.norm() < 1e-300);
}

#[test]
fn reductions_hold() {
    let reg = registry();
    let aw = ParameterPoint::new(q(0.7))
        .with_real(Slot::A, 0.3)
        .with_real(Slot::B, 0.2)
        .with_real(Slot::C, 0.4)
        .with_real(Slot::D, 0.1);
    let r = reduce_check("thm18", "aw-integral", &aw, None).unwrap();
    assert!(r.pass, "{r:?}");
    let five = ParameterPoint::new(q(0.3))
        .with_real(Slot::A, 0.3)
        .with_real(Slot::B, 0.2)
        .with_real(Slot::C, 0.4)
        .with_real(Slot::U, 0.45)
        .with_real(Slot::V, 0.35);
    for red in reg.reductions().iter().filter(|r| r.child != "aw-integral") {
        let rep = reduce_check_with(red, &five, None).unwrap();
        assert!(rep.pass, "{}: {rep:?}", red.name);
    }
    assert!(reduce_check("rahman", "thm18", &five, None).is_err());
}

#[test]
fn sampled_points_are_valid_and_reproducible() {
    for spec in registry().specs() {
        let a = sample_point(spec, q(0.5), 9, 3, Profile::Complex, 0.5).unwrap();
        let b = sample_point(spec, q(0.5), 9, 3, Profile::Complex, 0.5).unwrap();
        assert_eq!(a, b, "{}", spec.id);
        spec.validate(&a).unwrap();
    }
}

#[test]
fn experimental_flag_near_the_boundary() {
    let p = twelve_point().with_real(Slot::Z, 0.97);
    let r = check("thm19", &p, None).unwrap();
    assert!(r.experimental && r.heuristic);
    assert!(!check("thm19", &twelve_point(), None).unwrap().experimental);
}
