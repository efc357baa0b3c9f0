//! Constants measured on the genus-2 surface group `<a, b, c, d | abABcdCD>`
//! inside `B(6)`, pinned as regression values.

mod common;

use bshadow::geometry::{certify_delta, certify_morse, QuasiGeodesicParams};
use bshadow::group::GroupContext;
use bshadow::shadowing::{derive_constants, DeriveOptions};
use common::configs;

fn genus_two() -> GroupContext {
    GroupContext::load(&configs().join("groups/genus2.json")).unwrap()
}

#[test]
fn constants() {
    let ctx = genus_two();
    let by_radius: Vec<u32> = (1..=3)
        .map(|r| certify_delta(&ctx, r, 256).unwrap().delta)
        .collect();
    let cert = certify_delta(&ctx, 3, 256).unwrap();
    let morse = certify_morse(&QuasiGeodesicParams::geodesic(), &ctx, 3, 20_000_000, 256).unwrap();
    let k = derive_constants(17, &cert, &ctx, &DeriveOptions::for_group(&ctx, &cert)).unwrap();
    assert_eq!(by_radius, [0, 2, 2]);
    assert!(cert.exact);
    assert_eq!(morse.k, 0);
    assert!(morse.exact);

    assert_eq!((k.delta, k.k, k.epsilon, k.big_k), (2, 17, 4, 2));
    assert_eq!(k.epsilon_by_k, [(17, 4), (18, 4)]);
    assert!(k.divergence_vacuous);
    assert_eq!(k.delta2, 0);
    // the rest follow from the formulas
    let j = (k.k + 1).max(k.big_k + 2 * k.delta + k.l + 1);
    let delta1 = 2 * k.big_k + 1 + 4 * k.delta;
    assert_eq!((k.j, k.c, k.delta1), (j, 2 * j + 1, delta1));
    assert_eq!(k.big_l, (delta1 + 2 + 2 * j).max(j + 1 + k.delta2));
    assert_eq!((k.j, k.delta1, k.big_l), (24, 13, 63));
}

#[test]
fn level_must_exceed_eight_delta() {
    let ctx = genus_two();
    let cert = certify_delta(&ctx, 3, 256).unwrap();
    let err =
        derive_constants(16, &cert, &ctx, &DeriveOptions::for_group(&ctx, &cert)).unwrap_err();
    assert!(matches!(err, bshadow::Error::Precondition(_)), "{err}");
}
