mod common;

use bshadow::boundary::{
    act, neighborhood_contains, shift, translated_membership, BoundaryPoint, Dsg,
};
use bshadow::group::GroupContext;
use common::*;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(0usize..4, 0..8)
        .prop_map(|v| reduce(&v.iter().map(|&i| LETTERS[i]).collect::<String>()))
}

fn period() -> impl Strategy<Value = String> {
    proptest::collection::vec(0usize..4, 1..4)
        .prop_map(|v| v.iter().map(|&i| LETTERS[i]).collect::<String>())
        .prop_filter("non-trivial period", |p| {
            !reduce(&format!("{p}{p}")).is_empty()
        })
}

fn point(ctx: &GroupContext, prefix: &str, period: &str) -> BoundaryPoint {
    let a = ctx.alphabet();
    BoundaryPoint::periodic(a, &a.parse(prefix).unwrap(), &a.parse(period).unwrap()).unwrap()
}

fn letters(ctx: &GroupContext, x: &BoundaryPoint, n: usize) -> String {
    ctx.alphabet().format(&x.prefix_word(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn action_matches_free_reduction(g in word(), prefix in word(), per in period()) {
        let ctx = GroupContext::free(2);
        let x = point(&ctx, &prefix, &per);
        let gx = act(&ctx.parse(&g).unwrap(), &x, &ctx).unwrap();
        prop_assert_eq!(letters(&ctx, &gx, 24), ray_letters(&g, &prefix, &per, 24));
    }

    #[test]
    fn action_is_a_left_action(g in word(), h in word(), prefix in word(), per in period()) {
        let ctx = GroupContext::free(2);
        let x = point(&ctx, &prefix, &per);
        let (ge, he) = (ctx.parse(&g).unwrap(), ctx.parse(&h).unwrap());
        let lhs = act(&ctx.multiply(&ge, &he).unwrap(), &x, &ctx).unwrap();
        let rhs = act(&ge, &act(&he, &x, &ctx).unwrap(), &ctx).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let back = act(&ctx.inverse(&ge), &lhs, &ctx).unwrap();
        prop_assert_eq!(back, act(&he, &x, &ctx).unwrap());
    }

    #[test]
    fn translated_membership_is_membership_of_the_shift(
        g in word(), p1 in word(), q1 in period(), p2 in word(), q2 in period(), l in 1u32..10, d in 0u32..5,
    ) {
        let ctx = GroupContext::free(2);
        let cert = tree_cert();
        let ge = ctx.parse(&g).unwrap();
        let m = Dsg::Toward(point(&ctx, &p1, &q1));
        let m2 = Dsg::Toward(point(&ctx, &p2, &q2));
        let lhs = translated_membership(&ge, &m, &m2, l, d, &ctx, &cert).unwrap();
        let rhs = neighborhood_contains(&m2, &shift(&ge, &m), l, d, &ctx, &cert).unwrap();
        prop_assert_eq!(lhs, rhs);
        let gx = ray_letters(&g, &p1, &q1, l as usize);
        let y = ray_letters("", &p2, &q2, l as usize);
        let oracle = (1..=l as usize).all(|i| tree_distance(&gx, &y, i - 1) <= d as usize);
        prop_assert_eq!(lhs, oracle);
    }
}
