mod common;

use common::*;
use lambda_graphs::fo::is_lambda_term_graph;
use lambda_graphs::sharing::{
    are_bisimilar, coarsest_bisimulation, collapse, find_homomorphism, is_homomorphism,
    lift_homomorphism, max_share_fo, max_share_ho, merge_closure, quotient, Partition,
    SharingError,
};
use lambda_graphs::transform::{prefix_to_scope, scope_to_prefix, strip_delimiters};
use lambda_graphs::translate::term_to_graph;
use lambda_graphs::{EagerMode, FoLambdaGraph, HoTermGraph, TermGraph, VertexId, VertexMap};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A random congruence between the identity and the coarsest bisimulation.
fn random_coarsening(rng: &mut StdRng, g: &TermGraph) -> Partition {
    let coarsest = coarsest_bisimulation(g);
    let pairs: Vec<(VertexId, VertexId)> = g
        .vertices()
        .flat_map(|u| g.vertices().map(move |w| (u, w)))
        .filter(|&(u, w)| u < w && coarsest.same_block(u, w))
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    merge_closure(g, &pairs).expect("bisimilar vertices share labels")
}

fn as_map(h: &VertexMap) -> Vec<usize> {
    h.as_slice().iter().map(|v| v.0).collect()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn collapse_matches_oracle(seed in any::<u64>()) {
        let g = random_graph(&mut StdRng::seed_from_u64(seed), 7);
        let expected = Partition::new(coarsest_bisimulation_oracle(&g));
        prop_assert_eq!(coarsest_bisimulation(&g), expected);
    }

    #[test]
    fn collapse_is_idempotent_and_minimal(seed in any::<u64>()) {
        let g = random_graph(&mut StdRng::seed_from_u64(seed), 10);
        let (c, h) = collapse(&g);
        prop_assert!(is_homomorphism(&h, &g, &c));
        let (cc, hh) = collapse(&c);
        prop_assert_eq!(cc.len(), c.len());
        prop_assert!(hh.is_injective());
        prop_assert_eq!(coarsest_bisimulation(&c), Partition::discrete(c.len()));
        prop_assert!(are_bisimilar(&g, &c));
    }

    #[test]
    fn homomorphisms_match_enumeration(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g1 = random_graph(&mut rng, 5);
        // a homomorphic image, or an unrelated graph
        let g2 = if rng.gen_bool(0.7) {
            let part = random_coarsening(&mut rng, &g1);
            quotient(&g1, &part).unwrap().0
        } else {
            random_graph(&mut rng, 5)
        };
        let all = all_homomorphisms(&g1, &g2);
        prop_assert!(all.len() <= 1);
        prop_assert_eq!(find_homomorphism(&g1, &g2).map(|h| as_map(&h)), all.first().cloned());
    }

    #[test]
    fn quotients_of_fully_back_linked_graphs_stay_in_class(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = rng.gen_range(1..=6);
        let f = term_to_graph(&random_term(&mut rng, depth, 4)).unwrap();
        let g = f.graph();
        let part = random_coarsening(&mut rng, g);
        let (q, h) = quotient(g, &part).unwrap();
        let fq = FoLambdaGraph::new(q).unwrap();
        prop_assert!(fq.is_fully_back_linked());
        prop_assert_eq!(fq.is_eager_scope(EagerMode::Exempt), Ok(true));
        // prefix images agree wherever h identifies vertices
        for v in g.vertices() {
            prop_assert_eq!(h.map_word(f.prefix(v)), fq.prefix(h.get(v)).to_vec());
        }
        prop_assert!(lift_homomorphism(&h, &f, &fq));
    }

    #[test]
    fn max_share_commutes_with_the_higher_order_view(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let depth = rng.gen_range(1..=5);
        let f = term_to_graph(&random_term(&mut rng, depth, 3)).unwrap();
        let h = prefix_to_scope(&strip_delimiters(&f));
        let shared_ho = max_share_ho(&h, EagerMode::Exempt).unwrap();
        let shared_fo = max_share_fo(&f, EagerMode::Exempt).unwrap();
        let via_fo = prefix_to_scope(&strip_delimiters(&shared_fo));
        prop_assert!(shared_ho.graph().isomorphic(via_fo.graph()).is_some());
        // the projection onto the shared graph lifts to the annotated graphs
        let proj = find_homomorphism(h.graph(), shared_ho.graph()).unwrap();
        prop_assert!(lift_homomorphism(&proj, &h, &shared_ho));
        prop_assert!(lift_homomorphism(&proj, &scope_to_prefix(&h), &scope_to_prefix(&shared_ho)));
    }
}

#[test]
fn non_closure_over_nameless_variants() {
    for j in 1..=2 {
        let g2 = fixture(&format!("debruijn_g2_0{j}.tg")).graph;
        let g1 = fixture(&format!("debruijn_g1_0{j}.tg")).graph;
        let g0 = fixture(&format!("debruijn_g0_0{j}.tg")).graph;
        assert!(is_lambda_term_graph(&g2) && is_lambda_term_graph(&g0));
        assert!(!is_lambda_term_graph(&g1));
        assert!(find_homomorphism(&g2, &g1).is_some());
        assert!(find_homomorphism(&g1, &g0).is_some());
        assert!(find_homomorphism(&g0, &g2).is_none());
        let (c, _) = collapse(&g2);
        assert!(c.isomorphic(&g0).is_some());
    }
}

#[test]
fn non_closure_of_lazy_graphs_with_delimiters() {
    for j in 1..=2 {
        let g1 = fixture(&format!("nonclosure_1{j}_g1.tg")).graph;
        let g0 = fixture(&format!("nonclosure_1{j}_g0.tg")).graph;
        let f1 = FoLambdaGraph::new(g1.clone()).unwrap();
        assert_eq!(f1.is_eager_scope(EagerMode::Exempt), Ok(false));
        let (c, _) = collapse(&g1);
        assert!(c.isomorphic(&g0).is_some());
        assert!(!is_lambda_term_graph(&g0));
        // maximal sharing refuses input without eager scope
        assert!(matches!(
            max_share_fo(&f1, EagerMode::Exempt),
            Err(SharingError::NotEagerScope(_))
        ));
    }
}

#[test]
fn converse_non_closure() {
    let g1 = fixture("converse_g1.tg").graph;
    let g0 = fixture("converse_g0.tg").graph;
    assert!(find_homomorphism(&g1, &g0).is_some());
    assert!(lambda_graphs::ho::admits_prefix_function(&g0)
        .unwrap()
        .is_some());
    assert!(lambda_graphs::ho::admits_prefix_function(&g1)
        .unwrap()
        .is_none());
}

#[test]
fn identity_pair_collapses_to_shared_identity() {
    let tree = fixture("identity_tree.tg").graph;
    let shared = fixture("identity_shared.tg").graph;
    let (c, h) = collapse(&tree);
    assert!(c.isomorphic(&shared).is_some());
    assert_eq!(
        h.get(tree.vertex("b").unwrap()),
        h.get(tree.vertex("d").unwrap())
    );
    let f = FoLambdaGraph::new(tree).unwrap();
    assert_eq!(
        max_share_fo(&f, EagerMode::Exempt).unwrap().graph().len(),
        3
    );
}

#[test]
fn lifting_scopes_through_the_identity_pair() {
    let tree = fixture("identity_tree.tg").graph;
    let shared = fixture("identity_shared.tg").graph;
    let h = find_homomorphism(&tree, &shared).unwrap();
    let to_ho =
        |g: &TermGraph| prefix_to_scope(&strip_delimiters(&FoLambdaGraph::new(g.clone()).unwrap()));
    let (x1, x0): (HoTermGraph, HoTermGraph) = (to_ho(&tree), to_ho(&shared));
    assert!(lift_homomorphism(&h, &x1, &x0));
}
