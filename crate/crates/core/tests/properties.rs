//! Property-based invariants of the quiver model, the text format, the
//! syzygy computations, and the invariant layer, checked over fuzzed and
//! exhaustively enumerated small quivers.

use proptest::prelude::*;

use deloop_core::dsl::{self, QuiverDocument};
use deloop_core::invariants::{
    certificate_is_sound, dell_algebra, dell_simple, dell_simple_support_oracle, full_report,
    s_invariant, simple_dual_nonzero,
};
use deloop_core::quiver::{Arrow, Valuation, ValuedQuiver, VertexId};
use deloop_core::syzygy::{
    pdim_simple, syzygy_power, syzygy_power_oracle, ExtendedNat, Side, SyzygyError,
};
use deloop_core::verify::{check_dell_monotone, check_duality, check_main_theorem, enumerate_digraphs};

fn v(i: usize) -> VertexId {
    VertexId::new(i)
}

/// Random valid quiver: up to `max_vertices`, each ordered pair present with
/// probability ~0.35, valuation components in `1..=max_val`.
fn arb_quiver(max_vertices: usize, max_val: u64) -> impl Strategy<Value = ValuedQuiver> {
    (1..=max_vertices).prop_flat_map(move |n| {
        proptest::collection::vec(
            proptest::option::weighted(0.35, (1..=max_val, 1..=max_val)),
            n * n,
        )
        .prop_map(move |cells| {
            let arrows = cells.into_iter().enumerate().filter_map(|(i, val)| {
                val.map(|(h, t)| {
                    Arrow::with_valuation(
                        VertexId::new(i / n + 1),
                        VertexId::new(i % n + 1),
                        Valuation::new(h, t),
                    )
                })
            });
            ValuedQuiver::new(n, arrows)
        })
    })
}

/// All directed paths with exactly `len` arrows, as vertex sequences.
fn paths_of_length(q: &ValuedQuiver, len: usize) -> Vec<Vec<VertexId>> {
    let mut paths: Vec<Vec<VertexId>> = q.vertices().map(|u| vec![u]).collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &paths {
            let last = *p.last().expect("nonempty");
            for a in q.arrows() {
                if a.tail == last {
                    let mut ext = p.clone();
                    ext.push(a.head);
                    next.push(ext);
                }
            }
        }
        paths = next;
    }
    paths
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn opposite_is_an_involution(q in arb_quiver(6, 3)) {
        prop_assert_eq!(q.opposite().opposite(), q);
    }

    #[test]
    fn opposite_swaps_source_and_sink(q in arb_quiver(6, 3)) {
        let op = q.opposite();
        for u in q.vertices() {
            let class = q.classify_vertex(u).unwrap();
            let swapped = op.classify_vertex(u).unwrap();
            prop_assert_eq!(class.is_source, swapped.is_sink);
            prop_assert_eq!(class.is_sink, swapped.is_source);
        }
    }

    #[test]
    fn down_length_undefined_iff_reachable_component_has_internal_arrow(q in arb_quiver(6, 1)) {
        // A strongly connected component has an internal arrow exactly when
        // it has two or more vertices or a loop at its single vertex.
        let comps = q.strongly_connected_components();
        for u in q.vertices() {
            let reach = q.down_set(u).unwrap();
            let cyclic_reachable = comps.iter().any(|comp| {
                let internal = comp.len() > 1
                    || q.arrow(comp[0], comp[0]).is_some();
                internal && comp.iter().any(|w| reach.contains(w))
            });
            prop_assert_eq!(q.down_length(u).unwrap().is_none(), cyclic_reachable);
        }
    }

    #[test]
    fn orbit_reconstruction_matches_direct_powers(q in arb_quiver(5, 1)) {
        let orbit = q.bool_power_orbit();
        let a = q.adjacency_matrix();
        let mut direct = deloop_core::BoolMatrix::identity(q.vertex_count());
        for n in 1..=orbit.preperiod() + 2 * orbit.period() {
            direct = direct.multiply(&a);
            prop_assert_eq!(orbit.power(n), &direct);
        }
    }

    #[test]
    fn power_entries_are_path_existence(q in arb_quiver(4, 1), n in 0usize..=6) {
        let orbit = q.bool_power_orbit();
        let paths = paths_of_length(&q, n);
        for from in q.vertices() {
            for to in q.vertices() {
                let exists = paths.iter().any(|p| p[0] == from && *p.last().unwrap() == to);
                prop_assert_eq!(orbit.power(n).entry(from, to), exists);
            }
        }
    }

    #[test]
    fn parse_of_serialize_reproduces_the_quiver(q in arb_quiver(7, 4)) {
        let doc = QuiverDocument::from_quiver(q.clone());
        let reparsed = dsl::parse(&dsl::serialize(&doc)).unwrap();
        prop_assert_eq!(reparsed.quiver, q);
    }

    #[test]
    fn syzygy_power_matches_path_enumeration(q in arb_quiver(6, 3), n in 0usize..=5) {
        for u in q.vertices() {
            for side in [Side::Right, Side::Left] {
                match syzygy_power_oracle(&q, side, u, n) {
                    Ok(slow) => {
                        let fast = syzygy_power(&q, side, u, n).unwrap();
                        prop_assert_eq!(fast, slow);
                    }
                    Err(SyzygyError::PathBudgetExceeded { .. }) => {}
                    Err(err) => return Err(TestCaseError::fail(err.to_string())),
                }
            }
        }
    }

    #[test]
    fn left_syzygies_are_right_syzygies_of_the_opposite(q in arb_quiver(6, 3), n in 0usize..=5) {
        let op = q.opposite();
        for u in q.vertices() {
            prop_assert_eq!(
                syzygy_power(&q, Side::Left, u, n).unwrap(),
                syzygy_power(&op, Side::Right, u, n).unwrap()
            );
        }
    }

    #[test]
    fn syzygy_support_matches_matrix_power_column(q in arb_quiver(6, 3), n in 0usize..=6) {
        let orbit = q.bool_power_orbit();
        for i in q.vertices() {
            let support: Vec<VertexId> =
                syzygy_power(&q, Side::Right, i, n).unwrap().support().collect();
            let column: Vec<VertexId> = q
                .vertices()
                .filter(|j| orbit.power(n).entry(*j, i))
                .collect();
            prop_assert_eq!(support, column);
        }
    }

    #[test]
    fn left_pdim_agrees_with_down_length(q in arb_quiver(6, 3)) {
        for j in q.vertices() {
            let graph_side = q
                .down_length(j)
                .unwrap()
                .map_or(ExtendedNat::Infinite, ExtendedNat::Finite);
            prop_assert_eq!(pdim_simple(&q, Side::Left, j).unwrap(), graph_side);
        }
    }

    #[test]
    fn dell_agrees_with_support_oracle(q in arb_quiver(6, 3)) {
        for u in q.vertices() {
            prop_assert_eq!(
                dell_simple(&q, u).unwrap().level,
                dell_simple_support_oracle(&q, u).unwrap()
            );
        }
    }

    #[test]
    fn dell_level_zero_iff_simple_embeds_in_a_projective(q in arb_quiver(6, 3)) {
        for u in q.vertices() {
            prop_assert_eq!(
                dell_simple(&q, u).unwrap().level == ExtendedNat::Finite(0),
                simple_dual_nonzero(&q, Side::Right, u).unwrap()
            );
        }
    }

    #[test]
    fn s_invariant_agrees_with_syzygy_iteration(q in arb_quiver(6, 3)) {
        let s = s_invariant(&q);
        let best_finite = q
            .vertices()
            .filter_map(|j| pdim_simple(&q, Side::Left, j).unwrap().finite())
            .max();
        prop_assert_eq!(s.value, best_finite);
        for &(j, len) in &s.witnesses {
            prop_assert_eq!(q.down_length(j).unwrap(), Some(len));
            prop_assert_eq!(Some(len), s.value);
        }
    }

    #[test]
    fn certificates_revalidate(q in arb_quiver(6, 3)) {
        for u in q.vertices() {
            let cert = dell_simple(&q, u).unwrap();
            prop_assert!(certificate_is_sound(&q, &cert));
        }
    }

    #[test]
    fn invariants_ignore_valuations(q in arb_quiver(6, 1), reval in proptest::collection::vec((1u64..=5, 1u64..=5), 64)) {
        let revalued = ValuedQuiver::new(
            q.vertex_count(),
            q.arrows().iter().zip(reval).map(|(a, (h, t))| {
                Arrow::with_valuation(a.tail, a.head, Valuation::new(h, t))
            }),
        );
        let before = full_report(&q);
        let after = full_report(&revalued);
        prop_assert_eq!(before.s, after.s);
        prop_assert_eq!(before.findim_left_big, after.findim_left_big);
        prop_assert_eq!(before.dell_algebra, after.dell_algebra);
        for u in q.vertices() {
            prop_assert_eq!(
                before.dell_per_simple[&u].level,
                after.dell_per_simple[&u].level
            );
        }
    }

    #[test]
    fn dell_is_bounded_by_s_plus_one(q in arb_quiver(7, 3)) {
        let s = s_invariant(&q);
        let dell = dell_algebra(&q);
        match s.value {
            Some(s_val) => prop_assert!(dell <= ExtendedNat::Finite(s_val + 1)),
            None => prop_assert_eq!(dell, ExtendedNat::Finite(0)),
        }
    }

    #[test]
    fn duality_check_mirrors_main_theorem_on_the_opposite(q in arb_quiver(5, 2)) {
        prop_assert_eq!(
            check_duality(&q).passed(),
            check_main_theorem(&q.opposite()).passed()
        );
    }
}

#[test]
fn dell_condition_is_monotone_on_all_three_vertex_digraphs() {
    let mut cases = 0;
    for q in enumerate_digraphs(3).expect("within guard") {
        assert!(check_dell_monotone(&q).passed(), "{}", dsl::serialize(&QuiverDocument::from_quiver(q)));
        cases += 1;
    }
    assert_eq!(cases, 512);
}

#[test]
fn bare_line_collapse_matches_explicit_valuation_semantics() {
    // k parallel arrows declared bare behave like one arrow valued (k,k).
    for k in 1u64..=3 {
        let bare = dsl::parse(&format!("vertices 2\n{}", "1 -> 2\n".repeat(k as usize))).unwrap();
        let explicit = dsl::parse(&format!("vertices 2\n1 -> 2 ({k},{k})")).unwrap();
        assert_eq!(bare.quiver, explicit.quiver);
        let step = syzygy_power(&bare.quiver, Side::Right, v(2), 1).unwrap();
        assert_eq!(step.count(v(1)), k.into());
    }
}
