use ldpcc_core::harness::{compute_ber, error_profile};
use ldpcc_core::windecode::Geometry;
use ldpcc_core::*;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..7, 1usize..5, 1usize..4).prop_map(|(s, j, r)| (s, j, j * r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn base_matrix_is_regular((s, j, k) in shape(), seed in any::<u64>()) {
        let base = build_base_permutation(s, j, k, seed).unwrap();
        prop_assert!(base.matrix.rows().iter().all(|r| r.len() == k));
        prop_assert!(base.matrix.cols().iter().all(|c| c.len() == j));
    }

    #[test]
    fn split_is_a_partition((s, j, k) in shape(), seed in any::<u64>()) {
        let base = build_base_permutation(s, j, k, seed).unwrap();
        let (a, b) = split_ab(&base.matrix, k / j).unwrap();
        for i in 0..base.matrix.n_rows() {
            for c in 0..base.matrix.n_cols() {
                prop_assert!(!(a.get(i, c) && b.get(i, c)));
                prop_assert_eq!(a.get(i, c) || b.get(i, c), base.matrix.get(i, c));
            }
        }
    }

    #[test]
    fn entry_matches_assembly((s, j, k) in shape(), seed in any::<u64>(), t in 1usize..5) {
        let spec = ConvCodeSpec::generate(s, j, k, seed, Some(t)).unwrap();
        let h = assemble_terminated(&spec, t).unwrap();
        for i in 0..h.n_rows() {
            for c in 0..h.n_cols() {
                prop_assert_eq!(spec.entry(i, c), h.get(i, c), "({}, {})", i, c);
            }
            let (lo, hi) = spec.row_span(i);
            prop_assert!(h.row(i).iter().all(|&c| lo <= c && c < hi));
        }
    }

    #[test]
    fn nullspace_vectors_are_codewords((s, j, k) in shape(), seed in any::<u64>(), t in 1usize..4) {
        let spec = ConvCodeSpec::generate(s, j, k, seed, Some(t)).unwrap();
        let h = assemble_terminated(&spec, t).unwrap();
        let ns = gf2_rank_nullspace(&h);
        prop_assert_eq!(ns.basis.len(), h.n_cols() - ns.rank);
        prop_assert!(ns.basis.iter().all(|b| h.is_codeword(b)));
    }

    #[test]
    fn channel_is_deterministic(n in 1usize..400, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = transmit_bsc(&vec![0; n], p, seed).unwrap();
        prop_assert_eq!(&a, &transmit_bsc(&vec![0; n], p, seed).unwrap());
        prop_assert_eq!(a.hamming_distance(), a.flip_positions.len());
        prop_assert!(a.flip_positions.iter().all(|&i| a.received[i] != a.transmitted[i]));
        prop_assert_eq!(ChannelInstance::from_text(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn model_objective_is_hamming_distance(seed in any::<u64>(), bits in proptest::collection::vec(0u8..2, 24)) {
        let spec = ConvCodeSpec::generate(2, 2, 4, seed, Some(3)).unwrap();
        let code = TerminatedCode::new(&spec, 3).unwrap();
        let y = make_instance(&code.h, 0.3, seed).unwrap().received;
        let model = build_exact_model(&code.h, &y).unwrap();
        let distance = bits.iter().zip(&y).filter(|(a, b)| a != b).count() as i64;
        prop_assert_eq!(model.objective_of(&bits), distance);
        let rows_ok = (0..model.n_rows()).all(|r| model.row_satisfied(r, &bits));
        prop_assert_eq!(rows_ok, code.h.is_codeword(&bits));
    }

    #[test]
    fn variant_counts_binaries(seed in any::<u64>(), it in 0usize..6, extra in 0usize..6) {
        let spec = ConvCodeSpec::generate(3, 3, 6, seed, Some(8)).unwrap();
        let code = TerminatedCode::new(&spec, 8).unwrap();
        let g = Geometry::of(&code.spec);
        let w = g.m_s + extra;
        let y = make_instance(&code.h, 0.1, seed).unwrap().received;
        let (rows, cols) = (code.h.n_rows(), code.h.n_cols());
        let pos = WindowPosition::at(it, w, g, rows, cols, DecoderKind::FW.width_rule());
        let fixed: Vec<Option<u8>> = (0..cols).map(|c| (c < pos.left).then_some(0)).collect();
        let binaries = |v| {
            build_window_model(&code.matrix_view(), &y, &pos, v, &fixed).unwrap().count_role(|r| r == VarRole::Binary)
        };
        prop_assert_eq!(binaries(Variant::SomeBinary), g.h_s);
        prop_assert_eq!(binaries(Variant::AllBinary), (g.r * w).min(pos.width));
    }

    #[test]
    fn sliding_z_counts_flipped_bits(seed in any::<u64>(), p in 0.0f64..0.12) {
        let spec = ConvCodeSpec::generate(3, 3, 6, seed, Some(6)).unwrap();
        let code = TerminatedCode::new(&spec, 6).unwrap();
        let inst = make_instance(&code.h, p, seed).unwrap();
        let w = Geometry::of(&code.spec).small_window();
        for v in [Variant::SomeBinary, Variant::AllBinary] {
            let params = DecoderParams::new(DecoderKind::FW, v, w).with_window_budget(SolveBudget::nodes(2_000));
            let r = decode_sliding(&code.matrix_view(), &inst.received, &params).unwrap();
            let z = r.decoded.iter().zip(&inst.received).filter(|(a, b)| a != b).count();
            prop_assert_eq!(r.objective_z, z);
            if r.fallback_activations == 0 {
                prop_assert!(r.feasible && code.h.is_codeword(&r.decoded));
            }
        }
    }

    #[test]
    fn gallager_is_repeatable(seed in any::<u64>(), p in 0.0f64..0.2) {
        let spec = ConvCodeSpec::generate(4, 3, 6, seed, Some(5)).unwrap();
        let code = TerminatedCode::new(&spec, 5).unwrap();
        let y = make_instance(&code.h, p, seed).unwrap().received;
        for alg in [GallagerAlgorithm::A, GallagerAlgorithm::B] {
            let run = || match alg {
                GallagerAlgorithm::A => gallager_a(&code.h, &y, 100).unwrap(),
                GallagerAlgorithm::B => gallager_b(&code.h, &y, 100).unwrap(),
            };
            let first = run();
            prop_assert_eq!(&first, &run());
            prop_assert!(first.iterations <= 100);
            prop_assert_eq!(*first.unsatisfied_history.last().unwrap(), code.h.unsatisfied_rows(&first.decoded));
        }
    }

    #[test]
    fn ber_and_profile_agree(bits in proptest::collection::vec(0u8..2, 1..500)) {
        let zero = vec![0u8; bits.len()];
        let errors = bits.iter().filter(|&&b| b == 1).count();
        let ber = compute_ber(&zero, &bits).unwrap();
        prop_assert!((ber - 100.0 * errors as f64 / bits.len() as f64).abs() < 1e-9);
        prop_assert_eq!(error_profile(&zero, &bits, 100).unwrap().iter().sum::<usize>(), errors);
    }
}
