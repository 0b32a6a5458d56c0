use hkcoeff::ring_linalg::{double_dual_map, howell_form, solve_linear, Matrix, ModuleMap, PresentedModule, Zm};
use proptest::prelude::*;

fn matrix_strategy(moduli: &'static [u64], max_dim: usize) -> impl Strategy<Value = Matrix> {
    (proptest::sample::select(moduli), 1..=max_dim, 1..=max_dim).prop_flat_map(|(m, r, c)| {
        proptest::collection::vec(0..m, r * c)
            .prop_map(move |data| Matrix::from_vec(Zm::new(m).unwrap(), r, c, data).unwrap())
    })
}

/// Random unimodular matrix as a product of elementary operations.
fn unimodular(ring: Zm, n: usize, ops: &[(usize, usize, u64)]) -> Matrix {
    let mut u = Matrix::identity(ring, n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = Matrix::identity(ring, n);
        e.set(i, j, ring.reduce(c));
        u = e.mul(&u).unwrap();
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn howell_is_idempotent_and_canonical(
        a in matrix_strategy(&[4, 8, 9], 4),
        ops in proptest::collection::vec((0usize..4, 0usize..4, 0u64..9), 0..8),
    ) {
        let h = howell_form(&a);
        prop_assert_eq!(howell_form(&h), h.clone());
        let u = unimodular(a.ring(), a.rows(), &ops);
        let b = u.mul(&a).unwrap();
        prop_assert_eq!(howell_form(&b), h);
    }

    #[test]
    fn solve_round_trip(a in matrix_strategy(&[4, 6, 8, 9, 12], 5), seed in proptest::collection::vec(0u64..100, 5)) {
        let ring = a.ring();
        let x: Vec<u64> = seed[..a.rows()].iter().map(|&v| ring.reduce(v)).collect();
        let b = a.apply(&x);
        let sol = solve_linear(&a, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.apply(&sol.particular), b);
        for k in sol.kernel.row_iter() {
            prop_assert!(a.apply(k).iter().all(|&e| e == 0));
        }
    }

    #[test]
    fn kernel_times_image_is_domain(
        rel in matrix_strategy(&[4, 6, 8], 3),
        f in proptest::collection::vec(0u64..8, 9),
    ) {
        let ring = rel.ring();
        let n = rel.cols();
        let dom = PresentedModule::new(n, &rel).unwrap();
        prop_assume!(dom.cardinality().unwrap() <= 256);
        let cod = PresentedModule::free(ring, 3);
        let mat = Matrix::from_vec(ring, n, 3, f[..n * 3].to_vec()).unwrap();
        // Relations of the domain must map to zero in a free codomain; force it
        // by composing with the relation-killing quotient.
        let (cod, _) = cod.quotient(&rel.mul(&mat).unwrap()).unwrap();
        let map = ModuleMap::new(dom.clone(), cod, mat).unwrap();
        let elems = dom.elements();
        let ker = elems.iter().filter(|v| map.apply(v).iter().all(|&e| e == 0)).count() as u128;
        let img: std::collections::BTreeSet<Vec<u64>> = elems.iter().map(|v| map.apply(v)).collect();
        prop_assert_eq!(map.kernel_order().to_u128(), Some(ker));
        prop_assert_eq!(map.image_order().to_u128(), Some(img.len() as u128));
        prop_assert_eq!(ker * img.len() as u128, elems.len() as u128);
    }

    #[test]
    fn double_dual_evaluation_is_iso(rel in matrix_strategy(&[4, 8, 9, 12], 3)) {
        let m = PresentedModule::new(rel.cols(), &rel).unwrap();
        prop_assume!(m.cardinality().unwrap() <= 256);
        prop_assert!(double_dual_map(&m).unwrap().is_isomorphism());
    }
}
