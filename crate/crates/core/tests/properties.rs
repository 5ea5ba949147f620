use proptest::prelude::*;

use jetinv::embed::{phi, plucker_of_jet, projective_equal};
use jetinv::group::{compose, group_matrix, invert};
use jetinv::invariants::{act_on_poly, invariant_basis};
use jetinv::jets::{act, orbit_dim, stabilizer_algebra};
use jetinv::lie::{adjoint_conjugation, bracket, lie_basis};
use jetinv::rational::frac;
use jetinv::sampling::Sampler;
use jetinv::{Rational, Reparam};

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(p, q)| frac(p, q))
}

fn reparam(k: usize) -> impl Strategy<Value = Reparam> {
    (
        rational().prop_filter("a_1 != 0", |a| *a != frac(0, 1)),
        proptest::collection::vec(rational(), k - 1),
    )
        .prop_map(|(a1, rest)| {
            let mut c = vec![a1];
            c.extend(rest);
            Reparam::new(c).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_of_inverse_is_inverse_matrix(f in reparam(5)) {
        let m = group_matrix(&f).matrix;
        let inv = group_matrix(&invert(&f).unwrap()).matrix;
        prop_assert_eq!(Some(inv), m.inverse());
    }

    #[test]
    fn action_on_invariants_is_a_right_action(f in reparam(3), g in reparam(3)) {
        // substituting Ξ ↦ Ξ·M(g) then Ξ ↦ Ξ·M(f) equals one substitution by
        // M(f∘g) = M(f)M(g); checked on the basis of E_{3,4}, n=1
        for p in invariant_basis(3, 1, 4).unwrap().basis {
            let two_step = act_on_poly(&act_on_poly(&p, &g).unwrap(), &f).unwrap();
            let one_step = act_on_poly(&p, &compose(&f, &g).unwrap()).unwrap();
            prop_assert_eq!(two_step, one_step);
        }
    }

    #[test]
    fn ad_respects_bracket(g in reparam(4)) {
        let b = lie_basis(4);
        for x in &b {
            for y in &b {
                let lhs = adjoint_conjugation(&g, &bracket(x, y).unwrap()).unwrap();
                let rhs = bracket(
                    &adjoint_conjugation(&g, x).unwrap(),
                    &adjoint_conjugation(&g, y).unwrap(),
                ).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn orbit_data_and_embedding_are_constant_on_orbits() {
    let mut s = Sampler::new(77, 9);
    for k in 1..=3 {
        for n in 1..=3 {
            for _ in 0..5 {
                let j = s.regular_jet(n, k);
                let g = s.reparam(k);
                let moved = act(&j, &g).unwrap();
                assert_eq!(orbit_dim(&moved), orbit_dim(&j));
                assert_eq!(stabilizer_algebra(&moved).dim(), stabilizer_algebra(&j).dim());
                assert!(projective_equal(&plucker_of_jet(&moved).unwrap(), &plucker_of_jet(&j).unwrap()).unwrap());
                // the first column of φ only picks up the factor a_1
                let a1 = &g.coeffs()[0];
                assert_eq!(phi(&moved)[0], phi(&j)[0].scale(a1));
            }
        }
    }
}
