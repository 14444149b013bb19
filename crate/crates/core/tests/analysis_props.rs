use wci::analysis::{
    adjunction_data, classify, dimca_codim, dimension, is_well_formed, is_weakly_well_formed,
    stratum_intersection, TheoremStatus, WciSpec,
};
use wci::arith::{gcd_all, is_representable};
use wci::poly::{generic_poly, Monomial};
use wci::weights::{singular_strata, Stratum, Weights};

fn ascending(len: usize, max: u64, sum_max: u64) -> Vec<Vec<u64>> {
    fn go(len: usize, min: u64, max: u64, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for a in min..=max.min(left) {
            cur.push(a);
            go(len, a, max, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 1, max, sum_max, &mut Vec::new(), &mut out);
    out
}

fn degree_tuples(k: usize, max: u64) -> Vec<Vec<u64>> {
    ascending(k, max, max * k as u64)
}

/// Every spec with ascending weights (entries <= max_w, sum <= sum_w),
/// k <= max_k and ascending degrees <= max_d.
fn specs(max_w: u64, sum_w: u64, max_k: usize, max_d: u64) -> Vec<WciSpec> {
    let mut out = Vec::new();
    for len in 2..=sum_w as usize {
        for w in ascending(len, max_w, sum_w) {
            let weights = Weights::new(w).unwrap();
            for k in 1..=max_k.min(weights.n()) {
                for d in degree_tuples(k, max_d) {
                    out.push(WciSpec::new(weights.clone(), d).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn well_formed_implies_weakly_well_formed() {
    let all = specs(10, 14, 3, 12);
    assert!(all.len() > 100_000);
    for s in &all {
        let wf = is_well_formed(s).0;
        let weak = is_weakly_well_formed(s).0;
        assert!(!wf || weak, "{s}");
    }
}

#[test]
fn containment_model_agrees_with_dimca() {
    let mut checked = 0;
    for s in specs(8, 12, 3, 12) {
        let Ok(strata) = singular_strata(&s.weights, true) else { continue };
        for l in strata {
            let on: Vec<u64> = l.weights_on(&s.weights).collect();
            let divisible_all_representable = s
                .degrees
                .iter()
                .filter(|&&d| d % l.delta == 0)
                .all(|&d| is_representable(d, &on));
            let x = stratum_intersection(&s, &l).unwrap();
            let unfloored = l.dim as i64 - x.cutting_degrees.len() as i64;
            // a proper meeting: no smaller torus orbit of the stratum beats the naive count
            let proper = x.dim_general == unfloored.max(-1);
            if divisible_all_representable && unfloored >= -1 && proper {
                assert_eq!(dimension(&s) - x.dim_general, dimca_codim(&s, l.delta), "{s} {l:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn containment_is_inherited_by_substrata() {
    for len in 2..=6 {
        for w in ascending(len, 6, 18) {
            let weights = Weights::new(w).unwrap();
            let n = weights.len();
            for k in 1..=2.min(weights.n()) {
                for d in degree_tuples(k, 8) {
                    let s = WciSpec::new(weights.clone(), d).unwrap();
                    for mask in 1u32..(1 << n) {
                        let j: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                        let l = Stratum::new(&weights, &j).unwrap();
                        if !stratum_intersection(&s, &l).unwrap().contained {
                            continue;
                        }
                        for sub in 1..mask {
                            if sub & mask != sub {
                                continue;
                            }
                            let js: Vec<usize> = (0..n).filter(|i| sub >> i & 1 == 1).collect();
                            let ls = Stratum::new(&weights, &js).unwrap();
                            assert!(stratum_intersection(&s, &ls).unwrap().contained, "{s} {j:?} {js:?}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn zero_amplitude_gives_zero_canonical_power() {
    for s in specs(6, 10, 2, 10) {
        let (a, k) = adjunction_data(&s);
        if a == 0 && dimension(&s) > 0 {
            assert_eq!(k, num_rational::BigRational::from_integer(0.into()), "{s}");
        }
    }
}

#[test]
fn quadric_surface_canonical_square() {
    // P^1 x P^1 has K = O(-2, -2) and K^2 = 2 * (-2)(-2) = 8
    let k = |a: i64, b: i64| -> i64 { 2 * a * b };
    let s = WciSpec::parse("1,1,1,1", "2").unwrap();
    let (_, ks) = adjunction_data(&s);
    assert_eq!(ks, num_rational::BigRational::from_integer(k(-2, -2).into()));
}

#[test]
fn smooth_not_well_formed_surface_exposes_non_integral_k2() {
    let r = classify(&WciSpec::parse("1,1,2,2,2", "3,4").unwrap());
    assert!(!r.canonical_self_intersection.is_integer());
    assert!(r.flags.non_integral_canonical_degree);
    let r = classify(&WciSpec::parse("1,1,1,1", "2").unwrap());
    assert!(!r.flags.non_integral_canonical_degree);
}

#[test]
fn general_quartic_misses_the_cone_vertex() {
    // the x2^2 coefficient of every seeded quartic on P(1,1,2) is nonzero
    for seed in 0..20 {
        let f = generic_poly(&[1, 1, 2], 4, 7, seed).unwrap();
        assert!(f.coefficient(&Monomial(vec![0, 0, 2])).is_some());
        assert_eq!(f.to_mod_poly().unwrap().eval(&[0, 0, 1]), f.coefficient(&Monomial(vec![0, 0, 2])).unwrap().as_mod().unwrap());
    }
    let s = WciSpec::parse("1,1,2", "4").unwrap();
    let l = Stratum::new(&s.weights, &[2]).unwrap();
    assert_eq!(stratum_intersection(&s, &l).unwrap().dim_general, -1);
    assert!(is_well_formed(&s).0);
}

#[test]
fn dimca_cross_check_on_the_fourfold_family_member() {
    let s = WciSpec::parse("1,1,2,2,2,2", "3,4").unwrap();
    let l = Stratum::new(&s.weights, &[2, 3, 4, 5]).unwrap();
    let x = stratum_intersection(&s, &l).unwrap();
    assert_eq!(dimension(&s) - x.dim_general, 1);
    assert_eq!(dimca_codim(&s, 2), 1);
}

#[test]
fn theorem_status_structure_holds_everywhere() {
    for s in specs(7, 12, 3, 10) {
        let r = classify(&s);
        assert!(r.structure_violation().is_none(), "{s}");
        if r.theorem_status == TheoremStatus::ImpliesNotQuasismooth {
            assert!(r.dim_x >= 3 && !r.linear_cone && r.weakly_well_formed && !r.well_formed);
        }
        // sanity of the gcd bookkeeping on every reported stratum
        for x in &r.strata {
            let g = gcd_all(x.stratum.indices.iter().map(|&i| s.weights[i]));
            assert_eq!(g, x.stratum.delta);
        }
    }
}
