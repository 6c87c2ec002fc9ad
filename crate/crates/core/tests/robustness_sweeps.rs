use proptest::prelude::*;
use xxchain::robustness::*;
use xxchain::teleport::{expected_fidelity, teleport, MeasureMode};
use xxchain::*;

#[test]
fn engineered_chains_reach_a_pure_bell_pair() {
    for n in (3..=41).step_by(2) {
        let r = entanglement_at_t0(&engineered_couplings(n, 1.0).unwrap()).unwrap();
        assert!((r.concurrence - 1.0).abs() < 1e-9, "n={n}");
        assert!(r.residual_norm < 1e-9, "n={n}");
    }
}

#[test]
fn sweeps_agree_across_strategies() {
    let p = engineered_couplings(11, 1.0).unwrap();
    let fam = SweepFamily::RelativeNoise { sigma: 0.05 };
    let seq = sweep_entanglement(&p, &fam, 16, 42, Exec::Sequential).unwrap();
    let par = sweep_entanglement(&p, &fam, 16, 42, Exec::Parallel).unwrap();
    assert_eq!(seq, par);
    let mut csv = Vec::new();
    write_sweep_csv(&seq, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("trial,param,concurrence,residual_norm,expected_fidelity\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn small_noise_keeps_entanglement_high() {
    let p = engineered_couplings(9, 1.0).unwrap();
    let rows = sweep_entanglement(&p, &SweepFamily::RelativeNoise { sigma: 1e-3 }, 100, 1, Exec::default()).unwrap();
    let mean = rows.iter().map(|r| r.concurrence).sum::<f64>() / rows.len() as f64;
    assert!(mean > 0.999 && mean <= 1.0, "mean {mean}");
}

#[test]
fn feasibility_example() {
    let f = feasibility(1e4, 7.3e8).unwrap();
    assert_eq!(f.n_max, 584_000);
    assert_eq!(f.largest_odd_chain, Some(583_999));
    assert!((f.t0 - std::f64::consts::PI * 1e-4).abs() < 1e-18);
    assert!(f.d_max.unwrap() <= 7.3e8);
}

proptest! {
    #[test]
    fn n_max_monotone(mu in 1.0f64..1e5, g in 1.0f64..1e9, k in 1.0f64..10.0) {
        let base = feasibility(mu, g).unwrap().n_max;
        prop_assert!(feasibility(mu, g * k).unwrap().n_max >= base);
        prop_assert!(feasibility(mu * k, g).unwrap().n_max <= base);
    }

    #[test]
    fn noise_is_seed_deterministic(seed in any::<u64>(), sigma in 0.0f64..0.3) {
        let p = engineered_couplings(13, 1.0).unwrap();
        let spec = PerturbationSpec::RelativeNoise { sigma, seed };
        let x = perturb(&p, spec).unwrap();
        let y = perturb(&p, spec).unwrap();
        prop_assert_eq!(x.couplings(), y.couplings());
        prop_assert!(x.couplings().iter().all(|d| *d > 0.0));
    }

    #[test]
    fn perturbed_resources_teleport_sanely(seed in any::<u64>(), sigma in 0.0f64..0.3, k in 1usize..=10) {
        let p = engineered_couplings(2 * k + 1, 1.0).unwrap();
        let q = perturb(&p, PerturbationSpec::RelativeNoise { sigma, seed }).unwrap();
        let r = entanglement_at_t0(&q).unwrap();
        let resource = r.resource.unwrap();
        let (a, b) = PROBE_STATE;
        let recs = teleport(a, b, &resource, MeasureMode::Enumerate).unwrap();
        let total: f64 = recs.iter().map(|x| x.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let f = expected_fidelity(&recs);
        prop_assert!(f <= 1.0 + 1e-12);
        if f > 1.0 - 1e-12 {
            prop_assert!((resource.concurrence() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn d_max_bounded_by_feasibility(mu in 1.0f64..1e5, g in 1e3f64..1e9) {
        let f = feasibility(mu, g).unwrap();
        if let Some(d) = f.d_max {
            // N/8 scaling with a few percent of slack for finite N.
            prop_assert!(d <= 1.05 * g);
        }
    }
}
