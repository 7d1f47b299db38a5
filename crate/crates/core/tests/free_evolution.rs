use core::f64::consts::PI;

use critquench_core::free_evolution::{critical_energy, dispersion};
use critquench_core::observables::{transverse_magnetization, Sampler};
use critquench_core::{Complex64, CriticalPropagator, Dispersion, ModeAmplitudes, MomentumGrid};
use proptest::prelude::*;

fn random_state(spins: usize, seeds: &[(f64, f64, f64)]) -> ModeAmplitudes {
    let grid = MomentumGrid::new(spins).unwrap();
    let (mut v, mut u) = (Vec::new(), Vec::new());
    for j in 0..grid.len() {
        let (theta, a, b) = seeds[j % seeds.len()];
        let theta = theta + 0.1 * j as f64;
        v.push(Complex64::from_polar(theta.sin(), a));
        u.push(Complex64::from_polar(theta.cos(), b));
    }
    ModeAmplitudes::new(grid, v, u, 0.0).unwrap()
}

fn seeds() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0..PI, -PI..PI, -PI..PI), 1..6)
}

proptest! {
    #[test]
    fn propagation_is_unitary(seeds in seeds(), t in 0.0..5000.0f64) {
        let s0 = random_state(64, &seeds);
        let prop = CriticalPropagator::new(s0.grid());
        let s1 = prop.evolve(&s0, t).unwrap();
        for j in 0..s0.len() {
            let n0 = s0.v[j].norm_sqr() + s0.u[j].norm_sqr();
            let n1 = s1.v[j].norm_sqr() + s1.u[j].norm_sqr();
            prop_assert!((n0 - n1).abs() <= 1e-13);
        }
    }

    #[test]
    fn propagation_composes(seeds in seeds(), t1 in 0.0..500.0f64, t2 in 0.0..500.0f64) {
        let s0 = random_state(32, &seeds);
        let prop = CriticalPropagator::new(s0.grid());
        let two_step = prop.evolve(&prop.evolve(&s0, t1).unwrap(), t2).unwrap();
        let one_step = prop.evolve(&s0, t1 + t2).unwrap();
        for j in 0..s0.len() {
            prop_assert!((two_step.v[j] - one_step.v[j]).norm() <= 1e-12);
            prop_assert!((two_step.u[j] - one_step.u[j]).norm() <= 1e-12);
        }
        prop_assert!((two_step.time - one_step.time).abs() < 1e-9);
    }

    #[test]
    fn energy_is_conserved(seeds in seeds(), t in 0.0..2000.0f64) {
        let s0 = random_state(40, &seeds);
        let prop = CriticalPropagator::new(s0.grid());
        let e0 = critical_energy(&s0);
        let e1 = critical_energy(&prop.evolve(&s0, t).unwrap());
        prop_assert!((e0 - e1).abs() <= 1e-10);
    }

    #[test]
    fn observables_stay_in_range(seeds in seeds(), t in 0.0..3000.0f64) {
        let s0 = random_state(48, &seeds);
        let prop = CriticalPropagator::new(s0.grid());
        let sample = Sampler::new(&s0, &prop).sample(t);
        prop_assert!(sample.sz.abs() <= 1.0 + 1e-12);
        prop_assert!(sample.echo.value >= 0.0 && sample.echo.value <= 1.0 + 1e-12);
        prop_assert!(sample.echo.log_value <= 1e-12);
    }

    #[test]
    fn single_evolve_agrees_with_sampler(seeds in seeds(), t in 0.0..3000.0f64) {
        let s0 = random_state(24, &seeds);
        let prop = CriticalPropagator::new(s0.grid());
        let sample = Sampler::new(&s0, &prop).sample(t);
        let st = prop.evolve(&s0, t).unwrap();
        prop_assert!((sample.sz - transverse_magnetization(&st)).abs() < 1e-13);
    }
}

#[test]
fn dispersion_is_increasing_and_bounded() {
    let grid = MomentumGrid::new(400).unwrap();
    let e: Vec<f64> = grid.momenta().iter().map(|&k| dispersion(k)).collect();
    assert!(e.windows(2).all(|w| w[1] > w[0]));
    assert!(e.iter().all(|&x| x > 0.0 && x < 4.0));
}

#[test]
fn linearized_dispersion_is_exactly_periodic() {
    let s0 = random_state(200, &[(0.3, 0.2, -1.0), (1.2, 2.0, 0.5)]);
    let prop = CriticalPropagator::with_dispersion(s0.grid(), Dispersion::Linearized);
    let sampler = Sampler::new(&s0, &prop);
    let period = 100.0;
    for i in 0..40 {
        let t = 7.3 * i as f64;
        let (a, b) = (sampler.sample(t), sampler.sample(t + period));
        assert!((a.sz - b.sz).abs() < 1e-10);
        assert!((a.echo.value - b.echo.value).abs() < 1e-10);
    }
}
