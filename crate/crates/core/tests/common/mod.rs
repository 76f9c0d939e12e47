#![allow(dead_code)]

use eit_fbp_core::{Circle, Phantom};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn one_perturbation_at(x: f64, y: f64) -> Phantom<f64> {
    Phantom::homogeneous(40.0, 0.0005, 2.0, 1.0).with_perturbation(Circle::new(x, y, 10.0, 0.0002))
}

pub fn one_perturbation() -> Phantom<f64> {
    one_perturbation_at(10.0, 10.0)
}

pub fn two_perturbations() -> Phantom<f64> {
    Phantom::homogeneous(40.0, 0.0005, 2.0, 1.0)
        .with_perturbation(Circle::new(10.0, 14.0, 8.0, 0.0002))
        .with_perturbation(Circle::new(-12.0, -10.0, 12.0, 0.000199))
}

/// Random validated phantom with up to `max_perturbations` disjoint circles.
pub fn random_phantom(rng: &mut StdRng, max_perturbations: usize) -> Phantom<f64> {
    let radius = rng.gen_range(20.0..60.0);
    let mut p = Phantom::homogeneous(
        radius,
        rng.gen_range(1e-4..1e-2),
        rng.gen_range(0.5..4.0),
        rng.gen_range(0.5..2.0),
    );
    let target = rng.gen_range(0..=max_perturbations);
    let mut attempts = 0;
    while p.perturbations.len() < target && attempts < 1000 {
        attempts += 1;
        let r = rng.gen_range(2.0..radius / 3.0);
        let c = Circle::new(
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
            r,
            rng.gen_range(1e-5..1e-1),
        );
        let candidate = p.clone().with_perturbation(c);
        if candidate.check().is_ok() {
            p = candidate;
        }
    }
    p
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
