use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sqzsta::dynamics::{
    evolve_covariance, integrate_master, FockGenerator, IntegrateOptions, MasterModel,
    stochastic_trajectory, StochasticRunSpec, TrapModel,
};
use sqzsta::fock_core::thermal_state;
use sqzsta::squeezed_state::{factorize, factorized_product, to_gaussian_moments};
use sqzsta::trap_protocol::{control_open, make_quintic};
use sqzsta::{CMatrix, SqueezeParams, UnitSystem};

fn heating_model() -> TrapModel {
    let u = UnitSystem::default();
    let wf = (0.1f64).exp();
    let omega = make_quintic(1.0, wf, 2.0).unwrap();
    let beta = make_quintic(1.0, 0.95 / wf, 2.0).unwrap();
    TrapModel::new(control_open(omega, beta, u).unwrap())
}

fn factorization(c: &mut Criterion) {
    let f = factorize(&SqueezeParams::new(0.8, -2.0, 1.5).unwrap()).unwrap();
    for n in [40, 120] {
        c.bench_function(&format!("factorized_product N={n}"), |b| {
            b.iter(|| factorized_product(black_box(&f), n).unwrap())
        });
    }
}

fn master(c: &mut Criterion) {
    let model = heating_model();
    let rho = thermal_state(1.0, 60).unwrap();
    let inst = model.at(0.7);
    let mut gen = FockGenerator::new(60);
    let mut out = CMatrix::zeros(60, 60);
    c.bench_function("FockGenerator::apply N=60", |b| {
        b.iter(|| gen.apply(black_box(&inst), &rho.entries, &mut out))
    });
    c.bench_function("integrate_master N=40, 200 steps", |b| {
        let rho = thermal_state(1.0, 40).unwrap();
        b.iter(|| integrate_master(&model, &rho, 0.0, 2.0, IntegrateOptions::new(200)).unwrap())
    });
}

fn covariance(c: &mut Criterion) {
    let model = heating_model();
    let m0 = to_gaussian_moments(&SqueezeParams::new(0.0, 0.0, 1.0).unwrap(), 1.0, UnitSystem::default());
    c.bench_function("evolve_covariance 20000 steps", |b| {
        b.iter(|| evolve_covariance(&model, black_box(&m0), 0.0, 2.0, 20000, 0).unwrap())
    });
}

fn ensemble(c: &mut Criterion) {
    let model = heating_model();
    let run = StochasticRunSpec {
        model: &model,
        rho0: thermal_state(1.0, 40).unwrap(),
        tf: 2.0,
        dt: 5e-4,
        seed: 3,
        count: 100,
        samples: 1,
    };
    let mut g = c.benchmark_group("stochastic");
    g.sample_size(10);
    g.bench_function("one trajectory N=40, 4000 steps", |b| {
        b.iter(|| stochastic_trajectory(&run, black_box(5)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, factorization, master, covariance, ensemble);
criterion_main!(benches);
