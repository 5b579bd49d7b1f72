use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sharp_hardy::constants::InequalityParams;
use sharp_hardy::frames::{make_frame, FrameSpec};
use sharp_hardy::mc::ExecPolicy;
use sharp_hardy::quadrature::{mc_gauge_annulus, McSettings};
use sharp_hardy::testfns::make_random_bump;
use sharp_hardy::verify::{hardy_chain, QuadSettings};

const POLICIES: [(&str, ExecPolicy); 2] = [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::Parallel)];

fn annulus_volume(c: &mut Criterion) {
    let (_, gauge) = make_frame(FrameSpec::Heisenberg { n: 1 }).unwrap();
    let mut group = c.benchmark_group("annulus_volume");
    group.sample_size(20);
    for (name, policy) in POLICIES {
        let mc = McSettings::new(200_000, 3).with_policy(policy);
        group.bench_with_input(BenchmarkId::new(name, mc.samples), &mc, |b, mc| {
            b.iter(|| mc_gauge_annulus(&gauge, |_| 1.0, 0.5, 2.0, mc).unwrap())
        });
    }
    group.finish();
}

fn hardy_chain_bump(c: &mut Criterion) {
    let (_, gauge) = make_frame(FrameSpec::HeisenbergGreiner { n: 1, gamma: 2.0 }).unwrap();
    let params = InequalityParams::new(2.0, 1.0, gauge.gauge_exponent()).unwrap();
    let u = make_random_bump(&gauge, 1, (0.5, 2.0)).unwrap();
    let mut group = c.benchmark_group("hardy_chain");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let quad = QuadSettings { mc: McSettings::new(50_000, 3).with_policy(policy), sigmas: 3.0 };
        group.bench_function(name, |b| b.iter(|| hardy_chain(&gauge, &params, &u, &quad).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, annulus_volume, hardy_chain_bump);
criterion_main!(benches);
