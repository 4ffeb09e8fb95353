use arn_core::{binding_strength, random_genome, run, scan_genes, SimulationConfig};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genome(len: usize, min_genes: usize) -> arn_core::DnaSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    loop {
        let g = random_genome(len, &mut rng);
        if scan_genes(&g).len() >= min_genes {
            return g;
        }
    }
}

fn bench_scan(c: &mut Criterion) {
    let g = genome(10_000, 1);
    c.bench_function("scan_genes 10k", |b| b.iter(|| scan_genes(black_box(&g))));
}

fn bench_binding(c: &mut Criterion) {
    let g = genome(3000, 2);
    let genes = scan_genes(&g);
    let (p, s) = (&genes[0].protein, &genes[1].enhancer);
    c.bench_function("binding_strength", |b| {
        b.iter(|| binding_strength(black_box(p.bases()), black_box(s.bases())))
    });
}

fn bench_simulate(c: &mut Criterion) {
    let g = genome(3000, 6);
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    for cycles in [100usize, 1000] {
        let cfg = SimulationConfig {
            cycles,
            ..SimulationConfig::default()
        };
        group.bench_function(format!("{cycles} cycles"), |b| {
            b.iter(|| run(black_box(&g), &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_binding, bench_simulate);
criterion_main!(benches);
