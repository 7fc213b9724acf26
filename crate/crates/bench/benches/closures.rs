use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ccstab::{algiso, cc, graph, planes, stab, wlm};

fn closures(c: &mut Criterion) {
    let petersen = graph::petersen().rainbow();
    let shrikhande = graph::shrikhande().rainbow();
    let rook = graph::rook(4).rainbow();
    let pg5 = planes::incidence_graph(&planes::pg2(5).unwrap()).rainbow();
    let fano_scheme = planes::plane_scheme(&planes::pg2(2).unwrap()).scheme;

    c.bench_function("wl_closure/pg(2,5)", |b| b.iter(|| cc::wl_closure(black_box(&pg5), &[]).unwrap()));
    c.bench_function("wl3/petersen", |b| b.iter(|| wlm::wlm_closure(black_box(&petersen), 3).unwrap()));
    c.bench_function("sesquiclosure/shrikhande", |b| {
        b.iter(|| stab::sesquiclosure(black_box(&shrikhande)).unwrap())
    });
    c.bench_function("deep_stab/petersen", |b| {
        b.iter(|| stab::deep_stab(black_box(&petersen), &[1, 2, 3, 4]).unwrap())
    });
    c.bench_function("two_extension/fano", |b| b.iter(|| cc::two_extension(black_box(&fano_scheme)).unwrap()));
    c.bench_function("wld_equivalent/shrikhande-rook", |b| {
        b.iter(|| algiso::wld_equivalent(black_box(&shrikhande), black_box(&rook)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = closures
}
criterion_main!(benches);
