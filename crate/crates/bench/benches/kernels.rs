use criterion::{black_box, criterion_group, criterion_main, Criterion};
use kitaev_bench::{isotropic, torus};
use kitaev_core::braid::{run_protocol_from_state, ProtocolGeometry};
use kitaev_core::majorana::{majorana_matrix, sector_spectrum, GaugeConfig};
use kitaev_core::spin_ed::{build_hamiltonian, resolved_ground, sector_ground, SectorMethod};
use kitaev_core::{EigenOptions, StateVector, C64};

fn hamiltonian_apply(c: &mut Criterion) {
    let lat = torus(3);
    let h = build_hamiltonian(&lat, &isotropic().with_field(0.1, 0.1, 0.1)).unwrap();
    let psi = StateVector::random(lat.n_sites(), 3).unwrap();
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    c.bench_function("hamiltonian_apply_18_spins", |b| {
        b.iter(|| h.apply(black_box(psi.amplitudes()), &mut out))
    });
}

fn sector_solve(c: &mut Criterion) {
    let lat = torus(3);
    let h = build_hamiltonian(&lat, &isotropic()).unwrap();
    let mut group = c.benchmark_group("sector");
    group.sample_size(10);
    group.bench_function("vortex_free_3x3_k4", |b| {
        b.iter(|| sector_ground(&lat, &h, &[1; 9], 4, SectorMethod::Reduced, &EigenOptions::default()).unwrap())
    });
    group.finish();
}

fn majorana_spectrum(c: &mut Criterion) {
    let lat = torus(8);
    let gauge = GaugeConfig::vortex_free(&lat);
    let p = isotropic();
    c.bench_function("majorana_spectrum_8x8", |b| {
        b.iter(|| sector_spectrum(&majorana_matrix(&lat, &gauge, black_box(&p))).unwrap())
    });
}

fn protocol(c: &mut Criterion) {
    let lat = torus(3);
    let h = build_hamiltonian(&lat, &isotropic()).unwrap();
    let gs = resolved_ground(&lat, &h, &[1; 9], &EigenOptions::default()).unwrap();
    let script = ProtocolGeometry::new(&lat, 4).unwrap().script(1, None);
    let mut group = c.benchmark_group("protocol");
    group.sample_size(20);
    group.bench_function("one_loop_3x3", |b| b.iter(|| run_protocol_from_state(&lat, &gs.state, &script).unwrap()));
    group.finish();
}

criterion_group!(benches, hamiltonian_apply, sector_solve, majorana_spectrum, protocol);
criterion_main!(benches);
