use permcat::group::PermGroup;
use permcat::lattice;
use std::time::Instant;

fn main() {
    let s6 = PermGroup::symmetric(6);
    let w = permcat::blocks::wreath_product(2, &s6).unwrap();
    println!("2wrS6 order {}", w.product.order());
    let t = Instant::now();
    let z = lattice::zuppos(&w.product);
    println!("zuppos: {} in {:.2?}", z.gens.len(), t.elapsed());
    let t = Instant::now();
    let reps = lattice::lattice_reps(&w.product, 300_000).unwrap();
    let trans = reps.iter().filter(|(u, _)| u.is_transitive()).count();
    println!("2wrS6: {} classes ({} transitive) in {:.2?}", reps.len(), trans, t.elapsed());
    use std::sync::atomic::Ordering::Relaxed;
    println!("joins={} join_time={:.2}s bitset={:.2}s conj_tests={} conj={:.2}s",
        lattice::JOINS.load(Relaxed),
        lattice::JOIN_NS.load(Relaxed) as f64 / 1e9,
        lattice::BITSET_NS.load(Relaxed) as f64 / 1e9,
        lattice::CONJ_TESTS.load(Relaxed),
        lattice::CONJ_NS.load(Relaxed) as f64 / 1e9);
}
