use permcat::group::PermGroup;
use permcat::lattice;
use std::time::Instant;

fn main() {
    let s5 = PermGroup::symmetric(5);
    let w5 = permcat::blocks::wreath_product(2, &s5).unwrap();
    let g = &w5.product;
    let t = Instant::now();
    let z = lattice::zuppos(g);
    println!("zuppos: {} in {:.2?} (index size {})", z.gens.len(), t.elapsed(), z.index.len());
    let t = Instant::now();
    let reps = lattice::lattice_reps(g, 300_000).unwrap();
    println!("lattice: {} classes in {:.2?}", reps.len(), t.elapsed());
    use std::sync::atomic::Ordering::Relaxed;
    println!("joins={} join_time={:.2}s bitset={:.2}s conj_tests={} conj={:.2}s",
        lattice::JOINS.load(Relaxed),
        lattice::JOIN_NS.load(Relaxed) as f64 / 1e9,
        lattice::BITSET_NS.load(Relaxed) as f64 / 1e9,
        lattice::CONJ_TESTS.load(Relaxed),
        lattice::CONJ_NS.load(Relaxed) as f64 / 1e9);
}
// appended reporting
