use permcat::group::PermGroup;
use permcat::lattice;
use std::time::Instant;

fn main() {
    for (name, g) in [
        ("S6", PermGroup::symmetric(6)),
        ("S7", PermGroup::symmetric(7)),
    ] {
        let t = Instant::now();
        let reps = lattice::lattice_reps(&g, 300_000).unwrap();
        let trans = reps.iter().filter(|(u, _)| u.is_transitive()).count();
        println!(
            "{}: {} classes ({} transitive) in {:.2?}",
            name,
            reps.len(),
            trans,
            t.elapsed()
        );
    }
    // wreath 2 wr S4 (order 384) and 2 wr S5 (3840)
    let s4 = PermGroup::symmetric(4);
    let w = permcat::blocks::wreath_product(2, &s4).unwrap();
    let t = Instant::now();
    let reps = lattice::lattice_reps(&w.product, 300_000).unwrap();
    println!("2wrS4: {} classes in {:.2?}", reps.len(), t.elapsed());
    let s5 = PermGroup::symmetric(5);
    let w5 = permcat::blocks::wreath_product(2, &s5).unwrap();
    let t = Instant::now();
    let reps5 = lattice::lattice_reps(&w5.product, 300_000).unwrap();
    println!("2wrS5: {} classes in {:.2?}", reps5.len(), t.elapsed());
}
