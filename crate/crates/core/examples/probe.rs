use ctwist_core::orbits::{enumerate_quadric_points, A3Filter};
fn main() {
    let pts = enumerate_quadric_points(5, 2.0, &A3Filter::all(), |v, a3| (*v, a3));
    eprintln!("{} raw", pts.len());
    for (i, (v, _)) in pts.iter().enumerate() {
        if i % 500 == 0 { eprintln!("reduce {i}: {v:?}"); }
        let _ = ctwist_core::orbits::test_reduce(v);
    }
    eprintln!("all reduced");
}
