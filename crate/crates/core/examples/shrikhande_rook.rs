//! The Shrikhande graph and the 4×4 rook graph: same coherent closure
//! parameters, separated by the sesquiclosure.

use ccstab::algiso::{wl_equivalent, wld_equivalent};
use ccstab::{cc, graph, stab};

fn main() -> ccstab::Result<()> {
    let s = graph::shrikhande().rainbow();
    let r = graph::rook(4).rainbow();
    for (name, g) in [("shrikhande", &s), ("rook", &r)] {
        let c = cc::wl_closure(g, &[])?;
        let d = stab::sesquiclosure(g)?;
        println!("{name}: WL rank {} valencies {:?}, WLD rank {}", c.rank(), c.valencies(), d.rank());
    }
    println!("wl:  {:?}", wl_equivalent(&s, &r)?.verdict);
    println!("wld: {:?}", wld_equivalent(&s, &r)?.verdict);
    Ok(())
}
