use fnmetric::holonomy_oracle::*;
use fnmetric::okai_transforms::*;

fn probe(inp: &SphereMoveInput) {
    let closed = sphere_move(inp).unwrap();
    let sr = SphereRep::new([inp.l1, inp.l2, inp.l3, inp.l4], inp.l).unwrap();
    let target = sr.alpha_alpha_prime_trace(inp.tau);
    println!("tau={:+.4} tau'={:+.6} target={:.10}", inp.tau, closed.tau_prime, target);
    for (label, holes) in [
        ("rot-1 [l4,l1,l2,l3]", [inp.l4, inp.l1, inp.l2, inp.l3]),
        ("rot+1 [l2,l3,l4,l1]", [inp.l2, inp.l3, inp.l4, inp.l1]),
    ] {
        let dual = SphereRep::new(holes, closed.l_prime).unwrap();
        for u in [closed.tau_prime.abs(), -closed.tau_prime.abs()] {
            println!("  {label} u={:+.6}: |tr|={:.10}", u, dual.alpha_alpha_prime_trace(u));
        }
    }
}

fn main() {
    // the failing sample
    probe(&SphereMoveInput { l1: 1.157607540734205, l2: 0.926748570575592, l3: 1.9357966134207851,
        l4: 0.1027379723667945, l: 2.5208151203716604, tau: -0.1936358044367248 });
    // a case the frozen tests cover
    probe(&SphereMoveInput { l1: 0.5, l2: 0.8, l3: 1.1, l4: 0.3, l: 1.0, tau: 0.6 });
    probe(&SphereMoveInput { l1: 0.5, l2: 0.8, l3: 1.1, l4: 0.3, l: 1.0, tau: -0.6 });
}
