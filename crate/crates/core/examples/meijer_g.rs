//! The Meijer G evaluator on its classical reductions and on a function with
//! a logarithmic (double-pole) expansion.
//!
//! `cargo run --release --example meijer_g`

use ehrelay::meijer::{meijer_g, MeijerGSpec};
use ehrelay::special::{bessel_k, gamma};

fn main() -> ehrelay::Result<()> {
    println!("{:>8} {:>24} {:>24} {:>10}", "x", "G^{1,0}_{0,1}(x|0)", "exp(-x)", "est. err");
    for x in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let g = meijer_g(&MeijerGSpec::new(&[], &[], &[0.0], &[], x))?;
        println!("{x:>8} {:>24.16e} {:>24.16e} {:>10.1e}", g.value, (-x).exp(), g.rel_err);
    }

    let nu = 0.4535;
    println!("\n{:>8} {:>24} {:>24}", "x", "G^{2,0}_{0,2}/2", "K_nu(2 sqrt x)");
    for x in [0.01, 1.0, 25.0, 100.0] {
        let g = meijer_g(&MeijerGSpec::new(&[], &[], &[nu / 2.0, -nu / 2.0], &[], x))?;
        println!("{x:>8} {:>24.16e} {:>24.16e}", 0.5 * g.value, bessel_k(nu, 2.0 * x.sqrt()));
    }

    // G^{1,1}_{1,1}(x | 1-a ; 0) = Γ(a) (1+x)^{-a}
    let a = 2.5;
    println!("\n{:>8} {:>24} {:>24}", "x", "G^{1,1}_{1,1}", "Gamma(a)(1+x)^-a");
    for x in [0.5, 3.0, 40.0] {
        let g = meijer_g(&MeijerGSpec::new(&[1.0 - a], &[], &[0.0], &[], x))?;
        println!("{x:>8} {:>24.16e} {:>24.16e}", g.value, gamma(a) * (1.0 + x).powf(-a));
    }

    // coincident lower parameters: K_0, where the residue sum has a log term
    let g = meijer_g(&MeijerGSpec::new(&[], &[], &[0.0, 0.0], &[], 4.0))?;
    println!("\nG^{{2,0}}_{{0,2}}(4 | 0, 0) = {:.16e}, 2 K_0(4) = {:.16e}", g.value, 2.0 * bessel_k(0.0, 4.0));
    Ok(())
}
