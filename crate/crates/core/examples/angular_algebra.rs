//! Coupling coefficients, rotation matrices and Riccati–Bessel functions.

use stereodyn::angular::{
    clebsch_gordan, legendre_p, reduced_rotation_d, riccati_bessel, wigner_3j, wigner_6j,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("<1 1 1 -1|0 0>      = {:+.12}", clebsch_gordan(1, 1, 1, -1, 0, 0)?);
    println!("(1 1 2; 1 -1 0)     = {:+.12}", wigner_3j(1, 1, 2, 1, -1, 0)?);
    println!("{{1 1 1; 1 1 1}}      = {:+.12}", wigner_6j(1, 1, 1, 1, 1, 1)?);
    println!("P_2(0.5)            = {:+.12}", legendre_p(2, 0.5)?);

    let theta = 60f64.to_radians();
    println!("\nd^2_(m m')(60°):");
    for m in -2..=2 {
        let row: Vec<String> = (-2..=2).map(|mp| format!("{:+.5}", reduced_rotation_d(2, m, mp, theta))).collect();
        println!("  {}", row.join(" "));
    }

    println!("\nRiccati–Bessel L = 3:");
    for x in [0.5, 5.0, 50.0] {
        let rb = riccati_bessel(3, x)?;
        println!("  x = {x:>5}: j = {:+.6e}, n = {:+.6e}, Wronskian j·n' − j'·n = {:+.3e}", rb.j, rb.n, rb.j * rb.dn - rb.dj * rb.n);
    }
    Ok(())
}
