//! Radial compression curves for the five named azimuthal projections, at a
//! narrow and at a wide angle of view.
//!
//! `cargo run --example radial_curves`

use visphere::cli::{curve_table, write_curves};

fn main() -> visphere::Result<()> {
    let ks = [1.0, 0.5, 0.0, -0.5, -1.0];
    for omega in [40.0, 170.0] {
        let rows = curve_table(omega, &ks, 19)?;
        let gap = rows
            .iter()
            .map(|r| r[1..].iter().fold(f64::MIN, |a, &b| a.max(b)) - r[1..].iter().fold(f64::MAX, |a, &b| a.min(b)))
            .fold(0.0, f64::max);
        println!("Ω = {omega}°  (largest gap between curves {gap:.4})");
        write_curves(std::io::stdout(), &ks, &rows)?;
        println!();
    }
    Ok(())
}
