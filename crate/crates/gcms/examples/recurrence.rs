//! The discriminant of the renewal log potential and the recurrence verdict.

use gcms::thermo::{self, Discriminant};

fn main() -> gcms::Result<()> {
    let bc = thermo::critical_beta_log();
    println!("β_c = {bc:.12}");
    for beta in [0.8, 1.2, 1.5, bc, 2.0, 3.0] {
        match thermo::discriminant_log(beta)? {
            Discriminant::Divergent => println!("β={beta:.4}: Δ = +∞"),
            Discriminant::Finite { series, closed_form, error, .. } => {
                println!("β={beta:.4}: Δ = {series:.12} (log(ζ−1) = {closed_form:.12}, ± {error:.1e})")
            }
        }
        println!("  {:?}", thermo::classify_recurrence_log(beta)?);
    }
    Ok(())
}
