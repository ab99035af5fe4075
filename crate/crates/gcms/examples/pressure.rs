//! Partition functions and Gurevich pressure, exact and extrapolated.

use gcms::shift_space::TransitionMatrix;
use gcms::thermo::{self, Potential};

fn main() -> gcms::Result<()> {
    let renewal = TransitionMatrix::renewal();
    let pair = TransitionMatrix::pair_renewal();
    let one = Potential::Constant(1.0);
    for beta in [-1.0, 0.0, 0.5] {
        let z = thermo::z_n(&renewal, &one, beta, 1, 12, 13);
        let p = thermo::gurevich_pressure(&renewal, &one, beta, 1, 40)?;
        println!("renewal β={beta}: Z_12 = {:.6e}, P = {:.12} ({:?})", z.value, p.extrapolated, p.certificate);
        let q = thermo::gurevich_pressure(&pair, &one, beta, 1, 60)?;
        println!("pair    β={beta}: P ≈ {:.8}, log(1+√2) + β = {:.8}", q.extrapolated, (1.0 + 2f64.sqrt()).ln() + beta);
    }
    for beta in [1.2, 1.5, thermo::critical_beta_log(), 2.0] {
        println!("log potential β={beta:.6}: P = {:.12}", thermo::pressure_log_potential(beta)?);
    }
    Ok(())
}
