//! Existence of conformal probabilities across β for each catalog matrix.

use gcms::measures::phase_row;
use gcms::shift_space::TransitionMatrix;
use gcms::thermo::Potential;

fn main() -> gcms::Result<()> {
    let cases = [
        (TransitionMatrix::renewal(), Potential::Constant(1.0), vec![0.5, 2f64.ln(), 0.8, 1.2]),
        (TransitionMatrix::pair_renewal(), Potential::Constant(1.0), vec![0.8, (1.0 + 2f64.sqrt()).ln(), 1.0]),
        (TransitionMatrix::prime_renewal(5), Potential::Constant(1.0), vec![0.6, 0.9, 1.2]),
        (TransitionMatrix::renewal(), Potential::LogRatio, vec![1.5, 1.7, 1.8, 2.5]),
    ];
    for (m, f, betas) in cases {
        println!("{} {f:?}", m.name());
        for b in betas {
            let r = phase_row(&m, &f, b, 1e-10, 400)?;
            println!("  β={b:.6}  Σ_A: {:<32} Y_A: {:?}  support: {}", r.sigma, r.y_families, r.support);
        }
    }
    Ok(())
}
