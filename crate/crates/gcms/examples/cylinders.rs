//! Normal forms of generalized cylinders and their intersections.

use gcms::cylinder_algebra::{decompose, intersect_many, parse_expression, parse_subbasis, sample_configs, whole_space_decomposition};
use gcms::shift_space::TransitionMatrix;

fn main() -> gcms::Result<()> {
    let m = TransitionMatrix::pair_renewal();
    println!("X_A = {}", whole_space_decomposition(&m));
    for e in ["C[1;inv=2]", "!C[2]", "C[3.2;inv=1]"] {
        println!("{e} = {}", decompose(&m, &parse_subbasis(e)?)?);
    }
    let sample = sample_configs(&m, 4, 6, 30);
    for expr in ["C[1] & !C[1.2]", "C[2.1] & C[2;inv=3]", "!C[1] & !C[2] & !C[3]"] {
        let s = intersect_many(&m, &parse_expression(expr)?)?;
        let inside = sample.iter().filter(|c| s.contains(&m, c)).count();
        println!("{expr} = {s}  ({inside} of {} sample points)", sample.len());
    }
    Ok(())
}
