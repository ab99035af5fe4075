//! Weak* convergence of Y-measures to the critical measure on Σ_A.

use gcms::measures::{cylinder_basis, sarig_measure_renewal, weak_star_sweep, y_measure, MeasureModel};
use gcms::shift_space::TransitionMatrix;
use gcms::thermo::Potential;

fn main() -> gcms::Result<()> {
    let m = TransitionMatrix::renewal();
    let one = Potential::Constant(1.0);
    let ln2 = 2f64.ln();
    let target = MeasureModel::Cylinder(sarig_measure_renewal(ln2));
    let basis = cylinder_basis(&m, 5, 6);
    let betas: Vec<f64> = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5].iter().map(|d| ln2 + d).collect();
    let sweep = weak_star_sweep(|b| y_measure(&m, 1, &one, b).map(MeasureModel::YFamily), &target, &basis, &betas, 1e-10)?;
    for (b, d) in &sweep.max_diff {
        println!("β = log 2 + {:.0e}: max |μ_β(C) − μ(C)| = {d:.3e}", b - ln2);
    }
    println!("monotone: {}", sweep.monotone);
    Ok(())
}
