//! Conformal measures on Y_A and Σ_A, with their conformality residuals.

use gcms::measures::{self, log_eigenmeasure, measure_report, pair_renewal_critical_measure, sarig_measure_renewal, y_measure, MeasureModel};
use gcms::shift_space::{TransitionMatrix, Word};
use gcms::thermo::Potential;

fn main() -> gcms::Result<()> {
    let one = Potential::Constant(1.0);
    let renewal = TransitionMatrix::renewal();
    let pair = TransitionMatrix::pair_renewal();
    let y = y_measure(&renewal, 1, &one, 3f64.ln())?;
    println!("renewal, β = log 3: c_e = {}, μ(C_2.1) = {}", y.c_e, y.cylinder(&Word::from_slice(&[2, 1])));
    let models = vec![
        MeasureModel::YFamily(y),
        MeasureModel::Cylinder(sarig_measure_renewal(2f64.ln())),
        MeasureModel::YFamily(y_measure(&pair, 1, &one, 1.2)?),
        MeasureModel::YFamily(y_measure(&pair, 2, &one, 1.2)?),
        MeasureModel::Cylinder(pair_renewal_critical_measure()),
        log_eigenmeasure(1.5)?,
        log_eigenmeasure(2.0)?,
    ];
    for model in &models {
        let r = measure_report(model, 4, 6, 1e-10)?;
        println!("{}: β = {:.4}, λ = {:.6}, mass = {:.12}, DU residual = {:.1e}", r.kind, r.beta, r.lambda, r.total_mass, r.max_du_residual);
    }
    let rem = measures::pair_constants_report(1.2)?;
    println!("pair renewal μ(C_2) constants at β = 1.2: {rem:?}");
    Ok(())
}
