//! The J/T partition of words ending at a stem, and the pointwise sandwich bound.

use std::collections::BTreeSet;

use gcms::config_space::BoundedConfig;
use gcms::shift_space::TransitionMatrix;
use gcms::thermo::{self, Potential};

fn main() -> gcms::Result<()> {
    let m = TransitionMatrix::renewal();
    let f = Potential::LogRatio;
    for stem in m.enumerate_words(3, &BTreeSet::from([1]), 4).items {
        let x = BoundedConfig::new(&m, stem.clone(), 1)?;
        let rep = thermo::jn_tn(&m, &x, 6, Some(&f))?;
        println!(
            "stem {stem}: |W_6^1| = {}, J ⊔ T covers {} words, ok = {}",
            rep.w_n_1,
            rep.target,
            rep.passed()
        );
        let last = thermo::sandwich_check(&m, &f, 1.0, &x, 10)?.pop().unwrap();
        println!("  n = 10: Z_n(x)/Z_n([1]) = {:.6} ≤ {:.6}", last.ratio, last.upper);
    }
    Ok(())
}
