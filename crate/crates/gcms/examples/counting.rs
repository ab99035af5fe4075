//! Preimage counts of empty-stem configurations against their closed forms.

use gcms::config_space::{count_preimages, count_preimages_closed_form, preimages, BoundedConfig};
use gcms::shift_space::{Symbol, TransitionMatrix};

fn main() -> gcms::Result<()> {
    for m in [TransitionMatrix::renewal(), TransitionMatrix::pair_renewal(), TransitionMatrix::prime_renewal(5)] {
        println!("{}", m.name());
        for col in m.catalog() {
            let xi = BoundedConfig::empty_stem(&m, col.id)?;
            let row: Vec<String> = (1..=8)
                .map(|n| {
                    let e = preimages(&m, &xi, n, n as Symbol + 7);
                    assert_eq!(e.items.len() as u128, count_preimages(&m, &xi, n));
                    e.items.len().to_string()
                })
                .collect();
            println!("  family {}: {}", col.id, row.join(" "));
            println!("    closed form at n = 8: {:?}", count_preimages_closed_form(&m, col.id, 8)?);
        }
    }
    Ok(())
}
