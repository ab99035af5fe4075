//! Configurations as functions on the free group, and the shift acting on them.

use gcms::config_space::{rules_check, Configuration, GroupWord};
use gcms::shift_space::TransitionMatrix;

fn main() -> gcms::Result<()> {
    let m = TransitionMatrix::renewal();
    for text in ["stem=3.2.1;root=1", "stem=;root=1", "pre=;per=1", "pre=2;per=1"] {
        let c = Configuration::parse(&m, text)?;
        let probes = ["", "3", "3.2", "3/4", "1/2", "/2"];
        let vals: Vec<String> = probes
            .iter()
            .map(|g| {
                let g: GroupWord = g.parse().unwrap();
                format!("{g}={}", c.eval(&m, &g) as u8)
            })
            .collect();
        println!("{c}: {}", vals.join(" "));
        let rep = rules_check(&m, &c, 4, 6);
        println!("  rules checked on {} words: {}", rep.words_checked, if rep.passed() { "ok" } else { "violated" });
        if let Ok(s) = c.shift() {
            println!("  σ(x) = {s}");
        }
    }
    Ok(())
}
