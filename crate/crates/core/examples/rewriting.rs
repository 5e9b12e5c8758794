//! Substitution rules: normal forms, signs and cycle detection.

use std::error::Error;

use ncrelax::{generate_basis, generate_variables, Monomial, RewriteError, RewriteRule, RuleSet};

pub fn run() -> Result<usize, Box<dyn Error>> {
    let vars = generate_variables(2, true);
    let (x, y) = (vars[0].word(), vars[1].word());

    // anticommuting involutions: x^2 = y^2 = 1, yx = -xy
    let rules = RuleSet::new(vec![
        RewriteRule::new(x.concat(&x), 1, Default::default())?,
        RewriteRule::new(y.concat(&y), 1, Default::default())?,
        RewriteRule::new(y.concat(&x), -1, x.concat(&y))?,
    ])?;
    let w = y.concat(&x).concat(&y).concat(&x).concat(&x);
    let nf = rules.normalize(&Monomial::from(w.clone()))?;
    println!(
        "{} -> {} {}",
        w.display(&vars),
        nf.coeff,
        nf.word.display(&vars)
    );

    let basis = generate_basis(&vars, 3, &rules)?;
    let shown: Vec<String> = basis.iter().map(|w| w.display(&vars).to_string()).collect();
    println!("order 3 basis ({} words): {}", basis.len(), shown.join(" "));

    let cyclic = RuleSet::new(vec![
        RewriteRule::new(x.concat(&y), 1, y.concat(&x))?,
        RewriteRule::new(y.concat(&x), 1, x.concat(&y))?,
    ])?
    .with_max_passes(50)?;
    match cyclic.normalize_word(&x.concat(&y)) {
        Err(RewriteError::CycleSuspected { passes, .. }) => {
            println!("cycle caught after {passes} passes")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(basis.len())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
