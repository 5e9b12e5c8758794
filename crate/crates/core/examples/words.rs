//! Words, the involution, polynomials and the monomial basis.

use std::error::Error;

use ncrelax::{generate_basis, generate_variables, Polynomial, RuleSet, VariableSpec};

pub fn run() -> Result<Vec<usize>, Box<dyn Error>> {
    let a = VariableSpec::new(0, "a", false);
    let h = VariableSpec::new(1, "h", true);
    let vars = [a.clone(), h.clone()];

    let w = a.word().concat(&h.word()).concat(&a.word());
    println!(
        "w = {}, w* = {}",
        w.display(&vars),
        w.involve().display(&vars)
    );

    let p = Polynomial::from(a.word()) + Polynomial::constant(2.0);
    let q = &p * &p.adjoint();
    println!("p p* = {}", q.display(&vars));
    println!("hermitian: {}", q.is_hermitian());

    let skew = Polynomial::from(a.word()) * Polynomial::from(h.word());
    println!(
        "hermitian part of {} = {}",
        skew.display(&vars),
        skew.hermitian_part().display(&vars)
    );

    // basis sizes grow like (2n)^d without rules
    let mut sizes = Vec::new();
    for d in 0..=3 {
        let basis = generate_basis(&generate_variables(2, false), d, &RuleSet::empty())?;
        println!("order {d}: {} words", basis.len());
        sizes.push(basis.len());
    }
    Ok(sizes)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
