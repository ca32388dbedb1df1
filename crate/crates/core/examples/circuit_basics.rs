//! Building, simulating, reversing, lowering and serializing a small
//! reversible circuit.
//!
//! ```text
//! cargo run --example circuit_basics
//! ```

use gf2shor::circuit_ir::{lower_mcx, parse, reverse, serialize, simulate, Circuit, Control, RegKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut c = Circuit::new();
    let a = c.add_register("a", 4, RegKind::Input);
    let t = c.add_register("t", 1, RegKind::Output);
    c.cnot(a.q(0), a.q(1));
    c.mcx(
        vec![Control::on(a.q(0)), Control::on(a.q(1)), Control::off(a.q(2)), Control::on(a.q(3))],
        t.q(0),
    );
    c.swap(a.q(2), a.q(3));

    let input = [true, false, false, true, false];
    let output = simulate(&c, &input)?;
    println!("{input:?} -> {output:?}");

    let mut back = output.clone();
    back.resize(c.num_qubits(), false);
    println!("reverse restores input: {}", simulate(&reverse(&c), &back)? == input);

    println!("counts before lowering: {:?}", c.counts());
    let low = lower_mcx(&c);
    println!("counts after lowering:  {:?}", low.counts());

    let text = serialize(&low);
    print!("{text}");
    let again = parse(&text)?;
    println!("round trip identical: {}", serialize(&again) == text);
    Ok(())
}
