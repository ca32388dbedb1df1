//! Regenerates the bundled Karatsuba formula files.
//!
//! Sizes 2 to 6 come from an exhaustive subspace search, 7 and 8 from a
//! CRT-with-infinity construction over the smaller formulas.
//!
//! ```text
//! cargo run --release --example karatsuba_search -- crates/core/data/karatsuba
//! ```

use std::path::PathBuf;
use std::time::Instant;

use gf2shor::arith_synth::karatsuba::{
    crt_infinity, recursive_karatsuba, search_symmetric, standard_crt_parts, FormulaTable,
    KaratsubaFormula,
};

const TARGET_V: [(usize, usize); 5] = [(2, 3), (3, 6), (4, 9), (5, 13), (6, 17)];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: Option<PathBuf> = std::env::args().nth(1).map(PathBuf::from);
    let mut table = FormulaTable::empty();
    table.insert(KaratsubaFormula::trivial());
    for (d, v) in TARGET_V {
        let t0 = Instant::now();
        let f = search_symmetric(d, v, None).ok_or(format!("no {v}-product formula for d = {d}"))?;
        f.verify()?;
        println!(
            "d={d}: v={} nnz(T)={} nnz(R)={} ({:.1?}, fallback would use {})",
            f.v(),
            f.t.popcount(),
            f.r.popcount(),
            t0.elapsed(),
            recursive_karatsuba(d).v()
        );
        table.insert(f);
    }
    for d in [7, 8] {
        let parts = standard_crt_parts(d).expect("parts for 7 and 8");
        let f = crt_infinity(d, &parts, &table)?;
        f.verify()?;
        println!(
            "d={d}: v={} nnz(T)={} nnz(R)={} (fallback would use {})",
            f.v(),
            f.t.popcount(),
            f.r.popcount(),
            recursive_karatsuba(d).v()
        );
        table.insert(f);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        for d in 2..=8 {
            let f = table.get(d)?;
            std::fs::write(dir.join(format!("k{d}.txt")), f.to_text())?;
        }
        println!("wrote formulas to {}", dir.display());
    }
    Ok(())
}
