//! Prints the quadrature oracle table for the default reference surfaces.

use willmore::geometry::{default_oracle_surfaces, OracleRow};

fn main() -> willmore::Result<()> {
    println!("{}", OracleRow::CSV_HEADER);
    for s in default_oracle_surfaces() {
        println!("{}", OracleRow::compute(s, 256)?);
    }
    Ok(())
}
