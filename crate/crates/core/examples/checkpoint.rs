//! Binary checkpoint round trip and the errors it reports.

use fnls_lab::checkpoint::{decode, encode, read_checkpoint, write_checkpoint};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(2, 32, 4.0)?;
    let params = PhysParams::focusing(0.8, 3.0)?;
    let u = ComplexField::gaussian(&grid, 1.3, 0.9);
    let path = std::env::temp_dir().join("fnls_example.fnls");
    write_checkpoint(&u, &path, 0.25, &params)?;
    let (back, meta) = read_checkpoint(&path)?;
    println!("read {:?}", meta);
    println!("identical values: {}", back.values() == u.values());

    let mut bytes = encode(&u, 0.25, &params);
    bytes[0] = b'X';
    println!("corrupted magic: {}", decode(&bytes).unwrap_err());
    let _ = std::fs::remove_file(&path);
    Ok(())
}
