//! Torus grids, unitary transforms, norms and the raw field format.

use tricomi::spectral_grid::{
    dealias, forward_transform, inverse_transform, lp_norm, read_field, sobolev_norm, spectral_l2_norm, write_field,
    TorusGrid,
};

fn main() -> tricomi::error::Result<()> {
    let grid = TorusGrid::cube(2, 64, 16.0)?;
    let f = grid.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    let mut fh = forward_transform(&f)?;
    println!("‖f‖₂ = {:.15} (space), {:.15} (Fourier)", lp_norm(&f, 2.0)?, spectral_l2_norm(&fh));
    println!("‖f‖_H1 = {:.6}, ‖f‖_4 = {:.6}", sobolev_norm(&fh, 1.0), lp_norm(&f, 4.0)?);
    dealias(&mut fh);
    let back = inverse_transform(&fh)?;
    println!("2/3 truncation changes ‖f‖₂ by {:.3e}", (lp_norm(&back, 2.0)? - lp_norm(&f, 2.0)?).abs());

    let path = std::env::temp_dir().join("tricomi-example.fld");
    write_field(&path, &f)?;
    let g = read_field(&path)?;
    println!("round trip through {}: identical = {}", path.display(), g.values == f.values);
    std::fs::remove_file(path)?;
    Ok(())
}
