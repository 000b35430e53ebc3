//! Mesh and operator interchange: write a mesh as OFF, read it back, and
//! export the assembled operator as COO triplets with a JSON sidecar.
//!
//!     cargo run --example off_and_export -- /tmp/cap

use std::path::PathBuf;

use spectral_bounds::geometry::{apply_dirichlet, assemble_laplacian, export_operator, load_off, save_off, spherical_cap};

fn main() -> spectral_bounds::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    std::fs::create_dir_all(&dir).map_err(|e| spectral_bounds::Error::Io { path: dir.clone(), source: e })?;

    let off = dir.join("cap.off");
    save_off(&spherical_cap(1.2, 3)?, &off)?;
    let mesh = load_off(&off)?;
    println!(
        "{}: {} vertices, {} triangles, {} boundary vertices, χ = {}",
        off.display(),
        mesh.vertex_count(),
        mesh.triangles().len(),
        mesh.boundary().len(),
        mesh.euler_characteristic()
    );

    let op = apply_dirichlet(&assemble_laplacian(&mesh)?, mesh.boundary())?;
    let coo = dir.join("cap_dirichlet.coo");
    export_operator(&op, &coo)?;
    println!("{} unknowns, {} stored entries -> {}", op.dim(), op.stiffness.nnz(), coo.display());
    let sidecar = std::fs::read_to_string(coo.with_extension("json")).expect("sidecar written");
    println!("{}", &sidecar[..sidecar.len().min(200)]);
    Ok(())
}
