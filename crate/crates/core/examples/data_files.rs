use halfspace_neumann::halfspace::{frequency_grid, GridSpec};
use halfspace_neumann::io::{read_frequency_field, sha256_file, write_frequency_field};
use halfspace_neumann::verify::random_field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> halfspace_neumann::Result<()> {
    let dir = std::env::temp_dir().join("hsn-data-files");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("neumann.csv");
    let grid_spec = GridSpec {
        radial: 4,
        angular: 2,
        ..GridSpec::default()
    };
    println!("grid has {} frequencies", frequency_grid(2, &grid_spec)?.len());
    let field = random_field(2, 2, &grid_spec, &mut ChaCha8Rng::seed_from_u64(1))?;
    write_frequency_field(&path, &field, "G")?;
    let back = read_frequency_field(&path, 2)?;
    println!("wrote {} rows to {}", back.len(), path.display());
    println!("identical after reading back: {}", back == field);
    println!("sha256 {}", sha256_file(&path)?);
    Ok(())
}
