//! Writes the sample inputs shipped under `crates/cli/data`.

use cyclelab_core::cartan_leray::EquivariantCellData;
use cyclelab_core::cycle_complex::fixtures::dependent_five_curves;
use cyclelab_core::homalg::double::{cubical_space, FixedFactor};
use cyclelab_core::symplectic::{Family, Splitting};
use cyclelab_core::torelli_classes::sample::standard;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/cli/data".into());
    std::fs::create_dir_all(&dir)?;
    let (m, _) = dependent_five_curves();
    std::fs::write(format!("{dir}/remark.json"), m.to_json() + "\n")?;
    let s: Splitting = standard(4, Family::Full);
    std::fs::write(format!("{dir}/splitting_g4.json"), s.to_json() + "\n")?;
    let torus = cubical_space(2, FixedFactor::FreeAbelian(1));
    std::fs::write(
        format!("{dir}/torus2_times_z.json"),
        serde_json::to_string_pretty(&torus).unwrap() + "\n",
    )?;
    let data = EquivariantCellData::from_perm_complex(&torus);
    std::fs::write(format!("{dir}/torus2_times_z_cells.json"), data.to_json() + "\n")?;
    Ok(())
}
