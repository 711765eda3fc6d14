use std::path::Path;

use crate::data::write_dense_csv;
use crate::error::{Error, Result};
use crate::nmf::FactorPair;

/// Writes `H` as dense-csv, one row per meta-gene and one column per cell,
/// ready for an external 2-D embedding tool.
pub fn export_metagenes(wh: &FactorPair, cell_ids: &[String], out: &Path) -> Result<()> {
    if cell_ids.len() != wh.h.ncols() {
        return Err(Error::Dimension(format!(
            "{} cell ids for {} columns of H",
            cell_ids.len(),
            wh.h.ncols()
        )));
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let names: Vec<String> = (0..wh.rank()).map(|k| format!("metagene{k}")).collect();
    write_dense_csv(out, &wh.h, &names, cell_ids)
}
