use brine_core::tabulate;

use super::default_params;
use crate::cli::FreeEnergyArgs;
use crate::formats::float_csv;
use crate::settings::Settings;
use crate::{CliError, Output};

pub fn run(args: &FreeEnergyArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let params = settings.params(&args.physics, default_params())?;
    let model = settings.model(&args.model, &params)?;
    let grid_size = settings.get("grid_size", args.grid_size, 201)?;
    let curve = tabulate(&model, grid_size)?;
    let rows = curve
        .grid
        .iter()
        .zip(&curve.values)
        .map(|(&m, &f)| vec![m, f]);
    let csv = float_csv(&["m", "F"], rows)?;
    Ok(Output {
        stdout: String::from_utf8_lossy(&csv).into_owned(),
        files: vec![("free_energy.csv".into(), csv)],
        ..Output::default()
    })
}
