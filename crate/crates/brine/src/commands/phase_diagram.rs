use brine_core::variational::{boundary_row, PhaseBoundary};
use brine_core::Error;
use rayon::prelude::*;

use super::default_params;
use crate::cli::PhaseDiagramArgs;
use crate::formats::{float_csv, phase_diagram_svg};
use crate::settings::Settings;
use crate::{CliError, Output};

pub fn run(args: &PhaseDiagramArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let params = settings.params(&args.physics, default_params())?;
    let model = settings.model(&args.model, &params)?;
    let grid = match settings.opt("c_grid", args.c_grid.clone())? {
        Some(grid) => grid,
        None => {
            let c_max = settings.get("c_max", args.c_max, 0.25)?;
            let steps = settings.get("c_steps", args.c_steps, 25usize)?;
            if steps == 0 {
                return Err(CliError::Config("c_steps must be positive".into()));
            }
            (0..=steps)
                .map(|k| c_max * k as f64 / steps as f64)
                .collect()
        }
    };
    if grid.is_empty() {
        return Err(CliError::Config("empty c grid".into()));
    }
    let m_star = model.spontaneous_m();
    if m_star <= 0.0 {
        return Err(Error::NoCoexistence.into());
    }
    let kappa = params.kappa;
    let rows = grid
        .par_iter()
        .map(|&c| boundary_row(c, kappa, m_star))
        .collect::<Result<Vec<_>, _>>()?;
    let boundary = PhaseBoundary {
        m_star,
        kappa,
        rows,
    };
    let csv = float_csv(
        &["c", "h_minus", "h_plus"],
        boundary.rows.iter().map(|r| vec![r.c, r.h_minus, r.h_plus]),
    )?;
    let svg = phase_diagram_svg(&boundary);
    Ok(Output {
        stdout: String::from_utf8_lossy(&csv).into_owned(),
        files: vec![
            ("phase_diagram.csv".into(), csv),
            ("phase_diagram.svg".into(), svg.into_bytes()),
        ],
        ..Output::default()
    })
}
