//! One module per subcommand. Each resolves its settings and returns the
//! files it produced; writing them and the manifest happens in the caller.

mod free_energy;
mod inspect;
mod minimize;
mod phase_diagram;
mod simulate;
mod validate;

use brine_core::{Boundary, ModelParams};

use crate::cli::Command;
use crate::settings::Settings;
use crate::{CliError, Output};

pub fn dispatch(
    command: &Command,
    settings: &mut Settings,
) -> Result<(&'static str, Output), CliError> {
    Ok(match command {
        Command::Inspect(a) => ("inspect", inspect::run(a, settings)?),
        Command::PhaseDiagram(a) => ("phase-diagram", phase_diagram::run(a, settings)?),
        Command::Minimize(a) => ("minimize", minimize::run(a, settings)?),
        Command::Simulate(a) => ("simulate", simulate::run(a, settings)?),
        Command::Validate(a) => ("validate", validate::run(a, settings)?),
        Command::FreeEnergy(a) => ("free-energy", free_energy::run(a, settings)?),
    })
}

/// Default parameters: square lattice above criticality, moderate salt.
fn default_params() -> ModelParams {
    ModelParams {
        j: 0.6,
        h: 0.0,
        kappa: 1.0,
        c: 0.1,
        d: 2,
        bc: Boundary::Plus,
    }
}

/// A JSON document both written to `name` and printed.
fn json_output<T: serde::Serialize>(name: &str, value: &T) -> Result<Output, CliError> {
    let bytes = crate::formats::json(value)?;
    Ok(Output {
        stdout: String::from_utf8_lossy(&bytes).into_owned(),
        files: vec![(name.to_string(), bytes)],
        ..Output::default()
    })
}
