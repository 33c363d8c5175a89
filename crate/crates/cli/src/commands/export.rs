use std::path::Path;

use compact_conserve::scheme::bundled_json;

use super::parse_id;
use crate::error::{CliResult, Status};
use crate::output::write_atomic;

pub fn run(scheme: &str, out: Option<&Path>) -> CliResult<Status> {
    let json = bundled_json(parse_id(scheme)?);
    match out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            println!("wrote {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(Status::Success)
}
