use std::path::PathBuf;

use compact_conserve::analysis::{
    average_resolution_with, stability_spectrum, write_resolution_csv, write_spectrum_csv, ResolutionOptions,
    SignConvention,
};
use rayon::prelude::*;

use super::load_scheme;
use crate::error::{CliError, CliResult, Status};
use crate::output::OutDir;

pub struct Options {
    pub scheme: String,
    pub n: Vec<usize>,
    pub refine: bool,
    pub out: PathBuf,
}

pub fn run(opts: Options) -> CliResult<Status> {
    let scheme = load_scheme(&opts.scheme)?;
    if opts.n.is_empty() {
        return Err(CliError::input(anyhow::anyhow!("--n needs at least one interval count")));
    }
    let out = OutDir::new(opts.out)?;

    let resolution = average_resolution_with(&scheme, &ResolutionOptions { refine: opts.refine, ..Default::default() })?;
    let mut csv = Vec::new();
    write_resolution_csv(&mut csv, &resolution)?;
    let path = out.write("resolution.csv", &csv)?;
    println!("wrote {}", path.display());

    let spectra = opts
        .n
        .par_iter()
        .map(|&n| stability_spectrum(&scheme, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stable = true;
    for report in &spectra {
        let mut csv = Vec::new();
        write_spectrum_csv(&mut csv, report)?;
        let path = out.write(&format!("spectrum_{}.csv", report.n), &csv)?;
        let ok = report.is_stable(SignConvention::SemiDiscrete);
        stable &= ok;
        println!(
            "n = {:>4}: max Re(lambda) = {:.6e} ({}), wrote {}",
            report.n,
            report.max_real_part,
            if ok { "stable" } else { "UNSTABLE" },
            path.display()
        );
    }

    for node in &resolution.per_node {
        let c = &node.critical;
        println!(
            "node {}: sigma = {}, omega_R = {:.4}, omega_I = {:.4}, omega = {:.4}",
            node.node, node.sigma, c.omega_r, c.omega_i, c.omega
        );
    }
    println!("omega_f = {:.6}", resolution.omega_f);
    Ok(if stable { Status::Success } else { Status::Numeric })
}
