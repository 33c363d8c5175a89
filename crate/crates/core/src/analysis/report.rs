use std::io::{self, Write};

use super::{ResolutionReport, StabilityReport};

/// Columns: node, omega, re_omega_bar, im_omega_bar, eps_R, eps_I.
pub fn write_resolution_csv<W: Write>(mut out: W, report: &ResolutionReport) -> io::Result<()> {
    writeln!(out, "node,omega,re_omega_bar,im_omega_bar,eps_R,eps_I")?;
    for node in &report.per_node {
        for (k, w) in report.omega_grid.iter().enumerate() {
            let wb = node.omega_bar[k];
            writeln!(
                out,
                "{},{:?},{:?},{:?},{:?},{:?}",
                node.node, w, wb.re, wb.im, node.eps_r[k], node.eps_i[k]
            )?;
        }
    }
    Ok(())
}

/// Columns: re_lambda, im_lambda, n.
pub fn write_spectrum_csv<W: Write>(mut out: W, report: &StabilityReport) -> io::Result<()> {
    writeln!(out, "re_lambda,im_lambda,n")?;
    for l in &report.eigenvalues {
        writeln!(out, "{:?},{:?},{}", l.re, l.im, report.n)?;
    }
    Ok(())
}
