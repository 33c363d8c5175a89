use compact_conserve::analysis::quadrature_precision;
use compact_conserve::scheme::{verify_conservation_identities, verify_order_conditions, VERIFY_THRESHOLD};
use compact_conserve::{assemble_matrices, Grid};

use super::load_scheme;
use crate::error::{CliResult, Status};

const CONSERVATION_INTERVALS: usize = 100;
const QUADRATURE_SIZES: [usize; 2] = [20, 31];
const MIN_QUADRATURE_DEGREE: usize = 3;

pub fn run(source: &str) -> CliResult<Status> {
    let scheme = load_scheme(source)?;
    let mut report = verify_order_conditions(&scheme);
    let m = assemble_matrices(&scheme, &Grid::unit_spacing(CONSERVATION_INTERVALS)?)?;
    report.extend(verify_conservation_identities(&m));

    println!("scheme {}", scheme.scheme_id);
    println!("{:<32} {:>12}  status", "condition", "residual");
    for r in &report.residuals {
        let ok = r.value <= VERIFY_THRESHOLD;
        println!("{:<32} {:>12.3e}  {}", r.name, r.value, if ok { "ok" } else { "FAIL" });
    }

    let mut quadrature_ok = true;
    for n in QUADRATURE_SIZES {
        let degree = quadrature_precision(&scheme, n);
        let shown = degree.map_or("none".to_string(), |d| d.to_string());
        let ok = degree.is_some_and(|d| d >= MIN_QUADRATURE_DEGREE);
        quadrature_ok &= ok;
        println!("quadrature exact degree (n = {n}): {shown}  {}", if ok { "ok" } else { "FAIL" });
    }

    let failing: Vec<&str> = report.failing(VERIFY_THRESHOLD).map(|r| r.name.as_str()).collect();
    if failing.is_empty() && quadrature_ok {
        println!("verified (max residual {:.3e})", report.max());
        Ok(Status::Success)
    } else {
        if !failing.is_empty() {
            eprintln!("failing conditions: {}", failing.join(", "));
        }
        if !quadrature_ok {
            eprintln!("quadrature degree below {MIN_QUADRATURE_DEGREE}");
        }
        Ok(Status::Numeric)
    }
}
