//! CSV writers. Numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::analysis::Diagram;
use crate::evolution::GridProfile;
use crate::fronts::FrontTrace;
use crate::hull::{BranchRow, HullResult};

/// `x` in scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn profile_csv(u: &GridProfile) -> String {
    table(&["z", "u"], (0..u.len()).map(|j| vec![num(u.z(j)), num(u.values[j])]))
}

pub fn trace_csv(trace: &FrontTrace) -> String {
    table(&["t", "xi"], trace.samples.iter().map(|&(t, x)| vec![num(t), num(x)]))
}

pub fn diagram_csv(d: &Diagram) -> String {
    let header = ["sigma", "c", "stderr", "pinned", "m_sigma", "b_sigma"];
    table(
        &header,
        d.points.iter().map(|p| {
            vec![
                num(p.sigma),
                num(p.c),
                num(p.stderr),
                p.pinned.to_string(),
                num(p.m_sigma),
                num(p.b_sigma),
            ]
        }),
    )
}

pub fn hull_csv(results: &[HullResult]) -> String {
    let header = ["p", "sigma", "lambda_p", "residual", "converged"];
    table(
        &header,
        results.iter().map(|r| {
            vec![num(r.p), num(r.sigma), num(r.lambda_p), num(r.fit_residual), r.converged.to_string()]
        }),
    )
}

pub fn branch_csv(rows: &[BranchRow]) -> String {
    let mut out = String::from("p,sigma_lo,sigma_hi,sigma_mid,gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.p),
            num(r.sigma_lo),
            num(r.sigma_hi),
            num(r.sigma_mid),
            num(r.gap)
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::GridParams;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn profile_header_and_rows() {
        let grid = GridParams { h: 0.5, half_width: 1.0 };
        let u = GridProfile::from_fn(&grid, 0.0, 1.0, |z| z);
        let csv = profile_csv(&u);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "z,u");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn trace_header() {
        let mut t = FrontTrace::new(0.5, 0.05);
        t.push(0.0, 1.0);
        assert_eq!(trace_csv(&t), "t,xi\n0.0000000000000000e0,1.0000000000000000e0\n");
    }
}
