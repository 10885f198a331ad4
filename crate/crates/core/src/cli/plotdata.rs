//! Columnar text files for plotting: `#` header lines, then space-separated rows.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use super::report::{write_atomic, Report};
use crate::classify::Quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    /// `t, f_r(t)` for every outer radius `r`.
    HarmonicProfiles,
    /// `s, V(s)` with the fitted exponent in the header.
    #[value(name = "V_of_s", alias = "v_of_s")]
    VOfS,
    /// `r, h(r)` and both sides of the Sobolev bound.
    HTrace,
    /// Long-form sweep cells.
    Phase,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Renders the requested files as `(file name, contents)` in report order.
pub fn render(report: &Report, kind: PlotKind) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match kind {
        PlotKind::HarmonicProfiles => {
            for e in &report.ends {
                let Some(x) = &e.exhaustion else { continue };
                let mut s = String::new();
                let _ = writeln!(s, "# end {} harmonic profiles f_r(t)", e.name);
                let cols: Vec<String> = x.radii.iter().map(|r| format!("f_{}", num(*r))).collect();
                let _ = writeln!(s, "# t {} limit", cols.join(" "));
                for (i, t) in x.probes.iter().enumerate() {
                    let mut row = vec![num(*t)];
                    row.extend(x.values.iter().map(|v| num(v[i])));
                    row.push(x.limit.as_ref().map_or_else(|| "nan".to_string(), |l| num(l[i])));
                    let _ = writeln!(s, "{}", row.join(" "));
                }
                out.push((format!("{}_harmonic_profiles.dat", file_stem(&e.name)), s));
            }
        }
        PlotKind::VOfS => {
            for e in &report.ends {
                let Some(g) = &e.signature.parabolicity.volume_growth else { continue };
                let mut s = String::new();
                let _ = writeln!(s, "# end {} volume of s-balls", e.name);
                match g.exponent {
                    Some(x) => {
                        let _ = writeln!(s, "# fitted exponent {}", num(x));
                    }
                    None => {
                        let _ = writeln!(s, "# fitted exponent unavailable");
                    }
                }
                let _ = writeln!(s, "# s V");
                for p in &g.samples {
                    let _ = writeln!(s, "{} {}", num(p.arc_length), num(p.volume));
                }
                out.push((format!("{}_V_of_s.dat", file_stem(&e.name)), s));
            }
        }
        PlotKind::HTrace => {
            for e in &report.ends {
                let Some(h) = &e.energy else { continue };
                let mut s = String::new();
                let _ = writeln!(s, "# end {} energy trace, r0 = {}, S = {}", e.name, num(h.r0), num(h.sobolev_constant));
                let _ = writeln!(s, "# r h sobolev_side curvature_side");
                for r in &h.rows {
                    let c = r.curvature_side.map_or("nan".to_string(), num);
                    let _ = writeln!(s, "{} {} {} {}", num(r.r), num(r.h), num(r.sobolev_side), c);
                }
                out.push((format!("{}_h_trace.dat", file_stem(&e.name)), s));
            }
        }
        PlotKind::Phase => {
            if let Some(t) = &report.sweep {
                let mut s = String::new();
                let _ = writeln!(s, "# power family phase cells; p = nan for volume and parabolicity");
                let _ = writeln!(s, "# m alpha p quantity analytic numeric agreement");
                for c in &t.cells {
                    let q = match c.quantity {
                        Quantity::Volume => "volume",
                        Quantity::Parabolicity => "parabolicity",
                        Quantity::MeanCurvature => "lp",
                    };
                    let p = c.p.map_or("nan".to_string(), num);
                    let _ = writeln!(
                        s,
                        "{} {} {} {} {} {} {}",
                        c.m,
                        num(c.alpha),
                        p,
                        q,
                        c.analytic,
                        c.numeric,
                        c.agreement.label()
                    );
                }
                out.push(("phase.dat".to_string(), s));
            }
        }
    }
    out
}

/// Writes the rendered files into `dir`; returns their paths.
pub fn write(report: &Report, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>, String> {
    let files = render(report, kind);
    if files.is_empty() {
        let name = kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        return Err(format!("report has no data for {name}"));
    }
    let mut paths = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes()).map_err(|e| format!("{}: {e}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}
