use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rotspec::approx::{
    certify_normal_within, certify_pseudospectrum, convergence_study, one_sided, one_sided_pseudospectrum,
    OneSidedSpectrum,
};
use rotspec::constants::to_f64_up;
use rotspec::contfrac::{convergent_gap, expand, GapValue};
use rotspec::matmodel::build_operator;
use rotspec::pseudospectra::{write_grid_csv, write_grid_pgm, GridParams, PseudospectrumGrid, Region, Resolution};
use rotspec::spectral::hermitian_eigenvalues;
use serde_json::json;

use crate::config::{parse_levels, Common, ConfigFile, Format};
use crate::error::CliError;

/// Lines for stdout, or the error to exit with.
pub type Report = Result<Vec<String>, CliError>;

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: PathBuf, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<PathBuf, CliError> {
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn write_json(path: PathBuf, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    write_file(path, |w| {
        serde_json::to_writer(&mut *w, value)?;
        writeln!(w)
    })
}

fn positive_epsilon(eps: f64) -> Result<f64, CliError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(eps)
    } else {
        Err(CliError::Usage(format!("--epsilon must be positive, got {eps}")))
    }
}

fn wrote(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| format!("wrote {}", p.display())).collect()
}

pub fn expand_cmd(c: &Common, file: &ConfigFile, terms: Option<usize>) -> Report {
    let terms = terms.or(file.terms).unwrap_or(10);
    if terms == 0 {
        return Err(CliError::Usage("--terms must be at least 1".into()));
    }
    c.theta.check_rotation_parameter().map_err(|e| CliError::Input(e.to_string()))?;
    // one extra quotient supplies q_{N+1} for the last gap bound
    let exp = expand(&c.theta, terms + 1).map_err(|e| CliError::Input(e.to_string()))?;
    let shown = exp.len().min(terms);
    let mut rows = Vec::with_capacity(shown);
    let mut violations = Vec::new();
    for k in 1..=shown {
        let (p, q) = exp.convergent(k).expect("k <= len");
        let a = exp.quotient(k).expect("k <= len");
        let gap = if k < exp.len() {
            let g = convergent_gap(&exp, k).map_err(|e| CliError::Input(e.to_string()))?;
            // for a terminating expansion the step before the last is an equality
            let equality = exp.is_terminated() && k + 1 == exp.len();
            if !g.holds && !equality {
                violations.push(k);
            }
            let value = match &g.gap {
                GapValue::Enclosure { hi, .. } => to_f64_up(hi),
                v => v.to_f64(),
            };
            Some((value, to_f64_up(&g.bound), g.holds))
        } else {
            None
        };
        rows.push((k, a.to_string(), p.to_string(), q.to_string(), gap));
    }
    let terminating = exp.is_terminated() && exp.len() <= terms;
    let mut out = vec![format!("{:>3} {:>12} {:>14} {:>14} {:>24} {:>24}", "k", "a_k", "p_k", "q_k", "gap", "bound")];
    for (k, a, p, q, gap) in &rows {
        let (g, b) = match gap {
            Some((g, b, _)) => (format!("{g:.16e}"), format!("{b:.16e}")),
            None => ("0".into(), "-".into()),
        };
        out.push(format!("{k:>3} {a:>12} {p:>14} {q:>14} {g:>24} {b:>24}"));
    }
    if terminating {
        out.push("expansion terminates: θ is rational".into());
    }
    if let Some(per) = exp.periodic_part() {
        out.push(format!("periodic: preperiod {}, period {}", per.preperiod, per.period));
    }
    if c.wants(Format::Csv) || c.wants(Format::Json) {
        create_out_dir(&c.out_dir)?;
    }
    let mut paths = Vec::new();
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join("expand.csv"), |w| {
            writeln!(w, "k,a_k,p_k,q_k,gap,bound,holds")?;
            for (k, a, p, q, gap) in &rows {
                match gap {
                    Some((g, b, h)) => writeln!(w, "{k},{a},{p},{q},{g:.16e},{b:.16e},{h}")?,
                    None => writeln!(w, "{k},{a},{p},{q},,,")?,
                }
            }
            Ok(())
        })?);
    }
    if c.wants(Format::Json) {
        let table: Vec<_> = rows
            .iter()
            .map(|(k, a, p, q, gap)| {
                json!({
                    "k": k, "a_k": a, "p_k": p, "q_k": q,
                    "gap": gap.map(|g| g.0), "bound": gap.map(|g| g.1), "holds": gap.map(|g| g.2),
                })
            })
            .collect();
        let v = json!({
            "theta": c.theta.to_string(),
            "terminating": terminating,
            "periodic": exp.periodic_part(),
            "rows": table,
        });
        paths.push(write_json(c.out_dir.join("expand.json"), &v)?);
    }
    out.extend(wrote(&paths));
    if !violations.is_empty() {
        return Err(CliError::Violation(format!("gap bound fails at k = {violations:?}")));
    }
    Ok(out)
}

pub fn spectrum_cmd(c: &Common, file: &ConfigFile, level: Option<usize>) -> Report {
    let n = level.or(file.level).unwrap_or(5);
    let (cloud, cert) = certify_normal_within(&c.theta, &c.spec, n, c.max_q)?;
    create_out_dir(&c.out_dir)?;
    let mut paths = Vec::new();
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join("cloud.csv"), |w| cloud.write_csv(w))?);
    }
    if c.wants(Format::Json) {
        paths.push(write_json(c.out_dir.join("certificate.json"), &cert.to_json(&cloud))?);
    }
    let mut out = vec![
        format!("level n = {n}: q = {:?}, {} points", cert.q_pair, cloud.len()),
        format!("epsilon_sharp = {:.6}, epsilon_clean = {:.6}", cert.epsilon_sharp, cert.epsilon_clean),
    ];
    out.extend(cert.caveats.iter().map(|s| format!("caveat: {s}")));
    out.extend(wrote(&paths));
    Ok(out)
}

fn parse_region(file: &ConfigFile, region: Option<&str>) -> Result<Option<Region>, CliError> {
    let Some(s) = region else {
        return Ok(file.region.map(|[a, b, c, d]| Region::new(a, b, c, d)));
    };
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--region '{s}': expected re_min,re_max,im_min,im_max")))?;
    let [a, b, c, d] = parts[..] else {
        return Err(CliError::Usage(format!("--region '{s}': expected four numbers")));
    };
    Ok(Some(Region::new(a, b, c, d)))
}

fn parse_resolution(file: &ConfigFile, resolution: Option<usize>) -> Result<Resolution, CliError> {
    match resolution.or(file.resolution) {
        Some(r) if r < 2 => Err(CliError::Usage("--resolution must be at least 2".into())),
        Some(r) => Ok(Resolution::square(r)),
        None => Ok(Resolution::default()),
    }
}

fn write_grid(c: &Common, stem: &str, grid: &PseudospectrumGrid) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join(format!("{stem}.csv")), |w| write_grid_csv(grid, w))?);
    }
    if c.wants(Format::Pgm) {
        paths.push(write_file(c.out_dir.join(format!("{stem}.pgm")), |w| write_grid_pgm(grid, w))?);
    }
    Ok(paths)
}

pub fn pseudospectrum_cmd(
    c: &Common,
    file: &ConfigFile,
    level: Option<usize>,
    epsilon: Option<f64>,
    region: Option<&str>,
    resolution: Option<usize>,
) -> Report {
    let n = level.or(file.level).unwrap_or(5);
    let eps = positive_epsilon(epsilon.or(file.epsilon).unwrap_or(0.5))?;
    let region = parse_region(file, region)?;
    let resolution = parse_resolution(file, resolution)?;
    let out = certify_pseudospectrum(&c.theta, &c.spec, n, eps, region, resolution, c.max_q)?;
    let cert = &out.certificate;
    create_out_dir(&c.out_dir)?;
    let mut paths = Vec::new();
    for (k, (grid, q)) in [(n - 1, (&out.grids[0], cert.q_pair[0])), (n, (&out.grids[1], cert.q_pair[1]))] {
        paths.extend(write_grid(c, &format!("grid_k{k}_q{q}"), grid)?);
    }
    if c.wants(Format::Json) {
        let v = serde_json::to_value(cert).expect("certificate serializes");
        paths.push(write_json(c.out_dir.join("report.json"), &v)?);
    }
    let mut lines = vec![format!(
        "level n = {n}: q = {:?}, grid {}x{}, epsilon = {eps}",
        cert.q_pair, cert.grid.resolution.nx, cert.grid.resolution.ny
    )];
    match (cert.radius(), &cert.inclusion) {
        (Some(r), Some(check)) => {
            lines.push(format!(
                "epsilon_n = {r:.6}: inner mask {} points, outer mask {} points",
                cert.inner_count,
                cert.outer_count.unwrap_or(0)
            ));
            lines.push(format!(
                "inner ⊆ outer: {} strict and {} slack misses",
                check.strict_violations.len(),
                check.slack_violations.len()
            ));
        }
        _ => lines.push("spec is not four-term: rate-only certificate, no explicit radius".into()),
    }
    lines.extend(cert.caveats.iter().map(|s| format!("caveat: {s}")));
    lines.extend(wrote(&paths));
    if !cert.holds() {
        for l in &lines {
            println!("{l}");
        }
        return Err(CliError::Violation("inner mask is not contained in the outer mask".into()));
    }
    Ok(lines)
}

fn reduced_fractions(q_max: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(0, 1)];
    for q in 2..=q_max {
        out.extend((1..q).filter(|&p| gcd(p, q) == 1).map(|p| (p, q)));
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn butterfly_cmd(c: &Common, file: &ConfigFile, q_max: Option<u64>) -> Report {
    let q_max = q_max.or(file.q_max).unwrap_or(20);
    if q_max == 0 {
        return Err(CliError::Usage("--q-max must be at least 1".into()));
    }
    if q_max > c.max_q {
        return Err(CliError::Input(format!("q_max = {q_max} exceeds the budget max_q = {}", c.max_q)));
    }
    if !c.spec.is_canonical() || !c.spec.is_self_adjoint() {
        return Err(CliError::Input("the butterfly sweep needs a self-adjoint four-term spec".into()));
    }
    let fractions = reduced_fractions(q_max);
    let spectra: Vec<Vec<f64>> = fractions
        .par_iter()
        .map(|&(p, q)| -> Result<Vec<f64>, CliError> {
            let m = build_operator(&c.spec, p, q).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(hermitian_eigenvalues(&m)?.real_values().expect("Hermitian spectrum is real"))
        })
        .collect::<Result<_, _>>()?;
    let rows: usize = spectra.iter().map(Vec::len).sum();
    let (lo, hi) = spectra
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    create_out_dir(&c.out_dir)?;
    let mut paths = Vec::new();
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join("butterfly.csv"), |w| {
            writeln!(w, "p,q,eigenvalue")?;
            for (&(p, q), values) in fractions.iter().zip(&spectra) {
                for x in values {
                    writeln!(w, "{p},{q},{x:.16e}")?;
                }
            }
            Ok(())
        })?);
    }
    if c.wants(Format::Json) {
        let v = json!({
            "spec": c.spec,
            "q_max": q_max,
            "fractions": fractions.len(),
            "rows": rows,
            "min": lo,
            "max": hi,
        });
        paths.push(write_json(c.out_dir.join("butterfly.json"), &v)?);
    }
    let mut out = vec![format!(
        "{} fractions p/q with q <= {q_max}, {rows} eigenvalues in [{lo:.6}, {hi:.6}]",
        fractions.len()
    )];
    out.extend(wrote(&paths));
    Ok(out)
}

pub fn onesided_cmd(
    c: &Common,
    file: &ConfigFile,
    denominators: &[u64],
    epsilon: Option<f64>,
    resolution: Option<usize>,
) -> Report {
    let denominators = if denominators.is_empty() {
        file.denominators.clone().unwrap_or_else(|| vec![10, 100, 1000])
    } else {
        denominators.to_vec()
    };
    let eps = positive_epsilon(epsilon.or(file.epsilon).unwrap_or(0.5))?;
    create_out_dir(&c.out_dir)?;
    let mut paths = Vec::new();
    let mut summary = Vec::new();
    let mut out = Vec::new();
    for &n in &denominators {
        let (spectrum, cert) = one_sided(&c.theta, &c.spec, n, c.max_q)?;
        let kind = match spectrum {
            OneSidedSpectrum::Spectrum(cloud) => {
                if c.wants(Format::Csv) {
                    paths.push(write_file(c.out_dir.join(format!("onesided_n{n}.csv")), |w| cloud.write_csv(w))?);
                }
                "spectrum"
            }
            OneSidedSpectrum::NotNormal => {
                let norm = c.spec.norm_bound().map_err(|e| CliError::Input(e.to_string()))?;
                let params = GridParams::new(Region::default_for(norm, eps), parse_resolution(file, resolution)?);
                let (grid, _, _) = one_sided_pseudospectrum(&c.theta, &c.spec, n, eps, params, c.max_q)?;
                paths.extend(write_grid(c, &format!("onesided_n{n}_grid"), &grid)?);
                "pseudospectrum"
            }
        };
        out.push(format!(
            "n = {n}: p = {}{}, |θ − p/n| = {:.6e}, radius C₁/√n = {:.6}",
            cert.chosen_p,
            if cert.wrapped { " (wrapped from n)" } else { "" },
            cert.deviation,
            cert.radius
        ));
        summary.push((cert, kind));
    }
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join("onesided.csv"), |w| {
            writeln!(w, "n,p,deviation,c1,radius,output")?;
            for (s, kind) in &summary {
                writeln!(w, "{},{},{:.16e},{:.16e},{:.16e},{kind}", s.denominator_n, s.chosen_p, s.deviation, s.c1, s.radius)?;
            }
            Ok(())
        })?);
    }
    if c.wants(Format::Json) {
        let certs: Vec<_> = summary.iter().map(|(s, _)| s).collect();
        paths.push(write_json(c.out_dir.join("onesided.json"), &json!({ "certificates": certs }))?);
    }
    out.extend(wrote(&paths));
    Ok(out)
}

pub fn converge_cmd(c: &Common, file: &ConfigFile, levels: Option<&str>) -> Report {
    let levels = parse_levels(levels.or(file.levels.as_deref()).unwrap_or("3..9"))?;
    let table = convergence_study(&c.theta, &c.spec, levels, c.max_q)?;
    create_out_dir(&c.out_dir)?;
    let mut paths = Vec::new();
    if c.wants(Format::Csv) {
        paths.push(write_file(c.out_dir.join("converge.csv"), |w| table.write_csv(w))?);
    }
    if c.wants(Format::Json) {
        let v = serde_json::to_value(&table).expect("table serializes");
        paths.push(write_json(c.out_dir.join("converge.json"), &v)?);
    }
    let mut out = vec![format!("{:>3} {:>8} {:>8} {:>14} {:>14} {:>14}", "n", "q_n-1", "q_n", "eps_sharp", "eps_clean", "empirical_dH")];
    for r in &table.rows {
        out.push(format!(
            "{:>3} {:>8} {:>8} {:>14.6} {:>14.6} {:>14.6}{}",
            r.n,
            r.q_prev,
            r.q_n,
            r.epsilon_sharp,
            r.epsilon_clean,
            r.empirical_dh,
            if r.within_tolerance() { "" } else { "  EXCEEDS" }
        ));
    }
    out.extend(wrote(&paths));
    if !table.is_consistent() {
        for l in &out {
            println!("{l}");
        }
        return Err(CliError::Violation("empirical distance exceeds the certified tolerance".into()));
    }
    Ok(out)
}
