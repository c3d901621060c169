//! Text format for [`PowerSystemModel`].
//!
//! ```text
//! # comment
//! system smib
//! base_frequency 60
//! generators 1
//! gen <H> <D> <xd> <E> <Pm>          one line per generator
//! infinite_bus <V>                   optional
//! matrix prefault <n>                n rows of n complex entries "re im"
//! matrix postfault <n>               optional, defaults to prefault
//! fault <name> <n>                   during-fault matrix, repeatable
//! ```
//!
//! `n` is the node count: generators plus one when an infinite bus is
//! declared (the infinite bus is the last node).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::model::{Admittance, FaultCase, Generator, InfiniteBus, PowerSystemModel};
use super::SimError;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (no, line) in self.inner.by_ref() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((no + 1, line.split_whitespace().collect()));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> SimError {
    SimError::Parse { line, msg: msg.into() }
}

fn number(line: usize, tok: &str) -> Result<f64, SimError> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("expected a number, found {tok:?}")))
}

fn count(line: usize, tok: &str) -> Result<usize, SimError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a count, found {tok:?}")))
}

fn read_matrix(lines: &mut Lines<'_>, header_line: usize, n: usize) -> Result<Admittance, SimError> {
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        let (no, toks) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(header_line, format!("matrix ended after {i} of {n} rows")))?;
        if toks.len() != 2 * n {
            return Err(parse_err(no, format!("expected {} numbers in row, found {}", 2 * n, toks.len())));
        }
        for j in 0..n {
            m[(i, j)] = Complex64::new(number(no, toks[2 * j])?, number(no, toks[2 * j + 1])?);
        }
    }
    Ok(m)
}

pub fn parse_model(text: &str) -> Result<PowerSystemModel, SimError> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let mut name = None;
    let mut base_frequency = 60.0;
    let mut declared_gens = None;
    let mut generators = Vec::new();
    let mut infinite_bus = None;
    let mut prefault = None;
    let mut postfault = None;
    let mut faults = Vec::new();

    while let Some((no, toks)) = lines.next_tokens() {
        match (toks[0], toks.len()) {
            ("system", 2) => name = Some(toks[1].to_string()),
            ("base_frequency", 2) => base_frequency = number(no, toks[1])?,
            ("generators", 2) => declared_gens = Some(count(no, toks[1])?),
            ("gen", 6) => generators.push(Generator {
                inertia: number(no, toks[1])?,
                damping: number(no, toks[2])?,
                transient_reactance: number(no, toks[3])?,
                emf: number(no, toks[4])?,
                mechanical_power: number(no, toks[5])?,
            }),
            ("infinite_bus", 2) => infinite_bus = Some(InfiniteBus { voltage: number(no, toks[1])? }),
            ("matrix", 3) => {
                let m = read_matrix(&mut lines, no, count(no, toks[2])?)?;
                match toks[1] {
                    "prefault" => prefault = Some(m),
                    "postfault" => postfault = Some(m),
                    other => return Err(parse_err(no, format!("unknown matrix stage {other:?}"))),
                }
            }
            ("fault", 3) => {
                let m = read_matrix(&mut lines, no, count(no, toks[2])?)?;
                faults.push(FaultCase { name: toks[1].to_string(), admittance: m });
            }
            (key, _) => return Err(parse_err(no, format!("unrecognized or malformed line starting with {key:?}"))),
        }
    }

    let declared = declared_gens.ok_or_else(|| parse_err(0, "missing `generators` header"))?;
    if declared != generators.len() {
        return Err(parse_err(
            0,
            format!("header declares {declared} generators, found {}", generators.len()),
        ));
    }
    let prefault = prefault.ok_or_else(|| parse_err(0, "missing prefault matrix"))?;
    let model = PowerSystemModel {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        base_frequency,
        generators,
        infinite_bus,
        postfault: postfault.unwrap_or_else(|| prefault.clone()),
        prefault,
        faults,
    };
    model.validate()?;
    Ok(model)
}

pub fn load_model(path: &Path) -> Result<PowerSystemModel, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(path.display().to_string(), e))?;
    parse_model(&text)
}

fn write_matrix(out: &mut String, header: &str, m: &Admittance) {
    let _ = writeln!(out, "{header} {}", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{} {}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "  {}", row.join("  "));
    }
}

/// Renders a model in the text format; `parse_model` reads it back exactly.
pub fn format_model(model: &PowerSystemModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", model.name);
    let _ = writeln!(out, "base_frequency {}", model.base_frequency);
    let _ = writeln!(out, "generators {}", model.generators.len());
    for g in &model.generators {
        let _ = writeln!(
            out,
            "gen {} {} {} {} {}",
            g.inertia, g.damping, g.transient_reactance, g.emf, g.mechanical_power
        );
    }
    if let Some(bus) = model.infinite_bus {
        let _ = writeln!(out, "infinite_bus {}", bus.voltage);
    }
    write_matrix(&mut out, "matrix prefault", &model.prefault);
    if model.postfault != model.prefault {
        write_matrix(&mut out, "matrix postfault", &model.postfault);
    }
    for f in &model.faults {
        write_matrix(&mut out, &format!("fault {}", f.name), &f.admittance);
    }
    out
}
