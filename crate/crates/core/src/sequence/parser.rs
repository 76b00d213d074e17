//! Line-oriented sequence language.
//!
//! ```text
//! # comment
//! init nbar=0 nmax=400 spin=2 level=0
//! rot pair=01 axis=y theta=pi/2
//! nl k=2 zeta=1.12 phi=0 cond=z echo=x dur=400e-6
//! rot pair=01 axis=y theta=pi/2
//! measure herald=dark
//! ```
//!
//! Also accepted: `sdf axis=<x|y|z> alpha=<complex> dur=<s>`, `wait dur=<s>`,
//! `measure herald=<dark|bright> model=<name>` and a `noise nbar0=<f> ndot=<f>`
//! directive that sets the sequence's heating model.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::ir::{Herald, Instruction, Sequence, Span};
use super::tokens::{parse_axis_angle, parse_complex, parse_nonneg, parse_real, parse_uint};
use crate::analysis::DetectionModel;
use crate::error::{Error, Result};
use crate::evolution::{NoiseSpec, NonlinearSpec};
use crate::fock::Pauli;

struct Field<'a> {
    value: &'a str,
    column: usize,
    used: bool,
}

struct Directive<'a> {
    line: usize,
    column: usize,
    keyword: &'a str,
    fields: BTreeMap<&'a str, Field<'a>>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Directive<'a> {
    fn take(&mut self, key: &str) -> Option<(&'a str, usize)> {
        self.fields.get_mut(key).map(|f| {
            f.used = true;
            (f.value, f.column)
        })
    }

    fn required(&mut self, key: &str) -> Result<(&'a str, usize)> {
        let (line, column, kw) = (self.line, self.column, self.keyword);
        self.take(key)
            .ok_or_else(|| parse_err(line, column, format!("{kw}: missing '{key}=<value>'")))
    }

    fn value<T>(
        &mut self,
        key: &str,
        f: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        let (v, col) = self.required(key)?;
        f(v).map_err(|m| parse_err(self.line, col, format!("{key}: {m}")))
    }

    fn optional<T>(
        &mut self,
        key: &str,
        f: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, col)) => f(v)
                .map(Some)
                .map_err(|m| parse_err(self.line, col, format!("{key}: {m}"))),
        }
    }

    fn finish(&self, allowed: &[&str]) -> Result<()> {
        for (k, f) in &self.fields {
            if !f.used {
                let keys = allowed.join(", ");
                return Err(parse_err(
                    self.line,
                    f.column - k.len() - 1,
                    format!(
                        "{}: unknown key '{k}' (expected one of {keys})",
                        self.keyword
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Option<Directive<'_>>> {
    let body = line.split('#').next().unwrap_or("");
    let mut words = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                words.push((s, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        words.push((s, &body[s..]));
    }
    let Some(&(kw_col, keyword)) = words.first() else {
        return Ok(None);
    };
    let mut fields = BTreeMap::new();
    for &(col, word) in &words[1..] {
        let Some((k, v)) = word.split_once('=') else {
            return Err(parse_err(
                line_no,
                col + 1,
                format!("expected 'key=value', found '{word}'"),
            ));
        };
        if k.is_empty() || v.is_empty() {
            return Err(parse_err(
                line_no,
                col + 1,
                format!("expected 'key=value', found '{word}'"),
            ));
        }
        let field = Field {
            value: v,
            column: col + k.len() + 2,
            used: false,
        };
        if fields.insert(k, field).is_some() {
            return Err(parse_err(line_no, col + 1, format!("duplicate key '{k}'")));
        }
    }
    Ok(Some(Directive {
        line: line_no,
        column: kw_col + 1,
        keyword,
        fields,
    }))
}

fn parse_pair(text: &str) -> std::result::Result<(usize, usize), String> {
    let b = text.as_bytes();
    if b.len() == 2 && b[0].is_ascii_digit() && b[1].is_ascii_digit() && b[0] != b[1] {
        Ok(((b[0] - b'0') as usize, (b[1] - b'0') as usize))
    } else {
        Err(format!(
            "expected two distinct level digits like '01', found '{text}'"
        ))
    }
}

fn parse_pauli(text: &str) -> std::result::Result<Pauli, String> {
    text.parse::<Pauli>()
        .map_err(|_| format!("expected 'x', 'y' or 'z', found '{text}'"))
}

fn parse_herald(text: &str) -> std::result::Result<Herald, String> {
    match text {
        "dark" => Ok(Herald::Dark),
        "bright" => Ok(Herald::Bright),
        _ => Err(format!("expected 'dark' or 'bright', found '{text}'")),
    }
}

fn parse_spin_dim(text: &str) -> std::result::Result<usize, String> {
    match parse_uint(text)? {
        d @ (2 | 3) => Ok(d),
        d => Err(format!("expected 2 or 3, found {d}")),
    }
}

fn domain_at(d: &Directive, e: Error) -> Error {
    parse_err(d.line, d.column, format!("{}: {e}", d.keyword))
}

pub fn parse_sequence(text: &str) -> Result<Sequence> {
    let mut instructions = Vec::new();
    let mut spans = Vec::new();
    let mut noise = NoiseSpec::off();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let Some(mut d) = tokenize(line, raw)? else {
            continue;
        };
        let span = Span {
            line,
            column: d.column,
        };
        if instructions.is_empty() && d.keyword != "init" && d.keyword != "noise" {
            return Err(parse_err(line, d.column, "sequence must begin with init"));
        }
        let ins = match d.keyword {
            "init" => {
                if !instructions.is_empty() {
                    return Err(parse_err(line, d.column, "init may only appear once, at the start"));
                }
                let nbar = d.value("nbar", parse_nonneg)?;
                let n_max = d.value("nmax", parse_uint)?;
                let spin_dim = d.value("spin", parse_spin_dim)?;
                let level = d.value("level", parse_uint)?;
                d.finish(&["nbar", "nmax", "spin", "level"])?;
                if level >= spin_dim {
                    return Err(parse_err(line, d.column, format!("init: level {level} outside spin dimension {spin_dim}")));
                }
                Instruction::Init { nbar, n_max, spin_dim, level }
            }
            "noise" => {
                let nbar0 = d.value("nbar0", parse_nonneg)?;
                let ndot = d.value("ndot", parse_nonneg)?;
                d.finish(&["nbar0", "ndot"])?;
                noise = NoiseSpec::new(nbar0, ndot).map_err(|e| domain_at(&d, e))?;
                continue;
            }
            "rot" => {
                let pair = d.value("pair", parse_pair)?;
                let gamma = d.value("axis", parse_axis_angle)?;
                let theta = d.value("theta", parse_real)?;
                d.finish(&["pair", "axis", "theta"])?;
                Instruction::Rot { pair, gamma, theta }
            }
            "nl" => {
                let k = d.value("k", parse_uint)?;
                let zeta = d.value("zeta", parse_complex)?;
                let phi = d.optional("phi", parse_real)?.unwrap_or(0.0);
                let cond = d.value("cond", parse_pauli)?;
                let echo = d.optional("echo", parse_axis_angle)?;
                let duration = d.value("dur", parse_nonneg)?;
                d.finish(&["k", "zeta", "phi", "cond", "echo", "dur"])?;
                let mut spec =
                    NonlinearSpec::new(k, zeta * C64::from_polar(1.0, phi), cond).map_err(|e| domain_at(&d, e))?;
                if let Some(g) = echo {
                    if cond != Pauli::Z {
                        return Err(parse_err(line, d.column, "nl: echo requires cond=z"));
                    }
                    spec = spec.with_echo(g);
                }
                Instruction::Nonlinear { spec, duration }
            }
            "sdf" => {
                let axis = d.value("axis", parse_pauli)?;
                let alpha = d.value("alpha", parse_complex)?;
                let duration = d.value("dur", parse_nonneg)?;
                d.finish(&["axis", "alpha", "dur"])?;
                Instruction::SdfDisplace { axis, alpha, duration }
            }
            "wait" => {
                let duration = d.value("dur", parse_nonneg)?;
                d.finish(&["dur"])?;
                Instruction::Wait { duration }
            }
            "measure" => {
                let herald = d.value("herald", parse_herald)?;
                let model = d.optional("model", |s| DetectionModel::by_name(s).map_err(|e| e.to_string()))?;
                d.finish(&["herald", "model"])?;
                Instruction::Measure { herald, model }
            }
            other => {
                return Err(parse_err(
                    line,
                    d.column,
                    format!("unknown instruction '{other}' (expected init, rot, nl, sdf, wait, measure or noise)"),
                ))
            }
        };
        instructions.push(ins);
        spans.push(span);
    }
    if instructions.is_empty() {
        return Err(parse_err(1, 1, "sequence must begin with init"));
    }
    Sequence::with_spans(instructions, spans, noise)
}

fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        fmt_f(z.re)
    } else {
        format!(
            "{:?}{}{:?}i",
            z.re,
            if z.im.is_sign_negative() { "" } else { "+" },
            z.im
        )
    }
}

/// Text form that [`parse_sequence`] reads back to an identical sequence.
pub fn format_sequence(seq: &Sequence) -> String {
    let mut out = String::new();
    if seq.noise.enabled {
        out.push_str(&format!(
            "noise nbar0={} ndot={}\n",
            fmt_f(seq.noise.nbar0),
            fmt_f(seq.noise.ndot)
        ));
    }
    for ins in seq.instructions() {
        let line = match ins {
            Instruction::Init {
                nbar,
                n_max,
                spin_dim,
                level,
            } => {
                format!(
                    "init nbar={} nmax={n_max} spin={spin_dim} level={level}",
                    fmt_f(*nbar)
                )
            }
            Instruction::Rot { pair, gamma, theta } => {
                format!(
                    "rot pair={}{} axis={} theta={}",
                    pair.0,
                    pair.1,
                    fmt_f(*gamma),
                    fmt_f(*theta)
                )
            }
            Instruction::Nonlinear { spec, duration } => {
                let echo = spec
                    .echo
                    .map(|g| format!(" echo={}", fmt_f(g)))
                    .unwrap_or_default();
                format!(
                    "nl k={} zeta={} cond={}{echo} dur={}",
                    spec.k,
                    fmt_c(spec.zeta),
                    spec.cond,
                    fmt_f(*duration)
                )
            }
            Instruction::SdfDisplace {
                axis,
                alpha,
                duration,
            } => {
                format!(
                    "sdf axis={axis} alpha={} dur={}",
                    fmt_c(*alpha),
                    fmt_f(*duration)
                )
            }
            Instruction::Wait { duration } => format!("wait dur={}", fmt_f(*duration)),
            Instruction::Measure { herald, model } => {
                let h = match herald {
                    Herald::Dark => "dark",
                    Herald::Bright => "bright",
                };
                let m = if model.is_some() {
                    " model=standard"
                } else {
                    ""
                };
                format!("measure herald={h}{m}")
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const ECHO_SEQUENCE: &str = "\
# equal superposition
init nbar=0 nmax=400 spin=2 level=0
rot pair=01 axis=y theta=pi/2
nl k=2 zeta=1.12 phi=0 cond=z echo=x dur=400e-6   # two arms
rot pair=01 axis=y theta=pi/2
measure herald=dark
";

    #[test]
    fn echo_sequence_parses() {
        let seq = parse_sequence(ECHO_SEQUENCE).unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.spans()[2], Span { line: 4, column: 1 });
        match &seq.instructions()[1] {
            Instruction::Rot { pair, gamma, theta } => {
                assert_eq!(*pair, (0, 1));
                assert_eq!(*gamma, FRAC_PI_2);
                assert_eq!(*theta, FRAC_PI_2);
            }
            other => panic!("{other:?}"),
        }
        match &seq.instructions()[2] {
            Instruction::Nonlinear { spec, duration } => {
                assert_eq!(spec.zeta, C64::new(1.12, 0.0));
                assert_eq!(spec.echo, Some(0.0));
                assert_eq!(*duration, 400e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_init() {
        let err = parse_sequence("rot pair=01 axis=y theta=pi/2\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                column: 1,
                message: "sequence must begin with init".into()
            }
        );
        assert!(parse_sequence("# nothing\n").is_err());
    }

    #[test]
    fn error_positions() {
        let text = "init nbar=0 nmax=10 spin=2 level=0\nrot pair=01 axis=q theta=1\n";
        match parse_sequence(text).unwrap_err() {
            Error::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (2, 18));
                assert!(
                    message.contains("expected 'x', 'y' or an angle"),
                    "{message}"
                );
            }
            e => panic!("{e}"),
        }
        let text = "init nbar=0 nmax=10 spin=2 level=0\nwait dur=1 extra=2\n";
        match parse_sequence(text).unwrap_err() {
            Error::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (2, 12));
                assert!(message.contains("unknown key 'extra'"));
            }
            e => panic!("{e}"),
        }
        assert!(parse_sequence("init nbar=0 nmax=10 spin=2 level=2\n").is_err());
        assert!(parse_sequence(
            "init nbar=0 nmax=10 spin=2 level=0\nnl k=2 zeta=1 cond=x echo=x dur=0\n"
        )
        .is_err());
        assert!(parse_sequence("init nbar=0 nmax=10 spin=2 level=0\nwait\n").is_err());
        assert!(parse_sequence("init nbar=0 nmax=10 spin=2 level=0\nfoo dur=1\n").is_err());
        assert!(parse_sequence(
            "init nbar=0 nmax=10 spin=2 level=0\nmeasure herald=dark model=nope\n"
        )
        .is_err());
    }

    #[test]
    fn format_roundtrip() {
        let text = "noise nbar0=0.1 ndot=300\ninit nbar=0 nmax=40 spin=3 level=0\nrot pair=02 axis=0.3 theta=pi/4\n\
                    nl k=3 zeta=0.5-0.2i phi=0.1 cond=x dur=5e-4\nsdf axis=x alpha=1.62@pi/4 dur=1e-4\n\
                    wait dur=2e-4\nmeasure herald=bright model=standard\n";
        let seq = parse_sequence(text).unwrap();
        assert!(seq.noise.enabled);
        let again = parse_sequence(&format_sequence(&seq)).unwrap();
        assert_eq!(seq.instructions(), again.instructions());
        assert_eq!(seq.noise, again.noise);
    }
}
