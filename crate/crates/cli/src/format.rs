//! Locale-independent text output: reals with 15 significant digits,
//! hand-assembled JSON and CSV.

use rtl_core::{BidiagonalPencil, SpectralData, Trajectory};

/// Rounds to 15 significant digits and prints the shortest decimal that
/// reads back to the rounded value; exponent notation outside `1e-5..1e15`.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| real(x)).collect();
    format!("[{}]", items.join(","))
}

pub fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn pencil_json(p: &BidiagonalPencil) -> String {
    format!("{{\"a\":{},\"b\":{}}}", array(p.a()), array(p.b()))
}

pub fn spectral_json(s: &SpectralData) -> String {
    format!("{{\"lambda\":{},\"w\":{}}}", array(s.lambda()), array(s.w()))
}

fn header(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}_{k}"))
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(real).collect::<Vec<_>>().join(",")
}

pub fn pencil_csv(p: &BidiagonalPencil) -> String {
    let head: Vec<String> = header("a", p.len()).chain(header("b", p.len() - 1)).collect();
    format!("{}\n{}\n", head.join(","), row(p.a().iter().chain(p.b()).copied()))
}

pub fn spectral_csv(s: &SpectralData) -> String {
    let head: Vec<String> = header("lambda", s.len()).chain(header("w", s.len())).collect();
    format!("{}\n{}\n", head.join(","), row(s.lambda().iter().chain(s.w()).copied()))
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let n = t.size();
    let head: Vec<String> = std::iter::once("t".to_string()).chain(header("a", n)).chain(header("b", n - 1)).collect();
    let mut out = head.join(",");
    out.push('\n');
    for (time, p) in t.times.iter().zip(&t.samples) {
        out.push_str(&row(std::iter::once(*time).chain(p.a().iter().copied()).chain(p.b().iter().copied())));
        out.push('\n');
    }
    out
}

pub fn trajectory_json(t: &Trajectory) -> String {
    let items: Vec<String> = t
        .times
        .iter()
        .zip(&t.samples)
        .map(|(time, p)| format!("{{\"t\":{},\"a\":{},\"b\":{}}}", real(*time), array(p.a()), array(p.b())))
        .collect();
    format!("[{}]\n", items.join(","))
}
