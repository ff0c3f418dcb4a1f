//! Table output for `kr table`.

use std::fmt::Write;

use serde_json::json;

use hermsiegel::kr::{table_row, IntKind, TableRow};
use hermsiegel::ring::{rat_to_string, FieldParams};

use crate::OutFormat;

fn inv_text(inv: &[i64]) -> String {
    let s: Vec<String> = inv.iter().map(|a| a.to_string()).collect();
    format!("({})", s.join(","))
}

fn kind_name(k: IntKind) -> &'static str {
    match k {
        IntKind::Main => "selfdual",
        IntKind::Main2 => "asd",
        IntKind::Main2Prime => "prime",
    }
}

fn cells(r: &TableRow) -> [String; 5] {
    [
        inv_text(&r.invariants),
        r.den.clone(),
        r.pden.as_ref().map_or(String::new(), rat_to_string),
        r.int.as_ref().map_or(String::new(), |i| rat_to_string(&i.value)),
        r.int.as_ref().map_or(String::new(), |i| kind_name(i.kind).to_string()),
    ]
}

/// `1 - X + X^2` as `1 - X + X^{2}` for math mode.
fn latex_poly(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '*' => {}
            '^' => {
                out.push_str("^{");
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    out.push(*d);
                    chars.next();
                }
                out.push('}');
            }
            _ => out.push(c),
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(params: FieldParams, grid: &[Vec<i64>], out: OutFormat) -> anyhow::Result<String> {
    let rows: Vec<TableRow> = grid.iter().map(|inv| table_row(params, inv)).collect::<Result<_, _>>()?;
    let mut s = String::new();
    match out {
        OutFormat::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "invariants": r.invariants,
                        "den": r.den,
                        "pden": r.pden.as_ref().map(rat_to_string),
                        "int": r.int.as_ref().map(|i| i.to_json()),
                    })
                })
                .collect();
            writeln!(s, "{}", serde_json::to_string_pretty(&json!({ "q": params.q(), "rows": v }))?)?;
        }
        OutFormat::Csv => {
            writeln!(s, "invariants,den,pden,int,level")?;
            for r in &rows {
                let c = cells(r);
                writeln!(s, "{}", c.iter().map(|x| csv_field(x)).collect::<Vec<_>>().join(","))?;
            }
        }
        OutFormat::Latex => {
            writeln!(s, "% q = {}", params.q())?;
            writeln!(s, "\\begin{{tabular}}{{llll}}")?;
            writeln!(s, "$L$ & $\\mathrm{{Den}}(X, L)$ & $\\partial\\mathrm{{Den}}$ & $\\mathrm{{Int}}$ \\\\ \\hline")?;
            for r in &rows {
                let [inv, den, pden, int, _] = cells(r);
                writeln!(s, "${inv}$ & ${}$ & ${pden}$ & ${int}$ \\\\", latex_poly(&den))?;
            }
            writeln!(s, "\\end{{tabular}}")?;
        }
        OutFormat::Text => {
            let c: Vec<[String; 5]> = rows.iter().map(cells).collect();
            let header = ["invariants", "Den(X)", "pDen", "Int", "level"];
            let width: Vec<usize> =
                (0..5).map(|i| c.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0)).collect();
            let line = |r: &[&str]| r.iter().zip(&width).map(|(x, w)| format!("{x:<w$}")).collect::<Vec<_>>().join("  ");
            writeln!(s, "{}", line(&header).trim_end())?;
            for r in &c {
                let refs: Vec<&str> = r.iter().map(String::as_str).collect();
                writeln!(s, "{}", line(&refs).trim_end())?;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latex_exponents() {
        assert_eq!(latex_poly("1 - 3*X + X^12"), "1 - 3X + X^{12}");
    }
}
