use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rouge::RougeReport;

pub const HEADER: [&str; 4] = ["Model", "ROUGE-1 F", "ROUGE-2 F", "ROUGE-L F"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub rouge: RougeReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedTable {
    /// Space-aligned columns for reading.
    pub text: String,
    pub tsv: String,
}

/// Rounds half-up to three decimals. Rounding works on the shortest decimal
/// representation of `x`, so 0.2665 becomes 0.267 even though the nearest
/// double lies slightly below it.
pub fn format_score(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let repr = format!("{}", x.abs());
    let (int_part, frac_part) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes().chain(std::iter::repeat(b'0')).take(3))
        .collect();
    let round_up = frac_part.as_bytes().get(3).is_some_and(|&d| d >= b'5');
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - 3;
    let body = format!(
        "{}.{}",
        std::str::from_utf8(&digits[..split]).expect("ascii digits"),
        std::str::from_utf8(&digits[split..]).expect("ascii digits")
    );
    if x < 0.0 && body.bytes().any(|b| (b'1'..=b'9').contains(&b)) {
        format!("-{body}")
    } else {
        body
    }
}

fn cells(row: &TableRow) -> [String; 4] {
    [
        row.label.clone(),
        format_score(row.rouge.rouge1.f1),
        format_score(row.rouge.rouge2.f1),
        format_score(row.rouge.rouge_l.f1),
    ]
}

/// One line per row, in input order, under the header.
pub fn render_rows(rows: &[TableRow]) -> Result<RenderedTable> {
    if rows.is_empty() {
        return Err(Error::Usage(
            "a results table needs at least one report".into(),
        ));
    }
    let mut lines: Vec<[String; 4]> = vec![HEADER.map(String::from)];
    lines.extend(rows.iter().map(cells));

    let mut widths = [0usize; 4];
    for line in &lines {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut text = String::new();
    for line in &lines {
        let mut out = format!("{:<width$}", line[0], width = widths[0]);
        for (cell, w) in line[1..].iter().zip(&widths[1..]) {
            out.push_str(&format!("  {cell:>w$}"));
        }
        text.push_str(out.trim_end());
        text.push('\n');
    }
    let tsv = lines.iter().map(|l| l.join("\t") + "\n").collect();
    Ok(RenderedTable { text, tsv })
}
