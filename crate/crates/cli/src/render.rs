/// Numeric columns are right-aligned, everything else left-aligned.
pub fn table(headers: &[String], rows: &[Vec<String>]) -> String {
    let ncols = headers.len().max(rows.iter().map(Vec::len).max().unwrap_or(0));
    let numeric: Vec<bool> = (0..ncols)
        .map(|c| c > 0 && rows.iter().all(|r| r.get(c).is_none_or(|x| x.is_empty() || x.parse::<i64>().is_ok())))
        .collect();
    let mut widths = vec![0; ncols];
    for row in std::iter::once(headers).chain(rows.iter().map(Vec::as_slice)) {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.chars().count());
        }
    }
    let line = |row: &[String]| {
        let cells: Vec<String> = (0..ncols)
            .map(|c| {
                let cell = row.get(c).map(String::as_str).unwrap_or("");
                if numeric[c] {
                    format!("{cell:>w$}", w = widths[c])
                } else {
                    format!("{cell:<w$}", w = widths[c])
                }
            })
            .collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = String::new();
    if !headers.is_empty() {
        out += &line(headers);
        let total: usize = widths.iter().sum::<usize>() + 2 * ncols.saturating_sub(1);
        out += &"-".repeat(total);
        out.push('\n');
    }
    for row in rows {
        out += &line(row);
    }
    out
}

pub fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}
