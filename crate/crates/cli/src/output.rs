use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Self-describing CSV: `#key=value` provenance, a column row, data rows.
pub struct CsvWriter {
    out: Box<dyn Write>,
}

impl CsvWriter {
    pub fn create(path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out })
    }

    pub fn header(&mut self, provenance: &[(&str, String)], columns: &[&str]) -> io::Result<()> {
        for (k, v) in provenance {
            writeln!(self.out, "#{k}={v}")?;
        }
        writeln!(self.out, "{}", columns.join(","))
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        let cells: Vec<String> = values.iter().map(|&v| fmt_value(v)).collect();
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn text_row(&mut self, cells: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// 17 significant digits.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Human-readable lines go to stdout unless the CSV already occupies it.
pub struct Summary {
    to_stderr: bool,
}

impl Summary {
    pub fn new(csv_path: Option<&Path>) -> Self {
        Self {
            to_stderr: csv_path.is_none(),
        }
    }

    pub fn line(&self, text: impl AsRef<str>) {
        if self.to_stderr {
            eprintln!("{}", text.as_ref());
        } else {
            println!("{}", text.as_ref());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_carry_seventeen_digits() {
        assert_eq!(fmt_value(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_value(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_value(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_value(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
