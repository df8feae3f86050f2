//! Initial-state specifications accepted by `--init`.

use std::fmt::Write as _;
use std::path::Path;

use bixon_core::InitialState;
use num_complex::Complex64;

use crate::error::CliError;

/// Norm tolerance for user-supplied states; amplitudes are rescaled after.
pub const LOAD_TOLERANCE: f64 = 1e-9;

/// Raw amplitudes as written by the user, before rescaling.
#[derive(Clone, Debug, PartialEq)]
pub struct InitSpec {
    pub b0: Complex64,
    pub levels: Vec<(i64, Complex64)>,
    label: Option<&'static str>,
}

impl InitSpec {
    pub fn ground() -> Self {
        Self {
            b0: Complex64::new(1.0, 0.0),
            levels: Vec::new(),
            label: Some("ground"),
        }
    }

    /// Equal weight on the single level and ladder level 0.
    pub fn superposition() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            b0: a,
            levels: vec![(0, a)],
            label: Some("superposition"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        match s {
            "ground" => Ok(Self::ground()),
            "superposition" => Ok(Self::superposition()),
            _ => match s.strip_prefix("file:") {
                Some(path) => Self::load(Path::new(path)),
                None => Self::parse_inline(s),
            },
        }
    }

    /// `b0=re,im;n=re,im;...`. Whitespace is ignored and missing `b0` means 0.
    pub fn parse_inline(s: &str) -> Result<Self, CliError> {
        let mut b0 = None;
        let mut levels = Vec::new();
        for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| usage(format!("init entry '{item}' is not KEY=RE,IM")))?;
            let (re, im) = value
                .split_once(',')
                .ok_or_else(|| usage(format!("init entry '{item}' is not KEY=RE,IM")))?;
            let amp = Complex64::new(number(re)?, number(im)?);
            set_entry(&mut b0, &mut levels, key.trim(), amp)?;
        }
        Self::finish(b0, levels)
    }

    /// Reads a state file: `#` comments, a `b0,re,im` row and `n,re,im` rows.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read init file {}: {e}", path.display())))?;
        Self::parse_table(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn parse_table(text: &str) -> Result<Self, CliError> {
        let mut b0 = None;
        let mut levels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let [key, re, im] = fields.as_slice() else {
                return Err(usage(format!(
                    "line {}: expected three fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            };
            let amp = Complex64::new(number(re)?, number(im)?);
            set_entry(&mut b0, &mut levels, key, amp)
                .map_err(|e| usage(format!("line {}: {e}", lineno + 1)))?;
        }
        Self::finish(b0, levels)
    }

    fn finish(b0: Option<Complex64>, mut levels: Vec<(i64, Complex64)>) -> Result<Self, CliError> {
        levels.sort_by_key(|&(n, _)| n);
        if let Some(w) = levels.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(usage(format!("level {} given twice", w[0].0)));
        }
        Ok(Self {
            b0: b0.unwrap_or_default(),
            levels,
            label: None,
        })
    }

    /// The validated, unit-norm state.
    pub fn state(&self) -> Result<InitialState, CliError> {
        Ok(InitialState::with_tolerance(
            self.b0,
            self.levels.iter().copied(),
            LOAD_TOLERANCE,
        )?)
    }

    /// A spelling of this spec that [`InitSpec::parse`] maps back to the
    /// same amplitudes bit for bit.
    pub fn canonical(&self) -> String {
        if let Some(label) = self.label {
            return label.to_string();
        }
        let mut s = format!("b0={},{}", self.b0.re, self.b0.im);
        for (n, a) in &self.levels {
            let _ = write!(s, ";{n}={},{}", a.re, a.im);
        }
        s
    }
}

fn set_entry(
    b0: &mut Option<Complex64>,
    levels: &mut Vec<(i64, Complex64)>,
    key: &str,
    amp: Complex64,
) -> Result<(), CliError> {
    if key == "b0" {
        if b0.replace(amp).is_some() {
            return Err(usage("b0 given twice".into()));
        }
        return Ok(());
    }
    let n = key
        .parse::<i64>()
        .map_err(|_| usage(format!("'{key}' is neither b0 nor a level index")))?;
    levels.push((n, amp));
    Ok(())
}

fn number(s: &str) -> Result<f64, CliError> {
    let x = s
        .trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("'{}' is not a number", s.trim())))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("amplitude '{}' is not finite", s.trim())))
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_states() {
        let g = InitSpec::parse("ground").unwrap().state().unwrap();
        assert_eq!(g.b0(), Complex64::new(1.0, 0.0));
        assert!(g.c0().is_empty());
        let s = InitSpec::parse("superposition").unwrap().state().unwrap();
        assert!((s.b0().norm_sqr() - 0.5).abs() < 1e-15);
        assert!((s.c0_at(0).norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inline_round_trips_through_canonical() {
        let spec = InitSpec::parse("b0=0.6,0; -1=0,0.48 ; 2=0.64,0").unwrap();
        assert_eq!(spec.levels.len(), 2);
        let again = InitSpec::parse(&spec.canonical()).unwrap();
        assert_eq!(again, spec);
        assert!((spec.state().unwrap().probability() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn table_with_comments_and_mixed_separators() {
        let text = "# state\nb0, 0.6, 0.0\n-1 0.0 0.48\n\n2,0.64,0\n";
        let spec = InitSpec::parse_table(text).unwrap();
        assert_eq!(
            spec,
            InitSpec::parse("b0=0.6,0;-1=0,0.48;2=0.64,0").unwrap()
        );
    }

    #[test]
    fn load_tolerance_is_enforced() {
        let slightly_off = InitSpec::parse("b0=1.0000000001,0").unwrap();
        assert!(slightly_off.state().is_ok());
        let off = InitSpec::parse("b0=0.9,0").unwrap();
        assert!(matches!(off.state(), Err(CliError::Precondition(_))));
    }

    #[test]
    fn malformed_specs_are_usage_errors() {
        for bad in [
            "b0=1",
            "x=1,0",
            "b0=1,0;b0=0,1",
            "0=1,0;0=0,1",
            "b0=nan,0",
            "file:/nonexistent/x",
        ] {
            assert!(
                matches!(InitSpec::parse(bad), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
        assert!(InitSpec::parse_table("b0,1\n").is_err());
    }
}
