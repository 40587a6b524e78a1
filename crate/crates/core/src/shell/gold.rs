use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use super::{read, ShellError};
use crate::bridge::Fragment;
use crate::kernel::{alpha_key, check, normalize, Context};

/// One line `lang<TAB>cat<TAB>sentence<TAB>term{;term}` of a gold file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldCase {
    pub file: String,
    pub line: usize,
    pub lang: String,
    pub cat: String,
    pub sentence: String,
    pub expected: Vec<String>,
}

pub fn parse_gold(text: &str, file: &str) -> Result<Vec<GoldCase>, ShellError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [lang, cat, sentence, expected] = fields.as_slice() else {
            return Err(ShellError::GoldFormat {
                file: file.to_string(),
                line: i + 1,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        };
        if lang.trim().is_empty() || cat.trim().is_empty() || sentence.trim().is_empty() {
            return Err(ShellError::GoldFormat {
                file: file.to_string(),
                line: i + 1,
                message: "language, category and sentence must be non-empty".into(),
            });
        }
        out.push(GoldCase {
            file: file.to_string(),
            line: i + 1,
            lang: lang.trim().to_string(),
            cat: cat.trim().to_string(),
            sentence: sentence.trim().to_string(),
            expected: expected
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub case: GoldCase,
    /// Printed normal forms of the constructed readings.
    pub got: Vec<String>,
    pub error: Option<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GoldReport {
    pub results: Vec<CaseResult>,
}

impl GoldReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn is_success(&self) -> bool {
        self.failed() == 0
    }
}

impl fmt::Display for GoldReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.results.iter().filter(|r| !r.passed()) {
            let c = &r.case;
            writeln!(f, "FAIL {}:{}: [{} {}] {}", c.file, c.line, c.lang, c.cat, c.sentence)?;
            writeln!(f, "  {}", r.error.as_deref().unwrap_or_default())?;
            for e in &c.expected {
                writeln!(f, "  - {e}")?;
            }
            for g in &r.got {
                writeln!(f, "  + {g}")?;
            }
        }
        write!(f, "{} passed, {} failed", self.passed(), self.failed())
    }
}

/// Compares constructed readings with the expectations as sets of terms up
/// to α-equivalence; printing only matters for the diff.
pub fn run_gold(fragment: &Fragment, cases: &[GoldCase]) -> Result<GoldReport, ShellError> {
    let target = fragment.target().as_ref();
    let mut results = Vec::new();
    for c in cases {
        let format_err = |message: String| ShellError::GoldFormat {
            file: c.file.clone(),
            line: c.line,
            message,
        };
        let ty = fragment.category_type(&c.cat).map_err(|e| format_err(e.to_string()))?;
        let mut expected = BTreeSet::new();
        for e in &c.expected {
            let t = fragment.parse_term(e).map_err(|e| format_err(e.to_string()))?;
            let t = check(target, &Context::new(), &t, &ty)
                .and_then(|t| normalize(target, &t))
                .map_err(|err| format_err(format!("expected term `{e}`: {err}")))?;
            expected.insert(alpha_key(&t));
        }
        let (got, error) = match fragment.construct(&c.lang, Some(&c.cat), &c.sentence) {
            Ok(readings) => {
                let keys: BTreeSet<String> = readings.iter().map(|r| alpha_key(&r.term)).collect();
                let printed = readings.iter().map(|r| fragment.print(&r.term)).collect();
                let error = (keys != expected).then(|| "readings differ from the expectation".to_string());
                (printed, error)
            }
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        results.push(CaseResult {
            case: c.clone(),
            got,
            error,
        });
    }
    Ok(GoldReport { results })
}

/// Runs every `*.gold` file of `dir`, in file name order.
pub fn run_gold_dir(fragment: &Fragment, dir: &Path) -> Result<GoldReport, ShellError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| ShellError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "gold"))
        .collect();
    files.sort();
    let mut report = GoldReport::default();
    for f in files {
        let cases = parse_gold(&read(&f)?, &f.display().to_string())?;
        report.results.extend(run_gold(fragment, &cases)?.results);
    }
    Ok(report)
}
