//! Structured validation reports.
//!
//! Validators and job runners collect violations instead of failing fast, so
//! a run always surfaces everything it found. Rendering is deterministic:
//! lines appear in the order they were recorded, and recording order is
//! itself deterministic because all containers iterate in sorted order.

/// One structural violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Short kebab-case kind, e.g. `jacobi`, `cosimplicial-identity`.
    pub kind: String,
    /// Name of the object the violation belongs to.
    pub object: String,
    /// Human-readable detail with exact values.
    pub detail: String,
}

impl Violation {
    pub fn new(kind: &str, object: &str, detail: impl Into<String>) -> Self {
        Violation { kind: kind.into(), object: object.into(), detail: detail.into() }
    }
}

/// Ordered collection of violations plus informational output lines.
#[derive(Debug, Clone, Default)]
pub struct Report {
    violations: Vec<Violation>,
    info: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.info.extend(other.info);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn info(&self) -> &[String] {
        &self.info
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for line in &self.info {
            out.push_str(line);
            out.push('\n');
        }
        for v in &self.violations {
            out.push_str(&format!("[{}] {}: {}\n", v.kind, v.object, v.detail));
        }
        out.push_str(&format!(
            "{}: {} violation(s)\n",
            if self.is_clean() { "clean" } else { "FAILED" },
            self.violations.len()
        ));
        out
    }

    /// Machine rendering: one record per line, tab-separated, stable field
    /// order (`info <line>` or `violation <kind> <object> <detail>`),
    /// terminated by a summary record.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        for line in &self.info {
            out.push_str("info\t");
            out.push_str(&line.replace('\t', " ").replace('\n', " "));
            out.push('\n');
        }
        for v in &self.violations {
            out.push_str(&format!(
                "violation\t{}\t{}\t{}\n",
                v.kind,
                v.object,
                v.detail.replace('\t', " ").replace('\n', " ")
            ));
        }
        out.push_str(&format!("summary\tviolations\t{}\n", self.violations.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_stable_and_ordered() {
        let mut r = Report::new();
        r.note("header");
        r.push(Violation::new("kind-b", "obj", "second"));
        r.push(Violation::new("kind-a", "obj", "first recorded stays first"));
        let text = r.render_text();
        let machine = r.render_machine();
        assert!(text.contains("FAILED: 2 violation(s)"));
        let lines: Vec<&str> = machine.lines().collect();
        assert_eq!(lines[0], "info\theader");
        assert!(lines[1].starts_with("violation\tkind-b\tobj\t"));
        assert!(lines[2].starts_with("violation\tkind-a\tobj\t"));
        assert_eq!(lines[3], "summary\tviolations\t2");
    }

    #[test]
    fn clean_report() {
        let r = Report::new();
        assert!(r.is_clean());
        assert_eq!(r.render_machine(), "summary\tviolations\t0\n");
    }
}
