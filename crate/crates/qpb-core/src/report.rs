//! Pass/fail check reports shared by the validation gates.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    /// set on failure: the table row / element that violated the law
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub subject: String,
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, ok: bool, witness: Option<String>) {
        self.lines.push(CheckLine {
            name: name.into(),
            ok,
            witness,
        });
    }

    /// record `ok` with a lazily-built witness
    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        let w = if ok { None } else { Some(witness()) };
        self.push(name, ok, w);
    }

    pub fn ok(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("audit: {}\n", self.subject));
        for l in &self.lines {
            if l.ok {
                out.push_str(&format!("  pass  {}\n", l.name));
            } else {
                match &l.witness {
                    Some(w) => out.push_str(&format!("  FAIL  {}: {}\n", l.name, w)),
                    None => out.push_str(&format!("  FAIL  {}\n", l.name)),
                }
            }
        }
        out.push_str(if self.ok() {
            "result: pass\n"
        } else {
            "result: FAIL\n"
        });
        out
    }

    /// merge another report in, prefixing its line names
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for l in other.lines {
            self.lines.push(CheckLine {
                name: format!("{}/{}", prefix, l.name),
                ok: l.ok,
                witness: l.witness,
            });
        }
    }
}
