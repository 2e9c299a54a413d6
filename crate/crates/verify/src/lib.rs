//! Shared helpers for the acceptance checks: tolerance comparisons, the
//! published MSE tables, and a small pass/fail ledger.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Published average MSEs keyed by (target, n, α bits, k bits) → (UMVUE, MLE).
pub struct PublishedTables {
    cells: HashMap<(String, usize, u64, u64), (f64, f64)>,
}

impl PublishedTables {
    pub fn parse(tsv: &str) -> Self {
        let mut cells = HashMap::new();
        for line in tsv.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split('\t').collect();
            let num = |i: usize| f[i].parse::<f64>().expect("numeric table field");
            cells.insert(
                (f[0].to_owned(), f[1].parse().expect("integer n"), num(2).to_bits(), num(3).to_bits()),
                (num(4), num(5)),
            );
        }
        Self { cells }
    }

    pub fn get(&self, target: &str, n: usize, alpha: f64, k: f64) -> Option<(f64, f64)> {
        self.cells.get(&(target.to_owned(), n, alpha.to_bits(), k.to_bits())).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Collects individual comparisons for one criterion.
pub struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
    count: usize,
    started: Instant,
}

impl Default for Check {
    fn default() -> Self {
        Self::new()
    }
}

impl Check {
    pub fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new(), count: 0, started: Instant::now() }
    }

    pub fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.count > 0
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    /// One status line followed by indented notes and (up to `max`) failures.
    pub fn render(&self, id: u32, title: &str, max: usize) -> String {
        let mut s = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "[{status}] criterion {id}: {title} ({} of {} comparisons failed, {:.1} s)",
            self.failures.len(),
            self.count,
            self.elapsed_secs()
        );
        for n in &self.notes {
            let _ = writeln!(s, "         {n}");
        }
        for f in self.failures.iter().take(max) {
            let _ = writeln!(s, "         - {f}");
        }
        if self.failures.len() > max {
            let _ = writeln!(s, "         - ... {} more", self.failures.len() - max);
        }
        s
    }
}
