//! Small reporting harness for the acceptance checks.

use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

pub type Check<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);

/// Seed from `NFG_SEED` when set, else `default`.
pub fn env_seed(default: u64) -> u64 {
    std::env::var("NFG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(default)
}

/// Runs each check, prints one PASS/FAIL line per check, returns the number failed.
pub fn run(checks: &[Check]) -> usize {
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        failed += usize::from(!out.pass);
        println!("{} [{:>2}] {name}: {} ({ms:.1} ms)", if out.pass { "PASS" } else { "FAIL" }, i + 1, out.detail);
    }
    println!("{} of {} passed", checks.len() - failed, checks.len());
    failed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_failures() {
        let checks: Vec<Check> = vec![("ok", Box::new(|| outcome(true, "fine"))), ("bad", Box::new(|| outcome(false, "no")))];
        assert_eq!(run(&checks), 1);
    }
}
