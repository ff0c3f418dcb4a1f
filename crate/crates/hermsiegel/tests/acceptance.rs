//! Acceptance run: one line per criterion. All comparisons are exact
//! rational or polynomial equalities, so the tolerance is zero throughout.
//! A criterion also fails when it exceeds its time limit.

use std::process::ExitCode;
use std::time::Duration;

use hermsiegel::verify::{run_suite, Suite, SuiteConfig, SuiteReport};

const SEED: u64 = 42;

struct Criterion {
    id: u8,
    title: &'static str,
    suite: Suite,
    primes: &'static [u64],
    limit: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 14] = [
    Criterion { id: 1, title: "functional equation, 200 random lattices", suite: Suite::FunctionalEq, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 2, title: "counting oracle equals Den(X) at X = (-q)^-k", suite: Suite::Oracle, primes: &[3], limit: secs(600) },
    Criterion { id: 3, title: "rank 2 almost self-dual closed forms", suite: Suite::ClosedForms, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 4, title: "induction formula, 50 instances", suite: Suite::Induction, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 5, title: "rank one derivative law", suite: Suite::RankOne, primes: &[3, 5], limit: secs(1) },
    Criterion { id: 6, title: "local modularity of Int_V(Λ)", suite: Suite::Modularity, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 7, title: "n = 3 vertical identity", suite: Suite::VerticalN3, primes: &[3], limit: secs(600) },
    Criterion { id: 8, title: "vanishing of the vertical transform", suite: Suite::Vanishing, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 9, title: "difference identities, 50 instances", suite: Suite::Differences, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 10, title: "special values of Den(X)", suite: Suite::SpecialValues, primes: &[3, 5], limit: secs(120) },
    Criterion { id: 11, title: "horizontal degree equals Den(-q)", suite: Suite::HorizontalDegree, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 12, title: "cancellation of unit summands", suite: Suite::Cancellation, primes: &[3, 5], limit: secs(600) },
    Criterion { id: 13, title: "Int' values, integral and nonnegative", suite: Suite::IntPrime, primes: &[3, 5], limit: secs(60) },
    Criterion { id: 14, title: "Eisenstein ratio q + 1", suite: Suite::Eisenstein, primes: &[3, 5], limit: secs(10) },
];

fn report(c: &Criterion, r: &SuiteReport) -> bool {
    let in_time = r.elapsed <= c.limit;
    let ok = r.passed() && in_time;
    let qs: Vec<String> = c.primes.iter().map(|p| p.to_string()).collect();
    println!(
        "AC{:<2} {} {} [{}] q in {{{}}}: {} checked, {} failed, tolerance 0 (exact), {:.2}s of {}s",
        c.id,
        if ok { "PASS" } else { "FAIL" },
        c.title,
        c.suite,
        qs.join(","),
        r.checked,
        r.failures.len(),
        r.elapsed.as_secs_f64(),
        c.limit.as_secs()
    );
    if !in_time {
        println!("      over the time limit");
    }
    for f in r.failures.iter().take(20) {
        println!("      failed: {f}");
    }
    if r.failures.len() > 20 {
        println!("      ... {} more", r.failures.len() - 20);
    }
    for n in &r.notes {
        println!("      note: {n}");
    }
    ok
}

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.trim_start_matches("AC").parse().ok()).collect();
    let mut failed = Vec::new();
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let cfg = SuiteConfig::new(c.primes, SEED).expect("odd primes");
        let ok = match run_suite(c.suite, &cfg) {
            Ok(r) => report(c, &r),
            Err(e) => {
                println!("AC{:<2} FAIL {} [{}]: {e}", c.id, c.title, c.suite);
                false
            }
        };
        if !ok {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        let ids: Vec<String> = failed.iter().map(|i| format!("AC{i}")).collect();
        println!("acceptance: failed {}", ids.join(", "));
        ExitCode::FAILURE
    }
}
