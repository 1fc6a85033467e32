//! Recomputes every figure of the two envelope analysis through the library
//! and checks it exactly.
//!
//! Printed values always come from library calls. Expected values are only
//! used for the comparison and are shown when a check fails.

use serde::Serialize;
use twoenv::analysis::{absolute_derivation, role_averaged_estimation_error};
use twoenv::{
    derive_aggregate_ratio, estimation_error, exact_expected_payoff, naive_gain_distribution,
    naive_switch_ev, omniscient_gain, third_party_envelope_ev, third_party_gain_distribution,
    verify_ratio_against_pair, EnvelopePair, GainDistribution, Money, Prior, Ratio, Role, Strategy,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub identity: String,
    pub value: String,
    pub expected: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: &'static str,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaperCheck {
    pub sections: Vec<Section>,
}

impl PaperCheck {
    pub fn passed(&self) -> bool {
        self.checks().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks().find(|c| !c.passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| s.checks.iter())
    }
}

fn usd(s: &str) -> Money {
    s.parse().expect("valid literal amount")
}

fn ratio(s: &str) -> Ratio {
    s.parse().expect("valid literal ratio")
}

pub fn render_distribution(d: &GainDistribution) -> String {
    let parts: Vec<String> = d
        .outcomes()
        .iter()
        .map(|o| format!("{}: {}", o.delta, o.prob))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn render_ratio(r: &Ratio) -> String {
    match r.to_decimal_string() {
        Some(d) if d != r.to_string() => format!("{r} = {d}"),
        _ => r.to_string(),
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn check<T: PartialEq>(
        &mut self,
        identity: impl Into<String>,
        value: &T,
        expected: &T,
        show: impl Fn(&T) -> String,
    ) {
        self.checks.push(Check {
            identity: identity.into(),
            value: show(value),
            expected: show(expected),
            passed: value == expected,
        });
    }

    fn dist(
        &mut self,
        identity: impl Into<String>,
        value: &GainDistribution,
        expected: &[(&str, &str)],
    ) {
        let matches = value.outcomes().len() == expected.len()
            && value.outcomes().iter().zip(expected).all(|(o, (d, p))| {
                let want = match d.strip_prefix('-') {
                    Some(abs) => twoenv::GainDelta::loss(&usd(abs)),
                    None => twoenv::GainDelta::gain(&usd(d)),
                };
                o.delta == want && o.prob == ratio(p)
            });
        let expected_text = expected
            .iter()
            .map(|(d, p)| format!("{d}: {p}"))
            .collect::<Vec<_>>()
            .join(", ");
        self.checks.push(Check {
            identity: identity.into(),
            value: render_distribution(value),
            expected: format!("{{{expected_text}}}"),
            passed: matches,
        });
    }

    fn fail(&mut self, identity: impl Into<String>, error: impl ToString) {
        self.checks.push(Check {
            identity: identity.into(),
            value: error.to_string(),
            expected: "a value".into(),
            passed: false,
        });
    }

    fn finish(self, title: &'static str) -> Section {
        Section {
            title,
            checks: self.checks,
        }
    }
}

pub fn paper_check() -> PaperCheck {
    let pair = EnvelopePair::new(usd("5.00")).expect("positive");
    let show_money = |m: &Money| m.to_string();
    let show_ratio = |r: &Ratio| render_ratio(r);
    let mut sections = Vec::new();

    let mut b = Builder::new();
    match naive_switch_ev(&usd("10.00")) {
        Ok(v) => b.check(
            "naive value of the other envelope when holding $10.00",
            &v,
            &usd("12.50"),
            show_money,
        ),
        Err(e) => b.fail("naive value of the other envelope when holding $10.00", e),
    }
    match naive_switch_ev(&usd("10.00")) {
        Ok(v) => b.check(
            "naive value as a multiple of the held amount",
            &v.ratio_to(&usd("10.00")).expect("nonzero"),
            &ratio("5/4"),
            show_ratio,
        ),
        Err(e) => b.fail("naive value as a multiple of the held amount", e),
    }
    sections.push(b.finish("Naive switching argument"));

    let mut b = Builder::new();
    for (held, expected) in [
        (Role::Smaller, [("-2.50", "1/2"), ("5.00", "1/2")]),
        (Role::Larger, [("-5.00", "1/2"), ("10.00", "1/2")]),
    ] {
        let observed = pair.amount(held);
        let identity = format!("naive player holding {observed}: gain from switching");
        match naive_gain_distribution(observed) {
            Ok(d) => b.dist(identity, &d, &expected),
            Err(e) => b.fail(identity, e),
        }
    }
    let third = third_party_gain_distribution(&pair);
    b.dist(
        "third party: gain from switching",
        &third,
        &[("5.00", "1/2"), ("-5.00", "1/2")],
    );
    b.check(
        "third party: expected gain from switching",
        &third.expected_gain(),
        &twoenv::GainDelta::zero(),
        |g| g.to_string(),
    );
    b.check(
        "third party: value of either envelope",
        &third_party_envelope_ev(&pair),
        &usd("7.50"),
        show_money,
    );
    b.dist(
        "game runner, player holds $5.00: gain from switching",
        &omniscient_gain(&pair, Role::Smaller),
        &[("5.00", "1")],
    );
    b.dist(
        "game runner, player holds $10.00: gain from switching",
        &omniscient_gain(&pair, Role::Larger),
        &[("-5.00", "1")],
    );
    sections.push(b.finish("Three perspectives on the $5.00 / $10.00 pair"));

    let mut b = Builder::new();
    let errors = (
        estimation_error(&pair, Role::Smaller),
        estimation_error(&pair, Role::Larger),
    );
    match errors {
        (Ok(small), Ok(large)) => {
            b.check(
                "estimation error holding $5.00 (believed $6.25 vs actual $10.00)",
                &small,
                &twoenv::GainDelta::loss(&usd("3.75")),
                |g| g.to_string(),
            );
            b.check(
                "estimation error holding $10.00 (believed $12.50 vs actual $5.00)",
                &large,
                &twoenv::GainDelta::gain(&usd("7.50")),
                |g| g.to_string(),
            );
            let magnitude = large.magnitude().ratio_to(&small.magnitude());
            b.check(
                "overestimate / underestimate magnitude",
                &magnitude,
                &Some(Ratio::integer(2)),
                |r| r.as_ref().map_or("undefined".into(), render_ratio),
            );
        }
        (Err(e), _) | (_, Err(e)) => b.fail("estimation error", e),
    }
    sections.push(b.finish("Asymmetric estimation error"));

    let mut b = Builder::new();
    let closed = derive_aggregate_ratio();
    b.check(
        "believed value, holding X (multiples of X)",
        &closed.believed_small_holder,
        &ratio("5/4"),
        show_ratio,
    );
    b.check(
        "believed value, holding 2X (multiples of X)",
        &closed.believed_large_holder,
        &ratio("5/2"),
        show_ratio,
    );
    b.check(
        "average believed value .5(1.25X + 2.5X)",
        &closed.believed_average,
        &ratio("15/8"),
        show_ratio,
    );
    b.check(
        "objective average value .5(X + 2X)",
        &closed.objective_average,
        &ratio("3/2"),
        show_ratio,
    );
    b.check(
        "ratio believed / objective",
        &closed.ratio,
        &ratio("5/4"),
        show_ratio,
    );
    match (verify_ratio_against_pair(&pair), absolute_derivation(&pair)) {
        (Ok(concrete), Ok(abs)) => {
            b.check(
                "average believed value on the $5.00 / $10.00 pair",
                &abs.believed_average,
                &usd("9.375"),
                |m| {
                    m.ratio_to(&Money::from_cents(100))
                        .and_then(|r| r.to_decimal_string())
                        .map_or_else(|| m.to_string(), |d| format!("${d}"))
                },
            );
            b.check(
                "objective average value on the $5.00 / $10.00 pair",
                &abs.objective_average,
                &usd("7.50"),
                show_money,
            );
            b.check(
                "derivation on the $5.00 / $10.00 pair matches the closed form",
                &concrete,
                &closed,
                |d| render_ratio(&d.ratio),
            );
        }
        (Err(e), _) | (_, Err(e)) => b.fail("derivation on the $5.00 / $10.00 pair", e),
    }
    match role_averaged_estimation_error(&pair) {
        Ok(avg) => b.check(
            "bias (believed - objective) equals the role-averaged estimation error",
            &avg,
            &closed.bias(),
            |r| format!("{r}"),
        ),
        Err(e) => b.fail("role-averaged estimation error", e),
    }
    sections.push(b.finish("Aggregate ratio"));

    let mut b = Builder::new();
    let point = Prior::point(usd("5.00")).expect("valid prior");
    let always = exact_expected_payoff(&point, &Strategy::AlwaysSwitch);
    let never = exact_expected_payoff(&point, &Strategy::NeverSwitch);
    b.check(
        "exact expected payoff, always switch",
        &always,
        &usd("7.50"),
        show_money,
    );
    b.check(
        "exact expected payoff, never switch",
        &never,
        &usd("7.50"),
        show_money,
    );
    sections.push(b.finish("Indifference"));

    PaperCheck { sections }
}

pub fn render_text(report: &PaperCheck) -> String {
    let mut out = String::new();
    for section in &report.sections {
        out.push_str(section.title);
        out.push('\n');
        for c in &section.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{mark}] {}: {}", c.identity, c.value));
            if !c.passed {
                out.push_str(&format!(" (expected {})", c.expected));
            }
            out.push('\n');
        }
    }
    let total = report.checks().count();
    match report.first_failure() {
        None => out.push_str(&format!("all {total} checks passed\n")),
        Some(c) => out.push_str(&format!("check failed: {}\n", c.identity)),
    }
    out
}
