//! Text reports. Complex numbers print as `a+bi` with 6 significant digits.

use std::fmt::Write;

use evoalg::analysis::{AnalysisReport, IdempotentRecord, SubalgebraRecord};
use evoalg::harness::{CampaignReport, ConjectureVerdict};
use evoalg::json::{SolutionRecord, SolveRecord};

/// `%g`-style rendering with 6 significant digits.
pub fn real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

pub fn complex([re, im]: [f64; 2]) -> String {
    let im_s = real(im.abs());
    let sign = if im.is_sign_negative() && im_s != "0" {
        '-'
    } else {
        '+'
    };
    format!("{}{sign}{im_s}i", real(re))
}

pub fn vector(v: &[[f64; 2]]) -> String {
    let parts: Vec<_> = v.iter().map(|&c| complex(c)).collect();
    format!("({})", parts.join(", "))
}

fn dims(d: &[usize]) -> String {
    let parts: Vec<_> = d.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn one_based(support: &[usize]) -> String {
    let parts: Vec<_> = support.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn solution_line(out: &mut String, i: usize, s: &SolutionRecord) {
    let mut flags = Vec::new();
    if s.real {
        flags.push("real");
    }
    if s.singular {
        flags.push("singular");
    }
    writeln!(
        out,
        "  [{i}] {} residual={} support={}{}",
        vector(&s.point),
        real(s.residual),
        one_based(&s.support),
        if flags.is_empty() {
            String::new()
        } else {
            format!(" {}", flags.join(" "))
        }
    )
    .unwrap();
}

pub fn solve(r: &SolveRecord, real_nontrivial: &[SolutionRecord]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "system={} n={} bezout={} solutions={} diverged={} failed={} retracked={}",
        r.kind,
        r.n,
        r.bezout_count,
        r.solutions.len(),
        r.diverged_paths,
        r.failed_paths,
        r.retracked_paths
    )
    .unwrap();
    for (i, s) in r.solutions.iter().enumerate() {
        solution_line(&mut out, i, s);
    }
    let reals: Vec<_> = real_nontrivial.iter().map(|s| vector(&s.point)).collect();
    writeln!(out, "real_nontrivial=[{}]", reals.join(", ")).unwrap();
    out
}

pub fn idempotents(records: &[IdempotentRecord]) -> String {
    let items: Vec<_> = records.iter().map(|r| vector(&r.element)).collect();
    let mut out = format!("idempotents=[{}]\n", items.join(", "));
    for r in records {
        writeln!(
            out,
            "  {} residual={} support={}",
            vector(&r.element),
            real(r.residual),
            one_based(&r.support)
        )
        .unwrap();
    }
    out
}

pub fn subalgebras(records: &[SubalgebraRecord]) -> String {
    let mut out = format!("one_dim_subalgebras={}\n", records.len());
    for r in records {
        writeln!(
            out,
            "  span {} eigenvalue={} residual={} support={}",
            vector(&r.spanning),
            complex(r.eigenvalue),
            real(r.residual),
            one_based(&r.support)
        )
        .unwrap();
    }
    out
}

pub fn analysis(r: &AnalysisReport) -> String {
    let mut out = String::new();
    writeln!(out, "n={} backend={}", r.n, r.backend).unwrap();
    writeln!(out, "regular={}", r.regular).unwrap();
    writeln!(out, "simple_candidate={}", r.simple_candidate).unwrap();
    writeln!(
        out,
        "solvable={} derived_series={}",
        r.solvable,
        dims(&r.derived_series_dims)
    )
    .unwrap();
    writeln!(
        out,
        "right_nilpotent={} power_chain={}",
        r.right_nilpotent,
        dims(&r.power_chain_dims)
    )
    .unwrap();
    out.push_str(&idempotents(&r.idempotents));
    let p = &r.idempotent_paths;
    writeln!(
        out,
        "paths: bezout={} diverged={} failed={}",
        p.bezout_count, p.diverged_paths, p.failed_paths
    )
    .unwrap();
    match &r.one_dim_subalgebras {
        Some(subs) => out.push_str(&subalgebras(subs)),
        None => out.push_str("one_dim_subalgebras=n/a (not regular)\n"),
    }
    match &r.obstruction {
        Some(o) => writeln!(
            out,
            "obstruction: idempotent {} with square rank {} (not a natural vector)",
            vector(&o.idempotent.element),
            o.square_rank
        )
        .unwrap(),
        None => out.push_str("obstruction=none\n"),
    }
    out
}

pub fn campaign(r: &CampaignReport) -> String {
    let mut out = String::new();
    let n = r.n.map_or_else(|| "mixed".to_string(), |n| n.to_string());
    writeln!(
        out,
        "campaign={} n={} seed={} trials={} passes={} shortfalls={} candidates={} violations={}",
        r.campaign,
        n,
        r.seed,
        r.trials,
        r.passes,
        r.solver_shortfalls,
        r.counterexample_candidates.len(),
        r.internal_violations
    )
    .unwrap();
    for c in &r.counterexample_candidates {
        writeln!(
            out,
            "  candidate trial={} seed={}: {}",
            c.trial,
            c.seed,
            c.evidence.join("; ")
        )
        .unwrap();
    }
    out
}

pub fn verdict(v: &ConjectureVerdict) -> String {
    format!(
        "solvable={} ({}) has_idempotent={} only_trivial={} complete={} consistent={}{}\n",
        v.solvable,
        if v.solvability_exact { "exact" } else { "numeric" },
        v.has_idempotent,
        v.only_trivial_solution,
        v.complete,
        v.consistent,
        if v.hard_inconsistency {
            " HARD-INCONSISTENCY"
        } else {
            ""
        }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(real(1.0), "1");
        assert_eq!(real(-0.5), "-0.5");
        assert_eq!(real(1.0 / 3.0), "0.333333");
        assert_eq!(real(123456.7), "123457");
        assert_eq!(real(1234567.0), "1.23457e6");
        assert_eq!(real(1.5e-12), "1.5e-12");
        assert_eq!(real(-0.0), "0");
    }

    #[test]
    fn complex_forms() {
        assert_eq!(complex([1.0, 0.0]), "1+0i");
        assert_eq!(complex([0.5, -2.0]), "0.5-2i");
        assert_eq!(complex([0.0, 1.0 / 3.0]), "0+0.333333i");
        assert_eq!(complex([-1.0, -0.0]), "-1+0i");
    }
}
