//! Dry-run schedules: the codeword arguments each terminal sends per block.
//!
//! Rows are `block<TAB>terminal<TAB>codeword`, with the padding index shown
//! as `1` and block numbers starting at 1. Estimates held by a relay carry
//! its position as a superscript, as in `w0^2(3)`.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::rate::{CooperationPlan, Mode};

use super::backward::MAX_BACKWARD_RELAYS;

fn codeword(level: usize, args: &[String]) -> String {
    match args.split_first() {
        Some((first, rest)) if !rest.is_empty() => format!("x{level}({first}|{})", rest.join(",")),
        Some((first, _)) => format!("x{level}({first})"),
        None => format!("x{level}()"),
    }
}

/// Sliding-window schedule over `blocks` channel blocks along `plan`.
pub fn sliding_schedule(plan: &CooperationPlan, blocks: usize) -> Result<String> {
    if plan.mode != Mode::SingleDestination {
        return Err(Error::PlanMismatch("sliding-window schedules need a single-destination plan".into()));
    }
    if plan.pi.len() < 2 {
        return Err(Error::PlanMismatch("a plan needs a source and a destination".into()));
    }
    let top = plan.pi.len() - 2;
    if blocks < top + 1 {
        return Err(Error::BTooSmall { b: blocks, min: top + 1 });
    }
    let sources = blocks - top;
    let mut out = String::new();
    let _ = writeln!(out, "# scheme: sliding");
    let _ = writeln!(out, "# plan: {}", plan.pi.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    let _ = writeln!(out, "# blocks: {blocks}, source blocks: {sources}, codebook copies: {}", top + 1);
    let _ = writeln!(
        out,
        "# decoder at position i, end of block b: source block b-i+1 from blocks b-j, j=0..i-1, testing levels i-1-j..{top} (used)"
    );
    let _ = writeln!(out, "# alternative level reading: i-1-j..{} (not used)", top.saturating_sub(1));
    let _ = writeln!(out, "block\tterminal\tcodeword");
    for b in 1..=blocks as isize {
        for (l, &t) in plan.pi.iter().enumerate().take(top + 1) {
            let args: Vec<String> = (l..=top)
                .map(|q| {
                    let s = b - q as isize;
                    if s < 1 || s as usize > sources {
                        "1".to_string()
                    } else if l == 0 {
                        format!("w0({s})")
                    } else {
                        format!("w0^{l}({s})")
                    }
                })
                .collect();
            let _ = writeln!(out, "{b}\tT{t}\t{}", codeword(l, &args));
        }
    }
    Ok(out)
}

/// Backward-decoding schedule for `k <= 2` relays and block parameter `blocks`.
pub fn backward_schedule(k: usize, blocks: usize) -> Result<String> {
    if k > MAX_BACKWARD_RELAYS {
        return Err(Error::UnsupportedK(k));
    }
    if blocks == 0 {
        return Err(Error::BTooSmall { b: 0, min: 1 });
    }
    let b = blocks;
    let total = (b + 1).pow(k as u32);
    let mut out = String::new();
    let _ = writeln!(out, "# scheme: backward");
    let _ = writeln!(out, "# relays: {k}, B: {b}, channel blocks: {total}, source blocks: {}", b.pow(k as u32));
    let _ = writeln!(out, "# w(s,i): bin index of source block s at level i; w^j(s,i): the same index as estimated by Tj");
    let _ = writeln!(out, "block\tterminal\tcodeword");
    for t in 0..total {
        let mut rest = t;
        let digits: Vec<usize> = (0..k)
            .map(|_| {
                let d = rest % (b + 1);
                rest /= b + 1;
                d
            })
            .collect();
        let level_source = |i: usize| -> Option<usize> {
            let mut d = digits.clone();
            if i >= 2 {
                d[i - 2] = d[i - 2].checked_sub(1)?;
            }
            d.iter().all(|&x| x < b).then(|| 1 + d.iter().rev().fold(0, |acc, &x| acc * b + x))
        };
        for j in 0..=k {
            let args: Vec<String> = (j + 1..=k + 1)
                .map(|i| match level_source(i) {
                    None => "1".to_string(),
                    Some(s) if j == 0 => format!("w({s},{i})"),
                    Some(s) => format!("w^{j}({s},{i})"),
                })
                .collect();
            let _ = writeln!(out, "{}\tT{j}\t{}", t + 1, codeword(j, &args));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(text: &str) -> Vec<&str> {
        text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
    }

    #[test]
    fn sliding_single_relay() {
        let plan = CooperationPlan::new(Mode::SingleDestination, vec![0, 1, 2]);
        let text = sliding_schedule(&plan, 3).unwrap();
        assert_eq!(
            rows(&text),
            vec![
                "1\tT0\tx0(w0(1)|1)",
                "1\tT1\tx1(1)",
                "2\tT0\tx0(w0(2)|w0(1))",
                "2\tT1\tx1(w0^1(1))",
                "3\tT0\tx0(1|w0(2))",
                "3\tT1\tx1(w0^1(2))",
            ]
        );
    }

    #[test]
    fn backward_without_relays_is_one_block() {
        assert_eq!(rows(&backward_schedule(0, 3).unwrap()), vec!["1\tT0\tx0(w(1,1))"]);
        assert_eq!(backward_schedule(3, 2).unwrap_err().code(), "UnsupportedK");
    }
}
