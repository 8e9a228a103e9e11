//! One function per subcommand, each turning flags and input into a report.

use invlim_core::arith::{rat, snf};
use invlim_core::hull::{build_injective_presentation, decompose};
use invlim_core::ladder::{big_div_chain, divisibility_certificate, point_map, run_ladder};
use invlim_core::rng::Seed;
use invlim_core::suites::{self, CERTIFICATE_CHECKS, LADDER_CHECKS};
use invlim_core::systems::EventuallyIntegerSeq;
use invlim_core::{Check, IntMatrix, Integer, Rational, Report};
use serde_json::{json, Value};

use crate::input::{self, read_document, InputError};
use crate::{Cli, Command};

const CONSTRUCTION: (&str, &str) = ("construction succeeds", "the construction is defined on this input");

type Result<T> = std::result::Result<T, InputError>;

pub fn run(cli: &Cli) -> Result<Report> {
    let mut report = Report::new(cli.command.name(), cli.seed);
    let (checks, output) = match cli.command {
        Command::Snf => snf_cmd(&required(cli)?)?,
        Command::Hull => hull_cmd(cli, &required(cli)?)?,
        Command::Thm1 => {
            let p = input::presentation(&required(cli)?)?;
            let out = summary(&p.matrix, p.ngens);
            (suites::submod_checks(&p.matrix, p.ngens, cli.seed, cli.samples, cli.max_d), out)
        }
        Command::Thm2 => {
            let p = input::presentation(&required(cli)?)?;
            let out = summary(&p.matrix, p.ngens);
            (suites::onto_checks(&p.matrix, p.ngens, cli.seed, cli.samples, cli.stages), out)
        }
        Command::Zerolim => match optional(cli)? {
            Some(text) => {
                let doc: input::ZerolimDoc = input::parse(&text)?;
                let checks = suites::zerolim_checks(&doc.chain, &doc.atom, cli.seed, cli.samples);
                (checks, None)
            }
            None => (suites::zerolim_suite(cli.seed, cli.samples, cli.stages), None),
        },
        Command::Ladder => ladder_cmd(cli, &required(cli)?)?,
        Command::Bigdiv => bigdiv_cmd(cli, optional(cli)?)?,
        Command::Ex6 => match optional(cli)? {
            Some(text) => {
                let seq: EventuallyIntegerSeq = input::parse(&text)?;
                let k = cli.k.into();
                let (checks, division) = suites::seq_division_checks(&seq, &k);
                let division = division.ok().map(|d| serde_json::to_value(d).expect("serializable"));
                (checks, Some(json!({ "seq": seq, "k": cli.k, "division": division })))
            }
            None => (suites::seq_suite(cli.seed, cli.samples, cli.samples), None),
        },
        Command::Selftest => (suites::selftest(cli.seed, &cli.primes), None),
    };
    report.checks = checks;
    report.output = output;
    Ok(report)
}

fn required(cli: &Cli) -> Result<String> {
    read_document(cli.input.as_deref(), true)?
        .ok_or_else(|| InputError("missing input document (use --input <path> or pipe JSON to stdin)".into()))
}

fn optional(cli: &Cli) -> Result<Option<String>> {
    read_document(cli.input.as_deref(), false)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn decimal_list(xs: &[Integer]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn summary(mat: &IntMatrix, ngens: usize) -> Option<Value> {
    let d = decompose(mat, ngens).ok()?;
    Some(json!({ "rank": d.rank, "invariant_factors": decimal_list(&d.invariant_factors) }))
}

fn snf_cmd(text: &str) -> Result<(Vec<Check>, Option<Value>)> {
    let a: IntMatrix = input::parse(text)?;
    let r = snf(&a);
    let out = json!({
        "u": r.u,
        "s": r.s,
        "v": r.v,
        "invariant_factors": decimal_list(&r.invariant_factors()),
    });
    Ok((suites::snf_checks(&a), Some(out)))
}

fn hull_cmd(cli: &Cli, text: &str) -> Result<(Vec<Check>, Option<Value>)> {
    let p = input::presentation(text)?;
    let mut checks = suites::hull_checks(&p.matrix, p.ngens, cli.seed, cli.samples);
    let output = match build_injective_presentation(&p.matrix, p.ngens) {
        Ok(pres) => {
            let relations: Vec<Vec<String>> = p
                .matrix
                .transpose()
                .to_rows()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect();
            Some(json!({ "ngens": p.ngens, "relations": relations, "presentation": pres }))
        }
        Err(e) => {
            checks.insert(0, Check::from_outcome(CONSTRUCTION.0, CONSTRUCTION.1, 1, Err(e)));
            None
        }
    };
    Ok((checks, output))
}

fn ladder_cmd(cli: &Cli, text: &str) -> Result<(Vec<Check>, Option<Value>)> {
    let doc = input::ladder(text)?;
    let (name, anchor) = LADDER_CHECKS[0];
    let ladder = point_map(&doc.x).and_then(|f0| run_ladder(&f0, &doc.chain, &doc.direct, cli.k, Seed(cli.seed)));
    Ok(match ladder {
        Ok(l) => {
            let cex = l.transcript.iter().find(|c| !c.holds).map(to_value);
            let check = Check::from_outcome(name, anchor, l.transcript.len() as u64, Ok(cex));
            (vec![check], Some(to_value(&l)))
        }
        Err(e) => (vec![Check::from_outcome(name, anchor, 0, Err(e))], None),
    })
}

fn bigdiv_cmd(cli: &Cli, text: Option<String>) -> Result<(Vec<Check>, Option<Value>)> {
    let chain = match big_div_chain(&cli.primes, cli.k) {
        Ok(c) => c,
        Err(e) => return Ok((vec![Check::from_outcome(CONSTRUCTION.0, CONSTRUCTION.1, 1, Err(e))], None)),
    };
    let Some(text) = text else {
        let checks = suites::certificate_suite(cli.seed, cli.samples, cli.k, &cli.primes);
        return Ok((checks, Some(json!({ "direct": chain }))));
    };
    let doc: input::CertificateDoc = input::parse(&text)?;
    let [(n0, a0), (n1, a1)] = CERTIFICATE_CHECKS;
    Ok(
        match divisibility_certificate(&doc.x, &doc.chain, &cli.primes, cli.k, Seed(cli.seed)) {
            Ok(cert) => {
                let ck = &chain.generators()[cli.k];
                let scale_ok = Rational::from_integer(cert.c.clone()) * ck == rat(1, 1);
                let checks = vec![
                    Check::from_outcome(n0, a0, 1, Ok((!cert.holds).then(|| to_value(&cert)))),
                    Check::from_outcome(n1, a1, 1, Ok((!scale_ok).then(|| json!({ "c": cert.c.to_string() })))),
                ];
                (checks, Some(json!({ "direct": chain, "certificate": cert })))
            }
            Err(e) => (
                vec![
                    Check::from_outcome(n0, a0, 0, Err(e.clone())),
                    Check::from_outcome(n1, a1, 0, Err(e)),
                ],
                Some(json!({ "direct": chain })),
            ),
        },
    )
}
