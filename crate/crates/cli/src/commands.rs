use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use pauli_geometry::dynamics::{
    classify_trajectory, evolve, is_semigroup_reachable, rates_for_target, RateSchedule, TrajectoryPoint,
};
use pauli_geometry::exact::{mesh_export, region_ratio, region_volume, Rational};
use pauli_geometry::mc::{fr_volume_mc, hs_volume_mc, ratio_mc, sample_region, SamplerConfig, VolumeEstimate};
use pauli_geometry::{choi_matrix, lambda_to_p, EigenvalueTriple, Membership, RegionExpr, RegionId};
use serde_json::{json, Value};

use crate::output::{emit, estimate_json, estimate_text, exact_json, rational_text, CliError, Document};
use crate::{Format, OutputArgs, SamplingArgs, VolumeMethod};

/// Round-trip tolerance for `evolve --target`.
const ROUND_TRIP_TOLERANCE: f64 = 1e-12;

fn parse_region(s: &str) -> Result<RegionExpr, CliError> {
    Ok(s.parse::<RegionExpr>()?)
}

fn sampler(args: &SamplingArgs) -> Result<SamplerConfig, CliError> {
    Ok(SamplerConfig::with_chunk_size(
        args.seed,
        args.samples,
        args.chunk_size,
    )?)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn membership_json(m: &Membership) -> Value {
    serde_json::to_value(m).expect("membership serializes")
}

fn csv_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Where a channel sits with respect to the dynamics that can produce it.
fn reachability(l: EigenvalueTriple, m: &Membership) -> &'static str {
    if !m.cpt {
        "not-a-channel"
    } else if is_semigroup_reachable(l) {
        "markovian-semigroup"
    } else if l.to_array().iter().all(|&x| x > 0.0) {
        "time-local-generator"
    } else {
        "memory-kernel-only"
    }
}

pub fn classify(l: [f64; 3], out: &OutputArgs) -> Result<(), CliError> {
    let l = EigenvalueTriple::from_array(l)?;
    let m = Membership::of(l);
    let p = lambda_to_p(l).p;
    let spectrum = choi_matrix(l).eigenvalues();
    let reach = reachability(l, &m);
    let body = match out.format {
        Format::Json => Document::new(
            "classify",
            json!({ "lambda": l.to_array() }),
            json!({
                "regions": membership_json(&m),
                "p": p,
                "choi_spectrum": spectrum,
                "reachability": reach,
            }),
        )
        .to_json(),
        Format::Csv => {
            let mut s = String::from("l1,l2,l3,PT,CPT,EBC,TLG,PDIV,CPDIV,p0,p1,p2,p3,reachability\n");
            let flags: Vec<_> = RegionId::ALL.iter().map(|&r| csv_bool(m.get(r))).collect();
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                l.l1,
                l.l2,
                l.l3,
                flags.join(","),
                p[0],
                p[1],
                p[2],
                p[3],
                reach
            )
            .unwrap();
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "lambda         = ({}, {}, {})", l.l1, l.l2, l.l3).unwrap();
            writeln!(s, "p              = ({}, {}, {}, {})", p[0], p[1], p[2], p[3]).unwrap();
            writeln!(
                s,
                "choi spectrum  = ({}, {}, {}, {})",
                spectrum[0], spectrum[1], spectrum[2], spectrum[3]
            )
            .unwrap();
            for r in RegionId::ALL {
                writeln!(s, "{:<6} {}", format!("{r}:"), m.get(r)).unwrap();
            }
            writeln!(s, "reachability   = {reach}").unwrap();
            s
        }
    };
    emit(out.out.as_deref(), &body)
}

enum VolumeResult {
    Exact(Rational),
    Estimate(VolumeEstimate),
}

pub fn volume(region: &str, method: VolumeMethod, sampling: &SamplingArgs, out: &OutputArgs) -> Result<(), CliError> {
    let expr = parse_region(region)?;
    let result = match method {
        VolumeMethod::Exact => VolumeResult::Exact(region_volume(&expr)?.value),
        VolumeMethod::Mc => VolumeResult::Estimate(hs_volume_mc(&expr, &sampler(sampling)?)),
        VolumeMethod::Fr => VolumeResult::Estimate(fr_volume_mc(&expr, &sampler(sampling)?)?),
    };
    let method_name = match method {
        VolumeMethod::Exact => "exact",
        VolumeMethod::Mc => "mc",
        VolumeMethod::Fr => "fr",
    };
    let body = match out.format {
        Format::Json => {
            let mut inputs = json!({ "region": expr.to_string(), "method": method_name });
            if method != VolumeMethod::Exact {
                inputs["samples"] = json!(sampling.samples);
                inputs["seed"] = json!(sampling.seed);
                inputs["chunk_size"] = json!(sampling.chunk_size);
            }
            let volume = match &result {
                VolumeResult::Exact(r) => exact_json(r)?,
                VolumeResult::Estimate(e) => estimate_json(e),
            };
            Document::new("volume", inputs, json!({ "volume": volume })).to_json()
        }
        Format::Csv => {
            let mut s = String::from("region,method,value,std_error,samples,seed\n");
            match &result {
                VolumeResult::Exact(r) => writeln!(s, "\"{expr}\",exact,{r},0,,").unwrap(),
                VolumeResult::Estimate(e) => writeln!(
                    s,
                    "\"{expr}\",{},{},{},{},{}",
                    e.method.tag(),
                    e.value,
                    e.std_error,
                    e.samples,
                    e.seed.unwrap_or_default()
                )
                .unwrap(),
            }
            s
        }
        Format::Text => match &result {
            VolumeResult::Exact(r) => format!("V({expr}) = {} [exact]\n", rational_text(r)),
            VolumeResult::Estimate(e) => format!("V({expr}) ≈ {}\n", estimate_text(e)),
        },
    };
    emit(out.out.as_deref(), &body)
}

/// How a table row is computed.
enum Quantity {
    Volume(&'static str),
    /// `V(num ∧ den) / V(den)`.
    Ratio(&'static str, &'static str),
    /// `1 − V(num ∧ den) / V(den)`.
    Complement(&'static str, &'static str),
}

struct RowSpec {
    name: &'static str,
    quantity: Quantity,
    reported: (i64, i64),
}

const TABLE: [RowSpec; 11] = [
    RowSpec {
        name: "V(PT)",
        quantity: Quantity::Volume("PT"),
        reported: (1, 1),
    },
    RowSpec {
        name: "V(CPT)",
        quantity: Quantity::Volume("CPT"),
        reported: (1, 3),
    },
    RowSpec {
        name: "V(CPT∩EBC)",
        quantity: Quantity::Volume("CPT,EBC"),
        reported: (1, 6),
    },
    RowSpec {
        name: "V(PT∩TLG)",
        quantity: Quantity::Volume("PT,TLG"),
        reported: (1, 8),
    },
    RowSpec {
        name: "TLG/CPT",
        quantity: Quantity::Ratio("TLG", "CPT"),
        reported: (3, 16),
    },
    RowSpec {
        name: "memory-kernel-only",
        quantity: Quantity::Complement("TLG", "CPT"),
        reported: (13, 16),
    },
    RowSpec {
        name: "EBC-in-TLG",
        quantity: Quantity::Ratio("EBC", "CPT,TLG"),
        reported: (1, 3),
    },
    RowSpec {
        name: "PDIV/CPT",
        quantity: Quantity::Ratio("PDIV", "CPT"),
        reported: (3, 4),
    },
    RowSpec {
        name: "CPDIV/CPT",
        quantity: Quantity::Ratio("CPDIV", "CPT"),
        reported: (3, 8),
    },
    RowSpec {
        name: "PDIV-in-TLG",
        quantity: Quantity::Ratio("PDIV", "CPT,TLG"),
        reported: (1, 1),
    },
    RowSpec {
        name: "CPDIV-in-TLG",
        quantity: Quantity::Ratio("CPDIV", "CPT,TLG"),
        reported: (1, 2),
    },
];

struct Row {
    name: &'static str,
    reported: Rational,
    exact: Option<Rational>,
    mc: VolumeEstimate,
}

fn compute_row(spec: &RowSpec, cfg: &SamplerConfig) -> Result<Row, CliError> {
    let (exact, mc) = match spec.quantity {
        Quantity::Volume(e) => {
            let expr = parse_region(e)?;
            let exact = expr.is_polytopal().then(|| region_volume(&expr)).transpose()?;
            (exact.map(|v| v.value), hs_volume_mc(&expr, cfg))
        }
        Quantity::Ratio(n, d) | Quantity::Complement(n, d) => {
            let (num, den) = (parse_region(n)?, parse_region(d)?);
            let exact = if num.and(&den).is_polytopal() {
                region_ratio(&num, &den)?
            } else {
                None
            };
            let mut mc = ratio_mc(&num, &den, cfg)?;
            if let Quantity::Complement(..) = spec.quantity {
                mc.value = 1.0 - mc.value;
                mc.hits = mc.samples - mc.hits;
                return Ok(Row {
                    name: spec.name,
                    reported: q(spec.reported.0, spec.reported.1),
                    exact: exact.map(|r| Rational::from_integer(1.into()) - r),
                    mc,
                });
            }
            (exact, mc)
        }
    };
    Ok(Row {
        name: spec.name,
        reported: q(spec.reported.0, spec.reported.1),
        exact,
        mc,
    })
}

pub fn table(sampling: &SamplingArgs, out: &OutputArgs) -> Result<(), CliError> {
    let cfg = sampler(sampling)?;
    let rows = TABLE
        .iter()
        .map(|spec| compute_row(spec, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let body = match out.format {
        Format::Json => {
            let rows_json = rows
                .iter()
                .map(|r| {
                    Ok(json!({
                        "quantity": r.name,
                        "reported": exact_json(&r.reported)?,
                        "exact": r.exact.as_ref().map(exact_json).transpose()?,
                        "mc": estimate_json(&r.mc),
                    }))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Document::new(
                "table",
                json!({
                    "samples": sampling.samples,
                    "seed": sampling.seed,
                    "chunk_size": sampling.chunk_size,
                }),
                json!({ "rows": rows_json }),
            )
            .to_json()
        }
        Format::Csv => {
            let mut s = String::from("quantity,reported,exact,mc,mc_stderr\n");
            for r in &rows {
                let exact = r.exact.as_ref().map_or_else(|| "n/a".to_string(), |e| e.to_string());
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.name, r.reported, exact, r.mc.value, r.mc.std_error
                )
                .unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:<20} {:<10} {:<18} {:<10} {:<10}\n",
                "quantity", "reported", "exact", "mc", "mc_stderr"
            );
            for r in &rows {
                let exact = r.exact.as_ref().map_or_else(|| "n/a".to_string(), rational_text);
                writeln!(
                    s,
                    "{:<20} {:<10} {:<18} {:<10.6} {:<10.6}",
                    r.name,
                    r.reported.to_string(),
                    exact,
                    r.mc.value,
                    r.mc.std_error
                )
                .unwrap();
            }
            writeln!(s, "({} samples per row, seed {})", sampling.samples, sampling.seed).unwrap();
            s
        }
    };
    emit(out.out.as_deref(), &body)
}

pub fn mesh(region: &str, out: Option<&Path>) -> Result<(), CliError> {
    let expr = parse_region(region)?;
    let mesh = mesh_export(&expr)?;
    let mut body = serde_json::to_string_pretty(&mesh).expect("mesh serializes");
    body.push('\n');
    emit(out, &body)
}

pub fn sample(region: &str, count: u64, seed: u64, chunk_size: u64, out: Option<&Path>) -> Result<(), CliError> {
    let expr = parse_region(region)?;
    let cfg = SamplerConfig::with_chunk_size(seed, count, chunk_size)?;
    let stream = sample_region(&expr, &cfg)?;
    if stream.is_low_acceptance() {
        eprintln!(
            "warning: low acceptance {:.2e} for region {expr}; sampling will be slow",
            stream.probe_acceptance()
        );
    }
    let mut body = String::from("l1,l2,l3\n");
    for l in stream {
        writeln!(body, "{},{},{}", l.l1, l.l2, l.l3).unwrap();
    }
    emit(out, &body)
}

fn read_schedule(path: &Path) -> Result<RateSchedule, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("cannot read schedule {}: {e}", path.display())))?;
    RateSchedule::from_json(&text)
        .map_err(|e| CliError::malformed(format!("malformed schedule {}: {e}", path.display())))
}

fn trajectory_json(points: &[TrajectoryPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                json!({
                    "time": p.time,
                    "lambda": p.lambda.to_array(),
                    "regions": membership_json(&p.regions),
                })
            })
            .collect(),
    )
}

pub fn evolve_schedule(path: &Path, time: Option<f64>, steps: Option<usize>, out: &OutputArgs) -> Result<(), CliError> {
    let schedule = read_schedule(path)?;
    let points = match time {
        Some(t) => {
            let lambda = evolve(&schedule, t)?;
            vec![TrajectoryPoint {
                time: t,
                lambda,
                regions: Membership::of(lambda),
            }]
        }
        None => classify_trajectory(&schedule, steps.unwrap_or(11))?,
    };
    let body = match out.format {
        Format::Json => Document::new(
            "evolve",
            json!({
                "schedule": serde_json::to_value(&schedule).expect("schedule serializes"),
                "time": time,
                "steps": if time.is_some() { None } else { Some(points.len()) },
            }),
            json!({ "trajectory": trajectory_json(&points) }),
        )
        .to_json(),
        Format::Csv => {
            let mut s = String::from("time,l1,l2,l3,PT,CPT,EBC,TLG,PDIV,CPDIV\n");
            for p in &points {
                let flags: Vec<_> = RegionId::ALL.iter().map(|&r| csv_bool(p.regions.get(r))).collect();
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    p.time,
                    p.lambda.l1,
                    p.lambda.l2,
                    p.lambda.l3,
                    flags.join(",")
                )
                .unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for p in &points {
                let members: Vec<_> = RegionId::ALL
                    .iter()
                    .filter(|&&r| p.regions.get(r))
                    .map(|r| r.tag())
                    .collect();
                writeln!(
                    s,
                    "t={:<8} lambda=({:.6}, {:.6}, {:.6})  in: {}",
                    p.time,
                    p.lambda.l1,
                    p.lambda.l2,
                    p.lambda.l3,
                    members.join(",")
                )
                .unwrap();
            }
            s
        }
    };
    emit(out.out.as_deref(), &body)
}

pub fn evolve_target(target: &[f64], t_star: f64, out: &OutputArgs) -> Result<(), CliError> {
    let l = EigenvalueTriple::from_array([target[0], target[1], target[2]])?;
    let rates = rates_for_target(l, t_star)?;
    let schedule = RateSchedule::constant(rates, t_star)?;
    let reached = evolve(&schedule, t_star)?;
    let max_error = reached
        .to_array()
        .iter()
        .zip(l.to_array())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let verified = max_error < ROUND_TRIP_TOLERANCE;
    let body =
        match out.format {
            Format::Json => Document::new(
                "evolve",
                json!({ "target": l.to_array(), "t_star": t_star }),
                json!({
                    "rates": rates.g,
                    "markovian": rates.is_markovian(),
                    "reached": reached.to_array(),
                    "max_error": max_error,
                    "verified": verified,
                }),
            )
            .to_json(),
            Format::Csv => format!(
                "g1,g2,g3,markovian,max_error,verified\n{},{},{},{},{},{}\n",
                rates.g[0],
                rates.g[1],
                rates.g[2],
                rates.is_markovian(),
                max_error,
                verified
            ),
            Format::Text => format!(
            "rates    = ({}, {}, {}) over t* = {t_star}{}\nreached  = ({}, {}, {})\nmax error = {max_error:e} ({})\n",
            rates.g[0],
            rates.g[1],
            rates.g[2],
            if rates.is_markovian() { "" } else { " (negative rate: non-Markovian)" },
            reached.l1,
            reached.l2,
            reached.l3,
            if verified { "verified" } else { "NOT verified" }
        ),
        };
    emit(out.out.as_deref(), &body)?;
    if verified {
        Ok(())
    } else {
        Err(CliError::unsupported(format!(
            "round trip error {max_error:e} exceeds tolerance"
        )))
    }
}
