//! Command implementations: every experiment is a pure function from an
//! [`ExperimentConfig`] to a list of output documents. Outputs are built
//! fully in memory and written only after the run succeeds, so a failing
//! run leaves no partial files.

use crate::config::{parse_range, ExperimentConfig};
use anosovlab::carpet::{carpet_periodic_count, carpet_periodic_measure, BlowupRegistry, PeriodMode};
use anosovlab::entropy::{entropy_estimate, periodic_growth, CandidateScheme};
use anosovlab::measures::{homogeneity_probe, EmpiricalMeasure};
use anosovlab::rational::parse_rat;
use anosovlab::shadowing::{
    make_pseudo_orbit, make_sphere_pseudo_orbit, periodic_specification, seeded_periodic_point,
    shadow_periodic, shadow_periodic_sphere, ArithmeticMode, PseudoOrbit, SpecificationRequest,
};
use anosovlab::sphere::{sphere_periodic_points, SpherePoint};
use anosovlab::toral::{antipodal_periodic_points, per_counts, periodic_points, TorusPoint};
use anosovlab::{IntMatrix2, Space};
use anyhow::{bail, Context, Result};

/// One output document; the suffix distinguishes secondary outputs
/// derived from the primary `--out` path.
pub struct OutputFile {
    pub suffix: Option<&'static str>,
    pub content: String,
}

impl OutputFile {
    fn primary(content: String) -> Self {
        Self {
            suffix: None,
            content,
        }
    }

    fn secondary(suffix: &'static str, content: String) -> Self {
        Self {
            suffix: Some(suffix),
            content,
        }
    }
}

fn parse_matrix(cfg: &ExperimentConfig) -> Result<IntMatrix2> {
    Ok(IntMatrix2::parse(&cfg.matrix)?)
}

fn arithmetic_mode(cfg: &ExperimentConfig) -> Result<ArithmeticMode> {
    match cfg.mode.as_str() {
        "exact" => Ok(ArithmeticMode::Exact),
        "highprec" => Ok(ArithmeticMode::HighPrec { bits: 256 }),
        other => bail!("unknown arithmetic mode {other:?} (use exact or highprec)"),
    }
}

fn character_bits(cfg: &ExperimentConfig) -> u32 {
    match cfg.mode.as_str() {
        "highprec" => 256,
        _ => 128,
    }
}

fn space_of(cfg: &ExperimentConfig) -> Result<Space> {
    Ok(Space::parse(cfg.space.as_deref().unwrap_or("torus"))?)
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    match cfg.command.as_str() {
        "count" => cmd_count(cfg),
        "enumerate" => cmd_enumerate(cfg),
        "shadow" => cmd_shadow(cfg),
        "spec" => cmd_spec(cfg),
        "measure" => cmd_measure(cfg),
        "entropy" => cmd_entropy(cfg),
        "carpet" => cmd_carpet(cfg),
        "homogeneity" => cmd_homogeneity(cfg),
        other => bail!("unknown command {other:?}"),
    }
}

fn cmd_count(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let range = parse_range(cfg.n_range.as_deref().unwrap_or("1..12"))?;
    let verify = cfg.enumerate.unwrap_or(false);
    let mut csv = cfg.provenance_comment();
    csv.push_str(if verify {
        "n,per_n,per_n_minus,per_n_sphere,verified\n"
    } else {
        "n,per_n,per_n_minus,per_n_sphere\n"
    });
    for n in range {
        let (per, per_minus) = per_counts(&a, n);
        let sphere = a.pow(n).trace();
        if verify {
            // the constructors already fail on any count mismatch; the
            // explicit comparisons make the certificate visible here
            let pset = periodic_points(&a, n)?;
            let aset = antipodal_periodic_points(&a, n)?;
            let sset = sphere_periodic_points(&a, n)?;
            let ok = pset.len().to_string() == per.to_string()
                && aset.len().to_string() == per_minus.to_string()
                && sset.len().to_string() == sphere.to_string()
                && sset.two_to_one();
            csv.push_str(&format!("{n},{per},{per_minus},{sphere},{ok}\n"));
            if !ok {
                bail!("enumeration mismatch at n = {n}");
            }
        } else {
            csv.push_str(&format!("{n},{per},{per_minus},{sphere}\n"));
        }
    }
    Ok(vec![OutputFile::primary(csv)])
}

fn cmd_enumerate(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let n = cfg.n.context("enumerate needs --n")?;
    let kind = cfg.kind.as_deref().unwrap_or("periodic");
    let body = match kind {
        "periodic" => periodic_points(&a, n)?.to_csv(),
        "antipodal" => antipodal_periodic_points(&a, n)?.to_csv(),
        "sphere" => sphere_periodic_points(&a, n)?.to_csv(),
        other => bail!("unknown kind {other:?} (periodic, antipodal, sphere)"),
    };
    Ok(vec![OutputFile::primary(format!(
        "{}{}",
        cfg.provenance_comment(),
        body
    ))])
}

fn cmd_shadow(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let mode = arithmetic_mode(cfg)?;
    let po: PseudoOrbit = if let Some(path) = &cfg.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        PseudoOrbit::parse(&text)?
    } else {
        let n = cfg.length.context("shadow needs --length or --input")?;
        let noise = parse_rat(cfg.noise.as_deref().unwrap_or("1/1000"))?;
        let seed = cfg.seed.context("seeded generation needs --seed")?;
        match space_of(cfg)? {
            Space::Torus => {
                let x0 = match &cfg.x0 {
                    Some(text) => TorusPoint::parse(text)?,
                    None => seeded_periodic_point(&a, n as u32, seed)?,
                };
                make_pseudo_orbit(&a, &x0, n, &noise, seed)
            }
            Space::Sphere => {
                let s0 = match &cfg.x0 {
                    Some(text) => SpherePoint::parse(text)?,
                    None => SpherePoint::project(&seeded_periodic_point(&a, n as u32, seed)?),
                };
                make_sphere_pseudo_orbit(&a, &s0, n, &noise, seed)?
            }
        }
    };
    let result = match po.space() {
        Space::Torus => shadow_periodic(&a, &po, mode)?,
        Space::Sphere => shadow_periodic_sphere(&a, &po, mode)?,
    };
    let mut json = result.to_json();
    json["provenance"] = cfg.provenance_json();
    json["space"] = serde_json::json!(po.space().as_str());
    Ok(vec![OutputFile::primary(format!(
        "{}\n",
        serde_json::to_string_pretty(&json)?
    ))])
}

fn parse_segments(text: &str) -> Result<Vec<(TorusPoint, usize)>> {
    text.split(';')
        .map(|part| {
            let (point, len) = part
                .rsplit_once(':')
                .with_context(|| format!("segment {part:?} needs `x y:length`"))?;
            let p = TorusPoint::parse(point)?;
            let len: usize = len.trim().parse().context("segment length")?;
            Ok((p, len))
        })
        .collect()
}

fn cmd_spec(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let segments = parse_segments(cfg.segments.as_deref().context("spec needs --segments")?)?;
    let gap = cfg.gap.context("spec needs --gap")?;
    let req = SpecificationRequest { segments, gap };
    let result = periodic_specification(&a, &req)?;
    let mut json = result.shadow.to_json();
    json["provenance"] = cfg.provenance_json();
    json["segment_ranges"] = serde_json::json!(result.segment_ranges);
    json["segment_errors"] = serde_json::json!(result
        .segment_errors
        .iter()
        .map(|e| e.decimal_string(30))
        .collect::<Vec<_>>());
    json["connection_errors"] = serde_json::json!(result
        .connection_errors
        .iter()
        .map(|(s, e)| serde_json::json!({
            "start": s.decimal_string(30),
            "end": e.decimal_string(30)
        }))
        .collect::<Vec<_>>());
    Ok(vec![OutputFile::primary(format!(
        "{}\n",
        serde_json::to_string_pretty(&json)?
    ))])
}

fn cmd_measure(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let n = cfg.n.context("measure needs --n")?;
    let space = space_of(cfg)?;
    let starred = cfg.starred.unwrap_or(false);
    let k_max = cfg.k_max.unwrap_or(3);
    let measure = EmpiricalMeasure::periodic(&a, n, space, starred)?;
    let discrepancy = measure.discrepancy(k_max, character_bits(cfg));
    let csv = format!("{}{}", cfg.provenance_comment(), measure.to_csv());
    let mut json = discrepancy.to_json();
    json["provenance"] = cfg.provenance_json();
    Ok(vec![
        OutputFile::primary(csv),
        OutputFile::secondary("discrepancy.json", format!(
            "{}\n",
            serde_json::to_string_pretty(&json)?
        )),
    ])
}

fn cmd_entropy(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let scheme = cfg.scheme.as_deref().unwrap_or("grid");
    let range = parse_range(cfg.n_range.as_deref().context("entropy needs --n-range")?)?;
    let csv = match scheme {
        "growth" => {
            let rows = periodic_growth(&a, *range.end())?;
            let mut csv = cfg.provenance_comment();
            csv.push_str("n,per_n_sphere,lower_ok,upper_ok,log_rate\n");
            for row in rows.iter().filter(|r| range.contains(&r.n)) {
                csv.push_str(&format!(
                    "{},{},{},{},{:.10}\n",
                    row.n, row.sphere_count, row.lower_ok, row.upper_ok, row.log_rate
                ));
            }
            csv
        }
        "grid" | "periodic" => {
            let delta = parse_rat(cfg.delta.as_deref().unwrap_or("1/10"))?;
            let scheme = match scheme {
                "grid" => CandidateScheme::Grid {
                    mesh: cfg.mesh.unwrap_or(60),
                },
                _ => CandidateScheme::Periodic,
            };
            let fit = entropy_estimate(&a, space_of(cfg)?, &scheme, &delta, range)?;
            format!("{}{}", cfg.provenance_comment(), fit.to_csv())
        }
        other => bail!("unknown entropy scheme {other:?} (grid, periodic, growth)"),
    };
    Ok(vec![OutputFile::primary(csv)])
}

fn period_mode(cfg: &ExperimentConfig) -> Result<PeriodMode> {
    match cfg.period_mode.as_deref().unwrap_or("base") {
        "base" => Ok(PeriodMode::BasePeriod),
        "direction" => Ok(PeriodMode::DirectionPeriod),
        other => bail!("unknown period mode {other:?} (base or direction)"),
    }
}

fn cmd_carpet(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let path = cfg.registry.as_deref().context("carpet needs --registry")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let bases = BlowupRegistry::parse_bases(&text)?;
    let (registry, report) = BlowupRegistry::build(&a, &bases)?;
    let mut validation = report.to_json();
    validation["provenance"] = cfg.provenance_json();
    validation["orbits"] = serde_json::json!(registry
        .orbits
        .iter()
        .map(|o| serde_json::json!({
            "base": o.base.to_string(),
            "period": o.period,
            "lift": o.lift.as_str(),
        }))
        .collect::<Vec<_>>());
    let validation_out = format!("{}\n", serde_json::to_string_pretty(&validation)?);

    if cfg.validate_only.unwrap_or(false) {
        return Ok(vec![OutputFile::primary(validation_out)]);
    }

    let mode = period_mode(cfg)?;
    let range = parse_range(cfg.n_range.as_deref().unwrap_or("1..20"))?;
    let mut csv = cfg.provenance_comment();
    csv.push_str("n,per_n_sphere,per_n_carpet,diff_bound_ok,lower_bound_ok,contributions\n");
    for n in range {
        let count = carpet_periodic_count(&a, &registry, n, mode)?;
        csv.push_str(&count.csv_row());
        csv.push('\n');
    }

    let mut outputs = vec![
        OutputFile::primary(csv),
        OutputFile::secondary("validation.json", validation_out),
    ];
    if let Some(mn) = cfg.measure_n {
        let (measure, circle_mass) = carpet_periodic_measure(&a, &registry, mn, mode)?;
        let bits = character_bits(cfg);
        let carpet_d = measure.discrepancy(cfg.k_max.unwrap_or(3), bits);
        let plain = EmpiricalMeasure::periodic(&a, mn, Space::Sphere, false)?;
        let plain_d = plain.discrepancy(cfg.k_max.unwrap_or(3), bits);
        outputs.push(OutputFile::secondary(
            "measure.csv",
            format!("{}{}", cfg.provenance_comment(), measure.to_csv()),
        ));
        let json = serde_json::json!({
            "provenance": cfg.provenance_json(),
            "n": mn,
            "circle_mass_fraction": anosovlab::rational::format_rat(&circle_mass),
            "carpet_discrepancy": carpet_d.to_json(),
            "sphere_discrepancy": plain_d.to_json(),
        });
        outputs.push(OutputFile::secondary(
            "measure.json",
            format!("{}\n", serde_json::to_string_pretty(&json)?),
        ));
    }
    Ok(outputs)
}

fn cmd_homogeneity(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    let a = parse_matrix(cfg)?;
    let r = cfg.r.context("homogeneity needs --r")?;
    let range = parse_range(cfg.n_range.as_deref().unwrap_or("2..5"))?;
    let eps = parse_rat(cfg.epsilon.as_deref().unwrap_or("1/10"))?;
    let centers = cfg.centers.unwrap_or(50);
    let seed = cfg.seed.context("homogeneity needs --seed")?;
    let probe = homogeneity_probe(
        &a,
        r,
        range,
        &eps,
        centers,
        seed,
        space_of(cfg)?,
        cfg.starred.unwrap_or(false),
    )?;
    Ok(vec![OutputFile::primary(format!(
        "{}{}",
        cfg.provenance_comment(),
        probe.to_csv()
    ))])
}
