use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Map, Value};

use birkhoff::bounds::{bregman_upper_bound, construction_count_report, permanent, vdw_lower_bound, SquareMatrix};
use birkhoff::certify::{enumerate_vertices, is_vertex_graph, is_vertex_rank};
use birkhoff::designs::{count_latin, random_latin, DoubleLatinSquare};
use birkhoff::json::{array_from_value, array_to_map, rational_from_value, rational_to_string, rational_to_value};
use birkhoff::{omega, sample, sigma, Array, Kind, PolytopeSpec, VertexCertificate};

use crate::{BoundsCommand, CliError, Command, Common, DesignCommand, VerifyMethod};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Verify { file, method, common } => verify(&file, method, &common),
        Command::Enumerate { kind, n, d, common } => enumerate(PolytopeSpec::new(kind.into(), n, d)?, &common),
        Command::Construct { kind, n, count, common } => construct(kind.into(), n, count, &common),
        Command::Designs { design } => match design {
            DesignCommand::Latin { t, count, common } => latin(t, count, &common),
            DesignCommand::DoubleLatin { n, common } => double_latin(n, &common),
        },
        Command::Bounds { bound } => match bound {
            BoundsCommand::Permanent { file, common } => bounds_permanent(&file, &common),
            BoundsCommand::Report { n, common } => {
                let report = construction_count_report(n)?;
                emit(&common, "bounds report", json!({ "n": n }), report.to_json())
            }
        },
        Command::Sample { kind, n, d, trials, common } => {
            let spec = PolytopeSpec::new(kind.into(), n, d)?;
            let report = sample::run_experiment(&spec, trials, common.seed)?;
            let params = json!({ "kind": spec.kind, "n": n, "d": d, "trials": trials });
            emit(&common, "sample", params, report.to_json())
        }
    }
}

/// Adds the `meta` block and writes pretty JSON to `--out` or stdout.
fn emit(common: &Common, command: &str, params: Value, body: Value) -> Result<()> {
    let mut doc = match body {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("result".into(), other);
            map
        }
    };
    doc.insert(
        "meta".into(),
        json!({
            "command": command,
            "seed": common.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "params": params,
        }),
    );
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
    text.push('\n');
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn verify(file: &Path, method: VerifyMethod, common: &Common) -> Result<()> {
    let (array, spec) = array_from_value(&read_json(file)?)?;
    let mut body = Map::new();
    body.insert("spec".into(), json!({ "kind": spec.kind, "n": spec.n, "d": spec.d }));
    let mut certificates = Map::new();
    let mut verdicts = Vec::new();
    let mut record = |cert: &VertexCertificate, certificates: &mut Map<String, Value>| {
        if !cert.witness_is_valid(&array, &spec) {
            return Err(CliError::Runtime("witness failed exact re-check".into()));
        }
        certificates.insert(cert.method.as_str().into(), cert.to_json(spec.kind));
        verdicts.push(cert.is_vertex);
        Ok(())
    };
    match method {
        VerifyMethod::Graph => record(&is_vertex_graph(&array, &spec)?, &mut certificates)?,
        VerifyMethod::Rank => record(&is_vertex_rank(&array, &spec)?, &mut certificates)?,
        VerifyMethod::Both => {
            record(&is_vertex_rank(&array, &spec)?, &mut certificates)?;
            match is_vertex_graph(&array, &spec) {
                Ok(cert) => record(&cert, &mut certificates)?,
                Err(birkhoff::Error::Precondition(reason)) => {
                    certificates.insert("graph".into(), json!({ "skipped": reason }));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    if verdicts.windows(2).any(|w| w[0] != w[1]) {
        return Err(CliError::Runtime("graph criterion and rank test disagree".into()));
    }
    body.insert("is_vertex".into(), json!(verdicts[0]));
    body.insert("certificates".into(), Value::Object(certificates));
    let params = json!({ "file": file.display().to_string(), "method": format!("{method:?}").to_lowercase() });
    emit(common, "verify", params, Value::Object(body))
}

fn enumerate(spec: PolytopeSpec, common: &Common) -> Result<()> {
    let vertices = enumerate_vertices(&spec)?;
    let denominators: BTreeSet<String> = vertices
        .iter()
        .flat_map(|v| v.entries().iter().map(|q| q.denom().to_string()))
        .collect();
    let mut denominators: Vec<String> = denominators.into_iter().collect();
    denominators.sort_by_key(|d| (d.len(), d.clone()));
    let body = json!({
        "vertex_count": vertices.len(),
        "zero_one_count": vertices.iter().filter(|v| v.is_zero_one()).count(),
        "denominators": denominators,
        "vertices": vertices.iter().map(|v| Value::Object(array_to_map(v, spec.kind))).collect::<Vec<_>>(),
    });
    let params = json!({ "kind": spec.kind, "n": spec.n, "d": spec.d });
    emit(common, "enumerate", params, body)
}

fn construction_doc(kind: Kind, seed: u64, array: &Array, cert: &VertexCertificate) -> Map<String, Value> {
    let mut doc = array_to_map(array, kind);
    doc.insert("seed".into(), json!(seed));
    doc.insert("support".into(), json!(array.support_indices().len()));
    doc.insert("certificate".into(), cert.to_json(kind));
    doc
}

fn construct(kind: Kind, n: usize, count: usize, common: &Common) -> Result<()> {
    if count == 0 {
        return Err(CliError::Invalid("count must be at least 1".into()));
    }
    let build = |seed: u64| -> Result<(Array, VertexCertificate)> {
        Ok(match kind {
            Kind::Omega => omega::construct_vertex(n, seed)?,
            Kind::Sigma => sigma::construct_sigma_vertex(n, seed)?,
        })
    };
    let params = json!({ "kind": kind, "n": n, "count": count });
    let seeds = (0..count as u64).map(|k| common.seed.wrapping_add(k));
    if count == 1 {
        let (a, cert) = build(common.seed)?;
        return emit(common, "construct", params, Value::Object(construction_doc(kind, common.seed, &a, &cert)));
    }
    let docs = seeds
        .map(|s| build(s).map(|(a, cert)| Value::Object(construction_doc(kind, s, &a, &cert))))
        .collect::<Result<Vec<_>>>()?;
    emit(common, "construct", params, json!({ "constructions": docs }))
}

fn latin(t: usize, count: bool, common: &Common) -> Result<()> {
    let square = random_latin(t, common.seed)?;
    let mut body = json!({ "order": t, "square": square.to_json() });
    if count {
        body["count"] = json!(count_latin(t)?);
    }
    emit(common, "designs latin", json!({ "t": t, "count": count }), body)
}

fn double_latin(n: usize, common: &Common) -> Result<()> {
    let square = DoubleLatinSquare::random_hamiltonian(n, common.seed)?;
    let body = json!({
        "order": n,
        "square": square.to_json(),
        "hamiltonian": square.is_hamiltonian(),
    });
    emit(common, "designs double-latin", json!({ "n": n }), body)
}

/// Accepts `[[..], ..]` or `{"matrix": [[..], ..]}` with numbers or `"p/q"` strings.
fn parse_matrix(value: &Value) -> Result<SquareMatrix> {
    let rows = value.get("matrix").unwrap_or(value);
    let rows = rows
        .as_array()
        .ok_or_else(|| CliError::Invalid("matrix must be an array of rows".into()))?;
    let parsed = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| CliError::Invalid("matrix rows must be arrays".into()))?
                .iter()
                .map(|v| rational_from_value(v).map_err(CliError::from))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SquareMatrix::new(parsed)?)
}

fn bounds_permanent(file: &Path, common: &Common) -> Result<()> {
    let m = parse_matrix(&read_json(file)?)?;
    let per = permanent(&m)?;
    let mut body = json!({ "order": m.order(), "permanent": rational_to_value(&per) });
    if m.is_doubly_stochastic() {
        let lower = vdw_lower_bound(m.order());
        body["van_der_waerden"] = json!({
            "bound": rational_to_string(&lower),
            "holds": per >= lower,
        });
    }
    if m.is_zero_one() {
        let b = bregman_upper_bound(&m)?;
        body["bregman"] = json!({
            "row_supports": b.row_supports,
            "approx": b.approx(),
            "holds": b.dominates(&per),
        });
    }
    emit(common, "bounds permanent", json!({ "file": file.display().to_string() }), body)
}
