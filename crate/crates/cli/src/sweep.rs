//! Parameter sweeps producing annotated bifurcation-diagram point clouds.

use std::io;

use rayon::prelude::*;
use sunimodal_core::{build_tower, Registry, Settings, Support, UnimodalMap};

use crate::args::SweepArgs;
use crate::commands::Failure;

type Row = (f64, f64, String);

fn rows_for(m: &UnimodalMap, cfg: &Settings, args: &SweepArgs) -> (Vec<Row>, Option<String>) {
    let mu = m.mu;
    let mut rows = Vec::new();
    let mut warning = None;
    if args.attractor_cloud {
        let mut x = m.iter_n(m.c, cfg.transient);
        for _ in 0..args.points {
            x = m.eval(x);
            rows.push((mu, x, "attractor".to_string()));
        }
    }
    if args.tower {
        match build_tower(m, cfg) {
            Ok(t) => {
                for node in t.nodes.iter().filter(|n| !n.is_attracting()) {
                    match &node.support {
                        Support::Cycle(c) => {
                            rows.extend(c.points.iter().map(|&p| (mu, p, "cycle_node".to_string())));
                        }
                        Support::Cantor(cs) => {
                            let pieces = cs.set.pieces();
                            let stride = (pieces.len() / args.points.max(1)).max(1);
                            rows.extend(
                                pieces.iter().step_by(stride).map(|p| (mu, 0.5 * (p.lo + p.hi), "cantor_node".to_string())),
                            );
                        }
                        _ => {}
                    }
                }
            }
            Err(e) => warning = Some(format!("mu={mu}: {e}")),
        }
    }
    if args.critical_lines > 0 {
        let orbit = m.critical_orbit(args.critical_lines);
        for k in 1..=args.critical_lines {
            rows.push((mu, orbit.get(k), format!("critical_line_{k}")));
        }
    }
    (rows, warning)
}

pub fn run(reg: &Registry, cfg: &Settings, args: &SweepArgs) -> Result<(), Failure> {
    if !(args.lo < args.hi) || args.steps == 0 {
        return Err(Failure::Usage("sweep needs lo < hi and steps >= 1".into()));
    }
    let family = reg.get(&args.family)?;
    let mus: Vec<f64> = if args.steps == 1 {
        vec![args.lo]
    } else {
        (0..args.steps).map(|i| args.lo + (args.hi - args.lo) * i as f64 / (args.steps - 1) as f64).collect()
    };
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["mu", "x", "class"])?;
    // Parallel per chunk, emitted in parameter order.
    for chunk in mus.chunks(64) {
        let results: Vec<Result<(Vec<Row>, Option<String>), Failure>> = chunk
            .par_iter()
            .map(|&mu| {
                let m = UnimodalMap::new(family.clone(), mu)?;
                Ok(rows_for(&m, cfg, args))
            })
            .collect();
        for r in results {
            let (rows, warning) = r?;
            if let Some(msg) = warning {
                eprintln!("warning: {msg}");
            }
            for (mu, x, class) in rows {
                w.write_record(&[mu.to_string(), x.to_string(), class])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
