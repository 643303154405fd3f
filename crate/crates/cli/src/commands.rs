use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;
use sunimodal_core::oracle::{
    alpha_limit_estimate, node_classes, sample_backward, sample_exhaustive, GridSystem, Strategy,
};
use sunimodal_core::symbolic::{
    backward_dense_bitrajectory, backward_dense_tail, invert_itinerary, itinerary, sft_from_node, SftDescriptor,
};
use sunimodal_core::{
    build_tower, build_tower_depth, compute_partition, locate_window, Error, Node, Registry, Settings, Tower,
    UnimodalMap, SCHEMA_VERSION,
};

use crate::args::{Cli, Command, MapArgs, OracleCmd, SymbolicCmd};
use crate::sweep;

pub const EXIT_OK: u8 = 0;
pub const EXIT_TRUNCATED: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Analysis(Error),
    Io(io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "{s}"),
            Failure::Analysis(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownFamily(_) => Failure::Usage(e.to_string()),
            other => Failure::Analysis(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn make_map(reg: &Registry, a: &MapArgs) -> Out<UnimodalMap> {
    Ok(UnimodalMap::new(reg.get(&a.family)?, a.mu)?)
}

fn print_json<T: Serialize>(v: &T) -> Out<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn exit_for(t: &Tower) -> u8 {
    if t.truncated {
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    }
}

fn cantor_node(t: &Tower, index: Option<usize>) -> Out<&Node> {
    match index {
        Some(i) => t.nodes.get(i).ok_or(Failure::Analysis(Error::OutOfRange { index: i as i64, max: t.p() as i64 })),
        None => t.nodes.iter().find(|n| n.cantor().is_some()).ok_or(Failure::Analysis(Error::NotCantor(0))),
    }
}

pub fn run(cli: Cli) -> Out<u8> {
    let cfg = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let reg = Registry::default();
    match cli.cmd {
        Command::Tower { map, max_depth } => {
            let m = make_map(&reg, &map)?;
            let t = match max_depth {
                Some(d) => build_tower_depth(&m, d, &cfg)?,
                None => build_tower(&m, &cfg)?,
            };
            print_json(&t)?;
            Ok(exit_for(&t))
        }
        Command::Partition { map, diagram } => {
            let m = make_map(&reg, &map)?;
            let t = build_tower(&m, &cfg)?;
            let code = exit_for(&t);
            let part = compute_partition(&t, &m)?;
            if diagram {
                println!("{}", part.diagram());
            } else {
                let levels: Vec<_> = part.u.iter().map(|l| json!({ "level": l.level, "set": l.set })).collect();
                print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "map": m.spec(),
                    "p": part.p(),
                    "levels": levels,
                    "v": part.v,
                    "truncated": part.truncated,
                }))?;
            }
            Ok(code)
        }
        Command::Salpha { map, x } => {
            let m = make_map(&reg, &map)?;
            let t = build_tower(&m, &cfg)?;
            let code = exit_for(&t);
            let part = compute_partition(&t, &m)?;
            let level = part.level(x)?;
            let s = part.salpha(x)?;
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "map": m.spec(),
                "x": x,
                "level": level,
                "salpha": s,
                "closed": s.is_closed(),
            }))?;
            Ok(code)
        }
        Command::Bifurcation(args) => {
            sweep::run(&reg, &cfg, &args)?;
            Ok(EXIT_OK)
        }
        Command::Window { family, period, lo, hi } => {
            let m = UnimodalMap::new(reg.get(&family)?, lo)?;
            let (start, end) = locate_window(&m, period, lo, hi, &cfg)?;
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "family": family,
                "period": period,
                "start": start,
                "end": end,
            }))?;
            Ok(EXIT_OK)
        }
        Command::Oracle(cmd) => oracle(&reg, &cfg, cmd),
        Command::Symbolic(cmd) => symbolic(&reg, &cfg, cmd),
    }
}

fn oracle(reg: &Registry, cfg: &Settings, cmd: OracleCmd) -> Out<u8> {
    match cmd {
        OracleCmd::Classes { map, n, eps } => {
            let m = make_map(reg, &map)?;
            let g = GridSystem::build(&m, n, eps, cfg)?;
            let classes: Vec<_> = node_classes(&g)
                .iter()
                .enumerate()
                .map(|(i, c)| json!({ "class": i, "cells": c.cells.len(), "set": c.set }))
                .collect();
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "map": m.spec(),
                "n": n,
                "eps_eff": g.eps_eff,
                "classes": classes,
            }))?;
        }
        OracleCmd::Grid { map, n, eps } => {
            let m = make_map(reg, &map)?;
            let g = GridSystem::build(&m, n, eps, cfg)?;
            let mut class = vec![-1i64; n];
            for (i, c) in node_classes(&g).iter().enumerate() {
                for &cell in &c.cells {
                    class[cell] = i as i64;
                }
            }
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["cell", "lo", "hi", "class"])?;
            for (i, k) in class.iter().enumerate() {
                let p = g.cell(i);
                w.write_record(&[i.to_string(), p.lo.to_string(), p.hi.to_string(), k.to_string()])?;
            }
            w.flush()?;
        }
        OracleCmd::Backward { map, x, depth, trails, seed, tail_frac, exhaustive, csv } => {
            let m = make_map(reg, &map)?;
            if !(tail_frac > 0.0 && tail_frac <= 1.0) {
                return Err(Failure::Usage(format!("tail-frac must lie in (0, 1], got {tail_frac}")));
            }
            let s = if exhaustive { sample_exhaustive(&m, x, depth, trails) } else { sample_backward(&m, x, depth, trails, seed) };
            if csv {
                let mut w = csv::Writer::from_writer(io::stdout().lock());
                w.write_record(["trail", "step", "x"])?;
                for (t, trail) in s.trails.iter().enumerate() {
                    for (k, v) in trail.iter().enumerate() {
                        w.write_record(&[t.to_string(), (k + 1).to_string(), v.to_string()])?;
                    }
                }
                w.flush()?;
            } else {
                let est = alpha_limit_estimate(&s, tail_frac);
                let clusters: Vec<_> =
                    est.clusters.iter().map(|c| json!({ "lo": c.lo, "hi": c.hi, "mid": c.mid() })).collect();
                print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "map": m.spec(),
                    "x": x,
                    "strategy": s.strategy,
                    "trails": s.trails.len(),
                    "empty_trails": s.empty,
                    "exhaustive_depth_cap": (s.strategy == Strategy::ExhaustiveTree).then_some(sunimodal_core::oracle::EXHAUSTIVE_MAX_DEPTH),
                    "clusters": clusters,
                }))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn symbolic(reg: &Registry, cfg: &Settings, cmd: SymbolicCmd) -> Out<u8> {
    let tower_for = |map: &MapArgs| -> Out<(UnimodalMap, Tower)> {
        let m = make_map(reg, map)?;
        let t = build_tower(&m, cfg)?;
        Ok((m, t))
    };
    match cmd {
        SymbolicCmd::Itinerary { map, x, len, node } => {
            let (m, t) = tower_for(&map)?;
            let n = cantor_node(&t, node)?;
            let cs = n.cantor().ok_or(Failure::Analysis(Error::NotCantor(n.index)))?;
            println!("{}", itinerary(&cs.partition, &m, x, len)?);
        }
        SymbolicCmd::Sft { map, word_len, node } => {
            let (m, t) = tower_for(&map)?;
            let n = cantor_node(&t, node)?;
            print_json(&sft_from_node(n, &m, word_len)?)?;
        }
        SymbolicCmd::Invert { map, word, node } => {
            let (m, t) = tower_for(&map)?;
            let n = cantor_node(&t, node)?;
            let cs = n.cantor().ok_or(Failure::Analysis(Error::NotCantor(n.index)))?;
            let i = invert_itinerary(&cs.partition, &m, &word)?;
            print_json(&json!({ "word": word, "lo": i.lo, "hi": i.hi, "width": i.len() }))?;
        }
        SymbolicCmd::Tail { alphabet, forbidden, head, depth_words } => {
            if !(1..=10).contains(&alphabet) {
                return Err(Failure::Usage(format!("alphabet must have 1..=10 symbols, got {alphabet}")));
            }
            let words: Vec<&str> = forbidden.iter().map(String::as_str).filter(|w| !w.is_empty()).collect();
            let sft = SftDescriptor::new(alphabet, &words);
            let b = backward_dense_tail(&sft, &head, depth_words)?;
            print_json(&json!({ "tail": b.tail, "head": b.head, "bisequence": b.to_string() }))?;
        }
        SymbolicCmd::Bitrajectory { map, x, depth, node } => {
            let (m, t) = tower_for(&map)?;
            let n = cantor_node(&t, node)?;
            let orbit = backward_dense_bitrajectory(n, &m, x, depth)?;
            print_json(&json!({ "x": x, "backward": orbit }))?;
        }
    }
    Ok(EXIT_OK)
}
