//! Browser bindings: evaluate a diagram, fuse its spiders, and run the GHZ experiment.
//! The plain functions are what the native tests call; the `wasm_*` exports wrap them.

use std::fmt::Write as _;

use gct::algebra::zx_pair;
use gct::diagram::text::{parse_diagram, print_diagram};
use gct::diagram::{Diagram, Phase};
use gct::models::{fixtures, fmt_sig, AnyModel};
use gct::nonlocality::{ghz_correlations, mermin_report, parity};
use gct::rewrite::spider_fuse;
use gct::signatures::fixture;
use wasm_bindgen::prelude::*;

const DIGITS: usize = 12;

/// Models offered on the page.
pub const MODELS: [&str; 5] = ["qubit", "stab-qubit", "B", "P", "bialg-z2"];

fn model(name: &str) -> Result<AnyModel, String> {
    Ok(match name {
        "qubit" => AnyModel::Complex(fixtures::qubit()),
        "stab-qubit" => AnyModel::Complex(fixtures::stab_model()),
        "B" => AnyModel::Boolean(fixtures::bool_b()),
        "P" => AnyModel::Boolean(fixtures::bool_p()),
        "bialg-z2" => AnyModel::Complex(fixtures::cyclic_bialgebra(2)),
        other => return Err(format!("unknown model '{other}'")),
    })
}

fn parse(text: &str) -> Result<(Diagram, String), String> {
    let name = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find_map(|l| l.strip_prefix("signature "))
        .ok_or("the diagram names no signature")?
        .trim()
        .to_string();
    let sig = fixture(&name).map_err(|e| e.to_string())?;
    let d = parse_diagram(text, &sig).map_err(|e| e.to_string())?;
    Ok((d, name))
}

/// Interprets a diagram in the named model.
pub fn evaluate(text: &str, model_name: &str) -> Result<String, String> {
    let (d, _) = parse(text)?;
    let t = model(model_name)?.interpret(&d).map_err(|e| e.to_string())?;
    Ok(t.render(DIGITS))
}

/// Fuses same-coloured spiders and reports how many nodes went away.
pub fn fuse(text: &str) -> Result<String, String> {
    let (d, sig) = parse(text)?;
    let fused = spider_fuse(&d).map_err(|e| e.to_string())?;
    Ok(format!("# {} nodes -> {}\n{}", d.node_count(), fused.node_count(), print_diagram(&fused, &sig)))
}

/// Joint outcomes and parity of phased measurements on the three-qubit GHZ state,
/// followed by the Mermin verdict. Angles are in degrees.
pub fn ghz(angles: &str) -> Result<String, String> {
    let degrees: Vec<f64> = angles.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad angle '{}'", a.trim()))).collect::<Result<_, _>>()?;
    if !(2..=3).contains(&degrees.len()) {
        return Err("give two or three angles".into());
    }
    let pair = zx_pair();
    let phases: Vec<Phase> = degrees.iter().map(|d| Phase::angle(d.to_radians())).collect();
    let dist = ghz_correlations(&pair, &phases).map_err(|e| e.to_string())?;
    let n = degrees.len();
    let mut out = String::new();
    for (idx, p) in dist.probs.iter().enumerate() {
        let label: String = (0..n).rev().map(|k| if idx >> k & 1 == 1 { '1' } else { '0' }).collect();
        writeln!(out, "{label}  {}", fmt_sig(*p, DIGITS)).unwrap();
    }
    let par = parity(&dist, &gct::algebra::AbelianGroup::new(&[2]), n);
    writeln!(out, "parity even {} odd {}", fmt_sig(par[0], DIGITS), fmt_sig(par[1], DIGITS)).unwrap();
    let report = mermin_report(&pair, &Phase::Zero, &Phase::angle(std::f64::consts::FRAC_PI_2)).map_err(|e| e.to_string())?;
    writeln!(out, "Mermin settings: {}", if report.contradiction() { "no local hidden state fits" } else { "a local hidden state fits" }).unwrap();
    Ok(out)
}

#[wasm_bindgen]
pub fn wasm_evaluate(text: &str, model_name: &str) -> Result<String, JsValue> {
    evaluate(text, model_name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wasm_fuse(text: &str) -> Result<String, JsValue> {
    fuse(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wasm_ghz(angles: &str) -> Result<String, JsValue> {
    ghz(angles).map_err(|e| JsValue::from_str(&e))
}
