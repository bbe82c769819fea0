#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn program_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures().join("programs"))
        .unwrap()
        .filter_map(|e| {
            let path = e.unwrap().path();
            (path.extension()? == "vp").then(|| path.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

pub fn read_program(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("programs").join(format!("{name}.vp"))).unwrap()
}

pub fn read_golden(file: &str) -> String {
    std::fs::read_to_string(fixtures().join("golden").join(file)).unwrap()
}

/// Remove every `span` key so trees can be compared with span-free goldens.
pub fn strip_spans(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("span");
            map.values_mut().for_each(strip_spans);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_spans),
        _ => {}
    }
}

pub mod program_gen;
pub mod synth;
