#![allow(dead_code)]

use std::path::PathBuf;

use jetnoether::Problem;

pub const CORPUS: &[&str] = &["kdv", "burgers", "fw", "wave", "euler"];

pub fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(format!("{name}.prob"))
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn problem(name: &str) -> Problem {
    Problem::parse(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}
