use std::fs;

use sha2::{Digest, Sha256};

include!("src/rank_table.rs");

const DATA: &str = "data/rank_constants.json";
const CHECKSUM: &str = "data/rank_constants.json.sha256";

fn main() {
    println!("cargo:rerun-if-changed={DATA}");
    println!("cargo:rerun-if-changed={CHECKSUM}");
    println!("cargo:rerun-if-changed=src/rank_table.rs");

    let bytes = fs::read(DATA).unwrap_or_else(|e| panic!("reading {DATA}: {e}"));
    let expected =
        fs::read_to_string(CHECKSUM).unwrap_or_else(|e| panic!("reading {CHECKSUM}: {e}"));
    let actual = hex::encode(Sha256::digest(&bytes));
    if actual != expected.trim() {
        panic!(
            "{DATA} checksum mismatch: file hashes to {actual}, {CHECKSUM} says {}",
            expected.trim()
        );
    }

    let json: serde_json::Value =
        serde_json::from_slice(&bytes).expect("rank constants are valid JSON");
    let rows = json["ranks"].as_array().expect("`ranks` array");
    assert_eq!(
        rows.len(),
        RANK_TABLE.len(),
        "{DATA}: wrong number of ranks"
    );
    for (row, &(rank, inv_mass, det)) in rows.iter().zip(RANK_TABLE.iter()) {
        let got = (
            row["rank"].as_u64(),
            row["inv_mass_max"].as_u64(),
            row["det_max"].as_u64(),
        );
        assert_eq!(
            got,
            (Some(rank as u64), Some(inv_mass), Some(det)),
            "{DATA} disagrees with src/rank_table.rs at rank {rank}"
        );
    }
}
