//! Writes the synthetic corpus to a directory and prints the path of the
//! generated run configuration, ready for `abandon-scan --config <path> all`.

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo-corpus".to_string());
    let dir = std::path::PathBuf::from(dir);
    std::fs::create_dir_all(&dir).unwrap();
    let exp = abandon_scan_testkit::corpus::write_corpus(&dir);
    println!("{}", exp.config_path.display());
}
