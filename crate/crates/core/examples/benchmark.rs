// The full experiment through the command-line entry point: one seeded
// split, three models, one comparison table.
//
//     cargo run --release --example benchmark

pub fn main() -> anyhow::Result<()> {
    let csv = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/imbalanced_1000.csv"
    );
    let dir = tempfile::tempdir()?;
    let out_dir = dir.path().to_str().unwrap_or(".");
    let args = ["ulasan", "--seed", "42", "--out", out_dir, "benchmark", csv];

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = ulasan::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    anyhow::ensure!(
        code == 0,
        "benchmark failed ({code}): {}",
        String::from_utf8_lossy(&err)
    );

    let mut files: Vec<String> = std::fs::read_dir(dir.path())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into())
        .collect();
    files.sort();
    println!("\nartifacts: {}", files.join(", "));
    print!(
        "\n{}",
        std::fs::read_to_string(dir.path().join("report_nb.txt"))?
    );
    Ok(())
}
