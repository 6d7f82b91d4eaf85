//! Runs the `plotdata` command into a temporary directory and lists the files.

fn main() {
    let dir = std::env::temp_dir().join("fidsurv-plotdata");
    let data = dir.join("data.csv");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&data, "time,status\n1,1\n2,0\n3,1\n4,1\n5,0\n6,1\n7,0\n").unwrap();
    let code = fiducial_survival::cli::dispatch([
        "fidsurv",
        "plotdata",
        data.to_str().unwrap(),
        "--m",
        "200",
        "--draws",
        "20",
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for entry in std::fs::read_dir(dir.join("out")).unwrap() {
        println!("{}", entry.unwrap().path().display());
    }
}
