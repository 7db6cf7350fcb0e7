use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("ctxembed.h");
    // Regenerated on every build so the committed header can never drift
    // from the source; generation failures fail the build loudly.
    cbindgen::generate(&crate_dir)
        .expect("C header generation")
        .write_to_file(header);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
