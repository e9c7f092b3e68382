use clap::Parser;

fn main() {
    let cli = qcad_cli::Cli::parse();
    match qcad_cli::run(&cli) {
        Ok(m) => {
            for f in &m.files {
                println!("wrote {}", f.path);
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
