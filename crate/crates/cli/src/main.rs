use clap::Parser;

fn main() {
    let cli = qalife_cli::Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match qalife_cli::execute(cli, &mut stdout) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
