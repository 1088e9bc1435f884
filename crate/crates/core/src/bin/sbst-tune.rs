fn main() {
    let mut stdout = std::io::stdout().lock();
    match sbst_tune::experiment::run_cli(std::env::args_os(), &mut stdout) {
        Ok(()) => {}
        Err(sbst_tune::Error::Usage(text)) => {
            eprint!("{text}");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
