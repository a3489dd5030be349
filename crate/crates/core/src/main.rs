fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    let code = nelliptic::cli::run(&args, &mut stdout.lock());
    std::process::exit(code);
}
