fn main() { std::process::exit(drugqml_cli::run(&std::env::args().collect::<Vec<_>>())) }
