use clap::Parser;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let verbose = robodsp::cli::Cli::try_parse_from(&args).map_or(0, |c| c.verbose);
    env_logger::Builder::new()
        .filter_level(robodsp::cli::log_level(verbose))
        .parse_default_env()
        .init();
    let mut out = std::io::stdout().lock();
    std::process::exit(robodsp::cli::run(args, &mut out));
}
