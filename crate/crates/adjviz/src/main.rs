use std::process::ExitCode;

use clap::error::ErrorKind;

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {}", msg.trim().replace('\n', " "));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match adjviz::parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            // Message lines end at the blank line before the usage block.
            let text = e.render().to_string();
            let lines: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            let msg = lines.join(" ");
            return fail(msg.strip_prefix("error: ").unwrap_or(&msg));
        }
    };
    match adjviz::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e.to_string()),
    }
}
