use std::process::ExitCode;

use hcma::cli::{run, RunConfig};

const USAGE: &str = "\
usage: hcma <command> [--key value]... [--config FILE]

commands:
  tube      scan a built-in metric for its Grauert tube radius
            (--metric round|flat|zoll --zoll-eps E --geodesics N
             --tau-ceiling T --sigma-samples S --step H --out tube.json)
  foliate   solve the extremal-disk chart at a deformation parameter
            (--model quadric-like|flat --lambda RE[,IM] --modes N
             --grid G --z-extent X --z-count K --out chart.json)
  flow      trace the xi- or eta-flow of an exhaustion model
            (--model euclidean --dim N --field xi|eta --start re,im;re,im
             --t-end T --step H --out flow.csv)
  verify    replay a stored chart through the verification suite
            (--chart chart.json [--levi] [--tangency] --out verify.json)

exit status: 0 all verifications passed, 1 verification failure,
2 configuration error.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    }
    let config = match RunConfig::parse(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hcma: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hcma: {e}");
            ExitCode::from(1)
        }
    }
}
