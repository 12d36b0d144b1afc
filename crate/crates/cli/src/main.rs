mod commands;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, out) = commands::run(&argv);
    println!("{out}");
    if code != 0 {
        eprintln!("sumprod: exit {code}");
    }
    std::process::exit(code);
}
