fn main() {
    eprintln!("pipeline CLI under construction");
    std::process::exit(2);
}
