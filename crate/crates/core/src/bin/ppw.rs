fn main() {
    std::process::exit(ppw::cli::main());
}
