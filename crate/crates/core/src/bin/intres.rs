fn main() {
    std::process::exit(intres::cli::main_with_std());
}
