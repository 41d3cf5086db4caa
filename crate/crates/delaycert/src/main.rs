fn main() {
    std::process::exit(delaycert::run())
}
