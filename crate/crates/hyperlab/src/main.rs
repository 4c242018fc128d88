fn main() {
    hyperlab::cli::run();
}
