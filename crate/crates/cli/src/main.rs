fn main() {
    std::process::exit(gevrey_cli::main_with(std::env::args_os()));
}
