#include "tvec/cli/app.hpp"

int main(int argc, char** argv) { return tvec::cli::run_cli(argc, argv); }
